pub mod family;
pub mod invariants;
pub mod mobius;
pub mod models;
pub mod plumb;
pub mod transition;
pub mod tree;
