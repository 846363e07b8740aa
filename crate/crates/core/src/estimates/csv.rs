//! CSV output of decay fits.

use std::fmt::Write;

use super::suite::EstimateResult;

pub const HEADER: &str = "estimate_id,n,T_or_invphi,quantity,fitted_slope,fitted_intercept,r2,verdict";

/// Round-trippable decimal with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// One header row and one row per sample of the default-grid fit.
pub fn to_csv(results: &[EstimateResult]) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for r in results {
        let fit = &r.check.coarse;
        for (g, q) in r.grid_values.iter().zip(&r.quantities) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.id,
                r.spec.n,
                sig17(*g),
                sig17(*q),
                sig17(fit.slope),
                sig17(fit.intercept),
                sig17(fit.r2),
                r.verdict_label()
            );
        }
    }
    out
}
