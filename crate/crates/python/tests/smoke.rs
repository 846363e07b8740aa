use std::ffi::CString;

use gluing::gluing;
use pyo3::prelude::*;
use pyo3::types::PyDict;

#[test]
fn python_smoke_script_passes() {
    pyo3::append_to_inittab!(gluing);
    pyo3::prepare_freethreaded_python();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../python/smoke_test.py");
    let code = CString::new(std::fs::read_to_string(path).unwrap()).unwrap();
    Python::with_gil(|py| {
        let globals = PyDict::new(py);
        globals.set_item("__name__", "__main__").unwrap();
        globals.set_item("__file__", path).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("smoke script failed");
        }
    });
}
