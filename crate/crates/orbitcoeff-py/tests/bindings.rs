use pyo3::prelude::*;
use pyo3::types::PyModule;

#[test]
fn module_functions_are_callable() {
    Python::attach(|py| {
        let m = PyModule::new(py, "orbitcoeff_py").unwrap();
        orbitcoeff_py::orbitcoeff_py(&m).unwrap();
        let s: String = m.getattr("divisor_sigma").unwrap().call1((4u32, 2i64)).unwrap().extract().unwrap();
        assert_eq!(s, "17");
        let v: String =
            m.getattr("local_spherical").unwrap().call1(("e6", "abelian", "2", "2")).unwrap().extract().unwrap();
        assert_eq!(v, "5");
        let p = m.getattr("Partition").unwrap().call1((vec![2usize, 2],)).unwrap();
        let d: usize = p.call_method0("dimension").unwrap().extract().unwrap();
        assert_eq!(d, 8);
        let err = m.getattr("local_spherical").unwrap().call1(("e8", "abelian", "2", "1")).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyNotImplementedError>(py));
    });
}
