use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use polespec::arrangement::{parse_arrangement, Arrangement};
use polespec::cli::{self, verify, Format};

/// Arrangement text (several lines) or a file path / builtin name.
fn load(source: &str, seed: u64, essential: bool) -> PyResult<Arrangement> {
    let a = if source.contains('\n') {
        let a = parse_arrangement(source).map_err(|e| PyValueError::new_err(e.to_string()))?;
        a.check_supported().map_err(|e| PyValueError::new_err(e.to_string()))?;
        if essential {
            a.require_essential().map_err(|e| PyValueError::new_err(e.to_string()))?;
        }
        a
    } else {
        cli::load(source, seed, essential).map_err(|e| PyValueError::new_err(e.to_string()))?
    };
    Ok(a)
}

/// Text of a builtin arrangement.
#[pyfunction]
#[pyo3(signature = (name, seed = 0))]
fn builtin(name: &str, seed: u64) -> PyResult<String> {
    let a = polespec::arrangement::builtin::by_name(name, seed).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(a.to_text())
}

/// Lattice invariants as a JSON document.
#[pyfunction]
fn lattice(source: &str) -> PyResult<String> {
    let a = load(source, 0, false)?;
    let doc = cli::cmd_lattice(&a).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(doc.render(Format::Structured))
}

/// `[mu, nu, rho]` of the first page for `0 ≤ k ≤ kmax`.
#[pyfunction]
#[pyo3(signature = (source, kmax = None))]
fn first_page(source: &str, kmax: Option<i64>) -> PyResult<Vec<Vec<i64>>> {
    let a = load(source, 0, true)?;
    let doc = cli::cmd_e1(&a, kmax.unwrap_or(verify::default_kmax(a.d())));
    Ok(doc.tables[0].rows.iter().take(3).map(|r| r.values.iter().map(|v| v.unwrap_or(0)).collect()).collect())
}

/// The full verification report as JSON.
#[pyfunction]
#[pyo3(signature = (source, kmax = None, seed = 0))]
fn verify_report(py: Python<'_>, source: &str, kmax: Option<i64>, seed: u64) -> PyResult<String> {
    let a = load(source, seed, true)?;
    let id = if source.contains('\n') { "<text>".to_string() } else { source.to_string() };
    let report = py
        .detach(|| verify::verify(&a, &id, kmax, seed))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(report.to_json())
}

#[pymodule]
fn polespec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(builtin, m)?)?;
    m.add_function(wrap_pyfunction!(lattice, m)?)?;
    m.add_function(wrap_pyfunction!(first_page, m)?)?;
    m.add_function(wrap_pyfunction!(verify_report, m)?)?;
    Ok(())
}
