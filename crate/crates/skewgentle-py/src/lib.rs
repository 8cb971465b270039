//! Python bindings: surfaces are passed as text in the surface file format,
//! reports come back as JSON strings.

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use serde_json::json;

use ::skewgentle::algebra::PathQuotient;
use ::skewgentle::cli::{dot, presentation_json, presentation_of, surface_summary};
use ::skewgentle::covering::{double_cover, quotient};
use ::skewgentle::format::{fixtures, parse_surface, print_surface, SurfaceFile};
use ::skewgentle::linefield::{cover_invariant_tuple, decide_cover_equiv, decide_tilting_equiv, invariant_tuple};
use ::skewgentle::surface::PointKind;
use ::skewgentle::Error;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.code().as_str()))
}

fn parse(text: &str) -> PyResult<SurfaceFile> {
    parse_surface(text).map_err(py_err)
}

fn to_string(v: serde_json::Value) -> String {
    serde_json::to_string(&v).expect("serializable")
}

/// Text of a bundled fixture surface.
#[pyfunction]
fn fixture(name: &str) -> PyResult<String> {
    fixtures::ALL
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.to_string())
        .ok_or_else(|| PyKeyError::new_err(name.to_string()))
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    fixtures::ALL.iter().map(|(n, _)| *n).collect()
}

/// Topology and dissection kind as JSON; raises ValueError on invalid input.
#[pyfunction]
fn validate(text: &str) -> PyResult<String> {
    let f = parse(text)?;
    Ok(to_string(surface_summary(&f.surface).map_err(py_err)?))
}

/// Quiver with relations and algebra dimension as JSON.
#[pyfunction]
fn quiver(text: &str) -> PyResult<String> {
    let f = parse(text)?;
    let (p, algebra, _) = presentation_of(&f.surface).map_err(py_err)?;
    let dim = PathQuotient::new(&algebra).map_err(py_err)?.dim();
    Ok(to_string(json!({"presentation": presentation_json(&p), "dimension": dim})))
}

#[pyfunction]
fn quiver_dot(text: &str) -> PyResult<String> {
    let f = parse(text)?;
    Ok(dot(&presentation_of(&f.surface).map_err(py_err)?.0))
}

/// Canonical double cover, as surface text with its involution.
#[pyfunction]
fn cover(text: &str) -> PyResult<String> {
    let f = parse(text)?;
    let (surface, involution, _) = double_cover(&f.surface).map_err(py_err)?;
    Ok(print_surface(&SurfaceFile { surface, involution: Some(involution), curves: Vec::new() }))
}

/// Quotient by the file's involution, as surface text.
#[pyfunction]
fn quotient_surface(text: &str) -> PyResult<String> {
    let f = parse(text)?;
    let involution = f.involution.as_ref().ok_or_else(|| PyValueError::new_err("file declares no involution"))?;
    let (surface, _) = quotient(&f.surface, involution).map_err(py_err)?;
    Ok(print_surface(&SurfaceFile { surface, involution: None, curves: Vec::new() }))
}

/// Invariant tuple, plus cover invariants when orbifold points are present.
#[pyfunction]
fn invariants(text: &str) -> PyResult<String> {
    let f = parse(text)?;
    let s = &f.surface;
    let mut v = json!({"tuple": invariant_tuple(s).map_err(py_err)?});
    if s.points.iter().any(|p| p.kind == PointKind::Orbifold) {
        v["cover"] = serde_json::to_value(cover_invariant_tuple(s).map_err(py_err)?).expect("serializable");
    }
    Ok(to_string(v))
}

/// Decision report for two surfaces; `mode` is "tilting" or "cover" (alias "ghat").
#[pyfunction]
#[pyo3(signature = (left, right, mode = "tilting"))]
fn compare(left: &str, right: &str, mode: &str) -> PyResult<String> {
    let (a, b) = (parse(left)?, parse(right)?);
    let report = match mode {
        "tilting" => decide_tilting_equiv(&a.surface, &b.surface),
        "ghat" | "cover" => decide_cover_equiv(&a.surface, &b.surface),
        m => return Err(PyValueError::new_err(format!("unknown mode {m}"))),
    }
    .map_err(py_err)?;
    Ok(to_string(serde_json::to_value(report).expect("serializable")))
}

#[pymodule]
fn skewgentle(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(quiver, m)?)?;
    m.add_function(wrap_pyfunction!(quiver_dot, m)?)?;
    m.add_function(wrap_pyfunction!(cover, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_surface, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
