//! Python bindings: the potential DSL, quiver classification, brackets and
//! cohomology scans, exposed as one module. All values cross the boundary
//! as strings (DSL text or JSON) so exactness is preserved end to end.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use necklace::algebra::{check_cy_pairing, check_unit_assoc, extract_algebra};
use necklace::bracket::{cyclic_derivative, necklace_bracket};
use necklace::complex::{Complex, Selector};
use necklace::dsl::{doc_of, parse_potential, print_potential, PotentialDoc};
use necklace::quiver::{
    canonical_potential_in, ext_of, phi_from_ext, shifted_alphabet, validate_quiver, ExtData,
    RawQuiver,
};
use necklace::{master_residual, EngineError};

fn py_err(e: EngineError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A potential document: a declared graded alphabet plus a cyclic series.
#[pyclass]
struct Potential {
    doc: PotentialDoc,
}

#[pymethods]
impl Potential {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Potential {
            doc: parse_potential(text).map_err(py_err)?,
        })
    }

    /// Canonical DSL text of the document.
    fn text(&self) -> String {
        print_potential(&self.doc)
    }

    /// Display form of {W, W}.
    fn master_residual(&self) -> PyResult<String> {
        let r = master_residual(&self.doc.alphabet, &self.doc.series).map_err(py_err)?;
        Ok(r.display(&self.doc.alphabet))
    }

    /// True iff {W, W} = 0.
    fn is_maurer_cartan(&self) -> PyResult<bool> {
        Ok(master_residual(&self.doc.alphabet, &self.doc.series)
            .map_err(py_err)?
            .is_zero())
    }

    /// Cyclic derivative by one variable, as a noncommutative polynomial.
    fn derive(&self, var: &str) -> PyResult<String> {
        let z = self.doc.alphabet.lookup(var).map_err(py_err)?;
        Ok(cyclic_derivative(&self.doc.alphabet, &self.doc.series, z).display(&self.doc.alphabet))
    }

    /// Necklace bracket with another series over the same alphabet.
    fn bracket(&self, other: &Potential) -> PyResult<String> {
        let b = necklace_bracket(&self.doc.alphabet, &self.doc.series, &other.doc.series)
            .map_err(py_err)?;
        Ok(b.display(&self.doc.alphabet))
    }

    /// Extract the algebra and run the unit/associativity and pairing
    /// checks; returns a JSON report.
    fn algebra(&self) -> PyResult<String> {
        let table = extract_algebra(&self.doc.alphabet, &self.doc.series).map_err(py_err)?;
        let unit = check_unit_assoc(&table);
        let pairing = check_cy_pairing(&table);
        let labels: Vec<&str> = table.basis.iter().map(|b| b.label.as_str()).collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "basis": labels,
            "checks": [unit, pairing],
        }))
        .map_err(json_err)
    }

    /// Cohomology dimensions of the deformation complex at `n`, weights
    /// `w_min..=w_max`; returns the JSON report.
    fn cohomology(&self, selector: &str, n: i64, w_min: i64, w_max: i64) -> PyResult<String> {
        let sel = Selector::parse(selector)
            .ok_or_else(|| PyValueError::new_err(format!("unknown selector {selector:?}")))?;
        let pot =
            necklace::bracket::Potential::new(self.doc.alphabet.clone(), self.doc.series.clone())
                .map_err(py_err)?;
        let report = Complex::new(pot)
            .cohomology_scan(sel, (n, n), w_min, w_max)
            .map_err(py_err)?;
        serde_json::to_string_pretty(&report).map_err(json_err)
    }
}

/// Canonical potential of a symmetric quiver (JSON in, DSL text out).
#[pyfunction]
fn canonical_potential(quiver_json: &str) -> PyResult<String> {
    let raw: RawQuiver = serde_json::from_str(quiver_json).map_err(json_err)?;
    let q = validate_quiver(&raw).map_err(py_err)?;
    let alpha = shifted_alphabet(&q).map_err(py_err)?;
    let w = canonical_potential_in(&q, &alpha).map_err(py_err)?;
    Ok(print_potential(&doc_of(&alpha, &w)))
}

/// Classification map: Ext data JSON in, quiver JSON out.
#[pyfunction]
fn classify(ext_json: &str) -> PyResult<String> {
    let ext: ExtData = serde_json::from_str(ext_json).map_err(json_err)?;
    let q = phi_from_ext(&ext).map_err(py_err)?;
    serde_json::to_string_pretty(&q.to_raw()).map_err(json_err)
}

/// Validate a quiver and report its Ext data as JSON.
#[pyfunction]
fn quiver_ext(quiver_json: &str) -> PyResult<String> {
    let raw: RawQuiver = serde_json::from_str(quiver_json).map_err(json_err)?;
    let q = validate_quiver(&raw).map_err(py_err)?;
    serde_json::to_string_pretty(&ext_of(&q)).map_err(json_err)
}

/// The resolved sign conventions document.
#[pyfunction]
fn conventions() -> String {
    necklace::conventions::conventions_report()
}

#[pymodule]
fn necklace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Potential>()?;
    m.add_function(wrap_pyfunction!(canonical_potential, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(quiver_ext, m)?)?;
    m.add_function(wrap_pyfunction!(conventions, m)?)?;
    Ok(())
}
