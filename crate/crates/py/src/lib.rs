//! Python module `pyhdi`: thin wrappers over `hdi_core`.
//!
//! Families, schemes, references and variance methods are passed by their
//! short codes (`"ssri"`, `"pw"`, `"avg"`, `"taylor"`, ...).

use std::str::FromStr;

use hdi_core::divergence::{renyi_divergence, standardized_sri, symmetrized_renyi};
use hdi_core::survey::{estimate_variance, ReplicationConfig, SurveyDataset, SurveyRecord, VarianceMethod};
use hdi_core::{GroupedSummary, IndexFamily, IndexRequest, MassFunction, ReferenceSpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: FromStr>(s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    T::from_str(s).map_err(err)
}

fn request(
    family: &str,
    alpha: f64,
    scheme: &str,
    reference: &str,
    standardize: bool,
) -> PyResult<IndexRequest> {
    Ok(IndexRequest::new(parse(family)?, alpha, parse(scheme)?)
        .with_reference(parse::<ReferenceSpec>(reference)?)
        .standardized(standardize))
}

fn pair(p: Vec<f64>, q: Vec<f64>) -> PyResult<(MassFunction, MassFunction)> {
    Ok((MassFunction::new(p).map_err(err)?, MassFunction::new(q).map_err(err)?))
}

/// Between-group index from group sizes and mean outcomes.
#[pyfunction]
#[pyo3(signature = (sizes, means, family="ssri", alpha=1.0, scheme="pw", reference="avg", standardize=false))]
fn index(
    sizes: Vec<f64>,
    means: Vec<f64>,
    family: &str,
    alpha: f64,
    scheme: &str,
    reference: &str,
    standardize: bool,
) -> PyResult<f64> {
    let g = GroupedSummary::unlabeled(sizes, means).map_err(err)?;
    request(family, alpha, scheme, reference, standardize)?.evaluate(&g).map_err(err)
}

#[pyfunction]
fn renyi(p: Vec<f64>, q: Vec<f64>, alpha: f64) -> PyResult<f64> {
    let (p, q) = pair(p, q)?;
    renyi_divergence(&p, &q, alpha).map_err(err)
}

#[pyfunction]
fn sri(p: Vec<f64>, q: Vec<f64>, alpha: f64) -> PyResult<f64> {
    let (p, q) = pair(p, q)?;
    symmetrized_renyi(&p, &q, alpha).map_err(err)
}

#[pyfunction]
fn ssri(p: Vec<f64>, q: Vec<f64>, alpha: f64) -> PyResult<f64> {
    let (p, q) = pair(p, q)?;
    standardized_sri(&p, &q, alpha).map_err(err)
}

/// Point estimate and standard error from survey microdata columns.
#[pyfunction]
#[pyo3(signature = (
    strata, psus, weights, groups, outcomes, family="ssri", alpha=1.0, scheme="pw",
    method="taylor", reps=500, fay=0.0, seed=0
))]
#[allow(clippy::too_many_arguments)]
fn variance(
    strata: Vec<String>,
    psus: Vec<String>,
    weights: Vec<f64>,
    groups: Vec<String>,
    outcomes: Vec<f64>,
    family: &str,
    alpha: f64,
    scheme: &str,
    method: &str,
    reps: usize,
    fay: f64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let n = strata.len();
    if [psus.len(), weights.len(), groups.len(), outcomes.len()].iter().any(|&l| l != n) {
        return Err(PyValueError::new_err("column lengths differ"));
    }
    let records = (0..n)
        .map(|i| {
            SurveyRecord::new(strata[i].clone(), psus[i].clone(), weights[i], groups[i].clone(), outcomes[i])
        })
        .collect();
    let d = SurveyDataset::new(records).map_err(err)?;
    let cfg = ReplicationConfig { n_reps: reps, fay_coefficient: fay, ..ReplicationConfig::with_seed(seed) };
    cfg.validate().map_err(err)?;
    let req = request(family, alpha, scheme, "avg", false)?;
    let est = estimate_variance(&d, parse::<VarianceMethod>(method)?, &cfg, &req).map_err(err)?;
    Ok((est.point, est.se))
}

/// Short codes of every index family.
#[pyfunction]
fn families() -> Vec<&'static str> {
    IndexFamily::ALL.iter().map(|f| f.code()).collect()
}

#[pymodule]
fn pyhdi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(index, m)?)?;
    m.add_function(wrap_pyfunction!(renyi, m)?)?;
    m.add_function(wrap_pyfunction!(sri, m)?)?;
    m.add_function(wrap_pyfunction!(ssri, m)?)?;
    m.add_function(wrap_pyfunction!(variance, m)?)?;
    m.add_function(wrap_pyfunction!(families, m)?)?;
    Ok(())
}
