use super::dataset::SurveyDataset;
use super::stats::{compute_sufficient_stats, SufficientStats};
use crate::divergence::{closed_form_renyi, closed_form_sri, BaseIndex, IndexRequest, WeightingScheme};
use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, regime, Regime};

/// Point estimate and its gradient with respect to the group totals.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPartials {
    pub point: f64,
    /// `∂ index / ∂ U0_k`.
    pub d_u0: Vec<f64>,
    /// `∂ index / ∂ U1_k`.
    pub d_u1: Vec<f64>,
}

/// Gradient of the index at the given totals. The Rényi family (including
/// Atkinson and the standardized SRI) uses analytic partials; the other
/// families use a five-point central difference on each total.
pub fn group_partials(
    stats: &SufficientStats,
    labels: &[String],
    req: &IndexRequest,
) -> Result<GroupPartials> {
    let g = stats.to_summary(labels)?;
    if let Some(j) = g.means().iter().position(|&y| y <= 0.0) {
        return Err(Error::ZeroMeanGroup { group: labels[j].clone() });
    }
    let (base, k) = req.decompose()?;
    let (sizes, means) = (g.sizes(), g.means());
    let (raw, mut d_u0, mut d_u1) = match base {
        BaseIndex::Renyi => {
            let (d0, d1) = renyi_partials(sizes, means, req.scheme, req.alpha);
            (closed_form_renyi(&g, req.scheme, req.alpha)?, d0, d1)
        }
        BaseIndex::SymmetrizedRenyi => {
            let (a, b) = match regime(req.alpha) {
                Regime::General => (req.alpha, 1.0 - req.alpha),
                _ => (1.0, 0.0),
            };
            let (a0, a1) = renyi_partials(sizes, means, req.scheme, a);
            let (b0, b1) = renyi_partials(sizes, means, req.scheme, b);
            let avg = |x: Vec<f64>, y: Vec<f64>| -> Vec<f64> {
                x.iter().zip(&y).map(|(x, y)| 0.5 * (x + y)).collect()
            };
            (closed_form_sri(&g, req.scheme, req.alpha)?, avg(a0, b0), avg(a1, b1))
        }
        BaseIndex::Generic(_) => return numeric_partials(stats, labels, req),
    };
    let point = match k {
        Some(k) => {
            let slope = k * (-k * raw).exp();
            for d in d_u0.iter_mut().chain(d_u1.iter_mut()) {
                *d *= slope;
            }
            -(-k * raw).exp_m1()
        }
        None => raw,
    };
    Ok(GroupPartials { point, d_u0, d_u1 })
}

/// Partials of the Rényi index with respect to `(U0_k, U1_k)`, all means positive.
fn renyi_partials(n: &[f64], y: &[f64], scheme: WeightingScheme, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let m = n.len();
    match scheme {
        WeightingScheme::PopulationWeighted => {
            let total: f64 = n.iter().sum();
            let burden: f64 = n.iter().zip(y).map(|(n, y)| n * y).sum();
            let ybar = burden / total;
            match regime(alpha) {
                Regime::One => {
                    let s: f64 = n.iter().zip(y).map(|(n, y)| n * y.ln()).sum();
                    let d0 = y.iter().map(|yk| (s - total * yk.ln()) / (total * total)).collect();
                    let d1 = y.iter().map(|yk| (1.0 - ybar / yk) / burden).collect();
                    (d0, d1)
                }
                Regime::Zero => {
                    let s: f64 = n.iter().zip(y).map(|(n, y)| n * y * y.ln()).sum();
                    let d0 = y.iter().map(|yk| (1.0 - yk / ybar) / total).collect();
                    let d1 = y.iter().map(|yk| -(s - burden * yk.ln()) / (burden * burden)).collect();
                    (d0, d1)
                }
                Regime::General => {
                    let beta = 1.0 - alpha;
                    let log_s = log_sum_exp(n.iter().zip(y).map(|(n, y)| n.ln() + beta * y.ln()));
                    let d0 =
                        y.iter().map(|yk| (1.0 / total - (beta * yk.ln() - log_s).exp()) / beta).collect();
                    let d1 = y
                        .iter()
                        .map(|yk| (1.0 / burden - (-alpha * yk.ln() - log_s).exp()) / alpha)
                        .collect();
                    (d0, d1)
                }
            }
        }
        WeightingScheme::EquallyWeighted => {
            let t: f64 = y.iter().sum();
            // d index / d ȳ_k, then chain through ȳ_k = U1_k / U0_k.
            let d_mean: Vec<f64> = match regime(alpha) {
                Regime::One => y.iter().map(|yk| (yk / t - 1.0 / m as f64) / yk).collect(),
                Regime::Zero => {
                    let s = y.iter().map(|y| y * y.ln()).sum::<f64>() / t;
                    y.iter().map(|yk| (yk.ln() - s) / t).collect()
                }
                Regime::General => {
                    let beta = 1.0 - alpha;
                    let log_v = log_sum_exp(y.iter().map(|y| beta * y.ln()));
                    y.iter().map(|yk| (yk / t - (beta * yk.ln() - log_v).exp()) / (alpha * yk)).collect()
                }
            };
            let d0 = d_mean.iter().zip(y).zip(n).map(|((d, yk), nk)| -d * yk / nk).collect();
            let d1 = d_mean.iter().zip(n).map(|(d, nk)| d / nk).collect();
            (d0, d1)
        }
    }
}

fn numeric_partials(stats: &SufficientStats, labels: &[String], req: &IndexRequest) -> Result<GroupPartials> {
    let eval = |s: &SufficientStats| -> Result<f64> { req.evaluate(&s.to_summary(labels)?) };
    let point = eval(stats)?;
    let m = stats.len();
    let mut d_u0 = vec![0.0; m];
    let mut d_u1 = vec![0.0; m];
    for which in 0..2 {
        for k in 0..m {
            let x = if which == 0 { stats.u0[k] } else { stats.u1[k] };
            let h = 1e-3 * x;
            let mut f = [0.0; 4];
            for (slot, step) in [2.0, 1.0, -1.0, -2.0].iter().enumerate() {
                let mut s = stats.clone();
                let target = if which == 0 { &mut s.u0[k] } else { &mut s.u1[k] };
                *target = x + step * h;
                f[slot] = eval(&s)?;
            }
            let d = (-f[0] + 8.0 * f[1] - 8.0 * f[2] + f[3]) / (12.0 * h);
            if which == 0 {
                d_u0[k] = d;
            } else {
                d_u1[k] = d;
            }
        }
    }
    Ok(GroupPartials { point, d_u0, d_u1 })
}

/// Per-record linearization scores `w_i (∂/∂U0_g + y_i ∂/∂U1_g)` for the
/// record's group `g`. Their PSU totals drive the Taylor variance.
pub fn linearization_scores(d: &SurveyDataset, req: &IndexRequest) -> Result<Vec<f64>> {
    let stats = compute_sufficient_stats(d);
    let partials = group_partials(&stats, d.groups(), req)?;
    Ok(scores_from_partials(d, &partials))
}

pub(crate) fn scores_from_partials(d: &SurveyDataset, p: &GroupPartials) -> Vec<f64> {
    d.records()
        .iter()
        .zip(d.record_group())
        .map(|(r, &g)| r.weight * (p.d_u0[g] + r.outcome * p.d_u1[g]))
        .collect()
}
