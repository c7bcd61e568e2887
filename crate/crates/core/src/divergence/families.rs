//! Divergences between two nonnegative mass functions.
//!
//! Every family with poles at α ∈ {0, 1} switches to its closed-form limit
//! when α is within [`LIMIT_TOL`](crate::numeric::LIMIT_TOL) of a pole.

use super::mass::{check_same_len, MassFunction, NormalizedPair};
use crate::error::{Error, Result};
use crate::numeric::{regime, Regime};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("aversion parameter {alpha} is not finite")))
    }
}

fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite)
    }
}

/// Rényi-type transform `1 - exp(-k·v)`, written with `expm1`.
pub fn exp_standardize(value: f64, k: f64) -> f64 {
    -(-k * value).exp_m1()
}

/// Multiplier used by the symmetric standardization: α for α ≥ 1/2, 1-α otherwise.
pub fn symmetric_aversion(alpha: f64) -> f64 {
    if alpha >= 0.5 {
        alpha
    } else {
        1.0 - alpha
    }
}

pub(crate) fn renyi_on(pair: &NormalizedPair, alpha: f64) -> Result<f64> {
    let v = match regime(alpha) {
        Regime::One => pair.mean_log_deviation()?,
        Regime::Zero => pair.theil()?,
        Regime::General => -pair.log_chernoff(alpha)? / (alpha * (1.0 - alpha)),
    };
    finite(v.max(0.0))
}

pub(crate) fn symmetrized_renyi_on(pair: &NormalizedPair, alpha: f64) -> Result<f64> {
    let v = match regime(alpha) {
        Regime::One | Regime::Zero => 0.5 * (pair.mean_log_deviation()? + pair.theil()?),
        Regime::General => {
            let s = pair.log_chernoff(alpha)? + pair.log_chernoff(1.0 - alpha)?;
            -s / (2.0 * alpha * (1.0 - alpha))
        }
    };
    finite(v.max(0.0))
}

pub(crate) fn ref_invariant_sym_ge_on(pair: &NormalizedPair, alpha: f64) -> Result<f64> {
    let v = match regime(alpha) {
        Regime::One | Regime::Zero => 0.5 * (pair.mean_log_deviation()? + pair.theil()?),
        Regime::General => {
            let d = pair.chernoff_deficit(alpha)? + pair.chernoff_deficit(1.0 - alpha)?;
            d / (2.0 * alpha * (1.0 - alpha))
        }
    };
    finite(v.max(0.0))
}

/// Generalized Rényi (alpha–gamma) divergence `R_α(p‖q)`.
///
/// Invariant to rescaling either argument. At α = 1 it is the mean log
/// deviation `-Σ p̄ ln r̄`, at α = 0 the Theil index `Σ p̄ r̄ ln r̄`.
pub fn renyi_divergence(p: &MassFunction, q: &MassFunction, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    renyi_on(&NormalizedPair::new(p, q)?, alpha)
}

/// `(R_α(p‖q) + R_{1-α}(p‖q)) / 2`; the symmetrized Theil index at α ∈ {0, 1}.
pub fn symmetrized_renyi(p: &MassFunction, q: &MassFunction, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    symmetrized_renyi_on(&NormalizedPair::new(p, q)?, alpha)
}

/// Atkinson index `1 - exp(-α R_α(p‖q))`, defined for α > 0.
pub fn atkinson_index(p: &MassFunction, q: &MassFunction, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!("Atkinson index needs alpha > 0, got {alpha}")));
    }
    Ok(exp_standardize(renyi_divergence(p, q, alpha)?, alpha))
}

/// Standardized symmetrized Rényi index in `[0, 1)`.
///
/// Uses `1 - exp(-α SR_α)` for α ≥ 1/2 and `1 - exp(-(1-α) SR_α)` below,
/// so the value is symmetric about α = 1/2. Negative α follows the same
/// piecewise rule literally.
pub fn standardized_sri(p: &MassFunction, q: &MassFunction, alpha: f64) -> Result<f64> {
    let sr = symmetrized_renyi(p, q, alpha)?;
    Ok(exp_standardize(sr, symmetric_aversion(alpha)))
}

/// Kullback–Leibler divergences `(KL(p‖q), KL(q‖p))` on the raw (unnormalized) masses:
/// `Σ p_j (r_j - 1 - ln r_j)` and `Σ p_j (1 - r_j + r_j ln r_j)`.
pub fn kl_divergences(p: &MassFunction, q: &MassFunction) -> Result<(f64, f64)> {
    check_same_len(p, q)?;
    let mut forward = 0.0;
    let mut backward = 0.0;
    for (j, (&pj, &qj)) in p.values().iter().zip(q.values()).enumerate() {
        if pj == 0.0 || qj == 0.0 {
            return Err(Error::ZeroMassGroup { index: j });
        }
        let r = qj / pj;
        let lr = r.ln();
        forward += pj * (r - 1.0 - lr);
        backward += pj * (1.0 - r + r * lr);
    }
    Ok((finite(forward)?, finite(backward)?))
}

/// `p^α q^{1-α}` with the zero-mass conventions of the alpha family.
fn weighted_geometric(p: f64, q: f64, alpha: f64, index: usize) -> Result<f64> {
    match (p > 0.0, q > 0.0) {
        (true, true) => Ok((alpha * p.ln() + (1.0 - alpha) * q.ln()).exp()),
        (false, false) => Ok(0.0),
        (false, true) => {
            if alpha > 0.0 {
                Ok(0.0)
            } else {
                Err(Error::ZeroMassGroup { index })
            }
        }
        (true, false) => {
            if alpha < 1.0 {
                Ok(0.0)
            } else {
                Err(Error::ZeroMassGroup { index })
            }
        }
    }
}

/// Alpha divergence on the raw masses:
/// `1/(α(1-α)) Σ p_j [α + (1-α) r_j - r_j^{1-α}]`.
///
/// Not scale invariant; `D_α(cp‖cq) = c D_α(p‖q)`. The limits are the
/// Kullback–Leibler divergences of [`kl_divergences`] (α→1 gives KL(p‖q)).
pub fn alpha_divergence(p: &MassFunction, q: &MassFunction, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_same_len(p, q)?;
    let pairs = p.values().iter().zip(q.values()).enumerate();
    let v = match regime(alpha) {
        Regime::One => {
            let mut acc = 0.0;
            for (j, (&pj, &qj)) in pairs {
                acc += match (pj > 0.0, qj > 0.0) {
                    (true, true) => qj - pj - pj * (qj / pj).ln(),
                    (false, _) => qj,
                    (true, false) => return Err(Error::ZeroMassGroup { index: j }),
                };
            }
            acc
        }
        Regime::Zero => {
            let mut acc = 0.0;
            for (j, (&pj, &qj)) in pairs {
                acc += match (pj > 0.0, qj > 0.0) {
                    (true, true) => pj - qj + qj * (qj / pj).ln(),
                    (_, false) => pj,
                    (false, true) => return Err(Error::ZeroMassGroup { index: j }),
                };
            }
            acc
        }
        Regime::General => {
            let mut acc = 0.0;
            for (j, (&pj, &qj)) in pairs {
                if pj == qj {
                    continue;
                }
                acc += alpha * pj + (1.0 - alpha) * qj - weighted_geometric(pj, qj, alpha, j)?;
            }
            acc / (alpha * (1.0 - alpha))
        }
    };
    finite(v.max(0.0))
}

/// Symmetrized GE index `(D_α(p‖q) + D_{1-α}(p‖q)) / 2` on the raw masses.
pub fn symmetrized_ge(p: &MassFunction, q: &MassFunction, alpha: f64) -> Result<f64> {
    Ok(0.5 * (alpha_divergence(p, q, alpha)? + alpha_divergence(p, q, 1.0 - alpha)?))
}

/// Symmetrized reference-invariant GE index: the symmetrized alpha divergence
/// evaluated on the normalized pair `(p̄, q̄)`,
/// `1/(α(1-α)) [1 - ½ Σ p̄_j (r̄_j^{1-α} + r̄_j^α)]`.
pub fn ref_invariant_sym_ge(p: &MassFunction, q: &MassFunction, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    ref_invariant_sym_ge_on(&NormalizedPair::new(p, q)?, alpha)
}

/// Beta (Bregman) divergence on the raw masses,
/// `1/(β(1-β)) Σ p_j^{1-β} [β + (1-β) r_j - r_j^{1-β}]`.
///
/// β→0 gives KL(q‖p); β→1 gives the Itakura–Saito divergence `Σ (r_j - 1 - ln r_j)`.
pub fn beta_divergence(p: &MassFunction, q: &MassFunction, beta: f64) -> Result<f64> {
    check_alpha(beta)?;
    check_same_len(p, q)?;
    let mut acc = 0.0;
    for (j, (&pj, &qj)) in p.values().iter().zip(q.values()).enumerate() {
        if pj == 0.0 {
            return Err(Error::ZeroMassGroup { index: j });
        }
        let r = qj / pj;
        acc += match regime(beta) {
            Regime::Zero => {
                if r == 0.0 {
                    pj
                } else {
                    pj * (1.0 - r + r * r.ln())
                }
            }
            Regime::One => {
                if r == 0.0 {
                    return Err(Error::ZeroMassGroup { index: j });
                }
                r - 1.0 - r.ln()
            }
            Regime::General => {
                let r_pow = if r > 0.0 {
                    ((1.0 - beta) * r.ln()).exp()
                } else if beta < 1.0 {
                    0.0
                } else {
                    return Err(Error::ZeroMassGroup { index: j });
                };
                let scale = ((1.0 - beta) * pj.ln()).exp();
                scale * (beta + (1.0 - beta) * r - r_pow) / (beta * (1.0 - beta))
            }
        };
    }
    finite(acc.max(0.0))
}

/// Symmetrized reference-invariant beta divergence
/// `-(1/2β) Σ p̄_j^{1-β} (1 - r̄_j)(1 - r̄_j^{-β})`.
///
/// Equals `[B_β(p̄‖q̄) + B_β(q̄‖p̄)] / 2`. Undefined at β = 0, where callers
/// should use the Kullback–Leibler limit instead.
pub fn symmetrized_beta(p: &MassFunction, q: &MassFunction, beta: f64) -> Result<f64> {
    check_alpha(beta)?;
    if regime(beta) == Regime::Zero {
        return Err(Error::InvalidParameter("symmetrized beta divergence is undefined at beta = 0".into()));
    }
    let pair = NormalizedPair::new(p, q)?;
    let mut acc = 0.0;
    for j in 0..pair.len() {
        if pair.p[j] == 0.0 || pair.q[j] == 0.0 {
            return Err(Error::ZeroMassGroup { index: j });
        }
        let r = pair.lr[j].exp();
        let scale = ((1.0 - beta) * pair.lp[j]).exp();
        acc += scale * (1.0 - r) * (-beta * pair.lr[j]).exp_m1();
    }
    finite((acc / (2.0 * beta)).max(0.0))
}
