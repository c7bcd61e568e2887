use crate::error::{Error, Result};
use crate::numeric::{ln0, log_sum_exp};

/// Nonnegative masses over `m ≥ 2` groups. Not required to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    values: Vec<f64>,
}

impl MassFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidMass(format!("need at least 2 groups, got {}", values.len())));
        }
        if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidMass(format!(
                "entry {j} is {v}; masses must be finite and nonnegative"
            )));
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidMass("all entries are zero".into()));
        }
        Ok(Self { values })
    }

    /// Uniform masses `1/m`.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![1.0 / m as f64; m])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// The probability vector `p / Σp`.
    pub fn normalized(&self) -> Vec<f64> {
        let total = self.total();
        self.values.iter().map(|v| v / total).collect()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {c} must be positive")));
        }
        Self::new(self.values.iter().map(|v| v * c).collect())
    }
}

impl TryFrom<Vec<f64>> for MassFunction {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

pub(crate) fn check_same_len(p: &MassFunction, q: &MassFunction) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    Ok(())
}

/// Normalized pair `(p̄, q̄)` with cached logs; the workhorse behind every
/// scale-invariant family.
#[derive(Debug, Clone)]
pub(crate) struct NormalizedPair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub lp: Vec<f64>,
    pub lq: Vec<f64>,
    /// `ln r̄_j`, finite only where both masses are positive.
    pub lr: Vec<f64>,
    pub has_zero: bool,
}

impl NormalizedPair {
    pub fn new(p: &MassFunction, q: &MassFunction) -> Result<Self> {
        check_same_len(p, q)?;
        let p = p.normalized();
        let q = q.normalized();
        let lp: Vec<f64> = p.iter().map(|&v| ln0(v)).collect();
        let lq: Vec<f64> = q.iter().map(|&v| ln0(v)).collect();
        let has_zero = p.iter().chain(&q).any(|&v| v == 0.0);
        let lr = lp.iter().zip(&lq).map(|(a, b)| b - a).collect();
        Ok(Self { p, q, lp, lq, lr, has_zero })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    /// All masses positive and every `|ln r̄_j| ≤ 1/2`.
    fn near_equal(&self) -> bool {
        !self.has_zero && self.lr.iter().all(|lr| lr.abs() <= 0.5)
    }

    /// `ln Σ p̄_j^α q̄_j^{1-α}`: log of the power mean `Σ p̄_j r̄_j^{1-α}`.
    ///
    /// Zero masses contribute nothing when their exponent is positive and
    /// are an error when it is negative. Near α = 1 (resp. 0) the sum is
    /// expanded around p̄ (resp. q̄) with `expm1`, and the first-order term,
    /// which is zero for normalized masses, is dropped so that only
    /// second-order deviations remain.
    pub fn log_chernoff(&self, alpha: f64) -> Result<f64> {
        let beta = 1.0 - alpha;
        if !self.has_zero {
            let max_lr = self.lr.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let near = self.near_equal();
            if beta.abs() * max_lr <= 0.5 {
                if near {
                    return Ok(Self::second_order(&self.p, &self.lr, beta, 1.0).ln_1p());
                }
                let s: f64 = self.p.iter().zip(&self.lr).map(|(p, lr)| p * (beta * lr).exp_m1()).sum();
                return Ok(s.ln_1p());
            }
            if alpha.abs() * max_lr <= 0.5 {
                if near {
                    return Ok(Self::second_order(&self.q, &self.lr, alpha, -1.0).ln_1p());
                }
                let s: f64 = self.q.iter().zip(&self.lr).map(|(q, lr)| q * (-alpha * lr).exp_m1()).sum();
                return Ok(s.ln_1p());
            }
        }
        let mut terms = Vec::with_capacity(self.len());
        for j in 0..self.len() {
            let (p, q) = (self.p[j], self.q[j]);
            let term = match (p > 0.0, q > 0.0) {
                (false, false) => continue,
                (true, true) => alpha * self.lp[j] + beta * self.lq[j],
                (false, true) => {
                    if alpha > 0.0 {
                        continue;
                    } else if alpha == 0.0 {
                        self.lq[j]
                    } else {
                        return Err(Error::ZeroMassGroup { index: j });
                    }
                }
                (true, false) => {
                    if beta > 0.0 {
                        continue;
                    } else if beta == 0.0 {
                        self.lp[j]
                    } else {
                        return Err(Error::ZeroMassGroup { index: j });
                    }
                }
            };
            terms.push(term);
        }
        Ok(log_sum_exp(terms))
    }

    /// `1 - Σ p̄_j r̄_j^{1-α}`, computed without cancellation when all masses are positive.
    pub fn chernoff_deficit(&self, alpha: f64) -> Result<f64> {
        if self.has_zero {
            return Ok(-self.log_chernoff(alpha)?.exp_m1());
        }
        let beta = 1.0 - alpha;
        if self.near_equal() {
            return Ok(-Self::second_order(&self.p, &self.lr, beta, 1.0));
        }
        Ok(-self.p.iter().zip(&self.lr).map(|(p, lr)| p * (beta * lr).exp_m1()).sum::<f64>())
    }

    /// `Σ w_j (e^{c·s·lr_j} - 1 - c (e^{s·lr_j} - 1))` for base weights `w`
    /// (p̄ with s = 1, q̄ with s = -1). Equals `Σ w_j (e^{c·s·lr_j} - 1)`
    /// because `Σ w_j (e^{s·lr_j} - 1) = Σ q̄ - Σ p̄ = 0`.
    fn second_order(w: &[f64], lr: &[f64], c: f64, s: f64) -> f64 {
        w.iter().zip(lr).map(|(w, lr)| w * ((c * s * lr).exp_m1() - c * (s * lr).exp_m1())).sum()
    }

    /// `-Σ p̄_j ln r̄_j`, i.e. KL(p̄‖q̄).
    pub fn mean_log_deviation(&self) -> Result<f64> {
        if self.near_equal() {
            return Ok(self.p.iter().zip(&self.lr).map(|(p, lr)| p * (lr.exp_m1() - lr)).sum());
        }
        let mut acc = 0.0;
        for j in 0..self.len() {
            if self.p[j] == 0.0 {
                continue;
            }
            if self.q[j] == 0.0 {
                return Err(Error::ZeroMassGroup { index: j });
            }
            acc -= self.p[j] * self.lr[j];
        }
        Ok(acc)
    }

    /// `Σ p̄_j r̄_j ln r̄_j`, i.e. KL(q̄‖p̄).
    pub fn theil(&self) -> Result<f64> {
        if self.near_equal() {
            return Ok(self.q.iter().zip(&self.lr).map(|(q, lr)| q * ((-lr).exp_m1() + lr)).sum());
        }
        let mut acc = 0.0;
        for j in 0..self.len() {
            if self.q[j] == 0.0 {
                continue;
            }
            if self.p[j] == 0.0 {
                return Err(Error::ZeroMassGroup { index: j });
            }
            acc += self.q[j] * self.lr[j];
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_masses() {
        assert!(MassFunction::new(vec![1.0]).is_err());
        assert!(MassFunction::new(vec![0.0, 0.0]).is_err());
        assert!(MassFunction::new(vec![1.0, -0.1]).is_err());
        assert!(MassFunction::new(vec![1.0, f64::NAN]).is_err());
        assert!(MassFunction::new(vec![0.0, 2.0]).is_ok());
    }

    #[test]
    fn log_chernoff_branches_agree() {
        let p = MassFunction::new(vec![0.2, 0.3, 0.5]).unwrap();
        let q = MassFunction::new(vec![0.25, 0.35, 0.4]).unwrap();
        let pair = NormalizedPair::new(&p, &q).unwrap();
        for &a in &[0.999, 0.9, 0.5, 0.1, 0.001, -0.3, 1.4] {
            let direct: f64 =
                pair.p.iter().zip(&pair.q).map(|(p, q)| p.powf(a) * q.powf(1.0 - a)).sum::<f64>().ln();
            let got = pair.log_chernoff(a).unwrap();
            assert!((got - direct).abs() < 1e-15, "alpha {a}: {got} vs {direct}");
        }
    }

    #[test]
    fn zero_masses_follow_exponent_sign() {
        let p = MassFunction::new(vec![0.5, 0.5, 0.0]).unwrap();
        let q = MassFunction::new(vec![0.2, 0.3, 0.5]).unwrap();
        let pair = NormalizedPair::new(&p, &q).unwrap();
        assert!(pair.log_chernoff(0.5).is_ok());
        assert_eq!(pair.log_chernoff(-0.5), Err(Error::ZeroMassGroup { index: 2 }));
        assert!(pair.mean_log_deviation().is_ok());
        assert_eq!(pair.theil(), Err(Error::ZeroMassGroup { index: 2 }));
    }
}
