//! Small numerical kernels shared by the divergence and survey modules.

/// Distance from 0 or 1 below which the aversion parameter is treated as
/// sitting at the pole and the closed-form limit is used instead.
pub const LIMIT_TOL: f64 = 1e-6;

/// Which branch of a family with poles at 0 and 1 to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// α → 0 (Theil-type limit).
    Zero,
    /// α → 1 (mean-log-deviation-type limit).
    One,
    General,
}

pub fn regime(alpha: f64) -> Regime {
    if alpha.abs() < LIMIT_TOL {
        Regime::Zero
    } else if (alpha - 1.0).abs() < LIMIT_TOL {
        Regime::One
    } else {
        Regime::General
    }
}

/// `ln Σ exp(x_i)` with the max-shift. `-inf` entries are empty terms;
/// returns `-inf` for an empty or all-empty input and `+inf` if any term is `+inf`.
pub fn log_sum_exp<I>(terms: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let iter = terms.into_iter();
    let max = iter.clone().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let sum: f64 = iter.map(|x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Natural log that maps 0 to `-inf` rather than NaN-producing surprises downstream.
#[inline]
pub fn ln0(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}

/// Round to `digits` significant digits (decimal), returning the nearest f64.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse().unwrap_or(x)
}
