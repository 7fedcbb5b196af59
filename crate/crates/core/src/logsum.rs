//! Log-domain reductions.
//!
//! Masses at level `k` scale like `c^k`, and `q`-th powers with `q < 0`
//! overflow almost immediately, so every sum over atoms is done with
//! log-sum-exp in a fixed (ascending index) order.

/// `log(exp(a) + exp(b))`.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// `log(sum(exp(x)))` over a slice, summed in slice order.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    log_sum_exp_scaled(xs, 1.0)
}

/// `log(sum(exp(scale * x)))`; the workhorse for moment sums `sum(w^q)`.
pub fn log_sum_exp_scaled(xs: &[f64], scale: f64) -> f64 {
    let max = xs
        .iter()
        .map(|&x| scale * x)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (scale * x - max).exp()).sum();
    max + sum.ln()
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
