//! Certified dimension numbers: extreme local dimensions, the almost sure
//! dimension, periodic points and the closed-form special cases.

use serde::Serialize;

use crate::atoms::entropy_sum;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ifs::{flip, DigitSystem, Word};
use crate::transfer::{
    lyapunov_sum, max_radius, min_radius, word_product, Bracket, EnumOptions, LyapunovEstimate,
    LyapunovMode, Norm, TransferMatrixSet,
};

/// Absolute tolerance for the exact weight equalities of the formalism test.
pub const WEIGHT_EQ_TOL: f64 = 1e-15;

/// Slack on the row-sum test of the absolute continuity certificate.
pub const ROW_SUM_TOL: f64 = 1e-15;

/// `-log p_0 / log d`, the local dimension at `0` and the largest one.
pub fn alpha_bar(sys: &DigitSystem) -> f64 {
    sys.delta() * sys.p(0).ln()
}

/// `-log p_m / log d`, the local dimension at the right end `xi`.
pub fn dim_at_xi(sys: &DigitSystem) -> f64 {
    sys.delta() * sys.p(sys.m() as usize).ln()
}

/// `[delta log rho_hat_k, delta log rho_tilde_k]`, containing the smallest
/// local dimension.
pub fn alpha_lower_bracket(sys: &DigitSystem, k: u32, opts: &EnumOptions) -> Result<Bracket> {
    let r = max_radius(sys, k, opts)?;
    let (log_rho, log_norm) = r.log_bracket(opts.norm);
    Ok(Bracket::new(
        sys.delta() * log_norm,
        sys.delta() * log_rho,
        k,
        &format!(
            "delta log of max {} norm over length-k products, per letter",
            opts.norm
        ),
        "delta log of max spectral radius over length-k products, per letter",
    ))
}

/// `[delta log rho_tilde*_k, delta log rho_hat*_k]`, containing the
/// smallest local dimension away from the endpoints of the support.
pub fn alpha_star_bracket(sys: &DigitSystem, k: u32, budget: &Budget) -> Result<Bracket> {
    let r = min_radius(sys, k, budget)?;
    let kf = k as f64;
    Ok(Bracket::new(
        sys.delta() * r.log_rho / kf,
        sys.delta() * r.log_eta / kf,
        k,
        "delta log of min spectral radius over interior-start words, per letter",
        "delta log of min eta over interior-start words, per letter",
    ))
}

/// Almost sure dimension bracket with its ingredients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaBracket {
    pub bracket: Bracket,
    pub entropy_k: u32,
    pub entropy: f64,
    pub lyapunov: LyapunovEstimate,
}

/// Lower side from the Lyapunov-type sum (widened by three standard errors
/// in Monte-Carlo mode), upper side from the entropy sum.
pub fn gamma_bracket(
    sys: &DigitSystem,
    k_entropy: u32,
    k_lyap: u32,
    mode: LyapunovMode,
    norm: Norm,
    budget: &Budget,
) -> Result<GammaBracket> {
    let entropy = entropy_sum(sys, k_entropy, budget)?;
    let lyapunov = lyapunov_sum(sys, k_lyap, mode, norm, budget)?;
    let lower = lyapunov.value - 3.0 * lyapunov.std_error.unwrap_or(0.0);
    let lower_method = match mode {
        LyapunovMode::Exact => format!("exact Lyapunov sum at k = {k_lyap}, {norm} norm"),
        LyapunovMode::MonteCarlo { samples, .. } => format!(
            "Monte-Carlo Lyapunov sum at k = {k_lyap}, {samples} samples, {norm} norm, minus 3 standard errors"
        ),
    };
    Ok(GammaBracket {
        bracket: Bracket::new(
            lower,
            entropy,
            k_lyap,
            &lower_method,
            &format!("entropy sum at k = {k_entropy}"),
        ),
        entropy_k: k_entropy,
        entropy,
        lyapunov,
    })
}

/// Local dimension at the point `pi(sigma sigma sigma ...)`.
pub fn periodic_dim(sys: &DigitSystem, word: &Word) -> Result<f64> {
    let m = sys.m() as u32;
    let digits = word.digits();
    if digits.is_empty() {
        return Err(Error::InvalidArgument("empty word".into()));
    }
    if digits.iter().all(|&x| x == 0) || digits.iter().all(|&x| x == m) {
        return Err(Error::DegenerateWord);
    }
    let tms = TransferMatrixSet::new(sys);
    let prod = word_product(&tms, word);
    Ok(sys.delta() * prod.log_spectral_radius() / digits.len() as f64)
}

/// Whether the smallest interior-type local dimension reaches the top one:
/// `m <= 2d - 2` and `p_0 = p_i` for some `i` in `m-d+1 ..= d-1`.
pub fn formalism_holds(sys: &DigitSystem) -> bool {
    let (d, m) = (sys.d(), sys.m());
    if m > 2 * d - 2 {
        return false;
    }
    let p0 = sys.p(0);
    (m + 1 - d..=d - 1).any(|i| (sys.p(i as usize) - p0).abs() <= WEIGHT_EQ_TOL)
}

/// `p_0` strictly below every interior weight.
pub fn isolated_top(sys: &DigitSystem) -> bool {
    let p0 = sys.p(0);
    (1..sys.m() as usize).all(|i| p0 < sys.p(i))
}

/// `(log(d + 1) - log zeta) / log d` with `zeta` the golden ratio: the
/// smallest local dimension of the uniform system with `m = d`.
pub fn golden_closed_form(d: u64) -> Result<f64> {
    if d < 3 {
        return Err(Error::BadDimensions { d, m: d });
    }
    let zeta = (1.0 + 5f64.sqrt()) / 2.0;
    let d = d as f64;
    Ok(((d + 1.0).ln() - zeta.ln()) / d.ln())
}

/// True when every transfer matrix built with index bound
/// `a = floor(1 + xi)` has all row sums at most `1/d`, which gives the
/// measure a bounded density.
pub fn abs_continuity_certificate(sys: &DigitSystem) -> bool {
    let a = 1 + (sys.m() / (sys.d() - 1)) as usize;
    let tms = TransferMatrixSet::with_index_bound(sys, a);
    let bound = 1.0 / sys.d() as f64 + ROW_SUM_TOL;
    tms.mats().iter().all(|m| m.norm_opinf() <= bound)
}

/// Interval certified to lie inside the open range between the smallest
/// local dimension and the smallest interior-type one.
pub fn certified_interior(lower: &Bracket, star: &Bracket) -> (f64, f64) {
    (lower.upper, star.lower)
}

/// Settings for [`dimension_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    /// Word length for the extreme-dimension brackets.
    pub k: u32,
    pub k_entropy: u32,
    pub k_lyap: u32,
    pub mode: LyapunovMode,
    pub enumeration: EnumOptions,
}

impl ReportOptions {
    pub fn new(k: u32) -> Self {
        ReportOptions {
            k,
            k_entropy: k,
            k_lyap: k,
            mode: LyapunovMode::Exact,
            enumeration: EnumOptions {
                norm: Norm::Tightest,
                ..EnumOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    /// Whether the weights were reversed so that `p_0 <= p_m`.
    pub flipped: bool,
    pub alpha_bar: f64,
    pub dim_at_xi: f64,
    pub alpha_lower: Bracket,
    pub alpha_star: Bracket,
    pub gamma: GammaBracket,
    pub formalism_holds: bool,
    pub isolated_top: bool,
}

pub fn dimension_report(sys: &DigitSystem, opts: &ReportOptions) -> Result<DimensionReport> {
    let s = flip(sys);
    let norm = opts.enumeration.norm;
    let budget = opts.enumeration.budget;
    Ok(DimensionReport {
        flipped: s != *sys,
        alpha_bar: alpha_bar(&s),
        dim_at_xi: dim_at_xi(&s),
        alpha_lower: alpha_lower_bracket(&s, opts.k, &opts.enumeration)?,
        alpha_star: alpha_star_bracket(&s, opts.k, &budget)?,
        gamma: gamma_bracket(&s, opts.k_entropy, opts.k_lyap, opts.mode, norm, &budget)?,
        formalism_holds: formalism_holds(&s),
        isolated_top: isolated_top(&s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{cantor_convolution, new_system, uniform, WeightVector};

    #[test]
    fn closed_forms() {
        let c3 = cantor_convolution(3, 0.5).unwrap();
        assert!((alpha_bar(&c3) - 3.0 * 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert!((alpha_bar(&c3) - 1.892789).abs() < 1e-6);
        let c4 = cantor_convolution(4, 0.5).unwrap();
        assert!((alpha_bar(&c4) - 2.523719).abs() < 1e-6);
        assert_eq!(alpha_bar(&c4), dim_at_xi(&c4));
        assert!((golden_closed_form(3).unwrap() - 0.823842).abs() < 1e-6);
        assert!((golden_closed_form(4).unwrap() - 0.813843).abs() < 1e-6);
        assert!(golden_closed_form(2).is_err());
    }

    #[test]
    fn formalism_examples() {
        assert!(formalism_holds(&uniform(3, 3).unwrap()));
        assert!(formalism_holds(&uniform(4, 4).unwrap()));
        assert!(!formalism_holds(&cantor_convolution(3, 0.5).unwrap()));
        assert!(!formalism_holds(&cantor_convolution(4, 0.5).unwrap()));
        assert!(!formalism_holds(&uniform(3, 5).unwrap()));
    }

    #[test]
    fn certificate_examples() {
        assert!(abs_continuity_certificate(&uniform(3, 5).unwrap()));
        assert!(abs_continuity_certificate(&uniform(3, 8).unwrap()));
        assert!(!abs_continuity_certificate(
            &cantor_convolution(3, 0.5).unwrap()
        ));
    }

    #[test]
    fn periodic_points() {
        let c4 = cantor_convolution(4, 0.5).unwrap();
        let one = Word::new(vec![1], &c4).unwrap();
        assert!(
            (periodic_dim(&c4, &one).unwrap() - (16.0f64 / 5.0).ln() / 3f64.ln()).abs() < 1e-12
        );
        let u = uniform(3, 3).unwrap();
        let w = Word::new(vec![0, 1], &u).unwrap();
        assert!((periodic_dim(&u, &w).unwrap() - golden_closed_form(3).unwrap()).abs() < 1e-12);
        let zeros = Word::new(vec![0, 0], &u).unwrap();
        assert_eq!(periodic_dim(&u, &zeros), Err(Error::DegenerateWord));
        let tops = Word::new(vec![3], &u).unwrap();
        assert_eq!(periodic_dim(&u, &tops), Err(Error::DegenerateWord));
    }

    #[test]
    fn report_flips_and_orders() {
        let sys = new_system(3, 3, WeightVector::new(vec![0.2, 0.35, 0.3, 0.15]).unwrap()).unwrap();
        let r = dimension_report(&sys, &ReportOptions::new(4)).unwrap();
        assert!(r.flipped);
        assert!((r.alpha_bar - 0.15f64.ln() / -3f64.ln()).abs() < 1e-15);
        assert!(r.dim_at_xi <= r.alpha_bar);
        assert!(r.alpha_lower.upper <= r.gamma.bracket.upper + 1e-9);
        assert!(r.gamma.bracket.upper <= r.alpha_bar + 1e-9);
        assert!(r.alpha_star.upper <= r.alpha_bar + 1e-9);
        assert!(r.isolated_top);
    }
}
