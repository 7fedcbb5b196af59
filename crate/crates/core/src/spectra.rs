//! Finite-level `L^q` spectra, their certified directions, auxiliary
//! exponents, the crossing point of the piecewise formula and discrete
//! Legendre transforms.

use serde::{Deserialize, Serialize};

use crate::atoms::{atom_masses, AtomLevel, BarrierBlock};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ifs::DigitSystem;

/// Tolerance on second differences when checking concavity.
pub const CONCAVITY_TOL: f64 = 1e-8;

/// Which side of the limiting value a finite-level number lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Exact,
    /// The value is an upper bound.
    UpperApprox,
    /// The value is a lower bound.
    LowerApprox,
}

impl Direction {
    /// Direction after a concave conjugate, which reverses order.
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Exact => Direction::Exact,
            Direction::UpperApprox => Direction::LowerApprox,
            Direction::LowerApprox => Direction::UpperApprox,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Exact => "exact",
            Direction::UpperApprox => "upper_approx",
            Direction::LowerApprox => "lower_approx",
        }
    }
}

/// A finite-level value together with certified bounds on the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauValue {
    pub q: f64,
    pub k: u32,
    pub value: f64,
    pub direction: Direction,
    /// Certified lower bound on the limit, when one is available.
    pub lower: Option<f64>,
    /// Certified upper bound on the limit, when one is available.
    pub upper: Option<f64>,
}

/// Evenly spaced `q` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for QGrid {
    fn default() -> Self {
        QGrid {
            min: -20.0,
            max: 10.0,
            step: 0.05,
        }
    }
}

impl QGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bad grid: min {min}, max {max}, step {step}"
            )));
        }
        Ok(QGrid { min, max, step })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.min + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Q,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub value: f64,
    pub direction: Direction,
    /// False when the point lies outside the region where the curve is
    /// known to describe the quantity it names.
    pub trusted: bool,
}

/// Sampled curve with per-point bound directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumCurve {
    pub axis: Axis,
    pub k: u32,
    pub method: String,
    pub points: Vec<CurvePoint>,
}

impl SpectrumCurve {
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Largest violation of concavity, measured as a second difference.
    /// Only finite values participate.
    pub fn concavity_excess(&self) -> (usize, f64) {
        let p = &self.points;
        let mut worst = (0, f64::NEG_INFINITY);
        for i in 1..p.len().saturating_sub(1) {
            let (a, b, c) = (&p[i - 1], &p[i], &p[i + 1]);
            if !(a.value.is_finite() && b.value.is_finite() && c.value.is_finite()) {
                continue;
            }
            let s0 = (b.value - a.value) / (b.x - a.x);
            let s1 = (c.value - b.value) / (c.x - b.x);
            let excess = (s1 - s0) * (c.x - a.x) / 2.0;
            if excess > worst.1 {
                worst = (i, excess);
            }
        }
        worst
    }

    pub fn check_concave(&self) -> Result<()> {
        let (index, excess) = self.concavity_excess();
        if excess > CONCAVITY_TOL {
            Err(Error::NotConcave { index, excess })
        } else {
            Ok(())
        }
    }

    /// CSV with header `x,value,direction`. Untrusted points carry the
    /// direction `untrusted`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,value,direction\n");
        for p in &self.points {
            let dir = if p.trusted {
                p.direction.as_str()
            } else {
                "untrusted"
            };
            s.push_str(&format!("{},{},{}\n", p.x, fmt_value(p.value), dir));
        }
        s
    }
}

fn fmt_value(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// `ln(floor(xi) + 1)`: log of the largest number of word pairs that can
/// share an atom when two levels are joined.
pub fn fekete_slack(sys: &DigitSystem) -> f64 {
    ((sys.m() / (sys.d() - 1)) as f64 + 1.0).ln()
}

/// `tau_k(q)` from an already computed level.
///
/// Joining levels `n` and `k` maps at most `N = floor(xi) + 1` word pairs to
/// one atom, so `S_{n+k}` lies between `N^{-1} S_n S_k` and `S_n S_k` for
/// `0 < q < 1`, between `S_n S_k` and `N^{q-1} S_n S_k` for `q >= 1`, and
/// below `S_n S_k` for `q <= 0`. Fekete's lemma turns each inequality into
/// a one-sided bound on the limit.
pub fn tau_from_level(sys: &DigitSystem, level: &AtomLevel, q: f64) -> TauValue {
    let k = level.k();
    let kf = k as f64;
    let scale = sys.delta() / kf;
    let slack = fekete_slack(sys) / (kf * sys.ln_d());
    if q == 1.0 {
        return TauValue {
            q,
            k,
            value: 0.0,
            direction: Direction::Exact,
            lower: Some(0.0),
            upper: Some(0.0),
        };
    }
    let raw = scale * level.log_moment(q);
    let (direction, lower, upper) = if q <= 0.0 {
        (Direction::LowerApprox, Some(raw), None)
    } else if q < 1.0 {
        (Direction::LowerApprox, Some(raw), Some(raw + slack))
    } else {
        (
            Direction::UpperApprox,
            Some(raw - (q - 1.0) * slack),
            Some(raw),
        )
    };
    TauValue {
        q,
        k,
        value: raw,
        direction,
        lower,
        upper,
    }
}

/// `tau_k(q) = delta k^{-1} log Sbar_k(q)` with its certified direction.
pub fn tau(sys: &DigitSystem, q: f64, k: u32, budget: &Budget) -> Result<TauValue> {
    Ok(tau_from_level(sys, &atom_masses(sys, k, budget)?, q))
}

/// `tau_k` sampled on a grid, sharing one level computation.
pub fn tau_curve(
    sys: &DigitSystem,
    k: u32,
    grid: &[f64],
    budget: &Budget,
) -> Result<SpectrumCurve> {
    let level = atom_masses(sys, k, budget)?;
    Ok(SpectrumCurve {
        axis: Axis::Q,
        k,
        method: "tau: delta/k log Sbar_k(q)".into(),
        points: grid
            .iter()
            .map(|&q| {
                let t = tau_from_level(sys, &level, q);
                CurvePoint {
                    x: q,
                    value: t.value,
                    direction: t.direction,
                    trusted: true,
                }
            })
            .collect(),
    })
}

/// `hat tau_k(q)` from an already computed barrier block. `log Shat_k` is
/// superadditive in `k`, so the value only decreases with `k`: it is an
/// upper bound on the limit for every `q`.
pub fn tau_hat_from_block(sys: &DigitSystem, block: &BarrierBlock, q: f64) -> TauValue {
    let value = sys.delta() / block.k() as f64 * block.log_moment(q);
    TauValue {
        q,
        k: block.k(),
        value,
        direction: Direction::UpperApprox,
        lower: None,
        upper: Some(value),
    }
}

pub fn tau_hat(sys: &DigitSystem, b: u32, q: f64, k: u32, budget: &Budget) -> Result<TauValue> {
    Ok(tau_hat_from_block(
        sys,
        &BarrierBlock::new(sys, b, k, budget)?,
        q,
    ))
}

pub fn tau_hat_curve_from_block(
    sys: &DigitSystem,
    block: &BarrierBlock,
    grid: &[f64],
) -> SpectrumCurve {
    SpectrumCurve {
        axis: Axis::Q,
        k: block.k(),
        method: format!(
            "tau_hat: delta/k log Shat_k(q), barrier digit {}",
            block.b()
        ),
        points: grid
            .iter()
            .map(|&q| {
                let t = tau_hat_from_block(sys, block, q);
                CurvePoint {
                    x: q,
                    value: t.value,
                    direction: t.direction,
                    trusted: true,
                }
            })
            .collect(),
    }
}

pub fn tau_hat_curve(
    sys: &DigitSystem,
    b: u32,
    k: u32,
    grid: &[f64],
    budget: &Budget,
) -> Result<SpectrumCurve> {
    let block = BarrierBlock::new(sys, b, k, budget)?;
    Ok(tau_hat_curve_from_block(sys, &block, grid))
}

/// Root of `Shat_k(beta) = 1` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxExponent {
    pub k: u32,
    pub beta: f64,
    /// `log Shat_k(beta)`.
    pub residual: f64,
}

pub fn beta_from_block(block: &BarrierBlock) -> Result<AuxExponent> {
    let (f0, f1) = (block.log_moment(0.0), block.log_moment(1.0));
    if !(f0 > 0.0 && f1 < 0.0) {
        return Err(Error::Unresolved(format!(
            "log Shat does not change sign on (0, 1): {f0} at 0, {f1} at 1"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if block.log_moment(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    Ok(AuxExponent {
        k: block.k(),
        beta,
        residual: block.log_moment(beta),
    })
}

pub fn beta_k(sys: &DigitSystem, b: u32, k: u32, budget: &Budget) -> Result<AuxExponent> {
    beta_from_block(&BarrierBlock::new(sys, b, k, budget)?)
}

/// Solution of `hat tau_k(q) = alpha_bar q` on `q < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub k: u32,
    pub q0: f64,
    /// `hat tau_k(q0) - alpha_bar q0`.
    pub residual: f64,
    /// `q0` is computed from a finite-level upper approximant of
    /// `hat tau`, so it is itself only approximate.
    pub approximate: bool,
}

/// Evidence deciding whether a crossing exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CrossingCertificate {
    /// The formalism criterion holds, so `alpha* = alpha_bar`.
    FormalismHolds,
    /// Upper end of a certified `alpha*` bracket.
    AlphaStarUpper(f64),
}

/// Finds `q0 < 0` with `hat tau_k(q0) = alpha_bar q0` when the certificate
/// shows `alpha* < alpha_bar`; `None` when the formalism holds.
pub fn crossing_from_block(
    sys: &DigitSystem,
    block: &BarrierBlock,
    cert: CrossingCertificate,
) -> Result<Option<Crossing>> {
    let alpha_bar = sys.delta() * sys.p(0).ln();
    match cert {
        CrossingCertificate::FormalismHolds => return Ok(None),
        CrossingCertificate::AlphaStarUpper(u) if !(u < alpha_bar) => {
            return Err(Error::Unresolved(format!(
                "alpha* upper bound {u} does not separate from alpha_bar {alpha_bar}"
            )))
        }
        CrossingCertificate::AlphaStarUpper(_) => {}
    }
    let f = |q: f64| tau_hat_from_block(sys, block, q).value - alpha_bar * q;
    let mut hi = 0.0f64;
    let mut lo = -1.0f64;
    while f(lo) <= 0.0 {
        hi = lo;
        lo *= 2.0;
        if lo < -1e6 {
            return Err(Error::Unresolved(format!(
                "no sign change of tau_hat_k(q) - alpha_bar q down to q = {lo} at k = {}",
                block.k()
            )));
        }
    }
    // f(lo) > 0 >= f(hi); concave minus linear crosses once
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q0 = if f(lo).abs() < f(hi).abs() { lo } else { hi };
    Ok(Some(Crossing {
        k: block.k(),
        q0,
        residual: f(q0),
        approximate: true,
    }))
}

pub fn q_crossing(
    sys: &DigitSystem,
    b: u32,
    k: u32,
    cert: CrossingCertificate,
    budget: &Budget,
) -> Result<Option<Crossing>> {
    crossing_from_block(sys, &BarrierBlock::new(sys, b, k, budget)?, cert)
}

/// `alpha_bar q` for `q <= q0`, `hat tau_k(q)` above.
pub fn tau_piecewise_from_block(
    sys: &DigitSystem,
    block: &BarrierBlock,
    crossing: Option<&Crossing>,
    q: f64,
) -> TauValue {
    let alpha_bar = sys.delta() * sys.p(0).ln();
    match crossing {
        Some(c) if q <= c.q0 => TauValue {
            q,
            k: block.k(),
            value: alpha_bar * q,
            direction: Direction::Exact,
            lower: Some(alpha_bar * q),
            upper: Some(alpha_bar * q),
        },
        _ => tau_hat_from_block(sys, block, q),
    }
}

pub fn tau_piecewise(
    sys: &DigitSystem,
    b: u32,
    q: f64,
    k: u32,
    cert: CrossingCertificate,
    budget: &Budget,
) -> Result<TauValue> {
    let block = BarrierBlock::new(sys, b, k, budget)?;
    let c = crossing_from_block(sys, &block, cert)?;
    Ok(tau_piecewise_from_block(sys, &block, c.as_ref(), q))
}

/// Discrete concave conjugate `g*(alpha) = min_i (q_i alpha - g(q_i))`
/// evaluated at the given abscissae. Values outside the range of discrete
/// slopes are `-inf`. Ties go to the smaller `q`.
pub fn legendre_at(curve: &SpectrumCurve, alphas: &[f64]) -> Result<SpectrumCurve> {
    curve.check_concave()?;
    let pts: Vec<&CurvePoint> = curve
        .points
        .iter()
        .filter(|p| p.value.is_finite())
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two finite points".into(),
        ));
    }
    let first = (pts[1].value - pts[0].value) / (pts[1].x - pts[0].x);
    let n = pts.len();
    let last = (pts[n - 1].value - pts[n - 2].value) / (pts[n - 1].x - pts[n - 2].x);
    let (smin, smax) = (first.min(last), first.max(last));
    let tol = 1e-12 * (1.0 + smin.abs().max(smax.abs()));
    let out = alphas
        .iter()
        .map(|&a| {
            if a < smin - tol || a > smax + tol {
                return CurvePoint {
                    x: a,
                    value: f64::NEG_INFINITY,
                    direction: Direction::Exact,
                    trusted: false,
                };
            }
            let mut best = (f64::INFINITY, 0usize);
            for (i, p) in pts.iter().enumerate() {
                let v = p.x * a - p.value;
                if v < best.0 {
                    best = (v, i);
                }
            }
            CurvePoint {
                x: a,
                value: best.0,
                direction: pts[best.1].direction.flipped(),
                trusted: pts[best.1].trusted,
            }
        })
        .collect();
    Ok(SpectrumCurve {
        axis: match curve.axis {
            Axis::Q => Axis::Alpha,
            Axis::Alpha => Axis::Q,
        },
        k: curve.k,
        method: format!("discrete Legendre conjugate of [{}]", curve.method),
        points: out,
    })
}

/// The conjugate on an evenly spaced grid between the extreme discrete
/// slopes, with as many points as the input.
pub fn legendre(curve: &SpectrumCurve) -> Result<SpectrumCurve> {
    let pts: Vec<&CurvePoint> = curve
        .points
        .iter()
        .filter(|p| p.value.is_finite())
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two finite points".into(),
        ));
    }
    let n = pts.len();
    let s0 = (pts[1].value - pts[0].value) / (pts[1].x - pts[0].x);
    let s1 = (pts[n - 1].value - pts[n - 2].value) / (pts[n - 1].x - pts[n - 2].x);
    let (lo, hi) = (s0.min(s1), s0.max(s1));
    let alphas: Vec<f64> = if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
        vec![lo]
    } else {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    legendre_at(curve, &alphas)
}

/// `f_H = (hat tau_k)^*` on the slope range of the sampled curve. Points
/// outside `trusted` (an interval certified to lie inside the open range of
/// restricted local dimensions) are kept but flagged.
pub fn multifractal_spectrum(
    sys: &DigitSystem,
    b: u32,
    k: u32,
    grid: &[f64],
    trusted: (f64, f64),
    budget: &Budget,
) -> Result<SpectrumCurve> {
    let tau = tau_hat_curve(sys, b, k, grid, budget)?;
    let mut fh = legendre(&tau)?;
    fh.method = format!("f_H: Legendre conjugate of tau_hat_k, barrier digit {b}");
    for p in &mut fh.points {
        p.trusted = p.trusted && trusted.0 < p.x && p.x < trusted.1;
    }
    Ok(fh)
}

/// An interval of local dimensions attained by the measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimRange {
    pub k: u32,
    pub lo: f64,
    pub hi: f64,
    pub beta_k: f64,
}

/// Inner approximation of the set of local dimensions from the strongly
/// separated sub-system of the maps `(b, sigma)`.
///
/// At points coded by infinite concatenations of such words the barrier
/// factorization makes the mass of a level-`nk` cylinder the product of the
/// `eta(b, sigma)` used, so every frequency-weighted average of
/// `delta log eta(b, sigma) / k` is attained. The resulting interval is
/// `[delta max log eta / k, delta min log eta / k]`; the auxiliary exponent
/// only normalizes the sub-system's weights and does not rescale it.
pub fn dim_range_from_block(sys: &DigitSystem, block: &BarrierBlock) -> Result<DimRange> {
    let kf = block.k() as f64;
    let beta = beta_from_block(block)?;
    Ok(DimRange {
        k: block.k(),
        lo: sys.delta() * block.max_log_mass() / kf,
        hi: sys.delta() * block.min_log_mass() / kf,
        beta_k: beta.beta,
    })
}

pub fn dim_range_inner(sys: &DigitSystem, b: u32, k: u32, budget: &Budget) -> Result<DimRange> {
    dim_range_from_block(sys, &BarrierBlock::new(sys, b, k, budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{cantor_convolution, iterate};

    fn iterated3() -> DigitSystem {
        iterate(&cantor_convolution(3, 0.5).unwrap(), 2, &Budget::default()).unwrap()
    }

    fn curve(points: &[(f64, f64)]) -> SpectrumCurve {
        SpectrumCurve {
            axis: Axis::Q,
            k: 1,
            method: "test".into(),
            points: points
                .iter()
                .map(|&(x, value)| CurvePoint {
                    x,
                    value,
                    direction: Direction::Exact,
                    trusted: true,
                })
                .collect(),
        }
    }

    #[test]
    fn tau_at_one_is_exact_zero() {
        let sys = cantor_convolution(3, 0.5).unwrap();
        for k in [1, 4, 9] {
            let t = tau(&sys, 1.0, k, &Budget::default()).unwrap();
            assert_eq!(t.value, 0.0);
            assert_eq!(t.direction, Direction::Exact);
        }
    }

    #[test]
    fn tau_directions() {
        let sys = cantor_convolution(3, 0.5).unwrap();
        let b = Budget::default();
        assert_eq!(
            tau(&sys, -1.0, 4, &b).unwrap().direction,
            Direction::LowerApprox
        );
        assert_eq!(
            tau(&sys, 0.5, 4, &b).unwrap().direction,
            Direction::LowerApprox
        );
        assert_eq!(
            tau(&sys, 2.0, 4, &b).unwrap().direction,
            Direction::UpperApprox
        );
        // the certified intervals at k and 2k intersect
        for q in [0.5, 2.0, 3.0] {
            let (a, c) = (tau(&sys, q, 4, &b).unwrap(), tau(&sys, q, 8, &b).unwrap());
            assert!(a.lower.unwrap() <= c.upper.unwrap() + 1e-12);
            assert!(c.lower.unwrap() <= a.upper.unwrap() + 1e-12);
        }
    }

    #[test]
    fn tau_hat_decreases_along_doubling() {
        let sys = iterated3();
        let b = Budget::default();
        for q in [-3.0, 0.0, 1.0, 2.5] {
            let v2 = tau_hat(&sys, 5, q, 2, &b).unwrap().value;
            let v4 = tau_hat(&sys, 5, q, 4, &b).unwrap().value;
            assert!(v4 <= v2 + 1e-10, "q = {q}: {v4} > {v2}");
        }
        assert!(tau_hat(&sys, 5, 1.0, 3, &b).unwrap().value > 0.0);
    }

    #[test]
    fn beta_root() {
        let sys = iterated3();
        let r = beta_k(&sys, 6, 2, &Budget::default()).unwrap();
        assert!(r.beta > 0.0 && r.beta < 1.0);
        assert!(r.residual.abs() <= 1e-10);
    }

    #[test]
    fn legendre_of_a_line() {
        let c = curve(&[(-1.0, -0.7), (0.0, 0.0), (1.0, 0.7), (2.0, 1.4)]);
        let g = legendre(&c).unwrap();
        assert_eq!(g.points.len(), 1);
        assert!((g.points[0].x - 0.7).abs() < 1e-15);
        assert!(g.points[0].value.abs() < 1e-15);
        let off = legendre_at(&c, &[0.5]).unwrap();
        assert_eq!(off.points[0].value, f64::NEG_INFINITY);
    }

    #[test]
    fn legendre_of_a_parabola() {
        let h = 0.01;
        let pts: Vec<(f64, f64)> = (0..=400)
            .map(|i| {
                let q = -2.0 + i as f64 * h;
                (q, -q * q / 2.0)
            })
            .collect();
        let c = curve(&pts);
        let g = legendre_at(&c, &[-1.0, -0.3, 0.0, 0.8, 1.5]).unwrap();
        for p in &g.points {
            let exact = -p.x * p.x / 2.0;
            assert!((p.value - exact).abs() <= h * h, "{} vs {}", p.value, exact);
        }
    }

    #[test]
    fn legendre_rejects_convex_input() {
        let c = curve(&[(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]);
        assert!(matches!(
            legendre(&c),
            Err(Error::NotConcave { index: 1, .. })
        ));
    }

    #[test]
    fn conjugate_flips_direction() {
        let mut c = curve(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.7)]);
        c.points
            .iter_mut()
            .for_each(|p| p.direction = Direction::UpperApprox);
        let g = legendre(&c).unwrap();
        assert!(g
            .points
            .iter()
            .all(|p| p.direction == Direction::LowerApprox));
        assert_eq!(g.axis, Axis::Alpha);
    }

    #[test]
    fn grid_points() {
        let g = QGrid::new(-1.0, 1.0, 0.5).unwrap().points();
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(QGrid::default().points().len(), 601);
        assert!(QGrid::new(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn csv_shape() {
        let mut c = curve(&[(0.0, 0.0), (1.0, f64::NEG_INFINITY)]);
        c.points[1].trusted = false;
        assert_eq!(
            c.to_csv(),
            "x,value,direction\n0,0,exact\n1,-inf,untrusted\n"
        );
    }
}
