//! Digit systems `x -> (x + i) / d` with weights `p_0..p_m`, and the ways of
//! deriving new ones: iteration, convolution, biased Cantor families, flips
//! and barrier-digit discovery.

use serde::Serialize;

use crate::atoms;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::logsum::neumaier_sum;

/// Tolerance on `sum(p) = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Relative slack allowed when comparing an extreme weight against an
/// interior one. Iterated weights that are equal in exact arithmetic can
/// differ by a few ulps.
pub const REGULARITY_RTOL: f64 = 1e-12;

/// A probability vector `p_0..p_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::NotAProbabilityVector(format!(
                "need at least two weights, got {}",
                entries.len()
            )));
        }
        if let Some((i, w)) = entries
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0 || **w > 1.0)
        {
            return Err(Error::NotAProbabilityVector(format!(
                "p_{i} = {w} is not in [0, 1]"
            )));
        }
        let total = neumaier_sum(entries.iter().copied());
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotAProbabilityVector(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(WeightVector(entries))
    }

    /// Rescales positive masses to sum to one. Used for weights produced by
    /// the mass recursion, which carry accumulated rounding.
    pub(crate) fn normalized(mut entries: Vec<f64>) -> Result<Self> {
        let total = neumaier_sum(entries.iter().copied());
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NotAProbabilityVector(format!(
                "cannot normalize total mass {total}"
            )));
        }
        entries.iter_mut().for_each(|w| *w /= total);
        WeightVector::new(entries)
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_digit(&self) -> u64 {
        (self.0.len() - 1) as u64
    }

    pub fn reversed(&self) -> WeightVector {
        WeightVector(self.0.iter().rev().copied().collect())
    }

    /// First violation of `p_0, p_m <= p_i` for interior `i`, if any.
    fn regularity_violation(&self) -> Option<(usize, usize)> {
        let p = &self.0;
        let m = p.len() - 1;
        for &end in &[0, m] {
            for (i, &pi) in p.iter().enumerate().take(m).skip(1) {
                if p[end] > pi * (1.0 + REGULARITY_RTOL) {
                    return Some((end, i));
                }
            }
        }
        None
    }

    pub fn is_regular(&self) -> bool {
        self.regularity_violation().is_none()
    }
}

/// `p_0 <= p_i` and `p_m <= p_i` for every interior digit `i`.
pub fn is_regular(p: &WeightVector) -> bool {
    p.is_regular()
}

/// A validated, regular digit system with its derived constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigitSystem {
    d: u64,
    m: u64,
    p: WeightVector,
    delta: f64,
    xi: f64,
    theta: f64,
    a: usize,
}

impl DigitSystem {
    pub fn new(d: u64, m: u64, p: WeightVector) -> Result<Self> {
        if d < 3 || m < d {
            return Err(Error::BadDimensions { d, m });
        }
        if p.max_digit() != m {
            return Err(Error::NotAProbabilityVector(format!(
                "expected {} weights for m = {m}, got {}",
                m + 1,
                p.len()
            )));
        }
        if let Some((index, interior)) = p.regularity_violation() {
            return Err(Error::NotRegular {
                index,
                weight: p.0[index],
                interior,
                interior_weight: p.0[interior],
            });
        }
        let max = p.0.iter().copied().fold(0.0, f64::max);
        let min_pos =
            p.0.iter()
                .copied()
                .filter(|&w| w > 0.0)
                .fold(f64::INFINITY, f64::min);
        Ok(DigitSystem {
            d,
            m,
            delta: -1.0 / (d as f64).ln(),
            xi: m as f64 / (d - 1) as f64,
            theta: max / min_pos,
            a: 1 + ((m - d) / (d - 1)) as usize,
            p,
        })
    }

    /// Base.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// Largest digit.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn weights(&self) -> &WeightVector {
        &self.p
    }

    pub fn p(&self, i: usize) -> f64 {
        self.p.0[i]
    }

    /// `-1 / ln d`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `m / (d - 1)`, the right end of the support.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Ratio of the largest weight to the smallest positive weight.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Index bound of the transfer matrices, which have size `2a + 1`.
    pub fn a(&self) -> usize {
        self.a
    }

    pub fn ln_d(&self) -> f64 {
        (self.d as f64).ln()
    }

    /// `xi < 2`, decided on integers.
    pub fn xi_below_two(&self) -> bool {
        self.m < 2 * (self.d - 1)
    }

    /// Largest atom index at level `k`: `m (d^k - 1) / (d - 1)`.
    pub fn max_atom(&self, k: u32) -> Result<u128> {
        max_atom(self.d, self.m, k)
    }

    /// Whether the single digit `b` is a barrier digit.
    pub fn is_barrier_digit(&self, b: u32) -> bool {
        u64::from(b) <= self.m && is_barrier_atom(self, 1, u128::from(b)).unwrap_or(false)
    }
}

pub(crate) fn max_atom(d: u64, m: u64, k: u32) -> Result<u128> {
    let dk = (d as u128)
        .checked_pow(k)
        .ok_or_else(|| Error::InvalidArgument(format!("d^k overflows for d = {d}, k = {k}")))?;
    (m as u128)
        .checked_mul(dk - 1)
        .map(|x| x / (d as u128 - 1))
        .ok_or_else(|| Error::InvalidArgument(format!("atom count overflows at level {k}")))
}

pub fn new_system(d: u64, m: u64, p: WeightVector) -> Result<DigitSystem> {
    DigitSystem::new(d, m, p)
}

/// A finite word over `0..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(digits: Vec<u32>, sys: &DigitSystem) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&x| u64::from(x) > sys.m) {
            return Err(Error::InvalidArgument(format!(
                "digit {bad} exceeds m = {}",
                sys.m
            )));
        }
        Ok(Word(digits))
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Juxtaposition `(self, other)`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Drops the first digit.
    pub fn shift(&self) -> Word {
        Word(self.0.iter().skip(1).copied().collect())
    }

    /// Atom index `j` with `pi(word) = j d^{-|word|}`.
    pub fn atom_index(&self, d: u64) -> u128 {
        self.0
            .iter()
            .fold(0u128, |acc, &x| acc * d as u128 + x as u128)
    }
}

/// Returns the system with reversed weights when `p_0 > p_m`; the measure is
/// reflected about the midpoint of its support, which changes no
/// multifractal quantity.
pub fn flip(sys: &DigitSystem) -> DigitSystem {
    let m = sys.m as usize;
    if sys.p.0[0] > sys.p.0[m] {
        DigitSystem::new(sys.d, sys.m, sys.p.reversed())
            .expect("reversal preserves validity and regularity")
    } else {
        sys.clone()
    }
}

/// The same measure seen as a system with base `d^k`; its weights are the
/// level-`k` atom masses.
pub fn iterate(sys: &DigitSystem, k: u32, budget: &Budget) -> Result<DigitSystem> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "iteration level must be >= 1".into(),
        ));
    }
    if k == 1 {
        return Ok(sys.clone());
    }
    let d = (sys.d as u128)
        .checked_pow(k)
        .filter(|&x| x <= u64::MAX as u128)
        .ok_or_else(|| Error::InvalidArgument(format!("d^{k} overflows")))? as u64;
    let m = sys.max_atom(k)?;
    budget.check_atoms(m + 1)?;
    let level = atoms::atom_masses(sys, k, budget)?;
    let weights: Vec<f64> = level.log_mass().iter().map(|l| l.exp()).collect();
    DigitSystem::new(d, m as u64, WeightVector::normalized(weights)?)
}

/// Weights of the convolution of the two measures (same base assumed).
pub fn convolve_weights(p: &WeightVector, p2: &WeightVector) -> WeightVector {
    let mut v = vec![0.0; p.len() + p2.len() - 1];
    for (j, &a) in p.0.iter().enumerate() {
        for (jj, &b) in p2.0.iter().enumerate() {
            v[j + jj] += a * b;
        }
    }
    WeightVector(v)
}

/// Smallest bias for which the `m`-fold biased Cantor convolution has
/// regular weights: `1 / (1 + m^{1/(m-1)})`.
pub fn regularity_threshold(m: u32) -> f64 {
    let m = m as f64;
    1.0 / (1.0 + m.powf(1.0 / (m - 1.0)))
}

/// The `k`-fold convolution of the biased middle-third Cantor measure with
/// weights `(bias, 1 - bias)`: base 3, `m = k`,
/// `p_i = C(k, i) (1 - bias)^i bias^(k - i)`.
pub fn cantor_convolution(k: u32, bias: f64) -> Result<DigitSystem> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "convolution order must be >= 3, got {k}"
        )));
    }
    if !(bias > 0.0 && bias <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "bias must lie in (0, 1/2], got {bias}"
        )));
    }
    let mut w = vec![1.0];
    let base = WeightVector(vec![bias, 1.0 - bias]);
    for _ in 0..k {
        w = convolve_weights(&WeightVector(w), &base).0;
    }
    DigitSystem::new(3, k as u64, WeightVector::new(w)?)
}

/// Uniform weights `1 / (m + 1)` in base `d`.
pub fn uniform(d: u64, m: u64) -> Result<DigitSystem> {
    let w = vec![1.0 / (m + 1) as f64; m as usize + 1];
    DigitSystem::new(d, m, WeightVector::new(w)?)
}

/// Whether every infinite continuation of the level-`k` atom `j` projects
/// strictly inside `(xi - 1, 1)`. Integer arithmetic only.
pub fn is_barrier_atom(sys: &DigitSystem, k: u32, j: u128) -> Result<bool> {
    let dk = (sys.d as u128)
        .checked_pow(k)
        .ok_or_else(|| Error::InvalidArgument(format!("d^{k} overflows")))?;
    let (d1, m) = (sys.d as u128 - 1, sys.m as u128);
    // xi - 1 < j / d^k   <=>  (m - d + 1) d^k < j (d - 1)
    let left = (m + 1 - (d1 + 1))
        .checked_mul(dk)
        .zip(j.checked_mul(d1))
        .map(|(l, r)| l < r);
    // (j + xi) / d^k < 1   <=>  j (d - 1) + m < (d - 1) d^k
    let right = j
        .checked_mul(d1)
        .and_then(|x| x.checked_add(m))
        .zip(d1.checked_mul(dk))
        .map(|(l, r)| l < r);
    match (left, right) {
        (Some(a), Some(b)) => Ok(a && b),
        _ => Err(Error::InvalidArgument("barrier test overflows".into())),
    }
}

/// Result of a barrier search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BarrierSearch {
    /// Level at which barrier atoms first appear.
    pub level: u32,
    /// Every barrier atom at that level, ascending.
    pub atoms: Vec<u128>,
}

/// Finds the first level `k <= max_level` with barrier atoms.
pub fn find_barrier(sys: &DigitSystem, max_level: u32) -> Result<BarrierSearch> {
    if !sys.xi_below_two() {
        return Err(Error::NoBarrier);
    }
    let (d1, m) = (sys.d as u128 - 1, sys.m as u128);
    for k in 1..=max_level {
        let dk = (sys.d as u128)
            .checked_pow(k)
            .ok_or_else(|| Error::InvalidArgument(format!("d^{k} overflows")))?;
        let lo = (m - d1) * dk / d1 + 1;
        let Some(top) = (d1 * dk).checked_sub(m + 1) else {
            continue;
        };
        let hi = (top / d1).min(sys.max_atom(k)?);
        if hi >= lo {
            return Ok(BarrierSearch {
                level: k,
                atoms: (lo..=hi).collect(),
            });
        }
    }
    Err(Error::BarrierNotFound { max_level })
}

/// Default level cap for [`find_barrier`].
pub const DEFAULT_BARRIER_LEVEL: u32 = 4;

/// Iterates `sys` to the first level with barrier atoms, so that each atom
/// becomes a barrier digit of the returned system.
pub fn with_barrier(
    sys: &DigitSystem,
    max_level: u32,
    budget: &Budget,
) -> Result<(DigitSystem, BarrierSearch)> {
    let search = find_barrier(sys, max_level)?;
    let iterated = iterate(sys, search.level, budget)?;
    Ok((iterated, search))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn cantor3() -> DigitSystem {
        new_system(3, 3, wv(&[0.125, 0.375, 0.375, 0.125])).unwrap()
    }

    #[test]
    fn constants_of_the_three_fold_system() {
        let s = cantor3();
        assert_eq!(s.xi(), 1.5);
        assert_eq!(s.a(), 1);
        assert_eq!(s.theta(), 3.0);
        assert!((s.delta() + 1.0 / 3f64.ln()).abs() < 1e-15);
        assert!(s.xi_below_two());
    }

    #[test]
    fn four_fold_binomial_has_xi_two() {
        let s = new_system(3, 4, wv(&[1.0 / 16.0, 0.25, 6.0 / 16.0, 0.25, 1.0 / 16.0])).unwrap();
        assert_eq!(s.xi(), 2.0);
        assert_eq!(s.a(), 1);
        assert!(!s.xi_below_two());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            new_system(3, 3, wv(&[0.5, 0.2, 0.2, 0.1])),
            Err(Error::NotRegular { index: 0, .. })
        ));
        assert!(matches!(
            new_system(2, 3, wv(&[0.25; 4])),
            Err(Error::BadDimensions { .. })
        ));
        assert!(matches!(
            new_system(3, 2, wv(&[0.25, 0.5, 0.25])),
            Err(Error::BadDimensions { .. })
        ));
        assert!(matches!(
            WeightVector::new(vec![0.5, 0.6]),
            Err(Error::NotAProbabilityVector(_))
        ));
        assert!(matches!(
            WeightVector::new(vec![1.0]),
            Err(Error::NotAProbabilityVector(_))
        ));
        assert!(matches!(
            new_system(3, 4, wv(&[0.25; 4])),
            Err(Error::NotAProbabilityVector(_))
        ));
    }

    #[test]
    fn regularity_examples() {
        assert!(is_regular(&wv(&[0.125, 0.375, 0.375, 0.125])));
        assert!(!is_regular(&wv(&[0.4, 0.2, 0.4])));
        // bias 0.3 lies below the m = 3 threshold
        let b = 0.3f64;
        let w = [
            (1.0 - b).powi(0) * b.powi(3),
            3.0 * (1.0 - b) * b * b,
            3.0 * (1.0 - b).powi(2) * b,
            (1.0 - b).powi(3),
        ];
        assert!(!is_regular(&wv(&w)));
    }

    #[test]
    fn flip_reverses_only_when_needed() {
        let s = new_system(3, 3, wv(&[0.1, 0.3, 0.35, 0.25])).unwrap();
        assert_eq!(flip(&s), s);
        let t = new_system(3, 3, wv(&[0.25, 0.35, 0.3, 0.1])).unwrap();
        let f = flip(&t);
        assert_eq!(f.weights().entries(), &[0.1, 0.3, 0.35, 0.25]);
        assert_eq!(flip(&flip(&t)), f);
    }

    #[test]
    fn convolution_examples() {
        let half = wv(&[0.5, 0.5]);
        let b2 = convolve_weights(&half, &half);
        assert_eq!(b2.entries(), &[0.25, 0.5, 0.25]);
        let b3 = convolve_weights(&b2, &half);
        assert_eq!(b3.entries(), &[0.125, 0.375, 0.375, 0.125]);
        let unit = WeightVector(vec![1.0]);
        assert_eq!(convolve_weights(&b3, &unit), b3);
    }

    #[test]
    fn cantor_convolution_examples() {
        let s = cantor_convolution(3, 0.5).unwrap();
        assert_eq!(s.weights().entries(), &[0.125, 0.375, 0.375, 0.125]);
        let s4 = cantor_convolution(4, 0.5).unwrap();
        let expect = [1.0, 4.0, 6.0, 4.0, 1.0].map(|x| x / 16.0);
        assert_eq!(s4.weights().entries(), &expect);
        assert!(matches!(
            cantor_convolution(3, 0.36),
            Err(Error::NotRegular { .. })
        ));
        assert!(cantor_convolution(3, 0.37).is_ok());
        assert!(cantor_convolution(2, 0.5).is_err());
        assert!(cantor_convolution(3, 0.6).is_err());
    }

    #[test]
    fn threshold_values() {
        assert!((regularity_threshold(3) - 0.366025).abs() < 1e-6);
        assert!((regularity_threshold(2) - 1.0 / 3.0).abs() < 1e-15);
        let direct = 1.0 / (1.0 + 4f64.powf(1.0 / 3.0));
        assert!((regularity_threshold(4) - direct).abs() < 1e-15);
        assert!((regularity_threshold(4) - 0.386488).abs() < 1e-6);
    }

    #[test]
    fn iterate_level_one_is_identity() {
        let s = cantor3();
        assert_eq!(iterate(&s, 1, &Budget::default()).unwrap(), s);
    }

    #[test]
    fn iterate_two_levels_of_the_three_fold_system() {
        let s = iterate(&cantor3(), 2, &Budget::default()).unwrap();
        assert_eq!((s.d(), s.m()), (9, 12));
        assert_eq!(s.weights().len(), 13);
        assert!(s.weights().is_regular());
        // exhaustive enumeration of the 16 two-digit words
        let p = [0.125, 0.375, 0.375, 0.125];
        let mut brute = [0.0; 13];
        for i in 0..4 {
            for j in 0..4 {
                brute[3 * i + j] += p[i] * p[j];
            }
        }
        for (a, b) in s.weights().entries().iter().zip(brute.iter()) {
            assert!((a - b).abs() <= 1e-14 * b);
        }
    }

    #[test]
    fn iteration_composes() {
        let b = Budget::default();
        let twice = iterate(&iterate(&cantor3(), 2, &b).unwrap(), 2, &b).unwrap();
        let once = iterate(&cantor3(), 4, &b).unwrap();
        assert_eq!((twice.d(), twice.m()), (once.d(), once.m()));
        for (x, y) in twice
            .weights()
            .entries()
            .iter()
            .zip(once.weights().entries())
        {
            assert!((x - y).abs() <= 1e-12 * y);
        }
    }

    #[test]
    fn iterate_respects_budget() {
        let tight = Budget {
            max_atoms: 100,
            max_words: 100,
        };
        assert!(matches!(
            iterate(&cantor3(), 5, &tight),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn barrier_of_the_three_fold_system() {
        let found = find_barrier(&cantor3(), 3).unwrap();
        assert_eq!(found.level, 2);
        assert_eq!(found.atoms, vec![5, 6, 7]);
        // exhaustive recheck of all 13 level-2 atoms
        let brute: Vec<u128> = (0..=12)
            .filter(|&j| {
                let x = j as f64 / 9.0;
                0.5 < x && x + 1.5 / 9.0 < 1.0
            })
            .collect();
        assert_eq!(brute, found.atoms);
    }

    #[test]
    fn barrier_requires_xi_below_two() {
        assert_eq!(
            find_barrier(&cantor_convolution(4, 0.5).unwrap(), 4),
            Err(Error::NoBarrier)
        );
        assert_eq!(
            find_barrier(&uniform(3, 4).unwrap(), 4),
            Err(Error::NoBarrier)
        );
        assert_eq!(
            find_barrier(&cantor3(), 1),
            Err(Error::BarrierNotFound { max_level: 1 })
        );
    }

    #[test]
    fn barrier_digits_of_the_iterated_system() {
        let (it, found) = with_barrier(&cantor3(), 4, &Budget::default()).unwrap();
        assert_eq!(it.d(), 9);
        for b in 0..=12u32 {
            assert_eq!(it.is_barrier_digit(b), found.atoms.contains(&(b as u128)));
        }
        // uniform m = d = 4 already has a barrier digit at level 1
        let u = uniform(4, 4).unwrap();
        assert_eq!(find_barrier(&u, 4).unwrap().atoms, vec![2]);
    }

    #[test]
    fn word_index_and_shift() {
        let s = cantor3();
        let w = Word::new(vec![1, 0], &s).unwrap();
        assert_eq!(w.atom_index(3), 3);
        assert_eq!(w.shift().digits(), &[0]);
        assert!(Word::new(vec![4], &s).is_err());
    }
}
