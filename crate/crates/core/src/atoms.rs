//! Level-by-level mass recursion over atoms `j d^{-k}`.
//!
//! `w_k(j)` is the total weight of all length-`k` words projecting to
//! `j d^{-k}`; it is the class mass `eta(sigma)` of any word in that class.
//! Everything is stored as natural logs.

use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ifs::{max_atom, DigitSystem, Word};
use crate::logsum::{log_add, log_sum_exp_scaled, neumaier_sum};

/// Atoms per parallel work unit when filling a level.
const CHUNK: usize = 1 << 14;

/// Log-masses of all atoms at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomLevel {
    k: u32,
    log_mass: Vec<f64>,
}

impl AtomLevel {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// `log w_k(j)` for `j = 0..=J_k`.
    pub fn log_mass(&self) -> &[f64] {
        &self.log_mass
    }

    pub fn len(&self) -> usize {
        self.log_mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_mass.is_empty()
    }

    /// `log w_k(j)`.
    pub fn get(&self, j: usize) -> f64 {
        self.log_mass[j]
    }

    /// `log sum_j w_k(j)^q`.
    pub fn log_moment(&self, q: f64) -> f64 {
        log_sum_exp_scaled(&self.log_mass, q)
    }

    /// `log eta(word)` for a word of length `k`.
    pub fn eta(&self, word: &Word, d: u64) -> Result<f64> {
        if word.len() != self.k as usize {
            return Err(Error::InvalidArgument(format!(
                "word of length {} read from level {}",
                word.len(),
                self.k
            )));
        }
        Ok(self.log_mass[word.atom_index(d) as usize])
    }

    /// `sum_j -w log w`, unnormalized.
    pub fn entropy(&self) -> f64 {
        neumaier_sum(self.log_mass.iter().map(|&l| {
            if l == f64::NEG_INFINITY {
                0.0
            } else {
                -l.exp() * l
            }
        }))
    }
}

fn log_weights(sys: &DigitSystem) -> Vec<f64> {
    sys.weights().entries().iter().map(|p| p.ln()).collect()
}

fn checked_len(sys: &DigitSystem, k: u32, budget: &Budget) -> Result<usize> {
    let n = max_atom(sys.d(), sys.m(), k)? + 1;
    budget.check_atoms(n)?;
    Ok(n as usize)
}

/// Fills `out[t] = log w(lo + t)` at the next level from the previous
/// window `prev` starting at `prev_lo`. Terms are added in ascending digit
/// order so every cell is reproducible bit-for-bit.
fn next_window(prev: &[f64], prev_lo: u128, lo: u128, out: &mut [f64], lp: &[f64], d: u64) {
    let d = d as u128;
    let m = lp.len() as u128 - 1;
    let prev_hi = prev_lo + prev.len() as u128; // exclusive
    out.par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| {
            let base = lo + (c * CHUNK) as u128;
            for (t, cell) in chunk.iter_mut().enumerate() {
                let j = base + t as u128;
                let mut acc = f64::NEG_INFINITY;
                let mut a = j % d;
                while a <= m && a <= j {
                    let i = (j - a) / d;
                    if i >= prev_lo && i < prev_hi {
                        acc = log_add(acc, prev[(i - prev_lo) as usize] + lp[a as usize]);
                    }
                    a += d;
                }
                *cell = acc;
            }
        });
}

/// The full level-`k` vector.
pub fn atom_masses(sys: &DigitSystem, k: u32, budget: &Budget) -> Result<AtomLevel> {
    if k == 0 {
        return Err(Error::InvalidArgument("level must be >= 1".into()));
    }
    checked_len(sys, k, budget)?;
    let lp = log_weights(sys);
    let mut cur = lp.clone();
    for level in 2..=k {
        let mut next = vec![0.0; checked_len(sys, level, budget)?];
        next_window(&cur, 0, 0, &mut next, &lp, sys.d());
        cur = next;
    }
    Ok(AtomLevel { k, log_mass: cur })
}

/// Every level `1..=k_max`, built incrementally.
pub fn atom_levels(sys: &DigitSystem, k_max: u32, budget: &Budget) -> Result<Vec<AtomLevel>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("level must be >= 1".into()));
    }
    checked_len(sys, k_max, budget)?;
    let lp = log_weights(sys);
    let mut levels = vec![AtomLevel {
        k: 1,
        log_mass: lp.clone(),
    }];
    for level in 2..=k_max {
        let prev = &levels.last().expect("non-empty").log_mass;
        let mut next = vec![0.0; checked_len(sys, level, budget)?];
        next_window(prev, 0, 0, &mut next, &lp, sys.d());
        levels.push(AtomLevel {
            k: level,
            log_mass: next,
        });
    }
    Ok(levels)
}

/// `log w_k(j)` for `j` in `lo..=hi` only. Each lower level is restricted to
/// the atoms that feed the window, so a block of width `W` costs roughly
/// `W (1 + 1/d + 1/d^2 + ...)` cells instead of the whole level.
pub fn atom_block(
    sys: &DigitSystem,
    k: u32,
    lo: u128,
    hi: u128,
    budget: &Budget,
) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("level must be >= 1".into()));
    }
    let top = max_atom(sys.d(), sys.m(), k)?;
    if lo > hi || hi > top {
        return Err(Error::InvalidArgument(format!(
            "atom window [{lo}, {hi}] outside 0..={top}"
        )));
    }
    budget.check_atoms(hi - lo + 1)?;
    let (d, m) = (sys.d() as u128, sys.m() as u128);
    // windows[l - 1] is the window needed at level l
    let mut windows = vec![(lo, hi); k as usize];
    for l in (1..k as usize).rev() {
        let (wlo, whi) = windows[l];
        let jl = max_atom(sys.d(), sys.m(), l as u32)?;
        let nlo = wlo.saturating_sub(m).div_ceil(d);
        windows[l - 1] = (nlo.min(jl), (whi / d).min(jl));
    }
    let lp = log_weights(sys);
    let (l1lo, l1hi) = windows[0];
    let mut cur: Vec<f64> = lp[l1lo as usize..=l1hi as usize].to_vec();
    let mut cur_lo = l1lo;
    for &(wlo, whi) in &windows[1..] {
        let mut next = vec![0.0; (whi - wlo + 1) as usize];
        next_window(&cur, cur_lo, wlo, &mut next, &lp, sys.d());
        cur = next;
        cur_lo = wlo;
    }
    Ok(cur)
}

/// `log eta(word)`, computed from the windowed recursion for a single atom.
pub fn eta_word(sys: &DigitSystem, word: &Word) -> Result<f64> {
    if word.is_empty() {
        return Err(Error::InvalidArgument("empty word".into()));
    }
    let j = word.atom_index(sys.d());
    let v = atom_block(sys, word.len() as u32, j, j, &Budget::default())?;
    Ok(v[0])
}

/// `log Sbar_k(q) = log sum_j w_k(j)^q`.
pub fn sbar(sys: &DigitSystem, k: u32, q: f64, budget: &Budget) -> Result<f64> {
    Ok(atom_masses(sys, k, budget)?.log_moment(q))
}

/// The masses `eta(b, sigma)` for one representative `sigma` of every
/// level-`(k-1)` atom: the level-`k` atoms `b d^{k-1} + j`, `0 <= j <= J_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierBlock {
    b: u32,
    k: u32,
    log_mass: Vec<f64>,
}

impl BarrierBlock {
    pub fn new(sys: &DigitSystem, b: u32, k: u32, budget: &Budget) -> Result<Self> {
        if !sys.is_barrier_digit(b) {
            return Err(Error::NotABarrier { b });
        }
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "barrier block needs k >= 2, got {k}"
            )));
        }
        let dk1 = (sys.d() as u128)
            .checked_pow(k - 1)
            .ok_or_else(|| Error::InvalidArgument(format!("d^{} overflows", k - 1)))?;
        let lo = b as u128 * dk1;
        let hi = lo + max_atom(sys.d(), sys.m(), k - 1)?;
        Ok(BarrierBlock {
            b,
            k,
            log_mass: atom_block(sys, k, lo, hi, budget)?,
        })
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn log_mass(&self) -> &[f64] {
        &self.log_mass
    }

    /// `log Shat_k(q)`.
    pub fn log_moment(&self, q: f64) -> f64 {
        log_sum_exp_scaled(&self.log_mass, q)
    }

    pub fn max_log_mass(&self) -> f64 {
        self.log_mass
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_log_mass(&self) -> f64 {
        self.log_mass.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `log Shat_k(q)` for barrier digit `b`.
pub fn shat(sys: &DigitSystem, b: u32, k: u32, q: f64, budget: &Budget) -> Result<f64> {
    Ok(BarrierBlock::new(sys, b, k, budget)?.log_moment(q))
}

/// `(1 / (k ln d)) sum_j -w_k(j) ln w_k(j)`; an upper bound on the almost
/// sure dimension, in dimension units.
pub fn entropy_sum(sys: &DigitSystem, k: u32, budget: &Budget) -> Result<f64> {
    let level = atom_masses(sys, k, budget)?;
    Ok(level.entropy() / (k as f64 * sys.ln_d()))
}

/// Largest ratio of adjacent atom masses, divided by `k theta`. At most 1
/// for regular systems.
pub fn neighbor_ratio_audit(sys: &DigitSystem, k: u32, budget: &Budget) -> Result<f64> {
    let level = atom_masses(sys, k, budget)?;
    Ok(neighbor_ratio(&level, sys.theta()))
}

pub(crate) fn neighbor_ratio(level: &AtomLevel, theta: f64) -> f64 {
    let worst = level
        .log_mass
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(0.0, f64::max);
    worst.exp() / (level.k as f64 * theta)
}

/// `min log eta(sigma)` over words of length `k` whose first digit is
/// neither `0` nor `m`. Those words cover exactly the contiguous atom range
/// `d^{k-1} ..= (m-1) d^{k-1} + J_{k-1}`.
pub fn restricted_min_log_eta(sys: &DigitSystem, k: u32, budget: &Budget) -> Result<f64> {
    let level = atom_masses(sys, k, budget)?;
    let dk1 = (sys.d() as usize).pow(k - 1);
    let lo = dk1;
    let hi = (sys.m() as usize - 1) * dk1 + max_atom(sys.d(), sys.m(), k - 1)? as usize;
    Ok(level.log_mass[lo..=hi]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{cantor_convolution, iterate, WeightVector};

    fn cantor3() -> DigitSystem {
        cantor_convolution(3, 0.5).unwrap()
    }

    fn brute(sys: &DigitSystem, k: u32) -> Vec<f64> {
        let p = sys.weights().entries();
        let mut v = vec![0.0; max_atom(sys.d(), sys.m(), k).unwrap() as usize + 1];
        let n = p.len().pow(k);
        for mut code in 0..n {
            let mut j = 0usize;
            let mut w = 1.0;
            let mut digits = Vec::new();
            for _ in 0..k {
                digits.push(code % p.len());
                code /= p.len();
            }
            for &x in &digits {
                j = j * sys.d() as usize + x;
                w *= p[x];
            }
            v[j] += w;
        }
        v
    }

    #[test]
    fn level_one_is_the_weights() {
        let lvl = atom_masses(&cantor3(), 1, &Budget::default()).unwrap();
        let w: Vec<f64> = lvl.log_mass().iter().map(|x| x.exp()).collect();
        for (a, b) in w.iter().zip([0.125, 0.375, 0.375, 0.125]) {
            assert!((a - b).abs() < 1e-16);
        }
    }

    #[test]
    fn level_two_atom_three() {
        let lvl = atom_masses(&cantor3(), 2, &Budget::default()).unwrap();
        assert!((lvl.get(3).exp() - 1.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn matches_enumeration() {
        let sys = cantor3();
        for k in 1..=5 {
            let lvl = atom_masses(&sys, k, &Budget::default()).unwrap();
            for (l, b) in lvl.log_mass().iter().zip(brute(&sys, k)) {
                assert!((l.exp() - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn levels_agree_with_single_shot() {
        let sys = cantor_convolution(4, 0.4).unwrap();
        let tower = atom_levels(&sys, 6, &Budget::default()).unwrap();
        for (i, lvl) in tower.iter().enumerate() {
            assert_eq!(
                lvl,
                &atom_masses(&sys, i as u32 + 1, &Budget::default()).unwrap()
            );
        }
    }

    #[test]
    fn windows_agree_with_full_level() {
        let sys = cantor3();
        let full = atom_masses(&sys, 7, &Budget::default()).unwrap();
        let top = full.len() as u128 - 1;
        for (lo, hi) in [(0, 0), (0, top), (5, 40), (top - 3, top), (700, 1500)] {
            let blk = atom_block(&sys, 7, lo, hi, &Budget::default()).unwrap();
            assert_eq!(blk.as_slice(), &full.log_mass()[lo as usize..=hi as usize]);
        }
        assert!(atom_block(&sys, 7, 3, top + 1, &Budget::default()).is_err());
    }

    #[test]
    fn eta_word_examples() {
        let sys = cantor3();
        let w = |v: Vec<u32>| Word::new(v, &sys).unwrap();
        assert!((eta_word(&sys, &w(vec![1, 0])).unwrap() - (1.0f64 / 16.0).ln()).abs() < 1e-15);
        assert_eq!(
            eta_word(&sys, &w(vec![0, 3])).unwrap(),
            eta_word(&sys, &w(vec![1, 0])).unwrap()
        );
        for i in 0..=3 {
            assert_eq!(eta_word(&sys, &w(vec![i])).unwrap(), sys.p(i as usize).ln());
        }
        assert!(eta_word(&sys, &w(vec![])).is_err());
    }

    #[test]
    fn sbar_examples() {
        let sys = cantor3();
        let b = Budget::default();
        assert!(sbar(&sys, 6, 1.0, &b).unwrap().abs() < 1e-13);
        let n = max_atom(3, 3, 6).unwrap() as f64 + 1.0;
        assert!((sbar(&sys, 6, 0.0, &b).unwrap() - n.ln()).abs() < 1e-13);
        let direct: f64 = brute(&sys, 2).iter().map(|w| w * w).sum();
        assert!((sbar(&sys, 2, 2.0, &b).unwrap() - direct.ln()).abs() < 1e-14);
    }

    #[test]
    fn shat_on_the_iterated_system() {
        let b = Budget::default();
        let it = iterate(&cantor3(), 2, &b).unwrap();
        assert!(matches!(
            shat(&it, 4, 2, 1.0, &b),
            Err(Error::NotABarrier { b: 4 })
        ));
        assert!(shat(&it, 5, 1, 1.0, &b).is_err());
        assert!((shat(&it, 5, 2, 0.0, &b).unwrap() - 13f64.ln()).abs() < 1e-14);
        assert!(shat(&it, 5, 3, 1.0, &b).unwrap() < 0.0);
        // enumeration over the 13 atoms following digit 5
        let p = it.weights().entries();
        for q in [-2.0, 0.5, 3.0] {
            let mut terms = [0.0; 13];
            for s in 0..=12usize {
                for t in 0..=12usize {
                    let j = 9 * s + t;
                    if (45..=57).contains(&j) {
                        terms[j - 45] += p[s] * p[t];
                    }
                }
            }
            let direct: f64 = terms.iter().map(|w| w.powf(q)).sum();
            assert!((shat(&it, 5, 2, q, &b).unwrap() - direct.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_of_the_first_level() {
        let sys = cantor3();
        let expect = (2.0 * 0.125 * 8f64.ln() + 2.0 * 0.375 * (8.0f64 / 3.0).ln()) / 3f64.ln();
        let got = entropy_sum(&sys, 1, &Budget::default()).unwrap();
        assert!((got - expect).abs() < 1e-14);
        assert!((got - 1.142789).abs() < 1e-6);
    }

    #[test]
    fn neighbor_audit_boundary() {
        let v = neighbor_ratio_audit(&cantor3(), 1, &Budget::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn restricted_minimum_matches_enumeration() {
        let sys = cantor_convolution(4, 0.5).unwrap();
        let b = Budget::default();
        for k in 1..=4 {
            let lvl = brute(&sys, k);
            let dk1 = 3usize.pow(k - 1);
            let mut min = f64::INFINITY;
            for s1 in 1..4usize {
                for j in 0..=max_atom(3, 4, k - 1).unwrap() as usize {
                    min = min.min(lvl[s1 * dk1 + j]);
                }
            }
            let got = restricted_min_log_eta(&sys, k, &b).unwrap();
            assert!((got - min.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weights_are_tolerated() {
        let sys =
            DigitSystem::new(3, 3, WeightVector::new(vec![0.0, 0.5, 0.5, 0.0]).unwrap()).unwrap();
        let lvl = atom_masses(&sys, 3, &Budget::default()).unwrap();
        assert!(lvl.log_moment(1.0).abs() < 1e-14);
        assert_eq!(lvl.get(0), f64::NEG_INFINITY);
    }

    #[test]
    fn budget_is_enforced() {
        let tight = Budget {
            max_atoms: 50,
            max_words: 50,
        };
        assert!(matches!(
            atom_masses(&cantor3(), 5, &tight),
            Err(Error::Overflow { .. })
        ));
    }
}
