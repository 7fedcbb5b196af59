//! The transfer matrices `M_i(k, l) = p_{-l d + k + i}` and everything built
//! from products of them: word products, joint-spectral-radius brackets,
//! restricted minima and Lyapunov-type sums.

use std::fmt;
use std::marker::PhantomData;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::ifs::{DigitSystem, Word};
use crate::logsum::neumaier_sum;
use crate::matrix::{mul_into, Mat};

/// Target number of independent subtrees handed to the thread pool.
const TASKS: u128 = 512;

/// Fixed number of RNG streams for Monte-Carlo sums. The result depends on
/// `(seed, samples)` only, never on the thread count.
pub const MC_CHUNKS: usize = 64;

/// The matrices `M_0..M_m`, each `(2a+1) x (2a+1)`, row and column `r`
/// standing for index `r - a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferMatrixSet {
    a: usize,
    mats: Vec<Mat>,
    log_p: Vec<f64>,
}

impl TransferMatrixSet {
    pub fn new(sys: &DigitSystem) -> Self {
        Self::with_index_bound(sys, sys.a())
    }

    /// Same family with a different index bound `a`.
    pub fn with_index_bound(sys: &DigitSystem, a: usize) -> Self {
        let n = 2 * a + 1;
        let (d, m) = (sys.d() as i64, sys.m() as i64);
        let mats = (0..=m)
            .map(|i| {
                let mut mat = Mat::zeros(n);
                for r in 0..n {
                    for c in 0..n {
                        let (k, l) = (r as i64 - a as i64, c as i64 - a as i64);
                        let idx = -l * d + k + i;
                        if (0..=m).contains(&idx) {
                            mat.set(r, c, sys.p(idx as usize));
                        }
                    }
                }
                mat
            })
            .collect();
        TransferMatrixSet {
            a,
            mats,
            log_p: sys.weights().entries().iter().map(|p| p.ln()).collect(),
        }
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn size(&self) -> usize {
        2 * self.a + 1
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }

    pub fn get(&self, i: usize) -> &Mat {
        &self.mats[i]
    }

    pub fn max_digit(&self) -> usize {
        self.mats.len() - 1
    }

    /// Row/column of the index `0`.
    pub fn center(&self) -> usize {
        self.a
    }

    fn log_max_norm(&self, norm: fn(&Mat) -> f64) -> f64 {
        self.mats.iter().map(norm).fold(0.0, f64::max).ln()
    }
}

pub fn build_matrices(sys: &DigitSystem) -> TransferMatrixSet {
    TransferMatrixSet::new(sys)
}

/// A matrix carried as `exp(log_scale) * mat`, with `mat` normalized to
/// max entry 1 (or all zeros with `log_scale = -inf`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledMat {
    pub log_scale: f64,
    pub mat: Mat,
}

impl ScaledMat {
    fn identity(n: usize) -> Self {
        ScaledMat {
            log_scale: 0.0,
            mat: Mat::identity(n),
        }
    }

    /// `self <- left * parent`, renormalized.
    #[inline]
    fn set_product(&mut self, left: &Mat, parent: &ScaledMat) {
        mul_into(left, &parent.mat, &mut self.mat);
        let s = self.mat.max_entry();
        if s > 0.0 {
            self.mat.scale(1.0 / s);
            self.log_scale = parent.log_scale + s.ln();
        } else {
            self.log_scale = f64::NEG_INFINITY;
        }
    }

    pub fn log_entry(&self, i: usize, j: usize) -> f64 {
        self.log_scale + self.mat.get(i, j).ln()
    }

    pub fn log_norm(&self, norm: Norm) -> f64 {
        self.log_scale
            + match norm {
                Norm::Op1 => self.mat.norm_op1().ln(),
                Norm::OpInf => self.mat.norm_opinf().ln(),
                Norm::Tightest => self.mat.norm_op1().min(self.mat.norm_opinf()).ln(),
            }
    }

    pub fn log_spectral_radius(&self) -> f64 {
        self.log_scale + self.mat.log_spectral_radius()
    }

    /// The unscaled matrix; may underflow for long words.
    pub fn to_mat(&self) -> Mat {
        let mut m = self.mat.clone();
        m.scale(self.log_scale.exp());
        m
    }
}

/// `M(sigma) = M_{sigma_k} ... M_{sigma_1}`.
pub fn word_product(tms: &TransferMatrixSet, word: &Word) -> ScaledMat {
    let mut cur = ScaledMat::identity(tms.size());
    let mut next = cur.clone();
    for &x in word.digits() {
        next.set_product(&tms.mats[x as usize], &cur);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// Submultiplicative matrix norm used for upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    /// Largest column sum.
    Op1,
    /// Largest row sum.
    OpInf,
    /// Both of the above, keeping whichever bound is sharper.
    Tightest,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Op1 => "op1",
            Norm::OpInf => "opinf",
            Norm::Tightest => "tightest",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "op1" => Ok(Norm::Op1),
            "opinf" => Ok(Norm::OpInf),
            "tightest" => Ok(Norm::Tightest),
            _ => Err(Error::InvalidArgument(format!(
                "unknown norm {s:?}; expected op1, opinf or tightest"
            ))),
        }
    }
}

/// Where each side of a bracket came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketMeta {
    pub k: u32,
    pub lower_method: String,
    pub upper_method: String,
}

/// A certified interval `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    pub meta: BracketMeta,
}

impl Bracket {
    pub fn new(lower: f64, upper: f64, k: u32, lower_method: &str, upper_method: &str) -> Self {
        Bracket {
            lower,
            upper,
            meta: BracketMeta {
                k,
                lower_method: lower_method.to_string(),
                upper_method: upper_method.to_string(),
            },
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn overlaps(&self, lo: f64, hi: f64) -> bool {
        self.lower <= hi && lo <= self.upper
    }

    pub fn is_ordered(&self) -> bool {
        self.lower <= self.upper + 1e-12
    }
}

/// Options for the exhaustive enumerations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumOptions {
    pub norm: Norm,
    /// Branch-and-bound for max-type bounds.
    pub prune: bool,
    pub budget: Budget,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            norm: Norm::Op1,
            prune: false,
            budget: Budget::default(),
        }
    }
}

/// Raw output of the maximum search over all words of length `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxRadius {
    pub k: u32,
    /// `max log rho(M(sigma))`.
    pub log_rho: f64,
    /// Word attaining `log_rho`, first in lexicographic order on ties.
    pub rho_word: Vec<u32>,
    /// `max log |M(sigma)|_1`.
    pub log_norm_op1: f64,
    /// `max log |M(sigma)|_inf`.
    pub log_norm_opinf: f64,
    pub leaves_visited: u128,
}

impl MaxRadius {
    pub fn log_norm(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Op1 => self.log_norm_op1,
            Norm::OpInf => self.log_norm_opinf,
            Norm::Tightest => self.log_norm_op1.min(self.log_norm_opinf),
        }
    }

    /// `(rho_tilde_k, rho_hat_k)` in log form, divided by `k`.
    pub fn log_bracket(&self, norm: Norm) -> (f64, f64) {
        let k = self.k as f64;
        (self.log_rho / k, self.log_norm(norm) / k)
    }
}

/// Raw output of the minimum search over interior-start words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinRadius {
    pub k: u32,
    /// `min log rho(M(sigma))` over words with `sigma_1` not in `{0, m}`.
    pub log_rho: f64,
    pub rho_word: Vec<u32>,
    /// `min log eta(sigma)` over the same words.
    pub log_eta: f64,
    pub eta_word: Vec<u32>,
}

fn pow_u128(base: u128, e: u32) -> Option<u128> {
    base.checked_pow(e)
}

fn word_count(first: usize, m1: u128, k: u32, budget: &Budget) -> Result<u128> {
    let n = pow_u128(m1, k - 1)
        .and_then(|x| x.checked_mul(first as u128))
        .ok_or(Error::Budget {
            needed: u128::MAX,
            budget: budget.max_words,
        })?;
    budget.check_words(n)?;
    Ok(n)
}

/// All prefixes of the chosen depth, lexicographic, restricted to the
/// allowed first digits.
fn prefixes(first: &[u32], m1: u32, k: u32) -> Vec<Vec<u32>> {
    let mut depth = 1;
    let mut count = first.len() as u128;
    while depth < k && count < TASKS {
        depth += 1;
        count *= m1 as u128;
    }
    let mut out: Vec<Vec<u32>> = first.iter().map(|&x| vec![x]).collect();
    for _ in 1..depth {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..m1).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Depth-first walk over the subtree below one prefix. `frames[j]` holds
/// the product of the first `j` digits.
struct Walker<'a, A, L, P> {
    tms: &'a TransferMatrixSet,
    k: usize,
    frames: Vec<ScaledMat>,
    log_p: Vec<f64>,
    word: Vec<u32>,
    leaf: &'a L,
    prune: &'a P,
    _acc: PhantomData<fn(&mut A)>,
}

impl<'a, A, L, P> Walker<'a, A, L, P>
where
    L: Fn(&mut A, &[u32], &ScaledMat, f64),
    P: Fn(&A, usize, &ScaledMat) -> bool,
{
    fn new(tms: &'a TransferMatrixSet, k: usize, leaf: &'a L, prune: &'a P) -> Self {
        let n = tms.size();
        Walker {
            tms,
            k,
            frames: vec![ScaledMat::identity(n); k + 1],
            log_p: vec![0.0; k + 1],
            word: Vec::with_capacity(k),
            leaf,
            prune,
            _acc: PhantomData,
        }
    }

    fn push(&mut self, x: u32) {
        let depth = self.word.len();
        let (lo, hi) = self.frames.split_at_mut(depth + 1);
        hi[0].set_product(&self.tms.mats[x as usize], &lo[depth]);
        self.log_p[depth + 1] = self.log_p[depth] + self.tms.log_p[x as usize];
        self.word.push(x);
    }

    fn run(&mut self, prefix: &[u32], acc: &mut A) {
        for &x in prefix {
            self.push(x);
        }
        self.descend(acc);
    }

    fn descend(&mut self, acc: &mut A) {
        let depth = self.word.len();
        if depth == self.k {
            (self.leaf)(acc, &self.word, &self.frames[depth], self.log_p[depth]);
            return;
        }
        if (self.prune)(acc, self.k - depth, &self.frames[depth]) {
            return;
        }
        for x in 0..=self.tms.max_digit() as u32 {
            self.push(x);
            self.descend(acc);
            self.word.pop();
        }
    }
}

/// Runs `leaf` on every word of length `k` whose first digit is in
/// `first`, in parallel over prefixes, folding per-task accumulators in
/// prefix order.
fn enumerate<A, I, L, P, C>(
    tms: &TransferMatrixSet,
    k: u32,
    first: &[u32],
    init: I,
    leaf: L,
    prune: P,
    combine: C,
) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    L: Fn(&mut A, &[u32], &ScaledMat, f64) + Sync,
    P: Fn(&A, usize, &ScaledMat) -> bool + Sync,
    C: Fn(A, A) -> A,
{
    let m1 = tms.mats.len() as u32;
    let parts: Vec<A> = prefixes(first, m1, k)
        .par_iter()
        .map(|prefix| {
            let mut acc = init();
            Walker::new(tms, k as usize, &leaf, &prune).run(prefix, &mut acc);
            acc
        })
        .collect();
    let mut it = parts.into_iter();
    let first_acc = it.next().unwrap_or_else(&init);
    it.fold(first_acc, combine)
}

fn load(a: &AtomicU64) -> f64 {
    f64::from_bits(a.load(Ordering::Relaxed))
}

fn raise(a: &AtomicU64, v: f64) {
    let mut cur = a.load(Ordering::Relaxed);
    while v > f64::from_bits(cur) {
        match a.compare_exchange_weak(cur, v.to_bits(), Ordering::Relaxed, Ordering::Relaxed) {
            Ok(_) => break,
            Err(seen) => cur = seen,
        }
    }
}

#[derive(Clone)]
struct MaxAcc {
    log_rho: f64,
    word: Vec<u32>,
    n1: f64,
    ninf: f64,
    leaves: u128,
}

impl MaxAcc {
    fn empty() -> Self {
        MaxAcc {
            log_rho: f64::NEG_INFINITY,
            word: Vec::new(),
            n1: f64::NEG_INFINITY,
            ninf: f64::NEG_INFINITY,
            leaves: 0,
        }
    }
}

/// Slack below the running best under which a spectral radius need not be
/// computed or a subtree explored.
const PRUNE_MARGIN: f64 = 1e-12;

/// Maximum of `rho`, `|.|_1` and `|.|_inf` over all words of length `k`.
///
/// With `prune`, a subtree is skipped when both
/// `|M(prefix)| * (max_i |M_i|)^remaining` envelopes fall below the best
/// spectral radius found so far: every product below it then has smaller
/// radius and smaller norms than a word already seen, so no maximum changes.
pub fn max_radius(sys: &DigitSystem, k: u32, opts: &EnumOptions) -> Result<MaxRadius> {
    if k == 0 {
        return Err(Error::InvalidArgument("word length must be >= 1".into()));
    }
    let tms = TransferMatrixSet::new(sys);
    let m1 = sys.m() as u128 + 1;
    word_count(m1 as usize, m1, k, &opts.budget)?;
    let first: Vec<u32> = (0..m1 as u32).collect();
    let best = AtomicU64::new(f64::NEG_INFINITY.to_bits());
    let step1 = tms.log_max_norm(Mat::norm_op1);
    let stepinf = tms.log_max_norm(Mat::norm_opinf);
    let prune_on = opts.prune;
    let acc = enumerate(
        &tms,
        k,
        &first,
        MaxAcc::empty,
        |acc: &mut MaxAcc, word, f, _| {
            acc.leaves += 1;
            let n1 = f.log_norm(Norm::Op1);
            let ninf = f.log_norm(Norm::OpInf);
            acc.n1 = acc.n1.max(n1);
            acc.ninf = acc.ninf.max(ninf);
            // rho <= min(n1, ninf); skip words that cannot beat the best
            let bar = acc.log_rho.max(load(&best));
            if n1.min(ninf) < bar - PRUNE_MARGIN {
                return;
            }
            let r = f.log_spectral_radius();
            if r > acc.log_rho {
                acc.log_rho = r;
                acc.word.clear();
                acc.word.extend_from_slice(word);
                raise(&best, r);
            }
        },
        |_: &MaxAcc, remaining, f| {
            if !prune_on {
                return false;
            }
            let b = load(&best);
            let r = remaining as f64;
            let e1 = f.log_norm(Norm::Op1) + r * step1;
            let einf = f.log_norm(Norm::OpInf) + r * stepinf;
            e1 + PRUNE_MARGIN < b && einf + PRUNE_MARGIN < b
        },
        |mut a, b| {
            if b.log_rho > a.log_rho {
                a.log_rho = b.log_rho;
                a.word = b.word;
            }
            a.n1 = a.n1.max(b.n1);
            a.ninf = a.ninf.max(b.ninf);
            a.leaves += b.leaves;
            a
        },
    );
    Ok(MaxRadius {
        k,
        log_rho: acc.log_rho,
        rho_word: acc.word,
        log_norm_op1: acc.n1,
        log_norm_opinf: acc.ninf,
        leaves_visited: acc.leaves,
    })
}

/// Bracket `[rho_tilde_k, rho_hat_k]` on the generalized spectral radius.
pub fn jsr_bounds(sys: &DigitSystem, k: u32, opts: &EnumOptions) -> Result<Bracket> {
    let r = max_radius(sys, k, opts)?;
    let (lo, hi) = r.log_bracket(opts.norm);
    Ok(Bracket::new(
        lo.exp(),
        hi.exp(),
        k,
        "max spectral radius of length-k products, k-th root",
        &format!("max {} norm of length-k products, k-th root", opts.norm),
    ))
}

#[derive(Clone)]
struct MinAcc {
    log_rho: f64,
    rho_word: Vec<u32>,
    log_eta: f64,
    eta_word: Vec<u32>,
}

/// Minima of `rho(M(sigma))` and `eta(sigma)` over words of length `k`
/// whose first digit is interior. Never pruned.
pub fn min_radius(sys: &DigitSystem, k: u32, budget: &Budget) -> Result<MinRadius> {
    if k == 0 {
        return Err(Error::InvalidArgument("word length must be >= 1".into()));
    }
    let tms = TransferMatrixSet::new(sys);
    let m = sys.m() as u32;
    let first: Vec<u32> = (1..m).collect();
    word_count(first.len(), m as u128 + 1, k, budget)?;
    let c = tms.center();
    let acc = enumerate(
        &tms,
        k,
        &first,
        || MinAcc {
            log_rho: f64::INFINITY,
            rho_word: Vec::new(),
            log_eta: f64::INFINITY,
            eta_word: Vec::new(),
        },
        |acc: &mut MinAcc, word, f, _| {
            let eta = f.log_entry(c, c);
            if eta < acc.log_eta {
                acc.log_eta = eta;
                acc.eta_word.clear();
                acc.eta_word.extend_from_slice(word);
            }
            let r = f.log_spectral_radius();
            if r < acc.log_rho {
                acc.log_rho = r;
                acc.rho_word.clear();
                acc.rho_word.extend_from_slice(word);
            }
        },
        |_, _, _| false,
        |mut a, b| {
            if b.log_rho < a.log_rho {
                a.log_rho = b.log_rho;
                a.rho_word = b.rho_word;
            }
            if b.log_eta < a.log_eta {
                a.log_eta = b.log_eta;
                a.eta_word = b.eta_word;
            }
            a
        },
    );
    Ok(MinRadius {
        k,
        log_rho: acc.log_rho,
        rho_word: acc.rho_word,
        log_eta: acc.log_eta,
        eta_word: acc.eta_word,
    })
}

/// Radius bracket for the restricted lower radius: `k`-th roots of the
/// minimal `eta` (lower) and minimal spectral radius (upper) over
/// interior-start words. `eta(sigma) <= rho(M(sigma))` orders the two.
pub fn restricted_min_bounds(sys: &DigitSystem, k: u32, budget: &Budget) -> Result<Bracket> {
    let r = min_radius(sys, k, budget)?;
    let kf = k as f64;
    Ok(Bracket::new(
        (r.log_eta / kf).exp(),
        (r.log_rho / kf).exp(),
        k,
        "min eta over interior-start words, k-th root",
        "min spectral radius over interior-start words, k-th root",
    ))
}

/// How a Lyapunov-type sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum LyapunovMode {
    Exact,
    #[serde(rename = "mc")]
    MonteCarlo {
        samples: u64,
        seed: u64,
    },
}

/// `(1 / (k ln d)) E[-ln |M(omega|k)|]`, a lower bound on the almost sure
/// dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub k: u32,
    pub value: f64,
    /// Standard error of `value`; `None` for the exact sum.
    pub std_error: Option<f64>,
    pub norm: Norm,
    #[serde(flatten)]
    pub mode: LyapunovMode,
    /// Number of independent RNG streams (Monte Carlo only).
    pub chunks: Option<usize>,
}

pub fn lyapunov_sum(
    sys: &DigitSystem,
    k: u32,
    mode: LyapunovMode,
    norm: Norm,
    budget: &Budget,
) -> Result<LyapunovEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("word length must be >= 1".into()));
    }
    let scale = 1.0 / (k as f64 * sys.ln_d());
    let tms = TransferMatrixSet::new(sys);
    match mode {
        LyapunovMode::Exact => {
            let m1 = sys.m() as u128 + 1;
            word_count(m1 as usize, m1, k, budget)?;
            let first: Vec<u32> = (0..m1 as u32).collect();
            // per-task lists of p(sigma) * -log|M(sigma)| for both norms
            let (s1, sinf) = enumerate(
                &tms,
                k,
                &first,
                || (Vec::new(), Vec::new()),
                |acc: &mut (Vec<f64>, Vec<f64>), _, f, log_p| {
                    let p = log_p.exp();
                    if p > 0.0 {
                        acc.0.push(-p * f.log_norm(Norm::Op1));
                        acc.1.push(-p * f.log_norm(Norm::OpInf));
                    }
                },
                |_, _, _| false,
                |mut a, b| {
                    a.0.push(neumaier_sum(b.0));
                    a.1.push(neumaier_sum(b.1));
                    a
                },
            );
            let v1 = neumaier_sum(s1) * scale;
            let vinf = neumaier_sum(sinf) * scale;
            Ok(LyapunovEstimate {
                k,
                value: pick_lower_bound(norm, v1, vinf),
                std_error: None,
                norm,
                mode,
                chunks: None,
            })
        }
        LyapunovMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::BadSampleCount);
            }
            let (m1, se1, minf, seinf) = monte_carlo(&tms, sys, k, samples, seed)?;
            let (value, se) = match norm {
                Norm::Op1 => (m1, se1),
                Norm::OpInf => (minf, seinf),
                Norm::Tightest if m1 >= minf => (m1, se1),
                Norm::Tightest => (minf, seinf),
            };
            Ok(LyapunovEstimate {
                k,
                value: value * scale,
                std_error: Some(se * scale),
                norm,
                mode,
                chunks: Some(MC_CHUNKS),
            })
        }
    }
}

/// Each norm gives a valid lower bound; the larger is sharper.
fn pick_lower_bound(norm: Norm, v1: f64, vinf: f64) -> f64 {
    match norm {
        Norm::Op1 => v1,
        Norm::OpInf => vinf,
        Norm::Tightest => v1.max(vinf),
    }
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if o.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * o.n / n,
            m2: self.m2 + o.m2 + delta * delta * self.n * o.n / n,
        }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2.0 {
            return f64::INFINITY;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

/// Sample means and standard errors of `-log|M(omega|k)|` for both norms.
fn monte_carlo(
    tms: &TransferMatrixSet,
    sys: &DigitSystem,
    k: u32,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64, f64, f64)> {
    let dist = WeightedIndex::new(sys.weights().entries())
        .map_err(|e| Error::InvalidArgument(format!("cannot sample weights: {e}")))?;
    let per = samples / MC_CHUNKS as u64;
    let extra = samples % MC_CHUNKS as u64;
    let parts: Vec<(Moments, Moments)> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = per + u64::from((c as u64) < extra);
            let mut cur = ScaledMat::identity(tms.size());
            let mut next = cur.clone();
            let (mut a1, mut ainf) = (Moments::default(), Moments::default());
            for _ in 0..n {
                cur.mat = Mat::identity(tms.size());
                cur.log_scale = 0.0;
                for _ in 0..k {
                    let x = dist.sample(&mut rng);
                    next.set_product(&tms.mats[x], &cur);
                    std::mem::swap(&mut cur, &mut next);
                }
                a1.push(-cur.log_norm(Norm::Op1));
                ainf.push(-cur.log_norm(Norm::OpInf));
            }
            (a1, ainf)
        })
        .collect();
    let (t1, tinf) = parts.into_iter().fold(
        (Moments::default(), Moments::default()),
        |(x, y), (a, b)| (x.merge(a), y.merge(b)),
    );
    Ok((t1.mean, t1.std_error(), tinf.mean, tinf.std_error()))
}
