//! Multifractal analysis of self-similar measures on the line generated by
//! the maps `x -> (x + i) / d`, `i = 0..=m`, with `m >= d` so that the
//! images overlap.
//!
//! The crate computes class masses of digit words by a dynamic program over
//! atoms, transfer-matrix brackets for the extreme local dimensions,
//! finite-level `L^q` spectra with certified bound directions, Legendre
//! transforms and almost sure dimension brackets.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atoms;
pub mod budget;
pub mod config;
pub mod dims;
pub mod error;
pub mod ifs;
pub mod logsum;
pub mod matrix;
pub mod spectra;
pub mod transfer;
pub mod verify;

pub use atoms::{
    atom_block, atom_levels, atom_masses, entropy_sum, eta_word, neighbor_ratio_audit, sbar, shat,
    AtomLevel, BarrierBlock,
};
pub use budget::Budget;
pub use config::SystemSpec;
pub use dims::{
    abs_continuity_certificate, alpha_bar, alpha_lower_bracket, alpha_star_bracket, dim_at_xi,
    dimension_report, formalism_holds, gamma_bracket, golden_closed_form, periodic_dim,
    DimensionReport, GammaBracket, ReportOptions,
};
pub use error::{Error, Result};
pub use ifs::{
    cantor_convolution, convolve_weights, find_barrier, flip, is_regular, iterate, new_system,
    regularity_threshold, uniform, with_barrier, BarrierSearch, DigitSystem, WeightVector, Word,
};
pub use matrix::{spectral_radius, Mat};
pub use spectra::{
    beta_k, dim_range_inner, legendre, legendre_at, multifractal_spectrum, q_crossing, tau,
    tau_hat, tau_piecewise, AuxExponent, Crossing, CrossingCertificate, DimRange, Direction, QGrid,
    SpectrumCurve, TauValue,
};
pub use transfer::{
    build_matrices, jsr_bounds, lyapunov_sum, restricted_min_bounds, word_product, Bracket,
    EnumOptions, LyapunovEstimate, LyapunovMode, Norm, ScaledMat, TransferMatrixSet,
};
pub use verify::{verify, CheckOutcome, Suite, VerifyReport};
