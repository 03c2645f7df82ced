//! Recovery channels for finite type-I subalgebra inclusions.
//!
//! An inclusion `B ⊂ A` is described by its block structure
//! `B = ⊕ M_{m_i}` embedded as `b ↦ ⊕ (b_i ⊗ 1_{k_i})` inside `A = M_n`.
//! Everything is realized in the Hilbert–Schmidt standard form: vectors are
//! matrices, `J` is the adjoint and relative modular operators act by left
//! and right multiplication.
//!
//! Modules:
//!
//! - [`algebra`]: inclusions, embedding, restriction, states and supports.
//! - [`standard_form`]: HS vectors, modular conjugation, relative modular
//!   powers, the embedding isometry `V_σ` and Connes cocycles.
//! - [`measures`]: relative entropy, fidelity, Rényi divergences and
//!   Araki–Masuda `L_p` norms.
//! - [`recovery`]: Petz, rotated Petz and universal recovery channels.
//! - [`analytic`]: the interpolating vectors `Γ` and `Ξ`, Hirschman
//!   interpolation, first-law slopes and spectral filtering.

#![forbid(unsafe_code)]

pub mod algebra;
pub mod analytic;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod optimize;
pub mod quadrature;
pub mod random;
pub mod recovery;
pub mod standard_form;

pub use error::{Error, Result};
pub use linalg::{CMat, Cutoff, C64};
