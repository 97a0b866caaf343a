//! Periodic traveling waves of the Benney short/long-wave interaction system
//! and their spectral stability.
//!
//! The pipeline runs from special functions ([`elliptic`]) through the wave
//! profiles ([`waves`]) and their self-adjoint operators ([`hill`]) to the
//! Hamiltonian linearization ([`linearization`]) and the index-formula
//! verdict ([`stability`]). [`sweep`] runs any of these over parameter grids.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod error;
pub mod expm;
pub mod fourier;
pub mod hill;
pub mod linearization;
pub mod output;
pub mod stability;
pub mod sweep;
pub mod waves;

pub use elliptic::{complete_e, complete_k, jacobi_sn_cn_dn, EllipticModulus, Jacobi};
pub use error::{Error, Result};
pub use waves::{Family, WaveParameters, WaveProfile};
