//! Shifted Schur measures on strict partitions, treated as a Pfaffian point
//! process, together with the machinery needed to check their scaling
//! limits numerically.
//!
//! The crate is organised bottom-up:
//!
//! * [`miwa`]: real Miwa parameter sets, the multicritical tuning and the
//!   trigonometric helpers `φ`, `D` and `χ`.
//! * [`partition`]: strict partitions, profiles, enumeration and sampling.
//! * [`schur_q`]: Schur Q-functions, measure weights and brute-force
//!   enumeration oracles.
//! * [`kernel`]: the wave function, its Fourier coefficients `J(m)` and the
//!   correlation kernel `K(a, b)`.
//! * [`skew`]: Pfaffians, correlation matrices and gap probabilities.
//! * [`limit_shape`]: the limit shape, bulk density and sine kernel.
//! * [`airy`]: higher-order Airy functions and kernels.
//! * [`tracy_widom`]: Fredholm determinants of the p-Airy kernel.
//! * [`scaling`]: finite-ε experiments against the limit objects.
//! * [`acceptance`]: the numbered verification suite shared by the test
//!   target and the `verify` CLI subcommand.

// `!(x >= 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod airy;
mod error;
pub mod kernel;
pub mod limit_shape;
pub mod miwa;
pub mod partition;
pub mod quadrature;
pub mod reference;
pub mod scaling;
pub mod schur_q;
pub mod skew;
mod sum;
pub mod tracy_widom;

pub use error::{Error, Result};
pub use kernel::JTable;
pub use miwa::{ConditionReport, MiwaParams};
pub use partition::StrictPartition;
pub use skew::SkewMatrix;
pub use sum::NeumaierSum;
