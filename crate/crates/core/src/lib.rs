//! Point defects of index k/2 in two-dimensional nematic liquid crystals,
//! modelled with the Landau-de Gennes Q-tensor energy on a disk.
//!
//! The crate is organised around the symmetric two-mode representation
//! `Y(r, φ) = u(r) F_n(φ) + v(r) F_3`, which reduces the Euler-Lagrange PDE to a
//! pair of radial ODEs:
//!
//! - [`qtensor`]: the state space S₀ of symmetric traceless 3×3 matrices, the
//!   orthonormal frame `F_n`, `F_3`, the bulk potential and eigen-analysis.
//! - [`reduced`]: discretisation and minimisation of the radial energy for `(u, v)`.
//! - [`harmonic`]: closed-form solutions of the vanishing-elasticity limit.
//! - [`field2d`]: lifting profiles to full 2D fields on a polar grid, the full
//!   energy, PDE residuals and second-variation checks.
//! - [`io`]: CSV and JSON formats.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fd;
pub mod field2d;
pub mod grid;
pub mod harmonic;
pub mod io;
mod linalg;
pub mod params;
pub mod qtensor;
pub mod reduced;

pub use error::{Error, Result};
pub use field2d::{Field2D, PolarGrid};
pub use grid::{RadialGrid, Spacing};
pub use harmonic::{Branch, PsiProfile};
pub use params::ModelParams;
pub use qtensor::QTensor;
pub use reduced::{Profile, SolveReport};
