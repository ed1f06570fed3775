//! Numerical laboratory for permutation-invariant (mean-field) quantum spin
//! systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`lie_basis`]: unit-norm traceless Hermitian generators of `M_ℓ(ℂ)`,
//!   structure constants and state-space coordinates.
//! * [`poly`]: real polynomials on the state body with the Lie–Poisson
//!   bracket and coefficient-sum norm bounds.
//! * [`bch`]: the Baker–Campbell–Hausdorff recursion over an abstract
//!   bracket, exact Bernoulli numbers and the majorant series.
//! * [`quantize`]: quantization of polynomials into symmetrized operators,
//!   with a dense full-tensor backend and a spin-sector block backend (ℓ = 2).
//! * [`thermo`]: Gibbs states, log-moment generating functions, outcome
//!   distributions, the mean-field variational principle and Legendre
//!   transforms.

pub mod bch;
pub mod error;
pub mod lie_basis;
pub mod linalg;
pub mod optim;
pub mod poly;
pub mod quantize;
pub mod thermo;

pub use error::{Error, Result};
pub use lie_basis::{build_basis, MatrixBasis, StateCoords};
pub use poly::Polynomial;
