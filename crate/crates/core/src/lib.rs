//! Higher-order robust PCA: recovery of a low-Tucker-rank tensor plus a sparse
//! corruption tensor from full or partial observations.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`] holds dense N-way storage, matricization, n-mode products,
//!   tensor arrays, observation masks and the binary file formats.
//! * [`prox`] holds the thin SVD and the proximal/projection primitives
//!   (singular value thresholding, shrinkage, best rank-k projection).
//! * [`solvers`] holds the ADAL, inexact ADAL, FISTA and nonconvex solvers,
//!   their residuals and KKT certificates.
//! * [`harness`] generates synthetic low-rank data, corrupts and masks it,
//!   derives default parameters and runs recovery sweeps.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the double-precision types used throughout the CLI.
//! Modes are zero-based in the API.

pub mod error;
pub mod harness;
pub mod prox;
pub mod scalar;
pub mod solvers;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Tensor = tensor::DenseTensor<f64>;
pub type Tensor32 = tensor::DenseTensor<f32>;
pub type Matrix = tensor::Matrix<f64>;
pub type Matrix32 = tensor::Matrix<f32>;
pub type TensorArray = tensor::TensorArray<f64>;
pub type Svd = prox::Svd<f64>;
pub type SolverConfig = solvers::SolverConfig<f64>;
pub type SolverResult = solvers::SolverResult<f64>;
pub type Problem = solvers::Problem<f64>;
