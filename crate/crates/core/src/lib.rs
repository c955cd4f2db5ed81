//! Exponential-type time integrators for evolutionary complex Ginzburg–Landau
//! equations on Cartesian product domains.
//!
//! The semidiscrete system `u' = K u + g(u)` is advanced with Runge–Kutta,
//! splitting and Lawson (integrating-factor) schemes. The linear operator `K`
//! is either a Kronecker sum of small dense per-direction matrices (finite
//! differences), whose exponential acts through a Tucker operator of μ-mode
//! products, or a diagonal Fourier symbol (periodic pseudospectral), whose
//! exponential is a pointwise multiplication in coefficient space.
//!
//! Data-parallel kernels use rayon when the `parallel` feature is enabled
//! (default). Results are bitwise identical with and without it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod flows;
pub mod integrators;
pub mod linalg;
pub mod operators;
mod par;
pub mod params;
pub mod spectral;
pub mod tensor;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use num_complex::Complex64 as C64;
pub use params::CglParameters;
pub use tensor::ComplexTensor;
