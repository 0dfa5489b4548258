//! Fuzzy finite element analysis of steady and transient heat transfer.
//!
//! The crate is organised bottom-up:
//!
//! - [`fuzzy`]: triangular fuzzy numbers, alpha-cuts and closed-interval arithmetic.
//! - [`mesh`]: structured triangulation of a rectangular plate with tagged walls.
//! - [`linalg`]: small dense matrices with Cholesky and LU solvers.
//! - [`fem2d`]: steady Galerkin assembly on linear triangles (conduction, source,
//!   boundary flux and convection) and the plate solve.
//! - [`fem1d`]: transient convection-diffusion on a rod with a theta scheme.
//! - [`uq`]: alpha-cut sweeps through the plate solver using the vertex method,
//!   plus envelope-width sensitivity statistics.
//!
//! All numeric code is generic over [`Scalar`]; the aliases below fix it to `f64`
//! (and `f32` where that is useful).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fem1d;
pub mod fem2d;
pub mod fuzzy;
pub mod linalg;
pub mod mesh;
pub mod scalar;
pub mod uq;

pub use scalar::Scalar;

pub type Interval = fuzzy::Interval<f64>;
pub type TriangularFuzzyNumber = fuzzy::TriangularFuzzyNumber<f64>;
pub type AlphaLevels = fuzzy::AlphaLevels<f64>;
pub type Mesh2D = mesh::Mesh2D<f64>;
pub type PlateParameters = fem2d::PlateParameters<f64>;
pub type LinearSystem = fem2d::LinearSystem<f64>;
pub type TemperatureField = fem2d::TemperatureField<f64>;
pub type Rod1D = fem1d::Rod1D<f64>;
pub type TransientState = fem1d::TransientState<f64>;
pub type FuzzyScenario = uq::FuzzyScenario<f64>;
pub type FuzzyTemperatureField = uq::FuzzyTemperatureField<f64>;
pub type SensitivityReport = uq::SensitivityReport<f64>;

pub type IntervalF32 = fuzzy::Interval<f32>;
pub type TriangularFuzzyNumberF32 = fuzzy::TriangularFuzzyNumber<f32>;
pub type Mesh2DF32 = mesh::Mesh2D<f32>;
pub type PlateParametersF32 = fem2d::PlateParameters<f32>;
