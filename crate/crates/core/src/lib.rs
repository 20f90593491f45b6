//! Computable cyclicity theory for holomorphic function spaces on the unit ball.
//!
//! The crate turns distance problems of the form `inf ‖g − φ f‖` into
//! exact weighted least squares over polynomial multipliers, and pairs
//! them with potential-theoretic and geometric estimators for boundary
//! zero sets.
//!
//! * [`spaces`]: diagonalized Besov and Drury–Arveson norms.
//! * [`poly`]: sparse multivariate polynomials and multiplication-operator sections.
//! * [`cyclicity`]: finite-degree cyclicity indices, degree sweeps and stability checks.
//! * [`freespace`]: word-indexed free polynomials, free indices and compression.
//! * [`capacity`]: zero-set sampling, equilibrium measures, capacities, box dimension.
//! * [`mixednorm`]: mixed-norm and variable-exponent norms and their indices.

pub mod capacity;
pub mod cyclicity;
pub mod error;
pub mod freespace;
pub mod lsq;
pub mod mixednorm;
pub mod poly;
pub mod spaces;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::{MultiIndex, Polynomial};
pub use spaces::{MomentSequence, Preset, SpaceSpec, WeightLaw};
