//! Joint time-vertex signal processing.
//!
//! The crate builds graph, cycle (DFT) and joint spectral bases, applies the
//! bivariate isometric joint translation operator and JFIR joint filters,
//! synthesizes and diagnoses joint wide-sense stationary (JWSS) processes and
//! estimates their joint power spectral density (JPSD) with the generalized
//! Bartlett (GBM) and Welch (GWM) methods.
//!
//! Signals are `N x M` matrices (rows are vertices, columns are time steps).
//! Their vectorized form is the column-major stacking, so the joint spectral
//! index of the pair `(l, k)` is `j = l + k * N`.

pub mod error;
pub mod features;
pub mod filtering;
pub mod graph;
pub mod harmonic;
pub mod io;
pub mod jpsd;
pub mod rng;
pub mod sim;
pub mod stationarity;
pub mod translation;

mod linalg;

pub use error::{Error, Result};
pub use filtering::{JointFilterSpec, SpectralResponse};
pub use graph::{Laplacian, WeightedGraph};
pub use harmonic::{JointBasis, SpectralBasis, TimeVertexSignal};
pub use jpsd::{JointWindow, WindowBank};
pub use stationarity::{EmpiricalCovariance, JpsdVector};
pub use translation::PhaseShift;

pub use num_complex::Complex64;
