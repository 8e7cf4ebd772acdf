//! Curvature of left-invariant metrics on compact Lie groups along
//! inverse-linear paths `Phi_t = (I - t Psi)^{-1}` from a bi-invariant metric.
//!
//! Vectors are coordinate arrays in the canonical basis of the algebra; metrics
//! and directions are endomorphisms relative to the bi-invariant product `h0`.

pub mod curvature;
pub mod error;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod report;
pub mod sampling;
pub mod so4;
pub mod variations;

pub use curvature::{kappa, kappa_coefficients, koszul_oracle, puttmann_curvature, CurvatureCoefficients};
pub use error::{Error, Result};
pub use lie::{build_so3, build_so4, direct_sum, LieAlgebra, Subspace};
pub use linalg::{Matrix, Vector};
pub use metrics::{direction_from_metric, domain_of, path_at, Direction, MetricForm, PathDomain};
pub use report::{AnalysisReport, Verdict, Witness};
