//! First Robin eigenvalues of the p-Laplacian on planar domains.
//!
//! The crate meshes planar domains, solves the nonlinear eigenvalue problem
//! and its companion boundary value problems with P1 finite elements,
//! computes semi-analytic radial ball quantities by shooting, and evaluates
//! the family of upper and lower spectral bounds that tie them together.

pub mod bounds;
pub mod eigensolve;
pub mod error;
pub mod fem;
mod linalg;
pub mod mesh;
pub mod radial;

pub use error::{Error, Result};
pub use fem::{ScalarField, VectorField};
pub use mesh::{generate_mesh, geometry_stats, DomainKind, DomainSpec, GeometryStats, Mesh};
