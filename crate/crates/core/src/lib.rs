//! Ground states, form factors and thermodynamic polarization of the cyclic
//! solid-on-solid model with periodic boundary conditions.

pub mod bethe;
pub mod density;
pub mod elliptic;
pub mod error;
pub mod formfactor;
pub mod identities;
pub mod model;
pub mod oracle;
pub mod thermo;

pub use bethe::{solve_ground_state, BetheState, GroundStateLabel};
pub use density::DensityModel;
pub use elliptic::{JacobiLine, ThetaContext};
pub use error::{CsosError, Result};
pub use model::ModelParams;
pub use num_complex::Complex64;
