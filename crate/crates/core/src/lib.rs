//! Spectral laboratory for the Riesz-transform representation of the
//! incompressible Navier-Stokes pressure,
//!
//! ```text
//! p = sum_{i,j} R_i R_j (u_i u_j - F_ij),
//! ```
//!
//! together with the weighted-space machinery around it: the power weights
//! `w_gamma(x) = (1 + |x|)^(-gamma)`, their Muckenhoupt functional, weighted and
//! mixed norms, the discrete maximal function, space-time mollification and a
//! pseudo-spectral solver that produces reference trajectories.
//!
//! Everything lives on origin-centred periodic boxes (see [`spectral::GridSpec`]);
//! integrals over `R^d` become box quadratures.

pub mod corpus;
pub mod error;
pub mod inequality;
pub mod mollification;
pub mod ns;
pub mod pressure;
pub mod quadrature;
pub mod spectral;
pub mod weights;

pub use error::{Error, Result};
