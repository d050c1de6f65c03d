//! Dirichlet spectra, torsion functions and minimal Gelfand solutions on
//! spherical caps of S^N.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Gamma/digamma, hypergeometric and Legendre functions;
//! * [`cap`]: cap geometry, radial grids and inner products;
//! * [`eigen`]: radial Dirichlet eigenpairs by shooting;
//! * [`torsion`]: the torsion function by closed form, Green's quadrature
//!   and eigenfunction series;
//! * [`gelfand`]: minimal solutions of -Δu = λ f(u) and bracketing of the
//!   extremal parameter.

pub mod cap;
pub mod eigen;
pub mod gelfand;
pub mod ode;
pub mod quadrature;
mod roots;
pub mod specfun;
pub mod torsion;

pub use cap::{inner_product, CapDomain, CapError, RadialFunction, RadialGrid};
pub use eigen::{EigenError, EigenPair};
pub use gelfand::{GelfandError, LambdaStarEstimate, MinimalSolution, Nonlinearity};
pub use specfun::SpecfunError;
pub use torsion::{TorsionError, TorsionMethod, TorsionResult};
