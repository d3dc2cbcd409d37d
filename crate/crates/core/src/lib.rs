//! Verification toolkit for shearing maps `(z1, z2) -> (z1 + g(z2), z2)` of
//! the unit ball in C^2.
//!
//! * [`series`]: normalized power series, coefficient functionals, the
//!   [`series::DiskFunction`] abstraction.
//! * [`shear`]: the maps themselves and their coefficient certificates
//!   (starlike, starshapelike, Loewner-embeddable).
//! * [`starlike`]: sampled scans of the starlikeness functional and of the
//!   starlike-image inequality.
//! * [`growth`]: 2x2 operator norms and the S0 differential growth bound.
//! * [`counterexample`]: the shear by `z^2 exp(i/(1-z)^3)` whose differential
//!   outgrows every S0 bound.
//! * [`cli`]: the `shearball` command line front end.

pub mod cli;
pub mod counterexample;
pub mod error;
pub mod growth;
pub mod logmag;
pub mod report;
pub mod sampling;
pub mod series;
pub mod shear;
pub mod starlike;

pub use error::{Error, Result};
pub use series::{BallPoint, CoeffSum, CoefficientSeries, DiskFunction, SeriesFunction, Tail};
pub use shear::{Certificate, CertificateKind, CertificateStatus, Jacobian2, ShearingMap};
