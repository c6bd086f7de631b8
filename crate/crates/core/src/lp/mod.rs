//! Bounded-variable linear programming with independent certification.

mod certificate;
mod problem;
mod simplex;

pub use certificate::{verify_certificate, CertificateReport, CERT_TOL};
pub use problem::{LpError, LpProblem};
pub use simplex::{solve, LpSolution, LpStatus};
