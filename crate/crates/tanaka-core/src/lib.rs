//! Exact-arithmetic analysis of distributions given by polynomial vector
//! fields.
//!
//! The pipeline runs bottom-up:
//!
//! * [`fieldalg`]: rationals, polynomials, vector fields, Lie brackets.
//! * [`flag`]: weak derived flag, growth vectors, Cauchy characteristics.
//! * [`gnla`]: the graded nilpotent symbol algebra at a point, free
//!   nilpotent algebras and Witt dimensions.
//! * [`prolong`]: Tanaka prolongation `g_0, g_1, ...` by exact nullspaces.
//! * [`fintype`]: `h_0`, characteristic-variety emptiness and the
//!   finite-dimensionality verdicts.
//! * [`symcheck`]: certification of explicit symmetry fields, the second
//!   filtration degree and graded symbols.
//! * [`models`]: jet spaces, Monge systems and the geometric prolongations.
//! * [`modelio`]: the `.tk` text format and JSON reports.
//! * [`commands`]: the operations behind the `tanaka` command line.

pub mod commands;
pub mod fieldalg;
pub mod fintype;
pub mod flag;
pub mod gnla;
pub mod groebner;
pub mod linalg;
pub mod modelio;
pub mod models;
pub mod par;
pub mod prolong;
pub mod quadext;
pub mod symcheck;

pub use fieldalg::{Chart, PointQ, Polynomial, VectorField, Q};
pub use modelio::Model;
pub use par::Exec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
