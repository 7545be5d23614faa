//! Convexity analysis for conformally invariant planar elastic energies.
//!
//! For an objective, isotropic energy W on GL+(2) that depends only on the
//! shape change (W(aF) = W(F) for a > 0), rank-one convexity and
//! polyconvexity coincide, and both reduce to one-dimensional convexity
//! statements in any of four scalar representations of W. This crate
//! provides:
//!
//! - exact 2x2 kinematics ([`planar`]): closed-form singular values, polar
//!   factor, principal logarithm, distortion, and the explicit distance and
//!   quasiconvex hull formulas for SO(2);
//! - the representation machinery ([`repr`]): the ratio form h(t), the
//!   squared-log form f(theta), the strain form ftilde(eta), the distortion
//!   form z(r), and exact conversions with chain-rule derivatives;
//! - pointwise criteria ([`criteria`]) deciding convexity per representation
//!   on matched grids, with witnesses;
//! - a seeded sampling oracle ([`oracle`]) probing convexity along rank-one
//!   segments, independent of the representation path;
//! - a catalog of analyzed energies ([`zoo`]) with expected verdicts;
//! - an expression parser ([`expr`]) so energies can be given as strings.

pub mod criteria;
pub mod error;
pub mod expr;
pub mod oracle;
pub mod planar;
pub mod repr;
pub mod zoo;

pub use criteria::{CheckConfig, GrowthBound, Status, Verdict, Witness};
pub use error::{Error, Result};
pub use oracle::{OracleReport, OracleStatus, SampleSpec};
pub use planar::{Invariants2, Mat2, SingularPair};
pub use repr::{Domain, EnergyRep, ReprKind, ScalarFn, SymmetricFn2};
pub use zoo::{ExpectedVerdict, ZooEntry, ZooReport};
