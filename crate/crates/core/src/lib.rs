//! Exact set-valued risk measures on finite probability spaces.
//!
//! Positions are random vectors on finitely many atoms, acceptance sets are
//! polyhedra described by lifted linear systems, and every computation runs
//! in big rationals. The risk region `R(X)` is projected to explicit
//! halfspaces and preferences are decided by region containment.
//! Scalarizations come with primal optimizers or dual certificates.

pub mod acceptance;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod markets;
pub mod preference;
pub mod rational;
pub mod risk;
pub mod scenario;
pub mod systemic;
