//! Random generators and brute-force oracles for the osm test suites.
//!
//! Oracles here deliberately avoid the library's algorithms: globs are
//! matched by a DP table, CTL is evaluated by naive fixpoint iteration, and
//! traces are decided by exhaustive depth-first search.

pub mod corpus;
pub mod gen;
pub mod oracle;
