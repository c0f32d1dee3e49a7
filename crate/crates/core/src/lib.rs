//! Continuous-time quantum walks on semi-Cayley graphs `SC(G, R, L, S)`
//! over finite abelian groups.
//!
//! The adjacency spectrum comes in closed form from the characters of `G`,
//! which gives the transition matrix `H(t) = exp(itA)` without a dense
//! eigensolver. On top of that sit exact checks and a search for
//! fractional revival and perfect state transfer, the gcd invariants that
//! quantize revival times, and an exhaustive scanner for small groups.

pub mod cayley;
pub mod error;
pub mod graph;
pub mod group;
pub mod mintime;
pub mod report;
pub mod revival;
pub mod scan;
pub mod spectral;
pub mod time;
pub mod tolerance;
pub mod walk;
