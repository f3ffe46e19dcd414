//! Exact quantum traces of corner arcs on triangulated polygons, and their
//! naturality under diagonal flips via n-th root quantum cluster mutation.
//!
//! The crate is organized bottom-up:
//!
//! - [`coeff`]: Laurent polynomials in `u = ω^{1/2}` with big-integer coefficients;
//! - [`quiver`]: exchange matrices (stored as `2Q`) and their mutation;
//! - [`surface`]: triangulated polygons, flips, cuts and n-triangulation lattices;
//! - [`balance`]: balanced and mutable-balanced exponent vectors;
//! - [`torus`]: the quantum torus in the Weyl-ordered basis, with exact division;
//! - [`network`]: left-turn networks, path enumeration and left-of exponents;
//! - [`trace`]: corner-arc traces as path sums and the splitting homomorphism;
//! - [`mutation`]: the mutation pipeline, `Θ` for flips and the verifiers.

pub mod balance;
pub mod coeff;
pub mod error;
pub mod mutation;
pub mod network;
pub mod quiver;
pub mod surface;
pub mod torus;
pub mod trace;

pub use balance::ExponentVector;
pub use coeff::ScalarLaurent;
pub use error::{Error, Result};
pub use mutation::{theta_apply, FlipChain, FlipPlan, VerificationReport};
pub use network::Network;
pub use quiver::Seed;
pub use surface::{Lattice, TriSurface};
pub use torus::TorusElement;
pub use trace::{corner_arc_trace, ArcTracer, CornerArc};
