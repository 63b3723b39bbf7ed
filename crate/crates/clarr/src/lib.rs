//! Exact construction and topological invariants of degree-7 conic-line
//! arrangements attached to rational elliptic surfaces.
//!
//! The pipeline: pick four base points and a pencil parameter over Q, build
//! the associated cubic fibration and its section lattice, turn chosen
//! sections into plane conics and lines, verify the intersection pattern
//! exactly, and compute cover invariants (splitting types, dihedral
//! dependence) that tell topologically distinct arrangements apart even when
//! their combinatorics agree.
//!
//! All computation is exact over multiquadratic extensions of Q; nothing in
//! the verification path touches floating point.

pub mod catalog;
pub mod cli;
pub mod deform;
pub mod invariants;
pub mod mw;
pub mod parse;
pub mod plane;
pub mod polyring;
pub mod qtower;
pub mod surface;
pub mod svg;

pub use cli::run_cli;
