//! Power-sum DC decompositions and boosted DCA solvers for polynomial
//! programs over polyhedra.
//!
//! The pipeline: a sparse polynomial is split into a difference of convex
//! power sums ([`decomp`]), the convex subproblems arising in DCA-type
//! iterations are solved by a fast dual proximal-gradient method ([`fdpg`]),
//! and the boosted variants accelerate each iteration with a line search
//! along the DCA displacement ([`linesearch`], [`solvers`]). The [`mvsk`]
//! module builds mean-variance-skewness-kurtosis portfolio instances that
//! exercise the whole stack.

pub mod decomp;
mod error;
pub mod fdpg;
mod linalg;
pub mod linesearch;
pub mod mvsk;
pub mod poly;
pub mod polyhedron;
pub mod solvers;

pub use decomp::{DcBlock, DcForm, PowerSum};
pub use error::{Error, Result};
pub use mvsk::MomentSet;
pub use poly::{MultiIndex, SparsePolynomial};
pub use polyhedron::{Polyhedron, PolyhedronKind};
pub use solvers::{SolveStatus, SolveTrace, SolverConfig};
