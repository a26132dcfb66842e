//! Symbolic 1/c expansion of equal-time two-fermion Hamiltonians.
//!
//! The crate provides:
//!
//! * [`expr`] — a canonical graded noncommutative algebra over abstract
//!   operator symbols with exact complex rational-function coefficients in
//!   the two masses,
//! * [`engine`] — the iterative unitary reduction that removes odd sectors
//!   order by order (generator construction, truncated conjugation series,
//!   sequencing policies, and the even-even cleanup transformation),
//! * [`references`] — hard-coded transformed-Hamiltonian reference
//!   expressions and diff reporting,
//! * [`oracle`] — an independent numerical certifier that evaluates
//!   expressions on concrete graded matrices and verifies unitary
//!   equivalence by order-scaling in c,
//! * [`problem`], [`render`], [`cli`] — problem-file parsing, deterministic
//!   pretty-printing, and the command-line front end.
//!
//! See the crate `examples/` directory for one runnable example per
//! capability.

pub mod cli;
pub mod coeff;
pub mod engine;
pub mod expr;
pub mod matexp;
pub mod oracle;
pub mod poly;
pub mod problem;
pub mod references;
pub mod render;
pub mod table;

pub use coeff::{Coefficient, PolyRatio};
pub use engine::{ReductionConfig, ReductionTrace, SectorKind};
pub use expr::{acomm, comm, AlgebraError, BracketKind, Expression, MonomialKey};
pub use poly::{IntPoly, MassVar};
pub use references::{DiffReport, ReferenceId};
pub use table::{Parity, ParticleParity, SymbolDecl, SymbolId, SymbolTable};
