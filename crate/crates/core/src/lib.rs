//! Discrete logarithms in prime fields.
//!
//! The centrepiece is [`solvers::solve_double_index_calculus`], which runs
//! relation collection for both the base `g` and the target `b`, and stops as
//! soon as some factor-base prime has a verified logarithm in both bases.
//! Classic index calculus, baby-step giant-step, Pollard rho and
//! Pohlig-Hellman are provided as baselines, together with a benchmark
//! harness ([`bench`]) that sweeps smoothness bounds and bit lengths.
//!
//! Values are plain machine integers. Number-theory helpers in [`modmath`]
//! work on `u128`; the solvers require `p < 2^63` so that field arithmetic
//! can run in Montgomery form on `u64`.

pub mod analysis;
pub mod bench;
pub mod error;
pub mod linsys;
pub mod modmath;
pub mod rng;
pub mod smooth;
pub mod solvers;
pub mod worked_example;

pub use error::{Error, Result};
pub use linsys::{Decomposition, EquationSystem, PartialSolution};
pub use modmath::Factorization;
pub use smooth::{BoundFormula, BoundSpec, FactorBase, Relation};
pub use solvers::{Algorithm, Budget, DlpInstance, PartialLogTable, SolveResult};
