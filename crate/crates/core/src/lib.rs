//! Exact symbolic computation of conservation laws for scalar evolution-type
//! PDEs `u_L = g(t, x, u, u_t, u_x, ...)` in two independent variables.
//!
//! Everything works over ℚ on differential polynomials: total derivatives,
//! Fréchet derivatives and adjoints, Euler operators, homotopy inversion of
//! divergences, restriction to the solution space, multiplier and symmetry
//! determining systems, and the action of symmetries on conservation laws.

pub mod cli;
pub mod conslaw;
pub mod diffops;
pub mod error;
pub mod expr;
pub mod ratlin;
pub mod soln;
pub mod symmetry;

pub use cli::{parse_expr, Session};
pub use conslaw::{Ansatz, ConservedCurrent, Multiplier};
pub use error::{Error, Result};
pub use expr::{Axis, DiffExpr, JetIndex, Monomial, Rational, Var};
pub use soln::{make_pde, LinDiffOp, NormalPDE};
pub use symmetry::{SymmetryGen, Verdict};
