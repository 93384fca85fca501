//! Symmetries and their action on conservation laws.
//!
//! A symmetry in characteristic form `P ∂_u` acts on a conserved current by
//! `(T, X) ↦ (T'(P), X'(P))` and on its multiplier by
//! `Q ↦ R_P*(Q) - R_Q*(P)`, where `G'(P) = R_P(G)` and `G'*(Q) = R_Q(G)`.
//! A conservation law is symmetry-homogeneous when that image equals `λQ`
//! on the solution space (invariant when `λ = 0`).

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::conslaw::{
    check_adjoint_symmetry, check_multiplier, solve_linear_condition, verify_conservation_law,
    Ansatz, ConservedCurrent,
};
use crate::diffops::{boundary_current, frechet, frechet_adjoint, total_derivative};
use crate::error::{Error, Result};
use crate::expr::{Axis, DiffExpr, Monomial, Rational};
use crate::ratlin::{eigen_analysis, QMatrix, QVector};
use crate::soln::{LinDiffOp, NormalPDE};

/// Infinitesimal symmetry generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetryGen {
    /// `P ∂_u`.
    Characteristic(DiffExpr),
    /// `τ ∂_t + ξ ∂_x + η ∂_u`.
    Full {
        tau: DiffExpr,
        xi: DiffExpr,
        eta: DiffExpr,
    },
}

impl SymmetryGen {
    /// `P = η - τ u_t - ξ u_x`.
    pub fn characteristic(&self) -> DiffExpr {
        match self {
            SymmetryGen::Characteristic(p) => p.clone(),
            SymmetryGen::Full { tau, xi, eta } => {
                let ut = total_derivative(&DiffExpr::u(), Axis::T);
                let ux = total_derivative(&DiffExpr::u(), Axis::X);
                eta - &(tau * &ut) - xi * &ux
            }
        }
    }

    /// Prolonged generator applied to `f`: `pr X(f) = f'(P) + τ D_t f + ξ D_x f`.
    pub fn prolong(&self, f: &DiffExpr) -> DiffExpr {
        let base = frechet(f, &self.characteristic());
        match self {
            SymmetryGen::Characteristic(_) => base,
            SymmetryGen::Full { tau, xi, .. } => {
                base + tau * &total_derivative(f, Axis::T) + xi * &total_derivative(f, Axis::X)
            }
        }
    }
}

pub fn characteristic(gen: &SymmetryGen) -> DiffExpr {
    gen.characteristic()
}

/// `G'(P)|_E = 0`.
pub fn check_symmetry(p: &DiffExpr, pde: &NormalPDE) -> bool {
    pde.restrict(&frechet(pde.g(), p)).is_zero()
}

/// Basis of symmetry characteristics within the ansatz, modulo trivial ones.
///
/// All jets up to the ansatz order are admitted, including the leading
/// derivative, so e.g. `-u_t` is found at order one. Solutions vanishing on
/// the solution space are dropped, as are solutions dependent on earlier
/// ones once restricted.
pub fn solve_symmetries(pde: &NormalPDE, ansatz: &Ansatz) -> Vec<DiffExpr> {
    let basis = ansatz.monomials(|_| true);
    let g = pde.g();
    let raw = solve_linear_condition(&basis, |m| pde.restrict(&frechet(g, m)));
    independent_on_solution_space(raw, pde)
}

/// Keeps, in order, each expression whose restriction is independent of the
/// restrictions kept so far.
fn independent_on_solution_space(exprs: Vec<DiffExpr>, pde: &NormalPDE) -> Vec<DiffExpr> {
    let restricted: Vec<DiffExpr> = exprs.iter().map(|e| pde.restrict(e)).collect();
    let index = monomial_index(&restricted);
    let mut kept: Vec<QVector> = Vec::new();
    let mut out = Vec::new();
    for (e, r) in exprs.into_iter().zip(&restricted) {
        let mut trial = kept.clone();
        trial.push(coefficient_vector(r, &index));
        if QMatrix::from_rows(trial.clone()).rank() == trial.len() {
            kept = trial;
            out.push(e);
        }
    }
    out
}

fn monomial_index(exprs: &[DiffExpr]) -> BTreeMap<Monomial, usize> {
    let mut all: Vec<Monomial> = exprs
        .iter()
        .flat_map(|e| e.terms().map(|(m, _)| m.clone()))
        .collect();
    all.sort();
    all.dedup();
    all.into_iter().enumerate().map(|(i, m)| (m, i)).collect()
}

fn coefficient_vector(e: &DiffExpr, index: &BTreeMap<Monomial, usize>) -> QVector {
    let mut v = vec![Rational::default(); index.len()];
    for (m, c) in e.terms() {
        v[index[m]] = c.clone();
    }
    v
}

/// Image of a conserved current under a symmetry.
///
/// Characteristic input gives `(T'(P), X'(P))`; a full generator gives
/// `T_X = pr X(T) + T D_x ξ - X D_x τ`, `X_X = pr X(X) + X D_t τ - T D_t ξ`.
pub fn act_on_current(
    gen: &SymmetryGen,
    cur: &ConservedCurrent,
    pde: &NormalPDE,
) -> Result<ConservedCurrent> {
    if !check_symmetry(&gen.characteristic(), pde) {
        return Err(Error::NotASymmetry);
    }
    if !verify_conservation_law(cur, pde) {
        return Err(Error::NotConserved);
    }
    let (t, x) = (&cur.density, &cur.flux);
    let density = gen.prolong(t);
    let flux = gen.prolong(x);
    Ok(match gen {
        SymmetryGen::Characteristic(_) => ConservedCurrent::new(density, flux),
        SymmetryGen::Full { tau, xi, .. } => ConservedCurrent::new(
            density + t * &total_derivative(xi, Axis::X) - x * &total_derivative(tau, Axis::X),
            flux + x * &total_derivative(tau, Axis::T) - t * &total_derivative(xi, Axis::T),
        ),
    })
}

/// `R_P` with `G'(P) = R_P(G)`.
pub fn symmetry_operator(p: &DiffExpr, pde: &NormalPDE) -> Result<LinDiffOp> {
    pde.extract_operator(&frechet(pde.g(), p))
        .map_err(|_| Error::NotASymmetry)
}

/// `R_Q` with `G'*(Q) = R_Q(G)`.
pub fn adjoint_symmetry_operator(q: &DiffExpr, pde: &NormalPDE) -> Result<LinDiffOp> {
    pde.extract_operator(&frechet_adjoint(pde.g(), q))
        .map_err(|_| Error::NotAdjointSymmetry)
}

/// Multiplier of the transformed conservation law, `R_P*(Q) - R_Q*(P)`.
pub fn act_on_multiplier(p: &DiffExpr, q: &DiffExpr, pde: &NormalPDE) -> Result<DiffExpr> {
    let r_p = symmetry_operator(p, pde)?;
    if !check_multiplier(q, pde) {
        return Err(Error::NotAMultiplier);
    }
    let r_q = adjoint_symmetry_operator(q, pde)?;
    Ok(r_p.apply_adjoint(q) - r_q.apply_adjoint(p))
}

/// The current `Ψ_G(P, Q)` built from a symmetry and an adjoint-symmetry.
pub fn psi_current(p: &DiffExpr, q: &DiffExpr, pde: &NormalPDE) -> Result<ConservedCurrent> {
    if !check_symmetry(p, pde) {
        return Err(Error::NotASymmetry);
    }
    if !check_adjoint_symmetry(q, pde) {
        return Err(Error::NotAdjointSymmetry);
    }
    Ok(boundary_current(pde.g(), p, q))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Invariant,
    Homogeneous(Rational),
    NotHomogeneous,
}

impl Verdict {
    pub fn lambda(&self) -> Option<Rational> {
        match self {
            Verdict::Invariant => Some(Rational::default()),
            Verdict::Homogeneous(l) => Some(l.clone()),
            Verdict::NotHomogeneous => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Invariant => "Invariant",
            Verdict::Homogeneous(_) => "Homogeneous",
            Verdict::NotHomogeneous => "NotHomogeneous",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    /// `R_P*(Q) - R_Q*(P)`, restricted to the solution space unless the
    /// comparison was made off it.
    pub action_multiplier: DiffExpr,
    /// `ΔQ - λ̂ Q` for the best-fit `λ̂` when the verdict is `NotHomogeneous`.
    pub residual: Option<DiffExpr>,
}

/// Where `R_P*(Q) - R_Q*(P)` is compared with `λQ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Comparison {
    #[default]
    OnSolutionSpace,
    /// Literal identity off the solution space. Sensitive to the choice of
    /// `R_P`, `R_Q`, which is fixed only modulo terms vanishing on it.
    OffSolutionSpace,
}

pub fn classify(p: &DiffExpr, q: &DiffExpr, pde: &NormalPDE) -> Result<ClassificationResult> {
    classify_with(p, q, pde, Comparison::OnSolutionSpace)
}

/// Invariance/homogeneity test `R_P*(Q) - R_Q*(P) = λQ`.
pub fn classify_with(
    p: &DiffExpr,
    q: &DiffExpr,
    pde: &NormalPDE,
    mode: Comparison,
) -> Result<ClassificationResult> {
    let q_on_e = pde.restrict(q);
    if q_on_e.is_zero() {
        return Err(Error::TrivialMultiplier);
    }
    let delta = act_on_multiplier(p, q, pde)?;
    let (delta, target) = match mode {
        Comparison::OnSolutionSpace => (pde.restrict(&delta), q_on_e),
        Comparison::OffSolutionSpace => (delta, q.clone()),
    };
    if delta.is_zero() {
        return Ok(ClassificationResult {
            verdict: Verdict::Invariant,
            action_multiplier: delta,
            residual: None,
        });
    }
    let (m, c) = target.leading_term().expect("nonzero target");
    let lambda = delta.coefficient(m) / c;
    let residual = &delta - &target.scale(&lambda);
    let verdict = if residual.is_zero() {
        Verdict::Homogeneous(lambda)
    } else {
        Verdict::NotHomogeneous
    };
    Ok(ClassificationResult {
        residual: (!residual.is_zero()).then_some(residual),
        verdict,
        action_multiplier: delta,
    })
}

/// Matrix of `Q ↦ R_P*(Q) - R_Q*(P)` on a multiplier basis, with its
/// rational eigen-decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionMatrix {
    /// Column `j` holds the coordinates of the image of `basis[j]`.
    pub matrix: QMatrix,
    /// Symmetry-homogeneous multipliers: `(λ, Q, coordinates)`.
    pub eigen: Vec<(Rational, DiffExpr, QVector)>,
    /// Monic characteristic-polynomial factor with no rational roots.
    pub unresolved: Vec<Rational>,
}

/// Action of `P` on the span of `basis`, resolved on the solution space.
pub fn action_matrix(p: &DiffExpr, basis: &[DiffExpr], pde: &NormalPDE) -> Result<ActionMatrix> {
    if !check_symmetry(p, pde) {
        return Err(Error::NotASymmetry);
    }
    if basis.iter().any(|q| !check_multiplier(q, pde)) {
        return Err(Error::NotAMultiplier);
    }
    let images = basis
        .par_iter()
        .map(|q| act_on_multiplier(p, q, pde).map(|d| pde.restrict(&d)))
        .collect::<Result<Vec<_>>>()?;
    let restricted: Vec<DiffExpr> = basis.iter().map(|q| pde.restrict(q)).collect();
    let all: Vec<DiffExpr> = restricted.iter().chain(&images).cloned().collect();
    let index = monomial_index(&all);
    let span = QMatrix::from_columns(
        restricted
            .iter()
            .map(|q| coefficient_vector(q, &index))
            .collect(),
        index.len(),
    );
    if span.rank() != basis.len() {
        return Err(Error::DependentBasis);
    }
    let mut columns = Vec::with_capacity(basis.len());
    for img in &images {
        let coords = span
            .solve(&coefficient_vector(img, &index))
            .ok_or(Error::NotClosed)?;
        columns.push(coords);
    }
    let matrix = QMatrix::from_columns(columns, basis.len());
    let analysis = eigen_analysis(&matrix);
    let eigen = analysis
        .pairs()
        .into_iter()
        .map(|(l, v)| {
            let q: DiffExpr = basis.iter().zip(&v).map(|(b, c)| b.scale(c)).sum();
            (l, q, v)
        })
        .collect();
    Ok(ActionMatrix {
        matrix,
        eigen,
        unresolved: analysis.unresolved,
    })
}

/// `G' = G'*`, i.e. the equation is an Euler–Lagrange equation.
pub fn is_self_adjoint(pde: &NormalPDE) -> bool {
    let op = LinDiffOp::frechet_of(pde.g());
    op.adjoint() == op
}
