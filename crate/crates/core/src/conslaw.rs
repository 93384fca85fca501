//! Conserved currents, multipliers and the multiplier determining system.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_traits::One;
use rayon::prelude::*;

use crate::diffops::{divergence, euler, frechet_adjoint, invert_divergence};
use crate::error::{Error, Result};
use crate::expr::{DiffExpr, JetIndex, Monomial, Rational};
use crate::ratlin::QMatrix;
use crate::soln::{LinDiffOp, NormalPDE};

/// A density/flux pair `(T, X)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConservedCurrent {
    pub density: DiffExpr,
    pub flux: DiffExpr,
}

impl ConservedCurrent {
    pub fn new(density: DiffExpr, flux: DiffExpr) -> Self {
        ConservedCurrent { density, flux }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ConservedCurrent::new(self.density.scale(c), self.flux.scale(c))
    }
}

impl Add<&ConservedCurrent> for &ConservedCurrent {
    type Output = ConservedCurrent;
    fn add(self, rhs: &ConservedCurrent) -> ConservedCurrent {
        ConservedCurrent::new(&self.density + &rhs.density, &self.flux + &rhs.flux)
    }
}

impl Sub<&ConservedCurrent> for &ConservedCurrent {
    type Output = ConservedCurrent;
    fn sub(self, rhs: &ConservedCurrent) -> ConservedCurrent {
        ConservedCurrent::new(&self.density - &rhs.density, &self.flux - &rhs.flux)
    }
}

impl Neg for &ConservedCurrent {
    type Output = ConservedCurrent;
    fn neg(self) -> ConservedCurrent {
        ConservedCurrent::new(-&self.density, -&self.flux)
    }
}

/// A conservation law multiplier `Q`: `Q·G` is a total divergence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplier(pub DiffExpr);

impl Multiplier {
    pub fn expr(&self) -> &DiffExpr {
        &self.0
    }

    pub fn into_expr(self) -> DiffExpr {
        self.0
    }
}

/// Polynomial ansatz for determining systems: jets up to `max_order`,
/// total jet degree up to `max_jet_degree`, and `t^a x^b` with `a, b`
/// bounded separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ansatz {
    pub max_order: u32,
    pub max_jet_degree: u32,
    pub max_t_degree: u32,
    pub max_x_degree: u32,
}

impl Ansatz {
    pub fn new(max_order: u32, max_jet_degree: u32, max_t_degree: u32, max_x_degree: u32) -> Self {
        Ansatz {
            max_order,
            max_jet_degree,
            max_t_degree,
            max_x_degree,
        }
    }

    /// Monomials of the ansatz over the jets accepted by `allow`, sorted.
    pub fn monomials(&self, allow: impl Fn(JetIndex) -> bool) -> Vec<Monomial> {
        let jets: Vec<JetIndex> = (0..=self.max_order)
            .flat_map(|o| (0..=o).map(move |nt| JetIndex::new(nt, o - nt)))
            .filter(|&j| allow(j))
            .collect();
        let mut jet_parts: Vec<Vec<(JetIndex, u32)>> = vec![Vec::new()];
        let mut frontier: Vec<(usize, Vec<(JetIndex, u32)>)> = vec![(0, Vec::new())];
        for _ in 0..self.max_jet_degree {
            let mut next = Vec::new();
            for (start, factors) in &frontier {
                for (i, &j) in jets.iter().enumerate().skip(*start) {
                    let mut f = factors.clone();
                    f.push((j, 1));
                    next.push((i, f));
                }
            }
            jet_parts.extend(next.iter().map(|(_, f)| f.clone()));
            frontier = next;
        }
        let mut out: Vec<Monomial> = jet_parts
            .into_iter()
            .flat_map(|factors| {
                (0..=self.max_t_degree).flat_map(move |a| {
                    let factors = factors.clone();
                    (0..=self.max_x_degree).map(move |b| Monomial::new(a, b, factors.clone()))
                })
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Solves the homogeneous linear system "`column(Σ c_k m_k)` vanishes
/// identically" for the coefficients `c_k`; `column` must be ℚ-linear.
///
/// Returns the solution space as expressions, in reduced echelon form over
/// the order of `basis`.
pub(crate) fn solve_linear_condition<F>(basis: &[Monomial], column: F) -> Vec<DiffExpr>
where
    F: Fn(&DiffExpr) -> DiffExpr + Sync,
{
    let columns: Vec<DiffExpr> = basis
        .par_iter()
        .map(|m| column(&DiffExpr::term(m.clone(), Rational::one())))
        .collect();
    let mut rows: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for col in &columns {
        for (m, _) in col.terms() {
            let next = rows.len();
            rows.entry(m).or_insert(next);
        }
    }
    let mut system = QMatrix::zeros(rows.len(), basis.len());
    for (j, col) in columns.iter().enumerate() {
        for (m, c) in col.terms() {
            system[(rows[m], j)] = c.clone();
        }
    }
    system
        .nullspace()
        .into_iter()
        .map(|v| combine(basis, &v))
        .collect()
}

pub(crate) fn combine(basis: &[Monomial], coeffs: &[Rational]) -> DiffExpr {
    DiffExpr::from_terms(
        basis
            .iter()
            .zip(coeffs)
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// `(D_t T + D_x X)|_E = 0`.
pub fn verify_conservation_law(cur: &ConservedCurrent, pde: &NormalPDE) -> bool {
    pde.restrict(&divergence(cur)).is_zero()
}

/// Multiplier of a conserved current: with `D_t T + D_x X = R_Φ(G)`,
/// `Q = R_Φ*(1) = Σ_K (-D)^K R_Φ^{(K)}`.
///
/// The result may involve the leading derivative; restrict it for the
/// canonical representative on the solution space.
pub fn multiplier_from_current(cur: &ConservedCurrent, pde: &NormalPDE) -> Result<Multiplier> {
    let op = pde
        .extract_operator(&divergence(cur))
        .map_err(|_| Error::NotConserved)?;
    Ok(Multiplier(op.apply_adjoint(&DiffExpr::one())))
}

/// Whether the current is locally trivial, decided by its multiplier
/// vanishing on the solution space.
pub fn is_trivial_current(cur: &ConservedCurrent, pde: &NormalPDE) -> Result<bool> {
    let q = multiplier_from_current(cur, pde)?;
    Ok(pde.restrict(q.expr()).is_zero())
}

/// Whether two conserved currents differ by a locally trivial one.
pub fn currents_equivalent(
    a: &ConservedCurrent,
    b: &ConservedCurrent,
    pde: &NormalPDE,
) -> Result<bool> {
    is_trivial_current(&(a - b), pde)
}

/// `E_u(Q G) = 0` identically.
pub fn check_multiplier(q: &DiffExpr, pde: &NormalPDE) -> bool {
    euler(&(q * pde.g())).is_zero()
}

/// `G'*(Q)|_E = 0`.
pub fn check_adjoint_symmetry(q: &DiffExpr, pde: &NormalPDE) -> bool {
    pde.restrict(&frechet_adjoint(pde.g(), q)).is_zero()
}

/// Helmholtz conditions `R_Q* + Q' = 0` for an adjoint-symmetry `Q`, with
/// `G'*(Q) = R_Q(G)`.
///
/// The operator identity is checked coefficientwise on the solution space;
/// `R_Q` is only determined up to operators annihilating `G`, whose
/// coefficients vanish there.
pub fn helmholtz_check(q: &DiffExpr, pde: &NormalPDE) -> Result<bool> {
    if !check_adjoint_symmetry(q, pde) {
        return Err(Error::NotAdjointSymmetry);
    }
    let r_q = pde.extract_operator(&frechet_adjoint(pde.g(), q))?;
    let op = &r_q.adjoint() + &LinDiffOp::frechet_of(q);
    Ok(op.restricted(pde).is_zero())
}

/// A current with `D_t T + D_x X = Q G` exactly.
pub fn current_from_multiplier(q: &DiffExpr, pde: &NormalPDE) -> Result<ConservedCurrent> {
    if !check_multiplier(q, pde) {
        return Err(Error::NotAMultiplier);
    }
    invert_divergence(&(q * pde.g()))
}

/// Basis of all multipliers within the ansatz.
///
/// The ansatz excludes the leading derivative and its consequences, and
/// its order must stay below the order of the equation.
pub fn solve_multipliers(pde: &NormalPDE, ansatz: &Ansatz) -> Result<Vec<Multiplier>> {
    if ansatz.max_order >= pde.order() {
        return Err(Error::InvalidAnsatz(format!(
            "multiplier order {} must be below the equation order {}",
            ansatz.max_order,
            pde.order()
        )));
    }
    let basis = ansatz.monomials(|j| !pde.is_consequence(j));
    let g = pde.g();
    Ok(solve_linear_condition(&basis, |m| euler(&(m * g)))
        .into_iter()
        .map(Multiplier)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_expr;
    use crate::expr::Axis;
    use crate::soln::make_pde;

    fn p(s: &str) -> DiffExpr {
        parse_expr(s).unwrap()
    }

    fn kdv() -> NormalPDE {
        make_pde(JetIndex::new(1, 0), p("-u*u_x - u_xxx")).unwrap()
    }

    fn heat() -> NormalPDE {
        make_pde(JetIndex::new(1, 0), p("u_xx")).unwrap()
    }

    fn cur(t: &str, x: &str) -> ConservedCurrent {
        ConservedCurrent::new(p(t), p(x))
    }

    const MASS: (&str, &str) = ("u", "1/2*u^2 + u_xx");
    const MOMENTUM: (&str, &str) = ("1/2*u^2", "1/3*u^3 + u*u_xx - 1/2*u_x^2");

    #[test]
    fn verify_examples() {
        let pde = kdv();
        assert!(verify_conservation_law(&cur(MASS.0, MASS.1), &pde));
        assert!(verify_conservation_law(&cur(MOMENTUM.0, MOMENTUM.1), &pde));
        assert!(!verify_conservation_law(&cur("u", "0"), &pde));
    }

    #[test]
    fn multiplier_from_current_examples() {
        let pde = kdv();
        let q = multiplier_from_current(&cur(MASS.0, MASS.1), &pde).unwrap();
        assert_eq!(q.expr(), &DiffExpr::one());
        let q = multiplier_from_current(&cur("u_x", "-u_t"), &pde).unwrap();
        assert!(pde.restrict(q.expr()).is_zero());
        let q = multiplier_from_current(&cur(MOMENTUM.0, MOMENTUM.1), &pde).unwrap();
        assert_eq!(pde.restrict(q.expr()), p("u"));
        assert!(check_multiplier(q.expr(), &pde));
        assert_eq!(
            multiplier_from_current(&cur("u", "0"), &pde),
            Err(Error::NotConserved)
        );
    }

    #[test]
    fn triviality_examples() {
        let pde = kdv();
        assert!(is_trivial_current(&cur("u_x", "-u_t"), &pde).unwrap());
        assert!(!is_trivial_current(&cur(MASS.0, MASS.1), &pde).unwrap());
        assert!(is_trivial_current(&ConservedCurrent::default(), &pde).unwrap());
    }

    #[test]
    fn check_multiplier_examples() {
        let pde = kdv();
        assert!(check_multiplier(&p("u"), &pde));
        assert!(!check_multiplier(&p("u_x"), &pde));
        assert!(check_multiplier(&p("1/2*u^2 + u_xx"), &pde));
    }

    #[test]
    fn adjoint_symmetry_examples() {
        assert!(check_adjoint_symmetry(&p("u"), &kdv()));
        assert!(check_adjoint_symmetry(&p("x^2 - 2*t"), &heat()));
        assert!(!check_adjoint_symmetry(&p("u"), &heat()));
        assert_eq!(pde_restrict_adjoint(&heat(), "u"), p("-2*u_xx"));
    }

    fn pde_restrict_adjoint(pde: &NormalPDE, q: &str) -> DiffExpr {
        pde.restrict(&frechet_adjoint(pde.g(), &p(q)))
    }

    #[test]
    fn helmholtz_examples() {
        assert_eq!(helmholtz_check(&p("u"), &kdv()), Ok(true));
        assert_eq!(helmholtz_check(&p("1"), &kdv()), Ok(true));
        assert_eq!(
            helmholtz_check(&p("u_x"), &kdv()),
            Err(Error::NotAdjointSymmetry)
        );
    }

    #[test]
    fn helmholtz_rejects_non_multiplier_adjoint_symmetry() {
        // u_t = 0: every t-free Q is an adjoint-symmetry, but u_x is no multiplier.
        let pde = make_pde(JetIndex::new(1, 0), DiffExpr::zero()).unwrap();
        assert!(check_adjoint_symmetry(&p("u_x"), &pde));
        assert!(!check_multiplier(&p("u_x"), &pde));
        assert_eq!(helmholtz_check(&p("u_x"), &pde), Ok(false));
        assert_eq!(helmholtz_check(&p("x*u^2"), &pde), Ok(true));
    }

    #[test]
    fn current_from_multiplier_examples() {
        let pde = kdv();
        let c = current_from_multiplier(&DiffExpr::one(), &pde).unwrap();
        assert!(currents_equivalent(&c, &cur(MASS.0, MASS.1), &pde).unwrap());
        let c = current_from_multiplier(&p("u"), &pde).unwrap();
        assert!(currents_equivalent(&c, &cur(MOMENTUM.0, MOMENTUM.1), &pde).unwrap());
        assert_eq!(divergence(&c), p("u") * pde.g());
        assert_eq!(
            current_from_multiplier(&p("u_x"), &pde),
            Err(Error::NotAMultiplier)
        );
    }

    #[test]
    fn ansatz_enumeration() {
        let a = Ansatz::new(1, 2, 0, 0);
        // 1; u, u_x, u_t; and the 6 quadratic products
        assert_eq!(a.monomials(|_| true).len(), 10);
        let a = Ansatz::new(2, 2, 1, 1);
        let pde = kdv();
        assert_eq!(a.monomials(|j| !pde.is_consequence(j)).len(), 40);
    }

    #[test]
    fn heat_multipliers_are_backward_heat_solutions() {
        let pde = heat();
        let basis = solve_multipliers(&pde, &Ansatz::new(0, 1, 3, 3)).unwrap();
        assert_eq!(basis.len(), 4);
        for q in &basis {
            let q = q.expr();
            let lhs = crate::diffops::total_derivative(q, Axis::T)
                + crate::diffops::total_derivative_n(q, JetIndex::new(0, 2));
            assert!(lhs.is_zero());
        }
    }

    #[test]
    fn burgers_has_only_mass() {
        let pde = make_pde(JetIndex::new(1, 0), p("u_xx - u*u_x")).unwrap();
        let basis = solve_multipliers(&pde, &Ansatz::new(1, 2, 2, 2)).unwrap();
        assert_eq!(basis, vec![Multiplier(DiffExpr::one())]);
    }

    #[test]
    fn multiplier_order_must_be_low() {
        assert!(matches!(
            solve_multipliers(&heat(), &Ansatz::new(2, 1, 0, 0)),
            Err(Error::InvalidAnsatz(_))
        ));
    }
}
