//! Normal PDEs in monic solved form `u_L = g`, restriction to the solution
//! space, and the linear differential operators `R_f` with `f = R_f(G)`.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::One;

use crate::diffops::{total_derivative_n, DerivativeTable};
use crate::error::{Error, Result};
use crate::expr::{DiffExpr, JetIndex, Rational, Var};

/// A scalar PDE `G = u_L - g = 0` solved for its leading derivative `u_L`.
///
/// `g` contains neither `u_L` nor any of its derivatives, and every jet in
/// `g` ranks below `u_L` in the `(nt, nx)` lexicographic order. The second
/// condition makes [`NormalPDE::restrict`] terminate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalPDE {
    lead: JetIndex,
    rhs: DiffExpr,
    g: DiffExpr,
}

/// Validates `u_lead = rhs` and builds `G = u_lead - rhs`.
pub fn make_pde(lead: JetIndex, rhs: DiffExpr) -> Result<NormalPDE> {
    NormalPDE::new(lead, rhs)
}

impl NormalPDE {
    pub fn new(lead: JetIndex, rhs: DiffExpr) -> Result<Self> {
        if lead.order() == 0 {
            return Err(Error::NotNormal(
                "leading derivative must have order at least 1".into(),
            ));
        }
        if let Some(j) = rhs.jets().into_iter().find(|j| j.dominates(lead)) {
            return Err(Error::NotNormal(format!(
                "right-hand side contains {} (a consequence of {})",
                crate::cli::jet_name(j),
                crate::cli::jet_name(lead)
            )));
        }
        if lead.nt == 0 {
            return Err(Error::UnsupportedLeading(
                "leading derivative must involve at least one t-derivative".into(),
            ));
        }
        if let Some(j) = rhs.jets().into_iter().find(|&j| j > lead) {
            return Err(Error::UnsupportedLeading(format!(
                "{} ranks above the leading derivative {}",
                crate::cli::jet_name(j),
                crate::cli::jet_name(lead)
            )));
        }
        let g = DiffExpr::jet(lead) - &rhs;
        Ok(NormalPDE { lead, rhs, g })
    }

    pub fn lead(&self) -> JetIndex {
        self.lead
    }

    pub fn rhs(&self) -> &DiffExpr {
        &self.rhs
    }

    /// `G = u_L - g`.
    pub fn g(&self) -> &DiffExpr {
        &self.g
    }

    /// Differential order `N` of the equation.
    pub fn order(&self) -> u32 {
        (self.g.max_order().max(0)) as u32
    }

    /// Whether `u_j` is the leading derivative or one of its derivatives.
    pub fn is_consequence(&self, j: JetIndex) -> bool {
        j.dominates(self.lead)
    }

    fn top_consequence(&self, f: &DiffExpr) -> Option<JetIndex> {
        f.jets().into_iter().rev().find(|&j| self.is_consequence(j))
    }

    /// `f|_E`: eliminates every `u_{L+K}` through `D^K g`, highest jet first.
    ///
    /// The result is free of the leading derivative and its consequences, so
    /// it is zero exactly when `f` vanishes on solutions.
    pub fn restrict(&self, f: &DiffExpr) -> DiffExpr {
        let mut table = DerivativeTable::new(&self.rhs);
        let mut cur = f.clone();
        while let Some(v) = self.top_consequence(&cur) {
            let k = v.checked_sub(self.lead).expect("consequence jet");
            cur = cur.substitute(Var::Jet(v), &table.get(k));
        }
        cur
    }

    /// `R_f` with `R_f(G) = f` identically, for `f` vanishing on solutions.
    ///
    /// Division by `D^K G = u_{L+K} - D^K g`, highest consequence jet first:
    /// `c·v^n = c·(v^{n-1} + … + h^{n-1})·(v - h) + c·h^n` with `h = D^K g`.
    pub fn extract_operator(&self, f: &DiffExpr) -> Result<LinDiffOp> {
        let mut table = DerivativeTable::new(&self.rhs);
        let mut op = LinDiffOp::zero();
        let mut cur = f.clone();
        while let Some(v) = self.top_consequence(&cur) {
            let k = v.checked_sub(self.lead).expect("consequence jet");
            let h = table.get(k);
            let var = DiffExpr::jet(v);
            let mut quotient = DiffExpr::zero();
            let mut remainder = DiffExpr::zero();
            for (n, c) in cur.collect_powers(Var::Jet(v)) {
                if n == 0 {
                    remainder += c;
                    continue;
                }
                // v^n - h^n = (v - h) Σ_{i<n} v^{n-1-i} h^i
                let mut geometric = DiffExpr::zero();
                let mut h_pow = DiffExpr::one();
                for i in 0..n {
                    geometric += var.pow(n - 1 - i) * &h_pow;
                    h_pow = &h_pow * &h;
                }
                quotient += &c * geometric;
                remainder += c * h_pow;
            }
            op.add_coeff(k, quotient);
            cur = remainder;
        }
        if !cur.is_zero() {
            return Err(Error::NotOnSolutionSpace);
        }
        Ok(op)
    }
}

pub fn restrict(f: &DiffExpr, pde: &NormalPDE) -> DiffExpr {
    pde.restrict(f)
}

pub fn extract_operator(f: &DiffExpr, pde: &NormalPDE) -> Result<LinDiffOp> {
    pde.extract_operator(f)
}

pub fn apply_operator(r: &LinDiffOp, f: &DiffExpr) -> DiffExpr {
    r.apply(f)
}

pub fn adjoint_operator(r: &LinDiffOp, f: &DiffExpr) -> DiffExpr {
    r.apply_adjoint(f)
}

/// Linear differential operator `Σ_K c_K D_t^{K.nt} D_x^{K.nx}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinDiffOp {
    coeffs: BTreeMap<JetIndex, DiffExpr>,
}

impl LinDiffOp {
    pub fn zero() -> Self {
        LinDiffOp::default()
    }

    pub fn new(coeffs: impl IntoIterator<Item = (JetIndex, DiffExpr)>) -> Self {
        let mut op = LinDiffOp::zero();
        for (k, c) in coeffs {
            op.add_coeff(k, c);
        }
        op
    }

    /// Multiplication by `c`.
    pub fn multiplication(c: DiffExpr) -> Self {
        LinDiffOp::new([(JetIndex::U, c)])
    }

    /// The Fréchet derivative `f'` as an operator.
    pub fn frechet_of(f: &DiffExpr) -> Self {
        LinDiffOp::new(f.jets().into_iter().map(|j| (j, f.partial(Var::Jet(j)))))
    }

    pub fn add_coeff(&mut self, k: JetIndex, c: DiffExpr) {
        let slot = self.coeffs.entry(k).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeff(&self, k: JetIndex) -> DiffExpr {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&JetIndex, &DiffExpr)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn apply(&self, f: &DiffExpr) -> DiffExpr {
        let mut table = DerivativeTable::new(f);
        self.coeffs.iter().map(|(&k, c)| c * table.get(k)).sum()
    }

    /// `R*(f) = Σ_K (-D)^K (c_K f)`.
    pub fn apply_adjoint(&self, f: &DiffExpr) -> DiffExpr {
        self.coeffs
            .iter()
            .map(|(&k, c)| {
                let d = total_derivative_n(&(c * f), k);
                if k.order() % 2 == 0 {
                    d
                } else {
                    -d
                }
            })
            .sum()
    }

    /// The formal adjoint as an operator, expanded by the Leibniz rule.
    pub fn adjoint(&self) -> LinDiffOp {
        let mut out = LinDiffOp::zero();
        for (&k, c) in &self.coeffs {
            let sign: i64 = if k.order() % 2 == 0 { 1 } else { -1 };
            let mut table = DerivativeTable::new(c);
            for lt in 0..=k.nt {
                for lx in 0..=k.nx {
                    let weight = binomial(BigInt::from(k.nt), BigInt::from(lt))
                        * binomial(BigInt::from(k.nx), BigInt::from(lx))
                        * BigInt::from(sign);
                    let dc = table.get(JetIndex::new(k.nt - lt, k.nx - lx));
                    out.add_coeff(
                        JetIndex::new(lt, lx),
                        dc.scale(&Rational::from_integer(weight)),
                    );
                }
            }
        }
        out
    }

    /// Coefficientwise restriction to the solution space.
    pub fn restricted(&self, pde: &NormalPDE) -> LinDiffOp {
        LinDiffOp::new(self.coeffs.iter().map(|(&k, c)| (k, pde.restrict(c))))
    }

    pub fn scale(&self, c: &Rational) -> LinDiffOp {
        LinDiffOp::new(self.coeffs.iter().map(|(&k, e)| (k, e.scale(c))))
    }
}

impl Add<&LinDiffOp> for &LinDiffOp {
    type Output = LinDiffOp;
    fn add(self, rhs: &LinDiffOp) -> LinDiffOp {
        let mut out = self.clone();
        for (&k, c) in &rhs.coeffs {
            out.add_coeff(k, c.clone());
        }
        out
    }
}

impl Neg for &LinDiffOp {
    type Output = LinDiffOp;
    fn neg(self) -> LinDiffOp {
        self.scale(&-Rational::one())
    }
}

impl Sub<&LinDiffOp> for &LinDiffOp {
    type Output = LinDiffOp;
    fn sub(self, rhs: &LinDiffOp) -> LinDiffOp {
        self + &(-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_expr;
    use crate::diffops::euler;
    use crate::expr::int;

    fn p(s: &str) -> DiffExpr {
        parse_expr(s).unwrap()
    }

    fn kdv() -> NormalPDE {
        make_pde(JetIndex::new(1, 0), p("-u*u_x - u_xxx")).unwrap()
    }

    #[test]
    fn make_pde_examples() {
        assert_eq!(kdv().g(), &p("u_t + u*u_x + u_xxx"));
        assert_eq!(kdv().order(), 3);
        assert!(matches!(
            make_pde(JetIndex::new(1, 0), p("u_t")),
            Err(Error::NotNormal(_))
        ));
        assert!(matches!(
            make_pde(JetIndex::new(1, 0), p("u_tx")),
            Err(Error::NotNormal(_))
        ));
        let wave = make_pde(JetIndex::new(2, 0), p("u_xx - u^3")).unwrap();
        assert_eq!(wave.g(), &p("u_tt - u_xx + u^3"));
    }

    #[test]
    fn make_pde_rejections() {
        assert!(matches!(
            make_pde(JetIndex::U, p("u_x")),
            Err(Error::NotNormal(_))
        ));
        assert!(matches!(
            make_pde(JetIndex::new(0, 2), p("u_t")),
            Err(Error::UnsupportedLeading(_))
        ));
        // normal, but u_ttt outranks u_tx
        assert!(matches!(
            make_pde(JetIndex::new(1, 1), p("u_ttt + u_xxx")),
            Err(Error::UnsupportedLeading(_))
        ));
        // peakon-type leading derivative is accepted
        let ch = make_pde(
            JetIndex::new(1, 2),
            p("u_t + 3*u*u_x - 2*u_x*u_xx - u*u_xxx"),
        );
        assert!(ch.is_ok());
    }

    #[test]
    fn restrict_examples() {
        let pde = kdv();
        assert!(pde.restrict(pde.g()).is_zero());
        assert_eq!(pde.restrict(&p("u_tx")), p("-u_x^2 - u*u_xx - u_xxxx"));
        assert_eq!(pde.restrict(&p("u_xx")), p("u_xx"));
    }

    #[test]
    fn restrict_peakon_terminates() {
        let ch = make_pde(
            JetIndex::new(1, 2),
            p("u_t + 3*u*u_x - 2*u_x*u_xx - u*u_xxx"),
        )
        .unwrap();
        let r = ch.restrict(&p("u_ttxxx + u_txx^2"));
        assert!(r.jets().iter().all(|&j| !ch.is_consequence(j)));
    }

    #[test]
    fn extract_operator_examples() {
        let pde = kdv();
        let g = pde.g().clone();
        let r = pde.extract_operator(&(p("u") * &g)).unwrap();
        assert_eq!(r, LinDiffOp::multiplication(p("u")));
        let dxg = crate::diffops::total_derivative(&g, crate::expr::Axis::X);
        let r = pde.extract_operator(&dxg).unwrap();
        assert_eq!(r, LinDiffOp::new([(JetIndex::new(0, 1), DiffExpr::one())]));
        assert_eq!(
            pde.extract_operator(&p("u_x")),
            Err(Error::NotOnSolutionSpace)
        );
    }

    #[test]
    fn extract_operator_nonlinear_in_g() {
        let pde = kdv();
        let g = pde.g().clone();
        let dtg = crate::diffops::total_derivative(&g, crate::expr::Axis::T);
        let f = &g * &g * p("x") + &dtg * &g + dtg.scale(&int(2));
        let r = pde.extract_operator(&f).unwrap();
        assert_eq!(r.apply(&g), f);
    }

    #[test]
    fn apply_examples() {
        let pde = kdv();
        let g = pde.g().clone();
        let r = LinDiffOp::multiplication(p("u"));
        assert_eq!(apply_operator(&r, &g), p("u") * &g);
        let dx = LinDiffOp::new([(JetIndex::new(0, 1), DiffExpr::one())]);
        assert_eq!(apply_operator(&dx, &p("u")), p("u_x"));
        let scaling = LinDiffOp::new([
            (JetIndex::U, p("-5")),
            (JetIndex::new(1, 0), p("-3*t")),
            (JetIndex::new(0, 1), p("-x")),
        ]);
        let expected = g.scale(&int(-5))
            - p("3*t") * crate::diffops::total_derivative(&g, crate::expr::Axis::T)
            - p("x") * crate::diffops::total_derivative(&g, crate::expr::Axis::X);
        assert_eq!(apply_operator(&scaling, &g), expected);
        assert_eq!(adjoint_operator(&scaling, &DiffExpr::one()), p("-1"));
    }

    #[test]
    fn adjoint_examples() {
        let minus_dx = LinDiffOp::new([(JetIndex::new(0, 1), p("-1"))]);
        assert_eq!(adjoint_operator(&minus_dx, &p("u")), p("u_x"));
        let minus_one = LinDiffOp::multiplication(p("-1"));
        let big_p = p("1 - t*u_x");
        assert_eq!(adjoint_operator(&minus_one, &big_p), -big_p);
    }

    #[test]
    fn operator_adjoint_matches_application() {
        let r = LinDiffOp::new([
            (JetIndex::U, p("u*x")),
            (JetIndex::new(1, 1), p("t*u_x + 2")),
            (JetIndex::new(0, 2), p("u^2")),
        ]);
        let f = p("u_x*t + u^3 - x");
        assert_eq!(r.adjoint().apply(&f), r.apply_adjoint(&f));
        assert_eq!(r.adjoint().adjoint(), r);
        let h = p("u_t + x*u");
        let pairing = &h * r.apply(&f) - &f * r.apply_adjoint(&h);
        assert!(euler(&pairing).is_zero());
    }
}
