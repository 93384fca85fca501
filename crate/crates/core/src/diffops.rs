//! Total derivatives, Fréchet derivatives and their adjoints, the Euler
//! operator, the boundary current of the Fréchet identity, and inversion of
//! total divergences.

use std::collections::HashMap;

use num_traits::One;

use crate::conslaw::ConservedCurrent;
use crate::error::{Error, Result};
use crate::expr::{int, Axis, DiffExpr, JetIndex, Monomial, Rational, Var};

/// `D_t f` or `D_x f`.
pub fn total_derivative(f: &DiffExpr, axis: Axis) -> DiffExpr {
    let coord = match axis {
        Axis::T => Var::T,
        Axis::X => Var::X,
    };
    let mut out = DiffExpr::zero();
    for (m, c) in f.terms() {
        let e = m.degree_in(coord);
        if e > 0 {
            out.add_term(m.with_degree(coord, e - 1), c * int(e as i64));
        }
        for &(j, e) in m.jets() {
            let raised = m
                .with_degree(Var::Jet(j), e - 1)
                .mul(&Monomial::jet(j.shifted(axis)));
            out.add_term(raised, c * int(e as i64));
        }
    }
    out
}

/// `D_t^k.nt D_x^k.nx f`.
pub fn total_derivative_n(f: &DiffExpr, k: JetIndex) -> DiffExpr {
    let mut out = f.clone();
    for _ in 0..k.nt {
        out = total_derivative(&out, Axis::T);
    }
    for _ in 0..k.nx {
        out = total_derivative(&out, Axis::X);
    }
    out
}

/// `D_t T + D_x X`.
pub fn divergence(cur: &ConservedCurrent) -> DiffExpr {
    total_derivative(&cur.density, Axis::T) + total_derivative(&cur.flux, Axis::X)
}

/// Memo of the mixed total derivatives `D^K g` of one expression.
pub(crate) struct DerivativeTable<'a> {
    base: &'a DiffExpr,
    cache: HashMap<JetIndex, DiffExpr>,
}

impl<'a> DerivativeTable<'a> {
    pub(crate) fn new(base: &'a DiffExpr) -> Self {
        DerivativeTable {
            base,
            cache: HashMap::new(),
        }
    }

    pub(crate) fn get(&mut self, k: JetIndex) -> DiffExpr {
        if k == JetIndex::U {
            return self.base.clone();
        }
        if let Some(e) = self.cache.get(&k) {
            return e.clone();
        }
        let e = if k.nx > 0 {
            total_derivative(&self.get(JetIndex::new(k.nt, k.nx - 1)), Axis::X)
        } else {
            total_derivative(&self.get(JetIndex::new(k.nt - 1, 0)), Axis::T)
        };
        self.cache.insert(k, e.clone());
        e
    }
}

fn sign(k: JetIndex) -> Rational {
    if k.order().is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `∂f/∂u_J` for every jet `J` that occurs in `f`.
fn jet_partials(f: &DiffExpr) -> Vec<(JetIndex, DiffExpr)> {
    f.jets()
        .into_iter()
        .map(|j| (j, f.partial(Var::Jet(j))))
        .collect()
}

/// `(-D)^K a`.
fn signed_derivative(a: &DiffExpr, k: JetIndex) -> DiffExpr {
    total_derivative_n(a, k).scale(&sign(k))
}

/// Fréchet derivative `f'(g) = Σ_J f_{u_J} D^J g`.
pub fn frechet(f: &DiffExpr, g: &DiffExpr) -> DiffExpr {
    let mut table = DerivativeTable::new(g);
    jet_partials(f)
        .into_iter()
        .map(|(j, fj)| fj * table.get(j))
        .sum()
}

/// Adjoint Fréchet derivative `f'*(h) = Σ_J (-D)^J (h f_{u_J})`.
pub fn frechet_adjoint(f: &DiffExpr, h: &DiffExpr) -> DiffExpr {
    jet_partials(f)
        .into_iter()
        .map(|(j, fj)| signed_derivative(&(h * &fj), j))
        .sum()
}

/// Euler–Lagrange operator `E_u(f) = Σ_J (-D)^J f_{u_J}`.
pub fn euler(f: &DiffExpr) -> DiffExpr {
    jet_partials(f)
        .into_iter()
        .map(|(j, fj)| signed_derivative(&fj, j))
        .sum()
}

/// Whether `f = D_t A + D_x B` for some differential polynomials `A`, `B`.
pub fn is_divergence(f: &DiffExpr) -> bool {
    euler(f).is_zero()
}

/// Current `Ψ_f(g, h)` with `h f'(g) - g f'*(h) = D_t Ψ^t + D_x Ψ^x`.
///
/// Each term `a · D_t^i D_x^j g` of `h f'(g)` is integrated by parts, all
/// `t`-derivatives first (feeding `Ψ^t`) and then the `x`-derivatives
/// (feeding `Ψ^x`).
pub fn boundary_current(f: &DiffExpr, g: &DiffExpr, h: &DiffExpr) -> ConservedCurrent {
    let mut table = DerivativeTable::new(g);
    let mut psi_t = DiffExpr::zero();
    let mut psi_x = DiffExpr::zero();
    for (j, fj) in jet_partials(f) {
        let mut a = h * &fj;
        for k in 0..j.nt {
            psi_t += &a * table.get(JetIndex::new(j.nt - 1 - k, j.nx));
            a = -total_derivative(&a, Axis::T);
        }
        for k in 0..j.nx {
            psi_x += &a * table.get(JetIndex::new(0, j.nx - 1 - k));
            a = -total_derivative(&a, Axis::X);
        }
    }
    let cur = ConservedCurrent::new(psi_t, psi_x);
    debug_assert!({
        let lhs = h * frechet(f, g) - g * frechet_adjoint(f, h);
        (divergence(&cur) - lhs).is_zero()
    });
    cur
}

/// `∫ f dx` for a jet-free polynomial `f(t, x)`.
fn integrate_x(f: &DiffExpr) -> DiffExpr {
    DiffExpr::from_terms(f.terms().map(|(m, c)| {
        let n = m.x_deg() + 1;
        (m.with_degree(Var::X, n), c / int(n as i64))
    }))
}

/// Finds `(A, B)` with `f = D_t A + D_x B` exactly.
///
/// Homotopy along `λu` from `u = 0`: for the jet-degree-`d` part `f_d`,
/// `f_d'(u) = d·f_d` and `f_d'(u) = D·Ψ_{f_d}(u, 1)` because `E_u(f_d) = 0`,
/// so `Ψ_{f_d}(u, 1) / d` is a preimage. The jet-free remainder goes to the
/// flux by `x`-integration.
pub fn invert_divergence(f: &DiffExpr) -> Result<ConservedCurrent> {
    if !is_divergence(f) {
        return Err(Error::NotADivergence);
    }
    let one = DiffExpr::one();
    let u = DiffExpr::u();
    let mut density = DiffExpr::zero();
    let mut flux = DiffExpr::zero();
    for (d, part) in f.jet_degree_split() {
        if d == 0 {
            flux += integrate_x(&part);
            continue;
        }
        let w = boundary_current(&part, &u, &one);
        let weight = Rational::new(1.into(), d.into());
        density += w.density.scale(&weight);
        flux += w.flux.scale(&weight);
    }
    Ok(ConservedCurrent::new(density, flux))
}
