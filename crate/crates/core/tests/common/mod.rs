//! Independent reference implementations used to cross-check the library.
//!
//! Everything here is built only from the ring operations of `DiffExpr` and
//! the raw monomial accessors, never from `diffops`, `soln` or `ratlin`.

#![allow(dead_code)]

use conslaw::{DiffExpr, JetIndex, Monomial, NormalPDE, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

pub fn p(s: &str) -> DiffExpr {
    conslaw::parse_expr(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn pde(lead: &str, rhs: &str) -> NormalPDE {
    conslaw::make_pde(conslaw::cli::parse_jet_name(lead).unwrap(), p(rhs)).unwrap()
}

pub fn kdv() -> NormalPDE {
    pde("u_t", "-u*u_x - u_xxx")
}

pub fn heat() -> NormalPDE {
    pde("u_t", "u_xx")
}

pub fn burgers() -> NormalPDE {
    pde("u_t", "u_xx - u*u_x")
}

pub fn wave() -> NormalPDE {
    pde("u_tt", "u_xx - u^3")
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

// ---- brute-force calculus -------------------------------------------------

fn rebuild(m: &Monomial, dt: i32, dx: i32, jet: Option<(JetIndex, i32)>) -> Monomial {
    let jets = m.jets().iter().map(|&(j, e)| match jet {
        Some((k, d)) if k == j => (j, (e as i32 + d) as u32),
        _ => (j, e),
    });
    let mut jets: Vec<(JetIndex, u32)> = jets.filter(|&(_, e)| e > 0).collect();
    if let Some((k, d)) = jet {
        if d > 0 && m.exponent(k) == 0 {
            jets.push((k, d as u32));
        }
    }
    Monomial::new(
        (m.t_deg() as i32 + dt) as u32,
        (m.x_deg() as i32 + dx) as u32,
        jets,
    )
}

pub fn d_jet(f: &DiffExpr, j: JetIndex) -> DiffExpr {
    DiffExpr::from_terms(f.terms().filter_map(|(m, c)| {
        let e = m.exponent(j);
        (e > 0).then(|| (rebuild(m, 0, 0, Some((j, -1))), c * int(e as i64)))
    }))
}

fn d_t_explicit(f: &DiffExpr) -> DiffExpr {
    DiffExpr::from_terms(f.terms().filter_map(|(m, c)| {
        let e = m.t_deg();
        (e > 0).then(|| (rebuild(m, -1, 0, None), c * int(e as i64)))
    }))
}

fn d_x_explicit(f: &DiffExpr) -> DiffExpr {
    DiffExpr::from_terms(f.terms().filter_map(|(m, c)| {
        let e = m.x_deg();
        (e > 0).then(|| (rebuild(m, 0, -1, None), c * int(e as i64)))
    }))
}

pub fn jets_of(f: &DiffExpr) -> Vec<JetIndex> {
    let mut v: Vec<JetIndex> = f
        .terms()
        .flat_map(|(m, _)| m.jets().iter().map(|&(j, _)| j))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Chain rule, one jet at a time.
pub fn dt(f: &DiffExpr) -> DiffExpr {
    let mut out = d_t_explicit(f);
    for j in jets_of(f) {
        out += d_jet(f, j) * DiffExpr::jet(JetIndex::new(j.nt + 1, j.nx));
    }
    out
}

pub fn dx(f: &DiffExpr) -> DiffExpr {
    let mut out = d_x_explicit(f);
    for j in jets_of(f) {
        out += d_jet(f, j) * DiffExpr::jet(JetIndex::new(j.nt, j.nx + 1));
    }
    out
}

pub fn dk(f: &DiffExpr, k: JetIndex) -> DiffExpr {
    let mut out = f.clone();
    for _ in 0..k.nt {
        out = dt(&out);
    }
    for _ in 0..k.nx {
        out = dx(&out);
    }
    out
}

/// `(-D)^K`.
pub fn minus_dk(f: &DiffExpr, k: JetIndex) -> DiffExpr {
    let d = dk(f, k);
    if (k.nt + k.nx) % 2 == 1 {
        -d
    } else {
        d
    }
}

pub fn div(t: &DiffExpr, x: &DiffExpr) -> DiffExpr {
    dt(t) + dx(x)
}

pub fn euler(f: &DiffExpr) -> DiffExpr {
    jets_of(f)
        .into_iter()
        .map(|j| minus_dk(&d_jet(f, j), j))
        .fold(DiffExpr::zero(), |a, b| a + b)
}

pub fn frechet(f: &DiffExpr, g: &DiffExpr) -> DiffExpr {
    jets_of(f)
        .into_iter()
        .map(|j| d_jet(f, j) * dk(g, j))
        .fold(DiffExpr::zero(), |a, b| a + b)
}

pub fn frechet_adjoint(f: &DiffExpr, h: &DiffExpr) -> DiffExpr {
    jets_of(f)
        .into_iter()
        .map(|j| minus_dk(&(d_jet(f, j) * h.clone()), j))
        .fold(DiffExpr::zero(), |a, b| a + b)
}

// ---- evaluation -------------------------------------------------------------

/// Deterministic rational point: `t`, `x` and each jet get distinct values.
pub fn eval(f: &DiffExpr, seed: i64) -> Rational {
    let jet_value = |j: JetIndex| {
        Rational::new(
            BigInt::from(seed + 3 * j.nt as i64 - 2 * j.nx as i64 + 1),
            BigInt::from(1 + j.nt as i64 + 2 * j.nx as i64),
        )
    };
    let tv = Rational::new(BigInt::from(seed - 5), BigInt::from(3));
    let xv = Rational::new(BigInt::from(2 * seed + 7), BigInt::from(5));
    f.terms()
        .map(|(m, c)| {
            let mut v = c.clone();
            for _ in 0..m.t_deg() {
                v *= &tv;
            }
            for _ in 0..m.x_deg() {
                v *= &xv;
            }
            for &(j, e) in m.jets() {
                for _ in 0..e {
                    v *= jet_value(j);
                }
            }
            v
        })
        .fold(Rational::zero(), |a, b| a + b)
}

// ---- linear algebra ---------------------------------------------------------

/// Fraction-free Bareiss elimination on the integer matrix obtained by
/// clearing each row's denominators.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, q| {
                num_integer::lcm(acc, q.denom().clone())
            });
            r.iter()
                .map(|q| (q * Rational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        for i in r + 1..m.len() {
            for j in c + 1..ncols {
                m[i][j] = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].abs();
        if prev.is_zero() {
            prev = BigInt::one();
        }
        r += 1;
    }
    r
}

/// Coefficient vectors of `exprs` over the union of their monomials.
pub fn coefficient_rows(exprs: &[DiffExpr]) -> Vec<Vec<Rational>> {
    let mut monos: Vec<Monomial> = exprs
        .iter()
        .flat_map(|e| e.terms().map(|(m, _)| m.clone()))
        .collect();
    monos.sort();
    monos.dedup();
    exprs
        .iter()
        .map(|e| monos.iter().map(|m| e.coefficient(m)).collect())
        .collect()
}

/// Whether every element of `a` lies in the ℚ-span of `b`.
pub fn in_span(a: &[DiffExpr], b: &[DiffExpr]) -> bool {
    let rb = rank(&coefficient_rows(b));
    let all: Vec<DiffExpr> = b.iter().chain(a).cloned().collect();
    rank(&coefficient_rows(&all)) == rb
}

// ---- random differential polynomials ---------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_order: u32,
    pub max_jet_degree: u32,
    pub max_tx_degree: u32,
    pub max_terms: usize,
}

pub const SMALL: Shape = Shape {
    max_order: 3,
    max_jet_degree: 3,
    max_tx_degree: 2,
    max_terms: 4,
};

fn jet_for(order: u32, nt: u32) -> JetIndex {
    let nt = nt.min(order);
    JetIndex::new(nt, order - nt)
}

pub fn random_expr<R: Rng>(rng: &mut R, s: Shape) -> DiffExpr {
    let n = rng.gen_range(1..=s.max_terms);
    DiffExpr::from_terms((0..n).map(|_| {
        let deg = rng.gen_range(0..=s.max_jet_degree);
        let jets: Vec<(JetIndex, u32)> = (0..deg)
            .map(|_| {
                let ord = rng.gen_range(0..=s.max_order);
                (jet_for(ord, rng.gen_range(0..=ord)), 1)
            })
            .collect();
        let c: i64 = loop {
            let c = rng.gen_range(-9..=9);
            if c != 0 {
                break c;
            }
        };
        let m = Monomial::new(
            rng.gen_range(0..=s.max_tx_degree),
            rng.gen_range(0..=s.max_tx_degree),
            jets,
        );
        (m, int(c))
    }))
}

pub fn arb_expr(s: Shape) -> impl Strategy<Value = DiffExpr> {
    let jet = (0..=s.max_order).prop_flat_map(|o| (0..=o).prop_map(move |nt| jet_for(o, nt)));
    let term = (
        -9i64..=9,
        0..=s.max_tx_degree,
        0..=s.max_tx_degree,
        prop::collection::vec(jet, 0..=s.max_jet_degree as usize),
    )
        .prop_map(|(c, a, b, jets)| {
            (
                Monomial::new(a, b, jets.into_iter().map(|j| (j, 1))),
                int(c),
            )
        });
    prop::collection::vec(term, 0..=s.max_terms).prop_map(DiffExpr::from_terms)
}
