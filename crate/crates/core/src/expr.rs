//! Canonical differential polynomials over ℚ on the jet space of `u(t, x)`.
//!
//! A [`DiffExpr`] is a finite sum of rational multiples of [`Monomial`]s,
//! where a monomial is a product of powers of `t`, `x` and jet variables
//! `u_{(i,j)} = ∂_t^i ∂_x^j u`. Zero coefficients are never stored, so two
//! expressions are equal exactly when their term maps are equal.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational coefficient, always stored in lowest terms.
pub type Rational = BigRational;

/// `n / d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Multi-index of a jet variable: `nt` derivatives in `t`, `nx` in `x`.
///
/// The derived ordering compares `nt` first and then `nx`. Every ordered
/// structure in the crate uses it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct JetIndex {
    pub nt: u32,
    pub nx: u32,
}

impl JetIndex {
    /// The dependent variable `u` itself.
    pub const U: JetIndex = JetIndex { nt: 0, nx: 0 };

    pub const fn new(nt: u32, nx: u32) -> Self {
        JetIndex { nt, nx }
    }

    pub fn order(self) -> u32 {
        self.nt + self.nx
    }

    pub fn shifted(self, axis: Axis) -> Self {
        match axis {
            Axis::T => JetIndex::new(self.nt + 1, self.nx),
            Axis::X => JetIndex::new(self.nt, self.nx + 1),
        }
    }

    /// Componentwise `self >= other`, i.e. `u_self` is a derivative of `u_other`.
    pub fn dominates(self, other: JetIndex) -> bool {
        self.nt >= other.nt && self.nx >= other.nx
    }

    pub fn checked_sub(self, other: JetIndex) -> Option<JetIndex> {
        Some(JetIndex::new(
            self.nt.checked_sub(other.nt)?,
            self.nx.checked_sub(other.nx)?,
        ))
    }
}

impl Add for JetIndex {
    type Output = JetIndex;
    fn add(self, rhs: JetIndex) -> JetIndex {
        JetIndex::new(self.nt + rhs.nt, self.nx + rhs.nx)
    }
}

/// Independent-variable direction of a total derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    T,
    X,
}

/// A coordinate of the jet space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    X,
    Jet(JetIndex),
}

/// Power product `t^a x^b Π u_J^{e_J}`.
///
/// Jet factors are kept sorted by [`JetIndex`] with strictly positive
/// exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    t_deg: u32,
    x_deg: u32,
    jets: Vec<(JetIndex, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn new(t_deg: u32, x_deg: u32, jets: impl IntoIterator<Item = (JetIndex, u32)>) -> Self {
        let mut merged: BTreeMap<JetIndex, u32> = BTreeMap::new();
        for (j, e) in jets {
            *merged.entry(j).or_default() += e;
        }
        Monomial {
            t_deg,
            x_deg,
            jets: merged.into_iter().filter(|&(_, e)| e > 0).collect(),
        }
    }

    pub fn jet(j: JetIndex) -> Self {
        Monomial::new(0, 0, [(j, 1)])
    }

    pub fn t_deg(&self) -> u32 {
        self.t_deg
    }

    pub fn x_deg(&self) -> u32 {
        self.x_deg
    }

    pub fn jets(&self) -> &[(JetIndex, u32)] {
        &self.jets
    }

    /// Total degree in the jet variables; `t` and `x` do not count.
    pub fn jet_degree(&self) -> u32 {
        self.jets.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.t_deg == 0 && self.x_deg == 0 && self.jets.is_empty()
    }

    pub fn degree_in(&self, var: Var) -> u32 {
        match var {
            Var::T => self.t_deg,
            Var::X => self.x_deg,
            Var::Jet(j) => self.exponent(j),
        }
    }

    pub fn exponent(&self, j: JetIndex) -> u32 {
        self.jets
            .binary_search_by(|(k, _)| k.cmp(&j))
            .map(|i| self.jets[i].1)
            .unwrap_or(0)
    }

    /// Copy of `self` with the degree in `var` replaced by `deg`.
    pub fn with_degree(&self, var: Var, deg: u32) -> Monomial {
        let mut m = self.clone();
        match var {
            Var::T => m.t_deg = deg,
            Var::X => m.x_deg = deg,
            Var::Jet(j) => match m.jets.binary_search_by(|(k, _)| k.cmp(&j)) {
                Ok(i) if deg == 0 => {
                    m.jets.remove(i);
                }
                Ok(i) => m.jets[i].1 = deg,
                Err(i) if deg > 0 => m.jets.insert(i, (j, deg)),
                Err(_) => {}
            },
        }
        m
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut jets = Vec::with_capacity(self.jets.len() + other.jets.len());
        let (mut a, mut b) = (self.jets.iter().peekable(), other.jets.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(ja, ea)), Some(&&(jb, eb))) => match ja.cmp(&jb) {
                    Ordering::Less => {
                        jets.push((ja, ea));
                        a.next();
                    }
                    Ordering::Greater => {
                        jets.push((jb, eb));
                        b.next();
                    }
                    Ordering::Equal => {
                        jets.push((ja, ea + eb));
                        a.next();
                        b.next();
                    }
                },
                (Some(&&p), None) => {
                    jets.push(p);
                    a.next();
                }
                (None, Some(&&p)) => {
                    jets.push(p);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Monomial {
            t_deg: self.t_deg + other.t_deg,
            x_deg: self.x_deg + other.x_deg,
            jets,
        }
    }
}

// Jet degree first, then the jet factors, then t and x degrees. Printing and
// ansatz enumeration both follow this order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.jet_degree()
            .cmp(&other.jet_degree())
            .then_with(|| self.jets.cmp(&other.jets))
            .then_with(|| self.t_deg.cmp(&other.t_deg))
            .then_with(|| self.x_deg.cmp(&other.x_deg))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Differential polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DiffExpr {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffExpr {
    pub fn zero() -> Self {
        DiffExpr::default()
    }

    pub fn one() -> Self {
        DiffExpr::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffExpr::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut e = DiffExpr::zero();
        e.add_term(m, c);
        e
    }

    pub fn t() -> Self {
        DiffExpr::var(Var::T)
    }

    pub fn x() -> Self {
        DiffExpr::var(Var::X)
    }

    pub fn u() -> Self {
        DiffExpr::jet(JetIndex::U)
    }

    pub fn jet(j: JetIndex) -> Self {
        DiffExpr::var(Var::Jet(j))
    }

    pub fn var(v: Var) -> Self {
        DiffExpr::term(Monomial::one().with_degree(v, 1), Rational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut e = DiffExpr::zero();
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    /// Accumulates `c * m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Smallest term under the monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    /// The value of a constant expression (`Some(0)` for zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> DiffExpr {
        if c.is_zero() {
            return DiffExpr::zero();
        }
        DiffExpr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> DiffExpr {
        if c.is_zero() {
            return DiffExpr::zero();
        }
        DiffExpr {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> DiffExpr {
        let mut base = self.clone();
        let mut acc = DiffExpr::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Ordinary partial derivative, every jet variable an independent coordinate.
    pub fn partial(&self, v: Var) -> DiffExpr {
        let mut out = DiffExpr::zero();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            if e > 0 {
                out.add_term(m.with_degree(v, e - 1), c * int(e as i64));
            }
        }
        out
    }

    /// Homogeneous parts by jet degree; `t` and `x` are treated as constants.
    pub fn jet_degree_split(&self) -> BTreeMap<u32, DiffExpr> {
        let mut parts: BTreeMap<u32, DiffExpr> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(m.jet_degree())
                .or_default()
                .terms
                .insert(m.clone(), c.clone());
        }
        parts
    }

    /// Largest `nt + nx` among occurring jet variables, `-1` when there are none.
    pub fn max_order(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|m| m.jets.iter().map(|(j, _)| j.order() as i32))
            .max()
            .unwrap_or(-1)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.degree_in(v) > 0)
    }

    /// All jet variables occurring in the expression.
    pub fn jets(&self) -> BTreeSet<JetIndex> {
        self.terms
            .keys()
            .flat_map(|m| m.jets.iter().map(|&(j, _)| j))
            .collect()
    }

    /// Coefficients of the powers of `v`: `self = Σ_n coeffs[n] · v^n`.
    pub fn collect_powers(&self, v: Var) -> BTreeMap<u32, DiffExpr> {
        let mut out: BTreeMap<u32, DiffExpr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            out.entry(e)
                .or_default()
                .terms
                .insert(m.with_degree(v, 0), c.clone());
        }
        out
    }

    /// Replaces every occurrence of `v` by `replacement`.
    pub fn substitute(&self, v: Var, replacement: &DiffExpr) -> DiffExpr {
        let powers = self.collect_powers(v);
        let mut out = DiffExpr::zero();
        let mut power = DiffExpr::one();
        let mut at = 0;
        for (n, coeff) in powers {
            while at < n {
                power = &power * replacement;
                at += 1;
            }
            out += &coeff * &power;
        }
        out
    }
}

impl From<Rational> for DiffExpr {
    fn from(c: Rational) -> Self {
        DiffExpr::constant(c)
    }
}

impl From<i64> for DiffExpr {
    fn from(n: i64) -> Self {
        DiffExpr::constant(int(n))
    }
}

impl From<JetIndex> for DiffExpr {
    fn from(j: JetIndex) -> Self {
        DiffExpr::jet(j)
    }
}

impl AddAssign<&DiffExpr> for DiffExpr {
    fn add_assign(&mut self, rhs: &DiffExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<DiffExpr> for DiffExpr {
    fn add_assign(&mut self, rhs: DiffExpr) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&DiffExpr> for DiffExpr {
    fn sub_assign(&mut self, rhs: &DiffExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl SubAssign<DiffExpr> for DiffExpr {
    fn sub_assign(&mut self, rhs: DiffExpr) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl Add<&DiffExpr> for &DiffExpr {
    type Output = DiffExpr;
    fn add(self, rhs: &DiffExpr) -> DiffExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&DiffExpr> for &DiffExpr {
    type Output = DiffExpr;
    fn sub(self, rhs: &DiffExpr) -> DiffExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&DiffExpr> for &DiffExpr {
    type Output = DiffExpr;
    fn mul(self, rhs: &DiffExpr) -> DiffExpr {
        let mut out = DiffExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &DiffExpr {
    type Output = DiffExpr;
    fn neg(self) -> DiffExpr {
        DiffExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for DiffExpr {
    type Output = DiffExpr;
    fn neg(mut self) -> DiffExpr {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<DiffExpr> for DiffExpr {
            type Output = DiffExpr;
            fn $f(self, rhs: DiffExpr) -> DiffExpr {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&DiffExpr> for DiffExpr {
            type Output = DiffExpr;
            fn $f(self, rhs: &DiffExpr) -> DiffExpr {
                (&self).$f(rhs)
            }
        }
        impl $tr<DiffExpr> for &DiffExpr {
            type Output = DiffExpr;
            fn $f(self, rhs: DiffExpr) -> DiffExpr {
                self.$f(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::iter::Sum for DiffExpr {
    fn sum<I: Iterator<Item = DiffExpr>>(iter: I) -> Self {
        let mut acc = DiffExpr::zero();
        for e in iter {
            acc += e;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> DiffExpr {
        DiffExpr::u()
    }
    fn ux() -> DiffExpr {
        DiffExpr::jet(JetIndex::new(0, 1))
    }
    fn ut() -> DiffExpr {
        DiffExpr::jet(JetIndex::new(1, 0))
    }

    #[test]
    fn ring_examples() {
        assert!((u() + -u()).is_zero());
        let sq = &ux() * &ux();
        assert_eq!(sq.num_terms(), 1);
        let (m, c) = sq.leading_term().unwrap();
        assert_eq!(m.exponent(JetIndex::new(0, 1)), 2);
        assert_eq!(*c, int(1));
        let t = DiffExpr::t();
        assert_eq!((&u() + &t) * (&u() - &t), u().pow(2) - t.pow(2));
    }

    #[test]
    fn partial_examples() {
        assert_eq!(
            ux().pow(2).partial(Var::Jet(JetIndex::new(0, 1))),
            ux().scale(&int(2))
        );
        assert_eq!((DiffExpr::t() * u()).partial(Var::T), u());
        assert_eq!((ut() * ux()).partial(Var::Jet(JetIndex::new(1, 0))), ux());
    }

    #[test]
    fn degree_split_examples() {
        let f = u().pow(2) + ux() + DiffExpr::t();
        let parts = f.jet_degree_split();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[&0], DiffExpr::t());
        assert_eq!(parts[&1], ux());
        assert_eq!(parts[&2], u().pow(2));
        assert!(DiffExpr::zero().jet_degree_split().is_empty());
        let uxx = DiffExpr::jet(JetIndex::new(0, 2));
        let g = u() * uxx + ux().pow(2);
        let parts = g.jet_degree_split();
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(parts[&2], g);
    }

    #[test]
    fn order_and_dependence() {
        assert_eq!((u() * DiffExpr::jet(JetIndex::new(0, 3))).max_order(), 3);
        assert_eq!((DiffExpr::t().pow(2) + DiffExpr::x()).max_order(), -1);
        assert!(!(ut() + DiffExpr::x()).depends_on(Var::T));
        assert!((ut() + DiffExpr::x()).depends_on(Var::X));
    }

    #[test]
    fn substitute_and_collect() {
        let f = u().pow(2) * ux() + u() + DiffExpr::from(int(3));
        let back: DiffExpr = f
            .collect_powers(Var::Jet(JetIndex::U))
            .into_iter()
            .map(|(n, c)| c * u().pow(n))
            .sum();
        assert_eq!(back, f);
        assert_eq!(
            f.substitute(Var::Jet(JetIndex::U), &DiffExpr::one()),
            ux() + DiffExpr::from(4)
        );
    }

    #[test]
    fn constants() {
        assert_eq!(DiffExpr::zero().as_constant(), Some(int(0)));
        assert_eq!(
            DiffExpr::from(rat(1, 2) * int(4)).as_constant(),
            Some(int(2))
        );
        assert_eq!(u().as_constant(), None);
    }
}
