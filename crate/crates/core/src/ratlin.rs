//! Dense exact linear algebra over ℚ.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::expr::Rational;

pub type QVector = Vec<Rational>;

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<QVector>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        QMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_columns(cols: Vec<QVector>, rows: usize) -> Self {
        let mut m = QMatrix::zeros(rows, cols.len());
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        QMatrix {
            rows,
            cols,
            data: data
                .iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> QVector {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    /// `self - λI`.
    pub fn shifted(&self, lambda: &Rational) -> QMatrix {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            m[(i, i)] -= lambda;
        }
        m
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .sum()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row-echelon form and its pivot columns.
    ///
    /// Pivots are chosen as the nonzero entry of smallest magnitude in the
    /// column, which keeps intermediate coefficients small.
    pub fn rref_with_pivots(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows)
                .filter(|&i| !m[(i, c)].is_zero())
                .min_by(|&a, &b| m[(a, c)].abs().cmp(&m[(b, c)].abs()))
            else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                m[(r, j)] *= &inv;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    let delta = &factor * &m[(r, j)];
                    m[(i, j)] -= delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rref(&self) -> QMatrix {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Basis of `{v : M v = 0}`, itself brought to reduced echelon form.
    pub fn nullspace(&self) -> Vec<QVector> {
        let (r, pivots) = self.rref_with_pivots();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let raw: Vec<QVector> = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(i, f)].clone();
                }
                v
            })
            .collect();
        if raw.is_empty() {
            return raw;
        }
        let basis = QMatrix::from_rows(raw).rref();
        (0..basis.rows).map(|i| basis.row(i).to_vec()).collect()
    }

    /// A solution of `M x = b` (free variables set to zero), if consistent.
    pub fn solve(&self, b: &[Rational]) -> Option<QVector> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref_with_pivots();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    /// Coefficients (constant term first) of `det(λI - M)`, by Faddeev–LeVerrier.
    pub fn characteristic_polynomial(&self) -> Vec<Rational> {
        assert!(
            self.is_square(),
            "characteristic polynomial of a non-square matrix"
        );
        let n = self.rows;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut acc = QMatrix::zeros(n, n);
        for k in 1..=n {
            acc = self.mul(&acc);
            for i in 0..n {
                acc[(i, i)] += &coeffs[n - k + 1];
            }
            let tr = self.mul(&acc).trace();
            coeffs[n - k] = -tr / Rational::from_integer(BigInt::from(k));
        }
        coeffs
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn nullspace(m: &QMatrix) -> Vec<QVector> {
    m.nullspace()
}

pub fn rref(m: &QMatrix) -> QMatrix {
    m.rref()
}

pub fn rank(m: &QMatrix) -> usize {
    m.rank()
}

pub fn solve(m: &QMatrix, b: &[Rational]) -> Option<QVector> {
    m.solve(b)
}

/// Eigenvalue analysis restricted to ℚ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenAnalysis {
    /// Distinct rational eigenvalues in increasing order, each with an
    /// echelon basis of its eigenspace.
    pub eigenspaces: Vec<(Rational, Vec<QVector>)>,
    /// Monic factor of the characteristic polynomial without rational roots
    /// (constant term first); `[1]` when everything split.
    pub unresolved: Vec<Rational>,
}

impl EigenAnalysis {
    pub fn pairs(&self) -> Vec<(Rational, QVector)> {
        self.eigenspaces
            .iter()
            .flat_map(|(l, vs)| vs.iter().map(move |v| (l.clone(), v.clone())))
            .collect()
    }
}

pub fn eigen_analysis(m: &QMatrix) -> EigenAnalysis {
    let mut poly = m.characteristic_polynomial();
    let mut roots = rational_roots(&poly);
    roots.sort();
    for r in &roots {
        while eval(&poly, r).is_zero() && poly.len() > 1 {
            poly = deflate(&poly, r);
        }
    }
    let eigenspaces = roots
        .into_iter()
        .map(|l| {
            let vs = m.shifted(&l).nullspace();
            (l, vs)
        })
        .collect();
    let lead = poly.last().cloned().unwrap_or_else(Rational::one);
    let unresolved = poly.into_iter().map(|c| c / &lead).collect();
    EigenAnalysis {
        eigenspaces,
        unresolved,
    }
}

/// Every eigenpair with a rational eigenvalue, eigenvalues increasing.
pub fn rational_eigenpairs(m: &QMatrix) -> Vec<(Rational, QVector)> {
    eigen_analysis(m).pairs()
}

fn eval(poly: &[Rational], x: &Rational) -> Rational {
    poly.iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Quotient of `poly` by `(λ - root)`; the caller guarantees exact division.
fn deflate(poly: &[Rational], root: &Rational) -> Vec<Rational> {
    let n = poly.len() - 1;
    let mut out = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for i in (0..n).rev() {
        carry = &poly[i + 1] + &carry * root;
        out[i] = carry.clone();
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            primes.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        primes.push((n, 1));
    }
    let mut out = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out
}

/// Distinct rational roots via the rational root theorem.
fn rational_roots(poly: &[Rational]) -> Vec<Rational> {
    let denom_lcm = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = poly
        .iter()
        .map(|c| (c * Rational::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    while ints.last().is_some_and(Zero::is_zero) {
        ints.pop();
    }
    let mut roots = Vec::new();
    let zeros = ints.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        roots.push(Rational::zero());
    }
    let ints = &ints[zeros..];
    if ints.len() < 2 {
        return roots;
    }
    let reduced: Vec<Rational> = ints.iter().cloned().map(Rational::from_integer).collect();
    let qs = divisors(ints.last().expect("nonempty"));
    for num in divisors(&ints[0]) {
        for den in &qs {
            for s in [1, -1] {
                let cand = Rational::new(&num * s, den.clone());
                if !roots.contains(&cand) && eval(&reduced, &cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}
