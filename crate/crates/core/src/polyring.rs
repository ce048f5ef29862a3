//! Sparse polynomials in a holomorphic/antiholomorphic variable pair and
//! truncated series in the half power `k^{-1/2}`.
//!
//! A [`BidegreePolynomial`] stores `sum f^{p,q} x^p ybar^q` as a map from
//! [`Monomial`] to a complex coefficient; zero coefficients are never stored.
//! Which variables `x`, `y` stand for depends on context: `(z, zbar)` for a
//! potential jet, `(v, vbar)` for the a-series, `(u, vbar)` for the c-series.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiindex::{same_dim, MultiIndex};
use crate::scalar::Real;

/// Exponent pair `(p, q)` of `x^p ybar^q`.
///
/// Ordered graded lexicographically on the concatenated exponents, which is
/// the canonical term order for serialization.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub holo: MultiIndex,
    pub anti: MultiIndex,
}

impl Monomial {
    pub fn new(holo: MultiIndex, anti: MultiIndex) -> Result<Self> {
        same_dim(&holo, &anti)?;
        Ok(Monomial { holo, anti })
    }

    pub fn one(dim: usize) -> Self {
        Monomial {
            holo: MultiIndex::zero(dim),
            anti: MultiIndex::zero(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.holo.dim()
    }

    pub fn degree(&self) -> u32 {
        self.holo.norm() + self.anti.norm()
    }

    pub fn transpose(&self) -> Self {
        Monomial {
            holo: self.anti,
            anti: self.holo,
        }
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            holo: self.holo.add_unchecked(&other.holo),
            anti: self.anti.add_unchecked(&other.anti),
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| {
                let a = self.holo.entries().iter().chain(self.anti.entries());
                let b = other.holo.entries().iter().chain(other.anti.entries());
                b.cmp(a)
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.holo, self.anti)
    }
}

#[derive(Clone, PartialEq)]
pub struct BidegreePolynomial<R: Real> {
    dim: usize,
    terms: BTreeMap<Monomial, Complex<R>>,
}

impl<R: Real> BidegreePolynomial<R> {
    pub fn zero(dim: usize) -> Self {
        assert!(
            (1..=crate::multiindex::MAX_DIM).contains(&dim),
            "dimension {dim} out of range"
        );
        BidegreePolynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex<R>) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(Monomial::one(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Complex::one())
    }

    pub fn monomial(holo: MultiIndex, anti: MultiIndex, c: Complex<R>) -> Result<Self> {
        let m = Monomial::new(holo, anti)?;
        let mut p = Self::zero(m.dim());
        p.add_term(m, c);
        Ok(p)
    }

    /// Builds a polynomial by summing the given terms; repeated monomials add.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Complex<R>)>,
    {
        crate::multiindex::check_dim(dim)?;
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            p.check(&m)?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex<R>)> {
        self.terms.iter()
    }

    pub fn get(&self, m: &Monomial) -> Option<&Complex<R>> {
        self.terms.get(m)
    }

    pub fn coeff(&self, holo: &MultiIndex, anti: &MultiIndex) -> Complex<R> {
        self.terms
            .get(&Monomial {
                holo: *holo,
                anti: *anti,
            })
            .cloned()
            .unwrap_or_else(Complex::zero)
    }

    fn check(&self, m: &Monomial) -> Result<()> {
        if m.dim() != self.dim || m.anti.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: if m.dim() != self.dim {
                    m.dim()
                } else {
                    m.anti.dim()
                },
            });
        }
        Ok(())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Adds `c x^m`, pruning the entry if it cancels. Dimensions are not checked.
    pub(crate) fn add_term(&mut self, m: Monomial, c: Complex<R>) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn insert_term(&mut self, m: Monomial, c: Complex<R>) -> Result<()> {
        self.check(&m)?;
        self.add_term(m, c);
        Ok(())
    }

    /// Replaces the coefficient of `m`; zero removes the term.
    pub fn set(&mut self, m: Monomial, c: Complex<R>) -> Result<()> {
        self.check(&m)?;
        if c.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, c);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        Ok(out)
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn scale(&self, s: &Complex<R>) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim);
        }
        self.map_coeffs(|c| c * s)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Applies `f` to every coefficient, dropping results that vanish.
    pub fn map_coeffs<F>(&self, f: F) -> Self
    where
        F: Fn(&Complex<R>) -> Complex<R>,
    {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(*m, v);
            }
        }
        out
    }

    /// Total degree of the highest term, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Keeps only the terms with total degree in `lo..=hi`.
    pub fn degree_part(&self, lo: u32, hi: u32) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            if (lo..=hi).contains(&m.degree()) {
                out.terms.insert(*m, c.clone());
            }
        }
        out
    }

    /// `f*(x, ybar) = conj(f(y, xbar))`: swaps exponents and conjugates.
    pub fn hermitian_transpose(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            out.terms.insert(m.transpose(), c.conj());
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms
            .iter()
            .all(|(m, c)| self.terms.get(&m.transpose()) == Some(&c.conj()))
    }

    /// `d/dx_i`.
    pub fn diff_holo(&self, i: usize) -> Self {
        self.diff(i, true)
    }

    /// `d/dybar_j`.
    pub fn diff_anti(&self, j: usize) -> Self {
        self.diff(j, false)
    }

    fn diff(&self, i: usize, holo: bool) -> Self {
        assert!(i < self.dim, "variable index {i} out of range");
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let idx = if holo { &m.holo } else { &m.anti };
            let e = idx.get(i);
            if e == 0 {
                continue;
            }
            let lowered = idx.checked_sub(&MultiIndex::unit(self.dim, i)).unwrap();
            let nm = if holo {
                Monomial {
                    holo: lowered,
                    anti: m.anti,
                }
            } else {
                Monomial {
                    holo: m.holo,
                    anti: lowered,
                }
            };
            let f = R::from_i64(e as i64);
            out.terms
                .insert(nm, Complex::new(c.re.clone() * f.clone(), c.im.clone() * f));
        }
        out
    }

    /// Evaluates at `x` and `ybar`, given as the values of the holomorphic
    /// and antiholomorphic variables.
    pub fn eval(&self, x: &[Complex<R>], ybar: &[Complex<R>]) -> Complex<R> {
        assert_eq!(x.len(), self.dim);
        assert_eq!(ybar.len(), self.dim);
        let deg = self.total_degree().unwrap_or(0) as usize;
        let xp = power_table(x, deg);
        let yp = power_table(ybar, deg);
        let mut acc = Complex::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..self.dim {
                t = t * &xp[i][m.holo.get(i) as usize] * &yp[i][m.anti.get(i) as usize];
            }
            acc += t;
        }
        acc
    }
}

pub(crate) fn power_table<R: Real>(x: &[Complex<R>], deg: usize) -> Vec<Vec<Complex<R>>> {
    x.iter()
        .map(|xi| {
            let mut row = Vec::with_capacity(deg + 1);
            row.push(Complex::one());
            for k in 0..deg {
                let next = &row[k] * xi;
                row.push(next);
            }
            row
        })
        .collect()
}

impl BidegreePolynomial<BigRational> {
    /// Rounds every exact coefficient into another scalar field.
    pub fn to_scalar<S: Real>(&self) -> BidegreePolynomial<S> {
        let mut out = BidegreePolynomial::zero(self.dim);
        for (m, c) in &self.terms {
            let v = crate::scalar::complex_from_rational::<S>(c);
            if !v.is_zero() {
                out.terms.insert(*m, v);
            }
        }
        out
    }
}

impl<R: Real> fmt::Debug for BidegreePolynomial<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?} + {:?}i)[{}]", c.re, c.im, m)?;
        }
        Ok(())
    }
}

/// Truncated series `sum_{m=0}^{N} A_m k^{-m/2}` with polynomial coefficients.
#[derive(Clone, PartialEq)]
pub struct HalfPowerSeries<R: Real> {
    dim: usize,
    coeffs: Vec<BidegreePolynomial<R>>,
}

impl<R: Real> HalfPowerSeries<R> {
    pub fn zero(dim: usize, order: u32) -> Self {
        HalfPowerSeries {
            dim,
            coeffs: vec![BidegreePolynomial::zero(dim); order as usize + 1],
        }
    }

    pub fn unit(dim: usize, order: u32) -> Self {
        let mut s = Self::zero(dim, order);
        s.coeffs[0] = BidegreePolynomial::one(dim);
        s
    }

    /// A series with coefficients `coeffs[m]` at order `m`; the truncation
    /// order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<BidegreePolynomial<R>>) -> Result<Self> {
        let dim = coeffs
            .first()
            .map(|p| p.dim())
            .ok_or_else(|| Error::domain("a series needs at least one order"))?;
        for p in &coeffs {
            if p.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        Ok(HalfPowerSeries { dim, coeffs })
    }

    /// The single-term series `p k^{-m/2}`.
    pub fn single(order: u32, m: u32, p: BidegreePolynomial<R>) -> Result<Self> {
        let mut s = Self::zero(p.dim(), order);
        s.set(m, p)?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest retained power of `k^{-1/2}`.
    pub fn order(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeff(&self, m: u32) -> &BidegreePolynomial<R> {
        &self.coeffs[m as usize]
    }

    pub fn coeffs(&self) -> &[BidegreePolynomial<R>] {
        &self.coeffs
    }

    pub fn set(&mut self, m: u32, p: BidegreePolynomial<R>) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: p.dim(),
            });
        }
        if m > self.order() {
            return Err(Error::domain(format!(
                "order {m} beyond truncation order {}",
                self.order()
            )));
        }
        self.coeffs[m as usize] = p;
        Ok(())
    }

    pub(crate) fn coeff_mut(&mut self, m: u32) -> &mut BidegreePolynomial<R> {
        &mut self.coeffs[m as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(BidegreePolynomial::is_zero)
    }

    pub fn truncate(&self, order: u32) -> Self {
        let keep = (order.min(self.order()) + 1) as usize;
        HalfPowerSeries {
            dim: self.dim,
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Sum, truncated at the smaller of the two orders.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.order().min(other.order());
        let mut out = self.truncate(n);
        for m in 0..=n as usize {
            out.coeffs[m].add_assign_unchecked(&other.coeffs[m]);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        HalfPowerSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(BidegreePolynomial::neg).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Complex<R>) -> Self {
        HalfPowerSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|p| p.scale(s)).collect(),
        }
    }

    /// Cauchy product truncated at `min(order, self.order(), other.order())`.
    pub fn mul(&self, other: &Self, order: u32) -> Result<Self> {
        self.check_same(other)?;
        let n = order.min(self.order()).min(other.order());
        let mut out = Self::zero(self.dim, n);
        for t in 0..=n {
            let acc = &mut out.coeffs[t as usize];
            for j in 0..=t {
                let a = &self.coeffs[j as usize];
                let b = &other.coeffs[(t - j) as usize];
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc.add_assign_unchecked(&a.mul_unchecked(b));
            }
        }
        Ok(out)
    }

    /// `sum_m A^m / m!`, truncated at `min(order, self.order())`.
    ///
    /// `A_0` must vanish; each further power then starts one order higher,
    /// so the sum is finite.
    pub fn exp(&self, order: u32) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::domain(
                "non-nilpotent exponent: order-0 part of the exponent is nonzero",
            ));
        }
        let n = order.min(self.order());
        let base = self.truncate(n);
        let mut out = Self::unit(self.dim, n);
        let mut power = Self::unit(self.dim, n);
        let mut m = 1i64;
        loop {
            power = power.mul(&base, n)?;
            if power.is_zero() {
                break;
            }
            let inv = Complex::new(R::one() / R::from_i64(m), R::zero());
            power = power.scale(&inv);
            out = out.add(&power)?;
            m += 1;
        }
        Ok(out)
    }

    /// `max_j (deg A_j - j)` over nonzero orders.
    pub fn weight(&self) -> Result<i64> {
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(j, p)| p.total_degree().map(|d| d as i64 - j as i64))
            .max()
            .ok_or_else(|| Error::domain("weight of the zero series is undefined"))
    }

    pub fn hermitian_transpose(&self) -> Self {
        HalfPowerSeries {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(BidegreePolynomial::hermitian_transpose)
                .collect(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.coeffs.iter().all(BidegreePolynomial::is_hermitian)
    }
}

impl HalfPowerSeries<BigRational> {
    pub fn to_scalar<S: Real>(&self) -> HalfPowerSeries<S> {
        HalfPowerSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|p| p.to_scalar()).collect(),
        }
    }
}

impl<R: Real> fmt::Debug for HalfPowerSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.coeffs.iter().enumerate())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn cq(re: i64, im: i64) -> Complex<Q> {
        Complex::new(q(re, 1), q(im, 1))
    }

    fn mono(p: &[u32], qq: &[u32]) -> Monomial {
        Monomial::new(MultiIndex::new(p).unwrap(), MultiIndex::new(qq).unwrap()).unwrap()
    }

    fn poly(dim: usize, terms: &[(&[u32], &[u32], Complex<Q>)]) -> BidegreePolynomial<Q> {
        BidegreePolynomial::from_terms(dim, terms.iter().map(|(p, qq, c)| (mono(p, qq), c.clone())))
            .unwrap()
    }

    #[test]
    fn add_examples() {
        let f = poly(1, &[(&[1], &[0], cq(1, 0))]);
        assert!(f.add(&f.neg()).unwrap().is_zero());

        let g = poly(1, &[(&[0], &[2], cq(1, 0))]);
        let one = BidegreePolynomial::one(1);
        let s = one.add(&g).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            s.coeff(&MultiIndex::zero(1), &MultiIndex::new(&[2]).unwrap()),
            cq(1, 0)
        );

        let a = poly(1, &[(&[1], &[1], cq(2, 0))]);
        let b = poly(1, &[(&[1], &[1], cq(3, 0))]);
        assert_eq!(a.add(&b).unwrap(), poly(1, &[(&[1], &[1], cq(5, 0))]));

        assert!(matches!(
            a.add(&BidegreePolynomial::one(2)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn canonical_term_order() {
        let p = poly(
            2,
            &[
                (&[0, 1], &[0, 0], cq(1, 0)),
                (&[0, 0], &[0, 0], cq(1, 0)),
                (&[1, 0], &[1, 0], cq(1, 0)),
                (&[1, 0], &[0, 0], cq(1, 0)),
                (&[0, 0], &[1, 0], cq(1, 0)),
            ],
        );
        let order: Vec<String> = p.terms().map(|(m, _)| m.to_string()).collect();
        assert_eq!(
            order,
            [
                "(0,0);(0,0)",
                "(1,0);(0,0)",
                "(0,1);(0,0)",
                "(0,0);(1,0)",
                "(1,0);(1,0)"
            ]
        );
    }

    #[test]
    fn transpose_examples() {
        let f = poly(1, &[(&[1], &[0], cq(0, 1))]);
        assert_eq!(f.hermitian_transpose(), poly(1, &[(&[0], &[1], cq(0, -1))]));
        let g = poly(1, &[(&[1], &[1], cq(3, 0))]);
        assert_eq!(g.hermitian_transpose(), g);
        let c2 = poly(
            1,
            &[
                (&[0], &[0], cq(1, 0)),
                (&[2], &[2], Complex::new(q(-1, 2), q(0, 1))),
            ],
        );
        assert_eq!(c2.hermitian_transpose(), c2);
    }

    #[test]
    fn derivatives() {
        // z^2 zbar^3
        let f = poly(1, &[(&[2], &[3], cq(1, 0))]);
        assert_eq!(f.diff_holo(0), poly(1, &[(&[1], &[3], cq(2, 0))]));
        assert_eq!(f.diff_anti(0), poly(1, &[(&[2], &[2], cq(3, 0))]));
        assert!(poly(1, &[(&[0], &[3], cq(1, 0))]).diff_holo(0).is_zero());
    }

    #[test]
    fn eval_matches_hand_value() {
        // 2 x ybar + i at x = 1+i, ybar = 2
        let f = poly(1, &[(&[1], &[1], cq(2, 0)), (&[0], &[0], cq(0, 1))]);
        let v = f.eval(&[cq(1, 1)], &[cq(2, 0)]);
        assert_eq!(v, cq(4, 5));
    }

    #[test]
    fn series_mul_examples() {
        let b = HalfPowerSeries::from_coeffs(vec![
            BidegreePolynomial::one(1),
            poly(1, &[(&[1], &[0], cq(1, 0))]),
            poly(1, &[(&[1], &[1], cq(2, 0))]),
        ])
        .unwrap();
        let unit = HalfPowerSeries::unit(1, 4);
        assert_eq!(unit.mul(&b, 1).unwrap(), b.truncate(1));

        let x = HalfPowerSeries::single(3, 1, poly(1, &[(&[1], &[0], cq(1, 0))])).unwrap();
        let y = HalfPowerSeries::single(3, 1, poly(1, &[(&[0], &[1], cq(1, 0))])).unwrap();
        let xy = x.mul(&y, 3).unwrap();
        assert_eq!(
            xy,
            HalfPowerSeries::single(3, 2, poly(1, &[(&[1], &[1], cq(1, 0))])).unwrap()
        );
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let a = HalfPowerSeries::<Q>::unit(1, 5);
        let b = HalfPowerSeries::<Q>::unit(1, 2);
        assert_eq!(a.add(&b).unwrap().order(), 2);
        assert_eq!(a.mul(&b, 9).unwrap().order(), 2);
    }

    #[test]
    fn exp_examples() {
        let z = HalfPowerSeries::<Q>::zero(1, 4);
        assert_eq!(z.exp(4).unwrap(), HalfPowerSeries::unit(1, 4));

        let p = poly(1, &[(&[2], &[2], cq(1, 0))]);
        let a = HalfPowerSeries::single(4, 2, p.clone()).unwrap();
        let e = a.exp(4).unwrap();
        assert_eq!(e.coeff(0), &BidegreePolynomial::one(1));
        assert!(e.coeff(1).is_zero());
        assert_eq!(e.coeff(2), &p);
        assert!(e.coeff(3).is_zero());
        assert_eq!(
            e.coeff(4),
            &p.mul(&p).unwrap().scale(&Complex::new(q(1, 2), q(0, 1)))
        );

        let bad = HalfPowerSeries::<Q>::unit(1, 2);
        assert!(matches!(bad.exp(2), Err(Error::Domain(m)) if m.contains("non-nilpotent")));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(HalfPowerSeries::<Q>::unit(1, 3).weight().unwrap(), 0);
        let a = HalfPowerSeries::single(3, 2, poly(1, &[(&[2], &[2], cq(1, 0))])).unwrap();
        assert_eq!(a.weight().unwrap(), 2);
        assert!(HalfPowerSeries::<Q>::zero(1, 3).weight().is_err());
    }

    #[test]
    fn float_instantiation() {
        let f =
            BidegreePolynomial::<f64>::from_terms(1, [(mono(&[1], &[1]), Complex::new(0.5, 0.0))])
                .unwrap();
        let s = HalfPowerSeries::single(2, 2, f).unwrap();
        let e = s.exp(2).unwrap();
        assert_eq!(
            e.coeff(2).coeff(
                &MultiIndex::new(&[1]).unwrap(),
                &MultiIndex::new(&[1]).unwrap()
            ),
            Complex::new(0.5, 0.0)
        );
        let f32s = HalfPowerSeries::<f32>::unit(2, 1);
        assert_eq!(f32s.mul(&f32s, 1).unwrap(), f32s);
    }

    fn arb_poly(dim: usize, max_deg: u32) -> impl Strategy<Value = BidegreePolynomial<Q>> {
        let idx = proptest::collection::vec(0u32..=max_deg / 2, dim);
        let term = (idx.clone(), idx, -3i64..=3, -3i64..=3, 1i64..=3);
        proptest::collection::vec(term, 0..4).prop_map(move |ts| {
            BidegreePolynomial::from_terms(
                dim,
                ts.into_iter()
                    .map(|(p, qq, re, im, d)| (mono(&p, &qq), Complex::new(q(re, d), q(im, d)))),
            )
            .unwrap()
        })
    }

    fn arb_series(dim: usize, order: u32) -> impl Strategy<Value = HalfPowerSeries<Q>> {
        proptest::collection::vec(arb_poly(dim, 2), order as usize + 1)
            .prop_map(|cs| HalfPowerSeries::from_coeffs(cs).unwrap())
    }

    /// Series with vanishing order-0 part, as required by `exp`.
    fn arb_nilpotent(dim: usize, order: u32) -> impl Strategy<Value = HalfPowerSeries<Q>> {
        arb_series(dim, order).prop_map(|mut s| {
            s.set(0, BidegreePolynomial::zero(s.dim())).unwrap();
            s
        })
    }

    /// Positive real coefficients: products can never cancel.
    fn arb_positive(dim: usize, order: u32) -> impl Strategy<Value = HalfPowerSeries<Q>> {
        let idx = proptest::collection::vec(0u32..=2, dim);
        let term = (idx.clone(), idx, 1i64..=5);
        let p = proptest::collection::vec(term, 0..3).prop_map(move |ts| {
            BidegreePolynomial::from_terms(
                dim,
                ts.into_iter().map(|(p, qq, c)| (mono(&p, &qq), cq(c, 0))),
            )
            .unwrap()
        });
        proptest::collection::vec(p, order as usize + 1)
            .prop_map(|cs| HalfPowerSeries::from_coeffs(cs).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mul_commutative_and_associative(
            (a, b, c) in (1usize..=2, 0u32..=4).prop_flat_map(|(d, n)| (arb_series(d, n), arb_series(d, n), arb_series(d, n)))
        ) {
            let n = a.order();
            prop_assert_eq!(a.mul(&b, n).unwrap(), b.mul(&a, n).unwrap());
            let l = a.mul(&b, n).unwrap().mul(&c, n).unwrap();
            let r = a.mul(&b.mul(&c, n).unwrap(), n).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn exp_of_negation_is_inverse(a in (1usize..=2, 0u32..=5).prop_flat_map(|(d, n)| arb_nilpotent(d, n))) {
            let n = a.order();
            let prod = a.exp(n).unwrap().mul(&a.neg().exp(n).unwrap(), n).unwrap();
            prop_assert_eq!(prod, HalfPowerSeries::unit(a.dim(), n));
        }

        #[test]
        fn transpose_is_involution(p in (1usize..=3).prop_flat_map(|d| arb_poly(d, 4))) {
            prop_assert_eq!(p.hermitian_transpose().hermitian_transpose(), p);
        }

        #[test]
        fn weight_is_additive_without_cancellation(
            (a, b) in (1usize..=2, 0u32..=4).prop_flat_map(|(d, n)| (arb_positive(d, n), arb_positive(d, n)))
        ) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            let n = a.order();
            let ab = a.mul(&b, 2 * n).unwrap();
            // compare against the untruncated weight by padding the orders
            let pad = |s: &HalfPowerSeries<Q>| {
                let mut cs = s.coeffs().to_vec();
                cs.resize(2 * n as usize + 1, BidegreePolynomial::zero(s.dim()));
                HalfPowerSeries::from_coeffs(cs).unwrap()
            };
            let full = pad(&a).mul(&pad(&b), 2 * n).unwrap();
            prop_assert_eq!(ab.order(), n);
            prop_assert_eq!(full.weight().unwrap(), a.weight().unwrap() + b.weight().unwrap());
        }
    }
}
