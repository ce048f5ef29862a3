//! Kähler potential jets in Böchner coordinates and curvature at the origin.
//!
//! A jet is the Taylor polynomial of `phi` at the origin, stored as a
//! [`BidegreePolynomial`] in `(z, zbar)`, together with the total degree `D`
//! up to which it is known. Validation enforces `phi = |z|^2 + R` with
//! `R = O(|z|^4)`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiindex::{check_dim, MultiIndex};
use crate::polyring::{BidegreePolynomial, Monomial};
use crate::scalar::Real;

/// How strictly the normal form is enforced on load.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BochnerCheck {
    /// `phi - |z|^2` has no terms of total degree `<= 3`.
    #[default]
    Normal,
    /// Additionally every term of `R` has holomorphic and antiholomorphic
    /// degree at least 2, so the degree-4 part is pure bidegree (2,2).
    Strict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialJet<R: Real> {
    max_degree: u32,
    phi: BidegreePolynomial<R>,
}

impl<R: Real> PotentialJet<R> {
    pub fn new(phi: BidegreePolynomial<R>, max_degree: u32) -> Result<Self> {
        Self::with_check(phi, max_degree, BochnerCheck::Normal)
    }

    pub fn with_check(
        phi: BidegreePolynomial<R>,
        max_degree: u32,
        check: BochnerCheck,
    ) -> Result<Self> {
        check_dim(phi.dim())?;
        if max_degree < 2 {
            return Err(Error::InsufficientJet {
                needed: 2,
                available: max_degree,
                context: "a potential jet".into(),
            });
        }
        let n = phi.dim();
        for (m, c) in phi.terms() {
            let d = m.degree();
            if d > max_degree {
                return Err(Error::Validation {
                    term: m.to_string(),
                    reason: format!("total degree {d} exceeds max_degree {max_degree}"),
                });
            }
            if d <= 3 {
                let is_metric = d == 2 && m.holo.norm() == 1 && m.holo == m.anti;
                if !is_metric {
                    return Err(Error::NotBochner {
                        term: m.to_string(),
                        reason: "is a nonzero term of total degree <= 3 besides |z|^2".into(),
                    });
                }
                if *c != Complex::one() {
                    return Err(Error::NotBochner {
                        term: m.to_string(),
                        reason: "must have coefficient 1 (metric is the identity at the origin)"
                            .into(),
                    });
                }
            } else if check == BochnerCheck::Strict && (m.holo.norm() < 2 || m.anti.norm() < 2) {
                return Err(Error::NotBochner {
                    term: m.to_string(),
                    reason: "has holomorphic or antiholomorphic degree below 2".into(),
                });
            }
            match phi.get(&m.transpose()) {
                Some(t) if *t == c.conj() => {}
                _ => {
                    return Err(Error::Validation {
                        term: m.to_string(),
                        reason: format!(
                            "not hermitian: coefficient of {} must be the conjugate",
                            m.transpose()
                        ),
                    })
                }
            }
        }
        for i in 0..n {
            let e = MultiIndex::unit(n, i);
            if phi.get(&Monomial { holo: e, anti: e }).is_none() {
                return Err(Error::NotBochner {
                    term: Monomial { holo: e, anti: e }.to_string(),
                    reason: "is missing (metric is the identity at the origin)".into(),
                });
            }
        }
        Ok(PotentialJet { max_degree, phi })
    }

    /// The flat potential `|z|^2`.
    pub fn flat(dim: usize, max_degree: u32) -> Result<Self> {
        check_dim(dim)?;
        Self::new(euclidean(dim), max_degree)
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn phi(&self) -> &BidegreePolynomial<R> {
        &self.phi
    }

    /// `R = phi - |z|^2`.
    pub fn remainder(&self) -> BidegreePolynomial<R> {
        self.phi.sub(&euclidean(self.dim())).unwrap()
    }

    /// True when the degree-4 part of `phi` is pure bidegree (2,2).
    pub fn has_pure_quartic(&self) -> bool {
        self.phi
            .terms()
            .filter(|(m, _)| m.degree() == 4)
            .all(|(m, _)| m.holo.norm() == 2)
    }

    /// `d^2 phi / dz_i dzbar_j` as polynomials, row `i`, column `j`.
    pub fn hessian(&self) -> Vec<Vec<BidegreePolynomial<R>>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let di = self.phi.diff_holo(i);
                (0..n).map(|j| di.diff_anti(j)).collect()
            })
            .collect()
    }

    /// Curvature tensors at the origin, read off the degree-4 part of `phi`.
    pub fn curvature_at_origin(&self) -> Result<CurvatureData<R>> {
        if self.max_degree < 4 {
            return Err(Error::InsufficientJet {
                needed: 4,
                available: self.max_degree,
                context: "curvature at the origin".into(),
            });
        }
        let n = self.dim();
        let mut riemann = vec![Complex::zero(); n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let p = MultiIndex::unit(n, i).add_unchecked(&MultiIndex::unit(n, k));
                        let q = MultiIndex::unit(n, j).add_unchecked(&MultiIndex::unit(n, l));
                        let f = BigInt::from(p.factorial() * q.factorial());
                        let c = self.phi.coeff(&p, &q);
                        riemann[index4(n, i, j, k, l)] =
                            Complex::new(-c.re.mul_bigint(&f), -c.im.mul_bigint(&f));
                    }
                }
            }
        }
        Ok(CurvatureData::from_riemann(n, riemann))
    }
}

fn euclidean<R: Real>(dim: usize) -> BidegreePolynomial<R> {
    let mut p = BidegreePolynomial::zero(dim);
    for i in 0..dim {
        let e = MultiIndex::unit(dim, i);
        p.add_term(Monomial { holo: e, anti: e }, Complex::one());
    }
    p
}

fn index4(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

/// `Rm_{i jbar k lbar}`, `Ric_{i jbar}` and the scalar curvature at the origin.
///
/// Indices are 0-based. The metric at the origin is the identity, so traces
/// need no inverse metric.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData<R: Real> {
    dim: usize,
    riemann: Vec<Complex<R>>,
    ricci: Vec<Complex<R>>,
    scalar: Complex<R>,
}

impl<R: Real> CurvatureData<R> {
    fn from_riemann(n: usize, riemann: Vec<Complex<R>>) -> Self {
        let mut ricci = vec![Complex::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    ricci[i * n + j] += riemann[index4(n, i, j, k, k)].clone();
                }
            }
        }
        let mut scalar = Complex::zero();
        for i in 0..n {
            scalar += ricci[i * n + i].clone();
        }
        CurvatureData {
            dim: n,
            riemann,
            ricci,
            scalar,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> &Complex<R> {
        &self.riemann[index4(self.dim, i, j, k, l)]
    }

    pub fn ricci(&self, i: usize, j: usize) -> &Complex<R> {
        &self.ricci[i * self.dim + j]
    }

    pub fn scalar(&self) -> &Complex<R> {
        &self.scalar
    }

    /// Symmetry in `(i,k)` and `(j,l)`, hermitian symmetry, and the traces.
    pub fn check_symmetries(&self) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.riemann(i, j, k, l);
                        if r != self.riemann(k, j, i, l)
                            || r != self.riemann(i, l, k, j)
                            || *r != self.riemann(j, i, l, k).conj()
                        {
                            return false;
                        }
                    }
                }
                let tr = (0..n).fold(Complex::zero(), |acc: Complex<R>, k| {
                    acc + self.riemann(i, j, k, k).clone()
                });
                if tr != *self.ricci(i, j) {
                    return false;
                }
            }
        }
        let tr = (0..n).fold(Complex::zero(), |acc: Complex<R>, i| {
            acc + self.ricci(i, i).clone()
        });
        tr == self.scalar
    }

    /// `rho/2 - 1/4 sum Rm_{i jbar k lbar} u^i u^k vbar^j vbar^l`.
    pub fn c2_closed_form(&self) -> BidegreePolynomial<R> {
        let n = self.dim;
        let half = R::one() / R::from_i64(2);
        let quarter = R::one() / R::from_i64(4);
        let mut out = BidegreePolynomial::constant(
            n,
            Complex::new(
                self.scalar.re.clone() * half.clone(),
                self.scalar.im.clone() * half,
            ),
        );
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.riemann(i, j, k, l);
                        if r.is_zero() {
                            continue;
                        }
                        let m = Monomial {
                            holo: MultiIndex::unit(n, i).add_unchecked(&MultiIndex::unit(n, k)),
                            anti: MultiIndex::unit(n, j).add_unchecked(&MultiIndex::unit(n, l)),
                        };
                        out.add_term(
                            m,
                            Complex::new(
                                -r.re.clone() * quarter.clone(),
                                -r.im.clone() * quarter.clone(),
                            ),
                        );
                    }
                }
            }
        }
        out
    }
}
