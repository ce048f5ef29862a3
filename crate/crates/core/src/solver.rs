//! Gaussian moment pairing and the recursion for the c-series.
//!
//! With `dV` normalized so that `int e^{-|v|^2} dV = 1`,
//!
//! ```text
//! int vbar^p v^q e^{u.vbar - |v|^2} dV = q!/(q-p)! u^{q-p}   (p <= q), 0 otherwise.
//! ```
//!
//! Testing the order-`t` part of the reproducing identity against `v^l` and
//! reading off the coefficient of `u^p` determines `c_t^{p,l}` once all
//! `c_t^{., q}` with `q < l` are known. Only `|l| <= 2t` is needed since
//! `c_t^{p,q}` vanishes for `|q| > 2t`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiindex::{same_dim, MultiIndex};
use crate::polyring::{BidegreePolynomial, HalfPowerSeries, Monomial};
use crate::scalar::Real;

/// `coefficient * u^u_exponent`; a zero coefficient is the zero term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTerm {
    pub coefficient: BigUint,
    pub u_exponent: MultiIndex,
}

impl MomentTerm {
    fn zero(dim: usize) -> Self {
        MomentTerm {
            coefficient: BigUint::zero(),
            u_exponent: MultiIndex::zero(dim),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }
}

/// `int vbar^p v^q e^{u.vbar - |v|^2} dV`.
pub fn gaussian_moment(p: &MultiIndex, q: &MultiIndex) -> Result<MomentTerm> {
    same_dim(p, q)?;
    Ok(match q.checked_sub(p) {
        Some(e) => MomentTerm {
            coefficient: q.falling(p),
            u_exponent: e,
        },
        None => MomentTerm::zero(p.dim()),
    })
}

/// Contribution of `u^p vbar^q v^r vbar^s` to the identity tested on `v^l`.
pub fn pair_with_monomial(
    l: &MultiIndex,
    p: &MultiIndex,
    q: &MultiIndex,
    r: &MultiIndex,
    s: &MultiIndex,
) -> Result<MomentTerm> {
    same_dim(l, p)?;
    same_dim(l, q)?;
    same_dim(l, r)?;
    same_dim(l, s)?;
    let top = l.add_unchecked(r);
    let w = q.add_unchecked(s);
    let m = gaussian_moment(&w, &top)?;
    if m.is_zero() {
        return Ok(m);
    }
    Ok(MomentTerm {
        coefficient: m.coefficient,
        u_exponent: m.u_exponent.add_unchecked(p),
    })
}

/// Order in which test monomials of equal degree are visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Enumeration {
    #[default]
    GradedLex,
    GradedRevLex,
}

fn test_monomials(dim: usize, max_degree: u32, order: Enumeration) -> Vec<MultiIndex> {
    (0..=max_degree)
        .flat_map(|d| {
            let mut v = MultiIndex::of_degree(dim, d);
            if order == Enumeration::GradedRevLex {
                v.reverse();
            }
            v
        })
        .collect()
}

/// Products `u^p v^r vbar^w` keyed by `(p, r, w)`.
type Trivariate<R> = HashMap<(MultiIndex, MultiIndex, MultiIndex), Complex<R>>;

fn accumulate<R: Real>(
    out: &mut Trivariate<R>,
    c: &BidegreePolynomial<R>,
    a: &BidegreePolynomial<R>,
) {
    for (mc, cc) in c.terms() {
        for (ma, ca) in a.terms() {
            let key = (mc.holo, ma.holo, mc.anti.add_unchecked(&ma.anti));
            let v = cc * ca;
            match out.get_mut(&key) {
                Some(x) => *x += v,
                None => {
                    out.insert(key, v);
                }
            }
        }
    }
}

/// Falling factorials `top!/(top-w)!` as scalars, memoized.
struct FallingCache<R: Real> {
    map: HashMap<(MultiIndex, MultiIndex), R>,
}

impl<R: Real> FallingCache<R> {
    fn new() -> Self {
        FallingCache {
            map: HashMap::new(),
        }
    }

    fn get(&mut self, top: &MultiIndex, w: &MultiIndex) -> R {
        self.map
            .entry((*top, *w))
            .or_insert_with(|| R::from_bigint(&BigInt::from(top.falling(w))))
            .clone()
    }
}

/// Pairs a trivariate product with `v^l`: a polynomial in `u` keyed by exponent.
fn pair<R: Real>(
    h: &Trivariate<R>,
    l: &MultiIndex,
    cache: &mut FallingCache<R>,
) -> BTreeMap<MultiIndex, Complex<R>> {
    let mut out: BTreeMap<MultiIndex, Complex<R>> = BTreeMap::new();
    for ((p, r, w), c) in h {
        let top = l.add_unchecked(r);
        let Some(rest) = top.checked_sub(w) else {
            continue;
        };
        let f = cache.get(&top, w);
        let v = Complex::new(c.re.clone() * f.clone(), c.im.clone() * f);
        *out.entry(rest.add_unchecked(p))
            .or_insert_with(Complex::zero) += v;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn check_a_series<R: Real>(a: &HalfPowerSeries<R>) -> Result<()> {
    let n = a.dim();
    if *a.coeff(0) != BidegreePolynomial::one(n) {
        return Err(Error::domain("a-series must have a_0 = 1"));
    }
    if !check_degree_bound(a, 2) {
        return Err(Error::domain(
            "a-series violates the degree bound deg a_m <= 2m",
        ));
    }
    if !check_parity(a) {
        return Err(Error::domain("a-series violates the parity property"));
    }
    Ok(())
}

/// Solves for `c_0, ..., c_order` given the a-series.
pub fn solve_coefficients<R: Real>(
    a: &HalfPowerSeries<R>,
    order: u32,
) -> Result<HalfPowerSeries<R>> {
    solve_coefficients_with(a, order, Enumeration::GradedLex)
}

pub fn solve_coefficients_with<R: Real>(
    a: &HalfPowerSeries<R>,
    order: u32,
    enumeration: Enumeration,
) -> Result<HalfPowerSeries<R>> {
    check_a_series(a)?;
    if order > a.order() {
        return Err(Error::domain(format!(
            "a-series is truncated at order {}, cannot solve to order {order}",
            a.order()
        )));
    }
    let n = a.dim();
    let mut c = HalfPowerSeries::zero(n, order);
    let mut cache = FallingCache::new();
    for t in 0..=order {
        let mut h: Trivariate<R> = HashMap::new();
        for j in 0..t {
            accumulate(&mut h, c.coeff(j), a.coeff(t - j));
        }
        h.retain(|_, v| !v.is_zero());

        let mut ct: BidegreePolynomial<R> = BidegreePolynomial::zero(n);
        for l in test_monomials(n, 2 * t, enumeration) {
            let mut rhs: BTreeMap<MultiIndex, Complex<R>> = pair(&h, &l, &mut cache)
                .into_iter()
                .map(|(e, v)| (e, -v))
                .collect();
            if t == 0 {
                *rhs.entry(l).or_insert_with(Complex::zero) += Complex::one();
            }
            for (m, v) in ct.terms() {
                let Some(rest) = l.checked_sub(&m.anti) else {
                    continue;
                };
                let f = cache.get(&l, &m.anti);
                let x = Complex::new(v.re.clone() * f.clone(), v.im.clone() * f);
                *rhs.entry(rest.add_unchecked(&m.holo))
                    .or_insert_with(Complex::zero) -= x;
            }
            let lf = BigInt::from(l.factorial());
            for (p, v) in rhs {
                if v.is_zero() {
                    continue;
                }
                // in floating point, terms the degree bound forces to zero are
                // rounding residue; in exact arithmetic they are a bug
                if !R::EXACT && p.norm() + l.norm() > 2 * t {
                    continue;
                }
                let x = Complex::new(v.re.div_bigint(&lf), v.im.div_bigint(&lf));
                ct.add_term(Monomial { holo: p, anti: l }, x);
            }
        }
        if ct.total_degree().is_some_and(|d| d > 2 * t) {
            return Err(Error::InvariantViolation(format!(
                "c_{t} has a term of degree above {}",
                2 * t
            )));
        }
        if ct.terms().any(|(m, _)| (m.degree() + t) % 2 == 1) {
            return Err(Error::InvariantViolation(format!("c_{t} violates parity")));
        }
        c.set(t, ct)?;
    }
    Ok(c)
}

/// Outcome of [`verify_reproducing`].
#[derive(Clone, Debug, PartialEq)]
pub struct ReproducingReport {
    pub passed: bool,
    /// Number of `(l, t)` pairs checked.
    pub checked: usize,
    /// First failing test monomial and order.
    pub first_failure: Option<(MultiIndex, u32)>,
}

/// Checks the truncated reproducing identity on every `v^l` with `|l| <= max_degree`:
/// the order-`t` part of the pairing must be `u^l` for `t = 0` and zero otherwise.
pub fn verify_reproducing<R: Real>(
    c: &HalfPowerSeries<R>,
    a: &HalfPowerSeries<R>,
    order: u32,
    max_degree: u32,
) -> Result<ReproducingReport> {
    if c.dim() != a.dim() {
        return Err(Error::Dimension {
            expected: c.dim(),
            found: a.dim(),
        });
    }
    if order > c.order() || order > a.order() {
        return Err(Error::domain(format!(
            "series truncated at orders {} and {}, cannot verify to order {order}",
            c.order(),
            a.order()
        )));
    }
    let n = c.dim();
    let mut cache = FallingCache::new();
    let monomials = MultiIndex::up_to_degree(n, max_degree);
    let mut checked = 0;
    for t in 0..=order {
        let mut g: Trivariate<R> = HashMap::new();
        for j in 0..=t {
            accumulate(&mut g, c.coeff(j), a.coeff(t - j));
        }
        g.retain(|_, v| !v.is_zero());
        for l in &monomials {
            checked += 1;
            let mut got = pair(&g, l, &mut cache);
            if t == 0 {
                let e = got.entry(*l).or_insert_with(Complex::zero);
                *e -= Complex::one();
                if e.is_zero() {
                    got.remove(l);
                }
            }
            if !got.is_empty() {
                return Ok(ReproducingReport {
                    passed: false,
                    checked,
                    first_failure: Some((*l, t)),
                });
            }
        }
    }
    Ok(ReproducingReport {
        passed: true,
        checked,
        first_failure: None,
    })
}

/// Order and monomial of the first term with `|p| + |q|` of the wrong parity.
pub fn find_parity_violation<R: Real>(s: &HalfPowerSeries<R>) -> Option<(u32, Monomial)> {
    (0..=s.order()).find_map(|m| {
        s.coeff(m)
            .terms()
            .find(|(mono, _)| (mono.degree() + m) % 2 == 1)
            .map(|(mono, _)| (m, *mono))
    })
}

/// True iff no order-`m` term has `|p| + |q| != m (mod 2)`.
pub fn check_parity<R: Real>(s: &HalfPowerSeries<R>) -> bool {
    find_parity_violation(s).is_none()
}

pub fn find_degree_violation<R: Real>(
    s: &HalfPowerSeries<R>,
    slope: u32,
) -> Option<(u32, Monomial)> {
    (0..=s.order()).find_map(|m| {
        s.coeff(m)
            .terms()
            .find(|(mono, _)| mono.degree() > slope * m)
            .map(|(mono, _)| (m, *mono))
    })
}

/// True iff every order-`m` polynomial has total degree at most `slope * m`.
pub fn check_degree_bound<R: Real>(s: &HalfPowerSeries<R>, slope: u32) -> bool {
    find_degree_violation(s, slope).is_none()
}
