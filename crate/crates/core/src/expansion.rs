//! The a-series `e^{-kR(v/sqrt k)} Omega(v/sqrt k)` as a half-power series.
//!
//! Substituting `z = v/sqrt k` turns a term `z^p zbar^q` of total degree `d`
//! into `v^p vbar^q k^{-d/2}`; an extra factor `k` lowers the order by 2.

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::polyring::{BidegreePolynomial, HalfPowerSeries};
use crate::potential::PotentialJet;
use crate::scalar::Real;
use crate::solver::{check_degree_bound, check_parity};

/// Places each term of degree `d` at order `d + prefactor_power`, dropping
/// orders above `order`. `prefactor_power = -2` encodes multiplication by `k`.
pub fn gauge_shift<R: Real>(
    f: &BidegreePolynomial<R>,
    prefactor_power: i32,
    order: u32,
) -> Result<HalfPowerSeries<R>> {
    let mut out = HalfPowerSeries::zero(f.dim(), order);
    for (m, c) in f.terms() {
        let t = m.degree() as i64 + prefactor_power as i64;
        if t < 0 {
            return Err(Error::domain(format!(
                "term {m} lands at negative order {t}"
            )));
        }
        if t <= order as i64 {
            out.coeff_mut(t as u32).add_term(*m, c.clone());
        }
    }
    Ok(out)
}

fn require_degree<R: Real>(jet: &PotentialJet<R>, order: u32, what: &str) -> Result<()> {
    let needed = order + 2;
    if jet.max_degree() < needed {
        return Err(Error::InsufficientJet {
            needed,
            available: jet.max_degree(),
            context: format!("{what} to order {order}"),
        });
    }
    Ok(())
}

/// `Omega(v/sqrt k) = det(d^2 phi / dz_i dzbar_j)(v/sqrt k)` to order `order`.
pub fn omega_series<R: Real>(jet: &PotentialJet<R>, order: u32) -> Result<HalfPowerSeries<R>> {
    require_degree(jet, order, "Omega")?;
    let entries = jet
        .hessian()
        .iter()
        .map(|row| {
            row.iter()
                .map(|h| gauge_shift(h, 0, order))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let cols: Vec<usize> = (0..jet.dim()).collect();
    cofactor_det(&entries, 0, &cols, order)
}

/// Laplace expansion along row `row`, over the remaining columns `cols`.
fn cofactor_det<R: Real>(
    m: &[Vec<HalfPowerSeries<R>>],
    row: usize,
    cols: &[usize],
    order: u32,
) -> Result<HalfPowerSeries<R>> {
    if cols.len() == 1 {
        return Ok(m[row][cols[0]].clone());
    }
    let dim = m[0][0].dim();
    let mut det = HalfPowerSeries::zero(dim, order);
    for (pos, &c) in cols.iter().enumerate() {
        let entry = &m[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = cofactor_det(m, row + 1, &rest, order)?;
        let term = entry.mul(&minor, order)?;
        det = if pos % 2 == 0 {
            det.add(&term)?
        } else {
            det.sub(&term)?
        };
    }
    Ok(det)
}

/// `a = exp(gauge_shift(-R, -2)) * Omega`, truncated at `order`.
///
/// Needs the jet to total degree `order + 2`. The structural properties
/// (`a_0 = 1`, `a_1 = 0`, degree bound, parity) are asserted on the result.
pub fn a_series<R: Real>(jet: &PotentialJet<R>, order: u32) -> Result<HalfPowerSeries<R>> {
    require_degree(jet, order, "the a-series")?;
    let minus_kr = gauge_shift(&jet.remainder().neg(), -2, order)?;
    let a = minus_kr
        .exp(order)?
        .mul(&omega_series(jet, order)?, order)?;

    let n = jet.dim();
    if *a.coeff(0) != BidegreePolynomial::constant(n, Complex::one()) {
        return Err(Error::InvariantViolation(
            "a_0 is not the constant 1".into(),
        ));
    }
    if order >= 1 && !a.coeff(1).is_zero() {
        return Err(Error::InvariantViolation("a_1 does not vanish".into()));
    }
    if !check_degree_bound(&a, 2) {
        return Err(Error::InvariantViolation(
            "a-series violates deg a_m <= 2m".into(),
        ));
    }
    if !check_parity(&a) {
        return Err(Error::InvariantViolation("a-series violates parity".into()));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::polyring::Monomial;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn real(x: Q) -> Complex<Q> {
        Complex::new(x, Q::zero())
    }

    fn mono(p: &[u32], qq: &[u32]) -> Monomial {
        Monomial::new(MultiIndex::new(p).unwrap(), MultiIndex::new(qq).unwrap()).unwrap()
    }

    fn poly(dim: usize, terms: &[(&[u32], &[u32], Q)]) -> BidegreePolynomial<Q> {
        BidegreePolynomial::from_terms(
            dim,
            terms
                .iter()
                .map(|(p, qq, c)| (mono(p, qq), real(c.clone()))),
        )
        .unwrap()
    }

    fn cp1(d: u32) -> PotentialJet<Q> {
        let terms: Vec<_> = (1..=d / 2)
            .map(|m| {
                let sign = if m % 2 == 1 { 1 } else { -1 };
                (mono(&[m], &[m]), real(q(sign, m as i64)))
            })
            .collect();
        PotentialJet::new(BidegreePolynomial::from_terms(1, terms).unwrap(), d).unwrap()
    }

    #[test]
    fn gauge_shift_examples() {
        let f = poly(1, &[(&[2], &[2], q(1, 1))]);
        let s = gauge_shift(&f, -2, 4).unwrap();
        assert_eq!(s.coeff(2), &f);
        assert!(s.coeff(0).is_zero() && s.coeff(4).is_zero());

        assert!(gauge_shift(&BidegreePolynomial::<Q>::zero(1), -2, 3)
            .unwrap()
            .is_zero());

        let g = poly(1, &[(&[1], &[1], q(1, 1))]);
        assert_eq!(gauge_shift(&g, 0, 3).unwrap().coeff(2), &g);

        assert!(matches!(gauge_shift(&g, -3, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn exp_of_cp1_exponent() {
        let jet = cp1(4);
        let e = gauge_shift(&jet.remainder().neg(), -2, 2)
            .unwrap()
            .exp(2)
            .unwrap();
        assert_eq!(e.coeff(0), &BidegreePolynomial::one(1));
        assert!(e.coeff(1).is_zero());
        assert_eq!(e.coeff(2), &poly(1, &[(&[2], &[2], q(1, 2))]));
    }

    #[test]
    fn omega_examples() {
        let flat = PotentialJet::<Q>::flat(2, 6).unwrap();
        assert_eq!(omega_series(&flat, 4).unwrap(), HalfPowerSeries::unit(2, 4));

        let om = omega_series(&cp1(4), 2).unwrap();
        assert_eq!(om.coeff(0), &BidegreePolynomial::one(1));
        assert!(om.coeff(1).is_zero());
        assert_eq!(om.coeff(2), &poly(1, &[(&[1], &[1], q(-2, 1))]));
    }

    #[test]
    fn omega_of_product_is_product_of_factors() {
        // |z1|^2 + log(1+|z2|^2) gives Omega = (1 + |z2|^2)^-2 = 1 - 2|z2|^2 + 3|z2|^4 - ...
        let phi = poly(
            2,
            &[
                (&[1, 0], &[1, 0], q(1, 1)),
                (&[0, 1], &[0, 1], q(1, 1)),
                (&[0, 2], &[0, 2], q(-1, 2)),
                (&[0, 3], &[0, 3], q(1, 3)),
            ],
        );
        let om = omega_series(&PotentialJet::new(phi, 6).unwrap(), 4).unwrap();
        assert_eq!(om.coeff(2), &poly(2, &[(&[0, 1], &[0, 1], q(-2, 1))]));
        assert_eq!(om.coeff(4), &poly(2, &[(&[0, 2], &[0, 2], q(3, 1))]));
    }

    #[test]
    fn a_series_examples() {
        assert_eq!(
            a_series(&PotentialJet::<Q>::flat(1, 8).unwrap(), 6).unwrap(),
            HalfPowerSeries::unit(1, 6)
        );
        let a = a_series(&cp1(4), 2).unwrap();
        assert_eq!(
            a.coeff(2),
            &poly(1, &[(&[1], &[1], q(-2, 1)), (&[2], &[2], q(1, 2))])
        );
    }

    #[test]
    fn a_two_bidegree_one_one_is_minus_ricci() {
        let phi = poly(
            2,
            &[
                (&[1, 0], &[1, 0], q(1, 1)),
                (&[0, 1], &[0, 1], q(1, 1)),
                (&[2, 0], &[2, 0], q(-1, 3)),
                (&[1, 1], &[1, 1], q(1, 5)),
                (&[2, 0], &[1, 1], q(1, 7)),
                (&[1, 1], &[2, 0], q(1, 7)),
            ],
        );
        let jet = PotentialJet::new(phi, 4).unwrap();
        let curv = jet.curvature_at_origin().unwrap();
        let a = a_series(&jet, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let c = a
                    .coeff(2)
                    .coeff(&MultiIndex::unit(2, i), &MultiIndex::unit(2, j));
                assert_eq!(c, -curv.ricci(i, j).clone(), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn a_series_needs_enough_jet() {
        assert!(matches!(
            a_series(&cp1(4), 4),
            Err(Error::InsufficientJet {
                needed: 6,
                available: 4,
                ..
            })
        ));
    }

    #[test]
    fn float_a_series_agrees_with_exact() {
        let exact = a_series(&cp1(8), 6).unwrap().to_scalar::<f64>();
        let jet = PotentialJet::new(cp1(8).phi().to_scalar::<f64>(), 8).unwrap();
        let float = a_series(&jet, 6).unwrap();
        for m in 0..=6 {
            for (mono, c) in exact.coeff(m).terms() {
                let d = float.coeff(m).get(mono).cloned().unwrap_or_default();
                assert!((d - c).norm() < 1e-12);
            }
        }
    }
}
