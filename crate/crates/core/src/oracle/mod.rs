//! Independent ground truth: Gaussian moments by quadrature and exact model
//! kernels.
//!
//! Nothing here uses the closed-form moment formula of [`crate::solver`].

pub mod model;
pub mod quadrature;

use num_complex::Complex;

use crate::double_double::DoubleDouble;
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::{complex_exp, RealFloat};

pub use model::{Model, ModelKernel};
pub use quadrature::{composite_legendre, gauss_hermite, gauss_legendre, Rule};

/// Node count used when none is given.
pub const DEFAULT_NODES: usize = 40;

/// Tensor-product Gauss-Hermite rule, `nodes_per_real_axis` nodes on each of
/// the `2n` real axes.
///
/// Weights are normalized by `1/pi` per complex dimension, so that
/// `int e^{-|v|^2} dV = 1`.
#[derive(Clone, Debug)]
pub struct QuadratureRule<F> {
    nodes_per_real_axis: usize,
    dim: usize,
    rule: Rule<F>,
}

impl<F: RealFloat> QuadratureRule<F> {
    pub fn new(dim: usize, nodes_per_real_axis: usize) -> Result<Self> {
        crate::multiindex::check_dim(dim)?;
        if nodes_per_real_axis == 0 {
            return Err(Error::domain("quadrature needs at least one node"));
        }
        if nodes_per_real_axis > 400 {
            return Err(Error::Resource(format!(
                "{nodes_per_real_axis} nodes per axis exceeds the cap of 400"
            )));
        }
        Ok(QuadratureRule {
            nodes_per_real_axis,
            dim,
            rule: gauss_hermite(nodes_per_real_axis),
        })
    }

    pub fn nodes_per_real_axis(&self) -> usize {
        self.nodes_per_real_axis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rule(&self) -> &Rule<F> {
        &self.rule
    }

    /// One-variable moments `M[a][b] = int vbar^a v^b e^{w vbar - |v|^2} dV`
    /// for `a <= max_a`, `b <= max_b`, from a single pass over the nodes.
    pub fn moment_table(&self, w: Complex<F>, max_a: u32, max_b: u32) -> Vec<Vec<Complex<F>>> {
        let (na, nb) = (max_a as usize + 1, max_b as usize + 1);
        let mut table = vec![vec![Complex::new(F::zero(), F::zero()); nb]; na];
        let inv_pi = F::one() / F::pi();
        let r = &self.rule;
        let mut vb_pow = vec![Complex::new(F::zero(), F::zero()); na];
        let mut v_pow = vec![Complex::new(F::zero(), F::zero()); nb];
        for (x, wx) in r.nodes.iter().zip(&r.weights) {
            for (y, wy) in r.nodes.iter().zip(&r.weights) {
                let v = Complex::new(*x, *y);
                let vb = v.conj();
                let weight = *wx * *wy * inv_pi;
                let e = complex_exp(w * vb);
                let e = Complex::new(e.re * weight, e.im * weight);
                vb_pow[0] = e;
                for a in 1..na {
                    vb_pow[a] = vb_pow[a - 1] * vb;
                }
                v_pow[0] = Complex::new(F::one(), F::zero());
                for b in 1..nb {
                    v_pow[b] = v_pow[b - 1] * v;
                }
                for a in 0..na {
                    let row = &mut table[a];
                    for b in 0..nb {
                        row[b] += vb_pow[a] * v_pow[b];
                    }
                }
            }
        }
        table
    }

    /// `int vbar^p v^q e^{u.vbar - |v|^2} dV` as a product of one-variable moments.
    pub fn moment(&self, p: &MultiIndex, q: &MultiIndex, u: &[Complex<F>]) -> Result<Complex<F>> {
        self.check(p, q, u)?;
        let mut acc = Complex::new(F::one(), F::zero());
        for i in 0..self.dim {
            let t = self.moment_table(u[i], p.get(i), q.get(i));
            acc *= t[p.get(i) as usize][q.get(i) as usize];
        }
        Ok(acc)
    }

    fn check(&self, p: &MultiIndex, q: &MultiIndex, u: &[Complex<F>]) -> Result<()> {
        for found in [p.dim(), q.dim(), u.len()] {
            if found != self.dim {
                return Err(Error::Dimension {
                    expected: self.dim,
                    found,
                });
            }
        }
        Ok(())
    }

    /// Smallest node count the rule is trusted for: the polynomial degree
    /// per axis, plus the degree at which the Taylor tail of `e^{u.vbar}`
    /// falls below the working precision.
    pub fn required_nodes(p: &MultiIndex, q: &MultiIndex, u: &[Complex<F>]) -> usize {
        let umax = u
            .iter()
            .map(|z| crate::scalar::complex_abs(*z).to_f64())
            .fold(0.0, f64::max);
        let tol = F::epsilon();
        let mut term = 1.0f64;
        let mut m = 0usize;
        while term > tol && m < 10_000 {
            m += 1;
            term *= umax / m as f64;
            if umax == 0.0 {
                break;
            }
        }
        (p.norm() + q.norm()) as usize / 2 + m / 2 + 2
    }
}

/// Quadrature estimate with a flag raised when the node count is below
/// [`QuadratureRule::required_nodes`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub value: Complex<f64>,
    pub precision_warning: bool,
}

/// `int vbar^p v^q e^{u.vbar - |v|^2} dV` by double-double quadrature.
pub fn numeric_moment(
    p: &MultiIndex,
    q: &MultiIndex,
    u: &[Complex<f64>],
    nodes: usize,
) -> Result<MomentEstimate> {
    let rule = QuadratureRule::<DoubleDouble>::new(p.dim(), nodes)?;
    let ud: Vec<Complex<DoubleDouble>> = u.iter().map(|z| lift(*z)).collect();
    let v = rule.moment(p, q, &ud)?;
    Ok(MomentEstimate {
        value: Complex::new(v.re.to_f64(), v.im.to_f64()),
        precision_warning: nodes < QuadratureRule::<DoubleDouble>::required_nodes(p, q, &ud),
    })
}

/// `<v^q, e^{v.ubar}>` in the Bargmann-Fock space; reproduces `u^q`.
pub fn bargmann_fock_reproduce(
    q: &MultiIndex,
    u: &[Complex<f64>],
    nodes: usize,
) -> Result<MomentEstimate> {
    numeric_moment(&MultiIndex::zero(q.dim()), q, u, nodes)
}

pub(crate) fn lift(z: Complex<f64>) -> Complex<DoubleDouble> {
    Complex::new(DoubleDouble::from_f64(z.re), DoubleDouble::from_f64(z.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e).unwrap()
    }

    #[test]
    fn normalization_is_calibrated() {
        let m = numeric_moment(
            &mi(&[0]),
            &mi(&[0]),
            &[Complex::new(0.0, 0.0)],
            DEFAULT_NODES,
        )
        .unwrap();
        assert!((m.value - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!(!m.precision_warning);
    }

    #[test]
    fn moment_examples() {
        let u = [Complex::new(0.5, 0.0)];
        let m = numeric_moment(&mi(&[1]), &mi(&[2]), &u, DEFAULT_NODES).unwrap();
        assert!((m.value - Complex::new(1.0, 0.0)).norm() < 1e-10);

        for u in [Complex::new(0.3, -0.8), Complex::new(-1.0, 0.0)] {
            let m = numeric_moment(&mi(&[2]), &mi(&[1]), &[u], DEFAULT_NODES).unwrap();
            assert!(m.value.norm() < 1e-10);
        }
    }

    #[test]
    fn bargmann_fock_examples() {
        let one =
            bargmann_fock_reproduce(&mi(&[0]), &[Complex::new(0.3, 0.1)], DEFAULT_NODES).unwrap();
        assert!((one.value - Complex::new(1.0, 0.0)).norm() < 1e-12);

        let cube =
            bargmann_fock_reproduce(&mi(&[3]), &[Complex::new(0.5, 0.0)], DEFAULT_NODES).unwrap();
        assert!((cube.value - Complex::new(0.125, 0.0)).norm() < 1e-10);

        let u = [Complex::new(0.2, 0.0), Complex::new(0.0, 0.4)];
        let prod = bargmann_fock_reproduce(&mi(&[1, 1]), &u, DEFAULT_NODES).unwrap();
        assert!((prod.value - Complex::new(0.0, 0.08)).norm() < 1e-10);
    }

    #[test]
    fn small_rules_raise_the_warning() {
        let m = numeric_moment(&mi(&[6]), &mi(&[6]), &[Complex::new(0.9, 0.0)], 4).unwrap();
        assert!(m.precision_warning);
    }

    #[test]
    fn float_rule_agrees_with_double_double() {
        let f = QuadratureRule::<f64>::new(1, 30).unwrap();
        let d = QuadratureRule::<DoubleDouble>::new(1, 30).unwrap();
        let u = Complex::new(0.4, 0.2);
        let tf = f.moment_table(u, 3, 3);
        let td = d.moment_table(lift(u), 3, 3);
        for a in 0..4 {
            for b in 0..4 {
                let x = td[a][b];
                assert!((tf[a][b] - Complex::new(x.re.to_f64(), x.im.to_f64())).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        assert!(matches!(
            numeric_moment(&mi(&[0]), &mi(&[0, 0]), &[Complex::new(0.0, 0.0)], 10),
            Err(Error::Dimension { .. })
        ));
    }
}
