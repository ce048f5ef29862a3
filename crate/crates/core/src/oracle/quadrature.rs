//! Gauss-Hermite and Gauss-Legendre rules in any [`RealFloat`] precision.
//!
//! Nodes are first located in `f64` by Newton's method from the usual
//! asymptotic guesses, then polished by Newton steps in the target precision.

use crate::scalar::RealFloat;

/// Nodes and weights of a one-dimensional rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule<F> {
    pub nodes: Vec<F>,
    pub weights: Vec<F>,
}

impl<F: RealFloat> Rule<F> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Orthonormal Hermite recurrence: returns `(p_n(x), p_{n-1}(x))`.
fn hermite<F: RealFloat>(n: usize, x: F) -> (F, F) {
    let mut p1 = F::one() / F::pi().sqrt().sqrt();
    let mut p2 = F::zero();
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = F::from_f64(j as f64);
        p1 = x * (F::from_f64(2.0) / jf).sqrt() * p2 - ((jf - F::one()) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// `q`-point rule for `int f(x) e^{-x^2} dx` over the real line.
pub fn gauss_hermite<F: RealFloat>(q: usize) -> Rule<F> {
    assert!(q >= 1, "a rule needs at least one node");
    let nf = q as f64;
    let mut guesses = vec![0.0f64; q];
    let half = q.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * guesses[0],
            3 => 1.91 * z - 0.91 * guesses[1],
            _ => 2.0 * z - guesses[i - 2],
        };
        for _ in 0..100 {
            let (p1, p2) = hermite::<f64>(q, z);
            let dz = p1 / ((2.0 * nf).sqrt() * p2);
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        guesses[i] = z;
    }
    let mut nodes = vec![F::zero(); q];
    let mut weights = vec![F::zero(); q];
    let two_n = F::from_f64(2.0 * nf).sqrt();
    for i in 0..half {
        let mut x = F::from_f64(guesses[i]);
        for _ in 0..3 {
            let (p1, p2) = hermite(q, x);
            x -= p1 / (two_n * p2);
        }
        let (_, p2) = hermite(q, x);
        let pp = two_n * p2;
        let w = F::from_f64(2.0) / (pp * pp);
        nodes[i] = x;
        nodes[q - 1 - i] = -x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        // the middle node is exactly zero
        nodes[q / 2] = F::zero();
    }
    Rule { nodes, weights }
}

/// Legendre recurrence: returns `(P_n(x), P_{n-1}(x))`.
fn legendre<F: RealFloat>(n: usize, x: F) -> (F, F) {
    let mut p1 = F::one();
    let mut p2 = F::zero();
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = F::from_f64(j as f64);
        p1 = ((F::from_f64(2.0) * jf - F::one()) * x * p2 - (jf - F::one()) * p3) / jf;
    }
    (p1, p2)
}

/// `q`-point rule for `int f(x) dx` over `[-1, 1]`.
pub fn gauss_legendre<F: RealFloat>(q: usize) -> Rule<F> {
    assert!(q >= 1, "a rule needs at least one node");
    let nf = q as f64;
    let half = q.div_ceil(2);
    let mut nodes = vec![F::zero(); q];
    let mut weights = vec![F::zero(); q];
    let n = F::from_f64(nf);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p1, p2) = legendre::<f64>(q, z);
            let pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let mut x = F::from_f64(z);
        for _ in 0..3 {
            let (p1, p2) = legendre(q, x);
            let pp = n * (x * p1 - p2) / (x * x - F::one());
            x -= p1 / pp;
        }
        let (p1, p2) = legendre(q, x);
        let pp = n * (x * p1 - p2) / (x * x - F::one());
        let w = F::from_f64(2.0) / ((F::one() - x * x) * pp * pp);
        nodes[i] = x;
        nodes[q - 1 - i] = -x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = F::zero();
    }
    Rule { nodes, weights }
}

/// Gauss-Legendre rule mapped to `panels` equal panels of `[a, b]`.
pub fn composite_legendre<F: RealFloat>(base: &Rule<F>, a: F, b: F, panels: usize) -> Rule<F> {
    let width = (b - a) / F::from_f64(panels as f64);
    let half = width / F::from_f64(2.0);
    let mut nodes = Vec::with_capacity(panels * base.len());
    let mut weights = Vec::with_capacity(panels * base.len());
    for p in 0..panels {
        let mid = a + width * F::from_f64(p as f64) + half;
        for (x, w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + half * *x);
            weights.push(half * *w);
        }
    }
    Rule { nodes, weights }
}
