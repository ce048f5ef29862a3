//! Finite-`k` evaluation of the truncated local kernel and residual scaling.
//!
//! In the rescaled variable `v = sqrt(k) z` the weight of the local inner
//! product is `e^{-|v|^2 - kR(v/sqrt k)} Omega(v/sqrt k) dV(v)`. The
//! reproducing residual of a test function `f = v^l` at `u` is
//!
//! ```text
//! | f(u) - int chi(|v| k^{eps - 1/4}) f(v) conj(e^{ubar.v} sum_j c_j(v, ubar) k^{-j/2}) weight |
//! ```
//!
//! divided by the local norm of `f`. Powers of `k^{-|l|/2}` cancel in the
//! ratio and are left out.

use num_complex::Complex;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::oracle::{composite_legendre, gauss_legendre, ModelKernel, Rule};
use crate::polyring::{BidegreePolynomial, HalfPowerSeries};
use crate::potential::PotentialJet;

type C64 = Complex<f64>;

pub const DEFAULT_EPSILON: f64 = 0.1;

/// Residuals at or below this are indistinguishable from rounding.
pub const RESIDUAL_FLOOR: f64 = 1e-9;

/// Radius beyond which the local integrals are cut.
const NORM_RADIUS_CAP: f64 = 12.0;

/// Smooth step: 1 on `[0, 1/2]`, 0 on `[1, inf)`, and
/// `g(1-t) / (g(1-t) + g(t))` with `g(s) = e^{-1/s}`, `t = 2y - 1` between.
pub fn chi_profile(y: f64) -> f64 {
    if y <= 0.5 {
        return 1.0;
    }
    if y >= 1.0 {
        return 0.0;
    }
    let t = 2.0 * y - 1.0;
    let g = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
    let a = g(1.0 - t);
    a / (a + g(t))
}

/// `chi(k^{1/4 + eps} x)`.
pub fn cutoff_chi(x: f64, k: f64, epsilon: f64) -> f64 {
    chi_profile(k.powf(0.25 + epsilon) * x)
}

/// `k^n e^{u.vbar} sum_{j <= order} c_j(u, vbar) k^{-j/2}`.
pub fn eval_local_kernel(
    c: &HalfPowerSeries<f64>,
    order: u32,
    k: f64,
    u: &[C64],
    v: &[C64],
) -> C64 {
    let n = c.dim();
    let vbar: Vec<C64> = v.iter().map(|z| z.conj()).collect();
    let uv: C64 = u.iter().zip(&vbar).map(|(a, b)| a * b).sum();
    let mut sum = C64::new(0.0, 0.0);
    let s = k.sqrt().recip();
    for j in (0..=order.min(c.order())).rev() {
        sum = sum * s + c.coeff(j).eval(u, &vbar);
    }
    uv.exp() * sum * k.powi(n as i32)
}

/// `e^{-kR(z)} Omega(z)` for a jet, evaluated in floating point.
pub struct LocalWeight {
    k: f64,
    remainder: BidegreePolynomial<f64>,
    hessian: Vec<Vec<BidegreePolynomial<f64>>>,
}

impl LocalWeight {
    pub fn new(jet: &PotentialJet<BigRational>, k: f64) -> Self {
        LocalWeight {
            k,
            remainder: jet.remainder().to_scalar(),
            hessian: jet
                .hessian()
                .iter()
                .map(|row| row.iter().map(|h| h.to_scalar()).collect())
                .collect(),
        }
    }

    /// `e^{-|v|^2 - kR(v/sqrt k)} Omega(v/sqrt k)`.
    pub fn at(&self, v: &[C64]) -> f64 {
        let s = self.k.sqrt().recip();
        let z: Vec<C64> = v.iter().map(|x| x * s).collect();
        let zbar: Vec<C64> = z.iter().map(|x| x.conj()).collect();
        let r = self.remainder.eval(&z, &zbar).re;
        let h: Vec<Vec<C64>> = self
            .hessian
            .iter()
            .map(|row| row.iter().map(|p| p.eval(&z, &zbar)).collect())
            .collect();
        let v2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        (-v2 - self.k * r).exp() * det(&h).re
    }
}

fn det(m: &[Vec<C64>]) -> C64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => {
            let mut acc = C64::new(0.0, 0.0);
            for col in 0..n {
                let minor: Vec<Vec<C64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, x)| *x)
                            .collect()
                    })
                    .collect();
                let term = m[0][col] * det(&minor);
                acc += if col % 2 == 0 { term } else { -term };
            }
            acc
        }
    }
}

/// Polar-product grid sizes per complex dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarGrid {
    pub radial_panels: usize,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl PolarGrid {
    pub fn for_dim(dim: usize) -> Self {
        if dim == 1 {
            PolarGrid {
                radial_panels: 16,
                radial_nodes: 16,
                angular_nodes: 128,
            }
        } else {
            PolarGrid {
                radial_panels: 6,
                radial_nodes: 8,
                angular_nodes: 32,
            }
        }
    }

    fn coarse(&self) -> Self {
        PolarGrid {
            radial_panels: self.radial_panels,
            radial_nodes: (self.radial_nodes * 2 / 3).max(1),
            angular_nodes: (self.angular_nodes * 3 / 4).max(1),
        }
    }

    /// Points and weights of `dV = r dr dtheta / pi` on the disk of radius `radius`.
    fn points(&self, radius: f64) -> Vec<(C64, f64)> {
        let base: Rule<f64> = gauss_legendre(self.radial_nodes);
        let radial = composite_legendre(&base, 0.0, radius, self.radial_panels);
        let dtheta = std::f64::consts::TAU / self.angular_nodes as f64;
        let mut out = Vec::with_capacity(radial.len() * self.angular_nodes);
        for (r, w) in radial.nodes.iter().zip(&radial.weights) {
            for j in 0..self.angular_nodes {
                let th = (j as f64 + 0.5) * dtheta;
                out.push((
                    C64::from_polar(*r, th),
                    w * r * dtheta / std::f64::consts::PI,
                ));
            }
        }
        out
    }
}

/// Cap on quadrature points per integral.
const MAX_POINTS: usize = 50_000_000;

/// Tensor product of one polar grid per complex dimension, with the weight
/// already folded in. Points are addressed by one grid index per dimension.
struct ProductRule {
    dim: usize,
    grid: Vec<C64>,
    /// Row-major over `grid.len()^dim` index tuples.
    weights: Vec<f64>,
}

impl ProductRule {
    fn build(
        dim: usize,
        g: PolarGrid,
        radius: f64,
        weight: impl Fn(&[C64]) -> f64,
    ) -> Result<Self> {
        let pts = g.points(radius);
        let total = pts.len().checked_pow(dim as u32).unwrap_or(usize::MAX);
        if dim > 2 || total > MAX_POINTS {
            return Err(Error::Resource(format!(
                "polar quadrature in dimension {dim} needs {total} points (cap {MAX_POINTS})"
            )));
        }
        let grid: Vec<C64> = pts.iter().map(|(v, _)| *v).collect();
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        let mut v = vec![C64::new(0.0, 0.0); dim];
        for flat in 0..total {
            let mut rest = flat;
            let mut w = 1.0;
            for d in (0..dim).rev() {
                idx[d] = rest % grid.len();
                rest /= grid.len();
                v[d] = grid[idx[d]];
                w *= pts[idx[d]].1;
            }
            weights.push(w * weight(&v));
        }
        Ok(ProductRule { dim, grid, weights })
    }

    /// `sum_points weight * f(index tuple)`, skipping zero weights.
    fn sum<T: std::ops::AddAssign + Default + std::ops::Mul<f64, Output = T>>(
        &self,
        mut f: impl FnMut(&[usize]) -> T,
    ) -> T {
        let len = self.grid.len();
        let mut idx = vec![0usize; self.dim];
        let mut acc = T::default();
        for (flat, w) in self.weights.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let mut rest = flat;
            for d in (0..self.dim).rev() {
                idx[d] = rest % len;
                rest /= len;
            }
            acc += f(&idx) * *w;
        }
        acc
    }

    /// `powers[i][e] = grid[i]^e` for `e <= max`.
    fn powers(&self, max: u32) -> Vec<Vec<C64>> {
        self.grid
            .iter()
            .map(|x| {
                let mut row = Vec::with_capacity(max as usize + 1);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..=max {
                    row.push(acc);
                    acc *= x;
                }
                row
            })
            .collect()
    }
}

/// One residual evaluation with its diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub residual: f64,
    /// Local norm of the test monomial.
    pub norm: f64,
    /// Difference between the main and a coarser rule, relative to `norm`.
    pub quadrature_error: f64,
}

fn monomial(v: &[C64], l: &MultiIndex) -> C64 {
    v.iter()
        .zip(l.entries())
        .fold(C64::new(1.0, 0.0), |acc, (x, e)| acc * x.powu(*e))
}

/// `sum_j k^{-j/2} c_j(v, ubar)` collapsed to a polynomial in `v` alone.
fn collapse(c: &HalfPowerSeries<f64>, order: u32, k: f64, u: &[C64]) -> Vec<(MultiIndex, C64)> {
    let ubar: Vec<C64> = u.iter().map(|z| z.conj()).collect();
    let mut acc: std::collections::BTreeMap<MultiIndex, C64> = Default::default();
    for j in 0..=order.min(c.order()) {
        let s = k.powf(-(j as f64) / 2.0);
        for (m, coef) in c.coeff(j).terms() {
            let mut x = coef * s;
            for (i, ub) in ubar.iter().enumerate() {
                x *= ub.powu(m.anti.get(i));
            }
            *acc.entry(m.holo).or_insert(C64::new(0.0, 0.0)) += x;
        }
    }
    acc.into_iter().collect()
}

/// Quadrature rules for one `(jet, k, epsilon)`, reused across test
/// monomials, sample points and coefficient series.
pub struct ResidualIntegrator {
    dim: usize,
    k: f64,
    main: ProductRule,
    coarse: ProductRule,
    norm: ProductRule,
}

impl ResidualIntegrator {
    pub fn new(jet: &PotentialJet<BigRational>, k: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.25) {
            return Err(Error::domain(format!(
                "epsilon must lie in (0, 1/4), got {epsilon}"
            )));
        }
        if k < 1.0 {
            return Err(Error::domain(format!(
                "tensor power must be at least 1, got {k}"
            )));
        }
        let n = jet.dim();
        let weight = LocalWeight::new(jet, k);
        let scale = k.powf(epsilon - 0.25);
        // past the cap e^{-|v|^2} is below 1e-60 and only wastes nodes
        let cut_radius = scale.recip().min(NORM_RADIUS_CAP);
        let cut = |v: &[C64]| {
            let rho = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let chi = chi_profile(rho * scale);
            if chi == 0.0 {
                0.0
            } else {
                chi * weight.at(v)
            }
        };
        let grid = PolarGrid::for_dim(n);
        let main = ProductRule::build(n, grid, cut_radius, cut)?;
        let coarse = ProductRule::build(n, grid.coarse(), cut_radius, cut)?;
        let norm_radius = (0.5 * k.sqrt()).min(NORM_RADIUS_CAP);
        let norm = ProductRule::build(n, grid, norm_radius, |v| weight.at(v))?;
        Ok(ResidualIntegrator {
            dim: n,
            k,
            main,
            coarse,
            norm,
        })
    }

    fn pairing(
        &self,
        rule: &ProductRule,
        kernel: &[(MultiIndex, C64)],
        l: &MultiIndex,
        ubar: &[C64],
    ) -> C64 {
        let max = kernel
            .iter()
            .flat_map(|(p, _)| p.entries().iter().copied())
            .chain(l.entries().iter().copied())
            .max()
            .unwrap_or(0);
        let pow = rule.powers(max);
        let exps: Vec<Vec<C64>> = ubar
            .iter()
            .map(|ub| rule.grid.iter().map(|x| (ub * x).exp()).collect())
            .collect();
        rule.sum(|idx| {
            let mut e = C64::new(1.0, 0.0);
            let mut f = C64::new(1.0, 0.0);
            for (d, &i) in idx.iter().enumerate() {
                e *= exps[d][i];
                f *= pow[i][l.get(d) as usize];
            }
            let poly: C64 = kernel
                .iter()
                .map(|(p, c)| {
                    idx.iter()
                        .enumerate()
                        .fold(*c, |acc, (d, &i)| acc * pow[i][p.get(d) as usize])
                })
                .sum();
            f * (e * poly).conj()
        })
    }

    /// Relative residual of the reproducing identity for `f = v^l` at `u`.
    pub fn residual(
        &self,
        c: &HalfPowerSeries<f64>,
        order: u32,
        l: &MultiIndex,
        u: &[C64],
    ) -> Result<Residual> {
        let n = self.dim;
        if c.dim() != n || l.dim() != n || u.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: if c.dim() != n {
                    c.dim()
                } else if l.dim() != n {
                    l.dim()
                } else {
                    u.len()
                },
            });
        }
        let k = self.k;
        let kernel = collapse(c, order, k, u);
        let ubar: Vec<C64> = u.iter().map(|z| z.conj()).collect();
        let main = self.pairing(&self.main, &kernel, l, &ubar);
        let coarse = self.pairing(&self.coarse, &kernel, l, &ubar);
        let pow = self
            .norm
            .powers(l.entries().iter().copied().max().unwrap_or(0));
        let norm2: f64 = self.norm.sum(|idx| {
            idx.iter()
                .enumerate()
                .map(|(d, &i)| pow[i][l.get(d) as usize].norm_sqr())
                .product::<f64>()
        });
        if norm2.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
            || !main.re.is_finite()
            || !main.im.is_finite()
        {
            return Err(Error::Resource(format!(
                "residual quadrature failed at k = {k}, l = {l}: integral {main}, norm^2 {norm2}"
            )));
        }
        let norm = norm2.sqrt();
        let target = monomial(u, l);
        let quadrature_error = (main - coarse).norm() / norm;
        if quadrature_error > 1e-3 {
            return Err(Error::Resource(format!(
                "residual quadrature did not converge at k = {k}, l = {l}: main and coarse rules differ by {quadrature_error:e}"
            )));
        }
        Ok(Residual {
            residual: (target - main).norm() / norm,
            norm,
            quadrature_error,
        })
    }
}

/// Relative residual of the reproducing identity for `f = v^l` at `u`.
pub fn reproducing_residual(
    jet: &PotentialJet<BigRational>,
    c: &HalfPowerSeries<f64>,
    order: u32,
    k: f64,
    l: &MultiIndex,
    u: &[C64],
    epsilon: f64,
) -> Result<Residual> {
    let n = jet.dim();
    for found in [c.dim(), l.dim(), u.len()] {
        if found != n {
            return Err(Error::Dimension { expected: n, found });
        }
    }
    ResidualIntegrator::new(jet, k, epsilon)?.residual(c, order, l, u)
}

/// Gaussian mass outside the region where the cutoff is 1, `e^{-h^2}` with
/// `h = k^{1/4 - eps} / 2`. Residuals below this measure the cutoff rather
/// than the expansion.
pub fn cutoff_tail(k: f64, epsilon: f64) -> f64 {
    let h = 0.5 * k.powf(0.25 - epsilon);
    (-h * h).exp()
}

/// Least-squares slope of `ln r` against `ln k`.
pub fn scaling_slope(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 4 {
        return Err(Error::domain(format!(
            "a slope fit needs at least 4 points, got {}",
            pairs.len()
        )));
    }
    if let Some((k, r)) = pairs
        .iter()
        .find(|(k, r)| r.is_nan() || k.is_nan() || *r <= 0.0 || *k <= 0.0)
    {
        return Err(Error::domain(format!(
            "nonpositive value in fit: k = {k}, residual = {r}"
        )));
    }
    let m = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|(k, _)| k.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|(_, r)| r.ln()).collect();
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("all k values coincide"));
    }
    Ok(sxy / sxx)
}

/// `points` integers spaced geometrically from `k_min` to `k_max`, inclusive.
pub fn geometric_grid(k_min: u32, k_max: u32, points: usize) -> Result<Vec<u32>> {
    if points < 4 {
        return Err(Error::domain(format!(
            "at least 4 grid points are required, got {points}"
        )));
    }
    if k_min < 4 || k_max <= k_min {
        return Err(Error::domain(format!(
            "need 4 <= k_min < k_max, got {k_min} and {k_max}"
        )));
    }
    let ratio = (k_max as f64 / k_min as f64).powf(1.0 / (points - 1) as f64);
    let grid: Vec<u32> = (0..points)
        .map(|i| (k_min as f64 * ratio.powi(i as i32)).round() as u32)
        .collect();
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!(
            "{points} points do not fit strictly between {k_min} and {k_max}"
        )));
    }
    Ok(grid)
}

/// Parameters of a residual scaling experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConfig {
    pub epsilon: f64,
    pub k_grid: Vec<u32>,
    pub order: u32,
    pub monomials: Vec<MultiIndex>,
    pub u_samples: Vec<Vec<C64>>,
}

impl ScalingConfig {
    /// Test monomials up to degree 2 and a few points with `|u| <= 1`.
    pub fn standard(dim: usize, order: u32, epsilon: f64, k_grid: Vec<u32>) -> Self {
        let monomials = MultiIndex::up_to_degree(dim, 2);
        let mut u_samples = vec![vec![C64::new(0.0, 0.0); dim]];
        for (r, th) in [(0.5, 0.3), (1.0, 2.0)] {
            u_samples.push(
                (0..dim)
                    .map(|i| C64::from_polar(r / (dim as f64).sqrt(), th + i as f64))
                    .collect(),
            );
        }
        ScalingConfig {
            epsilon,
            k_grid,
            order,
            monomials,
            u_samples,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.25) {
            return Err(Error::domain(format!(
                "epsilon must lie in (0, 1/4), got {}",
                self.epsilon
            )));
        }
        if self.k_grid.len() < 4 {
            return Err(Error::domain("the k grid needs at least 4 points"));
        }
        if self.k_grid.iter().any(|&k| k < 4) || self.k_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(
                "the k grid must be strictly increasing with k >= 4",
            ));
        }
        for u in &self.u_samples {
            let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1.0 + 1e-12 {
                return Err(Error::domain(format!("sample point with |u| = {norm} > 1")));
            }
        }
        Ok(())
    }
}

/// One CSV row of a scaling experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub k: u32,
    pub order: u32,
    pub l: MultiIndex,
    pub u: Vec<C64>,
    pub residual: f64,
    pub norm: f64,
}

/// Fitted slope with a flag for residuals already at the rounding floor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    /// `None` when the residuals are too small to fit.
    pub slope: Option<f64>,
    pub floor_limited: bool,
}

pub fn fit_slope(pairs: &[(f64, f64)]) -> Result<SlopeFit> {
    let floor_limited = pairs.iter().all(|(_, r)| *r <= RESIDUAL_FLOOR);
    let slope = if pairs.iter().all(|(_, r)| *r > 0.0) {
        Some(scaling_slope(pairs)?)
    } else if floor_limited {
        None
    } else {
        return Err(Error::domain("zero residual in a non-floor-limited fit"));
    };
    Ok(SlopeFit {
        slope,
        floor_limited,
    })
}

/// `(k, residual)` pairs for a slope fit.
pub type ScalingPairs = Vec<(f64, f64)>;

/// Runs the residual experiment; returns all rows and the per-`k` maximum.
pub fn run_residual_scaling(
    jet: &PotentialJet<BigRational>,
    c: &HalfPowerSeries<f64>,
    config: &ScalingConfig,
) -> Result<(Vec<ScalingRow>, ScalingPairs)> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for &k in &config.k_grid {
        let integrator = ResidualIntegrator::new(jet, k as f64, config.epsilon)?;
        let mut worst = 0.0f64;
        for l in &config.monomials {
            for u in &config.u_samples {
                let r = integrator.residual(c, config.order, l, u)?;
                worst = worst.max(r.residual);
                rows.push(ScalingRow {
                    k,
                    order: config.order,
                    l: *l,
                    u: u.clone(),
                    residual: r.residual,
                    norm: r.norm,
                });
            }
        }
        maxima.push((k as f64, worst));
    }
    Ok((rows, maxima))
}

/// Sample points of the closed unit disk: the origin and two rings.
pub fn unit_disk_samples() -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0)];
    for r in [0.5, 1.0] {
        for j in 0..6 {
            out.push(C64::from_polar(
                r,
                0.2 + j as f64 * std::f64::consts::TAU / 6.0,
            ));
        }
    }
    out
}

/// Exact `CP^1` kernel values at `(u/sqrt k, v/sqrt k)` for all sample pairs,
/// kept so that many candidate series can be compared against one oracle run.
///
/// The affine chart coordinate of `CP^1` is already a Böchner coordinate at
/// the origin, and both kernels are written in the frame with fiber metric
/// `e^{-k phi}`, so no change of frame is needed.
#[derive(Clone, Debug)]
pub struct KernelReference {
    k: u32,
    samples: Vec<C64>,
    values: Vec<C64>,
}

impl KernelReference {
    pub fn cp1(k: u32, samples: &[C64]) -> Result<Self> {
        Self::from_oracle(&ModelKernel::cp1(k)?, samples)
    }

    pub fn from_oracle(oracle: &ModelKernel, samples: &[C64]) -> Result<Self> {
        let k = oracle.tensor_power();
        let s = (k as f64).sqrt().recip();
        let mut values = Vec::with_capacity(samples.len() * samples.len());
        for u in samples {
            for v in samples {
                values.push(oracle.kernel(&[u * s], &[v * s])?);
            }
        }
        Ok(KernelReference {
            k,
            samples: samples.to_vec(),
            values,
        })
    }

    pub fn tensor_power(&self) -> u32 {
        self.k
    }

    /// `(u, v, |K - K_loc|, |K|)` for every sample pair.
    pub fn pair_errors(
        &self,
        c: &HalfPowerSeries<f64>,
        order: u32,
    ) -> Result<Vec<(C64, C64, f64, f64)>> {
        if c.dim() != 1 {
            return Err(Error::Dimension {
                expected: 1,
                found: c.dim(),
            });
        }
        let k = self.k as f64;
        let mut out = Vec::with_capacity(self.values.len());
        let mut it = self.values.iter();
        for u in &self.samples {
            for v in &self.samples {
                let exact = it.next().expect("one value per pair");
                let local = eval_local_kernel(c, order, k, &[*u], &[*v]);
                out.push((*u, *v, (exact - local).norm(), exact.norm()));
            }
        }
        Ok(out)
    }

    /// `max |K - K_loc|` over all sample pairs.
    pub fn error(&self, c: &HalfPowerSeries<f64>, order: u32) -> Result<f64> {
        if c.dim() != 1 {
            return Err(Error::Dimension {
                expected: 1,
                found: c.dim(),
            });
        }
        let k = self.k as f64;
        let mut worst = 0.0f64;
        let mut it = self.values.iter();
        for u in &self.samples {
            for v in &self.samples {
                let exact = it.next().expect("one value per pair");
                let local = eval_local_kernel(c, order, k, &[*u], &[*v]);
                worst = worst.max((exact - local).norm());
            }
        }
        Ok(worst)
    }
}

/// `max |K(u/sqrt k, v/sqrt k) - K_loc(u/sqrt k, v/sqrt k)|` over sample
/// pairs, against a `CP^1` oracle.
pub fn cp1_kernel_error(
    oracle: &ModelKernel,
    c: &HalfPowerSeries<f64>,
    order: u32,
    samples: &[C64],
) -> Result<f64> {
    KernelReference::from_oracle(oracle, samples)?.error(c, order)
}
