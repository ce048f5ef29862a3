//! Exact Bergman kernels of two model spaces.
//!
//! * Flat `C^n` with weight `e^{-k|z|^2}`: `K(z, w) = k^n e^{k z.wbar}`.
//! * `CP^1` with `phi = log(1 + |z|^2)` in the affine chart, weight
//!   `e^{-k phi}` against `Omega dV`, `Omega = (1 + |z|^2)^{-2}`. The sections
//!   `z^a`, `0 <= a <= k`, are orthogonal and
//!   `K(z, w) = sum_a z^a wbar^a / ||z^a||^2`.
//!
//! The `CP^1` norms are integrated numerically in double-double precision.
//! With `s = |z|^2 / (1 + |z|^2)` they become `int_0^1 s^a (1-s)^{k-a} ds`,
//! which is evaluated in log space around its peak at `s = a/k`.

use num_complex::Complex;

use crate::double_double::DoubleDouble as DD;
use crate::error::{Error, Result};
use crate::oracle::quadrature::{composite_legendre, gauss_legendre, Rule};
use crate::scalar::RealFloat;

/// Largest tensor power the `CP^1` oracle accepts.
pub const MAX_TENSOR_POWER: u32 = 10_000;

/// Terms below `e^{-LOG_CUTOFF}` relative to the peak are dropped.
const LOG_CUTOFF: f64 = 80.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    FlatBargmannFock { dim: usize },
    Cp1FubiniStudy,
}

#[derive(Clone, Debug)]
pub struct ModelKernel {
    model: Model,
    k: u32,
    /// `ln ||z^a||^2` for `a = 0..=k`; empty for the flat model.
    log_norms: Vec<DD>,
}

impl ModelKernel {
    pub fn flat(dim: usize, k: u32) -> Result<Self> {
        crate::multiindex::check_dim(dim)?;
        if k == 0 {
            return Err(Error::domain("tensor power must be at least 1"));
        }
        Ok(ModelKernel {
            model: Model::FlatBargmannFock { dim },
            k,
            log_norms: Vec::new(),
        })
    }

    pub fn cp1(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("tensor power must be at least 1"));
        }
        if k > MAX_TENSOR_POWER {
            return Err(Error::Resource(format!(
                "CP^1 oracle limited to k <= {MAX_TENSOR_POWER}, got {k}"
            )));
        }
        let base = gauss_legendre::<DD>(24);
        let mut log_norms = vec![DD::ZERO; k as usize + 1];
        for a in 0..=k / 2 {
            let v = log_norm(k, a, &base)?;
            log_norms[a as usize] = v;
            // s -> 1 - s swaps a and k - a
            log_norms[(k - a) as usize] = v;
        }
        Ok(ModelKernel {
            model: Model::Cp1FubiniStudy,
            k,
            log_norms,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn tensor_power(&self) -> u32 {
        self.k
    }

    /// Number of basis sections: `k + 1` for `CP^1`, none for the flat model.
    pub fn basis_len(&self) -> usize {
        self.log_norms.len()
    }

    /// `ln ||z^a||^2` for every basis section.
    pub fn log_basis_norms(&self) -> &[DD] {
        &self.log_norms
    }

    /// `ln K(z, w)` as a log-magnitude and a unimodular-ish factor, for `CP^1`.
    fn cp1_log_kernel(&self, x: Complex<DD>) -> (DD, Complex<DD>) {
        let r2 = x.re * x.re + x.im * x.im;
        if r2 == DD::ZERO {
            return (-self.log_norms[0], Complex::new(DD::ONE, DD::ZERO));
        }
        let r = r2.sqrt();
        let ln_r = r.ln();
        let y = Complex::new(x.re / r, x.im / r);
        let t: Vec<DD> = self
            .log_norms
            .iter()
            .enumerate()
            .map(|(a, ln_n)| ln_r * DD::from_f64(a as f64) - *ln_n)
            .collect();
        let m = t.iter().copied().fold(t[0], RealFloat::max);
        let mut phase = Complex::new(DD::ONE, DD::ZERO);
        let mut sum = Complex::new(DD::ZERO, DD::ZERO);
        for ta in &t {
            let d = *ta - m;
            if d.to_f64() > -LOG_CUTOFF {
                let mag = d.exp();
                sum += Complex::new(phase.re * mag, phase.im * mag);
            }
            phase *= y;
        }
        (m, sum)
    }

    /// `K(z, w)` in the frame where the fiber metric is `e^{-k phi}`.
    pub fn kernel(&self, z: &[Complex<f64>], w: &[Complex<f64>]) -> Result<Complex<f64>> {
        let k = self.k as f64;
        match self.model {
            Model::FlatBargmannFock { dim } => {
                check_len(dim, z.len())?;
                check_len(dim, w.len())?;
                let zw: Complex<f64> = z.iter().zip(w).map(|(a, b)| a * b.conj()).sum();
                Ok((zw * k).exp() * k.powi(dim as i32))
            }
            Model::Cp1FubiniStudy => {
                check_len(1, z.len())?;
                check_len(1, w.len())?;
                let x = super::lift(z[0]) * super::lift(w[0]).conj();
                let (m, s) = self.cp1_log_kernel(x);
                let scale = m.to_f64().exp();
                Ok(Complex::new(s.re.to_f64() * scale, s.im.to_f64() * scale))
            }
        }
    }

    /// `K(z, w)` in double-double, for `CP^1` arguments of modest size.
    pub fn kernel_dd(&self, z: Complex<DD>, w: Complex<DD>) -> Result<Complex<DD>> {
        if self.model != Model::Cp1FubiniStudy {
            return Err(Error::domain("kernel_dd is only provided for CP^1"));
        }
        let (m, s) = self.cp1_log_kernel(z * w.conj());
        let scale = m.exp();
        Ok(Complex::new(s.re * scale, s.im * scale))
    }

    /// Bergman function `B(z) = K(z, z) e^{-k phi(z)}`.
    pub fn bergman_function(&self, z: &[Complex<f64>]) -> Result<f64> {
        match self.model {
            Model::FlatBargmannFock { dim } => {
                check_len(dim, z.len())?;
                Ok((self.k as f64).powi(dim as i32))
            }
            Model::Cp1FubiniStudy => {
                check_len(1, z.len())?;
                let zd = super::lift(z[0]);
                let x = zd * zd.conj();
                let (m, s) = self.cp1_log_kernel(x);
                let phi = (DD::ONE + x.re).ln();
                let scale = (m - phi * DD::from_f64(self.k as f64)).exp();
                Ok((s.re * scale).to_f64())
            }
        }
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// `ln int_0^1 s^a (1-s)^{k-a} ds`.
fn log_norm(k: u32, a: u32, base: &Rule<DD>) -> Result<DD> {
    let (kf, af) = (k as f64, a as f64);
    let b = kf - af;
    let peak = af / kf;
    // log of the integrand relative to its peak value, f64 version for bracketing
    let rel64 = |s: f64| -> f64 {
        let mut v = 0.0;
        if a > 0 {
            v += af * (s / peak).ln();
        }
        if a < k {
            v += b * ((1.0 - s) / (1.0 - peak)).ln();
        }
        v
    };
    let lo = if a == 0 {
        0.0
    } else {
        bisect(|s| rel64(s) + LOG_CUTOFF, 0.0, peak)
    };
    let hi = if a == k {
        1.0
    } else {
        bisect(|s| rel64(s) + LOG_CUTOFF, 1.0, peak)
    };
    let (ad, bd) = (DD::from_f64(af), DD::from_f64(b));
    let peak_d = DD::from_f64(af) / DD::from_f64(kf);
    let one_minus_peak = DD::ONE - peak_d;
    let integrand = |s: DD| -> DD {
        let mut v = DD::ZERO;
        if a > 0 {
            v += ad * (s / peak_d).ln();
        }
        if a < k {
            v += bd * ((DD::ONE - s) / one_minus_peak).ln();
        }
        v.exp()
    };
    let integrate = |panels: usize| -> DD {
        let rule = composite_legendre(base, DD::from_f64(lo), DD::from_f64(hi), panels);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .fold(DD::ZERO, |acc, (s, w)| acc + *w * integrand(*s))
    };
    let mut panels = 4;
    let mut prev = integrate(panels);
    loop {
        panels *= 2;
        let next = integrate(panels);
        let rel = ((next - prev) / next).to_f64().abs();
        if rel < 1e-28 {
            let ln_peak = if a == 0 || a == k {
                DD::ZERO
            } else {
                ad * peak_d.ln() + bd * one_minus_peak.ln()
            };
            return Ok(ln_peak + next.ln());
        }
        if panels >= 1024 {
            return Err(Error::Resource(format!(
                "norm of z^{a} for k = {k} did not converge (relative change {rel:e})"
            )));
        }
        prev = next;
    }
}

/// Root of a monotone `f` between `outer` (where `f < 0`) and `inner` (`f > 0`).
fn bisect(f: impl Fn(f64) -> f64, outer: f64, inner: f64) -> f64 {
    let (mut out, mut inn) = (outer, inner);
    if f(out) >= 0.0 {
        return out;
    }
    for _ in 0..200 {
        let mid = 0.5 * (out + inn);
        if mid == out || mid == inn {
            break;
        }
        if f(mid) < 0.0 {
            out = mid;
        } else {
            inn = mid;
        }
    }
    out
}
