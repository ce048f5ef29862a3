//! Near-diagonal Bergman kernel expansion coefficients.
//!
//! Starting from the Taylor jet of a Kähler potential `phi = |z|^2 + R` in
//! Böchner coordinates, the crate computes the half-power series
//! `a = e^{-kR(v/sqrt k)} Omega(v/sqrt k)` and solves the perturbed
//! Bargmann-Fock reproducing identity for the correction coefficients
//! `c_j(u, vbar)` of
//!
//! ```text
//! K(u/sqrt k, v/sqrt k) = k^n e^{u.vbar} sum_j c_j(u, vbar) k^{-j/2}
//! ```
//!
//! All symbolic work is exact over Gaussian rationals. The [`oracle`] and
//! [`numeric`] modules provide floating-point ground truth: Gaussian moment
//! quadrature, the Fubini-Study kernel on CP^1, and residual scaling fits.
//!
//! The core types are generic over a real scalar field (see [`scalar::Real`]);
//! the aliases below fix the common instantiations.

pub mod double_double;
pub mod error;
pub mod expansion;
pub mod io;
pub mod multiindex;
pub mod numeric;
pub mod oracle;
pub mod polyring;
pub mod potential;
pub mod scalar;
pub mod solver;

pub use double_double::DoubleDouble;
pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use polyring::{BidegreePolynomial, HalfPowerSeries, Monomial};
pub use potential::{CurvatureData, PotentialJet};
pub use scalar::{Real, RealFloat};

pub use num_complex::Complex;
pub use num_rational::BigRational;

/// Exact Gaussian rational.
pub type ComplexRational = Complex<BigRational>;
pub type ExactPolynomial = BidegreePolynomial<BigRational>;
pub type ExactSeries = HalfPowerSeries<BigRational>;
pub type ExactJet = PotentialJet<BigRational>;
pub type FloatPolynomial = BidegreePolynomial<f64>;
pub type FloatSeries = HalfPowerSeries<f64>;
