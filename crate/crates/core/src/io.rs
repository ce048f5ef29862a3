//! JSON documents for potential jets and coefficient reports.
//!
//! Rationals are written as `"num/den"` or `"num"` strings so that exact
//! values survive a round trip.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::polyring::{BidegreePolynomial, HalfPowerSeries, Monomial};
use crate::potential::{BochnerCheck, PotentialJet};

pub const SCHEMA_VERSION: u32 = 1;

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetTerm {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetDocument {
    pub schema_version: u32,
    pub dimension: usize,
    pub max_degree: u32,
    pub terms: Vec<JetTerm>,
}

fn index(dim: usize, e: &[u32], what: &str) -> Result<MultiIndex> {
    if e.len() != dim {
        return Err(Error::Validation {
            term: format!("{e:?}"),
            reason: format!("{what} exponent has length {}, dimension is {dim}", e.len()),
        });
    }
    MultiIndex::new(e)
}

impl JetDocument {
    /// Canonical document: terms in graded-lex order, zero coefficients omitted.
    pub fn from_jet(jet: &PotentialJet<BigRational>) -> Self {
        JetDocument {
            schema_version: SCHEMA_VERSION,
            dimension: jet.dim(),
            max_degree: jet.max_degree(),
            terms: jet
                .phi()
                .terms()
                .map(|(m, c)| JetTerm {
                    z: m.holo.entries().to_vec(),
                    zbar: m.anti.entries().to_vec(),
                    re: format_rational(&c.re),
                    im: format_rational(&c.im),
                })
                .collect(),
        }
    }

    pub fn to_jet(&self, check: BochnerCheck) -> Result<PotentialJet<BigRational>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        crate::multiindex::check_dim(self.dimension)?;
        let mut phi = BidegreePolynomial::zero(self.dimension);
        for t in &self.terms {
            let m = Monomial::new(
                index(self.dimension, &t.z, "z")?,
                index(self.dimension, &t.zbar, "zbar")?,
            )?;
            if phi.get(&m).is_some() {
                return Err(Error::Validation {
                    term: m.to_string(),
                    reason: "appears more than once".into(),
                });
            }
            let c = Complex::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            phi.insert_term(m, c)?;
        }
        PotentialJet::with_check(phi, self.max_degree, check)
    }
}

pub fn parse_jet(text: &str, check: BochnerCheck) -> Result<PotentialJet<BigRational>> {
    let doc: JetDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_jet(check)
}

pub fn jet_to_json(jet: &PotentialJet<BigRational>) -> String {
    serde_json::to_string_pretty(&JetDocument::from_jet(jet)).expect("jet documents serialize")
}

/// SHA-256 of the compact canonical serialization, in lowercase hex.
pub fn jet_fingerprint(jet: &PotentialJet<BigRational>) -> String {
    let canonical =
        serde_json::to_string(&JetDocument::from_jet(jet)).expect("jet documents serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientTerm {
    pub order: u32,
    pub u: Vec<u32>,
    pub vbar: Vec<u32>,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFlags {
    pub parity: bool,
    pub degree_bound: bool,
    pub hermitian: bool,
    pub reproducing_verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientReport {
    pub schema_version: u32,
    pub jet_fingerprint: String,
    pub order: u32,
    pub terms: Vec<CoefficientTerm>,
    pub flags: ReportFlags,
}

impl CoefficientReport {
    pub fn new(
        jet: &PotentialJet<BigRational>,
        c: &HalfPowerSeries<BigRational>,
        flags: ReportFlags,
    ) -> Self {
        let mut terms = Vec::new();
        for j in 0..=c.order() {
            for (m, x) in c.coeff(j).terms() {
                terms.push(CoefficientTerm {
                    order: j,
                    u: m.holo.entries().to_vec(),
                    vbar: m.anti.entries().to_vec(),
                    re: format_rational(&x.re),
                    im: format_rational(&x.im),
                });
            }
        }
        CoefficientReport {
            schema_version: SCHEMA_VERSION,
            jet_fingerprint: jet_fingerprint(jet),
            order: c.order(),
            terms,
            flags,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: CoefficientReport =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                r.schema_version
            )));
        }
        Ok(r)
    }

    /// Rebuilds the series; `dim` is taken from the jet the report belongs to.
    pub fn series(&self, dim: usize) -> Result<HalfPowerSeries<BigRational>> {
        let mut s = HalfPowerSeries::zero(dim, self.order);
        for t in &self.terms {
            if t.order > self.order {
                return Err(Error::Validation {
                    term: format!("order {}", t.order),
                    reason: format!("exceeds report order {}", self.order),
                });
            }
            let m = Monomial::new(index(dim, &t.u, "u")?, index(dim, &t.vbar, "vbar")?)?;
            let c = Complex::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            let mut p = s.coeff(t.order).clone();
            if p.get(&m).is_some() {
                return Err(Error::Validation {
                    term: m.to_string(),
                    reason: format!("appears more than once at order {}", t.order),
                });
            }
            p.insert_term(m, c)?;
            s.set(t.order, p)?;
        }
        Ok(s)
    }
}
