//! Multi-indices and the binomial identities the coefficient recursion rests on.
//!
//! A [`MultiIndex`] is a tuple of `n` nonnegative exponents with `1 <= n <= 4`.
//! Ordering conventions: `a.leq(b)` is the componentwise partial order, while
//! the `Ord` impl is the graded lexicographic total order used for canonical
//! term ordering.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    dim: u8,
    e: [u32; MAX_DIM],
}

impl MultiIndex {
    pub fn new(entries: &[u32]) -> Result<Self> {
        check_dim(entries.len())?;
        let mut e = [0; MAX_DIM];
        e[..entries.len()].copy_from_slice(entries);
        Ok(MultiIndex {
            dim: entries.len() as u8,
            e,
        })
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        MultiIndex {
            dim: dim as u8,
            e: [0; MAX_DIM],
        }
    }

    /// The unit index `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut m = Self::zero(dim);
        m.e[i] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn entries(&self) -> &[u32] {
        &self.e[..self.dim as usize]
    }

    pub fn get(&self, i: usize) -> u32 {
        self.entries()[i]
    }

    /// `|a| = sum a_i`
    pub fn norm(&self) -> u32 {
        self.entries().iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|&x| x == 0)
    }

    /// `a! = prod a_i!`
    pub fn factorial(&self) -> BigUint {
        self.entries()
            .iter()
            .fold(BigUint::one(), |acc, &x| acc * factorial(x))
    }

    pub fn binomial(&self, b: &MultiIndex) -> Result<BigUint> {
        same_dim(self, b)?;
        Ok(self
            .entries()
            .iter()
            .zip(b.entries())
            .fold(BigUint::one(), |acc, (&n, &k)| acc * binomial(n, k)))
    }

    /// Componentwise `a <= b`.
    pub fn leq(&self, b: &MultiIndex) -> Result<bool> {
        same_dim(self, b)?;
        Ok(self.leq_unchecked(b))
    }

    pub(crate) fn leq_unchecked(&self, b: &MultiIndex) -> bool {
        self.entries().iter().zip(b.entries()).all(|(x, y)| x <= y)
    }

    /// Strict componentwise order: `a <= b` and `a != b`.
    pub fn lt(&self, b: &MultiIndex) -> Result<bool> {
        Ok(self.leq(b)? && self != b)
    }

    pub fn checked_add(&self, b: &MultiIndex) -> Result<MultiIndex> {
        same_dim(self, b)?;
        Ok(self.add_unchecked(b))
    }

    pub(crate) fn add_unchecked(&self, b: &MultiIndex) -> MultiIndex {
        let mut out = *self;
        for i in 0..self.dim() {
            out.e[i] += b.e[i];
        }
        out
    }

    /// `a - b`, or `None` unless `b <= a`.
    pub fn checked_sub(&self, b: &MultiIndex) -> Option<MultiIndex> {
        if self.dim != b.dim {
            return None;
        }
        let mut out = *self;
        for i in 0..self.dim() {
            out.e[i] = self.e[i].checked_sub(b.e[i])?;
        }
        Some(out)
    }

    /// Falling factorial `a! / (a - b)!`, zero unless `b <= a`.
    pub fn falling(&self, b: &MultiIndex) -> BigUint {
        let mut acc = BigUint::one();
        for i in 0..self.dim() {
            let (n, k) = (self.e[i], b.e[i]);
            if k > n {
                return BigUint::zero();
            }
            for j in (n - k + 1)..=n {
                acc *= j;
            }
        }
        acc
    }

    /// All multi-indices `w` with `w <= self`, graded lexicographic order.
    pub fn below(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.dim())];
        for i in 0..self.dim() {
            let mut next = Vec::with_capacity(out.len() * (self.e[i] as usize + 1));
            for m in &out {
                for v in 0..=self.e[i] {
                    let mut w = *m;
                    w.e[i] = v;
                    next.push(w);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// All multi-indices of dimension `dim` with total degree exactly `degree`.
    pub fn of_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = MultiIndex::zero(dim);
        fill_degree(&mut cur, 0, degree, &mut out);
        out.sort();
        out
    }

    /// All multi-indices with total degree at most `max_degree`, graded order.
    pub fn up_to_degree(dim: usize, max_degree: u32) -> Vec<MultiIndex> {
        (0..=max_degree)
            .flat_map(|d| MultiIndex::of_degree(dim, d))
            .collect()
    }
}

fn fill_degree(cur: &mut MultiIndex, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let dim = cur.dim();
    if pos + 1 == dim {
        cur.e[pos] = remaining;
        out.push(*cur);
        return;
    }
    for v in 0..=remaining {
        cur.e[pos] = v;
        fill_degree(cur, pos + 1, remaining - v, out);
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.norm().cmp(&other.norm()))
            .then_with(|| other.entries().cmp(self.entries()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.entries().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

pub(crate) fn same_dim(a: &MultiIndex, b: &MultiIndex) -> Result<()> {
    if a.dim == b.dim {
        Ok(())
    } else {
        Err(Error::Dimension {
            expected: a.dim(),
            found: b.dim(),
        })
    }
}

pub fn factorial(n: u32) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn sign(norm: u32) -> BigInt {
    if norm.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Checks `sum_{w <= s} (-1)^{|w|} C(l, w) C(l - w, l - s) = 0` for every
/// nonzero `s <= l`.
pub fn verify_identity_a(l: &MultiIndex) -> bool {
    l.below()
        .into_iter()
        .filter(|s| !s.is_zero())
        .all(|s| identity_a_sum(l, &s).is_zero())
}

/// The alternating sum of identity A for a single `s <= l`.
pub fn identity_a_sum(l: &MultiIndex, s: &MultiIndex) -> BigInt {
    let l_minus_s = l.checked_sub(s).expect("s <= l");
    s.below()
        .into_iter()
        .map(|w| {
            let l_minus_w = l.checked_sub(&w).expect("w <= s <= l");
            let term = l.binomial(&w).unwrap() * l_minus_w.binomial(&l_minus_s).unwrap();
            sign(w.norm()) * BigInt::from(term)
        })
        .sum()
}

/// Checks `sum_{w <= eta} (-1)^{|w|+1} C(l, w) C(r + l - w, eta - w) = 0`.
///
/// Requires `r <= eta` with `r_i < eta_i` for some coordinate.
pub fn verify_identity_b(l: &MultiIndex, eta: &MultiIndex, r: &MultiIndex) -> Result<bool> {
    Ok(identity_b_sum(l, eta, r)?.is_zero())
}

pub fn identity_b_sum(l: &MultiIndex, eta: &MultiIndex, r: &MultiIndex) -> Result<BigInt> {
    same_dim(l, eta)?;
    same_dim(l, r)?;
    if !r.lt(eta)? {
        return Err(Error::domain(format!(
            "identity B needs r < eta componentwise with r != eta; got r = {r}, eta = {eta}"
        )));
    }
    let r_plus_l = r.add_unchecked(l);
    let mut total = BigInt::zero();
    for w in eta.below() {
        let upper = match r_plus_l.checked_sub(&w) {
            Some(x) => x,
            // C(negative, .) never arises: eta <= ... is not guaranteed, the
            // binomial of a negative top with a nonnegative bottom is taken as 0
            None => continue,
        };
        let lower = eta.checked_sub(&w).expect("w <= eta");
        let term = l.binomial(&w)? * upper.binomial(&lower)?;
        total += -sign(w.norm()) * BigInt::from(term);
    }
    Ok(total)
}
