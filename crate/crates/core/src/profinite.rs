//! Exact arithmetic for the profinite metric on the integers.
//!
//! The norm of a non-zero integer `x` is `1/n` where `n` is the largest
//! integer such that `1, 2, ..., n` all divide `x`; the norm of zero is zero.
//! The closed ball of radius `1/n` around `x` is the arithmetic progression
//! `x + theta(n)Z` with `theta(n) = lcm(1..=n)`, and every ball (open or
//! closed) is such a progression. Nothing here touches floating point.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::par;
use crate::primes::{primes_up_to, PrimePowers};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfiniteError {
    #[error("theta is defined for n >= 1, got {0}")]
    ThetaDomain(u64),
    #[error("ball radius index must be >= 1, got {0}")]
    BallIndex(u64),
    #[error("radius must be a positive rational, got {0}")]
    NonPositiveRadius(String),
    #[error("cannot parse radius {0:?}; expected `p/q` or an integer")]
    RadiusSyntax(String),
    #[error("radius {0} is too small to realise as a progression")]
    RadiusTooSmall(String),
    #[error("progression modulus must be positive")]
    NonPositiveModulus,
}

/// `lcm(1, 2, ..., n)`.
pub fn theta(n: u64) -> Result<BigUint, ProfiniteError> {
    if n < 1 {
        return Err(ProfiniteError::ThetaDomain(n));
    }
    let mut acc = BigUint::one();
    for p in primes_up_to(n) {
        let mut q = p;
        while let Some(next) = q.checked_mul(p).filter(|&v| v <= n) {
            q = next;
        }
        acc *= q;
    }
    Ok(acc)
}

/// Value of the profinite norm: either zero or the reciprocal `1/n` of a
/// positive integer.
///
/// The ordering is the numeric ordering of the rational value, so
/// `Reciprocal(7) < Reciprocal(6)` and `Zero` is the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfiniteNorm {
    Zero,
    Reciprocal(u64),
}

impl ProfiniteNorm {
    pub fn is_zero(&self) -> bool {
        matches!(self, ProfiniteNorm::Zero)
    }

    pub fn to_rational(&self) -> BigRational {
        match *self {
            ProfiniteNorm::Zero => BigRational::zero(),
            ProfiniteNorm::Reciprocal(n) => BigRational::new(BigInt::one(), BigInt::from(n)),
        }
    }

    /// `self < r`, compared exactly.
    pub fn lt_radius(&self, r: &Radius) -> bool {
        self.to_rational() < r.0
    }

    /// `self <= r`, compared exactly.
    pub fn le_radius(&self, r: &Radius) -> bool {
        self.to_rational() <= r.0
    }

    /// Half of a non-zero norm value, as a radius.
    pub fn half(&self) -> Option<Radius> {
        match *self {
            ProfiniteNorm::Zero => None,
            ProfiniteNorm::Reciprocal(n) => Some(Radius::reciprocal(2 * n)),
        }
    }
}

impl Ord for ProfiniteNorm {
    fn cmp(&self, other: &Self) -> Ordering {
        use ProfiniteNorm::*;
        match (self, other) {
            (Zero, Zero) => Ordering::Equal,
            (Zero, Reciprocal(_)) => Ordering::Less,
            (Reciprocal(_), Zero) => Ordering::Greater,
            (Reciprocal(a), Reciprocal(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for ProfiniteNorm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ProfiniteNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfiniteNorm::Zero => write!(f, "0"),
            ProfiniteNorm::Reciprocal(1) => write!(f, "1"),
            ProfiniteNorm::Reciprocal(n) => write!(f, "1/{n}"),
        }
    }
}

/// Profinite norm of `x`.
///
/// `1..=n` all divide `x` iff every prime power `<= n` divides `x`, so the
/// answer is `1/(q - 1)` for the smallest prime power `q` not dividing `x`.
pub fn norm(x: &BigInt) -> ProfiniteNorm {
    if x.is_zero() {
        return ProfiniteNorm::Zero;
    }
    let magnitude = x.magnitude();
    for q in PrimePowers::new() {
        if !(magnitude % q).is_zero() {
            return ProfiniteNorm::Reciprocal(q - 1);
        }
    }
    unreachable!("prime powers are unbounded")
}

pub fn dist(x: &BigInt, y: &BigInt) -> ProfiniteNorm {
    norm(&(x - y))
}

/// A strictly positive rational radius, stored reduced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Radius(BigRational);

impl Radius {
    pub fn new(value: BigRational) -> Result<Self, ProfiniteError> {
        if !value.is_positive() {
            return Err(ProfiniteError::NonPositiveRadius(value.to_string()));
        }
        Ok(Radius(value))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self, ProfiniteError> {
        if denom == 0 {
            return Err(ProfiniteError::NonPositiveRadius(format!("{numer}/0")));
        }
        Radius::new(BigRational::new(numer.into(), denom.into()))
    }

    /// The radius `1/n`, `n >= 1`.
    pub fn reciprocal(n: u64) -> Self {
        assert!(n >= 1);
        Radius(BigRational::new(BigInt::one(), BigInt::from(n)))
    }

    pub fn reciprocal_big(n: &BigUint) -> Self {
        assert!(!n.is_zero());
        Radius(BigRational::new(
            BigInt::one(),
            BigInt::from_biguint(Sign::Plus, n.clone()),
        ))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// Smallest `s >= 1` with `1/s < self`. Norm values are `0` or `1/n`, so
    /// `{z : ||z|| < self}` is exactly `theta(s)Z`.
    pub fn open_threshold(&self) -> BigUint {
        let floor = (self.0.denom() / self.0.numer()).to_biguint().expect("positive");
        floor + 1u32
    }

    /// `ceil(1 / self)`.
    pub fn ceil_reciprocal(&self) -> BigUint {
        let (q, r) = self.0.denom().div_rem(self.0.numer());
        let q = q.to_biguint().expect("positive");
        if r.is_zero() {
            q
        } else {
            q + 1u32
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Radius {
    type Err = ProfiniteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let value: BigRational = s
            .trim()
            .parse()
            .map_err(|_| ProfiniteError::RadiusSyntax(s.to_string()))?;
        Radius::new(value)
    }
}

/// The residue class `residue + modulus*Z`, kept canonical
/// (`0 <= residue < modulus`) so that equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Progression {
    residue: BigInt,
    modulus: BigInt,
}

impl Progression {
    pub fn new(residue: BigInt, modulus: BigInt) -> Result<Self, ProfiniteError> {
        if !modulus.is_positive() {
            return Err(ProfiniteError::NonPositiveModulus);
        }
        let residue = residue.mod_floor(&modulus);
        Ok(Progression { residue, modulus })
    }

    pub fn from_parts(residue: impl Into<BigInt>, modulus: impl Into<BigInt>) -> Result<Self, ProfiniteError> {
        Progression::new(residue.into(), modulus.into())
    }

    pub(crate) fn with_modulus(center: &BigInt, modulus: &BigUint) -> Self {
        let modulus = BigInt::from_biguint(Sign::Plus, modulus.clone());
        Progression {
            residue: center.mod_floor(&modulus),
            modulus,
        }
    }

    /// All of `Z`.
    pub fn everything() -> Self {
        Progression {
            residue: BigInt::zero(),
            modulus: BigInt::one(),
        }
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn modulus_unsigned(&self) -> BigUint {
        self.modulus.magnitude().clone()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        (x - &self.residue).is_multiple_of(&self.modulus)
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Progression) -> bool {
        self.modulus.is_multiple_of(&other.modulus) && other.contains(&self.residue)
    }

    pub fn intersects(&self, other: &Progression) -> bool {
        let g = self.modulus.gcd(&other.modulus);
        (&self.residue - &other.residue).is_multiple_of(&g)
    }

    /// Decides whether `self` is contained in the union of `covers`.
    ///
    /// Covers disjoint from `self` are dropped first. What remains is checked
    /// exactly, class by class, modulo the lcm of all surviving moduli; at
    /// most `budget` classes are examined.
    pub fn covered_by(&self, covers: &[Progression], budget: u64) -> Coverage {
        let relevant: Vec<&Progression> = covers.iter().filter(|q| self.intersects(q)).collect();
        if relevant.iter().any(|q| self.is_subset_of(q)) {
            return Coverage::Covered;
        }
        if relevant.is_empty() {
            return Coverage::Uncovered {
                witness: self.residue.clone(),
            };
        }
        let lcm = relevant
            .iter()
            .fold(self.modulus.clone(), |acc, q| acc.lcm(&q.modulus));
        let classes = &lcm / &self.modulus;
        let count = match classes.to_u64() {
            Some(c) if c <= budget => c,
            _ => {
                return Coverage::BudgetExhausted {
                    classes: classes.magnitude().clone(),
                }
            }
        };
        let point = |j: u64| &self.residue + &self.modulus * BigInt::from(j);
        match par::find_first(count, |j| {
            let x = point(j);
            !relevant.iter().any(|q| q.contains(&x))
        }) {
            None => Coverage::Covered,
            Some(j) => Coverage::Uncovered { witness: point(j) },
        }
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}Z", self.residue, self.modulus)
    }
}

/// Outcome of a covering check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coverage {
    Covered,
    /// `witness` lies in the progression and in none of the covers.
    Uncovered { witness: BigInt },
    /// More than the allowed number of residue classes would be examined.
    BudgetExhausted { classes: BigUint },
}

impl Coverage {
    pub fn is_covered(&self) -> bool {
        matches!(self, Coverage::Covered)
    }
}

/// `x + theta(n)Z`, the closed ball of radius `1/n`.
pub fn closed_ball(x: &BigInt, n: u64) -> Result<Progression, ProfiniteError> {
    if n < 1 {
        return Err(ProfiniteError::BallIndex(n));
    }
    Ok(Progression::with_modulus(x, &theta(n)?))
}

/// `{y : dist(x, y) < r}` as a progression.
pub fn open_ball(x: &BigInt, r: &Radius) -> Result<Progression, ProfiniteError> {
    let s = r
        .open_threshold()
        .to_u64()
        .ok_or_else(|| ProfiniteError::RadiusTooSmall(r.to_string()))?;
    Ok(Progression::with_modulus(x, &theta(s)?))
}
