//! Exact scalars: rationals with a machine-word fast path and Gaussian
//! rationals built on top of them.
//!
//! Every value is kept in canonical form (reduced fraction, positive
//! denominator, demoted to the inline representation whenever it fits), so
//! structural equality and hashing coincide with numerical equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    // u128 division is slow; stay in u64 whenever the values fit
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return gcd_u64(a as u64, b as u64) as u128;
    }
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// An exact rational number. `Small` carries a reduced fraction with a
/// positive denominator; `Big` is only used when the value does not fit,
/// so each value has exactly one representation.
#[derive(Clone, PartialEq, Eq)]
pub enum Rational {
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

impl Rational {
    pub const ZERO: Rational = Rational::Small { num: 0, den: 1 };
    pub const ONE: Rational = Rational::Small { num: 1, den: 1 };

    pub fn from_int(n: i64) -> Self {
        Rational::Small { num: n, den: 1 }
    }

    /// Builds `num/den`, reducing to canonical form. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num == 0 {
            return Rational::ZERO;
        }
        if den == 1 && num >= i64::MIN as i128 && num <= i64::MAX as i128 {
            return Rational::Small { num: num as i64, den: 1 };
        }
        let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
        let (num, den) = (num / g, den / g);
        if num >= i64::MIN as i128 && num <= i64::MAX as i128 && den <= i64::MAX as i128 {
            Rational::Small { num: num as i64, den: den as i64 }
        } else {
            Rational::Big(Box::new(BigRational::new(BigInt::from(num), BigInt::from(den))))
        }
    }

    fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            Rational::Small { num: n, den: d }
        } else {
            Rational::Big(Box::new(r))
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small { num, den } => {
                BigRational::new(BigInt::from(*num), BigInt::from(*den))
            }
            Rational::Big(r) => (**r).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small { num: 0, .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rational::Small { num: 1, den: 1 })
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rational::Small { num, .. } => *num < 0,
            Rational::Big(r) => r.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Rational::Small { num, .. } => *num > 0,
            Rational::Big(r) => r.is_positive(),
        }
    }

    pub fn add(&self, other: &Rational) -> Rational {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        match (self, other) {
            (Rational::Small { num: an, den: ad }, Rational::Small { num: bn, den: bd }) => {
                // integer fast path: no gcd required
                if *ad == 1 && *bd == 1 {
                    if let Some(n) = an.checked_add(*bn) {
                        return Rational::Small { num: n, den: 1 };
                    }
                }
                if ad == bd {
                    if let Some(n) = an.checked_add(*bn) {
                        return Self::from_i128(n as i128, *ad as i128);
                    }
                }
                let n = *an as i128 * *bd as i128 + *bn as i128 * *ad as i128;
                let d = *ad as i128 * *bd as i128;
                Rational::from_i128(n, d)
            }
            _ => Rational::from_big(self.to_big() + other.to_big()),
        }
    }

    pub fn sub(&self, other: &Rational) -> Rational {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        if self.is_zero() || other.is_zero() {
            return Rational::ZERO;
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        match (self, other) {
            (Rational::Small { num: an, den: ad }, Rational::Small { num: bn, den: bd }) => {
                // integer fast path: product of reduced integers is reduced
                if *ad == 1 && *bd == 1 {
                    if let Some(n) = an.checked_mul(*bn) {
                        return Rational::Small { num: n, den: 1 };
                    }
                }
                // Cross-reduce first so the products stay within i128 and the
                // result is already in lowest terms.
                let g1 = gcd_u128(an.unsigned_abs() as u128, *bd as u128).max(1) as i128;
                let g2 = gcd_u128(bn.unsigned_abs() as u128, *ad as u128).max(1) as i128;
                let n = (*an as i128 / g1) * (*bn as i128 / g2);
                let d = (*ad as i128 / g2) * (*bd as i128 / g1);
                Rational::from_i128(n, d)
            }
            _ => Rational::from_big(self.to_big() * other.to_big()),
        }
    }

    pub fn neg(&self) -> Rational {
        match self {
            Rational::Small { num, den } => {
                if *num == i64::MIN {
                    Rational::from_i128(-(*num as i128), *den as i128)
                } else {
                    Rational::Small { num: -num, den: *den }
                }
            }
            Rational::Big(r) => Rational::from_big(-(**r).clone()),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rational {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Rational::Small { num, den } => Rational::from_i128(*den as i128, *num as i128),
            Rational::Big(r) => Rational::from_big(r.recip()),
        }
    }

    pub fn div(&self, other: &Rational) -> Rational {
        self.mul(&other.recip())
    }

    /// Renders as `num/den`, denominator always present (used by the matrix
    /// JSON schema, which requires exact round-trips).
    pub fn to_frac_string(&self) -> String {
        match self {
            Rational::Small { num, den } => format!("{num}/{den}"),
            Rational::Big(r) => format!("{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses `num/den` or a bare integer, both in decimal of any size.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
        let (ns, ds) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n = BigInt::from_str(ns.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(ds.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::from_big(BigRational::new(n, d)))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small { num: an, den: ad }, Rational::Small { num: bn, den: bd }) => {
                (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Canonical form makes per-variant hashing sound: a value is Small
        // exactly when it fits.
        match self {
            Rational::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Rational::Big(r) => {
                1u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small { num, den: 1 } => write!(f, "{num}"),
            Rational::Small { num, den } => write!(f, "{num}/{den}"),
            Rational::Big(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_frac_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Gaussian rational `re + im·i`: the scalar field for all matrix
/// arithmetic in this crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    pub re: Rational,
    pub im: Rational,
}

// Serialized as the pair ["reNum/reDen", "imNum/imDen"], matching the matrix
// entry schema.
impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_frac_pair().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (re, im) = <(String, String)>::deserialize(deserializer)?;
        ExactScalar::parse_frac_pair(&re, &im).map_err(serde::de::Error::custom)
    }
}

impl ExactScalar {
    pub const ZERO: ExactScalar = ExactScalar { re: Rational::ZERO, im: Rational::ZERO };
    pub const ONE: ExactScalar = ExactScalar { re: Rational::ONE, im: Rational::ZERO };

    pub fn from_int(n: i64) -> Self {
        ExactScalar { re: Rational::from_int(n), im: Rational::ZERO }
    }

    pub fn from_rational(re: Rational) -> Self {
        ExactScalar { re, im: Rational::ZERO }
    }

    pub fn new(re: Rational, im: Rational) -> Self {
        ExactScalar { re, im }
    }

    pub fn i() -> Self {
        ExactScalar { re: Rational::ZERO, im: Rational::ONE }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &ExactScalar) -> ExactScalar {
        ExactScalar { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &ExactScalar) -> ExactScalar {
        ExactScalar { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &ExactScalar) -> ExactScalar {
        // purely real / purely imaginary operands dominate in practice
        match (self.im.is_zero(), o.im.is_zero(), self.re.is_zero(), o.re.is_zero()) {
            (true, true, _, _) => ExactScalar { re: self.re.mul(&o.re), im: Rational::ZERO },
            (true, _, _, true) => ExactScalar { re: Rational::ZERO, im: self.re.mul(&o.im) },
            (_, true, true, _) => ExactScalar { re: Rational::ZERO, im: self.im.mul(&o.re) },
            (_, _, true, true) => {
                ExactScalar { re: self.im.mul(&o.im).neg(), im: Rational::ZERO }
            }
            _ => ExactScalar {
                re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
                im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
            },
        }
    }

    pub fn neg(&self) -> ExactScalar {
        ExactScalar { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> ExactScalar {
        ExactScalar { re: self.re.clone(), im: self.im.neg() }
    }

    /// |z|² as a rational; positive for nonzero z.
    pub fn norm_sqr(&self) -> Rational {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> ExactScalar {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "inverse of zero scalar");
        let inv = n.recip();
        ExactScalar { re: self.re.mul(&inv), im: self.im.neg().mul(&inv) }
    }

    pub fn div(&self, o: &ExactScalar) -> ExactScalar {
        self.mul(&o.recip())
    }

    /// The matrix-schema pair `["reNum/reDen", "imNum/imDen"]`.
    pub fn to_frac_pair(&self) -> (String, String) {
        (self.re.to_frac_string(), self.im.to_frac_string())
    }

    pub fn parse_frac_pair(re: &str, im: &str) -> Result<Self, Error> {
        Ok(ExactScalar { re: re.parse()?, im: im.parse()? })
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
