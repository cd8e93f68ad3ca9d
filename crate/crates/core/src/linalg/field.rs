use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Coefficient field: the rationals (characteristic 0) or `GF(p)` for an odd prime `p < 2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    characteristic: u64,
}

impl FieldSpec {
    pub const RATIONALS: FieldSpec = FieldSpec { characteristic: 0 };

    pub fn rationals() -> Self {
        Self::RATIONALS
    }

    pub fn prime(p: u64) -> Result<Self> {
        if p == 2 {
            return Err(Error::CharacteristicTwo);
        }
        if p >= 1 << 32 || !is_prime(p) {
            return Err(Error::BadCharacteristic(p));
        }
        Ok(FieldSpec { characteristic: p })
    }

    /// `0` for the rationals, otherwise an odd prime.
    pub fn new(characteristic: u64) -> Result<Self> {
        if characteristic == 0 {
            Ok(Self::RATIONALS)
        } else {
            Self::prime(characteristic)
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn is_rational(&self) -> bool {
        self.characteristic == 0
    }

    pub fn zero(&self) -> ExactScalar {
        self.from_int(0)
    }

    pub fn one(&self) -> ExactScalar {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> ExactScalar {
        match self.characteristic {
            0 => ExactScalar::Rational(BigRational::from_integer(n.into())),
            p => ExactScalar::Residue { value: n.rem_euclid(p as i64) as u64, modulus: p },
        }
    }

    /// The natural ring map from dyadic rationals into this field.
    pub fn reduce(&self, x: &Dyadic) -> ExactScalar {
        match self.characteristic {
            0 => ExactScalar::Rational(x.to_rational()),
            p => {
                let n = residue_of(x.numerator(), p);
                let inv2 = (p + 1) / 2;
                let scale = pow_mod(inv2, x.exponent() as u64, p);
                ExactScalar::Residue { value: mul_mod(n, scale, p), modulus: p }
            }
        }
    }

    /// Reduces an arbitrary rational; fails when the denominator vanishes mod `p`.
    pub fn reduce_rational(&self, q: &BigRational) -> Result<ExactScalar> {
        match self.characteristic {
            0 => Ok(ExactScalar::Rational(q.clone())),
            p => {
                let d = residue_of(q.denom(), p);
                if d == 0 {
                    return Err(Error::Invalid(format!("denominator of {q} vanishes mod {p}")));
                }
                let n = residue_of(q.numer(), p);
                Ok(ExactScalar::Residue { value: mul_mod(n, inv_mod(d, p), p), modulus: p })
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.characteristic {
            0 => write!(f, "Q"),
            p => write!(f, "GF({p})"),
        }
    }
}

/// Reduce a dyadic into a field. Characteristic 2 is rejected.
pub fn reduce_mod(x: &Dyadic, characteristic: u64) -> Result<ExactScalar> {
    Ok(FieldSpec::new(characteristic)?.reduce(x))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn residue_of(n: &BigInt, p: u64) -> u64 {
    let r = n % BigInt::from(p);
    let r = if r.is_negative() { r + BigInt::from(p) } else { r };
    r.to_u64().expect("residue fits in u64")
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Inverse via the extended Euclidean algorithm. `a` must be a unit mod `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "{a} is not invertible mod {p}");
    s0.rem_euclid(p as i128) as u64
}

/// A scalar in some exact field, tagged with the field it lives in.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExactScalar {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl ExactScalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            ExactScalar::Rational(_) => FieldSpec::RATIONALS,
            ExactScalar::Residue { modulus, .. } => FieldSpec { characteristic: *modulus },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Rational(q) => q.is_zero(),
            ExactScalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            ExactScalar::Rational(q) => q.is_one(),
            ExactScalar::Residue { value, .. } => *value == 1,
        }
    }

    fn binop(
        &self,
        rhs: &ExactScalar,
        q: impl Fn(&BigRational, &BigRational) -> BigRational,
        m: impl Fn(u64, u64, u64) -> u64,
    ) -> ExactScalar {
        match (self, rhs) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => ExactScalar::Rational(q(a, b)),
            (
                ExactScalar::Residue { value: a, modulus: p },
                ExactScalar::Residue { value: b, modulus: p2 },
            ) if p == p2 => ExactScalar::Residue { value: m(*a, *b, *p), modulus: *p },
            _ => panic!("mixed-field arithmetic: {self:?} and {rhs:?}"),
        }
    }

    pub fn add(&self, rhs: &ExactScalar) -> ExactScalar {
        self.binop(rhs, |a, b| a + b, |a, b, p| (a + b) % p)
    }

    pub fn sub(&self, rhs: &ExactScalar) -> ExactScalar {
        self.binop(rhs, |a, b| a - b, |a, b, p| (a + p - b) % p)
    }

    pub fn mul(&self, rhs: &ExactScalar) -> ExactScalar {
        self.binop(rhs, |a, b| a * b, mul_mod)
    }

    pub fn neg(&self) -> ExactScalar {
        match self {
            ExactScalar::Rational(q) => ExactScalar::Rational(-q),
            ExactScalar::Residue { value, modulus } => {
                ExactScalar::Residue { value: (modulus - value) % modulus, modulus: *modulus }
            }
        }
    }

    pub fn inv(&self) -> Option<ExactScalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            ExactScalar::Rational(q) => ExactScalar::Rational(q.recip()),
            ExactScalar::Residue { value, modulus } => {
                ExactScalar::Residue { value: inv_mod(*value, *modulus), modulus: *modulus }
            }
        })
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(q) => write!(f, "{q}"),
            ExactScalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(q) => write!(f, "{q}"),
            ExactScalar::Residue { value, modulus } => write!(f, "{value} (mod {modulus})"),
        }
    }
}

/// Ring operations shared by every coefficient type a group-ring element can carry.
///
/// Context-free scalars (dyadics, rationals) get this through `num-traits`; field
/// residues carry their modulus and implement it directly.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn is_zero_coeff(&self) -> bool;
    fn add_coeff(&self, rhs: &Self) -> Self;
    fn mul_coeff(&self, rhs: &Self) -> Self;
    fn neg_coeff(&self) -> Self;
}

impl<T> Coefficient for T
where
    T: Zero + One + Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync,
    for<'a> &'a T: std::ops::Add<&'a T, Output = T>
        + std::ops::Mul<&'a T, Output = T>
        + std::ops::Neg<Output = T>,
{
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_coeff(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul_coeff(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_coeff(&self) -> Self {
        -self
    }
}

impl Coefficient for ExactScalar {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_coeff(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn mul_coeff(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn neg_coeff(&self) -> Self {
        self.neg()
    }
}

/// Field arithmetic with an explicit context, so runtime moduli work the same
/// way as context-free scalars. Elimination routines are generic over this.
pub trait Field: Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_dyadic(&self, x: &Dyadic) -> Self::Elem;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn from_dyadic(&self, x: &Dyadic) -> BigRational {
        x.to_rational()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        FieldSpec::prime(p).map(|_| PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> u64 {
        inv_mod(*a, self.p)
    }
    fn from_dyadic(&self, x: &Dyadic) -> u64 {
        match (FieldSpec { characteristic: self.p }).reduce(x) {
            ExactScalar::Residue { value, .. } => value,
            ExactScalar::Rational(_) => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residue(v: u64, p: u64) -> ExactScalar {
        ExactScalar::Residue { value: v, modulus: p }
    }

    #[test]
    fn reduce_examples() {
        let gf3 = FieldSpec::prime(3).unwrap();
        let gf5 = FieldSpec::prime(5).unwrap();
        assert_eq!(gf3.reduce(&Dyadic::from_int(0)), residue(0, 3));
        assert_eq!(gf3.reduce(&Dyadic::half()), residue(2, 3));
        assert_eq!(gf5.reduce(&"3/4".parse().unwrap()), residue(2, 5));
        assert_eq!(gf5.reduce(&"-1/2".parse().unwrap()), residue(2, 5));
    }

    #[test]
    fn characteristic_two_rejected() {
        assert_eq!(FieldSpec::new(2), Err(Error::CharacteristicTwo));
        assert_eq!(reduce_mod(&Dyadic::half(), 2), Err(Error::CharacteristicTwo));
        assert_eq!(FieldSpec::new(9), Err(Error::BadCharacteristic(9)));
        assert!(FieldSpec::new(0).unwrap().is_rational());
    }

    #[test]
    fn inverse_roundtrip() {
        for p in [3u64, 5, 7, 11, 13, 101, 4294967291] {
            for a in 1..50u64.min(p) {
                assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
            }
        }
    }

    #[test]
    fn rational_reduction_checks_denominator() {
        let gf3 = FieldSpec::prime(3).unwrap();
        let third = BigRational::new(1.into(), 3.into());
        assert!(gf3.reduce_rational(&third).is_err());
        let fifth = BigRational::new(1.into(), 5.into());
        assert_eq!(gf3.reduce_rational(&fifth).unwrap(), residue(2, 3));
    }
}
