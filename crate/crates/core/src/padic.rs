//! Capped-precision arithmetic in `Q_p`.
//!
//! A [`PadicScalar`] is `p^v * u` with `u` a unit known modulo `p^W`; the
//! absolute precision is `v + W`. Zero carries only the absolute precision to
//! which it is known ([`EXACT`] for a true zero).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute precision used for exact zeros.
pub const EXACT: i64 = i64::MAX / 8;

/// Default number of base-p digits carried by new constants.
pub const DEFAULT_PRECISION: u32 = 32;

pub(crate) fn is_odd_prime(p: u32) -> bool {
    p >= 3
        && p % 2 == 1
        && (3..)
            .step_by(2)
            .take_while(|d| d * d <= p)
            .all(|d| p % d != 0)
}

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidPrime(p))
    }
}

pub(crate) fn big_pow(p: u32, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// `v_p(n)` for nonzero `n`.
pub(crate) fn vp_big(n: &BigInt, p: u32) -> u32 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub(crate) fn vp_i64(n: i64, p: u32) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    let mut m = n;
    while m % p as i64 == 0 {
        m /= p as i64;
        v += 1;
    }
    v
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.mod_floor(m).extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else {
        None
    }
}

pub(crate) fn pow_mod_u64(base: u64, exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut r: u128 = 1 % m128;
    let mut b = base as u128 % m128;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    r as u64
}

/// Size of a p-adic quantity as a rational valuation; `Inf` means zero at the
/// precision it was computed to. `|x|_p = p^{-v}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Fin(Ratio<i64>),
    Inf,
}

impl Valuation {
    pub fn int(v: i64) -> Self {
        Valuation::Fin(Ratio::from_integer(v))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Valuation::Inf)
    }

    /// The larger of two sizes (the smaller valuation).
    pub fn worst(self, other: Self) -> Self {
        self.min(other)
    }

    /// `|x|_p` as a real number.
    pub fn abs(&self, p: u32) -> f64 {
        match self {
            Valuation::Inf => 0.0,
            Valuation::Fin(v) => (p as f64).powf(-(*v.numer() as f64) / (*v.denom() as f64)),
        }
    }

    /// True when the size is at most `p^{-digits}`.
    pub fn at_least(&self, digits: i64) -> bool {
        match self {
            Valuation::Inf => true,
            Valuation::Fin(v) => *v >= Ratio::from_integer(digits),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Inf => write!(f, "inf"),
            Valuation::Fin(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Inf => s.serialize_str("inf"),
            Valuation::Fin(v) if v.is_integer() => s.serialize_i64(v.to_integer()),
            Valuation::Fin(v) => s.serialize_str(&v.to_string()),
        }
    }
}

/// An element of `Q_p` known to finite absolute precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicScalar {
    p: u32,
    /// Valuation; for zero, the absolute precision.
    val: i64,
    /// Unit part in `[0, p^digits)`; zero for zero.
    unit: BigInt,
    digits: u32,
}

impl PadicScalar {
    pub fn zero(p: u32) -> Self {
        Self::zero_to(p, EXACT)
    }

    /// Zero known modulo `p^abs`.
    pub fn zero_to(p: u32, abs: i64) -> Self {
        PadicScalar {
            p,
            val: abs.min(EXACT),
            unit: BigInt::zero(),
            digits: 0,
        }
    }

    pub fn one(p: u32, digits: u32) -> Self {
        Self::from_int(p, 1, digits)
    }

    pub fn from_int(p: u32, n: i64, digits: u32) -> Self {
        Self::from_bigint(p, &BigInt::from(n), digits)
    }

    pub fn from_bigint(p: u32, n: &BigInt, digits: u32) -> Self {
        if n.is_zero() {
            return Self::zero(p);
        }
        let v = vp_big(n, p);
        let u = n / big_pow(p, v);
        Self::from_parts(p, v as i64, u, digits)
    }

    /// `num / den` to `digits` relative digits.
    pub fn from_ratio(p: u32, num: i64, den: i64, digits: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_int(p, num, digits).mul(&Self::from_int(p, den, digits).inv()?))
    }

    /// `p^val * unit`; `unit` must be prime to `p`.
    pub(crate) fn from_parts(p: u32, val: i64, unit: BigInt, digits: u32) -> Self {
        if digits == 0 {
            return Self::zero_to(p, val);
        }
        let unit = unit.mod_floor(&big_pow(p, digits));
        debug_assert!(!(&unit % p).is_zero());
        PadicScalar {
            p,
            val,
            unit,
            digits,
        }
    }

    /// `p^shift * n` where `n` is known modulo `p^rel`; strips powers of p.
    pub(crate) fn from_scaled(p: u32, shift: i64, n: &BigInt, rel: u32) -> Self {
        let m = big_pow(p, rel);
        let n = n.mod_floor(&m);
        if n.is_zero() {
            return Self::zero_to(p, shift + rel as i64);
        }
        let k = vp_big(&n, p);
        Self::from_parts(p, shift + k as i64, n / big_pow(p, k), rel - k)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.digits == 0
    }

    /// `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    pub fn relative_precision(&self) -> u32 {
        self.digits
    }

    pub fn absolute_precision(&self) -> i64 {
        self.val + self.digits as i64
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn size(&self) -> Valuation {
        match self.valuation() {
            None => Valuation::Inf,
            Some(v) => Valuation::int(v),
        }
    }

    /// Little-endian base-p digits of the unit part.
    pub fn unit_digits(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.digits as usize);
        let mut m = self.unit.clone();
        let pb = BigInt::from(self.p);
        for _ in 0..self.digits {
            let (q, r) = m.div_rem(&pb);
            out.push(r.to_u32().unwrap());
            m = q;
        }
        out
    }

    /// Representative as an integer when the valuation is non-negative.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self.valuation() {
            None => Some(BigInt::zero()),
            Some(v) if v >= 0 => Some(&self.unit * big_pow(self.p, v as u32)),
            _ => None,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            Err(Error::PrimeMismatch(self.p, other.p))
        } else {
            Ok(())
        }
    }

    /// Drop digits beyond absolute precision `abs`.
    pub fn cap(&self, abs: i64) -> Self {
        if self.is_zero() {
            return Self::zero_to(self.p, self.val.min(abs));
        }
        if abs >= self.absolute_precision() {
            return self.clone();
        }
        if abs <= self.val {
            return Self::zero_to(self.p, abs);
        }
        Self::from_parts(self.p, self.val, self.unit.clone(), (abs - self.val) as u32)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = big_pow(self.p, self.digits);
        Self::from_parts(self.p, self.val, &m - &self.unit, self.digits)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "prime mismatch");
        if self.is_zero() {
            return other.cap(self.val);
        }
        if other.is_zero() {
            return self.cap(other.val);
        }
        let p = self.p;
        let abs = self.absolute_precision().min(other.absolute_precision());
        let base = self.val.min(other.val);
        if abs <= base {
            return Self::zero_to(p, abs);
        }
        let rel = (abs - base) as u32;
        let term = |x: &Self| {
            let d = (x.val - base) as u32;
            if d >= rel {
                BigInt::zero()
            } else {
                &x.unit * big_pow(p, d)
            }
        };
        Self::from_scaled(p, base, &(term(self) + term(other)), rel)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "prime mismatch");
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Self::zero_to(self.p, self.val.saturating_add(other.val)),
            (true, false) => Self::zero_to(self.p, self.val.saturating_add(other.val)),
            (false, true) => Self::zero_to(self.p, other.val.saturating_add(self.val)),
            (false, false) => {
                let digits = self.digits.min(other.digits);
                Self::from_parts(
                    self.p,
                    self.val + other.val,
                    &self.unit * &other.unit,
                    digits,
                )
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = big_pow(self.p, self.digits);
        let u = mod_inverse(&self.unit, &m).expect("unit part is prime to p");
        Ok(Self::from_parts(self.p, -self.val, u, self.digits))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        if self.is_zero() {
            return if e == 0 {
                Self::one(self.p, DEFAULT_PRECISION)
            } else {
                Self::zero_to(self.p, self.val.saturating_mul(e as i64))
            };
        }
        let mut base = self.clone();
        let mut acc = Self::from_parts(self.p, 0, BigInt::one(), self.digits);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.val = if self.is_zero() {
            (self.val.saturating_add(k)).min(EXACT)
        } else {
            self.val + k
        };
        out
    }

    /// Equality on the digits both operands know.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

/// Binary/unary operations exposed by [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
}

pub fn arith(a: &PadicScalar, b: &PadicScalar, op: ArithOp) -> Result<PadicScalar> {
    a.check(b)?;
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b)?,
        ArithOp::Neg => a.neg(),
        ArithOp::Inv => a.inv()?,
    })
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        write!(
            f,
            "{}*{}^{} + O({}^{})",
            self.unit,
            self.p,
            self.val,
            self.p,
            self.absolute_precision()
        )
    }
}

/// Teichmüller lift `omega(a)`: the (p-1)-st root of unity congruent to `a`.
pub fn teichmuller(p: u32, a: i64, digits: u32) -> Result<PadicScalar> {
    check_prime(p)?;
    if a.rem_euclid(p as i64) == 0 {
        return Err(Error::NotCoprime { a, p });
    }
    let m = big_pow(p, digits);
    // a^{p^{W-1}} is correct modulo p^W
    let e = big_pow(p, digits.saturating_sub(1));
    let w = BigInt::from(a).mod_floor(&m).modpow(&e, &m);
    Ok(PadicScalar::from_parts(p, 0, w, digits))
}

/// `log(u)` for a principal unit `u` of `Z_p`.
pub fn log_one_unit(u: &PadicScalar) -> Result<PadicScalar> {
    let p = u.prime();
    let one = PadicScalar::from_parts(p, 0, BigInt::one(), u.relative_precision().max(1));
    let w = u.sub(&one);
    let target = u.absolute_precision();
    let s = match w.valuation() {
        None => return Ok(PadicScalar::zero_to(p, target)),
        Some(s) if s >= 1 => s,
        Some(_) => return Err(Error::NotPrincipalUnit),
    };
    let mut sum = PadicScalar::zero(p);
    let mut power = w.clone();
    let mut k: i64 = 1;
    loop {
        let term = power.div(&PadicScalar::from_int(p, k, w.relative_precision().max(1)))?;
        sum = if k % 2 == 1 {
            sum.add(&term)
        } else {
            sum.sub(&term)
        };
        // remaining terms have valuation >= j*s - floor(log_p j) for j > k, increasing in j
        let next = k + 1;
        if next * s - (ilog(next as u64, p) as i64) >= target {
            break;
        }
        power = power.mul(&w);
        k = next;
    }
    Ok(sum.cap(target))
}

pub(crate) fn ilog(n: u64, p: u32) -> u32 {
    let mut k = 0;
    let mut m = n;
    while m >= p as u64 {
        m /= p as u64;
        k += 1;
    }
    k
}

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    prime: u32,
    valuation: Option<i64>,
    digits: Vec<u32>,
    precision: i64,
}

impl Serialize for PadicScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarJson {
            prime: self.p,
            valuation: self.valuation(),
            digits: self.unit_digits(),
            precision: self.absolute_precision(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ScalarJson::deserialize(d)?;
        if !is_odd_prime(j.prime) {
            return Err(D::Error::custom(format!("{} is not an odd prime", j.prime)));
        }
        let Some(v) = j.valuation else {
            return Ok(PadicScalar::zero_to(j.prime, j.precision));
        };
        let mut unit = BigInt::zero();
        for &digit in j.digits.iter().rev() {
            if digit >= j.prime {
                return Err(D::Error::custom("digit out of range"));
            }
            unit = unit * j.prime + digit;
        }
        if (&unit % j.prime).is_zero() {
            return Err(D::Error::custom("unit part divisible by p"));
        }
        let digits = j.precision - v;
        if digits <= 0 || digits as usize != j.digits.len() {
            return Err(D::Error::custom("precision does not match digit count"));
        }
        Ok(PadicScalar::from_parts(j.prime, v, unit, digits as u32))
    }
}
