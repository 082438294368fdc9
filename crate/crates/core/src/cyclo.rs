//! The totally ramified tower `K_n = Q_p(zeta_{p^{n+1}})`.
//!
//! Elements are stored in the power basis of the uniformizer
//! `pi = zeta - 1`, reduced modulo the Eisenstein polynomial
//! `E_n(X) = Phi_{p^{n+1}}(1 + X)`. Precision is tracked for the whole
//! coefficient vector at once: an element is `p^shift * sum c_i pi^i` with
//! every `c_i` known modulo `p^rel`, so the element is known modulo
//! `p^{shift + rel} O_n`. That lattice does not depend on the basis, which
//! lets Galois action, embeddings and subfield recognition run in the
//! `zeta`-power basis where they are permutations.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{
    big_pow, check_prime, mod_inverse, vp_big, vp_i64, PadicScalar, Valuation, EXACT,
};

/// Shared data for one field `K_n` at working precision `W`.
pub struct FieldContext {
    p: u32,
    level: u32,
    degree: usize,
    order: u64,
    precision: u32,
    /// Non-leading coefficients of `E_n`, reduced mod `p^W`.
    eisenstein: Vec<BigInt>,
    powers: Vec<BigInt>,
}

type ContextKey = (u32, u32, u32);

fn cache() -> &'static Mutex<HashMap<ContextKey, Arc<FieldContext>>> {
    static CACHE: OnceLock<Mutex<HashMap<ContextKey, Arc<FieldContext>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FieldContext {
    /// The (cached) context for `K_level` over `Q_p` at `precision` digits.
    pub fn get(p: u32, level: u32, precision: u32) -> Result<Arc<FieldContext>> {
        check_prime(p)?;
        if precision == 0 {
            return Err(Error::Invalid("precision must be positive".into()));
        }
        if level > 6 {
            return Err(Error::Invalid(format!("level {level} too large")));
        }
        let key = (p, level, precision);
        if let Some(ctx) = cache().lock().unwrap().get(&key) {
            return Ok(ctx.clone());
        }
        let ctx = Arc::new(Self::build(p, level, precision));
        cache().lock().unwrap().insert(key, ctx.clone());
        Ok(ctx)
    }

    fn build(p: u32, level: u32, precision: u32) -> FieldContext {
        let pn = (p as u64).pow(level);
        let degree = (pn * (p as u64 - 1)) as usize;
        let powers: Vec<BigInt> = (0..=(4 * precision + 8)).map(|k| big_pow(p, k)).collect();
        let modulus = &powers[precision as usize];
        // E_n(X) = sum_{t<p} (1 + X)^{t p^n}
        let mut eis = vec![BigInt::zero(); degree + 1];
        for t in 0..p as u64 {
            let m = t * pn;
            let mut binom = BigInt::one();
            for i in 0..=(m as usize).min(degree) {
                eis[i] += &binom;
                binom = binom * BigInt::from(m - i as u64) / BigInt::from(i as u64 + 1);
            }
        }
        debug_assert!(eis[degree].is_one());
        eis.truncate(degree);
        let eisenstein = eis.into_iter().map(|c| c.mod_floor(modulus)).collect();
        FieldContext {
            p,
            level,
            degree,
            order: pn * p as u64,
            precision,
            eisenstein,
            powers,
        }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `e = [K_n : Q_p] = p^n (p - 1)`; also `v_pi(p)`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `p^{n+1}`, the order of `zeta`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Coefficients of the Eisenstein modulus (leading 1 included), mod `p^W`.
    pub fn eisenstein_polynomial(&self) -> Vec<BigInt> {
        let mut v = self.eisenstein.clone();
        v.push(BigInt::one());
        v
    }

    pub(crate) fn pow_p(&self, k: u32) -> BigInt {
        match self.powers.get(k as usize) {
            Some(b) => b.clone(),
            None => big_pow(self.p, k),
        }
    }

    /// Context one level down (same prime and precision).
    pub fn sublevel(&self) -> Result<Arc<FieldContext>> {
        if self.level == 0 {
            return Err(Error::Invalid(
                "level 0 has no sublevel in the tower".into(),
            ));
        }
        FieldContext::get(self.p, self.level - 1, self.precision)
    }

    pub fn zero(self: &Arc<Self>) -> CycloElement {
        CycloElement::zero_to(self, EXACT)
    }

    pub fn one(self: &Arc<Self>) -> CycloElement {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> CycloElement {
        CycloElement::from_scalar(self, &PadicScalar::from_int(self.p, n, self.precision))
    }

    pub fn from_scalar(self: &Arc<Self>, s: &PadicScalar) -> CycloElement {
        CycloElement::from_scalar(self, s)
    }

    /// The uniformizer `pi = zeta - 1`.
    pub fn pi(self: &Arc<Self>) -> CycloElement {
        let mut c = vec![BigInt::zero(); self.degree];
        c[1] = BigInt::one();
        CycloElement::from_raw(self, 0, self.precision, c)
    }

    /// `zeta_{p^{n+1}}^k`.
    pub fn zeta_pow(self: &Arc<Self>, k: i64) -> CycloElement {
        let one = PadicScalar::one(self.p, self.precision);
        CycloElement::from_zeta_terms(self, &[(one, k)])
    }

    /// `zeta_{p^m}^k` with the convention `zeta_N^d = zeta_{N/d}`; needs `m <= n + 1`.
    pub fn root_of_unity(self: &Arc<Self>, m: u32, k: i64) -> Result<CycloElement> {
        Ok(self.zeta_pow(self.root_exponent(m, k)?))
    }

    /// Exponent of `zeta_{p^{n+1}}` representing `zeta_{p^m}^k`.
    pub fn root_exponent(&self, m: u32, k: i64) -> Result<i64> {
        if m > self.level + 1 {
            return Err(Error::Invalid(format!(
                "zeta_{{p^{m}}} is not in K_{} (needs level >= {})",
                self.level,
                m.saturating_sub(1)
            )));
        }
        let scale = (self.p as i64).pow(self.level + 1 - m);
        Ok(k.rem_euclid((self.p as i64).pow(m)) * scale)
    }

    fn same(&self, other: &FieldContext) -> bool {
        self.p == other.p && self.level == other.level && self.precision == other.precision
    }
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K_{}(p={}, e={}, W={})",
            self.level, self.p, self.degree, self.precision
        )
    }
}

/// An element of `K_n`.
#[derive(Clone)]
pub struct CycloElement {
    ctx: Arc<FieldContext>,
    /// Common power of p; the absolute precision when the element is zero.
    shift: i64,
    /// Relative precision; 0 for zero.
    rel: u32,
    /// `pi`-basis coefficients in `[0, p^rel)`, not all divisible by p.
    coeffs: Vec<BigInt>,
}

/// Element-level operations exposed by [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
}

pub fn field_arith(a: &CycloElement, b: &CycloElement, op: FieldOp) -> Result<CycloElement> {
    a.check(b)?;
    Ok(match op {
        FieldOp::Add => a + b,
        FieldOp::Sub => a - b,
        FieldOp::Mul => a * b,
        FieldOp::Div => a.div(b)?,
        FieldOp::Neg => -a,
        FieldOp::Inv => a.inv()?,
    })
}

fn taylor_shift(a: &mut [BigInt], up: bool, m: &BigInt) {
    // a(X) -> a(X + 1) when `up`, a(X - 1) otherwise; entries stay in [0, m)
    let n = a.len();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            let (lo, hi) = a.split_at_mut(j + 1);
            let (x, y) = (&mut lo[j], &hi[0]);
            if up {
                *x += y;
                if *x >= *m {
                    *x -= m;
                }
            } else {
                *x -= y;
                if x.is_negative() {
                    *x += m;
                }
            }
        }
    }
}

impl CycloElement {
    pub fn zero_to(ctx: &Arc<FieldContext>, abs: i64) -> Self {
        CycloElement {
            ctx: ctx.clone(),
            shift: abs.min(EXACT),
            rel: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn from_scalar(ctx: &Arc<FieldContext>, s: &PadicScalar) -> Self {
        assert_eq!(s.prime(), ctx.p, "prime mismatch");
        match s.valuation() {
            None => Self::zero_to(ctx, s.absolute_precision()),
            Some(v) => {
                let rel = s.relative_precision().min(ctx.precision);
                let mut c = vec![BigInt::zero(); ctx.degree];
                c[0] = s.unit().clone();
                Self::from_raw(ctx, v, rel, c)
            }
        }
    }

    /// Build from `pi`-basis coefficients of `sum c_i pi^i` (each known mod
    /// `p^W`), scaled by `p^shift`.
    pub fn from_coeffs(ctx: &Arc<FieldContext>, shift: i64, coeffs: &[BigInt]) -> Result<Self> {
        if coeffs.len() > ctx.degree {
            return Err(Error::Invalid(format!(
                "{} coefficients for degree {}",
                coeffs.len(),
                ctx.degree
            )));
        }
        let mut c = coeffs.to_vec();
        c.resize(ctx.degree, BigInt::zero());
        Ok(Self::from_raw(ctx, shift, ctx.precision, c))
    }

    /// Normalizing constructor: reduce mod `p^rel` and pull out common powers of p.
    pub(crate) fn from_raw(
        ctx: &Arc<FieldContext>,
        shift: i64,
        rel: u32,
        mut c: Vec<BigInt>,
    ) -> Self {
        if rel == 0 {
            return Self::zero_to(ctx, shift);
        }
        let m = ctx.pow_p(rel);
        for x in c.iter_mut() {
            if x.is_negative() || *x >= m {
                *x = x.mod_floor(&m);
            }
        }
        let mut k = rel;
        for x in c.iter().filter(|x| !x.is_zero()) {
            k = k.min(vp_big(x, ctx.p));
            if k == 0 {
                break;
            }
        }
        if k == rel {
            return Self::zero_to(ctx, shift + rel as i64);
        }
        if k > 0 {
            let d = ctx.pow_p(k);
            for x in c.iter_mut() {
                *x /= &d;
            }
        }
        CycloElement {
            ctx: ctx.clone(),
            shift: shift + k as i64,
            rel: rel - k,
            coeffs: c,
        }
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn level(&self) -> u32 {
        self.ctx.level
    }

    pub fn prime(&self) -> u32 {
        self.ctx.p
    }

    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    /// The element is known modulo `p^{abs} O_n`.
    pub fn absolute_precision(&self) -> i64 {
        self.shift + self.rel as i64
    }

    pub fn relative_precision(&self) -> u32 {
        self.rel
    }

    /// Largest k with the element in `p^k O_n` (`None` for zero).
    pub fn lattice_valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.shift)
    }

    /// `v_pi`, normalized so that `v_pi(p) = e`.
    pub fn pi_valuation(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let e = self.ctx.degree as i64;
        let best = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| i as i64 + e * vp_big(c, self.ctx.p) as i64)
            .min()
            .expect("nonzero element has a nonzero coefficient");
        Some(e * self.shift + best)
    }

    /// Like [`pi_valuation`](Self::pi_valuation) but erroring on zero.
    pub fn valuation(&self) -> Result<i64> {
        self.pi_valuation().ok_or(Error::DivisionByZero)
    }

    /// `v_p` as a rational (`v_pi / e`), `Inf` for zero at precision.
    pub fn size(&self) -> Valuation {
        match self.pi_valuation() {
            None => Valuation::Inf,
            Some(v) => Valuation::Fin(Ratio::new(v, self.ctx.degree as i64)),
        }
    }

    /// `pi`-basis coordinates as p-adic scalars.
    pub fn coeffs(&self) -> Vec<PadicScalar> {
        let p = self.ctx.p;
        (0..self.ctx.degree)
            .map(|i| match self.coeffs.get(i) {
                None => PadicScalar::zero_to(p, self.absolute_precision()),
                Some(c) => PadicScalar::from_scaled(p, self.shift, c, self.rel),
            })
            .collect()
    }

    /// The constant coordinate, when all others vanish at precision.
    pub fn as_scalar(&self) -> Option<PadicScalar> {
        if self.is_zero() {
            return Some(PadicScalar::zero_to(self.ctx.p, self.shift));
        }
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(PadicScalar::from_scaled(
                self.ctx.p,
                self.shift,
                &self.coeffs[0],
                self.rel,
            ))
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx.same(&other.ctx) {
            Ok(())
        } else if self.ctx.p != other.ctx.p {
            Err(Error::PrimeMismatch(self.ctx.p, other.ctx.p))
        } else {
            Err(Error::ContextMismatch {
                p: self.ctx.p,
                left: self.ctx.level,
                right: other.ctx.level,
            })
        }
    }

    /// Forget digits beyond absolute precision `abs`.
    pub fn cap(&self, abs: i64) -> Self {
        if self.is_zero() {
            return Self::zero_to(&self.ctx, self.shift.min(abs));
        }
        if abs >= self.absolute_precision() {
            return self.clone();
        }
        if abs <= self.shift {
            return Self::zero_to(&self.ctx, abs);
        }
        Self::from_raw(
            &self.ctx,
            self.shift,
            (abs - self.shift) as u32,
            self.coeffs.clone(),
        )
    }

    /// Multiply by `p^k`.
    pub fn shift_p(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.shift = if self.is_zero() {
            self.shift.saturating_add(k).min(EXACT)
        } else {
            self.shift + k
        };
        out
    }

    pub fn mul_scalar(&self, s: &PadicScalar) -> Self {
        assert_eq!(s.prime(), self.ctx.p, "prime mismatch");
        match (self.is_zero(), s.valuation()) {
            (true, Some(v)) => Self::zero_to(&self.ctx, self.shift.saturating_add(v)),
            (true, None) => {
                Self::zero_to(&self.ctx, self.shift.saturating_add(s.absolute_precision()))
            }
            (false, None) => {
                Self::zero_to(&self.ctx, s.absolute_precision().saturating_add(self.shift))
            }
            (false, Some(v)) => {
                let rel = self.rel.min(s.relative_precision());
                let c = self.coeffs.iter().map(|x| x * s.unit()).collect();
                Self::from_raw(&self.ctx, self.shift + v, rel, c)
            }
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        self.mul_scalar(&PadicScalar::from_int(self.ctx.p, n, self.ctx.precision))
    }

    /// Exact division by a nonzero integer (a power of p costs precision).
    pub fn div_int(&self, n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::DivisionByZero);
        }
        let v = vp_i64(n, self.ctx.p);
        let unit = n / (self.ctx.p as i64).pow(v);
        let inv =
            PadicScalar::from_int(self.ctx.p, unit, self.ctx.precision.max(self.rel)).inv()?;
        Ok(self.mul_scalar(&inv).shift_p(-(v as i64)))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = self.ctx.one();
        if e == 0 {
            return acc;
        }
        let mut base = self.clone();
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first { base.clone() } else { &acc * &base };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn add_impl(&self, other: &Self) -> Self {
        self.check(other).expect("field mismatch");
        if self.is_zero() {
            return other.cap(self.shift);
        }
        if other.is_zero() {
            return self.cap(other.shift);
        }
        let abs = self.absolute_precision().min(other.absolute_precision());
        let base = self.shift.min(other.shift);
        if abs <= base {
            return Self::zero_to(&self.ctx, abs);
        }
        let rel = (abs - base) as u32;
        let mut out = vec![BigInt::zero(); self.ctx.degree];
        for x in [self, other] {
            let d = (x.shift - base) as u32;
            if d >= rel {
                continue;
            }
            let f = self.ctx.pow_p(d);
            for (o, c) in out.iter_mut().zip(&x.coeffs) {
                if d == 0 {
                    *o += c;
                } else {
                    *o += c * &f;
                }
            }
        }
        Self::from_raw(&self.ctx, base, rel, out)
    }

    fn neg_impl(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = self.ctx.pow_p(self.rel);
        let c = self
            .coeffs
            .iter()
            .map(|x| if x.is_zero() { BigInt::zero() } else { &m - x })
            .collect();
        CycloElement {
            ctx: self.ctx.clone(),
            shift: self.shift,
            rel: self.rel,
            coeffs: c,
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        self.check(other).expect("field mismatch");
        if self.is_zero() || other.is_zero() {
            let a = if self.is_zero() {
                self.shift
            } else {
                other.shift
            };
            let b = if self.is_zero() {
                other.shift
            } else {
                self.shift
            };
            return Self::zero_to(&self.ctx, a.saturating_add(b));
        }
        let e = self.ctx.degree;
        let rel = self.rel.min(other.rel);
        let m = self.ctx.pow_p(rel);
        let mut prod = vec![BigInt::zero(); 2 * e - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        // X^e = -sum E_i X^i
        for k in (e..2 * e - 1).rev() {
            let top = std::mem::take(&mut prod[k]).mod_floor(&m);
            if top.is_zero() {
                continue;
            }
            for (i, ei) in self.ctx.eisenstein.iter().enumerate() {
                if !ei.is_zero() {
                    prod[k - e + i] -= &top * ei;
                }
            }
        }
        prod.truncate(e);
        Self::from_raw(&self.ctx, self.shift + other.shift, rel, prod)
    }

    /// Inverse of an element with `v_pi = 0` and `shift = 0`.
    fn unit_inverse(&self) -> Self {
        let ctx = &self.ctx;
        let e = ctx.degree;
        let p = ctx.p as i64;
        // inverse modulo p in F_p[X]/(X^e), then Newton
        let c: Vec<i64> = self
            .coeffs
            .iter()
            .map(|x| (x % p).try_into().unwrap())
            .collect();
        let c0inv = mod_inverse(&BigInt::from(c[0]), &BigInt::from(p)).unwrap();
        let c0inv: i64 = c0inv.try_into().unwrap();
        let mut b = vec![0i64; e];
        b[0] = c0inv;
        for k in 1..e {
            let mut s = 0i64;
            for i in 1..=k {
                s = (s + c[i] * b[k - i]) % p;
            }
            b[k] = (-(s * c0inv)).rem_euclid(p);
        }
        let mut x = Self::from_raw(ctx, 0, self.rel, b.into_iter().map(BigInt::from).collect());
        let two = ctx.from_int(2);
        let mut good = 1u32;
        while good < self.rel {
            let wx = self * &x;
            x = &x * &(&two - &wx);
            good *= 2;
        }
        x.cap(self.rel as i64)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let e = self.ctx.degree as i64;
        let u = CycloElement {
            ctx: self.ctx.clone(),
            shift: 0,
            rel: self.rel,
            coeffs: self.coeffs.clone(),
        };
        let k = u.pi_valuation().unwrap();
        debug_assert!(k < e);
        let inv_u = if k == 0 {
            u.unit_inverse()
        } else {
            let pik = self.ctx.pi().pow((e - k) as u64);
            let w = &u * &pik;
            // v_pi(w) = e, so w = p * unit
            let w = w.shift_p(-1);
            (&w.unit_inverse() * &pik).shift_p(-1)
        };
        Ok(inv_u.shift_p(-self.shift))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self * &other.inv()?)
    }

    /// Equal on every digit both operands know.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    // ---- zeta-basis machinery -------------------------------------------

    /// Coordinates in the basis `zeta^j`, `j < e`, modulo `p^rel`.
    pub(crate) fn zeta_coeffs(&self) -> Vec<BigInt> {
        let mut z = self.coeffs.clone();
        if !z.is_empty() {
            taylor_shift(&mut z, false, &self.ctx.pow_p(self.rel));
        }
        z
    }

    pub(crate) fn from_zeta_coeffs(
        ctx: &Arc<FieldContext>,
        shift: i64,
        rel: u32,
        mut z: Vec<BigInt>,
    ) -> Self {
        if rel == 0 {
            return Self::zero_to(ctx, shift);
        }
        let m = ctx.pow_p(rel);
        for x in z.iter_mut() {
            *x = x.mod_floor(&m);
        }
        taylor_shift(&mut z, true, &m);
        Self::from_raw(ctx, shift, rel, z)
    }

    /// Reduce a vector indexed by `Z/p^{n+1}` modulo `Phi_{p^{n+1}}`.
    fn reduce_cyclic(ctx: &FieldContext, mut v: Vec<BigInt>) -> Vec<BigInt> {
        let pn = (ctx.order / ctx.p as u64) as usize;
        let e = ctx.degree;
        for r in 0..pn {
            let top = std::mem::take(&mut v[e + r]);
            if top.is_zero() {
                continue;
            }
            for t in 0..(ctx.p as usize - 1) {
                v[t * pn + r] -= &top;
            }
        }
        v.truncate(e);
        v
    }

    /// `sum s_k zeta^{k}` for scalars `s_k`.
    pub fn from_zeta_terms(ctx: &Arc<FieldContext>, terms: &[(PadicScalar, i64)]) -> Self {
        let q = ctx.order as i64;
        let abs = terms
            .iter()
            .map(|(s, _)| s.absolute_precision())
            .min()
            .unwrap_or(EXACT)
            .min(EXACT);
        let base = terms.iter().filter_map(|(s, _)| s.valuation()).min();
        let Some(base) = base else {
            return Self::zero_to(ctx, abs);
        };
        if abs <= base {
            return Self::zero_to(ctx, abs);
        }
        let rel = ((abs - base) as u32).min(ctx.precision);
        let mut v = vec![BigInt::zero(); ctx.order as usize];
        for (s, k) in terms {
            if let Some(val) = s.valuation() {
                let d = (val - base) as u32;
                if d < rel {
                    v[k.rem_euclid(q) as usize] += s.unit() * ctx.pow_p(d);
                }
            }
        }
        Self::from_zeta_coeffs(ctx, base, rel, Self::reduce_cyclic(ctx, v))
    }

    /// `sum zeta^{k} x_k` for field elements `x_k`.
    pub fn sum_zeta_twisted(ctx: &Arc<FieldContext>, terms: &[(&CycloElement, i64)]) -> Self {
        let q = ctx.order as i64;
        let abs = terms
            .iter()
            .map(|(x, _)| x.absolute_precision())
            .min()
            .unwrap_or(EXACT);
        let base = terms
            .iter()
            .filter(|(x, _)| !x.is_zero())
            .map(|(x, _)| x.shift)
            .min();
        let Some(base) = base else {
            return Self::zero_to(ctx, abs);
        };
        if abs <= base {
            return Self::zero_to(ctx, abs);
        }
        let rel = (abs - base) as u32;
        let mut v = vec![BigInt::zero(); ctx.order as usize];
        for (x, k) in terms {
            assert!(x.ctx.same(ctx), "field mismatch");
            if x.is_zero() {
                continue;
            }
            let d = (x.shift - base) as u32;
            if d >= rel {
                continue;
            }
            let f = ctx.pow_p(d);
            let k = k.rem_euclid(q);
            for (j, c) in x.zeta_coeffs().into_iter().enumerate() {
                if !c.is_zero() {
                    v[((j as i64 + k) % q) as usize] += c * &f;
                }
            }
        }
        Self::from_zeta_coeffs(ctx, base, rel, Self::reduce_cyclic(ctx, v))
    }

    /// Multiply by `zeta^k`.
    pub fn mul_zeta_power(&self, k: i64) -> Self {
        Self::sum_zeta_twisted(&self.ctx, &[(self, k)])
    }

    /// The automorphism `sigma_a : zeta -> zeta^a`.
    pub fn galois(&self, a: i64) -> Result<Self> {
        let p = self.ctx.p as i64;
        if a.rem_euclid(p) == 0 {
            return Err(Error::NotCoprime { a, p: self.ctx.p });
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let q = self.ctx.order as i64;
        let a = a.rem_euclid(q) as i128;
        let mut v = vec![BigInt::zero(); q as usize];
        for (j, c) in self.zeta_coeffs().into_iter().enumerate() {
            v[(a * j as i128 % q as i128) as usize] = c;
        }
        Ok(Self::from_zeta_coeffs(
            &self.ctx,
            self.shift,
            self.rel,
            Self::reduce_cyclic(&self.ctx, v),
        ))
    }

    /// Image in `K_L` for `L >= n` (with `zeta_{p^{n+1}} = zeta_{p^{L+1}}^{p^{L-n}}`).
    pub fn embed(&self, target: &Arc<FieldContext>) -> Result<Self> {
        if target.p != self.ctx.p || target.level < self.ctx.level {
            return Err(Error::ContextMismatch {
                p: self.ctx.p,
                left: self.ctx.level,
                right: target.level,
            });
        }
        if target.same(&self.ctx) {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(Self::zero_to(target, self.shift));
        }
        let step = (self.ctx.p as usize).pow(target.level - self.ctx.level);
        let mut v = vec![BigInt::zero(); target.degree];
        for (j, c) in self.zeta_coeffs().into_iter().enumerate() {
            v[j * step] = c;
        }
        let rel = self.rel.min(target.precision);
        Ok(Self::from_zeta_coeffs(target, self.shift, rel, v))
    }

    /// Recognize the element as a member of `K_{n-1}`. Returns the element of
    /// the smaller field and the size of the part outside it.
    pub fn descend(&self) -> Result<(Self, Valuation)> {
        let sub = self.ctx.sublevel()?;
        if self.is_zero() {
            return Ok((Self::zero_to(&sub, self.shift), Valuation::Inf));
        }
        let p = self.ctx.p as usize;
        let z = self.zeta_coeffs();
        let mut residual = Valuation::Inf;
        for (j, c) in z.iter().enumerate() {
            if j % p != 0 && !c.is_zero() {
                residual =
                    residual.worst(Valuation::int(self.shift + vp_big(c, self.ctx.p) as i64));
            }
        }
        let d: Vec<BigInt> = (0..sub.degree).map(|i| z[i * p].clone()).collect();
        Ok((
            Self::from_zeta_coeffs(&sub, self.shift, self.rel, d),
            residual,
        ))
    }

    /// `N_{K_n/K_{n-1}}(x)` together with the subfield-recognition residual.
    pub fn norm_with_residual(&self) -> Result<(Self, Valuation)> {
        let n = self.ctx.level;
        if n == 0 {
            return Err(Error::Invalid("norm_to_sublevel needs level >= 1".into()));
        }
        let pn = (self.ctx.p as i64).pow(n);
        let mut prod = self.clone();
        for k in 1..self.ctx.p as i64 {
            prod = &prod * &self.galois(1 + k * pn)?;
        }
        prod.descend()
    }

    /// `N_{K_n/K_{n-1}}(x)`; errors when the product is not recognized in the subfield.
    pub fn norm_to_sublevel(&self) -> Result<Self> {
        let (x, residual) = self.norm_with_residual()?;
        if residual.is_inf() {
            Ok(x)
        } else {
            Err(Error::NotInSubfield { residual })
        }
    }

    /// The Iwasawa logarithm (`log p = 0`).
    pub fn iwasawa_log(&self) -> Result<Self> {
        let ctx = self.ctx.clone();
        let e = ctx.degree as i64;
        let p = ctx.p as i64;
        let v = self.valuation()?;
        // unit with v_pi = 0, then a principal unit
        let y = self.pow(e as u64).shift_p(-v);
        let mut z = y.pow(p as u64 - 1);
        let mut k = 0u32;
        let one = ctx.one();
        let threshold = e / (p - 1);
        let mut w = &z - &one;
        loop {
            if z.absolute_precision() < 1 {
                return Err(Error::PrecisionExhausted {
                    achieved: w.pi_valuation().unwrap_or(0),
                    threshold,
                });
            }
            let t = match w.pi_valuation() {
                None => break,
                Some(t) => t,
            };
            // past the convergence disc, and far enough that every series term
            // keeps the precision of z
            if t > threshold && t >= 2 * e {
                break;
            }
            z = z.pow(p as u64);
            w = &z - &one;
            k += 1;
            if k > 64 {
                return Err(Error::PrecisionExhausted {
                    achieved: t,
                    threshold,
                });
            }
        }
        let target = z.absolute_precision();
        let mut sum = Self::zero_to(&ctx, target);
        if let Some(t) = w.pi_valuation() {
            let mut power = w.clone();
            let mut j: i64 = 1;
            loop {
                let term = power.div_int(j)?;
                sum = if j % 2 == 1 {
                    &sum + &term
                } else {
                    &sum - &term
                };
                let next = j + 1;
                // tail bound: v_pi(w^i / i) >= i t - e floor(log_p i), increasing in i
                if next * t - e * crate::padic::ilog(next as u64, ctx.p) as i64 >= e * target {
                    break;
                }
                power = &power * &w;
                j = next;
            }
        }
        let denom = e * (p - 1) * p.pow(k);
        sum.cap(target).div_int(denom)
    }

    /// Exponent-indexed view used by tests: `zeta`-basis coordinates.
    pub fn zeta_coordinates(&self) -> Vec<PadicScalar> {
        let z = self.zeta_coeffs();
        (0..self.ctx.degree)
            .map(|i| match z.get(i) {
                None => PadicScalar::zero_to(self.ctx.p, self.absolute_precision()),
                Some(c) => PadicScalar::from_scaled(self.ctx.p, self.shift, c, self.rel),
            })
            .collect()
    }
}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.ctx.p, self.shift);
        }
        write!(f, "{}^{} * (", self.ctx.p, self.shift)?;
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*pi")?,
                _ => write!(f, "{c}*pi^{i}")?,
            }
        }
        write!(f, ") + O({}^{})", self.ctx.p, self.absolute_precision())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl std::ops::$tr<&CycloElement> for &CycloElement {
            type Output = CycloElement;
            fn $m(self, rhs: &CycloElement) -> CycloElement {
                self.$imp(rhs)
            }
        }
        impl std::ops::$tr<CycloElement> for CycloElement {
            type Output = CycloElement;
            fn $m(self, rhs: CycloElement) -> CycloElement {
                (&self).$imp(&rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Mul, mul, mul_impl);

impl CycloElement {
    fn sub_impl(&self, other: &Self) -> Self {
        self.add_impl(&other.neg_impl())
    }
}

binop!(Sub, sub, sub_impl);

impl std::ops::Neg for &CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        self.neg_impl()
    }
}

impl std::ops::Neg for CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        self.neg_impl()
    }
}

impl std::iter::Sum<CycloElement> for Option<CycloElement> {
    fn sum<I: Iterator<Item = CycloElement>>(iter: I) -> Self {
        iter.reduce(|a, b| &a + &b)
    }
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    p: u32,
    level: u32,
    #[serde(default = "default_precision")]
    precision: u32,
    coeffs: Vec<PadicScalar>,
}

fn default_precision() -> u32 {
    crate::padic::DEFAULT_PRECISION
}

impl Serialize for CycloElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson {
            p: self.ctx.p,
            level: self.ctx.level,
            precision: self.ctx.precision,
            coeffs: self.coeffs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ElementJson::deserialize(d)?;
        let ctx = FieldContext::get(j.p, j.level, j.precision).map_err(D::Error::custom)?;
        if j.coeffs.len() != ctx.degree {
            return Err(D::Error::custom(format!(
                "expected {} coefficients",
                ctx.degree
            )));
        }
        let mut acc = CycloElement::zero_to(&ctx, EXACT);
        let pi = ctx.pi();
        let mut pow = ctx.one();
        for c in &j.coeffs {
            if c.prime() != j.p {
                return Err(D::Error::custom("coefficient prime mismatch"));
            }
            acc = &acc + &pow.mul_scalar(c);
            pow = &pow * &pi;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32, n: u32) -> Arc<FieldContext> {
        FieldContext::get(p, n, 24).unwrap()
    }

    #[test]
    fn eisenstein_shape() {
        for (p, n) in [(3, 0), (3, 1), (5, 1), (7, 0)] {
            let c = ctx(p, n);
            let e = c.eisenstein_polynomial();
            assert_eq!(e.len(), c.degree() + 1);
            assert!(e[c.degree()].is_one());
            assert_eq!(vp_big(&e[0], p), 1);
            for x in &e[1..c.degree()] {
                assert!(x.is_zero() || vp_big(x, p) >= 1);
            }
        }
    }

    #[test]
    fn zeta_order_and_geometric_sum() {
        let c = ctx(5, 1);
        let q = c.order() as i64;
        let z = c.zeta_pow(1);
        assert!((&z * &c.zeta_pow(q - 1)).eq_to_precision(&c.one()));
        assert!(z.pow(q as u64).eq_to_precision(&c.one()));
        let mut s = c.zero();
        for k in 0..q {
            s = &s + &c.zeta_pow(k);
        }
        assert!(s.is_zero());
    }

    #[test]
    fn uniformizer_inverse() {
        let c = ctx(3, 1);
        let x = &c.one() - &c.zeta_pow(1);
        assert_eq!(x.pi_valuation(), Some(1));
        let y = x.inv().unwrap();
        assert_eq!(y.pi_valuation(), Some(-1));
        assert!((&x * &y).eq_to_precision(&c.one()));
    }

    #[test]
    fn valuation_of_p() {
        let c = ctx(5, 1);
        assert_eq!(c.from_int(5).pi_valuation(), Some(20));
        assert_eq!(c.from_int(25).size(), Valuation::int(2));
    }

    #[test]
    fn inverse_of_mixed_element() {
        let c = ctx(5, 0);
        // 3 + 5 pi^2 + pi^3 ... arbitrary; and p*pi^2*(unit)
        let x =
            CycloElement::from_coeffs(&c, 0, &[3.into(), 0.into(), 5.into(), 1.into()]).unwrap();
        assert!((&x * &x.inv().unwrap()).eq_to_precision(&c.one()));
        let y =
            CycloElement::from_coeffs(&c, 1, &[0.into(), 0.into(), 7.into(), 1.into()]).unwrap();
        assert_eq!(y.pi_valuation(), Some(4 + 2));
        assert!((&y * &y.inv().unwrap()).eq_to_precision(&c.one()));
    }

    #[test]
    fn galois_identity_and_composition() {
        let c = ctx(3, 1);
        let x =
            CycloElement::from_coeffs(&c, 0, &[1.into(), 2.into(), 0.into(), 5.into(), 7.into()])
                .unwrap();
        assert!(x.galois(1).unwrap().eq_to_precision(&x));
        let q = c.order() as i64;
        for (a, b) in [(2, 4), (5, 7), (8, 2)] {
            let lhs = x.galois(a).unwrap().galois(b).unwrap();
            let rhs = x.galois(a * b % q).unwrap();
            assert!(lhs.eq_to_precision(&rhs));
        }
        assert!(x.galois(3).is_err());
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let c0 = ctx(3, 0);
        let c1 = ctx(3, 1);
        let z0 = c0.zeta_pow(1);
        let e = z0.embed(&c1).unwrap();
        assert!(e.eq_to_precision(&c1.zeta_pow(3)));
        let x = &(&z0 * &z0) + &c0.from_int(4);
        assert!(x
            .embed(&c1)
            .unwrap()
            .eq_to_precision(&(&(&e * &e) + &c1.from_int(4))));
    }

    #[test]
    fn norm_of_one_minus_zeta() {
        let c = ctx(5, 1);
        let x = &c.one() - &c.zeta_pow(1);
        let n = x.norm_to_sublevel().unwrap();
        let sub = c.sublevel().unwrap();
        assert!(n.eq_to_precision(&(&sub.one() - &sub.zeta_pow(1))));
    }

    #[test]
    fn norm_of_subfield_element_is_power() {
        let c = ctx(3, 1);
        let sub = c.sublevel().unwrap();
        let y = &sub.zeta_pow(1) + &sub.from_int(2);
        let n = y.embed(&c).unwrap().norm_to_sublevel().unwrap();
        assert!(n.eq_to_precision(&y.pow(3)));
    }

    #[test]
    fn log_vanishes_on_torsion_and_p() {
        let c = ctx(5, 1);
        assert!(c.zeta_pow(3).iwasawa_log().unwrap().is_zero());
        assert!(c.from_int(5).iwasawa_log().unwrap().is_zero());
        assert!(c.from_int(-1).iwasawa_log().unwrap().is_zero());
    }

    #[test]
    fn log_is_a_homomorphism() {
        let c = ctx(3, 1);
        let x = &c.one() - &c.zeta_pow(1);
        let l = x.iwasawa_log().unwrap();
        let l2 = x.pow(2).iwasawa_log().unwrap();
        assert!(l2.eq_to_precision(&l.mul_int(2)));
        assert!(!l.is_zero());
        let y = &c.zeta_pow(2) + &c.from_int(3);
        let lxy = (&x * &y).iwasawa_log().unwrap();
        assert!(lxy.eq_to_precision(&(&l + &y.iwasawa_log().unwrap())));
    }

    #[test]
    fn json_round_trip() {
        let c = ctx(3, 1);
        let x = &c.zeta_pow(2).div_int(3).unwrap() + &c.from_int(7);
        let s = serde_json::to_string(&x).unwrap();
        let y: CycloElement = serde_json::from_str(&s).unwrap();
        assert!(x.eq_to_precision(&y));
        assert_eq!(x.absolute_precision(), y.absolute_precision());
    }
}
