//! Dirichlet characters of p-power modulus, split as `phi = omega^j * psi`.
//!
//! The wild part is pinned down by `psi(1 + p) = zeta_{p^n}^u`. Units are
//! written `a = omega(a) * <a>` with `<a>` a power of `1 + p` modulo
//! `p^{n+1}`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::cyclo::{CycloElement, FieldContext};
use crate::error::{Error, Result};
use crate::padic::{check_prime, pow_mod_u64, teichmuller, PadicScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    p: u32,
    level: u32,
    tame: u32,
    wild: u64,
}

/// Least primitive root modulo `p^2` (hence modulo every `p^k`).
pub fn least_primitive_root(p: u32) -> u32 {
    let p2 = (p as u64) * (p as u64);
    let phi = p2 - p as u64;
    let mut factors = vec![p as u64];
    let mut m = p as u64 - 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|&q| pow_mod_u64(g as u64, phi / q, p2) != 1)
        })
        .expect("a primitive root exists")
}

/// Discrete logarithm of a principal unit `x` mod `p^{n+1}` to base `1 + p`.
pub(crate) fn principal_dlog(p: u32, n: u32, x: u64) -> u64 {
    let m = (p as u64).pow(n + 1);
    let mut acc = 1u64;
    for k in 0..(p as u64).pow(n) {
        if acc == x % m {
            return k;
        }
        acc = acc * (1 + p as u64) % m;
    }
    panic!("{x} is not a principal unit mod {m}")
}

/// `omega(a) mod p^{n+1}`, i.e. `a^{p^n}`.
pub(crate) fn teichmuller_mod(p: u32, n: u32, a: i64) -> u64 {
    let m = (p as u64).pow(n + 1);
    pow_mod_u64(a.rem_euclid(m as i64) as u64, (p as u64).pow(n), m)
}

impl DirichletCharacter {
    /// `omega^tame * psi_wild` modulo `p^{level+1}`.
    pub fn new(p: u32, level: u32, tame: i64, wild: i64) -> Result<Self> {
        check_prime(p)?;
        let pn = (p as i64).pow(level);
        Ok(DirichletCharacter {
            p,
            level,
            tame: tame.rem_euclid(p as i64 - 1) as u32,
            wild: wild.rem_euclid(pn) as u64,
        })
    }

    pub fn tame_only(p: u32, tame: i64) -> Result<Self> {
        Self::new(p, 0, tame, 0)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn tame_exponent(&self) -> u32 {
        self.tame
    }

    pub fn wild_exponent(&self) -> u64 {
        self.wild
    }

    pub fn modulus(&self) -> u64 {
        (self.p as u64).pow(self.level + 1)
    }

    /// `t` with `p^t` the order of the wild part.
    pub fn wild_order_exponent(&self) -> u32 {
        if self.wild == 0 {
            return 0;
        }
        let mut v = 0;
        let mut w = self.wild;
        while w % self.p as u64 == 0 {
            w /= self.p as u64;
            v += 1;
        }
        self.level - v
    }

    /// The conductor as an exponent of p (`f = p^k`).
    pub fn conductor_exponent(&self) -> u32 {
        if self.wild != 0 {
            self.wild_order_exponent() + 1
        } else if self.tame != 0 {
            1
        } else {
            0
        }
    }

    pub fn conductor(&self) -> u64 {
        (self.p as u64).pow(self.conductor_exponent())
    }

    pub fn is_trivial(&self) -> bool {
        self.tame == 0 && self.wild == 0
    }

    pub fn is_even(&self) -> bool {
        self.tame % 2 == 0
    }

    pub fn conj(&self) -> Self {
        Self::new(self.p, self.level, -(self.tame as i64), -(self.wild as i64)).unwrap()
    }

    pub fn tame_part(&self) -> Self {
        Self::new(self.p, self.level, self.tame as i64, 0).unwrap()
    }

    /// The same character viewed modulo `p^{level+1}` for a larger level.
    pub fn lift(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::Invalid(format!(
                "cannot lift level {} to {level}",
                self.level
            )));
        }
        let scale = (self.p as i64).pow(level - self.level);
        Self::new(self.p, level, self.tame as i64, self.wild as i64 * scale)
    }

    fn check_ambient(&self, ctx: &Arc<FieldContext>) -> Result<()> {
        if ctx.prime() != self.p {
            return Err(Error::PrimeMismatch(ctx.prime(), self.p));
        }
        if ctx.level() < self.level {
            return Err(Error::Invalid(format!(
                "character of level {} needs an ambient field of level >= {}",
                self.level, self.level
            )));
        }
        Ok(())
    }

    /// `(tame value, exponent of zeta_{p^{L+1}})` with `phi(a) = omega(a)^j zeta^e`.
    pub(crate) fn value_parts(&self, ctx: &FieldContext, a: i64) -> Option<(PadicScalar, i64)> {
        let p = self.p;
        if a.rem_euclid(p as i64) == 0 {
            return None;
        }
        let tame = teichmuller(p, a, ctx.precision())
            .unwrap()
            .pow(self.tame as u64);
        if self.wild == 0 {
            return Some((tame, 0));
        }
        let n = self.level;
        let m = (p as u64).pow(n + 1);
        let w = teichmuller_mod(p, n, a);
        let winv = crate::padic::mod_inverse(&(w as i64).into(), &(m as i64).into()).unwrap();
        let winv: u64 = winv.try_into().unwrap();
        let principal = (a.rem_euclid(m as i64) as u64) * winv % m;
        let k = principal_dlog(p, n, principal);
        let exp = ctx.root_exponent(n, (self.wild as i64) * k as i64).unwrap();
        Some((tame, exp))
    }

    /// `phi(a)` in the ambient field (zero when `p | a`).
    pub fn value(&self, ctx: &Arc<FieldContext>, a: i64) -> Result<CycloElement> {
        self.check_ambient(ctx)?;
        Ok(match self.value_parts(ctx, a) {
            None => ctx.zero(),
            Some((s, e)) => CycloElement::from_zeta_terms(ctx, &[(s, e)]),
        })
    }

    /// `tau(phi) = sum_{a=1}^{f} phi(a) zeta_f^a`.
    pub fn gauss_sum(&self, ctx: &Arc<FieldContext>) -> Result<CycloElement> {
        self.check_ambient(ctx)?;
        if self.is_trivial() {
            return Err(Error::TrivialCharacter);
        }
        let k = self.conductor_exponent();
        let f = self.conductor() as i64;
        let mut terms = Vec::with_capacity(f as usize);
        for a in 1..=f {
            if let Some((s, e)) = self.value_parts(ctx, a) {
                terms.push((s, e + ctx.root_exponent(k, a)?));
            }
        }
        Ok(CycloElement::from_zeta_terms(ctx, &terms))
    }

    /// `tau(phi) tau(conj phi) - phi(-1) f`, as a size.
    pub fn gauss_identity_residual(
        &self,
        ctx: &Arc<FieldContext>,
    ) -> Result<crate::padic::Valuation> {
        let lhs = &self.gauss_sum(ctx)? * &self.conj().gauss_sum(ctx)?;
        let sign = if self.is_even() { 1 } else { -1 };
        let rhs = ctx.from_int(sign * self.conductor() as i64);
        Ok((&lhs - &rhs).size())
    }

    /// Every character modulo `p^{level+1}` with the given tame exponent.
    pub fn with_tame(p: u32, level: u32, tame: i64) -> Result<Vec<Self>> {
        (0..(p as i64).pow(level))
            .map(|u| Self::new(p, level, tame, u))
            .collect()
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "omega^{}*psi^{}@{}^{}",
            self.tame,
            self.wild,
            self.p,
            self.level + 1
        )
    }
}

impl FromStr for DirichletCharacter {
    type Err = Error;

    /// Accepts `omega^j*psi^u@p^k` (`*psi^u` and `^k` optional, `k` defaults to 1).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("character '{s}' (expected omega^j*psi^u@p^k)"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (body, modulus) = compact.split_once('@').ok_or_else(bad)?;
        let (p, k) = match modulus.split_once('^') {
            Some((p, k)) => (p, k.trim_matches(|c| c == '(' || c == ')')),
            None => (modulus, "1"),
        };
        let p: u32 = p.parse().map_err(|_| bad())?;
        let k: u32 = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        let mut tame = 0i64;
        let mut wild = 0i64;
        for factor in body.split('*') {
            let (name, exp) = factor.split_once('^').unwrap_or((factor, "1"));
            let exp: i64 = exp.parse().map_err(|_| bad())?;
            match name {
                "omega" => tame = exp,
                "psi" => wild = exp,
                "1" if exp == 1 => {}
                _ => return Err(bad()),
            }
        }
        Self::new(p, k - 1, tame, wild)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32, n: u32) -> Arc<FieldContext> {
        FieldContext::get(p, n, 24).unwrap()
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(least_primitive_root(3), 2);
        assert_eq!(least_primitive_root(5), 2);
        assert_eq!(least_primitive_root(7), 3);
        // 10 generates (Z/487)^x but not (Z/487^2)^x
        assert_ne!(least_primitive_root(487), 10);
    }

    #[test]
    fn wild_generator_value() {
        let c = ctx(5, 1);
        let phi = DirichletCharacter::new(5, 1, 0, 1).unwrap();
        assert!(phi
            .value(&c, 6)
            .unwrap()
            .eq_to_precision(&c.root_of_unity(1, 1).unwrap()));
        assert!(phi.value(&c, 10).unwrap().is_zero());
    }

    #[test]
    fn parity_and_triviality() {
        let c = ctx(5, 1);
        for j in 0..4 {
            for u in 0..5 {
                let phi = DirichletCharacter::new(5, 1, j, u).unwrap();
                let expected = if j % 2 == 0 { 1 } else { -1 };
                assert!(phi
                    .value(&c, -1)
                    .unwrap()
                    .eq_to_precision(&c.from_int(expected)));
            }
        }
        let triv = DirichletCharacter::new(5, 1, 0, 0).unwrap();
        for a in [1, 2, 7, 24] {
            assert!(triv.value(&c, a).unwrap().eq_to_precision(&c.one()));
        }
    }

    #[test]
    fn conductors() {
        assert_eq!(DirichletCharacter::new(5, 2, 0, 0).unwrap().conductor(), 1);
        assert_eq!(DirichletCharacter::new(5, 2, 2, 0).unwrap().conductor(), 5);
        assert_eq!(DirichletCharacter::new(5, 2, 0, 5).unwrap().conductor(), 25);
        assert_eq!(
            DirichletCharacter::new(5, 2, 1, 3).unwrap().conductor(),
            125
        );
    }

    #[test]
    fn quadratic_gauss_sum_squares_to_p() {
        let c = ctx(5, 0);
        let chi = DirichletCharacter::tame_only(5, 2).unwrap();
        let tau = chi.gauss_sum(&c).unwrap();
        assert!(tau.pow(2).eq_to_precision(&c.from_int(5)));
    }

    #[test]
    fn parse_and_display() {
        let phi: DirichletCharacter = "omega^2*psi^1@5^(2)".parse().unwrap();
        assert_eq!(phi, DirichletCharacter::new(5, 1, 2, 1).unwrap());
        assert_eq!(phi.to_string(), "omega^2*psi^1@5^2");
        assert_eq!(phi.to_string().parse::<DirichletCharacter>().unwrap(), phi);
        let chi: DirichletCharacter = "omega^3@7".parse().unwrap();
        assert_eq!(chi.level(), 0);
        assert!("psi@5^0".parse::<DirichletCharacter>().is_err());
        assert!("theta^2@5".parse::<DirichletCharacter>().is_err());
    }
}
