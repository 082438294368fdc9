//! Norm-coherent sequences `(l_n)` in the tower and the distributions they
//! induce through the Iwasawa logarithm:
//!
//! `lambda(a + p^n Z_p) = -log(sigma_{(1+p)^a} l_n)` and the `chi`-twisted
//! version summed over the tame part of the Galois group.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::characters::{least_primitive_root, teichmuller_mod};
use crate::cyclo::{CycloElement, FieldContext};
use crate::error::{Error, Result};
use crate::padic::{teichmuller, PadicScalar, Valuation};
use crate::volkenborn::TabulatedDistribution;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceRule {
    /// `l_n = 1 - zeta_{p^{n+1}}`.
    OneMinusZeta,
    /// `l_n = zeta_{p-1}^c - zeta_{p^{n+1}}` with `zeta_{p-1} = omega(g)`.
    CycloUnit { c: i64 },
    /// `l_n = (zeta^b - 1) / (zeta - 1)` with `b = omega(g)(1 + p)`, which
    /// generates the cyclotomic units up to roots of unity.
    CyclotomicGenerator,
    /// Levels supplied by the caller.
    Custom,
}

impl fmt::Display for SequenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceRule::OneMinusZeta => write!(f, "one-minus-zeta"),
            SequenceRule::CycloUnit { c } => write!(f, "cyclo-unit:c={c}"),
            SequenceRule::CyclotomicGenerator => write!(f, "cyclotomic-generator"),
            SequenceRule::Custom => write!(f, "custom"),
        }
    }
}

impl FromStr for SequenceRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "one-minus-zeta" => return Ok(SequenceRule::OneMinusZeta),
            "cyclotomic-generator" => return Ok(SequenceRule::CyclotomicGenerator),
            _ => {}
        }
        let c = s
            .strip_prefix("cyclo-unit:")
            .map(|rest| rest.strip_prefix("c=").unwrap_or(rest))
            .ok_or_else(|| {
                Error::Parse(format!(
                    "sequence '{s}' (expected one-minus-zeta or cyclo-unit:c=K)"
                ))
            })?;
        let c = c
            .parse()
            .map_err(|_| Error::Parse(format!("tame index in '{s}'")))?;
        Ok(SequenceRule::CycloUnit { c })
    }
}

/// `l_0, ..., l_N`, with `l_n` in `K_n`.
#[derive(Clone, Debug)]
pub struct NormCoherentSequence {
    rule: SequenceRule,
    levels: Vec<CycloElement>,
}

/// The p-adic integer `omega(g)` reduced mod `p^{n+1}`.
pub fn tame_generator_mod(p: u32, n: u32) -> u64 {
    teichmuller_mod(p, n, least_primitive_root(p) as i64)
}

impl NormCoherentSequence {
    pub fn build(rule: SequenceRule, p: u32, depth: u32, precision: u32) -> Result<Self> {
        let mut levels = Vec::with_capacity(depth as usize + 1);
        for n in 0..=depth {
            let ctx = FieldContext::get(p, n, precision)?;
            levels.push(Self::element(&rule, &ctx)?);
        }
        Ok(NormCoherentSequence { rule, levels })
    }

    fn element(rule: &SequenceRule, ctx: &Arc<FieldContext>) -> Result<CycloElement> {
        let p = ctx.prime();
        let zeta = ctx.zeta_pow(1);
        Ok(match rule {
            SequenceRule::OneMinusZeta => &ctx.one() - &zeta,
            SequenceRule::CycloUnit { c } => {
                let g = least_primitive_root(p) as i64;
                let root =
                    teichmuller(p, g, ctx.precision())?.pow(c.rem_euclid(p as i64 - 1) as u64);
                &ctx.from_scalar(&root) - &zeta
            }
            SequenceRule::CyclotomicGenerator => {
                let n = ctx.level();
                let m = ctx.order();
                let b = tame_generator_mod(p, n) * (1 + p as u64) % m;
                let one = PadicScalar::one(p, ctx.precision());
                let terms: Vec<_> = (0..b as i64).map(|i| (one.clone(), i)).collect();
                CycloElement::from_zeta_terms(ctx, &terms)
            }
            SequenceRule::Custom => {
                return Err(Error::Invalid(
                    "custom sequences are loaded, not built".into(),
                ))
            }
        })
    }

    /// Caller-supplied levels; norm coherence is checked here.
    pub fn custom(levels: Vec<CycloElement>) -> Result<Self> {
        for (n, x) in levels.iter().enumerate() {
            if x.level() != n as u32 {
                return Err(Error::Invalid(format!(
                    "level {n} element lives in K_{}",
                    x.level()
                )));
            }
        }
        let seq = NormCoherentSequence {
            rule: SequenceRule::Custom,
            levels,
        };
        let residual = seq.verify_norm_coherence()?;
        if !residual.is_inf() {
            return Err(Error::NotCoherent { residual });
        }
        Ok(seq)
    }

    pub fn rule(&self) -> &SequenceRule {
        &self.rule
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn prime(&self) -> u32 {
        self.levels[0].prime()
    }

    pub fn levels(&self) -> &[CycloElement] {
        &self.levels
    }

    /// A copy with one level replaced (used to inject faults).
    pub fn with_level(&self, n: usize, x: CycloElement) -> Self {
        let mut out = self.clone();
        out.levels[n] = x;
        out
    }

    /// Worst size of `N(l_n) - l_{n-1}` (including the subfield-recognition residual).
    pub fn verify_norm_coherence(&self) -> Result<Valuation> {
        let mut worst = Valuation::Inf;
        for n in 1..self.levels.len() {
            let (norm, outside) = self.levels[n].norm_with_residual()?;
            worst = worst
                .worst(outside)
                .worst((&norm - &self.levels[n - 1]).size());
        }
        Ok(worst)
    }

    /// `log l_n` for every level.
    pub fn logs(&self) -> Result<Vec<CycloElement>> {
        self.levels.iter().map(|x| x.iwasawa_log()).collect()
    }

    fn check_depth(&self, depth: u32) -> Result<()> {
        if depth > self.depth() {
            return Err(Error::Depth(format!(
                "sequence has depth {}, {depth} requested",
                self.depth()
            )));
        }
        Ok(())
    }

    /// `lambda(a + p^n Z_p) = -log(l_n^{gamma_0^a})`, values in `K_depth`.
    pub fn lambda(&self, depth: u32) -> Result<TabulatedDistribution> {
        self.lambda_twisted(depth, None)
    }

    /// `lambda_chi(a + p^n Z_p) = -sum_delta conj(chi)(delta) log(l_n^{gamma_0^a delta})`
    /// for `chi = omega^tame`, with `Delta` lifted by Teichmüller representatives.
    pub fn lambda_chi(&self, tame: i64, depth: u32) -> Result<TabulatedDistribution> {
        self.lambda_twisted(depth, Some(tame))
    }

    fn lambda_twisted(&self, depth: u32, tame: Option<i64>) -> Result<TabulatedDistribution> {
        self.check_depth(depth)?;
        let p = self.prime();
        let precision = self.levels[0].context().precision();
        let ambient = FieldContext::get(p, depth, precision)?;
        let residual = self.truncated(depth).verify_norm_coherence()?;
        if !residual.is_inf() {
            return Err(Error::NotCoherent { residual });
        }
        // (Teichmüller lift of r, conj(chi)(r)) for r in (Z/p)^x
        let deltas: Vec<(i64, PadicScalar)> = match tame {
            None => vec![(1, PadicScalar::one(p, precision))],
            Some(j) => (1..p as i64)
                .map(|r| {
                    let w = teichmuller(p, r, precision)?;
                    let e = (-j).rem_euclid(p as i64 - 1) as u64;
                    Ok((r, w.pow(e)))
                })
                .collect::<Result<_>>()?,
        };
        let mut values = Vec::with_capacity(depth as usize + 1);
        for n in 0..=depth {
            let log = self.levels[n as usize].iwasawa_log()?;
            let m = (p as u64).pow(n + 1);
            let mut row = Vec::with_capacity((p as usize).pow(n));
            let mut gamma = 1u64;
            for _ in 0..(p as u64).pow(n) {
                let mut cell = log.context().zero();
                for (r, weight) in &deltas {
                    let sigma = gamma * teichmuller_mod(p, n, *r) % m;
                    cell = &cell + &log.galois(sigma as i64)?.mul_scalar(weight);
                }
                row.push((-cell).embed(&ambient)?);
                gamma = gamma * (1 + p as u64) % m;
            }
            values.push(row);
        }
        TabulatedDistribution::from_values(&ambient, values)
    }

    fn truncated(&self, depth: u32) -> Self {
        NormCoherentSequence {
            rule: self.rule.clone(),
            levels: self.levels[..=depth as usize].to_vec(),
        }
    }

    /// The sequence `sigma_{(1+p)^s}(l_n)`.
    pub fn galois_shift(&self, s: i64) -> Result<Self> {
        let p = self.prime() as u64;
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(n, x)| {
                let m = p.pow(n as u32 + 1);
                let e = crate::padic::pow_mod_u64(1 + p, s.rem_euclid(m as i64) as u64, m);
                x.galois(e as i64)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NormCoherentSequence {
            rule: self.rule.clone(),
            levels,
        })
    }
}

/// Action of `xi = sum_a c_a gamma_0^{-a}` in `Z_p[Gamma_j]` on a
/// distribution: on every level `i <= j`, the convolution `c * lambda`.
pub fn act_by_measure(
    lambda: &TabulatedDistribution,
    coeffs: &[CycloElement],
) -> Result<TabulatedDistribution> {
    let p = lambda.prime();
    let mut j = 0;
    while (p as usize).pow(j) < coeffs.len() {
        j += 1;
    }
    if (p as usize).pow(j) != coeffs.len() {
        return Err(Error::Depth(format!(
            "{} coefficients is not a power of {p}",
            coeffs.len()
        )));
    }
    if j > lambda.depth() {
        return Err(Error::Depth(format!(
            "group ring of level {j} beyond depth {}",
            lambda.depth()
        )));
    }
    let ctx = lambda.context();
    let xi = TabulatedDistribution::from_group_ring(ctx, coeffs, j)?;
    xi.convolve(&lambda.truncate(j)?, j)
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    levels: Vec<CycloElement>,
}

impl NormCoherentSequence {
    /// Load `{levels: [CycloElement...]}`, checking coherence.
    pub fn from_json(s: &str) -> Result<Self> {
        let j: SequenceJson = serde_json::from_str(s)?;
        Self::custom(j.levels)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SequenceJson {
            levels: self.levels.clone(),
        })?)
    }
}
