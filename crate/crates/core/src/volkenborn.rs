//! Distributions on `Z_p` tabulated to a finite depth, and everything that
//! can be computed from the table: the distribution relation, the Volkenborn
//! defect, Riemann sums and their Cauchy defects, Mahler coefficients,
//! Fourier values at p-power roots of unity and convolution.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclo::{CycloElement, FieldContext};
use crate::error::{Error, Result};
use crate::padic::{PadicScalar, Valuation};

/// `mu(a + p^j Z_p)` for `0 <= j <= depth`, `0 <= a < p^j`.
#[derive(Clone, Debug)]
pub struct TabulatedDistribution {
    ctx: Arc<FieldContext>,
    depth: u32,
    values: Vec<Vec<CycloElement>>,
}

fn pw(p: u32, j: u32) -> usize {
    (p as usize).pow(j)
}

fn binomial(x: u64, m: u64) -> BigInt {
    if m > x {
        return BigInt::zero();
    }
    let m = m.min(x - m);
    let mut r = BigInt::one();
    for i in 0..m {
        r = r * BigInt::from(x - i) / BigInt::from(i + 1);
    }
    r
}

impl TabulatedDistribution {
    /// Wrap a table, checking its shape (not the distribution relation).
    pub fn from_values(ctx: &Arc<FieldContext>, values: Vec<Vec<CycloElement>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Depth("a distribution needs at least level 0".into()));
        }
        let p = ctx.prime();
        for (j, row) in values.iter().enumerate() {
            if row.len() != pw(p, j as u32) {
                return Err(Error::Depth(format!(
                    "level {j} has {} cells, expected {}",
                    row.len(),
                    pw(p, j as u32)
                )));
            }
            if let Some(x) = row
                .iter()
                .find(|x| x.level() != ctx.level() || x.prime() != p)
            {
                return Err(Error::ContextMismatch {
                    p,
                    left: ctx.level(),
                    right: x.level(),
                });
            }
        }
        Ok(TabulatedDistribution {
            ctx: ctx.clone(),
            depth: values.len() as u32 - 1,
            values,
        })
    }

    pub fn haar(ctx: &Arc<FieldContext>, depth: u32) -> Self {
        let p = ctx.prime();
        let values = (0..=depth)
            .map(|j| vec![ctx.one().shift_p(-(j as i64)); pw(p, j)])
            .collect();
        TabulatedDistribution {
            ctx: ctx.clone(),
            depth,
            values,
        }
    }

    pub fn dirac(ctx: &Arc<FieldContext>, c: i64, depth: u32) -> Self {
        let p = ctx.prime();
        let values = (0..=depth)
            .map(|j| {
                let m = pw(p, j) as i64;
                let hit = c.rem_euclid(m) as usize;
                (0..m as usize)
                    .map(|a| if a == hit { ctx.one() } else { ctx.zero() })
                    .collect()
            })
            .collect();
        TabulatedDistribution {
            ctx: ctx.clone(),
            depth,
            values,
        }
    }

    /// The bounded measure `sum_a xi_a delta_a` of a group-ring element of
    /// `Z_p[Z/p^n]` (masses placed at the representatives `0 <= a < p^n`).
    pub fn from_group_ring(
        ctx: &Arc<FieldContext>,
        coeffs: &[CycloElement],
        depth: u32,
    ) -> Result<Self> {
        let p = ctx.prime();
        level_of(p, coeffs.len())?;
        let mut values = Vec::with_capacity(depth as usize + 1);
        for j in 0..=depth {
            let m = pw(p, j);
            let mut row = vec![ctx.zero(); m];
            for (a, x) in coeffs.iter().enumerate() {
                let x = x.embed(ctx)?;
                row[a % m] = &row[a % m] + &x;
            }
            values.push(row);
        }
        Ok(TabulatedDistribution {
            ctx: ctx.clone(),
            depth,
            values,
        })
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn prime(&self) -> u32 {
        self.ctx.prime()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn ambient_level(&self) -> u32 {
        self.ctx.level()
    }

    pub fn level(&self, j: u32) -> &[CycloElement] {
        &self.values[j as usize]
    }

    /// `mu(a + p^j Z_p)` (any integer `a`).
    pub fn value(&self, j: u32, a: i64) -> &CycloElement {
        let m = pw(self.prime(), j) as i64;
        &self.values[j as usize][a.rem_euclid(m) as usize]
    }

    /// `mu(Z_p)`.
    pub fn total_mass(&self) -> &CycloElement {
        &self.values[0][0]
    }

    /// A copy with one cell replaced (used to inject faults).
    pub fn with_cell(&self, j: u32, a: usize, x: CycloElement) -> Self {
        let mut out = self.clone();
        out.values[j as usize][a] = x;
        out
    }

    /// Keep levels `0..=depth` only.
    pub fn truncate(&self, depth: u32) -> Result<Self> {
        if depth > self.depth {
            return Err(Error::Depth(format!(
                "cannot truncate depth {} to {depth}",
                self.depth
            )));
        }
        Ok(TabulatedDistribution {
            ctx: self.ctx.clone(),
            depth,
            values: self.values[..=depth as usize].to_vec(),
        })
    }

    /// Worst size of `mu_j(a) - sum_k mu_{j+1}(a + k p^j)` over the table.
    pub fn check_distribution_relation(&self) -> Valuation {
        let p = self.prime();
        let mut worst = Valuation::Inf;
        for j in 0..self.depth {
            let m = pw(p, j);
            for a in 0..m {
                let mut s = self.values[j as usize][a].clone();
                for k in 0..p as usize {
                    s = &s - &self.values[j as usize + 1][a + k * m];
                }
                worst = worst.worst(s.size());
            }
        }
        worst
    }

    /// Empirical `B(mu)`: worst size of `p mu_{j+1}(a) - mu_j(a)`.
    pub fn volkenborn_defect(&self) -> Valuation {
        let p = self.prime();
        let mut worst = Valuation::Inf;
        for j in 0..self.depth {
            let m = pw(p, j);
            for (a, x) in self.values[j as usize + 1].iter().enumerate() {
                let d = &x.mul_int(p as i64) - &self.values[j as usize][a % m];
                worst = worst.worst(d.size());
            }
        }
        worst
    }

    /// The approximant `f_j(x) = p^j mu(x + p^j Z_p)`.
    pub fn limit_function(&self, x: i64, j: u32) -> Result<CycloElement> {
        self.check_level(j)?;
        Ok(self.value(j, x).shift_p(j as i64))
    }

    fn check_level(&self, j: u32) -> Result<()> {
        if j > self.depth {
            Err(Error::Depth(format!(
                "level {j} exceeds tabulated depth {}",
                self.depth
            )))
        } else {
            Ok(())
        }
    }

    /// `S_j = sum_{a < p^j} f(a) mu(a + p^j Z_p)`.
    pub fn riemann_sum(&self, f: &MahlerFunction, j: u32) -> Result<CycloElement> {
        self.check_level(j)?;
        let vals = f.values(&self.ctx, pw(self.prime(), j))?;
        Ok(dot(&self.ctx, &vals, &self.values[j as usize]))
    }

    /// Deepest Riemann sum together with `|S_N - S_{N-1}|`.
    pub fn volkenborn_integral(&self, f: &MahlerFunction) -> Result<IntegralReport> {
        let value = self.riemann_sum(f, self.depth)?;
        let cauchy_defect = if self.depth == 0 {
            Valuation::Inf
        } else {
            (&value - &self.riemann_sum(f, self.depth - 1)?).size()
        };
        Ok(IntegralReport {
            value,
            cauchy_defect,
            levels_used: self.depth,
        })
    }

    /// The constant `c = max(C p, |mu(Z_p)|)` with `C = max(B, |mu(Z_p)|)`, as a valuation.
    pub fn coefficient_bound(&self) -> Valuation {
        let mass = self.total_mass().size();
        let c_small = self.volkenborn_defect().worst(mass);
        let c_p = match c_small {
            Valuation::Fin(v) => Valuation::Fin(v - 1),
            Valuation::Inf => Valuation::Inf,
        };
        c_p.worst(mass)
    }

    /// `T_{N,m} = int C(x, m) dmu` at the deepest level, with its Cauchy
    /// defect and the check `|T_{N,m}| <= c m`.
    pub fn fourier_coefficient(&self, m: u64) -> Result<CoefficientReport> {
        let report = self.volkenborn_integral(&MahlerFunction::Binomial(m))?;
        let bound = self.coefficient_bound();
        let within_bound = m == 0 || bound_holds(self.prime(), &report.value.size(), &bound, m);
        Ok(CoefficientReport {
            m,
            value: report.value,
            cauchy_defect: report.cauchy_defect,
            bound,
            within_bound,
        })
    }

    /// `mu-hat(zeta_{p^j}^k) = sum_{a < p^j} zeta_{p^j}^{k a} mu(a + p^j Z_p)`.
    pub fn fourier_eval_at_root(&self, root: RootOfUnity) -> Result<CycloElement> {
        self.check_level(root.order_exp)?;
        let m = pw(self.prime(), root.order_exp);
        let mut terms = Vec::with_capacity(m);
        for (a, x) in self.values[root.order_exp as usize].iter().enumerate() {
            terms.push((
                x,
                self.ctx.root_exponent(root.order_exp, root.k * a as i64)?,
            ));
        }
        Ok(CycloElement::sum_zeta_twisted(&self.ctx, &terms))
    }

    /// Additive convolution on every level `0..=j`.
    pub fn convolve(&self, other: &Self, j: u32) -> Result<Self> {
        if self.ctx.level() != other.ctx.level() || self.ctx.precision() != other.ctx.precision() {
            return Err(Error::ContextMismatch {
                p: self.prime(),
                left: self.ctx.level(),
                right: other.ctx.level(),
            });
        }
        self.check_level(j)?;
        other.check_level(j)?;
        let p = self.prime();
        let mut values = Vec::with_capacity(j as usize + 1);
        for i in 0..=j {
            let m = pw(p, i);
            let (a, b) = (&self.values[i as usize], &other.values[i as usize]);
            let mut row = vec![self.ctx.zero(); m];
            for (x, bx) in a.iter().enumerate() {
                if bx.is_zero() && bx.absolute_precision() >= crate::padic::EXACT {
                    continue;
                }
                for (y, by) in b.iter().enumerate() {
                    let k = (x + y) % m;
                    row[k] = &row[k] + &(bx * by);
                }
            }
            values.push(row);
        }
        Ok(TabulatedDistribution {
            ctx: self.ctx.clone(),
            depth: j,
            values,
        })
    }

    /// Correction coefficients `g_m = int S^{m+1}(f_nu o iota) dmu` for
    /// `m < count`, using the level-`N` approximant of `f_nu` and
    /// `iota(x) = p^N - 1 - x`.
    pub fn correction_coefficients(
        nu: &Self,
        mu: &Self,
        count: usize,
    ) -> Result<Vec<CycloElement>> {
        let n = nu.depth.min(mu.depth);
        let big_p = pw(nu.prime(), n);
        let h: Vec<CycloElement> = (0..big_p)
            .map(|x| nu.values[n as usize][big_p - 1 - x].shift_p(n as i64))
            .collect();
        let mut s = h;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            s = indefinite_sum_values(&nu.ctx, &s, 1);
            out.push(dot(&nu.ctx, &s, &mu.values[n as usize]));
        }
        Ok(out)
    }

    /// Checks the transform identity: exact multiplicativity at every root of
    /// unity of order `<= p^j`, and the correction coefficients against a
    /// direct double sum.
    pub fn transform_identity_check(
        nu: &Self,
        mu: &Self,
        j: u32,
        count: usize,
    ) -> Result<TransformReport> {
        let conv = nu.convolve(mu, j)?;
        let p = nu.prime() as i64;
        let mut root_residual = Valuation::Inf;
        let mut roots_checked = 0;
        for i in 0..=j.min(nu.ctx.level() + 1) {
            let m = p.pow(i);
            for k in 0..m {
                if i > 0 && k % p == 0 {
                    continue;
                }
                let root = RootOfUnity { order_exp: i, k };
                let lhs = conv.fourier_eval_at_root(root)?;
                let rhs = &nu.fourier_eval_at_root(root)? * &mu.fourier_eval_at_root(root)?;
                root_residual = root_residual.worst((&lhs - &rhs).size());
                roots_checked += 1;
            }
        }
        let corrections = Self::correction_coefficients(nu, mu, count)?;
        let n = nu.depth.min(mu.depth);
        let big_p = pw(nu.prime(), n) as u64;
        let mut correction_residual = Valuation::Inf;
        for (m, g) in corrections.iter().enumerate() {
            // sum_s C(s,m) sum_{d=1}^{P-1-s} mu(s+d) P nu(P-d)
            let mut direct = nu.ctx.zero();
            for s in 0..big_p {
                let b = binomial(s, m as u64);
                if b.is_zero() {
                    continue;
                }
                let mut inner = nu.ctx.zero();
                for d in 1..big_p - s {
                    let t = mu.value(n, (s + d) as i64) * nu.value(n, (big_p - d) as i64);
                    inner = &inner + &t;
                }
                direct = &direct
                    + &inner.mul_scalar(&PadicScalar::from_bigint(
                        nu.prime(),
                        &b,
                        nu.ctx.precision(),
                    ));
            }
            let direct = direct.shift_p(n as i64);
            correction_residual = correction_residual.worst((g - &direct).size());
        }
        Ok(TransformReport {
            root_residual,
            roots_checked,
            corrections,
            correction_residual,
        })
    }
}

fn level_of(p: u32, len: usize) -> Result<u32> {
    let mut n = 0;
    let mut m = 1usize;
    while m < len {
        m *= p as usize;
        n += 1;
    }
    if m != len {
        return Err(Error::Depth(format!(
            "{len} coefficients is not a power of {p}"
        )));
    }
    Ok(n)
}

fn bound_holds(p: u32, size: &Valuation, bound: &Valuation, m: u64) -> bool {
    // |T| <= c m  <=>  v(T) >= v(c) - log_p m
    match (size, bound) {
        (Valuation::Inf, _) => true,
        (_, Valuation::Inf) => false,
        (Valuation::Fin(v), Valuation::Fin(c)) => {
            let lhs = *v.numer() as f64 / *v.denom() as f64;
            let rhs = *c.numer() as f64 / *c.denom() as f64 - (m as f64).ln() / (p as f64).ln();
            lhs >= rhs - 1e-9
        }
    }
}

fn dot(ctx: &Arc<FieldContext>, f: &[CycloElement], mu: &[CycloElement]) -> CycloElement {
    let mut acc = ctx.zero();
    for (x, y) in f.iter().zip(mu) {
        acc = &acc + &(x * y);
    }
    acc
}

/// A p-power root of unity `zeta_{p^order_exp}^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub order_exp: u32,
    pub k: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralReport {
    pub value: CycloElement,
    pub cauchy_defect: Valuation,
    pub levels_used: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientReport {
    pub m: u64,
    pub value: CycloElement,
    pub cauchy_defect: Valuation,
    /// The constant `c` as a valuation (`|c| = p^{-v}`).
    pub bound: Valuation,
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransformReport {
    pub root_residual: Valuation,
    pub roots_checked: usize,
    pub corrections: Vec<CycloElement>,
    pub correction_residual: Valuation,
}

/// A function on `Z_p` that can be evaluated on `0, 1, 2, ...`.
#[derive(Clone, Debug)]
pub enum MahlerFunction {
    /// `sum c_i x^i` with rational coefficients.
    Polynomial(Vec<Ratio<i64>>),
    /// `C(x, m)`.
    Binomial(u64),
    /// `T^x`.
    Power(CycloElement),
    /// Truncated Mahler series `sum a_m C(x, m)`.
    Mahler(Vec<CycloElement>),
    /// Values at `0, 1, ...`; evaluation past the end is an error.
    Table(Vec<CycloElement>),
}

impl MahlerFunction {
    /// `f(0), ..., f(count - 1)` in the ambient field.
    pub fn values(&self, ctx: &Arc<FieldContext>, count: usize) -> Result<Vec<CycloElement>> {
        let p = ctx.prime();
        let w = ctx.precision();
        Ok(match self {
            MahlerFunction::Polynomial(c) => {
                let coeffs = c
                    .iter()
                    .map(|r| PadicScalar::from_ratio(p, *r.numer(), *r.denom(), w))
                    .collect::<Result<Vec<_>>>()?;
                (0..count)
                    .map(|x| {
                        let xs = PadicScalar::from_int(p, x as i64, w);
                        let mut acc = PadicScalar::zero(p);
                        for c in coeffs.iter().rev() {
                            acc = acc.mul(&xs).add(c);
                        }
                        ctx.from_scalar(&acc)
                    })
                    .collect()
            }
            MahlerFunction::Binomial(m) => (0..count as u64)
                .map(|x| ctx.from_scalar(&PadicScalar::from_bigint(p, &binomial(x, *m), w)))
                .collect(),
            MahlerFunction::Power(t) => {
                let t = t.embed(ctx)?;
                let mut out = Vec::with_capacity(count);
                let mut acc = ctx.one();
                for _ in 0..count {
                    out.push(acc.clone());
                    acc = &acc * &t;
                }
                out
            }
            MahlerFunction::Mahler(a) => {
                let a = a.iter().map(|x| x.embed(ctx)).collect::<Result<Vec<_>>>()?;
                (0..count as u64)
                    .map(|x| {
                        let mut acc = ctx.zero();
                        for (m, am) in a.iter().enumerate().take(x as usize + 1) {
                            let b = PadicScalar::from_bigint(p, &binomial(x, m as u64), w);
                            acc = &acc + &am.mul_scalar(&b);
                        }
                        acc
                    })
                    .collect()
            }
            MahlerFunction::Table(v) => {
                if v.len() < count {
                    return Err(Error::Depth(format!(
                        "table has {} values, {count} needed",
                        v.len()
                    )));
                }
                v[..count]
                    .iter()
                    .map(|x| x.embed(ctx))
                    .collect::<Result<Vec<_>>>()?
            }
        })
    }
}

/// `a_m = (nabla^m f)(0)` from the values `f(0), ..., f(M)`.
pub fn mahler_coeffs(values: &[CycloElement]) -> Vec<CycloElement> {
    let mut diff = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    while let Some(first) = diff.first() {
        out.push(first.clone());
        diff = diff.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    out
}

/// Sizes `v(m a_m)`; a C^1 series has these tending to infinity.
pub fn c1_profile(coeffs: &[CycloElement]) -> Vec<Valuation> {
    coeffs
        .iter()
        .enumerate()
        .map(|(m, a)| a.mul_int(m as i64).size())
        .collect()
}

/// Largest `|m a_m|` over `m >= from`, as a valuation.
pub fn c1_defect(coeffs: &[CycloElement], from: usize) -> Valuation {
    c1_profile(coeffs)
        .into_iter()
        .skip(from)
        .fold(Valuation::Inf, Valuation::worst)
}

/// `S^r g` on `0..len`, where `(S g)(x) = sum_{y < x} g(y)`.
pub fn indefinite_sum_values(
    ctx: &Arc<FieldContext>,
    g: &[CycloElement],
    r: u32,
) -> Vec<CycloElement> {
    let mut cur = g.to_vec();
    for _ in 0..r {
        let mut acc = ctx.zero();
        let mut next = Vec::with_capacity(cur.len());
        for x in &cur {
            next.push(acc.clone());
            acc = &acc + x;
        }
        cur = next;
    }
    cur
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    p: u32,
    depth: u32,
    ambient_level: u32,
    precision: u32,
    values: Vec<Vec<CycloElement>>,
}

impl Serialize for TabulatedDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionJson {
            p: self.prime(),
            depth: self.depth,
            ambient_level: self.ctx.level(),
            precision: self.ctx.precision(),
            values: self.values.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TabulatedDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = DistributionJson::deserialize(d)?;
        let ctx = FieldContext::get(j.p, j.ambient_level, j.precision).map_err(D::Error::custom)?;
        if j.values.len() != j.depth as usize + 1 {
            return Err(D::Error::custom(
                "depth does not match the number of levels",
            ));
        }
        TabulatedDistribution::from_values(&ctx, j.values).map_err(D::Error::custom)
    }
}
