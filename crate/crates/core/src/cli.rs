//! The `volk` command-line driver.
//!
//! Every subcommand maps onto one library operation and produces a report
//! (text, CSV or JSON). Exit codes: 0 when every check passes, 1 when a
//! verification fails, 2 on invalid flags or configuration.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::characters::DirichletCharacter;
use crate::coherent::{NormCoherentSequence, SequenceRule};
use crate::cyclo::{CycloElement, FieldContext};
use crate::error::Error;
use crate::interp::{self, agreement_digits};
use crate::padic::{is_odd_prime, PadicScalar, Valuation, DEFAULT_PRECISION};
use crate::volkenborn::{c1_profile, mahler_coeffs, MahlerFunction, TabulatedDistribution};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "volk",
    version,
    about = "p-adic distributions, Volkenborn integrals and Gauss-sum interpolation checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Check the distribution relation of --dist.
    CheckDist,
    /// Volkenborn defect and coefficient bound of --dist.
    Defect,
    /// Volkenborn integral of --f against --dist.
    Integrate,
    /// Mahler coefficients of --f and their C^1 profile.
    Mahler,
    /// Fourier coefficients int C(x, m) d(dist) for m = 1..=M with the bound check.
    Fourier,
    /// Transform identity for --dist (nu) and --mu.
    TransformVerify,
    /// Norm coherence of --seq.
    Coherence,
    /// Gauss sums and the identity tau(phi) tau(conj phi) = phi(-1) f.
    Gauss,
    /// Leopoldt's L_p(1, phi) for an even character.
    Lp1,
    /// Two-path check of the interpolation formula.
    InterpVerify,
    /// Table of unit ratios over the tame indices c.
    UnitRatio,
    /// The group-ring element M = Upsilon^{-1} Xi and its integrality.
    Annihilator,
    /// Regulator product ratio and group-determinant identity.
    Regulator,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Raw flags; all optional so that a config file can fill the gaps.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Odd prime, 3 <= p <= 13.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Tabulation depth N (0..=3).
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Level n of the wild character / field K_n (0..=3).
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Working precision W in base-p digits (>= 16).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Tame exponent j of chi = omega^j.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub chi: Option<i64>,
    /// Wild exponent u of psi; omitted means every psi of level n.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub psi: Option<i64>,
    /// Tame index t of the interpolation formula.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t: Option<i64>,
    /// Tame index c of the unit zeta_{p-1}^c - zeta.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub c: Option<i64>,
    /// haar | dirac:c | group-ring:c0,c1,... | lambda:<seq> | lambda-chi:<j>:<seq> | json:<path>
    #[arg(long, global = true)]
    pub dist: Option<String>,
    /// Second distribution for transform-verify (default dirac:0).
    #[arg(long, global = true)]
    pub mu: Option<String>,
    /// one-minus-zeta | cyclo-unit:c=K | cyclotomic-generator | json:<path>
    #[arg(long, global = true)]
    pub seq: Option<String>,
    /// Function: polynomial such as "x^2" or "3x^2-x+1/2", "binom(x,m)", "mahler:a0,a1,..."
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Count of coefficients (fourier, mahler, transform-verify).
    #[arg(long, global = true)]
    pub m: Option<u64>,
    /// Expected rational value of the integral, e.g. 1/6.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub expect: Option<String>,
    /// Minimum number of agreeing digits for a pass.
    #[arg(long, global = true)]
    pub digits: Option<i64>,
    /// Number of random circulants checked by `regulator`.
    #[arg(long, global = true)]
    pub circulants: Option<usize>,
    /// Seed for the random circulants.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Config file with `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Resolved configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub p: u32,
    pub depth: Option<u32>,
    pub n: u32,
    pub precision: u32,
    pub chi: i64,
    pub psi: Option<i64>,
    pub t: i64,
    pub c: Option<i64>,
    pub dist: String,
    pub mu: String,
    pub seq: String,
    pub f: Option<String>,
    pub m: Option<u64>,
    pub expect: Option<String>,
    pub digits: Option<i64>,
    pub circulants: usize,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPrime(_)
            | Error::Parse(_)
            | Error::Invalid(_)
            | Error::Depth(_)
            | Error::Json(_)
            | Error::TrivialCharacter
            | Error::OddCharacter
            | Error::WildCharacter => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!("config line {}: expected key = value", i + 1));
        };
        let v = v.trim().trim_matches('"');
        out.insert(k.trim().replace('_', "-"), v.to_string());
    }
    Ok(out)
}

fn merge<T: std::str::FromStr>(
    flag: Option<T>,
    conf: &mut BTreeMap<String, String>,
    key: &str,
) -> CliResult<Option<T>> {
    let from_file = conf.remove(key);
    if flag.is_some() {
        return Ok(flag);
    }
    match from_file {
        None => Ok(None),
        Some(s) => s
            .parse()
            .map(Some)
            .or_else(|_| usage(format!("config key '{key}': cannot parse '{s}'"))),
    }
}

impl RunConfig {
    pub fn resolve(flags: Flags) -> CliResult<Self> {
        let mut conf = match &flags.config {
            None => BTreeMap::new(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .or_else(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
                parse_config(&text)?
            }
        };
        let format = match merge::<String>(
            flags.format.map(|f| format!("{f:?}").to_lowercase()),
            &mut conf,
            "format",
        )? {
            None => Format::Text,
            Some(s) => {
                Format::from_str(&s, true).or_else(|_| usage(format!("unknown format '{s}'")))?
            }
        };
        let cfg = RunConfig {
            p: merge(flags.p, &mut conf, "p")?.unwrap_or(5),
            depth: merge(flags.depth, &mut conf, "depth")?,
            n: merge(flags.n, &mut conf, "n")?.unwrap_or(0),
            precision: merge(flags.precision, &mut conf, "precision")?.unwrap_or(DEFAULT_PRECISION),
            chi: merge(flags.chi, &mut conf, "chi")?.unwrap_or(2),
            psi: merge(flags.psi, &mut conf, "psi")?,
            t: merge(flags.t, &mut conf, "t")?.unwrap_or(0),
            c: merge(flags.c, &mut conf, "c")?,
            dist: merge(flags.dist, &mut conf, "dist")?.unwrap_or_else(|| "haar".into()),
            mu: merge(flags.mu, &mut conf, "mu")?.unwrap_or_else(|| "dirac:0".into()),
            seq: merge(flags.seq, &mut conf, "seq")?.unwrap_or_else(|| "one-minus-zeta".into()),
            f: merge(flags.f, &mut conf, "f")?,
            m: merge(flags.m, &mut conf, "m")?,
            expect: merge(flags.expect, &mut conf, "expect")?,
            digits: merge(flags.digits, &mut conf, "digits")?,
            circulants: merge(flags.circulants, &mut conf, "circulants")?.unwrap_or(0),
            seed: merge(flags.seed, &mut conf, "seed")?.unwrap_or(7),
            format,
            out: merge(flags.out, &mut conf, "out")?,
        };
        if let Some(k) = conf.keys().next() {
            return usage(format!("unknown config key '{k}'"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        if !(3..=13).contains(&self.p) || !is_odd_prime(self.p) {
            return usage(format!(
                "--p must be an odd prime between 3 and 13, got {}",
                self.p
            ));
        }
        if let Some(d) = self.depth {
            if d > 3 {
                return usage(format!("--depth must be at most 3, got {d}"));
            }
        }
        if self.n > 3 {
            return usage(format!("--n must be at most 3, got {}", self.n));
        }
        if self.precision < 16 {
            return usage(format!(
                "--precision must be at least 16, got {}",
                self.precision
            ));
        }
        Ok(())
    }

    fn depth_or(&self, default: u32) -> u32 {
        self.depth.unwrap_or(default)
    }
}

/// A finished report: pass flag, summary lines, JSON payload and an optional table.
pub struct Report {
    pub command: Command,
    pub passed: bool,
    pub summary: Vec<(String, String)>,
    pub payload: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckDist => "check-dist",
            Command::Defect => "defect",
            Command::Integrate => "integrate",
            Command::Mahler => "mahler",
            Command::Fourier => "fourier",
            Command::TransformVerify => "transform-verify",
            Command::Coherence => "coherence",
            Command::Gauss => "gauss",
            Command::Lp1 => "lp1",
            Command::InterpVerify => "interp-verify",
            Command::UnitRatio => "unit-ratio",
            Command::Annihilator => "annihilator",
            Command::Regulator => "regulator",
        }
    }
}

impl Report {
    pub fn render(&self, cfg: &RunConfig) -> String {
        match cfg.format {
            Format::Json => {
                let v = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": self.command.name(),
                    "passed": self.passed,
                    "config": cfg,
                    "result": self.payload,
                });
                serde_json::to_string_pretty(&v).unwrap() + "\n"
            }
            Format::Csv => {
                let mut s = String::new();
                match &self.table {
                    Some(t) => {
                        s.push_str(&t.headers.join(","));
                        s.push('\n');
                        for r in &t.rows {
                            s.push_str(
                                &r.iter().map(|x| csv_field(x)).collect::<Vec<_>>().join(","),
                            );
                            s.push('\n');
                        }
                    }
                    None => {
                        s.push_str("key,value\n");
                        for (k, v) in &self.summary {
                            let _ = writeln!(s, "{},{}", csv_field(k), csv_field(v));
                        }
                    }
                }
                s
            }
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(
                    s,
                    "{}: {}",
                    self.command.name(),
                    if self.passed { "PASS" } else { "FAIL" }
                );
                let width = self.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.summary {
                    let _ = writeln!(s, "  {k:width$}  {v}");
                }
                if let Some(t) = &self.table {
                    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.len()).collect();
                    for r in &t.rows {
                        for (w, x) in widths.iter_mut().zip(r) {
                            *w = (*w).max(x.len());
                        }
                    }
                    let line = |cells: Vec<&str>| {
                        cells
                            .iter()
                            .zip(&widths)
                            .map(|(c, w)| format!("{c:>w$}"))
                            .collect::<Vec<_>>()
                            .join("  ")
                    };
                    let _ = writeln!(s, "  {}", line(t.headers.clone()));
                    for r in &t.rows {
                        let _ = writeln!(s, "  {}", line(r.iter().map(String::as_str).collect()));
                    }
                }
                s
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn parse_rational(s: &str) -> CliResult<Ratio<i64>> {
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((a, b)) => match (a.trim().parse::<i64>(), b.trim().parse::<i64>()) {
            (Ok(a), Ok(b)) if b != 0 => Ratio::new(a, b),
            _ => return usage(format!("bad rational '{s}'")),
        },
        None => Ratio::from(
            s.parse::<i64>()
                .or_else(|_| usage(format!("bad rational '{s}'")))?,
        ),
    };
    Ok(r)
}

fn rational_element(ctx: &Arc<FieldContext>, r: Ratio<i64>) -> CliResult<CycloElement> {
    Ok(ctx.from_scalar(&PadicScalar::from_ratio(
        ctx.prime(),
        *r.numer(),
        *r.denom(),
        ctx.precision(),
    )?))
}

/// Parses `x^2`, `3x^2 - x + 1/2`, `2*x^3`, ... into rational coefficients.
pub fn parse_polynomial(s: &str) -> CliResult<Vec<Ratio<i64>>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return usage("empty polynomial");
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-')
            && i > start
            && !compact[..i].ends_with('^')
            && !compact[..i].ends_with('/')
        {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    let mut coeffs: Vec<Ratio<i64>> = Vec::new();
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, term.strip_prefix('+').unwrap_or(term)),
        };
        let (coef, deg) = match body.find('x') {
            None => (parse_rational(body)?, 0usize),
            Some(k) => {
                let c = body[..k].trim_end_matches('*');
                let c = if c.is_empty() {
                    Ratio::from(1)
                } else {
                    parse_rational(c)?
                };
                let rest = &body[k + 1..];
                let d = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|e| e.parse().ok())
                        .ok_or_else(|| CliError::Usage(format!("bad term '{term}' in '{s}'")))?
                };
                (c, d)
            }
        };
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, Ratio::from(0));
        }
        coeffs[deg] += coef * sign;
    }
    Ok(coeffs)
}

fn parse_function(ctx: &Arc<FieldContext>, s: &str) -> CliResult<MahlerFunction> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("binom(").and_then(|r| r.strip_suffix(')')) {
        let m = inner
            .split_once(',')
            .filter(|(x, _)| x.trim() == "x")
            .and_then(|(_, m)| m.trim().parse().ok())
            .ok_or_else(|| CliError::Usage(format!("expected binom(x,m), got '{s}'")))?;
        return Ok(MahlerFunction::Binomial(m));
    }
    if let Some(list) = s.strip_prefix("mahler:") {
        let a = list
            .split(',')
            .map(|x| rational_element(ctx, parse_rational(x)?))
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(MahlerFunction::Mahler(a));
    }
    Ok(MahlerFunction::Polynomial(parse_polynomial(s)?))
}

fn parse_sequence(cfg: &RunConfig, spec: &str, depth: u32) -> CliResult<NormCoherentSequence> {
    if let Some(path) = spec.strip_prefix("json:") {
        let text =
            std::fs::read_to_string(path).or_else(|e| usage(format!("cannot read {path}: {e}")))?;
        let seq = NormCoherentSequence::from_json(&text)?;
        if seq.prime() != cfg.p {
            return usage(format!(
                "sequence in {path} is for p = {}, not {}",
                seq.prime(),
                cfg.p
            ));
        }
        return Ok(seq);
    }
    let rule: SequenceRule = spec.parse()?;
    Ok(NormCoherentSequence::build(
        rule,
        cfg.p,
        depth,
        cfg.precision,
    )?)
}

/// Level of the ambient field the given distribution specs require.
fn ambient_level(cfg: &RunConfig, specs: &[&str], depth: u32) -> u32 {
    if specs.iter().any(|s| s.starts_with("lambda")) {
        depth.max(cfg.n)
    } else {
        cfg.n
    }
}

fn parse_distribution(
    cfg: &RunConfig,
    spec: &str,
    depth: u32,
    level: u32,
) -> CliResult<TabulatedDistribution> {
    let ctx = FieldContext::get(cfg.p, level, cfg.precision)?;
    let spec = spec.trim();
    if spec == "haar" {
        return Ok(TabulatedDistribution::haar(&ctx, depth));
    }
    if let Some(c) = spec.strip_prefix("dirac:") {
        let c = c
            .trim()
            .parse()
            .or_else(|_| usage(format!("bad Dirac point '{c}'")))?;
        return Ok(TabulatedDistribution::dirac(&ctx, c, depth));
    }
    if let Some(list) = spec.strip_prefix("group-ring:") {
        let coeffs = list
            .split(',')
            .map(|x| x.trim().parse::<i64>().map(|v| ctx.from_int(v)))
            .collect::<std::result::Result<Vec<_>, _>>()
            .or_else(|_| usage(format!("bad group-ring coefficients '{list}'")))?;
        return Ok(TabulatedDistribution::from_group_ring(
            &ctx, &coeffs, depth,
        )?);
    }
    if let Some(seq) = spec.strip_prefix("lambda:") {
        let lam = parse_sequence(cfg, seq, depth)?.lambda(depth)?;
        return match_level(lam, level);
    }
    if let Some(rest) = spec.strip_prefix("lambda-chi:") {
        let (j, seq) = rest.split_once(':').ok_or_else(|| {
            CliError::Usage(format!("expected lambda-chi:<j>:<seq>, got '{spec}'"))
        })?;
        let j = j
            .parse()
            .or_else(|_| usage(format!("bad tame exponent '{j}'")))?;
        let lam = parse_sequence(cfg, seq, depth)?.lambda_chi(j, depth)?;
        return match_level(lam, level);
    }
    if let Some(path) = spec.strip_prefix("json:") {
        let text =
            std::fs::read_to_string(path).or_else(|e| usage(format!("cannot read {path}: {e}")))?;
        let d: TabulatedDistribution = serde_json::from_str(&text).map_err(Error::from)?;
        if d.prime() != cfg.p {
            return usage(format!(
                "distribution in {path} is for p = {}, not {}",
                d.prime(),
                cfg.p
            ));
        }
        return Ok(d);
    }
    usage(format!("unknown distribution '{spec}'"))
}

fn match_level(d: TabulatedDistribution, level: u32) -> CliResult<TabulatedDistribution> {
    if d.ambient_level() == level {
        return Ok(d);
    }
    let ctx = FieldContext::get(d.prime(), level, d.context().precision())?;
    let values = (0..=d.depth())
        .map(|j| {
            d.level(j)
                .iter()
                .map(|x| x.embed(&ctx))
                .collect::<crate::Result<Vec<_>>>()
        })
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(TabulatedDistribution::from_values(&ctx, values)?)
}

fn scalar_json(x: &CycloElement) -> Value {
    match x.as_scalar() {
        Some(s) => json!({ "element": x, "scalar": s }),
        None => json!({ "element": x }),
    }
}

fn characters(cfg: &RunConfig) -> CliResult<Vec<DirichletCharacter>> {
    match cfg.psi {
        Some(u) => Ok(vec![DirichletCharacter::new(cfg.p, cfg.n, cfg.chi, u)?]),
        None => Ok(DirichletCharacter::with_tame(cfg.p, cfg.n, cfg.chi)?),
    }
}

fn check_dist(cfg: &RunConfig) -> CliResult<Report> {
    let depth = cfg.depth_or(2);
    let mu = parse_distribution(
        cfg,
        &cfg.dist,
        depth,
        ambient_level(cfg, &[&cfg.dist], depth),
    )?;
    let residual = mu.check_distribution_relation();
    Ok(Report {
        command: Command::CheckDist,
        passed: residual.is_inf(),
        summary: vec![
            kv("dist", &cfg.dist),
            kv("depth", depth),
            kv("ambient_level", mu.ambient_level()),
            kv("residual_valuation", residual),
            kv("total_mass", mu.total_mass()),
        ],
        payload: json!({
            "dist": cfg.dist,
            "depth": depth,
            "residual_valuation": residual,
            "total_mass": mu.total_mass(),
            "distribution": mu,
        }),
        table: None,
    })
}

fn defect(cfg: &RunConfig) -> CliResult<Report> {
    let depth = cfg.depth_or(2);
    let mu = parse_distribution(
        cfg,
        &cfg.dist,
        depth,
        ambient_level(cfg, &[&cfg.dist], depth),
    )?;
    let relation = mu.check_distribution_relation();
    let defect = mu.volkenborn_defect();
    let bound = mu.coefficient_bound();
    Ok(Report {
        command: Command::Defect,
        passed: relation.is_inf(),
        summary: vec![
            kv("dist", &cfg.dist),
            kv("depth", depth),
            kv("relation_residual", relation),
            kv("defect_valuation", defect),
            kv("bound_valuation", bound),
        ],
        payload: json!({
            "dist": cfg.dist,
            "depth": depth,
            "relation_residual": relation,
            "defect_valuation": defect,
            "bound_valuation": bound,
        }),
        table: None,
    })
}

fn integrate(cfg: &RunConfig) -> CliResult<Report> {
    let depth = cfg.depth_or(3);
    let Some(f) = &cfg.f else {
        return usage("integrate needs --f");
    };
    let mu = parse_distribution(
        cfg,
        &cfg.dist,
        depth,
        ambient_level(cfg, &[&cfg.dist], depth),
    )?;
    let func = parse_function(mu.context(), f)?;
    let report = mu.volkenborn_integral(&func)?;
    let relation = mu.check_distribution_relation();
    let mut passed = relation.is_inf();
    let mut summary = vec![
        kv("dist", &cfg.dist),
        kv("f", f),
        kv("depth", depth),
        kv("value", &report.value),
        kv("cauchy_defect", report.cauchy_defect),
    ];
    let mut expected = Value::Null;
    if let Some(e) = &cfg.expect {
        let r = parse_rational(e)?;
        let digits = agreement_digits(&report.value, &rational_element(mu.context(), r)?);
        let need = cfg.digits.unwrap_or(depth as i64 - 1);
        passed &= digits >= need;
        summary.push(kv("expected", r));
        summary.push(kv("agreement_digits", digits));
        expected = json!({ "value": r.to_string(), "agreement_digits": digits, "required": need });
    }
    let sums = (0..=depth)
        .map(|j| mu.riemann_sum(&func, j))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok(Report {
        command: Command::Integrate,
        passed,
        summary,
        payload: json!({
            "dist": cfg.dist,
            "f": f,
            "depth": depth,
            "value": scalar_json(&report.value),
            "cauchy_defect": report.cauchy_defect,
            "riemann_sums": sums,
            "expected": expected,
        }),
        table: None,
    })
}

fn mahler(cfg: &RunConfig) -> CliResult<Report> {
    let Some(f) = &cfg.f else {
        return usage("mahler needs --f");
    };
    let count = cfg.m.unwrap_or(20) as usize;
    let ctx = FieldContext::get(cfg.p, cfg.n, cfg.precision)?;
    let func = parse_function(&ctx, f)?;
    let a = mahler_coeffs(&func.values(&ctx, count)?);
    let profile = c1_profile(&a);
    let rows = a
        .iter()
        .zip(&profile)
        .enumerate()
        .map(|(m, (am, v))| vec![m.to_string(), am.size().to_string(), v.to_string()])
        .collect();
    Ok(Report {
        command: Command::Mahler,
        passed: true,
        summary: vec![kv("f", f), kv("coefficients", count)],
        payload: json!({ "f": f, "coefficients": a, "c1_profile": profile }),
        table: Some(Table {
            headers: vec!["m", "a_m_valuation", "m_a_m_valuation"],
            rows,
        }),
    })
}

fn fourier(cfg: &RunConfig) -> CliResult<Report> {
    let depth = cfg.depth_or(3);
    let top = cfg.m.unwrap_or(40);
    let mu = parse_distribution(
        cfg,
        &cfg.dist,
        depth,
        ambient_level(cfg, &[&cfg.dist], depth),
    )?;
    let bound = mu.coefficient_bound();
    let mut passed = true;
    let mut rows = Vec::new();
    let mut coeffs = Vec::new();
    for m in 1..=top {
        let r = mu.fourier_coefficient(m)?;
        passed &= r.within_bound;
        rows.push(vec![
            m.to_string(),
            r.value.size().to_string(),
            r.cauchy_defect.to_string(),
            r.within_bound.to_string(),
        ]);
        coeffs.push(r);
    }
    Ok(Report {
        command: Command::Fourier,
        passed,
        summary: vec![
            kv("dist", &cfg.dist),
            kv("depth", depth),
            kv("bound_valuation", bound),
            kv("max_m", top),
        ],
        payload: json!({ "dist": cfg.dist, "depth": depth, "bound_valuation": bound, "coefficients": coeffs }),
        table: Some(Table {
            headers: vec!["m", "valuation", "cauchy_defect", "within_bound"],
            rows,
        }),
    })
}

fn transform_verify(cfg: &RunConfig) -> CliResult<Report> {
    let depth = cfg.depth_or(2);
    let count = cfg.m.unwrap_or(10) as usize;
    let level = ambient_level(cfg, &[&cfg.dist, &cfg.mu], depth);
    let nu = parse_distribution(cfg, &cfg.dist, depth, level)?;
    let mu = parse_distribution(cfg, &cfg.mu, depth, level)?;
    let r = TabulatedDistribution::transform_identity_check(&nu, &mu, depth, count)?;
    Ok(Report {
        command: Command::TransformVerify,
        passed: r.root_residual.is_inf() && r.correction_residual.is_inf(),
        summary: vec![
            kv("nu", &cfg.dist),
            kv("mu", &cfg.mu),
            kv("depth", depth),
            kv("roots_checked", r.roots_checked),
            kv("root_residual", r.root_residual),
            kv("correction_residual", r.correction_residual),
        ],
        payload: json!({ "nu": cfg.dist, "mu": cfg.mu, "depth": depth, "report": r }),
        table: None,
    })
}

fn coherence(cfg: &RunConfig) -> CliResult<Report> {
    let depth = cfg.depth_or(2);
    let seq = parse_sequence(cfg, &cfg.seq, depth)?;
    let mut rows = Vec::new();
    let mut worst = Valuation::Inf;
    for n in 1..seq.levels().len() {
        let (norm, outside) = seq.levels()[n].norm_with_residual()?;
        let r = outside.worst((&norm - &seq.levels()[n - 1]).size());
        worst = worst.worst(r);
        rows.push(vec![cfg.p.to_string(), n.to_string(), r.to_string()]);
    }
    Ok(Report {
        command: Command::Coherence,
        passed: worst.is_inf(),
        summary: vec![
            kv("seq", &cfg.seq),
            kv("depth", seq.depth()),
            kv("residual_valuation", worst),
        ],
        payload: json!({ "seq": cfg.seq, "depth": seq.depth(), "residual_valuation": worst, "levels": seq.levels() }),
        table: Some(Table {
            headers: vec!["p", "n", "residual_valuation"],
            rows,
        }),
    })
}

fn gauss(cfg: &RunConfig) -> CliResult<Report> {
    let ctx = FieldContext::get(cfg.p, cfg.n, cfg.precision)?;
    let mut passed = true;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for phi in characters(cfg)? {
        if phi.is_trivial() {
            continue;
        }
        let tau = phi.gauss_sum(&ctx)?;
        let residual = phi.gauss_identity_residual(&ctx)?;
        passed &= residual.is_inf();
        rows.push(vec![
            cfg.p.to_string(),
            cfg.n.to_string(),
            phi.tame_exponent().to_string(),
            phi.wild_exponent().to_string(),
            phi.conductor().to_string(),
            tau.size().to_string(),
            residual.to_string(),
        ]);
        items.push(json!({
            "character": phi.to_string(),
            "conductor": phi.conductor(),
            "gauss_sum": tau,
            "residual_valuation": residual,
        }));
    }
    if items.is_empty() {
        return usage("only the trivial character was selected");
    }
    Ok(Report {
        command: Command::Gauss,
        passed,
        summary: vec![
            kv("p", cfg.p),
            kv("n", cfg.n),
            kv("chi_exp", cfg.chi),
            kv("characters", items.len()),
        ],
        payload: json!({ "characters": items }),
        table: Some(Table {
            headers: vec![
                "p",
                "n",
                "chi_exp",
                "psi_exp",
                "conductor",
                "tau_valuation",
                "residual_valuation",
            ],
            rows,
        }),
    })
}

fn lp1(cfg: &RunConfig) -> CliResult<Report> {
    let phi = DirichletCharacter::new(cfg.p, cfg.n, cfg.chi, cfg.psi.unwrap_or(0))?;
    let value = interp::leopoldt_lp1(&phi, cfg.precision)?;
    Ok(Report {
        command: Command::Lp1,
        passed: true,
        summary: vec![
            kv("character", phi),
            kv("value", &value),
            kv("valuation", value.size()),
        ],
        payload: json!({ "character": phi.to_string(), "value": scalar_json(&value), "valuation": value.size() }),
        table: None,
    })
}

fn interp_verify(cfg: &RunConfig) -> CliResult<Report> {
    let depth = cfg.depth_or(cfg.n);
    if depth < cfg.n {
        return usage(format!("--depth {depth} is below --n {}", cfg.n));
    }
    let need = cfg.digits.unwrap_or(10);
    let seq = NormCoherentSequence::build(
        SequenceRule::CycloUnit { c: cfg.t },
        cfg.p,
        depth,
        cfg.precision,
    )?;
    let mut passed = true;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for phi in characters(cfg)? {
        let r = interp::verify_interpolation_with(
            &seq,
            cfg.chi,
            phi.wild_exponent() as i64,
            cfg.n,
            cfg.t,
        )?;
        passed &= r.passed(need);
        rows.push(vec![
            cfg.p.to_string(),
            cfg.n.to_string(),
            phi.tame_exponent().to_string(),
            phi.wild_exponent().to_string(),
            cfg.t.to_string(),
            r.residual.to_string(),
            r.digits.to_string(),
            r.leopoldt_digits.map_or("-".into(), |d| d.to_string()),
        ]);
        items.push(r);
    }
    let worst = items.iter().map(|r| r.digits).min().unwrap_or(0);
    Ok(Report {
        command: Command::InterpVerify,
        passed,
        summary: vec![
            kv("p", cfg.p),
            kv("n", cfg.n),
            kv("chi_exp", cfg.chi),
            kv("t", cfg.t),
            kv("depth", depth),
            kv("min_digits", worst),
            kv("required_digits", need),
        ],
        payload: json!({ "required_digits": need, "reports": items }),
        table: Some(Table {
            headers: vec![
                "p",
                "n",
                "chi_exp",
                "psi_exp",
                "t",
                "residual_valuation",
                "digits",
                "leopoldt_digits",
            ],
            rows,
        }),
    })
}

fn unit_ratio(cfg: &RunConfig) -> CliResult<Report> {
    let n = cfg.n.max(1);
    let table = interp::unit_ratio_table(cfg.p, cfg.chi, n, cfg.precision)?;
    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                cfg.p.to_string(),
                n.to_string(),
                table.tame.to_string(),
                r.psi.to_string(),
                r.c.to_string(),
                r.ratio_valuation.map_or("inf".into(), |v| v.to_string()),
            ]
        })
        .collect();
    Ok(Report {
        command: Command::UnitRatio,
        passed: !table.valid.is_empty(),
        summary: vec![
            kv("p", cfg.p),
            kv("n", n),
            kv("chi_exp", table.tame),
            kv("valid_c", format!("{:?}", table.valid)),
        ],
        payload: serde_json::to_value(&table).map_err(Error::from)?,
        table: Some(Table {
            headers: vec!["p", "n", "chi_exp", "psi_exp", "c", "ratio_valuation"],
            rows,
        }),
    })
}

/// `--c`, or the first tame index passing the unit-ratio test.
fn select_c(cfg: &RunConfig) -> CliResult<i64> {
    if let Some(c) = cfg.c {
        return Ok(c);
    }
    let table = interp::unit_ratio_table(cfg.p, cfg.chi, cfg.n.max(1), cfg.precision)?;
    table
        .valid
        .first()
        .copied()
        .ok_or_else(|| CliError::Failure("no tame index c passes the unit-ratio test".into()))
}

fn annihilator(cfg: &RunConfig) -> CliResult<Report> {
    let c = select_c(cfg)?;
    let need = cfg.digits.unwrap_or(8);
    let r = interp::annihilator_m(cfg.p, cfg.chi, c, cfg.n, cfg.precision)?;
    let mut summary = vec![
        kv("p", cfg.p),
        kv("n", cfg.n),
        kv("chi_exp", r.tame),
        kv("c", c),
        kv("integral", r.integrality.integral),
        kv("digits", r.integrality.digits),
        kv("min_valuation", r.integrality.min_valuation),
    ];
    let mut projection = Value::Null;
    if cfg.n >= 1 {
        let low = interp::annihilator_m(cfg.p, cfg.chi, c, cfg.n - 1, cfg.precision)?;
        let proj = r.element.project(cfg.n - 1)?;
        let ctx = proj.context().clone();
        let digits = proj
            .coeffs()
            .iter()
            .zip(low.element.coeffs())
            .map(|(x, y)| y.embed(&ctx).map(|y| agreement_digits(x, &y)))
            .collect::<crate::Result<Vec<_>>>()?
            .into_iter()
            .min()
            .unwrap_or(0);
        summary.push(kv("projection_digits", digits));
        projection = json!(digits);
    }
    Ok(Report {
        command: Command::Annihilator,
        passed: r.integrality.integral && r.integrality.digits >= need,
        summary,
        payload: json!({ "report": r, "projection_digits": projection, "required_digits": need }),
        table: None,
    })
}

fn regulator(cfg: &RunConfig) -> CliResult<Report> {
    let c = select_c(cfg)?;
    let need = cfg.digits.unwrap_or(10);
    let r = interp::regulator_product_check(cfg.p, cfg.chi, c, cfg.n, cfg.precision)?;
    let mut passed = r.ratio_valuation == Valuation::int(0)
        && (r.group_determinant_residual.is_inf() || r.group_determinant_residual.at_least(need));
    let mut circ_pass = 0;
    if cfg.circulants > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let size = (cfg.p as usize).pow(cfg.n.max(1));
        for _ in 0..cfg.circulants {
            let v: Vec<i64> = (0..size).map(|_| rng.gen_range(-9..=9)).collect();
            if interp::circulant_check(cfg.p, &v, cfg.precision)? {
                circ_pass += 1;
            }
        }
        passed &= circ_pass == cfg.circulants;
    }
    Ok(Report {
        command: Command::Regulator,
        passed,
        summary: vec![
            kv("p", cfg.p),
            kv("n", cfg.n),
            kv("chi_exp", r.tame),
            kv("c", c),
            kv("ratio_valuation", r.ratio_valuation),
            kv("group_determinant_residual", r.group_determinant_residual),
            kv("circulants", format!("{circ_pass}/{}", cfg.circulants)),
        ],
        payload: json!({ "report": r, "circulants_checked": cfg.circulants, "circulants_passed": circ_pass }),
        table: None,
    })
}

pub fn execute(command: Command, cfg: &RunConfig) -> CliResult<Report> {
    match command {
        Command::CheckDist => check_dist(cfg),
        Command::Defect => defect(cfg),
        Command::Integrate => integrate(cfg),
        Command::Mahler => mahler(cfg),
        Command::Fourier => fourier(cfg),
        Command::TransformVerify => transform_verify(cfg),
        Command::Coherence => coherence(cfg),
        Command::Gauss => gauss(cfg),
        Command::Lp1 => lp1(cfg),
        Command::InterpVerify => interp_verify(cfg),
        Command::UnitRatio => unit_ratio(cfg),
        Command::Annihilator => annihilator(cfg),
        Command::Regulator => regulator(cfg),
    }
}

/// Parse `argv`, run, write the report; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::resolve(cli.flags).and_then(|cfg| {
        let report = execute(cli.command, &cfg)?;
        let text = report.render(&cfg);
        match &cfg.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(report.passed)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("verification failed");
            1
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("verification failed: {msg}");
            1
        }
    }
}
