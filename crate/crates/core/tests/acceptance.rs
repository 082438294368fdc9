//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Tolerances are fixed below; working precision is 32 base-p digits.

use std::sync::Arc;
use std::time::Instant;

use num_rational::Ratio;
use padic_volkenborn::characters::DirichletCharacter;
use padic_volkenborn::coherent::{NormCoherentSequence, SequenceRule};
use padic_volkenborn::cyclo::{CycloElement, FieldContext};
use padic_volkenborn::interp::{
    agreement_digits, annihilator_m, circulant_check, leopoldt_lp1, regulator_product_check,
    unit_ratio_table, verify_interpolation_with,
};
use padic_volkenborn::padic::{PadicScalar, Valuation};
use padic_volkenborn::volkenborn::{MahlerFunction, TabulatedDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const W: u32 = 32;
/// Criterion 6 and 7: agreement to at least this many base-p digits.
const L_VALUE_DIGITS: i64 = 10;
/// Criterion 9.
const INTEGRAL_DIGITS: i64 = 8;
const COHERENCE_DIGITS: i64 = 6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn ctx(p: u32, n: u32) -> Arc<FieldContext> {
    FieldContext::get(p, n, W).unwrap()
}

fn rational(c: &Arc<FieldContext>, a: i64, b: i64) -> CycloElement {
    c.from_scalar(&PadicScalar::from_ratio(c.prime(), a, b, W).unwrap())
}

fn random_measure(
    c: &Arc<FieldContext>,
    level: u32,
    depth: u32,
    rng: &mut ChaCha8Rng,
) -> TabulatedDistribution {
    let size = (c.prime() as usize).pow(level);
    let coeffs: Vec<_> = (0..size)
        .map(|_| c.from_int(rng.gen_range(-40..=40)))
        .collect();
    TabulatedDistribution::from_group_ring(c, &coeffs, depth).unwrap()
}

fn vp_of_factorial(n: u64, p: u64) -> i64 {
    let mut v = 0;
    let mut q = p;
    while q <= n {
        v += (n / q) as i64;
        q *= p;
    }
    v
}

fn distribution_relation() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in [3u32, 5] {
        let c = ctx(p, 1);
        let depth = if p == 3 { 3 } else { 2 };
        let xi: Vec<_> = (0..p as i64).map(|a| c.from_int(a * a - 2)).collect();
        let seq = NormCoherentSequence::build(SequenceRule::OneMinusZeta, p, 2, W).unwrap();
        let mut dists = vec![
            ("haar", TabulatedDistribution::haar(&c, depth)),
            ("dirac", TabulatedDistribution::dirac(&c, 7, depth)),
            (
                "group-ring",
                TabulatedDistribution::from_group_ring(&c, &xi, depth).unwrap(),
            ),
            ("lambda", seq.lambda(2).unwrap()),
        ];
        for j in (2..p as i64 - 1).step_by(2) {
            dists.push(("lambda-chi", seq.lambda_chi(j, 2).unwrap()));
        }
        for (name, d) in dists {
            checked += 1;
            if !d.check_distribution_relation().is_inf() {
                failures.push(format!("{name}@p={p}"));
            }
            let one = d.context().one();
            let bad = d.with_cell(d.depth(), 1, &d.level(d.depth())[1] + &one);
            if bad.check_distribution_relation().is_inf() {
                failures.push(format!("{name}@p={p} fault undetected"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} distributions, faults injected in each; failures: {failures:?}"),
    )
}

fn volkenborn_suite() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let c = ctx(3, 1);
    let haar = TabulatedDistribution::haar(&c, 3);
    pass &= haar.volkenborn_defect().is_inf();
    notes.push(format!("defect(haar)={}", haar.volkenborn_defect()));
    let seq = NormCoherentSequence::build(SequenceRule::OneMinusZeta, 3, 2, W).unwrap();
    let dists = [
        ("haar", haar.clone()),
        ("dirac", TabulatedDistribution::dirac(&c, 4, 3)),
        ("lambda", seq.lambda(2).unwrap()),
        ("lambda-chi0", seq.lambda_chi(0, 2).unwrap()),
    ];
    for (name, d) in &dists {
        let bad: Vec<u64> = (0..=40)
            .filter(|&m| !d.fourier_coefficient(m).unwrap().within_bound)
            .collect();
        if !bad.is_empty() {
            pass = false;
        }
        notes.push(format!(
            "{name}: c=p^-({}) bound fails at {bad:?}",
            d.coefficient_bound()
        ));
    }
    // C^1 Mahler series a_m = p^m, against the coefficient integrals
    let a: Vec<_> = (0..12).map(|m| c.from_int(3i64.pow(m))).collect();
    let f = MahlerFunction::Mahler(a.clone());
    for (name, d) in &dists {
        let whole = d.volkenborn_integral(&f).unwrap();
        let mut sum = d.context().zero();
        let mut defect = whole.cauchy_defect;
        for (m, am) in a.iter().enumerate() {
            let r = d.fourier_coefficient(m as u64).unwrap();
            defect = defect.worst(r.cauchy_defect);
            sum = &sum + &(&r.value * &am.embed(d.context()).unwrap());
        }
        let diff = (&whole.value - &sum).size();
        pass &= diff >= defect;
        notes.push(format!(
            "{name}: |int f - sum a_m T_m| = p^-({diff}), defect p^-({defect})"
        ));
    }
    outcome(pass, notes.join("; "))
}

fn bernoulli_oracle() -> Outcome {
    let depth = 5;
    let c = ctx(3, 0);
    let haar = TabulatedDistribution::haar(&c, depth);
    let poly = |coeffs: &[i64]| {
        MahlerFunction::Polynomial(coeffs.iter().map(|&x| Ratio::from_integer(x)).collect())
    };
    let x1 = haar.volkenborn_integral(&poly(&[0, 1])).unwrap().value;
    let x2 = haar.volkenborn_integral(&poly(&[0, 0, 1])).unwrap().value;
    let d1 = agreement_digits(&x1, &rational(&c, -1, 2));
    let d2 = agreement_digits(&x2, &rational(&c, 1, 6));
    let mut pass = d1 >= depth as i64 - 1 && d2 >= depth as i64 - 1;
    let mut worst = Vec::new();
    for m in 0..=6u64 {
        let v = haar.fourier_coefficient(m).unwrap().value;
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let d = agreement_digits(&v, &rational(&c, sign, m as i64 + 1));
        let need = depth as i64 - vp_of_factorial(m + 1, 3);
        pass &= d >= need;
        worst.push(format!("m={m}:{d}/{need}"));
    }
    outcome(
        pass,
        format!(
            "int x: {d1} digits, int x^2: {d2} digits (need {}); binomials {}",
            depth - 1,
            worst.join(" ")
        ),
    )
}

fn transform_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pass = true;
    let mut notes = Vec::new();
    let seq = NormCoherentSequence::build(SequenceRule::OneMinusZeta, 5, 2, W).unwrap();
    let lambda_chi = seq.lambda_chi(2, 2).unwrap();
    let c2 = lambda_chi.context().clone();
    let nus = [
        ("haar", TabulatedDistribution::haar(&c2, 2)),
        ("lambda-chi", lambda_chi),
    ];
    let mus = [
        ("dirac", TabulatedDistribution::dirac(&c2, 3, 2)),
        ("random", random_measure(&c2, 2, 2, &mut rng)),
    ];
    for (nn, nu) in &nus {
        for (mn, mu) in &mus {
            let r = TabulatedDistribution::transform_identity_check(nu, mu, 2, 4).unwrap();
            pass &= r.root_residual.is_inf() && r.correction_residual.is_inf();
            notes.push(format!(
                "{nn}*{mn}: {} roots, residual {}, corrections {}",
                r.roots_checked, r.root_residual, r.correction_residual
            ));
        }
    }
    // Haar corrections against int C(x, m + 1) dmu
    let c3 = ctx(3, 0);
    let haar = TabulatedDistribution::haar(&c3, 3);
    let mu = random_measure(&c3, 2, 3, &mut rng);
    let g = TabulatedDistribution::correction_coefficients(&haar, &mu, 11).unwrap();
    let mut closed = true;
    for (m, gm) in g.iter().enumerate() {
        closed &= gm.eq_to_precision(&mu.fourier_coefficient(m as u64 + 1).unwrap().value);
    }
    pass &= closed;
    notes.push(format!("haar closed form m<=10: {closed}"));
    outcome(pass, notes.join("; "))
}

fn norm_coherence() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for p in [3u32, 5, 7] {
        for rule in [SequenceRule::OneMinusZeta, SequenceRule::CycloUnit { c: 1 }] {
            let name = rule.to_string();
            let r = NormCoherentSequence::build(rule, p, 2, W)
                .unwrap()
                .verify_norm_coherence()
                .unwrap();
            pass &= r.is_inf();
            notes.push(format!("p={p} {name}: {r}"));
        }
    }
    outcome(pass, notes.join(", "))
}

fn interpolation() -> Outcome {
    let p = 5;
    let seq = NormCoherentSequence::build(SequenceRule::CycloUnit { c: 0 }, p, 1, W).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for u in 1..5 {
        let r = verify_interpolation_with(&seq, 2, u, 1, 0).unwrap();
        pass &= r.passed(L_VALUE_DIGITS);
        notes.push(format!(
            "psi^{u}: {} / L_p {:?}",
            r.digits, r.leopoldt_digits
        ));
    }
    let mut parity = true;
    for j in [1, 3] {
        for u in 0..5 {
            let r = verify_interpolation_with(&seq, j, u, 1, 0).unwrap();
            let zero = r.lhs.context().zero();
            parity &= agreement_digits(&r.lhs, &zero) >= L_VALUE_DIGITS
                && agreement_digits(&r.rhs, &zero) >= L_VALUE_DIGITS;
        }
    }
    pass &= parity;
    notes.push(format!("odd parity vanishing: {parity}"));
    outcome(pass, notes.join("; "))
}

fn independent_l_value() -> Outcome {
    let c = ctx(5, 0);
    let chi = DirichletCharacter::tame_only(5, 2).unwrap();
    let lp = leopoldt_lp1(&chi, W).unwrap();
    // eps = (1 + sqrt 5)/2 = 1 + zeta + zeta^-1
    let eps = &(&c.one() + &c.zeta_pow(1)) + &c.zeta_pow(4);
    let minimal = &(&eps.pow(2) - &eps) - &c.one();
    let tau = chi.gauss_sum(&c).unwrap();
    let candidate = eps.iwasawa_log().unwrap().mul_int(2).div(&tau).unwrap();
    let plus = agreement_digits(&lp, &candidate);
    let minus = agreement_digits(&lp, &-&candidate);
    let exactly_one = (plus >= L_VALUE_DIGITS) != (minus >= L_VALUE_DIGITS);
    let pass = minimal.is_zero() && exactly_one;
    outcome(
        pass,
        format!(
            "eps^2-eps-1=0: {}, + sign {plus} digits, - sign {minus} digits",
            minimal.is_zero()
        ),
    )
}

fn unit_ratio(selected: &mut Option<i64>) -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for p in [5u32, 7] {
        let t = unit_ratio_table(p, 2, 1, W).unwrap();
        pass &= !t.valid.is_empty();
        if p == 5 {
            *selected = t.valid.first().copied();
        }
        let vals: Vec<String> = t
            .rows
            .iter()
            .filter(|r| r.wild)
            .map(|r| {
                format!(
                    "c{}psi{}:{}",
                    r.c,
                    r.psi,
                    r.ratio_valuation.map_or("inf".into(), |v| v.to_string())
                )
            })
            .collect();
        notes.push(format!("p={p} valid c {:?} [{}]", t.valid, vals.join(" ")));
    }
    outcome(pass, notes.join("; "))
}

fn annihilator(c: Option<i64>) -> Outcome {
    let Some(c) = c else {
        return outcome(false, "no tame index selected");
    };
    let m1 = annihilator_m(5, 2, c, 1, W).unwrap();
    let m2 = annihilator_m(5, 2, c, 2, W).unwrap();
    let image = m2.element.project(1).unwrap();
    let coherent = image
        .coeffs()
        .iter()
        .zip(m1.element.coeffs())
        .map(|(a, b)| agreement_digits(a, &b.embed(a.context()).unwrap()))
        .min()
        .unwrap();
    let integral = m1.integrality.integral && m1.integrality.digits >= INTEGRAL_DIGITS;
    let pass = integral && coherent >= COHERENCE_DIGITS;
    outcome(
        pass,
        format!(
            "c={c}: M1 integral {} ({} digits, off-axis {}), M2 integral {}, image agrees to {coherent} digits",
            m1.integrality.integral, m1.integrality.digits, m1.integrality.off_axis, m2.integrality.integral
        ),
    )
}

fn regulator(c: Option<i64>) -> Outcome {
    let Some(c) = c else {
        return outcome(false, "no tame index selected");
    };
    let r = regulator_product_check(5, 2, c, 1, W).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut circ_ok = 0;
    for i in 0..100 {
        let (p, size) = [(3u32, 3usize), (3, 9), (5, 5), (5, 25), (7, 7)][i % 5];
        let coeffs: Vec<i64> = (0..size).map(|_| rng.gen_range(-9..=9)).collect();
        if circulant_check(p, &coeffs, W).unwrap() {
            circ_ok += 1;
        }
    }
    let pass = r.ratio_valuation == Valuation::int(0)
        && r.group_determinant_residual.is_inf()
        && circ_ok == 100;
    outcome(
        pass,
        format!(
            "ratio valuation {}, group determinant residual {}, circulants {circ_ok}/100",
            r.ratio_valuation, r.group_determinant_residual
        ),
    )
}

fn main() {
    let started = Instant::now();
    let mut selected = None;
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        println!(
            "[{}] {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
        results.push((name, o));
    };
    run("1 distribution relation", &mut distribution_relation);
    run("2 volkenborn bounds", &mut volkenborn_suite);
    run("3 bernoulli oracle", &mut bernoulli_oracle);
    run("4 transform identity", &mut transform_identity);
    run("5 norm coherence", &mut norm_coherence);
    run("6 interpolation", &mut interpolation);
    run("7 independent L-value", &mut independent_l_value);
    run("8 unit ratio", &mut || unit_ratio(&mut selected));
    let c = selected;
    run("9 annihilator integrality", &mut || annihilator(c));
    run("10 regulator product", &mut || regulator(c));
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
