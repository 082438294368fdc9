use num_bigint::BigInt;
use padic_volkenborn::coherent::{act_by_measure, NormCoherentSequence, SequenceRule};
use padic_volkenborn::padic::teichmuller;
use padic_volkenborn::FieldContext;

const W: u32 = 24;

fn omega_mod(p: u32, n: u32, s: i64) -> i64 {
    let m = BigInt::from(p).pow(n + 1);
    let e = BigInt::from(p).pow(n);
    i64::try_from(BigInt::from(s).modpow(&e, &m)).unwrap()
}

#[test]
fn every_rule_is_norm_coherent() {
    for p in [3u32, 5] {
        for rule in [
            SequenceRule::OneMinusZeta,
            SequenceRule::CycloUnit { c: 1 },
            SequenceRule::CyclotomicGenerator,
        ] {
            let seq = NormCoherentSequence::build(rule.clone(), p, 2, W).unwrap();
            assert!(
                seq.verify_norm_coherence().unwrap().is_inf(),
                "{rule} at p = {p}"
            );
        }
    }
}

#[test]
fn fault_injection_is_detected() {
    let seq = NormCoherentSequence::build(SequenceRule::OneMinusZeta, 5, 2, W).unwrap();
    let bad = &seq.levels()[2] + &seq.levels()[2].context().from_int(25);
    let broken = seq.with_level(2, bad);
    assert!(!broken.verify_norm_coherence().unwrap().is_inf());
    assert!(broken.lambda(2).is_err());
    assert!(NormCoherentSequence::custom(broken.levels().to_vec()).is_err());
}

#[test]
fn json_round_trip_rechecks_coherence() {
    let seq = NormCoherentSequence::build(SequenceRule::CycloUnit { c: 2 }, 5, 1, W).unwrap();
    let back = NormCoherentSequence::from_json(&seq.to_json().unwrap()).unwrap();
    for (x, y) in back.levels().iter().zip(seq.levels()) {
        assert!(x.eq_to_precision(y));
    }
}

#[test]
fn lambda_is_a_distribution() {
    let seq = NormCoherentSequence::build(SequenceRule::CycloUnit { c: 1 }, 5, 2, W).unwrap();
    let lam = seq.lambda(2).unwrap();
    assert!(lam.check_distribution_relation().at_least(W as i64 - 6));
    let lam = seq.lambda_chi(2, 2).unwrap();
    assert!(lam.check_distribution_relation().at_least(W as i64 - 6));
}

#[test]
fn galois_shift_translates_lambda() {
    let p = 3;
    let seq = NormCoherentSequence::build(SequenceRule::CycloUnit { c: 1 }, p, 2, W).unwrap();
    let lam = seq.lambda(2).unwrap();
    let shifted = seq.galois_shift(4).unwrap().lambda(2).unwrap();
    for j in 0..=2 {
        for a in 0..(p as i64).pow(j) {
            assert!(shifted.value(j, a).eq_to_precision(lam.value(j, a + 4)));
        }
    }
}

#[test]
fn twisted_lambda_lies_in_the_chi_eigenspace() {
    // sigma_{omega(s)} lambda_chi(a) = chi(s) lambda_chi(a) for chi = omega^j
    let p = 5;
    let n = 1;
    let seq = NormCoherentSequence::build(SequenceRule::CycloUnit { c: 3 }, p, n, W).unwrap();
    for j in 0..4 {
        let lam = seq.lambda_chi(j, n).unwrap();
        for s in 2..p as i64 {
            let chi = teichmuller(p, s, W).unwrap().pow(j as u64);
            for cell in lam.level(n) {
                let lhs = cell.galois(omega_mod(p, n, s)).unwrap();
                assert!(
                    lhs.eq_to_precision(&cell.mul_scalar(&chi)),
                    "j = {j}, s = {s}"
                );
            }
        }
    }
}

#[test]
fn odd_twist_of_one_minus_zeta_vanishes() {
    let seq = NormCoherentSequence::build(SequenceRule::OneMinusZeta, 5, 1, W).unwrap();
    for j in [1, 3] {
        let lam = seq.lambda_chi(j, 1).unwrap();
        for cell in lam.level(1) {
            assert!(cell.is_zero());
        }
    }
}

#[test]
fn group_ring_action_is_translation() {
    let p = 3;
    let seq = NormCoherentSequence::build(SequenceRule::CycloUnit { c: 1 }, p, 2, W).unwrap();
    let lam = seq.lambda(2).unwrap();
    let ctx = lam.context().clone();
    let mut coeffs = vec![ctx.zero(); 9];
    coeffs[0] = ctx.one();
    let same = act_by_measure(&lam, &coeffs).unwrap();
    coeffs[0] = ctx.zero();
    coeffs[1] = ctx.from_int(2);
    let moved = act_by_measure(&lam, &coeffs).unwrap();
    for a in 0..9 {
        assert!(same.value(2, a).eq_to_precision(lam.value(2, a)));
        assert!(moved
            .value(2, a)
            .eq_to_precision(&lam.value(2, a - 1).mul_int(2)));
    }
    assert!(act_by_measure(&lam, &coeffs[..5]).is_err());
}

#[test]
fn parse_and_display_rules() {
    for s in ["one-minus-zeta", "cyclo-unit:c=3", "cyclotomic-generator"] {
        assert_eq!(s.parse::<SequenceRule>().unwrap().to_string(), s);
    }
    assert_eq!(
        "cyclo-unit:2".parse::<SequenceRule>().unwrap(),
        SequenceRule::CycloUnit { c: 2 }
    );
    assert!("zeta".parse::<SequenceRule>().is_err());
    assert!(FieldContext::get(4, 0, W).is_err());
}
