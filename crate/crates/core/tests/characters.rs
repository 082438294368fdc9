use std::sync::Arc;

use padic_volkenborn::cyclo::{CycloElement, FieldContext};
use padic_volkenborn::DirichletCharacter;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(p: u32, n: u32) -> Arc<FieldContext> {
    FieldContext::get(p, n, 16).unwrap()
}

#[test]
fn multiplicative_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, n) in [(3u32, 2u32), (5, 1), (7, 1)] {
        let c = ctx(p, n);
        let m = (p as i64).pow(n + 1);
        let chars: Vec<_> = (0..p as i64 - 1)
            .flat_map(|j| DirichletCharacter::with_tame(p, n, j).unwrap())
            .collect();
        for _ in 0..500 / 3 + 1 {
            let phi = &chars[rng.gen_range(0..chars.len())];
            let a = rng.gen_range(1..10 * m);
            let b = rng.gen_range(1..10 * m);
            let lhs = phi.value(&c, a * b).unwrap();
            let rhs = &phi.value(&c, a).unwrap() * &phi.value(&c, b).unwrap();
            assert!(lhs.eq_to_precision(&rhs), "{phi} at {a}, {b}");
            assert!(phi
                .value(&c, a)
                .unwrap()
                .eq_to_precision(&phi.value(&c, a + m).unwrap()));
        }
    }
}

#[test]
fn gauss_identity_for_every_nontrivial_character() {
    for p in [3u32, 5] {
        for n in 0..=2 {
            let c = ctx(p, n);
            for j in 0..p as i64 - 1 {
                for phi in DirichletCharacter::with_tame(p, n, j).unwrap() {
                    if phi.is_trivial() {
                        assert!(phi.gauss_sum(&c).is_err());
                        continue;
                    }
                    assert!(phi.gauss_identity_residual(&c).unwrap().is_inf(), "{phi}");
                }
            }
        }
    }
}

#[test]
fn gauss_sum_valuations() {
    // tame conductor: v_p(tau(omega^j)) = (p - 1 - j) / (p - 1)  (Stickelberger);
    // wild conductor p^k: v_p(tau) = k / 2
    for (p, n) in [(5u32, 1u32), (3, 2)] {
        let c = ctx(p, n);
        let e = c.degree() as i64;
        for j in 0..p as i64 - 1 {
            for phi in DirichletCharacter::with_tame(p, n, j).unwrap() {
                if phi.is_trivial() {
                    continue;
                }
                let v = phi.gauss_sum(&c).unwrap().valuation().unwrap();
                let k = phi.conductor_exponent() as i64;
                if k == 1 {
                    assert_eq!(v * (p as i64 - 1), (p as i64 - 1 - j) * e, "{phi}");
                } else {
                    assert_eq!(2 * v, k * e, "{phi}");
                }
            }
        }
    }
}

#[test]
fn complex_conjugation_of_gauss_sums() {
    // sigma_{-1} tau(omega^j psi^u) = phi(-1) tau(omega^j psi^{-u})
    let c = ctx(3, 2);
    for j in 0..2 {
        for phi in DirichletCharacter::with_tame(3, 2, j).unwrap() {
            if phi.is_trivial() {
                continue;
            }
            let lhs = phi.gauss_sum(&c).unwrap().galois(-1).unwrap();
            let other = DirichletCharacter::new(3, 2, j, -(phi.wild_exponent() as i64)).unwrap();
            let mut rhs = other.gauss_sum(&c).unwrap();
            if !phi.is_even() {
                rhs = -rhs;
            }
            assert!(lhs.eq_to_precision(&rhs), "{phi}");
        }
    }
}

/// Smallest k such that phi is trivial on 1 + p^k Z (k = 0 only for trivial phi).
fn brute_conductor(phi: &DirichletCharacter, c: &Arc<FieldContext>) -> u32 {
    let p = phi.prime() as i64;
    let m = phi.modulus() as i64;
    let one: CycloElement = c.one();
    for k in 0..=phi.level() + 1 {
        let step = p.pow(k);
        let trivial = (0..m / step)
            .map(|t| 1 + t * step)
            .filter(|a| a % p != 0)
            .all(|a| phi.value(c, a).unwrap().eq_to_precision(&one));
        if trivial {
            return k;
        }
    }
    unreachable!()
}

#[test]
fn conductor_detection() {
    for (p, n) in [(3u32, 2u32), (5, 2), (7, 1)] {
        let c = ctx(p, n);
        for j in [0i64, 1] {
            for phi in DirichletCharacter::with_tame(p, n, j).unwrap() {
                assert_eq!(phi.conductor_exponent(), brute_conductor(&phi, &c), "{phi}");
            }
        }
    }
}

#[test]
fn parsing_round_trip() {
    for s in [
        "omega^2*psi^3@5^2",
        "omega^0*psi^1@3^3",
        "omega^5*psi^0@7^1",
    ] {
        let phi: DirichletCharacter = s.parse().unwrap();
        assert_eq!(phi.to_string(), s);
    }
    assert!("omega^2*psi^1@4^2".parse::<DirichletCharacter>().is_err());
    assert!("psi".parse::<DirichletCharacter>().is_err());
}

#[test]
fn lifted_character_has_same_values() {
    let phi = DirichletCharacter::new(5, 1, 3, 2).unwrap();
    let lifted = phi.lift(2).unwrap();
    let c = ctx(5, 2);
    for a in 1..200 {
        assert!(phi
            .value(&c, a)
            .unwrap()
            .eq_to_precision(&lifted.value(&c, a).unwrap()));
    }
    assert_eq!(phi.conductor(), lifted.conductor());
}
