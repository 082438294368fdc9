use num_bigint::BigInt;
use padic_volkenborn::padic::{log_one_unit, teichmuller, PadicScalar};
use proptest::prelude::*;

const P: u32 = 5;
const W: u32 = 12;

fn scalar() -> impl Strategy<Value = PadicScalar> {
    (any::<i32>(), -3i64..4).prop_map(|(n, k)| PadicScalar::from_int(P, n as i64, W).shift(k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert!(a.add(&b).add(&c).eq_to_precision(&a.add(&b.add(&c))));
        prop_assert!(a.mul(&b).mul(&c).eq_to_precision(&a.mul(&b.mul(&c))));
        prop_assert!(a.mul(&b.add(&c)).eq_to_precision(&a.mul(&b).add(&a.mul(&c))));
        prop_assert!(a.add(&b).eq_to_precision(&b.add(&a)));
        prop_assert!(a.mul(&b).eq_to_precision(&b.mul(&a)));
    }
}

proptest! {
    #[test]
    fn division_inverts_multiplication(a in scalar(), b in scalar()) {
        prop_assume!(!b.is_zero());
        let q = a.div(&b).unwrap();
        prop_assert!(q.mul(&b).eq_to_precision(&a));
        if let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) {
            prop_assert_eq!(q.valuation(), Some(va - vb));
        }
    }

    #[test]
    fn log_is_a_homomorphism(x in 0i64..1_000_000, y in 0i64..1_000_000) {
        let u = PadicScalar::from_int(P, 1 + 5 * x, W);
        let v = PadicScalar::from_int(P, 1 + 5 * y, W);
        let lhs = log_one_unit(&u.mul(&v)).unwrap();
        let rhs = log_one_unit(&u).unwrap().add(&log_one_unit(&v).unwrap());
        prop_assert!(lhs.eq_to_precision(&rhs));
        let sq = log_one_unit(&u.mul(&u)).unwrap();
        prop_assert!(sq.eq_to_precision(&log_one_unit(&u).unwrap().mul(&PadicScalar::from_int(P, 2, W))));
    }
}

#[test]
fn teichmuller_is_multiplicative() {
    for p in [3u32, 5, 7, 11, 13] {
        let one = PadicScalar::one(p, W);
        for a in 1..p as i64 {
            let wa = teichmuller(p, a, W).unwrap();
            assert!(wa.pow(p as u64 - 1).eq_to_precision(&one));
            let residue = wa.to_integer().unwrap() % BigInt::from(p);
            assert_eq!(residue, BigInt::from(a));
            for b in 1..p as i64 {
                let prod = wa.mul(&teichmuller(p, b, W).unwrap());
                assert!(prod.eq_to_precision(&teichmuller(p, a * b % p as i64, W).unwrap()));
            }
        }
    }
}
