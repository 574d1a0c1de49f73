//! Invariants over random inputs.

use proptest::prelude::*;
use shapeinv::opalg::DiffOp;
use shapeinv::su2::{self, Gen};
use shapeinv::symx::vars::*;
use shapeinv::symx::{Expr, Symbol};
use shapeinv::verify::{check_zero, op_identity, SamplePlan};

fn generator() -> impl Strategy<Value = DiffOp> {
    (0usize..6, -2i64..3).prop_map(|(i, p)| su2::param(Gen::ALL[i], &Expr::int(p)))
}

fn weight() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(su2::weight_combined()),
        Just(su2::weight_similarity()),
        Just(theta().sin().powi(2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conjugation_is_multiplicative(a in generator(), b in generator(), w in weight()) {
        let lhs = su2::conjugate(&(&a * &b), &w);
        let rhs = su2::conjugate(&a, &w) * su2::conjugate(&b, &w);
        let r = op_identity("", &[lhs, -rhs], &SamplePlan::new(2, 16), 1e-10).unwrap();
        prop_assert!(r.pass, "{}", r.relative);
    }

    #[test]
    fn plans_are_deterministic(seed in any::<u64>(), count in 1usize..40) {
        let p = SamplePlan::new(seed, count);
        prop_assert_eq!(p.points(), p.points());
    }

    #[test]
    fn tolerance_is_monotone(k in 1i64..50, t in 1e-14f64..1e-2, f in 1.0f64..100.0) {
        let e = theta().sin() - theta() * Expr::ratio(k, 1_000_000);
        let plan = SamplePlan::new(4, 20);
        let a = check_zero("", &[e.clone()], &plan, t).unwrap();
        let b = check_zero("", &[e], &plan, t * f).unwrap();
        prop_assert!(!a.pass || b.pass);
    }

    #[test]
    fn shifted_charge_matches_substitution(p in -4i64..5) {
        for g in Gen::ALL {
            let direct = su2::param(g, &Expr::int(p));
            let via_q = su2::param(g, &q()).substitute(Symbol::Q, &Expr::int(p));
            prop_assert_eq!(&direct, &via_q);
        }
    }
}
