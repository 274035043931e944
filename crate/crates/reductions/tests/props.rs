use fracreach::machines::{Tcm, TcmOp, TcmRule};
use fracreach_reductions::checks::{check_amplifier, check_tcm_chain};
use proptest::prelude::*;

fn op(i: u8) -> TcmOp {
    match i % 5 {
        0 => TcmOp::Inc(0),
        1 => TcmOp::Inc(1),
        2 => TcmOp::Double(0),
        3 => TcmOp::Double(1),
        _ => TcmOp::Nop,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn amplifier_hits_its_values(k in 1u32..6, raw in proptest::collection::vec(0i64..1000, 1..4)) {
        let p: Vec<i64> = raw.iter().map(|x| x % ((1 << k) + 1)).collect();
        let (len, wit) = check_amplifier(&p, k).map_err(TestCaseError::fail)?;
        prop_assert_eq!(wit, 3 * len);
    }

    /// Every accepting run of a random small TCM survives the whole chain,
    /// as long as it never doubles a zero counter and ends with nonzero
    /// counters (the gadgets need a positive fraction there).
    #[test]
    fn tcm_runs_survive_the_chain(
        rules in proptest::collection::vec((0usize..3, 0usize..3, 0u8..5), 2..6),
        m in 1usize..5,
    ) {
        let t = Tcm {
            states: vec!["a".into(), "b".into(), "c".into()],
            initial: 0,
            final_state: 2,
            rules: rules.iter().map(|&(f, to, o)| TcmRule { from: f, to, op: op(o) }).collect(),
        };
        for run in t.accepting_runs(m, 3) {
            let mut c = t.initial_config();
            let mut ok = true;
            for &r in &run {
                if let TcmOp::Double(i) = t.rules[r].op {
                    ok &= !c.values.0[i].is_zero();
                }
                c = fracreach::machines::Machine::step(&t, &c, r, &fracreach::numerics::Rational::one()).unwrap();
            }
            ok &= !c.values.0[0].is_zero();
            if ok {
                let r = check_tcm_chain(&t, m, &run).map_err(TestCaseError::fail)?;
                prop_assert_eq!(r.qvass_steps, 3 * (6 * m + 3));
            }
        }
    }
}
