use fracreach::machines::check_run;
use fracreach::machines::examples::tcm_doubling_cycle;
use fracreach::machines::{Config, Qvass, VassRule};
use fracreach::numerics::{IntVector, RatVector, Rational};
use fracreach_reductions::checks::{check_tcm_chain, check_tcm_example, sample_bounded_hits};
use fracreach_reductions::{assemble_unary_instance, cvassrl_to_cpvass, pcp_to_tcm, structured_to_superstructured, BoundedPcp, RunLengthInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn doubling_cycle_chain_lengths() {
    let (accepted, r) = check_tcm_example(6).unwrap();
    assert_eq!(accepted, vec![2]);
    assert_eq!(r.ivass_steps, 15);
    assert_eq!(r.qvass_steps, 45);
    assert_eq!(r.counter_steps, 45);
    assert_eq!(r.product_steps, 45);
    // six counters plus the padding counter, each with a complement, plus ctrl
    assert_eq!(r.qvass_dim, 15);
}

#[test]
fn wrong_lengths_are_not_hit_by_sampling() {
    let t = tcm_doubling_cycle();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in [1, 3] {
        assert_eq!(sample_bounded_hits(&mut rng, &t, m, 10_000).unwrap(), 0, "m={m}");
    }
    assert!(sample_bounded_hits(&mut rng, &t, 2, 2_000).unwrap() > 0);
}

#[test]
fn pcp_single_pair() {
    let yes = BoundedPcp::new(&[("a", "a")], 1).unwrap();
    let t = pcp_to_tcm(&yes);
    assert_eq!(t.tcm.accepting_runs(t.m, 2).len(), 1);
    let run = t.run_for(&yes.solve().unwrap());
    assert_eq!(t.tcm.accepting_runs(t.m, 2)[0], run);
    check_tcm_chain(&t.tcm, t.m, &run).unwrap();

    let no = BoundedPcp::new(&[("a", "b")], 1).unwrap();
    let t = pcp_to_tcm(&no);
    assert!(no.solve().is_none());
    assert!(t.tcm.accepting_runs(t.m, 1).is_empty());
}

#[test]
fn pcp_agrees_with_direct_search() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut positives = 0;
    for _ in 0..40 {
        let word = |rng: &mut ChaCha8Rng| -> String {
            let n = rng.gen_range(1..=2);
            (0..n).map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' }).collect()
        };
        let pairs: Vec<(String, String)> = (0..rng.gen_range(1..=2)).map(|_| (word(&mut rng), word(&mut rng))).collect();
        let refs: Vec<(&str, &str)> = pairs.iter().map(|(u, v)| (u.as_str(), v.as_str())).collect();
        let p = BoundedPcp::new(&refs, rng.gen_range(1..=3)).unwrap();
        let t = pcp_to_tcm(&p);
        let found = !t.tcm.accepting_runs(t.m, 1).is_empty();
        assert_eq!(found, p.solve().is_some(), "{p:?}");
        positives += found as usize;
    }
    assert!(positives > 0);
}

#[test]
fn product_of_trivial_machine() {
    let m = Qvass {
        states: vec!["q".into()],
        dim: 1,
        rules: vec![VassRule { from: 0, to: 0, update: IntVector::from_i64(&[0]) }],
    };
    let v = RatVector::from_ints(&[1]);
    let inst = RunLengthInstance { machine: m, c_init: Config::new(0, v.clone()), c_fin: Config::new(0, v), steps: 2 };
    let pc = cvassrl_to_cpvass(&inst).unwrap();
    assert_eq!(pc.machine.states.len(), pc.counter.states.len());
    let seq = vec![fracreach::machines::Firing::new(Rational::one(), 0); 2];
    let w = pc.translate(&seq).unwrap();
    assert_eq!(check_run(&pc.machine, &pc.c0, &w).unwrap(), pc.c1);
    assert!(pc.translate(&seq[..1]).is_err());
}

fn toy(start: i64, end: (i64, i64), steps: usize) -> RunLengthInstance<Qvass> {
    RunLengthInstance {
        machine: Qvass {
            states: vec!["s".into(), "t".into()],
            dim: 1,
            rules: vec![VassRule { from: 0, to: 1, update: IntVector::from_i64(&[-1]) }],
        },
        c_init: Config::new(0, RatVector(vec![Rational::int(start)])),
        c_fin: Config::new(1, RatVector(vec![Rational::frac(end.0, end.1)])),
        steps,
    }
}

#[test]
fn rescaling_below_one() {
    let inst = toy(3, (2, 1), 1);
    let sc = structured_to_superstructured(&inst).unwrap();
    assert_eq!(sc.k, 2);
    let one = Rational::one();
    for c in [&sc.instance.c_init, &sc.instance.c_fin] {
        assert!(c.values.0.iter().all(|x| *x <= one));
    }
    let seq = vec![fracreach::machines::Firing::new(Rational::one(), 0)];
    let w = sc.translate(&seq);
    let end = check_run(&sc.instance.machine, &sc.instance.c_init, &w).unwrap();
    assert!(end.covers(&sc.instance.c_fin));
    assert!(structured_to_superstructured(&toy(1, (1, 3), 1)).is_err());
}

#[test]
fn unary_assembly_end_to_end() {
    let inst = RunLengthInstance { c_init: Config::new(0, RatVector(vec![Rational::frac(3, 4)])), ..toy(0, (1, 4), 1) };
    let u = assemble_unary_instance(&inst).unwrap();
    for c in [&u.instance.c_init, &u.instance.c_fin] {
        assert!(c.values.0.iter().all(|x| x.is_integer()), "{c:?}");
    }
    let seq = vec![fracreach::machines::Firing::new(Rational::frac(1, 2), 0)];
    let w = u.translate(&seq).unwrap();
    assert_eq!(w.len(), u.instance.steps);
    let end = check_run(&u.instance.machine, &u.instance.c_init, &w).unwrap();
    assert!(end.covers(&u.instance.c_fin));
    // firing too much of the core rule leaves too little for the target
    let seq = vec![fracreach::machines::Firing::new(Rational::frac(3, 4), 0)];
    let w = u.translate(&seq).unwrap();
    assert!(check_run(&u.instance.machine, &u.instance.c_init, &w).is_err());
}

#[test]
fn superstructured_then_unary() {
    let inst = toy(3, (1, 2), 1);
    let sc = structured_to_superstructured(&inst).unwrap();
    let u = assemble_unary_instance(&sc.instance).unwrap();
    let seq = sc.translate(&[fracreach::machines::Firing::new(Rational::frac(1, 2), 0)]);
    let w = u.translate(&seq).unwrap();
    let end = check_run(&u.instance.machine, &u.instance.c_init, &w).unwrap();
    assert!(end.covers(&u.instance.c_fin));
}
