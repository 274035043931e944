//! Executable checks over the generators, shared by the test suites.
//! Each returns a short report on success and a description of the first
//! discrepancy otherwise.

use fracreach::machines::examples::tcm_doubling_cycle;
use fracreach::machines::{check_run, forced_run, Config, Firing, IvassRl, Machine, Tcm, TcmOp, TcmRule};
use fracreach::numerics::{RatVector, Rational};
use num_bigint::BigInt;
use rand::Rng;

use crate::amplifier::{ivass_amplifier, qvass_amplifier};
use crate::ctrl::ivass_to_cvassrl;
use crate::gadgets::{gadget_add, gadget_double, gadget_halve};
use crate::product::cvassrl_to_cpvass;
use crate::tcm::{encode_config, tcm_to_ivass};
use crate::RunLengthInstance;

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

/// Lengths observed along the full chain for one accepting TCM run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReport {
    pub ivass_steps: usize,
    pub qvass_steps: usize,
    pub counter_steps: usize,
    pub product_steps: usize,
    pub qvass_dim: usize,
    pub product_states: usize,
}

/// Runs an accepting TCM run through every stage and replays each
/// translated witness against that stage's declared target.
pub fn check_tcm_chain(t: &Tcm, m: usize, run: &[usize]) -> Result<ChainReport, String> {
    let ch = tcm_to_ivass(t, m).map_err(|e| e.to_string())?;
    let s1 = ch.translate(run).map_err(|e| e.to_string())?;
    let i = &ch.instance;
    let end = check_run(&i.machine, &i.c_init, &s1).map_err(|e| format!("bounded stage: {e}"))?;
    if end != i.c_fin || s1.len() != i.steps {
        return fail(format!("bounded stage ends at {end:?} after {} steps", s1.len()));
    }
    let cc = ivass_to_cvassrl(i);
    let s2 = cc.translate(&s1);
    let q = &cc.instance;
    let end = check_run(&q.machine, &q.c_init, &s2).map_err(|e| format!("continuous stage: {e}"))?;
    if end != q.c_fin || s2.len() != q.steps {
        return fail(format!("continuous stage ends at {end:?} after {} steps", s2.len()));
    }
    let pc = cvassrl_to_cpvass(q).map_err(|e| e.to_string())?;
    if pc.machine.states.len() != pc.counter.states.len() * q.machine.states.len() {
        return fail("product state count");
    }
    let s3 = pc.translate(&s2).map_err(|e| e.to_string())?;
    let end = check_run(&pc.machine, &pc.c0, &s3).map_err(|e| format!("pushdown stage: {e}"))?;
    if end != pc.c1 {
        return fail(format!("pushdown stage ends at {end:?}"));
    }
    Ok(ChainReport {
        ivass_steps: s1.len(),
        qvass_steps: s2.len(),
        counter_steps: pc.counter.run().len(),
        product_steps: s3.len(),
        qvass_dim: q.machine.dim,
        product_states: pc.machine.states.len(),
    })
}

/// Acceptance lengths of the doubling-cycle TCM among 1..=max_m, then the
/// chain report for its run at m = 2.
pub fn check_tcm_example(max_m: usize) -> Result<(Vec<usize>, ChainReport), String> {
    let t = tcm_doubling_cycle();
    let accepted: Vec<usize> = (1..=max_m).filter(|&m| !t.accepting_runs(m, 1).is_empty()).collect();
    let runs = t.accepting_runs(2, 10);
    if runs.len() != 1 {
        return fail(format!("{} accepting runs of length 2", runs.len()));
    }
    Ok((accepted, check_tcm_chain(&t, 2, &runs[0])?))
}

fn random_fraction<R: Rng>(rng: &mut R) -> Rational {
    let den: i64 = rng.gen_range(1..=16);
    Rational::frac(rng.gen_range(1..=den), den)
}

/// Random walks through the bounded machine generated for length m, each
/// rule fired either with its forced fraction or a random one. Returns the
/// number of walks that land on the target after exactly the prescribed
/// number of steps.
pub fn sample_bounded_hits<R: Rng>(rng: &mut R, t: &Tcm, m: usize, walks: usize) -> Result<usize, String> {
    let ch = tcm_to_ivass(t, m).map_err(|e| e.to_string())?;
    let RunLengthInstance { machine, c_init, c_fin, steps } = &ch.instance;
    let mut hits = 0;
    for _ in 0..walks {
        let mut c = c_init.clone();
        let mut ok = true;
        for _ in 0..*steps {
            let opts: Vec<usize> = (0..machine.rule_count()).filter(|&r| machine.rule_source(r) == c.state).collect();
            if opts.is_empty() {
                ok = false;
                break;
            }
            let r = opts[rng.gen_range(0..opts.len())];
            let a = match machine.forced_fraction(&c, r) {
                Some(a) if rng.gen_bool(0.75) => a,
                _ => random_fraction(rng),
            };
            match machine.step(&c, r, &a) {
                Ok(d) => c = d,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && c == *c_fin {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Fires `rules` with the forced fractions, then checks that changing any
/// single fraction by `delta` (either direction, when still in (0,1])
/// makes the replay fail or miss `target`. Returns the number of
/// perturbations tried.
pub fn perturbations_rejected<M: Machine>(m: &M, c0: &Config, rules: &[usize], target: &Config, delta: &Rational) -> Result<usize, String> {
    let (end, seq) = forced_run(m, c0, rules).map_err(|e| e.to_string())?;
    if end != *target {
        return fail(format!("forced run ends at {end:?}, expected {target:?}"));
    }
    let mut tried = 0;
    for i in 0..seq.len() {
        for sign in [1, -1] {
            let a = if sign > 0 { &seq[i].fraction + delta } else { &seq[i].fraction - delta };
            if !a.is_fraction() {
                continue;
            }
            let mut s = seq.clone();
            s[i] = Firing::new(a, s[i].rule);
            tried += 1;
            if let Ok(e) = check_run(m, c0, &s) {
                if e == *target {
                    return fail(format!("perturbing step {i} still reaches the target"));
                }
            }
        }
    }
    Ok(tried)
}

fn unit_pair<R: Rng>(rng: &mut R, den: i64) -> (Rational, Rational) {
    let a = rng.gen_range(0..den);
    let b = rng.gen_range(1..=den - a);
    (Rational::frac(a, den), Rational::frac(b, den))
}

/// Sampled checks of every gadget. Returns the number of configurations
/// pushed through gadgets.
pub fn check_gadgets<R: Rng>(rng: &mut R, samples: usize) -> Result<usize, String> {
    let mut count = 0;
    let delta = Rational::frac(1, 97);
    // increment and doubling gadgets of the TCM encoding
    let ops = [TcmOp::Inc(0), TcmOp::Inc(1), TcmOp::Double(0), TcmOp::Double(1), TcmOp::Nop];
    let tcm = Tcm {
        states: vec!["q".into(), "q'".into()],
        initial: 0,
        final_state: 1,
        rules: ops.iter().map(|&op| TcmRule { from: 0, to: 1, op }).collect(),
    };
    for _ in 0..samples {
        let m = rng.gen_range(2..=8usize);
        let ch = tcm_to_ivass(&tcm, m).map_err(|e| e.to_string())?;
        let cap = 1i64 << (m - 1);
        let n = [rng.gen_range(1..cap), rng.gen_range(1..cap)];
        let c = Config::new(0, RatVector::from_ints(&n));
        for (ri, op) in ops.iter().enumerate() {
            let post = tcm.step(&c, ri, &Rational::one()).map_err(|e| e.to_string())?;
            let from = Config::new(0, encode_config(&c, m));
            let to = Config::new(1, encode_config(&post, m));
            let g = ch.gadgets[ri];
            let (end, seq) = forced_run(&ch.instance.machine, &from, &g).map_err(|e| format!("{op:?}: {e}"))?;
            if end != to {
                return fail(format!("{op:?} gadget from {from:?} ends at {end:?}"));
            }
            if let TcmOp::Double(i) = op {
                let u = &from.values.0[*i];
                if seq[0].fraction != *u || seq[1].fraction != u * &Rational::int(2) {
                    return fail("doubling fractions are not (u, 2u)");
                }
            }
            if *op != TcmOp::Nop {
                perturbations_rejected(&ch.instance.machine, &from, &g, &to, &delta)?;
            }
            count += 1;
        }
    }
    // Add, Doub, Halve and the control triple
    for _ in 0..samples {
        let (x, st) = unit_pair(rng, 64);
        let add = gadget_add(3, 0, 1, 2);
        let from = Config::new(0, RatVector(vec![x.clone(), st.clone(), Rational::zero()]));
        let to = Config::new(1, RatVector(vec![&x + &st, st.clone(), Rational::zero()]));
        perturbations_rejected(&add, &from, &[0, 1], &to, &delta)?;
        check_ctrl_triple(&add, &from, &to, rng)?;

        let u = Rational::frac(rng.gen_range(1..=32), 64);
        let doub = gadget_double(2, 0, 1);
        let from = Config::new(0, RatVector(vec![u.clone(), Rational::zero()]));
        let to = Config::new(1, RatVector(vec![&u * &Rational::int(2), Rational::zero()]));
        perturbations_rejected(&doub, &from, &[0, 1], &to, &delta)?;

        let h = Rational::frac(rng.gen_range(1..=64), 64);
        let halve = gadget_halve(2, 0, 1);
        let from = Config::new(0, RatVector(vec![h.clone(), Rational::zero()]));
        let to = Config::new(1, RatVector(vec![&h / &Rational::int(2), Rational::zero()]));
        perturbations_rejected(&halve, &from, &[0, 1], &to, &delta)?;
        count += 3;
    }
    Ok(count)
}

/// The bounded gadget `g` (states 0 → 1) translated with complements and a
/// control counter: the translated pair of triples lands on the lifted
/// target with ctrl = 4, and firing a middle or last rule with fraction
/// below 1 leaves ctrl short of 4.
fn check_ctrl_triple<R: Rng>(g: &IvassRl, from: &Config, to: &Config, rng: &mut R) -> Result<(), String> {
    let inst = RunLengthInstance { machine: g.clone(), c_init: from.clone(), c_fin: to.clone(), steps: 2 };
    let cc = ivass_to_cvassrl(&inst);
    let q = &cc.instance;
    let (_, inner) = forced_run(g, from, &[0, 1]).map_err(|e| e.to_string())?;
    let seq = cc.translate(&inner);
    let end = check_run(&q.machine, &q.c_init, &seq).map_err(|e| format!("triple: {e}"))?;
    if end != q.c_fin {
        return fail(format!("triple ends at {end:?}"));
    }
    let ctrl = cc.ctrl();
    for i in [1, 2, 4, 5] {
        let mut s = seq.clone();
        s[i] = Firing::new(Rational::frac(rng.gen_range(1..16), 16), s[i].rule);
        if let Ok(e) = check_run(&q.machine, &q.c_init, &s) {
            if e.values.0[ctrl] >= Rational::int(4) {
                return fail("ctrl reached 4 with a partial test rule");
            }
        }
    }
    // an off fraction on the update rule makes the tested counter nonzero,
    // so the full-fraction round trip overdraws the complement
    let mut s = seq.clone();
    s[0] = Firing::new(&s[0].fraction * &Rational::frac(1, 2), s[0].rule);
    if check_run(&q.machine, &q.c_init, &s).is_ok() {
        return fail("round trip accepted a nonzero tested counter");
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterReport {
    pub m: usize,
    pub states: usize,
    pub max_depth: usize,
}

/// Exhaustive run census of `pda_counter(m)` for every m in 1..=max_m, with
/// the search horizon twice the expected length.
pub fn check_pda_counters(max_m: usize) -> Result<Vec<CounterReport>, String> {
    let mut out = Vec::new();
    for m in 1..=max_m {
        let p = crate::counter::pda_counter(m).map_err(|e| e.to_string())?;
        let census = p.census(2 * m + 4);
        if census.total() != 1 || census.by_length.get(&m) != Some(&1) {
            return fail(format!("m={m}: runs by length {:?}", census.by_length));
        }
        let bound = 2 * (usize::BITS - m.leading_zeros()) as usize + 2;
        if census.max_depth > bound {
            return fail(format!("m={m}: depth {} > {bound}", census.max_depth));
        }
        out.push(CounterReport { m, states: p.states.len(), max_depth: census.max_depth });
    }
    Ok(out)
}

/// Deterministic simulation of the amplifiers for `p` and `k`. Returns the
/// bounded path length and the continuous witness length.
pub fn check_amplifier(p: &[i64], k: u32) -> Result<(usize, usize), String> {
    let pb: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
    let amp = ivass_amplifier(&pb, k).map_err(|e| e.to_string())?;
    let i = &amp.instance;
    let len = 2 * k as usize + 4 * amp.n * p.len();
    if amp.path.len() != len || i.machine.rules.len() != len {
        return fail(format!("path length {} != {len}", amp.path.len()));
    }
    let mut outdeg = vec![0; i.machine.states.len()];
    let mut indeg = vec![0; i.machine.states.len()];
    for r in &i.machine.rules {
        outdeg[r.from] += 1;
        indeg[r.to] += 1;
    }
    if outdeg.iter().chain(&indeg).any(|&d| d > 1) {
        return fail("control graph is not a path");
    }
    let scale = Rational::pow2(k).recip();
    for (j, &x) in p.iter().enumerate() {
        if i.c_fin.values.0[j] != Rational::int(x) * &scale {
            return fail(format!("target x{} is {}", j + 1, i.c_fin.values.0[j]));
        }
    }
    let delta = Rational::pow2(k + 2).recip();
    perturbations_rejected(&i.machine, &i.c_init, &amp.path, &i.c_fin, &delta)?;

    let q = qvass_amplifier(&pb, k).map_err(|e| e.to_string())?;
    let qi = q.instance();
    let end = check_run(&qi.machine, &qi.c_init, &q.witness).map_err(|e| e.to_string())?;
    if end != qi.c_fin || q.witness.len() != 3 * len {
        return fail(format!("continuous amplifier ends at {end:?}"));
    }
    if end.values.0[q.ctrl()] != Rational::int(2 * len as i64) {
        return fail("ctrl value");
    }
    for j in 0..p.len() + 2 {
        let (v, c) = q.pair(j);
        if &end.values.0[v] + &end.values.0[c] != Rational::one() {
            return fail("complement invariant");
        }
    }
    Ok((len, q.witness.len()))
}
