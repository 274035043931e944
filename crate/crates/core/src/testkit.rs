//! Seeded random instance generators shared by the test suites.

use std::collections::HashMap;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::creach::{const_exprs, synthesize_run, SemigroupSpec, SupportSequence};
use crate::grammar::{pvass_to_grammar, RawSym, TargetStack, VectorGrammar};
use crate::lra::{fourier_motzkin, is_sat, Atom, Formula, LinExpr, Rel, SatResult, Var};
use crate::machines::{check_run, Config, PvassRule, Qpvass, StackEffect};
use crate::numerics::{vec_affine, IntVector, RatVector, Rational};
use crate::oracle::{bounded_decide, word_feasible, OracleResult};
use crate::pumps::{enumerate_pumps, replay_weighted, PumpRelation};
use crate::solver::{decide, witness_ok, Mode, SolverOptions};

pub fn small_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    Rational::frac(rng.gen_range(0..=max_num * q), q)
}

pub fn rat_vector<R: Rng>(rng: &mut R, d: usize, max: i64, max_den: i64) -> RatVector {
    RatVector((0..d).map(|_| small_rational(rng, max, max_den)).collect())
}

pub fn int_vector<R: Rng>(rng: &mut R, d: usize, lo: i64, hi: i64) -> IntVector {
    IntVector((0..d).map(|_| BigInt::from(rng.gen_range(lo..=hi))).collect())
}

/// Random formula over `nvars` variables with at most `natoms` atoms,
/// mixing strict and non-strict atoms, and sometimes disjunctions.
pub fn random_formula<R: Rng>(rng: &mut R, nvars: usize, natoms: usize) -> Formula {
    let vars: Vec<Var> = (0..nvars).map(|i| Var::new(format!("v{i}"))).collect();
    let atom = |rng: &mut R| {
        let mut e = LinExpr::zero();
        let k = rng.gen_range(1..=nvars.min(3));
        for v in vars.choose_multiple(rng, k) {
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                e.add_term(v, &Rational::int(BigInt::from(c)));
            }
        }
        let rel = match rng.gen_range(0..5) {
            0 | 1 => Rel::Lt,
            2 | 3 => Rel::Le,
            _ => Rel::Eq,
        };
        let b = Rational::frac(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        Formula::Atom(Atom::new(&e, rel, &LinExpr::constant(b)))
    };
    let n = rng.gen_range(1..=natoms);
    let mut parts = Vec::new();
    let mut used = 0;
    while used < n {
        if n - used >= 2 && rng.gen_bool(0.25) {
            parts.push(Formula::or(vec![atom(rng), atom(rng)]));
            used += 2;
        } else {
            parts.push(atom(rng));
            used += 1;
        }
    }
    Formula::and(parts)
}

/// A reachability/coverability instance: machine, source, target.
#[derive(Clone, Debug)]
pub struct Instance {
    pub machine: Qpvass,
    pub from: Config,
    pub to: Config,
}

/// Random machine with at most 4 states, dimension at most 2 and, with
/// `stack`, at most 2 stack symbols. With `acyclic` every rule goes to a
/// later state.
pub fn random_machine<R: Rng>(rng: &mut R, stack: bool, acyclic: bool) -> Qpvass {
    let states = rng.gen_range(2..=4);
    let d = rng.gen_range(1..=2);
    let syms = if stack { rng.gen_range(1..=2) } else { 0 };
    let nrules = rng.gen_range(2..=6);
    let mut rules = Vec::new();
    for _ in 0..nrules {
        let (from, to) = if acyclic {
            let from = rng.gen_range(0..states - 1);
            (from, rng.gen_range(from + 1..states))
        } else {
            (rng.gen_range(0..states), rng.gen_range(0..states))
        };
        let st = if syms == 0 {
            StackEffect::None
        } else {
            match rng.gen_range(0..3) {
                0 => StackEffect::None,
                1 => StackEffect::Push(rng.gen_range(0..syms)),
                _ => StackEffect::Pop(rng.gen_range(0..syms)),
            }
        };
        rules.push(PvassRule { from, to, update: int_vector(rng, d, -2, 2), stack: st });
    }
    Qpvass {
        states: (0..states).map(|i| format!("q{i}")).collect(),
        stack_alphabet: (0..syms).map(|i| ((b'a' + i as u8) as char).to_string()).collect(),
        dim: d,
        rules,
    }
}

/// Random instance whose run language from the source (towards the
/// target's control point) is finite with words of length at most
/// `max_word`. Plain VASS when `stack` is false. Half of the targets are
/// reached by a random run, the rest are random.
pub fn random_finite_instance<R: Rng>(rng: &mut R, stack: bool, max_word: usize) -> Instance {
    loop {
        let m = random_machine(rng, stack, false);
        let (d, states, syms) = (m.dim, m.states.len(), m.stack_alphabet.len());
        let from = Config::new(0, rat_vector(rng, d, 2, 4));
        let to_state = rng.gen_range(0..states);
        let to_stack: Vec<usize> = if syms > 0 && rng.gen_bool(0.3) { vec![rng.gen_range(0..syms)] } else { vec![] };
        let g = pvass_to_grammar(&m, &from, to_state, &TargetStack::Exactly(to_stack.clone()));
        if g.is_empty() || !g.is_finite() {
            continue;
        }
        if g.enumerate_words(max_word + 1).iter().any(|w| w.len() > max_word) {
            continue;
        }
        let words = g.enumerate_words(max_word);
        let target = if rng.gen_bool(0.5) {
            // fire a random word with fractions in {1/4, 1/2, 3/4, 1}
            let w = words.choose(rng).unwrap();
            let mut cur = from.values.clone();
            let mut ok = true;
            for t in w {
                let a = Rational::frac(rng.gen_range(1..=4), 4);
                cur = vec_affine(&cur, &a, &g.alphabet[*t]).unwrap();
                if !cur.is_nonneg() {
                    ok = false;
                    break;
                }
            }
            if ok {
                cur
            } else {
                rat_vector(rng, d, 2, 4)
            }
        } else {
            rat_vector(rng, d, 2, 4)
        };
        return Instance { machine: m, from, to: Config::with_stack(to_state, to_stack, target) };
    }
}

/// Random CNF grammar with at most `max_n` nonterminals whose start
/// nonterminal can derive itself. Returns the grammar and that
/// nonterminal.
pub fn random_recursive_grammar<R: Rng>(rng: &mut R, max_n: usize, d: usize) -> (VectorGrammar, usize) {
    loop {
        let n = rng.gen_range(2..=max_n);
        let names: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
        let mut raw = Vec::new();
        for a in 0..n {
            raw.push((a, vec![RawSym::T(int_vector(rng, d, -1, 1))]));
            for _ in 0..rng.gen_range(0..=2) {
                raw.push((a, vec![RawSym::N(rng.gen_range(0..n)), RawSym::N(rng.gen_range(0..n))]));
            }
        }
        let g = VectorGrammar::new(d, names, 0, raw).to_cnf();
        let sr = g.self_reachable();
        let cands: Vec<usize> = (0..g.nonterminals.len()).filter(|&a| sr[a]).collect();
        if let Some(&a) = cands.choose(rng) {
            return (g, a);
        }
    }
}

/// A semigroup language (words w^+) with source and target configurations
/// that are connected by construction.
pub fn random_semigroup_instance<R: Rng>(rng: &mut R) -> (SemigroupSpec, RatVector, RatVector) {
    loop {
        let d = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let letters: Vec<IntVector> = (0..k).map(|_| int_vector(rng, d, -2, 2)).collect();
        let mut w: Vec<IntVector> = letters.clone();
        for _ in 0..rng.gen_range(0..=3) {
            w.push(letters.choose(rng).unwrap().clone());
        }
        w.shuffle(rng);
        let u = rat_vector(rng, d, 3, 4);
        let reps = rng.gen_range(1..=3);
        let mut cur = u.clone();
        let mut ok = true;
        'run: for _ in 0..reps {
            for a in &w {
                let f = Rational::frac(rng.gen_range(1..=4), 4);
                cur = vec_affine(&cur, &f, a).unwrap();
                if !cur.is_nonneg() {
                    ok = false;
                    break 'run;
                }
            }
        }
        if !ok {
            continue;
        }
        let names = vec!["S".to_string(), "W".to_string()];
        let raw = vec![
            (0, vec![RawSym::N(1)]),
            (0, vec![RawSym::N(0), RawSym::N(0)]),
            (1, w.iter().map(|a| RawSym::T(a.clone())).collect()),
        ];
        let grammar = VectorGrammar::new(d, names, 0, raw);
        let support = SupportSequence::of_word(&w);
        return (SemigroupSpec { grammar, support, witness: w }, u, cur);
    }
}

/// Outcome counts of pump formula checks.
#[derive(Default, Debug, Clone, Copy, PartialEq, Eq)]
pub struct PumpTally {
    pub brute_sat: usize,
    pub brute_unsat: usize,
    /// SAT with no pump up to the length bound; a longer pump run was
    /// synthesized and replayed instead.
    pub synthesized: usize,
}

fn fire_random<R: Rng>(rng: &mut R, w: &[IntVector], u: &RatVector) -> Option<RatVector> {
    let mut cur = u.clone();
    for a in w {
        cur = vec_affine(&cur, &Rational::frac(rng.gen_range(1..=4), 4), a).ok()?;
        if !cur.is_nonneg() {
            return None;
        }
    }
    Some(cur)
}

/// Compares the pump formula of `a` with brute force over pumps of
/// combined length at most `max_len`, at `samples` points (half of them
/// produced by firing an enumerated pump). A feasible short pump must make
/// the formula SAT; every SAT answer must yield a replayable pump run.
pub fn check_pump_samples<R: Rng>(
    rng: &mut R,
    g: &VectorGrammar,
    a: usize,
    max_len: usize,
    samples: usize,
    tally: &mut PumpTally,
) -> Result<(), String> {
    let d = g.dim;
    let rel = PumpRelation::new(g, a, 1_000_000).map_err(|e| e.to_string())?;
    let pumps: Vec<(Vec<IntVector>, Vec<IntVector>)> = enumerate_pumps(g, a, max_len)
        .into_iter()
        .map(|(w, w2)| {
            let l = |x: Vec<usize>| x.into_iter().map(|t| g.alphabet[t].clone()).collect::<Vec<_>>();
            (l(w), l(w2))
        })
        .collect();
    for s in 0..samples {
        let (u, v, u2, v2) = if s % 2 == 0 {
            let (w, w2) = pumps.choose(rng).unwrap();
            let u = rat_vector(rng, d, 2, 4);
            let u2 = rat_vector(rng, d, 2, 4);
            match (fire_random(rng, w, &u), fire_random(rng, w2, &u2)) {
                (Some(v), Some(v2)) => (u, v, u2, v2),
                _ => continue,
            }
        } else {
            (rat_vector(rng, d, 2, 4), rat_vector(rng, d, 2, 4), rat_vector(rng, d, 2, 4), rat_vector(rng, d, 2, 4))
        };
        let f = rel.formula(&const_exprs(&u), &const_exprs(&v), &const_exprs(&u2), &const_exprs(&v2), "p");
        let sat = is_sat(&f).is_sat();
        let mut left: HashMap<&[IntVector], bool> = HashMap::new();
        let mut right: HashMap<&[IntVector], bool> = HashMap::new();
        let brute = pumps.iter().any(|(w, w2)| {
            *left.entry(w).or_insert_with(|| word_feasible(w, &u, &v, Mode::Reach))
                && *right.entry(w2).or_insert_with(|| word_feasible(w2, &u2, &v2, Mode::Reach))
        });
        let at = || format!("{} at {}: {u} {v} {u2} {v2}", g.dump(), g.nonterminals[a]);
        if brute && !sat {
            return Err(format!("feasible pump but formula UNSAT: {}", at()));
        }
        if sat {
            let run = rel.realize(&u, &v, &u2, &v2).ok_or_else(|| format!("SAT but no pump run: {}", at()))?;
            if replay_weighted(&run.left, &u).as_ref() != Some(&v) || replay_weighted(&run.right, &u2).as_ref() != Some(&v2) {
                return Err(format!("synthesized pump run does not replay: {}", at()));
            }
        }
        match (sat, brute) {
            (true, true) => tally.brute_sat += 1,
            (false, false) => tally.brute_unsat += 1,
            _ => tally.synthesized += 1,
        }
    }
    Ok(())
}

/// (A -> X B, B -> A Y | (0), X -> (1), Y -> (-1)) in CNF, and A.
pub fn balanced_grammar() -> (VectorGrammar, usize) {
    let g = VectorGrammar::new(
        1,
        vec!["A".into(), "B".into(), "X".into(), "Y".into()],
        0,
        vec![
            (0, vec![RawSym::N(2), RawSym::N(1)]),
            (1, vec![RawSym::N(0), RawSym::N(3)]),
            (1, vec![RawSym::T(IntVector::from_i64(&[0]))]),
            (2, vec![RawSym::T(IntVector::from_i64(&[1]))]),
            (3, vec![RawSym::T(IntVector::from_i64(&[-1]))]),
        ],
    )
    .to_cnf();
    let a = g.nonterminals.iter().position(|n| n == "A").unwrap();
    (g, a)
}

/// Decides the instance in both modes and compares with the bounded
/// oracle. Returns how many of the two answers were positive.
pub fn check_oracle_instance(inst: &Instance, max_word: usize) -> Result<usize, String> {
    let mut pos = 0;
    for mode in [Mode::Reach, Mode::Cover] {
        let v = decide(&inst.machine, &inst.from, &inst.to, mode, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let oracle = matches!(bounded_decide(&inst.machine, &inst.from, &inst.to, mode, max_word), OracleResult::Found(_));
        if v.is_positive() != oracle {
            return Err(format!("{mode:?}: solver {} vs oracle {oracle} on {inst:?}", v.outcome));
        }
        if v.is_positive() {
            pos += 1;
            let w = v.witness.ok_or_else(|| format!("{mode:?}: positive without witness on {inst:?}"))?;
            if !witness_ok(&inst.machine, &inst.from, &inst.to, mode, &w) {
                return Err(format!("{mode:?}: witness does not replay on {inst:?}"));
            }
        }
    }
    Ok(pos)
}

/// Simplex against Fourier-Motzkin; models must satisfy the formula.
/// Returns the SAT answer.
pub fn check_lra_formula(f: &Formula) -> Result<bool, String> {
    let fm = fourier_motzkin::is_sat(f);
    match is_sat(f) {
        SatResult::Sat(m) => {
            if !f.eval(&m) {
                return Err(format!("model does not satisfy formula: {m:?}"));
            }
            if !fm {
                return Err("simplex SAT, Fourier-Motzkin UNSAT".into());
            }
            Ok(true)
        }
        SatResult::Unsat if fm => Err("simplex UNSAT, Fourier-Motzkin SAT".into()),
        SatResult::Unsat => Ok(false),
        SatResult::Timeout => Err("timeout without limits".into()),
    }
}

/// Runs synthesis on a connected instance and replays the result.
/// Returns the run length.
pub fn check_synthesis(spec: &SemigroupSpec, u: &RatVector, v: &RatVector) -> Result<usize, String> {
    let run = synthesize_run(spec, u, v).map_err(|e| format!("{e} for {u} -> {v}"))?;
    let end = check_run(&run.machine(), &Config::new(0, u.clone()), &run.steps).map_err(|e| e.to_string())?;
    if end.values != *v {
        return Err(format!("run ends at {} instead of {v}", end.values));
    }
    let w = run.word();
    if SupportSequence::of_word(&w) != spec.support {
        return Err("run leaves the support".into());
    }
    Ok(run.steps.len())
}
