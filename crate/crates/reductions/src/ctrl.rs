//! [0,1]-bounded machines with zero tests to plain continuous VASS.
//!
//! Every counter x gets a complement x̄ with x + x̄ = 1, laid out as
//! interleaved pairs (x, x̄) followed by `ctrl`. Each rule becomes a
//! triple: the update itself, then a round trip that moves x̄ into x and
//! back for every tested x. The round trip adds 2 to `ctrl` only when both
//! of its rules fire with fraction 1, which needs x̄ = 1, i.e. x = 0.

use fracreach::machines::{Config, Firing, FiringSequence, IvassRl, IvassRule, Qvass, VassRule};
use fracreach::numerics::{IntVector, RatVector, Rational};
use num_bigint::BigInt;

use crate::RunLengthInstance;

#[derive(Clone, Debug)]
pub struct CtrlChain {
    pub instance: RunLengthInstance<Qvass>,
    /// Counter added so that every rule tests something, if one was needed.
    pub aux: Option<usize>,
    /// Counters of the bounded machine (including `aux`).
    pub inner_dim: usize,
}

pub fn value_index(x: usize) -> usize {
    2 * x
}

pub fn complement_index(x: usize) -> usize {
    2 * x + 1
}

/// Whether every rule performs at least one zero test.
pub fn all_rules_test(m: &IvassRl) -> bool {
    m.rules.iter().all(|r| !r.zero_tests.is_empty())
}

/// Adds a fresh always-zero counter tested by every rule.
pub fn pad_zero_tests(m: &IvassRl) -> IvassRl {
    let aux = m.dim;
    IvassRl {
        states: m.states.clone(),
        dim: m.dim + 1,
        rules: m
            .rules
            .iter()
            .map(|r| {
                let mut u = r.update.0.clone();
                u.push(BigInt::from(0));
                let mut t = r.zero_tests.clone();
                t.push(aux);
                IvassRule { from: r.from, to: r.to, update: IntVector(u), zero_tests: t }
            })
            .collect(),
    }
}

/// The configuration with complements filled in and `ctrl = zeta`.
pub fn lift_config(c: &Config, zeta: Rational) -> Config {
    let mut v = Vec::with_capacity(2 * c.values.dim() + 1);
    for x in &c.values.0 {
        v.push(x.clone());
        v.push(Rational::one() - x);
    }
    v.push(zeta);
    Config::new(c.state, RatVector(v))
}

pub fn ivass_to_cvassrl(inst: &RunLengthInstance<IvassRl>) -> CtrlChain {
    let (m, aux) = if all_rules_test(&inst.machine) {
        (inst.machine.clone(), None)
    } else {
        (pad_zero_tests(&inst.machine), Some(inst.machine.dim))
    };
    let extend = |c: &Config| {
        let mut c = c.clone();
        if aux.is_some() {
            c.values.0.push(Rational::zero());
        }
        c
    };
    let d = m.dim;
    let ctrl = 2 * d;
    let mut states = m.states.clone();
    let mut rules = Vec::with_capacity(3 * m.rules.len());
    for (i, r) in m.rules.iter().enumerate() {
        let b = states.len();
        states.push(format!("r{i}.b"));
        states.push(format!("r{i}.m"));
        let mut ub = vec![BigInt::from(0); 2 * d + 1];
        for (x, w) in r.update.0.iter().enumerate() {
            ub[value_index(x)] = w.clone();
            ub[complement_index(x)] = -w;
        }
        let mut um = vec![BigInt::from(0); 2 * d + 1];
        for &x in &r.zero_tests {
            um[value_index(x)] = BigInt::from(1);
            um[complement_index(x)] = BigInt::from(-1);
        }
        um[ctrl] = BigInt::from(1);
        let mut ue: Vec<BigInt> = um.iter().map(|v| -v).collect();
        ue[ctrl] = BigInt::from(1);
        rules.push(VassRule { from: r.from, to: b, update: IntVector(ub) });
        rules.push(VassRule { from: b, to: b + 1, update: IntVector(um) });
        rules.push(VassRule { from: b + 1, to: r.to, update: IntVector(ue) });
    }
    let steps = inst.steps;
    CtrlChain {
        instance: RunLengthInstance {
            machine: Qvass { states, dim: 2 * d + 1, rules },
            c_init: lift_config(&extend(&inst.c_init), Rational::zero()),
            c_fin: lift_config(&extend(&inst.c_fin), Rational::int(2 * steps as i64)),
            steps: 3 * steps,
        },
        aux,
        inner_dim: d,
    }
}

impl CtrlChain {
    /// Each firing (α, r) becomes (α, r^b), (1, r^m), (1, r^e).
    pub fn translate(&self, seq: &[Firing]) -> FiringSequence {
        let mut out = Vec::with_capacity(3 * seq.len());
        for f in seq {
            out.push(Firing::new(f.fraction.clone(), 3 * f.rule));
            out.push(Firing::new(Rational::one(), 3 * f.rule + 1));
            out.push(Firing::new(Rational::one(), 3 * f.rule + 2));
        }
        out
    }

    pub fn ctrl(&self) -> usize {
        2 * self.inner_dim
    }
}
