//! Two-counter machines to [0,1]-bounded continuous VASS with zero tests.
//!
//! A TCM configuration (q, n0, n1) is encoded as c_i = n_i / 2^m, st = 1/2^m,
//! te = 0. The prefix loop halves st m times while counting to 1 in steps
//! of 1/m, so only runs of the prescribed length can finish it.

use fracreach::machines::{forced_run, Config, FiringSequence, IvassRl, Tcm, TcmOp};
use fracreach::numerics::{RatVector, Rational};

use crate::gadgets::IvassBuilder;
use crate::{ReductionError, RunLengthInstance};

pub const C0: usize = 0;
pub const C1: usize = 1;
pub const ST: usize = 2;
pub const TE: usize = 3;
pub const X: usize = 4;
pub const COUNT: usize = 5;

pub const COUNTER_NAMES: [&str; 6] = ["c0", "c1", "st", "te", "x", "count"];

#[derive(Clone, Debug)]
pub struct TcmChain {
    pub instance: RunLengthInstance<IvassRl>,
    pub m: usize,
    /// The four rules of one pass around the initialization loop.
    pub init_loop: [usize; 4],
    /// Zero-update rule from the loop into the simulated initial state.
    pub enter: usize,
    /// Per TCM rule, the two rules of its gadget.
    pub gadgets: Vec<[usize; 2]>,
    pub finish: [usize; 2],
}

/// The encoding of a TCM configuration after the initialization prefix.
pub fn encode_config(c: &Config, m: usize) -> RatVector {
    let s = Rational::pow2(m as u32).recip();
    let mut v = RatVector::zeros(6);
    v.0[C0] = &c.values.0[0] * &s;
    v.0[C1] = &c.values.0[1] * &s;
    v.0[ST] = s;
    v.0[X] = Rational::frac(1, m as i64);
    v.0[COUNT] = Rational::one();
    v
}

pub fn tcm_to_ivass(t: &Tcm, m: usize) -> Result<TcmChain, ReductionError> {
    if m == 0 {
        return Err(ReductionError::Parameter("run length must be at least 1".into()));
    }
    let mut b = IvassBuilder::new(6);
    for s in &t.states {
        b.state(s.clone());
    }
    let mut gadgets = Vec::with_capacity(t.rules.len());
    for (i, r) in t.rules.iter().enumerate() {
        let mid = b.state(format!("r{i}.mid"));
        let g = match r.op {
            TcmOp::Inc(c) => [
                b.rule(r.from, mid, &[(c, 1), (TE, 1), (ST, -1)], &[ST]),
                b.rule(mid, r.to, &[(ST, 1), (TE, -1)], &[TE]),
            ],
            TcmOp::Double(c) => [
                b.rule(r.from, mid, &[(TE, 2), (c, -1)], &[c]),
                b.rule(mid, r.to, &[(c, 1), (TE, -1)], &[TE]),
            ],
            TcmOp::Nop => [b.rule(r.from, mid, &[], &[]), b.rule(mid, r.to, &[], &[])],
        };
        gadgets.push(g);
    }
    let fmid = b.state("fin.mid");
    let fbar = b.state("fin");
    let qf = t.final_state;
    let finish = [
        b.rule(qf, fmid, &[(ST, -1)], &[ST, TE]),
        b.rule(fmid, fbar, &[(C0, -1), (C1, -1)], &[C0, C1]),
    ];
    let in0 = b.state("in0");
    let in1 = b.state("in1");
    let in2 = b.state("in2");
    let in3 = b.state("in3");
    let init_loop = [
        b.rule(in0, in1, &[(TE, 1), (ST, -2)], &[ST]),
        b.rule(in1, in2, &[(ST, 1), (TE, -1)], &[TE]),
        b.rule(in2, in3, &[(TE, 1), (COUNT, 1), (X, -1)], &[X]),
        b.rule(in3, in0, &[(X, 1), (TE, -1)], &[TE]),
    ];
    let enter = b.rule(in0, t.initial, &[], &[]);
    let inv_m = Rational::frac(1, m as i64);
    let mut d_init = RatVector::zeros(6);
    d_init.0[ST] = Rational::one();
    d_init.0[X] = inv_m.clone();
    let mut d_fin = RatVector::zeros(6);
    d_fin.0[COUNT] = Rational::one();
    d_fin.0[X] = inv_m;
    Ok(TcmChain {
        instance: RunLengthInstance {
            machine: b.finish(),
            c_init: Config::new(in0, d_init),
            c_fin: Config::new(fbar, d_fin),
            steps: 4 * m + 1 + 2 * (m + 1),
        },
        m,
        init_loop,
        enter,
        gadgets,
        finish,
    })
}

impl TcmChain {
    /// The rule sequence simulating a TCM run given as rule ids.
    pub fn rule_path(&self, run: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.instance.steps);
        for _ in 0..self.m {
            out.extend_from_slice(&self.init_loop);
        }
        out.push(self.enter);
        for &r in run {
            out.extend_from_slice(&self.gadgets[r]);
        }
        out.extend_from_slice(&self.finish);
        out
    }

    /// Translates an accepting TCM run of length m into a firing sequence
    /// from `c_init`. Every fraction is the one forced by a zero test;
    /// nop gadgets fire with fraction 1.
    pub fn translate(&self, run: &[usize]) -> Result<FiringSequence, ReductionError> {
        if run.len() != self.m {
            return Err(ReductionError::BadRun(format!("expected {} steps, got {}", self.m, run.len())));
        }
        if let Some(&r) = run.iter().find(|&&r| r >= self.gadgets.len()) {
            return Err(ReductionError::BadRun(format!("no rule {r}")));
        }
        let path = self.rule_path(run);
        let (_, seq) = forced_run(&self.instance.machine, &self.instance.c_init, &path)
            .map_err(|e| ReductionError::BadRun(e.to_string()))?;
        Ok(seq)
    }
}
