//! Synchronous product of the pushdown step counter with a continuous VASS.
//! Every product step is one counter step paired with one VASS step, so a
//! run from the start to the end of the counter has exactly m VASS steps.

use fracreach::machines::{Config, Firing, FiringSequence, PvassRule, Qpvass, Qvass};

use crate::counter::{pda_counter, PdaCounter};
use crate::{ReductionError, RunLengthInstance};

#[derive(Clone, Debug)]
pub struct ProductChain {
    pub machine: Qpvass,
    pub c0: Config,
    pub c1: Config,
    pub counter: PdaCounter,
    pub vass_states: usize,
    pub vass_rules: usize,
}

impl ProductChain {
    pub fn state(&self, counter_state: usize, vass_state: usize) -> usize {
        counter_state * self.vass_states + vass_state
    }
}

pub fn cvassrl_to_cpvass(inst: &RunLengthInstance<Qvass>) -> Result<ProductChain, ReductionError> {
    let counter = pda_counter(inst.steps)?;
    let m = &inst.machine;
    let nq = m.states.len();
    let mut states = Vec::with_capacity(counter.states.len() * nq);
    for p in &counter.states {
        for q in &m.states {
            states.push(format!("{p}|{q}"));
        }
    }
    let mut rules = Vec::with_capacity(counter.rules.len() * m.rules.len());
    for pr in &counter.rules {
        for t in &m.rules {
            rules.push(PvassRule {
                from: pr.from * nq + t.from,
                to: pr.to * nq + t.to,
                update: t.update.clone(),
                stack: pr.stack,
            });
        }
    }
    let c0 = Config::new(counter.start * nq + inst.c_init.state, inst.c_init.values.clone());
    let c1 = Config::new(counter.end * nq + inst.c_fin.state, inst.c_fin.values.clone());
    Ok(ProductChain {
        machine: Qpvass { states, stack_alphabet: counter.symbols.clone(), dim: m.dim, rules },
        c0,
        c1,
        counter,
        vass_states: nq,
        vass_rules: m.rules.len(),
    })
}

impl ProductChain {
    /// Pairs the i-th VASS firing with the i-th step of the counter run.
    pub fn translate(&self, seq: &[Firing]) -> Result<FiringSequence, ReductionError> {
        let run = self.counter.run();
        if run.len() != seq.len() {
            return Err(ReductionError::BadRun(format!("expected {} steps, got {}", run.len(), seq.len())));
        }
        Ok(run
            .iter()
            .zip(seq)
            .map(|(&p, f)| Firing::new(f.fraction.clone(), p * self.vass_rules + f.rule))
            .collect())
    }
}
