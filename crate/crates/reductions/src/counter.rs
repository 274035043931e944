//! A pushdown automaton with O(log m) states whose only run from its start
//! configuration to its end configuration has exactly m steps.
//!
//! Every step performs at most one stack operation. Set bits j >= 2 of m
//! become binary trees: pushing `S_h` and expanding it (pop `S_h`, push
//! `S_{h-1}` twice, through two helper states) down to leaves `S_1` costs
//! 2^{h+1} - 2 steps for h = j - 1. The remaining steps are a chain of
//! stackless edges at the front.

use std::collections::{BTreeMap, VecDeque};

use fracreach::machines::{apply_stack, StackEffect};

use crate::ReductionError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdaRule {
    pub from: usize,
    pub to: usize,
    pub stack: StackEffect,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdaCounter {
    pub m: usize,
    pub states: Vec<String>,
    /// `symbols[h-1]` is S_h.
    pub symbols: Vec<String>,
    pub rules: Vec<PdaRule>,
    pub start: usize,
    pub end: usize,
}

/// Census of all start-to-end runs up to some length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunCensus {
    /// Number of runs ending at (end, ε), by length.
    pub by_length: BTreeMap<usize, u64>,
    /// Largest stack height seen on any explored configuration.
    pub max_depth: usize,
}

impl RunCensus {
    pub fn total(&self) -> u64 {
        self.by_length.values().sum()
    }
}

/// Tree heights used for `m`, largest first.
fn tree_heights(m: usize) -> Vec<usize> {
    (2..usize::BITS as usize).rev().filter(|&j| m >> j & 1 == 1).map(|j| j - 1).collect()
}

fn tree_cost(h: usize) -> usize {
    (1 << (h + 1)) - 2
}

pub fn pda_counter(m: usize) -> Result<PdaCounter, ReductionError> {
    if m == 0 {
        return Err(ReductionError::Parameter("counter length must be at least 1".into()));
    }
    let heights = tree_heights(m);
    let plain = m - heights.iter().map(|&h| tree_cost(h)).sum::<usize>();
    let hmax = heights.first().copied().unwrap_or(0);
    let mut states = vec!["b0".to_string()];
    let mut rules = Vec::new();
    for i in 0..plain {
        states.push(format!("b{}", i + 1));
        rules.push(PdaRule { from: i, to: i + 1, stack: StackEffect::None });
    }
    let start = 0;
    let mut cur = plain;
    if heights.is_empty() {
        return Ok(PdaCounter { m, states, symbols: Vec::new(), rules, start, end: cur });
    }
    // pushes go smallest tree first so the largest ends up on top
    for (i, &h) in heights.iter().rev().enumerate() {
        states.push(format!("p{}", i + 1));
        let next = states.len() - 1;
        rules.push(PdaRule { from: cur, to: next, stack: StackEffect::Push(h - 1) });
        cur = next;
    }
    let e = cur;
    states[e] = "e".into();
    let symbols = (1..=hmax).map(|h| format!("S{h}")).collect();
    rules.push(PdaRule { from: e, to: e, stack: StackEffect::Pop(0) });
    for h in 2..=hmax {
        states.push(format!("a{h}"));
        states.push(format!("c{h}"));
        let a = states.len() - 2;
        rules.push(PdaRule { from: e, to: a, stack: StackEffect::Pop(h - 1) });
        rules.push(PdaRule { from: a, to: a + 1, stack: StackEffect::Push(h - 2) });
        rules.push(PdaRule { from: a + 1, to: e, stack: StackEffect::Push(h - 2) });
    }
    Ok(PdaCounter { m, states, symbols, rules, start, end: e })
}

impl PdaCounter {
    /// The unique run, found by following the only applicable rule.
    pub fn run(&self) -> Vec<usize> {
        let mut state = self.start;
        let mut stack: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        while !(state == self.end && stack.is_empty()) {
            let (i, next) = self
                .rules
                .iter()
                .enumerate()
                .filter(|(_, r)| r.from == state)
                .find_map(|(i, r)| apply_stack(&stack, r.stack).ok().map(|s| (i, s)))
                .expect("counter run is stuck");
            state = self.rules[i].to;
            stack = next;
            out.push(i);
        }
        out
    }

    /// Stack heights along the run, including the start.
    pub fn depth_profile(&self) -> Vec<usize> {
        let mut stack: Vec<usize> = Vec::new();
        let mut out = vec![0];
        for i in self.run() {
            stack = apply_stack(&stack, self.rules[i].stack).expect("replay");
            out.push(stack.len());
        }
        out
    }

    /// Exhaustive breadth-first count of all runs of length at most
    /// `max_len` from (start, ε) to (end, ε). Runs are counted with
    /// multiplicity, so no configuration merging happens.
    pub fn census(&self, max_len: usize) -> RunCensus {
        let mut by_length = BTreeMap::new();
        let mut max_depth = 0;
        let mut layer: VecDeque<(usize, Vec<usize>, u64)> = VecDeque::from([(self.start, Vec::new(), 1u64)]);
        for len in 0..=max_len {
            let mut merged: BTreeMap<(usize, Vec<usize>), u64> = BTreeMap::new();
            for (s, st, n) in layer.drain(..) {
                max_depth = max_depth.max(st.len());
                if s == self.end && st.is_empty() {
                    *by_length.entry(len).or_insert(0) += n;
                }
                if len == max_len {
                    continue;
                }
                for r in self.rules.iter().filter(|r| r.from == s) {
                    if let Ok(next) = apply_stack(&st, r.stack) {
                        *merged.entry((r.to, next)).or_insert(0) += n;
                    }
                }
            }
            layer = merged.into_iter().map(|((s, st), n)| (s, st, n)).collect();
        }
        RunCensus { by_length, max_depth }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step() {
        let p = pda_counter(1).unwrap();
        assert_eq!(p.states.len(), 2);
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.run().len(), 1);
    }

    #[test]
    fn lengths() {
        for m in 1..40 {
            assert_eq!(pda_counter(m).unwrap().run().len(), m, "m={m}");
        }
    }
}
