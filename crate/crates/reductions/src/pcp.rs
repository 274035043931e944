//! Bounded PCP to two-counter machines.
//!
//! Words are numbers in bijective base 2^k (digits 1..|Σ|), so appending a
//! letter with digit d is k doublings followed by d increments. Both
//! counters start at 1 (a shared leading digit) so no doubling ever
//! touches a zero counter.

use std::collections::BTreeSet;

use fracreach::machines::{Tcm, TcmOp, TcmRule};
use num_bigint::BigInt;

use crate::ReductionError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedPcp {
    pub pairs: Vec<(String, String)>,
    /// Required length of the matched top word.
    pub bound: usize,
}

impl BoundedPcp {
    pub fn new(pairs: &[(&str, &str)], bound: usize) -> Result<Self, ReductionError> {
        if pairs.is_empty() || pairs.iter().any(|(u, v)| u.is_empty() || v.is_empty()) {
            return Err(ReductionError::Parameter("pairs must be non-empty words".into()));
        }
        Ok(BoundedPcp { pairs: pairs.iter().map(|(u, v)| (u.to_string(), v.to_string())).collect(), bound })
    }

    pub fn alphabet(&self) -> Vec<char> {
        let set: BTreeSet<char> = self.pairs.iter().flat_map(|(u, v)| u.chars().chain(v.chars())).collect();
        set.into_iter().collect()
    }

    /// Smallest k >= 1 with |Σ| <= 2^k.
    pub fn digit_bits(&self) -> u32 {
        let n = self.alphabet().len().max(2);
        usize::BITS - (n - 1).leading_zeros()
    }

    pub fn digit(&self, c: char) -> usize {
        self.alphabet().iter().position(|&a| a == c).expect("letter in alphabet") + 1
    }

    /// An index sequence whose top word has length `bound` and equals the
    /// bottom word, by depth-first search.
    pub fn solve(&self) -> Option<Vec<usize>> {
        fn go(p: &BoundedPcp, top: &str, bot: &str, acc: &mut Vec<usize>) -> bool {
            if top.chars().count() == p.bound {
                return top == bot;
            }
            for (i, (u, v)) in p.pairs.iter().enumerate() {
                let t = format!("{top}{u}");
                let b = format!("{bot}{v}");
                if t.chars().count() > p.bound || t.chars().zip(b.chars()).any(|(x, y)| x != y) {
                    continue;
                }
                acc.push(i);
                if go(p, &t, &b, acc) {
                    return true;
                }
                acc.pop();
            }
            false
        }
        let mut acc = Vec::new();
        go(self, "", "", &mut acc).then_some(acc)
    }
}

/// Bijective base-2^k value of `word`.
pub fn encode_word(p: &BoundedPcp, word: &str) -> BigInt {
    let base = BigInt::from(1u64 << p.digit_bits());
    word.chars().fold(BigInt::from(0), |n, c| n * &base + p.digit(c))
}

#[derive(Clone, Debug)]
pub struct PcpTcm {
    pub tcm: Tcm,
    pub m: usize,
    /// Steps spent per letter of the top word.
    pub budget: usize,
    pub sentinel: [usize; 2],
    /// For each pair, the rules of its path from the hub back to the hub.
    pub pair_paths: Vec<Vec<usize>>,
}

pub fn pcp_to_tcm(p: &BoundedPcp) -> PcpTcm {
    let k = p.digit_bits() as usize;
    let sigma = 1usize << k;
    let vmax = p.pairs.iter().map(|(_, v)| v.chars().count()).max().unwrap_or(0);
    let budget = (k + sigma) * (1 + vmax);
    let mut states = vec!["s0".to_string(), "s1".to_string(), "hub".to_string()];
    let hub = 2;
    let mut rules = vec![TcmRule { from: 0, to: 1, op: TcmOp::Inc(0) }, TcmRule { from: 1, to: hub, op: TcmOp::Inc(1) }];
    let mut pair_paths = Vec::new();
    for (i, (u, v)) in p.pairs.iter().enumerate() {
        let mut ops = Vec::new();
        for (c, w) in [(0, u), (1, v)] {
            for ch in w.chars() {
                ops.extend(std::iter::repeat_n(TcmOp::Double(c), k));
                ops.extend(std::iter::repeat_n(TcmOp::Inc(c), p.digit(ch)));
            }
        }
        let target = budget * u.chars().count();
        ops.resize(target, TcmOp::Nop);
        let mut from = hub;
        let mut path = Vec::with_capacity(ops.len());
        for (j, op) in ops.iter().enumerate() {
            let to = if j + 1 == ops.len() {
                hub
            } else {
                states.push(format!("p{i}.{j}"));
                states.len() - 1
            };
            path.push(rules.len());
            rules.push(TcmRule { from, to, op: *op });
            from = to;
        }
        pair_paths.push(path);
    }
    PcpTcm {
        tcm: Tcm { states, initial: 0, final_state: hub, rules },
        m: 2 + budget * p.bound,
        budget,
        sentinel: [0, 1],
        pair_paths,
    }
}

impl PcpTcm {
    /// The TCM run spelling out an index sequence.
    pub fn run_for(&self, indices: &[usize]) -> Vec<usize> {
        let mut out = self.sentinel.to_vec();
        for &i in indices {
            out.extend_from_slice(&self.pair_paths[i]);
        }
        out
    }
}
