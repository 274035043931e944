//! Machine models and their step semantics.
//!
//! Rule ids are zero-based indices into a machine's rule list. Counter
//! indices are zero-based too.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::numerics::{vec_affine, IntVector, RatVector, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackEffect {
    None,
    Push(usize),
    Pop(usize),
}

/// A configuration. `stack` is top-first and empty for stackless models.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub state: usize,
    pub stack: Vec<usize>,
    pub values: RatVector,
}

impl Config {
    pub fn new(state: usize, values: RatVector) -> Self {
        Config { state, stack: Vec::new(), values }
    }

    pub fn with_stack(state: usize, stack: Vec<usize>, values: RatVector) -> Self {
        Config { state, stack, values }
    }

    pub fn covers(&self, other: &Config) -> bool {
        self.state == other.state && self.stack == other.stack && self.values.covers(&other.values)
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q{}, {:?}, {})", self.state, self.stack, self.values)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Firing {
    pub fraction: Rational,
    pub rule: usize,
}

impl Firing {
    pub fn new(fraction: Rational, rule: usize) -> Self {
        Firing { fraction, rule }
    }
}

pub type FiringSequence = Vec<Firing>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StepError {
    #[error("fraction {0} outside (0,1]")]
    FractionOutOfRange(Rational),
    #[error("no rule {0}")]
    UnknownRule(usize),
    #[error("rule leaves state {expected}, configuration is in state {actual}")]
    WrongState { expected: usize, actual: usize },
    #[error("counter {0} would become negative")]
    NegativeCounter(usize),
    #[error("counter {0} would leave [0,1]")]
    OutOfUnitInterval(usize),
    #[error("zero test on counter {0} fails")]
    ZeroTestFailed(usize),
    #[error("stack top does not match symbol {0}")]
    StackMismatch(usize),
    #[error("dimension mismatch: machine {0}, configuration {1}")]
    Dimension(usize, usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("step {index}: {error}")]
pub struct RunError {
    pub index: usize,
    pub error: StepError,
}

/// Common interface of all machine models.
pub trait Machine {
    fn dim(&self) -> usize;
    fn state_names(&self) -> &[String];
    fn rule_count(&self) -> usize;
    fn rule_source(&self, rule: usize) -> usize;
    fn step(&self, c: &Config, rule: usize, alpha: &Rational) -> Result<Config, StepError>;

    /// A fraction the rule is forced to use from `c`, if the model forces one.
    fn forced_fraction(&self, _c: &Config, _rule: usize) -> Option<Rational> {
        None
    }

    /// Whether firing fractions are meaningful at all.
    fn continuous(&self) -> bool {
        true
    }

    fn state_index(&self, name: &str) -> Option<usize> {
        self.state_names().iter().position(|s| s == name)
    }
}

fn check_alpha(alpha: &Rational) -> Result<(), StepError> {
    if alpha.is_fraction() {
        Ok(())
    } else {
        Err(StepError::FractionOutOfRange(alpha.clone()))
    }
}

fn check_source(c: &Config, from: usize) -> Result<(), StepError> {
    if c.state != from {
        return Err(StepError::WrongState { expected: from, actual: c.state });
    }
    Ok(())
}

fn affine_nonneg(u: &RatVector, alpha: &Rational, t: &IntVector) -> Result<RatVector, StepError> {
    let v = vec_affine(u, alpha, t).map_err(|_| StepError::Dimension(t.dim(), u.dim()))?;
    if let Some(i) = v.0.iter().position(|x| x.is_negative()) {
        return Err(StepError::NegativeCounter(i));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VassRule {
    pub from: usize,
    pub to: usize,
    pub update: IntVector,
}

/// Continuous VASS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qvass {
    pub states: Vec<String>,
    pub dim: usize,
    pub rules: Vec<VassRule>,
}

impl Machine for Qvass {
    fn dim(&self) -> usize {
        self.dim
    }
    fn state_names(&self) -> &[String] {
        &self.states
    }
    fn rule_count(&self) -> usize {
        self.rules.len()
    }
    fn rule_source(&self, rule: usize) -> usize {
        self.rules[rule].from
    }
    fn step(&self, c: &Config, rule: usize, alpha: &Rational) -> Result<Config, StepError> {
        let r = self.rules.get(rule).ok_or(StepError::UnknownRule(rule))?;
        check_alpha(alpha)?;
        check_source(c, r.from)?;
        let values = affine_nonneg(&c.values, alpha, &r.update)?;
        Ok(Config { state: r.to, stack: c.stack.clone(), values })
    }
}

impl Qvass {
    /// The same machine viewed as a pushdown machine with an empty stack alphabet.
    pub fn to_qpvass(&self) -> Qpvass {
        Qpvass {
            states: self.states.clone(),
            stack_alphabet: Vec::new(),
            dim: self.dim,
            rules: self
                .rules
                .iter()
                .map(|r| PvassRule { from: r.from, to: r.to, update: r.update.clone(), stack: StackEffect::None })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PvassRule {
    pub from: usize,
    pub to: usize,
    pub update: IntVector,
    pub stack: StackEffect,
}

/// Continuous pushdown VASS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qpvass {
    pub states: Vec<String>,
    pub stack_alphabet: Vec<String>,
    pub dim: usize,
    pub rules: Vec<PvassRule>,
}

impl Machine for Qpvass {
    fn dim(&self) -> usize {
        self.dim
    }
    fn state_names(&self) -> &[String] {
        &self.states
    }
    fn rule_count(&self) -> usize {
        self.rules.len()
    }
    fn rule_source(&self, rule: usize) -> usize {
        self.rules[rule].from
    }
    fn step(&self, c: &Config, rule: usize, alpha: &Rational) -> Result<Config, StepError> {
        let r = self.rules.get(rule).ok_or(StepError::UnknownRule(rule))?;
        check_alpha(alpha)?;
        check_source(c, r.from)?;
        let stack = apply_stack(&c.stack, r.stack)?;
        let values = affine_nonneg(&c.values, alpha, &r.update)?;
        Ok(Config { state: r.to, stack, values })
    }
}

pub fn apply_stack(stack: &[usize], eff: StackEffect) -> Result<Vec<usize>, StepError> {
    match eff {
        StackEffect::None => Ok(stack.to_vec()),
        StackEffect::Push(s) => {
            let mut v = Vec::with_capacity(stack.len() + 1);
            v.push(s);
            v.extend_from_slice(stack);
            Ok(v)
        }
        StackEffect::Pop(s) => match stack.first() {
            Some(&t) if t == s => Ok(stack[1..].to_vec()),
            _ => Err(StepError::StackMismatch(s)),
        },
    }
}

impl Qpvass {
    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.stack_alphabet.iter().position(|s| s == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IvassRule {
    pub from: usize,
    pub to: usize,
    pub update: IntVector,
    /// Counters that must be zero after the step.
    pub zero_tests: Vec<usize>,
}

/// Continuous VASS with counters in [0,1] and zero tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IvassRl {
    pub states: Vec<String>,
    pub dim: usize,
    pub rules: Vec<IvassRule>,
}

impl Machine for IvassRl {
    fn dim(&self) -> usize {
        self.dim
    }
    fn state_names(&self) -> &[String] {
        &self.states
    }
    fn rule_count(&self) -> usize {
        self.rules.len()
    }
    fn rule_source(&self, rule: usize) -> usize {
        self.rules[rule].from
    }
    fn step(&self, c: &Config, rule: usize, alpha: &Rational) -> Result<Config, StepError> {
        let r = self.rules.get(rule).ok_or(StepError::UnknownRule(rule))?;
        check_alpha(alpha)?;
        check_source(c, r.from)?;
        let values = vec_affine(&c.values, alpha, &r.update).map_err(|_| StepError::Dimension(self.dim, c.values.dim()))?;
        let one = Rational::one();
        if let Some(i) = values.0.iter().position(|x| x.is_negative() || *x > one) {
            return Err(StepError::OutOfUnitInterval(i));
        }
        for &i in &r.zero_tests {
            if !values.0[i].is_zero() {
                return Err(StepError::ZeroTestFailed(i));
            }
        }
        Ok(Config { state: r.to, stack: Vec::new(), values })
    }

    /// The fraction demanded by the first zero test that touches an updated counter.
    fn forced_fraction(&self, c: &Config, rule: usize) -> Option<Rational> {
        let r = self.rules.get(rule)?;
        for &i in &r.zero_tests {
            let t = r.update.get(i);
            if !t.is_zero() {
                return Some(-(&c.values.0[i] / &Rational::int(t.clone())));
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TcmOp {
    Inc(usize),
    Double(usize),
    Nop,
}

impl TcmOp {
    pub fn name(&self) -> String {
        match self {
            TcmOp::Inc(i) => format!("inc{i}"),
            TcmOp::Double(i) => format!("double{i}"),
            TcmOp::Nop => "nop".into(),
        }
    }

    pub fn parse(s: &str) -> Option<TcmOp> {
        match s {
            "inc0" => Some(TcmOp::Inc(0)),
            "inc1" => Some(TcmOp::Inc(1)),
            "double0" => Some(TcmOp::Double(0)),
            "double1" => Some(TcmOp::Double(1)),
            "nop" => Some(TcmOp::Nop),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TcmRule {
    pub from: usize,
    pub to: usize,
    pub op: TcmOp,
}

/// Two-counter machine with increment, doubling and no-op.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tcm {
    pub states: Vec<String>,
    pub initial: usize,
    pub final_state: usize,
    pub rules: Vec<TcmRule>,
}

impl Machine for Tcm {
    fn dim(&self) -> usize {
        2
    }
    fn state_names(&self) -> &[String] {
        &self.states
    }
    fn rule_count(&self) -> usize {
        self.rules.len()
    }
    fn rule_source(&self, rule: usize) -> usize {
        self.rules[rule].from
    }
    fn continuous(&self) -> bool {
        false
    }
    fn step(&self, c: &Config, rule: usize, _alpha: &Rational) -> Result<Config, StepError> {
        let r = self.rules.get(rule).ok_or(StepError::UnknownRule(rule))?;
        check_source(c, r.from)?;
        if c.values.dim() != 2 {
            return Err(StepError::Dimension(2, c.values.dim()));
        }
        let mut v = c.values.clone();
        match r.op {
            TcmOp::Inc(i) => v.0[i] = &v.0[i] + &Rational::one(),
            TcmOp::Double(i) => v.0[i] = &v.0[i] * &Rational::int(2),
            TcmOp::Nop => {}
        }
        Ok(Config { state: r.to, stack: Vec::new(), values: v })
    }
}

impl Tcm {
    pub fn initial_config(&self) -> Config {
        Config::new(self.initial, RatVector::zeros(2))
    }

    pub fn is_final(&self, c: &Config) -> bool {
        c.state == self.final_state && c.values.0[0] == c.values.0[1]
    }

    /// All rule sequences of length exactly `m` from the initial configuration
    /// that end in a final configuration. Exhaustive, so only for small `m`.
    pub fn accepting_runs(&self, m: usize, limit: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.search(&self.initial_config(), m, &mut path, &mut out, limit);
        out
    }

    fn search(&self, c: &Config, left: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if left == 0 {
            if self.is_final(c) {
                out.push(path.clone());
            }
            return;
        }
        for (i, r) in self.rules.iter().enumerate() {
            if r.from != c.state {
                continue;
            }
            let next = self.step(c, i, &Rational::one()).expect("tcm step");
            path.push(i);
            self.search(&next, left - 1, path, out, limit);
            path.pop();
        }
    }
}

/// Replays `seq` from `c0`, returning the last configuration.
pub fn check_run<M: Machine + ?Sized>(m: &M, c0: &Config, seq: &[Firing]) -> Result<Config, RunError> {
    let mut c = c0.clone();
    for (index, f) in seq.iter().enumerate() {
        c = m.step(&c, f.rule, &f.fraction).map_err(|error| RunError { index, error })?;
    }
    Ok(c)
}

/// Like `check_run` but keeps every intermediate configuration.
pub fn run_trace<M: Machine + ?Sized>(m: &M, c0: &Config, seq: &[Firing]) -> Result<Vec<Config>, RunError> {
    let mut out = vec![c0.clone()];
    for (index, f) in seq.iter().enumerate() {
        let c = m.step(out.last().unwrap(), f.rule, &f.fraction).map_err(|error| RunError { index, error })?;
        out.push(c);
    }
    Ok(out)
}

/// Follows a path-shaped machine, always using the forced fraction
/// (or 1 when nothing forces one).
pub fn forced_run<M: Machine + ?Sized>(m: &M, c0: &Config, rules: &[usize]) -> Result<(Config, FiringSequence), RunError> {
    let mut c = c0.clone();
    let mut seq = Vec::with_capacity(rules.len());
    for (index, &r) in rules.iter().enumerate() {
        let alpha = m.forced_fraction(&c, r).unwrap_or_else(Rational::one);
        c = m.step(&c, r, &alpha).map_err(|error| RunError { index, error })?;
        seq.push(Firing::new(alpha, r));
    }
    Ok((c, seq))
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub max_steps: usize,
    pub samples_per_rule: usize,
    pub frontier_cap: usize,
    pub seed: u64,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { max_steps: 4, samples_per_rule: 3, frontier_cap: 256, seed: 0 }
    }
}

fn random_fraction(rng: &mut ChaCha8Rng) -> Rational {
    let den: i64 = rng.gen_range(1..=8);
    let num: i64 = rng.gen_range(1..=den);
    Rational::frac(num, den)
}

/// Sampled forward exploration. Every returned configuration comes with the
/// firing sequence that produced it, already replayed by `check_run`.
pub fn bounded_explore<M: Machine + ?Sized>(m: &M, c0: &Config, opts: &ExploreOptions) -> Vec<(Config, FiringSequence)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut seen: BTreeMap<Config, FiringSequence> = BTreeMap::new();
    seen.insert(c0.clone(), Vec::new());
    let mut frontier = vec![(c0.clone(), Vec::new())];
    for _ in 0..opts.max_steps {
        let mut next: BTreeMap<Config, FiringSequence> = BTreeMap::new();
        for (c, seq) in &frontier {
            for r in 0..m.rule_count() {
                if m.rule_source(r) != c.state {
                    continue;
                }
                let mut fracs = Vec::new();
                if m.continuous() {
                    if let Some(a) = m.forced_fraction(c, r) {
                        fracs.push(a);
                    }
                    fracs.push(Rational::one());
                    for _ in 0..opts.samples_per_rule {
                        fracs.push(random_fraction(&mut rng));
                    }
                } else {
                    fracs.push(Rational::one());
                }
                for a in fracs {
                    if let Ok(d) = m.step(c, r, &a) {
                        if seen.contains_key(&d) || next.contains_key(&d) {
                            continue;
                        }
                        let mut s = seq.clone();
                        s.push(Firing::new(a, r));
                        next.insert(d, s);
                    }
                }
            }
        }
        let mut layer: Vec<(Config, FiringSequence)> = next.into_iter().collect();
        if layer.len() > opts.frontier_cap {
            layer.shuffle(&mut rng);
            layer.truncate(opts.frontier_cap);
            layer.sort_by(|a, b| a.0.cmp(&b.0));
        }
        for (c, s) in &layer {
            seen.insert(c.clone(), s.clone());
        }
        frontier = layer;
        if frontier.is_empty() {
            break;
        }
    }
    seen.into_iter()
        .filter(|(c, s)| check_run(m, c0, s).map(|d| &d == c).unwrap_or(false))
        .collect()
}

/// Machines used in examples and tests.
pub mod examples {
    use super::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    /// Two counters, stack symbols a and b; rules 0..5.
    pub fn pvass_two_counter() -> Qpvass {
        let iv = IntVector::from_i64;
        let rule = |from, to, u: &[i64], stack| PvassRule { from, to, update: iv(u), stack };
        Qpvass {
            states: names(&["q0", "q1", "q2", "q3"]),
            stack_alphabet: names(&["a", "b"]),
            dim: 2,
            rules: vec![
                rule(0, 1, &[-1, 0], StackEffect::Push(0)),
                rule(0, 1, &[0, -1], StackEffect::Push(1)),
                rule(1, 2, &[0, 0], StackEffect::Pop(0)),
                rule(2, 1, &[0, 1], StackEffect::Push(0)),
                rule(1, 3, &[0, 0], StackEffect::Pop(1)),
                rule(3, 1, &[1, 0], StackEffect::Push(1)),
            ],
        }
    }

    /// Six-state two-counter machine: inc0, inc1, then a cycle of
    /// double0, inc0, double1, nop. Initial q0, final q2.
    pub fn tcm_doubling_cycle() -> Tcm {
        let rule = |from, to, op| TcmRule { from, to, op };
        Tcm {
            states: names(&["q0", "q1", "q2", "q3", "q4", "q5"]),
            initial: 0,
            final_state: 2,
            rules: vec![
                rule(0, 1, TcmOp::Inc(0)),
                rule(1, 2, TcmOp::Inc(1)),
                rule(2, 3, TcmOp::Double(0)),
                rule(3, 4, TcmOp::Inc(0)),
                rule(4, 5, TcmOp::Double(1)),
                rule(5, 2, TcmOp::Nop),
            ],
        }
    }

    pub fn rat(xs: &[(i64, i64)]) -> RatVector {
        RatVector(xs.iter().map(|&(p, q)| Rational::frac(p, q)).collect())
    }

    pub fn int_config(state: usize, xs: &[i64]) -> Config {
        Config::new(state, RatVector(xs.iter().map(|&x| Rational::int(BigInt::from(x))).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn figure_witness_replays() {
        let m = pvass_two_counter();
        let c0 = Config::new(0, rat(&[(11, 10), (3, 5)]));
        let seq = vec![
            Firing::new(Rational::frac(1, 10), 0),
            Firing::new(Rational::one(), 2),
            Firing::new(Rational::frac(2, 5), 3),
        ];
        let end = check_run(&m, &c0, &seq).unwrap();
        assert_eq!(end, Config::with_stack(1, vec![0], rat(&[(1, 1), (1, 1)])));
    }

    #[test]
    fn step_errors() {
        let m = pvass_two_counter();
        let c0 = Config::new(0, rat(&[(0, 1), (1, 1)]));
        assert_eq!(m.step(&c0, 0, &Rational::frac(1, 2)), Err(StepError::NegativeCounter(0)));
        assert_eq!(m.step(&c0, 2, &Rational::one()), Err(StepError::WrongState { expected: 1, actual: 0 }));
        assert!(matches!(m.step(&c0, 1, &Rational::zero()), Err(StepError::FractionOutOfRange(_))));
        assert!(matches!(m.step(&c0, 1, &Rational::frac(3, 2)), Err(StepError::FractionOutOfRange(_))));
        let c1 = Config::with_stack(1, vec![1], rat(&[(1, 1), (1, 1)]));
        assert_eq!(m.step(&c1, 2, &Rational::one()), Err(StepError::StackMismatch(0)));
        let err = check_run(&m, &c0, &[Firing::new(Rational::one(), 1), Firing::new(Rational::one(), 2)]).unwrap_err();
        assert_eq!(err.index, 1);
    }

    #[test]
    fn tcm_steps() {
        let t = tcm_doubling_cycle();
        let c = int_config(2, &[5, 7]);
        let d = t.step(&c, 2, &Rational::one()).unwrap();
        assert_eq!(d, int_config(3, &[10, 7]));
    }

    #[test]
    fn tcm_accepts_only_at_two() {
        let t = tcm_doubling_cycle();
        for m in 0..=12 {
            let runs = t.accepting_runs(m, 10);
            assert_eq!(!runs.is_empty(), m == 2, "m = {m}");
        }
    }

    #[test]
    fn ivass_zero_test() {
        let m = IvassRl {
            states: vec!["p".into(), "q".into()],
            dim: 2,
            rules: vec![IvassRule { from: 0, to: 1, update: IntVector::from_i64(&[-1, 1]), zero_tests: vec![0] }],
        };
        let c = Config::new(0, rat(&[(1, 4), (0, 1)]));
        assert_eq!(m.forced_fraction(&c, 0), Some(Rational::frac(1, 4)));
        assert!(m.step(&c, 0, &Rational::frac(1, 4)).is_ok());
        assert_eq!(m.step(&c, 0, &Rational::frac(1, 8)), Err(StepError::ZeroTestFailed(0)));
        let c = Config::new(0, rat(&[(1, 1), (1, 2)]));
        assert_eq!(m.step(&c, 0, &Rational::one()), Err(StepError::OutOfUnitInterval(1)));
    }

    #[test]
    fn explore_tcm_is_a_single_path() {
        let t = tcm_doubling_cycle();
        let opts = ExploreOptions { max_steps: 10, ..Default::default() };
        let got = bounded_explore(&t, &t.initial_config(), &opts);
        assert_eq!(got.len(), 11);
        assert!(got.iter().any(|(c, _)| *c == int_config(2, &[1, 1])));
    }

    #[test]
    fn explore_is_deterministic() {
        let m = pvass_two_counter();
        let c0 = Config::new(0, rat(&[(1, 1), (1, 1)]));
        let opts = ExploreOptions { max_steps: 3, seed: 7, ..Default::default() };
        let a = bounded_explore(&m, &c0, &opts);
        let b = bounded_explore(&m, &c0, &opts);
        assert_eq!(a, b);
        assert!(a.len() > 1);
    }
}
