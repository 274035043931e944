//! Decision procedures for reachability, coverability and state
//! reachability, by enumerating pump-free derivation trees of the run
//! grammar and deciding one linear formula per tree.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use num_traits::Zero;
use thiserror::Error;

use crate::creach::const_exprs;
use crate::grammar::{pvass_to_grammar, GrammarError, Sym, TargetStack, VectorGrammar};
use crate::lra::{eq, ge, gt, is_sat_with, le, Formula, LinExpr, Limits, Model, SatResult, Var};
use crate::machines::{apply_stack, check_run, Config, Firing, FiringSequence, Machine, Qpvass, Qvass};
use crate::numerics::{vec_affine, IntVector, Rational};
use crate::pumps::PumpRelation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("configuration has dimension {0}, machine {1}")]
    Dimension(usize, usize),
    #[error("unknown state {0}")]
    UnknownState(usize),
    #[error("negative counter value in a configuration")]
    NegativeValue,
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("witness failed to replay: {0}")]
    Replay(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Reach,
    Cover,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Reachable,
    Unreachable,
    Coverable,
    NotCoverable,
    StateReachable,
    StateUnreachable,
    Timeout,
}

impl Outcome {
    pub fn is_positive(self) -> bool {
        matches!(self, Outcome::Reachable | Outcome::Coverable | Outcome::StateReachable)
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Outcome::Unreachable | Outcome::NotCoverable | Outcome::StateUnreachable)
    }

    fn of(mode: Option<Mode>, yes: bool) -> Self {
        match (mode, yes) {
            (Some(Mode::Reach), true) => Outcome::Reachable,
            (Some(Mode::Reach), false) => Outcome::Unreachable,
            (Some(Mode::Cover), true) => Outcome::Coverable,
            (Some(Mode::Cover), false) => Outcome::NotCoverable,
            (None, true) => Outcome::StateReachable,
            (None, false) => Outcome::StateUnreachable,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Outcome::Reachable => "REACHABLE",
            Outcome::Unreachable => "UNREACHABLE",
            Outcome::Coverable => "COVERABLE",
            Outcome::NotCoverable => "NOTCOVERABLE",
            Outcome::StateReachable => "STATE_REACHABLE",
            Outcome::StateUnreachable => "STATE_UNREACHABLE",
            Outcome::Timeout => "TIMEOUT",
        };
        f.write_str(s)
    }
}

/// The satisfying tree and model behind a positive answer.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub tree: String,
    pub model: Model,
    pub active_pumps: usize,
    pub formula: Formula,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tree:")?;
        write!(f, "{}", self.tree)?;
        writeln!(f, "active pumps: {}", self.active_pumps)?;
        writeln!(f, "model:")?;
        for (v, x) in &self.model.0 {
            writeln!(f, "  {v} = {x}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<FiringSequence>,
    pub certificate: Option<Certificate>,
    pub trees_checked: usize,
}

impl Verdict {
    fn negative(mode: Option<Mode>, trees: usize) -> Self {
        Verdict { outcome: Outcome::of(mode, false), witness: None, certificate: None, trees_checked: trees }
    }

    fn timeout(trees: usize) -> Self {
        Verdict { outcome: Outcome::Timeout, witness: None, certificate: None, trees_checked: trees }
    }

    fn positive(mode: Option<Mode>, witness: Option<FiringSequence>, certificate: Option<Certificate>, trees: usize) -> Self {
        Verdict { outcome: Outcome::of(mode, true), witness, certificate, trees_checked: trees }
    }

    pub fn is_positive(&self) -> bool {
        self.outcome.is_positive()
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub max_trees: Option<usize>,
    pub timeout: Option<Duration>,
    pub signature_cap: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_trees: None, timeout: None, signature_cap: 200_000 }
    }
}

#[derive(Clone, Debug)]
pub enum NodeKind {
    Leaf(usize),
    Branch(usize, usize),
    Epsilon,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub nonterminal: usize,
    pub kind: NodeKind,
    pub pump: bool,
}

/// Derivation tree without a repeated nonterminal on any root-leaf path.
/// `pump` marks nodes whose nonterminal can derive itself; a pump may be
/// inserted there.
#[derive(Clone, Debug)]
pub struct PumpfreeTree {
    pub nodes: Vec<TreeNode>,
    pub root: usize,
}

enum Item {
    Letter(usize),
    Open(usize),
    Close(usize),
}

impl PumpfreeTree {
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk(self.root, &mut |it| {
            if let Item::Letter(t) = it {
                out.push(t)
            }
        }, false);
        out
    }

    pub fn pump_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].pump).collect()
    }

    fn walk(&self, n: usize, f: &mut dyn FnMut(Item), pumps: bool) {
        let node = &self.nodes[n];
        if pumps && node.pump {
            f(Item::Open(n));
        }
        match node.kind {
            NodeKind::Leaf(t) => f(Item::Letter(t)),
            NodeKind::Branch(l, r) => {
                self.walk(l, f, pumps);
                self.walk(r, f, pumps);
            }
            NodeKind::Epsilon => {}
        }
        if pumps && node.pump {
            f(Item::Close(n));
        }
    }

    pub fn dump(&self, g: &VectorGrammar) -> String {
        let mut s = String::new();
        self.dump_node(g, self.root, 0, &mut s);
        s
    }

    fn dump_node(&self, g: &VectorGrammar, n: usize, depth: usize, s: &mut String) {
        let node = &self.nodes[n];
        let mark = if node.pump { " *" } else { "" };
        s.push_str(&format!("{}n{} {}{}", "  ".repeat(depth), n, g.nonterminals[node.nonterminal], mark));
        match node.kind {
            NodeKind::Leaf(t) => s.push_str(&format!(" -> {}\n", g.alphabet[t])),
            NodeKind::Epsilon => s.push_str(" -> ε\n"),
            NodeKind::Branch(l, r) => {
                s.push('\n');
                self.dump_node(g, l, depth + 1, s);
                self.dump_node(g, r, depth + 1, s);
            }
        }
    }
}

/// Calls `f` on every pump-free tree of a CNF grammar, in a fixed order,
/// until it breaks.
pub fn for_each_pumpfree_tree(g: &VectorGrammar, f: &mut dyn FnMut(&PumpfreeTree) -> ControlFlow<()>) -> ControlFlow<()> {
    let selfr = g.self_reachable();
    let mut by_lhs: Vec<Vec<usize>> = vec![Vec::new(); g.nonterminals.len()];
    for (i, p) in g.productions.iter().enumerate() {
        by_lhs[p.lhs].push(i);
    }
    let ctx = Ctx { g, by_lhs: &by_lhs, selfr: &selfr };
    let mut nodes = Vec::new();
    let forbidden = vec![false; g.nonterminals.len()];
    ctx.gen(g.start, &forbidden, &mut nodes, &mut |root, nodes| f(&PumpfreeTree { nodes: nodes.clone(), root }))
}

pub fn enumerate_pumpfree_trees(g: &VectorGrammar, limit: usize) -> Vec<PumpfreeTree> {
    let mut out = Vec::new();
    let _ = for_each_pumpfree_tree(g, &mut |t| {
        out.push(t.clone());
        if out.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

struct Ctx<'a> {
    g: &'a VectorGrammar,
    by_lhs: &'a [Vec<usize>],
    selfr: &'a [bool],
}

type Cont<'b> = dyn FnMut(usize, &mut Vec<TreeNode>) -> ControlFlow<()> + 'b;

impl<'a> Ctx<'a> {
    fn gen(&self, a: usize, forbidden: &[bool], nodes: &mut Vec<TreeNode>, k: &mut Cont<'_>) -> ControlFlow<()> {
        let pump = self.selfr[a];
        for &pi in &self.by_lhs[a] {
            let p = &self.g.productions[pi];
            match p.rhs.as_slice() {
                [] => {
                    nodes.push(TreeNode { nonterminal: a, kind: NodeKind::Epsilon, pump: false });
                    let r = k(nodes.len() - 1, nodes);
                    nodes.pop();
                    r?;
                }
                [Sym::T(t)] => {
                    nodes.push(TreeNode { nonterminal: a, kind: NodeKind::Leaf(*t), pump });
                    let r = k(nodes.len() - 1, nodes);
                    nodes.pop();
                    r?;
                }
                [Sym::N(b), Sym::N(c)] => {
                    let (b, c) = (*b, *c);
                    let mut fb = forbidden.to_vec();
                    fb[a] = true;
                    if fb[b] || fb[c] {
                        continue;
                    }
                    let fb = &fb;
                    self.gen(b, fb, nodes, &mut |bid, nodes| {
                        self.gen(c, fb, nodes, &mut |cid, nodes| {
                            nodes.push(TreeNode { nonterminal: a, kind: NodeKind::Branch(bid, cid), pump });
                            let r = k(nodes.len() - 1, nodes);
                            nodes.pop();
                            r
                        })
                    })?;
                }
                _ => {}
            }
        }
        ControlFlow::Continue(())
    }
}

/// Pump relations, built on first use.
pub struct PumpCache<'a> {
    g: &'a VectorGrammar,
    cap: usize,
    rels: BTreeMap<usize, PumpRelation>,
}

impl<'a> PumpCache<'a> {
    pub fn new(g: &'a VectorGrammar, cap: usize) -> Self {
        PumpCache { g, cap, rels: BTreeMap::new() }
    }

    pub fn get(&mut self, a: usize) -> Result<&PumpRelation, GrammarError> {
        if !self.rels.contains_key(&a) {
            let r = PumpRelation::new(self.g, a, self.cap)?;
            self.rels.insert(a, r);
        }
        Ok(&self.rels[&a])
    }
}

fn frac_var(i: usize) -> Var {
    Var::new(format!("a{i}"))
}

/// The formula of one tree: a chain of configurations along its leaves,
/// a fraction in (0,1] per leaf, and the pump relation around each pump
/// node. With `pumps` false every pump is the identity.
pub fn tree_formula(
    tree: &PumpfreeTree,
    g: &VectorGrammar,
    cache: Option<&mut PumpCache<'_>>,
    u: &[LinExpr],
    v: &[LinExpr],
    mode: Mode,
) -> Result<Formula, GrammarError> {
    let d = u.len();
    let pumps = cache.is_some();
    let mut items = Vec::new();
    tree.walk(tree.root, &mut |it| items.push(it), pumps);
    let mut parts = Vec::new();
    let mut cur: Vec<LinExpr> = u.to_vec();
    let mut open: BTreeMap<usize, (Vec<LinExpr>, Vec<LinExpr>)> = BTreeMap::new();
    let mut pump_pairs = Vec::new();
    let mut leaf = 0;
    let mut fresh = 0;
    let mut new_point = |parts: &mut Vec<Formula>| {
        fresh += 1;
        let xs: Vec<LinExpr> = (0..d).map(|c| LinExpr::var(&Var::new(format!("x{fresh}.{c}")))).collect();
        for x in &xs {
            parts.push(ge(x, &LinExpr::zero()));
        }
        xs
    };
    for it in &items {
        match it {
            Item::Letter(t) => {
                let a = frac_var(leaf);
                leaf += 1;
                parts.push(gt(&LinExpr::var(&a), &LinExpr::zero()));
                parts.push(le(&LinExpr::var(&a), &LinExpr::constant(Rational::one())));
                let letter = &g.alphabet[*t];
                let mut next = Vec::with_capacity(d);
                for c in 0..d {
                    let mut e = cur[c].clone();
                    e.add_term(&a, &Rational::int(letter.get(c).clone()));
                    if !letter.get(c).is_zero() {
                        parts.push(ge(&e, &LinExpr::zero()));
                    }
                    next.push(e);
                }
                cur = next;
            }
            Item::Open(n) => {
                let after = new_point(&mut parts);
                open.insert(*n, (cur.clone(), after.clone()));
                cur = after;
            }
            Item::Close(n) => {
                let after = new_point(&mut parts);
                let (x0, x1) = open.remove(n).unwrap();
                pump_pairs.push((*n, x0, x1, cur.clone(), after.clone()));
                cur = after;
            }
        }
    }
    if let Some(cache) = cache {
        for (n, x0, x1, y0, y1) in pump_pairs {
            let rel = cache.get(tree.nodes[n].nonterminal)?;
            parts.push(rel.formula(&x0, &x1, &y0, &y1, &format!("p{n}")));
        }
    }
    for c in 0..d {
        parts.push(match mode {
            Mode::Reach => eq(&cur[c], &v[c]),
            Mode::Cover => ge(&cur[c], &v[c]),
        });
    }
    Ok(Formula::and(parts))
}

fn check_config(m: &Qpvass, c: &Config) -> Result<(), SolverError> {
    if c.values.dim() != m.dim {
        return Err(SolverError::Dimension(c.values.dim(), m.dim));
    }
    if c.state >= m.states.len() {
        return Err(SolverError::UnknownState(c.state));
    }
    if !c.values.is_nonneg() {
        return Err(SolverError::NegativeValue);
    }
    Ok(())
}

/// Rule sequence of `m` reading exactly the update word `word`.
pub fn rules_for_word(m: &Qpvass, from: &Config, word: &[IntVector], to_state: usize, to_stack: &TargetStack) -> Option<Vec<usize>> {
    let mut dead: HashSet<(usize, usize, Vec<usize>)> = HashSet::new();
    let mut path = Vec::new();
    fn go(
        m: &Qpvass,
        pos: usize,
        state: usize,
        stack: Vec<usize>,
        word: &[IntVector],
        to_state: usize,
        to_stack: &TargetStack,
        dead: &mut HashSet<(usize, usize, Vec<usize>)>,
        path: &mut Vec<usize>,
    ) -> bool {
        if pos == word.len() {
            return state == to_state
                && match to_stack {
                    TargetStack::Any => true,
                    TargetStack::Exactly(w) => *w == stack,
                };
        }
        let key = (pos, state, stack);
        if dead.contains(&key) {
            return false;
        }
        for (i, r) in m.rules.iter().enumerate() {
            if r.from != key.1 || r.update != word[pos] {
                continue;
            }
            if let Ok(st) = apply_stack(&key.2, r.stack) {
                path.push(i);
                if go(m, pos + 1, r.to, st, word, to_state, to_stack, dead, path) {
                    return true;
                }
                path.pop();
            }
        }
        dead.insert(key);
        false
    }
    if go(m, 0, from.state, from.stack.clone(), word, to_state, to_stack, &mut dead, &mut path) {
        Some(path)
    } else {
        None
    }
}

fn finish_witness(
    m: &Qpvass,
    c0: &Config,
    c1: &Config,
    mode: Mode,
    word: &[IntVector],
    fractions: Vec<Rational>,
) -> Result<FiringSequence, SolverError> {
    let rules = rules_for_word(m, c0, word, c1.state, &TargetStack::Exactly(c1.stack.clone()))
        .ok_or_else(|| SolverError::Replay("no rule sequence reads the tree's word".into()))?;
    let seq: FiringSequence = rules.into_iter().zip(fractions).map(|(r, a)| Firing::new(a, r)).collect();
    let end = check_run(m, c0, &seq).map_err(|e| SolverError::Replay(e.to_string()))?;
    let ok = match mode {
        Mode::Reach => end == *c1,
        Mode::Cover => end.covers(c1),
    };
    if !ok {
        return Err(SolverError::Replay(format!("run ends at {end:?}")));
    }
    Ok(seq)
}

/// Reachability (`Mode::Reach`) or coverability (`Mode::Cover`) from `c0`
/// to `c1`.
pub fn decide(m: &Qpvass, c0: &Config, c1: &Config, mode: Mode, opts: &SolverOptions) -> Result<Verdict, SolverError> {
    check_config(m, c0)?;
    check_config(m, c1)?;
    let start = Instant::now();
    let deadline = opts.timeout.map(|t| start + t);
    let trivially = c0.state == c1.state
        && c0.stack == c1.stack
        && match mode {
            Mode::Reach => c0.values == c1.values,
            Mode::Cover => c0.values.covers(&c1.values),
        };
    if trivially {
        return Ok(Verdict::positive(Some(mode), Some(Vec::new()), None, 0));
    }
    let g = pvass_to_grammar(m, c0, c1.state, &TargetStack::Exactly(c1.stack.clone())).to_cnf();
    if g.is_empty() {
        return Ok(Verdict::negative(Some(mode), 0));
    }
    let u = const_exprs(&c0.values);
    let v = const_exprs(&c1.values);
    let limits = Limits { max_nodes: None, deadline };
    let mut trees = 0usize;
    let mut timed_out = false;
    let over = |trees: usize| opts.max_trees.is_some_and(|k| trees > k) || deadline.is_some_and(|d| Instant::now() > d);

    // pumps as identities first: any hit yields a concrete run
    let mut found: Option<Result<Verdict, SolverError>> = None;
    let _ = for_each_pumpfree_tree(&g, &mut |tree| {
        if matches!(tree.nodes[tree.root].kind, NodeKind::Epsilon) {
            return ControlFlow::Continue(());
        }
        trees += 1;
        if over(trees) {
            timed_out = true;
            return ControlFlow::Break(());
        }
        let f = match tree_formula(tree, &g, None, &u, &v, mode) {
            Ok(f) => f,
            Err(e) => {
                found = Some(Err(e.into()));
                return ControlFlow::Break(());
            }
        };
        match is_sat_with(&f, &limits) {
            SatResult::Sat(model) => {
                let word: Vec<IntVector> = tree.leaves().iter().map(|t| g.alphabet[*t].clone()).collect();
                let fr: Vec<Rational> = (0..word.len()).map(|i| model.get(&frac_var(i))).collect();
                let cert = Certificate { tree: tree.dump(&g), model, active_pumps: 0, formula: f };
                found = Some(finish_witness(m, c0, c1, mode, &word, fr).map(|w| Verdict::positive(Some(mode), Some(w), Some(cert), trees)));
                ControlFlow::Break(())
            }
            SatResult::Unsat => ControlFlow::Continue(()),
            SatResult::Timeout => {
                timed_out = true;
                ControlFlow::Break(())
            }
        }
    });
    if let Some(r) = found {
        return r;
    }
    if timed_out {
        return Ok(Verdict::timeout(trees));
    }

    let mut cache = PumpCache::new(&g, opts.signature_cap);
    let _ = for_each_pumpfree_tree(&g, &mut |tree| {
        if tree.pump_nodes().is_empty() {
            return ControlFlow::Continue(());
        }
        trees += 1;
        if over(trees) {
            timed_out = true;
            return ControlFlow::Break(());
        }
        let f = match tree_formula(tree, &g, Some(&mut cache), &u, &v, mode) {
            Ok(f) => f,
            Err(GrammarError::Capped(_)) => {
                timed_out = true;
                return ControlFlow::Break(());
            }
            Err(e) => {
                found = Some(Err(e.into()));
                return ControlFlow::Break(());
            }
        };
        match is_sat_with(&f, &limits) {
            SatResult::Sat(model) => {
                let active = count_active(tree, &model, m.dim);
                let cert = Certificate { tree: tree.dump(&g), model, active_pumps: active, formula: f };
                found = Some(Ok(Verdict::positive(Some(mode), None, Some(cert), trees)));
                ControlFlow::Break(())
            }
            SatResult::Unsat => ControlFlow::Continue(()),
            SatResult::Timeout => {
                timed_out = true;
                ControlFlow::Break(())
            }
        }
    });
    if let Some(r) = found {
        return r;
    }
    if timed_out {
        return Ok(Verdict::timeout(trees));
    }
    Ok(Verdict::negative(Some(mode), trees))
}

// pumps whose scoped variables got used; the identity disjunct has none
fn count_active(tree: &PumpfreeTree, model: &Model, _d: usize) -> usize {
    tree.pump_nodes()
        .iter()
        .filter(|n| {
            let p = format!("p{n}.");
            model.0.keys().any(|v| v.0.starts_with(&p))
        })
        .count()
}

pub fn decide_reach(m: &Qpvass, c0: &Config, c1: &Config, opts: &SolverOptions) -> Result<Verdict, SolverError> {
    decide(m, c0, c1, Mode::Reach, opts)
}

pub fn decide_cover(m: &Qpvass, c0: &Config, c1: &Config, opts: &SolverOptions) -> Result<Verdict, SolverError> {
    decide(m, c0, c1, Mode::Cover, opts)
}

/// Whether some configuration with control state `q` is reachable.
pub fn decide_state_reach(m: &Qpvass, c0: &Config, q: usize, opts: &SolverOptions) -> Result<Verdict, SolverError> {
    check_config(m, c0)?;
    if q >= m.states.len() {
        return Err(SolverError::UnknownState(q));
    }
    if c0.state == q {
        return Ok(Verdict::positive(None, Some(Vec::new()), None, 0));
    }
    let g = pvass_to_grammar(m, c0, q, &TargetStack::Any).to_cnf();
    if g.is_empty() {
        return Ok(Verdict::negative(None, 0));
    }
    let sigs = match g.realizable_summaries(opts.signature_cap) {
        Ok(s) => s,
        Err(GrammarError::Capped(_)) => return Ok(Verdict::timeout(0)),
        Err(e) => return Err(e.into()),
    };
    let n = sigs.len();
    for (sig, word) in sigs {
        if !sig.needs_start.iter().all(|&i| c0.values.0[i].is_positive()) {
            continue;
        }
        let word: Vec<IntVector> = word.iter().map(|t| g.alphabet[*t].clone()).collect();
        let rules = rules_for_word(m, c0, &word, q, &TargetStack::Any)
            .ok_or_else(|| SolverError::Replay("no rule sequence reads the signature witness".into()))?;
        let mut cur = c0.values.clone();
        let mut seq = Vec::new();
        for (a, r) in word.iter().zip(rules) {
            let mut alpha = Rational::one();
            for j in a.neg_support() {
                alpha = alpha.min(&cur.0[j] / &Rational::int(a.get(j).clone() * -2));
            }
            cur = vec_affine(&cur, &alpha, a).expect("dimension");
            seq.push(Firing::new(alpha, r));
        }
        let end = check_run(m, c0, &seq).map_err(|e| SolverError::Replay(e.to_string()))?;
        if end.state != q {
            return Err(SolverError::Replay("run ends in the wrong state".into()));
        }
        return Ok(Verdict::positive(None, Some(seq), None, n));
    }
    Ok(Verdict::negative(None, n))
}

pub fn decide_reach_vass(m: &Qvass, c0: &Config, c1: &Config, mode: Mode, opts: &SolverOptions) -> Result<Verdict, SolverError> {
    decide(&m.to_qpvass(), c0, c1, mode, opts)
}

/// Replays a witness and reports whether it ends where it should.
pub fn witness_ok<M: Machine + ?Sized>(m: &M, c0: &Config, c1: &Config, mode: Mode, w: &[Firing]) -> bool {
    match check_run(m, c0, w) {
        Ok(end) => match mode {
            Mode::Reach => end == *c1,
            Mode::Cover => end.covers(c1),
        },
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::examples::*;
    use crate::numerics::RatVector;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn figure_reach_with_witness() {
        let m = pvass_two_counter();
        let c0 = Config::new(0, rat(&[(11, 10), (3, 5)]));
        let c1 = Config::with_stack(1, vec![0], rat(&[(1, 1), (1, 1)]));
        let v = decide_reach(&m, &c0, &c1, &opts()).unwrap();
        assert!(v.is_positive());
        let w = v.witness.expect("witness");
        assert!(witness_ok(&m, &c0, &c1, Mode::Reach, &w));
    }

    #[test]
    fn figure_cover() {
        let m = pvass_two_counter();
        let c0 = Config::new(0, rat(&[(1, 1), (1, 1)]));
        let half = Config::with_stack(1, vec![0], rat(&[(1, 2), (1, 2)]));
        let one = Config::with_stack(1, vec![0], rat(&[(1, 1), (1, 1)]));
        assert!(decide_cover(&m, &c0, &half, &opts()).unwrap().is_positive());
        assert_eq!(decide_cover(&m, &c0, &one, &opts()).unwrap().outcome, Outcome::NotCoverable);
    }

    #[test]
    fn figure_state_reach() {
        let m = pvass_two_counter();
        let zero = Config::new(0, RatVector::zeros(2));
        assert_eq!(decide_state_reach(&m, &zero, 1, &opts()).unwrap().outcome, Outcome::StateUnreachable);
        let one = Config::new(0, rat(&[(1, 1), (1, 1)]));
        let v = decide_state_reach(&m, &one, 1, &opts()).unwrap();
        assert!(v.is_positive());
        let end = check_run(&m, &one, &v.witness.unwrap()).unwrap();
        assert_eq!(end.state, 1);
    }

    #[test]
    fn single_letter_tree() {
        use crate::grammar::RawSym;
        use crate::lra::is_sat;
        let g = VectorGrammar::new(2, vec!["S".into()], 0, vec![(0, vec![RawSym::T(IntVector::from_i64(&[1, -1]))])]);
        let trees = enumerate_pumpfree_trees(&g, 10);
        assert_eq!(trees.len(), 1);
        let u = const_exprs(&rat(&[(0, 1), (1, 1)]));
        let f = tree_formula(&trees[0], &g, None, &u, &const_exprs(&rat(&[(1, 1), (0, 1)])), Mode::Reach).unwrap();
        match is_sat(&f) {
            SatResult::Sat(m) => assert_eq!(m.get(&frac_var(0)), Rational::one()),
            r => panic!("{r:?}"),
        }
        let f = tree_formula(&trees[0], &g, None, &u, &const_exprs(&rat(&[(2, 1), (-1, 1)])), Mode::Reach).unwrap();
        assert!(!is_sat(&f).is_sat());
    }

    #[test]
    fn identical_configs() {
        let m = pvass_two_counter();
        let c = Config::new(2, rat(&[(1, 3), (0, 1)]));
        let v = decide_reach(&m, &c, &c, &opts()).unwrap();
        assert!(v.is_positive());
        assert_eq!(v.witness, Some(vec![]));
    }
}
