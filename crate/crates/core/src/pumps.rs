//! Pump relations: A =>* w A w', with w fired forwards and w' fired
//! independently, encoded as one semigroup language over doubled vectors.

use std::collections::{BTreeMap, BTreeSet};

use crate::creach::{semigroup_reach_formula, synthesize_run, SemigroupSpec, SupportSequence};
use crate::grammar::{GrammarError, RawSym, Sym, VectorGrammar};
use crate::lra::{eq, Formula, LinExpr};
use crate::numerics::{vec_affine, IntVector, RatVector, Rational};

/// Grammar over Z^{2d} whose words interleave a pump's left part (first d
/// coordinates) with its right part reversed and negated (last d). Firing
/// such a word from (u, v') to (v, u') is the same as firing w from u to v
/// and w' from u' to v'. Input must be in CNF.
pub fn semigroup_of_pumps(g: &VectorGrammar, a: usize) -> VectorGrammar {
    let d = g.dim;
    let zero = IntVector::zeros(d);
    let n = g.nonterminals.len();
    let fwd = |b: usize| 3 * b;
    let bwd = |b: usize| 3 * b + 1;
    let hat = |b: usize| 3 * b + 2;
    let mut names = Vec::with_capacity(3 * n);
    for b in &g.nonterminals {
        names.push(format!("{b}>"));
        names.push(format!("{b}<"));
        names.push(format!("{b}^"));
    }
    let mut raw: Vec<(usize, Vec<RawSym>)> = vec![(hat(a), vec![])];
    for p in &g.productions {
        let b = p.lhs;
        match p.rhs.as_slice() {
            [Sym::N(c), Sym::N(e)] => {
                let (c, e) = (*c, *e);
                raw.push((fwd(b), vec![RawSym::N(fwd(c)), RawSym::N(fwd(e))]));
                raw.push((hat(b), vec![RawSym::N(fwd(c)), RawSym::N(hat(e))]));
                raw.push((hat(b), vec![RawSym::N(bwd(e)), RawSym::N(hat(c))]));
                raw.push((bwd(b), vec![RawSym::N(bwd(e)), RawSym::N(bwd(c))]));
            }
            [Sym::T(t)] => {
                let v = &g.alphabet[*t];
                raw.push((fwd(b), vec![RawSym::T(v.concat(&zero))]));
                raw.push((bwd(b), vec![RawSym::T(zero.concat(&v.neg()))]));
            }
            _ => {}
        }
    }
    VectorGrammar::new(2 * d, names, hat(a), raw).to_cnf()
}

/// The pump relation of one nonterminal, with its realizable supports.
#[derive(Clone, Debug)]
pub struct PumpRelation {
    pub nonterminal: usize,
    pub doubled: VectorGrammar,
    pub supports: Vec<SupportSequence>,
    /// A word of the doubled language per support.
    pub witnesses: Vec<Vec<IntVector>>,
}

/// Explicit pump run: w fired from u to v, and w' from u2 to v2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpRun {
    pub left: Vec<(Rational, IntVector)>,
    pub right: Vec<(Rational, IntVector)>,
}

impl PumpRelation {
    pub fn new(g: &VectorGrammar, a: usize, cap: usize) -> Result<Self, GrammarError> {
        let doubled = semigroup_of_pumps(g, a);
        // one support per summary: the formula sees nothing finer
        let sums = doubled.realizable_summaries(cap)?;
        let mut seen = BTreeMap::new();
        for w in sums.iter().filter(|(s, _)| !s.letters.is_empty()).map(|(_, w)| w) {
            let letters: Vec<IntVector> = w.iter().map(|t| doubled.alphabet[*t].clone()).collect();
            seen.entry(SupportSequence::of_word(&letters)).or_insert(letters);
        }
        let (supports, witnesses) = seen.into_iter().unzip();
        Ok(PumpRelation { nonterminal: a, doubled, supports, witnesses })
    }

    /// P_A(u, v, u2, v2). The identity disjunct comes first.
    pub fn formula(&self, u: &[LinExpr], v: &[LinExpr], u2: &[LinExpr], v2: &[LinExpr], scope: &str) -> Formula {
        let mut ident: Vec<Formula> = Vec::new();
        for i in 0..u.len() {
            ident.push(eq(&u[i], &v[i]));
            ident.push(eq(&u2[i], &v2[i]));
        }
        let from: Vec<LinExpr> = u.iter().chain(v2.iter()).cloned().collect();
        let to: Vec<LinExpr> = v.iter().chain(u2.iter()).cloned().collect();
        let mut alts = vec![Formula::and(ident)];
        for (k, s) in self.supports.iter().enumerate() {
            alts.push(semigroup_reach_formula(s, &from, &to, &format!("{scope}.s{k}")));
        }
        Formula::Or(alts)
    }

    /// A concrete pump run between the given points, if the relation
    /// holds. Repeats a witness word of one satisfiable support.
    pub fn realize(&self, u: &RatVector, v: &RatVector, u2: &RatVector, v2: &RatVector) -> Option<PumpRun> {
        if u == v && u2 == v2 {
            return Some(PumpRun { left: vec![], right: vec![] });
        }
        let d = u.dim();
        let from = u.concat(v2);
        let to = v.concat(u2);
        for (s, w) in self.supports.iter().zip(&self.witnesses) {
            let spec = SemigroupSpec { grammar: self.doubled.clone(), support: s.clone(), witness: w.clone() };
            let Ok(run) = synthesize_run(&spec, &from, &to) else { continue };
            let mut left = Vec::new();
            let mut right = Vec::new();
            for f in &run.steps {
                let a = &run.letters[f.rule];
                let (l, r) = (IntVector(a.0[..d].to_vec()), IntVector(a.0[d..].to_vec()));
                if !l.is_zero() || r.is_zero() {
                    left.push((f.fraction.clone(), l));
                } else {
                    right.push((f.fraction.clone(), r.neg()));
                }
            }
            right.reverse();
            return Some(PumpRun { left, right });
        }
        None
    }
}

/// Fires weighted letters from u; None if a value goes negative.
pub fn replay_weighted(steps: &[(Rational, IntVector)], u: &RatVector) -> Option<RatVector> {
    let mut cur = u.clone();
    for (a, x) in steps {
        if !a.is_fraction() {
            return None;
        }
        cur = vec_affine(&cur, a, x).ok()?;
        if !cur.is_nonneg() {
            return None;
        }
    }
    Some(cur)
}

pub fn pump_formula(
    g: &VectorGrammar,
    a: usize,
    u: &[LinExpr],
    v: &[LinExpr],
    u2: &[LinExpr],
    v2: &[LinExpr],
    scope: &str,
) -> Result<Formula, GrammarError> {
    Ok(PumpRelation::new(g, a, 100_000)?.formula(u, v, u2, v2, scope))
}

/// Every pump (w, w') of `a` with |w| + |w'| <= max_len, as letter indices
/// of `g`; includes the trivial pump. Direct derivation search, used to
/// check the formulas.
pub fn enumerate_pumps(g: &VectorGrammar, a: usize, max_len: usize) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    let n = g.nonterminals.len();
    let words = terminal_words(g, max_len);
    // productions B -> C E indexed by the child that holds the hole
    let mut as_left: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut as_right: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for p in &g.productions {
        if let [Sym::N(c), Sym::N(e)] = p.rhs.as_slice() {
            as_left[*c].push((p.lhs, *e));
            as_right[*e].push((p.lhs, *c));
        }
    }
    let mut ctx: Vec<BTreeSet<(Vec<usize>, Vec<usize>)>> = vec![BTreeSet::new(); n];
    let mut work = vec![(a, (vec![], vec![]))];
    ctx[a].insert((vec![], vec![]));
    while let Some((c, (w, w2))) = work.pop() {
        let room = max_len - w.len() - w2.len();
        for &(b, e) in &as_left[c] {
            for x in words[e].iter().filter(|x| x.len() <= room) {
                let mut r = w2.clone();
                r.extend_from_slice(x);
                let z = (w.clone(), r);
                if ctx[b].insert(z.clone()) {
                    work.push((b, z));
                }
            }
        }
        for &(b, e) in &as_right[c] {
            for x in words[e].iter().filter(|x| x.len() <= room) {
                let mut l = x.clone();
                l.extend_from_slice(&w);
                let z = (l, w2.clone());
                if ctx[b].insert(z.clone()) {
                    work.push((b, z));
                }
            }
        }
    }
    ctx[a].clone()
}

// nonempty terminal words per nonterminal up to a length (CNF input)
fn terminal_words(g: &VectorGrammar, max_len: usize) -> Vec<BTreeSet<Vec<usize>>> {
    let n = g.nonterminals.len();
    let mut w: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); n];
    loop {
        let mut changed = false;
        for p in &g.productions {
            let add: Vec<Vec<usize>> = match p.rhs.as_slice() {
                [Sym::T(t)] => vec![vec![*t]],
                [Sym::N(b), Sym::N(c)] => {
                    let mut out = Vec::new();
                    for x in &w[*b] {
                        for y in &w[*c] {
                            if x.len() + y.len() <= max_len {
                                let mut z = x.clone();
                                z.extend_from_slice(y);
                                out.push(z);
                            }
                        }
                    }
                    out
                }
                _ => vec![],
            };
            for z in add {
                if w[p.lhs].insert(z) {
                    changed = true;
                }
            }
        }
        if !changed {
            return w;
        }
    }
}
