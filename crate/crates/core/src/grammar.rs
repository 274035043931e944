//! Context-free grammars over vector letters.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::Signed;
use thiserror::Error;

use crate::machines::{Config, Qpvass, StackEffect};
use crate::numerics::IntVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("automaton letters have dimension {0}, grammar letters {1}")]
    AlphabetMismatch(usize, usize),
    #[error("signature enumeration exceeded {0} entries")]
    Capped(usize),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sym {
    N(usize),
    T(usize),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<Sym>,
}

/// Right-hand side symbol before letters are interned.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum RawSym {
    N(usize),
    T(IntVector),
}

/// A grammar whose terminals are distinct integer vectors. The alphabet is
/// kept sorted, so terminal indices follow vector order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorGrammar {
    pub dim: usize,
    pub alphabet: Vec<IntVector>,
    pub nonterminals: Vec<String>,
    pub start: usize,
    pub productions: Vec<Production>,
}

impl VectorGrammar {
    pub fn new(dim: usize, nonterminals: Vec<String>, start: usize, raw: Vec<(usize, Vec<RawSym>)>) -> Self {
        let mut letters = BTreeSet::new();
        for (_, rhs) in &raw {
            for s in rhs {
                if let RawSym::T(v) = s {
                    letters.insert(v.clone());
                }
            }
        }
        let alphabet: Vec<IntVector> = letters.into_iter().collect();
        let index: HashMap<&IntVector, usize> = alphabet.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut prods: Vec<Production> = raw
            .iter()
            .map(|(lhs, rhs)| Production {
                lhs: *lhs,
                rhs: rhs
                    .iter()
                    .map(|s| match s {
                        RawSym::N(n) => Sym::N(*n),
                        RawSym::T(v) => Sym::T(index[v]),
                    })
                    .collect(),
            })
            .collect();
        prods.sort();
        prods.dedup();
        let alphabet = alphabet.clone();
        VectorGrammar { dim, alphabet, nonterminals, start, productions: prods }
    }

    fn with_productions(&self, nonterminals: Vec<String>, start: usize, mut productions: Vec<Production>) -> Self {
        productions.sort();
        productions.dedup();
        VectorGrammar { dim: self.dim, alphabet: self.alphabet.clone(), nonterminals, start, productions }
    }

    pub fn letter_index(&self, v: &IntVector) -> Option<usize> {
        self.alphabet.binary_search(v).ok()
    }

    pub fn nullable(&self) -> Vec<bool> {
        let mut nul = vec![false; self.nonterminals.len()];
        loop {
            let mut changed = false;
            for p in &self.productions {
                if !nul[p.lhs] && p.rhs.iter().all(|s| matches!(s, Sym::N(b) if nul[*b])) {
                    nul[p.lhs] = true;
                    changed = true;
                }
            }
            if !changed {
                return nul;
            }
        }
    }

    pub fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.nonterminals.len()];
        loop {
            let mut changed = false;
            for p in &self.productions {
                if !prod[p.lhs] && p.rhs.iter().all(|s| matches!(s, Sym::T(_)) || matches!(s, Sym::N(b) if prod[*b])) {
                    prod[p.lhs] = true;
                    changed = true;
                }
            }
            if !changed {
                return prod;
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.productive()[self.start]
    }

    /// Drops nonproductive and unreachable nonterminals.
    pub fn trim(&self) -> VectorGrammar {
        let prod = self.productive();
        let good: Vec<&Production> = self
            .productions
            .iter()
            .filter(|p| prod[p.lhs] && p.rhs.iter().all(|s| !matches!(s, Sym::N(b) if !prod[*b])))
            .collect();
        let mut reach = vec![false; self.nonterminals.len()];
        reach[self.start] = true;
        let mut queue = VecDeque::from([self.start]);
        while let Some(a) = queue.pop_front() {
            for p in good.iter().filter(|p| p.lhs == a) {
                for s in &p.rhs {
                    if let Sym::N(b) = s {
                        if !reach[*b] {
                            reach[*b] = true;
                            queue.push_back(*b);
                        }
                    }
                }
            }
        }
        let mut map = vec![usize::MAX; self.nonterminals.len()];
        let mut names = Vec::new();
        for (i, n) in self.nonterminals.iter().enumerate() {
            if reach[i] && (prod[i] || i == self.start) {
                map[i] = names.len();
                names.push(n.clone());
            }
        }
        let prods = good
            .into_iter()
            .filter(|p| reach[p.lhs])
            .map(|p| Production {
                lhs: map[p.lhs],
                rhs: p
                    .rhs
                    .iter()
                    .map(|s| match s {
                        Sym::N(b) => Sym::N(map[*b]),
                        t => *t,
                    })
                    .collect(),
            })
            .collect();
        self.with_productions(names, map[self.start], prods).prune_alphabet()
    }

    fn prune_alphabet(mut self) -> VectorGrammar {
        let used: BTreeSet<usize> = self
            .productions
            .iter()
            .flat_map(|p| p.rhs.iter())
            .filter_map(|s| if let Sym::T(t) = s { Some(*t) } else { None })
            .collect();
        if used.len() == self.alphabet.len() {
            return self;
        }
        let map: HashMap<usize, usize> = used.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        self.alphabet = used.iter().map(|t| self.alphabet[*t].clone()).collect();
        for p in self.productions.iter_mut() {
            for s in p.rhs.iter_mut() {
                if let Sym::T(t) = s {
                    *t = map[t];
                }
            }
        }
        self.productions.sort();
        self
    }

    pub fn is_cnf(&self) -> bool {
        let start_on_rhs = self.productions.iter().any(|p| p.rhs.contains(&Sym::N(self.start)));
        self.productions.iter().all(|p| match p.rhs.as_slice() {
            [] => p.lhs == self.start && !start_on_rhs,
            [Sym::T(_)] => true,
            [Sym::N(_), Sym::N(_)] => true,
            _ => false,
        })
    }

    /// Whether the grammar derives the empty word.
    pub fn has_epsilon(&self) -> bool {
        self.nullable()[self.start]
    }

    /// Chomsky normal form: A -> B C, A -> a, and S -> eps only for a start
    /// symbol that never appears on a right-hand side. Trimmed.
    pub fn to_cnf(&self) -> VectorGrammar {
        let g = self.trim();
        if g.is_cnf() {
            return g;
        }
        let mut names = g.nonterminals.clone();
        let mut prods: Vec<Production> = Vec::new();
        // fresh start
        let s0 = names.len();
        names.push(format!("{}'", g.nonterminals[g.start]));
        prods.push(Production { lhs: s0, rhs: vec![Sym::N(g.start)] });
        // terminals out of long rules
        let mut term_nt: BTreeMap<usize, usize> = BTreeMap::new();
        for p in &g.productions {
            if p.rhs.len() < 2 {
                prods.push(p.clone());
                continue;
            }
            let rhs = p
                .rhs
                .iter()
                .map(|s| match s {
                    Sym::T(t) => {
                        let n = *term_nt.entry(*t).or_insert_with(|| {
                            names.push(format!("T{}", g.alphabet[*t]));
                            names.len() - 1
                        });
                        Sym::N(n)
                    }
                    n => *n,
                })
                .collect();
            prods.push(Production { lhs: p.lhs, rhs });
        }
        for (t, n) in &term_nt {
            prods.push(Production { lhs: *n, rhs: vec![Sym::T(*t)] });
        }
        // binarize
        let mut bin = Vec::new();
        for p in prods {
            if p.rhs.len() <= 2 {
                bin.push(p);
                continue;
            }
            let mut lhs = p.lhs;
            let k = p.rhs.len();
            for i in 0..k - 2 {
                let n = names.len();
                names.push(format!("{}#{}", names[p.lhs], i + 1));
                bin.push(Production { lhs, rhs: vec![p.rhs[i], Sym::N(n)] });
                lhs = n;
            }
            bin.push(Production { lhs, rhs: vec![p.rhs[k - 2], p.rhs[k - 1]] });
        }
        // epsilon removal
        let tmp = g.with_productions(names.clone(), s0, bin.clone());
        let nul = tmp.nullable();
        let mut noeps = BTreeSet::new();
        for p in &bin {
            match p.rhs.as_slice() {
                [] => {}
                [a, b] => {
                    noeps.insert(p.clone());
                    if matches!(a, Sym::N(x) if nul[*x]) {
                        noeps.insert(Production { lhs: p.lhs, rhs: vec![*b] });
                    }
                    if matches!(b, Sym::N(x) if nul[*x]) {
                        noeps.insert(Production { lhs: p.lhs, rhs: vec![*a] });
                    }
                }
                _ => {
                    noeps.insert(p.clone());
                }
            }
        }
        // unit removal
        let n = names.len();
        let mut unit = vec![BTreeSet::new(); n];
        for a in 0..n {
            unit[a].insert(a);
        }
        loop {
            let mut changed = false;
            for p in &noeps {
                if let [Sym::N(b)] = p.rhs.as_slice() {
                    let add: Vec<usize> = unit[*b].iter().cloned().collect();
                    for c in add {
                        // a ->* b ->* c for every a reaching p.lhs
                        for a in 0..n {
                            if unit[a].contains(&p.lhs) && unit[a].insert(c) {
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut out = Vec::new();
        for a in 0..n {
            for b in &unit[a] {
                for p in noeps.iter().filter(|p| p.lhs == *b) {
                    if !matches!(p.rhs.as_slice(), [Sym::N(_)]) {
                        out.push(Production { lhs: a, rhs: p.rhs.clone() });
                    }
                }
            }
        }
        if nul[s0] {
            out.push(Production { lhs: s0, rhs: vec![] });
        }
        g.with_productions(names, s0, out).trim()
    }

    /// Nonterminals A with A =>+ ... A ... (CNF input).
    pub fn self_reachable(&self) -> Vec<bool> {
        let n = self.nonterminals.len();
        let mut reach = vec![vec![false; n]; n];
        for p in &self.productions {
            for s in &p.rhs {
                if let Sym::N(b) = s {
                    reach[p.lhs][*b] = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        (0..n).map(|i| reach[i][i]).collect()
    }

    /// Finite language check for a trimmed grammar.
    pub fn is_finite(&self) -> bool {
        let g = self.to_cnf();
        !g.self_reachable().iter().any(|&b| b)
    }

    /// Words of length at most `max_len`, in length-lexicographic order of
    /// letter indices.
    pub fn enumerate_words(&self, max_len: usize) -> Vec<Vec<usize>> {
        let g = self.to_cnf();
        let n = g.nonterminals.len();
        let mut w: Vec<Vec<BTreeSet<Vec<usize>>>> = vec![vec![BTreeSet::new(); max_len + 1]; n];
        for len in 1..=max_len {
            for p in &g.productions {
                match p.rhs.as_slice() {
                    [Sym::T(t)] if len == 1 => {
                        w[p.lhs][1].insert(vec![*t]);
                    }
                    [Sym::N(b), Sym::N(c)] => {
                        let mut add = Vec::new();
                        for k in 1..len {
                            for x in &w[*b][k] {
                                for y in &w[*c][len - k] {
                                    let mut z = x.clone();
                                    z.extend_from_slice(y);
                                    add.push(z);
                                }
                            }
                        }
                        w[p.lhs][len].extend(add);
                    }
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        if g.productions.iter().any(|p| p.lhs == g.start && p.rhs.is_empty()) {
            out.push(Vec::new());
        }
        for len in 1..=max_len {
            out.extend(w[g.start][len].iter().cloned());
        }
        out.into_iter().map(|word| word.into_iter().map(|t| self.letter_index(&g.alphabet[t]).unwrap()).collect()).collect()
    }

    /// CYK membership.
    pub fn accepts(&self, word: &[usize]) -> bool {
        let g = self.to_cnf();
        let letters: Option<Vec<usize>> = word.iter().map(|t| g.letter_index(&self.alphabet[*t])).collect();
        let Some(word) = letters else { return false };
        let n = word.len();
        if n == 0 {
            return g.productions.iter().any(|p| p.lhs == g.start && p.rhs.is_empty());
        }
        let k = g.nonterminals.len();
        let mut t = vec![vec![vec![false; k]; n + 1]; n];
        for (i, a) in word.iter().enumerate() {
            for p in &g.productions {
                if p.rhs == [Sym::T(*a)] {
                    t[i][i + 1][p.lhs] = true;
                }
            }
        }
        for len in 2..=n {
            for i in 0..=n - len {
                let j = i + len;
                for m in i + 1..j {
                    for p in &g.productions {
                        if let [Sym::N(b), Sym::N(c)] = p.rhs.as_slice() {
                            if t[i][m][*b] && t[m][j][*c] {
                                t[i][j][p.lhs] = true;
                            }
                        }
                    }
                }
            }
        }
        t[0][n][g.start]
    }

    /// A shortest word, if any.
    pub fn shortest_word(&self) -> Option<Vec<usize>> {
        let g = self.to_cnf();
        if g.is_empty() {
            return None;
        }
        let n = g.nonterminals.len();
        let mut best: Vec<Option<Vec<usize>>> = vec![None; n];
        loop {
            let mut changed = false;
            for p in &g.productions {
                let cand = match p.rhs.as_slice() {
                    [] => Some(Vec::new()),
                    [Sym::T(t)] => Some(vec![*t]),
                    [Sym::N(b), Sym::N(c)] => match (&best[*b], &best[*c]) {
                        (Some(x), Some(y)) => {
                            let mut z = x.clone();
                            z.extend_from_slice(y);
                            Some(z)
                        }
                        _ => None,
                    },
                    _ => None,
                };
                if let Some(c) = cand {
                    if best[p.lhs].as_ref().is_none_or(|b| c.len() < b.len()) {
                        best[p.lhs] = Some(c);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        best[g.start].clone().map(|w| w.into_iter().map(|t| self.letter_index(&g.alphabet[t]).unwrap()).collect())
    }

    /// Intersection with a regular language.
    pub fn intersect(&self, nfa: &VectorNfa) -> Result<VectorGrammar, GrammarError> {
        if let Some((_, v, _)) = nfa.transitions.iter().find(|(_, v, _)| v.dim() != self.dim) {
            return Err(GrammarError::AlphabetMismatch(v.dim(), self.dim));
        }
        let g = self.to_cnf();
        let mut delta: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (p, v, q) in &nfa.transitions {
            if let Some(t) = g.letter_index(v) {
                delta.entry((*p, t)).or_default().push(*q);
            }
        }
        let mut ids: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut names = vec!["S".to_string()];
        let mut raw: Vec<(usize, Vec<RawSym>)> = Vec::new();
        let mut queue = VecDeque::new();
        let mut intern = |key: (usize, usize, usize), names: &mut Vec<String>, queue: &mut VecDeque<(usize, usize, usize)>| -> usize {
            *ids.entry(key).or_insert_with(|| {
                names.push(format!("[{},{},{}]", key.0, g.nonterminals[key.1], key.2));
                queue.push_back(key);
                names.len() - 1
            })
        };
        for f in &nfa.finals {
            let id = intern((nfa.initial, g.start, *f), &mut names, &mut queue);
            raw.push((0, vec![RawSym::N(id)]));
        }
        if nfa.finals.contains(&nfa.initial) && g.has_epsilon() {
            raw.push((0, vec![]));
        }
        while let Some((p, a, q)) = queue.pop_front() {
            let me = intern((p, a, q), &mut names, &mut queue);
            for prod in g.productions.iter().filter(|x| x.lhs == a) {
                match prod.rhs.as_slice() {
                    [Sym::T(t)] => {
                        if delta.get(&(p, *t)).is_some_and(|qs| qs.contains(&q)) {
                            raw.push((me, vec![RawSym::T(g.alphabet[*t].clone())]));
                        }
                    }
                    [Sym::N(b), Sym::N(c)] => {
                        for r in 0..nfa.states {
                            let x = intern((p, *b, r), &mut names, &mut queue);
                            let y = intern((r, *c, q), &mut names, &mut queue);
                            raw.push((me, vec![RawSym::N(x), RawSym::N(y)]));
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(VectorGrammar::new(self.dim, names, 0, raw).to_cnf())
    }

    /// Words whose letters are exactly `first` with first occurrences in that
    /// order and, when given, last occurrences in the order `last`.
    pub fn restrict_support(&self, first: &[IntVector], last: Option<&[IntVector]>) -> Result<VectorGrammar, GrammarError> {
        let mut g = self.intersect(&VectorNfa::first_order(self.dim, first))?;
        if let Some(l) = last {
            g = g.intersect(&VectorNfa::last_order(self.dim, l))?;
        }
        Ok(g)
    }

    /// Every realizable support signature of the language, each with a
    /// witness word. Fixpoint over the CNF; `with_last` also tracks the
    /// last-occurrence order.
    pub fn realizable_signatures(&self, with_last: bool, cap: usize) -> Result<BTreeMap<Signature, Vec<usize>>, GrammarError> {
        self.realizable(|t| Signature::letter(t, with_last), |x, y| x.concat(y), cap)
    }

    /// Every realizable [`Summary`], each with a witness word.
    pub fn realizable_summaries(&self, cap: usize) -> Result<BTreeMap<Summary, Vec<usize>>, GrammarError> {
        let al = &self.alphabet;
        self.realizable(|t| Summary::letter(al, t), |x, y| x.concat(al, y), cap)
    }

    /// Image of the language under a monoid morphism given by `leaf` and
    /// `concat`, with one witness word per element.
    pub fn realizable<S: Ord + Clone + Default>(
        &self,
        leaf: impl Fn(usize) -> S,
        concat: impl Fn(&S, &S) -> S,
        cap: usize,
    ) -> Result<BTreeMap<S, Vec<usize>>, GrammarError> {
        let g = self.to_cnf();
        let n = g.nonterminals.len();
        let mut sets: Vec<BTreeMap<S, Back<S>>> = vec![BTreeMap::new(); n];
        let mut total = 0usize;
        let lift = |t: usize| self.letter_index(&g.alphabet[t]).unwrap();
        loop {
            let mut changed = false;
            for (pi, p) in g.productions.iter().enumerate() {
                let mut add: Vec<(S, Back<S>)> = Vec::new();
                match p.rhs.as_slice() {
                    [] => add.push((S::default(), Back::Eps)),
                    [Sym::T(t)] => add.push((leaf(lift(*t)), Back::Leaf(lift(*t)))),
                    [Sym::N(b), Sym::N(c)] => {
                        for sb in sets[*b].keys() {
                            for sc in sets[*c].keys() {
                                let s = concat(sb, sc);
                                if !sets[p.lhs].contains_key(&s) {
                                    add.push((s, Back::Pair(pi, sb.clone(), sc.clone())));
                                }
                            }
                        }
                    }
                    _ => {}
                }
                for (s, b) in add {
                    if let std::collections::btree_map::Entry::Vacant(e) = sets[p.lhs].entry(s) {
                        e.insert(b);
                        changed = true;
                        total += 1;
                        if total > cap {
                            return Err(GrammarError::Capped(cap));
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut out = BTreeMap::new();
        for s in sets[g.start].keys() {
            let mut w = Vec::new();
            expand(&g, &sets, g.start, s, &mut w);
            out.insert(s.clone(), w);
        }
        Ok(out)
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        for p in &self.productions {
            let rhs: Vec<String> = if p.rhs.is_empty() {
                vec!["ε".to_string()]
            } else {
                p.rhs
                    .iter()
                    .map(|x| match x {
                        Sym::N(b) => self.nonterminals[*b].clone(),
                        Sym::T(t) => self.alphabet[*t].to_string(),
                    })
                    .collect()
            };
            s.push_str(&format!("{} -> {}\n", self.nonterminals[p.lhs], rhs.join(" ")));
        }
        s
    }
}

impl fmt::Display for VectorGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump())
    }
}

#[derive(Clone, Debug)]
enum Back<S> {
    Eps,
    Leaf(usize),
    Pair(usize, S, S),
}

fn expand<S: Ord>(g: &VectorGrammar, sets: &[BTreeMap<S, Back<S>>], a: usize, s: &S, out: &mut Vec<usize>) {
    match &sets[a][s] {
        Back::Eps => {}
        Back::Leaf(t) => out.push(*t),
        Back::Pair(pi, sb, sc) => {
            let p = &g.productions[*pi];
            if let [Sym::N(b), Sym::N(c)] = p.rhs.as_slice() {
                expand(g, sets, *b, sb, out);
                expand(g, sets, *c, sc, out);
            }
        }
    }
}

/// Letters in first-occurrence order and in last-occurrence order. The
/// second list stays empty when last occurrences are not tracked.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Signature {
    pub first: Vec<usize>,
    pub last: Vec<usize>,
}

impl Signature {
    pub fn letter(t: usize, with_last: bool) -> Self {
        Signature { first: vec![t], last: if with_last { vec![t] } else { vec![] } }
    }

    pub fn of_word(w: &[usize], with_last: bool) -> Self {
        w.iter().fold(Signature::default(), |s, t| s.concat(&Signature::letter(*t, with_last)))
    }

    pub fn concat(&self, o: &Signature) -> Signature {
        let mut first = self.first.clone();
        for t in &o.first {
            if !self.first.contains(t) {
                first.push(*t);
            }
        }
        let mut last: Vec<usize> = self.last.iter().filter(|t| !o.last.contains(t)).cloned().collect();
        last.extend_from_slice(&o.last);
        Signature { first, last }
    }
}

/// Coarsest data the reachability formulas depend on: the letter set, the
/// coordinates that must be positive before the first step, and those
/// that must be positive after the last.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Summary {
    pub letters: BTreeSet<usize>,
    pub needs_start: BTreeSet<usize>,
    pub needs_end: BTreeSet<usize>,
}

impl Summary {
    pub fn letter(alphabet: &[IntVector], t: usize) -> Self {
        Summary {
            letters: BTreeSet::from([t]),
            needs_start: alphabet[t].neg_support().into_iter().collect(),
            needs_end: alphabet[t].pos_support().into_iter().collect(),
        }
    }

    pub fn of_word(alphabet: &[IntVector], w: &[usize]) -> Self {
        w.iter().fold(Summary::default(), |s, t| s.concat(alphabet, &Summary::letter(alphabet, *t)))
    }

    pub fn concat(&self, alphabet: &[IntVector], o: &Summary) -> Summary {
        let fed = |ls: &BTreeSet<usize>, i: usize| ls.iter().any(|t| alphabet[*t].get(i).is_positive());
        let drained = |ls: &BTreeSet<usize>, i: usize| ls.iter().any(|t| alphabet[*t].get(i).is_negative());
        let mut needs_start = self.needs_start.clone();
        needs_start.extend(o.needs_start.iter().filter(|&&i| !fed(&self.letters, i)));
        let mut needs_end = o.needs_end.clone();
        needs_end.extend(self.needs_end.iter().filter(|&&i| !drained(&o.letters, i)));
        Summary { letters: self.letters.union(&o.letters).cloned().collect(), needs_start, needs_end }
    }
}

/// Nondeterministic automaton over vector letters.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorNfa {
    pub dim: usize,
    pub states: usize,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: Vec<(usize, IntVector, usize)>,
}

impl VectorNfa {
    /// Words over exactly the letters of `order` whose first occurrences
    /// appear in that order.
    pub fn first_order(dim: usize, order: &[IntVector]) -> Self {
        let k = order.len();
        let mut transitions = Vec::new();
        for i in 0..k {
            transitions.push((i, order[i].clone(), i + 1));
            for j in 1..=i {
                transitions.push((i, order[j - 1].clone(), i));
            }
        }
        for j in 0..k {
            transitions.push((k, order[j].clone(), k));
        }
        VectorNfa { dim, states: k + 1, initial: 0, finals: BTreeSet::from([k]), transitions }
    }

    /// Words over exactly the letters of `order` whose last occurrences
    /// appear in that order.
    pub fn last_order(dim: usize, order: &[IntVector]) -> Self {
        let rev: Vec<IntVector> = order.iter().rev().cloned().collect();
        VectorNfa::first_order(dim, &rev).reverse()
    }

    /// Automaton for the reversed language.
    pub fn reverse(&self) -> VectorNfa {
        let s = self.states;
        let mut transitions: Vec<(usize, IntVector, usize)> = self.transitions.iter().map(|(p, a, q)| (*q, a.clone(), *p)).collect();
        for (p, a, q) in &self.transitions {
            if self.finals.contains(q) {
                transitions.push((s, a.clone(), *p));
            }
        }
        let mut finals = BTreeSet::from([self.initial]);
        if self.finals.contains(&self.initial) {
            finals.insert(s);
        }
        VectorNfa { dim: self.dim, states: s + 1, initial: s, finals, transitions }
    }

    pub fn accepts(&self, word: &[IntVector]) -> bool {
        let mut cur = BTreeSet::from([self.initial]);
        for a in word {
            cur = self.transitions.iter().filter(|(p, b, _)| cur.contains(p) && b == a).map(|(_, _, q)| *q).collect();
        }
        cur.iter().any(|q| self.finals.contains(q))
    }
}

/// Where the target stack is constrained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetStack {
    Exactly(Vec<usize>),
    Any,
}

/// Grammar of update words along runs of the pushdown machine from
/// `(from.state, from.stack)` to `to_state` with the given target stack.
/// Each machine rule contributes its update as one letter; the bottom marker
/// and the stack-loading and stack-draining moves contribute nothing.
pub fn pvass_to_grammar(m: &Qpvass, from: &Config, to_state: usize, to_stack: &TargetStack) -> VectorGrammar {
    let nsym = m.stack_alphabet.len();
    let bottom = nsym;
    let mut names: Vec<String> = m.states.clone();
    let fresh = |names: &mut Vec<String>, s: String| {
        names.push(s);
        names.len() - 1
    };
    // (from, to, effect, letter)
    let mut trans: Vec<(usize, usize, StackEffect, Option<IntVector>)> = Vec::new();
    for r in &m.rules {
        trans.push((r.from, r.to, r.stack, Some(r.update.clone())));
    }
    let s0 = fresh(&mut names, "<load>".into());
    let mut cur = s0;
    for (i, sym) in from.stack.iter().rev().enumerate() {
        let next = if i + 1 == from.stack.len() { from.state } else { fresh(&mut names, format!("<load{i}>")) };
        trans.push((cur, next, StackEffect::Push(*sym), None));
        cur = next;
    }
    if from.stack.is_empty() {
        trans.push((s0, from.state, StackEffect::None, None));
    }
    let fin = fresh(&mut names, "<end>".into());
    match to_stack {
        TargetStack::Exactly(w) => {
            let mut cur = to_state;
            for (i, sym) in w.iter().enumerate() {
                let next = fresh(&mut names, format!("<drain{i}>"));
                trans.push((cur, next, StackEffect::Pop(*sym), None));
                cur = next;
            }
            trans.push((cur, fin, StackEffect::Pop(bottom), None));
        }
        TargetStack::Any => {
            let d = fresh(&mut names, "<drain>".into());
            trans.push((to_state, d, StackEffect::None, None));
            for x in 0..nsym {
                trans.push((d, d, StackEffect::Pop(x), None));
            }
            trans.push((d, fin, StackEffect::Pop(bottom), None));
        }
    }
    let nstates = names.len();
    let sym_name = |x: usize| if x == bottom { "⊥".to_string() } else { m.stack_alphabet[x].clone() };
    let mut ids: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut nts: Vec<String> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |k: (usize, usize, usize), nts: &mut Vec<String>, queue: &mut VecDeque<(usize, usize, usize)>| -> usize {
        *ids.entry(k).or_insert_with(|| {
            nts.push(format!("[{},{},{}]", names[k.0], sym_name(k.1), names[k.2]));
            queue.push_back(k);
            nts.len() - 1
        })
    };
    let start = intern((s0, bottom, fin), &mut nts, &mut queue);
    let mut raw: Vec<(usize, Vec<RawSym>)> = Vec::new();
    while let Some((p, x, q)) = queue.pop_front() {
        let me = intern((p, x, q), &mut nts, &mut queue);
        for (f, t, eff, letter) in trans.iter().filter(|tr| tr.0 == p) {
            let mut rhs: Vec<RawSym> = letter.iter().map(|l| RawSym::T(l.clone())).collect();
            match eff {
                StackEffect::Pop(y) => {
                    if *y == x && *t == q {
                        raw.push((me, rhs));
                    }
                }
                StackEffect::None => {
                    let n = intern((*t, x, q), &mut nts, &mut queue);
                    rhs.push(RawSym::N(n));
                    raw.push((me, rhs));
                }
                StackEffect::Push(y) => {
                    for r in 0..nstates {
                        let a = intern((*t, *y, r), &mut nts, &mut queue);
                        let b = intern((r, x, q), &mut nts, &mut queue);
                        let mut rr = rhs.clone();
                        rr.push(RawSym::N(a));
                        rr.push(RawSym::N(b));
                        raw.push((me, rr));
                    }
                }
            }
            let _ = f;
        }
    }
    VectorGrammar::new(m.dim, nts, start, raw).trim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::examples::*;
    use crate::machines::Config;
    use crate::numerics::RatVector;

    fn iv(x: &[i64]) -> IntVector {
        IntVector::from_i64(x)
    }

    // S -> a S b | eps
    fn anbn() -> VectorGrammar {
        VectorGrammar::new(
            1,
            vec!["S".into()],
            0,
            vec![(0, vec![RawSym::T(iv(&[1])), RawSym::N(0), RawSym::T(iv(&[-1]))]), (0, vec![])],
        )
    }

    #[test]
    fn cnf_preserves_words() {
        let g = anbn();
        let c = g.to_cnf();
        assert!(c.is_cnf());
        let words = g.enumerate_words(6);
        assert_eq!(words.len(), 4);
        assert_eq!(words[0], Vec::<usize>::new());
        let a = g.letter_index(&iv(&[1])).unwrap();
        let b = g.letter_index(&iv(&[-1])).unwrap();
        assert_eq!(words[1], vec![a, b]);
        assert!(g.accepts(&[a, a, b, b]));
        assert!(!g.accepts(&[a, b, a, b]));
    }

    #[test]
    fn cnf_is_idempotent() {
        let c = anbn().to_cnf();
        assert_eq!(c.to_cnf(), c);
    }

    #[test]
    fn first_and_last_orders() {
        let a = iv(&[1, 0]);
        let b = iv(&[0, 1]);
        let f = VectorNfa::first_order(2, &[a.clone(), b.clone()]);
        assert!(f.accepts(&[a.clone(), b.clone()]));
        assert!(f.accepts(&[a.clone(), a.clone(), b.clone(), a.clone()]));
        assert!(!f.accepts(&[b.clone(), a.clone()]));
        assert!(!f.accepts(std::slice::from_ref(&a)));
        let l = VectorNfa::last_order(2, &[a.clone(), b.clone()]);
        assert!(l.accepts(&[a.clone(), b.clone()]));
        assert!(l.accepts(&[b.clone(), a.clone(), b.clone()]));
        assert!(!l.accepts(&[b.clone(), a.clone()]));
        assert!(!l.accepts(&[a.clone(), b.clone(), a.clone()]));
        let e = VectorNfa::first_order(2, &[]);
        assert!(e.accepts(&[]));
    }

    #[test]
    fn machine_without_rules() {
        let m = Qpvass { states: vec!["q".into()], stack_alphabet: vec!["a".into()], dim: 1, rules: vec![] };
        let c = Config::with_stack(0, vec![0, 0], RatVector::zeros(1));
        let g = pvass_to_grammar(&m, &c, 0, &TargetStack::Exactly(vec![0, 0]));
        assert_eq!(g.enumerate_words(3), vec![Vec::<usize>::new()]);
        let g = pvass_to_grammar(&m, &c, 0, &TargetStack::Exactly(vec![0]));
        assert!(g.is_empty());
    }

    #[test]
    fn figure_machine_words() {
        let m = pvass_two_counter();
        let c = Config::new(0, RatVector::zeros(2));
        let g = pvass_to_grammar(&m, &c, 1, &TargetStack::Exactly(vec![0]));
        let words: Vec<Vec<IntVector>> =
            g.enumerate_words(3).into_iter().map(|w| w.into_iter().map(|t| g.alphabet[t].clone()).collect()).collect();
        assert!(words.contains(&vec![iv(&[-1, 0])]));
        assert!(words.contains(&vec![iv(&[-1, 0]), iv(&[0, 0]), iv(&[0, 1])]));
        assert!(!words.iter().any(|w| w.len() == 2));
        let any = pvass_to_grammar(&m, &c, 1, &TargetStack::Any);
        assert!(any.enumerate_words(1).len() == 2);
    }

    #[test]
    fn signatures_match_restriction() {
        let g = anbn();
        let sigs = g.realizable_signatures(true, 1000).unwrap();
        assert_eq!(sigs.len(), 2);
        for (s, w) in &sigs {
            assert_eq!(&Signature::of_word(w, true), s);
            assert!(g.accepts(w));
            let first: Vec<IntVector> = s.first.iter().map(|t| g.alphabet[*t].clone()).collect();
            let last: Vec<IntVector> = s.last.iter().map(|t| g.alphabet[*t].clone()).collect();
            assert!(!g.restrict_support(&first, Some(&last)).unwrap().is_empty());
        }
    }

    #[test]
    fn intersect_dimension_error() {
        let nfa = VectorNfa::first_order(2, &[iv(&[1, 1])]);
        assert!(matches!(anbn().intersect(&nfa), Err(GrammarError::AlphabetMismatch(2, 1))));
    }
}
