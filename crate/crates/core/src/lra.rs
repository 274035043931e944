//! Existential linear rational arithmetic: formulas, a simplex-based
//! decision procedure with strict bounds, and a Fourier-Motzkin cross-check.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::time::Instant;

use crate::numerics::Rational;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn new(s: impl Into<String>) -> Self {
        Var(s.into())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// sum c_i x_i + constant
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<Var, Rational>,
    pub constant: Rational,
}

impl LinExpr {
    pub fn var(v: &Var) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v.clone(), Rational::one());
        LinExpr { coeffs, constant: Rational::zero() }
    }

    pub fn constant(c: Rational) -> Self {
        LinExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn zero() -> Self {
        LinExpr::default()
    }

    pub fn add_term(&mut self, v: &Var, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(v.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(v);
        }
    }

    pub fn add_expr(&mut self, other: &LinExpr, k: &Rational) {
        for (v, c) in &other.coeffs {
            self.add_term(v, &(c * k));
        }
        self.constant += &(&other.constant * k);
    }

    pub fn plus(&self, other: &LinExpr) -> LinExpr {
        let mut e = self.clone();
        e.add_expr(other, &Rational::one());
        e
    }

    pub fn minus(&self, other: &LinExpr) -> LinExpr {
        let mut e = self.clone();
        e.add_expr(other, &-Rational::one());
        e
    }

    pub fn scaled(&self, k: &Rational) -> LinExpr {
        let mut e = LinExpr::zero();
        e.add_expr(self, k);
        e
    }

    pub fn eval(&self, m: &Model) -> Rational {
        let mut s = self.constant.clone();
        for (v, c) in &self.coeffs {
            s += &(c * &m.get(v));
        }
        s
    }
}

impl From<&Var> for LinExpr {
    fn from(v: &Var) -> Self {
        LinExpr::var(v)
    }
}

impl From<Rational> for LinExpr {
    fn from(c: Rational) -> Self {
        LinExpr::constant(c)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Rel {
    Lt,
    Le,
    Eq,
}

/// sum c_i x_i rel bound
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom {
    pub coeffs: BTreeMap<Var, Rational>,
    pub rel: Rel,
    pub bound: Rational,
}

impl Atom {
    /// lhs rel rhs
    pub fn new(lhs: &LinExpr, rel: Rel, rhs: &LinExpr) -> Self {
        let d = lhs.minus(rhs);
        Atom { coeffs: d.coeffs, rel, bound: -d.constant }
    }

    pub fn eval(&self, m: &Model) -> bool {
        let mut s = Rational::zero();
        for (v, c) in &self.coeffs {
            s += &(c * &m.get(v));
        }
        holds(&s, self.rel, &self.bound)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn holds(lhs: &Rational, rel: Rel, rhs: &Rational) -> bool {
    match rel {
        Rel::Lt => lhs < rhs,
        Rel::Le => lhs <= rhs,
        Rel::Eq => lhs == rhs,
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{v}")?;
        }
        let r = match self.rel {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
        };
        write!(f, " {r} {}", self.bound)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Formula {
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn tt() -> Self {
        Formula::And(Vec::new())
    }

    pub fn ff() -> Self {
        Formula::Or(Vec::new())
    }

    pub fn and(fs: Vec<Formula>) -> Self {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::And(gs) => out.extend(gs),
                g => out.push(g),
            }
        }
        if out.len() == 1 {
            return out.pop().unwrap();
        }
        Formula::And(out)
    }

    pub fn or(fs: Vec<Formula>) -> Self {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::Or(gs) => out.extend(gs),
                g => out.push(g),
            }
        }
        if out.len() == 1 {
            return out.pop().unwrap();
        }
        Formula::Or(out)
    }

    pub fn eval(&self, m: &Model) -> bool {
        match self {
            Formula::Atom(a) => a.eval(m),
            Formula::And(fs) => fs.iter().all(|f| f.eval(m)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(m)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom(a) => out.extend(a.coeffs.keys().cloned()),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(|f| f.atom_count()).sum(),
        }
    }

    /// Lazily enumerates the disjuncts of the DNF, left to right.
    pub fn to_dnf_lazy(&self) -> DnfIter<'_> {
        DnfIter { stack: vec![(Vec::new(), vec![self])] }
    }
}

pub fn lt(a: &LinExpr, b: &LinExpr) -> Formula {
    Formula::Atom(Atom::new(a, Rel::Lt, b))
}

pub fn le(a: &LinExpr, b: &LinExpr) -> Formula {
    Formula::Atom(Atom::new(a, Rel::Le, b))
}

pub fn eq(a: &LinExpr, b: &LinExpr) -> Formula {
    Formula::Atom(Atom::new(a, Rel::Eq, b))
}

pub fn gt(a: &LinExpr, b: &LinExpr) -> Formula {
    lt(b, a)
}

pub fn ge(a: &LinExpr, b: &LinExpr) -> Formula {
    le(b, a)
}

pub struct DnfIter<'a> {
    stack: Vec<(Vec<Atom>, Vec<&'a Formula>)>,
}

impl<'a> Iterator for DnfIter<'a> {
    type Item = Vec<Atom>;

    fn next(&mut self) -> Option<Vec<Atom>> {
        while let Some((mut atoms, mut work)) = self.stack.pop() {
            loop {
                match work.pop() {
                    None => return Some(atoms),
                    Some(Formula::Atom(a)) => atoms.push(a.clone()),
                    Some(Formula::And(fs)) => work.extend(fs.iter().rev()),
                    Some(Formula::Or(fs)) => {
                        for f in fs.iter().rev() {
                            let mut w = work.clone();
                            w.push(f);
                            self.stack.push((atoms.clone(), w));
                        }
                        break;
                    }
                }
            }
        }
        None
    }
}

/// Assignment of rationals to variables; unassigned variables read as 0.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Model(pub BTreeMap<Var, Rational>);

impl Model {
    pub fn get(&self, v: &Var) -> Rational {
        self.0.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, v: Var, x: Rational) {
        self.0.insert(v, x);
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SatResult {
    Sat(Model),
    Unsat,
    Timeout,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

#[derive(Clone, Debug, Default)]
pub struct Limits {
    pub max_nodes: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Limits {
    pub fn exceeded(&self, nodes: u64) -> bool {
        if let Some(m) = self.max_nodes {
            if nodes > m {
                return true;
            }
        }
        if let Some(d) = self.deadline {
            if nodes.is_multiple_of(16) && Instant::now() > d {
                return true;
            }
        }
        false
    }
}

// r + d * delta, delta a positive infinitesimal
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
struct Delta {
    r: Rational,
    d: Rational,
}

impl Delta {
    fn real(r: Rational) -> Self {
        Delta { r, d: Rational::zero() }
    }

    fn new(r: Rational, d: Rational) -> Self {
        Delta { r, d }
    }

    fn add(&self, o: &Delta) -> Delta {
        Delta { r: &self.r + &o.r, d: &self.d + &o.d }
    }

    fn sub(&self, o: &Delta) -> Delta {
        Delta { r: &self.r - &o.r, d: &self.d - &o.d }
    }

    fn scale(&self, k: &Rational) -> Delta {
        Delta { r: &self.r * k, d: &self.d * k }
    }
}

struct Simplex {
    n: usize,
    lower: Vec<Option<Delta>>,
    upper: Vec<Option<Delta>>,
    value: Vec<Delta>,
    // basic var -> (nonbasic var -> coefficient)
    rows: BTreeMap<usize, BTreeMap<usize, Rational>>,
    basic: Vec<bool>,
}

impl Simplex {
    fn new(n: usize) -> Self {
        Simplex {
            n,
            lower: vec![None; n],
            upper: vec![None; n],
            value: vec![Delta::default(); n],
            rows: BTreeMap::new(),
            basic: vec![false; n],
        }
    }

    fn add_row(&mut self, coeffs: BTreeMap<usize, Rational>) -> usize {
        let s = self.n;
        self.n += 1;
        self.lower.push(None);
        self.upper.push(None);
        self.basic.push(true);
        let mut v = Delta::default();
        for (j, c) in &coeffs {
            v = v.add(&self.value[*j].scale(c));
        }
        self.value.push(v);
        self.rows.insert(s, coeffs);
        s
    }

    fn tighten_lower(&mut self, x: usize, b: Delta) -> bool {
        if self.lower[x].as_ref().is_none_or(|l| b > *l) {
            self.lower[x] = Some(b);
        }
        self.consistent(x)
    }

    fn tighten_upper(&mut self, x: usize, b: Delta) -> bool {
        if self.upper[x].as_ref().is_none_or(|u| b < *u) {
            self.upper[x] = Some(b);
        }
        self.consistent(x)
    }

    fn consistent(&self, x: usize) -> bool {
        match (&self.lower[x], &self.upper[x]) {
            (Some(l), Some(u)) => l <= u,
            _ => true,
        }
    }

    fn update_nonbasic(&mut self, x: usize, v: Delta) {
        let diff = v.sub(&self.value[x]);
        for (b, row) in &self.rows {
            if let Some(c) = row.get(&x) {
                self.value[*b] = self.value[*b].add(&diff.scale(c));
            }
        }
        self.value[x] = v;
    }

    fn pivot(&mut self, xi: usize, xj: usize) {
        let row = self.rows.remove(&xi).unwrap();
        let a = row[&xj].clone();
        // xj = (xi - sum_{k != j} a_k x_k) / a
        let mut new_row = BTreeMap::new();
        let inv = a.recip();
        new_row.insert(xi, inv.clone());
        for (k, c) in &row {
            if *k != xj {
                new_row.insert(*k, -(c * &inv));
            }
        }
        for r in self.rows.values_mut() {
            if let Some(c) = r.remove(&xj) {
                for (k, d) in &new_row {
                    let e = r.entry(*k).or_insert_with(Rational::zero);
                    *e += &(&c * d);
                    if e.is_zero() {
                        r.remove(k);
                    }
                }
            }
        }
        self.rows.insert(xj, new_row);
        self.basic[xi] = false;
        self.basic[xj] = true;
    }

    fn pivot_and_update(&mut self, xi: usize, xj: usize, v: Delta) {
        let a = self.rows[&xi][&xj].clone();
        let theta = v.sub(&self.value[xi]).scale(&a.recip());
        self.value[xi] = v;
        self.value[xj] = self.value[xj].add(&theta);
        for (b, row) in &self.rows {
            if *b == xi {
                continue;
            }
            if let Some(c) = row.get(&xj) {
                self.value[*b] = self.value[*b].add(&theta.scale(c));
            }
        }
        self.pivot(xi, xj);
    }

    fn check(&mut self) -> bool {
        // nonbasic variables inside their bounds first
        for x in 0..self.n {
            if self.basic[x] {
                continue;
            }
            if let Some(l) = self.lower[x].clone() {
                if self.value[x] < l {
                    self.update_nonbasic(x, l);
                }
            }
            if let Some(u) = self.upper[x].clone() {
                if self.value[x] > u {
                    self.update_nonbasic(x, u);
                }
            }
        }
        loop {
            let mut viol = None;
            for b in self.rows.keys() {
                let v = &self.value[*b];
                if self.lower[*b].as_ref().is_some_and(|l| v < l) {
                    viol = Some((*b, true));
                    break;
                }
                if self.upper[*b].as_ref().is_some_and(|u| v > u) {
                    viol = Some((*b, false));
                    break;
                }
            }
            let Some((xi, below)) = viol else { return true };
            let row = &self.rows[&xi];
            let mut pick = None;
            for (xj, a) in row.iter() {
                let can_inc = self.upper[*xj].as_ref().is_none_or(|u| self.value[*xj] < *u);
                let can_dec = self.lower[*xj].as_ref().is_none_or(|l| self.value[*xj] > *l);
                let ok = if below {
                    (a.is_positive() && can_inc) || (a.is_negative() && can_dec)
                } else {
                    (a.is_negative() && can_inc) || (a.is_positive() && can_dec)
                };
                if ok {
                    pick = Some(*xj);
                    break;
                }
            }
            let Some(xj) = pick else { return false };
            let target = if below { self.lower[xi].clone().unwrap() } else { self.upper[xi].clone().unwrap() };
            self.pivot_and_update(xi, xj, target);
        }
    }

    fn concrete_delta(&self) -> Rational {
        let mut delta = Rational::one();
        for x in 0..self.n {
            let v = &self.value[x];
            if let Some(l) = &self.lower[x] {
                if l.r < v.r && l.d > v.d {
                    delta = delta.min((&v.r - &l.r) / (&l.d - &v.d));
                }
            }
            if let Some(u) = &self.upper[x] {
                if v.r < u.r && v.d > u.d {
                    delta = delta.min((&u.r - &v.r) / (&v.d - &u.d));
                }
            }
        }
        delta
    }
}

/// Decides a conjunction of atoms with the simplex method over
/// delta-rationals; returns a model on success.
pub fn solve_conjunction(atoms: &[Atom]) -> Option<Model> {
    let mut index: HashMap<&Var, usize> = HashMap::new();
    let mut names: Vec<&Var> = Vec::new();
    for a in atoms {
        for v in a.coeffs.keys() {
            if !index.contains_key(v) {
                index.insert(v, names.len());
                names.push(v);
            }
        }
    }
    let mut sx = Simplex::new(names.len());
    let mut slack_of: HashMap<Vec<(usize, Rational)>, usize> = HashMap::new();
    for a in atoms {
        if a.is_constant() {
            if !holds(&Rational::zero(), a.rel, &a.bound) {
                return None;
            }
            continue;
        }
        let (x, k, flip) = if a.coeffs.len() == 1 {
            let (v, c) = a.coeffs.iter().next().unwrap();
            (index[v], &a.bound / c, c.is_negative())
        } else {
            let key: Vec<(usize, Rational)> = a.coeffs.iter().map(|(v, c)| (index[v], c.clone())).collect();
            let x = match slack_of.get(&key) {
                Some(&s) => s,
                None => {
                    let s = sx.add_row(key.iter().cloned().collect());
                    slack_of.insert(key, s);
                    s
                }
            };
            (x, a.bound.clone(), false)
        };
        let ok = match (a.rel, flip) {
            (Rel::Eq, _) => sx.tighten_lower(x, Delta::real(k.clone())) && sx.tighten_upper(x, Delta::real(k)),
            (Rel::Le, false) => sx.tighten_upper(x, Delta::real(k)),
            (Rel::Le, true) => sx.tighten_lower(x, Delta::real(k)),
            (Rel::Lt, false) => sx.tighten_upper(x, Delta::new(k, -Rational::one())),
            (Rel::Lt, true) => sx.tighten_lower(x, Delta::new(k, Rational::one())),
        };
        if !ok {
            return None;
        }
    }
    if !sx.check() {
        return None;
    }
    let delta = sx.concrete_delta();
    let mut m = Model::default();
    for (i, v) in names.iter().enumerate() {
        let d = &sx.value[i];
        m.set((*v).clone(), &d.r + &(&d.d * &delta));
    }
    debug_assert!(atoms.iter().all(|a| a.eval(&m)));
    Some(m)
}

/// Satisfiability by depth-first search over disjunctions, pruning any
/// branch whose collected atoms are already infeasible.
pub fn is_sat(f: &Formula) -> SatResult {
    is_sat_with(f, &Limits::default())
}

pub fn is_sat_with(f: &Formula, limits: &Limits) -> SatResult {
    let mut nodes = 0u64;
    let mut stack: Vec<(Vec<Atom>, Vec<&Formula>, bool)> = vec![(Vec::new(), vec![f], true)];
    while let Some((mut atoms, mut work, mut fresh)) = stack.pop() {
        nodes += 1;
        if limits.exceeded(nodes) {
            return SatResult::Timeout;
        }
        loop {
            match work.pop() {
                None => {
                    if let Some(m) = solve_conjunction(&atoms) {
                        return SatResult::Sat(m);
                    }
                    break;
                }
                Some(Formula::Atom(a)) => {
                    if a.is_constant() && !holds(&Rational::zero(), a.rel, &a.bound) {
                        break;
                    }
                    atoms.push(a.clone());
                    fresh = true;
                }
                Some(Formula::And(fs)) => work.extend(fs.iter().rev()),
                Some(Formula::Or(fs)) => {
                    if fresh && solve_conjunction(&atoms).is_none() {
                        break;
                    }
                    for g in fs.iter().rev() {
                        let mut w = work.clone();
                        w.push(g);
                        stack.push((atoms.clone(), w, false));
                    }
                    break;
                }
            }
        }
    }
    SatResult::Unsat
}

/// SMT-LIB 2 script for a conjunction.
pub fn to_smtlib(atoms: &[Atom]) -> String {
    let mut vars = BTreeSet::new();
    for a in atoms {
        vars.extend(a.coeffs.keys().cloned());
    }
    let mut s = String::from("(set-logic QF_LRA)\n");
    for v in &vars {
        s.push_str(&format!("(declare-fun |{}| () Real)\n", v.0));
    }
    let num = |r: &Rational| {
        let body = if r.is_integer() {
            format!("{}.0", r.numer().magnitude())
        } else {
            format!("(/ {}.0 {}.0)", r.numer().magnitude(), r.denom())
        };
        if r.is_negative() {
            format!("(- {body})")
        } else {
            body
        }
    };
    for a in atoms {
        let terms: Vec<String> = a.coeffs.iter().map(|(v, c)| format!("(* {} |{}|)", num(c), v.0)).collect();
        let lhs = match terms.len() {
            0 => "0.0".to_string(),
            1 => terms[0].clone(),
            _ => format!("(+ {})", terms.join(" ")),
        };
        let op = match a.rel {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
        };
        s.push_str(&format!("(assert ({op} {lhs} {}))\n", num(&a.bound)));
    }
    s.push_str("(check-sat)\n");
    s
}

/// Fourier-Motzkin elimination. Slow, simple, and independent of the simplex.
pub mod fourier_motzkin {
    use super::*;

    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
    struct Ineq {
        coeffs: BTreeMap<Var, Rational>,
        strict: bool,
        bound: Rational,
    }

    impl Ineq {
        fn normalized(mut self) -> Ineq {
            if let Some(c) = self.coeffs.values().next().cloned() {
                let k = c.abs().recip();
                for x in self.coeffs.values_mut() {
                    *x = &*x * &k;
                }
                self.bound = &self.bound * &k;
            }
            self
        }
    }

    fn substitute(coeffs: &mut BTreeMap<Var, Rational>, bound: &mut Rational, v: &Var, expr: &BTreeMap<Var, Rational>, k: &Rational) {
        // v = k - sum expr
        if let Some(c) = coeffs.remove(v) {
            *bound -= &(&c * k);
            for (w, d) in expr {
                let e = coeffs.entry(w.clone()).or_insert_with(Rational::zero);
                *e -= &(&c * d);
                if e.is_zero() {
                    coeffs.remove(w);
                }
            }
        }
    }

    pub fn is_sat_conjunction(atoms: &[Atom]) -> bool {
        let mut eqs: Vec<(BTreeMap<Var, Rational>, Rational)> = Vec::new();
        let mut ineqs: Vec<Ineq> = Vec::new();
        for a in atoms {
            match a.rel {
                Rel::Eq => eqs.push((a.coeffs.clone(), a.bound.clone())),
                r => ineqs.push(Ineq { coeffs: a.coeffs.clone(), strict: r == Rel::Lt, bound: a.bound.clone() }),
            }
        }
        while let Some((coeffs, bound)) = eqs.pop() {
            let Some((v, c)) = coeffs.iter().next().map(|(v, c)| (v.clone(), c.clone())) else {
                if !bound.is_zero() {
                    return false;
                }
                continue;
            };
            let inv = c.recip();
            let mut expr = BTreeMap::new();
            for (w, d) in &coeffs {
                if *w != v {
                    expr.insert(w.clone(), d * &inv);
                }
            }
            let k = &bound * &inv;
            for (cs, b) in eqs.iter_mut() {
                substitute(cs, b, &v, &expr, &k);
            }
            for q in ineqs.iter_mut() {
                substitute(&mut q.coeffs, &mut q.bound, &v, &expr, &k);
            }
        }
        eliminate(ineqs)
    }

    fn eliminate(mut ineqs: Vec<Ineq>) -> bool {
        loop {
            let mut set: BTreeMap<BTreeMap<Var, Rational>, (Rational, bool)> = BTreeMap::new();
            for q in ineqs.drain(..) {
                let q = q.normalized();
                if q.coeffs.is_empty() {
                    let ok = if q.strict { q.bound.is_positive() } else { !q.bound.is_negative() };
                    if !ok {
                        return false;
                    }
                    continue;
                }
                let e = set.entry(q.coeffs).or_insert((q.bound.clone(), q.strict));
                if q.bound < e.0 || (q.bound == e.0 && q.strict) {
                    *e = (q.bound, q.strict);
                }
            }
            ineqs = set.into_iter().map(|(coeffs, (bound, strict))| Ineq { coeffs, strict, bound }).collect();
            if ineqs.is_empty() {
                return true;
            }
            let mut counts: BTreeMap<&Var, (usize, usize)> = BTreeMap::new();
            for q in &ineqs {
                for (v, c) in &q.coeffs {
                    let e = counts.entry(v).or_insert((0, 0));
                    if c.is_positive() {
                        e.0 += 1;
                    } else {
                        e.1 += 1;
                    }
                }
            }
            let v = counts.iter().min_by_key(|(_, (p, n))| p * n).map(|(v, _)| (*v).clone()).unwrap();
            let (with, without): (Vec<Ineq>, Vec<Ineq>) = ineqs.into_iter().partition(|q| q.coeffs.contains_key(&v));
            let (pos, neg): (Vec<Ineq>, Vec<Ineq>) = with.into_iter().partition(|q| q.coeffs[&v].is_positive());
            let mut next = without;
            for p in &pos {
                for n in &neg {
                    let a = p.coeffs[&v].clone();
                    let b = -n.coeffs[&v].clone();
                    // b*p + a*n eliminates v
                    let mut coeffs = BTreeMap::new();
                    for (w, c) in &p.coeffs {
                        if *w != v {
                            coeffs.insert(w.clone(), c * &b);
                        }
                    }
                    for (w, c) in &n.coeffs {
                        if *w != v {
                            let e = coeffs.entry(w.clone()).or_insert_with(Rational::zero);
                            *e += &(c * &a);
                        }
                    }
                    coeffs.retain(|_, c| !c.is_zero());
                    next.push(Ineq { coeffs, strict: p.strict || n.strict, bound: &(&p.bound * &b) + &(&n.bound * &a) });
                }
            }
            ineqs = next;
        }
    }

    /// Full DNF expansion, each disjunct decided by elimination.
    pub fn is_sat(f: &Formula) -> bool {
        f.to_dnf_lazy().any(|c| is_sat_conjunction(&c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: &str) -> LinExpr {
        LinExpr::var(&Var::new(n))
    }

    fn k(p: i64, q: i64) -> LinExpr {
        LinExpr::constant(Rational::frac(p, q))
    }

    #[test]
    fn strict_chain_is_sat() {
        let f = Formula::and(vec![lt(&k(0, 1), &x("a")), lt(&x("a"), &x("b")), lt(&x("b"), &k(1, 1000))]);
        match is_sat(&f) {
            SatResult::Sat(m) => assert!(f.eval(&m)),
            r => panic!("{r:?}"),
        }
        assert!(fourier_motzkin::is_sat(&f));
    }

    #[test]
    fn strict_contradiction() {
        let f = Formula::and(vec![lt(&x("a"), &x("b")), lt(&x("b"), &x("a"))]);
        assert_eq!(is_sat(&f), SatResult::Unsat);
        assert!(!fourier_motzkin::is_sat(&f));
        let g = Formula::and(vec![le(&x("a"), &x("b")), le(&x("b"), &x("a")), lt(&x("a"), &k(0, 1)), ge(&x("b"), &k(0, 1))]);
        assert_eq!(is_sat(&g), SatResult::Unsat);
    }

    #[test]
    fn disjunction_picks_feasible_branch() {
        let f = Formula::and(vec![
            Formula::or(vec![eq(&x("a"), &k(5, 1)), eq(&x("a"), &k(1, 2))]),
            lt(&x("a"), &k(1, 1)),
        ]);
        match is_sat(&f) {
            SatResult::Sat(m) => assert_eq!(m.get(&Var::new("a")), Rational::frac(1, 2)),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn dnf_order() {
        let f = Formula::and(vec![
            Formula::or(vec![eq(&x("a"), &k(1, 1)), eq(&x("a"), &k(2, 1))]),
            Formula::or(vec![eq(&x("b"), &k(1, 1)), eq(&x("b"), &k(2, 1))]),
        ]);
        let ds: Vec<_> = f.to_dnf_lazy().collect();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds[0][0].bound, Rational::one());
        assert_eq!(ds[0][1].bound, Rational::one());
        assert_eq!(ds[1][1].bound, Rational::int(2));
    }

    #[test]
    fn empty_formulas() {
        assert!(is_sat(&Formula::tt()).is_sat());
        assert_eq!(is_sat(&Formula::ff()), SatResult::Unsat);
    }

    #[test]
    fn smtlib_shape() {
        let a = Atom::new(&x("a").scaled(&Rational::frac(-1, 2)), Rel::Lt, &k(3, 1));
        let s = to_smtlib(&[a]);
        assert!(s.contains("(assert (< (* (- (/ 1.0 2.0)) |a|) 3.0))"), "{s}");
    }

    #[test]
    fn node_limit_times_out() {
        let mut fs = Vec::new();
        for i in 0..12 {
            let v = format!("v{i}");
            fs.push(Formula::or(vec![eq(&x(&v), &k(1, 1)), eq(&x(&v), &k(2, 1))]));
        }
        fs.push(lt(&x("v0"), &k(0, 1)));
        let f = Formula::and(fs);
        let lim = Limits { max_nodes: Some(3), deadline: None };
        assert_eq!(is_sat_with(&f, &lim), SatResult::Timeout);
    }
}
