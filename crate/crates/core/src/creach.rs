//! Continuous reachability inside letter-uniform semigroup languages.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::grammar::{Signature, VectorGrammar};
use crate::lra::{eq, ge, gt, is_sat, Formula, LinExpr, SatResult, Var};
use crate::machines::{check_run, Config, Firing, FiringSequence, Qvass, VassRule};
use crate::numerics::{vec_affine, IntVector, RatVector, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CreachError {
    #[error("support lists disagree")]
    BadSupport,
    #[error("target is not reachable")]
    NotReachable,
    #[error("witness word does not have the declared support")]
    BadWitness,
    #[error("solver gave up")]
    Timeout,
    #[error("internal: {0}")]
    Internal(String),
}

/// Letters in first-occurrence order and in last-occurrence order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SupportSequence {
    pub first: Vec<IntVector>,
    pub last: Vec<IntVector>,
}

impl SupportSequence {
    pub fn new(first: Vec<IntVector>, last: Vec<IntVector>) -> Result<Self, CreachError> {
        let mut a = first.clone();
        let mut b = last.clone();
        a.sort();
        b.sort();
        let n = a.len();
        a.dedup();
        if a != b || a.len() != n {
            return Err(CreachError::BadSupport);
        }
        Ok(SupportSequence { first, last })
    }

    pub fn of_word(w: &[IntVector]) -> Self {
        let mut first: Vec<IntVector> = Vec::new();
        for a in w {
            if !first.contains(a) {
                first.push(a.clone());
            }
        }
        let mut last: Vec<IntVector> = Vec::new();
        for a in w.iter().rev() {
            if !last.contains(a) {
                last.push(a.clone());
            }
        }
        last.reverse();
        SupportSequence { first, last }
    }

    pub fn from_signature(g: &VectorGrammar, s: &Signature) -> Self {
        SupportSequence {
            first: s.first.iter().map(|t| g.alphabet[*t].clone()).collect(),
            last: s.last.iter().map(|t| g.alphabet[*t].clone()).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }
}

/// A semigroup language with a fixed support and one word of it.
#[derive(Clone, Debug)]
pub struct SemigroupSpec {
    pub grammar: VectorGrammar,
    pub support: SupportSequence,
    pub witness: Vec<IntVector>,
}

pub fn vars(prefix: &str, d: usize) -> Vec<Var> {
    (0..d).map(|i| Var::new(format!("{prefix}.{i}"))).collect()
}

pub fn var_exprs(vs: &[Var]) -> Vec<LinExpr> {
    vs.iter().map(LinExpr::var).collect()
}

pub fn const_exprs(v: &RatVector) -> Vec<LinExpr> {
    v.0.iter().map(|x| LinExpr::constant(x.clone())).collect()
}

fn int(x: &BigInt) -> Rational {
    Rational::int(x.clone())
}

/// exists c > 0 per letter with u + sum c_a a = v.
pub fn q_reach_formula(letters: &[IntVector], u: &[LinExpr], v: &[LinExpr], scope: &str) -> Formula {
    let cs: Vec<Var> = (0..letters.len()).map(|j| Var::new(format!("{scope}.c{j}"))).collect();
    let mut parts: Vec<Formula> = cs.iter().map(|c| gt(&LinExpr::var(c), &LinExpr::zero())).collect();
    for i in 0..u.len() {
        let mut lhs = u[i].clone();
        for (j, a) in letters.iter().enumerate() {
            if !a.get(i).is_zero() {
                lhs.add_term(&cs[j], &int(a.get(i)));
            }
        }
        parts.push(eq(&lhs, &v[i]));
    }
    Formula::and(parts)
}

/// Coordinates that must be positive at the start for a word with this
/// first-occurrence order to be fireable.
pub fn admissibility_needs(first: &[IntVector]) -> Vec<usize> {
    let mut out = Vec::new();
    for (j, g) in first.iter().enumerate() {
        for i in g.neg_support() {
            let fed = first[..j].iter().any(|e| e.get(i).is_positive());
            if !fed && !out.contains(&i) {
                out.push(i);
            }
        }
    }
    out.sort();
    out
}

/// Coordinates that must be positive at the end, given last occurrences.
pub fn coadmissibility_needs(last: &[IntVector]) -> Vec<usize> {
    let mut out = Vec::new();
    for (j, g) in last.iter().enumerate() {
        for i in g.pos_support() {
            let drained = last[j + 1..].iter().any(|e| e.get(i).is_negative());
            if !drained && !out.contains(&i) {
                out.push(i);
            }
        }
    }
    out.sort();
    out
}

pub fn admissibility_formula(first: &[IntVector], u: &[LinExpr]) -> Formula {
    Formula::and(admissibility_needs(first).into_iter().map(|i| gt(&u[i], &LinExpr::zero())).collect())
}

pub fn coadmissibility_formula(last: &[IntVector], v: &[LinExpr]) -> Formula {
    Formula::and(coadmissibility_needs(last).into_iter().map(|i| gt(&v[i], &LinExpr::zero())).collect())
}

pub fn admissible(first: &[IntVector], u: &RatVector) -> bool {
    admissibility_needs(first).into_iter().all(|i| u.0[i].is_positive())
}

pub fn nonneg(u: &[LinExpr]) -> Formula {
    Formula::and(u.iter().map(|x| ge(x, &LinExpr::zero())).collect())
}

/// Continuous reachability from u to v within a semigroup language with
/// this support.
pub fn semigroup_reach_formula(support: &SupportSequence, u: &[LinExpr], v: &[LinExpr], scope: &str) -> Formula {
    Formula::and(vec![
        q_reach_formula(&support.first, u, v, scope),
        admissibility_formula(&support.first, u),
        coadmissibility_formula(&support.last, v),
        nonneg(u),
        nonneg(v),
    ])
}

/// A run over a list of letters: (fraction, letter index) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterRun {
    pub letters: Vec<IntVector>,
    pub steps: FiringSequence,
}

impl LetterRun {
    /// Single-state machine with one rule per letter.
    pub fn machine(&self) -> Qvass {
        letter_machine(&self.letters)
    }

    pub fn word(&self) -> Vec<IntVector> {
        self.steps.iter().map(|f| self.letters[f.rule].clone()).collect()
    }
}

pub fn letter_machine(letters: &[IntVector]) -> Qvass {
    let dim = letters.first().map_or(0, |a| a.dim());
    Qvass {
        states: vec!["q".into()],
        dim,
        rules: letters.iter().map(|a| VassRule { from: 0, to: 0, update: a.clone() }).collect(),
    }
}

// fire w from u keeping every touched coordinate positive
fn halving_run(w: &[IntVector], u: &RatVector) -> Result<(Vec<Rational>, RatVector), CreachError> {
    let mut cur = u.clone();
    let mut fr = Vec::with_capacity(w.len());
    for a in w {
        let mut alpha = Rational::one();
        for j in a.neg_support() {
            if !cur.0[j].is_positive() {
                return Err(CreachError::NotReachable);
            }
            let cap = &cur.0[j] / &Rational::int(a.get(j).abs() * 2);
            alpha = alpha.min(cap);
        }
        cur = vec_affine(&cur, &alpha, a).map_err(|e| CreachError::Internal(e.to_string()))?;
        fr.push(alpha);
    }
    Ok((fr, cur))
}

/// Builds a run from u to v inside the language of `spec`, or reports
/// that none exists. The run is replayed before it is returned.
pub fn synthesize_run(spec: &SemigroupSpec, u: &RatVector, v: &RatVector) -> Result<LetterRun, CreachError> {
    let letters = spec.support.first.clone();
    let machine = letter_machine(&letters);
    if letters.is_empty() {
        return if u == v { Ok(LetterRun { letters, steps: vec![] }) } else { Err(CreachError::NotReachable) };
    }
    if SupportSequence::of_word(&spec.witness) != spec.support {
        return Err(CreachError::BadWitness);
    }
    let f = semigroup_reach_formula(&spec.support, &const_exprs(u), &const_exprs(v), "syn");
    let model = match is_sat(&f) {
        SatResult::Sat(m) => m,
        SatResult::Unsat => return Err(CreachError::NotReachable),
        SatResult::Timeout => return Err(CreachError::Timeout),
    };
    let c: Vec<Rational> = (0..letters.len()).map(|j| model.get(&Var::new(format!("syn.c{j}")))).collect();
    let w = &spec.witness;
    let idx: Vec<usize> = w.iter().map(|a| letters.iter().position(|b| b == a).unwrap()).collect();

    let (alpha, x) = halving_run(w, u)?;
    let back: Vec<IntVector> = w.iter().rev().map(|a| a.neg()).collect();
    let (beta_rev, y) = halving_run(&back, v)?;
    let beta: Vec<Rational> = beta_rev.into_iter().rev().collect();

    let k = letters.len();
    let mut used = vec![Rational::zero(); k];
    let mut occ = vec![0i64; k];
    for (p, &j) in idx.iter().enumerate() {
        used[j] += &(&alpha[p] + &beta[p]);
        occ[j] += 1;
    }
    let mut lambda = Rational::one();
    for j in 0..k {
        lambda = lambda.min(&c[j] / &(&used[j] * &Rational::int(2)));
    }
    let one_minus = &Rational::one() - &lambda;
    let c2: Vec<Rational> = (0..k).map(|j| &c[j] - &(&lambda * &used[j])).collect();
    let x2 = u.scale(&one_minus).add(&x.scale(&lambda)).unwrap();
    let y2 = v.scale(&one_minus).add(&y.scale(&lambda)).unwrap();

    // middle: w^reps with per-letter fractions c2_a / (reps * occ_a)
    let mut reps = BigInt::from(1);
    for j in 0..k {
        let need = (&c2[j] / &Rational::int(occ[j])).ceil();
        if need > reps {
            reps = need;
        }
    }
    let reps_r = Rational::int(reps.clone());
    let gamma: Vec<Rational> = (0..k).map(|j| &c2[j] / &(&reps_r * &Rational::int(occ[j]))).collect();
    let reps_n: usize = reps.try_into().map_err(|_| CreachError::Internal("repetition count too large".into()))?;

    // split the middle into enough equal slices to stay nonnegative
    let d = u.dim();
    let mut mu: Option<Rational> = None;
    let mut swing = vec![Rational::zero(); d];
    for a in &letters {
        for i in 0..d {
            if !a.get(i).is_zero() {
                let m = x2.0[i].clone().min(y2.0[i].clone());
                mu = Some(mu.map_or(m.clone(), |z: Rational| z.min(m)));
            }
        }
    }
    for (p, &j) in idx.iter().enumerate() {
        let _ = p;
        for i in 0..d {
            swing[i] += &(&(&gamma[j] * &reps_r) * &Rational::int(letters[j].get(i).abs()));
        }
    }
    let mu = mu.unwrap_or_else(Rational::one);
    if !mu.is_positive() {
        return Err(CreachError::Internal("endpoint not positive on the support".into()));
    }
    let mut slices = swing.iter().map(|s| (s / &mu).ceil()).max().unwrap_or_default() + 1;
    if slices < BigInt::from(2) {
        slices = BigInt::from(2);
    }
    let head: FiringSequence = idx.iter().zip(&alpha).map(|(&j, a)| Firing::new(&lambda * a, j)).collect();
    let tail: FiringSequence = idx.iter().zip(&beta).map(|(&j, b)| Firing::new(&lambda * b, j)).collect();
    for _ in 0..8 {
        let n: usize = slices.clone().try_into().map_err(|_| CreachError::Internal("slice count too large".into()))?;
        let sl = Rational::int(slices.clone());
        let mut steps = head.clone();
        for _ in 0..n * reps_n {
            for &j in &idx {
                steps.push(Firing::new(&gamma[j] / &sl, j));
            }
        }
        steps.extend(tail.iter().cloned());
        let c0 = Config::new(0, u.clone());
        match check_run(&machine, &c0, &steps) {
            Ok(end) if end.values == *v => return Ok(LetterRun { letters, steps }),
            Ok(end) => return Err(CreachError::Internal(format!("run ends at {} instead of {}", end.values, v))),
            Err(_) => slices *= 2,
        }
    }
    Err(CreachError::Internal("could not slice the middle run".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::RawSym;

    fn iv(x: &[i64]) -> IntVector {
        IntVector::from_i64(x)
    }

    fn rv(x: &[(i64, i64)]) -> RatVector {
        RatVector(x.iter().map(|&(p, q)| Rational::frac(p, q)).collect())
    }

    // S -> S S | a | b, so every nonempty word over {a, b}
    fn free_semigroup(a: IntVector, b: IntVector) -> VectorGrammar {
        VectorGrammar::new(
            a.dim(),
            vec!["S".into()],
            0,
            vec![(0, vec![RawSym::N(0), RawSym::N(0)]), (0, vec![RawSym::T(a)]), (0, vec![RawSym::T(b)])],
        )
    }

    #[test]
    fn admissibility_blocks_empty_start() {
        let first = vec![iv(&[-1, 1])];
        assert!(!admissible(&first, &rv(&[(0, 1), (1, 1)])));
        assert!(admissible(&first, &rv(&[(1, 100), (0, 1)])));
        let fed = vec![iv(&[1, 0]), iv(&[-1, 0])];
        assert!(admissible(&fed, &rv(&[(0, 1), (0, 1)])));
        assert_eq!(coadmissibility_needs(&[iv(&[1, 0]), iv(&[-1, 0])]), Vec::<usize>::new());
        assert_eq!(coadmissibility_needs(&[iv(&[-1, 0]), iv(&[1, 0])]), vec![0]);
    }

    #[test]
    fn synthesizes_transfer() {
        let a = iv(&[-1, 1]);
        let b = iv(&[1, -1]);
        let g = free_semigroup(a.clone(), b.clone());
        let spec = SemigroupSpec {
            grammar: g,
            support: SupportSequence::new(vec![a.clone(), b.clone()], vec![a.clone(), b.clone()]).unwrap(),
            witness: vec![a.clone(), b.clone()],
        };
        let u = rv(&[(1, 1), (0, 1)]);
        let v = rv(&[(1, 4), (3, 4)]);
        let run = synthesize_run(&spec, &u, &v).unwrap();
        let end = check_run(&run.machine(), &Config::new(0, u.clone()), &run.steps).unwrap();
        assert_eq!(end.values, v);
        // b fires last and feeds the first coordinate
        assert!(matches!(synthesize_run(&spec, &u, &rv(&[(0, 1), (1, 1)])), Err(CreachError::NotReachable)));
        assert!(synthesize_run(&spec, &u, &u).is_ok());
    }

    #[test]
    fn empty_support() {
        let spec = SemigroupSpec {
            grammar: free_semigroup(iv(&[1]), iv(&[2])),
            support: SupportSequence::new(vec![], vec![]).unwrap(),
            witness: vec![],
        };
        assert!(synthesize_run(&spec, &rv(&[(1, 2)]), &rv(&[(1, 2)])).unwrap().steps.is_empty());
        assert!(synthesize_run(&spec, &rv(&[(1, 2)]), &rv(&[(1, 3)])).is_err());
    }
}
