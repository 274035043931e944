//! Bounded reference decider: enumerate run words up to a length and
//! decide each word with its own linear program. Sound for positive
//! answers only.

use crate::grammar::{pvass_to_grammar, TargetStack};
use crate::lra::fourier_motzkin::is_sat_conjunction;
use crate::lra::{Atom, LinExpr, Rel, Var};
use crate::machines::{Config, Qpvass};
use crate::numerics::{IntVector, RatVector, Rational};
use crate::solver::Mode;

/// Whether `word` can be fired from u to v (or to something covering v),
/// decided by Fourier-Motzkin on the fraction variables.
pub fn word_feasible(word: &[IntVector], u: &RatVector, v: &RatVector, mode: Mode) -> bool {
    let d = u.dim();
    let mut atoms = Vec::new();
    let mut cur: Vec<LinExpr> = u.0.iter().map(|x| LinExpr::constant(x.clone())).collect();
    let zero = LinExpr::zero();
    for (i, a) in word.iter().enumerate() {
        let x = Var::new(format!("f{i}"));
        atoms.push(Atom::new(&zero, Rel::Lt, &LinExpr::var(&x)));
        atoms.push(Atom::new(&LinExpr::var(&x), Rel::Le, &LinExpr::constant(Rational::one())));
        for c in 0..d {
            cur[c].add_term(&x, &Rational::int(a.get(c).clone()));
            atoms.push(Atom::new(&zero, Rel::Le, &cur[c]));
        }
    }
    for c in 0..d {
        let k = LinExpr::constant(v.0[c].clone());
        atoms.push(match mode {
            Mode::Reach => Atom::new(&cur[c], Rel::Eq, &k),
            Mode::Cover => Atom::new(&k, Rel::Le, &cur[c]),
        });
    }
    is_sat_conjunction(&atoms)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleResult {
    /// A word of the run language that admits a run.
    Found(Vec<IntVector>),
    NoneUpTo(usize),
}

pub fn bounded_decide(m: &Qpvass, c0: &Config, c1: &Config, mode: Mode, max_len: usize) -> OracleResult {
    let g = pvass_to_grammar(m, c0, c1.state, &TargetStack::Exactly(c1.stack.clone()));
    for w in g.enumerate_words(max_len) {
        let word: Vec<IntVector> = w.iter().map(|t| g.alphabet[*t].clone()).collect();
        if word_feasible(&word, &c0.values, &c1.values, mode) {
            return OracleResult::Found(word);
        }
    }
    OracleResult::NoneUpTo(max_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::examples::*;

    #[test]
    fn figure_word_found() {
        let m = pvass_two_counter();
        let c0 = Config::new(0, rat(&[(11, 10), (3, 5)]));
        let c1 = Config::with_stack(1, vec![0], rat(&[(1, 1), (1, 1)]));
        assert!(matches!(bounded_decide(&m, &c0, &c1, Mode::Reach, 3), OracleResult::Found(_)));
        assert_eq!(bounded_decide(&m, &c0, &c1, Mode::Reach, 2), OracleResult::NoneUpTo(2));
    }

    #[test]
    fn single_letter() {
        let w = vec![IntVector::from_i64(&[-1])];
        assert!(word_feasible(&w, &rat(&[(1, 2)]), &rat(&[(0, 1)]), Mode::Reach));
        assert!(!word_feasible(&w, &rat(&[(1, 2)]), &rat(&[(1, 2)]), Mode::Reach));
        assert!(word_feasible(&w, &rat(&[(2, 1)]), &rat(&[(3, 2)]), Mode::Cover));
    }
}
