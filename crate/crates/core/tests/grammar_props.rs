use fracreach::creach::{admissibility_needs, coadmissibility_needs, SupportSequence};
use fracreach::grammar::{pvass_to_grammar, RawSym, Signature, Summary, TargetStack, VectorGrammar, VectorNfa};
use fracreach::machines::Config;
use fracreach::numerics::IntVector;
use fracreach::solver::rules_for_word;
use fracreach::testkit::{random_machine, rat_vector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// arbitrary grammar with ε- and unit productions over 1-dim letters
fn random_grammar(rng: &mut ChaCha8Rng) -> VectorGrammar {
    let n = rng.gen_range(1..=4);
    let mut raw = Vec::new();
    for _ in 0..rng.gen_range(1..=8) {
        let lhs = rng.gen_range(0..n);
        let len = rng.gen_range(0..=3);
        let rhs = (0..len)
            .map(|_| if rng.gen_bool(0.5) { RawSym::N(rng.gen_range(0..n)) } else { RawSym::T(IntVector::from_i64(&[rng.gen_range(-1..=1)])) })
            .collect();
        raw.push((lhs, rhs));
    }
    VectorGrammar::new(1, (0..n).map(|i| format!("A{i}")).collect(), 0, raw)
}

// words up to `len` by naive leftmost expansion
fn naive_words(g: &VectorGrammar, len: usize) -> std::collections::BTreeSet<Vec<IntVector>> {
    let mut out = std::collections::BTreeSet::new();
    let mut seen = std::collections::HashSet::new();
    let mut stack: Vec<Vec<RawSym>> = vec![vec![RawSym::N(g.start)]];
    while let Some(form) = stack.pop() {
        let terms = form.iter().filter(|s| matches!(s, RawSym::T(_))).count();
        if terms > len || form.len() > len + 6 || !seen.insert(form.clone()) {
            continue;
        }
        match form.iter().position(|s| matches!(s, RawSym::N(_))) {
            None => {
                out.insert(form.iter().map(|s| if let RawSym::T(v) = s { v.clone() } else { unreachable!() }).collect());
            }
            Some(i) => {
                let RawSym::N(a) = form[i] else { unreachable!() };
                for p in g.productions.iter().filter(|p| p.lhs == a) {
                    let mut f = form[..i].to_vec();
                    f.extend(p.rhs.iter().map(|s| match s {
                        fracreach::grammar::Sym::N(b) => RawSym::N(*b),
                        fracreach::grammar::Sym::T(t) => RawSym::T(g.alphabet[*t].clone()),
                    }));
                    f.extend_from_slice(&form[i + 1..]);
                    stack.push(f);
                }
            }
        }
    }
    out
}

fn lift(g: &VectorGrammar, ws: Vec<Vec<usize>>) -> std::collections::BTreeSet<Vec<IntVector>> {
    ws.into_iter().map(|w| w.into_iter().map(|t| g.alphabet[t].clone()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn cnf_preserves_short_words(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_grammar(&mut rng);
        let c = g.to_cnf();
        prop_assert!(c.is_cnf());
        let direct = naive_words(&g, 4);
        prop_assert_eq!(lift(&g, g.enumerate_words(4)), direct.clone());
        let via_cnf: std::collections::BTreeSet<Vec<IntVector>> =
            lift(&c, c.enumerate_words(4));
        prop_assert_eq!(via_cnf, direct);
        for w in g.enumerate_words(4) {
            prop_assert!(g.accepts(&w));
        }
    }

    #[test]
    fn summary_matches_needs(word in proptest::collection::vec(0usize..4, 0..8)) {
        let alphabet: Vec<IntVector> = vec![
            IntVector::from_i64(&[1, -1]),
            IntVector::from_i64(&[-1, 0]),
            IntVector::from_i64(&[0, 1]),
            IntVector::from_i64(&[-1, 2]),
        ];
        let letters: Vec<IntVector> = word.iter().map(|t| alphabet[*t].clone()).collect();
        let s = Summary::of_word(&alphabet, &word);
        let sup = SupportSequence::of_word(&letters);
        prop_assert_eq!(s.needs_start.into_iter().collect::<Vec<_>>(), admissibility_needs(&sup.first));
        prop_assert_eq!(s.needs_end.into_iter().collect::<Vec<_>>(), coadmissibility_needs(&sup.last));
        let mid = word.len() / 2;
        let sig = Signature::of_word(&word, true);
        prop_assert_eq!(sig.clone(), Signature::of_word(&word[..mid], true).concat(&Signature::of_word(&word[mid..], true)));
        prop_assert_eq!(sig.first.len(), s.letters.len());
        let first: Vec<IntVector> = sig.first.iter().map(|t| alphabet[*t].clone()).collect();
        prop_assert!(VectorNfa::first_order(2, &first).accepts(&letters));
        let last: Vec<IntVector> = sig.last.iter().map(|t| alphabet[*t].clone()).collect();
        prop_assert!(VectorNfa::last_order(2, &last).accepts(&letters));
    }

    #[test]
    fn run_words_have_rule_sequences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_machine(&mut rng, true, false);
        let c0 = Config::new(0, rat_vector(&mut rng, m.dim, 1, 2));
        let q = rng.gen_range(0..m.states.len());
        let g = pvass_to_grammar(&m, &c0, q, &TargetStack::Exactly(vec![]));
        for w in g.enumerate_words(5) {
            let letters: Vec<IntVector> = w.iter().map(|t| g.alphabet[*t].clone()).collect();
            prop_assert!(rules_for_word(&m, &c0, &letters, q, &TargetStack::Exactly(vec![])).is_some());
        }
    }
}

#[test]
fn signature_restriction_matches_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..40 {
        let g = random_grammar(&mut rng);
        let Ok(sigs) = g.realizable_signatures(true, 10_000) else { continue };
        let words = g.enumerate_words(5);
        for (sig, w) in &sigs {
            assert!(g.accepts(w));
            assert_eq!(Signature::of_word(w, true), *sig);
        }
        for w in &words {
            assert!(sigs.contains_key(&Signature::of_word(w, true)));
        }
        if let Some((sig, _)) = sigs.iter().find(|(s, _)| !s.first.is_empty()) {
            let first: Vec<IntVector> = sig.first.iter().map(|t| g.alphabet[*t].clone()).collect();
            let r = g.restrict_support(&first, None).unwrap();
            let kept = lift(&r, r.enumerate_words(5));
            let expected: std::collections::BTreeSet<Vec<IntVector>> = lift(&g, words.clone())
                .into_iter()
                .filter(|w| SupportSequence::of_word(w).first == first)
                .collect();
            assert_eq!(kept, expected);
        }
    }
}
