use fracreach::testkit::{balanced_grammar, check_pump_samples, random_recursive_grammar, PumpTally};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn balanced_grammar_pumps() {
    let (g, a) = balanced_grammar();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut t = PumpTally::default();
    check_pump_samples(&mut rng, &g, a, 8, 100, &mut t).unwrap();
    assert!(t.brute_sat > 0 && t.brute_unsat > 0, "{t:?}");
}

#[test]
fn random_grammar_pumps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut t = PumpTally::default();
    for _ in 0..20 {
        let d = rng.gen_range(1..=2);
        let (g, a) = random_recursive_grammar(&mut rng, 3, d);
        check_pump_samples(&mut rng, &g, a, 6, 10, &mut t).unwrap();
    }
    assert!(t.brute_sat > 0 && t.brute_unsat > 0, "{t:?}");
}
