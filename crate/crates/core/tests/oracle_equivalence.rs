use fracreach::testkit::{check_oracle_instance, random_finite_instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(seed: u64, count: usize, stack: bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positives = 0;
    for _ in 0..count {
        let inst = random_finite_instance(&mut rng, stack, 6);
        positives += check_oracle_instance(&inst, 6).unwrap();
    }
    // both outcomes must be exercised
    assert!(positives > count / 4 && positives < 2 * count - count / 4, "{positives}");
}

#[test]
fn vass_instances_match_oracle() {
    run(11, 60, false);
}

#[test]
fn pvass_instances_match_oracle() {
    run(12, 60, true);
}
