use fracreach_reductions::checks::{check_amplifier, check_gadgets, check_pda_counters};
use fracreach_reductions::{ivass_amplifier, pda_counter};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn gadgets_sampled() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(check_gadgets(&mut rng, 100).unwrap() >= 800);
}

#[test]
fn counters_up_to_64() {
    let r = check_pda_counters(64).unwrap();
    assert_eq!(r.len(), 64);
}

#[test]
fn counter_examples() {
    let p = pda_counter(4).unwrap();
    assert_eq!(p.census(12).by_length.into_iter().collect::<Vec<_>>(), vec![(4, 1)]);
    let p = pda_counter(37).unwrap();
    assert_eq!(p.run().len(), 37);
    assert_eq!(p.census(80).total(), 1);
}

#[test]
fn amplifier_examples() {
    assert_eq!(check_amplifier(&[3, 5], 4).unwrap(), (32, 96));
    assert_eq!(check_amplifier(&[3], 4).unwrap(), (16, 48));
    check_amplifier(&[0], 1).unwrap();
    check_amplifier(&[2], 1).unwrap();
    check_amplifier(&[16, 0, 7], 4).unwrap();
    assert!(ivass_amplifier(&[BigInt::from(5)], 2).is_err());
}
