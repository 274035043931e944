use fracreach::testkit::{check_synthesis, random_semigroup_instance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn connected_instances_synthesize(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (spec, u, v) = random_semigroup_instance(&mut rng);
        let r = check_synthesis(&spec, &u, &v);
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}
