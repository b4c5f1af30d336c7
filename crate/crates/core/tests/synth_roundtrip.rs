use gausseer_core::synth::generate_log;
use gausseer_core::{parse_document, Taxonomy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parser_recovers_planted_fields(seed in any::<u64>()) {
        let tax = Taxonomy::default_config();
        let log = generate_log(&mut ChaCha8Rng::seed_from_u64(seed), &tax);
        let r = parse_document(&log.text, "synthetic.log", &tax).unwrap();
        let p = &log.planted;
        prop_assert_eq!(&r.elements, &p.elements);
        prop_assert_eq!(&r.methods, &p.methods);
        prop_assert_eq!(&r.basis_sets, &p.basis_sets);
        prop_assert_eq!(&r.job_types, &p.job_types);
        prop_assert_eq!(r.charge, Some(p.charge));
        prop_assert_eq!(r.multiplicity, Some(p.multiplicity));
        prop_assert_eq!(r.energy, p.energy);
        prop_assert_eq!(r.degrees_of_freedom, p.degrees_of_freedom);
        prop_assert_eq!(&r.flags, &p.flags);
        prop_assert_eq!(&r.title, &p.title);
    }

    #[test]
    fn parse_is_pure(seed in any::<u64>()) {
        let tax = Taxonomy::default_config();
        let log = generate_log(&mut ChaCha8Rng::seed_from_u64(seed), &tax);
        prop_assert_eq!(
            parse_document(&log.text, "a.log", &tax),
            parse_document(&log.text, "a.log", &tax)
        );
    }
}
