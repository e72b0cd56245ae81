use nlmp_core::bisim::smallest_stable_sigma;
use nlmp_core::logic::*;
use nlmp_core::random::{self, ModelConfig};
use nlmp_core::text::{parse_formula, parse_measure_formula};
use nlmp_core::{Error, Nlmp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn models(seed: u64, count: usize) -> Vec<Nlmp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random::nlmp(&mut rng, &ModelConfig::default()))
        .collect()
}

#[test]
fn bisimilar_states_satisfy_the_same_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for m in models(40, 300) {
        let event = smallest_stable_sigma(&m).unwrap();
        for _ in 0..10 {
            let depth = rng.gen_range(0..=4);
            let phi = random::state_formula(&mut rng, m.labels(), depth);
            let den = eval_state(&m, &phi).unwrap();
            assert!(m.sigma().is_measurable(&den).unwrap());
            assert!(event.partition.saturates(&den), "{phi}");
        }
    }
}

#[test]
fn measure_denotations_are_unions_of_profile_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for m in models(43, 300) {
        let classes = m.pool().trace_classes(m.sigma()).unwrap();
        for _ in 0..5 {
            let depth = rng.gen_range(0..=3);
            let psi = random::measure_formula(&mut rng, m.labels(), depth);
            assert!(classes.saturates(&eval_measure(&m, &psi).unwrap()));
        }
    }
}

#[test]
fn derived_operators_match_their_expansions() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for m in models(45, 300) {
        for _ in 0..5 {
            let depth = rng.gen_range(1..=3);
            let phi = random::state_formula(&mut rng, m.labels(), depth);
            let den = eval_state(&m, &phi).unwrap();
            assert_eq!(eval_state(&m, &phi.expand_multi()).unwrap(), den, "{phi}");
            assert_eq!(
                eval_state(&m, &expand_state_bounds(&m, &phi).unwrap()).unwrap(),
                den,
                "{phi}"
            );
            let psi = random::measure_formula(&mut rng, m.labels(), 2);
            assert_eq!(
                eval_measure(&m, &expand_bounds(&m, &psi).unwrap()).unwrap(),
                eval_measure(&m, &psi).unwrap(),
                "{psi}"
            );
        }
    }
}

#[test]
fn printed_formulas_parse_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let labels = random::labels(3);
    for _ in 0..1000 {
        let depth = rng.gen_range(0..=4);
        let phi = random::state_formula(&mut rng, &labels, depth);
        let text = phi.to_string();
        let back = parse_formula(&text).unwrap();
        assert_eq!(back.to_string(), text);
        let psi = random::measure_formula(&mut rng, &labels, 2);
        assert_eq!(
            parse_measure_formula(&psi.to_string()).unwrap().to_string(),
            psi.to_string()
        );
    }
}

#[test]
fn distinguishing_formulas_separate_exactly_the_inequivalent_pairs() {
    for m in models(47, 400) {
        let n = m.num_states();
        let lf = logical_equivalence(&m, Fragment::Lf).unwrap();
        for (s, t, phi) in &lf.distinguishing {
            assert!(phi.is_finitary());
            assert_ne!(
                satisfies(&m, *s, phi).unwrap(),
                satisfies(&m, *t, phi).unwrap()
            );
        }
        let inequivalent = (0..n)
            .flat_map(|s| (s + 1..n).map(move |t| (s, t)))
            .filter(|&(s, t)| !lf.partition.same_block(s, t))
            .count();
        assert_eq!(lf.distinguishing.len(), inequivalent);
        if !m.sigma().is_powerset() {
            assert!(matches!(distinguish(&m, 0, 0), Err(Error::Unsupported(_))));
            continue;
        }
        for s in 0..n {
            for t in 0..n {
                match distinguish(&m, s, t).unwrap() {
                    Distinction::Equivalent => assert!(lf.partition.same_block(s, t)),
                    Distinction::Formula(phi) => {
                        assert!(!lf.partition.same_block(s, t));
                        assert_ne!(
                            satisfies(&m, s, &phi).unwrap(),
                            satisfies(&m, t, &phi).unwrap()
                        );
                        assert!(phi.depth() <= n);
                    }
                }
            }
        }
    }
}

#[test]
fn evaluation_rejects_unknown_labels_and_invalid_models() {
    let m = nlmp_core::text::parse_model("states s\nlabels a\n")
        .unwrap()
        .nlmp();
    assert!(eval_state(&m, &parse_formula("<b>[ >0 T ]").unwrap()).is_err());
    assert!(satisfies(&m, 3, &StateFormula::Top).is_err());
    let bad =
        nlmp_core::text::parse_model("states s t x\nlabels a\nsigma gen {s t}\ntrans s a -> x\n")
            .unwrap()
            .nlmp();
    assert!(matches!(
        eval_state(&bad, &StateFormula::Top),
        Err(Error::Precondition(_))
    ));
}
