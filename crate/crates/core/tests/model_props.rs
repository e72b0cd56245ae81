use std::sync::Arc;

use nlmp_core::bisim::is_event_bisim;
use nlmp_core::enumerate::sub_sigma_algebras;
use nlmp_core::random::{self, ModelConfig};
use nlmp_core::{BoundSpec, Measure, MeasurePool, Nlmp, SigmaAlgebra, StateSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A model whose rows are drawn per state, so coarse σ-algebras usually
/// make it invalid.
fn unconstrained(rng: &mut ChaCha8Rng, n: usize, dirac_only: bool) -> Nlmp {
    let coarse = rng.gen_bool(0.7);
    let sigma = Arc::new(random::sigma(rng, random::universe(n), coarse));
    let palette: Vec<Measure> = (0..3)
        .map(|_| random::measure(rng, &sigma, dirac_only))
        .collect();
    let k = rng.gen_range(1..=2);
    let mut b = Nlmp::builder(Arc::clone(&sigma), random::labels(k)).unwrap();
    for a in 0..k {
        for s in 0..n {
            for _ in 0..rng.gen_range(0..=2) {
                b.add(s, a, palette.choose(rng).unwrap().clone()).unwrap();
            }
        }
    }
    b.build()
}

fn measurable_sets(lambda: &SigmaAlgebra) -> Vec<StateSet> {
    (0u32..1 << lambda.num_atoms())
        .map(|mask| lambda.union_of_atoms((0..lambda.num_atoms()).filter(|a| mask >> a & 1 == 1)))
        .collect()
}

#[test]
fn generated_models_are_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let m = random::nlmp(&mut rng, &ModelConfig::default());
        assert!(m.validate().is_valid(), "{}", m.validate());
    }
}

#[test]
fn invalid_models_come_with_a_preimage_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut invalid = 0;
    for _ in 0..500 {
        let n = rng.gen_range(2..=5);
        let m = unconstrained(&mut rng, n, false);
        let report = m.validate();
        let rows_constant = (0..m.num_labels()).all(|a| {
            (0..n).all(|s| {
                let rep = m.sigma().atoms().block(m.sigma().atom_of(s))[0];
                m.row(a, s) == m.row(a, rep)
            })
        });
        assert_eq!(report.is_valid(), rows_constant);
        if let Some(w) = report.preimage_witness() {
            invalid += 1;
            let xi = StateSet::from_indices(m.pool().len(), w.xi.iter().copied());
            assert_eq!(m.hit_preimage(w.label, &xi).unwrap(), w.preimage);
            assert!(!m.sigma().is_measurable(&w.preimage).unwrap());
        }
    }
    assert!(invalid > 50);
}

#[test]
fn hit_preimages_commute_with_union() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..300 {
        let m = random::nlmp(&mut rng, &ModelConfig::default());
        let p = m.pool().len();
        let x1 = StateSet::from_indices(p, (0..p).filter(|_| rng.gen_bool(0.5)));
        let x2 = StateSet::from_indices(p, (0..p).filter(|_| rng.gen_bool(0.5)));
        for a in 0..m.num_labels() {
            let whole = m.hit_preimage(a, &x1.union(&x2)).unwrap();
            let parts = m
                .hit_preimage(a, &x1)
                .unwrap()
                .union(&m.hit_preimage(a, &x2).unwrap());
            assert_eq!(whole, parts);
        }
    }
}

/// For Dirac-only models, stability of `Λ` is the same as `Λ` being closed
/// under every `⟨a⟩·`.
#[test]
fn dirac_stability_is_diamond_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = ModelConfig {
        max_states: 4,
        max_labels: 2,
        dirac_only: true,
        ..ModelConfig::default()
    };
    for _ in 0..300 {
        let m = random::nlmp(&mut rng, &cfg);
        assert!(m.is_non_probabilistic());
        for lambda in sub_sigma_algebras(m.sigma()) {
            let stable = is_event_bisim(&m, &lambda).unwrap().accepted();
            let closed = measurable_sets(&lambda).iter().all(|q| {
                (0..m.num_labels())
                    .all(|a| lambda.is_measurable(&m.diamond(a, q).unwrap()).unwrap())
            });
            assert_eq!(stable, closed);
        }
    }
}

#[test]
fn diracs_on_the_powerset_are_separated() {
    for n in 1..=5 {
        let u = random::universe(n);
        let sigma = Arc::new(SigmaAlgebra::powerset(u));
        let pool = MeasurePool::from_measures(
            Arc::clone(&sigma),
            (0..n).map(|s| Measure::dirac(Arc::clone(&sigma), s).unwrap()),
        )
        .unwrap();
        assert_eq!(pool.len(), n);
        let classes = pool.trace_classes(&sigma).unwrap();
        assert_eq!(classes.len(), n);
        for q in measurable_sets(&sigma) {
            assert_eq!(
                pool.delta_trace(&q, &BoundSpec::AtLeast(nlmp_core::rational::one()))
                    .unwrap(),
                q
            );
        }
    }
}

#[test]
fn embedding_preserves_validation_verdicts() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut valid, mut invalid) = (0, 0);
    for _ in 0..400 {
        let l = random::lmp(&mut rng, 4, 2, 0.6);
        let direct = l.validate().is_valid();
        assert_eq!(direct, l.embed().validate().is_valid());
        if direct {
            valid += 1;
        } else {
            invalid += 1;
        }
        let m = l.embed();
        for a in 0..m.num_labels() {
            for s in 0..m.num_states() {
                assert_eq!(
                    m.transitions(a, s).collect::<Vec<_>>(),
                    l.kernel(a, s).into_iter().collect::<Vec<_>>()
                );
            }
        }
    }
    assert!(valid > 50 && invalid > 10, "{valid} {invalid}");
}

#[test]
fn diamond_rejects_unmeasurable_sets_and_probabilistic_models() {
    let m =
        nlmp_core::text::parse_model("states s t x\nlabels a\nsigma gen {s t}\ntrans x a -> s\n")
            .unwrap()
            .nlmp();
    assert!(m.diamond(0, &StateSet::from_indices(3, [0])).is_err());
    assert_eq!(
        m.diamond(0, &StateSet::from_indices(3, [0, 1])).unwrap(),
        StateSet::from_indices(3, [2])
    );
    let p = nlmp_core::text::parse_model("states s t\nlabels a\ntrans s a s:1/2 t:1/2\n")
        .unwrap()
        .nlmp();
    assert!(p.diamond(0, &StateSet::full(2)).is_err());
}
