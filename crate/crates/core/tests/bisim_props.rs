use nlmp_core::bisim::*;
use nlmp_core::enumerate::set_partitions;
use nlmp_core::logic::{logical_equivalence, Fragment};
use nlmp_core::random::{self, ModelConfig};
use nlmp_core::{Nlmp, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn models(seed: u64, count: usize, cfg: &ModelConfig) -> Vec<Nlmp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random::nlmp(&mut rng, cfg)).collect()
}

#[test]
fn checkers_agree_on_random_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut accepted, mut coarse_checked) = (0, 0);
    for m in models(20, 1000, &ModelConfig::default()) {
        let n = m.num_states();
        let r = if rng.gen_bool(0.5) {
            random::symmetric_relation(&mut rng, n)
        } else {
            Relation::from_partition(&random::partition(&mut rng, n))
        };
        let t = is_traditional_bisim(&m, &r).unwrap().accepted();
        let s = is_state_bisim(&m, &r).unwrap().accepted();
        let sd = is_state_bisim_direct(&m, &r).unwrap().accepted();
        let sigma_r = m.sigma().of_relation(&r).unwrap();
        let e = is_event_bisim(&m, &sigma_r).unwrap().accepted();
        let ex = is_event_bisim_exhaustive(&m, &sigma_r).unwrap().accepted();
        assert!(!t || s);
        assert_eq!(t, s);
        assert_eq!(s, sd);
        assert_eq!(s, e);
        assert_eq!(e, ex);
        accepted += usize::from(s);
        coarse_checked += usize::from(!m.sigma().is_powerset());
    }
    assert!(
        accepted > 100 && coarse_checked > 300,
        "{accepted} {coarse_checked}"
    );
}

#[test]
fn rejections_carry_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for m in models(23, 300, &ModelConfig::default()) {
        let r = random::symmetric_relation(&mut rng, m.num_states());
        match is_traditional_bisim(&m, &r).unwrap().witness {
            None => {}
            Some(Witness::Unmatched {
                s,
                t,
                label,
                measure,
            }) => {
                assert!(r.contains(s, t));
                assert!(m.row(label, s).contains(&measure));
            }
            Some(other) => panic!("{other:?}"),
        }
        match is_state_bisim(&m, &r).unwrap().witness {
            None => {}
            Some(Witness::Hit { s, t, label, xi }) => {
                let xi = nlmp_core::StateSet::from_indices(m.pool().len(), xi);
                let pre = m.hit_preimage(label, &xi).unwrap();
                assert!(r.contains(s, t));
                assert_ne!(pre.contains(s), pre.contains(t));
            }
            Some(other) => panic!("{other:?}"),
        }
    }
}

#[test]
fn inseparability_of_a_state_bisimulation_is_a_bisimulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut hits = 0;
    for m in models(25, 600, &ModelConfig::default()) {
        let r = Relation::from_partition(&random::partition(&mut rng, m.num_states()));
        let classes = r.classes().unwrap();
        let measurable =
            (0..classes.len()).all(|b| m.sigma().is_measurable(&classes.block_set(b)).unwrap());
        if !measurable || !is_state_bisim(&m, &r).unwrap().accepted() {
            continue;
        }
        hits += 1;
        let sigma_r = m.sigma().of_relation(&r).unwrap();
        let closure = sigma_r.relation();
        assert!(is_state_bisim(&m, &closure).unwrap().accepted());
        assert!(
            is_event_bisim(&m, &m.sigma().of_relation(&closure).unwrap())
                .unwrap()
                .accepted()
        );
    }
    assert!(hits > 50, "{hits}");
}

#[test]
fn largest_bisimulations_dominate_every_accepted_equivalence() {
    let cfg = ModelConfig {
        max_states: 5,
        ..ModelConfig::default()
    };
    let partitions: Vec<Vec<_>> = (0..=5).map(set_partitions).collect();
    for m in models(26, 60, &cfg) {
        let n = m.num_states();
        let t = largest_traditional(&m).unwrap();
        let s = largest_state(&m).unwrap();
        assert_eq!(t.partition, s.partition);
        let rel = s.relation();
        assert!(rel.is_equivalence());
        assert!(is_state_bisim(&m, &rel).unwrap().accepted());
        let mut union = Relation::empty(n);
        for p in &partitions[n] {
            let r = Relation::from_partition(p);
            if is_state_bisim(&m, &r).unwrap().accepted() {
                assert!(r.is_subset(&rel));
                union = union.union(&r);
            }
        }
        assert_eq!(union, rel);
    }
}

#[test]
fn fixpoint_traces_are_monotone_and_short() {
    for m in models(27, 500, &ModelConfig::default()) {
        let n = m.num_states();
        let c = compare_bisims(&m).unwrap();
        for report in [&c.traditional, &c.state, &c.event] {
            assert!(report.trace.len() <= n + 1, "{:?}", report.kind);
            assert_eq!(report.trace.last(), Some(&report.partition));
            for w in report.trace.windows(2) {
                assert!(w[1].refines(&w[0]));
            }
        }
        let lambda = c.event.sigma.as_ref().unwrap();
        assert!(is_event_bisim(&m, lambda).unwrap().accepted());
        assert!(lambda.is_sub_of(m.sigma()).unwrap());
    }
}

#[test]
fn inclusion_chain_and_powerset_coincidence() {
    let (mut powerset, mut coarse, mut strict) = (0, 0, 0);
    for m in models(28, 1000, &ModelConfig::default()) {
        let c = compare_bisims(&m).unwrap();
        assert!(c.chain_holds());
        assert!(c.consistent());
        let lf = logical_equivalence(&m, Fragment::Lf).unwrap();
        let l = logical_equivalence(&m, Fragment::L).unwrap();
        assert_eq!(l.partition, c.event.partition);
        if m.sigma().is_powerset() {
            powerset += 1;
            assert!(c.all_equal);
            assert_eq!(lf.partition, c.traditional.partition);
        } else {
            coarse += 1;
        }
        strict += usize::from(c.traditional.partition.len() < m.num_states());
    }
    assert!(
        powerset > 300 && coarse > 300 && strict > 300,
        "{powerset} {coarse} {strict}"
    );
}

#[test]
fn composing_reflexive_traditional_bisimulations() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut composed = 0;
    for m in models(30, 400, &ModelConfig::default()) {
        let n = m.num_states();
        let largest = largest_traditional(&m).unwrap().relation();
        let mut sample = || {
            let mut r = Relation::identity(n);
            for (s, t) in largest.pairs() {
                if s < t && rng.gen_bool(0.5) {
                    r.insert(s, t);
                    r.insert(t, s);
                }
            }
            r
        };
        let (r1, r2) = (sample(), sample());
        if !is_traditional_bisim(&m, &r1).unwrap().accepted()
            || !is_traditional_bisim(&m, &r2).unwrap().accepted()
        {
            continue;
        }
        composed += 1;
        let c = r1.compose(&r2);
        let symmetric = c.union(&r2.compose(&r1));
        assert!(is_traditional_bisim(&m, &symmetric).unwrap().accepted());
    }
    assert!(composed > 100, "{composed}");
}

#[test]
fn dirac_checkers_match_general_checkers() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let cfg = ModelConfig {
        dirac_only: true,
        ..ModelConfig::default()
    };
    for m in models(32, 1000, &cfg) {
        let r = random::symmetric_relation(&mut rng, m.num_states());
        assert_eq!(
            np_traditional_check(&m, &r).unwrap().accepted(),
            is_traditional_bisim(&m, &r).unwrap().accepted()
        );
        assert_eq!(
            np_state_check(&m, &r).unwrap().accepted(),
            is_state_bisim(&m, &r).unwrap().accepted()
        );
    }
}

#[test]
fn checkers_reject_bad_inputs() {
    let m = nlmp_core::text::parse_model("states s t\nlabels a\ntrans s a -> t\n")
        .unwrap()
        .nlmp();
    let asym = Relation::from_pairs(2, [(0, 1)]);
    assert!(is_traditional_bisim(&m, &asym).is_err());
    assert!(is_state_bisim(&m, &Relation::identity(3)).is_err());
    let bad =
        nlmp_core::text::parse_model("states s t x\nlabels a\nsigma gen {s t}\ntrans s a -> x\n")
            .unwrap()
            .nlmp();
    assert!(largest_traditional(&bad).is_err());
    assert!(smallest_stable_sigma(&bad).is_err());
    let p = nlmp_core::text::parse_model("states s t\nlabels a\ntrans s a s:1/2 t:1/2\n")
        .unwrap()
        .nlmp();
    assert!(np_state_check(&p, &Relation::identity(2)).is_err());
}
