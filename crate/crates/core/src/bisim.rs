//! Traditional, state and event bisimulation: checkers for candidate
//! relations and σ-algebras, and fixpoint computation of the largest ones.
//!
//! All three fixpoints start from the coarsest candidate (total relation,
//! trivial σ-algebra) and iterate a monotone operator, so the iteration
//! trace is a chain of partitions of length at most the number of states.
//!
//! For the traditional operator, monotonicity follows from
//! `R ⊆ R' ⇒ Σ(R) ⊇ Σ(R')`: measures related under `R` agree on more sets,
//! so the lifted relation of `R` is contained in that of `R'`. The greatest
//! fixpoint reached from the total relation therefore contains every
//! traditional bisimulation.

use std::collections::BTreeSet;

use crate::error::{precondition, Result};
use crate::measurable::{Partition, Relation, SigmaAlgebra};
use crate::measures::Profile;
use crate::model::{for_each_union, Nlmp, PreimageWitness};
use crate::stateset::StateSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BisimKind {
    Traditional,
    State,
    Event,
}

impl BisimKind {
    pub fn name(self) -> &'static str {
        match self {
            BisimKind::Traditional => "traditional",
            BisimKind::State => "state",
            BisimKind::Event => "event",
        }
    }
}

/// A concrete reason a candidate is not a bisimulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `measure ∈ T_label(s)` (a pool index) has no lifted-related partner
    /// in `T_label(t)`.
    Unmatched {
        s: usize,
        t: usize,
        label: usize,
        measure: usize,
    },
    /// The set of measures `xi` (pool indices, a union of `Σ(R)`-profile
    /// classes) is hit by `T_label(s)` but not by `T_label(t)`.
    Hit {
        s: usize,
        t: usize,
        label: usize,
        xi: Vec<usize>,
    },
    /// The hit preimage of `xi` is not measurable in the candidate σ-algebra.
    Preimage(PreimageWitness),
    /// Dirac-form state check: `s ∈ ⟨label⟩q` but `t ∉ ⟨label⟩q`.
    Diamond {
        s: usize,
        t: usize,
        label: usize,
        q: StateSet,
    },
}

/// Result of checking one candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub witness: Option<Witness>,
}

impl Verdict {
    fn from(witness: Option<Witness>) -> Self {
        Verdict { witness }
    }

    pub fn accepted(&self) -> bool {
        self.witness.is_none()
    }
}

/// A computed bisimilarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimReport {
    pub kind: BisimKind,
    pub partition: Partition,
    /// For event bisimilarity, the smallest stable σ-algebra.
    pub sigma: Option<SigmaAlgebra>,
    /// Partitions produced by successive fixpoint iterations, starting at
    /// the initial one and ending at the fixpoint.
    pub trace: Vec<Partition>,
}

impl BisimReport {
    pub fn relation(&self) -> Relation {
        Relation::from_partition(&self.partition)
    }
}

fn require_symmetric(r: &Relation, m: &Nlmp) -> Result<()> {
    if r.width() != m.num_states() {
        return Err(crate::error::domain(
            "relation does not match the model's state space",
        ));
    }
    if !r.is_symmetric() {
        return Err(precondition("relation must be symmetric"));
    }
    Ok(())
}

fn pool_profiles(m: &Nlmp, lambda: &SigmaAlgebra) -> Vec<Profile> {
    m.pool()
        .iter()
        .map(|mu| mu.profile_unchecked(lambda))
        .collect()
}

/// Class index (over `lambda`-profiles) hit by each row, per label and state.
fn hit_classes(m: &Nlmp, classes: &Partition) -> Vec<Vec<BTreeSet<usize>>> {
    (0..m.num_labels())
        .map(|a| {
            (0..m.num_states())
                .map(|s| m.row(a, s).iter().map(|&i| classes.block_of(i)).collect())
                .collect()
        })
        .collect()
}

/// First `μ ∈ T_a(s)` without an equal-profile partner in `T_a(t)`.
fn unmatched(m: &Nlmp, profiles: &[Profile], a: usize, s: usize, t: usize) -> Option<usize> {
    m.row(a, s)
        .iter()
        .copied()
        .find(|&i| !m.row(a, t).iter().any(|&j| profiles[i] == profiles[j]))
}

/// Checks `s R t ⇒ T_a(s) R T_a(t)` with the set lifting: every measure on
/// one side has a `Σ(R)`-equal partner on the other.
pub fn is_traditional_bisim(m: &Nlmp, r: &Relation) -> Result<Verdict> {
    require_symmetric(r, m)?;
    let sigma_r = m.sigma().of_relation(r)?;
    let profiles = pool_profiles(m, &sigma_r);
    for (s, t) in r.pairs() {
        for a in 0..m.num_labels() {
            if let Some(measure) = unmatched(m, &profiles, a, s, t) {
                return Ok(Verdict::from(Some(Witness::Unmatched {
                    s,
                    t,
                    label: a,
                    measure,
                })));
            }
            if let Some(measure) = unmatched(m, &profiles, a, t, s) {
                return Ok(Verdict::from(Some(Witness::Unmatched {
                    s: t,
                    t: s,
                    label: a,
                    measure,
                })));
            }
        }
    }
    Ok(Verdict::from(None))
}

/// State bisimulation check: related states hit exactly the same
/// `Σ(R)`-profile classes under every label.
pub fn is_state_bisim(m: &Nlmp, r: &Relation) -> Result<Verdict> {
    require_symmetric(r, m)?;
    let sigma_r = m.sigma().of_relation(r)?;
    let classes = m.pool().trace_classes_unchecked(&sigma_r);
    let hits = hit_classes(m, &classes);
    for (s, t) in r.pairs() {
        for (a, row) in hits.iter().enumerate() {
            let (hs, ht) = (&row[s], &row[t]);
            if hs == ht {
                continue;
            }
            let (s, t, class) = match hs.difference(ht).next() {
                Some(&c) => (s, t, c),
                None => (t, s, *ht.difference(hs).next().expect("sets differ")),
            };
            return Ok(Verdict::from(Some(Witness::Hit {
                s,
                t,
                label: a,
                xi: classes.block(class).to_vec(),
            })));
        }
    }
    Ok(Verdict::from(None))
}

/// State bisimulation check quantifying `ξ` over every union of
/// `Σ(R)`-profile classes. Fails with `Unsupported` when there are more
/// classes than [`crate::model::EXHAUSTIVE_CLASS_LIMIT`].
pub fn is_state_bisim_direct(m: &Nlmp, r: &Relation) -> Result<Verdict> {
    require_symmetric(r, m)?;
    let sigma_r = m.sigma().of_relation(r)?;
    let classes = m.pool().trace_classes_unchecked(&sigma_r);
    let pairs: Vec<(usize, usize)> = r.pairs().collect();
    let witness = for_each_union(&classes, m.pool().len(), |xi| {
        for a in 0..m.num_labels() {
            let pre = m.hit_preimage_unchecked(a, xi);
            for &(s, t) in &pairs {
                if pre.contains(s) != pre.contains(t) {
                    let (s, t) = if pre.contains(s) { (s, t) } else { (t, s) };
                    return Some(Witness::Hit {
                        s,
                        t,
                        label: a,
                        xi: xi.to_vec(),
                    });
                }
            }
        }
        None
    })?;
    Ok(Verdict::from(witness))
}

fn require_sub(m: &Nlmp, lambda: &SigmaAlgebra) -> Result<()> {
    if !lambda.is_sub_of(m.sigma())? {
        return Err(precondition(
            "candidate is not a sub-σ-algebra of the model's σ-algebra",
        ));
    }
    Ok(())
}

/// Event bisimulation check: every hit preimage of a `Δ(Λ)`-trace set is
/// `Λ`-measurable.
pub fn is_event_bisim(m: &Nlmp, lambda: &SigmaAlgebra) -> Result<Verdict> {
    require_sub(m, lambda)?;
    Ok(Verdict::from(
        m.stability_violation(lambda).map(Witness::Preimage),
    ))
}

/// [`is_event_bisim`] enumerating every union of profile classes.
pub fn is_event_bisim_exhaustive(m: &Nlmp, lambda: &SigmaAlgebra) -> Result<Verdict> {
    require_sub(m, lambda)?;
    Ok(Verdict::from(
        m.stability_violation_exhaustive(lambda)?
            .map(Witness::Preimage),
    ))
}

/// Greatest traditional bisimulation `∼_t`.
pub fn largest_traditional(m: &Nlmp) -> Result<BisimReport> {
    m.require_valid()?;
    let n = m.num_states();
    let mut relation = Relation::total(n);
    let mut trace = vec![Partition::total(n)];
    loop {
        let sigma_r = m.sigma().of_relation(&relation)?;
        let profiles = pool_profiles(m, &sigma_r);
        let mut next = relation.clone();
        for (s, t) in relation.pairs() {
            let matched = (0..m.num_labels()).all(|a| {
                unmatched(m, &profiles, a, s, t).is_none()
                    && unmatched(m, &profiles, a, t, s).is_none()
            });
            if !matched {
                next.remove(s, t);
            }
        }
        if next == relation {
            break;
        }
        relation = next;
        trace.push(
            relation
                .classes()
                .expect("refinement of an equivalence by an equivalence"),
        );
    }
    Ok(BisimReport {
        kind: BisimKind::Traditional,
        partition: relation.classes().expect("fixpoint is an equivalence"),
        sigma: None,
        trace,
    })
}

/// Greatest state bisimulation `∼_s`: split blocks by the per-label sets of
/// `Σ(R_n)`-profile classes hit.
pub fn largest_state(m: &Nlmp) -> Result<BisimReport> {
    m.require_valid()?;
    let n = m.num_states();
    let mut current = Partition::total(n);
    let mut trace = vec![current.clone()];
    loop {
        let sigma_r = m.sigma().of_relation(&Relation::from_partition(&current))?;
        let classes = m.pool().trace_classes_unchecked(&sigma_r);
        let hits = hit_classes(m, &classes);
        let keys: Vec<Vec<&BTreeSet<usize>>> = (0..n)
            .map(|s| (0..m.num_labels()).map(|a| &hits[a][s]).collect())
            .collect();
        let next = current.refine_by(&keys);
        if next == current {
            break;
        }
        current = next;
        trace.push(current.clone());
    }
    Ok(BisimReport {
        kind: BisimKind::State,
        partition: current,
        sigma: None,
        trace,
    })
}

/// The smallest stable sub-σ-algebra `Λ*` and `∼_e = 𝓡(Λ*)`.
///
/// `Λ_{n+1}` is generated by the atoms of `Λ_n` together with every hit
/// preimage of a `Λ_n`-profile class. Preimages of unions of classes are
/// unions of these generators, so they add nothing.
pub fn smallest_stable_sigma(m: &Nlmp) -> Result<BisimReport> {
    m.require_valid()?;
    let universe = m.universe().clone();
    let mut lambda = SigmaAlgebra::trivial(universe.clone());
    let mut trace = vec![lambda.atoms().clone()];
    loop {
        let classes = m.pool().trace_classes_unchecked(&lambda);
        let mut generators: Vec<StateSet> = (0..lambda.num_atoms())
            .map(|a| lambda.atom_set(a))
            .collect();
        for a in 0..m.num_labels() {
            for b in 0..classes.len() {
                generators.push(m.hit_preimage_unchecked(a, &classes.block_set(b)));
            }
        }
        let next = SigmaAlgebra::generate(universe.clone(), &generators)?;
        if next == lambda {
            break;
        }
        lambda = next;
        trace.push(lambda.atoms().clone());
    }
    Ok(BisimReport {
        kind: BisimKind::Event,
        partition: lambda.atoms().clone(),
        sigma: Some(lambda),
        trace,
    })
}

/// All three bisimilarities with the inclusion-chain verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub traditional: BisimReport,
    pub state: BisimReport,
    pub event: BisimReport,
    /// `∼_t ⊆ ∼_s`.
    pub traditional_in_state: bool,
    /// `∼_s ⊆ ∼_e`.
    pub state_in_event: bool,
    /// True when the model's σ-algebra is the powerset, where the three
    /// relations must coincide.
    pub coincidence_required: bool,
    pub all_equal: bool,
}

impl Comparison {
    pub fn chain_holds(&self) -> bool {
        self.traditional_in_state && self.state_in_event
    }

    /// The chain holds, and so does the coincidence when it is required.
    pub fn consistent(&self) -> bool {
        self.chain_holds() && (!self.coincidence_required || self.all_equal)
    }
}

pub fn compare_bisims(m: &Nlmp) -> Result<Comparison> {
    let traditional = largest_traditional(m)?;
    let state = largest_state(m)?;
    let event = smallest_stable_sigma(m)?;
    let traditional_in_state = traditional.partition.refines(&state.partition);
    let state_in_event = state.partition.refines(&event.partition);
    let all_equal = traditional.partition == state.partition && state.partition == event.partition;
    Ok(Comparison {
        coincidence_required: m.sigma().is_powerset(),
        traditional,
        state,
        event,
        traditional_in_state,
        state_in_event,
        all_equal,
    })
}

fn require_non_probabilistic(m: &Nlmp) -> Result<()> {
    if !m.is_non_probabilistic() {
        return Err(precondition("model has non-Dirac transitions"));
    }
    Ok(())
}

/// Traditional bisimulation check for non-probabilistic models: every
/// `δ_u ∈ T_a(s)` is matched by some `δ_v ∈ T_a(t)` with `u, v` in one
/// `Σ(R)`-atom.
pub fn np_traditional_check(m: &Nlmp, r: &Relation) -> Result<Verdict> {
    require_non_probabilistic(m)?;
    require_symmetric(r, m)?;
    let sigma_r = m.sigma().of_relation(r)?;
    let target_atom = |i: usize| {
        let atom = m.pool().get(i).dirac_atom().expect("non-probabilistic");
        sigma_r.atom_of(m.sigma().atoms().block(atom)[0])
    };
    for (s, t) in r.pairs() {
        for a in 0..m.num_labels() {
            for &i in m.row(a, s) {
                if !m
                    .row(a, t)
                    .iter()
                    .any(|&j| target_atom(i) == target_atom(j))
                {
                    return Ok(Verdict::from(Some(Witness::Unmatched {
                        s,
                        t,
                        label: a,
                        measure: i,
                    })));
                }
            }
        }
    }
    Ok(Verdict::from(None))
}

/// State bisimulation check for non-probabilistic models: related states
/// agree on `⟨a⟩Q` for every `Q ∈ Σ(R)`.
///
/// `Q` ranges over all unions of `Σ(R)`-atoms when there are at most
/// [`crate::model::EXHAUSTIVE_CLASS_LIMIT`] of them; beyond that, over the
/// atoms alone, which is equivalent because `⟨a⟩·` commutes with unions.
pub fn np_state_check(m: &Nlmp, r: &Relation) -> Result<Verdict> {
    require_non_probabilistic(m)?;
    require_symmetric(r, m)?;
    let sigma_r = m.sigma().of_relation(r)?;
    let pairs: Vec<(usize, usize)> = r.pairs().collect();
    let check = |q: &StateSet| -> Option<Witness> {
        for a in 0..m.num_labels() {
            let d = m.diamond(a, q).expect("Σ(R) sets are measurable");
            for &(s, t) in &pairs {
                if d.contains(s) && !d.contains(t) {
                    return Some(Witness::Diamond {
                        s,
                        t,
                        label: a,
                        q: q.clone(),
                    });
                }
            }
        }
        None
    };
    let witness = if sigma_r.num_atoms() <= crate::model::EXHAUSTIVE_CLASS_LIMIT {
        for_each_union(sigma_r.atoms(), m.num_states(), check)?
    } else {
        (0..sigma_r.num_atoms()).find_map(|b| check(&sigma_r.atom_set(b)))
    };
    Ok(Verdict::from(witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurable::Universe;
    use crate::measures::Measure;
    use crate::rational::ratio;
    use std::sync::Arc;

    /// A two-state model where only state 0 enables `a` (self loop).
    fn enabledness_model(sigma_powerset: bool) -> Nlmp {
        let u = Arc::new(Universe::new(["s", "t"]).unwrap());
        let sigma = if sigma_powerset {
            SigmaAlgebra::powerset(u)
        } else {
            SigmaAlgebra::trivial(u)
        };
        let mut b = Nlmp::builder(Arc::new(sigma), ["a"]).unwrap();
        b.add_dirac(0, 0, 0).unwrap();
        b.build()
    }

    #[test]
    fn identity_is_always_a_bisimulation() {
        let m = enabledness_model(true);
        let id = Relation::identity(2);
        assert!(is_traditional_bisim(&m, &id).unwrap().accepted());
        assert!(is_state_bisim(&m, &id).unwrap().accepted());
        assert!(is_state_bisim_direct(&m, &id).unwrap().accepted());
        assert!(is_event_bisim(&m, m.sigma()).unwrap().accepted());
    }

    #[test]
    fn enabledness_breaks_the_trivial_sigma() {
        let m = enabledness_model(true);
        let trivial = SigmaAlgebra::trivial(m.universe().clone());
        let v = is_event_bisim(&m, &trivial).unwrap();
        match v.witness {
            Some(Witness::Preimage(w)) => {
                assert_eq!(w.xi, vec![0]);
                assert_eq!(w.preimage.to_vec(), vec![0]);
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn vacuous_lifting_accepts_total_relation() {
        let u = Arc::new(Universe::new(["s", "t", "x"]).unwrap());
        let m = Nlmp::builder(Arc::new(SigmaAlgebra::powerset(u)), ["a", "b"])
            .unwrap()
            .build();
        let total = Relation::total(3);
        assert!(is_traditional_bisim(&m, &total).unwrap().accepted());
        assert!(is_state_bisim(&m, &total).unwrap().accepted());
        assert_eq!(
            largest_traditional(&m).unwrap().partition,
            Partition::total(3)
        );
        assert_eq!(largest_state(&m).unwrap().partition, Partition::total(3));
        let e = smallest_stable_sigma(&m).unwrap();
        assert!(e.sigma.unwrap().is_trivial());
    }

    #[test]
    fn non_symmetric_relations_are_rejected() {
        let m = enabledness_model(true);
        let r = Relation::from_pairs(2, [(0, 1)]);
        assert!(matches!(
            is_traditional_bisim(&m, &r),
            Err(crate::Error::Precondition(_))
        ));
        assert!(matches!(
            is_state_bisim(&m, &r),
            Err(crate::Error::Precondition(_))
        ));
        assert!(matches!(
            np_state_check(&m, &r),
            Err(crate::Error::Precondition(_))
        ));
    }

    #[test]
    fn invalid_models_are_rejected_by_fixpoints() {
        let u = Arc::new(Universe::new(["s", "t"]).unwrap());
        let mut b = Nlmp::builder(Arc::new(SigmaAlgebra::trivial(u)), ["a"]).unwrap();
        b.add_dirac(0, 0, 0).unwrap();
        let m = b.build();
        assert!(matches!(
            largest_traditional(&m),
            Err(crate::Error::Precondition(_))
        ));
        assert!(matches!(
            largest_state(&m),
            Err(crate::Error::Precondition(_))
        ));
        assert!(matches!(
            smallest_stable_sigma(&m),
            Err(crate::Error::Precondition(_))
        ));
    }

    #[test]
    fn event_check_requires_sub_algebra() {
        let u = Arc::new(Universe::new(["s", "t"]).unwrap());
        let m = Nlmp::builder(Arc::new(SigmaAlgebra::trivial(u.clone())), ["a"])
            .unwrap()
            .build();
        let power = SigmaAlgebra::powerset(u);
        assert!(matches!(
            is_event_bisim(&m, &power),
            Err(crate::Error::Precondition(_))
        ));
    }

    #[test]
    fn enabledness_separates_at_first_iteration() {
        let m = enabledness_model(true);
        let e = smallest_stable_sigma(&m).unwrap();
        assert_eq!(e.trace.len(), 2);
        assert_eq!(e.trace[1], Partition::discrete(2));
    }

    #[test]
    fn np_checks_reject_probabilistic_models() {
        let u = Arc::new(Universe::new(["s", "x", "y"]).unwrap());
        let p = Arc::new(SigmaAlgebra::powerset(u));
        let mut b = Nlmp::builder(p.clone(), ["a"]).unwrap();
        b.add(
            0,
            0,
            Measure::from_state_weights(p, [(1, ratio(1, 2)), (2, ratio(1, 2))]).unwrap(),
        )
        .unwrap();
        let m = b.build();
        let id = Relation::identity(3);
        assert!(matches!(
            np_traditional_check(&m, &id),
            Err(crate::Error::Precondition(_))
        ));
        assert!(matches!(
            np_state_check(&m, &id),
            Err(crate::Error::Precondition(_))
        ));
    }

    #[test]
    fn np_traditional_accepts_targets_in_one_closed_atom() {
        // s -a-> u, t -a-> v, with u R v: the targets share a Σ(R)-atom.
        let u = Arc::new(Universe::new(["s", "t", "u", "v"]).unwrap());
        let mut b = Nlmp::builder(Arc::new(SigmaAlgebra::powerset(u)), ["a"]).unwrap();
        b.add_dirac(0, 0, 2).unwrap();
        b.add_dirac(1, 0, 3).unwrap();
        let m = b.build();
        let r = Relation::symmetric_from_pairs(4, [(0, 1), (2, 3)]);
        assert!(np_traditional_check(&m, &r).unwrap().accepted());
        assert!(is_traditional_bisim(&m, &r).unwrap().accepted());
        let only_st = Relation::symmetric_from_pairs(4, [(0, 1)]);
        assert!(!np_traditional_check(&m, &only_st).unwrap().accepted());
        assert!(!is_traditional_bisim(&m, &only_st).unwrap().accepted());
    }
}
