//! Seeded generators for models, relations and formulas.
//!
//! Measures have small denominators and are drawn from a small per-model
//! palette, so that random models have non-trivial bisimilarities.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::logic::{Cmp, Constraint, MeasureFormula, StateFormula};
use crate::measurable::{Partition, Relation, SigmaAlgebra, Universe};
use crate::measures::Measure;
use crate::model::{Lmp, Nlmp};
use crate::rational::{ratio, Rational};

#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub max_states: usize,
    pub max_labels: usize,
    pub max_row: usize,
    /// Probability of a coarse σ-algebra instead of the powerset.
    pub coarse_prob: f64,
    /// Only Dirac measures.
    pub dirac_only: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            max_states: 5,
            max_labels: 3,
            max_row: 3,
            coarse_prob: 0.5,
            dirac_only: false,
        }
    }
}

pub fn universe(n: usize) -> Arc<Universe> {
    Arc::new(Universe::numbered(n).expect("n > 0"))
}

pub fn labels(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| char::from(b'a' + i as u8).to_string())
        .collect()
}

pub fn partition<R: Rng>(rng: &mut R, n: usize) -> Partition {
    let blocks = rng.gen_range(1..=n);
    let keys: Vec<usize> = (0..n).map(|_| rng.gen_range(0..blocks)).collect();
    Partition::from_keys(&keys)
}

pub fn sigma<R: Rng>(rng: &mut R, universe: Arc<Universe>, coarse: bool) -> SigmaAlgebra {
    if coarse {
        let atoms = partition(rng, universe.len());
        SigmaAlgebra::from_atoms(universe, atoms).expect("width matches")
    } else {
        SigmaAlgebra::powerset(universe)
    }
}

/// A probability measure on at most three atoms with denominator 2, 4 or 6.
pub fn measure<R: Rng>(rng: &mut R, sigma: &Arc<SigmaAlgebra>, dirac_only: bool) -> Measure {
    let k = sigma.num_atoms();
    if dirac_only || rng.gen_bool(0.3) {
        let atom = rng.gen_range(0..k);
        return Measure::dirac(sigma.clone(), sigma.atoms().block(atom)[0]).expect("in range");
    }
    let denom: i64 = *[2, 4, 6].choose(rng).expect("non-empty");
    let mut weights = vec![0i64; k];
    for _ in 0..denom {
        // Few atoms in the support keeps values coinciding across measures.
        let atom = rng.gen_range(0..k.min(3));
        weights[atom] += 1;
    }
    weights.shuffle(rng);
    let weights: Vec<Rational> = weights.into_iter().map(|w| ratio(w, denom)).collect();
    Measure::from_atom_weights(sigma.clone(), weights).expect("sums to one")
}

/// A random model; with a coarse σ-algebra, rows are constant on atoms so
/// the model is valid.
pub fn nlmp<R: Rng>(rng: &mut R, cfg: &ModelConfig) -> Nlmp {
    let n = rng.gen_range(1..=cfg.max_states);
    let k = rng.gen_range(1..=cfg.max_labels);
    let coarse = rng.gen_bool(cfg.coarse_prob);
    let sigma = Arc::new(sigma(rng, universe(n), coarse));
    nlmp_on(rng, sigma, k, cfg)
}

pub fn nlmp_on<R: Rng>(rng: &mut R, sigma: Arc<SigmaAlgebra>, k: usize, cfg: &ModelConfig) -> Nlmp {
    let palette_size = rng.gen_range(1..=4);
    let palette: Vec<Measure> = (0..palette_size)
        .map(|_| measure(rng, &sigma, cfg.dirac_only))
        .collect();
    let mut b = Nlmp::builder(sigma.clone(), labels(k)).expect("labels are distinct");
    for a in 0..k {
        for atom in 0..sigma.num_atoms() {
            let size = rng.gen_range(0..=cfg.max_row);
            let row: Vec<&Measure> = (0..size)
                .map(|_| palette.choose(rng).expect("non-empty"))
                .collect();
            for &s in sigma.atoms().block(atom) {
                for mu in &row {
                    b.add(s, a, (*mu).clone()).expect("same σ-algebra");
                }
            }
        }
    }
    b.build()
}

/// A random LMP on at most `max_states` states; some labels are disabled at
/// some states. With `coarse_prob > 0` the kernels are not forced to be
/// constant on atoms, so some results are invalid.
pub fn lmp<R: Rng>(rng: &mut R, max_states: usize, max_labels: usize, coarse_prob: f64) -> Lmp {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_labels);
    let coarse = rng.gen_bool(coarse_prob);
    let sigma = Arc::new(sigma(rng, universe(n), coarse));
    let palette: Vec<Measure> = (0..rng.gen_range(1..=3))
        .map(|_| measure(rng, &sigma, false))
        .collect();
    let constant = rng.gen_bool(0.5);
    let kernels = (0..k)
        .map(|_| {
            let pick = |rng: &mut R| {
                rng.gen_bool(0.8)
                    .then(|| palette.choose(rng).expect("non-empty").clone())
            };
            let per_atom: Vec<Option<Measure>> =
                (0..sigma.num_atoms()).map(|_| pick(rng)).collect();
            (0..n)
                .map(|s| {
                    if constant {
                        per_atom[sigma.atom_of(s)].clone()
                    } else {
                        pick(rng)
                    }
                })
                .collect()
        })
        .collect();
    Lmp::new(sigma, labels(k), kernels).expect("shape matches")
}

/// A symmetric relation; reflexive pairs are included with probability 1/2.
pub fn symmetric_relation<R: Rng>(rng: &mut R, n: usize) -> Relation {
    let density = rng.gen_range(0.0..=1.0);
    let mut r = Relation::empty(n);
    for s in 0..n {
        for t in s..n {
            if rng.gen_bool(density) {
                r.insert(s, t);
                r.insert(t, s);
            }
        }
    }
    r
}

fn threshold<R: Rng>(rng: &mut R) -> Rational {
    let d: i64 = *[1, 2, 3, 4].choose(rng).expect("non-empty");
    ratio(rng.gen_range(0..=d), d)
}

/// A random formula of depth at most `depth` over the given labels.
pub fn state_formula<R: Rng>(rng: &mut R, labels: &[String], depth: usize) -> StateFormula {
    if depth == 0 || labels.is_empty() {
        return StateFormula::Top;
    }
    let label = labels.choose(rng).expect("non-empty").clone();
    match rng.gen_range(0..4) {
        0 => StateFormula::Top,
        1 => StateFormula::and(
            state_formula(rng, labels, depth - 1),
            state_formula(rng, labels, depth - 1),
        ),
        2 => StateFormula::diamond(label, measure_formula(rng, labels, depth - 1)),
        _ => {
            let count = rng.gen_range(1..=2);
            let cs = (0..count)
                .map(|_| Constraint {
                    cmp: if rng.gen_bool(0.5) {
                        Cmp::Greater
                    } else {
                        Cmp::Less
                    },
                    threshold: threshold(rng),
                    formula: state_formula(rng, labels, depth - 1),
                })
                .collect();
            StateFormula::multi(label, cs).expect("thresholds are in range")
        }
    }
}

pub fn measure_formula<R: Rng>(rng: &mut R, labels: &[String], depth: usize) -> MeasureFormula {
    let phi = state_formula(rng, labels, depth);
    let q = threshold(rng);
    match rng.gen_range(0..6) {
        0 => MeasureFormula::Or(vec![
            measure_formula(rng, labels, depth.saturating_sub(1)),
            MeasureFormula::at_least(phi, q),
        ]),
        1 => MeasureFormula::not(MeasureFormula::at_least(phi, q)),
        2 => MeasureFormula::Greater(Box::new(phi), q),
        3 => MeasureFormula::Less(Box::new(phi), q),
        4 => MeasureFormula::AtMost(Box::new(phi), q),
        _ => MeasureFormula::at_least(phi, q),
    }
}
