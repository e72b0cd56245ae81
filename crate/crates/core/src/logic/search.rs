//! Brute-force search over single-constraint finitary formulas.
//!
//! Formulas are enumerated up to denotation: for each depth we keep the set
//! of subsets of states definable by finitary formulas of that depth, and
//! the thresholds tried against a set `Q` are the pool values on `Q`, the
//! midpoints between consecutive values, and `0` and `1`. Any other
//! threshold selects the same measures as one of these.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::logic::Cmp;
use crate::model::Nlmp;
use crate::rational::{midpoint, one, zero, Rational};
use crate::stateset::StateSet;

/// Outcome of [`single_constraint_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Number of `(label, cmp, threshold, denotation)` candidates tried.
    pub candidates: usize,
    /// Number of distinct denotations of depth-bounded formulas.
    pub denotations: usize,
    /// A separating single-constraint candidate, if one exists.
    pub separating: Option<(String, Cmp, Rational, StateSet)>,
}

fn thresholds(values: &[Rational]) -> Vec<Rational> {
    let mut vs: Vec<Rational> = values.to_vec();
    vs.push(zero());
    vs.push(one());
    vs.sort();
    vs.dedup();
    let mids: Vec<Rational> = vs.windows(2).map(|w| midpoint(&w[0], &w[1])).collect();
    vs.extend(mids);
    vs.sort();
    vs
}

fn intersection_closure(sets: BTreeSet<StateSet>) -> BTreeSet<StateSet> {
    let mut closed = sets;
    loop {
        let list: Vec<StateSet> = closed.iter().cloned().collect();
        let before = closed.len();
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                closed.insert(list[i].intersection(&list[j]));
            }
        }
        if closed.len() == before {
            return closed;
        }
    }
}

/// Pool measures selected by one constraint, for every denotation and
/// threshold.
fn constraint_sets(
    m: &Nlmp,
    denotations: &BTreeSet<StateSet>,
) -> Result<Vec<(Cmp, Rational, StateSet, StateSet)>> {
    let mut out = Vec::new();
    for q in denotations {
        let values: Vec<Rational> = m
            .pool()
            .iter()
            .map(|mu| mu.eval(q))
            .collect::<Result<_>>()?;
        for r in thresholds(&values) {
            for cmp in [Cmp::Greater, Cmp::Less] {
                let mut xi = StateSet::empty(m.pool().len());
                for (i, v) in values.iter().enumerate() {
                    if cmp.holds(v, &r) {
                        xi.insert(i);
                    }
                }
                out.push((cmp, r.clone(), q.clone(), xi));
            }
        }
    }
    Ok(out)
}

/// Denotations of all finitary formulas of depth at most `depth`.
pub fn finitary_denotations(m: &Nlmp, depth: usize) -> Result<BTreeSet<StateSet>> {
    let mut current: BTreeSet<StateSet> = [StateSet::full(m.num_states())].into();
    for _ in 0..depth {
        let singles: BTreeSet<StateSet> = constraint_sets(m, &current)?
            .into_iter()
            .map(|c| c.3)
            .collect();
        let xis = intersection_closure(singles);
        let mut next = current.clone();
        for a in 0..m.num_labels() {
            for xi in &xis {
                next.insert(m.hit_preimage(a, xi)?);
            }
        }
        current = intersection_closure(next);
    }
    Ok(current)
}

/// Looks for `<a>[ ⋈ q φ ]` with `φ` of depth at most `depth` that holds at
/// exactly one of `s` and `t`.
pub fn single_constraint_search(
    m: &Nlmp,
    s: usize,
    t: usize,
    depth: usize,
) -> Result<SearchOutcome> {
    m.require_valid()?;
    let denotations = finitary_denotations(m, depth)?;
    let constraints = constraint_sets(m, &denotations)?;
    let mut candidates = 0;
    for a in 0..m.num_labels() {
        for (cmp, r, q, xi) in &constraints {
            candidates += 1;
            let pre = m.hit_preimage(a, xi)?;
            if pre.contains(s) != pre.contains(t) {
                return Ok(SearchOutcome {
                    candidates,
                    denotations: denotations.len(),
                    separating: Some((m.labels()[a].clone(), *cmp, r.clone(), q.clone())),
                });
            }
        }
    }
    Ok(SearchOutcome {
        candidates,
        denotations: denotations.len(),
        separating: None,
    })
}
