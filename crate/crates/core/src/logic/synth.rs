//! Logical equivalence and distinguishing-formula synthesis.
//!
//! The finitary fragment is handled by a formula-driven partition
//! refinement. A list `F` of recorded multi-constraint formulas induces the
//! partition `𝓡(F)`; its blocks are the atoms of `σ(F)`. Two states of one
//! block are split when some `μ ∈ T_a(s)` has no partner in `T_a(t)`
//! agreeing with it on every atom. For each partner `μ'ᵢ` we then need a
//! formula on which the two values differ. Order the atoms by decreasing
//! number of recorded formulas containing them and take the first atom `A`
//! on which `μ` and `μ'ᵢ` differ; the conjunction `φᵢ` of the recorded
//! formulas containing `A` denotes `A` together with atoms that contain
//! strictly more formulas, on which the measures agree, so
//! `μ(⟦φᵢ⟧) ≠ μ'ᵢ(⟦φᵢ⟧)`. The bound between the two values is their
//! rational midpoint, and `⟨a⟩[⋈ᵢ qᵢ φᵢ]` holds at `s` but not at `t`.
//!
//! Each recorded formula strictly refines the partition, so at most
//! `|S| - 1` formulas are created.

use std::collections::BTreeSet;

use crate::bisim::smallest_stable_sigma;
use crate::error::{domain, precondition, Error, Result};
use crate::logic::eval::state;
use crate::logic::{Cmp, Constraint, StateFormula};
use crate::measurable::{Partition, Relation};
use crate::model::Nlmp;
use crate::rational::{midpoint, zero, Rational};
use crate::stateset::StateSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// The full logic, whose equivalence is event bisimilarity.
    L,
    /// The finitary sublogic built from `T`, `&` and `<a>[ ... ]`.
    Lf,
}

impl Fragment {
    pub fn name(self) -> &'static str {
        match self {
            Fragment::L => "L",
            Fragment::Lf => "Lf",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub fragment: Fragment,
    pub partition: Partition,
    /// For every pair `s < t` of inequivalent states, a formula true at
    /// exactly one of them.
    pub distinguishing: Vec<(usize, usize, StateFormula)>,
}

impl EquivalenceReport {
    pub fn relation(&self) -> Relation {
        Relation::from_partition(&self.partition)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distinction {
    Equivalent,
    Formula(StateFormula),
}

struct Refiner<'m> {
    model: &'m Nlmp,
    formulas: Vec<(StateFormula, StateSet)>,
    partition: Partition,
}

impl<'m> Refiner<'m> {
    fn new(model: &'m Nlmp) -> Self {
        Refiner {
            model,
            formulas: Vec::new(),
            partition: Partition::total(model.num_states()),
        }
    }

    fn run(mut self) -> Result<Self> {
        while let Some(split) = self.find_split() {
            let (formula, denotation) = split?;
            let keys: Vec<bool> = (0..self.model.num_states())
                .map(|s| denotation.contains(s))
                .collect();
            let refined = self.partition.refine_by(&keys);
            debug_assert_ne!(
                refined, self.partition,
                "a recorded formula must split a block"
            );
            self.partition = refined;
            self.formulas.push((formula, denotation));
        }
        Ok(self)
    }

    /// Values of every pool measure on the current atoms.
    fn atom_values(&self) -> Result<Vec<Vec<Rational>>> {
        let atoms: Vec<StateSet> = (0..self.partition.len())
            .map(|b| self.partition.block_set(b))
            .collect();
        self.model
            .pool()
            .iter()
            .map(|mu| atoms.iter().map(|a| mu.eval(a)).collect())
            .collect()
    }

    fn unmatched(&self, values: &[Vec<Rational>], a: usize, s: usize, t: usize) -> Option<usize> {
        let row_t = self.model.row(a, t);
        self.model
            .row(a, s)
            .iter()
            .copied()
            .find(|&i| !row_t.iter().any(|&j| values[i] == values[j]))
    }

    fn find_split(&self) -> Option<Result<(StateFormula, StateSet)>> {
        let values = match self.atom_values() {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        for block in self.partition.blocks() {
            let rep = block[0];
            for &t in &block[1..] {
                for a in 0..self.model.num_labels() {
                    if let Some(mu) = self.unmatched(&values, a, rep, t) {
                        return Some(self.build(&values, a, mu, t));
                    }
                    if let Some(mu) = self.unmatched(&values, a, t, rep) {
                        return Some(self.build(&values, a, mu, rep));
                    }
                }
            }
        }
        None
    }

    /// Builds `⟨a⟩[⋈ᵢ qᵢ φᵢ]` satisfied through `mu` but by no transition of
    /// `T_a(other)`.
    fn build(
        &self,
        values: &[Vec<Rational>],
        a: usize,
        mu: usize,
        other: usize,
    ) -> Result<(StateFormula, StateSet)> {
        let m = self.model;
        // Recorded formulas containing each atom, and the atom order used to
        // pick separating conjunctions.
        let signatures: Vec<BTreeSet<usize>> = (0..self.partition.len())
            .map(|b| {
                let s = self.partition.block(b)[0];
                (0..self.formulas.len())
                    .filter(|&f| self.formulas[f].1.contains(s))
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..self.partition.len()).collect();
        order.sort_by_key(|&b| std::cmp::Reverse(signatures[b].len()));

        let mut constraints = Vec::new();
        for &nu in m.row(a, other) {
            let atom = *order
                .iter()
                .find(|&&b| values[mu][b] != values[nu][b])
                .expect("unmatched measures differ on some atom");
            let formula = StateFormula::conjunction(
                signatures[atom].iter().map(|&f| self.formulas[f].0.clone()),
            );
            let target = state(m, &formula)?;
            let (v_mu, v_nu) = (
                m.pool().get(mu).eval(&target)?,
                m.pool().get(nu).eval(&target)?,
            );
            debug_assert_ne!(v_mu, v_nu);
            let cmp = if v_mu > v_nu { Cmp::Greater } else { Cmp::Less };
            constraints.push(Constraint {
                cmp,
                threshold: midpoint(&v_mu, &v_nu),
                formula,
            });
        }
        if constraints.is_empty() {
            // T_a(other) is empty: any transition at all separates.
            constraints.push(Constraint {
                cmp: Cmp::Greater,
                threshold: zero(),
                formula: StateFormula::Top,
            });
        }
        let label = m.labels()[a].clone();
        let formula = StateFormula::multi(label, constraints)?;
        let denotation = state(m, &formula)?;
        Ok((formula, denotation))
    }

    fn separating(&self, s: usize, t: usize) -> Option<&StateFormula> {
        self.formulas
            .iter()
            .find(|(_, d)| d.contains(s) != d.contains(t))
            .map(|(f, _)| f)
    }

    fn distinguishing_pairs(
        &self,
        partition: &Partition,
    ) -> Result<Vec<(usize, usize, StateFormula)>> {
        let n = self.model.num_states();
        let mut out = Vec::new();
        for s in 0..n {
            for t in s + 1..n {
                if partition.same_block(s, t) {
                    continue;
                }
                let f = self.separating(s, t).ok_or_else(|| {
                    precondition("inequivalent states without a finitary separating formula")
                })?;
                out.push((s, t, f.clone()));
            }
        }
        Ok(out)
    }
}

/// The logical equivalence induced by a fragment, with a separating formula
/// for every inequivalent pair.
///
/// For the full logic the relation is `𝓡(Λ*)` for the smallest stable
/// σ-algebra `Λ*`. For the finitary fragment it is computed by the
/// formula-driven refinement.
pub fn logical_equivalence(m: &Nlmp, fragment: Fragment) -> Result<EquivalenceReport> {
    m.require_valid()?;
    let refiner = Refiner::new(m).run()?;
    let partition = match fragment {
        Fragment::Lf => refiner.partition.clone(),
        Fragment::L => smallest_stable_sigma(m)?.partition,
    };
    let distinguishing = refiner.distinguishing_pairs(&partition)?;
    Ok(EquivalenceReport {
        fragment,
        partition,
        distinguishing,
    })
}

/// A finitary formula true at exactly one of `s`, `t`, or `Equivalent` when
/// they are bisimilar. Only full-powerset models are supported.
pub fn distinguish(m: &Nlmp, s: usize, t: usize) -> Result<Distinction> {
    if s >= m.num_states() || t >= m.num_states() {
        return Err(domain("unknown state index"));
    }
    if !m.sigma().is_powerset() {
        return Err(Error::Unsupported(
            "distinguishing formulas are only synthesized over the full powerset σ-algebra".into(),
        ));
    }
    m.require_valid()?;
    let refiner = Refiner::new(m).run()?;
    if refiner.partition.same_block(s, t) {
        return Ok(Distinction::Equivalent);
    }
    let formula = refiner
        .separating(s, t)
        .cloned()
        .expect("states in different blocks are separated by a recorded formula");
    let denotation = state(m, &formula)?;
    if denotation.contains(s) == denotation.contains(t) {
        return Err(precondition(format!(
            "synthesized formula `{formula}` does not separate the states"
        )));
    }
    Ok(Distinction::Formula(formula))
}
