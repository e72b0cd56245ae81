//! Nondeterministic labeled Markov processes over finite measurable spaces,
//! the deterministic special case (LMPs), and their validation.
//!
//! A transition `T_a(s)` is a finite set of measures. All measures
//! appearing anywhere in the model are collected in one deduplicated pool,
//! and rows store pool indices. Every condition on `T_a` quantified over
//! `Δ(Λ)`-measurable sets of measures only depends on how such a set meets
//! the pool, and the pool-traces of `Δ(Λ)` are exactly the unions of
//! `Λ`-profile classes (see [`crate::measures`]).
//!
//! Hit preimages commute with unions of `ξ`, so a preimage condition that
//! must hold for every union of profile classes holds iff it holds for each
//! class on its own when the condition is closure under union (as
//! measurability is). Validation and stability checks use the per-class
//! form; the exhaustive enumeration is kept for cross-checking.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, precondition, Error, Result};
use crate::measurable::{Partition, SigmaAlgebra, Universe};
use crate::measures::{Measure, MeasurePool};
use crate::stateset::StateSet;

/// Largest number of profile classes for which exhaustive enumeration of
/// their unions is attempted.
pub const EXHAUSTIVE_CLASS_LIMIT: usize = 16;

/// A finite NLMP.
#[derive(Debug, Clone)]
pub struct Nlmp {
    sigma: Arc<SigmaAlgebra>,
    labels: Vec<String>,
    pool: MeasurePool,
    /// `rows[a][s]`: sorted pool indices of `T_a(s)`.
    rows: Vec<Vec<Vec<usize>>>,
}

/// Incremental construction of an [`Nlmp`].
#[derive(Debug, Clone)]
pub struct NlmpBuilder {
    model: Nlmp,
}

impl NlmpBuilder {
    pub fn add(&mut self, state: usize, label: usize, mu: Measure) -> Result<&mut Self> {
        let m = &mut self.model;
        if state >= m.num_states() {
            return Err(domain(format!("unknown state index {state}")));
        }
        if label >= m.labels.len() {
            return Err(domain(format!("unknown label index {label}")));
        }
        let i = m.pool.insert(mu)?;
        let row = &mut m.rows[label][state];
        if let Err(pos) = row.binary_search(&i) {
            row.insert(pos, i);
        }
        Ok(self)
    }

    pub fn add_dirac(&mut self, state: usize, label: usize, target: usize) -> Result<&mut Self> {
        let mu = Measure::dirac(self.model.sigma.clone(), target)?;
        self.add(state, label, mu)
    }

    pub fn build(self) -> Nlmp {
        self.model
    }
}

impl Nlmp {
    pub fn builder<I, S>(sigma: Arc<SigmaAlgebra>, labels: I) -> Result<NlmpBuilder>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(domain(format!("duplicate label `{l}`")));
            }
        }
        let n = sigma.len();
        let rows = vec![vec![Vec::new(); n]; labels.len()];
        Ok(NlmpBuilder {
            model: Nlmp {
                pool: MeasurePool::new(sigma.clone()),
                sigma,
                labels,
                rows,
            },
        })
    }

    pub fn sigma(&self) -> &Arc<SigmaAlgebra> {
        &self.sigma
    }

    pub fn universe(&self) -> &Arc<Universe> {
        self.sigma.universe()
    }

    pub fn num_states(&self) -> usize {
        self.sigma.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| domain(format!("unknown label `{name}`")))
    }

    pub fn pool(&self) -> &MeasurePool {
        &self.pool
    }

    /// Pool indices of `T_a(s)`.
    pub fn row(&self, label: usize, state: usize) -> &[usize] {
        &self.rows[label][state]
    }

    pub fn transitions(&self, label: usize, state: usize) -> impl Iterator<Item = &Measure> {
        self.rows[label][state].iter().map(|&i| self.pool.get(i))
    }

    pub fn is_image_finite(&self) -> bool {
        true
    }

    fn check_label(&self, label: usize) -> Result<()> {
        if label >= self.labels.len() {
            return Err(domain(format!("unknown label index {label}")));
        }
        Ok(())
    }

    /// `T_a^{-1}(H_ξ) = {s : T_a(s) ∩ ξ ≠ ∅}` for `ξ` a subset of the pool.
    pub fn hit_preimage(&self, label: usize, xi: &StateSet) -> Result<StateSet> {
        self.check_label(label)?;
        if xi.width() != self.pool.len() {
            return Err(domain("ξ is not a subset of the model's measure pool"));
        }
        Ok(self.hit_preimage_unchecked(label, xi))
    }

    pub(crate) fn hit_preimage_unchecked(&self, label: usize, xi: &StateSet) -> StateSet {
        let mut out = StateSet::empty(self.num_states());
        for (s, row) in self.rows[label].iter().enumerate() {
            if row.iter().any(|&i| xi.contains(i)) {
                out.insert(s);
            }
        }
        out
    }

    /// True iff every transition measure is a Dirac measure.
    pub fn is_non_probabilistic(&self) -> bool {
        self.pool.iter().all(|mu| mu.dirac_atom().is_some())
    }

    /// `⟨a⟩Q`: states with a Dirac transition into the measurable set `Q`.
    pub fn diamond(&self, label: usize, q: &StateSet) -> Result<StateSet> {
        self.check_label(label)?;
        if !self.is_non_probabilistic() {
            return Err(precondition("diamond requires a non-probabilistic model"));
        }
        if !self.sigma.is_measurable(q)? {
            return Err(domain("diamond target set must be measurable"));
        }
        let mut out = StateSet::empty(self.num_states());
        for (s, row) in self.rows[label].iter().enumerate() {
            let hits = row.iter().any(|&i| {
                let atom = self
                    .pool
                    .get(i)
                    .dirac_atom()
                    .expect("checked non-probabilistic");
                q.contains(self.sigma.atoms().block(atom)[0])
            });
            if hits {
                out.insert(s);
            }
        }
        Ok(out)
    }

    /// Per-class check that every hit preimage of a `Δ(Λ)`-trace set is
    /// `Λ`-measurable. Returns the first failure in label order, then class
    /// order. `lambda` must be a sub-σ-algebra of the model's σ-algebra.
    pub(crate) fn stability_violation(&self, lambda: &SigmaAlgebra) -> Option<PreimageWitness> {
        let classes = self.pool.trace_classes_unchecked(lambda);
        for a in 0..self.num_labels() {
            for b in 0..classes.len() {
                let xi = classes.block_set(b);
                let pre = self.hit_preimage_unchecked(a, &xi);
                if !lambda.atoms().saturates(&pre) {
                    return Some(PreimageWitness {
                        label: a,
                        xi: xi.to_vec(),
                        preimage: pre,
                    });
                }
            }
        }
        None
    }

    /// The same check as [`Nlmp::stability_violation`], enumerating every
    /// union of profile classes.
    pub(crate) fn stability_violation_exhaustive(
        &self,
        lambda: &SigmaAlgebra,
    ) -> Result<Option<PreimageWitness>> {
        let classes = self.pool.trace_classes_unchecked(lambda);
        for_each_union(&classes, self.pool.len(), |xi| {
            for a in 0..self.num_labels() {
                let pre = self.hit_preimage_unchecked(a, xi);
                if !lambda.atoms().saturates(&pre) {
                    return Some(PreimageWitness {
                        label: a,
                        xi: xi.to_vec(),
                        preimage: pre,
                    });
                }
            }
            None
        })
    }

    /// Structural and measurability validation.
    pub fn validate(&self) -> ValidationReport {
        let mut findings = Vec::new();
        for (i, mu) in self.pool.iter().enumerate() {
            let total: crate::Rational = mu.weights().iter().sum();
            if *mu.sigma().as_ref() != *self.sigma || !num_traits::One::is_one(&total) {
                findings.push(Finding {
                    severity: Severity::Error,
                    location: Location::Measure(i),
                    message:
                        "transition measure is not a probability measure over the model's σ-algebra"
                            .into(),
                });
            }
        }
        if let Some(w) = self.stability_violation(&self.sigma) {
            let universe = self.universe();
            findings.push(Finding {
                severity: Severity::Error,
                message: format!(
                    "label `{}`: preimage {} of the measure set {:?} is not measurable",
                    self.labels[w.label],
                    universe.format_set(&w.preimage),
                    w.xi
                ),
                location: Location::Preimage(w),
            });
        }
        for (a, label) in self.labels.iter().enumerate() {
            if self.rows[a].iter().all(Vec::is_empty) {
                findings.push(Finding {
                    severity: Severity::Warning,
                    location: Location::Label(a),
                    message: format!("label `{label}` is never enabled"),
                });
            }
        }
        ValidationReport { findings }
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        let first = report.errors().next().map(|f| f.message.clone());
        match first {
            Some(message) => Err(precondition(format!("invalid model: {message}"))),
            None => Ok(()),
        }
    }
}

/// Calls `f` on every union of blocks of `classes` (as a subset of
/// `{0, .., width-1}`), stopping at the first `Some`.
pub(crate) fn for_each_union<T>(
    classes: &Partition,
    width: usize,
    mut f: impl FnMut(&StateSet) -> Option<T>,
) -> Result<Option<T>> {
    let k = classes.len();
    if k > EXHAUSTIVE_CLASS_LIMIT {
        return Err(Error::Unsupported(format!(
            "{k} classes exceed the exhaustive enumeration limit of {EXHAUSTIVE_CLASS_LIMIT}"
        )));
    }
    let sets: Vec<StateSet> = (0..k)
        .map(|b| StateSet::from_indices(width, classes.block(b).iter().copied()))
        .collect();
    for mask in 0u32..(1u32 << k) {
        let mut xi = StateSet::empty(width);
        for (b, set) in sets.iter().enumerate() {
            if mask & (1 << b) != 0 {
                xi.union_with(set);
            }
        }
        if let Some(t) = f(&xi) {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

pub fn nlmp_validate(m: &Nlmp) -> ValidationReport {
    m.validate()
}

pub fn hit_preimage(m: &Nlmp, label: usize, xi: &StateSet) -> Result<StateSet> {
    m.hit_preimage(label, xi)
}

pub fn is_non_probabilistic(m: &Nlmp) -> bool {
    m.is_non_probabilistic()
}

pub fn diamond(m: &Nlmp, label: usize, q: &StateSet) -> Result<StateSet> {
    m.diamond(label, q)
}

/// A set of measures `ξ` (pool indices) whose hit preimage under a label
/// is not measurable in the σ-algebra under test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageWitness {
    pub label: usize,
    pub xi: Vec<usize>,
    pub preimage: StateSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Measure(usize),
    Transition { state: usize, label: usize },
    Label(usize),
    Preimage(PreimageWitness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub location: Location,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
    }

    pub fn preimage_witness(&self) -> Option<&PreimageWitness> {
        self.findings.iter().find_map(|f| match &f.location {
            Location::Preimage(w) => Some(w),
            _ => None,
        })
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            let sev = match finding.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{sev}: {}", finding.message)?;
        }
        Ok(())
    }
}

/// A labeled Markov process: at most one kernel measure per state and
/// label. An absent kernel is the zero sub-probability measure: the label is
/// disabled at that state.
#[derive(Debug, Clone)]
pub struct Lmp {
    sigma: Arc<SigmaAlgebra>,
    labels: Vec<String>,
    /// `kernels[a][s] = τ_a(s)`.
    kernels: Vec<Vec<Option<Measure>>>,
}

impl Lmp {
    pub fn new(
        sigma: Arc<SigmaAlgebra>,
        labels: Vec<String>,
        kernels: Vec<Vec<Option<Measure>>>,
    ) -> Result<Self> {
        if kernels.len() != labels.len() {
            return Err(precondition("one kernel per label is required"));
        }
        for (a, rows) in kernels.iter().enumerate() {
            if rows.len() != sigma.len() {
                return Err(precondition(format!(
                    "label `{}` must have one entry per state",
                    labels[a]
                )));
            }
            if rows
                .iter()
                .flatten()
                .any(|mu| *mu.sigma().as_ref() != *sigma)
            {
                return Err(domain("kernel measure is not over the model's σ-algebra"));
            }
        }
        Ok(Lmp {
            sigma,
            labels,
            kernels,
        })
    }

    pub fn sigma(&self) -> &Arc<SigmaAlgebra> {
        &self.sigma
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_states(&self) -> usize {
        self.sigma.len()
    }

    pub fn kernel(&self, label: usize, state: usize) -> Option<&Measure> {
        self.kernels[label][state].as_ref()
    }

    /// `τ_a(s)(Q)`, zero when the label is disabled.
    fn value(&self, label: usize, state: usize, q: &StateSet) -> crate::Rational {
        match &self.kernels[label][state] {
            Some(mu) => mu.eval(q).expect("caller passes measurable sets"),
            None => crate::rational::zero(),
        }
    }

    /// Curried measurability: for every label and every atom `Q`, the level
    /// sets of `s ↦ τ_a(s)(Q)` are measurable, and so is the set of states
    /// where the label is enabled. Atoms suffice because two measures that
    /// differ anywhere differ on an atom.
    pub fn validate(&self) -> ValidationReport {
        let mut findings = Vec::new();
        let n = self.num_states();
        let whole = StateSet::full(n);
        'labels: for a in 0..self.labels.len() {
            let tests = (0..self.sigma.num_atoms())
                .map(|q| self.sigma.atom_set(q))
                .chain([whole.clone()]);
            for q in tests {
                let values: Vec<crate::Rational> = (0..n).map(|s| self.value(a, s, &q)).collect();
                let levels = Partition::from_keys(&values);
                for level in levels.blocks() {
                    let set = StateSet::from_indices(n, level.iter().copied());
                    if !self.sigma.atoms().saturates(&set) {
                        let universe = self.sigma.universe();
                        findings.push(Finding {
                            severity: Severity::Error,
                            location: Location::Transition {
                                state: level[0],
                                label: a,
                            },
                            message: format!(
                                "label `{}`: level set {} of the kernel on {} is not measurable",
                                self.labels[a],
                                universe.format_set(&set),
                                universe.format_set(&q)
                            ),
                        });
                        continue 'labels;
                    }
                }
            }
        }
        ValidationReport { findings }
    }

    /// The encoding `T_a(s) = {τ_a(s)}`, or `∅` where the label is disabled.
    pub fn embed(&self) -> Nlmp {
        let mut b = Nlmp::builder(self.sigma.clone(), self.labels.iter().cloned())
            .expect("labels were validated on construction");
        for (a, rows) in self.kernels.iter().enumerate() {
            for (s, mu) in rows.iter().enumerate() {
                if let Some(mu) = mu {
                    b.add(s, a, mu.clone()).expect("kernel shape was validated");
                }
            }
        }
        b.build()
    }

    /// The largest state bisimulation: greatest fixpoint of
    /// `R ↦ {(s,t) ∈ R : ∀a ∀Q ∈ Σ(R). τ_a(s)(Q) = τ_a(t)(Q)}`.
    pub fn state_bisimilarity(&self) -> Partition {
        let n = self.num_states();
        let mut current = Partition::total(n);
        loop {
            let relation = crate::measurable::Relation::from_partition(&current);
            let sigma_r = self
                .sigma
                .of_relation(&relation)
                .expect("equivalences are symmetric");
            let atom_sets: Vec<StateSet> = (0..sigma_r.num_atoms())
                .map(|q| sigma_r.atom_set(q))
                .collect();
            let keys: Vec<Vec<crate::Rational>> = (0..n)
                .map(|s| {
                    (0..self.labels.len())
                        .flat_map(|a| atom_sets.iter().map(move |q| self.value(a, s, q)))
                        .collect()
                })
                .collect();
            let next = current.refine_by(&keys);
            if next == current {
                return current;
            }
            current = next;
        }
    }
}

pub fn lmp_embed(l: &Lmp) -> Nlmp {
    l.embed()
}
