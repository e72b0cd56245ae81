//! Exact probability measures on finite σ-algebras.
//!
//! The σ-algebra of measures `Δ(Λ)` is uncountable and is never built.
//! What the rest of the crate needs is its trace on a finite pool of
//! measures, and that trace is determined by profiles: the vector of a
//! measure's values on the atoms of `Λ`. Because `Δ(Λ)` separates
//! measures that differ on some `Λ`-measurable set, the pool-trace of
//! `Δ(Λ)` is exactly the family of unions of equal-profile classes.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{domain, precondition, Result};
use crate::measurable::{Partition, SigmaAlgebra};
use crate::rational::{format_rational, in_unit_interval, Rational};
use crate::stateset::StateSet;

/// A probability measure, given by its weight on each atom of its σ-algebra.
#[derive(Clone)]
pub struct Measure {
    sigma: Arc<SigmaAlgebra>,
    weights: Vec<Rational>,
}

impl PartialEq for Measure {
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights
            && (Arc::ptr_eq(&self.sigma, &other.sigma) || self.sigma == other.sigma)
    }
}

impl Eq for Measure {}

impl Hash for Measure {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.weights.hash(state);
    }
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let universe = self.sigma.universe();
        let parts: Vec<String> = self
            .weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(a, w)| {
                let atom = self.sigma.atom_set(a);
                format!("{}:{}", universe.format_set(&atom), format_rational(w))
            })
            .collect();
        write!(f, "Measure({})", parts.join(" "))
    }
}

impl Measure {
    /// Builds a measure from one weight per atom. Weights must be
    /// non-negative and sum to exactly one.
    pub fn from_atom_weights(sigma: Arc<SigmaAlgebra>, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != sigma.num_atoms() {
            return Err(domain(format!(
                "expected {} atom weights, got {}",
                sigma.num_atoms(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !in_unit_interval(w)) {
            return Err(domain(format!(
                "weight {} outside [0,1]",
                format_rational(w)
            )));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(domain(format!(
                "weights sum to {}",
                format_rational(&total)
            )));
        }
        Ok(Measure { sigma, weights })
    }

    /// Builds a measure from weights on individual states; weights inside an
    /// atom are added up, since the measure cannot see finer than its atoms.
    pub fn from_state_weights<I>(sigma: Arc<SigmaAlgebra>, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut atom_weights = vec![Rational::zero(); sigma.num_atoms()];
        for (s, w) in weights {
            if s >= sigma.len() {
                return Err(domain(format!("unknown state index {s}")));
            }
            if w.is_negative() {
                return Err(domain(format!("negative weight {}", format_rational(&w))));
            }
            atom_weights[sigma.atom_of(s)] += w;
        }
        Measure::from_atom_weights(sigma, atom_weights)
    }

    /// The Dirac measure at `s`.
    pub fn dirac(sigma: Arc<SigmaAlgebra>, s: usize) -> Result<Self> {
        if s >= sigma.len() {
            return Err(domain(format!("unknown state index {s}")));
        }
        let mut weights = vec![Rational::zero(); sigma.num_atoms()];
        weights[sigma.atom_of(s)] = Rational::one();
        Ok(Measure { sigma, weights })
    }

    pub fn sigma(&self) -> &Arc<SigmaAlgebra> {
        &self.sigma
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn atom_weight(&self, atom: usize) -> &Rational {
        &self.weights[atom]
    }

    /// The measure of a measurable set.
    pub fn eval(&self, q: &StateSet) -> Result<Rational> {
        Ok(self
            .sigma
            .atoms_in(q)?
            .into_iter()
            .map(|a| &self.weights[a])
            .sum())
    }

    /// The atom carrying all the mass, if this is a Dirac measure.
    pub fn dirac_atom(&self) -> Option<usize> {
        self.weights.iter().position(One::is_one)
    }

    /// Values on the atoms of a sub-σ-algebra, in atom order.
    pub fn profile(&self, lambda: &SigmaAlgebra) -> Result<Profile> {
        if !lambda.is_sub_of(&self.sigma)? {
            return Err(precondition(
                "profile σ-algebra is not a sub-σ-algebra of the measure's",
            ));
        }
        Ok(self.profile_unchecked(lambda))
    }

    pub(crate) fn profile_unchecked(&self, lambda: &SigmaAlgebra) -> Profile {
        let mut values = vec![Rational::zero(); lambda.num_atoms()];
        for (a, block) in self.sigma.atoms().blocks().iter().enumerate() {
            values[lambda.atom_of(block[0])] += &self.weights[a];
        }
        Profile(values)
    }
}

pub fn measure_eval(mu: &Measure, q: &StateSet) -> Result<Rational> {
    mu.eval(q)
}

pub fn dirac(sigma: Arc<SigmaAlgebra>, s: usize) -> Result<Measure> {
    Measure::dirac(sigma, s)
}

/// A Borel bound on a probability value, restricted to the shapes the
/// logic uses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoundSpec {
    AtLeast(Rational),
    Greater(Rational),
    Less(Rational),
    AtMost(Rational),
    /// The open interval `(lo, hi)`.
    Open(Rational, Rational),
}

impl BoundSpec {
    pub fn open(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(domain("interval bounds out of order"));
        }
        Ok(BoundSpec::Open(lo, hi))
    }

    pub fn contains(&self, v: &Rational) -> bool {
        match self {
            BoundSpec::AtLeast(q) => v >= q,
            BoundSpec::Greater(q) => v > q,
            BoundSpec::Less(q) => v < q,
            BoundSpec::AtMost(q) => v <= q,
            BoundSpec::Open(lo, hi) => lo < v && v < hi,
        }
    }
}

/// `μ ∈ Δ^B(Q)`.
pub fn in_delta_set(mu: &Measure, q: &StateSet, b: &BoundSpec) -> Result<bool> {
    Ok(b.contains(&mu.eval(q)?))
}

/// A measure's values on the atoms of a reference σ-algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile(pub Vec<Rational>);

pub fn profile(mu: &Measure, lambda: &SigmaAlgebra) -> Result<Profile> {
    mu.profile(lambda)
}

/// `μ R μ'` for the lifted relation: equal values on every set of `sigma_r`.
pub fn measures_related(mu: &Measure, nu: &Measure, sigma_r: &SigmaAlgebra) -> Result<bool> {
    Ok(mu.profile(sigma_r)? == nu.profile(sigma_r)?)
}

/// Constructive separation of two distinct measures by a Giry generator:
/// an atom `A` and a bound `b` with `μ ∈ Δ^b(A)` and `ν ∉ Δ^b(A)`.
pub fn separating_generator(mu: &Measure, nu: &Measure) -> Option<(usize, BoundSpec)> {
    mu.weights
        .iter()
        .zip(&nu.weights)
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(atom, (a, b))| {
            if a > b {
                (atom, BoundSpec::AtLeast(a.clone()))
            } else {
                (atom, BoundSpec::AtMost(a.clone()))
            }
        })
}

/// A finite, duplicate-free, ordered set of measures over one σ-algebra.
#[derive(Debug, Clone)]
pub struct MeasurePool {
    sigma: Arc<SigmaAlgebra>,
    measures: Vec<Measure>,
}

impl MeasurePool {
    pub fn new(sigma: Arc<SigmaAlgebra>) -> Self {
        MeasurePool {
            sigma,
            measures: Vec::new(),
        }
    }

    pub fn from_measures<I: IntoIterator<Item = Measure>>(
        sigma: Arc<SigmaAlgebra>,
        measures: I,
    ) -> Result<Self> {
        let mut pool = MeasurePool::new(sigma);
        for mu in measures {
            pool.insert(mu)?;
        }
        Ok(pool)
    }

    /// Adds a measure unless an equal one is present; returns its index.
    pub fn insert(&mut self, mu: Measure) -> Result<usize> {
        if *mu.sigma != *self.sigma {
            return Err(domain("measure is not over the pool's σ-algebra"));
        }
        if let Some(i) = self.index_of(&mu) {
            return Ok(i);
        }
        self.measures.push(mu);
        Ok(self.measures.len() - 1)
    }

    pub fn index_of(&self, mu: &Measure) -> Option<usize> {
        self.measures.iter().position(|m| m.weights == mu.weights)
    }

    pub fn sigma(&self) -> &Arc<SigmaAlgebra> {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn get(&self, i: usize) -> &Measure {
        &self.measures[i]
    }

    pub fn measures(&self) -> &[Measure] {
        &self.measures
    }

    pub fn iter(&self) -> impl Iterator<Item = &Measure> {
        self.measures.iter()
    }

    /// Groups pool indices by equal profile over `lambda`.
    pub fn trace_classes(&self, lambda: &SigmaAlgebra) -> Result<Partition> {
        if !lambda.is_sub_of(&self.sigma)? {
            return Err(precondition(
                "σ-algebra is not a sub-σ-algebra of the pool's",
            ));
        }
        Ok(self.trace_classes_unchecked(lambda))
    }

    pub(crate) fn trace_classes_unchecked(&self, lambda: &SigmaAlgebra) -> Partition {
        let profiles: Vec<Profile> = self
            .measures
            .iter()
            .map(|m| m.profile_unchecked(lambda))
            .collect();
        Partition::from_keys(&profiles)
    }

    /// The pool-trace of `Δ^b(Q)`.
    pub fn delta_trace(&self, q: &StateSet, b: &BoundSpec) -> Result<StateSet> {
        let mut out = StateSet::empty(self.len());
        for (i, mu) in self.measures.iter().enumerate() {
            if in_delta_set(mu, q, b)? {
                out.insert(i);
            }
        }
        Ok(out)
    }
}

pub fn trace_classes(pool: &MeasurePool, lambda: &SigmaAlgebra) -> Result<Partition> {
    pool.trace_classes(lambda)
}
