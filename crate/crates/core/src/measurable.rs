//! Finite measurable spaces.
//!
//! A σ-algebra on a finite universe is determined by its atoms, the minimal
//! non-empty measurable sets, which partition the universe. Every structure
//! here is stored through that partition: a set is measurable iff it is a
//! union of atoms, and one σ-algebra is contained in another iff its atoms
//! are unions of the other's atoms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, precondition, Result};
use crate::stateset::StateSet;

/// The ordered, finite state space. Identifiers are opaque tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Universe {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(domain("universe must be non-empty"));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(domain(format!("duplicate state identifier `{name}`")));
            }
        }
        Ok(Universe { names, index })
    }

    /// A universe `0, 1, .., n-1` named by the decimal indices.
    pub fn numbered(n: usize) -> Result<Self> {
        Universe::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| domain(format!("unknown state `{name}`")))
    }

    pub fn set_of<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<StateSet> {
        let mut set = StateSet::empty(self.len());
        for name in names {
            set.insert(self.lookup(name)?);
        }
        Ok(set)
    }

    pub fn format_set(&self, set: &StateSet) -> String {
        let names: Vec<&str> = set.iter().map(|s| self.name(s)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// A partition of `{0, .., n-1}` in canonical form: every block is sorted and
/// blocks are ordered by their least element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Groups elements by key; elements with equal keys share a block.
    pub fn from_keys<K: Eq + std::hash::Hash>(keys: &[K]) -> Self {
        let mut seen: HashMap<&K, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(keys.len());
        for (i, key) in keys.iter().enumerate() {
            let b = *seen.entry(key).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
            block_of.push(b);
        }
        Partition { blocks, block_of }
    }

    pub fn from_blocks(width: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut key = vec![usize::MAX; width];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(domain("partition blocks must be non-empty"));
            }
            for &s in block {
                if s >= width {
                    return Err(domain(format!(
                        "element {s} outside universe of width {width}"
                    )));
                }
                if key[s] != usize::MAX {
                    return Err(domain(format!("element {s} appears in two blocks")));
                }
                key[s] = b;
            }
        }
        if key.contains(&usize::MAX) {
            return Err(domain("partition blocks do not cover the universe"));
        }
        Ok(Partition::from_keys(&key))
    }

    pub fn discrete(width: usize) -> Self {
        Partition {
            blocks: (0..width).map(|i| vec![i]).collect(),
            block_of: (0..width).collect(),
        }
    }

    pub fn total(width: usize) -> Self {
        let blocks = if width == 0 {
            vec![]
        } else {
            vec![(0..width).collect()]
        };
        Partition {
            blocks,
            block_of: vec![0; width],
        }
    }

    pub fn width(&self) -> usize {
        self.block_of.len()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn block_of(&self, s: usize) -> usize {
        self.block_of[s]
    }

    pub fn block_index(&self) -> &[usize] {
        &self.block_of
    }

    pub fn same_block(&self, s: usize, t: usize) -> bool {
        self.block_of[s] == self.block_of[t]
    }

    pub fn block_set(&self, b: usize) -> StateSet {
        StateSet::from_indices(self.width(), self.blocks[b].iter().copied())
    }

    /// True iff every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.width() == coarser.width()
            && self.blocks.iter().all(|block| {
                let b = coarser.block_of[block[0]];
                block.iter().all(|&s| coarser.block_of[s] == b)
            })
    }

    /// The coarsest common refinement.
    pub fn meet(&self, other: &Partition) -> Partition {
        let keys: Vec<(usize, usize)> = (0..self.width())
            .map(|s| (self.block_of[s], other.block_of[s]))
            .collect();
        Partition::from_keys(&keys)
    }

    /// Splits every block by the given per-element key.
    pub fn refine_by<K: Eq + std::hash::Hash + Clone>(&self, keys: &[K]) -> Partition {
        let combined: Vec<(usize, K)> = (0..self.width())
            .map(|s| (self.block_of[s], keys[s].clone()))
            .collect();
        Partition::from_keys(&combined)
    }

    /// True iff `set` is a union of blocks.
    pub fn saturates(&self, set: &StateSet) -> bool {
        self.blocks.iter().all(|block| {
            let inside = set.contains(block[0]);
            block.iter().all(|&s| set.contains(s) == inside)
        })
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.blocks.iter()).finish()
    }
}

/// A σ-algebra on a finite universe, stored as its atom partition.
#[derive(Clone, PartialEq, Eq)]
pub struct SigmaAlgebra {
    universe: Arc<Universe>,
    atoms: Partition,
}

impl fmt::Debug for SigmaAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SigmaAlgebra{:?}", self.atoms)
    }
}

impl SigmaAlgebra {
    pub fn from_atoms(universe: Arc<Universe>, atoms: Partition) -> Result<Self> {
        if atoms.width() != universe.len() {
            return Err(domain("atom partition does not match the universe"));
        }
        Ok(SigmaAlgebra { universe, atoms })
    }

    pub fn powerset(universe: Arc<Universe>) -> Self {
        let atoms = Partition::discrete(universe.len());
        SigmaAlgebra { universe, atoms }
    }

    pub fn trivial(universe: Arc<Universe>) -> Self {
        let atoms = Partition::total(universe.len());
        SigmaAlgebra { universe, atoms }
    }

    /// The smallest σ-algebra containing every generator: the coarsest
    /// partition in which each generator is a union of atoms.
    pub fn generate(universe: Arc<Universe>, generators: &[StateSet]) -> Result<Self> {
        let n = universe.len();
        let mut atoms = Partition::total(n);
        for g in generators {
            if g.width() != n {
                return Err(domain("generator is not a subset of the universe"));
            }
            let keys: Vec<bool> = (0..n).map(|s| g.contains(s)).collect();
            atoms = atoms.refine_by(&keys);
        }
        Ok(SigmaAlgebra { universe, atoms })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn atoms(&self) -> &Partition {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_of(&self, s: usize) -> usize {
        self.atoms.block_of(s)
    }

    pub fn atom_set(&self, a: usize) -> StateSet {
        self.atoms.block_set(a)
    }

    pub fn is_powerset(&self) -> bool {
        self.atoms.len() == self.universe.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.atoms.len() <= 1
    }

    fn check_width(&self, q: &StateSet) -> Result<()> {
        if q.width() != self.len() {
            return Err(domain("set is not a subset of the universe"));
        }
        Ok(())
    }

    pub fn is_measurable(&self, q: &StateSet) -> Result<bool> {
        self.check_width(q)?;
        Ok(self.atoms.saturates(q))
    }

    /// Atom indices of a measurable set.
    pub fn atoms_in(&self, q: &StateSet) -> Result<Vec<usize>> {
        if !self.is_measurable(q)? {
            return Err(domain(format!(
                "set {} is not measurable",
                self.universe.format_set(q)
            )));
        }
        Ok((0..self.num_atoms())
            .filter(|&a| q.contains(self.atoms.block(a)[0]))
            .collect())
    }

    /// The measurable set made of the given atoms.
    pub fn union_of_atoms<I: IntoIterator<Item = usize>>(&self, atoms: I) -> StateSet {
        let mut set = StateSet::empty(self.len());
        for a in atoms {
            for &s in self.atoms.block(a) {
                set.insert(s);
            }
        }
        set
    }

    /// True iff `self` is a sub-σ-algebra of `sigma`.
    pub fn is_sub_of(&self, sigma: &SigmaAlgebra) -> Result<bool> {
        if self.universe != sigma.universe && *self.universe != *sigma.universe {
            return Err(domain("σ-algebras live on different universes"));
        }
        Ok(sigma.atoms.refines(&self.atoms))
    }

    /// The sub-σ-algebra of `R`-closed measurable sets, for symmetric `R`.
    ///
    /// Its atoms are the connected components of the graph whose vertices are
    /// the atoms of `self`, with an edge between two atoms whenever `R`
    /// relates a state of one to a state of the other.
    pub fn of_relation(&self, r: &Relation) -> Result<SigmaAlgebra> {
        if r.width() != self.len() {
            return Err(domain("relation and σ-algebra live on different universes"));
        }
        if !r.is_symmetric() {
            return Err(precondition("relation must be symmetric"));
        }
        let k = self.num_atoms();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (s, t) in r.pairs() {
            let (a, b) = (
                find(&mut parent, self.atom_of(s)),
                find(&mut parent, self.atom_of(t)),
            );
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let keys: Vec<usize> = (0..self.len())
            .map(|s| find(&mut parent, self.atom_of(s)))
            .collect();
        Ok(SigmaAlgebra {
            universe: self.universe.clone(),
            atoms: Partition::from_keys(&keys),
        })
    }

    /// The inseparability relation: `s ~ t` iff no measurable set contains
    /// exactly one of them. Its classes are the atoms.
    pub fn relation(&self) -> Relation {
        Relation::from_partition(&self.atoms)
    }
}

/// `σ(𝒢)`: the σ-algebra generated by a family of sets.
pub fn sigma_generate(universe: Arc<Universe>, generators: &[StateSet]) -> Result<SigmaAlgebra> {
    SigmaAlgebra::generate(universe, generators)
}

pub fn is_measurable(sigma: &SigmaAlgebra, q: &StateSet) -> Result<bool> {
    sigma.is_measurable(q)
}

/// True iff the `R`-image of `q` stays inside `q`.
pub fn is_r_closed(r: &Relation, q: &StateSet) -> Result<bool> {
    if q.width() != r.width() {
        return Err(domain("set is not a subset of the relation's universe"));
    }
    Ok(q.iter().all(|s| r.image_of(s).is_subset(q)))
}

pub fn sigma_of_relation(sigma: &SigmaAlgebra, r: &Relation) -> Result<SigmaAlgebra> {
    sigma.of_relation(r)
}

pub fn relation_of_sigma(lambda: &SigmaAlgebra) -> Relation {
    lambda.relation()
}

pub fn sigma_is_sub(lambda: &SigmaAlgebra, sigma: &SigmaAlgebra) -> Result<bool> {
    lambda.is_sub_of(sigma)
}

/// A binary relation on `{0, .., n-1}`, stored as one successor row per
/// element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<StateSet>,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

impl Relation {
    pub fn empty(width: usize) -> Self {
        Relation {
            rows: vec![StateSet::empty(width); width],
        }
    }

    pub fn identity(width: usize) -> Self {
        let mut r = Relation::empty(width);
        for s in 0..width {
            r.insert(s, s);
        }
        r
    }

    pub fn total(width: usize) -> Self {
        Relation {
            rows: vec![StateSet::full(width); width],
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(width: usize, pairs: I) -> Self {
        let mut r = Relation::empty(width);
        for (s, t) in pairs {
            r.insert(s, t);
        }
        r
    }

    /// The symmetric closure of the given pairs.
    pub fn symmetric_from_pairs<I: IntoIterator<Item = (usize, usize)>>(
        width: usize,
        pairs: I,
    ) -> Self {
        let mut r = Relation::empty(width);
        for (s, t) in pairs {
            r.insert(s, t);
            r.insert(t, s);
        }
        r
    }

    /// The equivalence relation whose classes are the blocks.
    pub fn from_partition(p: &Partition) -> Self {
        let mut r = Relation::empty(p.width());
        for b in 0..p.len() {
            let set = p.block_set(b);
            for &s in p.block(b) {
                r.rows[s] = set.clone();
            }
        }
        r
    }

    pub fn width(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, s: usize, t: usize) {
        self.rows[s].insert(t);
    }

    pub fn remove(&mut self, s: usize, t: usize) {
        self.rows[s].remove(t);
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.rows[s].contains(t)
    }

    pub fn image_of(&self, s: usize) -> &StateSet {
        &self.rows[s]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().map(move |t| (s, t)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(StateSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(StateSet::is_empty)
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(s, t)| self.contains(t, s))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.width()).all(|s| self.contains(s, s))
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs()
            .all(|(s, t)| self.rows[t].is_subset(&self.rows[s]))
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.width() == other.width()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.is_subset(b))
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.union(b))
                .collect(),
        }
    }

    /// Relational composition: `s (self;other) u` iff `s self t other u` for some `t`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let mut out = Relation::empty(self.width());
        for (s, row) in self.rows.iter().enumerate() {
            for t in row.iter() {
                out.rows[s].union_with(&other.rows[t]);
            }
        }
        out
    }

    /// The classes of an equivalence relation; `None` if it is not one.
    pub fn classes(&self) -> Option<Partition> {
        if !self.is_equivalence() {
            return None;
        }
        let keys: Vec<usize> = self
            .rows
            .iter()
            .map(|row| row.iter().next().unwrap_or(0))
            .collect();
        Some(Partition::from_keys(&keys))
    }
}
