//! Exhaustive enumeration of small combinatorial objects, used as oracles.

use std::sync::Arc;

use crate::measurable::{Partition, Relation, SigmaAlgebra};

/// All set partitions of `0..n` in restricted-growth order; there are
/// Bell(n) of them.
pub fn set_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut keys = vec![0usize; n];
    fn go(i: usize, max: usize, keys: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if i == keys.len() {
            out.push(Partition::from_keys(keys));
            return;
        }
        for k in 0..=max + 1 {
            keys[i] = k;
            go(i + 1, max.max(k), keys, out);
        }
    }
    if n == 0 {
        return out;
    }
    go(1, 0, &mut keys, &mut out);
    out
}

/// All symmetric relations on `0..n`: `2^(n(n+1)/2)` of them.
pub fn symmetric_relations(n: usize) -> impl Iterator<Item = Relation> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|s| (s..n).map(move |t| (s, t))).collect();
    assert!(slots.len() < 64, "too many relations to enumerate");
    (0u64..1 << slots.len()).map(move |mask| {
        Relation::symmetric_from_pairs(
            n,
            slots
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p),
        )
    })
}

/// All sub-σ-algebras of `sigma`, one per set partition of its atoms.
pub fn sub_sigma_algebras(sigma: &SigmaAlgebra) -> Vec<SigmaAlgebra> {
    let atoms = sigma.atoms();
    set_partitions(atoms.len())
        .into_iter()
        .map(|p| {
            let keys: Vec<usize> = (0..atoms.width())
                .map(|s| p.block_of(atoms.block_of(s)))
                .collect();
            SigmaAlgebra::from_atoms(Arc::clone(sigma.universe()), Partition::from_keys(&keys))
                .expect("width matches")
        })
        .collect()
}
