//! Intervals of the permutation containment poset, chains and maximal chains.
//!
//! An interval `[σ, π]` is built by standardizing every position subset of
//! `π` of size at least `|σ|`. Strict down-sets are stored as bitsets: the
//! down-set of `z` is the union over one-point deletions `c` of `{c}` and the
//! down-set of `c`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use fixedbitset::FixedBitSet;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Default largest host size for interval construction.
pub const DEFAULT_INTERVAL_CAP: usize = 14;

static INTERVAL_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_INTERVAL_CAP);

pub fn interval_cap() -> usize {
    INTERVAL_CAP.load(Ordering::Relaxed)
}

/// Override the host-size cap used by [`build_interval`] and everything
/// built on top of it. Runtime and memory grow as `2^cap`.
pub fn set_interval_cap(cap: usize) {
    INTERVAL_CAP.store(cap.clamp(1, 30), Ordering::Relaxed);
}

// below this host size the subset sweep runs on the calling thread
const PARALLEL_THRESHOLD: usize = 12;

/// The closed interval `[bottom, top]`, stratified by size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub bottom: Permutation,
    pub top: Permutation,
    pub strata: BTreeMap<usize, Vec<Permutation>>,
}

impl Interval {
    /// Number of elements.
    pub fn len(&self) -> usize {
        self.strata.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn contains(&self, lam: &Permutation) -> bool {
        self.strata
            .get(&lam.size())
            .is_some_and(|s| s.binary_search(lam).is_ok())
    }

    /// Elements in increasing size, lexicographic within a size.
    pub fn iter(&self) -> impl Iterator<Item = &Permutation> {
        self.strata.values().flatten()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("interval serializes")
    }
}

/// Build `[sigma, pi]`. Empty when `pi` does not contain `sigma`.
pub fn build_interval(sigma: &Permutation, pi: &Permutation) -> Result<Interval> {
    Ok(IntervalPoset::build(sigma, pi)?.to_interval(sigma, pi))
}

pub fn interval_contains(iv: &Interval, lam: &Permutation) -> bool {
    iv.contains(lam)
}

/// A chain `x_0 < x_1 < … < x_k` in the containment order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Chain {
    pub elements: Vec<Permutation>,
}

impl Chain {
    /// `ℓ(C) = |C| - 1`.
    pub fn length(&self) -> usize {
        self.elements.len() - 1
    }
}

/// A finite poset of permutations with strict down-sets and up-sets as
/// bitsets over element indices.
///
/// Elements are kept in a linear extension: every strict down-set of element
/// `i` only holds indices smaller than `i`. For an interval the bottom is
/// index 0 and the top is the last index.
#[derive(Clone, Debug)]
pub struct IntervalPoset {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    below: Vec<FixedBitSet>,
    above: Vec<FixedBitSet>,
}

fn distinct_patterns(pi: &Permutation, min_size: usize) -> HashSet<Permutation> {
    let n = pi.size();
    let full: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    let wanted = |m: &u64| m.count_ones() as usize >= min_size;
    if n < PARALLEL_THRESHOLD {
        (1..=full)
            .filter(wanted)
            .map(|m| pi.pattern_of_mask(m))
            .collect()
    } else {
        (1..=full)
            .into_par_iter()
            .filter(wanted)
            .fold(HashSet::new, |mut acc, m| {
                acc.insert(pi.pattern_of_mask(m));
                acc
            })
            .reduce(HashSet::new, |mut a, b| {
                if a.len() < b.len() {
                    return b.into_iter().chain(a).collect();
                }
                a.extend(b);
                a
            })
    }
}

impl IntervalPoset {
    /// Build `[sigma, pi]` under the global interval cap.
    pub fn build(sigma: &Permutation, pi: &Permutation) -> Result<Self> {
        Self::build_with_cap(sigma, pi, interval_cap())
    }

    pub fn build_with_cap(sigma: &Permutation, pi: &Permutation, cap: usize) -> Result<Self> {
        if pi.size() > cap {
            return Err(Error::SizeCapExceeded {
                size: pi.size(),
                cap,
            });
        }
        if sigma.size() > pi.size() || (sigma.size() == pi.size() && sigma != pi) {
            return Ok(Self::empty());
        }
        let k = sigma.size();
        let mut elements: Vec<Permutation> = distinct_patterns(pi, k).into_iter().collect();
        elements.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
        let index: HashMap<Permutation, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let Some(&root) = index.get(sigma) else {
            return Ok(Self::empty());
        };

        let total = elements.len();
        let mut below = vec![FixedBitSet::with_capacity(total); total];
        for i in 0..total {
            let z = &elements[i];
            if z.size() == k {
                continue;
            }
            let mut set = FixedBitSet::with_capacity(total);
            for d in 0..z.size() {
                let c = index[&z.delete_position(d)];
                if !set.contains(c) {
                    set.insert(c);
                    set.union_with(&below[c]);
                }
            }
            below[i] = set;
        }

        // keep only elements above sigma
        let keep: Vec<usize> = (0..total)
            .filter(|&i| i == root || below[i].contains(root))
            .collect();
        let mut remap = vec![usize::MAX; total];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let kept_below: Vec<FixedBitSet> = keep
            .iter()
            .map(|&old| {
                let mut s = FixedBitSet::with_capacity(keep.len());
                for j in below[old].ones() {
                    if remap[j] != usize::MAX {
                        s.insert(remap[j]);
                    }
                }
                s
            })
            .collect();
        let kept: Vec<Permutation> = keep.iter().map(|&i| elements[i].clone()).collect();
        Ok(Self::from_down_sets(kept, kept_below))
    }

    fn empty() -> Self {
        Self {
            elements: Vec::new(),
            index: HashMap::new(),
            below: Vec::new(),
            above: Vec::new(),
        }
    }

    fn from_down_sets(elements: Vec<Permutation>, below: Vec<FixedBitSet>) -> Self {
        let n = elements.len();
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for (i, b) in below.iter().enumerate() {
            for j in b.ones() {
                above[j].insert(i);
            }
        }
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Self {
            elements,
            index,
            below,
            above,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, x: &Permutation) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn bottom(&self) -> Option<usize> {
        (!self.is_empty()).then_some(0)
    }

    pub fn top(&self) -> Option<usize> {
        self.len().checked_sub(1)
    }

    /// Strict down-set of element `i`.
    pub fn below(&self, i: usize) -> &FixedBitSet {
        &self.below[i]
    }

    /// Strict up-set of element `i`.
    pub fn above(&self, i: usize) -> &FixedBitSet {
        &self.above[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        i == j || self.below[j].contains(i)
    }

    /// Elements `j` covering `i`: `i < j` with nothing strictly between.
    pub fn covers(&self, i: usize) -> Vec<usize> {
        self.above[i]
            .ones()
            .filter(|&j| self.above[i].intersection(&self.below[j]).next().is_none())
            .collect()
    }

    /// The same elements under the reversed order. Indices are reversed so
    /// the linear-extension property still holds.
    pub fn dual(&self) -> Self {
        let n = self.len();
        let flip = |s: &FixedBitSet| {
            let mut out = FixedBitSet::with_capacity(n);
            for j in s.ones() {
                out.insert(n - 1 - j);
            }
            out
        };
        let elements = self.elements.iter().rev().cloned().collect();
        let below = self.above.iter().rev().map(flip).collect();
        Self::from_down_sets(elements, below)
    }

    /// `μ(x_0, z)` for every element `z`, where `x_0` is element 0, from the
    /// defining recurrence over strict down-sets. Elements not above `x_0`
    /// get 0.
    pub fn mobius_from_bottom(&self) -> Vec<BigInt> {
        let mut mu = vec![BigInt::zero(); self.len()];
        if self.is_empty() {
            return mu;
        }
        mu[0] = BigInt::one();
        for z in 1..self.len() {
            if !self.below[z].contains(0) {
                continue;
            }
            let mut s = BigInt::zero();
            for y in self.below[z].ones() {
                s += &mu[y];
            }
            mu[z] = -s;
        }
        mu
    }

    /// Number of chains from the bottom to the top, both included.
    pub fn chain_count(&self) -> BigUint {
        self.count_paths(|j| self.above[j].ones().collect())
    }

    /// `Σ_C (-1)^ℓ(C)` over chains from bottom to top.
    pub fn chain_weight(&self) -> BigInt {
        if self.is_empty() {
            return BigInt::zero();
        }
        // w(y) = weight of chains from y up to the top
        let n = self.len();
        let mut w = vec![BigInt::zero(); n];
        w[n - 1] = BigInt::one();
        for y in (0..n - 1).rev() {
            let mut s = BigInt::zero();
            for z in self.above[y].ones() {
                s += &w[z];
            }
            w[y] = -s;
        }
        w.swap_remove(0)
    }

    /// Number of unrefinable chains from bottom to top.
    pub fn maximal_chain_count(&self) -> BigUint {
        self.count_paths(|j| self.covers(j))
    }

    /// Paths from bottom to top along `successors`, counted from the top down.
    fn count_paths(&self, successors: impl Fn(usize) -> Vec<usize>) -> BigUint {
        if self.is_empty() {
            return BigUint::zero();
        }
        let n = self.len();
        let mut count = vec![BigUint::zero(); n];
        count[n - 1] = BigUint::one();
        for y in (0..n - 1).rev() {
            let mut s = BigUint::zero();
            for z in successors(y) {
                s += &count[z];
            }
            count[y] = s;
        }
        count.swap_remove(0)
    }

    /// Every chain from bottom to top. Exponential; intended for small
    /// intervals and tests.
    pub fn chains(&self) -> Vec<Chain> {
        let mut out = Vec::new();
        if self.is_empty() {
            return out;
        }
        let top = self.len() - 1;
        let mut path = vec![0usize];
        self.extend_chains(&mut path, top, &mut out);
        out
    }

    fn extend_chains(&self, path: &mut Vec<usize>, top: usize, out: &mut Vec<Chain>) {
        let last = *path.last().unwrap();
        if last == top {
            out.push(Chain {
                elements: path.iter().map(|&i| self.elements[i].clone()).collect(),
            });
            return;
        }
        for next in self.above[last].ones() {
            path.push(next);
            self.extend_chains(path, top, out);
            path.pop();
        }
    }

    pub fn to_interval(&self, bottom: &Permutation, top: &Permutation) -> Interval {
        let mut strata: BTreeMap<usize, Vec<Permutation>> = BTreeMap::new();
        for e in &self.elements {
            strata.entry(e.size()).or_default().push(e.clone());
        }
        Interval {
            bottom: bottom.clone(),
            top: top.clone(),
            strata,
        }
    }
}

/// `|𝔠(σ, π)|`, the number of chains from `sigma` to `pi`.
pub fn count_chains(sigma: &Permutation, pi: &Permutation) -> Result<BigUint> {
    Ok(IntervalPoset::build(sigma, pi)?.chain_count())
}

/// `w(𝔠(σ, π))`, the signed chain count; equals `μ(σ, π)`.
pub fn chain_weight(sigma: &Permutation, pi: &Permutation) -> Result<BigInt> {
    Ok(IntervalPoset::build(sigma, pi)?.chain_weight())
}

pub fn count_maximal_chains(sigma: &Permutation, pi: &Permutation) -> Result<BigUint> {
    Ok(IntervalPoset::build(sigma, pi)?.maximal_chain_count())
}
