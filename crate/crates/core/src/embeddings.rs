//! Embeddings and normal embeddings of one permutation into another.
//!
//! Matching is a depth-first backtracker over host positions. Each pattern
//! entry is placed only between the host values of its nearest already-placed
//! neighbours in value order, which is enough to guarantee order-isomorphism.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::BigUint;
use serde::Serialize;

use crate::perm::Permutation;

/// The image of an embedding: strictly increasing 1-based host positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EmbeddingImage {
    pub host_size: usize,
    pub positions: Vec<usize>,
}

impl EmbeddingImage {
    fn from_mask(host_size: usize, mask: u64) -> Self {
        Self {
            host_size,
            positions: (0..host_size)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| i + 1)
                .collect(),
        }
    }

    /// Size of the embedded permutation.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Bits `lo..hi` (0-based, half-open).
fn range_mask(lo: usize, hi: usize) -> u64 {
    let upto = |k: usize| if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
    upto(hi) & !upto(lo)
}

struct Matcher<'a> {
    pattern: &'a [u8],
    host: &'a [u8],
    /// For entry k, the earlier entry holding the next smaller value.
    lower: Vec<Option<usize>>,
    /// For entry k, the earlier entry holding the next larger value.
    upper: Vec<Option<usize>>,
    /// Host positions every reported embedding must use.
    required: u64,
}

impl<'a> Matcher<'a> {
    fn new(sigma: &'a Permutation, pi: &'a Permutation, required: u64) -> Self {
        let pattern = sigma.values();
        let mut lower = Vec::with_capacity(pattern.len());
        let mut upper = Vec::with_capacity(pattern.len());
        for (k, &v) in pattern.iter().enumerate() {
            let earlier = pattern[..k].iter().enumerate();
            lower.push(
                earlier
                    .clone()
                    .filter(|&(_, &w)| w < v)
                    .max_by_key(|&(_, &w)| w)
                    .map(|(j, _)| j),
            );
            upper.push(
                earlier
                    .filter(|&(_, &w)| w > v)
                    .min_by_key(|&(_, &w)| w)
                    .map(|(j, _)| j),
            );
        }
        Self {
            pattern,
            host: pi.values(),
            lower,
            upper,
            required,
        }
    }

    /// Calls `visit` with the position mask of every match, in lexicographic
    /// order of the position sequences.
    fn run(&self, visit: &mut impl FnMut(u64) -> ControlFlow<()>) {
        if self.pattern.len() > self.host.len() {
            return;
        }
        let mut chosen = vec![0usize; self.pattern.len()];
        let _ = self.go(0, 0, 0, &mut chosen, visit);
    }

    fn go(
        &self,
        k: usize,
        start: usize,
        mask: u64,
        chosen: &mut [usize],
        visit: &mut impl FnMut(u64) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let (m, n) = (self.pattern.len(), self.host.len());
        if k == m {
            if self.required & range_mask(start, n) != 0 {
                return ControlFlow::Continue(());
            }
            return visit(mask);
        }
        let lo = self.lower[k].map_or(0, |j| self.host[chosen[j]]);
        let hi = self.upper[k].map_or(u8::MAX, |j| self.host[chosen[j]]);
        for p in start..=n - (m - k) {
            if self.required & range_mask(start, p) != 0 {
                break;
            }
            let v = self.host[p];
            if v <= lo || v >= hi {
                continue;
            }
            chosen[k] = p;
            self.go(k + 1, p + 1, mask | 1 << p, chosen, visit)?;
        }
        ControlFlow::Continue(())
    }
}

/// All embedding images of `sigma` into `pi`, lexicographically sorted.
pub fn enumerate_embeddings(sigma: &Permutation, pi: &Permutation) -> Vec<EmbeddingImage> {
    let mut out = Vec::new();
    Matcher::new(sigma, pi, 0).run(&mut |mask| {
        out.push(EmbeddingImage::from_mask(pi.size(), mask));
        ControlFlow::Continue(())
    });
    out
}

/// Embedding images whose positions include every non-initial position of
/// every adjacency of `pi`.
pub fn enumerate_normal_embeddings(
    sigma: &Permutation,
    pi: &Permutation,
) -> Vec<EmbeddingImage> {
    let mut out = Vec::new();
    Matcher::new(sigma, pi, pi.normal_required_mask()).run(&mut |mask| {
        out.push(EmbeddingImage::from_mask(pi.size(), mask));
        ControlFlow::Continue(())
    });
    out
}

pub(crate) fn count_with_required(sigma: &Permutation, pi: &Permutation, required: u64) -> u64 {
    let mut count = 0u64;
    Matcher::new(sigma, pi, required).run(&mut |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

/// `E(σ, π)`: the number of embeddings of `sigma` into `pi`.
pub fn count_embeddings(sigma: &Permutation, pi: &Permutation) -> BigUint {
    count_with_required(sigma, pi, 0).into()
}

/// `NE(σ, π)`: the number of normal embeddings of `sigma` into `pi`.
pub fn count_normal_embeddings(sigma: &Permutation, pi: &Permutation) -> BigUint {
    count_with_required(sigma, pi, pi.normal_required_mask()).into()
}

/// Whether `pi` contains `sigma`. Stops at the first match.
pub fn contains(sigma: &Permutation, pi: &Permutation) -> bool {
    if sigma.size() > pi.size() {
        return false;
    }
    if sigma.size() == pi.size() {
        return sigma == pi;
    }
    let mut found = false;
    Matcher::new(sigma, pi, 0).run(&mut |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

/// Every pattern of `pi` together with its number of embeddings into `pi`,
/// obtained by standardizing all nonempty position subsets.
pub fn pattern_census(pi: &Permutation) -> HashMap<Permutation, u64> {
    let n = pi.size();
    let mut census = HashMap::new();
    for mask in 1..=range_mask(0, n) {
        *census.entry(pi.pattern_of_mask(mask)).or_insert(0) += 1;
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn brute_count(sigma: &Permutation, pi: &Permutation, normal: bool) -> u64 {
        let req = if normal { pi.normal_required_mask() } else { 0 };
        (0..1u64 << pi.size())
            .filter(|&m| m.count_ones() as usize == sigma.size())
            .filter(|&m| m & req == req)
            .filter(|&m| &pi.pattern_of_mask(m) == sigma)
            .count() as u64
    }

    #[test]
    fn enumerate_examples() {
        let imgs: Vec<_> = enumerate_embeddings(&p("123"), &p("165234"))
            .into_iter()
            .map(|e| e.positions)
            .collect();
        assert_eq!(imgs, vec![vec![1, 4, 5], vec![1, 4, 6], vec![1, 5, 6], vec![4, 5, 6]]);
        let x = p("2413");
        assert_eq!(
            enumerate_embeddings(&x, &x),
            vec![EmbeddingImage { host_size: 4, positions: vec![1, 2, 3, 4] }]
        );
        assert!(enumerate_embeddings(&p("21"), &p("12")).is_empty());
        assert!(enumerate_embeddings(&p("123"), &p("12")).is_empty());
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_embeddings(&p("123"), &p("165234")), 4u32.into());
        assert_eq!(count_normal_embeddings(&p("123"), &p("165234")), 2u32.into());
        let normal: Vec<_> = enumerate_normal_embeddings(&p("123"), &p("165234"))
            .into_iter()
            .map(|e| e.positions)
            .collect();
        assert_eq!(normal, vec![vec![1, 5, 6], vec![4, 5, 6]]);
        assert_eq!(count_embeddings(&p("1"), &p("41627385")), 8u32.into());
        // identity host: every embedding of 12 must use all positions but the first
        assert_eq!(count_normal_embeddings(&p("12"), &p("123")), 1u32.into());
        assert_eq!(count_normal_embeddings(&p("1"), &p("123")), 0u32.into());
    }

    #[test]
    fn containment_examples() {
        assert!(contains(&p("3142"), &p("41627385")));
        assert!(!contains(&p("321"), &p("41627385")));
        assert!(contains(&p("2413"), &p("2413")));
        assert!(!contains(&p("2413"), &p("3142")));
    }

    #[test]
    fn backtracker_matches_subset_oracle() {
        for n in 1..=6 {
            for pi in Permutation::all(n) {
                for k in 1..=n {
                    for sigma in Permutation::all(k) {
                        let e = count_with_required(&sigma, &pi, 0);
                        let ne = count_with_required(&sigma, &pi, pi.normal_required_mask());
                        assert_eq!(e, brute_count(&sigma, &pi, false), "{sigma} {pi}");
                        assert_eq!(ne, brute_count(&sigma, &pi, true), "{sigma} {pi}");
                        assert_eq!(contains(&sigma, &pi), e > 0);
                    }
                }
            }
        }
    }

    #[test]
    fn census_matches_backtracker() {
        let pi = p("41627385");
        let census = pattern_census(&pi);
        for (sigma, &c) in &census {
            assert_eq!(count_with_required(sigma, &pi, 0), c);
        }
        assert_eq!(census.values().sum::<u64>(), 255);
    }

    #[test]
    fn images_satisfy_pattern_invariant() {
        let pi = p("41627385");
        for sigma in Permutation::all(4) {
            for img in enumerate_embeddings(&sigma, &pi) {
                assert!(img.positions.windows(2).all(|w| w[0] < w[1]));
                assert_eq!(pi.pattern_at(&img.positions).unwrap(), sigma);
            }
        }
    }
}
