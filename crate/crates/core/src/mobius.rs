//! The Möbius function of the permutation poset.
//!
//! Four routes to `μ(σ, π)` are provided so they can check each other:
//!
//! * [`mu_recursive`]: the defining recurrence `μ(σ,z) = -Σ_{y<z} μ(σ,y)`,
//!   summed over strict down-sets, bottom up.
//! * [`mu_chain`]: signed chain count (Hall), accumulated top down.
//! * [`mu_embedding_recursion`]: the embedding-count recursion
//!   `μ(σ,π) = (-1)^{|π|-|σ|}E(σ,π) - Σ_{λ∈[σ,π)} μ(σ,λ) Σ_{τ∈[λ,π]} (-1)^{|π|-|τ|}E(τ,π)`,
//!   with inner values produced by the same recursion.
//! * [`mu_fixed_ides`] / [`mu_fixed_des`]: `(-1)^{|π|-|σ|} NE(σ,π)` when the
//!   inverse-descent (descent) counts agree.
//!
//! [`mu_general_inversion`] evaluates the same recursion for an arbitrary
//! weight function `f` with `f(π) = 1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::embeddings::{contains, count_normal_embeddings, pattern_census};
use crate::error::{Error, Result};
use crate::families::gen_pi_n;
use crate::perm::{Letter, Permutation};
use crate::poset::{self, IntervalPoset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Recursive,
    Chain,
    EmbeddingRecursion,
    FixedIdes,
    FixedDes,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Recursive,
        Strategy::Chain,
        Strategy::EmbeddingRecursion,
        Strategy::FixedDes,
        Strategy::FixedIdes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Recursive => "recursive",
            Strategy::Chain => "chain",
            Strategy::EmbeddingRecursion => "embedding",
            Strategy::FixedIdes => "fixed-ides",
            Strategy::FixedDes => "fixed-des",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Memo of exact `μ(σ, π)` values keyed by the one-line pair.
///
/// A cache belongs to a single strategy; handing it to another strategy is
/// an error, so two strategies never read each other's answers.
#[derive(Debug)]
pub struct MobiusCache {
    strategy: Strategy,
    entries: RwLock<HashMap<(Permutation, Permutation), BigInt>>,
}

impl Default for MobiusCache {
    fn default() -> Self {
        Self::new()
    }
}

impl MobiusCache {
    /// A cache for [`mu_recursive`].
    pub fn new() -> Self {
        Self::for_strategy(Strategy::Recursive)
    }

    pub fn for_strategy(strategy: Strategy) -> Self {
        Self {
            strategy,
            entries: RwLock::new(HashMap::new()),
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn get(&self, sigma: &Permutation, pi: &Permutation) -> Option<BigInt> {
        self.entries
            .read()
            .expect("cache lock")
            .get(&(sigma.clone(), pi.clone()))
            .cloned()
    }

    /// Idempotent: values for a key are equal whichever writer wins.
    pub fn insert(&self, sigma: &Permutation, pi: &Permutation, value: BigInt) {
        self.entries
            .write()
            .expect("cache lock")
            .insert((sigma.clone(), pi.clone()), value);
    }

    fn insert_all(&self, sigma: &Permutation, values: impl IntoIterator<Item = (Permutation, BigInt)>) {
        let mut map = self.entries.write().expect("cache lock");
        for (pi, v) in values {
            map.insert((sigma.clone(), pi), v);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn expect_strategy(&self, actual: Strategy) -> Result<()> {
        if self.strategy == actual {
            Ok(())
        } else {
            Err(Error::CacheStrategyMismatch {
                expected: self.strategy.name(),
                actual: actual.name(),
            })
        }
    }
}

fn sign(exponent: usize) -> i64 {
    if exponent.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `μ(σ, π)` from the defining recurrence. Fills `cache` with `μ(σ, z)` for
/// every `z` in `[σ, π]`.
pub fn mu_recursive(sigma: &Permutation, pi: &Permutation, cache: &MobiusCache) -> Result<BigInt> {
    cache.expect_strategy(Strategy::Recursive)?;
    if sigma == pi {
        return Ok(BigInt::one());
    }
    if !contains(sigma, pi) {
        return Ok(BigInt::zero());
    }
    if let Some(v) = cache.get(sigma, pi) {
        return Ok(v);
    }
    let poset = IntervalPoset::build(sigma, pi)?;
    let mu = poset.mobius_from_bottom();
    let top = mu.last().cloned().unwrap_or_default();
    cache.insert_all(sigma, poset.elements().iter().cloned().zip(mu));
    Ok(top)
}

/// `μ(σ, π)` as the signed number of chains from `σ` to `π`.
pub fn mu_chain(sigma: &Permutation, pi: &Permutation) -> Result<BigInt> {
    if !contains(sigma, pi) {
        return Ok(BigInt::zero());
    }
    poset::chain_weight(sigma, pi)
}

/// `μ(σ, π)` through the embedding-count recursion. `cache` must have been
/// created for [`Strategy::EmbeddingRecursion`].
pub fn mu_embedding_recursion(
    sigma: &Permutation,
    pi: &Permutation,
    cache: &MobiusCache,
) -> Result<BigInt> {
    cache.expect_strategy(Strategy::EmbeddingRecursion)?;
    if !contains(sigma, pi) {
        return Ok(BigInt::zero());
    }
    if let Some(v) = cache.get(sigma, pi) {
        return Ok(v);
    }
    let poset = IntervalPoset::build(sigma, pi)?;
    let mut mu: Vec<BigInt> = Vec::with_capacity(poset.len());
    for h in 0..poset.len() {
        let host = poset.element(h);
        let value = match cache.get(sigma, host) {
            Some(v) => v,
            None => {
                let v = embedding_recursion_at(&poset, h, &mu);
                cache.insert(sigma, host, v.clone());
                v
            }
        };
        mu.push(value);
    }
    Ok(mu.pop().unwrap_or_default())
}

/// Evaluate the embedding recursion with host `poset[h]`, given `mu[i]` for
/// every `i < h`. Element 0 of `poset` is the bottom `σ`.
fn embedding_recursion_at(poset: &IntervalPoset, h: usize, mu: &[BigInt]) -> BigInt {
    let host = poset.element(h);
    let census = pattern_census(host);
    // g(τ) = (-1)^{|host|-|τ|} E(τ, host) for τ in [σ, host]
    let g = |i: usize| -> i64 {
        let tau = poset.element(i);
        sign(host.size() - tau.size()) * census.get(tau).copied().unwrap_or(0) as i64
    };
    let below_h = poset.below(h);
    let g_host = g(h);
    let mut result = BigInt::from(g(0));
    for rho in below_h.ones() {
        // Σ_{τ∈[ρ,host]} g(τ)
        let mut upper = g(rho) + g_host;
        for tau in poset.above(rho).intersection(below_h) {
            upper += g(tau);
        }
        if upper != 0 && !mu[rho].is_zero() {
            result -= &mu[rho] * upper;
        }
    }
    result
}

/// Evaluate `f(σ) - Σ_{λ∈[σ,π)} μ(σ,λ) Σ_{τ∈[λ,π]} f(τ)` for a weight
/// function with `f(π) = 1`. The result is `μ(σ, π)` for every such `f`.
///
/// Inner Möbius values come from [`mu_recursive`] through `cache`.
pub fn mu_general_inversion(
    sigma: &Permutation,
    pi: &Permutation,
    f: impl Fn(&Permutation) -> BigRational,
    cache: &MobiusCache,
) -> Result<BigRational> {
    let at_top = f(pi);
    if !at_top.is_one() {
        return Err(Error::FNotNormalized(at_top.to_string()));
    }
    if !contains(sigma, pi) {
        return Ok(BigRational::zero());
    }
    mu_recursive(sigma, pi, cache)?;
    let poset = IntervalPoset::build(sigma, pi)?;
    let values: Vec<BigRational> = poset.elements().iter().map(&f).collect();
    let top = poset.len() - 1;
    let mut result = values[0].clone();
    for lam in 0..top {
        let mu = mu_recursive(sigma, poset.element(lam), cache)?;
        if mu.is_zero() {
            continue;
        }
        let mut upper = values[lam].clone();
        for tau in poset.above(lam).ones() {
            upper += &values[tau];
        }
        result -= BigRational::from_integer(mu) * upper;
    }
    if !result.is_integer() {
        return Err(Error::Inconsistent(format!(
            "general inversion on [{sigma}, {pi}] produced non-integral {result}"
        )));
    }
    Ok(result)
}

/// `(-1)^{|π|-|σ|} NE(σ, π)`, valid when `ides(σ) = ides(π)`.
pub fn mu_fixed_ides(sigma: &Permutation, pi: &Permutation) -> Result<BigInt> {
    let (a, b) = (sigma.inverse_descent_count(), pi.inverse_descent_count());
    if a != b {
        return Err(Error::IdesMismatch { sigma: a, pi: b });
    }
    Ok(signed_normal_count(sigma, pi))
}

/// `(-1)^{|π|-|σ|} NE(σ, π)`, valid when `des(σ) = des(π)`.
pub fn mu_fixed_des(sigma: &Permutation, pi: &Permutation) -> Result<BigInt> {
    let (a, b) = (sigma.descent_count(), pi.descent_count());
    if a != b {
        return Err(Error::DesMismatch { sigma: a, pi: b });
    }
    Ok(signed_normal_count(sigma, pi))
}

fn signed_normal_count(sigma: &Permutation, pi: &Permutation) -> BigInt {
    if sigma.size() > pi.size() {
        return BigInt::zero();
    }
    BigInt::from(count_normal_embeddings(sigma, pi)) * sign(pi.size() - sigma.size())
}

/// `S_λ = Σ_{τ∈[λ,π]} (-1)^{|τ|} E(τ, π)`.
pub fn s_lambda(lam: &Permutation, pi: &Permutation) -> Result<BigInt> {
    let poset = IntervalPoset::build(lam, pi)?;
    if poset.is_empty() {
        return Ok(BigInt::zero());
    }
    let census = pattern_census(pi);
    Ok(poset
        .elements()
        .iter()
        .map(|tau| sign(tau.size()) * census[tau] as i64)
        .sum::<i64>()
        .into())
}

/// `Σ_{k=1}^{|π|} μ(δ_k, π)`; zero for every `π` other than `1` and `12`.
pub fn check_decreasing_sum(pi: &Permutation, cache: &MobiusCache) -> Result<BigInt> {
    if pi.size() <= 2 && pi.is_identity() {
        return Err(Error::ExcludedInput(pi.to_string()));
    }
    let mut total = BigInt::zero();
    for k in 1..=pi.size() {
        total += mu_recursive(&Permutation::decreasing(k)?, pi, cache)?;
    }
    Ok(total)
}

/// Whether `μ(1, π) = -μ(21, π)` for a 321-avoiding `π` other than `1`, `12`.
pub fn check_321_avoiding_identity(pi: &Permutation, cache: &MobiusCache) -> Result<bool> {
    if contains(&Permutation::decreasing(3)?, pi) {
        return Err(Error::Contains321(pi.to_string()));
    }
    if pi.size() <= 2 && pi.is_identity() {
        return Err(Error::ExcludedInput(pi.to_string()));
    }
    let one = Permutation::identity(1)?;
    let two_one = Permutation::decreasing(2)?;
    Ok(mu_recursive(&one, pi, cache)? == -mu_recursive(&two_one, pi, cache)?)
}

/// Whether `λ ∈ [21, π_n)` contributes nothing to the `μ(21, π_n)`
/// recursion, i.e. `μ(21, λ) · S_λ = 0`.
pub fn is_vanishing(lam: &Permutation, n: usize, cache: &MobiusCache) -> Result<bool> {
    let host = gen_pi_n(n)?;
    let two_one = Permutation::decreasing(2)?;
    if lam == &host || !contains(&two_one, lam) || !contains(lam, &host) {
        return Err(Error::NotInInterval {
            lam: lam.to_string(),
            host: host.to_string(),
        });
    }
    let mu = mu_recursive(&two_one, lam, cache)?;
    Ok(mu.is_zero() || s_lambda(lam, &host)?.is_zero())
}

/// Boundary and repetition conditions on a one-inverse-descent permutation:
/// `λ(1)`, `λ(m-1)` top, `λ(2)`, `λ(m)` bottom, at most one top and one
/// bottom repetition, and a top repetition (if any) left of a bottom one.
pub fn is_proper(lam: &Permutation) -> bool {
    let Ok(word) = lam.tb_encode() else {
        return false;
    };
    let w = word.letters();
    let m = w.len();
    use Letter::{Bottom as B, Top as T};
    if !(w[0] == T && w[m - 2] == T && w[1] == B && w[m - 1] == B) {
        return false;
    }
    let reps = Repetitions::of(w);
    reps.top.len() <= 1
        && reps.bottom.len() <= 1
        && match (reps.top.first(), reps.bottom.first()) {
            (Some(t), Some(b)) => t < b,
            _ => true,
        }
}

struct Repetitions {
    top: Vec<usize>,
    bottom: Vec<usize>,
}

impl Repetitions {
    fn of(w: &[Letter]) -> Self {
        let mut top = Vec::new();
        let mut bottom = Vec::new();
        for (i, pair) in w.windows(2).enumerate() {
            match pair {
                [Letter::Top, Letter::Top] => top.push(i),
                [Letter::Bottom, Letter::Bottom] => bottom.push(i),
                _ => {}
            }
        }
        Self { top, bottom }
    }
}

/// Structural reasons forcing `λ ∈ [21, π_n)` (`n ≥ 2`) to be vanishing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VanishingReason {
    /// `ides(λ) = 2`.
    TwoInverseDescents,
    /// Two leftmost elements are tops.
    LeftTopPair,
    /// Leftmost is a bottom and another interior bottom exists.
    LeftBottomWithInteriorBottom,
    /// Two rightmost elements are bottoms.
    RightBottomPair,
    /// Rightmost is a top and another interior top exists.
    RightTopWithInteriorTop,
    /// One top, at least three bottoms.
    SingleTopManyBottoms,
    /// One bottom, at least three tops.
    SingleBottomManyTops,
    /// A cup `t b…b t` or cap `b t…t b` of size at least 3.
    CupOrCap,
    /// Two top repetitions, two bottom repetitions, or a top repetition
    /// right of a bottom repetition.
    RepetitionConflict,
}

/// Every structural vanishing condition `lam` satisfies. Empty does not
/// imply non-vanishing.
pub fn vanishing_reasons(lam: &Permutation) -> Vec<VanishingReason> {
    use Letter::{Bottom as B, Top as T};
    use VanishingReason::*;
    let mut out = Vec::new();
    if lam.inverse_descent_count() == 2 {
        out.push(TwoInverseDescents);
    }
    let Ok(word) = lam.tb_encode() else {
        return out;
    };
    let w = word.letters();
    let m = w.len();
    let interior = || w[1..m - 1].iter();
    let tops = w.iter().filter(|&&l| l == T).count();
    let bottoms = m - tops;
    if w[0] == T && w[1] == T {
        out.push(LeftTopPair);
    }
    if w[0] == B && interior().any(|&l| l == B) {
        out.push(LeftBottomWithInteriorBottom);
    }
    if w[m - 2] == B && w[m - 1] == B {
        out.push(RightBottomPair);
    }
    if w[m - 1] == T && interior().any(|&l| l == T) {
        out.push(RightTopWithInteriorTop);
    }
    if tops == 1 && bottoms >= 3 {
        out.push(SingleTopManyBottoms);
    }
    if bottoms == 1 && tops >= 3 {
        out.push(SingleBottomManyTops);
    }
    let cup = w[0] == T && w[m - 1] == T && interior().all(|&l| l == B);
    let cap = w[0] == B && w[m - 1] == B && interior().all(|&l| l == T);
    if m >= 3 && (cup || cap) {
        out.push(CupOrCap);
    }
    let reps = Repetitions::of(w);
    let top_after_bottom = match (reps.top.last(), reps.bottom.first()) {
        (Some(t), Some(b)) => t > b,
        _ => false,
    };
    if reps.top.len() >= 2 || reps.bottom.len() >= 2 || top_after_bottom {
        out.push(RepetitionConflict);
    }
    out
}
