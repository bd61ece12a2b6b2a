//! Permutations in one-line notation, their symmetries and statistics.
//!
//! All public positions and values are 1-based. A permutation of size `n`
//! stores the sequence `π(1), …, π(n)`.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use itertools::Itertools;

use crate::error::{Error, Result};

/// Default largest permutation size accepted by the constructors.
pub const DEFAULT_SIZE_CAP: usize = 20;

/// Hard ceiling: position sets are stored as `u64` masks.
pub const MAX_SIZE: usize = 64;

static SIZE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_SIZE_CAP);

/// Current size cap for [`Permutation`] construction.
pub fn size_cap() -> usize {
    SIZE_CAP.load(Ordering::Relaxed)
}

/// Override the size cap. Values above [`MAX_SIZE`] are clamped.
pub fn set_size_cap(cap: usize) {
    SIZE_CAP.store(cap.clamp(1, MAX_SIZE), Ordering::Relaxed);
}

/// A permutation of `[n]` in one-line notation.
///
/// Ordering is lexicographic on the one-line sequence. The canonical form used
/// for hashing and deduplication is the sequence itself.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<u8>,
}

/// The symmetries of the permutation poset used throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Reverse,
    Complement,
    ReverseComplement,
    Inverse,
}

impl Symmetry {
    pub const ALL: [Symmetry; 4] = [
        Symmetry::Reverse,
        Symmetry::Complement,
        Symmetry::ReverseComplement,
        Symmetry::Inverse,
    ];
}

impl Permutation {
    /// Build a permutation from 1-based one-line values.
    pub fn from_one_line(values: &[usize]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        let n = values.len();
        let cap = size_cap();
        if n > cap {
            return Err(Error::SizeCapExceeded { size: n, cap });
        }
        let mut seen = vec![false; n + 1];
        for &v in values {
            if v == 0 || v > n || seen[v] {
                return Err(Error::NotABijection(values.iter().join(",")));
            }
            seen[v] = true;
        }
        Ok(Self {
            values: values.iter().map(|&v| v as u8).collect(),
        })
    }

    /// Trusted constructor for sequences already known to be bijections.
    pub(crate) fn from_raw(values: Vec<u8>) -> Self {
        debug_assert!({
            let mut s = values.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
        });
        Self { values }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_one_line(&(1..=n).collect::<Vec<_>>())
    }

    /// The decreasing permutation `n, n-1, …, 1`.
    pub fn decreasing(n: usize) -> Result<Self> {
        Self::from_one_line(&(1..=n).rev().collect::<Vec<_>>())
    }

    /// Every permutation of size `n`, in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (1..=n as u8)
            .permutations(n)
            .map(Permutation::from_raw)
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    /// The one-line values `π(1), …, π(n)`.
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// `π(i)` for a 1-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.values[i - 1] as usize
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.values.iter().map(|&v| v as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
    }

    pub fn symmetry(&self, kind: Symmetry) -> Self {
        match kind {
            Symmetry::Reverse => self.reverse(),
            Symmetry::Complement => self.complement(),
            Symmetry::ReverseComplement => self.reverse_complement(),
            Symmetry::Inverse => self.inverse(),
        }
    }

    pub fn reverse(&self) -> Self {
        Self::from_raw(self.values.iter().rev().copied().collect())
    }

    pub fn complement(&self) -> Self {
        let n1 = self.size() as u8 + 1;
        Self::from_raw(self.values.iter().map(|&v| n1 - v).collect())
    }

    pub fn reverse_complement(&self) -> Self {
        self.reverse().complement()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.size()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v as usize - 1] = i as u8 + 1;
        }
        Self::from_raw(inv)
    }

    /// Number of positions `i` with `π(i) > π(i+1)`.
    pub fn descent_count(&self) -> usize {
        self.values.windows(2).filter(|w| w[0] > w[1]).count()
    }

    /// Position pairs `(i, j)`, `i < j`, with `π(i) = π(j) + 1`.
    pub fn inverse_descents(&self) -> Vec<(usize, usize)> {
        let pos = self.positions_of_values();
        (1..self.size())
            .filter_map(|v| {
                // value v at pos[v], value v+1 at pos[v+1]
                let (lo, hi) = (pos[v], pos[v + 1]);
                (hi < lo).then_some((hi, lo))
            })
            .collect()
    }

    pub fn inverse_descent_count(&self) -> usize {
        let pos = self.positions_of_values();
        (1..self.size()).filter(|&v| pos[v + 1] < pos[v]).count()
    }

    /// `pos[v]` is the 1-based position of value `v`; index 0 unused.
    fn positions_of_values(&self) -> Vec<usize> {
        let mut pos = vec![0; self.size() + 1];
        for (i, &v) in self.values.iter().enumerate() {
            pos[v as usize] = i + 1;
        }
        pos
    }

    /// Maximal runs of consecutive positions carrying consecutive increasing
    /// values. The runs partition `1..=n` in order.
    pub fn adjacencies(&self) -> Vec<RangeInclusive<usize>> {
        let mut runs = Vec::new();
        let mut start = 1;
        for i in 1..self.size() {
            if self.values[i] != self.values[i - 1] + 1 {
                runs.push(start..=i);
                start = i + 1;
            }
        }
        runs.push(start..=self.size());
        runs
    }

    /// Positions that every normal embedding must use: all non-initial
    /// positions of every adjacency, as a 0-based bitmask.
    pub(crate) fn normal_required_mask(&self) -> u64 {
        self.adjacencies()
            .into_iter()
            .flat_map(|r| r.skip(1))
            .fold(0u64, |m, p| m | 1 << (p - 1))
    }

    /// The pattern formed by the entries at the given 1-based positions.
    pub fn pattern_at(&self, positions: &[usize]) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut mask = 0u64;
        for &p in positions {
            if p == 0 || p > self.size() {
                return Err(Error::OutOfRange {
                    position: p,
                    size: self.size(),
                });
            }
            mask |= 1 << (p - 1);
        }
        Ok(self.pattern_of_mask(mask))
    }

    /// Standardize the subsequence selected by a 0-based position mask.
    pub(crate) fn pattern_of_mask(&self, mask: u64) -> Self {
        let mut value_mask = 0u64;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            value_mask |= 1 << (self.values[i] - 1);
            m &= m - 1;
        }
        let mut out = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            let v = self.values[i] - 1;
            let below = value_mask & ((1u64 << v) - 1);
            out.push(below.count_ones() as u8 + 1);
            m &= m - 1;
        }
        Self::from_raw(out)
    }

    /// Remove the entry at 0-based position `i` and standardize.
    pub(crate) fn delete_position(&self, i: usize) -> Self {
        let gone = self.values[i];
        Self::from_raw(
            self.values
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| if v > gone { v - 1 } else { v })
                .collect(),
        )
    }

    /// Encode a permutation with exactly one inverse descent as a t/b word.
    pub fn tb_encode(&self) -> Result<TbWord> {
        let ides = self.inverse_descents();
        if ides.len() != 1 {
            return Err(Error::NotSingleInverseDescent(self.to_string()));
        }
        let threshold = self.at(ides[0].0) as u8;
        Ok(TbWord(
            self.values
                .iter()
                .map(|&v| if v >= threshold { Letter::Top } else { Letter::Bottom })
                .collect(),
        ))
    }

    /// Comma-separated one-line form, e.g. `4,1,6,2,7,3,8,5`.
    pub fn to_comma_string(&self) -> String {
        self.values.iter().join(",")
    }
}

impl fmt::Display for Permutation {
    /// Compact digits for sizes up to 9, comma form otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.size() <= 9 {
            for v in &self.values {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            f.write_str(&self.to_comma_string())
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts `4,1,6,2` or, for sizes up to 9, the compact `4162`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(s.to_string());
        let values: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            if s.is_empty() || s.len() > 9 || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            s.bytes().map(|b| (b - b'0') as usize).collect()
        };
        Self::from_one_line(&values)
    }
}

impl serde::Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A letter of a t/b word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    Top,
    Bottom,
}

/// Encoding of a permutation with one inverse descent: each entry is marked
/// as a top (`t`) or bottom (`b`) element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TbWord(Vec<Letter>);

impl TbWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The unique permutation with one inverse descent encoded by this word.
    ///
    /// Tops receive the largest values and bottoms the smallest, each group
    /// increasing left to right. Words with every `b` before every `t`
    /// (including single-letter-kind words) decode to nothing.
    pub fn decode(&self) -> Result<Permutation> {
        let tops = self.0.iter().filter(|&&l| l == Letter::Top).count();
        let bottoms = self.len() - tops;
        let first_top = self.0.iter().position(|&l| l == Letter::Top);
        let last_bottom = self.0.iter().rposition(|&l| l == Letter::Bottom);
        match (first_top, last_bottom) {
            (Some(t), Some(b)) if t < b => {}
            _ => return Err(Error::InvalidWord(self.to_string())),
        }
        let cap = size_cap();
        if self.len() > cap {
            return Err(Error::SizeCapExceeded {
                size: self.len(),
                cap,
            });
        }
        let (mut next_bottom, mut next_top) = (1u8, bottoms as u8 + 1);
        let values = self
            .0
            .iter()
            .map(|l| match l {
                Letter::Bottom => {
                    next_bottom += 1;
                    next_bottom - 1
                }
                Letter::Top => {
                    next_top += 1;
                    next_top - 1
                }
            })
            .collect();
        Ok(Permutation::from_raw(values))
    }
}

impl fmt::Display for TbWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                Letter::Top => "t",
                Letter::Bottom => "b",
            })?;
        }
        Ok(())
    }
}

impl FromStr for TbWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                't' => Ok(Letter::Top),
                'b' => Ok(Letter::Bottom),
                _ => Err(Error::InvalidWord(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(TbWord)
    }
}
