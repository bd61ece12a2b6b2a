//! Generators for the constructed permutation families and their closed forms.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::perm::{Letter, Permutation, TbWord};

/// A named family member: `pi:4`, `kappa:3`, `pink:4,2`, `delta:5`, `tbalt:3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    /// `π_n`, size `2n+2`.
    PiN(usize),
    /// `κ_n`, size `4n`.
    Kappa(usize),
    /// `π_{n,k}`, size `2n+2k`.
    PiNK(usize, usize),
    /// `δ_k = k, k-1, …, 1`.
    Delta(usize),
    /// The one-inverse-descent permutation with word `(tb)^n`.
    TbAlternating(usize),
}

impl FamilySpec {
    pub fn generate(&self) -> Result<Permutation> {
        match *self {
            FamilySpec::PiN(n) => gen_pi_n(n),
            FamilySpec::Kappa(n) => gen_kappa_n(n),
            FamilySpec::PiNK(n, k) => gen_pi_nk(n, k),
            FamilySpec::Delta(k) => gen_delta(k),
            FamilySpec::TbAlternating(n) => gen_tb_alternating(n),
        }
    }

    /// Short family name as used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::PiN(_) => "pi",
            FamilySpec::Kappa(_) => "kappa",
            FamilySpec::PiNK(..) => "pink",
            FamilySpec::Delta(_) => "delta",
            FamilySpec::TbAlternating(_) => "tbalt",
        }
    }

    /// Parameters joined by commas.
    pub fn params(&self) -> String {
        match *self {
            FamilySpec::PiNK(n, k) => format!("{n},{k}"),
            FamilySpec::PiN(n)
            | FamilySpec::Kappa(n)
            | FamilySpec::Delta(n)
            | FamilySpec::TbAlternating(n) => n.to_string(),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name(), self.params())
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadParam(s.to_string());
        let (name, args) = s.trim().split_once(':').ok_or_else(bad)?;
        let args: Vec<usize> = args
            .split(',')
            .map(|a| a.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match (name, args.as_slice()) {
            ("pi", &[n]) => Ok(FamilySpec::PiN(n)),
            ("kappa", &[n]) => Ok(FamilySpec::Kappa(n)),
            ("pink", &[n, k]) => Ok(FamilySpec::PiNK(n, k)),
            ("delta", &[k]) => Ok(FamilySpec::Delta(k)),
            ("tbalt", &[n]) => Ok(FamilySpec::TbAlternating(n)),
            _ => Err(bad()),
        }
    }
}

fn require(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::BadParam(what()))
    }
}

/// `π_n = n+1, 1, n+3, 2, n+4, 3, …, n, 2n+2, n+2`.
pub fn gen_pi_n(n: usize) -> Result<Permutation> {
    require(n >= 1, || format!("pi_n needs n >= 1, got {n}"))?;
    let mut v = Vec::with_capacity(2 * n + 2);
    v.push(n + 1);
    for i in 1..=n {
        v.push(i);
        v.push(n + 2 + i);
    }
    v.push(n + 2);
    Permutation::from_one_line(&v)
}

/// `κ_n = n+1, n+3, …, 3n-1, 1, 3n+1, 2, 3n+2, …, n, 4n, n+2, n+4, …, 3n`.
pub fn gen_kappa_n(n: usize) -> Result<Permutation> {
    require(n >= 1, || format!("kappa_n needs n >= 1, got {n}"))?;
    Permutation::from_one_line(&kappa_values(n))
}

fn kappa_values(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).map(|i| n + 1 + 2 * i).collect();
    for i in 1..=n {
        v.push(i);
        v.push(3 * n + i);
    }
    v.extend((1..=n).map(|i| n + 2 * i));
    v
}

/// `π_{n,k}`: the pattern of `κ_n` induced by the values
/// `n+1, n+3, …, n+2k-1`, `1..=n`, `3n+1..=4n` and `n+2, n+4, …, n+2k`.
pub fn gen_pi_nk(n: usize, k: usize) -> Result<Permutation> {
    require(n >= 1 && (1..=n).contains(&k), || {
        format!("pi_nk needs 1 <= k <= n, got n={n}, k={k}")
    })?;
    let kappa = kappa_values(n);
    let keep = |v: usize| {
        v <= n || v > 3 * n || (v > n && v < n + 2 * k + 1)
    };
    let positions: Vec<usize> = kappa
        .iter()
        .enumerate()
        .filter(|&(_, &v)| keep(v))
        .map(|(i, _)| i + 1)
        .collect();
    Permutation::from_one_line(&kappa)?.pattern_at(&positions)
}

/// `δ_k = k, k-1, …, 1`.
pub fn gen_delta(k: usize) -> Result<Permutation> {
    require(k >= 1, || format!("delta_k needs k >= 1, got {k}"))?;
    Permutation::decreasing(k)
}

/// The permutation with one inverse descent and word `tbtb…tb` of length `2n`.
pub fn gen_tb_alternating(n: usize) -> Result<Permutation> {
    require(n >= 1, || format!("tb-alternating needs n >= 1, got {n}"))?;
    TbWord::new(
        std::iter::repeat_n([Letter::Top, Letter::Bottom], n)
            .flatten()
            .collect(),
    )
    .decode()
}

/// `C(a, b)`, zero when `b > a`.
pub fn binomial(a: u64, b: u64) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    (0..b).fold(BigInt::from(1), |acc, i| acc * (a - i) / (i + 1))
}

/// `-C(n+2,7) - C(n+1,7) + 2C(n+2,5) - C(n+2,3) - C(n,2) - 2n`, the value of
/// `μ(1, π_n)` for `n >= 2`.
pub fn theorem1_closed_form(n: usize) -> Result<BigInt> {
    require(n >= 2, || format!("closed form holds for n >= 2, got {n}"))?;
    let n = n as u64;
    Ok(-binomial(n + 2, 7) - binomial(n + 1, 7) + 2 * binomial(n + 2, 5)
        - binomial(n + 2, 3)
        - binomial(n, 2)
        - BigInt::from(2 * n))
}

/// `-C(n+1, 2)`, the value of `μ(1, ·)` on the `(tb)^n` family.
pub fn smith_closed_form(n: usize) -> Result<BigInt> {
    require(n >= 1, || format!("n >= 1 required, got {n}"))?;
    Ok(-binomial(n as u64 + 1, 2))
}
