//! Batch verification of Möbius-function identities.
//!
//! Each suite expands into independent instances, which run in parallel on
//! the current rayon pool. Records come back in instance order and serialize
//! to one JSON object per line: `{identity, instance, lhs, rhs, pass}`.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::embeddings::{contains, count_embeddings, count_normal_embeddings};
use crate::error::{Error, Result};
use crate::families::{gen_pi_n, gen_tb_alternating, smith_closed_form, theorem1_closed_form};
use crate::mobius::{
    self, is_proper, mu_chain, mu_embedding_recursion, mu_fixed_des, mu_fixed_ides,
    mu_recursive, s_lambda, vanishing_reasons, MobiusCache, Strategy,
};
use crate::perm::Permutation;
use crate::poset::IntervalPoset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Theorem1,
    Smith,
    DecSum,
    Avoid321,
    Vanishing,
    Strategies,
    ZeroSums,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Theorem1,
        Suite::Smith,
        Suite::DecSum,
        Suite::Avoid321,
        Suite::Vanishing,
        Suite::Strategies,
        Suite::ZeroSums,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::Smith => "smith",
            Suite::DecSum => "dec-sum",
            Suite::Avoid321 => "321-avoid",
            Suite::Vanishing => "vanishing",
            Suite::Strategies => "strategies",
            Suite::ZeroSums => "zero-sums",
        }
    }

    /// Parameter range swept when the caller gives none.
    pub fn default_params(&self) -> SuiteParams {
        let (n, max_size) = match self {
            Suite::Theorem1 => (2..=4, 0),
            Suite::Smith => (1..=5, 0),
            Suite::Vanishing => (2..=3, 0),
            Suite::DecSum | Suite::Avoid321 => (1..=1, 7),
            Suite::Strategies | Suite::ZeroSums => (1..=1, 6),
        };
        SuiteParams { n, max_size }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::BadParam(format!("unknown suite `{s}`")))
    }
}

/// Family parameter range (`theorem1`, `smith`, `vanishing`) and largest
/// permutation size (the exhaustive suites).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteParams {
    pub n: RangeInclusive<usize>,
    pub max_size: usize,
}

/// One checked identity instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub identity: String,
    pub instance: String,
    pub lhs: Value,
    pub rhs: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Record {
    fn check(identity: &str, instance: impl ToString, lhs: impl Into<Num>, rhs: impl Into<Num>) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        Self {
            identity: identity.to_string(),
            instance: instance.to_string(),
            pass: lhs == rhs,
            lhs: lhs.to_json(),
            rhs: rhs.to_json(),
            skipped: false,
            note: None,
        }
    }

    /// A non-passing record carrying the error message.
    fn skipped(identity: &str, instance: impl ToString, err: &Error) -> Self {
        Self {
            identity: identity.to_string(),
            instance: instance.to_string(),
            lhs: Value::Null,
            rhs: Value::Null,
            pass: false,
            skipped: true,
            note: Some(err.to_string()),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Values compared by a record.
#[derive(Clone, Debug, PartialEq)]
enum Num {
    Int(BigInt),
    Bool(bool),
}

impl Num {
    fn to_json(&self) -> Value {
        match self {
            Num::Int(v) => v
                .to_i64()
                .map(Value::from)
                .unwrap_or_else(|| Value::String(v.to_string())),
            Num::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<BigInt> for Num {
    fn from(v: BigInt) -> Self {
        Num::Int(v)
    }
}

impl From<i64> for Num {
    fn from(v: i64) -> Self {
        Num::Int(v.into())
    }
}

impl From<bool> for Num {
    fn from(v: bool) -> Self {
        Num::Bool(v)
    }
}

/// Summary of a suite run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

pub fn tally(records: &[Record]) -> Tally {
    records.iter().fold(Tally::default(), |mut t, r| {
        if r.skipped {
            t.skipped += 1;
        } else if r.pass {
            t.passed += 1;
        } else {
            t.failed += 1;
        }
        t
    })
}

#[derive(Clone, Debug)]
enum Instance {
    Param(usize),
    Host(Permutation),
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Param(n) => write!(f, "n={n}"),
            Instance::Host(p) => write!(f, "{p}"),
        }
    }
}

fn instances(suite: Suite, params: &SuiteParams) -> Vec<Instance> {
    let hosts = |min: usize, keep: &dyn Fn(&Permutation) -> bool| -> Vec<Instance> {
        (min..=params.max_size)
            .flat_map(Permutation::all)
            .filter(|p| keep(p))
            .map(Instance::Host)
            .collect()
    };
    match suite {
        Suite::Theorem1 | Suite::Smith | Suite::Vanishing => {
            params.n.clone().map(Instance::Param).collect()
        }
        Suite::DecSum => hosts(1, &|p| !(p.size() <= 2 && p.is_identity())),
        Suite::Avoid321 => {
            let d3 = Permutation::decreasing(3).expect("321");
            hosts(3, &|p| !contains(&d3, p))
        }
        Suite::Strategies | Suite::ZeroSums => hosts(1, &|_| true),
    }
}

/// Run every instance of `suite`. Instances that exceed a size cap are
/// reported as skipped; any other error fails the instance.
pub fn run_suite(suite: Suite, params: &SuiteParams) -> Vec<Record> {
    instances(suite, params)
        .par_iter()
        .map(|inst| {
            run_instance(suite, inst).unwrap_or_else(|e| {
                let mut r = Record::skipped(suite.name(), inst, &e);
                r.skipped = matches!(e, Error::SizeCapExceeded { .. });
                vec![r]
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn run_instance(suite: Suite, inst: &Instance) -> Result<Vec<Record>> {
    let one = Permutation::identity(1)?;
    let two_one = Permutation::decreasing(2)?;
    let cache = MobiusCache::new();
    match (suite, inst) {
        (Suite::Theorem1, &Instance::Param(n)) => {
            let lhs = mu_recursive(&one, &gen_pi_n(n)?, &cache)?;
            Ok(vec![Record::check("theorem1", inst, lhs, theorem1_closed_form(n)?)])
        }
        (Suite::Smith, &Instance::Param(n)) => {
            let lhs = mu_recursive(&one, &gen_tb_alternating(n)?, &cache)?;
            Ok(vec![Record::check("smith", inst, lhs, smith_closed_form(n)?)])
        }
        (Suite::DecSum, Instance::Host(pi)) => {
            let lhs = mobius::check_decreasing_sum(pi, &cache)?;
            Ok(vec![Record::check("dec-sum", inst, lhs, 0)])
        }
        (Suite::Avoid321, Instance::Host(pi)) => {
            let lhs = mu_recursive(&one, pi, &cache)?;
            let rhs = -mu_recursive(&two_one, pi, &cache)?;
            Ok(vec![Record::check("321-avoid", inst, lhs, rhs)])
        }
        (Suite::Vanishing, &Instance::Param(n)) => vanishing_records(n),
        (Suite::Strategies, Instance::Host(pi)) => strategy_records(pi),
        (Suite::ZeroSums, Instance::Host(pi)) => zero_sum_records(pi),
        _ => unreachable!("instance kind matches suite"),
    }
}

/// For every `λ ∈ [21, π_n)`: each structural vanishing condition forces
/// `μ(21,λ)·S_λ = 0`, every non-vanishing `λ` is proper, and proper `λ`
/// satisfy `μ(21,λ) = (-1)^{|λ|} NE(21,λ)`. Finally the proper-only sum
/// reconstructs `μ(21, π_n)`.
fn vanishing_records(n: usize) -> Result<Vec<Record>> {
    let host = gen_pi_n(n)?;
    let two_one = Permutation::decreasing(2)?;
    let cache = MobiusCache::new();
    let poset = IntervalPoset::build(&two_one, &host)?;
    let mut out = Vec::new();
    let mut proper_sum = BigInt::zero();
    for lam in &poset.elements()[..poset.len() - 1] {
        let instance = format!("n={n} lambda={lam}");
        let mu = mu_recursive(&two_one, lam, &cache)?;
        let term = &mu * s_lambda(lam, &host)?;
        for reason in vanishing_reasons(lam) {
            out.push(Record::check(
                &format!("vanishing:{reason:?}"),
                &instance,
                term.clone(),
                0,
            ));
        }
        if !term.is_zero() {
            out.push(Record::check("nonvanishing-is-proper", &instance, is_proper(lam), true));
        }
        if is_proper(lam) {
            let ne = BigInt::from(count_normal_embeddings(&two_one, lam));
            let signed = if lam.size() % 2 == 0 { ne } else { -ne };
            out.push(Record::check("proper-mu", &instance, mu.clone(), signed));
            proper_sum += &term;
        }
    }
    let e = BigInt::from(count_embeddings(&two_one, &host));
    out.push(Record::check(
        "proper-reconstruction",
        format!("n={n}"),
        e - proper_sum,
        mu_recursive(&two_one, &host, &cache)?,
    ));
    Ok(out)
}

fn strategy_records(pi: &Permutation) -> Result<Vec<Record>> {
    let one = Permutation::identity(1)?;
    let rec_cache = MobiusCache::new();
    let emb_cache = MobiusCache::for_strategy(Strategy::EmbeddingRecursion);
    let mut out = Vec::new();
    for sigma in IntervalPoset::build(&one, pi)?.elements() {
        let instance = format!("{sigma} <= {pi}");
        let reference = mu_recursive(sigma, pi, &rec_cache)?;
        let mut others = vec![
            (Strategy::Chain, mu_chain(sigma, pi)?),
            (Strategy::EmbeddingRecursion, mu_embedding_recursion(sigma, pi, &emb_cache)?),
        ];
        if sigma.inverse_descent_count() == pi.inverse_descent_count() {
            others.push((Strategy::FixedIdes, mu_fixed_ides(sigma, pi)?));
        }
        if sigma.descent_count() == pi.descent_count() {
            others.push((Strategy::FixedDes, mu_fixed_des(sigma, pi)?));
        }
        for (s, v) in others {
            out.push(Record::check(
                &format!("strategy:{s}"),
                &instance,
                reference.clone(),
                v,
            ));
        }
    }
    Ok(out)
}

fn zero_sum_records(pi: &Permutation) -> Result<Vec<Record>> {
    let one = Permutation::identity(1)?;
    let cache = MobiusCache::new();
    let mut out = Vec::new();
    let down = IntervalPoset::build(&one, pi)?;
    for x in &down.elements()[..down.len() - 1] {
        let poset = IntervalPoset::build(x, pi)?;
        let mut lower = BigInt::zero();
        let mut upper = BigInt::zero();
        for z in poset.elements() {
            lower += mu_recursive(x, z, &cache)?;
            upper += mu_recursive(z, pi, &cache)?;
        }
        let instance = format!("[{x}, {pi}]");
        out.push(Record::check("zero-sum-lower", &instance, lower, 0));
        out.push(Record::check("zero-sum-upper", &instance, upper, 0));
    }
    Ok(out)
}
