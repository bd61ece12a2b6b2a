use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use perm_mobius::embeddings::{
    contains, count_embeddings, count_normal_embeddings, enumerate_embeddings,
    enumerate_normal_embeddings,
};
use perm_mobius::mobius::{
    mu_chain, mu_embedding_recursion, mu_fixed_des, mu_fixed_ides, mu_recursive,
};
use perm_mobius::verify::{run_suite, tally, Suite};
use perm_mobius::{perm, poset, build_interval, FamilySpec, MobiusCache, Permutation, Strategy};

/// Möbius function of the permutation pattern poset.
#[derive(Parser, Debug)]
#[command(name = "perm-mobius", version, about)]
struct Cli {
    /// Output format. `explore` defaults to csv, everything else to plain.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Largest host size for interval construction. Work grows like 2^cap.
    #[arg(long, global = true)]
    cap: Option<usize>,

    /// Worker threads for verify and explore (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Recursive,
    Chain,
    Embedding,
    FixedDes,
    FixedIdes,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute μ(σ, π).
    Mu {
        sigma: String,
        pi: String,
        #[arg(long, value_enum, default_value = "recursive")]
        strategy: StrategyArg,
    },
    /// Test whether π contains σ.
    Contains { sigma: String, pi: String },
    /// Count (or list) the embeddings of σ into π.
    Embeddings {
        sigma: String,
        pi: String,
        /// Only normal embeddings.
        #[arg(long)]
        normal: bool,
        /// Print every embedding instead of the count.
        #[arg(long)]
        list: bool,
    },
    /// Print the interval [σ, π] grouped by size.
    Interval { sigma: String, pi: String },
    /// Run an identity suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Family parameter range, e.g. `2..4`.
        #[arg(long, value_parser = parse_range)]
        n: Option<RangeInclusive<usize>>,
        /// Largest permutation size for exhaustive suites.
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Generate a family member, e.g. `pi:3` or `pink:4,2`.
    Family {
        #[arg(value_parser = parse_family)]
        spec: FamilySpec,
    },
    /// Tabulate μ(1, ·) over a family: `pi`, `kappa`, `pink`, `delta`, `tbalt`.
    Explore {
        family: String,
        #[arg(long, value_parser = parse_range, default_value = "1..3")]
        n: RangeInclusive<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: perm_mobius::Error| e.to_string())
}

fn parse_family(s: &str) -> Result<FamilySpec, String> {
    s.parse().map_err(|e: perm_mobius::Error| e.to_string())
}

/// `a..b`, `a..=b` (both inclusive) or a single `a`.
fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad range `{s}`"));
    let r = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
        None => num(s)?..=num(s)?,
    };
    if r.is_empty() {
        return Err(format!("empty range `{s}`"));
    }
    Ok(r)
}

fn parse_perm(s: &str) -> anyhow::Result<Permutation> {
    Ok(s.parse::<Permutation>()?)
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn int_value(v: impl ToString) -> Value {
    let s = v.to_string();
    s.parse::<i64>().map(Value::from).unwrap_or(Value::String(s))
}

/// One computed result in the stable JSON shape.
struct Report {
    inputs: Map<String, Value>,
    result: Value,
    strategy: Option<&'static str>,
    elapsed_ms: f64,
    pass: Option<bool>,
}

impl Report {
    fn to_json(&self) -> Value {
        let mut out = json!({
            "inputs": self.inputs,
            "result": self.result,
            "strategy": self.strategy,
            "elapsed_ms": self.elapsed_ms,
        });
        if let Some(pass) = self.pass {
            out["pass"] = Value::Bool(pass);
        }
        out
    }

    fn csv(&self, out: &mut impl Write) -> anyhow::Result<()> {
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        };
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = self.inputs.keys().cloned().collect();
        header.extend(["result", "strategy", "elapsed_ms"].map(String::from));
        let mut row: Vec<String> = self.inputs.values().map(cell).collect();
        row.extend([
            cell(&self.result),
            self.strategy.unwrap_or_default().to_string(),
            self.elapsed_ms.to_string(),
        ]);
        if let Some(pass) = self.pass {
            header.push("pass".into());
            row.push(pass.to_string());
        }
        w.write_record(&header)?;
        w.write_record(&row)?;
        w.flush()?;
        Ok(())
    }
}

fn pair_inputs(sigma: &Permutation, pi: &Permutation) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("sigma".into(), Value::String(sigma.to_string()));
    m.insert("pi".into(), Value::String(pi.to_string()));
    m
}

fn emit(report: &Report, format: Format, plain: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> anyhow::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        Format::Csv => report.csv(&mut out)?,
        Format::Plain => plain(&mut out)?,
    }
    Ok(())
}

fn run_one(strategy: Strategy, sigma: &Permutation, pi: &Permutation) -> perm_mobius::Result<Value> {
    let v = match strategy {
        Strategy::Recursive => mu_recursive(sigma, pi, &MobiusCache::new())?,
        Strategy::Chain => mu_chain(sigma, pi)?,
        Strategy::EmbeddingRecursion => {
            mu_embedding_recursion(sigma, pi, &MobiusCache::for_strategy(strategy))?
        }
        Strategy::FixedIdes => mu_fixed_ides(sigma, pi)?,
        Strategy::FixedDes => mu_fixed_des(sigma, pi)?,
    };
    Ok(int_value(v))
}

fn cmd_mu(sigma: &str, pi: &str, which: StrategyArg, format: Format) -> anyhow::Result<ExitCode> {
    let (sigma, pi) = (parse_perm(sigma)?, parse_perm(pi)?);
    let start = Instant::now();
    let single = match which {
        StrategyArg::Recursive => Some(Strategy::Recursive),
        StrategyArg::Chain => Some(Strategy::Chain),
        StrategyArg::Embedding => Some(Strategy::EmbeddingRecursion),
        StrategyArg::FixedIdes => Some(Strategy::FixedIdes),
        StrategyArg::FixedDes => Some(Strategy::FixedDes),
        StrategyArg::All => None,
    };
    if let Some(strategy) = single {
        let value = run_one(strategy, &sigma, &pi)?;
        let report = Report {
            inputs: pair_inputs(&sigma, &pi),
            result: value.clone(),
            strategy: Some(strategy.name()),
            elapsed_ms: elapsed_ms(start),
            pass: None,
        };
        emit(&report, format, |out| writeln!(out, "{value}"))?;
        return Ok(ExitCode::SUCCESS);
    }

    // Fixed-statistic formulas only apply when the statistic matches; skip
    // them otherwise rather than failing the whole comparison.
    let mut values = Vec::new();
    let mut seen: Option<Value> = None;
    let mut agree = true;
    for strategy in Strategy::ALL {
        let value = match strategy {
            Strategy::FixedIdes if sigma.inverse_descent_count() != pi.inverse_descent_count() => Value::Null,
            Strategy::FixedDes if sigma.descent_count() != pi.descent_count() => Value::Null,
            _ => run_one(strategy, &sigma, &pi)?,
        };
        if !value.is_null() {
            match &seen {
                Some(first) => agree &= *first == value,
                None => seen = Some(value.clone()),
            }
        }
        values.push((strategy.name(), value));
    }
    let report = Report {
        inputs: pair_inputs(&sigma, &pi),
        result: Value::Object(values.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()),
        strategy: Some("all"),
        elapsed_ms: elapsed_ms(start),
        pass: Some(agree),
    };
    emit(&report, format, |out| {
        for (name, v) in &values {
            let shown = if v.is_null() { "n/a".to_string() } else { v.to_string() };
            writeln!(out, "{name:<11} {shown}")?;
        }
        writeln!(out, "agree       {agree}")
    })?;
    Ok(if agree { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_contains(sigma: &str, pi: &str, format: Format) -> anyhow::Result<ExitCode> {
    let (sigma, pi) = (parse_perm(sigma)?, parse_perm(pi)?);
    let start = Instant::now();
    let found = contains(&sigma, &pi);
    let report = Report {
        inputs: pair_inputs(&sigma, &pi),
        result: Value::Bool(found),
        strategy: None,
        elapsed_ms: elapsed_ms(start),
        pass: None,
    };
    emit(&report, format, |out| writeln!(out, "{found}"))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_embeddings(sigma: &str, pi: &str, normal: bool, list: bool, format: Format) -> anyhow::Result<ExitCode> {
    let (sigma, pi) = (parse_perm(sigma)?, parse_perm(pi)?);
    let start = Instant::now();
    let mut inputs = pair_inputs(&sigma, &pi);
    inputs.insert("normal".into(), Value::Bool(normal));
    let (result, lines) = if list {
        let images = if normal {
            enumerate_normal_embeddings(&sigma, &pi)
        } else {
            enumerate_embeddings(&sigma, &pi)
        };
        let lines: Vec<String> = images
            .iter()
            .map(|e| e.positions.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        (json!(images.iter().map(|e| e.positions.clone()).collect::<Vec<_>>()), lines)
    } else {
        let n = if normal {
            count_normal_embeddings(&sigma, &pi)
        } else {
            count_embeddings(&sigma, &pi)
        };
        (int_value(&n), vec![n.to_string()])
    };
    let report = Report {
        inputs,
        result,
        strategy: None,
        elapsed_ms: elapsed_ms(start),
        pass: None,
    };
    emit(&report, format, |out| lines.iter().try_for_each(|l| writeln!(out, "{l}")))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_interval(sigma: &str, pi: &str, format: Format) -> anyhow::Result<ExitCode> {
    let (sigma, pi) = (parse_perm(sigma)?, parse_perm(pi)?);
    let start = Instant::now();
    let iv = build_interval(&sigma, &pi)?;
    let report = Report {
        inputs: pair_inputs(&sigma, &pi),
        result: iv.to_json(),
        strategy: None,
        elapsed_ms: elapsed_ms(start),
        pass: None,
    };
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["size", "perm"])?;
            for (size, members) in &iv.strata {
                for m in members {
                    w.write_record([size.to_string(), m.to_string()])?;
                }
            }
            w.flush()?;
        }
        _ => emit(&report, format, |out| {
            for (size, members) in &iv.strata {
                let names: Vec<String> = members.iter().map(|m| m.to_string()).collect();
                writeln!(out, "{size}: {}", names.join(" "))?;
            }
            Ok(())
        })?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    suite: Suite,
    n: Option<RangeInclusive<usize>>,
    max_size: Option<usize>,
    format: Format,
) -> anyhow::Result<ExitCode> {
    let mut params = suite.default_params();
    if let Some(n) = n {
        params.n = n;
    }
    if let Some(m) = max_size {
        params.max_size = m;
    }
    let records = run_suite(suite, &params);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            for r in &records {
                writeln!(out, "{}", r.to_json_line())?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["identity", "instance", "lhs", "rhs", "pass", "skipped"])?;
            for r in &records {
                w.write_record([
                    r.identity.clone(),
                    r.instance.clone(),
                    r.lhs.to_string(),
                    r.rhs.to_string(),
                    r.pass.to_string(),
                    r.skipped.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Plain => {
            for r in &records {
                let tag = match (r.skipped, r.pass) {
                    (true, _) => "SKIP",
                    (false, true) => "PASS",
                    (false, false) => "FAIL",
                };
                write!(out, "{tag} {} {}: {} vs {}", r.identity, r.instance, r.lhs, r.rhs)?;
                match &r.note {
                    Some(note) => writeln!(out, " ({note})")?,
                    None => writeln!(out)?,
                }
            }
        }
    }
    let t = tally(&records);
    eprintln!("{suite}: {} passed, {} failed, {} skipped", t.passed, t.failed, t.skipped);
    Ok(if t.failed > 0 {
        ExitCode::from(1)
    } else if t.skipped > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_family(spec: FamilySpec, format: Format) -> anyhow::Result<ExitCode> {
    let start = Instant::now();
    let p = spec.generate()?;
    let mut inputs = Map::new();
    inputs.insert("spec".into(), Value::String(spec.to_string()));
    let report = Report {
        inputs,
        result: Value::String(p.to_string()),
        strategy: None,
        elapsed_ms: elapsed_ms(start),
        pass: None,
    };
    emit(&report, format, |out| writeln!(out, "{p}"))?;
    Ok(ExitCode::SUCCESS)
}

fn explore_specs(family: &str, n: &RangeInclusive<usize>, k: Option<usize>) -> anyhow::Result<Vec<FamilySpec>> {
    if family.contains(':') {
        return Ok(vec![parse_family(family).map_err(|e| anyhow!(e))?]);
    }
    n.clone()
        .map(|n| {
            let text = match (family, k) {
                ("pink", Some(k)) => format!("pink:{n},{k}"),
                ("pink", None) => bail!("family `pink` needs --k"),
                (name, _) => format!("{name}:{n}"),
            };
            parse_family(&text).map_err(|e| anyhow!(e))
        })
        .collect()
}

fn cmd_explore(family: &str, n: RangeInclusive<usize>, k: Option<usize>, format: Format) -> anyhow::Result<ExitCode> {
    let specs = explore_specs(family, &n, k)?;
    let one = Permutation::identity(1)?;
    let rows: Vec<(FamilySpec, Permutation, Value, f64)> = specs
        .par_iter()
        .map(|spec| {
            let p = spec.generate()?;
            let start = Instant::now();
            let mu = mu_recursive(&one, &p, &MobiusCache::new())?;
            Ok((*spec, p, int_value(mu), elapsed_ms(start)))
        })
        .collect::<perm_mobius::Result<_>>()?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            for (spec, p, mu, ms) in &rows {
                let row = json!({
                    "family": spec.name(),
                    "params": spec.params(),
                    "size": p.size(),
                    "mu": mu,
                    "elapsed_ms": ms,
                });
                writeln!(out, "{row}")?;
            }
        }
        Format::Csv | Format::Plain => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["family", "params", "size", "mu", "elapsed_ms"])?;
            for (spec, p, mu, ms) in &rows {
                w.write_record([
                    spec.name().to_string(),
                    spec.params(),
                    p.size().to_string(),
                    mu.to_string().trim_matches('"').to_string(),
                    ms.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot start worker pool")?;
    }
    if let Some(cap) = cli.cap {
        if cap == 0 || cap > perm::MAX_SIZE {
            bail!("--cap must be between 1 and {}", perm::MAX_SIZE);
        }
        poset::set_interval_cap(cap);
        if cap > perm::size_cap() {
            perm::set_size_cap(cap);
        }
    }
    let default = match cli.command {
        Command::Explore { .. } => Format::Csv,
        _ => Format::Plain,
    };
    let format = cli.format.unwrap_or(default);
    match cli.command {
        Command::Mu { sigma, pi, strategy } => cmd_mu(&sigma, &pi, strategy, format),
        Command::Contains { sigma, pi } => cmd_contains(&sigma, &pi, format),
        Command::Embeddings { sigma, pi, normal, list } => cmd_embeddings(&sigma, &pi, normal, list, format),
        Command::Interval { sigma, pi } => cmd_interval(&sigma, &pi, format),
        Command::Verify { suite, n, max_size } => cmd_verify(suite, n, max_size, format),
        Command::Family { spec } => cmd_family(spec, format),
        Command::Explore { family, n, k } => cmd_explore(&family, n, k, format),
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<perm_mobius::Error>() {
        Some(perm_mobius::Error::SizeCapExceeded { .. }) => 3,
        Some(perm_mobius::Error::Inconsistent(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
