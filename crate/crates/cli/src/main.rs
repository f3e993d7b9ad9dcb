use std::fmt::Write as _;
use std::process::ExitCode;
use std::sync::Arc;

use braid_kl::{
    enumerate_k, symbolic_expansion, Error, PxyReading, Stirling, TermOrder, DEFAULT_PXY_READING,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

mod methods;
mod selftest;

use methods::{
    Bounds, Engine, Method, Outcome, DEFAULT_CHAIN_BOUND, DEFAULT_GENERIC_BOUND,
    DEFAULT_LATTICE_BOUND,
};

/// Kazhdan-Lusztig coefficients of braid matroids.
#[derive(Parser, Debug)]
#[command(name = "klb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    bounds: BoundArgs,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Largest n for which the set-partition lattice is built
    #[arg(long, global = true, default_value_t = DEFAULT_LATTICE_BOUND)]
    lattice_bound: usize,

    /// Largest n for the direct lattice solve (`oracle` method)
    #[arg(long, global = true, default_value_t = DEFAULT_GENERIC_BOUND)]
    oracle_bound: usize,

    /// Largest n for the chain-triple sum
    #[arg(long, global = true, default_value_t = DEFAULT_CHAIN_BOUND)]
    chain_bound: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print C(n,i), the coefficient of t^i in P_n(t)
    Coeff {
        n: usize,
        i: usize,
        #[arg(long, value_enum, default_value_t = Method::Recursion)]
        method: Method,
        /// Reading of the flag-Whitney formula (see `pxy-readings`)
        #[arg(long, default_value_t = DEFAULT_PXY_READING.name().to_string())]
        interpretation: String,
        /// Run every applicable method and compare
        #[arg(long)]
        all_methods: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print P_n(t)
    Poly {
        n: usize,
        #[arg(long, value_enum, default_value_t = Order::Desc)]
        order: Order,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Tabulate C(n,i) for 2 <= n <= max-n, 0 <= i < (n-1)/2
    Table {
        #[arg(long)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Method::Recursion)]
        method: Method,
        #[arg(long)]
        all_methods: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the chain triples indexing C(n,i)
    Chains {
        n: usize,
        i: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Expand C(n,i) into m(.) and s(.,.) factors, grouped by the first partition
    Expand {
        n: usize,
        i: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the readings of the flag-Whitney formula
    PxyReadings,
    /// Cross-check every method and oracle
    Selftest {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long, default_value_t = 6)]
        oracle_max_n: usize,
        /// Corrupt one cached s(n,k) before running (negative control)
        #[arg(long, hide = true, value_parser = parse_pair)]
        inject_stirling_fault: Option<(usize, usize)>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
    Md,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Order {
    Asc,
    Desc,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected n,k")?;
    Ok((
        a.trim().parse().map_err(|_| "bad n")?,
        b.trim().parse().map_err(|_| "bad k")?,
    ))
}

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or a request outside a method's domain (exit 2).
    Usage(String),
    /// Methods disagree or a mandatory check failed (exit 1).
    Disagreement(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InconsistentSolve(_) => Failure::Disagreement(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn warn_raised(bounds: &Bounds) {
    for (name, value, default) in [
        ("lattice", bounds.lattice, DEFAULT_LATTICE_BOUND),
        ("oracle", bounds.generic, DEFAULT_GENERIC_BOUND),
        ("chain", bounds.chain, DEFAULT_CHAIN_BOUND),
    ] {
        if value > default {
            eprintln!("warning: {name} bound raised to {value} (default {default}); runtime grows quickly");
        }
    }
}

fn reject_format(format: Format, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage(
            format!("format {format:?} is not supported here").to_lowercase(),
        ))
    }
}

fn in_chain_domain(n: usize, i: usize) -> Result<(), Failure> {
    if n < 2 || 2 * i + 1 >= n {
        return Err(Failure::Usage(format!(
            "needs n >= 2 and i < (n-1)/2, got n = {n}, i = {i}"
        )));
    }
    Ok(())
}

fn show(o: &Outcome) -> String {
    match o {
        Outcome::Value(v) => v.to_string(),
        Outcome::NotApplicable(why) if why.starts_with("failed") => "error".into(),
        Outcome::NotApplicable(_) => "n/a".into(),
    }
}

/// Every method at `(n, i)`, plus whether the applicable ones agree.
fn all_methods(
    engine: &Engine,
    n: usize,
    i: usize,
) -> Result<(Vec<(Method, Outcome)>, bool), Failure> {
    let mut rows = Vec::new();
    for m in Method::ALL {
        let outcome = match engine.compute(m, n, i) {
            Ok(o) => o,
            Err(Failure::Disagreement(msg)) => Outcome::NotApplicable(format!("failed: {msg}")),
            Err(e) => return Err(e),
        };
        rows.push((m, outcome));
    }
    let values: Vec<&BigInt> = rows
        .iter()
        .filter_map(|(_, o)| match o {
            Outcome::Value(v) => Some(v),
            _ => None,
        })
        .collect();
    let failed = rows
        .iter()
        .any(|(_, o)| matches!(o, Outcome::NotApplicable(why) if why.starts_with("failed")));
    let agree = !failed && values.windows(2).all(|w| w[0] == w[1]);
    Ok((rows, agree))
}

fn cmd_coeff(
    engine: &Engine,
    n: usize,
    i: usize,
    method: Method,
    all: bool,
    format: Format,
) -> Result<String, Failure> {
    reject_format(format, &[Format::Text, Format::Json])?;
    if !all {
        return match engine.compute(method, n, i)? {
            Outcome::Value(v) => Ok(match format {
                Format::Json => {
                    json!({ "n": n, "i": i, "method": method.name(), "c": v.to_string() })
                        .to_string()
                        + "\n"
                }
                _ => format!("{v}\n"),
            }),
            Outcome::NotApplicable(why) => {
                Err(Failure::Usage(format!("{} method: {why}", method.name())))
            }
        };
    }
    let (rows, agree) = all_methods(engine, n, i)?;
    let out = match format {
        Format::Json => {
            let methods: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(m, o)| {
                    let v = match o {
                        Outcome::Value(v) => json!(v.to_string()),
                        Outcome::NotApplicable(_) => serde_json::Value::Null,
                    };
                    (m.name().to_string(), v)
                })
                .collect();
            json!({ "n": n, "i": i, "methods": methods, "agree": agree }).to_string() + "\n"
        }
        _ => {
            let mut s = String::new();
            for (m, o) in &rows {
                let _ = writeln!(s, "{:<10} {}", m.name(), show(o));
            }
            let _ = writeln!(s, "{}", if agree { "agree" } else { "DISAGREE" });
            s
        }
    };
    if agree {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Disagreement(format!(
            "methods disagree at C({n},{i})"
        )))
    }
}

fn cmd_poly(engine: &Engine, n: usize, order: Order, format: Format) -> Result<String, Failure> {
    reject_format(format, &[Format::Text, Format::Json])?;
    let p = engine.kl.kl_braid_poly(n)?;
    let order = match order {
        Order::Asc => TermOrder::Ascending,
        Order::Desc => TermOrder::Descending,
    };
    Ok(match format {
        Format::Json => {
            json!({ "n": n, "coefficients": p.to_decimal_strings(), "text": p.render(order) })
                .to_string()
                + "\n"
        }
        _ => format!("{}\n", p.render(order)),
    })
}

#[derive(Serialize)]
struct TableRow {
    n: usize,
    i: usize,
    c: String,
}

fn cmd_table(
    engine: &Engine,
    max_n: usize,
    method: Method,
    all: bool,
    format: Format,
) -> Result<String, Failure> {
    if !all && method == Method::Chain && max_n > engine.bounds.chain {
        return Err(Failure::Usage(format!(
            "max-n {max_n} exceeds the chain bound {}",
            engine.bounds.chain
        )));
    }
    if !all && method == Method::Oracle && max_n > engine.bounds.generic {
        return Err(Failure::Usage(format!(
            "max-n {max_n} exceeds the oracle bound {}",
            engine.bounds.generic
        )));
    }
    let cells: Vec<(usize, usize)> = (2..=max_n)
        .flat_map(|n| {
            (0..n)
                .take_while(move |&i| 2 * i + 1 < n)
                .map(move |i| (n, i))
        })
        .collect();

    let mut header: Vec<String> = vec!["n".into(), "i".into(), "c".into()];
    let mut body: Vec<Vec<String>> = Vec::new();
    let mut disagreements = Vec::new();
    if all {
        header.extend(Method::ALL.iter().map(|m| m.name().to_string()));
        header.push("agree".into());
    }
    for &(n, i) in &cells {
        let mut row = vec![n.to_string(), i.to_string()];
        if all {
            let (outcomes, agree) = all_methods(engine, n, i)?;
            row.push(show(&outcomes[0].1));
            row.extend(outcomes.iter().map(|(_, o)| show(o)));
            row.push(agree.to_string());
            if !agree {
                disagreements.push(format!("C({n},{i})"));
            }
        } else {
            match engine.compute(method, n, i)? {
                Outcome::Value(v) => row.push(v.to_string()),
                Outcome::NotApplicable(why) => {
                    return Err(Failure::Usage(format!(
                        "{} method at ({n},{i}): {why}",
                        method.name()
                    )))
                }
            }
        }
        body.push(row);
    }

    let out = match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(&header)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            for row in &body {
                w.write_record(row)
                    .map_err(|e| Failure::Usage(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?).unwrap()
        }
        Format::Json if !all => {
            let rows: Vec<TableRow> = body
                .iter()
                .map(|r| TableRow {
                    n: r[0].parse().unwrap(),
                    i: r[1].parse().unwrap(),
                    c: r[2].clone(),
                })
                .collect();
            serde_json::to_string_pretty(&rows).unwrap() + "\n"
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = body
                .iter()
                .map(|r| {
                    let mut obj = serde_json::Map::new();
                    for (k, v) in header.iter().zip(r) {
                        let value = match k.as_str() {
                            "n" | "i" => json!(v.parse::<usize>().unwrap()),
                            "agree" => json!(v == "true"),
                            _ if v == "n/a" => serde_json::Value::Null,
                            _ => json!(v),
                        };
                        obj.insert(k.clone(), value);
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            serde_json::to_string_pretty(&rows).unwrap() + "\n"
        }
        Format::Md => {
            let mut s = format!("| {} |\n", header.join(" | "));
            let _ = writeln!(s, "|{}", "---|".repeat(header.len()));
            for row in &body {
                let _ = writeln!(s, "| {} |", row.join(" | "));
            }
            s
        }
        Format::Text => align(&header, &body),
    };
    if disagreements.is_empty() {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Disagreement(format!(
            "methods disagree at {}",
            disagreements.join(", ")
        )))
    }
}

fn align(header: &[String], body: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            body.iter()
                .map(|r| r[c].len())
                .chain([header[c].len()])
                .max()
                .unwrap()
        })
        .collect();
    let mut s = String::new();
    for row in std::iter::once(header).chain(body.iter().map(|r| r.as_slice())) {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v:>w$}"))
            .collect();
        let _ = writeln!(s, "{}", cells.join("  ").trim_end());
    }
    s
}

fn cmd_chains(n: usize, i: usize, format: Format) -> Result<String, Failure> {
    reject_format(format, &[Format::Text, Format::Json])?;
    in_chain_domain(n, i)?;
    let triples = enumerate_k(n, i)?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&triples).unwrap() + "\n",
        _ => {
            let mut s = String::new();
            for t in &triples {
                let _ = writeln!(s, "{t}");
            }
            s
        }
    })
}

fn cmd_expand(engine: &Engine, n: usize, i: usize, format: Format) -> Result<String, Failure> {
    reject_format(format, &[Format::Text, Format::Json])?;
    in_chain_domain(n, i)?;
    if n > engine.bounds.chain {
        return Err(Failure::Usage(format!(
            "n = {n} exceeds the chain bound {}",
            engine.bounds.chain
        )));
    }
    let e = symbolic_expansion(engine.stirling.as_ref(), n, i)?;
    Ok(match format {
        Format::Json => {
            let groups: Vec<serde_json::Value> = e
                .groups
                .iter()
                .map(|g| {
                    let terms: Vec<serde_json::Value> = g
                        .terms
                        .iter()
                        .map(|t| {
                            json!({
                                "triple": t.triple,
                                "factors": t.factors.iter().map(|f| json!({
                                    "lambda": f.partition,
                                    "alpha": f.alpha,
                                    "m": f.multiplicity.to_string(),
                                    "compositions": f.compositions.iter()
                                        .map(|(d, v)| json!({ "d": d, "product": v.to_string() }))
                                        .collect::<Vec<_>>(),
                                    "value": f.value.to_string(),
                                })).collect::<Vec<_>>(),
                                "value": t.value.to_string(),
                            })
                        })
                        .collect();
                    json!({ "lambda1": g.lambda1, "text": g.text, "terms": terms, "value": g.value.to_string() })
                })
                .collect();
            serde_json::to_string_pretty(&groups).unwrap() + "\n"
        }
        _ => {
            let mut s = String::new();
            for g in &e.groups {
                let _ = writeln!(
                    s,
                    "{:<12} {:>8}  {}",
                    g.lambda1.to_string(),
                    g.value.to_string(),
                    g.text
                );
            }
            let _ = writeln!(s, "C({n},{i}) = {}", e.value);
            s
        }
    })
}

fn cmd_pxy_readings() -> String {
    let mut s = String::new();
    for r in PxyReading::ALL {
        let mark = if r == DEFAULT_PXY_READING {
            " (default)"
        } else {
            ""
        };
        let _ = writeln!(s, "{}{mark}\n    {}", r.name(), r.description());
    }
    s
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("KLB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Failure::Usage(format!(
            "KLB_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<String, Failure> {
    configure_threads()?;
    let bounds = Bounds {
        lattice: cli.bounds.lattice_bound,
        generic: cli.bounds.oracle_bound,
        chain: cli.bounds.chain_bound,
    };
    warn_raised(&bounds);
    let reading = match &cli.command {
        Command::Coeff { interpretation, .. } => interpretation.parse::<PxyReading>()?,
        _ => DEFAULT_PXY_READING,
    };
    let engine = Engine::new(Arc::new(Stirling::new()), bounds, reading);
    match cli.command {
        Command::Coeff {
            n,
            i,
            method,
            all_methods,
            format,
            ..
        } => cmd_coeff(&engine, n, i, method, all_methods, format),
        Command::Poly { n, order, format } => cmd_poly(&engine, n, order, format),
        Command::Table {
            max_n,
            method,
            all_methods,
            format,
        } => cmd_table(&engine, max_n, method, all_methods, format),
        Command::Chains { n, i, format } => cmd_chains(n, i, format),
        Command::Expand { n, i, format } => cmd_expand(&engine, n, i, format),
        Command::PxyReadings => Ok(cmd_pxy_readings()),
        Command::Selftest {
            max_n,
            oracle_max_n,
            inject_stirling_fault,
        } => {
            let (report, ok) = selftest::run(&selftest::SelftestConfig {
                max_n,
                oracle_max_n,
                bounds,
                fault: inject_stirling_fault,
            })?;
            if ok {
                Ok(report)
            } else {
                print!("{report}");
                Err(Failure::Disagreement("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Disagreement(msg)) => {
            eprintln!("klb: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("klb: {msg}");
            ExitCode::from(2)
        }
    }
}
