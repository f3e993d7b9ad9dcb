use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use braid_kl::lattice::FlagIndex;
use braid_kl::{
    build_partition_lattice_bounded, flag_whitney_bruteforce, flag_whitney_product, kl_c1,
    kl_coeff_via_theorem, multiplicity, partitions_of, select_pxy_reading, set_partitions_bounded,
    stirling_first_nonrecursive, IntPartition, Stirling,
};

use crate::methods::{Bounds, Engine};
use crate::Failure;

pub struct SelftestConfig {
    pub max_n: usize,
    pub oracle_max_n: usize,
    pub bounds: Bounds,
    pub fault: Option<(usize, usize)>,
}

struct Check {
    name: &'static str,
    mandatory: bool,
    passed: bool,
    detail: String,
}

type Outcome = Result<(bool, String), String>;

fn mismatch(found: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok && found.len() < 3 {
        found.push(what());
    }
}

fn verdict(cells: usize, found: Vec<String>) -> Outcome {
    if found.is_empty() {
        Ok((true, format!("{cells} cells")))
    } else {
        Ok((false, format!("mismatch at {}", found.join("; "))))
    }
}

pub fn run(cfg: &SelftestConfig) -> Result<(String, bool), Failure> {
    if cfg.max_n > cfg.bounds.chain {
        return Err(Failure::Usage(format!(
            "--max-n {} exceeds the chain bound {}",
            cfg.max_n, cfg.bounds.chain
        )));
    }
    let oracle_cap = cfg.bounds.lattice.min(cfg.bounds.generic);
    if cfg.oracle_max_n > oracle_cap {
        return Err(Failure::Usage(format!(
            "--oracle-max-n {} exceeds the oracle bound {oracle_cap}",
            cfg.oracle_max_n
        )));
    }

    let stirling = Arc::new(Stirling::new());
    if let Some((n, k)) = cfg.fault {
        let v = stirling.first(n, k);
        stirling.inject_first_fault(n, k, v + 1);
    }
    let engine = Engine::new(
        Arc::clone(&stirling),
        cfg.bounds,
        braid_kl::DEFAULT_PXY_READING,
    );
    let (max_n, oracle_n) = (cfg.max_n.max(2), cfg.oracle_max_n.max(1));

    let mut checks = Vec::new();
    let mut push = |name, mandatory, outcome: Outcome| {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        checks.push(Check {
            name,
            mandatory,
            passed,
            detail,
        });
    };

    push(
        "stirling-nonrecursive",
        true,
        (|| {
            let mut found = Vec::new();
            let mut cells = 0;
            for n in 1..=max_n {
                for m in 1..=n {
                    let direct = stirling_first_nonrecursive(n, m).map_err(|e| e.to_string())?;
                    mismatch(&mut found, direct == stirling.first(n, m), || {
                        format!("s({n},{m})")
                    });
                    cells += 1;
                }
            }
            verdict(cells, found)
        })(),
    );

    push(
        "char-poly-oracle",
        true,
        (|| {
            let mut found = Vec::new();
            for n in 2..=oracle_n {
                let lattice = build_partition_lattice_bounded(n, cfg.bounds.lattice)
                    .map_err(|e| e.to_string())?;
                let ok = lattice.char_poly() == stirling.chi(n);
                mismatch(&mut found, ok, || format!("n = {n}"));
            }
            verdict(oracle_n.saturating_sub(1), found)
        })(),
    );

    push(
        "multiplicity-census",
        true,
        (|| {
            let mut found = Vec::new();
            let mut cells = 0;
            for n in 1..=oracle_n {
                let mut census: HashMap<IntPartition, usize> = HashMap::new();
                for p in set_partitions_bounded(n, cfg.bounds.lattice).map_err(|e| e.to_string())? {
                    *census.entry(p.signature()).or_default() += 1;
                }
                for lambda in partitions_of(n) {
                    let m = multiplicity(&lambda).map_err(|e| e.to_string())?;
                    mismatch(&mut found, m == census[&lambda].into(), || {
                        lambda.to_string()
                    });
                    cells += 1;
                }
            }
            verdict(cells, found)
        })(),
    );

    push(
        "flag-whitney",
        true,
        (|| {
            let mut found = Vec::new();
            let mut cells = 0;
            for n in 2..=oracle_n {
                let lattice = build_partition_lattice_bounded(n, cfg.bounds.lattice)
                    .map_err(|e| e.to_string())?;
                for index in FlagIndex::all(n - 1, 3) {
                    let ok = flag_whitney_product(stirling.as_ref(), n, &index)
                        == flag_whitney_bruteforce(&lattice, &index);
                    mismatch(&mut found, ok, || {
                        format!("n = {n}, I = {:?}", index.ranks())
                    });
                    cells += 1;
                }
            }
            verdict(cells, found)
        })(),
    );

    push(
        "generic-kl-oracle",
        true,
        (|| {
            let mut found = Vec::new();
            for n in 2..=oracle_n {
                let ok = engine.oracle_poly(n).map_err(|e| e.to_string())?
                    == engine.kl.kl_braid_poly(n).map_err(|e| e.to_string())?;
                mismatch(&mut found, ok, || format!("n = {n}"));
            }
            verdict(oracle_n.saturating_sub(1), found)
        })(),
    );

    push(
        "method-agreement",
        true,
        (|| {
            let mut found = Vec::new();
            let mut cells = 0;
            for n in 2..=max_n {
                for i in (0..n).take_while(|&i| 2 * i + 1 < n) {
                    let chain =
                        kl_coeff_via_theorem(stirling.as_ref(), n, i).map_err(|e| e.to_string())?;
                    let rec = engine.kl.kl_coeff(n, i).map_err(|e| e.to_string())?;
                    mismatch(&mut found, chain == rec, || {
                        format!("C({n},{i}): chain {chain}, recursion {rec}")
                    });
                    cells += 1;
                }
            }
            verdict(cells, found)
        })(),
    );

    push(
        "degree-one",
        true,
        (|| {
            let mut found = Vec::new();
            for n in 2..=max_n {
                let c1 = kl_c1(stirling.as_ref(), n).map_err(|e| e.to_string())?;
                let rec = engine.kl.kl_coeff(n, 1).map_err(|e| e.to_string())?;
                mismatch(&mut found, c1 == rec, || format!("n = {n}"));
            }
            verdict(max_n - 1, found)
        })(),
    );

    push(
        "defining-identity",
        true,
        (|| {
            let mut found = Vec::new();
            for n in 2..=max_n {
                let report = engine
                    .kl
                    .verify_defining_identity(n)
                    .map_err(|e| e.to_string())?;
                mismatch(&mut found, report.holds(), || format!("n = {n}"));
            }
            verdict(max_n - 1, found)
        })(),
    );

    let mut pxy_notes = String::new();
    push(
        "pxy-reading",
        false,
        (|| {
            let selection = select_pxy_reading(&engine.kl, 10, 2).map_err(|e| e.to_string())?;
            for t in &selection.tallies {
                let _ = write!(
                    pxy_notes,
                    "\n      {:<22} {} match, {} miss",
                    t.reading.name(),
                    t.matches,
                    t.mismatches
                );
                if let Some((n, i, got, want)) = &t.nearest_miss {
                    let _ = write!(
                        pxy_notes,
                        "; nearest miss C({n},{i}) = {got}, expected {want}"
                    );
                }
            }
            Ok(match selection.promoted {
                Some(r) => (true, format!("promoted {r} on n <= 10, i <= 2")),
                None => (false, "no reading matches on n <= 10, i <= 2".into()),
            })
        })(),
    );

    let mut out = String::new();
    let _ = writeln!(
        out,
        "selftest: max-n {}, oracle-max-n {}",
        cfg.max_n, cfg.oracle_max_n
    );
    for c in &checks {
        let tag = match (c.passed, c.mandatory) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "WARN",
        };
        let _ = writeln!(out, "[{tag}] {:<22} {}", c.name, c.detail);
        if c.name == "pxy-reading" && !pxy_notes.is_empty() {
            let _ = writeln!(out, "{}", pxy_notes.trim_start_matches('\n'));
        }
    }
    let ok = checks.iter().all(|c| c.passed || !c.mandatory);
    let _ = writeln!(
        out,
        "{}",
        if ok {
            "selftest passed"
        } else {
            "selftest FAILED"
        }
    );
    Ok((out, ok))
}
