//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines always reach stdout; exits nonzero on any failure that is not
//! pinned in `KNOWN_FAILURES` with its exact diagnosis.
//!
//! Every comparison is exact integer equality. The only tolerances are the
//! wall-clock budgets below.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use braid_kl::lattice::FlagIndex;
use braid_kl::*;
use num_bigint::BigInt;
use num_traits::{One, Zero};

const BUDGET_BASE_CASE: Duration = Duration::from_millis(1);
const BUDGET_EXAMPLE: Duration = Duration::from_millis(1);
const BUDGET_GRID: Duration = Duration::from_secs(300);
const BUDGET_GENERIC: Duration = Duration::from_secs(120);
const BUDGET_DEGREE_ONE: Duration = Duration::from_secs(1);
const BUDGET_CHAR_POLY: Duration = Duration::from_secs(60);
const BUDGET_FLAGS: Duration = Duration::from_secs(60);
const BUDGET_TABLE_ROWS: Duration = Duration::from_secs(1);
const BUDGET_CENSUS: Duration = Duration::from_secs(30);
const BUDGET_NONRECURSIVE: Duration = Duration::from_secs(1);
const BUDGET_IDENTITY: Duration = Duration::from_secs(60);
const BUDGET_POLY_20: Duration = Duration::from_secs(60);
const BUDGET_TABLE_12: Duration = Duration::from_secs(600);

/// Criteria expected to fail, with the diagnosis their detail must match.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    8,
    "C(6,2): 2+2+1+1 printed - computed 45; 3+1+1+1 printed -40 computed 20; \
     4+2 printed 15 computed -105; 5+1 printed 210 computed -60",
)];

struct Verdict {
    passed: bool,
    detail: String,
}

fn timed(budget: Duration, f: impl FnOnce() -> Result<String, String>) -> Verdict {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    match result {
        Ok(detail) if elapsed <= budget => Verdict {
            passed: true,
            detail: format!("{detail} [{elapsed:.2?}]"),
        },
        Ok(detail) => Verdict {
            passed: false,
            detail: format!("{detail}; took {elapsed:.2?}, budget {budget:?}"),
        },
        Err(detail) => Verdict {
            passed: false,
            detail,
        },
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

// -- independent oracles ----------------------------------------------------

/// s(n, k) by multiplying out t (t-1) ... (t-n+1).
fn falling_coeffs(n: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    for j in 0..n {
        let mut next = vec![BigInt::zero(); c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= v * j;
        }
        c = next;
    }
    c
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn binomial(n: usize, k: usize) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// n! / (prod b! prod mult!)
fn m_closed(blocks: &[usize]) -> BigInt {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &b in blocks {
        *counts.entry(b).or_default() += 1;
    }
    let denom = blocks.iter().map(|&b| factorial(b)).product::<BigInt>()
        * counts.values().map(|&c| factorial(c)).product::<BigInt>();
    factorial(blocks.iter().sum()) / denom
}

/// Bell numbers from the Bell triangle.
fn bell(n: usize) -> BigInt {
    let mut row = vec![BigInt::one()];
    for _ in 1..n {
        let mut next = vec![row.last().unwrap().clone()];
        for v in &row {
            let x = next.last().unwrap() + v;
            next.push(x);
        }
        row = next;
    }
    row.last().unwrap().clone()
}

// -- criteria -----------------------------------------------------------------

fn c1_base_case() -> Verdict {
    timed(BUDGET_BASE_CASE, || {
        let stirling = Stirling::new();
        let kl = KlTable::new(Arc::new(Stirling::new()));
        let term = term_value(
            &stirling,
            &KlChainTriple::new(vec![IntPartition::single(2)], vec![1], vec![0]).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        let lattice = build_partition_lattice(2).map_err(|e| e.to_string())?;
        let values = [
            ("recursion", kl.kl_coeff(2, 0).map_err(|e| e.to_string())?),
            (
                "chain",
                kl_coeff_via_theorem(&stirling, 2, 0).map_err(|e| e.to_string())?,
            ),
            (
                "chain-nonrecursive",
                kl_coeff_via_nonrecursive_stirling(2, 0).map_err(|e| e.to_string())?,
            ),
            ("single-term", term.value),
            (
                "lattice",
                kl_polynomial_generic(&lattice)
                    .map_err(|e| e.to_string())?
                    .coeff(0),
            ),
        ];
        for (name, v) in &values {
            check(*v == big(1), || format!("{name} gives {v}"))?;
        }
        Ok(format!("C(2,0) = 1 by {} routes", values.len()))
    })
}

fn c2_example() -> Verdict {
    timed(BUDGET_EXAMPLE, || {
        let k = enumerate_k(2, 0).map_err(|e| e.to_string())?;
        let only = KlChainTriple::new(vec![IntPartition::single(2)], vec![1], vec![0]).unwrap();
        check(k == vec![only.clone()], || format!("K(2,0) = {k:?}"))?;
        let one_one = IntPartition::new(vec![1, 1]).unwrap();
        let candidate = KlChainTriple::new(
            vec![one_one, IntPartition::single(2)],
            vec![1, 1],
            vec![0, 0],
        )
        .unwrap();
        let report = validate_triple(&candidate, 2, 0);
        check(!report.passes(Axiom::V), || {
            format!("{candidate} passes (v)")
        })?;
        Ok(format!("K(2,0) = {{{only}}}; {candidate} fails (v)"))
    })
}

fn c3_grid() -> Verdict {
    timed(BUDGET_GRID, || {
        let stirling = Stirling::new();
        let kl = KlTable::new(Arc::new(Stirling::new()));
        let mut cells = 0;
        for n in 2..=12 {
            for i in (0..n).take_while(|&i| 2 * i + 1 < n) {
                let a = kl_coeff_via_theorem(&stirling, n, i).map_err(|e| e.to_string())?;
                let b = kl.kl_coeff(n, i).map_err(|e| e.to_string())?;
                check(a == b, || format!("C({n},{i}): chain {a}, recursion {b}"))?;
                cells += 1;
            }
        }
        Ok(format!("{cells} cells, 2 <= n <= 12"))
    })
}

fn c4_generic() -> Verdict {
    timed(BUDGET_GENERIC, || {
        let kl = KlTable::new(Arc::new(Stirling::new()));
        for n in 2..=7 {
            let lattice = build_partition_lattice(n).map_err(|e| e.to_string())?;
            let generic = kl_polynomial_generic(&lattice).map_err(|e| e.to_string())?;
            let braid = kl.kl_braid_poly(n).map_err(|e| e.to_string())?;
            check(generic == braid, || {
                format!("n = {n}: lattice {generic}, recursion {braid}")
            })?;
        }
        Ok("2 <= n <= 7 (877 elements at n = 7)".into())
    })
}

fn c5_degree_one() -> Verdict {
    timed(BUDGET_DEGREE_ONE, || {
        let stirling = Stirling::new();
        let kl = KlTable::new(Arc::new(Stirling::new()));
        for n in 4..=25 {
            // S(n,2) = 2^(n-1) - 1, S(n,n-1) = s(n,n-1) in absolute value = C(n,2)
            let second_kind = (BigInt::one() << (n - 1)) - 1 - binomial(n, 2);
            let two_blocks: BigInt = (1..=n / 2)
                .map(|a| {
                    if 2 * a == n {
                        binomial(n, a) / 2
                    } else {
                        binomial(n, a)
                    }
                })
                .sum();
            let first_kind = -binomial(n, 2) + two_blocks;
            let rec = kl.kl_coeff(n, 1).map_err(|e| e.to_string())?;
            let closed = kl_c1(&stirling, n).map_err(|e| e.to_string())?;
            check(
                second_kind == rec && first_kind == rec && closed == rec,
                || {
                    format!("n = {n}: S-form {second_kind}, s-form {first_kind}, recursion {rec}, closed {closed}")
                },
            )?;
        }
        let spot: Vec<BigInt> = (4..=7).map(|n| kl.kl_coeff(n, 1).unwrap()).collect();
        check(spot == [1, 5, 16, 42].map(big), || {
            format!("spot values {spot:?}")
        })?;
        Ok("4 <= n <= 25; C(4..7,1) = 1, 5, 16, 42".into())
    })
}

fn c6_char_poly() -> Verdict {
    timed(BUDGET_CHAR_POLY, || {
        for n in 2..=8 {
            let lattice = build_partition_lattice(n).map_err(|e| e.to_string())?;
            let expected = &falling_coeffs(n)[1..];
            let got = lattice.char_poly();
            check(got.coeffs() == expected, || format!("n = {n}: {got}"))?;
        }
        Ok("2 <= n <= 8".into())
    })
}

fn c7_flags() -> Verdict {
    timed(BUDGET_FLAGS, || {
        let stirling = Stirling::new();
        let mut indices = 0;
        for n in 1..=6 {
            let lattice = build_partition_lattice(n).map_err(|e| e.to_string())?;
            for index in FlagIndex::all(n - 1, n) {
                let a = flag_whitney_product(&stirling, n, &index);
                let b = flag_whitney_bruteforce(&lattice, &index);
                check(a == b, || {
                    format!("n = {n}, I = {:?}: product {a}, chains {b}", index.ranks())
                })?;
                indices += 1;
            }
        }
        Ok(format!("{indices} multi-indices of length <= n, n <= 6"))
    })
}

// -- criterion 8: expression evaluator for the printed table --------------------

struct Expr<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Expr<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) {
        assert_eq!(
            self.peek(),
            Some(c),
            "at {} in {}",
            self.pos,
            String::from_utf8_lossy(self.src)
        );
        self.pos += 1;
    }

    fn number(&mut self) -> usize {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .unwrap()
    }

    fn sum(&mut self) -> BigInt {
        let mut total = self.product();
        while self.peek() == Some(b'+') {
            self.pos += 1;
            total += self.product();
        }
        total
    }

    fn product(&mut self) -> BigInt {
        let mut acc = BigInt::one();
        loop {
            let factor = match self.peek() {
                Some(b'm') => {
                    self.pos += 1;
                    self.eat(b'(');
                    let mut blocks = vec![self.number()];
                    while self.peek() == Some(b'+') {
                        self.pos += 1;
                        blocks.push(self.number());
                    }
                    self.eat(b')');
                    m_closed(&blocks)
                }
                Some(b's') => {
                    self.pos += 1;
                    self.eat(b'(');
                    let n = self.number();
                    self.eat(b',');
                    let k = self.number();
                    self.eat(b')');
                    falling_coeffs(n)[k].clone()
                }
                Some(b'(') => {
                    self.pos += 1;
                    let v = self.sum();
                    self.eat(b')');
                    v
                }
                Some(c) if c.is_ascii_digit() => BigInt::from(self.number()),
                _ => return acc,
            };
            let factor = if self.peek() == Some(b'^') {
                self.pos += 1;
                let e = self.number();
                num_traits::pow(factor, e)
            } else {
                factor
            };
            acc *= factor;
        }
    }

    /// Top-level terms keyed by their leading m(...) partition.
    fn groups(src: &str) -> BTreeMap<String, BigInt> {
        let mut e = Expr {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = BTreeMap::new();
        loop {
            let start = e.pos;
            let value = e.product();
            let text = &src[start..e.pos];
            let open = text.find("m(").unwrap() + 2;
            let close = open + text[open..].find(')').unwrap();
            let mut blocks: Vec<usize> = text[open..close]
                .split('+')
                .map(|b| b.trim().parse().unwrap())
                .collect();
            blocks.sort_unstable_by(|a, b| b.cmp(a));
            let key = blocks
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join("+");
            *out.entry(key).or_insert_with(BigInt::zero) += value;
            match e.peek() {
                Some(b'+') => e.pos += 1,
                None => return out,
                Some(c) => panic!("unexpected {:?}", c as char),
            }
        }
    }
}

// Rows of the printed expansion table, TeX spacing and \big removed.
const TABLE_ROWS: &[(usize, usize, &str)] = &[
    (3, 0, "m(3)s(3,3)"),
    (4, 0, "m(4)s(4,4)"),
    (
        4,
        1,
        "m(4)s(4,3)+m(3+1)s(3,3)s(1,1)m(2)s(2,2)+m(2+2)s(2,2)s(2,2)m(2)s(2,2)",
    ),
    (5, 0, "m(5)s(5,5)"),
    (
        5,
        1,
        "m(5)s(5,4)+m(3+2)s(2,2)s(3,3)m(2)s(2,2) +m(4+1)s(4,4)s(1,1)m(2)s(2,2)",
    ),
    (6, 0, "m(6)s(6,6)"),
    (
        6,
        1,
        "m(6)s(6,5) + m(5+1)s(5,5)s(1,1)m(1)m(2)s(1,1)s(2,2) + m(4+2) (m(2)s(2,2)s(4,4)s(2,2)) \
         +m(3+3) ( m(2)s(2,2) s(3,3)s(3,3) )",
    ),
    (
        6,
        2,
        "m(6)s(6,4) + m(5+1)s(5,3)m(2)s(2,2) + m(4+2) ( s(4,4)s(2,2)m(2)s(2,2) ) \
         + m(3+3) (2 m(2) s(2,2) s(3,2) s(3,3) ) +m(4+1+1) s(1,1)s(1,1)s(4,4) m(3) s(3,3) \
         +m(3+2+1)s(1,1)s(2,2)s(3,3)m(3)s(3,3) +m(2+2+2)s(2,2)s(2,2)s(2,2) m(3)s(3,3) \
         +m(3+1+1+1) s(1,1)^3 s(3,3) ( m(4)s(4,3) + m(3+1) s(3,3) s(2,2) )",
    ),
    (7, 0, "m(7)s(7,7)"),
    (
        7,
        1,
        "m(7)s(7,6) + m(6+1)s(6,6)s(2,2) +m(5+2)s(5,5)s(2,2)s(2,2) + m(4+3)s(4,4)s(3,3)s(2,2)",
    ),
];

fn c8_table() -> Verdict {
    timed(BUDGET_TABLE_ROWS, || {
        let stirling = Stirling::new();
        let mut problems = Vec::new();
        for &(n, i, printed) in TABLE_ROWS {
            let printed = Expr::groups(printed);
            let computed: BTreeMap<String, BigInt> = symbolic_expansion(&stirling, n, i)
                .map_err(|e| e.to_string())?
                .groups
                .into_iter()
                .map(|g| (g.lambda1.to_string(), g.value))
                .collect();
            let keys: HashSet<&String> = printed.keys().chain(computed.keys()).collect();
            let mut keys: Vec<&String> = keys.into_iter().collect();
            keys.sort();
            let mut row = Vec::new();
            for k in keys {
                let (p, c) = (printed.get(k), computed.get(k));
                if p != c {
                    let show = |v: Option<&BigInt>| v.map_or("-".to_string(), |v| v.to_string());
                    row.push(format!("{k} printed {} computed {}", show(p), show(c)));
                }
            }
            if !row.is_empty() {
                problems.push(format!("C({n},{i}): {}", row.join("; ")));
            }
        }
        if problems.is_empty() {
            Ok(format!("{} rows, per-group values agree", TABLE_ROWS.len()))
        } else {
            Err(problems.join(" | "))
        }
    })
}

fn c9_census() -> Verdict {
    timed(BUDGET_CENSUS, || {
        let mut partitions = 0;
        for n in 1..=8 {
            let mut census: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut total_set_partitions = 0usize;
            for p in set_partitions_of(n).map_err(|e| e.to_string())? {
                let mut sizes: Vec<usize> = p.blocks().iter().map(|b| b.len()).collect();
                sizes.sort_unstable_by(|a, b| b.cmp(a));
                *census.entry(sizes).or_default() += 1;
                total_set_partitions += 1;
            }
            check(BigInt::from(total_set_partitions) == bell(n), || {
                format!("n = {n}: {total_set_partitions} set partitions")
            })?;
            let mut sum = BigInt::zero();
            for lambda in partitions_of(n) {
                let m = multiplicity(&lambda).map_err(|e| e.to_string())?;
                let seen = census.get(lambda.blocks()).copied().unwrap_or(0);
                check(m == BigInt::from(seen), || {
                    format!("m({lambda}) = {m}, census {seen}")
                })?;
                sum += m;
                partitions += 1;
            }
            check(sum == bell(n), || format!("n = {n}: sum of m = {sum}"))?;
        }
        Ok(format!("{partitions} partitions, |lambda| <= 8"))
    })
}

type Criterion = (u32, &'static str, fn() -> Verdict);

fn c10_nonrecursive() -> Verdict {
    timed(BUDGET_NONRECURSIVE, || {
        for n in 1..=12 {
            let row = falling_coeffs(n);
            for (m, want) in row.iter().enumerate().take(n + 1).skip(1) {
                let direct = stirling_first_nonrecursive(n, m).map_err(|e| e.to_string())?;
                let table = stirling_first(n, m);
                check(direct == table && &table == want, || {
                    format!("s({n},{m}): {direct} vs {table}")
                })?;
            }
        }
        Ok("1 <= m <= n <= 12".into())
    })
}

fn c11_identity() -> Verdict {
    timed(BUDGET_IDENTITY, || {
        let kl = KlTable::new(Arc::new(Stirling::new()));
        for n in 2..=20 {
            let report = kl.verify_defining_identity(n).map_err(|e| e.to_string())?;
            check(report.holds(), || {
                format!("n = {n}: {:?}", report.mismatches)
            })?;
        }
        Ok("2 <= n <= 20".into())
    })
}

fn c12_pxy() -> Verdict {
    timed(Duration::MAX, || {
        let kl = KlTable::new(Arc::new(Stirling::new()));
        let selection = select_pxy_reading(&kl, 10, 2).map_err(|e| e.to_string())?;
        let tallies: Vec<String> = selection
            .tallies
            .iter()
            .map(|t| format!("{} {}/{}", t.reading, t.matches, t.matches + t.mismatches))
            .collect();
        match selection.promoted {
            Some(r) => Ok(format!("promoted {r}; {}", tallies.join(", "))),
            None => Err(format!("no reading matches; {}", tallies.join(", "))),
        }
    })
}

fn c13_performance() -> Verdict {
    let klb = env!("CARGO_BIN_EXE_klb");
    let run = |args: &[&str], budget: Duration| -> Result<String, String> {
        let start = Instant::now();
        let out = Command::new(klb)
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        check(out.status.success(), || {
            format!("klb {} exited {}", args.join(" "), out.status)
        })?;
        check(elapsed <= budget, || {
            format!("klb {} took {elapsed:.2?}", args.join(" "))
        })?;
        Ok(format!("klb {} {elapsed:.2?}", args.join(" ")))
    };
    timed(Duration::MAX, || {
        let a = run(&["poly", "20"], BUDGET_POLY_20)?;
        let b = run(
            &["table", "--max-n", "12", "--all-methods"],
            BUDGET_TABLE_12,
        )?;
        Ok(format!("{a}; {b}"))
    })
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (1, "base case C(2,0) = 1 by every route", c1_base_case),
        (2, "K(2,0) and the rejected [1+1, 2] candidate", c2_example),
        (3, "chain sum = recursion on the n <= 12 grid", c3_grid),
        (4, "lattice solve = recursion, n <= 7", c4_generic),
        (5, "degree-one closed forms, 4 <= n <= 25", c5_degree_one),
        (
            6,
            "characteristic polynomial = signed s(n,k), n <= 8",
            c6_char_poly,
        ),
        (7, "flag Whitney products = chain counts, n <= 6", c7_flags),
        (
            8,
            "expansion table rows C(3,0)..C(7,1), per-group values",
            c8_table,
        ),
        (
            9,
            "m(lambda) = set-partition census, Bell sums, n <= 8",
            c9_census,
        ),
        (
            10,
            "non-recursive s(n,m) = table, n <= 12",
            c10_nonrecursive,
        ),
        (11, "defining identity, 2 <= n <= 20", c11_identity),
        (12, "flag-Whitney reading selection (advisory)", c12_pxy),
        (13, "performance floor via the klb binary", c13_performance),
    ];
    let mut unexpected = 0;
    for (id, title, f) in criteria {
        let v = f();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {status}  {title}: {}", v.detail);
        match (v.passed, known) {
            (true, None) => {}
            (false, Some((_, diagnosis))) if v.detail == *diagnosis => {
                println!("              known failure, diagnosis unchanged (see README)");
            }
            (true, Some(_)) => {
                println!(
                    "              listed as a known failure but passed; update KNOWN_FAILURES"
                );
                unexpected += 1;
            }
            (false, _) => unexpected += 1,
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected result(s)");
        ExitCode::FAILURE
    }
}
