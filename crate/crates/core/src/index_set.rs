//! The chain index set `K_{n,i}`: triples `(Lambda, A, Xi)` of a partition
//! chain `lambda_1 |- n`, `lambda_{j+1} |- l(lambda_j)`, and the integer
//! sequences splitting each degree between a characteristic-polynomial
//! coefficient (`alpha_j`) and a smaller Kazhdan-Lusztig coefficient (`xi_j`).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{partitions_of, IntPartition};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KlChainTriple {
    lambda: Vec<IntPartition>,
    alpha: Vec<usize>,
    xi: Vec<usize>,
}

impl KlChainTriple {
    /// The three sequences must be nonempty and of equal length.
    pub fn new(lambda: Vec<IntPartition>, alpha: Vec<usize>, xi: Vec<usize>) -> Result<Self> {
        if lambda.is_empty() || lambda.len() != alpha.len() || alpha.len() != xi.len() {
            return Err(Error::Domain(format!(
                "chain sequences must be nonempty and equally long, got {}/{}/{}",
                lambda.len(),
                alpha.len(),
                xi.len()
            )));
        }
        Ok(Self { lambda, alpha, xi })
    }

    pub fn lambda(&self) -> &[IntPartition] {
        &self.lambda
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn xi(&self) -> &[usize] {
        &self.xi
    }

    /// Chain length.
    pub fn q(&self) -> usize {
        self.lambda.len()
    }

    fn prepend(&self, lambda: IntPartition, alpha: usize, xi: usize) -> Self {
        let mut out = Self {
            lambda: Vec::with_capacity(self.q() + 1),
            alpha: Vec::with_capacity(self.q() + 1),
            xi: Vec::with_capacity(self.q() + 1),
        };
        out.lambda.push(lambda);
        out.alpha.push(alpha);
        out.xi.push(xi);
        out.lambda.extend_from_slice(&self.lambda);
        out.alpha.extend_from_slice(&self.alpha);
        out.xi.extend_from_slice(&self.xi);
        out
    }
}

impl Ord for KlChainTriple {
    /// Canonical order: by `q`, then `Lambda` with each partition in reverse
    /// lexicographic order, then `A`, then `Xi`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.q()
            .cmp(&other.q())
            .then_with(|| {
                for (a, b) in self.lambda.iter().zip(&other.lambda) {
                    match b.cmp(a) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
            .then_with(|| self.alpha.cmp(&other.alpha))
            .then_with(|| self.xi.cmp(&other.xi))
    }
}

impl PartialOrd for KlChainTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for KlChainTriple {
    /// `([3+1, 2], [2, 1], [1, 0])`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lambda: Vec<String> = self.lambda.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "([{}], {:?}, {:?})",
            lambda.join(", "),
            self.alpha,
            self.xi
        )
    }
}

/// The eight defining conditions, numbered as roman numerals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// `lambda_1 |- n`
    I,
    /// `lambda_j |- l(lambda_{j-1})`
    II,
    /// `alpha_1 + xi_1 = n - 1 - i`
    III,
    /// `alpha_j + xi_j = l(lambda_{j-1}) - 1 - xi_{j-1}`
    IV,
    /// `0 <= alpha_j <= |lambda_j| - l(lambda_j)`
    V,
    /// `xi_j = 0` when `l(lambda_j) = 1`
    VI,
    /// `0 <= xi_j < (l(lambda_j) - 1) / 2` when `l(lambda_j) >= 2`
    VII,
    /// `xi_j = 0` exactly when `j = q`
    VIII,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::I,
        Axiom::II,
        Axiom::III,
        Axiom::IV,
        Axiom::V,
        Axiom::VI,
        Axiom::VII,
        Axiom::VIII,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::I => "i",
            Axiom::II => "ii",
            Axiom::III => "iii",
            Axiom::IV => "iv",
            Axiom::V => "v",
            Axiom::VI => "vi",
            Axiom::VII => "vii",
            Axiom::VIII => "viii",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub results: Vec<(Axiom, bool)>,
}

impl AxiomReport {
    pub fn passes_all(&self) -> bool {
        self.results.iter().all(|&(_, ok)| ok)
    }

    pub fn passes(&self, axiom: Axiom) -> bool {
        self.results.iter().any(|&(a, ok)| a == axiom && ok)
    }

    pub fn failed(&self) -> Vec<Axiom> {
        self.results
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|&(a, _)| a)
            .collect()
    }
}

/// Checks each axiom independently for membership in `K_{n,i}`.
pub fn validate_triple(triple: &KlChainTriple, n: usize, i: usize) -> AxiomReport {
    let lambda = triple.lambda();
    let alpha = triple.alpha();
    let xi = triple.xi();
    let q = triple.q();
    let len = |j: usize| lambda[j].len() as i64;

    let ax1 = lambda[0].size() == n;
    let ax2 = (1..q).all(|j| lambda[j].size() == lambda[j - 1].len());
    let ax3 = (alpha[0] + xi[0]) as i64 == n as i64 - 1 - i as i64;
    let ax4 = (1..q).all(|j| (alpha[j] + xi[j]) as i64 == len(j - 1) - 1 - xi[j - 1] as i64);
    let ax5 = (0..q).all(|j| alpha[j] + lambda[j].len() <= lambda[j].size());
    let ax6 = (0..q).all(|j| len(j) != 1 || xi[j] == 0);
    let ax7 = (0..q).all(|j| len(j) < 2 || 2 * (xi[j] as i64) < len(j) - 1);
    let ax8 = (0..q).all(|j| (xi[j] == 0) == (j + 1 == q));

    AxiomReport {
        results: Axiom::ALL
            .into_iter()
            .zip([ax1, ax2, ax3, ax4, ax5, ax6, ax7, ax8])
            .collect(),
    }
}

fn check_domain(n: usize, i: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("K_(n,i) needs n >= 2, got n = {n}")));
    }
    if 2 * i + 1 >= n {
        return Err(Error::Domain(format!(
            "K_(n,i) needs i < (n-1)/2, got n = {n}, i = {i}"
        )));
    }
    Ok(())
}

/// Memoized depth-first builder for `K_{m,j}`.
///
/// `K_{m,j}` is assembled from `lambda_1 |- m` and the feasible
/// `(alpha_1, xi_1)` splits of `m - 1 - j`; when `xi_1 > 0` the chain
/// continues with every member of `K_{l(lambda_1), xi_1}`.
type TripleMemo = Mutex<HashMap<(usize, usize), Arc<Vec<KlChainTriple>>>>;

#[derive(Debug, Default)]
pub struct ChainIndex {
    memo: TripleMemo,
}

impl ChainIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// `K_{n,i}` in depth-first order (not canonical).
    pub fn chains(&self, n: usize, i: usize) -> Result<Arc<Vec<KlChainTriple>>> {
        check_domain(n, i)?;
        Ok(self.build(n, i))
    }

    fn build(&self, m: usize, j: usize) -> Arc<Vec<KlChainTriple>> {
        if let Some(hit) = self.memo.lock().unwrap().get(&(m, j)) {
            return Arc::clone(hit);
        }
        let target = m - 1 - j;
        let mut out = Vec::new();
        for lambda in partitions_of(m) {
            let len = lambda.len();
            let alpha_max = m - len;
            // largest xi allowed by (vi)/(vii)
            let xi_max = if len == 1 { 0 } else { (len - 2) / 2 };
            if alpha_max + xi_max < target {
                continue;
            }
            for xi in 0..=xi_max.min(target) {
                let alpha = target - xi;
                if alpha > alpha_max {
                    continue;
                }
                if xi == 0 {
                    out.push(KlChainTriple {
                        lambda: vec![lambda.clone()],
                        alpha: vec![alpha],
                        xi: vec![0],
                    });
                } else {
                    for suffix in self.build(len, xi).iter() {
                        out.push(suffix.prepend(lambda.clone(), alpha, xi));
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.memo
            .lock()
            .unwrap()
            .entry((m, j))
            .or_insert_with(|| Arc::clone(&out));
        out
    }
}

/// `K_{n,i}` in canonical order. Requires `n >= 2` and `i < (n-1)/2`.
pub fn enumerate_k(n: usize, i: usize) -> Result<Vec<KlChainTriple>> {
    let mut all = ChainIndex::new().chains(n, i)?.as_ref().clone();
    all.sort();
    Ok(all)
}

/// Candidate readings of the closed form offered for `xi_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum XiReading {
    /// Evaluated exactly as printed: `l(lambda_{j+1})` and `(-1)^j alpha_{j+1}`
    /// inside sums whose summation variable they ignore.
    Verbatim,
    /// Summation variable substituted into the indices:
    /// `sum_s (-1)^s l(lambda_{j+s}) + sum_s (-1)^s alpha_{j+s} - (1 + (-1)^(q-j))/2`.
    SummationIndexed,
    /// Axiom (iv) unrolled from `xi_q = 0`; same sums with constant
    /// `-(1 - (-1)^(q-j))/2`.
    UnrolledRecurrence,
}

impl XiReading {
    pub const ALL: [XiReading; 3] = [
        XiReading::Verbatim,
        XiReading::SummationIndexed,
        XiReading::UnrolledRecurrence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            XiReading::Verbatim => "verbatim",
            XiReading::SummationIndexed => "summation-indexed",
            XiReading::UnrolledRecurrence => "unrolled-recurrence",
        }
    }

    /// Predicted `xi_j` for 1-based position `j`.
    pub fn evaluate(self, triple: &KlChainTriple, j: usize) -> i64 {
        let q = triple.q();
        let len = |k: usize| triple.lambda[k - 1].len() as i64;
        let alpha = |k: usize| triple.alpha[k - 1] as i64;
        let sign = |e: usize| if e.is_multiple_of(2) { 1i64 } else { -1 };
        let span = q - j;
        let parity_term = |plus: bool| {
            let s = sign(span);
            if plus {
                (1 + s) / 2
            } else {
                (1 - s) / 2
            }
        };
        match self {
            XiReading::Verbatim => {
                let lsum: i64 = (0..span).map(|s| sign(s) * len(j + 1)).sum();
                let asum: i64 = (1..=span).map(|_| sign(j) * alpha(j + 1)).sum();
                lsum + asum - parity_term(true)
            }
            XiReading::SummationIndexed | XiReading::UnrolledRecurrence => {
                let lsum: i64 = (0..span).map(|s| sign(s) * len(j + s)).sum();
                let asum: i64 = (1..=span).map(|s| sign(s) * alpha(j + s)).sum();
                let plus = self == XiReading::SummationIndexed;
                lsum + asum - parity_term(plus)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiTally {
    pub reading: XiReading,
    /// Positions `(triple, j)` where the reading reproduces `xi_j`.
    pub agree: usize,
    pub disagree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiRemarkReport {
    pub n: usize,
    pub i: usize,
    pub triples: usize,
    pub tallies: Vec<XiTally>,
}

/// Scores each [`XiReading`] against every position of every triple in
/// `K_{n,i}`. Informational only.
pub fn verify_xi_remark(n: usize, i: usize) -> Result<XiRemarkReport> {
    let triples = enumerate_k(n, i)?;
    let tallies = XiReading::ALL
        .into_iter()
        .map(|reading| {
            let (mut agree, mut disagree) = (0, 0);
            for t in &triples {
                for j in 1..=t.q() {
                    if reading.evaluate(t, j) == t.xi[j - 1] as i64 {
                        agree += 1;
                    } else {
                        disagree += 1;
                    }
                }
            }
            XiTally {
                reading,
                agree,
                disagree,
            }
        })
        .collect();
    Ok(XiRemarkReport {
        n,
        i,
        triples: triples.len(),
        tallies,
    })
}
