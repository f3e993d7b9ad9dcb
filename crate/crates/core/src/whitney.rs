//! The second-kind side: flag Whitney numbers of partition lattices as
//! products of `S(n, k)`, the degree-one closed form, and an alternating
//! flag-Whitney formula for every coefficient.
//!
//! # The alternating formula and its readings
//!
//! For a rank-`N` lattice and `0 < i < N/2` the coefficient is a signed sum
//! over `r in 1..=i`, subsets `D` of `{1..r}`, and sequences
//! `0 = a_0 < a_1 < ... < a_r = i < a_{r+1} = N - i`, of a multi-indexed
//! Whitney number whose entries are built from `a_{t_u(D)}` with
//! `t_u(D) = min{k >= u : k not in D}`. The entries are stated only at the two
//! ends of the list, and the two ends follow different index patterns, so
//! [`PxyReading`] keeps every candidate reading and the cross-check grid
//! decides which one holds.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::kl_recursion::KlTable;
use crate::lattice::FlagIndex;
use crate::partitions::partitions_of;
use crate::scalar::Scalar;
use crate::stirling::StirlingTable;

/// `W_I` on the partition lattice of `{1..n}`:
/// `prod_j S(n - i_j, n - i_{j+1})` with `i_0 = 0`.
pub fn flag_whitney_product<T: Scalar>(
    stirling: &StirlingTable<T>,
    n: usize,
    index: &FlagIndex,
) -> T {
    whitney_chain_count(
        stirling,
        n,
        &index.ranks().iter().map(|&r| r as i64).collect::<Vec<_>>(),
    )
}

/// Chain count for an arbitrary integer rank list on `P(n)`: zero when an
/// entry leaves `0..=n-1` or the list decreases somewhere.
pub fn whitney_chain_count<T: Scalar>(stirling: &StirlingTable<T>, n: usize, ranks: &[i64]) -> T {
    let top = n as i64 - 1;
    if ranks.iter().any(|&r| r < 0 || r > top) || ranks.windows(2).any(|w| w[0] > w[1]) {
        return T::zero();
    }
    let mut prev = 0usize;
    let mut acc = T::one();
    for &r in ranks {
        let r = r as usize;
        acc = acc * stirling.second(n - prev, n - r);
        prev = r;
    }
    acc
}

/// `C_{n,1}` as `S(n, 2) - S(n, n-1)`, checked against the first-kind form
/// `s(n, n-1) + sum over two-block lambda |- n of m(lambda)`.
pub fn kl_c1<T: Scalar>(stirling: &StirlingTable<T>, n: usize) -> Result<T> {
    if n < 2 {
        return Err(Error::Domain(format!("C_(n,1) needs n >= 2, got {n}")));
    }
    let second_kind = stirling.second(n, 2) - stirling.second(n, n - 1);
    let mut first_kind = stirling.first(n, n - 1);
    for lambda in partitions_of(n).filter(|l| l.len() == 2) {
        first_kind = first_kind + lambda.multiplicity::<T>()?;
    }
    if first_kind != second_kind {
        return Err(Error::InconsistentSolve(format!(
            "C_({n},1): second-kind form {second_kind} != first-kind form {first_kind}"
        )));
    }
    Ok(second_kind)
}

/// Candidate readings of the alternating flag-Whitney formula. All take
/// `N = n - 1`, `a_{r+1} = N - i`, and `t_u = t_u(D)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PxyReading {
    /// Every entry follows the pattern of the last printed one:
    /// `N - (a_{t_u} + a_{u-1})` for `u = r, ..., 1`.
    LastEntryPattern,
    /// Every entry follows the pattern of the first printed one:
    /// `N - (a_{t_u} + a_{u+1})` for `u = r, ..., 1`.
    FirstEntryPattern,
    /// The sums `a_{t_u} + a_{u-1}` used directly as ranks, `u = 1, ..., r`.
    RanksNotCoranks,
    /// The product form exactly as printed:
    /// `prod_{j=0}^{r-1} S(a_{t_j} + a_{j+1}, a_{t_{j+1}} + a_{j+1})` with
    /// `t_0 = 0`.
    CorollaryProduct,
}

/// The reading promoted by the cross-check grid (`n <= 10`, `i <= 2`).
pub const DEFAULT_PXY_READING: PxyReading = PxyReading::LastEntryPattern;

impl PxyReading {
    pub const ALL: [PxyReading; 4] = [
        PxyReading::LastEntryPattern,
        PxyReading::FirstEntryPattern,
        PxyReading::RanksNotCoranks,
        PxyReading::CorollaryProduct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PxyReading::LastEntryPattern => "last-entry-pattern",
            PxyReading::FirstEntryPattern => "first-entry-pattern",
            PxyReading::RanksNotCoranks => "ranks-not-coranks",
            PxyReading::CorollaryProduct => "corollary-product",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            PxyReading::LastEntryPattern => "W at ranks N-(a_{t_u(D)}+a_{u-1}), u = r..1",
            PxyReading::FirstEntryPattern => "W at ranks N-(a_{t_u(D)}+a_{u+1}), u = r..1",
            PxyReading::RanksNotCoranks => "W at ranks a_{t_u(D)}+a_{u-1}, u = 1..r",
            PxyReading::CorollaryProduct => {
                "prod_j S(a_{t_j(D)}+a_{j+1}, a_{t_{j+1}(D)}+a_{j+1}), j = 0..r-1, literal"
            }
        }
    }
}

impl fmt::Display for PxyReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PxyReading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown reading {s:?}")))
    }
}

/// One `(r, D, a)` index of the alternating sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PxyIndexData {
    pub r: usize,
    /// Sorted subset of `1..=r`.
    pub d: Vec<usize>,
    /// `a_0, ..., a_{r+1}`.
    pub a: Vec<usize>,
}

impl PxyIndexData {
    /// `min{k >= j : k not in D}`, always in `j..=r+1`.
    pub fn t_of(&self, j: usize) -> usize {
        (j..).find(|k| !self.d.contains(k)).unwrap()
    }

    pub fn sign_negative(&self) -> bool {
        self.d.len() % 2 == 1
    }
}

/// Every `(r, D, a)` for rank `N` and degree `i`, `0 < i < N/2`.
pub fn pxy_index_data(top_rank: usize, i: usize) -> Vec<PxyIndexData> {
    let mut out = Vec::new();
    for r in 1..=i {
        for middle in (1..i).combinations(r - 1) {
            let mut a = Vec::with_capacity(r + 2);
            a.push(0);
            a.extend(middle);
            a.push(i);
            a.push(top_rank - i);
            for mask in 0u32..(1 << r) {
                let d = (1..=r).filter(|k| mask >> (k - 1) & 1 == 1).collect();
                out.push(PxyIndexData { r, d, a: a.clone() });
            }
        }
    }
    out
}

/// What a reading asks to be evaluated for one index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PxyTerm {
    /// A multi-indexed Whitney number at these ranks (in list order).
    Whitney(Vec<i64>),
    /// A product of `S(x, y)` over these pairs.
    SecondKindProduct(Vec<(i64, i64)>),
}

pub fn pxy_term(reading: PxyReading, top_rank: usize, data: &PxyIndexData) -> PxyTerm {
    let a = |k: usize| data.a[k] as i64;
    let n_top = top_rank as i64;
    let r = data.r;
    match reading {
        PxyReading::LastEntryPattern => PxyTerm::Whitney(
            (1..=r)
                .rev()
                .map(|u| n_top - (a(data.t_of(u)) + a(u - 1)))
                .collect(),
        ),
        PxyReading::FirstEntryPattern => PxyTerm::Whitney(
            (1..=r)
                .rev()
                .map(|u| n_top - (a(data.t_of(u)) + a(u + 1)))
                .collect(),
        ),
        PxyReading::RanksNotCoranks => {
            PxyTerm::Whitney((1..=r).map(|u| a(data.t_of(u)) + a(u - 1)).collect())
        }
        PxyReading::CorollaryProduct => PxyTerm::SecondKindProduct(
            (0..r)
                .map(|j| (a(data.t_of(j)) + a(j + 1), a(data.t_of(j + 1)) + a(j + 1)))
                .collect(),
        ),
    }
}

/// Evaluates the alternating sum for an arbitrary rank-`top_rank` lattice
/// given its Whitney numbers and a second-kind Stirling evaluator.
pub fn pxy_sum<T, W, S>(top_rank: usize, i: usize, reading: PxyReading, whitney: W, second: S) -> T
where
    T: Scalar,
    W: Fn(&[i64]) -> T,
    S: Fn(i64, i64) -> T,
{
    pxy_index_data(top_rank, i)
        .iter()
        .map(|data| {
            let value = match pxy_term(reading, top_rank, data) {
                PxyTerm::Whitney(ranks) => whitney(&ranks),
                PxyTerm::SecondKindProduct(pairs) => pairs
                    .iter()
                    .fold(T::one(), |acc, &(x, y)| acc * second(x, y)),
            };
            if data.sign_negative() {
                -value
            } else {
                value
            }
        })
        .fold(T::zero(), |acc, v| acc + v)
}

/// `C_{n,i}` from the alternating flag-Whitney formula on the braid matroid,
/// Whitney numbers taken from the Stirling product. Requires
/// `0 < i < (n-1)/2`.
pub fn kl_coeff_via_pxy<T: Scalar>(
    stirling: &StirlingTable<T>,
    n: usize,
    i: usize,
    reading: PxyReading,
) -> Result<T> {
    if n < 2 || i == 0 || 2 * i + 1 >= n {
        return Err(Error::Domain(format!(
            "the flag-Whitney formula needs 0 < i < (n-1)/2, got n = {n}, i = {i}"
        )));
    }
    let second = |x: i64, y: i64| {
        if x < 0 || y < 0 {
            T::zero()
        } else {
            stirling.second(x as usize, y as usize)
        }
    };
    Ok(pxy_sum(
        n - 1,
        i,
        reading,
        |ranks| whitney_chain_count(stirling, n, ranks),
        second,
    ))
}

/// How one reading fared on the cross-check grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PxyTally<T> {
    pub reading: PxyReading,
    pub matches: usize,
    pub mismatches: usize,
    /// Smallest-`|error|` mismatch as `(n, i, got, expected)`.
    pub nearest_miss: Option<(usize, usize, T, T)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PxySelection<T> {
    pub max_n: usize,
    pub max_i: usize,
    pub tallies: Vec<PxyTally<T>>,
    /// First reading, in registry order, that matched everywhere.
    pub promoted: Option<PxyReading>,
}

/// Scores every reading against the recursion on all `(n, i)` with
/// `n <= max_n`, `1 <= i <= max_i`, `i < (n-1)/2`.
pub fn select_pxy_reading<T: Scalar>(
    kl: &KlTable<T>,
    max_n: usize,
    max_i: usize,
) -> Result<PxySelection<T>> {
    let stirling = kl.stirling();
    let mut tallies: Vec<PxyTally<T>> = Vec::new();
    for reading in PxyReading::ALL {
        let mut tally: PxyTally<T> = PxyTally {
            reading,
            matches: 0,
            mismatches: 0,
            nearest_miss: None,
        };
        for n in 2..=max_n {
            for i in (1..=max_i).take_while(|&i| 2 * i + 1 < n) {
                let got = kl_coeff_via_pxy(stirling, n, i, reading)?;
                let expected = kl.kl_coeff(n, i)?;
                if got == expected {
                    tally.matches += 1;
                    continue;
                }
                tally.mismatches += 1;
                let err = (got.clone() - expected.clone()).abs();
                let closer = match &tally.nearest_miss {
                    None => true,
                    Some((_, _, g, e)) => err < (g.clone() - e.clone()).abs(),
                };
                if closer {
                    tally.nearest_miss = Some((n, i, got, expected));
                }
            }
        }
        tallies.push(tally);
    }
    let promoted = tallies
        .iter()
        .find(|t| t.mismatches == 0 && t.matches > 0)
        .map(|t| t.reading);
    Ok(PxySelection {
        max_n,
        max_i,
        tallies,
        promoted,
    })
}
