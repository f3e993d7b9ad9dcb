//! Integer partitions, set partitions, and the bounded compositions that index
//! the inner Stirling sums.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{factorial, Scalar};

/// Default largest `n` for which set partitions are materialized.
pub const ORACLE_MAX_N: usize = 9;

/// A number partition with blocks stored weakly decreasing.
///
/// Ordering is lexicographic on the blocks, so `[4] > [3, 1] > [2, 2]`;
/// "reverse lexicographic" enumeration is descending in this order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IntPartition {
    blocks: Vec<usize>,
    size: usize,
}

impl IntPartition {
    /// Sorts `blocks` into weakly decreasing order. Rejects empty input and
    /// zero blocks.
    pub fn new(mut blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::Domain(format!(
                "a partition needs at least one block and positive blocks, got {blocks:?}"
            )));
        }
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        let size = blocks.iter().sum();
        Ok(Self { blocks, size })
    }

    /// The one-block partition `[n]`.
    pub fn single(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            blocks: vec![n],
            size: n,
        }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// `|lambda|`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `l(lambda)`, the number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    /// Always false; present for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Young-diagram transpose.
    pub fn conjugate(&self) -> Self {
        let largest = self.blocks[0];
        let blocks = (1..=largest)
            .map(|j| self.blocks.iter().take_while(|&&b| b >= j).count())
            .collect();
        Self {
            blocks,
            size: self.size,
        }
    }

    /// Number of blocks equal to `j`, i.e. `b^t_j - b^t_{j+1}`.
    pub fn multiplicity_of(&self, j: usize) -> usize {
        self.blocks.iter().filter(|&&b| b == j).count()
    }

    /// `m(lambda)`: the number of set partitions of `{1..|lambda|}` whose block
    /// sizes are `lambda`, via
    /// `n! / (prod b_i! * prod_j (b^t_j - b^t_{j+1})!)`.
    pub fn multiplicity<T: Scalar>(&self) -> Result<T> {
        let conj = self.conjugate();
        let mut denom = self
            .blocks
            .iter()
            .fold(T::one(), |acc, &b| acc * factorial::<T>(b));
        for j in 0..conj.blocks.len() {
            let next = conj.blocks.get(j + 1).copied().unwrap_or(0);
            denom = denom * factorial::<T>(conj.blocks[j] - next);
        }
        let numer = factorial::<T>(self.size);
        if !(numer.clone() % denom.clone()).is_zero() {
            return Err(Error::InexactDivision(format!("m({self})")));
        }
        Ok(numer / denom)
    }
}

impl fmt::Display for IntPartition {
    /// `3+1+1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for IntPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let blocks = s
            .split('+')
            .map(|part| part.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Parse(s.to_string()))?;
        Self::new(blocks).map_err(|_| Error::Parse(s.to_string()))
    }
}

impl TryFrom<Vec<usize>> for IntPartition {
    type Error = Error;

    fn try_from(blocks: Vec<usize>) -> Result<Self> {
        Self::new(blocks)
    }
}

impl From<IntPartition> for Vec<usize> {
    fn from(p: IntPartition) -> Self {
        p.blocks
    }
}

pub fn multiplicity(lambda: &IntPartition) -> Result<num_bigint::BigInt> {
    lambda.multiplicity()
}

/// All partitions of `n` in reverse lexicographic order, from `[n]` down to
/// `[1, ..., 1]`. Yields nothing for `n = 0`.
pub fn partitions_of(n: usize) -> Partitions {
    Partitions {
        next: (n > 0).then(|| vec![n]),
    }
}

#[derive(Clone, Debug)]
pub struct Partitions {
    next: Option<Vec<usize>>,
}

impl Iterator for Partitions {
    type Item = IntPartition;

    fn next(&mut self) -> Option<IntPartition> {
        let current = self.next.take()?;
        if let Some(k) = current.iter().rposition(|&b| b > 1) {
            let mut succ = current[..k].to_vec();
            let head = current[k] - 1;
            let mut rest = current[k + 1..].iter().sum::<usize>() + 1;
            succ.push(head);
            while rest > 0 {
                let part = rest.min(head);
                succ.push(part);
                rest -= part;
            }
            self.next = Some(succ);
        }
        let size = current.iter().sum();
        Some(IntPartition {
            blocks: current,
            size,
        })
    }
}

/// A sequence `(d_1, ..., d_l)` with `1 <= d_k <= b_k` against a partition.
pub type BoundedComposition = Vec<usize>;

/// Every `(d_1, ..., d_l)` with `1 <= d_k <= b_k` and `sum d_k = total`, in
/// lexicographic order. Empty when infeasible.
pub fn bounded_compositions(lambda: &IntPartition, total: usize) -> BoundedCompositions {
    BoundedCompositions::new(lambda.blocks().to_vec(), total)
}

#[derive(Clone, Debug)]
pub struct BoundedCompositions {
    bounds: Vec<usize>,
    // suffix_max[k] = sum of bounds[k..]
    suffix_max: Vec<usize>,
    total: usize,
    next: Option<Vec<usize>>,
}

impl BoundedCompositions {
    fn new(bounds: Vec<usize>, total: usize) -> Self {
        let mut suffix_max = vec![0; bounds.len() + 1];
        for k in (0..bounds.len()).rev() {
            suffix_max[k] = suffix_max[k + 1] + bounds[k];
        }
        let mut it = Self {
            bounds,
            suffix_max,
            total,
            next: None,
        };
        let feasible = it.bounds.len() <= total && total <= it.suffix_max[0];
        if feasible {
            let mut first = Vec::with_capacity(it.bounds.len());
            it.fill_minimal(&mut first, total);
            it.next = Some(first);
        }
        it
    }

    /// Appends the lexicographically smallest completion summing to `remaining`.
    fn fill_minimal(&self, prefix: &mut Vec<usize>, mut remaining: usize) {
        for k in prefix.len()..self.bounds.len() {
            let later_max = self.suffix_max[k + 1];
            let d = remaining.saturating_sub(later_max).max(1);
            prefix.push(d);
            remaining -= d;
        }
    }
}

impl Iterator for BoundedCompositions {
    type Item = BoundedComposition;

    fn next(&mut self) -> Option<BoundedComposition> {
        let current = self.next.take()?;
        let len = current.len();
        let mut prefix_sum: usize = current[..len.saturating_sub(1)].iter().sum();
        // try to bump position k, leaving a feasible suffix
        for k in (0..len.saturating_sub(1)).rev() {
            prefix_sum -= current[k];
            let bumped = current[k] + 1;
            if bumped > self.bounds[k] {
                continue;
            }
            let remaining = self.total - prefix_sum - bumped;
            let slots = len - k - 1;
            if remaining >= slots && remaining <= self.suffix_max[k + 1] {
                let mut succ = current[..k].to_vec();
                succ.push(bumped);
                self.fill_minimal(&mut succ, remaining);
                self.next = Some(succ);
                break;
            }
        }
        Some(current)
    }
}

/// A set partition of `{1..n}` as a restricted growth string: `labels[i]` is
/// the block of element `i + 1`, and blocks are numbered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    labels: Vec<u8>,
}

impl SetPartition {
    /// Canonicalizes arbitrary block labels into restricted growth form.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut renumber: Vec<Option<u8>> = Vec::new();
        let mut next = 0u8;
        let canon = labels
            .iter()
            .map(|&l| {
                if renumber.len() <= l {
                    renumber.resize(l + 1, None);
                }
                *renumber[l].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Self { labels: canon }
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn ground_size(&self) -> usize {
        self.labels.len()
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// Blocks as sorted lists of 1-based elements.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l as usize].push(i + 1);
        }
        blocks
    }

    /// Block sizes as a number partition.
    pub fn signature(&self) -> IntPartition {
        let mut sizes = vec![0usize; self.block_count()];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        IntPartition::new(sizes).expect("nonempty ground set")
    }

    /// True when every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> bool {
        let mut image: [Option<u8>; 256] = [None; 256];
        self.labels.iter().zip(&other.labels).all(|(&a, &b)| {
            let slot = &mut image[a as usize];
            *slot.get_or_insert(b) == b
        })
    }

    /// Merges blocks `a` and `b`.
    pub fn merge(&self, a: u8, b: u8) -> SetPartition {
        let labels: Vec<usize> = self
            .labels
            .iter()
            .map(|&l| if l == b { a as usize } else { l as usize })
            .collect();
        Self::from_labels(&labels)
    }
}

impl fmt::Display for SetPartition {
    /// `{1,3}{2}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.blocks() {
            let items: Vec<String> = block.iter().map(|x| x.to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

/// All Bell(n) set partitions of `{1..n}` for `1 <= n <= ORACLE_MAX_N`.
pub fn set_partitions_of(n: usize) -> Result<SetPartitions> {
    set_partitions_bounded(n, ORACLE_MAX_N)
}

pub fn set_partitions_bounded(n: usize, bound: usize) -> Result<SetPartitions> {
    if n > bound || n > u8::MAX as usize {
        return Err(Error::OracleBound { n, bound });
    }
    if n == 0 {
        return Err(Error::Domain("set partitions need n >= 1".into()));
    }
    Ok(SetPartitions {
        next: Some(vec![0; n]),
    })
}

/// Restricted growth strings in lexicographic order.
#[derive(Clone, Debug)]
pub struct SetPartitions {
    next: Option<Vec<u8>>,
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        let current = self.next.take()?;
        let mut prefix_max = vec![0u8; current.len()];
        for i in 1..current.len() {
            prefix_max[i] = prefix_max[i - 1].max(current[i - 1]);
        }
        if let Some(i) = (1..current.len())
            .rev()
            .find(|&i| current[i] <= prefix_max[i])
        {
            let mut succ = current.clone();
            succ[i] += 1;
            for slot in &mut succ[i + 1..] {
                *slot = 0;
            }
            self.next = Some(succ);
        }
        Some(SetPartition { labels: current })
    }
}
