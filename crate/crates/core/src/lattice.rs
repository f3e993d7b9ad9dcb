//! Brute-force ground truth on explicit finite ranked lattices.
//!
//! Everything here works on the lattice itself: Möbius values from the
//! one-sided defining recursion, characteristic polynomials as Möbius-weighted
//! rank generating functions, flag counts by walking chains, and the
//! Kazhdan-Lusztig polynomial of every upper interval solved from its
//! defining identity. Nothing uses Stirling numbers, so the results serve as
//! an independent oracle for the braid-matroid formulas at small `n`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partitions::{set_partitions_bounded, SetPartition, ORACLE_MAX_N};
use crate::polynomial::Poly;

/// Largest `n` for which the generic Kazhdan-Lusztig solve runs by default.
pub const GENERIC_KL_MAX_N: usize = 7;

/// A finite ranked poset with `0̂` and `1̂`, stored with its cover relation
/// and a bitset of each element's up-set.
///
/// Elements are kept sorted by rank, so index order is a linear extension.
#[derive(Debug)]
pub struct RankedLattice<E> {
    elements: Vec<E>,
    rank: Vec<usize>,
    upper_covers: Vec<Vec<usize>>,
    up: Vec<Vec<u64>>,
    bottom: usize,
    top: usize,
    mobius_rows: Mutex<HashMap<usize, Arc<Vec<BigInt>>>>,
}

fn bit(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

impl<E> RankedLattice<E> {
    /// Builds from elements, ranks, and upper covers (`covers[x]` lists the
    /// elements covering `x`). Elements are re-sorted by rank.
    pub fn from_covers(
        elements: Vec<E>,
        rank: Vec<usize>,
        covers: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let len = elements.len();
        if len == 0 || rank.len() != len || covers.len() != len {
            return Err(Error::InvalidPoset(
                "mismatched or empty element data".into(),
            ));
        }
        for (x, cs) in covers.iter().enumerate() {
            for &y in cs {
                if y >= len {
                    return Err(Error::InvalidPoset(format!(
                        "cover {x} -> {y} out of range"
                    )));
                }
                if rank[y] <= rank[x] {
                    return Err(Error::InvalidPoset(format!(
                        "rank does not increase along cover {x} -> {y}"
                    )));
                }
            }
        }

        let mut perm: Vec<usize> = (0..len).collect();
        perm.sort_by_key(|&x| rank[x]);
        let mut new_index = vec![0; len];
        for (new, &old) in perm.iter().enumerate() {
            new_index[old] = new;
        }
        let mut slots: Vec<Option<E>> = elements.into_iter().map(Some).collect();
        let elements: Vec<E> = perm.iter().map(|&old| slots[old].take().unwrap()).collect();
        let rank: Vec<usize> = perm.iter().map(|&old| rank[old]).collect();
        let upper_covers: Vec<Vec<usize>> = perm
            .iter()
            .map(|&old| {
                let mut cs: Vec<usize> = covers[old].iter().map(|&y| new_index[y]).collect();
                cs.sort_unstable();
                cs.dedup();
                cs
            })
            .collect();

        let mut has_lower = vec![false; len];
        for cs in &upper_covers {
            for &y in cs {
                has_lower[y] = true;
            }
        }
        let minima: Vec<usize> = (0..len).filter(|&x| !has_lower[x]).collect();
        let maxima: Vec<usize> = (0..len).filter(|&x| upper_covers[x].is_empty()).collect();
        let (bottom, top) = match (minima.as_slice(), maxima.as_slice()) {
            ([b], [t]) => (*b, *t),
            _ => {
                return Err(Error::InvalidPoset(format!(
                    "need a unique minimum and maximum, found {} and {}",
                    minima.len(),
                    maxima.len()
                )))
            }
        };
        if rank[bottom] != 0 {
            return Err(Error::InvalidPoset("the minimum must have rank 0".into()));
        }

        let words = len.div_ceil(64);
        let mut up = vec![vec![0u64; words]; len];
        for x in (0..len).rev() {
            let mut set = vec![0u64; words];
            set[x / 64] |= 1 << (x % 64);
            for &c in &upper_covers[x] {
                for (w, v) in set.iter_mut().zip(&up[c]) {
                    *w |= v;
                }
            }
            up[x] = set;
        }

        Ok(Self {
            elements,
            rank,
            upper_covers,
            up,
            bottom,
            top,
            mobius_rows: Mutex::new(HashMap::new()),
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, x: usize) -> &E {
        &self.elements[x]
    }

    pub fn rank(&self, x: usize) -> usize {
        self.rank[x]
    }

    /// Rank of `1̂`.
    pub fn lattice_rank(&self) -> usize {
        self.rank[self.top]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.upper_covers[x]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        bit(&self.up[x], y)
    }

    /// Elements `>= x`, in rank order.
    pub fn up_set(&self, x: usize) -> Vec<usize> {
        (x..self.len()).filter(|&y| self.leq(x, y)).collect()
    }

    /// Elements of `[x, y]` in rank order; empty if `x` is not below `y`.
    pub fn interval(&self, x: usize, y: usize) -> Vec<usize> {
        (x..=y.max(x))
            .filter(|&a| self.leq(x, a) && self.leq(a, y))
            .collect()
    }

    /// Number of elements at each rank.
    pub fn rank_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.lattice_rank() + 1];
        for &r in &self.rank {
            sizes[r] += 1;
        }
        sizes
    }

    /// Position of an element, by linear scan.
    pub fn position(&self, e: &E) -> Option<usize>
    where
        E: PartialEq,
    {
        self.elements.iter().position(|x| x == e)
    }

    /// The interval `[x, y]` as a lattice of its own, ranks shifted so `x`
    /// has rank 0.
    pub fn interval_lattice(&self, x: usize, y: usize) -> Result<RankedLattice<E>>
    where
        E: Clone,
    {
        let members = self.interval(x, y);
        if members.is_empty() {
            return Err(Error::InvalidPoset(format!("{x} is not below {y}")));
        }
        let local: HashMap<usize, usize> =
            members.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let elements = members.iter().map(|&a| self.elements[a].clone()).collect();
        let rank = members
            .iter()
            .map(|&a| self.rank[a] - self.rank[x])
            .collect();
        let covers = members
            .iter()
            .map(|&a| {
                self.upper_covers[a]
                    .iter()
                    .filter_map(|c| local.get(c).copied())
                    .collect()
            })
            .collect();
        RankedLattice::from_covers(elements, rank, covers)
    }

    /// `mu(x, .)` over the whole lattice, zero off the up-set of `x`.
    /// Computed from `mu(x, x) = 1` and `sum_{x <= a <= y} mu(x, a) = 0`.
    pub fn mobius_row(&self, x: usize) -> Arc<Vec<BigInt>> {
        if let Some(row) = self.mobius_rows.lock().unwrap().get(&x) {
            return Arc::clone(row);
        }
        let ups = self.up_set(x);
        let mut mu = vec![BigInt::zero(); self.len()];
        mu[x] = BigInt::one();
        for (pos, &y) in ups.iter().enumerate().skip(1) {
            let mut acc = BigInt::zero();
            for &a in &ups[..pos] {
                if self.leq(a, y) {
                    acc += &mu[a];
                }
            }
            mu[y] = -acc;
        }
        let row = Arc::new(mu);
        self.mobius_rows
            .lock()
            .unwrap()
            .entry(x)
            .or_insert_with(|| Arc::clone(&row));
        row
    }

    pub fn mobius(&self, x: usize, y: usize) -> BigInt {
        if !self.leq(x, y) {
            return BigInt::zero();
        }
        self.mobius_row(x)[y].clone()
    }

    /// `chi([x, y], t) = sum_{x <= a <= y} mu(x, a) t^(rk y - rk a)`.
    pub fn interval_char_poly(&self, x: usize, y: usize) -> Poly<BigInt> {
        let row = self.mobius_row(x);
        let top_rank = self.rank[y];
        let mut coeffs = vec![BigInt::zero(); top_rank + 1];
        for a in self.interval(x, y) {
            coeffs[top_rank - self.rank[a]] += &row[a];
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn char_poly(&self) -> Poly<BigInt> {
        self.interval_char_poly(self.bottom, self.top)
    }

    /// Kazhdan-Lusztig polynomial of every upper interval `[F, 1̂]`, indexed
    /// by `F`.
    ///
    /// For each `F` in decreasing rank, with `r = rk [F, 1̂]`:
    /// `t^r P_F(1/t) - P_F(t) = sum_{G > F} chi([F, G], t) P_G(t) =: Q`.
    /// The degree bound `deg P_F < r/2` means `P_F` is read off the low half
    /// of `-Q`; the high half is then checked against the reversal.
    pub fn kl_polynomials(&self) -> Result<Vec<Poly<BigInt>>> {
        let mut kl: Vec<Poly<BigInt>> = vec![Poly::zero(); self.len()];
        for f in (0..self.len()).rev() {
            let r = self.rank[self.top] - self.rank[f];
            if r == 0 {
                kl[f] = Poly::one();
                continue;
            }
            let q: Poly<BigInt> = self
                .up_set(f)
                .into_iter()
                .skip(1)
                .map(|g| &self.interval_char_poly(f, g) * &kl[g])
                .sum();
            let low = (0..r)
                .take_while(|&i| 2 * i < r)
                .map(|i| -q.coeff(i))
                .collect();
            let p = Poly::from_coeffs(low);
            let residual = &(&p.reverse(r)? - &p) - &q;
            if !residual.is_zero() {
                return Err(Error::InconsistentSolve(format!(
                    "upper interval at element {f} (rank {r}): residual {residual}"
                )));
            }
            kl[f] = p;
        }
        Ok(kl)
    }
}

/// `P(n)`: set partitions of `{1..n}` under refinement; a partition with `k`
/// blocks has rank `n - k`.
pub fn build_partition_lattice(n: usize) -> Result<RankedLattice<SetPartition>> {
    build_partition_lattice_bounded(n, ORACLE_MAX_N)
}

pub fn build_partition_lattice_bounded(
    n: usize,
    bound: usize,
) -> Result<RankedLattice<SetPartition>> {
    let elements: Vec<SetPartition> = set_partitions_bounded(n, bound)?.collect();
    let index: HashMap<&SetPartition, usize> =
        elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let rank = elements.iter().map(|e| n - e.block_count()).collect();
    let covers = elements
        .iter()
        .map(|e| {
            let k = e.block_count() as u8;
            let mut cs = Vec::new();
            for a in 0..k {
                for b in a + 1..k {
                    cs.push(index[&e.merge(a, b)]);
                }
            }
            cs
        })
        .collect();
    RankedLattice::from_covers(elements, rank, covers)
}

/// `P_L(t)` of a geometric lattice, solved from its defining identity.
/// Fails with [`Error::InconsistentSolve`] when the identity cannot hold.
pub fn kl_polynomial_generic<E>(lattice: &RankedLattice<E>) -> Result<Poly<BigInt>> {
    let all = lattice.kl_polynomials()?;
    Ok(all[lattice.bottom()].clone())
}

/// A weakly increasing rank multi-index `(i_1, ..., i_r)` with entries in
/// `1..=N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlagIndex {
    ranks: Vec<usize>,
}

impl FlagIndex {
    pub fn new(ranks: Vec<usize>, top_rank: usize) -> Result<Self> {
        if ranks.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain(format!(
                "flag index {ranks:?} is not weakly increasing"
            )));
        }
        if ranks.iter().any(|&r| r == 0 || r > top_rank) {
            return Err(Error::Domain(format!(
                "flag index {ranks:?} leaves 1..={top_rank}"
            )));
        }
        Ok(Self { ranks })
    }

    pub fn empty() -> Self {
        Self { ranks: Vec::new() }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Every flag index over `1..=top_rank` with at most `max_len` entries.
    pub fn all(top_rank: usize, max_len: usize) -> Vec<FlagIndex> {
        let mut out = vec![FlagIndex::empty()];
        let mut frontier = vec![Vec::<usize>::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for prefix in &frontier {
                let start = prefix.last().copied().unwrap_or(1);
                for r in start..=top_rank {
                    let mut ranks = prefix.clone();
                    ranks.push(r);
                    next.push(ranks);
                }
            }
            out.extend(next.iter().map(|r| FlagIndex { ranks: r.clone() }));
            frontier = next;
        }
        out
    }
}

/// Counts chains `X_1 <= ... <= X_r` with `rk X_j = i_j`.
pub fn flag_whitney_bruteforce<E>(lattice: &RankedLattice<E>, index: &FlagIndex) -> BigInt {
    let ranks = index.ranks();
    let Some(&first) = ranks.first() else {
        return BigInt::one();
    };
    let at_rank = |r: usize| -> Vec<usize> {
        (0..lattice.len())
            .filter(|&x| lattice.rank(x) == r)
            .collect()
    };
    let mut current: Vec<(usize, BigInt)> = at_rank(first)
        .into_iter()
        .map(|x| (x, BigInt::one()))
        .collect();
    for &r in &ranks[1..] {
        current = at_rank(r)
            .into_iter()
            .map(|y| {
                let count: BigInt = current
                    .iter()
                    .filter(|(x, _)| lattice.leq(*x, y))
                    .map(|(_, c)| c)
                    .sum();
                (y, count)
            })
            .collect();
    }
    current.into_iter().map(|(_, c)| c).sum()
}
