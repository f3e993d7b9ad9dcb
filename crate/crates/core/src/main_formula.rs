//! Kazhdan-Lusztig coefficients as a sum over the chain index set:
//!
//! ```text
//! C_{n,i} = sum over (Lambda, A, Xi) in K_{n,i} of
//!           prod_j m(lambda_j) * sum_{(d_k)} prod_k s(b_k, d_k)
//! ```
//!
//! where the inner sum runs over bounded compositions with
//! `sum_k d_k = alpha_j + l(lambda_j)` and `1 <= d_k <= b_k`. Signed Stirling
//! numbers are essential: `C_{4,1} = -6 + 4 + 3`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::Result;
use crate::index_set::{ChainIndex, KlChainTriple};
use crate::partitions::{bounded_compositions, IntPartition};
use crate::scalar::Scalar;
use crate::stirling::{stirling_first_nonrecursive, StirlingTable};

/// One chain position `j`: `m(lambda_j) * sum_d prod_k s(b_k, d_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainFactor<T> {
    pub partition: IntPartition,
    pub alpha: usize,
    pub multiplicity: T,
    /// Each composition `(d_k)` with its product `prod_k s(b_k, d_k)`.
    pub compositions: Vec<(Vec<usize>, T)>,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TermBreakdown<T> {
    pub triple: KlChainTriple,
    pub factors: Vec<ChainFactor<T>>,
    pub value: T,
}

fn chain_factor<T: Scalar>(
    stirling: &StirlingTable<T>,
    partition: &IntPartition,
    alpha: usize,
) -> Result<ChainFactor<T>> {
    let multiplicity = partition.multiplicity::<T>()?;
    let compositions: Vec<(Vec<usize>, T)> =
        bounded_compositions(partition, alpha + partition.len())
            .map(|d| {
                let prod = partition
                    .blocks()
                    .iter()
                    .zip(&d)
                    .fold(T::one(), |acc, (&b, &dk)| acc * stirling.first(b, dk));
                (d, prod)
            })
            .collect();
    let inner = compositions
        .iter()
        .fold(T::zero(), |acc, (_, v)| acc + v.clone());
    let value = multiplicity.clone() * inner;
    Ok(ChainFactor {
        partition: partition.clone(),
        alpha,
        multiplicity,
        compositions,
        value,
    })
}

/// Full audit trail for one triple.
pub fn term_value<T: Scalar>(
    stirling: &StirlingTable<T>,
    triple: &KlChainTriple,
) -> Result<TermBreakdown<T>> {
    let factors = triple
        .lambda()
        .iter()
        .zip(triple.alpha())
        .map(|(p, &a)| chain_factor(stirling, p, a))
        .collect::<Result<Vec<_>>>()?;
    let value = factors
        .iter()
        .fold(T::one(), |acc, f| acc * f.value.clone());
    Ok(TermBreakdown {
        triple: triple.clone(),
        factors,
        value,
    })
}

/// Sums the chain formula with a caller-supplied `s(n, k)`. Factors are
/// memoized per `(lambda, alpha)`; the triple products are reduced in
/// parallel.
fn chain_sum<T, S>(n: usize, i: usize, first: S) -> Result<T>
where
    T: Scalar,
    S: Fn(usize, usize) -> Result<T>,
{
    let chains = ChainIndex::new().chains(n, i)?;
    let mut factors: HashMap<(&IntPartition, usize), T> = HashMap::new();
    for t in chains.iter() {
        for (p, &a) in t.lambda().iter().zip(t.alpha()) {
            if factors.contains_key(&(p, a)) {
                continue;
            }
            let mut inner = T::zero();
            for d in bounded_compositions(p, a + p.len()) {
                let mut prod = T::one();
                for (&b, &dk) in p.blocks().iter().zip(&d) {
                    prod = prod * first(b, dk)?;
                }
                inner = inner + prod;
            }
            factors.insert((p, a), p.multiplicity::<T>()? * inner);
        }
    }
    Ok(chains
        .par_iter()
        .map(|t| {
            t.lambda()
                .iter()
                .zip(t.alpha())
                .fold(T::one(), |acc, (p, &a)| acc * factors[&(p, a)].clone())
        })
        .reduce(T::zero, |a, b| a + b))
}

/// `C_{n,i}` from the chain formula. Requires `n >= 2`, `i < (n-1)/2`.
pub fn kl_coeff_via_theorem<T: Scalar>(
    stirling: &StirlingTable<T>,
    n: usize,
    i: usize,
) -> Result<T> {
    chain_sum(n, i, |b, d| Ok(stirling.first(b, d)))
}

/// The chain formula with every `s(b, d)` taken from the non-recursive
/// harmonic-sum form instead of the Stirling table.
pub fn kl_coeff_via_nonrecursive_stirling(n: usize, i: usize) -> Result<BigInt> {
    let mut cache: HashMap<(usize, usize), BigInt> = HashMap::new();
    let cached = std::sync::Mutex::new(&mut cache);
    chain_sum(n, i, |b, d| {
        let mut guard = cached.lock().unwrap();
        if let Some(v) = guard.get(&(b, d)) {
            return Ok(v.clone());
        }
        let v = stirling_first_nonrecursive(b, d)?;
        guard.insert((b, d), v.clone());
        Ok(v)
    })
}

/// All terms sharing `lambda_1`, rendered in the nested style of a printed
/// expansion table.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionGroup<T> {
    pub lambda1: IntPartition,
    /// Nested rendering, e.g.
    /// `m(3+1+1+1)s(3,3)s(1,1)s(1,1)s(1,1)(m(4)s(4,3) + ...)`.
    pub text: String,
    pub terms: Vec<TermBreakdown<T>>,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expansion<T> {
    pub n: usize,
    pub i: usize,
    /// Ordered by `lambda_1`, reverse lexicographic.
    pub groups: Vec<ExpansionGroup<T>>,
    pub value: T,
}

impl<T: Scalar> Expansion<T> {
    /// The whole expansion on one line, groups joined by ` + `.
    pub fn text(&self) -> String {
        self.groups
            .iter()
            .map(|g| g.text.as_str())
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn group(&self, lambda1: &IntPartition) -> Option<&ExpansionGroup<T>> {
        self.groups.iter().find(|g| &g.lambda1 == lambda1)
    }
}

fn render_factor<T>(f: &ChainFactor<T>) -> String {
    let products: Vec<String> = f
        .compositions
        .iter()
        .map(|(d, _)| {
            f.partition
                .blocks()
                .iter()
                .zip(d)
                .map(|(b, dk)| format!("s({b},{dk})"))
                .collect::<String>()
        })
        .collect();
    let inner = match products.len() {
        1 => products.into_iter().next().unwrap(),
        _ => format!("({})", products.join(" + ")),
    };
    format!("m({}){inner}", f.partition)
}

/// Renders terms that agree on positions `< depth`, nesting shared prefixes.
fn render_level<T>(terms: &[&TermBreakdown<T>], depth: usize) -> String {
    // (partition, alpha) in first-appearance order
    let mut keys: Vec<(&IntPartition, usize)> = Vec::new();
    let mut buckets: HashMap<(&IntPartition, usize), Vec<&TermBreakdown<T>>> = HashMap::new();
    for t in terms {
        let key = (&t.triple.lambda()[depth], t.triple.alpha()[depth]);
        buckets.entry(key).or_insert_with(|| {
            keys.push(key);
            Vec::new()
        });
        buckets.get_mut(&key).unwrap().push(t);
    }
    let parts: Vec<String> = keys
        .iter()
        .map(|key| {
            let bucket = &buckets[key];
            let head = render_factor(&bucket[0].factors[depth]);
            let deeper: Vec<&TermBreakdown<T>> = bucket
                .iter()
                .copied()
                .filter(|t| t.triple.q() > depth + 1)
                .collect();
            if deeper.is_empty() {
                head
            } else {
                let tail = render_level(&deeper, depth + 1);
                let nested_groups = deeper
                    .iter()
                    .map(|t| (&t.triple.lambda()[depth + 1], t.triple.alpha()[depth + 1]))
                    .collect::<std::collections::HashSet<_>>()
                    .len();
                if nested_groups > 1 {
                    format!("{head}({tail})")
                } else {
                    format!("{head}{tail}")
                }
            }
        })
        .collect();
    parts.join(" + ")
}

/// Every term of `K_{n,i}` with its audit trail, grouped by `lambda_1`.
pub fn symbolic_expansion<T: Scalar>(
    stirling: &StirlingTable<T>,
    n: usize,
    i: usize,
) -> Result<Expansion<T>> {
    let mut chains = ChainIndex::new().chains(n, i)?.as_ref().clone();
    chains.sort();
    let terms = chains
        .iter()
        .map(|t| term_value(stirling, t))
        .collect::<Result<Vec<_>>>()?;
    let mut by_lambda: BTreeMap<std::cmp::Reverse<IntPartition>, Vec<TermBreakdown<T>>> =
        BTreeMap::new();
    for term in terms {
        by_lambda
            .entry(std::cmp::Reverse(term.triple.lambda()[0].clone()))
            .or_default()
            .push(term);
    }
    let groups: Vec<ExpansionGroup<T>> = by_lambda
        .into_iter()
        .map(|(std::cmp::Reverse(lambda1), terms)| {
            let refs: Vec<&TermBreakdown<T>> = terms.iter().collect();
            let text = render_level(&refs, 0);
            let value = terms.iter().fold(T::zero(), |acc, t| acc + t.value.clone());
            ExpansionGroup {
                lambda1,
                text,
                terms,
                value,
            }
        })
        .collect();
    let value = groups
        .iter()
        .fold(T::zero(), |acc, g| acc + g.value.clone());
    Ok(Expansion {
        n,
        i,
        groups,
        value,
    })
}
