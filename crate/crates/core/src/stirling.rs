//! Stirling numbers of both kinds, falling factorials, and the characteristic
//! polynomials of partition lattices.
//!
//! First-kind values are *signed*: `s(n, k)` is the coefficient of `t^k` in the
//! falling factorial `t (t - 1) ... (t - n + 1)`, so `s(4, 3) = -6`. The
//! Kazhdan-Lusztig chain sums rely on the resulting cancellation.

use std::sync::{Arc, OnceLock, RwLock};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polynomial::Poly;
use crate::scalar::{factorial, lift, Scalar};

#[derive(Debug)]
struct Rows<T> {
    // row n holds k = 0..=n
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
}

/// Memoized triangular tables of `s(n, k)` and `S(n, k)`.
///
/// Rows are filled on demand and never shrink. The table is shareable across
/// threads; readers only take the write lock when a row is missing.
#[derive(Debug)]
pub struct StirlingTable<T> {
    rows: RwLock<Rows<T>>,
}

impl<T: Scalar> Default for StirlingTable<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> StirlingTable<T> {
    pub fn new() -> Self {
        Self {
            rows: RwLock::new(Rows {
                first: vec![vec![T::one()]],
                second: vec![vec![T::one()]],
            }),
        }
    }

    fn ensure(&self, n: usize) {
        {
            let rows = self.rows.read().unwrap();
            if rows.first.len() > n && rows.second.len() > n {
                return;
            }
        }
        let mut rows = self.rows.write().unwrap();
        while rows.first.len() <= n {
            let m = rows.first.len();
            let prev = &rows.first[m - 1];
            let back = lift::<T>(m - 1);
            let mut row = vec![T::zero(); m + 1];
            // s(m, k) = s(m-1, k-1) - (m-1) s(m-1, k)
            for k in 1..=m {
                let mut v = prev[k - 1].clone();
                if k < m {
                    v = v - back.clone() * prev[k].clone();
                }
                row[k] = v;
            }
            rows.first.push(row);
        }
        while rows.second.len() <= n {
            let m = rows.second.len();
            let prev = &rows.second[m - 1];
            let mut row = vec![T::zero(); m + 1];
            // S(m, k) = S(m-1, k-1) + k S(m-1, k)
            for k in 1..=m {
                let mut v = prev[k - 1].clone();
                if k < m {
                    v = v + lift::<T>(k) * prev[k].clone();
                }
                row[k] = v;
            }
            rows.second.push(row);
        }
    }

    /// Signed `s(n, k)`; zero when `k > n`.
    pub fn first(&self, n: usize, k: usize) -> T {
        if k > n {
            return T::zero();
        }
        self.ensure(n);
        self.rows.read().unwrap().first[n][k].clone()
    }

    /// `S(n, k)`; zero when `k > n`.
    pub fn second(&self, n: usize, k: usize) -> T {
        if k > n {
            return T::zero();
        }
        self.ensure(n);
        self.rows.read().unwrap().second[n][k].clone()
    }

    /// `s(n, 0..=n)`.
    pub fn first_row(&self, n: usize) -> Vec<T> {
        self.ensure(n);
        self.rows.read().unwrap().first[n].clone()
    }

    pub fn second_row(&self, n: usize) -> Vec<T> {
        self.ensure(n);
        self.rows.read().unwrap().second[n].clone()
    }

    /// Characteristic polynomial of the partition lattice on `n` points,
    /// `(t)_n / t = sum_k s(n, k) t^(k-1)`.
    ///
    /// Panics if `n == 0`.
    pub fn chi(&self, n: usize) -> Poly<T> {
        assert!(n >= 1, "chi_n is defined for n >= 1");
        let row = self.first_row(n);
        Poly::from_coeffs(row[1..].to_vec())
    }

    /// Overwrites one cached first-kind entry, extending the table first.
    /// Rows built afterwards inherit the corrupted value.
    #[doc(hidden)]
    pub fn inject_first_fault(&self, n: usize, k: usize, value: T) {
        self.ensure(n);
        self.rows.write().unwrap().first[n][k] = value;
    }
}

/// `t (t - 1) ... (t - n + 1)` built as an explicit product, independently of
/// the Stirling table.
pub fn falling_factorial<T: Scalar>(n: usize) -> Poly<T> {
    (0..n)
        .map(|j| Poly::from_coeffs(vec![-lift::<T>(j), T::one()]))
        .product()
}

/// Process-wide `BigInt` table behind the free functions below.
pub fn shared() -> &'static Arc<StirlingTable<BigInt>> {
    static TABLE: OnceLock<Arc<StirlingTable<BigInt>>> = OnceLock::new();
    TABLE.get_or_init(|| Arc::new(StirlingTable::new()))
}

pub fn stirling_first(n: usize, k: usize) -> BigInt {
    shared().first(n, k)
}

pub fn stirling_second(n: usize, k: usize) -> BigInt {
    shared().second(n, k)
}

pub fn falling_factorial_poly(n: usize) -> Poly<BigInt> {
    falling_factorial(n)
}

pub fn chi_n(n: usize) -> Poly<BigInt> {
    shared().chi(n)
}

/// `s(n, m)` without the two-term recurrence.
///
/// Uses `|s(n, m)| = (n-1)! * sum over (m-1)-subsets {i_1 < ... < i_{m-1}} of
/// {1, ..., n-1} of 1 / (i_1 ... i_{m-1})`, accumulated as an exact reduced
/// rational, then restores the sign `(-1)^(n-m)`.
pub fn stirling_first_nonrecursive(n: usize, m: usize) -> Result<BigInt> {
    if m == 0 || m > n {
        return Err(Error::Domain(format!(
            "non-recursive s(n, m) needs 1 <= m <= n, got n = {n}, m = {m}"
        )));
    }
    let mut harmonic = BigRational::zero();
    for subset in (1..n).combinations(m - 1) {
        let denom: BigInt = subset.iter().map(|&i| BigInt::from(i)).product();
        harmonic += BigRational::new(BigInt::one(), denom);
    }
    let value = harmonic * BigRational::from_integer(factorial::<BigInt>(n - 1));
    if !value.is_integer() {
        return Err(Error::InexactDivision(format!("s({n}, {m})")));
    }
    let magnitude = value.to_integer();
    Ok(if (n - m) % 2 == 1 {
        -magnitude
    } else {
        magnitude.abs()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn first_kind_examples() {
        for n in 0..10 {
            assert_eq!(stirling_first(n, n), big(1));
        }
        assert_eq!(stirling_first(3, 2), big(-3));
        assert_eq!(stirling_first(4, 3), big(-6));
        assert_eq!(stirling_first(2, 0), big(0));
        assert_eq!(stirling_first(0, 0), big(1));
        assert_eq!(stirling_first(3, 7), big(0));
    }

    #[test]
    fn second_kind_examples() {
        for n in 0..10 {
            assert_eq!(stirling_second(n, n), big(1));
        }
        assert_eq!(stirling_second(4, 2), big(7));
        assert_eq!(stirling_second(5, 4), big(10));
        assert_eq!(stirling_second(5, 0), big(0));
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial_poly(0), Poly::one());
        assert_eq!(
            falling_factorial_poly(2).coeffs(),
            &[big(0), big(-1), big(1)]
        );
        assert_eq!(
            falling_factorial_poly(4).coeffs(),
            &[big(0), big(-6), big(11), big(-6), big(1)]
        );
        for n in 0..12 {
            let p = falling_factorial_poly(n);
            for k in 0..=n {
                assert_eq!(p.coeff(k), stirling_first(n, k), "s({n},{k})");
            }
        }
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_n(1), Poly::one());
        assert_eq!(chi_n(3).coeffs(), &[big(2), big(-3), big(1)]);
        assert_eq!(
            chi_n(6).coeffs(),
            &[big(-120), big(274), big(-225), big(85), big(-15), big(1)]
        );
        // (t - 1)(t - 2)...(t - n + 1)
        for n in 1..9 {
            let shifted: Poly<BigInt> = (1..n)
                .map(|j| Poly::from_coeffs(vec![big(-(j as i64)), big(1)]))
                .product();
            assert_eq!(chi_n(n), shifted);
            assert_eq!(chi_n(n).degree(), Some(n - 1));
        }
    }

    #[test]
    #[should_panic]
    fn chi_zero_panics() {
        chi_n(0);
    }

    #[test]
    fn nonrecursive_examples_and_errors() {
        assert_eq!(stirling_first_nonrecursive(3, 2).unwrap(), big(-3));
        assert_eq!(stirling_first_nonrecursive(4, 2).unwrap(), big(11));
        for n in 1..8 {
            assert_eq!(stirling_first_nonrecursive(n, n).unwrap(), big(1));
        }
        assert!(stirling_first_nonrecursive(3, 4).is_err());
        assert!(stirling_first_nonrecursive(3, 0).is_err());
    }

    /// The nested sum exactly as printed: m indices and an m!/(m-1)! factor.
    fn printed_nested_sum(n: usize, m: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for subset in (1..n).combinations(m) {
            let denom: BigInt = subset.iter().map(|&i| BigInt::from(i)).product();
            acc += BigRational::new(factorial::<BigInt>(m), denom);
        }
        acc * BigRational::new(factorial::<BigInt>(n - 1), factorial::<BigInt>(m - 1))
    }

    #[test]
    fn printed_nested_sum_is_off_at_three_two() {
        // |s(3,2)| = 3, the literal form gives 2
        assert_eq!(printed_nested_sum(3, 2), BigRational::from_integer(big(2)));
        assert_eq!(stirling_first_nonrecursive(3, 2).unwrap().abs(), big(3));
    }

    #[test]
    fn nonrecursive_matches_table() {
        for n in 1..=12 {
            for m in 1..=n {
                assert_eq!(
                    stirling_first_nonrecursive(n, m).unwrap(),
                    stirling_first(n, m)
                );
            }
        }
    }

    #[test]
    fn recurrences_signs_and_inversion() {
        let table = StirlingTable::<BigInt>::new();
        for n in 1..=15 {
            for k in 1..=n {
                assert_eq!(
                    table.first(n, k),
                    table.first(n - 1, k - 1) - big(n as i64 - 1) * table.first(n - 1, k)
                );
                assert_eq!(
                    table.second(n, k),
                    table.second(n - 1, k - 1) + big(k as i64) * table.second(n - 1, k)
                );
            }
            for k in 0..=n {
                let s = table.first(n, k);
                let signed = if (n - k) % 2 == 0 {
                    s.clone()
                } else {
                    -s.clone()
                };
                assert!(!signed.is_negative());
            }
            assert_eq!(table.first(n, 0), big(0));
            assert_eq!(table.second(n, 0), big(0));
        }
        // t^n = sum_k S(n,k) (t)_k at integer points
        for n in 0..=10 {
            for t in 0..=n {
                let t_big = big(t as i64);
                let lhs: BigInt = (0..=n)
                    .map(|k| table.second(n, k) * falling_factorial::<BigInt>(k).eval(&t_big))
                    .sum();
                assert_eq!(lhs, num_traits::pow(t_big, n));
            }
        }
    }

    #[test]
    fn row_sums() {
        for n in 1..=12 {
            let abs_sum: BigInt = stirling_first_row_abs_sum(n);
            assert_eq!(abs_sum, factorial::<BigInt>(n));
        }
    }

    fn stirling_first_row_abs_sum(n: usize) -> BigInt {
        shared().first_row(n).iter().map(|s| s.abs()).sum()
    }

    #[test]
    fn machine_integer_table_agrees() {
        let small = StirlingTable::<i64>::new();
        for n in 0..=15 {
            for k in 0..=n {
                assert_eq!(BigInt::from(small.first(n, k)), stirling_first(n, k));
                assert_eq!(BigInt::from(small.second(n, k)), stirling_second(n, k));
            }
        }
    }

    #[test]
    fn injected_fault_propagates() {
        let table = StirlingTable::<BigInt>::new();
        table.inject_first_fault(4, 3, big(6));
        assert_eq!(table.first(4, 3), big(6));
        // row 5 is built from the corrupted row
        assert_ne!(table.first(5, 4), stirling_first(5, 4));
    }
}
