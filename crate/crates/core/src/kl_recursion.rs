//! Braid-matroid Kazhdan-Lusztig polynomials from the partition-indexed
//! form of the defining identity:
//!
//! ```text
//! t^(n-1) P_n(1/t) = sum_{lambda |- n} m(lambda) [prod_k chi_{b_k}(t)] P_{l(lambda)}(t)
//! ```
//!
//! The all-ones partition contributes `P_n` itself. Writing `Q` for the rest,
//! `t^(n-1) P_n(1/t) - P_n(t) = Q(t)`; since `deg P_n < (n-1)/2`, the two
//! left-hand terms live in disjoint degree ranges, so `C_{n,i} = -Q_i` for
//! the low half and `Q_{n-1-i} = C_{n,i}` must hold for the high half.

use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::partitions::partitions_of;
use crate::polynomial::Poly;
use crate::scalar::Scalar;
use crate::stirling::StirlingTable;

/// Memo table of `P_1, P_2, ...`, filled bottom-up.
#[derive(Debug)]
pub struct KlTable<T> {
    stirling: Arc<StirlingTable<T>>,
    polys: RwLock<Vec<Poly<T>>>,
}

/// Both sides of the defining identity for `P_n`, compared coefficientwise.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport<T> {
    pub n: usize,
    pub lhs: Poly<T>,
    pub rhs: Poly<T>,
    /// `(degree, lhs coefficient, rhs coefficient)` wherever they differ.
    pub mismatches: Vec<(usize, T, T)>,
}

impl<T> IdentityReport<T> {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl<T: Scalar> KlTable<T> {
    pub fn new(stirling: Arc<StirlingTable<T>>) -> Self {
        Self {
            stirling,
            // index 0 is unused; P_1 = 1 (rank 0)
            polys: RwLock::new(vec![Poly::one(), Poly::one()]),
        }
    }

    pub fn stirling(&self) -> &Arc<StirlingTable<T>> {
        &self.stirling
    }

    /// `sum over lambda |- n` of `m(lambda) prod chi_{b_k} P_{l(lambda)}`,
    /// optionally skipping the all-ones partition.
    fn partition_sum(
        &self,
        n: usize,
        polys: &[Poly<T>],
        include_all_ones: bool,
    ) -> Result<Poly<T>> {
        let mut total = Poly::zero();
        for lambda in partitions_of(n) {
            if lambda.len() == n && !include_all_ones {
                continue;
            }
            let chi: Poly<T> = lambda
                .blocks()
                .iter()
                .map(|&b| self.stirling.chi(b))
                .product();
            let weight = lambda.multiplicity::<T>()?;
            total = total + (&chi * &polys[lambda.len()]).scale(&weight);
        }
        Ok(total)
    }

    fn solve(&self, n: usize, polys: &[Poly<T>]) -> Result<Poly<T>> {
        let rank = n - 1;
        let q = self.partition_sum(n, polys, false)?;
        let low: Vec<T> = (0..rank)
            .take_while(|&i| 2 * i < rank)
            .map(|i| -q.coeff(i))
            .collect();
        let p = Poly::from_coeffs(low);
        let residual = &(&p.reverse(rank)? - &p) - &q;
        if !residual.is_zero() {
            return Err(Error::InconsistentSolve(format!(
                "P_{n}: residual {residual}"
            )));
        }
        Ok(p)
    }

    /// `P_n(t)`, memoized.
    pub fn kl_braid_poly(&self, n: usize) -> Result<Poly<T>> {
        if n == 0 {
            return Err(Error::Domain("braid matroids start at n = 1".into()));
        }
        if let Some(p) = self.polys.read().unwrap().get(n) {
            return Ok(p.clone());
        }
        let mut polys = self.polys.write().unwrap();
        while polys.len() <= n {
            let m = polys.len();
            let p = self.solve(m, &polys)?;
            polys.push(p);
        }
        Ok(polys[n].clone())
    }

    /// `C_{n,i}`; zero above the degree bound.
    pub fn kl_coeff(&self, n: usize, i: usize) -> Result<T> {
        Ok(self.kl_braid_poly(n)?.coeff(i))
    }

    /// Recomputes both sides of the defining identity for `P_n` from the
    /// stored polynomials, including the all-ones term.
    pub fn verify_defining_identity(&self, n: usize) -> Result<IdentityReport<T>> {
        if n < 2 {
            return Err(Error::Domain("identity check needs n >= 2".into()));
        }
        let p_n = self.kl_braid_poly(n)?;
        let polys = self.polys.read().unwrap();
        let lhs = p_n.reverse(n - 1)?;
        let rhs = self.partition_sum(n, &polys[..=n], true)?;
        let top = lhs.coeffs().len().max(rhs.coeffs().len());
        let mismatches = (0..top)
            .filter_map(|k| {
                let (a, b) = (lhs.coeff(k), rhs.coeff(k));
                (a != b).then_some((k, a, b))
            })
            .collect();
        Ok(IdentityReport {
            n,
            lhs,
            rhs,
            mismatches,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;

    fn table() -> KlTable<BigInt> {
        KlTable::new(Arc::new(StirlingTable::new()))
    }

    fn p(c: &[i64]) -> Poly<BigInt> {
        Poly::from_coeffs(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn small_polynomials() {
        let kl = table();
        assert_eq!(kl.kl_braid_poly(1).unwrap(), Poly::one());
        assert_eq!(kl.kl_braid_poly(2).unwrap(), Poly::one());
        assert_eq!(kl.kl_braid_poly(3).unwrap(), Poly::one());
        assert_eq!(kl.kl_braid_poly(4).unwrap(), p(&[1, 1]));
        assert_eq!(kl.kl_braid_poly(5).unwrap(), p(&[1, 5]));
        assert_eq!(kl.kl_braid_poly(6).unwrap(), p(&[1, 16, 15]));
        assert!(kl.kl_braid_poly(0).is_err());
    }

    #[test]
    fn coefficients() {
        let kl = table();
        for n in 2..=20 {
            assert_eq!(kl.kl_coeff(n, 0).unwrap(), BigInt::from(1));
        }
        assert_eq!(kl.kl_coeff(4, 1).unwrap(), BigInt::from(1));
        assert_eq!(kl.kl_coeff(3, 1).unwrap(), BigInt::from(0));
    }

    #[test]
    fn degree_bound_and_nonnegativity() {
        let kl = table();
        for n in 2..=25 {
            let poly = kl.kl_braid_poly(n).unwrap();
            let deg = poly.degree().unwrap();
            assert!(2 * deg < n - 1, "n = {n}");
            assert!(poly.coeffs().iter().all(|c| !c.is_negative()));
        }
    }

    #[test]
    fn second_kind_degree_one() {
        let kl = table();
        let s = kl.stirling().clone();
        for n in 3..=25 {
            assert_eq!(
                kl.kl_coeff(n, 1).unwrap(),
                s.second(n, 2) - s.second(n, n - 1),
                "n = {n}"
            );
        }
    }

    #[test]
    fn identity_reports() {
        let kl = table();
        for n in [2, 7, 12] {
            let report = kl.verify_defining_identity(n).unwrap();
            assert!(report.holds(), "n = {n}: {:?}", report.mismatches);
            assert_eq!(report.lhs.degree(), Some(n - 1));
        }
        assert!(kl.verify_defining_identity(1).is_err());
    }

    #[test]
    fn machine_integers_agree_at_small_n() {
        let small = KlTable::<i128>::new(Arc::new(StirlingTable::new()));
        let big = table();
        for n in 1..=14 {
            let a = small.kl_braid_poly(n).unwrap();
            let b = big.kl_braid_poly(n).unwrap();
            let lifted: Vec<BigInt> = a.coeffs().iter().map(|&c| BigInt::from(c)).collect();
            assert_eq!(lifted, b.coeffs());
        }
    }
}
