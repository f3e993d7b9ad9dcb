//! Exact Kazhdan-Lusztig coefficients of braid matroids.
//!
//! Four independent routes compute `C_{n,i}`, the coefficient of `t^i` in
//! `P_n(t)`:
//!
//! - [`KlTable`]: the partition-indexed recursion, solved degree by degree;
//! - [`kl_coeff_via_theorem`]: a closed sum over chain triples ([`enumerate_k`])
//!   of signed Stirling numbers of the first kind;
//! - [`kl_coeff_via_pxy`] and [`kl_c1`]: flag Whitney numbers, i.e. products of
//!   Stirling numbers of the second kind;
//! - [`kl_polynomial_generic`]: the defining conditions applied directly to the
//!   set-partition lattice (small `n` only).
//!
//! Arithmetic is generic over [`Scalar`]; the aliases below fix it to
//! arbitrary-precision integers.
//!
//! ```
//! use braid_kl::{kl_braid_poly, kl_coeff};
//!
//! assert_eq!(kl_braid_poly(6).unwrap().to_string(), "15t^2 + 16t + 1");
//! assert_eq!(kl_coeff(7, 1).unwrap(), 42.into());
//! ```

pub mod error;
pub mod index_set;
pub mod kl_recursion;
pub mod lattice;
pub mod main_formula;
pub mod partitions;
pub mod polynomial;
pub mod scalar;
pub mod stirling;
pub mod whitney;

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;

pub use error::{Error, Result};
pub use index_set::{
    enumerate_k, validate_triple, Axiom, AxiomReport, ChainIndex, KlChainTriple, XiReading,
};
pub use kl_recursion::{IdentityReport, KlTable};
pub use lattice::{
    build_partition_lattice, build_partition_lattice_bounded, flag_whitney_bruteforce,
    kl_polynomial_generic, FlagIndex, RankedLattice, GENERIC_KL_MAX_N,
};
pub use main_formula::{
    kl_coeff_via_nonrecursive_stirling, kl_coeff_via_theorem, symbolic_expansion, term_value,
    Expansion, TermBreakdown,
};
pub use partitions::{
    bounded_compositions, multiplicity, partitions_of, set_partitions_bounded, set_partitions_of,
    IntPartition, SetPartition, ORACLE_MAX_N,
};
pub use polynomial::{Poly, TermOrder};
pub use scalar::Scalar;
pub use stirling::{
    chi_n, falling_factorial_poly, stirling_first, stirling_first_nonrecursive, stirling_second,
    StirlingTable,
};
pub use whitney::{
    flag_whitney_product, kl_c1, kl_coeff_via_pxy, select_pxy_reading, PxyReading,
    DEFAULT_PXY_READING,
};

pub type IntPoly = Poly<BigInt>;
pub type RatPoly = Poly<BigRational>;
pub type Stirling = StirlingTable<BigInt>;
pub type BraidKl = KlTable<BigInt>;

/// Process-wide recursion table over the shared Stirling table.
pub fn shared_kl() -> &'static BraidKl {
    static KL: OnceLock<BraidKl> = OnceLock::new();
    KL.get_or_init(|| KlTable::new(Arc::clone(stirling::shared())))
}

/// `P_n(t)` from the recursion.
pub fn kl_braid_poly(n: usize) -> Result<IntPoly> {
    shared_kl().kl_braid_poly(n)
}

/// `C_{n,i}` from the recursion.
pub fn kl_coeff(n: usize, i: usize) -> Result<BigInt> {
    shared_kl().kl_coeff(n, i)
}
