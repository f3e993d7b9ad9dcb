use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use braid_kl::{
    build_partition_lattice_bounded, kl_c1, kl_coeff_via_pxy, kl_coeff_via_theorem,
    kl_polynomial_generic, BraidKl, IntPoly, KlTable, PxyReading, Stirling,
};
use clap::ValueEnum;
use num_bigint::BigInt;

use crate::Failure;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Partition-indexed recursion
    Recursion,
    /// Chain-triple sum of first-kind Stirling numbers
    Chain,
    /// Degree-one closed form (i = 1 only)
    Corollary,
    /// Alternating flag-Whitney sum
    Pxy,
    /// Direct solve on the set-partition lattice
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Recursion,
        Method::Chain,
        Method::Corollary,
        Method::Pxy,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Recursion => "recursion",
            Method::Chain => "chain",
            Method::Corollary => "corollary",
            Method::Pxy => "pxy",
            Method::Oracle => "oracle",
        }
    }
}

pub const DEFAULT_LATTICE_BOUND: usize = 9;
pub const DEFAULT_GENERIC_BOUND: usize = 7;
pub const DEFAULT_CHAIN_BOUND: usize = 12;

#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub lattice: usize,
    pub generic: usize,
    pub chain: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Value(BigInt),
    NotApplicable(String),
}

pub struct Engine {
    pub stirling: Arc<Stirling>,
    pub kl: BraidKl,
    pub bounds: Bounds,
    pub reading: PxyReading,
    oracle_polys: Mutex<HashMap<usize, IntPoly>>,
}

impl Engine {
    pub fn new(stirling: Arc<Stirling>, bounds: Bounds, reading: PxyReading) -> Self {
        Self {
            kl: KlTable::new(Arc::clone(&stirling)),
            stirling,
            bounds,
            reading,
            oracle_polys: Mutex::new(HashMap::new()),
        }
    }

    pub fn oracle_poly(&self, n: usize) -> braid_kl::Result<IntPoly> {
        if let Some(p) = self.oracle_polys.lock().unwrap().get(&n) {
            return Ok(p.clone());
        }
        if n > self.bounds.generic {
            return Err(braid_kl::Error::OracleBound {
                n,
                bound: self.bounds.generic,
            });
        }
        let lattice =
            build_partition_lattice_bounded(n, self.bounds.lattice.max(self.bounds.generic))?;
        let p = kl_polynomial_generic(&lattice)?;
        self.oracle_polys.lock().unwrap().insert(n, p.clone());
        Ok(p)
    }

    /// `C_{n,i}` by one route, or why the route does not apply.
    pub fn compute(&self, method: Method, n: usize, i: usize) -> Result<Outcome, Failure> {
        if n == 0 {
            return Err(Failure::Usage("n must be at least 1".into()));
        }
        let in_range = n >= 2 && 2 * i + 1 < n;
        let value = match method {
            Method::Recursion => self.kl.kl_coeff(n, i),
            Method::Chain => {
                if !in_range {
                    return Ok(Outcome::NotApplicable("needs i < (n-1)/2".into()));
                }
                if n > self.bounds.chain {
                    return Ok(Outcome::NotApplicable(format!(
                        "n above chain bound {}",
                        self.bounds.chain
                    )));
                }
                kl_coeff_via_theorem(self.stirling.as_ref(), n, i)
            }
            Method::Corollary => {
                if i != 1 || n < 2 {
                    return Ok(Outcome::NotApplicable("degree one only".into()));
                }
                kl_c1(self.stirling.as_ref(), n)
            }
            Method::Pxy => {
                if !in_range || i == 0 {
                    return Ok(Outcome::NotApplicable("needs 0 < i < (n-1)/2".into()));
                }
                kl_coeff_via_pxy(self.stirling.as_ref(), n, i, self.reading)
            }
            Method::Oracle => {
                if n > self.bounds.generic {
                    return Ok(Outcome::NotApplicable(format!(
                        "n above oracle bound {}",
                        self.bounds.generic
                    )));
                }
                self.oracle_poly(n).map(|p| p.coeff(i))
            }
        };
        value.map(Outcome::Value).map_err(Failure::from)
    }
}
