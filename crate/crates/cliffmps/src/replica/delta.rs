//! Deviation of the RMPS magic average from the Haar value,
//! `δ = d^n (E_RMPS[m_n] − E_Haar[m_n])`.

use rayon::prelude::*;

use super::closed_form::{haar_magic_scaled, product_state_law};
use super::transfer::{obc_delta, pbc_delta};
use crate::error::{Error, Result};
use crate::mps::MpsState;
use crate::numeric::Rng;
use crate::stats::{mean_estimate, EnsembleEstimate};
use crate::statevector::{StateVector, MAX_SRE_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    pub fn label(self) -> &'static str {
        match self {
            Boundary::Open => "obc",
            Boundary::Periodic => "pbc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo { samples: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MagicDeviation {
    pub n_sites: usize,
    pub chi: usize,
    pub n: usize,
    pub boundary: Boundary,
    pub delta: f64,
    /// `None` for analytic values.
    pub std_error: Option<f64>,
    pub samples: usize,
}

/// `δ` from the transfer-matrix chain (open) or trace (periodic).
pub fn delta_analytic(n_sites: usize, chi: usize, n: usize, boundary: Boundary) -> Result<MagicDeviation> {
    let delta = match boundary {
        Boundary::Open => obc_delta(n, chi, n_sites)?,
        Boundary::Periodic => pbc_delta(n, chi, n_sites)?,
    };
    Ok(MagicDeviation { n_sites, chi, n, boundary, delta, std_error: None, samples: 0 })
}

/// Samples of `d^n m_n` over open-boundary RMPS, one child stream per
/// sample so the result does not depend on scheduling.
pub fn rmps_scaled_magic_samples(n_sites: usize, chi: usize, n: usize, samples: usize, rng: &Rng) -> Result<Vec<f64>> {
    if n_sites > MAX_SRE_QUBITS {
        return Err(Error::Resource(format!("exact SRE on {n_sites} qubits (max {MAX_SRE_QUBITS})")));
    }
    let scale = 2f64.powi((n * n_sites) as i32);
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.child(i);
            let psi = MpsState::sample_rmps_obc(n_sites, chi, &mut r)?.to_statevector()?;
            Ok(scale * psi.exact_sre(n)?.linear)
        })
        .collect()
}

/// Samples of `d^n m_n` over Haar-random product states.
pub fn product_scaled_magic_samples(n_sites: usize, n: usize, samples: usize, rng: &Rng) -> Result<Vec<f64>> {
    if n_sites > MAX_SRE_QUBITS {
        return Err(Error::Resource(format!("exact SRE on {n_sites} qubits (max {MAX_SRE_QUBITS})")));
    }
    let scale = 2f64.powi((n * n_sites) as i32);
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.child(i);
            Ok(scale * StateVector::random_product(n_sites, &mut r)?.exact_sre(n)?.linear)
        })
        .collect()
}

/// Monte-Carlo `δ` over open-boundary RMPS (dense SRE, `N ≤ 10`).
pub fn delta_mc(n_sites: usize, chi: usize, n: usize, samples: usize, rng: &Rng) -> Result<MagicDeviation> {
    let est = scaled_magic_mc(n_sites, chi, n, samples, rng)?;
    let haar = haar_magic_scaled(n, 0.5f64.powi(n_sites as i32))?;
    Ok(MagicDeviation {
        n_sites,
        chi,
        n,
        boundary: Boundary::Open,
        delta: est.mean - haar,
        std_error: Some(est.std_error),
        samples,
    })
}

/// Monte-Carlo estimate of `d^n E_RMPS[m_n]`.
pub fn scaled_magic_mc(n_sites: usize, chi: usize, n: usize, samples: usize, rng: &Rng) -> Result<EnsembleEstimate> {
    let xs = rmps_scaled_magic_samples(n_sites, chi, n, samples, rng)?;
    mean_estimate(&xs, "rmps_mc")
}

/// Dispatches on `method`. Periodic chains have no sampler.
pub fn delta_chi(n_sites: usize, chi: usize, n: usize, boundary: Boundary, method: Method, rng: &Rng) -> Result<MagicDeviation> {
    match (method, boundary) {
        (Method::Analytic, b) => delta_analytic(n_sites, chi, n, b),
        (Method::MonteCarlo { samples }, Boundary::Open) => delta_mc(n_sites, chi, n, samples, rng),
        (Method::MonteCarlo { .. }, Boundary::Periodic) => {
            Err(Error::Unsupported("Monte-Carlo sampling of periodic-boundary states".into()))
        }
    }
}

/// `δ` at `χ = 1` from the product-state law.
pub fn product_state_delta(n_sites: usize, n: usize) -> Result<f64> {
    Ok(product_state_law(n, n_sites)? - haar_magic_scaled(n, 0.5f64.powi(n_sites as i32))?)
}
