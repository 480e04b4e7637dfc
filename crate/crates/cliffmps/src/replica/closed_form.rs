//! Closed-form Haar and product-state averages of the linearized magic.

use super::perm::SymmetricGroup;
use crate::error::{Error, Result};

fn check_index(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("closed form for Rényi index {n} (only 2 and 3)")))
    }
}

/// `E_Haar[m_n]` for Haar states of dimension `d`.
pub fn haar_magic_closed_form(d: f64, n: usize) -> Result<f64> {
    check_index(n)?;
    if !(d >= 2.0) {
        return Err(Error::InvalidDimension(format!("Hilbert-space dimension {d} < 2")));
    }
    Ok(haar_magic_scaled(n, 1.0 / d)? / d.powi(n as i32))
}

/// `d^n E_Haar[m_n]` written in `x = 1/d`, finite for any number of qubits.
pub fn haar_magic_scaled(n: usize, x: f64) -> Result<f64> {
    Ok(haar_limit(n)? - haar_gap(n, x)?)
}

/// `lim_{d→∞} d^n E_Haar[m_n]`: 4 for `n = 2`, 1 for `n = 3`.
pub fn haar_limit(n: usize) -> Result<f64> {
    check_index(n)?;
    Ok(if n == 2 { 4.0 } else { 1.0 })
}

/// `haar_limit(n) − d^n E_Haar[m_n]` without cancellation, `x = 1/d`.
pub fn haar_gap(n: usize, x: f64) -> Result<f64> {
    check_index(n)?;
    Ok(if n == 2 {
        12.0 * x / (1.0 + 3.0 * x)
    } else {
        -15.0 * x * (1.0 - x) / ((1.0 + 3.0 * x) * (1.0 + 5.0 * x))
    })
}

/// `d^n E[m_n]` over Haar-random product states of `n_sites` qubits.
pub fn product_state_law(n: usize, n_sites: usize) -> Result<f64> {
    let per_site = haar_magic_scaled(n, 0.5)?;
    Ok(per_site.powi(n_sites as i32))
}

/// `Tr[σ^{⊗k} P_symm]` for a Pauli operator on dimension `d`: the identity
/// (`Tr σ^m = d`) or a traceless Pauli (`Tr σ^m = d` for even `m`, else 0).
pub fn symmetric_projector_pauli_trace(d: f64, sigma_is_identity: bool, k: usize) -> Result<f64> {
    let group = SymmetricGroup::new(k)?;
    let tr = |m: usize| if sigma_is_identity || m % 2 == 0 { d } else { 0.0 };
    let total: f64 = group
        .elements()
        .iter()
        .map(|p| p.cycle_type().iter().map(|&m| tr(m)).product::<f64>())
        .sum();
    Ok(total / group.order() as f64)
}
