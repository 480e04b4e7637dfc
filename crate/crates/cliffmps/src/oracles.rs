//! Quick equivalence checks between each fast path and its brute-force
//! reference. Each check reports its largest discrepancy.

use crate::clifford::{CliffordGroup, CliffordTableau};
use crate::cooling::{build_doped_state, cool, cool_brute_force, CoolingObjective, DopedCircuitSpec};
use crate::ensemble::{frame_potential_exact, sample_cmps, stabilizer_states};
use crate::error::Result;
use crate::io::{decode_mps, encode_mps};
use crate::mps::{BondProfile, MpsState};
use crate::numeric::{ComplexMatrix, Rng, C64};
use crate::pauli::PauliString;
use crate::replica::closed_form::product_state_law;
use crate::replica::delta::scaled_magic_mc;
use crate::replica::transfer::{obc_chain_value, SiteWeight, TransferMatrix};
use crate::replica::weingarten::WeingartenTable;
use crate::statevector::{build_q_and_psym, clifford_4fold_coefficients, clifford_channel_4fold, StateVector};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> OracleCheck {
    match f() {
        Ok((passed, detail)) => OracleCheck { name, passed, detail },
        Err(e) => OracleCheck { name, passed: false, detail: format!("error: {e}") },
    }
}

fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn run_oracle_suite(seed: u64) -> Vec<OracleCheck> {
    let rng = Rng::new(seed);
    vec![
        check("weingarten_k2_closed_form", || {
            let mut worst: f64 = 0.0;
            for q in [2.0f64, 4.0, 7.0, 16.0] {
                let t = WeingartenTable::new(2, q)?;
                let e = 1.0 / (q * q - 1.0);
                let s = -1.0 / (q * (q * q - 1.0));
                worst = worst.max((t.value(0) - e).abs()).max((t.value(1) - s).abs());
            }
            Ok((worst < 1e-12, format!("max error {worst:.3e}")))
        }),
        check("clifford_4fold_channel_n1", || {
            let mut r = rng.child(0);
            let (q, p) = build_q_and_psym(1, 4)?;
            let mut worst: f64 = 0.0;
            for psi in [StateVector::zero(1)?, StateVector::haar(1, &mut r)?] {
                let m2 = psi.exact_sre(2)?.linear;
                let (a, b) = clifford_4fold_coefficients(2.0, m2);
                let target = &q * &p * C64::new(a, 0.0) + &p * C64::new(b, 0.0);
                let got = clifford_channel_4fold(&psi, true, 0, &mut r)?;
                worst = worst.max(frobenius(&(got - target)));
            }
            Ok((worst < 1e-10, format!("Frobenius error {worst:.3e}")))
        }),
        check("tableau_dense_conjugation", || {
            let mut r = rng.child(1);
            let t = CliffordTableau::random(2, &mut r);
            let u = t.to_dense()?;
            let mut worst: f64 = 0.0;
            for p in PauliString::enumerate(2) {
                let lhs = &u * p.to_dense()? * u.adjoint();
                let rhs = t.conjugate(&p)?.to_dense()?;
                worst = worst.max(frobenius(&(lhs - rhs)));
            }
            Ok((worst < 1e-10, format!("max error over 16 Paulis {worst:.3e}")))
        }),
        check("mps_vs_dense_pauli_expectation", || {
            let mut r = rng.child(2);
            let mut worst: f64 = 0.0;
            for n in 2..=6 {
                let mps = MpsState::sample_rmps_obc(n, 2, &mut r)?;
                let dense = mps.to_statevector()?;
                for _ in 0..20 {
                    let p = PauliString::from_masks(n, r.below(1 << n) as u64, r.below(1 << n) as u64);
                    worst = worst.max((mps.pauli_expectation(&p)? - dense.pauli_expectation(&p)?).abs());
                }
            }
            Ok((worst < 1e-10, format!("max error {worst:.3e}")))
        }),
        check("cmps_sre_clifford_invariance", || {
            let mut r = rng.child(3);
            let mut worst: f64 = 0.0;
            for n in 2..=6 {
                let s = sample_cmps(n, 2, &mut r)?;
                let a = s.to_statevector()?.exact_sre(2)?.entropy;
                let b = s.mps.to_statevector()?.exact_sre(2)?.entropy;
                worst = worst.max((a - b).abs());
            }
            Ok((worst < 1e-9, format!("max |ΔM₂| {worst:.3e}")))
        }),
        check("class_sector_chain_vs_full_chain", || {
            let mut worst: f64 = 0.0;
            for (k, chi, n) in [(4, 2, 5), (4, 4, 6), (6, 2, 4)] {
                let a = obc_chain_value(k, chi, n, SiteWeight::Pauli)?;
                let profile = BondProfile::new(n, chi)?;
                let d = profile.dims();
                let size = TransferMatrix::site(k, d[0], d[1], SiteWeight::Pauli)?.matrix().nrows();
                let mut v = nalgebra::DVector::<f64>::zeros(size);
                v[0] = 1.0;
                for i in 1..d.len() {
                    v = TransferMatrix::site(k, d[i - 1], d[i], SiteWeight::Pauli)?.matrix() * v;
                }
                worst = worst.max((a - v.sum()).abs() / a.abs());
            }
            Ok((worst < 1e-10, format!("max relative error {worst:.3e}")))
        }),
        check("product_state_chain", || {
            let mut worst: f64 = 0.0;
            for (n, k) in [(2, 4), (3, 6)] {
                for sites in [1, 8, 64] {
                    let a = obc_chain_value(k, 1, sites, SiteWeight::Pauli)?;
                    let b = product_state_law(n, sites)?;
                    worst = worst.max((a / b - 1.0).abs());
                }
            }
            Ok((worst < 1e-10, format!("max relative error {worst:.3e}")))
        }),
        check("chain_vs_rmps_monte_carlo", || {
            let est = scaled_magic_mc(4, 2, 2, 2000, &rng.child(4))?;
            let chain = obc_chain_value(4, 2, 4, SiteWeight::Pauli)?;
            let z = est.sigmas_from(chain);
            Ok((z < 4.0, format!("MC {:.5} ± {:.5} vs chain {chain:.5} ({z:.2}σ)", est.mean, est.std_error)))
        }),
        check("stabilizer_enumeration", || {
            let s = stabilizer_states(2)?;
            let f4 = frame_potential_exact(&s, 4)?.mean;
            let ok = CliffordGroup::get(2)?.len() == 11520 && s.len() == 60 && (f4 - 1.0 / 32.0).abs() < 1e-14;
            Ok((ok, format!("{} states, F4 = {f4}", s.len())))
        }),
        check("cooling_coset_search", || {
            let spec = DopedCircuitSpec { n: 4, v: 1, steps: 3, t_gates: true, seed };
            let s = build_doped_state(&spec)?;
            let a = cool(&s, 1, CoolingObjective::SingleCut)?;
            let b = cool_brute_force(&s, 1, CoolingObjective::SingleCut)?;
            let same = a.moves.iter().map(|m| (m.bond, m.element)).eq(b.moves.iter().map(|m| (m.bond, m.element)));
            Ok((same, format!("{} moves", a.moves.len())))
        }),
        check("mps_file_roundtrip", || {
            let mps = MpsState::sample_rmps_obc(5, 4, &mut rng.child(5))?;
            let bytes = encode_mps(&mps, Some(seed));
            let (back, _) = decode_mps(&bytes)?;
            Ok((back.tensors() == mps.tensors(), format!("{} bytes", bytes.len())))
        }),
    ]
}
