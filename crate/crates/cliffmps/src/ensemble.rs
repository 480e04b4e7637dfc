//! Ensemble statistics: the 𝒞MPS sampler, frame potentials, design
//! distances and bipartite purity fluctuations.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::clifford::{CliffordGroup, CliffordTableau};
use crate::error::{Error, Result};
use crate::mps::MpsState;
use crate::numeric::{binomial, Rng};
use crate::pauli::PauliString;
use crate::statevector::{clifford_4fold_coefficients, StateVector, MAX_SRE_QUBITS};
use crate::stats::{mean_estimate, variance_estimate};

pub use crate::stats::EnsembleEstimate;

/// A Clifford-enhanced MPS `U_c|φ⟩` with `U_c` uniform over the Clifford
/// group and `|φ⟩` an open-boundary RMPS.
#[derive(Clone, Debug)]
pub struct CmpsSample {
    pub tableau: CliffordTableau,
    pub mps: MpsState,
    /// Seed and stream of the generator the sample was drawn from.
    pub seed: u64,
    pub stream: u64,
}

pub fn sample_cmps(n: usize, chi_max: usize, rng: &mut Rng) -> Result<CmpsSample> {
    let (seed, stream) = (rng.seed(), rng.stream());
    let mps = MpsState::sample_rmps_obc(n, chi_max, rng)?;
    let tableau = CliffordTableau::random(n, rng);
    Ok(CmpsSample { tableau, mps, seed, stream })
}

impl CmpsSample {
    pub fn num_qubits(&self) -> usize {
        self.mps.num_sites()
    }

    /// `⟨φ|U† P U|φ⟩`, contracting the MPS against the back-propagated Pauli.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        let q = self.tableau.conjugate_dagger(p)?;
        self.mps.pauli_expectation(&q)
    }

    pub fn to_statevector(&self) -> Result<StateVector> {
        let mut s = self.mps.to_statevector()?;
        s.apply_clifford(&self.tableau)?;
        Ok(s)
    }
}

/// State ensembles that can be sampled densely.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ensemble {
    Haar,
    /// Uniform over stabilizer states.
    Stabilizer,
    /// Haar-random product states.
    Product,
    Rmps { chi: usize },
    Cmps { chi: usize },
}

impl Ensemble {
    pub fn label(&self) -> String {
        match self {
            Ensemble::Haar => "haar".into(),
            Ensemble::Stabilizer => "stab".into(),
            Ensemble::Product => "product".into(),
            Ensemble::Rmps { chi } => format!("rmps_chi{chi}"),
            Ensemble::Cmps { chi } => format!("cmps_chi{chi}"),
        }
    }

    /// Bond dimension, where meaningful.
    pub fn chi(&self) -> Option<usize> {
        match self {
            Ensemble::Rmps { chi } | Ensemble::Cmps { chi } => Some(*chi),
            _ => None,
        }
    }

    pub fn sample(&self, n: usize, rng: &mut Rng) -> Result<StateVector> {
        match *self {
            Ensemble::Haar => StateVector::haar(n, rng),
            Ensemble::Stabilizer => {
                StateVector::from_amplitudes(CliffordTableau::random(n, rng).stabilizer_amplitudes()?)
            }
            Ensemble::Product => StateVector::random_product(n, rng),
            Ensemble::Rmps { chi } => MpsState::sample_rmps_obc(n, chi, rng)?.to_statevector(),
            Ensemble::Cmps { chi } => sample_cmps(n, chi, rng)?.to_statevector(),
        }
    }
}

/// `𝓕^(k)_Haar = 1 / binom(d+k−1, k)`.
pub fn haar_frame_potential(d: u64, k: usize) -> f64 {
    1.0 / binomial(d + k as u64 - 1, k as u64)
}

fn check_k(k: usize) -> Result<()> {
    if (1..=4).contains(&k) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("frame potential of order {k} (supported: 1..=4)")))
    }
}

fn check_dense(n: usize) -> Result<()> {
    if n > MAX_SRE_QUBITS {
        return Err(Error::Resource(format!("dense overlaps on {n} qubits (max {MAX_SRE_QUBITS})")));
    }
    Ok(())
}

/// `|⟨ψ'|ψ⟩|²` for `pairs` independent pairs; pair `i` uses child streams
/// `2i` and `2i+1`.
pub fn pair_overlaps(ensemble: Ensemble, n: usize, pairs: usize, rng: &Rng) -> Result<Vec<f64>> {
    check_dense(n)?;
    (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let a = ensemble.sample(n, &mut rng.child(2 * i))?;
            let b = ensemble.sample(n, &mut rng.child(2 * i + 1))?;
            a.fidelity(&b)
        })
        .collect()
}

/// Monte-Carlo `𝓕^(k)` from independent pairs.
pub fn frame_potential_mc(ensemble: Ensemble, n: usize, k: usize, pairs: usize, rng: &Rng) -> Result<EnsembleEstimate> {
    Ok(frame_potentials_mc(ensemble, n, &[k], pairs, rng)?.remove(0))
}

/// Several orders from the same set of pairs.
pub fn frame_potentials_mc(ensemble: Ensemble, n: usize, ks: &[usize], pairs: usize, rng: &Rng) -> Result<Vec<EnsembleEstimate>> {
    for &k in ks {
        check_k(k)?;
    }
    let overlaps = pair_overlaps(ensemble, n, pairs, rng)?;
    ks.iter()
        .map(|&k| {
            let xs: Vec<f64> = overlaps.iter().map(|f| f.powi(k as i32)).collect();
            mean_estimate(&xs, format!("{}_frame_potential_k{k}", ensemble.label()))
        })
        .collect()
}

/// `𝓕^(4)` of the 𝒞MPS ensemble with the Clifford average done exactly.
///
/// For a pair of MPS `φ, φ'` the Clifford-averaged `|⟨ψ'|ψ⟩|⁸` equals
/// `α(m₂(φ))·m₂(φ') + β(m₂(φ))`, so only the MPS factors are sampled.
pub fn cmps_frame_potential4(n: usize, chi: usize, pairs: usize, rng: &Rng) -> Result<EnsembleEstimate> {
    check_dense(n)?;
    let d = (1u64 << n) as f64;
    let xs: Vec<f64> = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let m = MpsState::sample_rmps_obc(n, chi, &mut rng.child(2 * i))?.to_statevector()?.exact_sre(2)?.linear;
            let m2 = MpsState::sample_rmps_obc(n, chi, &mut rng.child(2 * i + 1))?.to_statevector()?.exact_sre(2)?.linear;
            let (alpha, beta) = clifford_4fold_coefficients(d, m);
            Ok(alpha * m2 + beta)
        })
        .collect::<Result<_>>()?;
    mean_estimate(&xs, format!("cmps_chi{chi}_frame_potential_k4_clifford_averaged"))
}

/// All distinct stabilizer states on `n ≤ 2` qubits, from the images of
/// `|0…0⟩` under the enumerated Clifford group (60 states for `n = 2`).
pub fn stabilizer_states(n: usize) -> Result<Vec<StateVector>> {
    let group = CliffordGroup::get(n)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in group.elements() {
        let amps = t.stabilizer_amplitudes()?;
        let pivot = amps.iter().find(|a| a.norm() > 1e-9).copied().expect("normalized");
        let fix = pivot.conj() / pivot.norm();
        // entries are 0, ±1 or ±i times 2^{-r/2}: a 1e-6 grid separates them
        let key: Vec<(i64, i64)> = amps
            .iter()
            .map(|a| {
                let b = a * fix;
                ((b.re * 1e6).round() as i64, (b.im * 1e6).round() as i64)
            })
            .collect();
        if seen.insert(key) {
            out.push(StateVector::from_amplitudes(amps.into_iter().map(|a| a * fix).collect())?);
        }
    }
    Ok(out)
}

/// Exact `𝓕^(k)` of the uniform distribution over `states`.
pub fn frame_potential_exact(states: &[StateVector], k: usize) -> Result<EnsembleEstimate> {
    check_k(k)?;
    if states.is_empty() {
        return Err(Error::Validation("empty ensemble".into()));
    }
    let mut total = 0.0;
    for a in states {
        for b in states {
            total += a.fidelity(b)?.powi(k as i32);
        }
    }
    let m = states.len();
    Ok(EnsembleEstimate::exact(total / (m * m) as f64, m, format!("exhaustive_frame_potential_k{k}")))
}

/// `Δ^(4)` of the 𝒞MPS ensemble from the RMPS deviation `δ^(2)_χ`.
pub fn design_distance_delta4(delta2: f64, d: f64) -> Result<f64> {
    if !(delta2 >= 0.0) {
        return Err(Error::Validation(format!("δ must be non-negative, got {delta2}")));
    }
    if !(d >= 2.0) {
        return Err(Error::InvalidDimension(format!("Hilbert-space dimension {d} < 2")));
    }
    Ok((d + 3.0) / d * delta2 / (4.0 * (d - 1.0) * (d + 4.0)).sqrt())
}

/// `(Δ^(k))² = 𝓕^(k)/𝓕^(k)_H − 1`.
pub fn design_distance_squared(frame_potential: f64, haar: f64) -> f64 {
    frame_potential / haar - 1.0
}

fn check_power_of_four(d: f64) -> Result<()> {
    let m = d.log2();
    if d >= 4.0 && m.fract() == 0.0 && (m as u64) % 2 == 0 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(format!("d = {d} is not a power of 4 (equal halves needed)")))
    }
}

/// Closed-form `Δ²Pur_A` for `d_A = d_B = √d`. The 𝒞MPS value needs `δ^(2)_χ`.
pub fn purity_fluctuation_formula(d: f64, ensemble: Ensemble, delta2: Option<f64>) -> Result<f64> {
    check_power_of_four(d)?;
    let haar = 2.0 * (d - 1.0).powi(2) / ((d + 1.0).powi(2) * (d + 2.0) * (d + 3.0));
    match ensemble {
        Ensemble::Stabilizer => Ok((d - 1.0).powi(2) / ((d + 1.0).powi(2) * (d + 2.0))),
        Ensemble::Haar => Ok(haar),
        Ensemble::Cmps { .. } => {
            let delta = delta2.ok_or_else(|| Error::Validation("𝒞MPS purity fluctuations need δ^(2)_χ".into()))?;
            Ok(haar + (d - 1.0) / (d * (d + 1.0) * (d + 2.0)) * delta)
        }
        other => Err(Error::Unsupported(format!("no closed-form purity fluctuation for {}", other.label()))),
    }
}

/// `E_STAB[Pur_A] = 2√d/(d+1)` for equal halves.
pub fn stabilizer_purity_mean(d: f64) -> Result<f64> {
    check_power_of_four(d)?;
    Ok(2.0 * d.sqrt() / (d + 1.0))
}

/// Purities of the first `N/2` qubits over `samples` draws (child stream `i`).
pub fn purity_samples(ensemble: Ensemble, n: usize, samples: usize, rng: &Rng) -> Result<Vec<f64>> {
    if n % 2 != 0 {
        return Err(Error::InvalidDimension(format!("purity fluctuations need an even register, got {n}")));
    }
    check_dense(n)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| ensemble.sample(n, &mut rng.child(i))?.purity(n / 2))
        .collect()
}

/// Unbiased variance of `Pur_A` with jackknife error.
pub fn purity_fluctuation_mc(ensemble: Ensemble, n: usize, samples: usize, rng: &Rng) -> Result<EnsembleEstimate> {
    let xs = purity_samples(ensemble, n, samples, rng)?;
    variance_estimate(&xs, format!("{}_purity_variance", ensemble.label()))
}

/// Exact mean and variance of `Pur_A` over a uniform finite ensemble.
pub fn purity_moments_exact(states: &[StateVector]) -> Result<(f64, f64)> {
    if states.is_empty() {
        return Err(Error::Validation("empty ensemble".into()));
    }
    let n = states[0].num_qubits();
    let p: Vec<f64> = states.iter().map(|s| s.purity(n / 2)).collect::<Result<_>>()?;
    let m = p.len() as f64;
    let mean = p.iter().sum::<f64>() / m;
    let var = p.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    Ok((mean, var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    #[test]
    fn stabilizer_states_two_qubits() {
        let s = stabilizer_states(2).unwrap();
        assert_eq!(s.len(), 60);
        assert_eq!(stabilizer_states(1).unwrap().len(), 6);
        let f4 = frame_potential_exact(&s, 4).unwrap();
        assert!((f4.mean - 1.0 / 32.0).abs() < 1e-14);
        assert!((f4.mean - 30.0 / (4.0 * 5.0 * 6.0 * 8.0)).abs() < 1e-14);
        // STAB is a 3-design
        for k in 1..=3 {
            assert!((frame_potential_exact(&s, k).unwrap().mean - haar_frame_potential(4, k)).abs() < 1e-14);
        }
        let (mean, var) = purity_moments_exact(&s).unwrap();
        assert!((mean - 0.8).abs() < 1e-14);
        assert!((var - 0.06).abs() < 1e-14);
        for st in &s {
            assert!(st.exact_sre(2).unwrap().entropy.abs() < 1e-12);
        }
    }

    #[test]
    fn single_state_ensemble() {
        let s = vec![StateVector::zero(3).unwrap()];
        assert_eq!(frame_potential_exact(&s, 1).unwrap().mean, 1.0);
        assert!(frame_potential_exact(&s, 5).is_err());
    }

    #[test]
    fn formulas() {
        assert!((purity_fluctuation_formula(4.0, Ensemble::Stabilizer, None).unwrap() - 0.06).abs() < 1e-15);
        assert!((purity_fluctuation_formula(4.0, Ensemble::Haar, None).unwrap() - 18.0 / 1050.0).abs() < 1e-15);
        let haar = purity_fluctuation_formula(16.0, Ensemble::Haar, None).unwrap();
        assert_eq!(purity_fluctuation_formula(16.0, Ensemble::Cmps { chi: 1 }, Some(0.0)).unwrap(), haar);
        assert!(purity_fluctuation_formula(4.0, Ensemble::Cmps { chi: 1 }, None).is_err());
        assert!(purity_fluctuation_formula(8.0, Ensemble::Haar, None).is_err());
        assert!((stabilizer_purity_mean(4.0).unwrap() - 0.8).abs() < 1e-15);
        assert!((stabilizer_purity_mean(16.0).unwrap() - 8.0 / 17.0).abs() < 1e-15);
        let d = 2f64.powi(20);
        assert!((stabilizer_purity_mean(d).unwrap() / (2.0 / d.sqrt()) - 1.0).abs() < 0.01);
        assert!((haar_frame_potential(4, 4) - 1.0 / 35.0).abs() < 1e-15);
    }

    #[test]
    fn delta4() {
        assert_eq!(design_distance_delta4(0.0, 16.0).unwrap(), 0.0);
        let v = design_distance_delta4(3.18518, 16.0).unwrap();
        assert!((v - 0.10918).abs() < 1e-5, "{v}");
        assert!(design_distance_delta4(-0.1, 16.0).is_err());
        // large d: δ/(2d)
        let d = 2f64.powi(30);
        assert!((design_distance_delta4(1.0, d).unwrap() * 2.0 * d - 1.0).abs() < 1e-6);
        // STAB at d = 4 from its exact frame potential
        let stab = design_distance_squared(1.0 / 32.0, haar_frame_potential(4, 4));
        assert!((stab - 3.0 / 32.0).abs() < 1e-14);
    }

    #[test]
    fn plug_in_matches_clifford_channel_identity() {
        // 𝓕 − 𝓕_H = 6d(d+3)δ²/(d⁴ (d²−1)(d+2)(d+4)) reproduces (Δ^(4))²
        for (d, delta) in [(16.0f64, 3.18518), (64.0, 0.7), (4.0, 0.27)] {
            let den = (d * d - 1.0) * (d + 2.0) * (d + 4.0);
            let fh = 24.0 / (d * (d + 1.0) * (d + 2.0) * (d + 3.0));
            let m = 4.0 / (d * (d + 3.0)) + delta / (d * d);
            let (a, b) = clifford_4fold_coefficients(d, m);
            let f = a * m + b;
            let dist = design_distance_delta4(delta, d).unwrap();
            assert!((design_distance_squared(f, fh) - dist * dist).abs() < 1e-12 * (1.0 + dist * dist));
            assert!(den > 0.0);
        }
    }

    #[test]
    fn cmps_pauli_expectation_matches_dense() {
        let mut rng = Rng::new(5);
        for n in 2..=5 {
            let s = sample_cmps(n, 2, &mut rng).unwrap();
            let dense = s.to_statevector().unwrap();
            for _ in 0..10 {
                let p = PauliString::from_masks(n, rng.below(1 << n) as u64, rng.below(1 << n) as u64);
                let a = s.pauli_expectation(&p).unwrap();
                let b = dense.pauli_expectation(&p).unwrap();
                assert!((a - b).abs() < 1e-10, "{n} {p}: {a} vs {b}");
            }
            // Clifford invariance of the SRE
            let m_mps = s.mps.to_statevector().unwrap().exact_sre(2).unwrap().entropy;
            assert!((dense.exact_sre(2).unwrap().entropy - m_mps).abs() < 1e-9);
        }
    }

    #[test]
    fn haar_frame_potential_mc() {
        let est = frame_potential_mc(Ensemble::Haar, 2, 4, 40_000, &Rng::new(3)).unwrap();
        assert!(est.sigmas_from(1.0 / 35.0) < 3.0, "{est:?}");
    }

    #[test]
    fn sampled_stabilizer_states_are_stabilizer() {
        let mut rng = Rng::new(8);
        for n in [1, 3, 6] {
            let s = Ensemble::Stabilizer.sample(n, &mut rng).unwrap();
            assert!(s.exact_sre(2).unwrap().entropy.abs() < 1e-10);
        }
    }

    #[test]
    fn deterministic_sampling() {
        let rng = Rng::new(21);
        let a = purity_samples(Ensemble::Cmps { chi: 2 }, 4, 16, &rng).unwrap();
        let b = purity_samples(Ensemble::Cmps { chi: 2 }, 4, 16, &rng).unwrap();
        assert_eq!(a, b);
    }
}
