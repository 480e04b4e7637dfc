//! Entanglement cooling of T-doped random Clifford states: greedy sweeps
//! that pick, bond by bond, the two-qubit Clifford gate minimizing the cut
//! entropy.

use std::sync::OnceLock;

use rand::RngCore;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::clifford::{CliffordGroup, CliffordTableau};
use crate::error::{Error, Result};
use crate::numeric::{ComplexMatrix, Rng};
use crate::statevector::{StateVector, MAX_QUBITS};
use crate::stats::mean_estimate;

/// Candidates whose objective is within this of the best are ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Brickwork Clifford circuit with one T gate per time step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DopedCircuitSpec {
    pub n: usize,
    /// Brickwork layers per time step.
    pub v: usize,
    /// Number of time steps `t`.
    pub steps: usize,
    /// Insert the T gate at the end of each step; without it the output is a
    /// stabilizer state of the same depth.
    pub t_gates: bool,
    pub seed: u64,
}

impl DopedCircuitSpec {
    pub fn t_count(&self) -> usize {
        if self.t_gates {
            self.steps
        } else {
            0
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config("n", format!("need at least 2 qubits, got {}", self.n)));
        }
        if self.n > MAX_QUBITS {
            return Err(Error::Resource(format!("dense state on {} qubits (max {MAX_QUBITS})", self.n)));
        }
        if self.v == 0 {
            return Err(Error::config("v", "at least one layer per step"));
        }
        Ok(())
    }
}

/// The doped circuit as a gate list. Two-qubit gates are uniform over the
/// 11520-element group and written as their generating words.
pub fn doped_circuit(spec: &DopedCircuitSpec) -> Result<Circuit> {
    spec.validate()?;
    let group = CliffordGroup::get(2)?;
    let mut rng = Rng::new(spec.seed);
    let mut gates = Vec::new();
    let mut layer = 0;
    for _ in 0..spec.steps {
        for _ in 0..spec.v {
            let mut q = layer % 2;
            while q + 1 < spec.n {
                let idx = rng.below(group.len());
                gates.extend(group.word(idx).iter().map(|g| g.shifted(q)));
                q += 2;
            }
            layer += 1;
        }
        if spec.t_gates {
            gates.push(Gate::T(rng.below(spec.n)));
        }
    }
    Ok(Circuit::new(gates))
}

pub fn build_doped_state(spec: &DopedCircuitSpec) -> Result<StateVector> {
    let mut s = StateVector::zero(spec.n)?;
    s.apply_circuit(&doped_circuit(spec)?)?;
    Ok(s)
}

/// What each bond update minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoolingObjective {
    /// Entropy of the cut at the bond being updated.
    #[default]
    SingleCut,
    /// Largest entropy over all cuts.
    MaxCut,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoolingMove {
    pub sweep: usize,
    /// The gate acts on qubits `bond` and `bond + 1`.
    pub bond: usize,
    /// Index into the enumerated two-qubit group (0 is the identity).
    pub element: usize,
    pub before: f64,
    pub after: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoolingReport {
    pub n: usize,
    /// Entropies in bits at every cut of the input state.
    pub input_entropies: Vec<f64>,
    /// Max-over-cuts entropy (bits) after each sweep.
    pub sweep_max_entropy: Vec<f64>,
    pub final_entropies: Vec<f64>,
    /// Non-identity moves, in order.
    pub moves: Vec<CoolingMove>,
    pub circuit: Circuit,
    pub final_state: StateVector,
}

impl CoolingReport {
    pub fn input_max(&self) -> f64 {
        self.input_entropies.iter().copied().fold(0.0, f64::max)
    }

    pub fn final_max(&self) -> f64 {
        self.final_entropies.iter().copied().fold(0.0, f64::max)
    }

    pub fn input_density(&self) -> f64 {
        self.input_max() / self.n as f64
    }

    pub fn final_density(&self) -> f64 {
        self.final_max() / self.n as f64
    }

    /// Number of sweeps after which the max entropy first fell below `threshold`.
    pub fn sweeps_to(&self, threshold: f64) -> Option<usize> {
        if self.input_max() < threshold {
            return Some(0);
        }
        self.sweep_max_entropy.iter().position(|&s| s < threshold).map(|i| i + 1)
    }
}

fn bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

fn entropies_bits(s: &StateVector) -> Result<Vec<f64>> {
    Ok(s.entropy_profile()?.into_iter().map(bits).collect())
}

/// Lowest-index representative of each coset `L·g` of the local subgroup
/// `L = 𝒞ℓ(2) ⊗ 𝒞ℓ(2)`. Every cut entropy is invariant under `L`, so the
/// representatives carry the full search.
pub fn local_coset_representatives() -> Result<&'static [usize]> {
    static REPS: OnceLock<Vec<usize>> = OnceLock::new();
    if let Some(r) = REPS.get() {
        return Ok(r);
    }
    let group = CliffordGroup::get(2)?;
    let one = CliffordGroup::get(1)?;
    let mut local = Vec::with_capacity(576);
    for a in 0..one.len() {
        for b in 0..one.len() {
            let mut t = CliffordTableau::identity(2);
            for &g in one.word(a) {
                t.apply_gate(g)?;
            }
            for g in one.word(b) {
                t.apply_gate(g.shifted(1))?;
            }
            local.push(t);
        }
    }
    let mut assigned = vec![false; group.len()];
    let mut reps = Vec::new();
    for (i, g) in group.elements().iter().enumerate() {
        if assigned[i] {
            continue;
        }
        reps.push(i);
        for h in &local {
            let j = group
                .index_of(&g.then(h)?)
                .ok_or_else(|| Error::NumericalConsistency("coset element outside the group".into()))?;
            assigned[j] = true;
        }
    }
    Ok(REPS.get_or_init(|| reps))
}

fn objective(s: &StateVector, bond: usize, kind: CoolingObjective) -> Result<f64> {
    match kind {
        CoolingObjective::SingleCut => s.entanglement_entropy(bond + 1),
        CoolingObjective::MaxCut => s.max_entropy(),
    }
}

/// Best candidate at `bond`: the smallest objective, ties (within
/// [`TIE_TOLERANCE`]) going to the lowest group index.
fn best_move(s: &StateVector, bond: usize, kind: CoolingObjective, candidates: &[usize], dense: &[ComplexMatrix]) -> Result<(usize, f64, StateVector)> {
    let scored: Vec<(usize, f64)> = candidates
        .iter()
        .map(|&idx| {
            let mut t = s.clone();
            t.apply_2q(bond, bond + 1, &dense[idx])?;
            Ok((idx, objective(&t, bond, kind)?))
        })
        .collect::<Result<_>>()?;
    let min = scored.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let (idx, val) = scored
        .into_iter()
        .filter(|c| c.1 <= min + TIE_TOLERANCE)
        .min_by_key(|c| c.0)
        .expect("non-empty candidate list");
    let mut t = s.clone();
    t.apply_2q(bond, bond + 1, &dense[idx])?;
    Ok((idx, val, t))
}

fn cool_with(state: &StateVector, sweeps: usize, kind: CoolingObjective, candidates: &[usize]) -> Result<CoolingReport> {
    let n = state.num_qubits();
    if n < 2 {
        return Err(Error::InvalidDimension("cooling needs at least 2 qubits".into()));
    }
    let group = CliffordGroup::get(2)?;
    let dense = group.dense();
    let input_entropies = entropies_bits(state)?;
    let mut s = state.clone();
    let mut moves = Vec::new();
    let mut gates = Vec::new();
    let mut sweep_max_entropy = Vec::with_capacity(sweeps);
    for sweep in 0..sweeps {
        let mut changed = false;
        for bond in 0..n - 1 {
            let before = objective(&s, bond, kind)?;
            let (idx, after, next) = best_move(&s, bond, kind, candidates, dense)?;
            if after > before + TIE_TOLERANCE {
                return Err(Error::NumericalConsistency(format!(
                    "cooling move raised the objective at bond {bond}: {before} -> {after}"
                )));
            }
            if idx != 0 {
                changed = true;
                s = next;
                gates.extend(group.word(idx).iter().map(|g| g.shifted(bond)));
                moves.push(CoolingMove { sweep, bond, element: idx, before: bits(before), after: bits(after) });
            }
        }
        sweep_max_entropy.push(bits(s.max_entropy()?));
        if !changed {
            // a sweep without moves leaves the state fixed for good
            let last = *sweep_max_entropy.last().expect("pushed");
            sweep_max_entropy.resize(sweeps, last);
            break;
        }
    }
    Ok(CoolingReport {
        n,
        input_entropies,
        sweep_max_entropy,
        final_entropies: entropies_bits(&s)?,
        moves,
        circuit: Circuit::new(gates),
        final_state: s,
    })
}

/// Greedy left-to-right cooling for `sweeps` sweeps.
pub fn cool(state: &StateVector, sweeps: usize, kind: CoolingObjective) -> Result<CoolingReport> {
    cool_with(state, sweeps, kind, local_coset_representatives()?)
}

/// The same search over all 11520 elements.
pub fn cool_brute_force(state: &StateVector, sweeps: usize, kind: CoolingObjective) -> Result<CoolingReport> {
    let all: Vec<usize> = (0..CliffordGroup::get(2)?.len()).collect();
    cool_with(state, sweeps, kind, &all)
}

/// One grid point of a cooling scan; entropy densities are in bits per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct CoolingRow {
    pub n: usize,
    pub vt_over_n: f64,
    pub steps: usize,
    pub t_count: usize,
    pub trajectories: usize,
    pub input_density: f64,
    pub input_se: f64,
    pub cooled_density: f64,
    pub cooled_se: f64,
    /// Fraction of trajectories whose cooled max entropy is below 1e-8.
    pub disentangled_fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoolingScan {
    pub v: usize,
    pub t_gates: bool,
    pub objective: CoolingObjective,
    /// Sweeps per trajectory; `None` means `N`.
    pub sweeps: Option<usize>,
}

impl Default for CoolingScan {
    fn default() -> Self {
        CoolingScan { v: 1, t_gates: true, objective: CoolingObjective::SingleCut, sweeps: None }
    }
}

/// Seed of trajectory `j` at grid point `(ni, gi)`.
fn trajectory_seed(rng: &Rng, ni: usize, gi: usize, j: usize) -> u64 {
    rng.child(ni as u64).child(gi as u64).child(j as u64).next_u64()
}

/// Mean input and cooled entropy density over `trajectories` doped states
/// for every `N` and `vt/N`. Steps are `round(vt/N · N / v)`.
pub fn cooling_scan(ns: &[usize], vt_over_n: &[f64], trajectories: usize, scan: &CoolingScan, rng: &Rng) -> Result<Vec<CoolingRow>> {
    if trajectories < 2 {
        return Err(Error::config("trajectories", "need at least 2"));
    }
    let mut rows = Vec::new();
    for (ni, &n) in ns.iter().enumerate() {
        for (gi, &x) in vt_over_n.iter().enumerate() {
            if !(x >= 0.0) {
                return Err(Error::config("vt_over_n", format!("negative grid point {x}")));
            }
            let steps = (x * n as f64 / scan.v as f64).round() as usize;
            let sweeps = scan.sweeps.unwrap_or(n);
            let reports: Vec<CoolingReport> = (0..trajectories)
                .into_par_iter()
                .map(|j| {
                    let spec = DopedCircuitSpec { n, v: scan.v, steps, t_gates: scan.t_gates, seed: trajectory_seed(rng, ni, gi, j) };
                    cool(&build_doped_state(&spec)?, sweeps, scan.objective)
                })
                .collect::<Result<_>>()?;
            let input: Vec<f64> = reports.iter().map(CoolingReport::input_density).collect();
            let cooled: Vec<f64> = reports.iter().map(CoolingReport::final_density).collect();
            let ie = mean_estimate(&input, "input_density")?;
            let ce = mean_estimate(&cooled, "cooled_density")?;
            let done = reports.iter().filter(|r| r.final_max() < 1e-8).count();
            rows.push(CoolingRow {
                n,
                vt_over_n: x,
                steps,
                t_count: if scan.t_gates { steps } else { 0 },
                trajectories,
                input_density: ie.mean,
                input_se: ie.std_error,
                cooled_density: ce.mean,
                cooled_se: ce.std_error,
                disentangled_fraction: done as f64 / trajectories as f64,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, steps: usize, t_gates: bool, seed: u64) -> DopedCircuitSpec {
        DopedCircuitSpec { n, v: 1, steps, t_gates, seed }
    }

    #[test]
    fn twenty_cosets() {
        let reps = local_coset_representatives().unwrap();
        assert_eq!(reps.len(), 20);
        assert_eq!(reps[0], 0);
    }

    #[test]
    fn dense_group_element_matches_word() {
        let group = CliffordGroup::get(2).unwrap();
        let mut rng = Rng::new(2);
        let base = StateVector::haar(4, &mut rng).unwrap();
        for idx in [1, 77, 5000, 11519] {
            let mut a = base.clone();
            a.apply_2q(1, 2, &group.dense()[idx]).unwrap();
            let mut b = base.clone();
            b.apply_circuit(&Circuit::new(group.word(idx).iter().map(|g| g.shifted(1)).collect())).unwrap();
            assert!((a.fidelity(&b).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn doped_states() {
        let s = build_doped_state(&spec(6, 6, false, 1)).unwrap();
        assert!(s.exact_sre(2).unwrap().entropy.abs() < 1e-10);
        let d = build_doped_state(&DopedCircuitSpec { n: 6, v: 1, steps: 3, t_gates: true, seed: 4 }).unwrap();
        assert!(d.exact_sre(2).unwrap().entropy > 1e-3);
        assert_eq!(build_doped_state(&spec(6, 3, true, 4)).unwrap(), d);
        assert_eq!(doped_circuit(&spec(6, 3, true, 4)).unwrap().t_count(), 3);
        assert!(build_doped_state(&DopedCircuitSpec { n: 6, v: 0, steps: 1, t_gates: true, seed: 0 }).is_err());
    }

    #[test]
    fn zero_state_needs_no_moves() {
        let r = cool(&StateVector::zero(5).unwrap(), 5, CoolingObjective::SingleCut).unwrap();
        assert!(r.moves.is_empty());
        assert!(r.circuit.gates.is_empty());
        assert!(r.sweep_max_entropy.iter().all(|&s| s == 0.0));
        assert_eq!(r.sweeps_to(1e-8), Some(0));
    }

    #[test]
    fn coset_search_matches_brute_force() {
        for (seed, kind) in [(3, CoolingObjective::SingleCut), (5, CoolingObjective::MaxCut)] {
            let s = build_doped_state(&spec(4, 3, true, seed)).unwrap();
            let fast = cool(&s, 2, kind).unwrap();
            let slow = cool_brute_force(&s, 2, kind).unwrap();
            assert_eq!(fast.moves.len(), slow.moves.len());
            for (a, b) in fast.moves.iter().zip(&slow.moves) {
                assert_eq!((a.bond, a.element), (b.bond, b.element));
                assert!((a.after - b.after).abs() < 1e-10);
            }
            assert!((fast.final_state.fidelity(&slow.final_state).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn stabilizer_states_cool_to_product() {
        for seed in 0..5 {
            let s = build_doped_state(&spec(6, 6, false, seed)).unwrap();
            let r = cool(&s, 6, CoolingObjective::SingleCut).unwrap();
            assert!(r.final_max() < 1e-8, "seed {seed}: {:?}", r.sweep_max_entropy);
        }
    }

    #[test]
    fn report_invariants() {
        let s = build_doped_state(&spec(6, 4, true, 9)).unwrap();
        let r = cool(&s, 6, CoolingObjective::SingleCut).unwrap();
        for m in &r.moves {
            assert!(m.after <= m.before + 1e-9);
        }
        // circuit reproduces the final state, and its inverse undoes it
        let mut fwd = s.clone();
        fwd.apply_circuit(&r.circuit).unwrap();
        let ent = entropies_bits(&fwd).unwrap();
        for (a, b) in ent.iter().zip(&r.final_entropies) {
            assert!((a - b).abs() < 1e-9);
        }
        let mut back = r.final_state.clone();
        back.apply_circuit(&r.circuit.inverse().unwrap()).unwrap();
        assert!((back.fidelity(&s).unwrap() - 1.0).abs() < 1e-9);
        // Clifford moves preserve magic
        let m_in = s.exact_sre(2).unwrap().entropy;
        let m_out = r.final_state.exact_sre(2).unwrap().entropy;
        assert!((m_in - m_out).abs() < 1e-9);
    }

    #[test]
    fn scan_is_reproducible() {
        let rng = Rng::new(17);
        let scan = CoolingScan::default();
        let a = cooling_scan(&[4], &[0.0, 1.0], 4, &scan, &rng).unwrap();
        let b = cooling_scan(&[4], &[0.0, 1.0], 4, &scan, &rng).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].cooled_density, 0.0);
        assert_eq!(a[0].input_density, 0.0);
    }
}
