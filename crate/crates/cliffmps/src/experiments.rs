//! Experiment configurations and the runners behind the CLI. Every runner
//! returns a [`Table`] whose CSV form starts with a comment line carrying
//! the crate version, the seed and the SHA-256 of the configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cooling::{cooling_scan, CoolingObjective, CoolingScan};
use crate::ensemble::{
    cmps_frame_potential4, design_distance_delta4, design_distance_squared, frame_potential_exact, frame_potentials_mc,
    haar_frame_potential, stabilizer_states, Ensemble,
};
use crate::error::{Error, Result};
use crate::mps::MpsState;
use crate::numeric::{haar_unitary, Rng};
use crate::replica::closed_form::haar_magic_scaled;
use crate::replica::delta::{delta_chi, Boundary, Method};
use crate::replica::fit::fit_power_law;
use crate::statevector::MAX_SRE_QUBITS;
use crate::stats::mean_estimate;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    MagicScan,
    Brickwork,
    DesignAudit,
    Cooling,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MagicScan => "magic-scan",
            ExperimentKind::Brickwork => "brickwork",
            ExperimentKind::DesignAudit => "design-audit",
            ExperimentKind::Cooling => "cooling",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    #[default]
    Obc,
    Pbc,
}

impl From<BoundaryMode> for Boundary {
    fn from(b: BoundaryMode) -> Boundary {
        match b {
            BoundaryMode::Obc => Boundary::Open,
            BoundaryMode::Pbc => Boundary::Periodic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodMode {
    #[default]
    Analytic,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveMode {
    #[default]
    SingleCut,
    MaxCut,
}

/// One experiment, as a JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Qubit counts `N`.
    pub sites: Vec<usize>,
    #[serde(default)]
    pub chi: Vec<usize>,
    /// Rényi indices.
    #[serde(default = "default_renyi")]
    pub renyi: Vec<usize>,
    /// Monte-Carlo samples, trajectories or pairs, depending on the experiment.
    #[serde(default)]
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub boundary: BoundaryMode,
    #[serde(default)]
    pub method: MethodMode,
    /// Brickwork layers.
    #[serde(default)]
    pub steps: Option<usize>,
    /// Cooling grid in units of `vt/N`.
    #[serde(default)]
    pub vt_over_n: Vec<f64>,
    /// Brickwork layers per T gate in cooling circuits.
    #[serde(default = "default_v")]
    pub v: usize,
    /// Cooling inputs without T gates.
    #[serde(default)]
    pub stabilizer_inputs: bool,
    #[serde(default)]
    pub objective: ObjectiveMode,
}

fn default_renyi() -> Vec<usize> {
    vec![2]
}

fn default_v() -> usize {
    1
}

impl ExperimentConfig {
    /// Desk-scale defaults for each experiment.
    pub fn default_for(kind: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            experiment: kind,
            sites: vec![],
            chi: vec![],
            renyi: default_renyi(),
            samples: 0,
            seed: 1,
            output: None,
            boundary: BoundaryMode::Obc,
            method: MethodMode::Analytic,
            steps: None,
            vt_over_n: vec![],
            v: 1,
            stabilizer_inputs: false,
            objective: ObjectiveMode::SingleCut,
        };
        match kind {
            ExperimentKind::MagicScan => ExperimentConfig {
                sites: vec![64, 128, 256, 512],
                chi: vec![8, 16, 32, 64, 128, 256],
                renyi: vec![2, 3],
                ..base
            },
            ExperimentKind::Brickwork => ExperimentConfig {
                sites: vec![8],
                chi: vec![2, 4, 8, 16],
                samples: 100,
                steps: Some(24),
                ..base
            },
            ExperimentKind::DesignAudit => ExperimentConfig {
                sites: vec![2, 3],
                chi: vec![1, 2],
                samples: 20_000,
                ..base
            },
            ExperimentKind::Cooling => ExperimentConfig {
                sites: vec![8],
                samples: 50,
                vt_over_n: vec![0.0, 0.25, 0.5, 1.0, 1.5, 2.0],
                ..base
            },
        }
    }

    /// Parses a JSON document; syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("config serializes"));
        digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.experiment;
        if self.sites.is_empty() {
            return Err(Error::config("sites", "must be nonempty"));
        }
        for (i, &n) in self.sites.iter().enumerate() {
            if n < 2 {
                return Err(Error::config(format!("sites[{i}]"), format!("{n} < 2")));
            }
        }
        let uses_chi = kind != ExperimentKind::Cooling;
        if uses_chi && self.chi.is_empty() {
            return Err(Error::config("chi", "must be nonempty"));
        }
        for (i, &c) in self.chi.iter().enumerate() {
            if !c.is_power_of_two() {
                return Err(Error::config(format!("chi[{i}]"), format!("{c} is not a power of two")));
            }
        }
        if self.renyi.is_empty() {
            return Err(Error::config("renyi", "must be nonempty"));
        }
        for (i, &n) in self.renyi.iter().enumerate() {
            if n != 2 && n != 3 {
                return Err(Error::config(format!("renyi[{i}]"), format!("index {n} (supported: 2, 3)")));
            }
        }
        let dense_limit = |what: &str, limit: usize| -> Result<()> {
            for (i, &n) in self.sites.iter().enumerate() {
                if n > limit {
                    return Err(Error::config(format!("sites[{i}]"), format!("{what} needs N ≤ {limit}, got {n}")));
                }
            }
            Ok(())
        };
        let min_samples = |min: usize| -> Result<()> {
            if self.samples < min {
                return Err(Error::config("samples", format!("need at least {min}, got {}", self.samples)));
            }
            Ok(())
        };
        match kind {
            ExperimentKind::MagicScan => {
                if self.method == MethodMode::Mc {
                    if self.boundary == BoundaryMode::Pbc {
                        return Err(Error::config("method", "Monte Carlo is only available with obc"));
                    }
                    dense_limit("Monte Carlo", MAX_SRE_QUBITS)?;
                    min_samples(2)?;
                }
            }
            ExperimentKind::Brickwork => {
                dense_limit("exact SRE", MAX_SRE_QUBITS)?;
                min_samples(2)?;
                if self.steps == Some(0) {
                    return Err(Error::config("steps", "must be positive"));
                }
            }
            ExperimentKind::DesignAudit => {
                dense_limit("the design audit", 8)?;
                min_samples(2)?;
            }
            ExperimentKind::Cooling => {
                dense_limit("dense cooling", 12)?;
                min_samples(2)?;
                if self.vt_over_n.is_empty() {
                    return Err(Error::config("vt_over_n", "must be nonempty"));
                }
                for (i, &x) in self.vt_over_n.iter().enumerate() {
                    if !(x >= 0.0) || !x.is_finite() {
                        return Err(Error::config(format!("vt_over_n[{i}]"), format!("{x} is not a finite non-negative number")));
                    }
                }
                if self.v == 0 {
                    return Err(Error::config("v", "must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// Rows of string cells with a header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub comment: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(cfg: &ExperimentConfig, columns: Vec<&'static str>) -> Self {
        Table {
            comment: format!(
                "cliffmps {VERSION} experiment={} seed={} config_sha256={}",
                cfg.experiment.name(),
                cfg.seed,
                cfg.hash()
            ),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.comment, self.columns.join(","));
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::MagicScan => run_magic_scan(cfg),
        ExperimentKind::Brickwork => run_brickwork(cfg),
        ExperimentKind::DesignAudit => run_design_audit(cfg),
        ExperimentKind::Cooling => run_cooling(cfg),
    }
}

/// `δ^(n)_χ` over the grid, a power-law fit in `χ` per `(N, n)` and,
/// with three or more `N`, a fit of those coefficients against `N`.
pub fn run_magic_scan(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let mut table = Table::new(cfg, vec!["kind", "N", "chi", "n", "boundary", "delta", "se", "exponent", "coefficient", "residual"]);
    let boundary: Boundary = cfg.boundary.into();
    let method = match cfg.method {
        MethodMode::Analytic => Method::Analytic,
        MethodMode::Mc => Method::MonteCarlo { samples: cfg.samples },
    };
    let rng = Rng::new(cfg.seed);
    for &n in &cfg.renyi {
        let mut coefficients = Vec::new();
        for (ni, &sites) in cfg.sites.iter().enumerate() {
            let mut points = Vec::new();
            for (ci, &chi) in cfg.chi.iter().enumerate() {
                let child = rng.child(((n * 1000 + ni) * 1000 + ci) as u64);
                let d = delta_chi(sites, chi, n, boundary, method, &child)?;
                points.push((chi as f64, d.delta));
                table.rows.push(vec![
                    "point".into(),
                    sites.to_string(),
                    chi.to_string(),
                    n.to_string(),
                    boundary.label().into(),
                    num(d.delta),
                    opt(d.std_error),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
            }
            if points.len() >= 3 {
                if let Ok(fit) = fit_power_law(&points) {
                    coefficients.push((sites as f64, fit.coefficient));
                    table.rows.push(vec![
                        "fit_chi".into(),
                        sites.to_string(),
                        String::new(),
                        n.to_string(),
                        boundary.label().into(),
                        String::new(),
                        String::new(),
                        num(fit.exponent),
                        num(fit.coefficient),
                        num(fit.residual),
                    ]);
                }
            }
        }
        if coefficients.len() >= 3 {
            if let Ok(fit) = fit_power_law(&coefficients) {
                table.rows.push(vec![
                    "fit_n".into(),
                    String::new(),
                    String::new(),
                    n.to_string(),
                    boundary.label().into(),
                    String::new(),
                    String::new(),
                    num(fit.exponent),
                    num(fit.coefficient),
                    num(fit.residual),
                ]);
            }
        }
    }
    Ok(table)
}

/// Per-layer observables of one brickwork trajectory at fixed `χ`:
/// `d^n m_n − d^n E_Haar[m_n]` for each index in `renyi` and the largest
/// cut entropy (nats). Entry 0 is the initial product state.
#[derive(Clone, Debug, PartialEq)]
pub struct BrickworkTrace {
    pub delta: Vec<Vec<f64>>,
    pub max_entropy: Vec<f64>,
}

/// Random product state evolved by `steps` brickwork layers of Haar
/// two-qubit gates, truncating every bond to `chi`. The gate stream
/// depends only on `rng`, so traces at different `χ` share their gates.
pub fn brickwork_trajectory(n_sites: usize, chi: usize, renyi: &[usize], steps: usize, rng: &mut Rng) -> Result<BrickworkTrace> {
    let qubits: Vec<_> = (0..n_sites)
        .map(|_| {
            let v = [rng.complex_normal(), rng.complex_normal()];
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            [v[0] / norm, v[1] / norm]
        })
        .collect();
    let mut mps = MpsState::product(&qubits)?;
    let x = 0.5f64.powi(n_sites as i32);
    let haar: Vec<f64> = renyi.iter().map(|&n| haar_magic_scaled(n, x)).collect::<Result<_>>()?;
    let mut trace = BrickworkTrace { delta: vec![Vec::with_capacity(steps + 1); renyi.len()], max_entropy: Vec::with_capacity(steps + 1) };
    let record = |mps: &MpsState, trace: &mut BrickworkTrace| -> Result<()> {
        let psi = mps.to_statevector()?;
        for (j, &n) in renyi.iter().enumerate() {
            let scale = 2f64.powi((n * n_sites) as i32);
            trace.delta[j].push(scale * psi.exact_sre(n)?.linear - haar[j]);
        }
        trace.max_entropy.push(mps.entanglement_profile()?.max_entropy);
        Ok(())
    };
    record(&mps, &mut trace)?;
    for layer in 0..steps {
        let mut q = layer % 2;
        while q + 1 < n_sites {
            let u = haar_unitary(4, rng)?;
            mps.apply_two_qubit_gate(&u, q, chi, 1e-14)?;
            q += 2;
        }
        record(&mps, &mut trace)?;
    }
    Ok(trace)
}

/// Mean `δ` and max entropy per layer and `χ`, then late-time plateaus
/// (second half of the layers, averaged per trajectory first) with a
/// power-law fit of the plateau `δ` against `χ`.
pub fn run_brickwork(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let mut table = Table::new(cfg, vec!["kind", "N", "t", "chi", "n", "delta", "se", "max_entropy", "max_entropy_se", "exponent", "coefficient"]);
    let rng = Rng::new(cfg.seed);
    for (ni, &sites) in cfg.sites.iter().enumerate() {
        let steps = cfg.steps.unwrap_or(3 * sites);
        let start = steps.div_ceil(2).max(1);
        let mut plateaus: Vec<Vec<(f64, f64)>> = vec![Vec::new(); cfg.renyi.len()];
        for &chi in &cfg.chi {
            let traces: Vec<BrickworkTrace> = (0..cfg.samples as u64)
                .into_par_iter()
                .map(|j| brickwork_trajectory(sites, chi, &cfg.renyi, steps, &mut rng.child(ni as u64).child(j)))
                .collect::<Result<_>>()?;
            for t in 0..=steps {
                let ent: Vec<f64> = traces.iter().map(|tr| tr.max_entropy[t]).collect();
                let e = mean_estimate(&ent, "max_entropy")?;
                for (j, &n) in cfg.renyi.iter().enumerate() {
                    let ds: Vec<f64> = traces.iter().map(|tr| tr.delta[j][t]).collect();
                    let d = mean_estimate(&ds, "delta")?;
                    table.rows.push(vec![
                        "layer".into(),
                        sites.to_string(),
                        t.to_string(),
                        chi.to_string(),
                        n.to_string(),
                        num(d.mean),
                        num(d.std_error),
                        num(e.mean),
                        num(e.std_error),
                        String::new(),
                        String::new(),
                    ]);
                }
            }
            let late = |xs: &[f64]| xs[start..].iter().sum::<f64>() / (steps + 1 - start) as f64;
            let ent: Vec<f64> = traces.iter().map(|tr| late(&tr.max_entropy)).collect();
            let e = mean_estimate(&ent, "plateau_max_entropy")?;
            for (j, &n) in cfg.renyi.iter().enumerate() {
                let ds: Vec<f64> = traces.iter().map(|tr| late(&tr.delta[j])).collect();
                let d = mean_estimate(&ds, "plateau_delta")?;
                plateaus[j].push((chi as f64, d.mean));
                table.rows.push(vec![
                    "plateau".into(),
                    sites.to_string(),
                    String::new(),
                    chi.to_string(),
                    n.to_string(),
                    num(d.mean),
                    num(d.std_error),
                    num(e.mean),
                    num(e.std_error),
                    String::new(),
                    String::new(),
                ]);
            }
        }
        for (j, &n) in cfg.renyi.iter().enumerate() {
            if plateaus[j].len() >= 3 {
                if let Ok(fit) = fit_power_law(&plateaus[j]) {
                    table.rows.push(vec![
                        "fit_chi".into(),
                        sites.to_string(),
                        String::new(),
                        String::new(),
                        n.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        num(fit.exponent),
                        num(fit.coefficient),
                    ]);
                }
            }
        }
    }
    Ok(table)
}

/// Frame potentials `k = 1..4` for Haar, stabilizer and 𝒞MPS ensembles,
/// with `Δ^(4)` of 𝒞MPS both from the chain value of `δ^(2)_χ` and from
/// the Clifford-averaged pair estimate.
pub fn run_design_audit(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let mut table = Table::new(cfg, vec!["ensemble", "quantity", "N", "chi", "k", "estimate", "se", "samples", "haar", "seed"]);
    let rng = Rng::new(cfg.seed);
    let ks = [1, 2, 3, 4];
    for (ni, &sites) in cfg.sites.iter().enumerate() {
        let d = 1u64 << sites;
        let base = rng.child(ni as u64);
        let mut push = |ens: String, quantity: &str, chi: Option<usize>, k: usize, est: f64, se: f64, samples: usize| {
            table.rows.push(vec![
                ens,
                quantity.into(),
                sites.to_string(),
                chi.map(|c| c.to_string()).unwrap_or_default(),
                k.to_string(),
                num(est),
                num(se),
                samples.to_string(),
                num(haar_frame_potential(d, k)),
                cfg.seed.to_string(),
            ]);
        };
        for (i, e) in frame_potentials_mc(Ensemble::Haar, sites, &ks, cfg.samples, &base.child(0))?.into_iter().enumerate() {
            push("haar".into(), "frame_potential", None, ks[i], e.mean, e.std_error, e.samples);
        }
        let stab = if sites <= 2 {
            let states = stabilizer_states(sites)?;
            ks.iter().map(|&k| frame_potential_exact(&states, k)).collect::<Result<Vec<_>>>()?
        } else {
            frame_potentials_mc(Ensemble::Stabilizer, sites, &ks, cfg.samples, &base.child(1))?
        };
        for (i, e) in stab.into_iter().enumerate() {
            push("stab".into(), "frame_potential", None, ks[i], e.mean, e.std_error, e.samples);
        }
        for (ci, &chi) in cfg.chi.iter().enumerate() {
            let ens = Ensemble::Cmps { chi };
            let stream = base.child(2 + ci as u64);
            for (i, e) in frame_potentials_mc(ens, sites, &ks, cfg.samples, &stream.child(0))?.into_iter().enumerate() {
                push(ens.label(), "frame_potential", Some(chi), ks[i], e.mean, e.std_error, e.samples);
            }
            let avg = cmps_frame_potential4(sites, chi, cfg.samples, &stream.child(1))?;
            push(ens.label(), "frame_potential_clifford_averaged", Some(chi), 4, avg.mean, avg.std_error, avg.samples);
            let fh = haar_frame_potential(d, 4);
            let sq = design_distance_squared(avg.mean, fh);
            push(ens.label(), "delta4_squared_pairs", Some(chi), 4, sq, avg.std_error / fh, avg.samples);
            let delta2 = delta_chi(sites, chi, 2, Boundary::Open, Method::Analytic, &stream)?.delta;
            let plug = design_distance_delta4(delta2.max(0.0), d as f64)?;
            push(ens.label(), "delta4_plugin", Some(chi), 4, plug, 0.0, 0);
        }
    }
    Ok(table)
}

pub fn run_cooling(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    let mut table = Table::new(
        cfg,
        vec!["N", "vt_over_n", "steps", "t_count", "trajectories", "input_density", "input_se", "cooled_density", "cooled_se", "disentangled_fraction"],
    );
    let scan = CoolingScan {
        v: cfg.v,
        t_gates: !cfg.stabilizer_inputs,
        objective: match cfg.objective {
            ObjectiveMode::SingleCut => CoolingObjective::SingleCut,
            ObjectiveMode::MaxCut => CoolingObjective::MaxCut,
        },
        sweeps: cfg.steps,
    };
    for r in cooling_scan(&cfg.sites, &cfg.vt_over_n, cfg.samples, &scan, &Rng::new(cfg.seed))? {
        table.rows.push(vec![
            r.n.to_string(),
            num(r.vt_over_n),
            r.steps.to_string(),
            r.t_count.to_string(),
            r.trajectories.to_string(),
            num(r.input_density),
            num(r.input_se),
            num(r.cooled_density),
            num(r.cooled_se),
            num(r.disentangled_fraction),
        ]);
    }
    Ok(table)
}
