//! Gate lists and their JSON form `[{"name": "H", "qubits": [0]}, ...]`.
//!
//! Recognized names are `H`, `S`, `CNOT` (control first) and `T`.
//! `T` is accepted so that doped circuits can be written out, but it is
//! not Clifford; [`Gate::is_clifford`] reports that.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ComplexMatrix, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Cnot(usize, usize),
    T(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRecord {
    name: String,
    qubits: Vec<usize>,
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Cnot(..) => "CNOT",
            Gate::T(_) => "T",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::T(q) => vec![q],
            Gate::Cnot(c, t) => vec![c, t],
        }
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::T(_))
    }

    /// Same gate with qubit labels shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(q + offset),
            Gate::S(q) => Gate::S(q + offset),
            Gate::T(q) => Gate::T(q + offset),
            Gate::Cnot(c, t) => Gate::Cnot(c + offset, t + offset),
        }
    }

    /// Dense matrix on the gate's own qubits, in the order of [`Gate::qubits`].
    pub fn matrix(&self) -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Gate::H(_) => ComplexMatrix::from_row_slice(
                2,
                2,
                &[C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)],
            ),
            Gate::S(_) => ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, C64::new(0.0, 1.0)]),
            Gate::T(_) => ComplexMatrix::from_row_slice(
                2,
                2,
                &[ONE, ZERO, ZERO, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
            ),
            Gate::Cnot(..) => {
                let mut m = ComplexMatrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(1, 1)] = ONE;
                m[(2, 3)] = ONE;
                m[(3, 2)] = ONE;
                m
            }
        }
    }

    fn from_record(r: &GateRecord, pos: usize) -> Result<Gate> {
        let arity = |k: usize| -> Result<()> {
            if r.qubits.len() != k {
                return Err(Error::Parse(format!(
                    "gate {pos} ({}): expected {k} qubit(s), got {}",
                    r.name,
                    r.qubits.len()
                )));
            }
            Ok(())
        };
        match r.name.as_str() {
            "H" => arity(1).map(|_| Gate::H(r.qubits[0])),
            "S" => arity(1).map(|_| Gate::S(r.qubits[0])),
            "T" => arity(1).map(|_| Gate::T(r.qubits[0])),
            "CNOT" => {
                arity(2)?;
                if r.qubits[0] == r.qubits[1] {
                    return Err(Error::Parse(format!("gate {pos}: CNOT control equals target")));
                }
                Ok(Gate::Cnot(r.qubits[0], r.qubits[1]))
            }
            other => Err(Error::Parse(format!("gate {pos}: unknown gate name {other:?}"))),
        }
    }
}

/// Ordered gate list; gates act first to last.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>) -> Self {
        Circuit { gates }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<GateRecord> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let gates = records
            .iter()
            .enumerate()
            .map(|(i, r)| Gate::from_record(r, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit { gates })
    }

    pub fn to_json(&self) -> String {
        let records: Vec<GateRecord> = self
            .gates
            .iter()
            .map(|g| GateRecord {
                name: g.name().to_string(),
                qubits: g.qubits(),
            })
            .collect();
        serde_json::to_string(&records).expect("gate records serialize")
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(Gate::is_clifford)
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_clifford()).count()
    }

    /// Checks every qubit index is below `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            if let Some(&q) = g.qubits().iter().find(|&&q| q >= n) {
                return Err(Error::Validation(format!(
                    "gate {i} ({}) acts on qubit {q} but the register has {n}",
                    g.name()
                )));
            }
        }
        Ok(())
    }

    /// The inverse circuit. Fails for T gates, whose inverse is not in the gate set.
    pub fn inverse(&self) -> Result<Circuit> {
        let mut out = Vec::new();
        for g in self.gates.iter().rev() {
            match *g {
                Gate::H(_) | Gate::Cnot(..) => out.push(*g),
                // S† = S³
                Gate::S(q) => out.extend([Gate::S(q); 3]),
                Gate::T(_) => return Err(Error::Unsupported("inverse of a T gate".into())),
            }
        }
        Ok(Circuit { gates: out })
    }
}
