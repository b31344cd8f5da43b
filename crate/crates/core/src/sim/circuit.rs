use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use crate::error::{invalid, resource, Result};
use crate::fourier::BooleanFunction;
use crate::scalar::Scalar;

/// Default qubit cap for [`simulate_reference`].
pub const DEFAULT_REFERENCE_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Cnot,
    Cz,
    Swap,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn single_qubit_matrix<T: Scalar>(self) -> Option<[[Complex<T>; 2]; 2]> {
        let c = |re: f64, im: f64| Complex::new(T::of(re), T::of(im));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Some(match self {
            GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            GateKind::Y => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
            GateKind::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
            GateKind::S => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
            GateKind::Sdg => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]],
            GateKind::T => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(h, h)]],
            _ => return None,
        })
    }

    /// Matrix in the local basis `bit(first) + 2·bit(second)`; `first` is the control of CNOT.
    pub fn two_qubit_matrix<T: Scalar>(self) -> Option<[[Complex<T>; 4]; 4]> {
        let perm = |p: [usize; 4]| {
            std::array::from_fn(|r| {
                std::array::from_fn(|c| {
                    Complex::new(if p[c] == r { T::one() } else { T::zero() }, T::zero())
                })
            })
        };
        Some(match self {
            // |c=1,t=0⟩ (index 1) <-> |c=1,t=1⟩ (index 3)
            GateKind::Cnot => perm([0, 3, 2, 1]),
            GateKind::Swap => perm([0, 2, 1, 3]),
            GateKind::Cz => {
                let mut m = perm([0, 1, 2, 3]);
                m[3][3] = -m[3][3];
                m
            }
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub gate: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(gate: GateKind, qubits: Vec<usize>) -> Self {
        Self { gate, qubits }
    }
}

/// One time step of a circuit. Every layer is followed by a depolarizing layer in simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layer", rename_all = "snake_case")]
pub enum Layer {
    /// Gates on pairwise disjoint qubits.
    Unitary { gates: Vec<Gate> },
    /// `|x⟩ ↦ f(x)|x⟩` on the full register.
    PhaseOracle { function: BooleanFunction },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr", into = "CircuitRepr")]
pub struct NoisyCircuit {
    n: usize,
    layers: Vec<Layer>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    n: usize,
    layers: Vec<Layer>,
}

impl TryFrom<CircuitRepr> for NoisyCircuit {
    type Error = crate::Error;

    fn try_from(repr: CircuitRepr) -> Result<Self> {
        Self::new(repr.n, repr.layers)
    }
}

impl From<NoisyCircuit> for CircuitRepr {
    fn from(c: NoisyCircuit) -> Self {
        Self {
            n: c.n,
            layers: c.layers,
        }
    }
}

impl NoisyCircuit {
    pub fn new(n: usize, layers: Vec<Layer>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("circuit needs at least one qubit"));
        }
        for (index, layer) in layers.iter().enumerate() {
            match layer {
                Layer::Unitary { gates } => {
                    let mut used = vec![false; n];
                    for gate in gates {
                        if gate.qubits.len() != gate.gate.arity() {
                            return Err(invalid(format!(
                                "layer {index}: {:?} takes {} qubits, got {}",
                                gate.gate,
                                gate.gate.arity(),
                                gate.qubits.len()
                            )));
                        }
                        for &q in &gate.qubits {
                            if q >= n {
                                return Err(invalid(format!(
                                    "layer {index}: qubit {q} out of range for {n} qubits"
                                )));
                            }
                            if std::mem::replace(&mut used[q], true) {
                                return Err(invalid(format!(
                                    "layer {index}: qubit {q} used by two gates"
                                )));
                            }
                        }
                    }
                }
                Layer::PhaseOracle { function } => {
                    if function.n() != n {
                        return Err(invalid(format!(
                            "layer {index}: oracle over {} bits in a {n}-qubit circuit",
                            function.n()
                        )));
                    }
                }
            }
        }
        Ok(Self { n, layers })
    }

    /// Deutsch–Jozsa in phase-oracle form: `H^{⊗n}`, `O_f`, `H^{⊗n}`.
    pub fn deutsch_jozsa(f: &BooleanFunction) -> Self {
        let n = f.n();
        let hadamards = Layer::Unitary {
            gates: (0..n).map(|q| Gate::new(GateKind::H, vec![q])).collect(),
        };
        Self {
            n,
            layers: vec![
                hadamards.clone(),
                Layer::PhaseOracle {
                    function: f.clone(),
                },
                hadamards,
            ],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }
}

/// Final state of the `λ`-noisy circuit: depolarize `|0^n⟩⟨0^n|`, then apply each layer
/// followed by a full depolarizing layer.
pub fn evolve_reference<T: Scalar>(
    circuit: &NoisyCircuit,
    lambda: T,
    max_qubits: usize,
) -> Result<DensityMatrix<T>> {
    if circuit.n() > max_qubits {
        return Err(resource(format!(
            "{} qubits exceeds the density-matrix cap of {max_qubits}",
            circuit.n()
        )));
    }
    let mut rho = DensityMatrix::zero_state(circuit.n())?;
    rho.depolarize_all_in_place(lambda)?;
    for layer in circuit.layers() {
        match layer {
            Layer::Unitary { gates } => {
                for gate in gates {
                    if let Some(u) = gate.gate.single_qubit_matrix() {
                        rho.apply_single_qubit(gate.qubits[0], &u)?;
                    } else if let Some(u) = gate.gate.two_qubit_matrix() {
                        rho.apply_two_qubit(gate.qubits[0], gate.qubits[1], &u)?;
                    }
                }
            }
            Layer::PhaseOracle { function } => rho.apply_phase_oracle(function)?,
        }
        rho.depolarize_all_in_place(lambda)?;
    }
    Ok(rho)
}

/// Output distribution `p(s)` of the noisy circuit, with the default qubit cap.
pub fn simulate_reference<T: Scalar>(circuit: &NoisyCircuit, lambda: T) -> Result<Vec<T>> {
    simulate_reference_with_cap(circuit, lambda, DEFAULT_REFERENCE_QUBITS)
}

pub fn simulate_reference_with_cap<T: Scalar>(
    circuit: &NoisyCircuit,
    lambda: T,
    max_qubits: usize,
) -> Result<Vec<T>> {
    Ok(evolve_reference(circuit, lambda, max_qubits)?.probabilities())
}
