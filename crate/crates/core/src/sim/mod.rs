//! Noisy circuit simulators: a density-matrix reference for arbitrary layered circuits and the
//! analytic error-vector model of the noisy Deutsch–Jozsa circuit.

pub mod analytic;
pub mod circuit;
pub mod density;

pub use analytic::{
    bit_marginals, output_distribution_noisy_dj, sample_noisy_dj, total_variation, NoisyDjSampler,
};
pub use circuit::{
    evolve_reference, simulate_reference, simulate_reference_with_cap, Gate, GateKind, Layer,
    NoisyCircuit, DEFAULT_REFERENCE_QUBITS,
};
pub use density::{depolarize_all, DensityMatrix, StateDiagnostics};
