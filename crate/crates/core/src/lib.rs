//! Non-stabilizerness ("magic") measures for dense many-qudit state vectors.
//!
//! The crate computes
//!
//! * the stabilizer Rényi entropy `M_q` of qubit states, both by a naive
//!   Gray-code sweep over all `4^N` Pauli strings and by a fast
//!   Walsh–Hadamard algorithm costing `O(N 4^N)`;
//! * a Monte-Carlo estimate of `M_2` by thermodynamic integration over a
//!   Boltzmann distribution of X-patterns, plus the direct Pauli sampler;
//! * the mana of qutrit states: naive sweep, fast `Z_3^N` Fourier algorithm
//!   (`O(N 9^N)`), and exact mixed-state mana via a 9×9 tensor-power
//!   transform.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution is
//! abstracted behind [`chunk::Executor`]; the companion `magicvec` crate
//! supplies a threaded implementation, file formats and the CLI.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chunk;
pub mod circuit;
pub mod error;
pub mod gray;
pub mod mana;
pub(crate) mod math;
pub mod sampling;
pub mod sre;
pub mod state;
pub mod transform;

pub use num_complex::Complex64;

pub use chunk::{chunked_reduce, ChunkPlan, Executor, NeumaierSum, Serial};
pub use circuit::{rand_haar_state, CircuitSpec, CliffordGate};
pub use error::{Error, Result};
pub use gray::{gray_at, GrayCursor, GrayStep};
pub use mana::{
    build_m9, build_phase_space_ops, mana_fast, mana_mixed, mana_naive, vec_n, ManaResult,
    WignerSpectrum,
};
pub use sampling::{
    eval_energy, mc_sre, mc_sre_direct, ti_sre_exact, DirectConfig, DirectEstimate, McSreResult,
    SamplerConfig,
};
pub use sre::{sre_fast, sre_naive, sre_q1, SreResult};
pub use state::{DensityMatrix, StateVector, TwoQuditGate};
