//! Random circuits: Haar brick-wall states and Clifford test circuits.

use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math;
use crate::state::{root_of_unity, StateVector, TwoQuditGate};

/// Brick-wall circuit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitSpec {
    pub sites: usize,
    pub depth: usize,
    pub local_dim: usize,
    pub seed: u64,
}

impl CircuitSpec {
    pub fn new(sites: usize, depth: usize, local_dim: usize, seed: u64) -> Self {
        Self {
            sites,
            depth,
            local_dim,
            seed,
        }
    }

    /// Bonds `(i, i+1)` of layer `r` (1-based). Odd layers start at site 0,
    /// even layers at site 1; a dangling site at the open end is skipped.
    pub fn layer_bonds(&self, r: usize) -> impl Iterator<Item = (usize, usize)> {
        let start = if r % 2 == 1 { 0 } else { 1 };
        (start..self.sites.saturating_sub(1)).step_by(2).map(|i| (i, i + 1))
    }
}

fn ginibre(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * s, im * s)
        })
        .collect()
}

/// Haar-random `n×n` unitary (row-major): Householder QR of a complex
/// Ginibre matrix, with the phases of `diag(R)` moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut a = ginibre(n, rng);
    let mut reflectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut r_diag = vec![Complex64::new(0.0, 0.0); n];

    for k in 0..n {
        let norm = math::sqrt((k..n).map(|i| a[i * n + k].norm_sqr()).sum());
        let x0 = a[k * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k..n).map(|i| a[i * n + k]).collect();
        v[0] -= alpha;
        let vnorm = math::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if vnorm > 0.0 {
            v.iter_mut().for_each(|z| *z /= vnorm);
        }
        // A[k.., k..] -= 2 v (v† A[k.., k..])
        for j in k..n {
            let dot: Complex64 = (k..n).map(|i| v[i - k].conj() * a[i * n + j]).sum();
            for i in k..n {
                a[i * n + j] -= v[i - k] * dot * 2.0;
            }
        }
        r_diag[k] = a[k * n + k];
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1}
    let mut q = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        q[i * n + i] = Complex64::new(1.0, 0.0);
    }
    for (k, v) in reflectors.iter().enumerate().rev() {
        for j in 0..n {
            let dot: Complex64 = (k..n).map(|i| v[i - k].conj() * q[i * n + j]).sum();
            for i in k..n {
                q[i * n + j] -= v[i - k] * dot * 2.0;
            }
        }
    }
    for (j, r) in r_diag.iter().enumerate() {
        let fix = if r.norm() > 0.0 { r / r.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[i * n + j] *= fix;
        }
    }
    q
}

/// Normalized state with i.i.d. complex Gaussian amplitudes (Haar-distributed).
pub fn random_state(local_dim: usize, sites: usize, rng: &mut impl Rng) -> Result<StateVector> {
    let mut psi = StateVector::zero(local_dim, sites)?;
    for a in psi.amplitudes_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *a = Complex64::new(re, im);
    }
    psi.normalize();
    Ok(psi)
}

/// `U_t |0⟩^{⊗N}` for a brick-wall circuit of Haar-random two-qudit gates.
///
/// Gates are drawn in layer order from a ChaCha8 stream seeded by
/// `spec.seed`, so the state is a pure function of `spec`.
pub fn rand_haar_state(spec: &CircuitSpec) -> Result<StateVector> {
    let mut psi = StateVector::zero(spec.local_dim, spec.sites)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dd = spec.local_dim * spec.local_dim;
    for r in 1..=spec.depth {
        for (i, j) in spec.layer_bonds(r) {
            let gate = TwoQuditGate::new(spec.local_dim, haar_unitary(dd, &mut rng))?;
            psi.apply_two_qudit_gate(&gate, i, j)?;
        }
    }
    Ok(psi)
}

/// Clifford generators. For qutrits these name the analogues: `H` is the
/// normalized Fourier gate, `S` is `diag(1, 1, ω)` and `CNOT` is the SUM
/// gate `|a, b⟩ → |a, a + b⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordGate {
    H,
    S,
    Cnot,
}

impl CliffordGate {
    pub const ALL: [CliffordGate; 3] = [CliffordGate::H, CliffordGate::S, CliffordGate::Cnot];

    pub fn arity(self) -> usize {
        match self {
            CliffordGate::Cnot => 2,
            _ => 1,
        }
    }

    fn single_site_matrix(self, d: usize) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        let norm = 1.0 / math::sqrt(d as f64);
        match self {
            CliffordGate::H => (0..d * d)
                .map(|jk| root_of_unity(d, (jk / d) * (jk % d)) * norm)
                .collect(),
            CliffordGate::S => {
                let mut m = vec![zero; d * d];
                for k in 0..d {
                    m[k * d + k] = Complex64::new(1.0, 0.0);
                }
                m[d * d - 1] = if d == 2 { Complex64::new(0.0, 1.0) } else { root_of_unity(3, 1) };
                m
            }
            CliffordGate::Cnot => unreachable!("two-site gate"),
        }
    }

    fn two_site_gate(d: usize) -> Result<TwoQuditGate> {
        let n = d * d;
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..d {
            for b in 0..d {
                m[(a * d + (a + b) % d) * n + (a * d + b)] = Complex64::new(1.0, 0.0);
            }
        }
        TwoQuditGate::new(d, m)
    }
}

impl FromStr for CliffordGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h" | "hadamard" | "f" | "fourier" => Ok(CliffordGate::H),
            "s" | "phase" | "p" => Ok(CliffordGate::S),
            "cnot" | "cx" | "sum" => Ok(CliffordGate::Cnot),
            other => Err(Error::arg(alloc::format!("unknown Clifford gate '{other}'"))),
        }
    }
}

/// Applies a Clifford generator on `sites` (one site, or control then target).
pub fn apply_clifford_gate(psi: &mut StateVector, gate: CliffordGate, sites: &[usize]) -> Result<()> {
    if sites.len() != gate.arity() {
        return Err(Error::arg(alloc::format!(
            "{gate:?} acts on {} site(s), got {}",
            gate.arity(),
            sites.len()
        )));
    }
    let d = psi.local_dim();
    match gate {
        CliffordGate::Cnot => psi.apply_two_qudit_gate(&CliffordGate::two_site_gate(d)?, sites[0], sites[1]),
        g => psi.apply_single(&g.single_site_matrix(d), sites[0]),
    }
}

/// Applies `gates` uniformly random Clifford generators on random sites.
pub fn random_clifford_circuit(psi: &mut StateVector, gates: usize, rng: &mut impl Rng) -> Result<()> {
    let n = psi.sites();
    for _ in 0..gates {
        let mut gate = CliffordGate::ALL[rng.random_range(0..3)];
        if n < 2 && gate == CliffordGate::Cnot {
            gate = CliffordGate::H;
        }
        if gate == CliffordGate::Cnot {
            let c = rng.random_range(0..n);
            let mut t = rng.random_range(0..n - 1);
            if t >= c {
                t += 1;
            }
            apply_clifford_gate(psi, gate, &[c, t])?;
        } else {
            apply_clifford_gate(psi, gate, &[rng.random_range(0..n)])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::unitarity_defect;

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 9] {
            for _ in 0..20 {
                let u = haar_unitary(n, &mut rng);
                assert!(unitarity_defect(&u, n) < 1e-12);
            }
        }
    }

    #[test]
    fn haar_first_moment_vanishes_and_second_is_uniform() {
        // E[U_00] = 0 and E[|U_ij|^2] = 1/n for Haar unitaries.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 4;
        let trials = 4000;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut second = [0.0f64; 16];
        for _ in 0..trials {
            let u = haar_unitary(n, &mut rng);
            mean += u[0];
            for (s, x) in second.iter_mut().zip(&u) {
                *s += x.norm_sqr();
            }
        }
        assert!((mean / trials as f64).norm() < 0.03);
        for s in second {
            assert!((s / trials as f64 - 0.25).abs() < 0.02);
        }
    }

    #[test]
    fn depth_zero_is_product_zero() {
        for d in [2, 3] {
            let psi = rand_haar_state(&CircuitSpec::new(5, 0, d, 99)).unwrap();
            assert_eq!(psi, StateVector::zero(d, 5).unwrap());
        }
    }

    #[test]
    fn reproducible_and_normalized() {
        for &(n, t, d) in &[(6usize, 3usize, 2usize), (5, 4, 3), (7, 5, 2)] {
            let spec = CircuitSpec::new(n, t, d, 1234);
            let a = rand_haar_state(&spec).unwrap();
            let b = rand_haar_state(&spec).unwrap();
            assert_eq!(a.amplitudes(), b.amplitudes());
            assert!((a.norm_sqr() - 1.0).abs() < 1e-10);
        }
        let a = rand_haar_state(&CircuitSpec::new(6, 3, 2, 1)).unwrap();
        let b = rand_haar_state(&CircuitSpec::new(6, 3, 2, 2)).unwrap();
        assert_ne!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn brick_wall_bonds() {
        let spec = CircuitSpec::new(6, 2, 2, 0);
        assert_eq!(spec.layer_bonds(1).collect::<Vec<_>>(), vec![(0, 1), (2, 3), (4, 5)]);
        assert_eq!(spec.layer_bonds(2).collect::<Vec<_>>(), vec![(1, 2), (3, 4)]);
        let odd = CircuitSpec::new(5, 2, 2, 0);
        assert_eq!(odd.layer_bonds(1).collect::<Vec<_>>(), vec![(0, 1), (2, 3)]);
        assert_eq!(odd.layer_bonds(2).collect::<Vec<_>>(), vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn hadamard_and_cnot() {
        let mut psi = StateVector::zero(2, 1).unwrap();
        apply_clifford_gate(&mut psi, CliffordGate::H, &[0]).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        for a in psi.amplitudes() {
            assert!((a - Complex64::new(s, 0.0)).norm() < 1e-15);
        }
        let mut b = StateVector::basis(2, &[1, 0]).unwrap();
        apply_clifford_gate(&mut b, CliffordGate::Cnot, &[0, 1]).unwrap();
        assert_eq!(b, StateVector::basis(2, &[1, 1]).unwrap());

        let mut t = StateVector::basis(3, &[2, 2]).unwrap();
        apply_clifford_gate(&mut t, CliffordGate::Cnot, &[0, 1]).unwrap();
        assert_eq!(t, StateVector::basis(3, &[2, 1]).unwrap());
    }

    #[test]
    fn gate_names() {
        assert_eq!("CNOT".parse::<CliffordGate>().unwrap(), CliffordGate::Cnot);
        assert_eq!("h".parse::<CliffordGate>().unwrap(), CliffordGate::H);
        assert!("toffoli".parse::<CliffordGate>().is_err());
        let mut psi = StateVector::zero(2, 2).unwrap();
        assert!(apply_clifford_gate(&mut psi, CliffordGate::Cnot, &[0]).is_err());
    }

    #[test]
    fn single_site_cliffords_are_unitary() {
        for d in [2, 3] {
            for g in [CliffordGate::H, CliffordGate::S] {
                assert!(unitarity_defect(&g.single_site_matrix(d), d) < 1e-14);
            }
        }
    }
}
