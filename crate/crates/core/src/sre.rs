//! Exact stabilizer Rényi entropy of qubit state vectors.
//!
//! For a Pauli string `X_a Z_b`, `⟨ψ|X_a Z_b|ψ⟩` differs from the Hermitian
//! Pauli expectation by a unit phase, so every sum below uses the modulus:
//! `S_q = Σ_{a,b} |⟨ψ|X_a Z_b|ψ⟩|^{2q}` and `M_q = log2(S_q / 2^N) / (1 - q)`.
//!
//! [`sre_fast`] fixes the X-pattern `a`, forms `v_x = conj(β_x) α_x` with
//! `β = X_a ψ`, and gets every `χ_b = ⟨ψ|X_a Z_b|ψ⟩` from one Walsh–Hadamard
//! transform. X-patterns follow the binary Gray code, split into chunks.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::chunk::{chunked_reduce, ChunkPlan, Executor, NeumaierSum};
use crate::error::{Error, Result};
use crate::gray::{gray_code_unchecked, position_to_site, GrayCursor};
use crate::math;
use crate::state::{shift_site, StateVector};
use crate::transform::fwht_unchecked;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SreResult {
    /// `M_q` in bits.
    pub m_q: f64,
    /// `1 - Σ_{a,b} |χ_b(a)|² / 2^N`; zero for normalized input.
    pub lost_norm: f64,
    pub q: f64,
    pub sites: usize,
}

fn check_input(psi: &StateVector) -> Result<()> {
    psi.require_dim(2)?;
    psi.check_normalized()
}

fn check_q(q: f64) -> Result<()> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::arg(alloc::format!("Renyi index must be positive, got {q}")));
    }
    if q == 1.0 {
        return Err(Error::RenyiIndexOne);
    }
    Ok(())
}

/// `p^q` for `p = |χ|²`, exact for the common integer indices.
#[inline]
pub(crate) fn moment(p: f64, q: f64) -> f64 {
    if q == 2.0 {
        p * p
    } else if q == 3.0 {
        p * p * p
    } else if p == 0.0 {
        0.0
    } else {
        math::powf(p, q)
    }
}

fn renyi_from_sum(s_q: f64, q: f64, sites: usize) -> f64 {
    // log2(S / 2^N) computed as log2(S) - N to keep precision at large N
    (math::log2(s_q) - sites as f64) / (1.0 - q)
}

/// Naive `O(8^N)` sweep: a double Gray loop updating the shadow state
/// `|φ⟩ = Z_b X_a |ψ⟩` with one single-site operator per step.
pub fn sre_naive(psi: &StateVector, q: f64) -> Result<SreResult> {
    check_input(psi)?;
    check_q(q)?;
    let n = psi.sites();
    let alpha = psi.amplitudes();
    let mut outer = psi.clone();
    let mut phi = psi.clone();
    let mut s_q = NeumaierSum::new();
    let mut norm = NeumaierSum::new();

    let mut a_cursor = GrayCursor::new(2, n)?;
    loop {
        phi.amplitudes_mut().copy_from_slice(outer.amplitudes());
        let mut b_cursor = GrayCursor::new(2, n)?;
        loop {
            let overlap: Complex64 = alpha
                .iter()
                .zip(phi.amplitudes())
                .map(|(a, f)| a.conj() * f)
                .sum();
            let p = overlap.norm_sqr();
            s_q.add(moment(p, q));
            norm.add(p);
            match b_cursor.next_gray() {
                Ok(step) => phi.apply_z(position_to_site(n, step.position))?,
                Err(Error::SequenceExhausted) => break,
                Err(e) => return Err(e),
            }
        }
        match a_cursor.next_gray() {
            Ok(step) => outer.apply_x(position_to_site(n, step.position))?,
            Err(Error::SequenceExhausted) => break,
            Err(e) => return Err(e),
        }
    }

    Ok(SreResult {
        m_q: renyi_from_sum(s_q.value(), q, n),
        lost_norm: 1.0 - norm.value() / (1u64 << n) as f64,
        q,
        sites: n,
    })
}

/// Writes `χ_b = ⟨ψ|X_a Z_b|ψ⟩` for all `b` into `out`, given `shifted = X_a ψ`.
#[inline]
pub(crate) fn z_overlaps(alpha: &[Complex64], shifted: &[Complex64], out: &mut [Complex64]) {
    for ((o, b), a) in out.iter_mut().zip(shifted).zip(alpha) {
        *o = b.conj() * a;
    }
    fwht_unchecked(out);
}

/// Writes `χ_b(a)` for one X-pattern given as a flat bit mask.
pub(crate) fn z_overlaps_for_mask(alpha: &[Complex64], mask: usize, out: &mut [Complex64]) {
    for (x, o) in out.iter_mut().enumerate() {
        *o = alpha[x ^ mask].conj() * alpha[x];
    }
    fwht_unchecked(out);
}

/// Sweeps the X-patterns `gray(k)` for `k` in `range`, calling `visit` with
/// the `2^N` overlaps `χ_b` of each pattern.
pub(crate) fn sweep_x_patterns(
    psi: &StateVector,
    range: core::ops::Range<usize>,
    mut visit: impl FnMut(&[Complex64]),
) -> Result<()> {
    let n = psi.sites();
    let alpha = psi.amplitudes();
    let mut shifted = psi.clone();
    let mut cursor = GrayCursor::at(2, n, range.start)?;
    for (p, &bit) in cursor.pattern().iter().enumerate() {
        if bit == 1 {
            let stride = shifted.stride(position_to_site(n, p));
            shift_site(shifted.amplitudes_mut(), 2, stride);
        }
    }
    let mut scratch = vec![Complex64::new(0.0, 0.0); alpha.len()];
    for k in range.clone() {
        z_overlaps(alpha, shifted.amplitudes(), &mut scratch);
        visit(&scratch);
        if k + 1 < range.end {
            let step = cursor.next_gray()?;
            let stride = 1usize << step.position;
            shift_site(shifted.amplitudes_mut(), 2, stride);
        }
    }
    debug_assert_eq!(cursor.code(), gray_code_unchecked(2, range.end - 1));
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    main: NeumaierSum,
    norm: NeumaierSum,
}

impl Partial {
    fn merge(self, other: Partial) -> Partial {
        Partial {
            main: self.main.merge(other.main),
            norm: self.norm.merge(other.norm),
        }
    }
}

fn reduce_overlaps<E, F>(psi: &StateVector, exec: &E, per_overlap: F) -> Result<Partial>
where
    E: Executor + ?Sized,
    F: Fn(f64) -> f64 + Sync,
{
    let total = psi.len();
    let plan = ChunkPlan::for_workers(total, exec.workers());
    chunked_reduce(
        exec,
        &plan,
        |range| {
            let mut part = Partial::default();
            sweep_x_patterns(psi, range, |chi| {
                for c in chi {
                    let p = c.norm_sqr();
                    part.main.add(per_overlap(p));
                    part.norm.add(p);
                }
            })?;
            Ok(part)
        },
        Partial::default(),
        Partial::merge,
    )
}

/// Fast `O(N 4^N)` SRE via one Walsh–Hadamard transform per X-pattern.
pub fn sre_fast<E: Executor + ?Sized>(psi: &StateVector, q: f64, exec: &E) -> Result<SreResult> {
    check_input(psi)?;
    check_q(q)?;
    let n = psi.sites();
    let part = reduce_overlaps(psi, exec, |p| moment(p, q))?;
    Ok(SreResult {
        m_q: renyi_from_sum(part.main.value(), q, n),
        lost_norm: 1.0 - part.norm.value() / psi.len() as f64,
        q,
        sites: n,
    })
}

/// `M_1 = H(π) - N` with `π(P) = ⟨P⟩² / 2^N` over all `4^N` Pauli strings.
pub fn sre_q1<E: Executor + ?Sized>(psi: &StateVector, exec: &E) -> Result<SreResult> {
    check_input(psi)?;
    let n = psi.sites();
    let part = reduce_overlaps(psi, exec, |p| if p > 0.0 { p * math::log2(p) } else { 0.0 })?;
    let dim = psi.len() as f64;
    let mass = part.norm.value() / dim;
    // H = -Σ π log2 π with π = p / 2^N
    let entropy = n as f64 * mass - part.main.value() / dim;
    Ok(SreResult {
        m_q: entropy - n as f64,
        lost_norm: 1.0 - mass,
        q: 1.0,
        sites: n,
    })
}

/// All `4^N` moduli `|⟨ψ|X_a Z_b|ψ⟩|²`, indexed `a · 2^N + b` (diagnostics, small N).
pub fn pauli_spectrum(psi: &StateVector) -> Result<Vec<f64>> {
    psi.require_dim(2)?;
    let mut out = Vec::with_capacity(psi.len() * psi.len());
    let mut scratch = vec![Complex64::new(0.0, 0.0); psi.len()];
    for a in 0..psi.len() {
        z_overlaps_for_mask(psi.amplitudes(), a, &mut scratch);
        out.extend(scratch.iter().map(|c| c.norm_sqr()));
    }
    Ok(out)
}
