//! Mana of qutrit states.
//!
//! With clock `Z|x⟩ = ω^x|x⟩`, shift `X|x⟩ = |x+1⟩` and `ω = e^{2πi/3}`,
//! the Heisenberg–Weyl operators are `T_{ab} = ω^{-2ab} Z^a X^b` and the
//! phase-space point operators `A_0 = (1/3) Σ_u T_u`, `A_u = T_u A_0 T_u†`.
//! Single-qutrit points are indexed `3a + b`; `N`-qutrit points use the
//! base-9 string of site indices, site 0 most significant.
//!
//! The Wigner function is `W(u) = Tr(ρ A_u) / 3^N` and the mana is
//! `log2 Σ_u |W(u)|`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::chunk::{chunked_reduce, ChunkPlan, Executor, NeumaierSum};
use crate::error::{Error, Result};
use crate::gray::GrayCursor;
use crate::math;
use crate::state::{phase_site, root_of_unity, shift_site, DensityMatrix, StateVector};
use crate::transform::{apply_kron9_inplace, ft3_unchecked, Mat9};

/// Row-major 3×3 matrix.
pub type Mat3 = [Complex64; 9];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance for Hermiticity and trace checks on input density matrices.
pub const RHO_TOL: f64 = 1e-10;

fn matmul3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [ZERO; 9];
    for r in 0..3 {
        for k in 0..3 {
            for col in 0..3 {
                c[3 * r + col] += a[3 * r + k] * b[3 * k + col];
            }
        }
    }
    c
}

fn dagger3(a: &Mat3) -> Mat3 {
    let mut c = [ZERO; 9];
    for r in 0..3 {
        for col in 0..3 {
            c[3 * col + r] = a[3 * r + col].conj();
        }
    }
    c
}

fn power3(a: &Mat3, k: usize) -> Mat3 {
    let mut acc = [ZERO; 9];
    for i in 0..3 {
        acc[4 * i] = ONE;
    }
    for _ in 0..k % 3 {
        acc = matmul3(&acc, a);
    }
    acc
}

fn clock() -> Mat3 {
    let mut z = [ZERO; 9];
    for x in 0..3 {
        z[4 * x] = root_of_unity(3, x);
    }
    z
}

fn shift() -> Mat3 {
    let mut x = [ZERO; 9];
    for k in 0..3 {
        x[3 * ((k + 1) % 3) + k] = ONE;
    }
    x
}

/// `T_{ab} = ω^{-2ab} Z^a X^b`.
pub fn heisenberg_weyl(a: usize, b: usize) -> Mat3 {
    let phase = root_of_unity(3, (3 - (2 * a * b) % 3) % 3);
    let m = matmul3(&power3(&clock(), a), &power3(&shift(), b));
    m.map(|c| c * phase)
}

/// The nine single-qutrit phase-space point operators, indexed `3a + b`.
pub fn build_phase_space_ops() -> [Mat3; 9] {
    let mut a0 = [ZERO; 9];
    for a in 0..3 {
        for b in 0..3 {
            let t = heisenberg_weyl(a, b);
            for (acc, v) in a0.iter_mut().zip(t) {
                *acc += v / 3.0;
            }
        }
    }
    core::array::from_fn(|u| {
        let t = heisenberg_weyl(u / 3, u % 3);
        matmul3(&matmul3(&t, &a0), &dagger3(&t))
    })
}

/// 9×9 map with `(M · v)_u = Tr(ρ A_u)` for `v[3i + j] = ρ_{ij}`, i.e.
/// `M_{u, 3i+j} = (A_u)_{ji}`. Validated against its expected structure.
pub fn build_m9() -> Result<Mat9> {
    let ops = build_phase_space_ops();
    let mut m = [[ZERO; 9]; 9];
    for (u, a) in ops.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                m[u][3 * i + j] = a[3 * j + i];
            }
        }
    }
    validate_m9(&m)?;
    Ok(m)
}

/// Row and column orders under which `M` is `F_3 ⊕ F_3 ⊕ F_3`.
///
/// Position `3g + r` of the row order holds the point `u = (a, b) = (r, g)`;
/// position `3g + k` of the column order holds `3i + j` with `i = g - k`,
/// `j = g + k`. Block `g` is then `(F_3)_{rk} = ω^{2rk}`.
pub fn m9_block_form() -> ([usize; 9], [usize; 9]) {
    let rows = core::array::from_fn(|p| {
        let (g, r) = (p / 3, p % 3);
        3 * r + g
    });
    let cols = core::array::from_fn(|p| {
        let (g, k) = (p / 3, p % 3);
        let i = (g + 3 - k) % 3;
        let j = (g + k) % 3;
        3 * i + j
    });
    (rows, cols)
}

fn validate_m9(m: &Mat9) -> Result<()> {
    const TOL: f64 = 1e-12;
    let roots = [0, 1, 2].map(|k| root_of_unity(3, k));
    for (u, row) in m.iter().enumerate() {
        let mut nonzero = 0;
        for entry in row {
            if entry.norm() > TOL {
                nonzero += 1;
                if !roots.iter().any(|w| (entry - w).norm() < TOL) {
                    return Err(Error::Consistency(alloc::format!(
                        "M row {u} has entry {entry} outside {{1, w, w^2}}"
                    )));
                }
            }
        }
        if nonzero != 3 {
            return Err(Error::Consistency(alloc::format!(
                "M row {u} has {nonzero} non-zero entries, expected 3"
            )));
        }
    }
    let (rows, cols) = m9_block_form();
    for (pr, &r) in rows.iter().enumerate() {
        for (pc, &c) in cols.iter().enumerate() {
            let expected = if pr / 3 == pc / 3 {
                root_of_unity(3, 2 * (pr % 3) * (pc % 3))
            } else {
                ZERO
            };
            if (m[r][c] - expected).norm() > TOL {
                return Err(Error::Consistency(alloc::format!(
                    "M is not a permuted F3 + F3 + F3 at ({r}, {c})"
                )));
            }
        }
    }
    Ok(())
}

/// `spread[i] = Σ_k i_k 9^{N-1-k}`: base-3 digits re-read in base 9.
fn spread_table(sites: usize) -> Vec<usize> {
    let mut table = vec![0usize];
    for _ in 0..sites {
        let prev = core::mem::take(&mut table);
        table = Vec::with_capacity(prev.len() * 3);
        for &p in &prev {
            for digit in 0..3 {
                table.push(9 * p + digit);
            }
        }
    }
    table
}

/// Digit-wise negation `x → -x mod 3` as an index table.
fn negation_table(sites: usize) -> Vec<usize> {
    let mut table = vec![0usize];
    for _ in 0..sites {
        let prev = core::mem::take(&mut table);
        table = Vec::with_capacity(prev.len() * 3);
        for &p in &prev {
            for digit in 0..3 {
                table.push(3 * p + (3 - digit) % 3);
            }
        }
    }
    table
}

/// Reindexes `ρ` into `v[p(i, j)] = ρ_{ij}` with `p` interleaving the site
/// digits as `3 i_k + j_k` in base 9.
pub fn vec_n(rho: &DensityMatrix) -> Result<Vec<Complex64>> {
    rho.validate(RHO_TOL)?;
    Ok(vec_n_unchecked(rho))
}

fn vec_n_unchecked(rho: &DensityMatrix) -> Vec<Complex64> {
    let dim = rho.dim();
    let spread = spread_table(rho.sites());
    let data = rho.column_major();
    let mut v = vec![ZERO; dim * dim];
    for j in 0..dim {
        for i in 0..dim {
            v[3 * spread[i] + spread[j]] = data[i + j * dim];
        }
    }
    v
}

/// Inverse of [`vec_n`].
pub fn unvec_n(v: &[Complex64], sites: usize) -> Result<DensityMatrix> {
    let dim = 3usize.pow(sites as u32);
    if v.len() != dim * dim {
        return Err(Error::arg("vector length is not 9^N"));
    }
    let spread = spread_table(sites);
    let mut data = vec![ZERO; dim * dim];
    for j in 0..dim {
        for i in 0..dim {
            data[i + j * dim] = v[3 * spread[i] + spread[j]];
        }
    }
    DensityMatrix::from_column_major(3, sites, data)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManaResult {
    /// Mana in bits.
    pub mana: f64,
    /// `|Σ_u W(u) - 1|`.
    pub wigner_norm_defect: f64,
    pub sites: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    abs: NeumaierSum,
    signed: NeumaierSum,
}

impl Partial {
    fn add(&mut self, w: f64) {
        self.abs.add(math::abs(w));
        self.signed.add(w);
    }

    fn merge(self, other: Partial) -> Partial {
        Partial {
            abs: self.abs.merge(other.abs),
            signed: self.signed.merge(other.signed),
        }
    }

    /// Sums of `3^N W(u)` → result.
    fn finish(self, sites: usize) -> ManaResult {
        let scale = math::ipow(3, sites) as f64;
        ManaResult {
            mana: math::log2(self.abs.value() / scale),
            wigner_norm_defect: math::abs(self.signed.value() / scale - 1.0),
            sites,
        }
    }
}

fn check_pure(psi: &StateVector) -> Result<()> {
    psi.require_dim(3)?;
    psi.check_normalized()
}

/// Applies `X^{pattern}` with `pattern` given by position (position `p` is
/// site `N-1-p`, stride `3^p`).
fn shift_by_pattern(amps: &mut [Complex64], pattern: &[u8]) {
    let mut stride = 1;
    for &digit in pattern {
        for _ in 0..digit {
            shift_site(amps, 3, stride);
        }
        stride *= 3;
    }
}

/// Naive `O(27^N)` sweep: for every X-pattern `s` and Z-pattern `t`,
/// `⟨ψ|Z^t X^s A_0|ψ⟩`, which is `ω^{-s·t}` times the expectation of the
/// point operator `u = (2t, 2s)`.
pub fn mana_naive(psi: &StateVector) -> Result<ManaResult> {
    check_pure(psi)?;
    let n = psi.sites();
    let alpha = psi.amplitudes();
    let neg = negation_table(n);
    // A_0 |x⟩ = |-x⟩
    let mut base: Vec<Complex64> = neg.iter().map(|&y| alpha[y]).collect();

    let mut part = Partial::default();
    let mut outer = GrayCursor::new(3, n)?;
    loop {
        let s_digits = outer.pattern().to_vec();
        let mut phi = base.clone();
        let mut inner = GrayCursor::new(3, n)?;
        let mut dot = 0usize;
        loop {
            let overlap: Complex64 = alpha.iter().zip(&phi).map(|(a, p)| a.conj() * p).sum();
            let w = root_of_unity(3, dot) * overlap;
            part.add(w.re);
            match inner.next_gray() {
                Ok(step) => {
                    phase_site(&mut phi, 3, 3usize.pow(step.position as u32));
                    dot = (dot + usize::from(s_digits[step.position])) % 3;
                }
                Err(Error::SequenceExhausted) => break,
                Err(e) => return Err(e),
            }
        }
        match outer.next_gray() {
            Ok(step) => shift_site(&mut base, 3, 3usize.pow(step.position as u32)),
            Err(Error::SequenceExhausted) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(part.finish(n))
}

/// Sweeps the ternary X-patterns `gray(k)`, `k ∈ range`, handing `visit`
/// the pattern and the `3^N` values `χ_z = 3^N W(z, -c)` of pattern `c`.
fn sweep_shifts(
    psi: &StateVector,
    neg: &[usize],
    range: core::ops::Range<usize>,
    mut visit: impl FnMut(&[u8], &[Complex64]),
) -> Result<()> {
    let mut shifted = psi.amplitudes().to_vec();
    let mut cursor = GrayCursor::at(3, psi.sites(), range.start)?;
    shift_by_pattern(&mut shifted, cursor.pattern());
    let mut v = vec![ZERO; shifted.len()];
    for k in range.clone() {
        for ((o, a), &y) in v.iter_mut().zip(&shifted).zip(neg) {
            *o = a.conj() * shifted[y];
        }
        ft3_unchecked(&mut v);
        visit(cursor.pattern(), &v);
        if k + 1 < range.end {
            let step = cursor.next_gray()?;
            shift_site(&mut shifted, 3, 3usize.pow(step.position as u32));
        }
    }
    Ok(())
}

/// Fast `O(N 9^N)` pure-state mana: one ternary Fourier transform per
/// X-pattern.
pub fn mana_fast<E: Executor + ?Sized>(psi: &StateVector, exec: &E) -> Result<ManaResult> {
    check_pure(psi)?;
    let n = psi.sites();
    let neg = negation_table(n);
    let plan = ChunkPlan::for_workers(psi.len(), exec.workers());
    let part = chunked_reduce(
        exec,
        &plan,
        |range| {
            let mut part = Partial::default();
            sweep_shifts(psi, &neg, range, |_, chi| chi.iter().for_each(|c| part.add(c.re)))?;
            Ok(part)
        },
        Partial::default(),
        Partial::merge,
    )?;
    Ok(part.finish(n))
}

/// Exact mixed-state mana from `w = M^{⊗N} vec_n(ρ)`.
pub fn mana_mixed(rho: &DensityMatrix) -> Result<ManaResult> {
    let w = wigner_numerators_mixed(rho)?;
    let mut part = Partial::default();
    for c in &w {
        part.abs.add(c.norm());
        part.signed.add(c.re);
    }
    Ok(part.finish(rho.sites()))
}

fn wigner_numerators_mixed(rho: &DensityMatrix) -> Result<Vec<Complex64>> {
    if rho.local_dim() != 3 {
        return Err(Error::UnsupportedDimension {
            expected: 3,
            found: rho.local_dim(),
        });
    }
    let mut v = vec_n(rho)?;
    apply_kron9_inplace(&build_m9()?, &mut v)?;
    Ok(v)
}

/// Full discrete Wigner function, `values[u] = W(u)` with `u` the base-9
/// point index.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerSpectrum {
    pub values: Vec<f64>,
    pub sites: usize,
}

impl WignerSpectrum {
    pub fn sum(&self) -> f64 {
        let mut s = NeumaierSum::new();
        self.values.iter().for_each(|&w| s.add(w));
        s.value()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `log2 Σ |W(u)|`.
    pub fn mana(&self) -> f64 {
        let mut s = NeumaierSum::new();
        self.values.iter().for_each(|&w| s.add(math::abs(w)));
        math::log2(s.value())
    }
}

/// Wigner function of a pure state via the fast transform.
pub fn wigner_spectrum_pure(psi: &StateVector) -> Result<WignerSpectrum> {
    check_pure(psi)?;
    let n = psi.sites();
    let dim = psi.len();
    let neg = negation_table(n);
    let spread = spread_table(n);
    let scale = dim as f64;
    let mut values = vec![0.0; dim * dim];
    sweep_shifts(psi, &neg, 0..dim, |pattern, chi| {
        // b = -c digit-wise, as a flat index (position p has stride 3^p)
        let mut b = 0;
        let mut stride = 1;
        for &c in pattern {
            b += usize::from((3 - c) % 3) * stride;
            stride *= 3;
        }
        for (z, x) in chi.iter().enumerate() {
            values[3 * spread[z] + spread[b]] = x.re / scale;
        }
    })?;
    Ok(WignerSpectrum { values, sites: n })
}

/// Wigner function of a density matrix via `M^{⊗N}`.
pub fn wigner_spectrum_mixed(rho: &DensityMatrix) -> Result<WignerSpectrum> {
    let scale = rho.dim() as f64;
    let values = wigner_numerators_mixed(rho)?.iter().map(|c| c.re / scale).collect();
    Ok(WignerSpectrum {
        values,
        sites: rho.sites(),
    })
}
