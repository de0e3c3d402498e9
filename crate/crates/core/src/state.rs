//! Dense qubit/qutrit state vectors and density matrices.
//!
//! Amplitudes are indexed by base-`d` digit strings with site 0 as the most
//! significant digit, so site `s` has stride `d^(N-1-s)` in the flat array.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

/// Normalization tolerance on `|psi|^2`.
pub const NORM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `ω_d^k` for `d ∈ {2, 3}`.
#[inline]
pub fn root_of_unity(d: usize, k: usize) -> Complex64 {
    match (d, k % d) {
        (_, 0) => ONE,
        (2, _) => Complex64::new(-1.0, 0.0),
        (3, 1) => Complex64::new(-0.5, 0.866_025_403_784_438_6),
        (3, _) => Complex64::new(-0.5, -0.866_025_403_784_438_6),
        _ => unreachable!("local dimension is validated on construction"),
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::arg(alloc::format!("local dimension must be 2 or 3, got {d}")))
    }
}

fn hilbert_dim(d: usize, sites: usize) -> Result<usize> {
    check_dim(d)?;
    if sites == 0 {
        return Err(Error::arg("a state needs at least one site"));
    }
    d.checked_pow(sites as u32)
        .filter(|&n| n <= isize::MAX as usize / 16)
        .ok_or_else(|| Error::arg(alloc::format!("{d}^{sites} amplitudes do not fit in memory")))
}

/// `X` on one site: `|k⟩ → |k+1 mod d⟩`.
#[inline]
pub(crate) fn shift_site(amps: &mut [Complex64], d: usize, stride: usize) {
    for block in amps.chunks_exact_mut(d * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        if d == 2 {
            lo.swap_with_slice(hi);
        } else {
            let (mid, top) = hi.split_at_mut(stride);
            for ((a0, a1), a2) in lo.iter_mut().zip(mid.iter_mut()).zip(top.iter_mut()) {
                let old2 = *a2;
                *a2 = *a1;
                *a1 = *a0;
                *a0 = old2;
            }
        }
    }
}

/// `Z` on one site: multiplies digit `k` by `ω_d^k`.
#[inline]
pub(crate) fn phase_site(amps: &mut [Complex64], d: usize, stride: usize) {
    for block in amps.chunks_exact_mut(d * stride) {
        for k in 1..d {
            let w = root_of_unity(d, k);
            for a in &mut block[k * stride..(k + 1) * stride] {
                *a *= w;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    local_dim: usize,
    sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0⟩^{⊗N}`.
    pub fn zero(local_dim: usize, sites: usize) -> Result<Self> {
        let len = hilbert_dim(local_dim, sites)?;
        let mut amps = vec![ZERO; len];
        amps[0] = ONE;
        Ok(Self { local_dim, sites, amps })
    }

    /// Wraps raw amplitudes. Normalization is not enforced here; the
    /// measures check it on entry.
    pub fn from_amplitudes(local_dim: usize, sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        let len = hilbert_dim(local_dim, sites)?;
        if amps.len() != len {
            return Err(Error::arg(alloc::format!(
                "expected {len} amplitudes for {sites} sites of dimension {local_dim}, got {}",
                amps.len()
            )));
        }
        Ok(Self { local_dim, sites, amps })
    }

    /// Computational basis state from its site digits (site 0 first).
    pub fn basis(local_dim: usize, digits: &[usize]) -> Result<Self> {
        let mut psi = Self::zero(local_dim, digits.len())?;
        let mut idx = 0;
        for &x in digits {
            if x >= local_dim {
                return Err(Error::arg(alloc::format!("digit {x} out of range")));
            }
            idx = idx * local_dim + x;
        }
        psi.amps[0] = ZERO;
        psi.amps[idx] = ONE;
        Ok(psi)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// Memory held by the amplitudes, in bytes.
    pub fn byte_size(&self) -> usize {
        self.amps.len() * core::mem::size_of::<Complex64>()
    }

    pub fn stride(&self, site: usize) -> usize {
        self.local_dim.pow((self.sites - 1 - site) as u32)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = math::sqrt(self.norm_sqr());
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn check_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if math::abs(norm_sqr - 1.0) > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    pub(crate) fn require_dim(&self, expected: usize) -> Result<()> {
        if self.local_dim != expected {
            return Err(Error::UnsupportedDimension {
                expected,
                found: self.local_dim,
            });
        }
        Ok(())
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.sites {
            return Err(Error::arg(alloc::format!(
                "site {site} out of range for {} sites",
                self.sites
            )));
        }
        Ok(())
    }

    /// Shift operator on `site`.
    pub fn apply_x(&mut self, site: usize) -> Result<()> {
        self.check_site(site)?;
        let stride = self.stride(site);
        shift_site(&mut self.amps, self.local_dim, stride);
        Ok(())
    }

    /// Clock operator on `site`.
    pub fn apply_z(&mut self, site: usize) -> Result<()> {
        self.check_site(site)?;
        let stride = self.stride(site);
        phase_site(&mut self.amps, self.local_dim, stride);
        Ok(())
    }

    /// Dense `d×d` matrix (row-major) on one site. No unitarity check.
    pub fn apply_single(&mut self, u: &[Complex64], site: usize) -> Result<()> {
        self.check_site(site)?;
        let d = self.local_dim;
        if u.len() != d * d {
            return Err(Error::arg("single-site matrix has the wrong size"));
        }
        let stride = self.stride(site);
        let mut x = [ZERO; 3];
        for block in self.amps.chunks_exact_mut(d * stride) {
            for off in 0..stride {
                for k in 0..d {
                    x[k] = block[off + k * stride];
                }
                for r in 0..d {
                    let mut acc = ZERO;
                    for k in 0..d {
                        acc += u[r * d + k] * x[k];
                    }
                    block[off + r * stride] = acc;
                }
            }
        }
        Ok(())
    }

    /// Applies a validated two-qudit gate; the gate's local basis index is
    /// `d * digit(site_i) + digit(site_j)`.
    pub fn apply_two_qudit_gate(&mut self, gate: &TwoQuditGate, site_i: usize, site_j: usize) -> Result<()> {
        self.check_site(site_i)?;
        self.check_site(site_j)?;
        if site_i == site_j {
            return Err(Error::arg("two-qudit gate needs distinct sites"));
        }
        let d = self.local_dim;
        if gate.local_dim != d {
            return Err(Error::UnsupportedDimension {
                expected: d,
                found: gate.local_dim,
            });
        }
        let (si, sj) = (self.stride(site_i), self.stride(site_j));
        let dd = d * d;
        let mut offsets = [0usize; 9];
        for a in 0..d {
            for b in 0..d {
                offsets[a * d + b] = a * si + b * sj;
            }
        }
        let mut x = [ZERO; 9];
        for base in 0..self.amps.len() {
            if (base / si) % d != 0 || (base / sj) % d != 0 {
                continue;
            }
            for k in 0..dd {
                x[k] = self.amps[base + offsets[k]];
            }
            for (row, &off) in gate.matrix.chunks_exact(dd).zip(&offsets[..dd]) {
                self.amps[base + off] = row.iter().zip(&x[..dd]).map(|(g, v)| g * v).sum();
            }
        }
        Ok(())
    }

    /// `Σ_x conj(self_x) · other_x`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.local_dim != other.local_dim || self.sites != other.sites {
            return Err(Error::arg("inner product of states with different shapes"));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`, with `self` on the leading sites.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        if self.local_dim != other.local_dim {
            return Err(Error::arg("tensor product of different local dimensions"));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        StateVector::from_amplitudes(self.local_dim, self.sites + other.sites, amps)
    }

    /// Relabels sites: site `s` of the result is site `perm[s]` of `self`.
    pub fn permute_sites(&self, perm: &[usize]) -> Result<StateVector> {
        let n = self.sites;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::arg("site permutation is not a bijection"));
        }
        let d = self.local_dim;
        let strides: Vec<usize> = perm.iter().map(|&p| self.stride(p)).collect();
        let amps = (0..self.amps.len())
            .map(|idx| {
                let mut rest = idx;
                let mut src = 0;
                for s in (0..n).rev() {
                    src += (rest % d) * strides[s];
                    rest /= d;
                }
                self.amps[src]
            })
            .collect();
        StateVector::from_amplitudes(d, n, amps)
    }
}

/// A `d²×d²` unitary acting on two sites, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQuditGate {
    local_dim: usize,
    matrix: Vec<Complex64>,
}

impl TwoQuditGate {
    /// Accepts a row-major `d²×d²` matrix if `U†U = I` within 1e-10.
    pub fn new(local_dim: usize, matrix: Vec<Complex64>) -> Result<Self> {
        check_dim(local_dim)?;
        let n = local_dim * local_dim;
        if matrix.len() != n * n {
            return Err(Error::arg("two-qudit gate has the wrong size"));
        }
        let deviation = unitarity_defect(&matrix, n);
        if deviation.is_nan() || deviation > 1e-10 {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(Self { local_dim, matrix })
    }

    pub fn identity(local_dim: usize) -> Result<Self> {
        let n = local_dim * local_dim;
        let mut m = vec![ZERO; n * n];
        for i in 0..n {
            m[i * n + i] = ONE;
        }
        Self::new(local_dim, m)
    }

    pub fn swap(local_dim: usize) -> Result<Self> {
        let d = local_dim;
        let n = d * d;
        let mut m = vec![ZERO; n * n];
        for a in 0..d {
            for b in 0..d {
                m[(b * d + a) * n + (a * d + b)] = ONE;
            }
        }
        Self::new(local_dim, m)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }
}

/// `max |(U†U - I)_{ij}|` for a row-major `n×n` matrix.
pub fn unitarity_defect(u: &[Complex64], n: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for k in 0..n {
                acc += u[k * n + i].conj() * u[k * n + j];
            }
            if i == j {
                acc -= ONE;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// Dense density matrix stored column-major: `ρ_{r,c} = data[r + c·dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    local_dim: usize,
    sites: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_column_major(local_dim: usize, sites: usize, data: Vec<Complex64>) -> Result<Self> {
        let dim = hilbert_dim(local_dim, sites)?;
        if data.len() != dim * dim {
            return Err(Error::arg(alloc::format!(
                "expected {} density-matrix entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self {
            local_dim,
            sites,
            dim,
            data,
        })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let dim = psi.len();
        let a = psi.amplitudes();
        let mut data = Vec::with_capacity(dim * dim);
        for c in 0..dim {
            let ac = a[c].conj();
            data.extend(a.iter().map(|ar| ar * ac));
        }
        Self::from_column_major(psi.local_dim(), psi.sites(), data)
    }

    /// `I / d^N`.
    pub fn maximally_mixed(local_dim: usize, sites: usize) -> Result<Self> {
        let dim = hilbert_dim(local_dim, sites)?;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i + i * dim] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self::from_column_major(local_dim, sites, data)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Side length `d^N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column_major(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_column_major(self) -> Vec<Complex64> {
        self.data
    }

    pub fn byte_size(&self) -> usize {
        self.data.len() * core::mem::size_of::<Complex64>()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row + col * self.dim]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Checks Hermiticity and unit trace within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidDensityMatrix(alloc::format!(
                "trace is {tr}, expected 1"
            )));
        }
        for c in 0..self.dim {
            for r in 0..=c {
                let dev = (self.get(r, c) - self.get(c, r).conj()).norm();
                if dev > tol {
                    return Err(Error::InvalidDensityMatrix(alloc::format!(
                        "not Hermitian at ({r}, {c}): deviation {dev:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `Tr_B |ψ⟩⟨ψ|` keeping the sites in `keep` (listed in any order; the
/// result orders them ascending).
pub fn reduced_density_matrix(psi: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = psi.sites();
    let d = psi.local_dim();
    if keep.is_empty() {
        return Err(Error::arg("reduced density matrix needs at least one kept site"));
    }
    let mut kept = vec![false; n];
    for &s in keep {
        if s >= n {
            return Err(Error::arg(alloc::format!("kept site {s} out of range for {n} sites")));
        }
        if core::mem::replace(&mut kept[s], true) {
            return Err(Error::arg(alloc::format!("kept site {s} listed twice")));
        }
    }
    let n_a = keep.len();
    let dim_a = d.pow(n_a as u32);
    let dim_b = d.pow((n - n_a) as u32);

    // Reshape ψ into a dim_a × dim_b matrix (row-major in the B index).
    let mut psi_ab = vec![ZERO; dim_a * dim_b];
    for (idx, amp) in psi.amplitudes().iter().enumerate() {
        let (mut ia, mut ib) = (0, 0);
        let mut rest = idx;
        let (mut wa, mut wb) = (1, 1);
        for s in (0..n).rev() {
            let digit = rest % d;
            rest /= d;
            if kept[s] {
                ia += digit * wa;
                wa *= d;
            } else {
                ib += digit * wb;
                wb *= d;
            }
        }
        psi_ab[ia * dim_b + ib] = *amp;
    }

    let mut data = vec![ZERO; dim_a * dim_a];
    for c in 0..dim_a {
        let col = &psi_ab[c * dim_b..(c + 1) * dim_b];
        for r in c..dim_a {
            let row = &psi_ab[r * dim_b..(r + 1) * dim_b];
            let v: Complex64 = row.iter().zip(col).map(|(x, y)| x * y.conj()).sum();
            data[r + c * dim_a] = v;
            data[c + r * dim_a] = v.conj();
        }
    }
    DensityMatrix::from_column_major(d, n_a, data)
}
