//! Unnormalized in-place tensor-product transforms.
//!
//! * [`fwht_inplace`]: `H_2^{⊗N}` with `H_2 = [[1, 1], [1, -1]]`.
//! * [`ft3_inplace`]: `F_3^{⊗N}` with `(F_3)_{jk} = ω^{2jk}`, `ω = e^{2πi/3}`.
//! * [`apply_kron9_inplace`]: `M^{⊗N}` for an arbitrary 9×9 matrix, by leg sweep.
//!
//! None of them carry `1/√d` factors.

use num_complex::Complex64;

use crate::error::{Error, Result};

const SQRT3_HALF: f64 = 0.866_025_403_784_438_6;

/// Returns `N` if `len == base^N` with `N >= 0`.
pub fn exact_log(base: usize, len: usize) -> Option<usize> {
    if len == 0 {
        return None;
    }
    let mut n = 0;
    let mut rest = len;
    while rest.is_multiple_of(base) {
        rest /= base;
        n += 1;
    }
    (rest == 1).then_some(n)
}

/// Fast Walsh–Hadamard transform, `O(N 2^N)`.
pub fn fwht_inplace(buf: &mut [Complex64]) -> Result<()> {
    if exact_log(2, buf.len()).is_none() {
        return Err(Error::arg(alloc::format!(
            "Walsh-Hadamard buffer length {} is not a power of two",
            buf.len()
        )));
    }
    fwht_unchecked(buf);
    Ok(())
}

#[inline]
pub(crate) fn fwht_unchecked(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut half = 1;
    while half < n {
        for block in buf.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let s = *a + *b;
                let d = *a - *b;
                *a = s;
                *b = d;
            }
        }
        half *= 2;
    }
}

/// Fast `Z_3^N` Fourier transform with kernel `ω^{2jk}`, `O(N 3^N)`.
pub fn ft3_inplace(buf: &mut [Complex64]) -> Result<()> {
    if exact_log(3, buf.len()).is_none() {
        return Err(Error::arg(alloc::format!(
            "ternary transform buffer length {} is not a power of three",
            buf.len()
        )));
    }
    ft3_unchecked(buf);
    Ok(())
}

#[inline]
pub(crate) fn ft3_unchecked(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut stride = 1;
    while stride < n {
        for block in buf.chunks_exact_mut(3 * stride) {
            let (x0s, rest) = block.split_at_mut(stride);
            let (x1s, x2s) = rest.split_at_mut(stride);
            for ((x0, x1), x2) in x0s.iter_mut().zip(x1s.iter_mut()).zip(x2s.iter_mut()) {
                // y0 = x0 + x1 + x2
                // y1 = x0 + ω² x1 + ω x2
                // y2 = x0 + ω x1 + ω² x2
                let s = *x1 + *x2;
                let d = *x1 - *x2;
                let re = *x0 - s * 0.5;
                // i·(√3/2)·d
                let rot = Complex64::new(-d.im * SQRT3_HALF, d.re * SQRT3_HALF);
                *x0 += s;
                *x1 = re - rot;
                *x2 = re + rot;
            }
        }
        stride *= 3;
    }
}

/// A dense 9×9 complex matrix, row-major.
pub type Mat9 = [[Complex64; 9]; 9];

/// Applies `m^{⊗N}` to a buffer of length `9^N`, one leg at a time.
///
/// Leg `ℓ` (0 = most significant base-9 digit) has stride `9^(N-1-ℓ)`; every
/// fiber of nine strided entries is replaced by `m` times that fiber.
pub fn apply_kron9_inplace(m: &Mat9, buf: &mut [Complex64]) -> Result<()> {
    let Some(legs) = exact_log(9, buf.len()) else {
        return Err(Error::arg(alloc::format!(
            "kron9 buffer length {} is not a power of nine",
            buf.len()
        )));
    };
    let mut x = [Complex64::new(0.0, 0.0); 9];
    for leg in 0..legs {
        let stride = 9usize.pow((legs - 1 - leg) as u32);
        for block in buf.chunks_exact_mut(9 * stride) {
            for offset in 0..stride {
                for (a, xa) in x.iter_mut().enumerate() {
                    *xa = block[offset + a * stride];
                }
                for (row, out) in m.iter().zip(0..9) {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (mij, xj) in row.iter().zip(x.iter()) {
                        acc += mij * xj;
                    }
                    block[offset + out * stride] = acc;
                }
            }
        }
    }
    Ok(())
}
