//! Binary and ternary Gray sequences over `Z_base^N`.
//!
//! Patterns are digit strings indexed by *position* `p = 0..N`, where
//! position `p` carries weight `base^p` in the flat integer encoding. With
//! the state-vector convention (site 0 is the most significant digit),
//! position `p` is site `N - 1 - p`; see [`position_to_site`].
//!
//! Base 2 is the reflected binary code `k ^ (k >> 1)`. Base 3 is the modular
//! code whose digit `i` is `(t_i - t_{i+1}) mod 3` for the base-3 digits `t`
//! of `k`. Both step by changing a single digit, by `+1 mod base`, and both
//! are cyclic (the last element is one step away from the first).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest `N` such that `base^N` fits comfortably in a `usize` index.
fn max_len(base: u8) -> usize {
    match base {
        2 => 62,
        _ => 39,
    }
}

fn check_shape(base: u8, len: usize) -> Result<usize> {
    if base != 2 && base != 3 {
        return Err(Error::arg(alloc::format!("Gray base must be 2 or 3, got {base}")));
    }
    if len == 0 || len > max_len(base) {
        return Err(Error::arg(alloc::format!(
            "Gray length must be in 1..={}, got {len}",
            max_len(base)
        )));
    }
    Ok((base as usize).pow(len as u32))
}

/// The `k`-th element of the Gray sequence over `Z_base^len`, as digits by position.
pub fn gray_at(base: u8, len: usize, k: usize) -> Result<Vec<u8>> {
    let code = gray_code(base, len, k)?;
    Ok(decode(base, len, code))
}

/// The `k`-th Gray element in flat encoding `sum_p digit_p * base^p`.
pub fn gray_code(base: u8, len: usize, k: usize) -> Result<usize> {
    let total = check_shape(base, len)?;
    if k >= total {
        return Err(Error::arg(alloc::format!(
            "Gray index {k} out of range for {base}^{len}"
        )));
    }
    Ok(gray_code_unchecked(base, k))
}

#[inline]
pub(crate) fn gray_code_unchecked(base: u8, k: usize) -> usize {
    if base == 2 {
        return k ^ (k >> 1);
    }
    let mut code = 0;
    let mut weight = 1;
    let mut rest = k;
    while rest > 0 {
        let t = rest % 3;
        let t_next = (rest / 3) % 3;
        code += ((t + 3 - t_next) % 3) * weight;
        weight *= 3;
        rest /= 3;
    }
    code
}

fn decode(base: u8, len: usize, mut code: usize) -> Vec<u8> {
    let b = base as usize;
    let mut digits = vec![0u8; len];
    for d in digits.iter_mut() {
        *d = (code % b) as u8;
        code /= b;
    }
    digits
}

/// Maps a Gray position to the site index of a state with `sites` sites.
#[inline]
pub fn position_to_site(sites: usize, position: usize) -> usize {
    sites - 1 - position
}

/// One step of a Gray sequence: which position changed and by how much.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrayStep {
    pub position: usize,
    /// Always 1: a bit flip for base 2, `+1 mod 3` for base 3.
    pub delta: u8,
}

/// A position in a Gray sequence, advanced in O(1) amortized time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayCursor {
    base: u8,
    index: usize,
    total: usize,
    pattern: Vec<u8>,
    code: usize,
    weights: Vec<usize>,
}

impl GrayCursor {
    pub fn new(base: u8, len: usize) -> Result<Self> {
        Self::at(base, len, 0)
    }

    /// Cursor positioned at sequence index `k` (random access, O(N)).
    pub fn at(base: u8, len: usize, k: usize) -> Result<Self> {
        let total = check_shape(base, len)?;
        let code = gray_code(base, len, k)?;
        let b = base as usize;
        let weights = (0..len).map(|p| b.pow(p as u32)).collect();
        Ok(Self {
            base,
            index: k,
            total,
            pattern: decode(base, len, code),
            code,
            weights,
        })
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn pattern(&self) -> &[u8] {
        &self.pattern
    }

    /// Flat encoding `sum_p pattern[p] * base^p`.
    pub fn code(&self) -> usize {
        self.code
    }

    /// Advances to the next element. Fails with
    /// [`Error::SequenceExhausted`] at the last element.
    pub fn next_gray(&mut self) -> Result<GrayStep> {
        if self.index + 1 >= self.total {
            return Err(Error::SequenceExhausted);
        }
        // The changed digit sits at the number of trailing (base-1) digits of k.
        let b = self.base as usize;
        let mut k = self.index;
        let mut position = 0;
        while k % b == b - 1 {
            k /= b;
            position += 1;
        }
        let digit = &mut self.pattern[position];
        if *digit as usize == b - 1 {
            *digit = 0;
            self.code -= (b - 1) * self.weights[position];
        } else {
            *digit += 1;
            self.code += self.weights[position];
        }
        self.index += 1;
        Ok(GrayStep { position, delta: 1 })
    }
}
