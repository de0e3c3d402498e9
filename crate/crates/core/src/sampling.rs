//! Monte-Carlo estimation of the stabilizer Rényi entropy.
//!
//! ## Thermodynamic integration ([`mc_sre`])
//!
//! Each X-pattern `a ∈ Z_2^N` gets the energy `f(a) = -ln(S(a) + ε)` with
//! `S(a) = Σ_b |⟨ψ|X_a Z_b|ψ⟩|⁴`, evaluated by one Walsh–Hadamard transform.
//! The log is natural so that `Z_β = Σ_a e^{-β f(a)}` satisfies
//! `Z_1 = S_2 + 2^N ε` and `Z_0 = 2^N` exactly. With `⟨f⟩_β = -∂_β ln Z_β`,
//!
//! ```text
//! I = ∫_0^1 ⟨f⟩_β dβ = ln Z_0 - ln Z_1,    M_2 = -log2(e^{-I} - ε)
//! ```
//!
//! which for `ε = 0` is simply `M_2 = I / ln 2`. The integral is evaluated
//! with composite Simpson weights on an odd grid `β_ℓ = ℓ / (L - 1)`, and
//! `⟨f⟩_{β_ℓ}` is estimated by an independent Metropolis chain per grid point.
//!
//! ## Direct sampling ([`mc_sre_direct`])
//!
//! Metropolis over Pauli strings with stationary law `π(P) ∝ ⟨P⟩²`, the
//! identity excluded and its unit contribution added back afterwards.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chunk::{ChunkPlan, Executor};
use crate::error::{Error, Result};
use crate::math;
use crate::sre::z_overlaps_for_mask;
use crate::state::StateVector;

const LN2: f64 = core::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Number of β grid points `L`; odd and at least 3 (Simpson rule).
    pub grid_points: usize,
    /// Recorded samples per chain, `n_S`.
    pub samples_per_beta: usize,
    /// Discarded steps per chain; `None` means `10 · N`.
    pub burn_in: Option<usize>,
    pub seed: u64,
    /// Regularization `ε ≥ 0`.
    pub epsilon: f64,
    /// Positions re-randomized per proposal.
    pub move_width: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            grid_points: 11,
            samples_per_beta: 1000,
            burn_in: None,
            seed: 0,
            epsilon: 0.0,
            move_width: 1,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self, sites: usize) -> Result<()> {
        if self.grid_points < 3 || self.grid_points.is_multiple_of(2) {
            return Err(Error::arg(alloc::format!(
                "the Simpson grid needs an odd number of points >= 3, got {}",
                self.grid_points
            )));
        }
        if self.samples_per_beta == 0 {
            return Err(Error::arg("samples per beta must be at least 1"));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::arg(alloc::format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.move_width == 0 || self.move_width > sites {
            return Err(Error::arg(alloc::format!(
                "move width must be in 1..={sites}, got {}",
                self.move_width
            )));
        }
        Ok(())
    }

    pub fn burn_in_for(&self, sites: usize) -> usize {
        self.burn_in.unwrap_or(10 * sites)
    }
}

/// One Markov chain at fixed β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainState {
    pub beta: f64,
    /// X-pattern as a flat bit mask.
    pub pattern: usize,
    /// Cached `f(pattern)`.
    pub energy: f64,
    pub accept_count: u64,
    pub step_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSreResult {
    pub m2_hat: f64,
    pub stderr: f64,
    /// Quadrature estimate of `∫⟨f⟩_β dβ` (natural-log units).
    pub integral: f64,
    pub betas: Vec<f64>,
    pub weights: Vec<f64>,
    pub per_beta_means: Vec<f64>,
    pub per_beta_variance: Vec<f64>,
    pub acceptance_rates: Vec<f64>,
    pub tau_int: Vec<f64>,
    /// `1 + ε / (S_2 / 2^N)`, the factor by which ε inflates the error.
    pub epsilon_amplification: f64,
}

/// Reusable energy evaluator holding a scratch buffer.
pub struct EnergyEval<'a> {
    alpha: &'a [Complex64],
    epsilon: f64,
    scratch: Vec<Complex64>,
}

impl<'a> EnergyEval<'a> {
    pub fn new(psi: &'a StateVector, epsilon: f64) -> Result<Self> {
        psi.require_dim(2)?;
        Ok(Self {
            alpha: psi.amplitudes(),
            epsilon,
            scratch: vec![Complex64::new(0.0, 0.0); psi.len()],
        })
    }

    /// `S(a) = Σ_b |χ_b(a)|⁴`.
    pub fn inner_sum(&mut self, pattern: usize) -> f64 {
        z_overlaps_for_mask(self.alpha, pattern, &mut self.scratch);
        self.scratch
            .iter()
            .map(|c| {
                let p = c.norm_sqr();
                p * p
            })
            .sum()
    }

    pub fn energy(&mut self, pattern: usize) -> Result<f64> {
        let s = self.inner_sum(pattern) + self.epsilon;
        if s <= 0.0 {
            return Err(Error::InfiniteEnergy {
                pattern: pattern as u64,
            });
        }
        Ok(-math::ln(s))
    }
}

/// `f_ε(a) = -ln(S(a) + ε)` for the X-pattern `pattern` (flat bit mask,
/// bit `p` = site `N-1-p`).
pub fn eval_energy(psi: &StateVector, pattern: usize, epsilon: f64) -> Result<f64> {
    psi.check_normalized()?;
    if pattern >= psi.len() {
        return Err(Error::arg("X-pattern out of range"));
    }
    EnergyEval::new(psi, epsilon)?.energy(pattern)
}

/// Energies of all `2^N` X-patterns, indexed by mask.
pub fn energy_landscape(psi: &StateVector, epsilon: f64) -> Result<Vec<f64>> {
    psi.check_normalized()?;
    let mut eval = EnergyEval::new(psi, epsilon)?;
    (0..psi.len()).map(|a| eval.energy(a)).collect()
}

/// Exact `(⟨f⟩_β, Var_β f)` under `Π_β ∝ e^{-β f}`.
pub fn boltzmann_moments(energies: &[f64], beta: f64) -> (f64, f64) {
    let f_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for &f in energies {
        let w = math::exp(-beta * (f - f_min));
        z += w;
        m1 += w * f;
        m2 += w * f * f;
    }
    let mean = m1 / z;
    (mean, (m2 / z - mean * mean).max(0.0))
}

/// Composite Simpson weights on `L` equally spaced points of `[0, 1]`.
pub fn simpson_weights(grid_points: usize) -> Result<Vec<f64>> {
    if grid_points < 3 || grid_points.is_multiple_of(2) {
        return Err(Error::arg("Simpson's rule needs an odd number of points >= 3"));
    }
    let h = 1.0 / (grid_points - 1) as f64;
    Ok((0..grid_points)
        .map(|l| {
            let c = if l == 0 || l == grid_points - 1 {
                1.0
            } else if l % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect())
}

fn beta_grid(grid_points: usize) -> Vec<f64> {
    (0..grid_points).map(|l| l as f64 / (grid_points - 1) as f64).collect()
}

/// Quadrature-only estimate of `M_2`: `⟨f⟩_β` by exact enumeration of all
/// patterns at every grid point, then the same Simpson rule as [`mc_sre`].
pub fn ti_sre_exact(psi: &StateVector, grid_points: usize) -> Result<f64> {
    let weights = simpson_weights(grid_points)?;
    let energies = energy_landscape(psi, 0.0)?;
    let integral: f64 = beta_grid(grid_points)
        .iter()
        .zip(&weights)
        .map(|(&b, w)| w * boltzmann_moments(&energies, b).0)
        .sum();
    Ok(integral / LN2)
}

/// Sample statistics with a batch-means error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesStats {
    pub mean: f64,
    pub variance: f64,
    /// Variance of the sample mean, from batch means.
    pub variance_of_mean: f64,
    /// Integrated autocorrelation time implied by the batch means.
    pub tau_int: f64,
}

/// Mean, variance and batch-means error of a correlated series, with
/// `⌊√n⌋` batches.
pub fn series_stats(xs: &[f64]) -> SeriesStats {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let batches = math::sqrt(n as f64) as usize;
    let variance_of_mean = if batches >= 2 {
        let size = n / batches;
        let used = &xs[n - batches * size..];
        let means: Vec<f64> = used
            .chunks_exact(size)
            .map(|c| c.iter().sum::<f64>() / size as f64)
            .collect();
        let grand = means.iter().sum::<f64>() / batches as f64;
        let var_b = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (batches - 1) as f64;
        var_b / batches as f64
    } else {
        variance / n as f64
    };
    let tau_int = if variance > 0.0 {
        variance_of_mean * n as f64 / (2.0 * variance)
    } else {
        0.5
    };
    SeriesStats {
        mean,
        variance,
        variance_of_mean,
        tau_int,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    pub state: ChainState,
    pub samples: Vec<f64>,
}

/// Picks `width` distinct positions and re-randomizes their bits.
fn propose(pattern: usize, sites: usize, width: usize, rng: &mut impl Rng) -> usize {
    let mut next = pattern;
    let mut touched = 0usize;
    let mut picked = 0;
    while picked < width {
        let p = rng.random_range(0..sites);
        if touched & (1 << p) != 0 {
            continue;
        }
        touched |= 1 << p;
        picked += 1;
        if rng.random::<bool>() {
            next |= 1 << p;
        } else {
            next &= !(1 << p);
        }
    }
    next
}

/// Runs one Metropolis chain at `beta` with its own RNG seed.
pub fn run_chain(psi: &StateVector, beta: f64, cfg: &SamplerConfig, seed: u64) -> Result<ChainRun> {
    let n = psi.sites();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eval = EnergyEval::new(psi, cfg.epsilon)?;
    let start = rng.random_range(0..psi.len());
    let mut state = ChainState {
        beta,
        pattern: start,
        energy: eval.energy(start)?,
        accept_count: 0,
        step_count: 0,
    };
    let burn_in = cfg.burn_in_for(n);
    let mut samples = Vec::with_capacity(cfg.samples_per_beta);
    for step in 0..burn_in + cfg.samples_per_beta {
        let candidate = propose(state.pattern, n, cfg.move_width, &mut rng);
        let accepted = if candidate == state.pattern {
            true
        } else {
            let f_new = eval.energy(candidate)?;
            let delta = f_new - state.energy;
            let ok = delta <= 0.0 || rng.random::<f64>() < math::exp(-beta * delta);
            if ok {
                state.pattern = candidate;
                state.energy = f_new;
            }
            ok
        };
        if step >= burn_in {
            state.step_count += 1;
            state.accept_count += u64::from(accepted);
            samples.push(state.energy);
        }
    }
    Ok(ChainRun { state, samples })
}

/// Thermodynamic-integration estimate of `M_2`, one chain per grid point.
///
/// Chain `ℓ` is seeded with `seed ^ ℓ`; chains run through `exec` and are
/// merged in `ℓ` order.
pub fn mc_sre<E: Executor + ?Sized>(psi: &StateVector, cfg: &SamplerConfig, exec: &E) -> Result<McSreResult> {
    psi.require_dim(2)?;
    psi.check_normalized()?;
    cfg.validate(psi.sites())?;
    let betas = beta_grid(cfg.grid_points);
    let weights = simpson_weights(cfg.grid_points)?;

    let plan = ChunkPlan::with_chunk_size(cfg.grid_points, 1);
    let runs = exec.map_chunks(&plan, |l, _| {
        let run = run_chain(psi, betas[l], cfg, cfg.seed ^ l as u64)?;
        let stats = series_stats(&run.samples);
        let rate = run.state.accept_count as f64 / run.state.step_count as f64;
        Ok((stats, rate))
    })?;

    let per_beta_means: Vec<f64> = runs.iter().map(|(s, _)| s.mean).collect();
    let integral: f64 = weights.iter().zip(&per_beta_means).map(|(w, m)| w * m).sum();
    let var_integral: f64 = weights
        .iter()
        .zip(&runs)
        .map(|(w, (s, _))| w * w * s.variance_of_mean)
        .sum();

    let (m2_hat, amplification) = if cfg.epsilon == 0.0 {
        (integral / LN2, 1.0)
    } else {
        // S_2 / 2^N = e^{-I} - ε
        let density = math::exp(-integral) - cfg.epsilon;
        if density <= 0.0 {
            return Err(Error::Consistency(alloc::format!(
                "estimated S_2/2^N = {density:e} is not positive; epsilon = {} dominates the signal",
                cfg.epsilon
            )));
        }
        (-math::log2(density), 1.0 + cfg.epsilon / density)
    };

    Ok(McSreResult {
        m2_hat,
        stderr: amplification * math::sqrt(var_integral) / LN2,
        integral,
        betas,
        weights,
        per_beta_means,
        per_beta_variance: runs.iter().map(|(s, _)| s.variance).collect(),
        acceptance_rates: runs.iter().map(|(_, r)| *r).collect(),
        tau_int: runs.iter().map(|(s, _)| s.tau_int).collect(),
        epsilon_amplification: amplification,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectConfig {
    pub samples: usize,
    /// `None` means `10 · N`.
    pub burn_in: Option<usize>,
    pub seed: u64,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            burn_in: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectEstimate {
    pub m_q_hat: f64,
    pub stderr: f64,
    /// Estimate of `S_q / 2^N` including the identity.
    pub s_q_density: f64,
    pub acceptance_rate: f64,
}

/// `|⟨ψ|X_a Z_b|ψ⟩|²` by direct summation.
fn pauli_weight(alpha: &[Complex64], a: usize, b: usize) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, amp) in alpha.iter().enumerate() {
        let term = alpha[x ^ a].conj() * amp;
        if (b & x).count_ones().is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc.norm_sqr()
}

/// Direct Metropolis sampler of `π(P) ∝ ⟨P⟩²` over non-identity Pauli
/// strings, estimating `M_q` for `q > 1`.
pub fn mc_sre_direct(psi: &StateVector, q: f64, cfg: &DirectConfig) -> Result<DirectEstimate> {
    psi.require_dim(2)?;
    psi.check_normalized()?;
    if !(q.is_finite() && q > 1.0) {
        return Err(Error::arg(alloc::format!("direct sampling needs q > 1, got {q}")));
    }
    if cfg.samples == 0 {
        return Err(Error::arg("samples must be at least 1"));
    }
    let n = psi.sites();
    let dim = psi.len();
    let alpha = psi.amplitudes();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Start from a random non-identity string with non-zero weight, falling
    // back to a scan for states with very sparse Pauli spectra.
    let mut current = None;
    for _ in 0..64 {
        let (a, b) = (rng.random_range(0..dim), rng.random_range(0..dim));
        if (a, b) != (0, 0) {
            let w = pauli_weight(alpha, a, b);
            if w > 1e-12 {
                current = Some((a, b, w));
                break;
            }
        }
    }
    let (mut a, mut b, mut w) = match current {
        Some(c) => c,
        None => {
            let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
            let mut found = None;
            'scan: for a in 0..dim {
                z_overlaps_for_mask(alpha, a, &mut scratch);
                for (b, c) in scratch.iter().enumerate() {
                    if (a, b) != (0, 0) && c.norm_sqr() > 1e-12 {
                        found = Some((a, b, c.norm_sqr()));
                        break 'scan;
                    }
                }
            }
            found.ok_or_else(|| Error::Consistency("state has no non-identity Pauli weight".into()))?
        }
    };

    let burn_in = cfg.burn_in.unwrap_or(10 * n);
    let mut values = Vec::with_capacity(cfg.samples);
    let mut accepted = 0u64;
    for step in 0..burn_in + cfg.samples {
        // X, Y or Z toggle on one site
        let bit = 1usize << rng.random_range(0..n);
        let (na, nb) = match rng.random_range(0..3) {
            0 => (a ^ bit, b),
            1 => (a ^ bit, b ^ bit),
            _ => (a, b ^ bit),
        };
        let mut ok = false;
        if (na, nb) != (0, 0) {
            let nw = pauli_weight(alpha, na, nb);
            if nw >= w || rng.random::<f64>() * w < nw {
                a = na;
                b = nb;
                w = nw;
                ok = true;
            }
        }
        if step >= burn_in {
            accepted += u64::from(ok);
            values.push(if q == 2.0 { w } else { math::powf(w, q - 1.0) });
        }
    }

    let stats = series_stats(&values);
    let frac = (dim - 1) as f64 / dim as f64;
    let density = 1.0 / dim as f64 + frac * stats.mean;
    let delta_density = frac * math::sqrt(stats.variance_of_mean);
    Ok(DirectEstimate {
        m_q_hat: math::log2(density) / (1.0 - q),
        stderr: delta_density / (density * LN2 * (q - 1.0)),
        s_q_density: density,
        acceptance_rate: accepted as f64 / cfg.samples as f64,
    })
}
