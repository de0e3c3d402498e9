//! Runtime scaling tables for the fast SRE and mana sweeps.

use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use magicvec_core::circuit::random_state;
use magicvec_core::{mana_fast, sre_fast, Error, Executor, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Sre,
    Mana,
}

impl Suite {
    pub fn local_dim(self) -> usize {
        match self {
            Suite::Sre => 2,
            Suite::Mana => 3,
        }
    }

    /// Expected runtime ratio from `N - 1` to `N` sites for an `O(N d^{2N})`
    /// sweep.
    pub fn target_ratio(self, n: usize) -> f64 {
        let d = self.local_dim() as f64;
        d * d * n as f64 / (n - 1) as f64
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sre" => Ok(Suite::Sre),
            "mana" => Ok(Suite::Mana),
            other => Err(Error::InvalidArgument(format!("unknown bench suite '{other}'"))),
        }
    }
}

/// Parses `A..B` (inclusive) site ranges.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::InvalidArgument(format!("expected a range like 10..14, got '{s}'"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let (a, b) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub sites: usize,
    pub seconds: f64,
    /// Runtime relative to the previous row.
    pub ratio: Option<f64>,
    pub target_ratio: Option<f64>,
}

/// Best-of-`reps` wall time of one fast sweep per size.
pub fn run<E: Executor + ?Sized>(suite: Suite, sites: RangeInclusive<usize>, reps: usize, exec: &E) -> Result<Vec<BenchRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let time_one = |n: usize, rng: &mut ChaCha8Rng| -> Result<f64> {
        let psi = random_state(suite.local_dim(), n, rng)?;
        let mut best = f64::INFINITY;
        for _ in 0..reps.max(1) {
            let t = Instant::now();
            match suite {
                Suite::Sre => {
                    sre_fast(&psi, 2.0, exec)?;
                }
                Suite::Mana => {
                    mana_fast(&psi, exec)?;
                }
            }
            best = best.min(t.elapsed().as_secs_f64());
        }
        Ok(best)
    };
    // warm caches and thread start-up on the smallest size
    time_one(*sites.start(), &mut rng)?;

    let mut rows: Vec<BenchRow> = Vec::new();
    for n in sites {
        let seconds = time_one(n, &mut rng)?;
        let ratio = rows.last().map(|prev| seconds / prev.seconds);
        rows.push(BenchRow {
            sites: n,
            seconds,
            ratio,
            target_ratio: ratio.map(|_| suite.target_ratio(n)),
        });
    }
    Ok(rows)
}

pub fn write_csv(w: &mut impl Write, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(w, "n,seconds,ratio,target_ratio")?;
    for r in rows {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.4}"));
        writeln!(w, "{},{:.6},{},{}", r.sites, r.seconds, opt(r.ratio), opt(r.target_ratio))?;
    }
    Ok(())
}
