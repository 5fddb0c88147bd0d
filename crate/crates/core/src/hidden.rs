//! Monte Carlo realization of the hidden-measurement dynamics.
//!
//! Each trial draws `λ` uniformly on the simplex and reports the outcome of
//! the sub-simplex containing it. Relative frequencies over many trials
//! estimate `μ`.
//!
//! # Reproducibility
//!
//! Trials are cut into chunks of [`CHUNK_TRIALS`]; the last chunk holds the
//! remainder. Chunk `i` draws from its own `ChaCha8Rng`, seeded with
//! `ChaCha8Rng::seed_from_u64(chunk_seed(seed, i))` where
//!
//! ```text
//! mix64(z) = splitmix64 finalizer of z + 0x9E3779B97F4A7C15
//! chunk_seed(seed, i) = mix64(seed ^ mix64(i))
//! ```
//!
//! Worker streams only decide which thread runs which chunks (contiguous
//! runs, remainder to the last stream), so a report depends on
//! `(mu, trials, seed)` and never on `streams` or on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::ProbabilityVector;
use crate::simplex::{classify_point, sample_simplex_uniform, Classification};

/// Redraws allowed when `λ` lands on a boundary before giving up.
pub const MAX_BOUNDARY_REDRAWS: u32 = 64;
/// Trials per independently seeded chunk.
pub const CHUNK_TRIALS: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("streams must be at least 1")]
    NoStreams,
    #[error("{0} consecutive boundary draws; RNG or input is degenerate")]
    BoundaryCapExceeded(u32),
    #[error("merged counts {merged} do not match trials {trials}")]
    MergeMismatch { merged: u64, trials: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub streams: usize,
}

impl SimulationConfig {
    pub fn new(trials: u64, seed: u64, streams: usize) -> Result<Self, SimulationError> {
        let config = Self {
            trials,
            seed,
            streams,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), SimulationError> {
        if self.trials == 0 {
            return Err(SimulationError::NoTrials);
        }
        if self.streams == 0 {
            return Err(SimulationError::NoStreams);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub trials: u64,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub boundary_resamples: u64,
    pub target_mu: ProbabilityVector,
    /// `3 √(μ_j (1 − μ_j) / trials)` per outcome.
    pub three_sigma: Vec<f64>,
    /// Counts contributed by each worker stream, in stream order.
    pub stream_counts: Vec<Vec<u64>>,
}

impl FrequencyReport {
    pub fn deviations(&self) -> Vec<f64> {
        self.frequencies
            .iter()
            .zip(self.target_mu.iter())
            .map(|(f, m)| f - m)
            .collect()
    }

    pub fn within_three_sigma(&self) -> Vec<bool> {
        self.deviations()
            .iter()
            .zip(&self.three_sigma)
            .map(|(d, s)| d.abs() <= *s)
            .collect()
    }
}

pub fn mix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn chunk_seed(seed: u64, chunk: u64) -> u64 {
    mix64(seed ^ mix64(chunk))
}

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(chunk_seed(seed, chunk))
}

/// One measurement: draw `λ`, classify, redraw on a boundary hit.
pub fn run_trial<R: Rng + ?Sized>(
    mu: &ProbabilityVector,
    rng: &mut R,
) -> Result<usize, SimulationError> {
    run_trial_counting(mu, rng).map(|(j, _)| j)
}

fn run_trial_counting<R: Rng + ?Sized>(
    mu: &ProbabilityVector,
    rng: &mut R,
) -> Result<(usize, u32), SimulationError> {
    for redraws in 0..=MAX_BOUNDARY_REDRAWS {
        let lambda = sample_simplex_uniform(mu.len(), rng);
        let class = classify_point(&lambda, mu).expect("sampled point matches mu dimension");
        if let Classification::Determined(j) = class {
            return Ok((j, redraws));
        }
    }
    Err(SimulationError::BoundaryCapExceeded(MAX_BOUNDARY_REDRAWS))
}

struct Tally {
    counts: Vec<u64>,
    resamples: u64,
}

fn run_chunks(
    mu: &ProbabilityVector,
    config: &SimulationConfig,
    chunks: std::ops::Range<u64>,
) -> Result<Tally, SimulationError> {
    let mut tally = Tally {
        counts: vec![0; mu.len()],
        resamples: 0,
    };
    for chunk in chunks {
        let start = chunk * CHUNK_TRIALS;
        let len = CHUNK_TRIALS.min(config.trials - start);
        let mut rng = chunk_rng(config.seed, chunk);
        for _ in 0..len {
            let (j, redraws) = run_trial_counting(mu, &mut rng)?;
            tally.counts[j] += 1;
            tally.resamples += u64::from(redraws);
        }
    }
    Ok(tally)
}

/// Runs `config.trials` trials and tallies outcome frequencies.
pub fn simulate(
    mu: &ProbabilityVector,
    config: &SimulationConfig,
) -> Result<FrequencyReport, SimulationError> {
    config.validate()?;
    let n_chunks = config.trials.div_ceil(CHUNK_TRIALS);
    let streams = config.streams as u64;
    let per_stream = n_chunks / streams;
    let ranges: Vec<_> = (0..streams)
        .map(|s| {
            let start = s * per_stream;
            let end = if s + 1 == streams {
                n_chunks
            } else {
                start + per_stream
            };
            start..end
        })
        .collect();

    let tallies: Vec<Result<Tally, SimulationError>> = if ranges.len() == 1 {
        vec![run_chunks(mu, config, ranges[0].clone())]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .iter()
                .cloned()
                .map(|r| scope.spawn(move || run_chunks(mu, config, r)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("simulation worker panicked"))
                .collect()
        })
    };

    let mut counts = vec![0u64; mu.len()];
    let mut boundary_resamples = 0;
    let mut stream_counts = Vec::with_capacity(tallies.len());
    for tally in tallies {
        let tally = tally?;
        for (c, t) in counts.iter_mut().zip(&tally.counts) {
            *c += t;
        }
        boundary_resamples += tally.resamples;
        stream_counts.push(tally.counts);
    }

    let merged: u64 = counts.iter().sum();
    let per_stream_total: u64 = stream_counts.iter().flatten().sum();
    if merged != config.trials || per_stream_total != merged {
        return Err(SimulationError::MergeMismatch {
            merged,
            trials: config.trials,
        });
    }

    let n = config.trials as f64;
    Ok(FrequencyReport {
        trials: config.trials,
        frequencies: counts.iter().map(|&c| c as f64 / n).collect(),
        three_sigma: mu
            .iter()
            .map(|m| 3.0 * (m * (1.0 - m) / n).sqrt())
            .collect(),
        counts,
        boundary_resamples,
        target_mu: mu.clone(),
        stream_counts,
    })
}
