//! Seeded Monte Carlo model of one access frame.
//!
//! Each frame: every user picks a token uniformly; the base station picks
//! `min(eligible, K)` eligible tokens uniformly without replacement and
//! grants each a data slot; a slot succeeds iff its token has exactly one
//! activator. Under [`DetectionMode::Binary`] every active token is
//! eligible. Under [`DetectionMode::Ternary`] the base station can see
//! collisions and only single tokens are eligible.
//!
//! Randomness comes from ChaCha8. Frames are generated in fixed-size blocks;
//! block `i` uses stream `i` of the generator seeded from the run seed, so
//! results do not depend on how many threads consume the blocks.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Signed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{success_pmf, PmfKind, SuccessPmf};
use crate::combinatorics::ExactProb;
use crate::config::SystemConfig;
use crate::format::{decimal, opt_rational_str, rational_str, rational_to_f64};
use crate::metrics::{
    check_range, FrameMetrics, Provenance, SweepAxis, SweepReport, METRICS_CSV_HEADER,
};
use crate::{Error, Result};

/// Generator recorded in every report.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng";

/// Frames drawn from one generator stream.
pub const FRAMES_PER_STREAM: u64 = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionMode {
    /// The base station sees only idle/active per token.
    #[default]
    Binary,
    /// The base station tells singles from collisions and skips collided tokens.
    Ternary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimParams {
    #[serde(flatten)]
    pub config: SystemConfig,
    pub iterations: u64,
    pub seed: u64,
    pub mode: DetectionMode,
}

impl SimParams {
    pub fn new(
        config: SystemConfig,
        iterations: u64,
        seed: u64,
        mode: DetectionMode,
    ) -> Result<Self> {
        let p = SimParams {
            config,
            iterations,
            seed,
            mode,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.iterations == 0 {
            return Err(Error::NoIterations);
        }
        Ok(())
    }

    fn stream_rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn streams(&self) -> u64 {
        self.iterations.div_ceil(FRAMES_PER_STREAM)
    }

    fn frames_in_stream(&self, stream: u64) -> u64 {
        (self.iterations - stream * FRAMES_PER_STREAM).min(FRAMES_PER_STREAM)
    }
}

/// Everything observable about one simulated frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameTrace {
    /// Activators per token, indexed by token.
    pub counts: Vec<u32>,
    /// Tokens granted a data slot, ascending.
    pub selected: Vec<u32>,
    /// Granted tokens with exactly one activator.
    pub successes: u32,
}

pub fn simulate_frame<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    mode: DetectionMode,
    rng: &mut R,
) -> FrameTrace {
    let mut counts = vec![0u32; cfg.tokens as usize];
    for _ in 0..cfg.users {
        counts[rng.random_range(0..cfg.tokens) as usize] += 1;
    }
    resolve_frame(counts, cfg.data_slots, mode, rng)
}

/// Data-phase assignment for a fixed contention result.
pub fn resolve_frame<R: Rng + ?Sized>(
    counts: Vec<u32>,
    data_slots: u32,
    mode: DetectionMode,
    rng: &mut R,
) -> FrameTrace {
    let eligible: Vec<u32> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &n)| match mode {
            DetectionMode::Binary => n >= 1,
            DetectionMode::Ternary => n == 1,
        })
        .map(|(i, _)| i as u32)
        .collect();
    let granted = eligible.len().min(data_slots as usize);
    let mut selected: Vec<u32> = rand::seq::index::sample(rng, eligible.len(), granted)
        .into_iter()
        .map(|i| eligible[i])
        .collect();
    selected.sort_unstable();
    let successes = selected
        .iter()
        .filter(|&&t| counts[t as usize] == 1)
        .count() as u32;
    FrameTrace {
        counts,
        selected,
        successes,
    }
}

/// The exact sequence of frames a run with `params` consumes.
pub struct FrameStream {
    params: SimParams,
    stream: u64,
    left_in_stream: u64,
    rng: ChaCha8Rng,
}

impl FrameStream {
    pub fn new(params: SimParams) -> Result<Self> {
        params.validate()?;
        Ok(FrameStream {
            params,
            stream: 0,
            left_in_stream: params.frames_in_stream(0),
            rng: params.stream_rng(0),
        })
    }
}

impl Iterator for FrameStream {
    type Item = FrameTrace;

    fn next(&mut self) -> Option<FrameTrace> {
        if self.left_in_stream == 0 {
            self.stream += 1;
            if self.stream >= self.params.streams() {
                return None;
            }
            self.left_in_stream = self.params.frames_in_stream(self.stream);
            self.rng = self.params.stream_rng(self.stream);
        }
        self.left_in_stream -= 1;
        Some(simulate_frame(
            &self.params.config,
            self.params.mode,
            &mut self.rng,
        ))
    }
}

fn count_stream(params: &SimParams, stream: u64) -> Vec<u64> {
    let mut rng = params.stream_rng(stream);
    let mut counts = vec![0u64; params.config.max_successes() as usize + 1];
    for _ in 0..params.frames_in_stream(stream) {
        counts[simulate_frame(&params.config, params.mode, &mut rng).successes as usize] += 1;
    }
    counts
}

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

#[cfg(feature = "parallel")]
fn success_counts(params: &SimParams) -> Vec<u64> {
    use rayon::prelude::*;
    let zero = vec![0u64; params.config.max_successes() as usize + 1];
    (0..params.streams())
        .into_par_iter()
        .map(|s| count_stream(params, s))
        .reduce(|| zero.clone(), merge)
}

#[cfg(not(feature = "parallel"))]
fn success_counts(params: &SimParams) -> Vec<u64> {
    let zero = vec![0u64; params.config.max_successes() as usize + 1];
    (0..params.streams())
        .map(|s| count_stream(params, s))
        .fold(zero, merge)
}

/// Result of [`estimate_pmf`]. Frequencies are exact multiples of `1/N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub params: SimParams,
    pub rng: String,
    /// Frames with `S = d`, for `d = 0 ..= min(M, K, T)`.
    pub counts: Vec<u64>,
    pub mass: Vec<ExactProb>,
    #[serde(with = "rational_str")]
    pub mean_successes: BigRational,
    #[serde(with = "opt_rational_str")]
    pub success_rate: Option<BigRational>,
    #[serde(with = "rational_str")]
    pub efficiency: BigRational,
}

impl EmpiricalReport {
    pub fn pmf_hat(&self) -> SuccessPmf {
        SuccessPmf::new(self.params.config, PmfKind::Empirical, self.mass.clone())
            .expect("empirical frequencies sum to one")
    }

    pub fn metrics(&self) -> FrameMetrics {
        FrameMetrics::from_mean(self.params.config, self.mean_successes.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Metrics row plus `mode,seed,iterations`.
    pub fn to_csv(&self) -> String {
        format!(
            "{METRICS_CSV_HEADER},mode,seed,iterations\n{},{},{},{}\n",
            self.metrics().csv_row(),
            mode_name(self.params.mode),
            self.params.seed,
            self.params.iterations
        )
    }
}

fn mode_name(mode: DetectionMode) -> &'static str {
    match mode {
        DetectionMode::Binary => "binary",
        DetectionMode::Ternary => "ternary",
    }
}

/// Runs `N` frames and tabulates how often each success count occurred.
pub fn estimate_pmf(params: &SimParams) -> Result<EmpiricalReport> {
    params.validate()?;
    let counts = success_counts(params);
    let n = BigUint::from(params.iterations);
    let mass = counts
        .iter()
        .map(|&c| ExactProb::from_counts(c.into(), n.clone()))
        .collect();
    let total: u64 = counts.iter().enumerate().map(|(d, &c)| d as u64 * c).sum();
    let mean = BigRational::new(total.into(), params.iterations.into());
    let metrics = FrameMetrics::from_mean(params.config, mean);
    Ok(EmpiricalReport {
        params: *params,
        rng: RNG_ALGORITHM.to_string(),
        counts,
        mass,
        mean_successes: metrics.expected_successes,
        success_rate: metrics.success_rate,
        efficiency: metrics.efficiency,
    })
}

/// Distance between a simulated pmf and the closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub params: SimParams,
    pub rng: String,
    /// `½ Σ_d |p̂(d) − p(d)|`
    pub tv_distance: f64,
    pub max_abs_mass_error: f64,
    pub exact: Vec<ExactProb>,
    pub empirical: Vec<ExactProb>,
}

impl Comparison {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("comparison serializes")
    }

    pub fn to_csv(&self) -> String {
        let p = &self.params;
        format!(
            "M,K,T,mode,seed,iterations,tv_distance,max_abs_mass_error\n{},{},{},{},{},{},{},{}\n",
            p.config.tokens,
            p.config.data_slots,
            p.config.users,
            mode_name(p.mode),
            p.seed,
            p.iterations,
            decimal(self.tv_distance),
            decimal(self.max_abs_mass_error)
        )
    }
}

/// Only binary-detection runs have a closed-form reference.
pub fn compare_to_exact(report: &EmpiricalReport) -> Result<Comparison> {
    if report.params.mode != DetectionMode::Binary {
        return Err(Error::NoAnalyticReference);
    }
    let exact = success_pmf(&report.params.config)?;
    let mut l1 = BigRational::from_integer(0.into());
    let mut worst = BigRational::from_integer(0.into());
    for (p, q) in exact.mass().iter().zip(&report.mass) {
        let diff = (p.ratio() - q.ratio()).abs();
        if diff > worst {
            worst = diff.clone();
        }
        l1 += diff;
    }
    Ok(Comparison {
        params: report.params,
        rng: report.rng.clone(),
        tv_distance: rational_to_f64(&(l1 / BigRational::from_integer(2.into()))),
        max_abs_mass_error: rational_to_f64(&worst),
        exact: exact.mass().to_vec(),
        empirical: report.mass.clone(),
    })
}

/// Simulated counterpart of [`crate::metrics::sweep`]; every row reuses the
/// same seed.
pub fn simulated_sweep(
    base: SystemConfig,
    axis: SweepAxis,
    start: u32,
    end: u32,
    iterations: u64,
    seed: u64,
    mode: DetectionMode,
) -> Result<SweepReport> {
    check_range(start, end)?;
    let rows = (start..=end)
        .map(|v| {
            let params = SimParams::new(axis.apply(base, v)?, iterations, seed, mode)?;
            Ok(estimate_pmf(&params)?.metrics())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        base: axis.apply(base, start)?,
        axis,
        start,
        end,
        provenance: Provenance::Simulated {
            rng: RNG_ALGORITHM.to_string(),
            seed,
            iterations,
            mode,
        },
        rows,
    })
}
