//! Continuous-time Markov chain simulation: an exact-jump trajectory
//! sampler used to cross-validate the analytic stationary occupations and
//! currents.
//!
//! Waiting times are exponential via inverse-CDF draws from a deterministic
//! splittable generator, so a given seed reproduces the identical
//! trajectory on any platform.  Simulation always runs in float
//! arithmetic; exact rates are converted once and the conversion is
//! recorded on the returned statistics.

use thiserror::Error;

use crate::graph::{GraphError, VertexId, WeightedDigraph};
use crate::markov::stationary;
use crate::poly::Backend;
use crate::rng::SplitMix64;
use crate::scalar::Scalar;

/// Number of equal-duration windows used for batch-means standard errors.
pub const BATCH_COUNT: usize = 20;

/// Fraction of the horizon discarded before collecting statistics when no
/// explicit burn-in is given.
pub const DEFAULT_BURN_IN_FRACTION: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("rate of {edge} does not convert to a positive finite float")]
    NonfiniteRate { edge: String },
    #[error("observed window too short to estimate currents")]
    TooShort,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Statistics of one simulated trajectory, collected after burn-in.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    /// Observed (post-burn-in) duration.
    pub total_time: f64,
    /// Time spent in each vertex during the observed window; sums to
    /// `total_time`.
    pub occupation_time: Vec<f64>,
    /// Net crossings per pair during the observed window: forward jumps
    /// minus backward jumps.
    pub signed_crossings: Vec<i64>,
    /// Per-batch net crossings, `batch_crossings[batch][pair]`, over
    /// [`BATCH_COUNT`] equal slices of the observed window.
    pub batch_crossings: Vec<Vec<i64>>,
    /// Total jumps performed over the whole run, burn-in included.
    pub jumps: u64,
    pub seed: u64,
    /// True when the graph's rates were converted from exact arithmetic.
    pub rates_converted: bool,
}

impl TrajectoryStats {
    pub fn occupation_fractions(&self) -> Vec<f64> {
        self.occupation_time
            .iter()
            .map(|t| t / self.total_time)
            .collect()
    }
}

/// A current estimate with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Derive an independent generator seed for replica `index` of a run
/// keyed by `master`.
pub fn replica_seed(master: u64, index: u64) -> u64 {
    SplitMix64::stream(master, index).next_u64()
}

/// Sample one exact-jump trajectory of duration `horizon`, collecting
/// statistics on `[burn_in, horizon]`.
pub fn simulate<S: Scalar>(
    g: &WeightedDigraph<S>,
    horizon: f64,
    burn_in: f64,
    seed: u64,
) -> Result<TrajectoryStats, SimError> {
    let n = g.vertex_count();
    // Per vertex: outgoing (target, rate) in deterministic order, plus the
    // total exit rate.
    let mut exits: Vec<Vec<(VertexId, usize, i64, f64)>> = Vec::with_capacity(n);
    let mut totals = Vec::with_capacity(n);
    for v in g.vertices() {
        let mut row = Vec::new();
        let mut total = 0.0f64;
        for &e in g.out_edges(v) {
            let rate = g.rate(e).to_f64();
            if !rate.is_finite() || rate <= 0.0 {
                return Err(SimError::NonfiniteRate {
                    edge: format!("{}>{}", g.label(g.source(e)), g.label(g.target(e))),
                });
            }
            let sign = if e.sign == crate::graph::Sign::Forward {
                1
            } else {
                -1
            };
            row.push((g.target(e), e.pair.0, sign, rate));
            total += rate;
        }
        if !total.is_finite() || total <= 0.0 {
            return Err(SimError::NonfiniteRate {
                edge: format!("{}>*", g.label(v)),
            });
        }
        exits.push(row);
        totals.push(total);
    }

    let window = (horizon - burn_in).max(0.0);
    let batch_len = window / BATCH_COUNT as f64;
    let mut rng = SplitMix64::new(seed);
    let mut occupation_time = vec![0.0f64; n];
    let mut signed_crossings = vec![0i64; g.pair_count()];
    let mut batch_crossings = vec![vec![0i64; g.pair_count()]; BATCH_COUNT];
    let mut jumps = 0u64;
    let mut state = VertexId(0);
    let mut t = 0.0f64;

    while t < horizon {
        let total = totals[state.0];
        // 1 - u lies in (0, 1], so the logarithm is finite.
        let dt = -(1.0 - rng.next_f64()).ln() / total;
        let t_next = t + dt;

        let lo = t.max(burn_in);
        let hi = t_next.min(horizon);
        if hi > lo {
            occupation_time[state.0] += hi - lo;
        }
        if t_next >= horizon {
            break;
        }

        let mut pick = rng.next_f64() * total;
        let row = &exits[state.0];
        let mut chosen = row.len() - 1;
        for (i, &(_, _, _, rate)) in row.iter().enumerate() {
            if pick < rate {
                chosen = i;
                break;
            }
            pick -= rate;
        }
        let (target, pair, sign, _) = row[chosen];
        jumps += 1;
        if t_next >= burn_in && window > 0.0 {
            signed_crossings[pair] += sign;
            let idx = (((t_next - burn_in) / batch_len) as usize).min(BATCH_COUNT - 1);
            batch_crossings[idx][pair] += sign;
        }
        state = target;
        t = t_next;
    }

    Ok(TrajectoryStats {
        total_time: window,
        occupation_time,
        signed_crossings,
        batch_crossings,
        jumps,
        seed,
        rates_converted: S::EXACT,
    })
}

/// Empirical currents with batch-means standard errors:
/// `j(e) = signed_crossings(e) / total_time`, error = standard deviation of
/// the per-batch rates divided by the square root of the batch count.
pub fn estimate_currents(stats: &TrajectoryStats) -> Result<Vec<CurrentEstimate>, SimError> {
    if stats.total_time <= 0.0 || stats.batch_crossings.len() < 2 {
        return Err(SimError::TooShort);
    }
    let b = stats.batch_crossings.len();
    let batch_len = stats.total_time / b as f64;
    let pairs = stats.signed_crossings.len();
    let mut out = Vec::with_capacity(pairs);
    for e in 0..pairs {
        let value = stats.signed_crossings[e] as f64 / stats.total_time;
        let rates: Vec<f64> = stats
            .batch_crossings
            .iter()
            .map(|batch| batch[e] as f64 / batch_len)
            .collect();
        let mean = rates.iter().sum::<f64>() / b as f64;
        let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
        out.push(CurrentEstimate {
            value,
            std_error: (var / b as f64).sqrt(),
        });
    }
    Ok(out)
}

/// Horizon whose expected jump count under the stationary law is
/// `target_jumps`: the mean exit rate weighted by the stationary
/// distribution gives jumps per unit time.
pub fn horizon_for_mean_jumps<S: Scalar>(g: &WeightedDigraph<S>, target_jumps: f64) -> f64 {
    let p = stationary(g, Backend::Auto);
    let mut mean_rate = 0.0f64;
    for v in g.vertices() {
        let exit: f64 = g.out_edges(v).iter().map(|&e| g.rate(e).to_f64()).sum();
        mean_rate += p.probability(v).to_f64() * exit;
    }
    target_jumps / mean_rate
}
