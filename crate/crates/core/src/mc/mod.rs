//! Monte Carlo estimators and a discrete Neyman–Pearson verifier.
//!
//! Samples are drawn in fixed-size chunks; chunk `i` uses a ChaCha8 stream
//! keyed by `(seed, i)`, so every estimate is reproducible from `(seed, n)`
//! and independent of how chunks are scheduled across threads. Chunk
//! statistics are merged in index order.

mod np;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market::{MarketModel, Measure};
use crate::payoff::Payoff;
use crate::psi::success_set;

pub use np::{np_bruteforce, np_bruteforce_min, DiscreteMarket, NpOutcome};

const CHUNK: usize = 1 << 14;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub seed: u64,
}

impl McEstimate {
    /// `|value − mean| ≤ k·SE + slack`
    pub fn agrees(&self, value: f64, k: f64, slack: f64) -> bool {
        (value - self.mean).abs() <= k * self.std_error + slack
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w,
        }
    }

    fn estimate(&self, seed: u64) -> McEstimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            std_error: (var / self.n as f64).sqrt(),
            n: self.n,
            seed,
        }
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Terminal Brownian pair from two independent standard normals.
fn correlate(model: &MarketModel, z1: f64, z2: f64) -> (f64, f64) {
    let p = model.params();
    let st = p.maturity.sqrt();
    (st * z1, st * (p.rho * z1 + (1.0 - p.rho * p.rho).sqrt() * z2))
}

fn chunk_points(model: &MarketModel, seed: u64, chunk: usize, len: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
    let mut rng = chunk_rng(seed, chunk);
    (0..len).map(move |_| {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        correlate(model, z1, z2)
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    Ok(())
}

/// `n` draws of `(W¹_T, W²_T) ~ N(0, T·Q)`, read as coordinates of `measure`.
///
/// The law is the same under both measures; the tag only fixes how callers
/// interpret the points.
pub fn sample_terminal(model: &MarketModel, n: usize, seed: u64, _measure: Measure) -> Result<Vec<(f64, f64)>> {
    check_n(n)?;
    let chunks = n.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .flat_map_iter(|i| {
            let len = CHUNK.min(n - i * CHUNK);
            chunk_points(model, seed, i, len).collect::<Vec<_>>()
        })
        .collect())
}

/// Sample mean of `f(w1, w2)` over `n` draws.
pub fn mc_mean<F>(model: &MarketModel, n: usize, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    check_n(n)?;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let len = CHUNK.min(n - i * CHUNK);
            let mut m = Moments::default();
            for (w1, w2) in chunk_points(model, seed, i, len) {
                m.push(f(w1, w2));
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    Ok(total.estimate(seed))
}

/// Sample means of `k` functions evaluated on the same `n` draws; `f`
/// writes its `k` values into the slice.
pub fn mc_means<F>(model: &MarketModel, n: usize, seed: u64, k: usize, f: F) -> Result<Vec<McEstimate>>
where
    F: Fn(f64, f64, &mut [f64]) + Sync,
{
    check_n(n)?;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let len = CHUNK.min(n - i * CHUNK);
            let mut ms = vec![Moments::default(); k];
            let mut buf = vec![0.0; k];
            for (w1, w2) in chunk_points(model, seed, i, len) {
                f(w1, w2, &mut buf);
                ms.iter_mut().zip(&buf).for_each(|(m, &x)| m.push(x));
            }
            ms
        })
        .collect();
    let total = parts.into_iter().fold(vec![Moments::default(); k], |acc, part| {
        acc.into_iter().zip(part).map(|(a, b)| a.merge(b)).collect()
    });
    Ok(total.iter().map(|m| m.estimate(seed)).collect())
}

/// `mc_psi` for every level of `levels` on one shared sample.
pub fn mc_psi_grid(
    model: &MarketModel,
    payoff: &Payoff,
    levels: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<(McEstimate, McEstimate)>> {
    let sets = levels
        .iter()
        .map(|&c| success_set(model, payoff, c))
        .collect::<Result<Vec<_>>>()?;
    let discount = model.discount();
    let k = sets.len();
    let est = mc_means(model, n, seed, 2 * k, |w1, w2, out| {
        for (j, set) in sets.iter().enumerate() {
            out[j] = if set.contains(w1, w2, Measure::Physical) { 1.0 } else { 0.0 };
            out[k + j] = discount * set.knocked_out_payoff(w1, w2, Measure::Martingale);
        }
    })?;
    Ok((0..k).map(|j| (est[j], est[k + j])).collect())
}

/// Estimates of `Ψ₁(c)` (physical frequency of `A_c`) and `Ψ₂(c)`
/// (martingale average of `e^{−rT} H 1_{A_c}`), using only the defining
/// inequality of the success set.
pub fn mc_psi(model: &MarketModel, payoff: &Payoff, c: f64, n: usize, seed: u64) -> Result<(McEstimate, McEstimate)> {
    let set = success_set(model, payoff, c)?;
    let psi1 = mc_mean(model, n, seed, |w1, w2| {
        if set.contains(w1, w2, Measure::Physical) {
            1.0
        } else {
            0.0
        }
    })?;
    let discount = model.discount();
    let psi2 = mc_mean(model, n, seed, |w1, w2| {
        discount * set.knocked_out_payoff(w1, w2, Measure::Martingale)
    })?;
    Ok((psi1, psi2))
}

/// Martingale-measure price estimate `Ẽ[e^{−rT}H]`.
pub fn mc_price(model: &MarketModel, payoff: &Payoff, n: usize, seed: u64) -> Result<McEstimate> {
    let discount = model.discount();
    mc_mean(model, n, seed, |w1, w2| {
        let (s1, s2) = model.terminal_assets(w1, w2, Measure::Martingale);
        discount * payoff.value(s1, s2)
    })
}

/// Physical frequency of `{H = 0}`.
pub fn mc_prob_zero(model: &MarketModel, payoff: &Payoff, n: usize, seed: u64) -> Result<McEstimate> {
    mc_mean(model, n, seed, |w1, w2| {
        let (s1, s2) = model.terminal_assets(w1, w2, Measure::Physical);
        if payoff.value(s1, s2) == 0.0 {
            1.0
        } else {
            0.0
        }
    })
}
