//! Seedable Monte Carlo sampler for the standard k-variate t distribution.
//!
//! Draws use the scale-mixture representation `X = Z sqrt(ν / W)` with `Z`
//! standard normal in `R^k` and `W ~ χ²(ν)`; the Gaussian limit uses `Z`
//! directly. The random stream is fully specified so batches are
//! bit-reproducible:
//!
//! * generator: xoshiro256** seeded through SplitMix64;
//! * uniforms: the top 53 bits, `(bits + 0.5) / 2^53`, never 0 or 1;
//! * normals: Box–Muller in its trigonometric form, both variates of a pair used in order;
//! * `W = 2 G` with `G ~ Gamma(ν/2)` from Marsaglia–Tsang (shape < 1 boosted by `U^{1/a}`);
//! * draws are produced in shards of [`SHARD_SIZE`]; shard `i` has its own
//!   generator seeded from `(seed, i)`, and shards are concatenated in order.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::ballprob::Radius;
use crate::error::{Error, Result};
use crate::tdist::{Dim, Dof};

/// Name of the embedded generator.
pub const GENERATOR: &str = "xoshiro256**/splitmix64";
/// Number of draws per independently seeded shard.
pub const SHARD_SIZE: usize = 1 << 16;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// xoshiro256** (Blackman & Vigna, 2018).
#[derive(Debug, Clone)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    /// Fills the state with four consecutive SplitMix64 outputs.
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        Xoshiro256StarStar {
            s: [
                splitmix64(&mut sm),
                splitmix64(&mut sm),
                splitmix64(&mut sm),
                splitmix64(&mut sm),
            ],
        }
    }

    /// Generator for shard `shard` of the stream identified by `seed`.
    pub fn for_shard(seed: u64, shard: u64) -> Self {
        let mut sm = shard;
        let mixed = splitmix64(&mut sm);
        Self::seed_from_u64(seed ^ mixed)
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform on the open interval (0, 1).
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard normal variates by Box–Muller, consuming uniforms in pairs.
#[derive(Debug, Clone)]
struct NormalSource {
    rng: Xoshiro256StarStar,
    spare: Option<f64>,
}

impl NormalSource {
    fn new(rng: Xoshiro256StarStar) -> Self {
        NormalSource { rng, spare: None }
    }

    fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.rng.next_open01();
        let u2 = self.rng.next_open01();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Gamma(shape, 1) by Marsaglia–Tsang.
    fn next_gamma(&mut self, shape: f64) -> f64 {
        let boosted = shape < 1.0;
        let a = if boosted { shape + 1.0 } else { shape };
        let d = a - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        let g = loop {
            let x = self.next_normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = self.rng.next_open01();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                break d * v;
            }
        };
        if boosted {
            g * self.rng.next_open01().powf(1.0 / shape)
        } else {
            g
        }
    }

    fn next_chi_square(&mut self, dof: f64) -> f64 {
        2.0 * self.next_gamma(0.5 * dof)
    }
}

/// `n` draws from `t(ν, k)` stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    nu: Dof,
    k: Dim,
    n: usize,
    seed: u64,
    draws: Vec<f64>,
}

impl SampleBatch {
    pub fn nu(&self) -> Dof {
        self.nu
    }

    pub fn k(&self) -> Dim {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// All coordinates, draw after draw.
    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.draws.chunks_exact(self.k.get() as usize)
    }

    fn squared_norms(&self) -> impl ParallelIterator<Item = f64> + '_ {
        self.draws
            .par_chunks_exact(self.k.get() as usize)
            .map(|p| p.iter().map(|c| c * c).sum::<f64>())
    }
}

fn fill_shard(nu: Dof, k: usize, seed: u64, shard: usize, out: &mut [f64]) {
    let mut source = NormalSource::new(Xoshiro256StarStar::for_shard(seed, shard as u64));
    for point in out.chunks_exact_mut(k) {
        for c in point.iter_mut() {
            *c = source.next_normal();
        }
        if let Some(nu) = nu.finite() {
            let scale = (nu / source.next_chi_square(nu)).sqrt();
            point.iter_mut().for_each(|c| *c *= scale);
        }
    }
}

/// Draws `n >= 1` points from `t(ν, k)`; identical arguments give identical batches.
pub fn sample_t(nu: Dof, k: Dim, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::Argument("sample count must be >= 1".into()));
    }
    let kk = k.get() as usize;
    let mut draws = vec![0.0; n * kk];
    draws
        .par_chunks_mut(SHARD_SIZE * kk)
        .enumerate()
        .for_each(|(shard, chunk)| fill_shard(nu, kk, seed, shard, chunk));
    Ok(SampleBatch {
        nu,
        k,
        n,
        seed,
        draws,
    })
}

/// A Monte Carlo estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

impl McEstimate {
    /// `|estimate - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.estimate - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) <= sigmas
    }
}

/// Fraction of draws with `|X| <= r`, with the binomial standard error.
pub fn estimate_ball_prob(batch: &SampleBatch, r: Radius) -> McEstimate {
    let r2 = r.get() * r.get();
    let hits = batch.squared_norms().filter(|&s| s <= r2).count();
    let n = batch.n as f64;
    let p = hits as f64 / n;
    McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
    }
}

/// Sample mean of `|X|^m` with its standard error.
pub fn estimate_radial_moment(batch: &SampleBatch, m: f64) -> McEstimate {
    let values: Vec<f64> = batch.squared_norms().map(|s| s.powf(0.5 * m)).collect();
    mean_and_error(&values)
}

/// Sample variance of coordinate `coord`; the standard error uses the
/// sample fourth central moment, `sqrt((m4 - s^4) / n)`.
pub fn estimate_coordinate_variance(batch: &SampleBatch, coord: usize) -> Result<McEstimate> {
    let k = batch.k.get() as usize;
    if coord >= k {
        return Err(Error::Argument(format!(
            "coordinate {coord} out of range for k = {k}"
        )));
    }
    let xs: Vec<f64> = batch.points().map(|p| p[coord]).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (m2, m4) = xs.iter().fold((0.0, 0.0), |(a, b), x| {
        let d = (x - mean) * (x - mean);
        (a + d, b + d * d)
    });
    let var = m2 / n;
    let fourth = m4 / n;
    Ok(McEstimate {
        estimate: var,
        std_error: ((fourth - var * var) / n).sqrt(),
    })
}

fn mean_and_error(values: &[f64]) -> McEstimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    let sd = if values.len() > 1 {
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    McEstimate {
        estimate: mean,
        std_error: sd / n.sqrt(),
    }
}
