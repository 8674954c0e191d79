//! Normal quantiles: the scalar inverse CDF and the Monte-Carlo
//! equicoordinate quantile `q(alpha, R)` solving
//! `P[max_j |z_j| < q] = 1 - alpha` for `z ~ N(0, R)`.

// AS241 coefficients are kept exactly as published.
#![allow(clippy::excessive_precision)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::covariance::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_DRAWS: usize = 200_000;
pub const MIN_DRAWS: usize = 1_000;

/// Draws generated per random substream.
const CHUNK: usize = 4_096;

// Wichura's AS241 (PPND16) coefficients, good to about 1e-16.
const CENTRAL_NUM: [f64; 8] = [
    3.387_132_872_796_366_608,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const CENTRAL_DEN: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
const NEAR_NUM: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const NEAR_DEN: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const TAIL_NUM: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const TAIL_DEN: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn poly(coeffs: &[f64; 8], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail `1 - Phi(x)`, accurate for large `x`.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `Phi^-1(p)` by rational approximation.
pub fn inv_norm_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(p));
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return Ok(q * poly(&CENTRAL_NUM, r) / poly(&CENTRAL_DEN, r));
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&NEAR_NUM, r) / poly(&NEAR_DEN, r)
    } else {
        let r = r - 5.0;
        poly(&TAIL_NUM, r) / poly(&TAIL_DEN, r)
    };
    Ok(if q < 0.0 { -x } else { x })
}

/// [`inv_norm_cdf`] followed by one Halley step against [`norm_cdf`].
pub fn inv_norm_cdf_refined(p: f64) -> Result<f64> {
    let x = inv_norm_cdf(p)?;
    let err = if p <= 0.5 {
        norm_cdf(x) - p
    } else {
        (1.0 - p) - norm_sf(x)
    };
    let u = err * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    Ok(x - u / (1.0 + x * u / 2.0))
}

/// Closed-form equicoordinate quantile for independent components,
/// `Phi^-1((1 + (1 - alpha)^(1/dim)) / 2)`.
pub fn sidak_quantile(alpha: f64, dim: usize) -> Result<f64> {
    if dim == 0 || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need dim >= 1 and alpha in (0, 1), got dim={dim}, alpha={alpha}"
        )));
    }
    inv_norm_cdf((1.0 + (1.0 - alpha).powf(1.0 / dim as f64)) / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileRequest {
    pub alpha: f64,
    pub r: CorrelationMatrix,
    pub draws: usize,
    pub seed: u64,
}

impl QuantileRequest {
    pub fn new(alpha: f64, r: CorrelationMatrix) -> Self {
        Self {
            alpha,
            r,
            draws: DEFAULT_DRAWS,
            seed: 0,
        }
    }

    pub fn draws(mut self, draws: usize) -> Self {
        self.draws = draws;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha {} is outside (0, 1)",
                self.alpha
            )));
        }
        if self.draws < MIN_DRAWS {
            return Err(Error::InvalidArgument(format!(
                "draws must be at least {MIN_DRAWS}, got {}",
                self.draws
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileResult {
    pub q: f64,
    pub mc_stderr: f64,
    pub draws_used: usize,
}

/// Cholesky factor of `r`, retrying with diagonal jitter 1e-12, 1e-11, ...,
/// 1e-6 (renormalized to unit diagonal) when `r` is rank deficient.
pub fn correlation_factor(r: &CorrelationMatrix) -> Result<Matrix> {
    let base = r.matrix();
    if let Some(l) = base.cholesky() {
        return Ok(l);
    }
    for exp in (6..=12).rev() {
        let jitter = 10f64.powi(-exp);
        let mut m = base.clone();
        let scale = 1.0 + jitter;
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let add = if i == j { jitter } else { 0.0 };
                m[(i, j)] = (m[(i, j)] + add) / scale;
            }
        }
        if let Some(l) = m.cholesky() {
            return Ok(l);
        }
    }
    Err(Error::NotPositiveSemidefinite)
}

fn chunk_maxima(factor: &Matrix, seed: u64, chunk: usize, count: usize) -> Vec<f64> {
    let dim = factor.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    let mut e = vec![0.0f64; dim];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        for x in e.iter_mut() {
            *x = StandardNormal.sample(&mut rng);
        }
        let mut max = 0.0f64;
        for i in 0..dim {
            let mut zi = 0.0;
            for (j, ej) in e.iter().enumerate().take(i + 1) {
                zi += factor[(i, j)] * ej;
            }
            max = max.max(zi.abs());
        }
        out.push(max);
    }
    out
}

fn simulate_maxima(factor: &Matrix, draws: usize, seed: u64) -> Vec<f64> {
    let chunks: Vec<(usize, usize)> = (0..draws.div_ceil(CHUNK))
        .map(|c| (c, CHUNK.min(draws - c * CHUNK)))
        .collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        chunks
            .par_iter()
            .map(|&(c, count)| chunk_maxima(factor, seed, c, count))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<f64>> = chunks
        .iter()
        .map(|&(c, count)| chunk_maxima(factor, seed, c, count))
        .collect();
    parts.concat()
}

/// 0-based index of the `ceil(p * n)`-th order statistic.
fn order_index(p: f64, n: usize) -> usize {
    let rank = (p * n as f64 - 1e-9).ceil() as usize;
    rank.clamp(1, n) - 1
}

/// Monte-Carlo `q(alpha, R)`: the `ceil((1 - alpha) N)`-th order statistic of
/// `N` simulated values of `max_j |z_j|`.
///
/// The standard error uses the binomial variance of the empirical CDF at the
/// quantile divided by a density estimate from the order statistics
/// `sqrt(N)` positions either side of it.
///
/// A 1x1 `R` is answered exactly, with no draws.
pub fn max_abs_quantile(req: &QuantileRequest) -> Result<QuantileResult> {
    req.validate()?;
    if req.r.dim() == 1 {
        return Ok(QuantileResult {
            q: inv_norm_cdf(1.0 - req.alpha / 2.0)?,
            mc_stderr: 0.0,
            draws_used: 0,
        });
    }
    let factor = correlation_factor(&req.r)?;
    let mut maxima = simulate_maxima(&factor, req.draws, req.seed);
    let n = maxima.len();
    let p = 1.0 - req.alpha;
    let idx = order_index(p, n);
    let (below, &mut q, above) = maxima.select_nth_unstable_by(idx, f64::total_cmp);

    let h = (n as f64).sqrt().ceil() as usize;
    let lo_rank = idx.saturating_sub(h);
    let hi_rank = (idx + h).min(n - 1);
    let lo = if lo_rank < idx {
        *below.select_nth_unstable_by(lo_rank, f64::total_cmp).1
    } else {
        q
    };
    let hi = if hi_rank > idx {
        *above
            .select_nth_unstable_by(hi_rank - idx - 1, f64::total_cmp)
            .1
    } else {
        q
    };
    let spread = hi - lo;
    let mc_stderr = if spread > 0.0 {
        let density = (hi_rank - lo_rank) as f64 / n as f64 / spread;
        (p * (1.0 - p) / n as f64).sqrt() / density
    } else {
        0.0
    };
    Ok(QuantileResult {
        q,
        mc_stderr,
        draws_used: n,
    })
}
