//! Constellation-constrained mutual information over AWGN.
//!
//! Per-stream information is computed at symbol level:
//!
//! * single: `I(X; Y)`
//! * HE: `I(Q; Y)` where `Q` is the quadrant (HE label), LE points act as
//!   interference
//! * LE: `I(P; Y | Q)`, the in-quadrant point with the quadrant known
//!
//! so HE + LE equals the single-stream value sample by sample. Expectations
//! over the noise use either a tensor Gauss-Hermite rule or seeded Monte
//! Carlo with common random numbers across SNRs.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constellation::{Constellation, StreamRole};
use crate::error::{Error, Result};

/// Minimum Monte-Carlo sample count.
pub const MIN_MC_SAMPLES: usize = 1000;

/// Noise-expectation method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MiMethod {
    /// Tensor Gauss-Hermite rule with `order` nodes per dimension.
    Quadrature { order: usize },
    /// Noise draws per transmitted symbol, with a fixed seed.
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for MiMethod {
    fn default() -> Self {
        MiMethod::Quadrature { order: 16 }
    }
}

/// Nodes and weights of the `n`-point Gauss-Hermite rule for the weight
/// `exp(-t^2)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Per-symbol group membership and stream bookkeeping.
struct StreamView<'a> {
    symbols: &'a [Complex64],
    group: Vec<u8>,
    self_index: bool,
    stream: StreamRole,
    bits: f64,
}

impl<'a> StreamView<'a> {
    fn new(c: &'a Constellation, stream: StreamRole) -> Result<Self> {
        let bits = c.stream_bits(stream).ok_or_else(|| {
            Error::InvalidParameter(format!("{} has no {} stream", c.name(), stream))
        })?;
        let group = (0..c.len()).map(|i| if c.is_hierarchical() { c.he_group(i) } else { 0 }).collect();
        Ok(Self {
            symbols: c.symbols(),
            group,
            self_index: stream != StreamRole::He,
            stream,
            bits: bits as f64,
        })
    }

    /// Information loss `log2(denominator / numerator)` for one received
    /// sample `y` given transmitted symbol `k`.
    fn loss(&self, k: usize, y: Complex64, inv_n0: f64, scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        let mut max = f64::NEG_INFINITY;
        for s in self.symbols {
            let e = -(y - s).norm_sqr() * inv_n0;
            max = max.max(e);
            scratch.push(e);
        }
        let g = self.group[k];
        let (mut all, mut grp) = (0.0, 0.0);
        for (j, &e) in scratch.iter().enumerate() {
            let v = (e - max).exp();
            all += v;
            if self.group[j] == g {
                grp += v;
            }
        }
        let own = if self.self_index { (scratch[k] - max).exp() } else { 0.0 };
        match self.stream {
            StreamRole::Single => (all / own).log2(),
            StreamRole::He => (all / grp).log2(),
            StreamRole::Le => (grp / own).log2(),
        }
    }
}

/// Mutual information (bit/symbol) of `stream` at `snr_db` = Es/N0 in dB.
pub fn stream_mutual_information(
    c: &Constellation,
    stream: StreamRole,
    snr_db: f64,
    method: &MiMethod,
) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!("snr must be finite, got {snr_db}")));
    }
    let view = StreamView::new(c, stream)?;
    let n0 = 10f64.powf(-snr_db / 10.0);
    let inv_n0 = 1.0 / n0;
    let m = c.len();
    let mut scratch = Vec::with_capacity(m);
    let mean_loss = match *method {
        MiMethod::Quadrature { order } => {
            if order < 2 {
                return Err(Error::InvalidParameter(format!("quadrature order {order} < 2")));
            }
            let (t, w) = gauss_hermite(order);
            // n = sqrt(N0) * (t_i + j t_k) has per-dimension variance N0 / 2.
            let scale = n0.sqrt();
            let mut acc = 0.0;
            for (k, &x) in c.symbols().iter().enumerate() {
                for (ti, wi) in t.iter().zip(&w) {
                    for (tk, wk) in t.iter().zip(&w) {
                        let y = x + Complex64::new(ti * scale, tk * scale);
                        acc += wi * wk * view.loss(k, y, inv_n0, &mut scratch);
                    }
                }
            }
            acc / (std::f64::consts::PI * m as f64)
        }
        MiMethod::MonteCarlo { samples, seed } => {
            if samples < MIN_MC_SAMPLES {
                return Err(Error::InvalidParameter(format!(
                    "need at least {MIN_MC_SAMPLES} Monte-Carlo samples, got {samples}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sigma = (n0 / 2.0).sqrt();
            let mut acc = 0.0;
            for _ in 0..samples {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                let noise = Complex64::new(re * sigma, im * sigma);
                for (k, &x) in c.symbols().iter().enumerate() {
                    acc += view.loss(k, x + noise, inv_n0, &mut scratch);
                }
            }
            acc / (samples * m) as f64
        }
    };
    Ok((view.bits - mean_loss).clamp(0.0, view.bits))
}
