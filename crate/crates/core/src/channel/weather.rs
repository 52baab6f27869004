//! Empirical weather-attenuation distribution and inverse-CDF sampling.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};

const PLACEHOLDER: &str = include_str!("../../data/weather_cdf_placeholder.csv");

/// Piecewise-linear CDF given by `(attenuation_db, cumulative_probability)`
/// breakpoints. Probability mass below the first breakpoint sits at the
/// first attenuation.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherCdf {
    points: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct Row {
    attenuation_db: f64,
    cumulative_probability: f64,
}

impl WeatherCdf {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("weather CDF needs at least one breakpoint".into()));
        }
        for (k, &(a, p)) in points.iter().enumerate() {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!("attenuation {a} must be >= 0")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
            }
            if k > 0 {
                let (pa, pp) = points[k - 1];
                if a < pa || p < pp {
                    return Err(Error::InvalidParameter(format!(
                        "breakpoint ({a}, {p}) decreases after ({pa}, {pp})"
                    )));
                }
            }
        }
        let last = points[points.len() - 1].1;
        if (last - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("CDF must end at 1, ends at {last}")));
        }
        Ok(Self { points })
    }

    /// All receivers in clear sky.
    pub fn clear_sky() -> Self {
        Self { points: vec![(0.0, 1.0)] }
    }

    /// Bundled placeholder distribution: most mass below 1 dB with a thin
    /// tail to 10 dB.
    pub fn placeholder() -> Self {
        Self::from_csv_reader(PLACEHOLDER.as_bytes()).expect("bundled weather CDF is valid")
    }

    /// Reads `attenuation_db,cumulative_probability`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let points = rdr
            .deserialize::<Row>()
            .map(|r| {
                r.map(|r| (r.attenuation_db, r.cumulative_probability)).map_err(|e| Error::Parse {
                    line: e.position().map_or(0, |p| p.line()),
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "attenuation_db,cumulative_probability")?;
        for (a, p) in &self.points {
            writeln!(out, "{a},{p}")?;
        }
        Ok(())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn max_attenuation(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Attenuation at cumulative probability `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let (a0, p0) = self.points[0];
        if u <= p0 {
            return a0;
        }
        for w in self.points.windows(2) {
            let ((a1, p1), (a2, p2)) = (w[0], w[1]);
            if u <= p2 {
                if p2 == p1 {
                    return a2;
                }
                return a1 + (u - p1) / (p2 - p1) * (a2 - a1);
            }
        }
        self.max_attenuation()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// `count` seeded draws from `cdf`.
pub fn sample_weather(cdf: &WeatherCdf, seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| cdf.sample(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_cdf_is_always_zero() {
        let cdf = WeatherCdf::new(vec![(0.0, 1.0)]).unwrap();
        assert!(sample_weather(&cdf, 3, 1000).iter().all(|&a| a == 0.0));
    }

    #[test]
    fn two_point_tail_frequency() {
        let cdf = WeatherCdf::new(vec![(0.0, 0.9), (10.0, 1.0)]).unwrap();
        let draws = sample_weather(&cdf, 11, 100_000);
        let freq = draws.iter().filter(|&&a| a > 0.0).count() as f64 / draws.len() as f64;
        assert!((freq - 0.10).abs() < 0.01, "{freq}");
        assert!(draws.iter().all(|&a| (0.0..=10.0).contains(&a)));
    }

    #[test]
    fn seeded_sequences_repeat() {
        let cdf = WeatherCdf::placeholder();
        assert_eq!(sample_weather(&cdf, 42, 50), sample_weather(&cdf, 42, 50));
        assert_ne!(sample_weather(&cdf, 42, 50), sample_weather(&cdf, 43, 50));
    }

    #[test]
    fn invalid_breakpoints() {
        assert!(WeatherCdf::new(vec![]).is_err());
        assert!(WeatherCdf::new(vec![(0.0, 0.5)]).is_err());
        assert!(WeatherCdf::new(vec![(1.0, 0.5), (0.5, 1.0)]).is_err());
        assert!(WeatherCdf::new(vec![(0.0, 0.6), (1.0, 0.5), (2.0, 1.0)]).is_err());
        assert!(WeatherCdf::new(vec![(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn placeholder_shape() {
        let cdf = WeatherCdf::placeholder();
        assert!(cdf.quantile(0.5) <= 1.0);
        assert!((cdf.max_attenuation() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let cdf = WeatherCdf::placeholder();
        let mut buf = Vec::new();
        cdf.write_csv(&mut buf).unwrap();
        assert_eq!(WeatherCdf::from_csv_reader(buf.as_slice()).unwrap(), cdf);
    }
}
