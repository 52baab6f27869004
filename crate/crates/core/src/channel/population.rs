//! Receiver populations drawn over a spot beam.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::beam::SpotBeam;
use super::weather::WeatherCdf;
use crate::error::{Error, Result};

/// SNR advantage of a professional terminal over a personal one (dB).
pub const PROFESSIONAL_OFFSET_DB: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminalClass {
    Personal,
    Professional,
}

impl fmt::Display for TerminalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminalClass::Personal => "personal",
            TerminalClass::Professional => "professional",
        })
    }
}

impl FromStr for TerminalClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "personal" => Ok(TerminalClass::Personal),
            "professional" => Ok(TerminalClass::Professional),
            other => Err(Error::InvalidParameter(format!("unknown terminal class '{other}'"))),
        }
    }
}

/// A terminal and the number of end users it serves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Receiver {
    pub snr_db: f64,
    pub class: TerminalClass,
    pub weight: u32,
}

impl Receiver {
    pub fn personal(snr_db: f64) -> Self {
        Self { snr_db, class: TerminalClass::Personal, weight: 1 }
    }
}

/// How many professional terminals and personal terminals serve `n` end
/// users when a fraction `share` of them sit behind professional terminals
/// of `weight` users each.
pub fn terminal_counts(n: usize, share: f64, weight: u32) -> Result<(usize, usize)> {
    if !(0.0..=1.0).contains(&share) {
        return Err(Error::InvalidParameter(format!("professional share {share} outside [0, 1]")));
    }
    if weight == 0 {
        return Err(Error::InvalidParameter("professional weight must be >= 1".into()));
    }
    let professional = (share * n as f64 / weight as f64).round() as usize;
    let professional = professional.min(n / weight as usize);
    Ok((professional, n - professional * weight as usize))
}

/// Draws a population serving `n` end users. Terminal `k` gets a uniform
/// position on the beam disk and then a weather draw, in that order, so a
/// given seed yields the same attenuations whatever the share. The first
/// terminals are the professional ones.
pub fn generate_population<R: Rng + ?Sized>(
    n: usize,
    beam: &SpotBeam,
    weather: &WeatherCdf,
    professional_share: f64,
    professional_weight: u32,
    rng: &mut R,
) -> Result<Vec<Receiver>> {
    if n % 2 == 1 {
        return Err(Error::OddPopulation(n));
    }
    let (professional, personal) = terminal_counts(n, professional_share, professional_weight)?;
    let snr_max = beam.config().snr_max_db;
    let population = (0..professional + personal)
        .map(|k| {
            let location = beam.sample_location_attenuation(rng);
            let rain = weather.sample(rng);
            let snr = snr_max - location - rain;
            if k < professional {
                Receiver {
                    snr_db: snr + PROFESSIONAL_OFFSET_DB,
                    class: TerminalClass::Professional,
                    weight: professional_weight,
                }
            } else {
                Receiver::personal(snr)
            }
        })
        .collect();
    Ok(population)
}

/// Writes `snr_db,class,weight`.
pub fn write_population_csv<W: Write>(population: &[Receiver], mut out: W) -> std::io::Result<()> {
    writeln!(out, "snr_db,class,weight")?;
    for r in population {
        writeln!(out, "{},{},{}", r.snr_db, r.class, r.weight)?;
    }
    Ok(())
}

pub fn read_population_csv<R: Read>(reader: R) -> Result<Vec<Receiver>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<Receiver>() {
        let r = row.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if r.weight == 0 {
            return Err(Error::InvalidParameter("receiver weight must be >= 1".into()));
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::channel::BeamConfig;

    fn beam() -> SpotBeam {
        SpotBeam::new(BeamConfig::default()).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(terminal_counts(500, 0.0, 1).unwrap(), (0, 500));
        assert_eq!(terminal_counts(500, 0.5, 1).unwrap(), (250, 250));
        assert_eq!(terminal_counts(500, 0.5, 5).unwrap(), (50, 250));
        assert_eq!(terminal_counts(10, 1.0, 3).unwrap(), (3, 1));
        assert!(terminal_counts(10, 1.5, 1).is_err());
        assert!(terminal_counts(10, 0.5, 0).is_err());
    }

    #[test]
    fn share_zero_stays_below_snr_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = generate_population(1000, &beam(), &WeatherCdf::placeholder(), 0.0, 1, &mut rng).unwrap();
        assert_eq!(pop.len(), 1000);
        assert!(pop.iter().all(|r| r.snr_db <= 10.0 && r.snr_db >= 10.0 - 4.0 - 10.0));
        assert!(pop.iter().all(|r| r.class == TerminalClass::Personal && r.weight == 1));
    }

    #[test]
    fn full_share_shifts_every_snr() {
        let cdf = WeatherCdf::placeholder();
        let base =
            generate_population(100, &beam(), &cdf, 0.0, 1, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let pro =
            generate_population(100, &beam(), &cdf, 1.0, 1, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        for (a, b) in base.iter().zip(&pro) {
            assert_eq!(b.snr_db, a.snr_db + PROFESSIONAL_OFFSET_DB);
            assert_eq!(b.class, TerminalClass::Professional);
        }
    }

    #[test]
    fn odd_count_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(generate_population(7, &beam(), &WeatherCdf::clear_sky(), 0.0, 1, &mut rng).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pop = generate_population(20, &beam(), &WeatherCdf::placeholder(), 0.3, 2, &mut rng).unwrap();
        let mut buf = Vec::new();
        write_population_csv(&pop, &mut buf).unwrap();
        assert_eq!(read_population_csv(buf.as_slice()).unwrap(), pop);
    }
}
