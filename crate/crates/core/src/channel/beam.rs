//! Spot-beam geometry: parabolic-antenna pattern and the ring-area
//! distribution of location attenuation over a uniformly populated disk.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bessel::{bessel_j1, J1_FIRST_ZERO};
use crate::error::{Error, Result};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const GEOSTATIONARY_ALTITUDE_M: f64 = 35_786_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamConfig {
    /// Clear-sky SNR at beam centre (dB).
    pub snr_max_db: f64,
    pub antenna_diameter_m: f64,
    pub frequency_hz: f64,
    /// Attenuation at the beam edge relative to the centre (dB).
    pub edge_attenuation_db: f64,
    pub satellite_altitude_m: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        Self {
            snr_max_db: 10.0,
            antenna_diameter_m: 1.5,
            frequency_hz: 20e9,
            edge_attenuation_db: 4.0,
            satellite_altitude_m: GEOSTATIONARY_ALTITUDE_M,
        }
    }
}

impl BeamConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("antenna_diameter_m", self.antenna_diameter_m),
            ("frequency_hz", self.frequency_hz),
            ("edge_attenuation_db", self.edge_attenuation_db),
            ("satellite_altitude_m", self.satellite_altitude_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !self.snr_max_db.is_finite() {
            return Err(Error::InvalidParameter("snr_max_db must be finite".into()));
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    /// Off-axis angle (rad) of the first null of the pattern.
    pub fn first_null_angle(&self) -> f64 {
        let s = J1_FIRST_ZERO * self.wavelength_m() / (PI * self.antenna_diameter_m);
        s.min(1.0).asin()
    }
}

/// Pattern attenuation `-10 log10((2 J1(u) / u)^2)`, `u = sin(angle) pi D / lambda`,
/// for `|angle|` below the first null.
pub fn pattern_attenuation(off_axis_angle: f64, cfg: &BeamConfig) -> Result<f64> {
    cfg.validate()?;
    let angle = off_axis_angle.abs();
    if !(angle < cfg.first_null_angle()) {
        return Err(Error::OutOfRange(format!(
            "off-axis angle {off_axis_angle} rad is at or beyond the first null {}",
            cfg.first_null_angle()
        )));
    }
    let u = angle.sin() * PI * cfg.antenna_diameter_m / cfg.wavelength_m();
    if u == 0.0 {
        return Ok(0.0);
    }
    let g = 2.0 * bessel_j1(u) / u;
    Ok(-10.0 * (g * g).log10())
}

/// A validated beam with its edge angle solved once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpotBeam {
    cfg: BeamConfig,
    edge_angle: f64,
}

impl SpotBeam {
    pub fn new(cfg: BeamConfig) -> Result<Self> {
        cfg.validate()?;
        let edge_angle = angle_for_attenuation(cfg.edge_attenuation_db, &cfg)?;
        Ok(Self { cfg, edge_angle })
    }

    pub fn config(&self) -> &BeamConfig {
        &self.cfg
    }

    /// Off-axis angle (rad) at which the pattern loses `edge_attenuation_db`.
    pub fn edge_angle(&self) -> f64 {
        self.edge_angle
    }

    /// Ground distance from beam centre for an off-axis angle, flat-Earth
    /// nadir mapping.
    pub fn ground_radius_m(&self, angle: f64) -> f64 {
        self.cfg.satellite_altitude_m * angle.tan()
    }

    pub fn edge_radius_m(&self) -> f64 {
        self.ground_radius_m(self.edge_angle)
    }

    /// Attenuation (dB) at ground distance `r` from the centre.
    pub fn attenuation_at_radius(&self, r: f64) -> Result<f64> {
        pattern_attenuation((r / self.cfg.satellite_altitude_m).atan(), &self.cfg)
    }

    /// Fraction of the disk whose location attenuation is at most `a` dB.
    pub fn location_attenuation_cdf(&self, a: f64) -> Result<f64> {
        let edge = self.cfg.edge_attenuation_db;
        if !(0.0..=edge).contains(&a) {
            return Err(Error::OutOfRange(format!("attenuation {a} dB outside [0, {edge}]")));
        }
        if a == 0.0 {
            return Ok(0.0);
        }
        if a == edge {
            return Ok(1.0);
        }
        let ratio = self.ground_radius_m(angle_for_attenuation(a, &self.cfg)?) / self.edge_radius_m();
        Ok(ratio * ratio)
    }

    /// Location attenuation of a receiver placed uniformly on the disk.
    pub fn sample_location_attenuation<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let r = self.edge_radius_m() * u.sqrt();
        self.attenuation_at_radius(r).expect("inside the beam edge").min(self.cfg.edge_attenuation_db)
    }
}

/// Off-axis angle at which the pattern attenuation equals `a` dB
/// (bisection; the pattern is increasing up to the first null).
pub fn angle_for_attenuation(a: f64, cfg: &BeamConfig) -> Result<f64> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::OutOfRange(format!("attenuation must be >= 0 dB, got {a}")));
    }
    let null = cfg.first_null_angle();
    let (mut lo, mut hi) = (0.0, null * (1.0 - 1e-12));
    if pattern_attenuation(hi, cfg)? < a {
        return Err(Error::OutOfRange(format!("{a} dB is deeper than the pattern reaches")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pattern_attenuation(mid, cfg)? < a {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * null {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Free-function form of [`SpotBeam::location_attenuation_cdf`].
pub fn location_attenuation_cdf(a: f64, cfg: &BeamConfig) -> Result<f64> {
    SpotBeam::new(*cfg)?.location_attenuation_cdf(a)
}
