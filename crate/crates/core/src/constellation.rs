//! Constellation geometry.
//!
//! Uniform constellations (QPSK, 8-PSK, DVB-S2 16-APSK) and the two
//! hierarchical families used for superposed HE/LE streams: the
//! non-uniform 16-QAM parameterised by `alpha = d_h / d_l`, and the
//! hierarchical 16-APSK parameterised by the ring ratio `gamma = R2 / R1`
//! and the outer-ring half angle `theta`.
//!
//! Every constellation is normalised to unit mean symbol energy. For
//! hierarchical constellations the most significant `he_bits` of a label
//! select the quadrant (HE stream) and the remaining bits select the point
//! inside the quadrant (LE stream).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::capacity::CodeRate;
use crate::error::{Error, Result};

/// Default number of `gamma` samples along a solution curve.
pub const DEFAULT_CURVE_SAMPLES: usize = 512;

/// Default cap on the ring ratio; larger values are not practical.
pub const DEFAULT_GAMMA_CAP: f64 = 5.0;

/// Minimum distance under which two symbols are considered coincident.
const OVERLAP_TOLERANCE: f64 = 1e-9;

/// Gray-coded quadrant labels, indexed by quadrant 0..4 counter-clockwise
/// from the first quadrant. First bit is the sign of Q, second the sign of I.
const QUADRANT_GRAY: [u8; 4] = [0b00, 0b01, 0b11, 0b10];

/// `(rho_he, gamma, theta_deg)` geometries adopted for the four default
/// energy splits.
pub const ADOPTED_APSK_PAIRS: [(f64, f64, f64); 4] = [
    (0.75, 2.8, 31.5),
    (0.80, 2.3, 28.4),
    (0.85, 1.9, 25.1),
    (0.90, 1.6, 20.9),
];

/// Non-uniform 16-QAM parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Qam16Params {
    pub alpha: f64,
}

impl Qam16Params {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    /// Fraction of the symbol energy carried by the HE stream.
    pub fn he_energy_fraction(&self) -> f64 {
        let r = (1.0 + self.alpha).powi(2);
        r / (r + 1.0)
    }
}

/// Hierarchical 16-APSK parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Apsk16Params {
    /// Outer to inner radius ratio, `>= 1`.
    pub gamma: f64,
    /// Half angle between the outer-ring points of one quadrant, in degrees.
    pub theta_deg: f64,
}

impl Apsk16Params {
    pub fn new(gamma: f64, theta_deg: f64) -> Result<Self> {
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be >= 1, got {gamma}")));
        }
        if !(0.0..90.0).contains(&theta_deg) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, 90) degrees, got {theta_deg}"
            )));
        }
        Ok(Self { gamma, theta_deg })
    }

    pub fn energy_fraction(&self) -> f64 {
        energy_fraction(self.gamma, self.theta_deg)
    }
}

/// HE energy fraction of a hierarchical 16-APSK:
/// `(1 + gamma (1 + 2 cos theta))^2 / (4 (1 + 3 gamma^2))`.
///
/// Defined for any real inputs; callers that need a physical geometry
/// should go through [`Apsk16Params`].
pub fn energy_fraction(gamma: f64, theta_deg: f64) -> f64 {
    let c = theta_deg.to_radians().cos();
    let num = 1.0 + gamma * (1.0 + 2.0 * c);
    num * num / (4.0 * (1.0 + 3.0 * gamma * gamma))
}

/// `cos(theta)` as a function of `gamma` for a fixed HE energy fraction.
pub fn cos_theta(gamma: f64, rho_he: f64) -> f64 {
    0.5 * (((4.0 * rho_he * (1.0 + 3.0 * gamma * gamma)).sqrt() - 1.0) / gamma - 1.0)
}

fn check_rho(rho_he: f64) -> Result<()> {
    if !(0.5..1.0).contains(&rho_he) {
        return Err(Error::InvalidParameter(format!(
            "rho_he must be >= 0.5 and < 1, got {rho_he}"
        )));
    }
    Ok(())
}

/// Outer-ring half angle (degrees) giving energy fraction `rho_he` at ring
/// ratio `gamma`.
pub fn solve_theta(gamma: f64, rho_he: f64) -> Result<f64> {
    check_rho(rho_he)?;
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be >= 1, got {gamma}")));
    }
    let f = cos_theta(gamma, rho_he);
    if f > 1.0 + 1e-12 {
        return Err(Error::InfeasibleGeometry { gamma, rho_he, value: f });
    }
    Ok(f.min(1.0).acos().to_degrees())
}

/// Largest feasible ring ratio for `rho_he`; `None` when unbounded
/// (`rho_he <= 0.75`).
pub fn gamma_limit(rho_he: f64) -> Result<Option<f64>> {
    check_rho(rho_he)?;
    if rho_he <= 0.75 {
        return Ok(None);
    }
    let root = (3.0 * rho_he * (1.0 - rho_he)).sqrt();
    Ok(Some((3.0 + 4.0 * root) / (3.0 * (4.0 * rho_he - 3.0))))
}

/// Sampled solution curve of the energy equation for one `rho_he`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySolution {
    pub rho_he: f64,
    /// `None` when the curve is unbounded in `gamma`.
    pub gamma_lim: Option<f64>,
    pub curve: Vec<Apsk16Params>,
}

impl EnergySolution {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "gamma,theta_deg")?;
        for p in &self.curve {
            writeln!(out, "{},{}", p.gamma, p.theta_deg)?;
        }
        Ok(())
    }
}

/// Samples the solution set uniformly in `gamma` over
/// `[1, min(gamma_cap, gamma_lim)]`.
pub fn solution_set(rho_he: f64, n_samples: usize, gamma_cap: f64) -> Result<EnergySolution> {
    check_rho(rho_he)?;
    if n_samples < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {n_samples}")));
    }
    if !(gamma_cap >= 1.0) {
        return Err(Error::InvalidParameter(format!("gamma cap must be >= 1, got {gamma_cap}")));
    }
    let gamma_lim = gamma_limit(rho_he)?;
    let upper = gamma_lim.map_or(gamma_cap, |g| g.min(gamma_cap));
    let step = (upper - 1.0) / (n_samples - 1) as f64;
    let curve = (0..n_samples)
        .map(|i| {
            let gamma = if i + 1 == n_samples { upper } else { 1.0 + step * i as f64 };
            let theta_deg = solve_theta(gamma, rho_he)?;
            Ok(Apsk16Params { gamma, theta_deg })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergySolution { rho_he, gamma_lim, curve })
}

/// Which bits of a label belong to the stream being decoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StreamRole {
    /// All bits of a non-hierarchical modulation.
    Single,
    /// Quadrant bits of a hierarchical constellation.
    He,
    /// In-quadrant bits, decoded with the HE bits known.
    Le,
}

impl StreamRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            StreamRole::Single => "single",
            StreamRole::He => "HE",
            StreamRole::Le => "LE",
        }
    }
}

impl fmt::Display for StreamRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StreamRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" => Ok(StreamRole::Single),
            "he" => Ok(StreamRole::He),
            "le" => Ok(StreamRole::Le),
            other => Err(Error::InvalidParameter(format!("unknown stream '{other}'"))),
        }
    }
}

/// A labelled, unit-energy constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    symbols: Vec<Complex64>,
    labels: Vec<u8>,
    bits_per_symbol: u32,
    he_bits: u32,
}

impl Constellation {
    fn new(name: impl Into<String>, points: Vec<(Complex64, u8)>, bits: u32, he_bits: u32) -> Self {
        let energy = points.iter().map(|(p, _)| p.norm_sqr()).sum::<f64>() / points.len() as f64;
        let scale = energy.sqrt().recip();
        let (symbols, labels) = points.into_iter().map(|(p, l)| (p * scale, l)).unzip();
        Self { name: name.into(), symbols, labels, bits_per_symbol: bits, he_bits }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    /// Number of label bits carried by the HE stream; zero for uniform
    /// constellations.
    pub fn he_bits(&self) -> u32 {
        self.he_bits
    }

    pub fn le_bits(&self) -> u32 {
        if self.he_bits == 0 {
            0
        } else {
            self.bits_per_symbol - self.he_bits
        }
    }

    pub fn is_hierarchical(&self) -> bool {
        self.he_bits > 0
    }

    /// Number of bits carried by `stream`, or `None` if the constellation
    /// does not expose that stream.
    pub fn stream_bits(&self, stream: StreamRole) -> Option<u32> {
        match (stream, self.is_hierarchical()) {
            (StreamRole::Single, _) => Some(self.bits_per_symbol),
            (StreamRole::He, true) => Some(self.he_bits),
            (StreamRole::Le, true) => Some(self.le_bits()),
            _ => None,
        }
    }

    /// HE label value (quadrant) of symbol `i`.
    pub fn he_group(&self, i: usize) -> u8 {
        self.labels[i] >> self.le_bits()
    }

    pub fn mean_energy(&self) -> f64 {
        self.symbols.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.len() as f64
    }

    /// Barycenter of the symbols sharing the HE label `group`.
    pub fn group_barycenter(&self, group: u8) -> Complex64 {
        let members: Vec<_> = (0..self.len()).filter(|&i| self.he_group(i) == group).collect();
        members.iter().map(|&i| self.symbols[i]).sum::<Complex64>() / members.len() as f64
    }

    /// Label of symbol `i` as a binary string, most significant bit first.
    pub fn label_string(&self, i: usize) -> String {
        format!("{:0width$b}", self.labels[i], width = self.bits_per_symbol as usize)
    }

    fn check_overlap(self) -> Result<Self> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if (self.symbols[i] - self.symbols[j]).norm() < OVERLAP_TOLERANCE {
                    return Err(Error::Overlap { first: i, second: j });
                }
            }
        }
        Ok(self)
    }

    /// Writes `symbol_index,I,Q,bits`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "symbol_index,I,Q,bits")?;
        for (i, s) in self.symbols.iter().enumerate() {
            writeln!(out, "{},{},{},{}", i, s.re, s.im, self.label_string(i))?;
        }
        Ok(())
    }
}

/// Hierarchical 16-APSK: 4 inner points on the diagonals and 12 outer points,
/// three per quadrant at the diagonal and `theta` either side of it.
pub fn build_16apsk(params: Apsk16Params) -> Result<Constellation> {
    let params = Apsk16Params::new(params.gamma, params.theta_deg)?;
    let name = format!("H16APSK(gamma={},theta={})", params.gamma, params.theta_deg);
    apsk16_points(name, params.gamma, params.theta_deg.to_radians(), 2)
}

fn apsk16_points(name: String, gamma: f64, theta: f64, he_bits: u32) -> Result<Constellation> {
    let mut points = Vec::with_capacity(16);
    for (q, &quadrant) in QUADRANT_GRAY.iter().enumerate() {
        let diag = FRAC_PI_4 + q as f64 * FRAC_PI_2;
        // Even quadrants start from the I axis, odd ones from the Q axis;
        // mirroring keeps the same in-quadrant label next to each axis.
        let (near_i, near_q) = if q % 2 == 0 { (-1.0, 1.0) } else { (1.0, -1.0) };
        let hi = quadrant << 2;
        points.push((Complex64::from_polar(gamma, diag), hi | 0b00));
        points.push((Complex64::from_polar(gamma, diag + near_i * theta), hi | 0b01));
        points.push((Complex64::from_polar(gamma, diag + near_q * theta), hi | 0b10));
        points.push((Complex64::from_polar(1.0, diag), hi | 0b11));
    }
    Constellation::new(name, points, 4, he_bits).check_overlap()
}

/// Non-uniform 16-QAM formed by superposing an HE QPSK of parameter
/// `2 (d_h + d_l)` and an LE QPSK of parameter `2 d_l`.
pub fn build_16qam(params: Qam16Params) -> Result<Constellation> {
    let params = Qam16Params::new(params.alpha)?;
    let (dh, dl) = (params.alpha, 1.0);
    let mut points = Vec::with_capacity(16);
    for label in 0u8..16 {
        let q_neg = label & 0b1000 != 0;
        let i_neg = label & 0b0100 != 0;
        // LE bit set means the LE component points back towards the axis.
        let q_inner = label & 0b0010 != 0;
        let i_inner = label & 0b0001 != 0;
        let coord = |neg: bool, inner: bool| {
            let he = if neg { -(dh + dl) } else { dh + dl };
            let le = if inner == neg { dl } else { -dl };
            he + le
        };
        points.push((Complex64::new(coord(i_neg, i_inner), coord(q_neg, q_inner)), label));
    }
    Ok(Constellation::new(format!("H16QAM(alpha={})", params.alpha), points, 4, 2))
}

/// Hierarchical 8-PSK: two points per quadrant at `theta_psk` either side of
/// the diagonal. There is no default angle; the operator chooses it.
pub fn build_hierarchical_8psk(theta_psk_deg: f64) -> Result<Constellation> {
    if !(theta_psk_deg > 0.0 && theta_psk_deg < 45.0) {
        return Err(Error::InvalidParameter(format!(
            "theta_psk must lie in (0, 45) degrees, got {theta_psk_deg}"
        )));
    }
    let theta = theta_psk_deg.to_radians();
    let mut points = Vec::with_capacity(8);
    for (q, &quadrant) in QUADRANT_GRAY.iter().enumerate() {
        let diag = FRAC_PI_4 + q as f64 * FRAC_PI_2;
        let near_i = if q % 2 == 0 { -1.0 } else { 1.0 };
        points.push((Complex64::from_polar(1.0, diag + near_i * theta), quadrant << 1));
        points.push((Complex64::from_polar(1.0, diag - near_i * theta), (quadrant << 1) | 1));
    }
    Constellation::new(format!("H8PSK(theta={theta_psk_deg})"), points, 3, 2).check_overlap()
}

/// Uniform modulations of the classical time-sharing baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniformModulation {
    Qpsk,
    Psk8,
    /// DVB-S2 16-APSK with the ring ratio of the given code rate.
    Apsk16(CodeRate),
}

impl std::str::FromStr for UniformModulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "QPSK" => Ok(Self::Qpsk),
            "8PSK" => Ok(Self::Psk8),
            "16APSK" | "16APSK-UNIFORM" => Ok(Self::Apsk16(CodeRate::new(3, 4)?)),
            other => Err(Error::UnknownModulation(other.to_string())),
        }
    }
}

/// DVB-S2 16-APSK ring ratio for a code rate.
pub fn dvbs2_apsk16_ring_ratio(rate: CodeRate) -> Result<f64> {
    let gamma = match (rate.num(), rate.den()) {
        (2, 3) => 3.15,
        (3, 4) => 2.85,
        (4, 5) => 2.75,
        (5, 6) => 2.70,
        (8, 9) => 2.60,
        (9, 10) => 2.57,
        _ => {
            return Err(Error::InvalidParameter(format!("16APSK is not defined for rate {rate}")));
        }
    };
    Ok(gamma)
}

pub fn build_uniform(modulation: UniformModulation) -> Result<Constellation> {
    match modulation {
        UniformModulation::Qpsk => {
            let points = QUADRANT_GRAY
                .iter()
                .enumerate()
                .map(|(q, &l)| (Complex64::from_polar(1.0, FRAC_PI_4 + q as f64 * FRAC_PI_2), l))
                .collect();
            Ok(Constellation::new("QPSK", points, 2, 0))
        }
        UniformModulation::Psk8 => {
            const GRAY8: [u8; 8] = [0, 1, 3, 2, 6, 7, 5, 4];
            let points = GRAY8
                .iter()
                .enumerate()
                .map(|(k, &l)| (Complex64::from_polar(1.0, k as f64 * PI / 4.0), l))
                .collect();
            Ok(Constellation::new("8PSK", points, 3, 0))
        }
        UniformModulation::Apsk16(rate) => {
            let gamma = dvbs2_apsk16_ring_ratio(rate)?;
            apsk16_points(format!("16APSK({rate})"), gamma, PI / 6.0, 0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn energy_fraction_examples() {
        assert!(close(energy_fraction(2.3, 28.4), 0.800, 0.001));
        assert!(close(energy_fraction(1.6, 20.9), 0.900, 0.002));
        assert!(close(energy_fraction(1.0, 90.0), 0.25, 1e-15));
    }

    #[test]
    fn solve_theta_examples() {
        assert!(close(solve_theta(1.0, 0.8).unwrap(), 38.0, 0.5));
        assert!(close(solve_theta(1.0, 0.9).unwrap(), 26.0, 0.5));
        let expected = (2f64.sqrt() - 1.0).acos().to_degrees();
        assert!(close(solve_theta(1.0, 0.5).unwrap(), expected, 1e-12));
        assert!(close(expected, 65.53, 0.01));
    }

    #[test]
    fn solve_theta_rejects_infeasible_gamma() {
        let err = solve_theta(12.0, 0.8).unwrap_err();
        assert!(matches!(err, Error::InfeasibleGeometry { .. }));
        assert!(matches!(solve_theta(2.0, 0.3), Err(Error::InvalidParameter(_))));
        assert!(matches!(solve_theta(0.5, 0.8), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn gamma_limit_examples() {
        assert_eq!(gamma_limit(0.75).unwrap(), None);
        assert_eq!(gamma_limit(0.6).unwrap(), None);
        assert!(close(gamma_limit(0.8).unwrap().unwrap(), 9.62, 0.01));
        let closed = (3.0 + 4.0 * 0.27f64.sqrt()) / (3.0 * 0.6);
        assert!(close(gamma_limit(0.9).unwrap().unwrap(), closed, 1e-12));
        assert!(close(closed, 2.822, 0.001));
    }

    #[test]
    fn gamma_limit_gives_zero_angle() {
        for rho in [0.76, 0.8, 0.85, 0.9, 0.95] {
            let g = gamma_limit(rho).unwrap().unwrap();
            assert!(solve_theta(g, rho).unwrap() < 1e-6, "rho={rho}");
        }
    }

    #[test]
    fn solution_set_examples() {
        let s = solution_set(0.8, 2, 5.0).unwrap();
        assert_eq!(s.curve.len(), 2);
        assert_eq!(s.curve[0].gamma, 1.0);
        assert!(close(s.curve[0].theta_deg, 38.0, 0.5));
        assert_eq!(s.curve[1].gamma, 5.0);
        assert!(close(s.curve[1].energy_fraction(), 0.8, 1e-9));

        let s = solution_set(0.9, 16, 5.0).unwrap();
        let last = s.curve.last().unwrap().gamma;
        assert!(close(last, gamma_limit(0.9).unwrap().unwrap(), 1e-12));

        let s = solution_set(0.5, 3, 5.0).unwrap();
        assert!(s.curve.iter().all(|p| close(p.energy_fraction(), 0.5, 1e-9)));

        assert!(solution_set(0.8, 1, 5.0).is_err());
    }

    #[test]
    fn apsk_barycenter_matches_energy_fraction() {
        let c = build_16apsk(Apsk16Params::new(2.3, 28.4).unwrap()).unwrap();
        assert_eq!(c.len(), 16);
        assert!(close(c.mean_energy(), 1.0, 1e-12));
        let b = c.group_barycenter(0b00);
        assert!(close(b.norm(), 0.8f64.sqrt(), 0.001));
        assert!(close(b.arg(), FRAC_PI_4, 1e-12));
    }

    #[test]
    fn apsk_with_unit_ring_ratio_overlaps() {
        // Inner point and outer diagonal point share the same position.
        let err = build_16apsk(Apsk16Params::new(1.0, 45.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Overlap { .. }));
        let err = build_16apsk(Apsk16Params::new(2.0, 0.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Overlap { .. }));
    }

    #[test]
    fn apsk_quadrant_structure() {
        let c = build_16apsk(Apsk16Params::new(2.0, 20.0).unwrap()).unwrap();
        for i in 0..16 {
            let s = c.symbols()[i];
            let q = c.he_group(i);
            let expected = QUADRANT_GRAY[((s.arg().rem_euclid(2.0 * PI)) / FRAC_PI_2) as usize];
            assert_eq!(q, expected, "symbol {i}");
        }
        let mut labels = c.labels().to_vec();
        labels.sort_unstable();
        labels.dedup();
        assert_eq!(labels.len(), 16);
    }

    #[test]
    fn qam_energy_split() {
        for (alpha, rho, tol) in [(2.0, 0.90, 1e-12), (4.0, 0.962, 0.001), (0.0, 0.5, 1e-12)] {
            let p = Qam16Params::new(alpha).unwrap();
            assert!(close(p.he_energy_fraction(), rho, tol));
            let c = build_16qam(p).unwrap();
            assert!(close(c.mean_energy(), 1.0, 1e-12));
            let b = c.group_barycenter(0);
            assert!(close(b.norm_sqr(), p.he_energy_fraction(), 1e-12));
        }
        assert!(Qam16Params::new(-1.0).is_err());
    }

    #[test]
    fn qam_is_gray_between_nearest_neighbours() {
        let c = build_16qam(Qam16Params::new(1.0).unwrap()).unwrap();
        let d_min = 2.0 / 10f64.sqrt();
        for i in 0..16 {
            for j in i + 1..16 {
                if (c.symbols()[i] - c.symbols()[j]).norm() < d_min + 1e-9 {
                    assert_eq!((c.labels()[i] ^ c.labels()[j]).count_ones(), 1);
                }
            }
        }
    }

    #[test]
    fn apsk_ring_neighbours_are_gray() {
        let c = build_16apsk(Apsk16Params::new(2.3, 28.4).unwrap()).unwrap();
        // Walk the outer ring in angle order; adjacent points differ by one bit.
        let mut outer: Vec<usize> = (0..16).filter(|&i| c.symbols()[i].norm() > 0.8).collect();
        outer.sort_by(|&a, &b| {
            let ka = c.symbols()[a].arg().rem_euclid(2.0 * PI);
            let kb = c.symbols()[b].arg().rem_euclid(2.0 * PI);
            ka.total_cmp(&kb)
        });
        for k in 0..outer.len() {
            let (a, b) = (outer[k], outer[(k + 1) % outer.len()]);
            assert_eq!((c.labels()[a] ^ c.labels()[b]).count_ones(), 1, "{a} {b}");
        }
    }

    #[test]
    fn uniform_constellations() {
        let q = build_uniform("QPSK".parse().unwrap()).unwrap();
        assert_eq!(q.len(), 4);
        for s in q.symbols() {
            assert!(close(s.norm(), 1.0, 1e-12));
            assert!(close((s.arg().abs() - FRAC_PI_4).abs() % FRAC_PI_2, 0.0, 1e-12));
        }
        let p = build_uniform("8PSK".parse().unwrap()).unwrap();
        assert_eq!(p.len(), 8);
        assert!(p.symbols().iter().all(|s| close(s.norm(), 1.0, 1e-12)));
        let a = build_uniform("16APSK-uniform".parse().unwrap()).unwrap();
        assert!(close(a.mean_energy(), 1.0, 1e-12));
        let inner = a.symbols().iter().filter(|s| s.norm() < 0.6).count();
        assert_eq!((inner, 16 - inner), (4, 12));
        assert!(matches!("64QAM".parse::<UniformModulation>(), Err(Error::UnknownModulation(_))));
    }

    #[test]
    fn hierarchical_8psk_needs_an_angle() {
        assert!(build_hierarchical_8psk(0.0).is_err());
        let c = build_hierarchical_8psk(15.0).unwrap();
        assert_eq!((c.len(), c.he_bits(), c.le_bits()), (8, 2, 1));
    }
}
