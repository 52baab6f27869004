//! Threshold estimation by inverting mutual-information curves, and the
//! choice of one (gamma, theta) geometry per HE energy fraction.

use rayon::prelude::*;

use super::{CodeRate, ModCod, Modulation, Provenance, ThresholdTable};
use crate::capacity::mi::{stream_mutual_information, MiMethod};
use crate::constellation::{
    build_16apsk, solution_set, Apsk16Params, Constellation, StreamRole, ADOPTED_APSK_PAIRS,
    DEFAULT_CURVE_SAMPLES, DEFAULT_GAMMA_CAP,
};
use crate::error::{Error, Result};

/// Implementation-loss margin added to MI thresholds, in dB.
pub const DEFAULT_MARGIN_DB: f64 = 0.8;

const MIN_SNR_DB: f64 = -10.0;
const MAX_SNR_DB: f64 = 30.0;
const TOLERANCE_DB: f64 = 0.01;

/// Smallest SNR (dB, within 0.01 dB) at which the stream's mutual
/// information reaches `stream bits x code_rate`. Returns the lower end of
/// the search range, -10 dB, if the target is already met there.
pub fn estimate_threshold(
    c: &Constellation,
    stream: StreamRole,
    code_rate: CodeRate,
    method: &MiMethod,
) -> Result<f64> {
    let bits = c.stream_bits(stream).ok_or_else(|| {
        Error::InvalidParameter(format!("{} has no {} stream", c.name(), stream))
    })?;
    let target = bits as f64 * code_rate.value();
    let mi = |snr: f64| stream_mutual_information(c, stream, snr, method);
    if mi(MAX_SNR_DB)? < target {
        return Err(Error::Unreachable { target, max_snr_db: MAX_SNR_DB });
    }
    let (mut lo, mut hi) = (MIN_SNR_DB, MAX_SNR_DB);
    if mi(lo)? >= target {
        return Ok(lo);
    }
    while hi - lo > TOLERANCE_DB {
        let mid = 0.5 * (lo + hi);
        if mi(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Options for [`select_pair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectOptions {
    pub samples: usize,
    pub gamma_cap: f64,
    pub method: MiMethod,
}

impl Default for SelectOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_CURVE_SAMPLES,
            gamma_cap: DEFAULT_GAMMA_CAP,
            method: MiMethod::Quadrature { order: 10 },
        }
    }
}

/// Geometry chosen on a solution curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectedPair {
    pub params: Apsk16Params,
    /// Mean HE threshold over the requested code rates, in dB.
    pub mean_he_threshold_db: f64,
}

/// Mean HE threshold over `rates` for one geometry; `None` when some rate is
/// unreachable or the points coincide.
fn mean_he_threshold(params: Apsk16Params, rates: &[CodeRate], method: &MiMethod) -> Option<f64> {
    // gamma = 1 places the inner ring on top of the middle outer points, the
    // quadrant partition is still well defined so build it without the
    // overlap check.
    let c = match build_16apsk(params) {
        Ok(c) => c,
        Err(Error::Overlap { .. }) => {
            let nudged = Apsk16Params { gamma: params.gamma + 1e-7, ..params };
            build_16apsk(nudged).ok()?
        }
        Err(_) => return None,
    };
    let mut sum = 0.0;
    for &r in rates {
        sum += estimate_threshold(&c, StreamRole::He, r, method).ok()?;
    }
    Some(sum / rates.len() as f64)
}

/// Picks the point of the sampled solution curve for `rho_he` minimising
/// the mean HE threshold over `rates`; ties go to the smaller gamma.
pub fn select_pair(rho_he: f64, rates: &[CodeRate], opts: &SelectOptions) -> Result<SelectedPair> {
    if rates.is_empty() {
        return Err(Error::InvalidParameter("at least one code rate is required".into()));
    }
    let curve = solution_set(rho_he, opts.samples, opts.gamma_cap)?.curve;
    let scores: Vec<Option<f64>> =
        curve.par_iter().map(|&p| mean_he_threshold(p, rates, &opts.method)).collect();
    let mut best: Option<SelectedPair> = None;
    for (p, score) in curve.iter().zip(scores) {
        let Some(s) = score else { continue };
        if best.is_none_or(|b| s < b.mean_he_threshold_db) {
            best = Some(SelectedPair { params: *p, mean_he_threshold_db: s });
        }
    }
    best.ok_or(Error::Unreachable { target: f64::NAN, max_snr_db: MAX_SNR_DB })
}

/// How the geometry of each hierarchical constellation is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// The adopted (gamma, theta) pairs for 0.75, 0.8, 0.85 and 0.9; other
    /// energy fractions fall back to selection.
    Adopted,
    /// Always run [`select_pair`] over all DVB-S2 code rates.
    Selected(SelectOptions),
}

/// Options for [`estimate_hierarchical_table`].
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchicalOptions {
    pub rhos: Vec<f64>,
    pub rates: Vec<CodeRate>,
    pub geometry: Geometry,
    pub margin_db: f64,
    pub method: MiMethod,
}

impl Default for HierarchicalOptions {
    fn default() -> Self {
        Self {
            rhos: ADOPTED_APSK_PAIRS.iter().map(|p| p.0).collect(),
            rates: CodeRate::dvbs2(),
            geometry: Geometry::Adopted,
            margin_db: DEFAULT_MARGIN_DB,
            method: MiMethod::default(),
        }
    }
}

/// Geometry used for `rho_he` under `geometry`.
pub fn geometry_for(rho_he: f64, geometry: &Geometry) -> Result<Apsk16Params> {
    match geometry {
        Geometry::Adopted => {
            if let Some(&(_, g, t)) =
                ADOPTED_APSK_PAIRS.iter().find(|p| (p.0 - rho_he).abs() < 1e-9)
            {
                return Apsk16Params::new(g, t);
            }
            Ok(select_pair(rho_he, &CodeRate::dvbs2(), &SelectOptions::default())?.params)
        }
        Geometry::Selected(opts) => Ok(select_pair(rho_he, &CodeRate::dvbs2(), opts)?.params),
    }
}

/// HE and LE thresholds (MI inversion plus margin, rounded to 0.01 dB) of
/// the hierarchical 16-APSK for every requested energy fraction and code
/// rate. Unreachable combinations are left out.
pub fn estimate_hierarchical_table(opts: &HierarchicalOptions) -> Result<ThresholdTable> {
    let mut jobs = Vec::new();
    for &rho in &opts.rhos {
        let modulation = Modulation::hierarchical_apsk(rho)?;
        let c = build_16apsk(geometry_for(rho, &opts.geometry)?)?;
        for stream in [StreamRole::He, StreamRole::Le] {
            for &rate in &opts.rates {
                jobs.push((modulation, c.clone(), stream, rate));
            }
        }
    }
    let entries: Vec<Option<ModCod>> = jobs
        .par_iter()
        .map(|(modulation, c, stream, rate)| {
            match estimate_threshold(c, *stream, *rate, &opts.method) {
                Ok(t) => Ok(Some(ModCod {
                    modulation: *modulation,
                    code_rate: *rate,
                    stream: *stream,
                    threshold_db: ((t + opts.margin_db) * 100.0).round() / 100.0,
                    provenance: Provenance::Estimated,
                })),
                Err(Error::Unreachable { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    ThresholdTable::new(entries.into_iter().flatten().collect())
}
