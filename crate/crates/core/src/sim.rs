//! Monte-Carlo gain experiments over a spot beam.

use std::collections::HashMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::ThresholdTable;
use crate::channel::{generate_population, BeamConfig, Receiver, SpotBeam, WeatherCdf};
use crate::error::{Error, Result};
use crate::pairing::{pair_receivers, Strategy};
use crate::rates::{evaluate_pair, ts_rate_n};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub n_receivers: usize,
    pub n_trials: usize,
    pub snr_max_db: Vec<f64>,
    pub strategies: Vec<Strategy>,
    /// Fractions of end users behind professional terminals (heterogeneous
    /// mode only).
    pub professional_shares: Vec<f64>,
    /// End users served by one professional terminal.
    pub professional_weight: u32,
    pub rho_set: Vec<f64>,
    pub seed: u64,
    /// Beam geometry; its `snr_max_db` is replaced by each grid value.
    pub beam: BeamConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_receivers: 500,
            n_trials: 100,
            snr_max_db: vec![4.0, 7.0, 10.0, 13.0, 16.0, 19.0],
            strategies: Strategy::ALL.to_vec(),
            professional_shares: (1..=9).map(|k| k as f64 / 10.0).collect(),
            professional_weight: 5,
            rho_set: vec![0.75, 0.8, 0.85, 0.9],
            seed: 0,
            beam: BeamConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_receivers == 0 || self.n_receivers % 2 == 1 {
            return bad(format!("n_receivers must be even and positive, got {}", self.n_receivers));
        }
        if self.n_trials == 0 {
            return bad("n_trials must be >= 1".into());
        }
        if self.snr_max_db.is_empty() || self.snr_max_db.iter().any(|s| !s.is_finite()) {
            return bad("snr_max_db needs at least one finite value".into());
        }
        if self.strategies.is_empty() {
            return bad("strategies must not be empty".into());
        }
        if let Some(s) = self.professional_shares.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return bad(format!("professional share {s} outside [0, 1]"));
        }
        if self.professional_weight == 0 {
            return bad("professional_weight must be >= 1".into());
        }
        if let Some(r) = self.rho_set.iter().find(|r| !(0.5..1.0).contains(*r)) {
            return bad(format!("rho_he must be >= 0.5 and < 1, got {r}"));
        }
        self.beam.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Personal terminals only.
    Homogeneous,
    /// Sweep over the professional share grid.
    Heterogeneous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Per-user equal rate under classical time sharing (bit/symbol).
    pub classical_rate: f64,
    /// Per-user equal rate with pairwise hierarchical modulation.
    pub hier_rate: f64,
    pub gain: f64,
    /// Terminals that decode no modcod and were left out of both schemes.
    pub excluded: Vec<usize>,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent child seed `k` of `seed`.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    mix(seed ^ mix(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Classical and hierarchical equal rates for one population.
///
/// A terminal serving `w` users is split into `w` unit receivers before
/// pairing. With an odd number of unit receivers the weakest one is served
/// alone at its single-stream rate. `seed` drives strategy C.
pub fn run_trial(
    population: &[Receiver],
    strategy: Strategy,
    table: &ThresholdTable,
    seed: u64,
) -> Result<TrialOutcome> {
    let mut excluded = Vec::new();
    let mut rates = Vec::with_capacity(population.len());
    let mut weights = Vec::with_capacity(population.len());
    let mut units = Vec::new();
    for (i, r) in population.iter().enumerate() {
        if r.weight == 0 {
            return Err(Error::InvalidParameter(format!("receiver {i} has weight 0")));
        }
        let rate = table.best_single_rate(r.snr_db);
        if rate > 0.0 {
            rates.push(rate);
            weights.push(r.weight);
            units.extend(std::iter::repeat_n(r.snr_db, r.weight as usize));
        } else {
            excluded.push(i);
        }
    }
    if rates.is_empty() {
        return Err(Error::Degenerate(format!(
            "no receiver decodes any modcod (excluded: {excluded:?})"
        )));
    }
    let classical_rate = ts_rate_n(&rates, &weights)?.per_receiver_rate;

    let mut group_rates = Vec::with_capacity(units.len() / 2 + 1);
    let mut group_weights = Vec::with_capacity(units.len() / 2 + 1);
    if units.len() % 2 == 1 {
        let weakest = (0..units.len())
            .min_by(|&a, &b| units[a].total_cmp(&units[b]))
            .expect("non-empty");
        let snr = units.remove(weakest);
        group_rates.push(table.best_single_rate(snr));
        group_weights.push(1);
    }
    if !units.is_empty() {
        let plan = pair_receivers(&units, strategy, seed)?;
        let mut memo: HashMap<(u64, u64), f64> = HashMap::new();
        for &(i, j) in &plan.pairs {
            let key = (units[i].to_bits(), units[j].to_bits());
            let r_hm = match memo.get(&key) {
                Some(&r) => r,
                None => {
                    let r = evaluate_pair(units[i], units[j], table)?.r_hm;
                    memo.insert(key, r);
                    r
                }
            };
            // Both members get r_hm, so the pair carries 2 r_hm for 2 users.
            group_rates.push(2.0 * r_hm);
            group_weights.push(2);
        }
    }
    let hier_rate = ts_rate_n(&group_rates, &group_weights)?.per_receiver_rate;
    let gain = hier_rate / classical_rate - 1.0;
    debug_assert!(gain > -1e-9, "negative gain {gain}");
    Ok(TrialOutcome { classical_rate, hier_rate, gain: gain.max(0.0), excluded })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub snr_max_db: f64,
    pub strategy: Strategy,
    pub share: f64,
    pub trial: usize,
    pub outcome: TrialOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub snr_max_db: f64,
    pub strategy: Strategy,
    pub share: f64,
    pub trials: usize,
    pub mean_gain: f64,
    pub min_gain: f64,
    pub max_gain: f64,
    pub mean_excluded: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    /// Ordered by snr_max, share, strategy, then trial.
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

impl GainReport {
    pub fn row(&self, snr_max_db: f64, strategy: Strategy, share: f64) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.snr_max_db == snr_max_db && r.strategy == strategy && r.share == share)
    }

    pub fn mean_gain(&self, snr_max_db: f64, strategy: Strategy, share: f64) -> Option<f64> {
        self.row(snr_max_db, strategy, share).map(|r| r.mean_gain)
    }

    /// `snr_max_db,strategy,share,trial,classical_rate,hier_rate,gain`
    pub fn write_records_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "snr_max_db,strategy,share,trial,classical_rate,hier_rate,gain")?;
        for r in &self.records {
            let o = &r.outcome;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.snr_max_db, r.strategy, r.share, r.trial, o.classical_rate, o.hier_rate, o.gain
            )?;
        }
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "snr_max_db,strategy,share,trials,mean_gain,min_gain,max_gain,mean_excluded")?;
        for r in &self.summary {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.snr_max_db,
                r.strategy,
                r.share,
                r.trials,
                r.mean_gain,
                r.min_gain,
                r.max_gain,
                r.mean_excluded
            )?;
        }
        Ok(())
    }
}

fn shares(cfg: &ScenarioConfig, mode: Mode) -> Result<Vec<f64>> {
    match mode {
        Mode::Homogeneous => Ok(vec![0.0]),
        Mode::Heterogeneous if cfg.professional_shares.is_empty() => Err(Error::InvalidParameter(
            "heterogeneous mode needs at least one professional share".into(),
        )),
        Mode::Heterogeneous => Ok(cfg.professional_shares.clone()),
    }
}

/// The population used by trial `trial` at one grid point. Attenuation
/// draws depend only on the seed and trial, not on `snr_max_db`.
pub fn trial_population(
    cfg: &ScenarioConfig,
    weather: &WeatherCdf,
    trial: usize,
    snr_max_db: f64,
    share: f64,
) -> Result<Vec<Receiver>> {
    let beam = SpotBeam::new(BeamConfig { snr_max_db, ..cfg.beam })?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(derive_seed(cfg.seed, trial as u64), 0));
    generate_population(cfg.n_receivers, &beam, weather, share, cfg.professional_weight, &mut rng)
}

/// Runs every trial for every (snr_max, share, strategy) combination.
/// Trials run in parallel; the report is identical for a given config
/// regardless of thread count.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    mode: Mode,
    table: &ThresholdTable,
    weather: &WeatherCdf,
) -> Result<GainReport> {
    cfg.validate()?;
    let table = table.restricted_to_rhos(&cfg.rho_set);
    let shares = shares(cfg, mode)?;
    let per_trial: Vec<Vec<TrialRecord>> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|trial| {
            let pairing_seed = derive_seed(derive_seed(cfg.seed, trial as u64), 1);
            let mut out = Vec::new();
            for &snr_max_db in &cfg.snr_max_db {
                for &share in &shares {
                    let pop = trial_population(cfg, weather, trial, snr_max_db, share)?;
                    for &strategy in &cfg.strategies {
                        let outcome = run_trial(&pop, strategy, &table, pairing_seed)?;
                        out.push(TrialRecord { snr_max_db, strategy, share, trial, outcome });
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let groups = cfg.snr_max_db.len() * shares.len() * cfg.strategies.len();
    let mut records = Vec::with_capacity(groups * cfg.n_trials);
    let mut summary = Vec::with_capacity(groups);
    for g in 0..groups {
        let group: Vec<&TrialRecord> = per_trial.iter().map(|t| &t[g]).collect();
        let gains: Vec<f64> = group.iter().map(|r| r.outcome.gain).collect();
        let first = group[0];
        summary.push(SummaryRow {
            snr_max_db: first.snr_max_db,
            strategy: first.strategy,
            share: first.share,
            trials: gains.len(),
            mean_gain: gains.iter().sum::<f64>() / gains.len() as f64,
            min_gain: gains.iter().copied().fold(f64::INFINITY, f64::min),
            max_gain: gains.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_excluded: group.iter().map(|r| r.outcome.excluded.len() as f64).sum::<f64>()
                / gains.len() as f64,
        });
        records.extend(group.into_iter().cloned());
    }
    Ok(GainReport { records, summary })
}

/// Mean-gain orderings for one (snr_max, share) point. `None` when a
/// strategy is missing from the report.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingCheck {
    pub snr_max_db: f64,
    pub share: f64,
    pub a_ge_b: Option<bool>,
    pub b_ge_c: Option<bool>,
    pub c_ge_d: Option<bool>,
    pub a_ge_c: Option<bool>,
}

impl OrderingCheck {
    /// True when every available comparison holds.
    pub fn consistent(&self) -> bool {
        [self.a_ge_b, self.b_ge_c, self.c_ge_d, self.a_ge_c].iter().all(|c| c.unwrap_or(true))
    }
}

/// Checks `A >= B >= C >= D` (and `A >= C`) on mean gains, allowing each
/// comparison to fall short by `tolerance`.
pub fn summarize(report: &GainReport, tolerance: f64) -> Vec<OrderingCheck> {
    let mut points: Vec<(f64, f64)> = Vec::new();
    for r in &report.summary {
        if !points.contains(&(r.snr_max_db, r.share)) {
            points.push((r.snr_max_db, r.share));
        }
    }
    points
        .into_iter()
        .map(|(snr, share)| {
            let m = |s| report.mean_gain(snr, s, share);
            let ge = |x: Strategy, y: Strategy| Some(m(x)? >= m(y)? - tolerance);
            OrderingCheck {
                snr_max_db: snr,
                share,
                a_ge_b: ge(Strategy::A, Strategy::B),
                b_ge_c: ge(Strategy::B, Strategy::C),
                c_ge_d: ge(Strategy::C, Strategy::D),
                a_ge_c: ge(Strategy::A, Strategy::C),
            }
        })
        .collect()
}
