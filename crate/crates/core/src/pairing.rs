//! Grouping receivers in pairs.
//!
//! The objective is the average SNR difference over the pairs of a perfect
//! matching. Strategy A (repeatedly pair the two receivers furthest apart)
//! attains its maximum; B targets pair differences close to that maximum;
//! C is a uniformly random matching; D pairs SNR neighbours and attains the
//! minimum.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest population accepted by [`brute_force_matching`].
pub const BRUTE_FORCE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    A,
    B,
    C,
    D,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::A, Strategy::B, Strategy::C, Strategy::D];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Strategy::A => "A",
            Strategy::B => "B",
            Strategy::C => "C",
            Strategy::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Strategy::A),
            "B" => Ok(Strategy::B),
            "C" => Ok(Strategy::C),
            "D" => Ok(Strategy::D),
            other => Err(Error::InvalidParameter(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Max,
    Min,
}

/// A perfect matching with its SNR-difference statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingPlan {
    /// Receiver index couples, lower SNR first.
    pub pairs: Vec<(usize, usize)>,
    /// Mean absolute SNR difference over pairs (dB).
    pub delta_avg: f64,
    /// Population variance of the pair differences (dB^2).
    pub delta_variance: f64,
}

impl PairingPlan {
    /// Builds a plan and checks that `pairs` is a perfect matching of
    /// `snrs`.
    pub fn from_pairs(snrs: &[f64], pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = snrs.len();
        let mut seen = vec![false; n];
        for &(i, j) in &pairs {
            for k in [i, j] {
                if k >= n || seen[k] {
                    return Err(Error::InvalidParameter(format!(
                        "receiver {k} is out of range or matched twice"
                    )));
                }
                seen[k] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter("matching is not perfect".into()));
        }
        let pairs: Vec<(usize, usize)> =
            pairs.into_iter().map(|(i, j)| if snrs[j] < snrs[i] { (j, i) } else { (i, j) }).collect();
        let diffs: Vec<f64> = pairs.iter().map(|&(i, j)| (snrs[i] - snrs[j]).abs()).collect();
        let count = diffs.len().max(1) as f64;
        let delta_avg = diffs.iter().sum::<f64>() / count;
        let delta_variance = diffs.iter().map(|d| (d - delta_avg).powi(2)).sum::<f64>() / count;
        Ok(Self { pairs, delta_avg, delta_variance })
    }
}

fn check_even(snrs: &[f64]) -> Result<()> {
    if snrs.len() % 2 == 1 {
        return Err(Error::OddPopulation(snrs.len()));
    }
    if let Some(bad) = snrs.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter(format!("SNR {bad} is not finite")));
    }
    Ok(())
}

/// Receiver indices sorted by SNR, index breaking ties.
fn sorted_indices(snrs: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..snrs.len()).collect();
    idx.sort_by(|&a, &b| snrs[a].total_cmp(&snrs[b]).then(a.cmp(&b)));
    idx
}

/// Repeatedly pairs the two remaining receivers with the largest SNR
/// difference. Ties take the lowest index at each end.
pub fn strategy_a(snrs: &[f64]) -> Result<PairingPlan> {
    check_even(snrs)?;
    let mut remaining = sorted_indices(snrs);
    let mut pairs = Vec::with_capacity(snrs.len() / 2);
    while !remaining.is_empty() {
        let low = remaining.remove(0);
        let top = snrs[*remaining.last().expect("even count")];
        let first_top = remaining.partition_point(|&k| snrs[k] < top);
        let high = remaining.remove(first_top);
        pairs.push((low, high));
    }
    PairingPlan::from_pairs(snrs, pairs)
}

/// Pairs receivers greedily by closeness of their SNR difference to the
/// maximum average difference; ties go to the lower index pair.
pub fn strategy_b(snrs: &[f64]) -> Result<PairingPlan> {
    check_even(snrs)?;
    let target = strategy_a(snrs)?.delta_avg;
    let n = snrs.len();
    let mut candidates = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            candidates.push((((snrs[i] - snrs[j]).abs() - target).abs(), i, j));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut matched = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    for (_, i, j) in candidates {
        if !matched[i] && !matched[j] {
            matched[i] = true;
            matched[j] = true;
            pairs.push((i, j));
            if pairs.len() == n / 2 {
                break;
            }
        }
    }
    PairingPlan::from_pairs(snrs, pairs)
}

/// Uniformly random perfect matching, reproducible for a given seed.
pub fn strategy_c(snrs: &[f64], seed: u64) -> Result<PairingPlan> {
    check_even(snrs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..snrs.len()).collect();
    idx.shuffle(&mut rng);
    let pairs = idx.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    PairingPlan::from_pairs(snrs, pairs)
}

/// Sorts by SNR and pairs neighbours.
pub fn strategy_d(snrs: &[f64]) -> Result<PairingPlan> {
    check_even(snrs)?;
    let idx = sorted_indices(snrs);
    let pairs = idx.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    PairingPlan::from_pairs(snrs, pairs)
}

/// Dispatches to one of the four strategies; `seed` is only used by C.
pub fn pair_receivers(snrs: &[f64], strategy: Strategy, seed: u64) -> Result<PairingPlan> {
    match strategy {
        Strategy::A => strategy_a(snrs),
        Strategy::B => strategy_b(snrs),
        Strategy::C => strategy_c(snrs, seed),
        Strategy::D => strategy_d(snrs),
    }
}

/// Upper bound on the average SNR difference from a histogram of
/// `(snr_db, count)` levels: `(1/N) sum_i a_i (SNR_{i+1} - SNR_i)` with
/// `a_i = min(receivers at or below level i, receivers above it)`.
pub fn delta_upper_bound(levels: &[(f64, usize)]) -> Result<f64> {
    let mut levels: Vec<(f64, usize)> = levels.iter().copied().filter(|l| l.1 > 0).collect();
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: usize = levels.iter().map(|l| l.1).sum();
    if total % 2 == 1 {
        return Err(Error::OddPopulation(total));
    }
    if total == 0 {
        return Ok(0.0);
    }
    let mut below = 0;
    let mut sum = 0.0;
    for w in levels.windows(2) {
        below += w[0].1;
        let a = below.min(total - below);
        sum += a as f64 * (w[1].0 - w[0].0);
    }
    Ok(sum / (total / 2) as f64)
}

/// Histogram of exact SNR values.
pub fn snr_histogram(snrs: &[f64]) -> Vec<(f64, usize)> {
    let mut sorted = snrs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for s in sorted {
        match levels.last_mut() {
            Some(last) if last.0 == s => last.1 += 1,
            _ => levels.push((s, 1)),
        }
    }
    levels
}

/// Exact optimum over all perfect matchings (at most 12 receivers).
pub fn brute_force_matching(snrs: &[f64], objective: Objective) -> Result<PairingPlan> {
    check_even(snrs)?;
    if snrs.len() > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge { cap: BRUTE_FORCE_CAP, got: snrs.len() });
    }
    let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
    let mut current = Vec::with_capacity(snrs.len() / 2);
    let mut used = vec![false; snrs.len()];
    enumerate(snrs, &mut used, &mut current, 0.0, &mut |total, pairs| {
        let better = match &best {
            None => true,
            Some((b, _)) => match objective {
                Objective::Max => total > *b,
                Objective::Min => total < *b,
            },
        };
        if better {
            best = Some((total, pairs.to_vec()));
        }
    });
    let (_, pairs) = best.expect("an even population always has a matching");
    PairingPlan::from_pairs(snrs, pairs)
}

fn enumerate(
    snrs: &[f64],
    used: &mut [bool],
    current: &mut Vec<(usize, usize)>,
    total: f64,
    visit: &mut dyn FnMut(f64, &[(usize, usize)]),
) {
    let Some(i) = used.iter().position(|u| !u) else {
        visit(total, current);
        return;
    };
    used[i] = true;
    for j in i + 1..snrs.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        current.push((i, j));
        enumerate(snrs, used, current, total + (snrs[i] - snrs[j]).abs(), visit);
        current.pop();
        used[j] = false;
    }
    used[i] = false;
}

/// Number of perfect matchings visited by [`brute_force_matching`].
pub fn matching_count(n: usize) -> usize {
    (1..n).step_by(2).product::<usize>().max(1)
}
