//! Equal-rate allocations.
//!
//! Classical time sharing gives each receiver its best single-stream rate
//! for a fraction of the time. Hierarchical time sharing adds the operating
//! points of superposed HE/LE transmissions for a pair of receivers and
//! takes the convex hull of everything; the equal rate is where that hull
//! meets the diagonal `r1 = r2`.

use std::io::Write;

use crate::capacity::ThresholdTable;
use crate::constellation::StreamRole;
use crate::error::{Error, Result};

/// Rates (bit/symbol) delivered to the worse-SNR and better-SNR receiver
/// by one transmission configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
    pub source: String,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64, source: impl Into<String>) -> Self {
        Self { r1, r2, source: source.into() }
    }
}

/// Time fractions and the common per-receiver rate they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub fractions: Vec<f64>,
    pub per_receiver_rate: f64,
}

/// Two-receiver time sharing: `t1 = R2 / (R1 + R2)`, rate `R1 R2 / (R1 + R2)`.
pub fn ts_rate_two(r1: f64, r2: f64) -> Result<Allocation> {
    for (index, r) in [r1, r2].into_iter().enumerate() {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::ZeroRate { index });
        }
    }
    let sum = r1 + r2;
    Ok(Allocation { fractions: vec![r2 / sum, r1 / sum], per_receiver_rate: r1 * r2 / sum })
}

/// Weighted n-receiver time sharing. Receiver `i` serves `weights[i]` end
/// users, each of whom gets the same rate `(sum_j w_j / R_j)^-1`; the time
/// fraction of receiver `i` is proportional to `w_i / R_i`.
pub fn ts_rate_n(rates: &[f64], weights: &[u32]) -> Result<Allocation> {
    if rates.len() != weights.len() {
        return Err(Error::InvalidParameter(format!(
            "{} rates but {} weights",
            rates.len(),
            weights.len()
        )));
    }
    if rates.is_empty() {
        return Err(Error::InvalidParameter("no receivers".into()));
    }
    if let Some(index) = rates.iter().position(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::ZeroRate { index });
    }
    if weights.contains(&0) {
        return Err(Error::InvalidParameter("weights must be >= 1".into()));
    }
    if let ([r1, r2], [w1, w2]) = (rates, weights) {
        // Closed form, bit-identical to `ts_rate_two` for unit weights.
        let (a, b) = (*w1 as f64 * r2, *w2 as f64 * r1);
        let sum = a + b;
        return Ok(Allocation { fractions: vec![a / sum, b / sum], per_receiver_rate: r1 * r2 / sum });
    }
    let loads: Vec<f64> = rates.iter().zip(weights).map(|(r, &w)| w as f64 / r).collect();
    let total: f64 = loads.iter().sum();
    Ok(Allocation {
        fractions: loads.iter().map(|l| l / total).collect(),
        per_receiver_rate: 1.0 / total,
    })
}

/// All operating points for two receivers. Single-stream points serve one
/// receiver at its best rate; each hierarchical modulation contributes the
/// best HE rate decodable by the weaker receiver paired with the best LE
/// rate decodable by the stronger one.
pub fn operating_points(snr1: f64, snr2: f64, table: &ThresholdTable) -> Vec<RatePair> {
    let (lo, hi) = if snr1 <= snr2 { (snr1, snr2) } else { (snr2, snr1) };
    let describe = |snr: f64| table.best_single(snr).map_or("none".to_string(), |m| m.to_string());
    let mut points = vec![
        RatePair::new(table.best_single_rate(lo), 0.0, describe(lo)),
        RatePair::new(0.0, table.best_single_rate(hi), describe(hi)),
    ];
    for m in table.hierarchical_modulations() {
        let he = table.best_entry(m, StreamRole::He, lo);
        let le = table.best_entry(m, StreamRole::Le, hi);
        if let (Some(he), Some(le)) = (he, le) {
            points.push(RatePair::new(
                he.spectral_efficiency(),
                le.spectral_efficiency(),
                format!("{m} HE {} + LE {}", he.code_rate, le.code_rate),
            ));
        }
    }
    points
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull (counter-clockwise, no collinear vertices) by monotone chain.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Achievable region of a set of operating points: the convex hull of the
/// points, their axis projections and the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    hull: Vec<(f64, f64)>,
}

impl RateRegion {
    pub fn new(points: &[RatePair]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Degenerate("no operating points".into()));
        }
        if points.iter().any(|p| !(p.r1 >= 0.0 && p.r2 >= 0.0 && p.r1.is_finite() && p.r2.is_finite())) {
            return Err(Error::InvalidParameter("rates must be finite and non-negative".into()));
        }
        if !points.iter().any(|p| p.r1 > 0.0) {
            return Err(Error::Degenerate("no positive rate for receiver 1".into()));
        }
        if !points.iter().any(|p| p.r2 > 0.0) {
            return Err(Error::Degenerate("no positive rate for receiver 2".into()));
        }
        let mut all = vec![(0.0, 0.0)];
        for p in points {
            all.extend([(p.r1, p.r2), (p.r1, 0.0), (0.0, p.r2)]);
        }
        Ok(Self { hull: convex_hull(&all) })
    }

    pub fn hull(&self) -> &[(f64, f64)] {
        &self.hull
    }

    /// Largest `t` with `(t, t)` inside the region.
    pub fn equal_rate(&self) -> f64 {
        let n = self.hull.len();
        let mut best: f64 = 0.0;
        for i in 0..n {
            let a = self.hull[i];
            let b = self.hull[(i + 1) % n];
            let (da, db) = (a.1 - a.0, b.1 - b.0);
            if da == 0.0 {
                best = best.max(a.0);
            }
            if db == 0.0 {
                best = best.max(b.0);
            }
            if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
                let s = da / (da - db);
                best = best.max(a.0 + s * (b.0 - a.0));
            }
        }
        best
    }
}

/// Equal rate offered to both receivers by the best mixture of `points`.
pub fn equal_rate_point(points: &[RatePair]) -> Result<f64> {
    Ok(RateRegion::new(points)?.equal_rate())
}

/// Everything computed for one receiver pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEvaluation {
    pub snr1_db: f64,
    pub snr2_db: f64,
    pub points: Vec<RatePair>,
    pub hull: Vec<(f64, f64)>,
    /// Classical time-sharing equal rate.
    pub r_ts: f64,
    /// Hierarchical time-sharing equal rate.
    pub r_hm: f64,
    pub gain: f64,
}

impl PairEvaluation {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "kind,r1,r2,source")?;
        for p in &self.points {
            writeln!(out, "point,{},{},{}", p.r1, p.r2, p.source)?;
        }
        for (x, y) in &self.hull {
            writeln!(out, "hull,{x},{y},")?;
        }
        writeln!(out, "r_ts,{0},{0},", self.r_ts)?;
        writeln!(out, "r_hm,{0},{0},", self.r_hm)?;
        writeln!(out, "gain,{},,", self.gain)?;
        Ok(())
    }
}

/// Classical vs hierarchical equal rate for two receivers (order free).
pub fn evaluate_pair(snr1: f64, snr2: f64, table: &ThresholdTable) -> Result<PairEvaluation> {
    let (lo, hi) = if snr1 <= snr2 { (snr1, snr2) } else { (snr2, snr1) };
    let r_ts = ts_rate_two(table.best_single_rate(lo), table.best_single_rate(hi))?.per_receiver_rate;
    let points = operating_points(lo, hi, table);
    let region = RateRegion::new(&points)?;
    // The hull contains both classical endpoints, so it can only add rate;
    // differences at rounding level are snapped to the classical value.
    let hull_rate = region.equal_rate();
    let r_hm = if hull_rate > r_ts * (1.0 + 1e-12) { hull_rate } else { r_ts };
    Ok(PairEvaluation {
        snr1_db: lo,
        snr2_db: hi,
        points,
        hull: region.hull,
        r_ts,
        r_hm,
        gain: r_hm / r_ts - 1.0,
    })
}

/// `R_hm / R_ts - 1` for two receivers.
pub fn pair_gain(snr1: f64, snr2: f64, table: &ThresholdTable) -> Result<f64> {
    Ok(evaluate_pair(snr1, snr2, table)?.gain)
}

/// One cell of a gain surface; `gain` is `None` when one receiver decodes
/// nothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub snr1_db: f64,
    pub snr2_db: f64,
    pub gain: Option<f64>,
}

/// Pair gain over the square `[min, max]^2` with spacing `step`.
pub fn gain_grid(min_db: f64, max_db: f64, step_db: f64, table: &ThresholdTable) -> Result<Vec<GridCell>> {
    if !(step_db > 0.0 && max_db >= min_db) {
        return Err(Error::InvalidParameter(format!(
            "grid needs max >= min and step > 0, got [{min_db}, {max_db}] step {step_db}"
        )));
    }
    let n = ((max_db - min_db) / step_db + 1e-9).floor() as usize + 1;
    let axis: Vec<f64> = (0..n).map(|i| min_db + i as f64 * step_db).collect();
    let mut cells = Vec::with_capacity(n * n);
    for &a in &axis {
        for &b in &axis {
            let gain = match evaluate_pair(a, b, table) {
                Ok(e) => Some(e.gain),
                Err(Error::ZeroRate { .. } | Error::Degenerate(_)) => None,
                Err(e) => return Err(e),
            };
            cells.push(GridCell { snr1_db: a, snr2_db: b, gain });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<RatePair> {
        v.iter().map(|&(a, b)| RatePair::new(a, b, "")).collect()
    }

    #[test]
    fn two_receiver_examples() {
        let a = ts_rate_two(2.0, 3.0).unwrap();
        assert_eq!(a.per_receiver_rate, 1.2);
        assert!((a.fractions[0] - 0.6).abs() < 1e-15 && (a.fractions[1] - 0.4).abs() < 1e-15);
        let a = ts_rate_two(1.7, 1.7).unwrap();
        assert_eq!(a.fractions, vec![0.5, 0.5]);
        assert_eq!(a.per_receiver_rate, 0.85);
        assert!(matches!(ts_rate_two(0.0, 1.0), Err(Error::ZeroRate { index: 0 })));
        assert!(matches!(ts_rate_two(1.0, 0.0), Err(Error::ZeroRate { index: 1 })));
    }

    #[test]
    fn n_receiver_examples() {
        let a = ts_rate_n(&[1.0, 1.0, 1.0], &[1, 1, 1]).unwrap();
        assert!((a.per_receiver_rate - 1.0 / 3.0).abs() < 1e-15);
        assert!(a.fractions.iter().all(|t| (t - 1.0 / 3.0).abs() < 1e-15));
        let a = ts_rate_n(&[2.0, 3.0, 6.0], &[1, 1, 1]).unwrap();
        assert!((a.per_receiver_rate - 1.0).abs() < 1e-15);
        let a = ts_rate_n(&[2.0, 3.0], &[1, 4]).unwrap();
        assert!((a.per_receiver_rate - 6.0 / 11.0).abs() < 1e-15);
        assert!((a.fractions[1] * 3.0 - 24.0 / 11.0).abs() < 1e-14);
        assert!(matches!(ts_rate_n(&[1.0, 0.0, 2.0], &[1, 1, 1]), Err(Error::ZeroRate { index: 1 })));
        assert!(ts_rate_n(&[1.0], &[0]).is_err());
        assert!(ts_rate_n(&[1.0, 2.0], &[1]).is_err());
    }

    #[test]
    fn unit_weight_pair_matches_two_receiver_form() {
        for (a, b) in [(2.0, 3.0), (0.49, 3.6), (1.0 / 3.0, 2.0 / 3.0), (1.98, 2.64)] {
            let two = ts_rate_two(a, b).unwrap();
            let n = ts_rate_n(&[a, b], &[1, 1]).unwrap();
            assert_eq!(two, n);
        }
    }

    #[test]
    fn equal_rate_examples() {
        assert!((equal_rate_point(&pts(&[(2.0, 0.0), (0.0, 3.0)])).unwrap() - 1.2).abs() < 1e-12);
        let three = pts(&[(2.0, 0.0), (0.0, 3.0), (1.5, 1.5)]);
        assert_eq!(equal_rate_point(&three).unwrap(), 1.5);
        let seg = pts(&[(2.0, 0.0), (1.4, 1.8), (0.0, 3.0)]);
        assert!((equal_rate_point(&seg).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn equal_rate_degenerate() {
        assert!(matches!(equal_rate_point(&pts(&[(2.0, 0.0)])), Err(Error::Degenerate(_))));
        assert!(matches!(equal_rate_point(&pts(&[(0.0, 0.0)])), Err(Error::Degenerate(_))));
        assert!(matches!(equal_rate_point(&[]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn hull_is_counter_clockwise() {
        let h = convex_hull(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5), (0.5, 0.0)]);
        assert_eq!(h, vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    }

    #[test]
    fn operating_points_below_all_thresholds() {
        let t = ThresholdTable::dvbs2_standard();
        let p = operating_points(-5.0, -5.0, &t);
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|p| p.r1 == 0.0 && p.r2 == 0.0));
    }

    #[test]
    fn operating_points_classical_rates() {
        let t = ThresholdTable::dvbs2_standard();
        let p = operating_points(10.5, 7.0, &t);
        assert_eq!((p[0].r1, p[0].r2), (2.0, 0.0));
        assert_eq!((p[1].r1, p[1].r2), (0.0, 3.0));
    }

    #[test]
    fn single_decodable_modcod_gives_no_gain() {
        let t = ThresholdTable::paper_default();
        // Between the two lowest QPSK thresholds only QPSK 1/4 decodes.
        assert_eq!(pair_gain(-2.0, -2.0, &t).unwrap(), 0.0);
    }

    #[test]
    fn gain_grid_shape() {
        let t = ThresholdTable::dvbs2_standard();
        let g = gain_grid(4.0, 5.0, 0.5, &t).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g.iter().all(|c| c.gain == Some(0.0)));
        assert!(gain_grid(4.0, 3.0, 0.5, &t).is_err());
    }
}
