//! Decoding thresholds.
//!
//! A [`ThresholdTable`] lists the SNR each (modulation, code rate, stream)
//! combination needs to be decoded. Single-stream DVB-S2 values are ingested
//! from a CSV file; hierarchical HE/LE values are either ingested or
//! estimated from constellation-constrained mutual information (see
//! [`mi`] and [`threshold`]).

pub mod mi;
pub mod threshold;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::StreamRole;
use crate::error::{Error, Result};

pub use mi::{stream_mutual_information, MiMethod};
pub use threshold::{
    estimate_hierarchical_table, estimate_threshold, select_pair, Geometry, HierarchicalOptions,
    SelectOptions, SelectedPair, DEFAULT_MARGIN_DB,
};

const DVBS2_TABLE: &str = include_str!("../../data/dvbs2_thresholds.csv");
const HIERARCHICAL_TABLE: &str = include_str!("../../data/hierarchical_thresholds.csv");

/// LDPC code rate `num/den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CodeRate {
    num: u8,
    den: u8,
}

/// The eleven DVB-S2 code rates.
pub const DVBS2_CODE_RATES: [(u8, u8); 11] =
    [(1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (4, 5), (5, 6), (8, 9), (9, 10)];

impl CodeRate {
    pub fn new(num: u8, den: u8) -> Result<Self> {
        if num == 0 || num >= den {
            return Err(Error::InvalidParameter(format!("code rate {num}/{den} not in (0, 1)")));
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> u8 {
        self.num
    }

    pub fn den(&self) -> u8 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn dvbs2() -> Vec<CodeRate> {
        DVBS2_CODE_RATES.iter().map(|&(n, d)| CodeRate { num: n, den: d }).collect()
    }

    /// Parses a comma separated list such as `1/2,2/3,3/4`.
    pub fn parse_list(s: &str) -> Result<Vec<CodeRate>> {
        s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
    }
}

impl Ord for CodeRate {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u32 * other.den as u32)
            .cmp(&(other.num as u32 * self.den as u32))
            .then(self.den.cmp(&other.den))
    }
}

impl PartialOrd for CodeRate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for CodeRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("code rate '{s}' is not of the form p/q"));
        let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let d = d.trim().parse().map_err(|_| bad())?;
        CodeRate::new(n, d)
    }
}

impl TryFrom<String> for CodeRate {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CodeRate> for String {
    fn from(r: CodeRate) -> String {
        r.to_string()
    }
}

/// Modulation identifier used in threshold tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modulation {
    Qpsk,
    Psk8,
    Apsk16,
    Apsk32,
    /// Hierarchical 16-APSK identified by its HE energy fraction in
    /// thousandths.
    HierApsk16 { rho_permille: u16 },
}

impl Modulation {
    pub fn hierarchical_apsk(rho_he: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&rho_he) {
            return Err(Error::InvalidParameter(format!(
                "rho_he must be >= 0.5 and < 1, got {rho_he}"
            )));
        }
        Ok(Modulation::HierApsk16 { rho_permille: (rho_he * 1000.0).round() as u16 })
    }

    pub fn is_hierarchical(&self) -> bool {
        matches!(self, Modulation::HierApsk16 { .. })
    }

    /// HE energy fraction for hierarchical modulations.
    pub fn rho_he(&self) -> Option<f64> {
        match self {
            Modulation::HierApsk16 { rho_permille } => Some(*rho_permille as f64 / 1000.0),
            _ => None,
        }
    }

    /// Bits per symbol carried by `stream`, `None` if the stream does not
    /// exist for this modulation.
    pub fn stream_bits(&self, stream: StreamRole) -> Option<u32> {
        match (self, stream) {
            (Modulation::Qpsk, StreamRole::Single) => Some(2),
            (Modulation::Psk8, StreamRole::Single) => Some(3),
            (Modulation::Apsk16, StreamRole::Single) => Some(4),
            (Modulation::Apsk32, StreamRole::Single) => Some(5),
            (Modulation::HierApsk16 { .. }, StreamRole::He | StreamRole::Le) => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Qpsk => f.write_str("QPSK"),
            Modulation::Psk8 => f.write_str("8PSK"),
            Modulation::Apsk16 => f.write_str("16APSK"),
            Modulation::Apsk32 => f.write_str("32APSK"),
            Modulation::HierApsk16 { rho_permille } => {
                let whole = rho_permille / 1000;
                let frac = rho_permille % 1000;
                if frac % 10 == 0 {
                    write!(f, "H16APSK-{whole}.{:02}", frac / 10)
                } else {
                    write!(f, "H16APSK-{whole}.{frac:03}")
                }
            }
        }
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        match t.as_str() {
            "QPSK" => Ok(Modulation::Qpsk),
            "8PSK" => Ok(Modulation::Psk8),
            "16APSK" => Ok(Modulation::Apsk16),
            "32APSK" => Ok(Modulation::Apsk32),
            _ => {
                let rho = t
                    .strip_prefix("H16APSK-")
                    .and_then(|r| r.parse::<f64>().ok())
                    .ok_or_else(|| Error::UnknownModulation(s.trim().to_string()))?;
                Modulation::hierarchical_apsk(rho)
            }
        }
    }
}

/// Where a threshold came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    /// Read from a table file (standard or user supplied).
    Ingested,
    /// Computed by the mutual-information estimator.
    Estimated,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Ingested => "ingested",
            Provenance::Estimated => "estimated",
        })
    }
}

/// A modulation, code rate and stream with its decoding threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModCod {
    pub modulation: Modulation,
    pub code_rate: CodeRate,
    pub stream: StreamRole,
    pub threshold_db: f64,
    pub provenance: Provenance,
}

impl ModCod {
    /// Useful bits per symbol: stream bits times code rate.
    pub fn spectral_efficiency(&self) -> f64 {
        self.modulation.stream_bits(self.stream).unwrap_or(0) as f64 * self.code_rate.value()
    }
}

impl fmt::Display for ModCod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.stream == StreamRole::Single {
            write!(f, "{} {}", self.modulation, self.code_rate)
        } else {
            write!(f, "{} {} {}", self.modulation, self.stream, self.code_rate)
        }
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    modulation: String,
    code_rate: String,
    stream: String,
    threshold_db: f64,
    #[serde(default)]
    provenance: Option<String>,
}

/// Validated set of decoding thresholds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThresholdTable {
    entries: Vec<ModCod>,
}

impl ThresholdTable {
    /// Validates and sorts `entries` by modulation, stream and code rate.
    pub fn new(mut entries: Vec<ModCod>) -> Result<Self> {
        for e in &entries {
            if !e.threshold_db.is_finite() {
                return Err(Error::InvalidParameter(format!("{e}: threshold is not finite")));
            }
            if e.modulation.stream_bits(e.stream).is_none() {
                return Err(Error::InvalidParameter(format!(
                    "stream {} does not exist for {}",
                    e.stream, e.modulation
                )));
            }
        }
        entries.sort_by(|a, b| {
            (a.modulation, a.stream, a.code_rate).cmp(&(b.modulation, b.stream, b.code_rate))
        });
        for w in entries.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            if (lo.modulation, lo.stream) != (hi.modulation, hi.stream) {
                continue;
            }
            if lo.code_rate == hi.code_rate {
                return Err(Error::InvalidParameter(format!("duplicate entry {hi}")));
            }
            if lo.threshold_db >= hi.threshold_db {
                return Err(Error::Monotonicity {
                    modulation: lo.modulation.to_string(),
                    stream: lo.stream.to_string(),
                    lower_rate: lo.code_rate.to_string(),
                    lower_db: lo.threshold_db,
                    upper_rate: hi.code_rate.to_string(),
                    upper_db: hi.threshold_db,
                });
            }
        }
        Ok(Self { entries })
    }

    /// Reads a `modulation,code_rate,stream,threshold_db` CSV. An optional
    /// fifth `provenance` column is accepted.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| csv_error(&e))?.clone();
        let expected = ["modulation", "code_rate", "stream", "threshold_db"];
        if headers.len() < 4 || headers.iter().take(4).ne(expected) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header '{}'", expected.join(",")),
            });
        }
        let mut entries = Vec::new();
        for row in rdr.deserialize::<CsvRow>() {
            let row = row.map_err(|e| csv_error(&e))?;
            entries.push(row);
        }
        if entries.is_empty() {
            return Err(Error::Parse { line: 2, message: "table has no entries".into() });
        }
        let entries = entries
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                let line = i as u64 + 2;
                let wrap = |e: Error| Error::Parse { line, message: e.to_string() };
                let provenance = match row.provenance.as_deref() {
                    None | Some("") | Some("ingested") => Provenance::Ingested,
                    Some("estimated") => Provenance::Estimated,
                    Some(other) => {
                        return Err(wrap(Error::InvalidParameter(format!(
                            "unknown provenance '{other}'"
                        ))))
                    }
                };
                Ok(ModCod {
                    modulation: row.modulation.parse().map_err(wrap)?,
                    code_rate: row.code_rate.parse().map_err(wrap)?,
                    stream: row.stream.parse().map_err(wrap)?,
                    threshold_db: row.threshold_db,
                    provenance,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        Self::from_csv_reader(s.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file)
    }

    /// Writes the four-column schema.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "modulation,code_rate,stream,threshold_db")?;
        for e in &self.entries {
            writeln!(out, "{},{},{},{}", e.modulation, e.code_rate, e.stream, e.threshold_db)?;
        }
        Ok(())
    }

    /// The DVB-S2 single-stream thresholds (QPSK, 8PSK, 16APSK, 32APSK).
    pub fn dvbs2_standard() -> Self {
        Self::from_csv_str(DVBS2_TABLE).expect("bundled DVB-S2 table is valid")
    }

    /// DVB-S2 single-stream thresholds without 32APSK, plus the bundled
    /// hierarchical 16-APSK estimates for `rho_he` in {0.75, 0.8, 0.85, 0.9}.
    pub fn paper_default() -> Self {
        let mut hier = Self::from_csv_str(HIERARCHICAL_TABLE)
            .expect("bundled hierarchical table is valid");
        for e in &mut hier.entries {
            e.provenance = Provenance::Estimated;
        }
        Self::dvbs2_standard()
            .without_modulation(Modulation::Apsk32)
            .merged(&hier)
            .expect("bundled tables merge")
    }

    pub fn entries(&self) -> &[ModCod] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries of `other` replace entries of `self` with the same
    /// (modulation, stream, code rate) key.
    pub fn merged(&self, other: &ThresholdTable) -> Result<Self> {
        let mut map: BTreeMap<(Modulation, StreamRole, CodeRate), ModCod> = BTreeMap::new();
        for e in self.entries.iter().chain(&other.entries) {
            map.insert((e.modulation, e.stream, e.code_rate), *e);
        }
        Self::new(map.into_values().collect())
    }

    pub fn without_modulation(&self, modulation: Modulation) -> Self {
        Self { entries: self.entries.iter().filter(|e| e.modulation != modulation).copied().collect() }
    }

    /// Keeps single-stream entries and the hierarchical modulations whose
    /// `rho_he` is in `rhos`.
    pub fn restricted_to_rhos(&self, rhos: &[f64]) -> Self {
        let keep: Vec<Modulation> =
            rhos.iter().filter_map(|&r| Modulation::hierarchical_apsk(r).ok()).collect();
        Self {
            entries: self
                .entries
                .iter()
                .filter(|e| !e.modulation.is_hierarchical() || keep.contains(&e.modulation))
                .copied()
                .collect(),
        }
    }

    /// Distinct hierarchical modulations present in the table.
    pub fn hierarchical_modulations(&self) -> Vec<Modulation> {
        let mut mods: Vec<_> =
            self.entries.iter().map(|e| e.modulation).filter(Modulation::is_hierarchical).collect();
        mods.dedup();
        mods
    }

    pub fn get(&self, modulation: Modulation, stream: StreamRole, rate: CodeRate) -> Option<&ModCod> {
        self.entries
            .iter()
            .find(|e| e.modulation == modulation && e.stream == stream && e.code_rate == rate)
    }

    /// Highest-efficiency entry of `modulation`/`stream` decodable at `snr_db`.
    pub fn best_entry(&self, modulation: Modulation, stream: StreamRole, snr_db: f64) -> Option<&ModCod> {
        self.entries
            .iter()
            .filter(|e| e.modulation == modulation && e.stream == stream && e.threshold_db <= snr_db)
            .max_by(|a, b| a.spectral_efficiency().total_cmp(&b.spectral_efficiency()))
    }

    /// Best single-stream entry decodable at `snr_db`.
    pub fn best_single(&self, snr_db: f64) -> Option<&ModCod> {
        self.entries
            .iter()
            .filter(|e| e.stream == StreamRole::Single && e.threshold_db <= snr_db)
            .max_by(|a, b| {
                a.spectral_efficiency()
                    .total_cmp(&b.spectral_efficiency())
                    .then(b.threshold_db.total_cmp(&a.threshold_db))
            })
    }

    /// Best single-stream spectral efficiency at `snr_db`, 0 if nothing
    /// decodes.
    pub fn best_single_rate(&self, snr_db: f64) -> f64 {
        self.best_single(snr_db).map_or(0.0, ModCod::spectral_efficiency)
    }

    /// Lowest single-stream threshold in the table.
    pub fn min_single_threshold(&self) -> Option<f64> {
        self.entries
            .iter()
            .filter(|e| e.stream == StreamRole::Single)
            .map(|e| e.threshold_db)
            .min_by(f64::total_cmp)
    }
}

fn csv_error(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse { line, message: e.to_string() }
}
