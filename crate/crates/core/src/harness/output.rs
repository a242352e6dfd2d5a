//! CSV persistence and text summaries of experiment records.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use super::config::Scheme;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "trial,scheme,my,mz,m_hat,bits,seed,iterations,converged,rate_bps_hz,wall_ms";

/// One `(trial, scheme)` result.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub trial: usize,
    pub scheme: Scheme,
    pub my: usize,
    pub mz: usize,
    pub m_hat: usize,
    pub bits: u32,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    /// `None` when the scheme failed; the CSV field is left empty.
    pub rate_bps_hz: Option<f64>,
    pub wall_ms: f64,
    pub failure: Option<String>,
}

pub fn format_csv(records: &[ResultRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let rate = r.rate_bps_hz.map(|x| format!("{x:.6}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{:.3}",
            r.trial, r.scheme, r.my, r.mz, r.m_hat, r.bits, r.seed, r.iterations, r.converged, rate, r.wall_ms
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn write_csv(records: &[ResultRecord], out_path: &Path) -> Result<()> {
    fs::write(out_path, format_csv(records)).map_err(|source| Error::Io { path: out_path.to_path_buf(), source })
}

fn field<T: std::str::FromStr>(line: usize, name: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidInput(format!("line {line}: bad {name} {v:?}")))
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::InvalidInput(format!("unexpected CSV header {other:?}"))),
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 11 {
            return Err(Error::InvalidInput(format!("line {n}: expected 11 fields, got {}", cols.len())));
        }
        let rate = if cols[9].is_empty() { None } else { Some(field(n, "rate_bps_hz", cols[9])?) };
        records.push(ResultRecord {
            trial: field(n, "trial", cols[0])?,
            scheme: cols[1].parse()?,
            my: field(n, "my", cols[2])?,
            mz: field(n, "mz", cols[3])?,
            m_hat: field(n, "m_hat", cols[4])?,
            bits: field(n, "bits", cols[5])?,
            seed: field(n, "seed", cols[6])?,
            iterations: field(n, "iterations", cols[7])?,
            converged: field(n, "converged", cols[8])?,
            rate_bps_hz: rate,
            wall_ms: field(n, "wall_ms", cols[10])?,
            failure: rate.is_none().then(|| "failed".to_string()),
        });
    }
    Ok(records)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRecord>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_csv(&text)
}

/// Setting shared by the schemes compared in a summary row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Setting {
    pub my: usize,
    pub mz: usize,
    pub m_hat: usize,
    pub bits: u32,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} m_hat={} b={}", self.my, self.mz, self.m_hat, self.bits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub scheme: Scheme,
    pub setting: Setting,
    pub count: usize,
    pub failed: usize,
    pub mean: f64,
    /// Sample standard deviation; zero when `count == 1`.
    pub sd: f64,
    /// `1.96·sd/√n`.
    pub ci95: f64,
    pub single_trial: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub groups: Vec<GroupStats>,
    /// FRIS/RIS mean-rate ratio per setting where both ran.
    pub ratios: Vec<(Setting, f64)>,
}

impl Summary {
    pub fn group(&self, scheme: Scheme, setting: Setting) -> Option<&GroupStats> {
        self.groups.iter().find(|g| g.scheme == scheme && g.setting == setting)
    }
}

pub fn summarize(records: &[ResultRecord]) -> Summary {
    let mut buckets: BTreeMap<(Setting, Scheme), (Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        let setting = Setting { my: r.my, mz: r.mz, m_hat: r.m_hat, bits: r.bits };
        let entry = buckets.entry((setting, r.scheme)).or_default();
        match r.rate_bps_hz {
            Some(x) => entry.0.push(x),
            None => entry.1 += 1,
        }
    }
    let groups: Vec<GroupStats> = buckets
        .into_iter()
        .map(|((setting, scheme), (rates, failed))| {
            let n = rates.len();
            let mean = if n == 0 { f64::NAN } else { rates.iter().sum::<f64>() / n as f64 };
            let sd = if n > 1 {
                (rates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            let ci95 = if n > 1 { 1.96 * sd / (n as f64).sqrt() } else { 0.0 };
            GroupStats { scheme, setting, count: n, failed, mean, sd, ci95, single_trial: n == 1 }
        })
        .collect();
    let mut ratios = Vec::new();
    for g in groups.iter().filter(|g| g.scheme == Scheme::Fris && g.count > 0) {
        if let Some(ris) = groups
            .iter()
            .find(|r| r.scheme == Scheme::Ris && r.setting == g.setting && r.count > 0)
        {
            ratios.push((g.setting, g.mean / ris.mean));
        }
    }
    Summary { groups, ratios }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:<24} {:>6} {:>12} {:>12} {:>12}", "scheme", "setting", "n", "mean", "sd", "ci95")?;
        for g in &self.groups {
            write!(
                f,
                "{:<8} {:<24} {:>6} {:>12.6} {:>12.6} {:>12.6}",
                g.scheme.name(),
                g.setting.to_string(),
                g.count,
                g.mean,
                g.sd,
                g.ci95
            )?;
            if g.single_trial {
                write!(f, "  (single trial, sd undefined)")?;
            }
            if g.failed > 0 {
                write!(f, "  ({} failed)", g.failed)?;
            }
            writeln!(f)?;
        }
        for (setting, ratio) in &self.ratios {
            writeln!(f, "fris/ris {setting}: {ratio:.4}")?;
        }
        Ok(())
    }
}
