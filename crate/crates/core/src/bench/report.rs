//! CSV output, percentile summaries and gnuplot column files.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use super::runner::ExperimentRecord;
use crate::error::{Error, Result};

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format(format!("{}: {other:?}", path.display())),
    }
}

/// Header row, then one row per record.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], w: W) -> csv::Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub const CSV_COLUMNS: [&str; 11] = [
    "experiment",
    "method",
    "drm_kind",
    "rank",
    "oversampling",
    "trial",
    "seed",
    "rel_error_input_norm",
    "rel_error_approx_norm",
    "wall_time_ms",
    "error",
];

pub fn read_csv<R: Read>(r: R) -> csv::Result<Vec<ExperimentRecord>> {
    csv::Reader::from_reader(r).deserialize().collect()
}

pub fn emit_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(records, std::io::BufWriter::new(file)).map_err(|e| csv_error(path, e))
}

pub fn parse_csv(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file)).map_err(|e| csv_error(path, e))
}

/// `p`-th percentile (0..=100) with linear interpolation between order statistics.
pub fn percentile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=100.0).contains(&p) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (pos - lo as f64) * (v[hi] - v[lo]))
}

pub fn median(values: &[f64]) -> Option<f64> {
    percentile(values, 50.0)
}

/// Ranks from 1, ties sharing their average rank.
fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation; `None` for fewer than two points or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean).powi(2);
        syy += (b - mean).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Statistics of one (experiment, method, DRM, oversampling, rank) group.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub experiment: String,
    pub method: String,
    pub drm_kind: String,
    pub oversampling: String,
    pub rank: String,
    pub runs: usize,
    pub failures: usize,
    pub p20: f64,
    pub median: f64,
    pub p80: f64,
    pub median_approx_norm: f64,
    pub median_time_ms: f64,
}

impl Summary {
    fn key(&self) -> (&str, &str, &str, &str) {
        (&self.experiment, &self.method, &self.drm_kind, &self.oversampling)
    }

    /// Label of the curve this group belongs to, e.g. `STTA gaussian 2r`.
    pub fn series(&self) -> String {
        let mut s = self.method.clone();
        for part in [&self.drm_kind, &self.oversampling] {
            if part != "-" {
                s.push(' ');
                s.push_str(part);
            }
        }
        s
    }
}

/// Group records by everything but the trial and summarize the input-norm errors. Groups
/// keep the order of first appearance; failed rows count as failures only.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<Summary> {
    let mut groups: Vec<Vec<&ExperimentRecord>> = Vec::new();
    let same = |a: &ExperimentRecord, b: &ExperimentRecord| {
        (&a.experiment, &a.method, &a.drm_kind, &a.oversampling, &a.rank)
            == (&b.experiment, &b.method, &b.drm_kind, &b.oversampling, &b.rank)
    };
    for r in records {
        match groups.iter_mut().find(|g| same(g[0], r)) {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    groups
        .into_iter()
        .map(|rows| {
            let ok: Vec<&ExperimentRecord> = rows.iter().copied().filter(|r| r.is_ok()).collect();
            let col = |f: fn(&ExperimentRecord) -> Option<f64>| -> Vec<f64> { ok.iter().filter_map(|r| f(r)).collect() };
            let errs = col(|r| r.rel_error_input_norm);
            let first = rows[0];
            Summary {
                experiment: first.experiment.clone(),
                method: first.method.clone(),
                drm_kind: first.drm_kind.clone(),
                oversampling: first.oversampling.clone(),
                rank: first.rank.clone(),
                runs: ok.len(),
                failures: rows.len() - ok.len(),
                p20: percentile(&errs, 20.0).unwrap_or(f64::NAN),
                median: median(&errs).unwrap_or(f64::NAN),
                p80: percentile(&errs, 80.0).unwrap_or(f64::NAN),
                median_approx_norm: median(&col(|r| r.rel_error_approx_norm)).unwrap_or(f64::NAN),
                median_time_ms: median(&col(|r| r.wall_time_ms)).unwrap_or(f64::NAN),
            }
        })
        .collect()
}

/// gnuplot data: one `index` block per curve, columns
/// `rank p20 median p80 median_approx_norm median_time_ms`.
pub fn plot_data(summaries: &[Summary]) -> String {
    let mut out = String::new();
    let mut current: Option<(&str, &str, &str, &str)> = None;
    for s in summaries {
        if current != Some(s.key()) {
            if current.is_some() {
                out.push_str("\n\n");
            }
            let _ = writeln!(out, "# {} {}", s.experiment, s.series());
            out.push_str("# rank p20 median p80 median_approx_norm median_time_ms\n");
            current = Some(s.key());
        }
        let _ = writeln!(
            out,
            "{} {:e} {:e} {:e} {:e} {:.6}",
            s.rank.replace(' ', ""),
            s.p20,
            s.median,
            s.p80,
            s.median_approx_norm,
            s.median_time_ms
        );
    }
    out
}
