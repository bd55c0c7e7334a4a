use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{Algorithm, SimReport};
use crate::error::{Error, Result};
use crate::harness::sweep::{SweepCurve, SweepPoint};
use crate::harness::table::{ComparisonTable, TableRow};
use crate::protocol::ForwardPolicy;

const CURVE_HEADER: [&str; 7] = ["algorithm", "n", "buffer", "query_ratio", "mean", "stddev", "trials"];
const REPORT_HEADER: [&str; 14] = [
    "algorithm",
    "n",
    "buffer",
    "radius",
    "topology_seed",
    "topology_retries",
    "data_messages",
    "flood_messages",
    "unicast_messages",
    "init_messages",
    "energy_total",
    "percent_unused",
    "rounds_to_quiescence",
    "policy",
];
const TABLE_HEADER: [&str; 5] = ["algorithm", "n", "M", "data_messages", "percent_unused"];

#[derive(Debug, Serialize, Deserialize)]
struct CurveRecord {
    algorithm: String,
    n: usize,
    buffer: usize,
    query_ratio: f64,
    mean: f64,
    stddev: f64,
    trials: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableRecord {
    algorithm: String,
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    data_messages: f64,
    percent_unused: f64,
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn writer(path: &Path, header: &[&str]) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(header).map_err(csv_err(path))?;
    Ok(w)
}

fn finish(mut w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes `algorithm,n,buffer,query_ratio,mean,stddev,trials`, one row per point.
pub fn emit_curves_csv(curves: &[SweepCurve], path: &Path) -> Result<()> {
    let mut w = writer(path, &CURVE_HEADER)?;
    for c in curves {
        for p in &c.points {
            w.serialize(CurveRecord {
                algorithm: c.algorithm.to_string(),
                n: c.n,
                buffer: c.buffer,
                query_ratio: p.query_ratio,
                mean: p.mean,
                stddev: p.stddev,
                trials: p.trials,
            })
            .map_err(csv_err(path))?;
        }
    }
    finish(w, path)
}

/// Writes `algorithm,n,M,data_messages,percent_unused`.
pub fn emit_table_csv(table: &ComparisonTable, path: &Path) -> Result<()> {
    let mut w = writer(path, &TABLE_HEADER)?;
    for r in &table.rows {
        w.serialize(TableRecord {
            algorithm: r.algorithm.to_string(),
            n: r.n,
            m: r.m,
            data_messages: r.data_messages,
            percent_unused: r.percent_unused,
        })
        .map_err(csv_err(path))?;
    }
    finish(w, path)
}

/// Writes one summary row per run report. `policy` is empty for the baseline.
pub fn emit_report_csv(reports: &[(SimReport, Option<ForwardPolicy>)], path: &Path) -> Result<()> {
    let mut w = writer(path, &REPORT_HEADER)?;
    for (r, policy) in reports {
        w.write_record([
            r.algorithm.to_string(),
            r.n.to_string(),
            r.buffer_capacity.to_string(),
            r.radius.to_string(),
            r.topology_seed.to_string(),
            r.topology_retries.to_string(),
            r.data_messages.to_string(),
            r.flood_messages.to_string(),
            r.unicast_messages.to_string(),
            r.init_messages.to_string(),
            r.energy_total.to_string(),
            r.percent_unused.to_string(),
            r.rounds_to_quiescence.to_string(),
            policy.map(|p| p.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err(path))?;
    }
    finish(w, path)
}

fn reader(path: &Path, header: &[&str]) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let got = r.headers().map_err(csv_err(path))?;
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::param(format!(
            "{}: unexpected CSV header {:?}",
            path.display(),
            got
        )));
    }
    Ok(r)
}

/// Reads a curve CSV back; consecutive rows with the same
/// `(algorithm, n, buffer)` form one curve. Skip counts are not stored.
pub fn parse_curves_csv(path: &Path) -> Result<Vec<SweepCurve>> {
    let mut r = reader(path, &CURVE_HEADER)?;
    let mut curves: Vec<SweepCurve> = Vec::new();
    for rec in r.deserialize::<CurveRecord>() {
        let rec = rec.map_err(csv_err(path))?;
        let algorithm: Algorithm = rec.algorithm.parse()?;
        let point = SweepPoint {
            query_ratio: rec.query_ratio,
            mean: rec.mean,
            stddev: rec.stddev,
            trials: rec.trials,
            skipped: 0,
        };
        match curves.last_mut() {
            Some(c) if c.algorithm == algorithm && c.n == rec.n && c.buffer == rec.buffer => {
                c.points.push(point)
            }
            _ => curves.push(SweepCurve {
                algorithm,
                n: rec.n,
                buffer: rec.buffer,
                points: vec![point],
            }),
        }
    }
    Ok(curves)
}

/// Reads a table CSV back. Per-trial samples are not stored in the file.
pub fn parse_table_csv(path: &Path) -> Result<ComparisonTable> {
    let mut r = reader(path, &TABLE_HEADER)?;
    let mut rows = Vec::new();
    for rec in r.deserialize::<TableRecord>() {
        let rec = rec.map_err(csv_err(path))?;
        rows.push(TableRow {
            algorithm: rec.algorithm.parse()?,
            n: rec.n,
            m: rec.m,
            data_messages: rec.data_messages,
            percent_unused: rec.percent_unused,
            samples: Vec::new(),
        });
    }
    let n = rows.first().map_or(0, |r| r.n);
    Ok(ComparisonTable { n, rows })
}
