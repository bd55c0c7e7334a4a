use crate::engine::{run_dsa1, run_mdsa, Algorithm, BufferSize, SimConfig};
use crate::error::Result;
use crate::harness::sweep::mean_stddev;
use crate::seed::derive_seed;

/// Buffer sizes compared in the table.
pub const TABLE1_BUFFERS: [usize; 4] = [5, 6, 7, 8];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: usize,
    /// Mean over trials.
    pub data_messages: f64,
    /// Mean over trials.
    pub percent_unused: f64,
    /// Per-trial `(data_messages, percent_unused)`; trial `t` of every row
    /// shares one topology.
    pub samples: Vec<(u64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub n: usize,
    pub rows: Vec<TableRow>,
}

impl ComparisonTable {
    pub fn row(&self, algorithm: Algorithm, m: usize) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm && r.m == m)
    }
}

/// Runs both algorithms for every buffer size in `m_values` on `trials`
/// shared topologies and averages message counts and unused-buffer share.
pub fn table1(base: &SimConfig, m_values: &[usize], trials: usize) -> Result<ComparisonTable> {
    base.validate()?;
    let seeds: Vec<u64> = (0..trials.max(1))
        .map(|t| derive_seed(base.seed, "table1", &[t as u64]))
        .collect();
    let mut rows = Vec::new();
    for algorithm in [Algorithm::Mdsa, Algorithm::Dsa1] {
        for &m in m_values {
            let mut samples = Vec::with_capacity(seeds.len());
            for &seed in &seeds {
                let cfg = SimConfig {
                    seed,
                    buffer: BufferSize::Slots(m),
                    ..base.clone()
                };
                let report = match algorithm {
                    Algorithm::Mdsa => run_mdsa(&cfg)?.report,
                    Algorithm::Dsa1 => run_dsa1(&cfg)?.report,
                };
                samples.push((report.data_messages, report.percent_unused));
            }
            let msgs: Vec<f64> = samples.iter().map(|s| s.0 as f64).collect();
            let unused: Vec<f64> = samples.iter().map(|s| s.1).collect();
            rows.push(TableRow {
                algorithm,
                n: base.n,
                m,
                data_messages: mean_stddev(&msgs).0,
                percent_unused: mean_stddev(&unused).0,
                samples,
            });
        }
    }
    Ok(ComparisonTable { n: base.n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape_and_directions() {
        let t = table1(&SimConfig::with_n(15, 1), &TABLE1_BUFFERS, 5).unwrap();
        assert_eq!(t.rows.len(), 8);
        for r in &t.rows {
            assert!((0.0..=100.0).contains(&r.percent_unused));
            assert_eq!(r.samples.len(), 5);
        }
        for m in TABLE1_BUFFERS {
            let a = t.row(Algorithm::Mdsa, m).unwrap();
            let b = t.row(Algorithm::Dsa1, m).unwrap();
            assert!(a.data_messages < b.data_messages);
        }
        let m5 = t.row(Algorithm::Mdsa, 5).unwrap().percent_unused;
        let m8 = t.row(Algorithm::Mdsa, 8).unwrap().percent_unused;
        assert!(m5 <= m8);
    }
}
