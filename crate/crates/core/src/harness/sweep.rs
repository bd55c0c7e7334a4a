use rayon::prelude::*;

use crate::engine::{apply_failures, measure_recovery, run_dsa1, run_mdsa, Algorithm, SimConfig};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Network sizes of the decoding-ratio figures.
pub const PAPER_FIG_SIZES: [usize; 6] = [50, 100, 150, 200, 400, 600];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub query_ratio: f64,
    pub mean: f64,
    pub stddev: f64,
    /// Trials that contributed to `mean` (skipped trials excluded).
    pub trials: usize,
    pub skipped: usize,
}

/// Recovery percentage against query ratio for one algorithm and size.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub algorithm: Algorithm,
    pub n: usize,
    pub buffer: usize,
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    /// For every pair of ratios `r1 < r2`,
    /// `mean(r2) >= mean(r1) - 2 * (stddev(r1) + stddev(r2))`.
    pub fn is_statistically_monotone(&self) -> bool {
        self.points.iter().enumerate().all(|(i, a)| {
            self.points[i + 1..]
                .iter()
                .all(|b| b.mean >= a.mean - 2.0 * (a.stddev + b.stddev))
        })
    }
}

/// Mean and sample standard deviation. Identical values give exactly
/// `(value, 0.0)`; fewer than two values give a zero deviation.
pub fn mean_stddev(values: &[f64]) -> (f64, f64) {
    match values {
        [] => (0.0, 0.0),
        [first, rest @ ..] if rest.iter().all(|v| v == first) => (*first, 0.0),
        _ => {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (mean, var.sqrt())
        }
    }
}

fn ratio_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::param(format!("step must be in (0, 1], got {step}")));
    }
    let count = (1.0 / step + 1e-9).floor() as usize;
    Ok((1..=count)
        .map(|i| (i as f64 * step * 1e9).round() / 1e9)
        .collect())
}

fn trial_recovery(algorithm: Algorithm, cfg: &SimConfig, ratio: f64) -> Result<f64> {
    let fail_seed = derive_seed(cfg.seed, "fail", &[]);
    let query_seed = derive_seed(cfg.seed, "measure", &[]);
    match algorithm {
        Algorithm::Mdsa => {
            let mut run = run_mdsa(cfg)?;
            apply_failures(&mut run.nodes, cfg.failure_fraction, fail_seed)?;
            measure_recovery(&run, ratio, query_seed)
        }
        Algorithm::Dsa1 => {
            let mut run = run_dsa1(cfg)?;
            apply_failures(&mut run.nodes, cfg.failure_fraction, fail_seed)?;
            measure_recovery(&run, ratio, query_seed)
        }
    }
}

/// Runs `trials` independent simulations at every ratio `step, 2*step, .., 1`.
///
/// Trial `t` at ratio `r` uses the seed `hash(base.seed, r, t)`, so changing
/// the step or trial count leaves the other trials untouched. Trials run in
/// parallel; results are aggregated in trial order.
pub fn sweep(algorithm: Algorithm, base: &SimConfig, trials: usize, step: f64) -> Result<SweepCurve> {
    base.validate()?;
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    if (base.n as f64) * step < 1.0 - 1e-9 {
        return Err(Error::param(format!(
            "n={} with step {step} would query less than one node per step",
            base.n
        )));
    }
    let ratios = ratio_grid(step)?;
    let jobs: Vec<(usize, usize)> = (0..ratios.len())
        .flat_map(|ri| (0..trials).map(move |t| (ri, t)))
        .collect();
    let outcomes: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(ri, t)| {
            let ratio = ratios[ri];
            let seed = derive_seed(base.seed, "sweep", &[(ratio * 1e6).round() as u64, t as u64]);
            let cfg = SimConfig {
                seed,
                ..base.clone()
            };
            trial_recovery(algorithm, &cfg, ratio)
        })
        .collect();

    let mut outcomes = outcomes.into_iter();
    let mut points = Vec::with_capacity(ratios.len());
    for &ratio in &ratios {
        let mut values = Vec::with_capacity(trials);
        let mut skipped = 0;
        for outcome in outcomes.by_ref().take(trials) {
            match outcome {
                Ok(v) => values.push(v),
                Err(Error::InsufficientAlive { .. }) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
        let (mean, stddev) = mean_stddev(&values);
        points.push(SweepPoint {
            query_ratio: ratio,
            mean,
            stddev,
            trials: values.len(),
            skipped,
        });
    }
    Ok(SweepCurve {
        algorithm,
        n: base.n,
        buffer: base.buffer_capacity(),
        points,
    })
}

/// One curve per size in [`PAPER_FIG_SIZES`], each with the auto buffer.
pub fn paper_figs(algorithm: Algorithm, base: &SimConfig, trials: usize, step: f64) -> Result<Vec<SweepCurve>> {
    PAPER_FIG_SIZES
        .iter()
        .map(|&n| {
            let cfg = SimConfig {
                n,
                buffer: crate::engine::BufferSize::Auto,
                radius: None,
                ..base.clone()
            };
            sweep(algorithm, &cfg, trials, step)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_ten_clean_points() {
        let g = ratio_grid(0.1).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[2], 0.3);
        assert_eq!(g[9], 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ratio_grid(0.25).unwrap(), vec![0.25, 0.5, 0.75, 1.0]);
        assert!(ratio_grid(0.0).is_err());
    }

    #[test]
    fn mean_stddev_basics() {
        assert_eq!(mean_stddev(&[]), (0.0, 0.0));
        assert_eq!(mean_stddev(&[4.0]), (4.0, 0.0));
        assert_eq!(mean_stddev(&[1.0 / 3.0; 30]), (1.0 / 3.0, 0.0));
        let (m, s) = mean_stddev(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        // sample variance 32 / 7
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mdsa_sweep_endpoint_and_determinism() {
        let cfg = SimConfig::with_n(50, 11);
        let c = sweep(Algorithm::Mdsa, &cfg, 4, 0.1).unwrap();
        assert_eq!(c.points.len(), 10);
        assert_eq!(c.buffer, 5);
        let last = c.points.last().unwrap();
        assert_eq!((last.mean, last.stddev, last.trials), (100.0, 0.0, 4));
        assert!(c.is_statistically_monotone());
        for p in &c.points {
            assert!((0.0..=100.0).contains(&p.mean) && p.stddev >= 0.0);
        }
        let once = sweep(Algorithm::Mdsa, &cfg, 1, 0.1).unwrap();
        assert_eq!(once, sweep(Algorithm::Mdsa, &cfg, 1, 0.1).unwrap());
        // trial 0 is shared between the 1-trial and 4-trial sweeps
        let c5 = sweep(Algorithm::Mdsa, &cfg, 1, 0.5).unwrap();
        assert_eq!(c5.points[0].mean, once.points[4].mean);
    }

    #[test]
    fn failures_skip_trials() {
        let cfg = SimConfig {
            failure_fraction: 0.5,
            ..SimConfig::with_n(10, 2)
        };
        let c = sweep(Algorithm::Mdsa, &cfg, 3, 0.1).unwrap();
        // only 5 nodes stay alive, so ratios above 0.5 cannot be served
        assert_eq!(c.points[4].trials, 3);
        assert_eq!(c.points[5].trials, 0);
        assert_eq!(c.points[5].skipped, 3);
    }

    #[test]
    fn rejects_tiny_networks() {
        assert!(matches!(
            sweep(Algorithm::Mdsa, &SimConfig::with_n(5, 1), 1, 0.1),
            Err(Error::Param(_))
        ));
        assert!(sweep(Algorithm::Mdsa, &SimConfig::with_n(10, 1), 0, 0.1).is_err());
    }

    #[test]
    fn dsa1_sweep_runs() {
        let c = sweep(Algorithm::Dsa1, &SimConfig::with_n(20, 3), 2, 0.5).unwrap();
        assert_eq!(c.points.len(), 2);
        assert!(c.points.iter().all(|p| (0.0..=100.0).contains(&p.mean)));
    }
}
