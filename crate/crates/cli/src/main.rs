//! `mdsa` command-line runner.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 on I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdsa_core::engine::{run_mdsa_traced, SimReport};
use mdsa_core::harness::{
    emit_curves_csv, emit_plot, emit_report_csv, emit_table_csv, paper_figs, parse_config, sweep,
    table1, SweepCurve, PAPER_FIG_SIZES, TABLE1_BUFFERS,
};
use mdsa_core::topology::generate_connected;
use mdsa_core::{run_dsa1, Algorithm, BufferSize, Error, ForwardPolicy, SimConfig};

#[derive(Debug, Parser)]
#[command(name = "mdsa", version, about = "Distributed storage simulator for wireless sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and write its report.
    Run {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Mdsa)]
        algorithm: AlgorithmArg,
        /// Also write the topology text dump.
        #[arg(long)]
        dump_topology: bool,
        /// Write a per-delivery trace log (MDSA only).
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Recovery percentage against query ratio (Monte Carlo).
    Sweep {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        mc: MonteCarloArgs,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Mdsa)]
        algorithm: AlgorithmArg,
        /// Named preset; `paper-figs` sweeps n = 50,100,150,200,400,600 with auto buffers.
        #[arg(long, value_enum)]
        preset: Option<Preset>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Message counts and unused buffer share of both algorithms for M = 5..8.
    Table1 {
        #[command(flatten)]
        sim: SimArgs,
        /// Topologies averaged per row.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Sweep both algorithms and plot them together.
    Compare {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        mc: MonteCarloArgs,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Print the (connected) topology a run with these flags would use.
    DumpTopology {
        #[command(flatten)]
        sim: SimArgs,
        /// Write into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SimArgs {
    /// `key = value` config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Communication radius in unit-square units (default: expected degree 2 ln n).
    #[arg(long)]
    radius: Option<f64>,
    /// Buffer slots per node, or `auto` for 10% of n.
    #[arg(long)]
    buffer: Option<String>,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    #[arg(long)]
    failure_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct MonteCarloArgs {
    #[arg(long, default_value_t = 30)]
    trials: usize,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Mdsa,
    Dsa1,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Mdsa => Algorithm::Mdsa,
            AlgorithmArg::Dsa1 => Algorithm::Dsa1,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Drop,
    Forward,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    PaperFigs,
}

impl SimArgs {
    fn resolve(&self, default_n: usize) -> Result<SimConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                parse_config(&text)?
            }
            None => SimConfig::with_n(default_n, 1),
        };
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(r) = self.radius {
            cfg.radius = Some(r);
        }
        if let Some(b) = &self.buffer {
            cfg.buffer = b.parse::<BufferSize>()?;
        }
        if let Some(p) = self.policy {
            cfg.forward_policy = match p {
                PolicyArg::Drop => ForwardPolicy::Drop,
                PolicyArg::Forward => ForwardPolicy::Forward,
            };
        }
        if let Some(f) = self.failure_fraction {
            cfg.failure_fraction = f;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn print_report(r: &SimReport) {
    println!(
        "{} n={} M={} radius={:.4} retries={} data_messages={} (flood={} unicast={}) init_messages={} energy={} unused={:.2}% rounds={}",
        r.algorithm,
        r.n,
        r.buffer_capacity,
        r.radius,
        r.topology_retries,
        r.data_messages,
        r.flood_messages,
        r.unicast_messages,
        r.init_messages,
        r.energy_total,
        r.percent_unused,
        r.rounds_to_quiescence
    );
}

fn print_curve(c: &SweepCurve) {
    println!("{} n={} M={}", c.algorithm, c.n, c.buffer);
    for p in &c.points {
        let skipped = if p.skipped > 0 {
            format!(" (skipped {})", p.skipped)
        } else {
            String::new()
        };
        println!(
            "  ratio={:.2} mean={:.2} stddev={:.2} trials={}{}",
            p.query_ratio, p.mean, p.stddev, p.trials, skipped
        );
    }
}

fn require_seed(sim: &SimArgs, cmd: &str) -> Result<(), Error> {
    if sim.seed.is_none() {
        return Err(Error::Param(format!("`{cmd}` requires --seed")));
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Run {
            sim,
            algorithm,
            dump_topology,
            trace,
            out,
        } => {
            let cfg = sim.resolve(50)?;
            let algorithm = Algorithm::from(algorithm);
            ensure_dir(&out)?;
            let stem = format!("{algorithm}_n{}_s{}", cfg.n, cfg.seed);
            let (report, topology, policy) = match algorithm {
                Algorithm::Mdsa => {
                    let mut records = Vec::new();
                    let run = run_mdsa_traced(&cfg, &mut records)?;
                    if trace {
                        let mut log = String::new();
                        for rec in &records {
                            log.push_str(&rec.to_string());
                            log.push('\n');
                        }
                        write_file(&out.join(format!("trace_{stem}.log")), &log)?;
                    }
                    (run.report, run.topology, Some(cfg.forward_policy))
                }
                Algorithm::Dsa1 => {
                    if trace {
                        return Err(Error::Param("--trace is only available for mdsa".into()));
                    }
                    let run = run_dsa1(&cfg)?;
                    (run.report, run.topology, None)
                }
            };
            print_report(&report);
            let csv = out.join(format!("run_{stem}.csv"));
            emit_report_csv(&[(report, policy)], &csv)?;
            println!("wrote {}", csv.display());
            if dump_topology {
                let path = out.join(format!("topology_n{}_s{}.txt", cfg.n, cfg.seed));
                write_file(&path, &topology.to_text())?;
                println!("wrote {}", path.display());
            }
        }
        Command::Sweep {
            sim,
            mc,
            algorithm,
            preset,
            out,
        } => {
            require_seed(&sim, "sweep")?;
            let cfg = sim.resolve(50)?;
            let algorithm = Algorithm::from(algorithm);
            ensure_dir(&out)?;
            match preset {
                Some(Preset::PaperFigs) => {
                    let curves = paper_figs(algorithm, &cfg, mc.trials, mc.step)?;
                    for c in &curves {
                        print_curve(c);
                        let svg = out.join(format!("paper_figs_{algorithm}_n{}.svg", c.n));
                        emit_plot(
                            std::slice::from_ref(c),
                            &format!("{algorithm} n={} buffer={}", c.n, c.buffer),
                            &svg,
                        )?;
                    }
                    let csv = out.join(format!("paper_figs_{algorithm}.csv"));
                    emit_curves_csv(&curves, &csv)?;
                    println!(
                        "wrote {} and {} plots (n = {:?})",
                        csv.display(),
                        curves.len(),
                        PAPER_FIG_SIZES
                    );
                }
                None => {
                    let curve = sweep(algorithm, &cfg, mc.trials, mc.step)?;
                    print_curve(&curve);
                    let stem = format!("sweep_{algorithm}_n{}", cfg.n);
                    let csv = out.join(format!("{stem}.csv"));
                    emit_curves_csv(std::slice::from_ref(&curve), &csv)?;
                    emit_plot(
                        std::slice::from_ref(&curve),
                        &format!("{algorithm} n={} buffer={}", curve.n, curve.buffer),
                        &out.join(format!("{stem}.svg")),
                    )?;
                    println!("wrote {}", csv.display());
                }
            }
        }
        Command::Table1 { sim, trials, out } => {
            let cfg = sim.resolve(15)?;
            ensure_dir(&out)?;
            let table = table1(&cfg, &TABLE1_BUFFERS, trials)?;
            println!("n={} trials={trials}", table.n);
            for r in &table.rows {
                println!(
                    "  {:<5} M={} data_messages={:.1} percent_unused={:.2}%",
                    r.algorithm, r.m, r.data_messages, r.percent_unused
                );
            }
            let csv = out.join("table1.csv");
            emit_table_csv(&table, &csv)?;
            println!("wrote {}", csv.display());
        }
        Command::Compare { sim, mc, out } => {
            require_seed(&sim, "compare")?;
            let cfg = sim.resolve(50)?;
            ensure_dir(&out)?;
            let curves = vec![
                sweep(Algorithm::Mdsa, &cfg, mc.trials, mc.step)?,
                sweep(Algorithm::Dsa1, &cfg, mc.trials, mc.step)?,
            ];
            curves.iter().for_each(print_curve);
            let stem = format!("compare_n{}", cfg.n);
            let csv = out.join(format!("{stem}.csv"));
            emit_curves_csv(&curves, &csv)?;
            emit_plot(
                &curves,
                &format!("n={} buffer={}", cfg.n, cfg.buffer_capacity()),
                &out.join(format!("{stem}.svg")),
            )?;
            println!("wrote {}", csv.display());
        }
        Command::DumpTopology { sim, out } => {
            let cfg = sim.resolve(50)?;
            let (topology, _) = generate_connected(cfg.n, cfg.radius(), cfg.seed)?;
            let text = topology.to_text();
            match out {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    let path = dir.join(format!("topology_n{}_s{}.txt", cfg.n, cfg.seed));
                    write_file(&path, &text)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
