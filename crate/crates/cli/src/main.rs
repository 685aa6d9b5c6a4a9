use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bagopen::harness::{
    self, collect_dataset, config_docs, load_over, read_run, run_cell, run_trial_observed, trial_id,
    write_run, RunConfig, SegmenterConfig,
};
use bagopen::perception::{opening_metrics, ThresholdSegmenter};
use bagopen::policy::Variant;
use bagopen::primitives::Workspace;
use bagopen::simulator::sim_calibration;
use bagopen::{Error, SegMask};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bagopen", version, about = "Bag-opening simulator, policy and trial harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one (tier, variant) cell and write logs plus a report.
    RunTrials {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        tier: u8,
        #[arg(long, default_value = "autobag")]
        variant: Variant,
        /// Defaults to trial.trials_per_cell.
        #[arg(long)]
        trials: Option<usize>,
        /// Defaults to trial.seed_base.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// One AutoBag rollout, dumping the ground-truth mask before every step.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        tier: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Action budget for the rollout.
        #[arg(long, default_value_t = 15)]
        steps: u32,
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for step_NNN.pgm masks and trial.jsonl.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Opening metrics of a mask file.
    Metrics {
        #[arg(long)]
        mask: PathBuf,
        /// `max_hull_area = ...` / `max_bag_area = ...` file.
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Label a regular/UV image pair into a mask.
    LabelUv {
        #[arg(long)]
        regular: PathBuf,
        #[arg(long)]
        uv: PathBuf,
        /// Segmenter keys: `ranges.rim.h_lo = ...`, `dilation_radius = ...`.
        #[arg(long)]
        ranges: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample configurations with the collection policy.
    CollectDataset {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate the logs in a run directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the configuration key table.
    ConfigDocs,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Error> {
    path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
}

fn io(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), msg: e.to_string() }
}

fn run(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::RunTrials { tier, variant, trials, seed, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let n = trials.unwrap_or(cfg.trial.trials_per_cell);
            let records = run_cell(tier, variant, n, seed.unwrap_or(cfg.trial.seed_base), &cfg)?;
            let report = write_run(&out, &records)?;
            print!("{}", report.to_text());
        }
        Cmd::Simulate { tier, seed, steps, deterministic, config, out } => {
            let mut cfg = load_config(config.as_deref())?;
            if deterministic {
                cfg.sim.deterministic = true;
            }
            cfg.policy.budget = steps;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
            }
            let mut saved = Ok(());
            let rec = run_trial_observed(
                trial_id(tier, Variant::AutoBag, 0),
                tier,
                Variant::AutoBag,
                seed,
                &cfg,
                &mut |i, m: &SegMask| {
                    if let (Some(dir), Ok(())) = (&out, &saved) {
                        saved = m.save(&dir.join(format!("step_{i:03}.pgm")));
                    }
                },
            )?;
            saved?;
            if let Some(dir) = &out {
                harness::write_log(&rec, &dir.join("trial.jsonl"))?;
            }
            for s in &rec.steps {
                let what = match (s.action, s.advance) {
                    (Some(a), _) => a.kind().name().to_string(),
                    (None, Some(st)) => format!("advance {st:?}"),
                    _ => String::new(),
                };
                println!(
                    "{:3} {:?} a_ch={:.3} e_ch={:.3} s={:.3} {what} {:?}",
                    s.step_index, s.stage, s.a_ch, s.e_ch, s.bag_fraction, s.events
                );
            }
            let o = &rec.outcome;
            println!(
                "opened={} placed={} contained={} failure={}",
                o.opened_bag,
                o.n_placed,
                o.n_contained,
                rec.failure_class.name()
            );
        }
        Cmd::Metrics { mask, calibration } => {
            let defaults = sim_calibration(&Workspace::default());
            let cal = match calibration {
                Some(p) => load_over(&defaults, &p)?,
                None => defaults,
            };
            cal.validate()?;
            let m = SegMask::load(&mask)?;
            let om: bagopen::OpeningMetrics = opening_metrics(&m, &cal);
            println!("a_ch = {:.4}", om.a_ch);
            println!("e_ch = {:.4}", om.e_ch);
            println!("hull_vertices = {}", om.hull.len());
            for v in &om.hull.vertices {
                println!("  {:.2} {:.2}", v.x, v.y);
            }
        }
        Cmd::LabelUv { regular, uv, ranges, out } => {
            let sc = match ranges {
                Some(p) => load_over(&SegmenterConfig::default(), &p)?,
                None => SegmenterConfig::default(),
            };
            sc.ranges.validate()?;
            let read = |p: &Path| image::open(p).map(|i| i.to_rgb8()).map_err(|e| io(p, e));
            let (reg, uvi) = (read(&regular)?, read(&uv)?);
            let seg = ThresholdSegmenter {
                ranges: sc.ranges,
                dilation_radius: sc.dilation_radius,
                min_component: sc.min_component,
            };
            seg.segment_images(&reg, &uvi)?.save(&out)?;
        }
        Cmd::CollectDataset { n, seed, config, out } => {
            let cfg = load_config(config.as_deref())?;
            let m = collect_dataset(&cfg, n, seed, Some(&out))?;
            println!("{} images: {} train, {} val", m.n_images, m.n_train, m.n_val);
        }
        Cmd::Report { input, format } => {
            let recs = read_run(&input)?;
            let r = harness::aggregate(&recs)?;
            match format {
                Format::Text => print!("{}", r.to_text()),
                Format::Csv => print!("{}", r.to_csv()),
            }
        }
        Cmd::ConfigDocs => print!("{}", config_docs()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
