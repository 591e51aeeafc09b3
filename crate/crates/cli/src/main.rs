use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use phantomnet::analysis::{evaluate, tables::make_tables, AnalysisError, AnalysisInput};
use phantomnet::harness::{self, ConfigError, ExperimentConfig};
use phantomnet::ProtocolKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "phantomnet", version, about = "Source-location privacy routing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seed sweep and write aggregate CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the phantom-ratio, phantom-distance and phantom-count tables.
    Tables {
        #[arg(long)]
        csv: bool,
    },
    /// Evaluate the closed-form measures for one parameter set.
    Analyze {
        #[arg(long)]
        rmin: u32,
        #[arg(long)]
        rmax: u32,
        #[arg(long)]
        h: u32,
        #[arg(long = "H")]
        big_h: u32,
        /// Visible radius, in hops.
        #[arg(long, default_value_t = 3.0)]
        r0: f64,
        #[arg(long, default_value_t = 6)]
        omega: u32,
    },
    /// Route one packet and dump its annotated trace as CSV.
    Trace {
        #[arg(long)]
        protocol: ProtocolKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        h: u32,
        #[arg(long = "H")]
        big_h: u32,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Deploy one network and dump its nodes as CSV.
    Network {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_validation(&e) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn is_validation(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(c.downcast_ref::<ConfigError>(), Some(ConfigError::Parse { .. } | ConfigError::Validation(_)))
            || matches!(c.downcast_ref::<AnalysisError>(), Some(AnalysisError::InvalidInput(_)))
    })
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .any(|c| matches!(c.downcast_ref::<io::Error>(), Some(io) if io.kind() == io::ErrorKind::BrokenPipe))
}

fn config_or_default(path: Option<PathBuf>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => Ok(harness::load_config(&p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Simulate { config, out: out_path } => {
            let cfg = harness::load_config(&config)?;
            let path = out_path.unwrap_or_else(|| cfg.output_path.clone());
            let rows = harness::run_experiment(&cfg)?;
            harness::emit_csv(&rows, &path).with_context(|| format!("writing {}", path.display()))?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
        }
        Command::Tables { csv } => {
            let tables = make_tables()?;
            if csv {
                write!(out, "{}", tables.to_csv())?;
            } else {
                write!(out, "{}", tables.to_text())?;
            }
        }
        Command::Analyze { rmin, rmax, h, big_h, r0, omega } => {
            let input = AnalysisInput { r_min: rmin, r_max: rmax, h, big_h, r0_hops: r0, omega };
            let mut rng = ChaCha8Rng::seed_from_u64(0x7ab1e3);
            let rep = evaluate(input, &mut rng)?;
            writeln!(out, "HBDRW/PUSBRF ratio (%)        {:.4}", rep.ratio_hbdrw_over_pusbrf)?;
            writeln!(out, "PUSBRF/PSSPR ratio (%)        {:.4}", rep.ratio_pusbrf_over_psspr)?;
            match &rep.failure_probability {
                Ok(p) => writeln!(out, "failure-path probability      {p:.6}")?,
                Err(e) => writeln!(out, "failure-path probability      n/a ({e})")?,
            }
            writeln!(out, "phantoms HBDRW                {:.4}", rep.n_hbdrw)?;
            writeln!(out, "phantoms PUSBRF               {:.4}", rep.n_pusbrf)?;
            match rep.n_psspr {
                Some(n) => writeln!(out, "phantoms PSSPR                {n:.4}")?,
                None => writeln!(out, "phantoms PSSPR                n/a (h = rmin)")?,
            }
            writeln!(out, "phantom distance baseline (r) {:.4}", rep.distance_baseline)?;
            writeln!(out, "phantom distance PSSPR, MC    {:.4} ± {:.4}", rep.distance_psspr_mc.mean, rep.distance_psspr_mc.std_error)?;
            writeln!(out, "phantom distance PSSPR, expr  {:.4}", rep.distance_psspr_printed)?;
            writeln!(out, "overhead PUSBRF (hops)        {:.4}", rep.overhead_pusbrf)?;
            writeln!(out, "overhead HBDRW (hops)         {:.4}", rep.overhead_hbdrw)?;
            writeln!(out, "overhead PSSPR (hops)         {:.4}", rep.overhead_psspr)?;
        }
        Command::Trace { protocol, seed, h, big_h, config } => {
            let cfg = config_or_default(config)?;
            let (net, source, trace) = harness::experiment::sample_trace(&cfg, protocol, seed, h, big_h)?;
            writeln!(
                out,
                "# protocol={protocol} seed={seed} source={source} source_hops={} hops={} phantom={}",
                net.hop(source),
                trace.hop_count(),
                trace.phantom.map_or("-".to_string(), |i| trace.hops[i].to_string()),
            )?;
            writeln!(out, "packet_id,hop_index,node_id,phase")?;
            trace.write_csv_rows(0, &mut out)?;
        }
        Command::Network { seed, config } => {
            let cfg = config_or_default(config)?;
            let net = harness::experiment::deploy_for_seed(&cfg, seed)?;
            net.write_csv(&mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}
