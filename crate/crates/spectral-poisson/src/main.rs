use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spectral_poisson::config::{resolve_suites, SuiteConfig, SuiteParams, Tolerances};
use spectral_poisson::core::bracket::structure_matrix;
use spectral_poisson::core::peakon::{self, peakon_flow, PeakonState};
use spectral_poisson::core::WeylRational;
use spectral_poisson::formats::{
    parse_fourier, parse_list, parse_spec, write_matrix_csv, write_trajectory_csv, PeakonJson,
    PotentialJson, StructureMatrixJson, WeylJson,
};
use spectral_poisson::{parallel, suites, AppError, AppResult, Report};

#[derive(Parser)]
#[command(name = "spectral-poisson", version, about = "Poisson brackets on rational Weyl functions: verification suites and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Random seed, recorded in every report.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML run configuration (seed, suites, output_dir, [tolerances]).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replace each bracket or flow by a tampered one (negative control).
    #[arg(long)]
    tamper: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites: jacobi, compat, ch, toda, kdv or all.
    Verify {
        suites: Vec<String>,
        #[command(flatten)]
        common: Common,
        /// Powers n in f = z^n, e.g. 0,1,2.
        #[arg(long = "n")]
        powers: Option<String>,
        /// Pole counts, e.g. 2,3.
        #[arg(long = "N")]
        sizes: Option<String>,
        /// Random states per (n, N).
        #[arg(long)]
        states: Option<usize>,
        #[arg(long = "compare-n")]
        compare_n: Option<String>,
    },
    /// Integrate a peakon state and write t, x, p and the Dirichlet spectrum as CSV.
    ChSimulate {
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        /// Peakon state as {"x":[...],"p":[...]}.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long = "T", default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Toda suite with explicit lattice parameters.
    TodaVerify {
        #[command(flatten)]
        common: Common,
        #[arg(long = "N")]
        size: Option<usize>,
        #[arg(long = "T")]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "compare-n")]
        compare_n: Option<String>,
    },
    /// KdV suite for a truncated-Fourier potential.
    KdvVerify {
        #[command(flatten)]
        common: Common,
        /// Half period l.
        #[arg(long)]
        l: Option<f64>,
        /// Modes as j:re[:im], comma separated.
        #[arg(long, allow_hyphen_values = true)]
        fourier: Option<String>,
        /// Potential as {"l":...,"fourier":[[j,re,im],...]}.
        #[arg(long)]
        potential: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Structure matrix of a Weyl function given as JSON.
    Structure {
        #[arg(long)]
        state: PathBuf,
        /// third:N, second:one, second:z or toda:N[:c2].
        #[arg(long, default_value = "third:0")]
        spec: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Applies the shared flags and config file; returns the params and output dir.
fn base_params(common: &Common) -> AppResult<(SuiteParams, PathBuf, SuiteConfig)> {
    let cfg = match &common.config {
        Some(path) => SuiteConfig::load(path)?,
        None => SuiteConfig::default(),
    };
    let params = SuiteParams {
        seed: common.seed.unwrap_or(cfg.seed),
        tamper: common.tamper,
        tolerances: Tolerances::default().overridden(&cfg.tolerances)?,
        ..SuiteParams::default()
    };
    let out = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    Ok((params, out, cfg))
}

fn run_suites(names: &[String], params: &SuiteParams, out: &Path) -> AppResult<bool> {
    params.validate()?;
    let pool = parallel::pool()?;
    let mut all_pass = true;
    for name in names {
        let report = pool.install(|| suites::run(name, params))?;
        let (json, _) = report.emit(out)?;
        summarize(&report, &json);
        all_pass &= report.pass;
    }
    Ok(all_pass)
}

fn summarize(report: &Report, path: &Path) {
    let judged = report.checks.iter().filter(|c| c.pass.is_some()).count();
    let failed: Vec<_> = report.failures().collect();
    let status = if report.pass { "PASS" } else { "FAIL" };
    println!("[{status}] {} seed={}: {}/{} checks pass -> {}", report.suite, report.seed, judged - failed.len(), judged, path.display());
    for c in failed.iter().take(10) {
        match &c.error {
            Some(e) => println!("    {}: error: {e}", c.name),
            None => println!("    {}: {:e} (tolerance {:e})", c.name, c.value, c.tolerance.unwrap_or(f64::NAN)),
        }
    }
    if failed.len() > 10 {
        println!("    ... {} more", failed.len() - 10);
    }
}

fn run(cmd: Command) -> AppResult<bool> {
    match cmd {
        Command::Verify { suites: names, common, powers, sizes, states, compare_n } => {
            let (mut params, out, cfg) = base_params(&common)?;
            let names = if names.is_empty() { cfg.suites.clone() } else { names };
            if names.is_empty() {
                return Err(AppError::config("no suite given"));
            }
            let names = resolve_suites(&names)?;
            if let Some(s) = powers {
                params.powers = parse_list(&s)?;
            }
            if let Some(s) = sizes {
                params.sizes = parse_list(&s)?;
            }
            if let Some(s) = compare_n {
                params.compare_n = parse_list(&s)?;
            }
            if let Some(k) = states {
                params.states = k;
            }
            run_suites(&names, &params, &out)
        }
        Command::TodaVerify { common, size, t_end, dt, compare_n } => {
            let (mut params, out, _) = base_params(&common)?;
            if let Some(n) = size {
                params.toda.size = n;
            }
            if let Some(t) = t_end {
                params.toda.t_end = t;
            }
            if let Some(h) = dt {
                params.toda.dt = h;
            }
            if let Some(s) = compare_n {
                params.compare_n = parse_list(&s)?;
            }
            run_suites(&["toda".into()], &params, &out)
        }
        Command::KdvVerify { common, l, fourier, potential, grid, pairs } => {
            let (mut params, out, _) = base_params(&common)?;
            if let Some(path) = potential {
                params.kdv.potential = serde_json::from_str(&fs::read_to_string(path)?)?;
            }
            if let Some(l) = l {
                params.kdv.potential.l = l;
            }
            if let Some(f) = fourier {
                params.kdv.potential = PotentialJson { l: params.kdv.potential.l, fourier: parse_fourier(&f)? };
            }
            if let Some(g) = grid {
                params.kdv.grid = g;
            }
            if let Some(k) = pairs {
                params.kdv.pairs = k;
            }
            run_suites(&["kdv".into()], &params, &out)
        }
        Command::ChSimulate { x, p, state, t_end, dt, samples, out } => {
            let s: PeakonState = match (state, x, p) {
                (Some(path), _, _) => serde_json::from_str::<PeakonJson>(&fs::read_to_string(path)?)?.try_into()?,
                (None, Some(x), Some(p)) => PeakonState::new(parse_list(&x)?, parse_list(&p)?)?,
                (None, None, None) => {
                    let d = spectral_poisson::config::ChParams::default();
                    PeakonState::new(d.x, d.p)?
                }
                _ => return Err(AppError::config("give both --x and --p, or --state")),
            };
            let traj = peakon_flow(&s, t_end, dt, samples)?;
            let spectra = traj
                .states
                .iter()
                .map(|st| Ok(peakon::spectra(&peakon::peakons_to_string(st)?)?.0))
                .collect::<AppResult<Vec<_>>>()?;
            match out {
                Some(path) => write_trajectory_csv(&traj, &spectra, fs::File::create(path)?)?,
                None => write_trajectory_csv(&traj, &spectra, io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Structure { state, spec, format, out } => {
            let chi: WeylRational = serde_json::from_str::<WeylJson>(&fs::read_to_string(state)?)?.try_into()?;
            let spec = parse_spec(&spec)?;
            let m = structure_matrix(&chi, spec, &Default::default())?;
            let mut sink: Box<dyn Write> = match out {
                Some(path) => Box::new(fs::File::create(path)?),
                None => Box::new(io::stdout().lock()),
            };
            match format {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut sink, &StructureMatrixJson::from(&m))?;
                    writeln!(sink)?;
                }
                Format::Csv => write_matrix_csv(&m.entries, sink)?,
            }
            Ok(true)
        }
    }
}
