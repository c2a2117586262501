use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qchan_core::input::parse_channel_spec;
use qchan_core::input::ChannelSpec;
use qchan_core::sweep::gnuplot_script;
use qchan_core::{
    check_relation, coherence, parse_basis, parse_channel, parse_number, run_falsification, to_csv,
    CoherenceMeasure, Error, FalsificationConfig, Preset, QubitBasis, SweepSpec, Target,
};

const EXIT_PARSE: u8 = 2;
const EXIT_SCOPE: u8 = 3;
const EXIT_VIOLATION: u8 = 4;
const EXIT_IO: u8 = 1;

/// Coherence of qubit channels and the uncertainty relations between two bases.
#[derive(Parser)]
#[command(name = "qchan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence of a channel in one basis.
    Coherence {
        #[arg(long)]
        channel: String,
        #[arg(
            long = "basis1",
            visible_alias = "basis",
            default_value = "computational"
        )]
        basis: String,
        #[arg(long, default_value = "rel")]
        measure: CoherenceMeasure,
    },
    /// Sum of coherences in two bases against the lower bound.
    Bound {
        #[arg(long)]
        channel: String,
        #[command(flatten)]
        bases: BasisPair,
        #[arg(long, default_value = "rel")]
        measure: CoherenceMeasure,
        #[arg(long = "c-max", value_parser = number)]
        c_max: Option<f64>,
    },
    /// Evaluate the relation over a parameter range and emit CSV.
    Sweep(SweepArgs),
    /// Randomized search for counterexamples.
    Verify {
        target: Target,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 uses all cores).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Pin c for the gmin target.
        #[arg(long = "c-max", value_parser = number)]
        c_max: Option<f64>,
        #[arg(long = "grid-step", value_parser = number)]
        grid_step: Option<f64>,
    },
    /// List channel presets and named bases.
    Presets,
}

#[derive(Args)]
struct BasisPair {
    #[arg(long, default_value = "computational")]
    basis1: String,
    #[arg(long, default_value = "plus-minus")]
    basis2: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Preset name, e.g. `bit_flip` or `preset=rotation`.
    #[arg(long)]
    channel: String,
    /// Swept parameter; defaults to the preset's only parameter.
    #[arg(long)]
    param: Option<String>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    stop: f64,
    #[arg(long, value_parser = number)]
    step: f64,
    #[command(flatten)]
    bases: BasisPair,
    #[arg(long, default_value = "rel")]
    measure: CoherenceMeasure,
    #[arg(long = "c-max", value_parser = number)]
    c_max: Option<f64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script here.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

fn number(s: &str) -> Result<f64, String> {
    parse_number(s).map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TheoremScope(_) => EXIT_SCOPE,
            _ => EXIT_PARSE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serializes")
    );
}

fn basis(text: &str) -> Result<QubitBasis, Failure> {
    Ok(parse_basis(text)?)
}

fn write_new(path: &Path, contents: &str, force: bool) -> Result<(), Failure> {
    let mut options = OpenOptions::new();
    options.write(true);
    if force {
        options.create(true).truncate(true);
    } else {
        options.create_new(true);
    }
    let mut file = options.open(path).map_err(|e| {
        let code = if e.kind() == std::io::ErrorKind::AlreadyExists {
            EXIT_PARSE
        } else {
            EXIT_IO
        };
        let message = if code == EXIT_PARSE {
            format!("{} exists; pass --force to overwrite", path.display())
        } else {
            format!("cannot open {}: {e}", path.display())
        };
        Failure { code, message }
    })?;
    file.write_all(contents.as_bytes()).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn sweep_spec(args: &SweepArgs) -> Result<SweepSpec, Failure> {
    let preset = match parse_channel_spec(&args.channel)? {
        ChannelSpec::Preset(p) if p.params.is_empty() => p.name.parse::<Preset>()?,
        _ => {
            return Err(Failure {
                code: EXIT_PARSE,
                message: format!("sweep needs a bare preset name, got `{}`", args.channel),
            })
        }
    };
    let parameter = match (&args.param, preset.parameters()) {
        (Some(p), _) => p.clone(),
        (None, [only]) => only.to_string(),
        (None, _) => {
            return Err(Failure {
                code: EXIT_PARSE,
                message: format!("preset `{preset}` has no single parameter to sweep"),
            })
        }
    };
    let spec = SweepSpec {
        preset,
        parameter,
        start: args.start,
        stop: args.stop,
        step: args.step,
        basis1: basis(&args.bases.basis1)?,
        basis2: basis(&args.bases.basis2)?,
        measure: args.measure,
        c_override: args.c_max,
    };
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Coherence {
            channel,
            basis: b,
            measure,
        } => {
            let channel = parse_channel(&channel)?;
            print_json(&coherence(&channel, &basis(&b)?, measure)?);
        }
        Command::Bound {
            channel,
            bases,
            measure,
            c_max,
        } => {
            let channel = parse_channel(&channel)?;
            let (b1, b2) = (basis(&bases.basis1)?, basis(&bases.basis2)?);
            print_json(&check_relation(&channel, &b1, &b2, measure, c_max)?);
        }
        Command::Sweep(args) => {
            let spec = sweep_spec(&args)?;
            let rows = spec.run()?;
            log::info!("sweep produced {} rows", rows.len());
            let csv = to_csv(&rows);
            match &args.out {
                Some(path) => {
                    write_new(path, &csv, args.force)?;
                    if let Some(gp) = &args.gnuplot {
                        let script = gnuplot_script(&path.display().to_string(), &spec);
                        write_new(gp, &script, args.force)?;
                    }
                }
                None => {
                    print!("{csv}");
                    if let Some(gp) = &args.gnuplot {
                        write_new(gp, &gnuplot_script("-", &spec), args.force)?;
                    }
                }
            }
        }
        Command::Verify {
            target,
            trials,
            seed,
            jobs,
            c_max,
            grid_step,
        } => {
            let mut config = FalsificationConfig::new(target, trials, seed).with_jobs(jobs);
            config.gmin_c_max = c_max;
            config.gmin_grid_step = grid_step;
            let report = run_falsification(&config)?;
            print!("{}", report.to_json());
            if !report.passed() {
                return Ok(ExitCode::from(EXIT_VIOLATION));
            }
        }
        Command::Presets => {
            let presets: Vec<_> = Preset::ALL
                .iter()
                .map(|p| serde_json::json!({ "name": p.name(), "params": p.parameters() }))
                .collect();
            print_json(&serde_json::json!({
                "presets": presets,
                "bases": QubitBasis::NAMES,
            }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("QCHAN_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("qchan: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
