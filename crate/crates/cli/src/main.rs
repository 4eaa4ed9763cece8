use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use comprecon::channel::{apply, random_error};
use comprecon::codebook::{measured_redundancy, redundancy_bound, size_lower_bound};
use comprecon::oracle::{count_classes, max_code_bound, verify_code_property, PropertyModel};
use comprecon::reconstruct::{decode_deletions, decode_insertions, decode_skewed, reconstruct, DecodeOptions, DecodeReport};
use comprecon::{full_readout, sigma_of_string, BitString, ClassAnomaly, CodebookSpec, ErrorModel, ErrorSpec, Readout};
use comprecon_cli::experiment::{run_experiment, write_jsonl, ExperimentConfig, Selection, Summary, DEFAULT_CROSS_CHECK_CAP};
use comprecon_cli::format::{emit_readout, parse_readout};
use comprecon_cli::CliError;

/// Composition-multiset reconstruction: readouts, codebooks, decoders and
/// exhaustive code checks.
#[derive(Parser)]
#[command(name = "comprecon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the readout of a bit string.
    Compose {
        bits: BitString,
        /// Print the cumulative weights and pair weights instead.
        #[arg(long)]
        sigma: bool,
    },
    /// Rebuild a string from an intact readout.
    Reconstruct {
        #[command(flatten)]
        input: ReadoutInput,
        /// Require the answer to be a member of this codebook.
        #[arg(long)]
        spec: Option<CodebookSpec>,
        #[arg(long)]
        json: bool,
    },
    /// Apply an error to a readout.
    Corrupt {
        #[command(flatten)]
        input: ReadoutInput,
        /// Explicit error spec as JSON.
        #[arg(long, conflicts_with_all = ["model", "t", "seed"])]
        error: Option<String>,
        #[arg(long)]
        model: Option<ErrorModel>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover a codeword from a corrupted readout.
    Decode {
        #[command(flatten)]
        input: ReadoutInput,
        #[arg(long)]
        spec: CodebookSpec,
        #[arg(long, value_enum, default_value_t = DecodeMode::Auto)]
        mode: DecodeMode,
        #[command(flatten)]
        options: OptionFlags,
        #[arg(long)]
        json: bool,
    },
    /// List codewords in rank order.
    Enumerate {
        #[arg(long)]
        spec: CodebookSpec,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Index of a codeword.
    Rank {
        #[arg(long)]
        spec: CodebookSpec,
        bits: BitString,
    },
    /// Codeword at an index.
    Unrank {
        #[arg(long)]
        spec: CodebookSpec,
        index: u128,
    },
    /// Exhaustively check that no two codewords are confusable.
    Verify {
        #[arg(long)]
        spec: CodebookSpec,
        #[arg(long)]
        model: PropertyModel,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long)]
        json: bool,
    },
    /// Redundancy bound beside the measured size.
    Bounds {
        #[arg(long)]
        spec: CodebookSpec,
        #[arg(long)]
        json: bool,
    },
    /// Count strings of length n distinguishable by their readouts.
    Classes {
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run a seeded decode campaign and write one JSON record per trial.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct ReadoutInput {
    /// Readout JSON file; stdin when absent or `-`.
    file: Option<PathBuf>,
    /// Use the intact readout of this string instead.
    #[arg(long, conflicts_with = "file")]
    bits: Option<BitString>,
}

#[derive(Args, Clone, Copy)]
struct OptionFlags {
    /// Decode unsupported patterns by exhaustive codebook scan.
    #[arg(long)]
    brute_force_fallback: bool,
    /// Let the consecutive-pair code attempt arbitrary pairs.
    #[arg(long)]
    experimental_nonconsecutive: bool,
}

impl From<OptionFlags> for DecodeOptions {
    fn from(f: OptionFlags) -> Self {
        DecodeOptions {
            brute_force_fallback: f.brute_force_fallback,
            experimental_nonconsecutive: f.experimental_nonconsecutive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DecodeMode {
    /// Insertions if any class is oversized, deletions if any is short or
    /// missing, skews otherwise.
    Auto,
    Deletions,
    Insertions,
    Skew,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Campaign config as JSON; other campaign flags are then ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    spec: Option<CodebookSpec>,
    #[arg(long, required_unless_present = "config")]
    model: Option<ErrorModel>,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Inclusive length sweep, `lo..hi`.
    #[arg(long, value_parser = parse_range)]
    n_range: Option<[usize; 2]>,
    #[arg(long, value_enum, default_value_t = Selection::Seeded)]
    selection: Selection,
    #[arg(long, default_value_t = DEFAULT_CROSS_CHECK_CAP)]
    cross_check_cap: usize,
    #[command(flatten)]
    options: OptionFlags,
    /// JSONL destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record per-trial wall time (breaks byte-identical replay).
    #[arg(long)]
    timing: bool,
}

fn parse_range(text: &str) -> Result<[usize; 2], String> {
    let (lo, hi) = text.split_once("..").ok_or("expected lo..hi")?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"));
    Ok([parse(lo)?, parse(hi)?])
}

/// Result of a command that succeeded at running: exit 0 or 1.
enum Verdict {
    Ok,
    Witness,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Witness) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<Verdict, CliError> {
    let mut out = io::stdout().lock();
    match command {
        Command::Compose { bits, sigma } => {
            if sigma {
                let r = full_readout(&bits);
                let weights: Vec<u64> = r.classes().map(|c| c.cumulative_weight()).collect();
                writeln!(out, "weights {weights:?}")?;
                writeln!(out, "sigma {:?}", sigma_of_string(&bits).values())?;
            } else {
                writeln!(out, "{}", emit_readout(&full_readout(&bits)))?;
            }
        }
        Command::Reconstruct { input, spec, json } => {
            let r = input.load()?;
            print_report(&mut out, &reconstruct(&r, spec.as_ref())?, json)?;
        }
        Command::Corrupt { input, error, model, t, seed } => {
            let r = input.load()?;
            let spec = match (error, model) {
                (Some(text), _) => serde_json::from_str::<ErrorSpec>(&text)
                    .map_err(|e| CliError::Parse(format!("error spec: {e}")))?,
                (None, Some(model)) => random_error(model, t.unwrap_or(1), seed, &r)?,
                (None, None) => return Err(CliError::Usage("give --error or --model".into())),
            };
            eprintln!("applied {}", serde_json::to_string(&spec).expect("error spec serializes"));
            writeln!(out, "{}", emit_readout(&apply(&r, &spec)?))?;
        }
        Command::Decode { input, spec, mode, options, json } => {
            let r = input.load()?;
            let opts = options.into();
            let report = match resolve_mode(mode, &r) {
                DecodeMode::Insertions => decode_insertions(&r, &spec, opts),
                DecodeMode::Skew => decode_skewed(&r, &spec, opts),
                _ => decode_deletions(&r, &spec, opts),
            }?;
            print_report(&mut out, &report, json)?;
        }
        Command::Enumerate { spec, limit } => {
            for s in spec.enumerate()?.into_iter().take(limit.unwrap_or(usize::MAX)) {
                writeln!(out, "{s}")?;
            }
        }
        Command::Rank { spec, bits } => writeln!(out, "{}", spec.rank(&bits)?)?,
        Command::Unrank { spec, index } => writeln!(out, "{}", spec.unrank(index)?)?,
        Command::Verify { spec, model, t, json } => {
            let report = verify_code_property(&spec, model, t)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?;
            } else {
                match &report.witness {
                    None => writeln!(out, "ok: {spec}, {} codewords, no two confusable under {} t={t}", report.codewords, model.name())?,
                    Some(w) => writeln!(
                        out,
                        "witness: {spec} under {} t={t}: {} and {} agree outside classes {:?}",
                        model.name(),
                        w.s,
                        w.v,
                        w.pattern
                    )?,
                }
            }
            return Ok(if report.holds() { Verdict::Ok } else { Verdict::Witness });
        }
        Command::Bounds { spec, json } => {
            let bound = redundancy_bound(&spec)?;
            let size = spec.size();
            let measured = measured_redundancy(&spec);
            let lower = size_lower_bound(&spec).ok();
            let ceiling = max_code_bound(spec.n()).ok();
            if json {
                let report = json!({
                    "spec": spec,
                    "redundancy_bound": bound,
                    "size": size,
                    "measured_redundancy": measured,
                    "size_lower_bound": lower,
                    "max_code_bound": ceiling,
                });
                writeln!(out, "{report}")?;
            } else {
                writeln!(out, "{spec}")?;
                writeln!(out, "  redundancy bound     {bound:.4} bits")?;
                writeln!(out, "  measured redundancy  {measured:.4} bits ({size} codewords)")?;
                if let Some(lower) = lower {
                    writeln!(out, "  size lower bound     {lower:.1}")?;
                }
                if let Some(ceiling) = ceiling {
                    writeln!(out, "  any code at n={}     at most {ceiling} codewords", spec.n())?;
                }
            }
        }
        Command::Classes { n, json } => {
            let count = count_classes(n)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&count).expect("count serializes"))?;
            } else {
                writeln!(out, "{}", count.classes)?;
            }
        }
        Command::Experiment(args) => return experiment(args),
    }
    Ok(Verdict::Ok)
}

fn resolve_mode(mode: DecodeMode, r: &Readout) -> DecodeMode {
    if !matches!(mode, DecodeMode::Auto) {
        return mode;
    }
    let anomalies = r.anomalies();
    if anomalies.iter().any(|a| matches!(a, ClassAnomaly::Oversized { .. })) {
        DecodeMode::Insertions
    } else if !anomalies.is_empty() {
        DecodeMode::Deletions
    } else {
        DecodeMode::Skew
    }
}

fn print_report(out: &mut impl Write, report: &DecodeReport, json: bool) -> Result<(), CliError> {
    if json {
        writeln!(out, "{}", serde_json::to_string(report).expect("report serializes"))?;
    } else {
        writeln!(out, "{}", report.result)?;
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<Verdict, CliError> {
    let cfg = match &args.config {
        Some(path) => serde_json::from_str::<ExperimentConfig>(&read_text(path)?)
            .map_err(|e| CliError::Parse(format!("experiment config: {e}")))?,
        None => ExperimentConfig {
            spec: args.spec.expect("required by clap"),
            model: args.model.expect("required by clap"),
            t: args.t,
            trials: args.trials,
            seed: args.seed,
            n_range: args.n_range,
            selection: args.selection,
            cross_check_cap: args.cross_check_cap,
            options: args.options.into(),
        },
    };
    let records = run_experiment(&cfg, args.timing)?;
    match &args.out {
        Some(path) => write_jsonl(&records, io::BufWriter::new(fs::File::create(path)?))?,
        None => write_jsonl(&records, io::stdout().lock())?,
    }
    let summary = Summary::of(&records);
    eprintln!("config {}: {}", cfg.hash(), serde_json::to_string(&summary).expect("summary serializes"));
    Ok(Verdict::Ok)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

impl ReadoutInput {
    fn load(&self) -> Result<Readout, CliError> {
        if let Some(bits) = &self.bits {
            return Ok(full_readout(bits));
        }
        parse_readout(&read_text(self.file.as_deref().unwrap_or(Path::new("-")))?)
    }
}
