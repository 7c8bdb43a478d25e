//! Command-line front end: corpus augmentation, statistics, metric
//! evaluation, distillation training, and report/plot emission.
//!
//! Every command is deterministic given its inputs, flags, and seed,
//! and emits a run manifest recording what was read, written, and
//! configured. Exit codes: 0 on success, 1 on validation errors
//! (including usage errors), 2 on I/O errors.

mod commands;
mod manifest;
mod output;
mod svg;

pub use manifest::{ManifestBuilder, ManifestSink, RunManifest};

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use ugcbench_core::Error;

/// Environment variable naming the default lexicon/gazetteer directory.
pub const DATA_DIR_ENV: &str = "UGCBENCH_DATA_DIR";

#[derive(Parser)]
#[command(
    name = "ugcbench",
    version,
    about = "Noisy-text augmentation, embedding robustness evaluation, and distillation training",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

/// Flags accepted by every subcommand.
#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Base random seed for whatever the command randomizes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for parallel sections (default: all cores).
    /// Results are identical for any thread count.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Also write the machine-readable report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,

    /// Suppress the human-readable report on stdout.
    #[arg(long, global = true)]
    quiet: bool,

    /// Directory holding lexicon/gazetteer overrides; defaults to
    /// $UGCBENCH_DATA_DIR, then the bundled data.
    #[arg(long, global = true, value_name = "DIR")]
    data_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Pair a clean corpus with noisy renderings of itself.
    Augment(commands::augment::AugmentArgs),
    /// Normalize raw text into a clean one-sentence-per-line corpus.
    Preprocess(commands::preprocess::PreprocessArgs),
    /// Token/type statistics of a corpus, optionally against a clean counterpart.
    Stats(commands::stats::StatsArgs),
    /// Evaluation metrics over embedding or value files.
    #[command(subcommand)]
    Eval(commands::eval::EvalCommand),
    /// Grow a target pool with meaning-altering near-duplicates.
    Hardneg(commands::hardneg::HardnegArgs),
    /// Encode a corpus into an embedding file.
    Embed(commands::embed::EmbedArgs),
    /// Distill reference vectors into a student encoder.
    Train(commands::train::TrainArgs),
    /// Score a saved student against reference vectors on a dev set.
    Validate(commands::train::ValidateArgs),
    /// Project embeddings to two dimensions, with CSV and optional SVG output.
    Pca(commands::pca::PcaArgs),
}

/// Shared command context: global flags plus the run's start time.
pub(crate) struct Ctx<'a> {
    global: &'a GlobalArgs,
    started: Instant,
}

impl Ctx<'_> {
    pub fn seed(&self) -> u64 {
        self.global.seed
    }

    /// `--data-dir`, else `$UGCBENCH_DATA_DIR`, else none.
    pub fn data_dir(&self) -> Option<PathBuf> {
        self.global
            .data_dir
            .clone()
            .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
    }

    pub fn json_out(&self) -> Option<&PathBuf> {
        self.global.json_out.as_ref()
    }

    /// Prints the human-readable block (unless `--quiet`) and writes
    /// the JSON report when `--json-out` was given.
    pub fn emit_report(&self, human: &str, report: &serde_json::Value) -> ugcbench_core::Result<()> {
        if !self.global.quiet {
            print!("{human}");
        }
        if let Some(path) = &self.global.json_out {
            output::write_json(path, report)?;
        }
        Ok(())
    }

    /// Finishes `builder` and writes the manifest to `sink`. When the
    /// command produced no files at all, the manifest goes to stdout
    /// as one compact JSON line (even under `--quiet`, so every run
    /// leaves a provenance record somewhere).
    pub fn emit_manifest(
        &self,
        builder: ManifestBuilder,
        sink: ManifestSink<'_>,
    ) -> ugcbench_core::Result<()> {
        let manifest = builder.finish(self.started);
        manifest.emit(sink)
    }
}

/// Parses `args` (a full argv, program name first) and runs the
/// selected command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; they are not errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let ctx = Ctx {
        global: &cli.global,
        started,
    };
    let outcome = match cli.global.threads {
        Some(0) => Err(Error::config("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            // A scoped pool (rather than the global one) keeps `run`
            // callable repeatedly in one process.
            Ok(pool) => pool.install(|| dispatch(&ctx, &cli.command)),
            Err(e) => Err(Error::config(format!(
                "cannot build a {n}-thread worker pool: {e}"
            ))),
        },
        None => dispatch(&ctx, &cli.command),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(ctx: &Ctx<'_>, command: &Command) -> ugcbench_core::Result<()> {
    match command {
        Command::Augment(args) => commands::augment::run(ctx, args),
        Command::Preprocess(args) => commands::preprocess::run(ctx, args),
        Command::Stats(args) => commands::stats::run(ctx, args),
        Command::Eval(metric) => commands::eval::run(ctx, metric),
        Command::Hardneg(args) => commands::hardneg::run(ctx, args),
        Command::Embed(args) => commands::embed::run(ctx, args),
        Command::Train(args) => commands::train::run_train(ctx, args),
        Command::Validate(args) => commands::train::run_validate(ctx, args),
        Command::Pca(args) => commands::pca::run(ctx, args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["ugcbench", "--help"]), 0);
        assert_eq!(run(["ugcbench", "eval", "--help"]), 0);
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        assert_eq!(run(["ugcbench", "frobnicate"]), 1);
    }

    #[test]
    fn zero_threads_rejected() {
        assert_eq!(
            run(["ugcbench", "--threads", "0", "stats", "--ugc", "/nonexistent"]),
            1
        );
    }
}
