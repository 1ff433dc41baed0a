//! Command-line front end: run experiments, compare variants, generate
//! synthetic datasets.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use attrcluster::classifiers::{ClassifierKind, ClassifierSpec};
use attrcluster::data::{generate_synthetic, write_csv, MissingPolicy};
use attrcluster::evaluation::F1Average;
use attrcluster::pipeline::{
    emit_report, render_compare, run_experiment, ExperimentConfig, ExperimentReport,
    MetricColumn, ReportFormat, Variant,
};

const USAGE_EXIT: u8 = 1;
const DATA_EXIT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "attrcluster",
    version,
    about = "Attribute-clustering classifier pipelines with raw and PCA baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment over a CSV dataset and write the report.
    Run(RunArgs),
    /// Print the paired t-test tables stored in a JSON report.
    Compare(CompareArgs),
    /// Generate a synthetic dataset with planted attribute groups.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Name of the label column.
    #[arg(long = "label-col")]
    label_col: String,
    /// Attribute-cluster count for the cluster variant.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Comma-separated classifier list, or "all".
    #[arg(long, default_value = "all")]
    classifiers: String,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subset of raw,pca,cluster.
    #[arg(long, default_value = "raw,pca,cluster")]
    variants: String,
    /// Variance fraction the PCA baseline must retain, in (0, 1].
    #[arg(long = "pca-variance", default_value_t = 0.95)]
    pca_variance: f64,
    /// F1 averaging across classes.
    #[arg(long = "f1-mode", default_value = "weighted")]
    f1_mode: String,
    /// Significance level for the paired t-tests.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Missing-cell policy: reject or impute-mode.
    #[arg(long = "missing-policy", default_value = "reject")]
    missing_policy: String,
    /// Hyperparameter override, repeatable: <classifier>.<key>=<value>.
    #[arg(long = "hp")]
    hyperparameters: Vec<String>,
    /// Report destination.
    #[arg(long)]
    out: PathBuf,
    /// Report format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct CompareArgs {
    /// A JSON report produced by `run --format json`.
    #[arg(long)]
    report: PathBuf,
    /// Metric column to compare: f1 or kappa.
    #[arg(long, default_value = "f1")]
    metric: String,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    #[arg(long, default_value_t = 3)]
    groups: usize,
    #[arg(long = "attrs-per-group", default_value_t = 8)]
    attrs_per_group: usize,
    #[arg(long = "noise-attrs", default_value_t = 24)]
    noise_attrs: usize,
    /// Majority-class share of the binary label, in (0, 1).
    #[arg(long, default_value_t = 0.85)]
    imbalance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn usage_error(message: String) -> (u8, String) {
    (USAGE_EXIT, message)
}

fn parse_classifiers(
    list: &str,
    overrides: &[String],
    seed: u64,
) -> Result<Vec<ClassifierSpec>, (u8, String)> {
    let kinds: Vec<ClassifierKind> = if list == "all" {
        ClassifierKind::all().to_vec()
    } else {
        list.split(',')
            .map(|name| {
                name.trim()
                    .parse::<ClassifierKind>()
                    .map_err(usage_error)
            })
            .collect::<Result<_, _>>()?
    };

    let mut hp_by_kind: BTreeMap<ClassifierKind, BTreeMap<String, f64>> = BTreeMap::new();
    for entry in overrides {
        let Some((target, value)) = entry.split_once('=') else {
            return Err(usage_error(format!(
                "bad --hp {entry:?}: expected <classifier>.<key>=<value>"
            )));
        };
        let Some((kind_name, key)) = target.split_once('.') else {
            return Err(usage_error(format!(
                "bad --hp {entry:?}: expected <classifier>.<key>=<value>"
            )));
        };
        let kind: ClassifierKind = kind_name.parse().map_err(usage_error)?;
        let value: f64 = value
            .parse()
            .map_err(|_| usage_error(format!("bad --hp value {value:?} in {entry:?}")))?;
        hp_by_kind.entry(kind).or_default().insert(key.to_string(), value);
    }
    for kind in hp_by_kind.keys() {
        if !kinds.contains(kind) {
            return Err(usage_error(format!(
                "--hp targets {kind}, which is not in --classifiers"
            )));
        }
    }

    kinds
        .into_iter()
        .map(|kind| {
            let hp = hp_by_kind.remove(&kind).unwrap_or_default();
            ClassifierSpec::new(kind, hp, seed).map_err(|e| usage_error(e.to_string()))
        })
        .collect()
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, (u8, String)> {
    let variants: Vec<Variant> = args
        .variants
        .split(',')
        .map(|v| v.trim().parse::<Variant>().map_err(usage_error))
        .collect::<Result<_, _>>()?;
    let f1_mode = match args.f1_mode.as_str() {
        "weighted" => F1Average::Weighted,
        "macro" => F1Average::Macro,
        other => {
            return Err(usage_error(format!(
                "unknown f1 mode {other:?} (expected weighted or macro)"
            )))
        }
    };
    let missing_policy = match args.missing_policy.as_str() {
        "reject" => MissingPolicy::Reject,
        "impute-mode" => MissingPolicy::ImputeMode,
        other => {
            return Err(usage_error(format!(
                "unknown missing policy {other:?} (expected reject or impute-mode)"
            )))
        }
    };
    let classifiers = parse_classifiers(&args.classifiers, &args.hyperparameters, args.seed)?;
    Ok(ExperimentConfig {
        input: args.input.clone(),
        label_column: args.label_col.clone(),
        k: args.k,
        classifiers,
        folds: args.folds,
        seed: args.seed,
        variants,
        pca_variance: args.pca_variance,
        f1_mode,
        alpha: args.alpha,
        missing_policy,
    })
}

fn cmd_run(args: &RunArgs) -> Result<(), (u8, String)> {
    let format: ReportFormat = args.format.parse().map_err(usage_error)?;
    let config = build_config(args)?;
    let report =
        run_experiment(&config).map_err(|e| (e.exit_code() as u8, e.to_string()))?;
    emit_report(&report, format, &args.out)
        .map_err(|e| (e.exit_code() as u8, e.to_string()))?;
    println!("report written to {}", args.out.display());
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), (u8, String)> {
    let metric: MetricColumn = args.metric.parse().map_err(usage_error)?;
    let contents = std::fs::read_to_string(&args.report)
        .map_err(|e| (DATA_EXIT, format!("cannot read {}: {e}", args.report.display())))?;
    let report: ExperimentReport = serde_json::from_str(&contents)
        .map_err(|e| (DATA_EXIT, format!("cannot parse {}: {e}", args.report.display())))?;
    print!("{}", render_compare(&report, metric));
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<(), (u8, String)> {
    let dataset = generate_synthetic(
        args.instances,
        args.groups,
        args.attrs_per_group,
        args.noise_attrs,
        args.imbalance,
        args.seed,
    )
    .map_err(|e| (USAGE_EXIT, e.to_string()))?;
    write_csv(&dataset, &args.out).map_err(|e| (DATA_EXIT, e.to_string()))?;
    println!(
        "wrote {} rows x {} attributes to {}",
        dataset.n_rows(),
        dataset.matrix.n_cols(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Let clap print its rich message (or the help/version text),
            // but keep the documented exit code for actual usage errors.
            let code = if e.use_stderr() { USAGE_EXIT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
