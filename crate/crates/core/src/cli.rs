//! Command-line front end.
//!
//! Exit statuses: 0 success (or a consistent table), 1 inconsistencies found
//! by `audit`, 2 usage, I/O or parse failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classify::{classify, render_predictions_json, render_predictions_text, Prediction};
use crate::dominance::find_inconsistencies;
use crate::eval::{confusion, metrics, render_metrics_json, render_metrics_text, ConfusionMatrix};
use crate::induction::{build_rulebase, RuleBase};
use crate::table::{normalize_record, parse_normalized_dataset, parse_observations, DecisionTable, ParseOptions, Schema};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDING: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "drsa", version, about = "Dominance-based rough set analysis and DOMLEM rule induction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Pre-normalized comma-separated dataset.
    #[arg(long)]
    pub data: PathBuf,
    /// Schema JSON file or built-in preset name.
    #[arg(long, default_value = "fertility")]
    pub schema: String,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report pairs of objects violating dominance monotonicity.
    Audit(DataArgs),
    /// Induce certain (and approximate) rules for the worst class.
    Induce {
        #[command(flatten)]
        data: DataArgs,
        /// Also induce approximate rules for the boundary (default).
        #[arg(long, overrides_with = "no_approximate")]
        approximate: bool,
        #[arg(long, overrides_with = "approximate")]
        no_approximate: bool,
        /// Class whose downward union is learned; defaults to the worst class.
        #[arg(long)]
        target: Option<String>,
        /// Class assigned when no rule fires; defaults to the best class.
        #[arg(long)]
        default: Option<String>,
        /// Write the machine-format rule base here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Predict a class for every line of a (possibly unlabeled) dataset.
    Classify {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        rules: PathBuf,
    },
    /// Classify a labeled dataset and print the confusion matrix and metrics.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        rules: PathBuf,
        /// Positive class token; defaults to the best class.
        #[arg(long)]
        positive: Option<String>,
    },
    /// Compute the five metrics from explicit confusion counts.
    #[command(allow_negative_numbers = true)]
    Metrics {
        #[arg(long)]
        tp: i64,
        #[arg(long)]
        tn: i64,
        #[arg(long)]
        fp: i64,
        #[arg(long = "fn")]
        fn_: i64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Convert raw-domain records (labels, years, hours) to the normalized format.
    Normalize {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "fertility")]
        schema: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Resolves a schema argument: an existing file path, else a preset name.
pub fn load_schema(spec: &str) -> Result<Schema, String> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| format!("{spec}: {e}"))?;
        return Schema::from_json(&text).map_err(|e| format!("{spec}: {e}"));
    }
    Schema::preset(spec).ok_or_else(|| format!("unknown schema {spec:?} (not a file or preset)"))
}

fn open(path: &Path) -> Result<BufReader<File>, String> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn load_table(args: &DataArgs) -> Result<DecisionTable, String> {
    let schema = load_schema(&args.schema)?;
    parse_normalized_dataset(open(&args.data)?, &schema).map_err(|e| format!("{}: {e}", args.data.display()))
}

fn load_rules(path: &Path, schema: &Schema) -> Result<RuleBase, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    RuleBase::from_json(&text, schema).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), String> {
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n").map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    match command {
        Command::Audit(args) => {
            let table = load_table(&args)?;
            let report = find_inconsistencies(&table);
            match args.format {
                Format::Text => emit(out, &report.render_text(&table))?,
                Format::Machine => emit(out, &report.render_json(&table))?,
            }
            Ok(if report.is_consistent() { EXIT_OK } else { EXIT_FINDING })
        }
        Command::Induce {
            data,
            approximate: _,
            no_approximate,
            target,
            default,
            output,
        } => {
            let table = load_table(&data)?;
            let classes = &table.schema().classes;
            let target = target.unwrap_or_else(|| classes.token(classes.worst()).to_string());
            let default = default.unwrap_or_else(|| classes.token(classes.best()).to_string());
            let rank = classes.rank_of(&target).map_err(|e| e.to_string())?;
            let counts = table.class_counts();
            if counts.iter().filter(|&&c| c > 0).count() < 2 || counts[rank] == 0 {
                let _ = writeln!(
                    err,
                    "warning: the data does not contain both the target class and another class; only the default rule is produced"
                );
            }
            let rb = build_rulebase(&table, &target, &default, !no_approximate).map_err(|e| e.to_string())?;
            if let Some(path) = output {
                write_file(&path, &(rb.to_json() + "\n"))?;
            }
            match data.format {
                Format::Text => emit(out, &rb.render_text())?,
                Format::Machine => emit(out, &rb.to_json())?,
            }
            Ok(EXIT_OK)
        }
        Command::Classify { data, rules } => {
            let schema = load_schema(&data.schema)?;
            let rb = load_rules(&rules, &schema)?;
            let observations = parse_observations(
                open(&data.data)?,
                &schema,
                ParseOptions {
                    allow_unlabeled: true,
                    allow_empty: true,
                },
            )
            .map_err(|e| format!("{}: {e}", data.data.display()))?;
            let predictions = observations
                .iter()
                .map(|o| classify(&rb, o.id, &o.values))
                .collect::<Result<Vec<Prediction>, _>>()
                .map_err(|e| e.to_string())?;
            match data.format {
                Format::Text => out
                    .write_all(render_predictions_text(&rb, &predictions).as_bytes())
                    .map_err(|e| e.to_string())?,
                Format::Machine => emit(out, &render_predictions_json(&rb, &predictions))?,
            }
            Ok(EXIT_OK)
        }
        Command::Evaluate { data, rules, positive } => {
            let table = load_table(&data)?;
            let rb = load_rules(&rules, table.schema())?;
            let classes = &table.schema().classes;
            let positive = match positive {
                Some(p) => classes.rank_of(&p).map_err(|e| e.to_string())?,
                None => classes.best(),
            };
            let predictions = table
                .objects()
                .iter()
                .map(|o| classify(&rb, o.id, &o.values))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let truth: Vec<usize> = table.objects().iter().map(|o| o.label).collect();
            let cm = confusion(&predictions, &truth, positive).map_err(|e| e.to_string())?;
            let report = metrics(&cm);
            match data.format {
                Format::Text => emit(out, &render_metrics_text(&cm, &report))?,
                Format::Machine => emit(out, &render_metrics_json(&cm, &report))?,
            }
            Ok(EXIT_OK)
        }
        Command::Metrics { tp, tn, fp, fn_, format } => {
            let counts = [("tp", tp), ("tn", tn), ("fp", fp), ("fn", fn_)];
            if let Some((name, v)) = counts.iter().find(|(_, v)| *v < 0) {
                return Err(format!("--{name} must be non-negative, got {v}"));
            }
            let cm = ConfusionMatrix::new(tp as u64, tn as u64, fp as u64, fn_ as u64);
            let report = metrics(&cm);
            match format {
                Format::Text => emit(out, &render_metrics_text(&cm, &report))?,
                Format::Machine => emit(out, &render_metrics_json(&cm, &report))?,
            }
            Ok(EXIT_OK)
        }
        Command::Normalize { data, schema, output } => {
            let schema = load_schema(&schema)?;
            let mut rows = Vec::new();
            for (i, line) in open(&data)?.lines().enumerate() {
                let line = line.map_err(|e| format!("{}: {e}", data.display()))?;
                if line.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').map(str::trim).collect();
                let record = normalize_record(&schema, rows.len() + 1, &fields)
                    .map_err(|e| format!("{}: line {}: {e}", data.display(), i + 1))?;
                rows.push(record);
            }
            let table = DecisionTable::new(schema, rows).map_err(|e| e.to_string())?;
            let text = table.serialize();
            match output {
                Some(path) => write_file(&path, &text)?,
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string())?,
            }
            Ok(EXIT_OK)
        }
    }
}
