//! The `genner` command line.

mod config;

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use genner_core::analysis::classify_corpus;
use genner_core::codecs::{decode, encode, DecodeOptions, OffsetMode, OutputFormat};
use genner_core::io::{
    corpus_stats, read_conll_columns, read_predictions, read_standoff_json, write_decoded, write_standoff,
    DecodedRecord, IoError, IoWarning,
};
use genner_core::model::{AnnotatedSentence, LabelSchema, ModelError, ParsedOutput};
use genner_core::promptgen::{
    build_instruction, desymbolize, render_prompt, symbolize_dataset, PromptTemplate, SymbolError, SymbolMapping,
    SymbolMode, DEFAULT_ALPHABET,
};
use genner_core::scoring::{score_corpus, CategoryScoring, ScoreError};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde_json::json;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "genner",
    version,
    about = "Encode, decode, score and analyse generative NER outputs"
)]
#[command(args_override_self = true)]
struct Cli {
    /// TOML file with defaults, one table per subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for per-sentence work (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Serialize a gold corpus as training targets.
    Encode(EncodeArgs),
    /// Parse raw model outputs into spans.
    Decode(DecodeArgs),
    /// Micro and per-label precision, recall and F1.
    Score(ScoreArgs),
    /// Error-type classification and distribution.
    Errors(ErrorsArgs),
    /// Print the instruction prompt for a format and schema.
    Prompt(PromptArgs),
    /// Rewrite a corpus with symbol labels.
    Symbolize(SymbolizeArgs),
    /// Sentence, label and nesting counts for corpus splits.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Conll,
    Standoff,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Report {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
struct SchemaArg {
    /// Built-in schema name or path to a schema JSON file.
    #[arg(long)]
    schema: String,
}

#[derive(Debug, Args)]
struct CorpusArg {
    /// CoNLL columns or standoff JSONL; guessed from the extension when absent.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
}

#[derive(Debug, Args)]
struct DecodingArgs {
    #[arg(long, value_parser = parse_format)]
    format: OutputFormat,
    #[arg(long)]
    gold: PathBuf,
    /// JSONL with `id` and `output` fields.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_enum, default_value = "strict")]
    offset_mode: OffsetModeArg,
    /// Keep spans whose label is outside the schema.
    #[arg(long)]
    pass_through_labels: bool,
    /// Mapping written by `symbolize`; outputs use its symbols.
    #[arg(long)]
    symbol_map: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OffsetModeArg {
    Strict,
    Lenient,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[command(flatten)]
    schema: SchemaArg,
    #[command(flatten)]
    corpus: CorpusArg,
    #[arg(long, value_parser = parse_format)]
    format: OutputFormat,
    #[arg(long)]
    input: PathBuf,
    /// Include the rendered prompt for each sentence.
    #[arg(long)]
    with_prompt: bool,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[command(flatten)]
    schema: SchemaArg,
    #[command(flatten)]
    corpus: CorpusArg,
    #[command(flatten)]
    decoding: DecodingArgs,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    schema: SchemaArg,
    #[command(flatten)]
    corpus: CorpusArg,
    #[command(flatten)]
    decoding: DecodingArgs,
    #[arg(long, value_enum, default_value = "positional")]
    category_scoring: CategoryScoringArg,
    #[arg(long, value_enum, default_value = "text")]
    report: Report,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CategoryScoringArg {
    Positional,
    Multiset,
}

#[derive(Debug, Args)]
struct ErrorsArgs {
    #[command(flatten)]
    schema: SchemaArg,
    #[command(flatten)]
    corpus: CorpusArg,
    #[command(flatten)]
    decoding: DecodingArgs,
    #[arg(long, value_enum, default_value = "text")]
    report: Report,
    /// Also list every error record (JSON reports always do).
    #[arg(long)]
    records: bool,
}

#[derive(Debug, Args)]
struct PromptArgs {
    #[command(flatten)]
    schema: SchemaArg,
    #[arg(long, value_parser = parse_format)]
    format: OutputFormat,
    /// Append this input sentence.
    #[arg(long)]
    sentence: Option<String>,
    /// Directory of `<format>.txt` files replacing the built-in descriptions.
    #[arg(long)]
    task_descriptions: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SymbolizeArgs {
    #[command(flatten)]
    schema: SchemaArg,
    #[command(flatten)]
    corpus: CorpusArg,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "se")]
    mode: SymbolModeArg,
    #[arg(long, default_value = DEFAULT_ALPHABET)]
    alphabet: String,
    #[arg(long)]
    mapping_out: Option<PathBuf>,
    /// Write the symbol-labelled corpus as standoff JSONL.
    #[arg(long)]
    standoff_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SymbolModeArg {
    Se,
    So,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    dev: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    report: Report,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: genner_core::codecs::UnknownFormat| e.to_string())
}

/// Runs the command line and returns the process exit code. Output goes to
/// `out`, diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Encode(a) => cmd_encode(a, &pool, out, err),
        Command::Decode(a) => cmd_decode(a, &pool, out, err),
        Command::Score(a) => cmd_score(a, &pool, out, err),
        Command::Errors(a) => cmd_errors(a, &pool, out, err),
        Command::Prompt(a) => cmd_prompt(a, out),
        Command::Symbolize(a) => cmd_symbolize(a, out, err),
        Command::Stats(a) => cmd_stats(a, out, err),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Data(format!("writing output: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_schema(arg: &SchemaArg) -> Result<LabelSchema, CliError> {
    if let Some(s) = LabelSchema::builtin(&arg.schema) {
        return Ok(s);
    }
    let path = Path::new(&arg.schema);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "{:?} is neither a built-in schema (conll2003, ontonotes5, genia, ace2005) nor a file",
            arg.schema
        )));
    }
    Ok(LabelSchema::from_path(path)?)
}

fn load_corpus(
    path: &Path,
    format: Option<InputFormat>,
    err: &mut dyn Write,
) -> Result<Vec<AnnotatedSentence>, CliError> {
    let format = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl" | "json") => InputFormat::Standoff,
        _ => InputFormat::Conll,
    });
    let (sentences, warnings) = match format {
        InputFormat::Conll => {
            let c = read_conll_columns(path)?;
            (c.sentences, c.warnings)
        }
        InputFormat::Standoff => {
            let c = read_standoff_json(path)?;
            (c.sentences, c.warnings)
        }
    };
    report_io_warnings(path, &warnings, err);
    Ok(sentences)
}

fn report_io_warnings(path: &Path, warnings: &[IoWarning], err: &mut dyn Write) {
    for w in warnings {
        let _ = writeln!(err, "warning: {}:{}: {}", path.display(), w.line, w.message);
    }
}

fn cmd_encode(a: EncodeArgs, pool: &ThreadPool, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let schema = load_schema(&a.schema)?;
    let sentences = load_corpus(&a.input, a.corpus.input_format, err)?;
    let lines: Vec<Result<String, CliError>> = pool.install(|| {
        sentences
            .par_iter()
            .map(|s| {
                let target =
                    encode(a.format, &schema, s).map_err(|e| CliError::Data(format!("sentence {}: {e}", s.id())))?;
                let mut rec = json!({"id": s.id(), "text": s.text(), "output": target});
                if a.with_prompt {
                    rec["prompt"] = render_prompt(a.format, &schema, s.text()).into();
                }
                Ok(rec.to_string())
            })
            .collect()
    });
    let mut text = String::new();
    for l in lines {
        text.push_str(&l?);
        text.push('\n');
    }
    emit(out, &text)
}

type Decoded = Vec<(String, ParsedOutput)>;

/// Decodes every prediction against its gold sentence, in prediction order.
fn decode_all(
    schema: &LabelSchema,
    corpus: &CorpusArg,
    d: &DecodingArgs,
    pool: &ThreadPool,
    err: &mut dyn Write,
) -> Result<(Vec<AnnotatedSentence>, Decoded), CliError> {
    let gold = load_corpus(&d.gold, corpus.input_format, err)?;
    let preds = read_predictions(&d.pred)?;
    let mapping: Option<SymbolMapping> = match &d.symbol_map {
        None => None,
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            Some(serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?)
        }
    };
    let decode_schema = match &mapping {
        Some(m) => m.symbol_schema(schema)?,
        None => schema.clone(),
    };
    let texts: HashMap<&str, &str> = gold.iter().map(|s| (s.id(), s.text())).collect();
    let mut options = DecodeOptions::default();
    if matches!(d.offset_mode, OffsetModeArg::Lenient) {
        options.offset_mode = OffsetMode::Lenient;
    }
    if d.pass_through_labels {
        options = options.pass_through_labels();
    }
    for p in &preds {
        if !texts.contains_key(p.id.as_str()) {
            return Err(ScoreError::MismatchedIds(p.id.clone()).into());
        }
    }
    let decoded: Vec<(String, ParsedOutput)> = pool.install(|| {
        preds
            .par_iter()
            .map(|p| {
                let format = p.format.unwrap_or(d.format);
                let parsed = decode(format, &decode_schema, texts[p.id.as_str()], &p.output, &options);
                let parsed = match &mapping {
                    Some(m) => desymbolize(&parsed, m),
                    None => parsed,
                };
                (p.id.clone(), parsed)
            })
            .collect()
    });
    Ok((gold, decoded))
}

fn cmd_decode(a: DecodeArgs, pool: &ThreadPool, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let schema = load_schema(&a.schema)?;
    let (_, decoded) = decode_all(&schema, &a.corpus, &a.decoding, pool, err)?;
    let records: Vec<DecodedRecord> = decoded
        .iter()
        .map(|(id, p)| DecodedRecord::new(id.clone(), p))
        .collect();
    let inexact = records.iter().filter(|r| !r.exact).count();
    if inexact > 0 {
        let _ = writeln!(err, "{inexact} of {} outputs needed recovery", records.len());
    }
    emit(out, &write_decoded(&records))
}

fn cmd_score(a: ScoreArgs, pool: &ThreadPool, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let schema = load_schema(&a.schema)?;
    let (gold, decoded) = decode_all(&schema, &a.corpus, &a.decoding, pool, err)?;
    let mode = match a.category_scoring {
        CategoryScoringArg::Positional => CategoryScoring::Positional,
        CategoryScoringArg::Multiset => CategoryScoring::Multiset,
    };
    let report = score_corpus(&gold, &decoded, mode)?;
    match a.report {
        Report::Text => emit(out, &report.to_table()),
        Report::Json => emit(out, &(pretty(&report) + "\n")),
    }
}

fn cmd_errors(a: ErrorsArgs, pool: &ThreadPool, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let schema = load_schema(&a.schema)?;
    let (gold, decoded) = decode_all(&schema, &a.corpus, &a.decoding, pool, err)?;
    let by_id = genner_core::scoring::index_predictions(&gold, &decoded)?;
    let analysis = classify_corpus(gold.iter().map(|g| (g, by_id.get(g.id()).copied())), &schema);
    match a.report {
        Report::Json => emit(out, &(pretty(&analysis) + "\n")),
        Report::Text => {
            let mut text = analysis.distribution.to_table();
            if a.records {
                text.push('\n');
                for r in &analysis.records {
                    text.push_str(&serde_json::to_string(r).expect("records serialize"));
                    text.push('\n');
                }
            }
            emit(out, &text)
        }
    }
}

fn cmd_prompt(a: PromptArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let schema = load_schema(&a.schema)?;
    let instruction = match &a.task_descriptions {
        None => build_instruction(a.format, &schema),
        Some(dir) => PromptTemplate::default()
            .with_descriptions_from(dir)
            .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?
            .build(a.format, &schema),
    };
    let text = match &a.sentence {
        Some(s) => format!("{instruction}\n{s}\n"),
        None => format!("{instruction}\n"),
    };
    emit(out, &text)
}

fn cmd_symbolize(a: SymbolizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let schema = load_schema(&a.schema)?;
    let sentences = load_corpus(&a.input, a.corpus.input_format, err)?;
    let mode = match a.mode {
        SymbolModeArg::Se => SymbolMode::Se,
        SymbolModeArg::So => SymbolMode::So,
    };
    let dataset = symbolize_dataset(&sentences, &schema, mode, &a.alphabet)?;
    if let Some(p) = &a.mapping_out {
        write_file(p, &(pretty(&dataset.mapping) + "\n"))?;
    }
    if let Some(p) = &a.standoff_out {
        write_file(p, &write_standoff(&dataset.sentences))?;
    }
    let mut text = String::new();
    for e in &dataset.examples {
        text.push_str(&serde_json::to_string(e).expect("examples serialize"));
        text.push('\n');
    }
    emit(out, &text)
}

fn cmd_stats(a: StatsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if a.train.is_none() && a.dev.is_none() && a.test.is_none() {
        return Err(CliError::Usage("give at least one of --train, --dev, --test".into()));
    }
    let mut load = |p: &Option<PathBuf>| -> Result<Vec<AnnotatedSentence>, CliError> {
        match p {
            Some(p) => load_corpus(p, a.corpus.input_format, err),
            None => Ok(Vec::new()),
        }
    };
    let (train, dev, test) = (load(&a.train)?, load(&a.dev)?, load(&a.test)?);
    let s = corpus_stats(&train, &dev, &test);
    match a.report {
        Report::Json => emit(out, &(pretty(&s) + "\n")),
        Report::Text => emit(
            out,
            &format!(
                "train      {}\ndev        {}\ntest       {}\nlabels     {} ({})\nentities   {}\nnested     {}\nshared     {}\n",
                s.train,
                s.dev,
                s.test,
                s.labels,
                s.label_set.join(", "),
                s.entities,
                if s.nested { "yes" } else { "no" },
                s.shared_extent_pairs
            ),
        ),
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}
