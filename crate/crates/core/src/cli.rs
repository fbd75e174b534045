//! The `cohortlens` command line.
//!
//! Every analysis subcommand turns its flags into the same parameter pairs
//! the HTTP API accepts and runs them through [`crate::report::execute`],
//! so the CLI adds no arithmetic of its own. Exit status is 0 on success,
//! 1 on usage errors and 2 on data errors.

use std::ffi::OsString;
use std::fs;
use std::io::{IsTerminal, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::chart::{emit_chart, ChartFormat, ChartKind, ChartPayload, ChartSpec};
use crate::error::{Error, Result};
use crate::ingest::{ingest_canonical, ingest_raw, ColumnMap, IngestReport};
use crate::report::{self, AnalysisRequest, Endpoint, Response};
use crate::scheme::Extras;
use crate::store::{Dataset, IngestOptions, CANONICAL_HEADER, NAMES_FILE};
use crate::table::{AwardLevel, FieldScope, YearRange};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cohortlens",
    version,
    about = "Participation analytics over degree-completion data"
)]
pub struct Cli {
    /// Dataset directory (created by `ingest`).
    #[arg(long, global = true, env = "COHORTLENS_DATASET", value_name = "DIR")]
    pub dataset: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest raw IPEDS completions files or canonical CSVs into a dataset.
    Ingest(IngestArgs),
    /// Group's share of the field's degrees.
    Standard(ShareArgs),
    /// Group's field degrees as a share of the group's degrees in all fields.
    Cohort(ShareArgs),
    /// Yearly standard or cohort shares for one group.
    Series(SeriesArgs),
    /// Program-versus-university share gap for every intersectional cell.
    Gap(GapArgs),
    /// Shannon evenness: a yearly series for one institution, or a
    /// gender/race/intersectional comparison across institutions.
    Evenness(EvennessArgs),
    /// Jensen-Shannon distance between program and university distributions.
    Jsdistance(JsDistanceArgs),
    /// Share metrics side by side for several institutions.
    Compare(CompareArgs),
    /// Run an analysis and write its chart.
    ExportChart(ExportChartArgs),
    /// Serve the read-only JSON API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format; text prints an aligned table.
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Write to this file instead of stdout (`-` for stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn check_scope(s: &str) -> std::result::Result<String, String> {
    FieldScope::parse(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn check_years(s: &str) -> std::result::Result<String, String> {
    YearRange::parse(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn check_award(s: &str) -> std::result::Result<String, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(s.to_string());
    }
    s.parse::<AwardLevel>()
        .map(|_| s.to_string())
        .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Institution id; repeat to pool or compare several.
    #[arg(long = "institution", value_name = "ID")]
    pub institutions: Vec<String>,
    /// Field scope: cip11, all, or cip:<prefix>[,<prefix>...].
    #[arg(long, value_parser = check_scope)]
    pub scope: Option<String>,
    /// Award level (bachelors, masters, ...) or `all`.
    #[arg(long, value_parser = check_award)]
    pub award: Option<String>,
}

impl CommonArgs {
    fn push(&self, pairs: &mut Vec<(String, String)>) {
        for id in &self.institutions {
            pairs.push(("institution".into(), id.clone()));
        }
        push_opt(pairs, "scope", &self.scope);
        push_opt(pairs, "award", &self.award);
    }
}

fn push_opt<T: ToString>(pairs: &mut Vec<(String, String)>, name: &str, value: &Option<T>) {
    if let Some(v) = value {
        pairs.push((name.to_string(), v.to_string()));
    }
}

#[derive(Debug, Args)]
pub struct ShareArgs {
    /// Group: a gender, a race, or a cell such as "Hispanic,Women".
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub year: Option<i32>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// standard or cohort.
    #[arg(long)]
    pub metric: String,
    #[arg(long)]
    pub group: String,
    /// Year span such as 2010-2019 (default: every year in the dataset).
    #[arg(long, value_parser = check_years)]
    pub years: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub year: Option<i32>,
    /// Reference scope the program is compared against (default: all).
    #[arg(long, value_parser = check_scope)]
    pub reference: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvennessArgs {
    /// gender, race or intersectional (series mode).
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long, conflicts_with = "years")]
    pub year: Option<i32>,
    #[arg(long, value_parser = check_years)]
    pub years: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct JsDistanceArgs {
    #[arg(long)]
    pub year: Option<i32>,
    #[arg(long, value_parser = check_scope)]
    pub reference: Option<String>,
    /// Show the program and reference distributions for one institution.
    #[arg(long, value_name = "ID")]
    pub breakdown: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// metric:group, e.g. cohort:Hispanic,Women; repeat for more rows.
    #[arg(long = "metric", required = true)]
    pub metrics: Vec<String>,
    #[arg(long)]
    pub year: Option<i32>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChartSource {
    Series,
    Gap,
    Evenness,
    Jsdistance,
}

#[derive(Debug, Args)]
pub struct ExportChartArgs {
    /// Analysis whose result is charted.
    #[arg(value_enum)]
    pub analysis: ChartSource,
    /// Chart kind (default: the natural kind for the analysis).
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, default_value = "svg")]
    pub format: String,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long, conflicts_with = "years")]
    pub year: Option<i32>,
    #[arg(long, value_parser = check_years)]
    pub years: Option<String>,
    #[arg(long, value_parser = check_scope)]
    pub reference: Option<String>,
    #[arg(long, value_name = "ID")]
    pub breakdown: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Files to ingest, in order.
    #[arg(required = true)]
    pub sources: Vec<PathBuf>,
    /// Treat sources as raw wide-format files (default: detect from header).
    #[arg(long, conflicts_with = "canonical")]
    pub raw: bool,
    /// Treat sources as canonical long-format CSVs.
    #[arg(long)]
    pub canonical: bool,
    /// Column map for raw files (default: the bundled IPEDS completions map).
    #[arg(long, value_name = "FILE")]
    pub column_map: Option<PathBuf>,
    /// Completion year for raw files without a year column.
    #[arg(long)]
    pub year: Option<i32>,
    /// Award level kept from raw files, or `all`.
    #[arg(long, default_value = "bachelors", value_parser = check_award)]
    pub award: String,
    /// Count second majors as well as first majors.
    #[arg(long)]
    pub second_majors: bool,
    /// Keep Nonresident graduates as a race/ethnicity category.
    #[arg(long)]
    pub include_nonresident: bool,
    /// Keep graduates of unknown race/ethnicity as a category.
    #[arg(long)]
    pub include_unknown: bool,
    /// Extra gender label accepted in canonical files; repeatable.
    #[arg(long = "gender", value_name = "LABEL")]
    pub genders: Vec<String>,
    /// `institution_id,name` lookup copied into the dataset.
    #[arg(long, value_name = "FILE")]
    pub names: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Allowed browser origin for the explorer UI.
    #[arg(long, value_name = "ORIGIN")]
    pub cors_origin: Option<String>,
}

/// Errors that end a command, split by exit status.
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::EmptyRange { .. } => Failure::Usage(e.to_string()),
            other => Failure::Data(other),
        }
    }
}

struct Style {
    color: bool,
}

impl Style {
    fn detect() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Self {
            color: !no_color && std::io::stdout().is_terminal(),
        }
    }

    /// Bolds the header line of a text table.
    fn table(&self, text: &str) -> String {
        if !self.color {
            return text.to_string();
        }
        let mut lines = text.lines();
        let mut out = String::new();
        if let Some(first) = lines.next() {
            out.push_str(&format!("\x1b[1m{first}\x1b[0m\n"));
        }
        for l in lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

/// Parses `argv` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let subcommand = subcommand_name(&cli.command);
    match run(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}\n");
            if let Some(sub) = Cli::command().find_subcommand_mut(subcommand) {
                let _ = write!(err, "{}", sub.render_help());
            }
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            EXIT_DATA
        }
    }
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::Ingest(_) => "ingest",
        Command::Standard(_) => "standard",
        Command::Cohort(_) => "cohort",
        Command::Series(_) => "series",
        Command::Gap(_) => "gap",
        Command::Evenness(_) => "evenness",
        Command::Jsdistance(_) => "jsdistance",
        Command::Compare(_) => "compare",
        Command::ExportChart(_) => "export-chart",
        Command::Serve(_) => "serve",
    }
}

fn dataset_dir(cli_dataset: &Option<PathBuf>) -> std::result::Result<&Path, Failure> {
    cli_dataset
        .as_deref()
        .ok_or_else(|| Failure::Usage("--dataset <DIR> is required".into()))
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<(), Failure> {
    let style = Style::detect();
    match &cli.command {
        Command::Ingest(args) => run_ingest(dataset_dir(&cli.dataset)?, args, out, err),
        Command::Serve(args) => {
            let ds = Dataset::open(dataset_dir(&cli.dataset)?)?;
            let addr: SocketAddr = format!("{}:{}", args.host, args.port)
                .parse()
                .map_err(|_| Failure::Usage(format!("bad bind address {}:{}", args.host, args.port)))?;
            let _ = writeln!(err, "serving {} on http://{addr}", ds.manifest().name);
            crate::api::serve(ds, addr, args.cors_origin.clone())?;
            Ok(())
        }
        Command::ExportChart(args) => {
            let ds = Dataset::open(dataset_dir(&cli.dataset)?)?;
            run_export(&ds, args, out)
        }
        analysis => {
            let (endpoint, pairs, output) = analysis_pairs(analysis);
            let ds = Dataset::open(dataset_dir(&cli.dataset)?)?;
            let request = AnalysisRequest::from_params(endpoint, &pairs)?;
            let response = report::execute(&ds, &request)?;
            write_response(&response, output, &style, out)
        }
    }
}

/// The parameter pairs an analysis subcommand stands for; identical to the
/// query string the API would receive.
fn analysis_pairs(command: &Command) -> (Endpoint, Vec<(String, String)>, &OutputArgs) {
    let mut pairs = Vec::new();
    let (endpoint, output) = match command {
        Command::Standard(a) | Command::Cohort(a) => {
            pairs.push(("group".into(), a.group.clone()));
            push_opt(&mut pairs, "year", &a.year);
            a.common.push(&mut pairs);
            let endpoint = if matches!(command, Command::Standard(_)) {
                Endpoint::Standard
            } else {
                Endpoint::Cohort
            };
            (endpoint, &a.output)
        }
        Command::Series(a) => {
            pairs.push(("metric".into(), a.metric.clone()));
            pairs.push(("group".into(), a.group.clone()));
            push_opt(&mut pairs, "years", &a.years);
            a.common.push(&mut pairs);
            (Endpoint::Series, &a.output)
        }
        Command::Gap(a) => {
            push_opt(&mut pairs, "year", &a.year);
            push_opt(&mut pairs, "reference", &a.reference);
            a.common.push(&mut pairs);
            (Endpoint::Gap, &a.output)
        }
        Command::Evenness(a) => {
            push_opt(&mut pairs, "axis", &a.axis);
            push_opt(&mut pairs, "year", &a.year);
            push_opt(&mut pairs, "years", &a.years);
            a.common.push(&mut pairs);
            (Endpoint::Evenness, &a.output)
        }
        Command::Jsdistance(a) => {
            push_opt(&mut pairs, "year", &a.year);
            push_opt(&mut pairs, "reference", &a.reference);
            push_opt(&mut pairs, "breakdown", &a.breakdown);
            a.common.push(&mut pairs);
            (Endpoint::JsDistance, &a.output)
        }
        Command::Compare(a) => {
            for m in &a.metrics {
                pairs.push(("metric".into(), m.clone()));
            }
            push_opt(&mut pairs, "year", &a.year);
            a.common.push(&mut pairs);
            (Endpoint::Compare, &a.output)
        }
        Command::Ingest(_) | Command::ExportChart(_) | Command::Serve(_) => {
            unreachable!("not an analysis subcommand")
        }
    };
    (endpoint, pairs, output)
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text).map_err(Error::from)?,
        _ => out.write_all(text.as_bytes()).map_err(Error::from)?,
    }
    Ok(())
}

fn write_response(
    response: &Response,
    output: &OutputArgs,
    style: &Style,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let text = match output.format {
        OutputFormat::Text => style.table(&response.report.to_text()),
        OutputFormat::Json => response.to_json() + "\n",
        OutputFormat::Csv => response.report.to_csv()?,
        OutputFormat::Svg => {
            let payload = ChartPayload::from_report(&response.report)
                .ok_or_else(|| Failure::Usage("this analysis has no chart; use text, csv or json".into()))?;
            let spec = ChartSpec::new(
                payload.natural_kind(),
                default_title(&response.report),
                payload,
                ChartFormat::Svg,
            );
            emit_chart(&spec)?
        }
    };
    emit(&text, output.out.as_deref(), out)
}

fn default_title(report: &report::Report) -> String {
    use report::Report;
    match report {
        Report::Series(r) => format!("{} of {} ({})", r.metric, r.group, r.scope),
        Report::EvennessSeries(r) => format!("{} evenness, {} (k = {})", r.axis, r.institution, r.k),
        Report::EvennessComparison(r) => format!("Evenness by institution, {}", r.year),
        Report::Gap(r) => format!("Program vs reference shares, {}", r.year),
        Report::Distributions(r) => format!("{} distributions, {}", r.institution, r.year),
        _ => String::new(),
    }
}

fn run_export(ds: &Dataset, args: &ExportChartArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let mut pairs = Vec::new();
    let endpoint = match args.analysis {
        ChartSource::Series => Endpoint::Series,
        ChartSource::Gap => Endpoint::Gap,
        ChartSource::Evenness => Endpoint::Evenness,
        ChartSource::Jsdistance => Endpoint::JsDistance,
    };
    push_opt(&mut pairs, "metric", &args.metric);
    push_opt(&mut pairs, "group", &args.group);
    push_opt(&mut pairs, "axis", &args.axis);
    push_opt(&mut pairs, "year", &args.year);
    push_opt(&mut pairs, "years", &args.years);
    push_opt(&mut pairs, "reference", &args.reference);
    push_opt(&mut pairs, "breakdown", &args.breakdown);
    args.common.push(&mut pairs);
    let request = AnalysisRequest::from_params(endpoint, &pairs)?;
    let response = report::execute(ds, &request)?;
    let payload = ChartPayload::from_report(&response.report)
        .ok_or_else(|| Failure::Usage("jsdistance charts need --breakdown <ID> (a distribution pair)".into()))?;
    let kind = match &args.kind {
        Some(k) => k.parse::<ChartKind>()?,
        None => payload.natural_kind(),
    };
    let format = args.format.parse::<ChartFormat>()?;
    let title = args.title.clone().unwrap_or_else(|| default_title(&response.report));
    let text = emit_chart(&ChartSpec::new(kind, title, payload, format))?;
    emit(&text, args.out.as_deref(), out)
}

fn looks_canonical(path: &Path) -> Result<bool> {
    let text = fs::read_to_string(path)?;
    let header = text.lines().next().unwrap_or("").trim_start_matches('\u{feff}').trim();
    Ok(header.split(',').map(str::trim).eq(CANONICAL_HEADER.iter().copied()))
}

fn run_ingest(
    dir: &Path,
    args: &IngestArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let options = IngestOptions {
        year: args.year,
        award_level: if args.award.eq_ignore_ascii_case("all") {
            None
        } else {
            Some(args.award.parse()?)
        },
        include_second_majors: args.second_majors,
        extras: Extras {
            nonresident: args.include_nonresident,
            unknown: args.include_unknown,
        },
        extra_genders: args.genders.clone(),
        ..IngestOptions::default()
    };
    let map = match &args.column_map {
        Some(p) => ColumnMap::from_file(p)?,
        None => ColumnMap::ipeds_completions(),
    };
    if let Some(names) = &args.names {
        fs::create_dir_all(dir).map_err(Error::from)?;
        fs::copy(names, dir.join(NAMES_FILE)).map_err(Error::from)?;
    }
    for source in &args.sources {
        let canonical = if args.raw {
            false
        } else {
            args.canonical || looks_canonical(source)?
        };
        let report = if canonical {
            ingest_canonical(dir, source, &options)?
        } else {
            ingest_raw(dir, source, &map, &options)?
        };
        print_ingest(&report, out, err);
    }
    Ok(())
}

fn print_ingest(report: &IngestReport, out: &mut dyn Write, err: &mut dyn Write) {
    let m = &report.manifest;
    if report.already_ingested {
        let _ = writeln!(out, "{}: already ingested, nothing changed", report.source.file_name);
    } else {
        let _ = writeln!(
            out,
            "{}: {} rows read, {} kept, {} records ({} graduates)",
            report.source.file_name,
            report.rows_read,
            report.rows_kept,
            report.records_added,
            report.source.total_count
        );
    }
    let years = m.years.map(|y| y.to_string()).unwrap_or_else(|| "-".into());
    let _ = writeln!(
        out,
        "dataset {}: {} records, {} graduates, {} institutions, years {}",
        m.name, m.record_count, m.total_count, m.institutions, years
    );
    if !report.unmapped_columns.is_empty() {
        let _ = writeln!(err, "warning: unmapped columns: {}", report.unmapped_columns.join(", "));
    }
    if report.excluded_extras > 0 {
        let _ = writeln!(
            err,
            "warning: {} graduates in excluded categories (nonresident/unknown) dropped",
            report.excluded_extras
        );
    }
    for w in &report.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}
