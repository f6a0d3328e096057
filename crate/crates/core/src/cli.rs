//! The `bailin` command line.

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analytics::{self, GroupBy, GroupResult, Mode, ScenarioKind, ScenarioSpec};
use crate::ingest::{load_dataset, DatasetManifest, IngestError, ValidationReport};
use crate::ladder::SeniorityLadder;
use crate::model::{BankRecord, YearRange};
use crate::report::{self, Format, ReportData, StressRow, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "bailin", version)]
#[command(about = "Apply a bail-in resolution waterfall to bank balance-sheet data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a dataset, run scenarios and render a table
    Run(RunArgs),
    /// Load a dataset and print the validation report as JSON
    Validate {
        #[arg(long, value_name = "PATH")]
        manifest: PathBuf,
    },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Dataset manifest (key = value lines)
    #[arg(long, value_name = "PATH")]
    manifest: PathBuf,

    /// `actual` or `stress:<alpha>`; repeat for the stress table
    #[arg(long, value_name = "SCENARIO")]
    scenario: Vec<String>,

    #[arg(long, value_enum, default_value_t = TableArg::BailIn)]
    table: TableArg,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    #[arg(long, value_enum, default_value_t = ModeArg::Aggregate)]
    mode: ModeArg,

    /// Balance-sheet year used as the allocation base
    #[arg(long, value_name = "INT")]
    base_year: Option<i32>,

    /// Impairment window, inclusive
    #[arg(long, value_name = "START:END")]
    impairment_years: Option<YearRange>,

    /// Grouping levels to report, in order (comma separated)
    #[arg(long, value_enum, value_delimiter = ',')]
    group_by: Vec<GroupArg>,

    /// Include surviving banks in bail-in and stress tables
    #[arg(long)]
    include_surviving: bool,

    /// Seniority ladder definition (key = value lines)
    #[arg(long, value_name = "PATH")]
    ladder: Option<PathBuf>,

    /// Write output here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TableArg {
    CountsImpairments,
    FundingMix,
    BailIn,
    Stress,
}

impl From<TableArg> for Table {
    fn from(t: TableArg) -> Table {
        match t {
            TableArg::CountsImpairments => Table::CountsImpairments,
            TableArg::FundingMix => Table::FundingMix,
            TableArg::BailIn => Table::BailIn,
            TableArg::Stress => Table::Stress,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Markdown => Format::Markdown,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Aggregate,
    PerBank,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum GroupArg {
    Country,
    Status,
    Both,
    None,
}

impl From<GroupArg> for GroupBy {
    fn from(g: GroupArg) -> GroupBy {
        match g {
            GroupArg::Country => GroupBy::Country,
            GroupArg::Status => GroupBy::Status,
            GroupArg::Both => GroupBy::Both,
            GroupArg::None => GroupBy::None,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) => m,
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<analytics::AnalyticsError> for Failure {
    fn from(e: analytics::AnalyticsError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<report::RenderError> for Failure {
    fn from(e: report::RenderError) -> Self {
        Failure::Validation(e.to_string())
    }
}

struct Diagnostics<'a> {
    err: &'a mut dyn Write,
    color: bool,
}

impl Diagnostics<'_> {
    fn emit(&mut self, label: &str, ansi: &str, msg: &str) {
        let _ = if self.color {
            writeln!(self.err, "\x1b[{ansi}m{label}\x1b[0m: {msg}")
        } else {
            writeln!(self.err, "{label}: {msg}")
        };
    }

    fn warn(&mut self, msg: &str) {
        self.emit("warning", "33", msg);
    }

    fn error(&mut self, msg: &str) {
        self.emit("error", "31", msg);
    }

    fn report(&mut self, report: &ValidationReport) {
        for r in &report.rejected {
            self.warn(&format!(
                "{}:{}: rejected ({}): {}",
                r.file, r.row, r.reason, r.detail
            ));
        }
        for w in &report.warnings {
            self.warn(w);
        }
    }
}

/// Entry point used by the binary. Writes data to `out` (unless `--out` is
/// given) and diagnostics to `err`; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(err, "{e}");
                    EXIT_VALIDATION
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_VALIDATION
                }
            };
        }
    };
    let color = std::env::var_os("BAILIN_NO_COLOR").is_none() && std::io::stderr().is_terminal();
    let mut diag = Diagnostics { err, color };
    let result = match cli.command {
        Command::Run(args) => run_command(&args, out, &mut diag),
        Command::Validate { manifest } => validate_command(&manifest, out, &mut diag),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            diag.error(f.message());
            f.code()
        }
    }
}

fn validate_command(
    manifest: &Path,
    out: &mut dyn Write,
    diag: &mut Diagnostics<'_>,
) -> Result<(), Failure> {
    let manifest = DatasetManifest::from_file(manifest)?;
    let (records, report) = load_dataset(&manifest)?;
    diag.report(&report);
    let body = serde_json::json!({
        "banks": records.len(),
        "report": report,
    });
    let mut bytes = serde_json::to_vec_pretty(&body).expect("serializable");
    bytes.push(b'\n');
    out.write_all(&bytes)
        .map_err(|e| Failure::Io(e.to_string()))
}

fn default_levels(table: Table) -> Vec<GroupBy> {
    match table {
        Table::CountsImpairments => vec![GroupBy::Both, GroupBy::Status, GroupBy::None],
        Table::FundingMix => vec![GroupBy::None, GroupBy::Status],
        Table::BailIn => vec![GroupBy::Status, GroupBy::Both],
        Table::Stress => vec![GroupBy::Status],
    }
}

fn run_command(
    args: &RunArgs,
    out: &mut dyn Write,
    diag: &mut Diagnostics<'_>,
) -> Result<(), Failure> {
    let mut manifest = DatasetManifest::from_file(&args.manifest)?;
    if let Some(year) = args.base_year {
        manifest.base_year = year;
    }
    if let Some(range) = args.impairment_years {
        manifest.impairment_range = range;
    }
    manifest.validate()?;

    let ladder = match &args.ladder {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            SeniorityLadder::parse(&text)
                .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?
        }
        None => SeniorityLadder::default(),
    };
    let mode = match args.mode {
        ModeArg::Aggregate => Mode::Aggregate,
        ModeArg::PerBank => Mode::PerBank,
    };
    let table: Table = args.table.into();
    let format: Format = args.format.into();
    let levels: Vec<GroupBy> = if args.group_by.is_empty() {
        default_levels(table)
    } else {
        args.group_by.iter().map(|g| (*g).into()).collect()
    };
    let scenarios = args
        .scenario
        .iter()
        .map(|s| ScenarioSpec::from_flag(s, manifest.impairment_range, mode))
        .collect::<Result<Vec<_>, _>>()?;

    let (records, report) = load_dataset(&manifest)?;
    diag.report(&report);

    let classes = ladder.bail_inable_categories();
    let bytes = match table {
        Table::CountsImpairments | Table::FundingMix => {
            let mut aggs = Vec::new();
            for by in &levels {
                aggs.extend(analytics::aggregate(
                    &records,
                    *by,
                    manifest.base_year,
                    manifest.impairment_range,
                )?);
            }
            report::render(ReportData::Aggregates(&aggs), table, format)?
        }
        Table::BailIn => {
            let spec = match scenarios.as_slice() {
                [] => ScenarioSpec::actual(manifest.impairment_range).with_mode(mode),
                [one] => *one,
                _ => {
                    return Err(Failure::Validation(
                        "the bail_in table takes a single --scenario".into(),
                    ))
                }
            };
            let scope = scoped(&records, args.include_surviving);
            let mut groups: Vec<GroupResult> = Vec::new();
            for by in &levels {
                let outcome =
                    analytics::run_scenario(&scope, *by, manifest.base_year, &spec, &ladder)?;
                outcome.warnings.iter().for_each(|w| diag.warn(w));
                groups.extend(outcome.groups);
            }
            report::render(
                ReportData::BailIn {
                    classes: &classes,
                    groups: &groups,
                },
                table,
                format,
            )?
        }
        Table::Stress => {
            let scenarios = if scenarios.is_empty() {
                ["actual", "stress:0.1", "stress:0.2"]
                    .iter()
                    .map(|s| ScenarioSpec::from_flag(s, manifest.impairment_range, mode))
                    .collect::<Result<Vec<_>, _>>()?
            } else {
                scenarios
            };
            let scope = scoped(&records, args.include_surviving);
            let reference = ScenarioSpec::actual(manifest.impairment_range).with_mode(mode);
            let rows = stress_rows(
                &scope,
                &levels,
                manifest.base_year,
                &scenarios,
                &reference,
                &ladder,
                diag,
            )?;
            report::render(
                ReportData::Stress {
                    classes: &classes,
                    rows: &rows,
                },
                table,
                format,
            )?
        }
    };

    match &args.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => out
            .write_all(&bytes)
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn scoped(records: &[BankRecord], include_surviving: bool) -> Vec<BankRecord> {
    records
        .iter()
        .filter(|r| include_surviving || r.status.is_failed())
        .cloned()
        .collect()
}

fn stress_rows(
    records: &[BankRecord],
    levels: &[GroupBy],
    base_year: i32,
    scenarios: &[ScenarioSpec],
    reference: &ScenarioSpec,
    ladder: &SeniorityLadder,
    diag: &mut Diagnostics<'_>,
) -> Result<Vec<StressRow>, Failure> {
    let mut rows = Vec::new();
    for by in levels {
        let actual = analytics::run_scenario(records, *by, base_year, reference, ladder)?;
        let outcomes = scenarios
            .iter()
            .map(|s| analytics::run_scenario(records, *by, base_year, s, ladder))
            .collect::<Result<Vec<_>, _>>()?;
        for o in &outcomes {
            o.warnings.iter().for_each(|w| diag.warn(w));
        }
        for reference_group in &actual.groups {
            for outcome in &outcomes {
                let Some(group) = outcome.group(&reference_group.key) else {
                    continue;
                };
                let loss_multiple = match outcome.spec.kind {
                    ScenarioKind::Actual { .. } => None,
                    ScenarioKind::Stress { .. } => group.loss_multiple_of(reference_group),
                };
                rows.push(StressRow {
                    scenario: outcome.spec.label(),
                    group: group.clone(),
                    loss_multiple,
                });
            }
        }
    }
    Ok(rows)
}
