//! Loading bank datasets from the three-file CSV layout.
//!
//! * `banks.csv`: `bank_id,name,country,status`
//! * `balance.csv`: `bank_id,year,equity,subordinated_debt,senior_debt,customer_deposits,bank_deposits,other_liabilities,total_assets`
//! * `impairments.csv`: `bank_id,year,loan_writedowns,nonrecurring_expenses,security_impairments`
//!
//! Amounts are EUR (not millions) with at most two decimals. A bad header is
//! fatal; a bad row is rejected with a reason and loading continues.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    BalanceSheet, BankId, BankRecord, CountryCode, ImpairmentEntry, ImpairmentSeries, Status, Year,
    YearRange,
};
use crate::money::Amount;

pub const BANKS_HEADER: [&str; 4] = ["bank_id", "name", "country", "status"];
pub const BALANCE_HEADER: [&str; 9] = [
    "bank_id",
    "year",
    "equity",
    "subordinated_debt",
    "senior_debt",
    "customer_deposits",
    "bank_deposits",
    "other_liabilities",
    "total_assets",
];
pub const IMPAIRMENTS_HEADER: [&str; 5] = [
    "bank_id",
    "year",
    "loan_writedowns",
    "nonrecurring_expenses",
    "security_impairments",
];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: malformed header: expected {expected:?}, found {found:?}", path.display())]
    MalformedHeader {
        path: PathBuf,
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("manifest: {0}")]
    Manifest(String),
}

impl IngestError {
    fn io(path: &Path, source: io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Missing files, unreadable files and broken headers cannot be
    /// recovered by skipping rows.
    pub fn is_io(&self) -> bool {
        !matches!(self, IngestError::Manifest(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub banks_file: PathBuf,
    pub balance_file: PathBuf,
    pub impairments_file: PathBuf,
    pub exclusions_file: Option<PathBuf>,
    pub base_year: Year,
    pub impairment_range: YearRange,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    banks_file: PathBuf,
    balance_file: PathBuf,
    impairments_file: PathBuf,
    exclusions_file: Option<PathBuf>,
    base_year: Option<Year>,
    impairment_range: Option<[Year; 2]>,
}

impl DatasetManifest {
    pub const DEFAULT_BASE_YEAR: Year = 2006;

    pub fn default_impairment_range() -> YearRange {
        YearRange::new(2008, 2012).expect("valid")
    }

    pub fn new(
        banks_file: impl Into<PathBuf>,
        balance_file: impl Into<PathBuf>,
        impairments_file: impl Into<PathBuf>,
    ) -> Self {
        DatasetManifest {
            banks_file: banks_file.into(),
            balance_file: balance_file.into(),
            impairments_file: impairments_file.into(),
            exclusions_file: None,
            base_year: Self::DEFAULT_BASE_YEAR,
            impairment_range: Self::default_impairment_range(),
        }
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.base_year >= self.impairment_range.start() {
            return Err(IngestError::Manifest(format!(
                "base_year {} must precede impairment range start {}",
                self.base_year,
                self.impairment_range.start()
            )));
        }
        Ok(())
    }

    /// Parses a manifest; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, IngestError> {
        let raw: ManifestFile =
            toml::from_str(text).map_err(|e| IngestError::Manifest(e.message().to_string()))?;
        let resolve = |p: PathBuf| if p.is_relative() { base_dir.join(p) } else { p };
        let impairment_range = match raw.impairment_range {
            Some([a, b]) => {
                YearRange::new(a, b).map_err(|e| IngestError::Manifest(e.to_string()))?
            }
            None => Self::default_impairment_range(),
        };
        let manifest = DatasetManifest {
            banks_file: resolve(raw.banks_file),
            balance_file: resolve(raw.balance_file),
            impairments_file: resolve(raw.impairments_file),
            exclusions_file: raw.exclusions_file.map(resolve),
            base_year: raw.base_year.unwrap_or(Self::DEFAULT_BASE_YEAR),
            impairment_range,
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn from_file(path: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    FieldCount,
    InvalidUtf8,
    EmptyBankId,
    InvalidStatus,
    InvalidCountry,
    InvalidYear,
    InvalidAmount,
    NegativeAmount,
    ZeroTotal,
    UnknownBank,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::FieldCount => "field_count",
            RejectReason::InvalidUtf8 => "invalid_utf8",
            RejectReason::EmptyBankId => "empty_bank_id",
            RejectReason::InvalidStatus => "invalid_status",
            RejectReason::InvalidCountry => "invalid_country",
            RejectReason::InvalidYear => "invalid_year",
            RejectReason::InvalidAmount => "invalid_amount",
            RejectReason::NegativeAmount => "negative_amount",
            RejectReason::ZeroTotal => "zero_total",
            RejectReason::UnknownBank => "unknown_bank",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub file: String,
    /// 1-based line number; the header is line 1.
    pub row: u64,
    pub reason: RejectReason,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Data rows (all three files) that passed validation.
    pub accepted: usize,
    pub rejected: Vec<Rejection>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn total_rows(&self) -> usize {
        self.accepted + self.rejected.len()
    }
}

struct Rejected(RejectReason, String);

fn reject(reason: RejectReason, detail: impl Into<String>) -> Rejected {
    Rejected(reason, detail.into())
}

struct Parsed<T> {
    file: String,
    rows: Vec<(u64, T)>,
    rejected: Vec<Rejection>,
}

fn parse_file<T>(
    path: &Path,
    header: &[&str],
    parse_row: impl Fn(&[&str]) -> Result<T, Rejected>,
) -> Result<Parsed<T>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::io(path, e))?;
    parse_reader(file, path, header, parse_row)
}

fn parse_reader<T, R: Read>(
    reader: R,
    path: &Path,
    header: &[&str],
    parse_row: impl Fn(&[&str]) -> Result<T, Rejected>,
) -> Result<Parsed<T>, IngestError> {
    let file_name = path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    );
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = reader.byte_records();

    let found: Vec<String> = match records.next() {
        Some(Ok(r)) => r
            .iter()
            .map(|f| String::from_utf8_lossy(f).into_owned())
            .collect(),
        Some(Err(e)) => {
            return Err(IngestError::Csv {
                path: path.to_path_buf(),
                source: e,
            })
        }
        None => Vec::new(),
    };
    if found.iter().map(String::as_str).ne(header.iter().copied()) {
        return Err(IngestError::MalformedHeader {
            path: path.to_path_buf(),
            expected: header.iter().map(|s| s.to_string()).collect(),
            found,
        });
    }

    let mut out = Parsed {
        file: file_name,
        rows: Vec::new(),
        rejected: Vec::new(),
    };
    for record in records {
        let record = record.map_err(|e| IngestError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let outcome = match record
            .iter()
            .map(std::str::from_utf8)
            .collect::<Result<Vec<&str>, _>>()
        {
            Err(_) => Err(reject(RejectReason::InvalidUtf8, "row is not valid UTF-8")),
            Ok(fields) if fields.len() != header.len() => Err(reject(
                RejectReason::FieldCount,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            )),
            Ok(fields) => parse_row(&fields),
        };
        match outcome {
            Ok(v) => out.rows.push((line, v)),
            Err(Rejected(reason, detail)) => out.rejected.push(Rejection {
                file: out.file.clone(),
                row: line,
                reason,
                detail,
            }),
        }
    }
    Ok(out)
}

fn bank_id(field: &str) -> Result<BankId, Rejected> {
    if field.is_empty() {
        return Err(reject(RejectReason::EmptyBankId, "bank_id is empty"));
    }
    Ok(BankId::new(field))
}

fn year(field: &str) -> Result<Year, Rejected> {
    let invalid = || reject(RejectReason::InvalidYear, format!("invalid year {field:?}"));
    if field.len() != 4 || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid());
    }
    field.parse().map_err(|_| invalid())
}

fn amount(name: &str, field: &str) -> Result<Amount, Rejected> {
    field
        .parse()
        .map_err(|e| reject(RejectReason::InvalidAmount, format!("{name}: {e}")))
}

struct BankRow {
    bank_id: BankId,
    name: String,
    country: CountryCode,
    status: Status,
}

fn parse_bank_row(f: &[&str]) -> Result<BankRow, Rejected> {
    Ok(BankRow {
        bank_id: bank_id(f[0])?,
        name: f[1].to_string(),
        country: f[2].parse().map_err(|e: crate::model::InvalidCountry| {
            reject(RejectReason::InvalidCountry, e.to_string())
        })?,
        status: f[3].parse().map_err(|e: crate::model::InvalidStatus| {
            reject(RejectReason::InvalidStatus, e.to_string())
        })?,
    })
}

fn parse_balance_row(f: &[&str]) -> Result<(BankId, BalanceSheet), Rejected> {
    let id = bank_id(f[0])?;
    let mut values = [Amount::ZERO; 7];
    for (i, v) in values.iter_mut().enumerate() {
        let name = BALANCE_HEADER[i + 2];
        *v = amount(name, f[i + 2])?;
        if v.is_negative() {
            return Err(reject(
                RejectReason::NegativeAmount,
                format!("{name} is negative"),
            ));
        }
    }
    let sheet = BalanceSheet {
        year: year(f[1])?,
        equity: values[0],
        subordinated_debt: values[1],
        senior_debt: values[2],
        customer_deposits: values[3],
        bank_deposits: values[4],
        other_liabilities: values[5],
        total_assets: values[6],
    };
    if sheet.total_liabilities_and_equity() == Amount::ZERO {
        return Err(reject(
            RejectReason::ZeroTotal,
            "total liabilities and equity is zero",
        ));
    }
    Ok((id, sheet))
}

fn parse_impairment_row(f: &[&str]) -> Result<(BankId, Year, ImpairmentEntry), Rejected> {
    Ok((
        bank_id(f[0])?,
        year(f[1])?,
        ImpairmentEntry {
            loan_writedowns: amount("loan_writedowns", f[2])?,
            nonrecurring_expenses: amount("nonrecurring_expenses", f[3])?,
            security_impairments: amount("security_impairments", f[4])?,
        },
    ))
}

/// Reads an exclusions list: one bank_id per line, `#` starts a comment.
pub fn parse_exclusions(text: &str) -> Vec<BankId> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(BankId::new)
        .collect()
}

/// Drops records whose id is excluded, preserving order. Ids that match no
/// record produce a warning.
pub fn apply_exclusions(
    records: Vec<BankRecord>,
    exclusions: &[BankId],
) -> (Vec<BankRecord>, Vec<String>) {
    let excluded: HashSet<&BankId> = exclusions.iter().collect();
    let present: HashSet<&BankId> = records.iter().map(|r| &r.bank_id).collect();
    let mut warnings = Vec::new();
    let mut seen = HashSet::new();
    for id in exclusions {
        if !present.contains(id) && seen.insert(id) {
            warnings.push(format!("exclusion {id} does not match any bank"));
        }
    }
    let kept = records
        .into_iter()
        .filter(|r| !excluded.contains(&r.bank_id))
        .collect();
    (kept, warnings)
}

/// Loads, validates and joins a dataset.
///
/// Banks without a balance sheet for the manifest's base year are dropped
/// with a warning.
pub fn load_dataset(
    manifest: &DatasetManifest,
) -> Result<(Vec<BankRecord>, ValidationReport), IngestError> {
    manifest.validate()?;
    let (banks, balances, impairments) = std::thread::scope(|s| {
        let banks = s.spawn(|| parse_file(&manifest.banks_file, &BANKS_HEADER, parse_bank_row));
        let balances =
            s.spawn(|| parse_file(&manifest.balance_file, &BALANCE_HEADER, parse_balance_row));
        let impairments = s.spawn(|| {
            parse_file(
                &manifest.impairments_file,
                &IMPAIRMENTS_HEADER,
                parse_impairment_row,
            )
        });
        (
            banks.join().expect("parser thread panicked"),
            balances.join().expect("parser thread panicked"),
            impairments.join().expect("parser thread panicked"),
        )
    });
    let (banks, balances, impairments) = (banks?, balances?, impairments?);
    let exclusions = match &manifest.exclusions_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
            parse_exclusions(&text)
        }
        None => Vec::new(),
    };
    Ok(join(
        banks,
        balances,
        impairments,
        &exclusions,
        manifest.base_year,
    ))
}

fn join(
    banks: Parsed<BankRow>,
    balances: Parsed<(BankId, BalanceSheet)>,
    impairments: Parsed<(BankId, Year, ImpairmentEntry)>,
    exclusions: &[BankId],
    base_year: Year,
) -> (Vec<BankRecord>, ValidationReport) {
    let mut report = ValidationReport::default();
    let mut records: Vec<BankRecord> = Vec::new();
    let mut index: HashMap<BankId, usize> = HashMap::new();

    report.accepted += banks.rows.len();
    report.rejected.extend(banks.rejected);
    for (line, row) in banks.rows {
        let record = BankRecord {
            bank_id: row.bank_id.clone(),
            name: row.name,
            country: row.country,
            status: row.status,
            balance_sheets: BTreeMap::new(),
            impairments: ImpairmentSeries::new(),
        };
        match index.get(&row.bank_id) {
            Some(&i) => {
                report.warnings.push(format!(
                    "{}:{line}: duplicate bank_id {}, later row wins",
                    banks.file, row.bank_id
                ));
                records[i] = record;
            }
            None => {
                index.insert(row.bank_id, records.len());
                records.push(record);
            }
        }
    }

    report.rejected.extend(balances.rejected);
    for (line, (id, sheet)) in balances.rows {
        let Some(&i) = index.get(&id) else {
            report.rejected.push(Rejection {
                file: balances.file.clone(),
                row: line,
                reason: RejectReason::UnknownBank,
                detail: format!("bank_id {id} not in banks file"),
            });
            continue;
        };
        report.accepted += 1;
        if records[i]
            .balance_sheets
            .insert(sheet.year, sheet)
            .is_some()
        {
            report.warnings.push(format!(
                "{}:{line}: duplicate balance sheet {id}/{}, later row wins",
                balances.file, sheet.year
            ));
        }
    }

    report.rejected.extend(impairments.rejected);
    for (line, (id, year, entry)) in impairments.rows {
        let Some(&i) = index.get(&id) else {
            report.rejected.push(Rejection {
                file: impairments.file.clone(),
                row: line,
                reason: RejectReason::UnknownBank,
                detail: format!("bank_id {id} not in banks file"),
            });
            continue;
        };
        report.accepted += 1;
        if records[i].impairments.insert(year, entry).is_some() {
            report.warnings.push(format!(
                "{}:{line}: duplicate impairments {id}/{year}, later row wins",
                impairments.file
            ));
        }
    }

    let (records, exclusion_warnings) = apply_exclusions(records, exclusions);
    report.warnings.extend(exclusion_warnings);

    let records = records
        .into_iter()
        .filter(|r| {
            let ok = r.balance(base_year).is_some();
            if !ok {
                report.warnings.push(format!(
                    "bank {} has no {base_year} balance sheet; excluded from analysis",
                    r.bank_id
                ));
            }
            ok
        })
        .collect();
    (records, report)
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_banks<W: Write>(records: &[BankRecord], w: W) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(BANKS_HEADER)?;
    for r in records {
        out.write_record([
            r.bank_id.as_str(),
            &r.name,
            r.country.as_str(),
            r.status.as_str(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_balances<W: Write>(records: &[BankRecord], w: W) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(BALANCE_HEADER)?;
    for r in records {
        for b in r.balance_sheets.values() {
            out.write_record([
                r.bank_id.to_string(),
                b.year.to_string(),
                b.equity.to_string(),
                b.subordinated_debt.to_string(),
                b.senior_debt.to_string(),
                b.customer_deposits.to_string(),
                b.bank_deposits.to_string(),
                b.other_liabilities.to_string(),
                b.total_assets.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_impairments<W: Write>(records: &[BankRecord], w: W) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(IMPAIRMENTS_HEADER)?;
    for r in records {
        for (year, e) in r.impairments.iter() {
            out.write_record([
                r.bank_id.to_string(),
                year.to_string(),
                e.loan_writedowns.to_string(),
                e.nonrecurring_expenses.to_string(),
                e.security_impairments.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes `banks.csv`, `balance.csv` and `impairments.csv` into `dir`.
pub fn write_dataset(records: &[BankRecord], dir: &Path) -> Result<(), IngestError> {
    let create = |name: &str| {
        let path = dir.join(name);
        File::create(&path)
            .map(io::BufWriter::new)
            .map_err(|e| IngestError::io(&path, e))
    };
    let csv_err = |name: &str| {
        let path = dir.join(name);
        move |e| IngestError::Csv { path, source: e }
    };
    write_banks(records, create("banks.csv")?).map_err(csv_err("banks.csv"))?;
    write_balances(records, create("balance.csv")?).map_err(csv_err("balance.csv"))?;
    write_impairments(records, create("impairments.csv")?).map_err(csv_err("impairments.csv"))?;
    Ok(())
}
