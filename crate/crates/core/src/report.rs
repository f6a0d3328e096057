//! Table rendering.
//!
//! CSV and Markdown carry percentages and EUR millions rounded to one
//! decimal. JSON carries the unrounded values so results can be reloaded.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{funding_mix, loss_ratio, GroupAggregate, GroupResult};
use crate::model::Category;
use crate::money::Amount;
use crate::waterfall::WaterfallResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    /// Bank counts and realized impairments per group.
    CountsImpairments,
    /// Base-year funding proportions.
    FundingMix,
    /// Write-down fractions under one scenario.
    BailIn,
    /// Write-down fractions across scenarios, with loss multiples.
    Stress,
}

impl Table {
    pub fn as_str(self) -> &'static str {
        match self {
            Table::CountsImpairments => "counts_impairments",
            Table::FundingMix => "funding_mix",
            Table::BailIn => "bail_in",
            Table::Stress => "stress",
        }
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Table {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Table::CountsImpairments,
            Table::FundingMix,
            Table::BailIn,
            Table::Stress,
        ]
        .into_iter()
        .find(|t| t.as_str() == s)
        .ok_or_else(|| format!("unknown table {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "markdown" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub format: Format,
    pub table: Table,
    /// `None` means standard output.
    pub destination: Option<std::path::PathBuf>,
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("table {table} cannot be rendered from {data} data")]
    Unsupported { table: Table, data: &'static str },
    #[error(transparent)]
    Analytics(#[from] crate::analytics::AnalyticsError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One row of the stress table: a scenario's result for one group and the
/// loss multiple against that group's realized-loss run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressRow {
    pub scenario: String,
    pub group: GroupResult,
    pub loss_multiple: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub enum ReportData<'a> {
    Aggregates(&'a [GroupAggregate]),
    BailIn {
        classes: &'a [Category],
        groups: &'a [GroupResult],
    },
    Stress {
        classes: &'a [Category],
        rows: &'a [StressRow],
    },
}

impl ReportData<'_> {
    fn kind(&self) -> &'static str {
        match self {
            ReportData::Aggregates(_) => "aggregate",
            ReportData::BailIn { .. } => "bail-in",
            ReportData::Stress { .. } => "stress",
        }
    }
}

fn pct(x: f64) -> String {
    // + 0.0 turns -0.0 into 0.0
    format!("{:.1}", x * 100.0 + 0.0)
}

fn eur_mn(x: f64) -> String {
    format!("{:.1}", x / 1e6 + 0.0)
}

fn amount_mn(a: Amount) -> String {
    eur_mn(a.to_eur())
}

fn multiple(x: Option<f64>) -> String {
    x.map_or_else(String::new, |m| format!("{m:.1}"))
}

struct Grid {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    numeric: Vec<bool>,
}

fn class_columns(classes: &[Category]) -> Vec<String> {
    classes.iter().map(|c| format!("{c}_pct")).collect()
}

fn class_cells(classes: &[Category], r: &WaterfallResult) -> Vec<String> {
    classes.iter().map(|c| pct(r.fraction(*c))).collect()
}

fn grid(table: Table, data: ReportData<'_>) -> Result<Grid, RenderError> {
    let key_cols = ["country", "status", "banks"].map(String::from).to_vec();
    match (table, data) {
        (Table::CountsImpairments, ReportData::Aggregates(aggs)) => {
            let header: Vec<String> = key_cols
                .into_iter()
                .chain(["impairments_eur_mn", "loss_ratio_pct"].map(String::from))
                .collect();
            let rows = aggs
                .iter()
                .map(|a| {
                    Ok(vec![
                        a.key.country_label().to_string(),
                        a.key.status_label().to_string(),
                        a.bank_count.to_string(),
                        amount_mn(a.total_impairments),
                        pct(loss_ratio(a)?),
                    ])
                })
                .collect::<Result<_, RenderError>>()?;
            Ok(Grid {
                numeric: header.iter().enumerate().map(|(i, _)| i >= 2).collect(),
                header,
                rows,
            })
        }
        (Table::FundingMix, ReportData::Aggregates(aggs)) => {
            let mut header = key_cols;
            header.extend(Category::ALL.iter().map(|c| format!("{c}_pct")));
            header.push("long_term_debt_pct".into());
            let rows = aggs
                .iter()
                .map(|a| {
                    let mix = funding_mix(a)?;
                    let mut row = vec![
                        a.key.country_label().to_string(),
                        a.key.status_label().to_string(),
                        a.bank_count.to_string(),
                    ];
                    row.extend(Category::ALL.iter().map(|c| pct(mix.share(*c))));
                    row.push(pct(mix.long_term_debt()));
                    Ok(row)
                })
                .collect::<Result<_, RenderError>>()?;
            Ok(Grid {
                numeric: header.iter().enumerate().map(|(i, _)| i >= 2).collect(),
                header,
                rows,
            })
        }
        (Table::BailIn, ReportData::BailIn { classes, groups }) => {
            let mut header = key_cols;
            header.extend(["loss_eur_mn", "bailed_in_pct"].map(String::from));
            header.extend(class_columns(classes));
            header.extend(["residual_eur_mn", "dgs_shortfall_eur_mn"].map(String::from));
            let rows = groups
                .iter()
                .map(|g| {
                    let mut row = vec![
                        g.key.country_label().to_string(),
                        g.key.status_label().to_string(),
                        g.bank_count.to_string(),
                        eur_mn(g.result.loss),
                        pct(g.bailed_in_share()),
                    ];
                    row.extend(class_cells(classes, &g.result));
                    row.push(eur_mn(g.result.residual));
                    row.push(eur_mn(g.result.dgs_shortfall));
                    row
                })
                .collect();
            Ok(Grid {
                numeric: header.iter().enumerate().map(|(i, _)| i >= 2).collect(),
                header,
                rows,
            })
        }
        (Table::Stress, ReportData::Stress { classes, rows }) => {
            let mut header = ["country", "status", "scenario", "banks"]
                .map(String::from)
                .to_vec();
            header.extend(["loss_eur_mn", "loss_pct_assets", "loss_multiple"].map(String::from));
            header.extend(class_columns(classes));
            header.push("residual_eur_mn".into());
            let rows = rows
                .iter()
                .map(|s| {
                    let g = &s.group;
                    let loss_pct = if g.total_assets > 0.0 {
                        g.result.loss / g.total_assets
                    } else {
                        0.0
                    };
                    let mut row = vec![
                        g.key.country_label().to_string(),
                        g.key.status_label().to_string(),
                        s.scenario.clone(),
                        g.bank_count.to_string(),
                        eur_mn(g.result.loss),
                        pct(loss_pct),
                        multiple(s.loss_multiple),
                    ];
                    row.extend(class_cells(classes, &g.result));
                    row.push(eur_mn(g.result.residual));
                    row
                })
                .collect();
            Ok(Grid {
                numeric: header.iter().enumerate().map(|(i, _)| i >= 3).collect(),
                header,
                rows,
            })
        }
        (table, data) => Err(RenderError::Unsupported {
            table,
            data: data.kind(),
        }),
    }
}

fn to_csv(g: &Grid) -> Result<Vec<u8>, RenderError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&g.header)?;
    for row in &g.rows {
        w.write_record(row)?;
    }
    w.into_inner()
        .map_err(|e| RenderError::Csv(e.into_error().into()))
}

fn to_markdown(g: &Grid) -> Vec<u8> {
    let mut out = String::new();
    let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
    out.push_str(&line(&g.header));
    let sep: Vec<String> = g
        .numeric
        .iter()
        .map(|n| {
            if *n {
                "---:".to_string()
            } else {
                "---".to_string()
            }
        })
        .collect();
    out.push_str(&line(&sep));
    for row in &g.rows {
        out.push_str(&line(row));
    }
    out.into_bytes()
}

#[derive(Serialize)]
struct AggregateJson<'a> {
    country: Option<&'a str>,
    status: Option<&'static str>,
    bank_count: usize,
    balance: &'a crate::model::BalanceSheet,
    total_impairments: Amount,
    loss_ratio: f64,
    funding_mix: crate::analytics::FundingMix,
}

/// JSON record for a scenario table row; `result` keeps full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultJson {
    pub country: Option<String>,
    pub status: Option<crate::model::Status>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub bank_count: usize,
    pub base_liabilities: f64,
    pub total_assets: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss_multiple: Option<f64>,
    pub result: WaterfallResult,
}

impl ResultJson {
    fn new(g: &GroupResult, scenario: Option<&str>, loss_multiple: Option<f64>) -> Self {
        ResultJson {
            country: g.key.country.map(|c| c.to_string()),
            status: g.key.status,
            scenario: scenario.map(String::from),
            bank_count: g.bank_count,
            base_liabilities: g.base_liabilities,
            total_assets: g.total_assets,
            loss_multiple,
            result: g.result.clone(),
        }
    }
}

fn to_json(table: Table, data: ReportData<'_>) -> Result<Vec<u8>, RenderError> {
    let mut out = match (table, data) {
        (Table::CountsImpairments | Table::FundingMix, ReportData::Aggregates(aggs)) => {
            let rows = aggs
                .iter()
                .map(|a| {
                    Ok(AggregateJson {
                        country: a.key.country.as_ref().map(|c| c.as_str()),
                        status: a.key.status.map(|s| s.as_str()),
                        bank_count: a.bank_count,
                        balance: &a.balance,
                        total_impairments: a.total_impairments,
                        loss_ratio: loss_ratio(a)?,
                        funding_mix: funding_mix(a)?,
                    })
                })
                .collect::<Result<Vec<_>, RenderError>>()?;
            serde_json::to_vec_pretty(&rows)?
        }
        (Table::BailIn, ReportData::BailIn { groups, .. }) => {
            let rows: Vec<ResultJson> = groups
                .iter()
                .map(|g| ResultJson::new(g, None, None))
                .collect();
            serde_json::to_vec_pretty(&rows)?
        }
        (Table::Stress, ReportData::Stress { rows, .. }) => {
            let rows: Vec<ResultJson> = rows
                .iter()
                .map(|s| ResultJson::new(&s.group, Some(&s.scenario), s.loss_multiple))
                .collect();
            serde_json::to_vec_pretty(&rows)?
        }
        (table, data) => {
            return Err(RenderError::Unsupported {
                table,
                data: data.kind(),
            })
        }
    };
    out.push(b'\n');
    Ok(out)
}

/// Renders `data` as `table` in `format`. Output is a pure function of the
/// inputs.
pub fn render(data: ReportData<'_>, table: Table, format: Format) -> Result<Vec<u8>, RenderError> {
    match format {
        Format::Json => to_json(table, data),
        Format::Csv => to_csv(&grid(table, data)?),
        Format::Markdown => Ok(to_markdown(&grid(table, data)?)),
    }
}
