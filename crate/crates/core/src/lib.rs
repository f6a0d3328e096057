//! Bail-in resolution waterfall for bank balance-sheet data.
//!
//! Realized impairment losses (or stress losses as a share of assets) are
//! written down a creditor seniority ladder: equity first, then subordinated
//! debt, senior debt and finally uncovered deposits. Results are aggregated
//! by country and crisis outcome and rendered as tables.

pub mod analytics;
pub mod cli;
pub mod ingest;
pub mod ladder;
pub mod model;
pub mod money;
pub mod report;
pub mod waterfall;

pub use analytics::{
    aggregate, funding_mix, loss_ratio, run_scenario, GroupAggregate, GroupBy, GroupKey,
    GroupResult, Mode, ScenarioKind, ScenarioOutcome, ScenarioSpec,
};
pub use ingest::{apply_exclusions, load_dataset, DatasetManifest, ValidationReport};
pub use ladder::{LiabilityClass, SeniorityLadder};
pub use model::{
    BalanceSheet, BankId, BankRecord, Category, CountryCode, ImpairmentEntry, ImpairmentSeries,
    Status, Year, YearRange,
};
pub use money::Amount;
pub use waterfall::{
    allocate_loss, bail_in_capacities, compute_loss_actual, compute_loss_stress, ClassAllocation,
    WaterfallResult,
};
