//! Group aggregation, funding mixes, loss ratios and scenario runs.
//!
//! Aggregates are exact: balance sheets and impairments are summed in
//! integer cents, so any partition of the sample adds back to the whole and
//! input order never matters.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ladder::SeniorityLadder;
use crate::model::{
    BalanceSheet, BankId, BankRecord, Category, CountryCode, Status, Year, YearRange,
};
use crate::money::Amount;
use crate::waterfall::{
    allocate_loss, bail_in_capacities, compute_loss_actual, compute_loss_stress, WaterfallError,
    WaterfallResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("bank {0} has no {1} balance sheet")]
    MissingBaseYear(BankId, Year),
    #[error("funding mix undefined for group {0}: total liabilities and equity is zero")]
    UndefinedMix(GroupKey),
    #[error("loss ratio undefined for group {0}: total liabilities and equity is zero")]
    UndefinedRatio(GroupKey),
    #[error("invalid scenario {0:?}: expected `actual` or `stress:<alpha>`")]
    InvalidScenario(String),
    #[error(transparent)]
    Waterfall(#[from] WaterfallError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    /// Whole sample as one group.
    None,
    Country,
    Status,
    /// Country x status.
    Both,
}

impl std::str::FromStr for GroupBy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(GroupBy::None),
            "country" => Ok(GroupBy::Country),
            "status" => Ok(GroupBy::Status),
            "both" => Ok(GroupBy::Both),
            other => Err(format!("unknown grouping {other:?}")),
        }
    }
}

/// Group identity. Derived ordering gives country ascending, then status in
/// nationalized, recapitalized, surviving order; absent dimensions sort first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub country: Option<CountryCode>,
    pub status: Option<Status>,
}

impl GroupKey {
    pub const ALL: GroupKey = GroupKey {
        country: None,
        status: None,
    };

    pub fn of(record: &BankRecord, by: GroupBy) -> GroupKey {
        let country = matches!(by, GroupBy::Country | GroupBy::Both).then_some(record.country);
        let status = matches!(by, GroupBy::Status | GroupBy::Both).then_some(record.status);
        GroupKey { country, status }
    }

    pub fn country_label(&self) -> &str {
        self.country.as_ref().map_or("ALL", |c| c.as_str())
    }

    pub fn status_label(&self) -> &'static str {
        self.status.map_or("all", Status::as_str)
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.country_label(), self.status_label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAggregate {
    pub key: GroupKey,
    pub bank_count: usize,
    /// Component-wise sum of base-year balance sheets.
    pub balance: BalanceSheet,
    /// Signed sum of impairment components over the impairment range.
    pub total_impairments: Amount,
}

/// Splits records into groups; members are ordered by bank id so every
/// downstream floating-point reduction is independent of input order.
pub fn partition(records: &[BankRecord], by: GroupBy) -> BTreeMap<GroupKey, Vec<&BankRecord>> {
    let mut groups: BTreeMap<GroupKey, Vec<&BankRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(GroupKey::of(r, by)).or_default().push(r);
    }
    for members in groups.values_mut() {
        members.sort_by(|a, b| a.bank_id.cmp(&b.bank_id));
    }
    groups
}

fn aggregate_members(
    key: GroupKey,
    members: &[&BankRecord],
    base_year: Year,
    impairment_range: YearRange,
) -> Result<GroupAggregate, AnalyticsError> {
    let mut balance = BalanceSheet::zero(base_year);
    let mut total_impairments = Amount::ZERO;
    for r in members {
        let sheet = r
            .balance(base_year)
            .ok_or_else(|| AnalyticsError::MissingBaseYear(r.bank_id.clone(), base_year))?;
        balance.accumulate(sheet);
        total_impairments += r.impairments.net_total(impairment_range);
    }
    Ok(GroupAggregate {
        key,
        bank_count: members.len(),
        balance,
        total_impairments,
    })
}

/// One aggregate per non-empty group, in key order.
pub fn aggregate(
    records: &[BankRecord],
    by: GroupBy,
    base_year: Year,
    impairment_range: YearRange,
) -> Result<Vec<GroupAggregate>, AnalyticsError> {
    partition(records, by)
        .into_iter()
        .map(|(key, members)| aggregate_members(key, &members, base_year, impairment_range))
        .collect()
}

/// Share of total liabilities-and-equity held in each funding category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundingMix {
    pub shares: BTreeMap<Category, f64>,
}

impl FundingMix {
    pub fn share(&self, category: Category) -> f64 {
        self.shares.get(&category).copied().unwrap_or(0.0)
    }

    /// Subordinated plus senior debt.
    pub fn long_term_debt(&self) -> f64 {
        self.share(Category::SubordinatedDebt) + self.share(Category::SeniorDebt)
    }
}

pub fn funding_mix(aggregate: &GroupAggregate) -> Result<FundingMix, AnalyticsError> {
    let total = aggregate.balance.total_liabilities_and_equity();
    if total.cents() <= 0 {
        return Err(AnalyticsError::UndefinedMix(aggregate.key));
    }
    let total = total.cents() as f64;
    Ok(FundingMix {
        shares: Category::ALL
            .iter()
            .map(|c| (*c, aggregate.balance.amount(*c).cents() as f64 / total))
            .collect(),
    })
}

/// Realized impairments as a fraction of base-year liabilities-and-equity.
pub fn loss_ratio(aggregate: &GroupAggregate) -> Result<f64, AnalyticsError> {
    let total = aggregate.balance.total_liabilities_and_equity();
    if total.cents() <= 0 {
        return Err(AnalyticsError::UndefinedRatio(aggregate.key));
    }
    Ok(aggregate.total_impairments.cents() as f64 / total.cents() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Loss and capacities are group sums; one waterfall per group.
    Aggregate,
    /// One waterfall per bank, results summed per group.
    PerBank,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioKind {
    Actual { impairment_range: YearRange },
    Stress { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub mode: Mode,
}

impl ScenarioSpec {
    pub fn actual(impairment_range: YearRange) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::Actual { impairment_range },
            mode: Mode::Aggregate,
        }
    }

    pub fn stress(alpha: f64) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::Stress { alpha },
            mode: Mode::Aggregate,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Parses the `actual` / `stress:<alpha>` flag grammar.
    pub fn from_flag(
        flag: &str,
        impairment_range: YearRange,
        mode: Mode,
    ) -> Result<Self, AnalyticsError> {
        let invalid = || AnalyticsError::InvalidScenario(flag.to_string());
        let kind = if flag == "actual" {
            ScenarioKind::Actual { impairment_range }
        } else if let Some(alpha) = flag.strip_prefix("stress:") {
            let alpha: f64 = alpha.parse().map_err(|_| invalid())?;
            if !alpha.is_finite() || alpha < 0.0 {
                return Err(invalid());
            }
            ScenarioKind::Stress { alpha }
        } else {
            return Err(invalid());
        };
        Ok(ScenarioSpec { kind, mode })
    }

    pub fn label(&self) -> String {
        match self.kind {
            ScenarioKind::Actual { .. } => "actual".to_string(),
            ScenarioKind::Stress { alpha } => format!("stress:{alpha}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    pub key: GroupKey,
    pub bank_count: usize,
    /// Base-year liabilities and equity, EUR.
    pub base_liabilities: f64,
    pub total_assets: f64,
    pub result: WaterfallResult,
}

impl GroupResult {
    /// Proportion of base-year liabilities written down.
    pub fn bailed_in_share(&self) -> f64 {
        if self.base_liabilities > 0.0 {
            self.result.total_absorbed() / self.base_liabilities
        } else {
            0.0
        }
    }

    /// Scenario loss relative to the loss of a reference run on the same
    /// group (usually the realized-loss run).
    pub fn loss_multiple_of(&self, reference: &GroupResult) -> Option<f64> {
        (reference.result.loss > 0.0).then(|| self.result.loss / reference.result.loss)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub spec: ScenarioSpec,
    pub groups: Vec<GroupResult>,
    pub warnings: Vec<String>,
}

impl ScenarioOutcome {
    pub fn group(&self, key: &GroupKey) -> Option<&GroupResult> {
        self.groups.iter().find(|g| &g.key == key)
    }
}

fn scenario_loss(
    spec: &ScenarioSpec,
    record_or_group: (&BalanceSheet, Amount),
) -> Result<f64, AnalyticsError> {
    let (balance, net_impairments) = record_or_group;
    Ok(match spec.kind {
        ScenarioKind::Actual { .. } => net_impairments.max(Amount::ZERO).to_eur(),
        ScenarioKind::Stress { alpha } => compute_loss_stress(balance, alpha)?,
    })
}

/// Runs the waterfall for every group of `records`.
///
/// Groups containing a bank without a base-year balance sheet are skipped
/// with a warning.
pub fn run_scenario(
    records: &[BankRecord],
    by: GroupBy,
    base_year: Year,
    spec: &ScenarioSpec,
    ladder: &SeniorityLadder,
) -> Result<ScenarioOutcome, AnalyticsError> {
    let mut warnings = Vec::new();
    let range = match spec.kind {
        ScenarioKind::Actual { impairment_range } => impairment_range,
        ScenarioKind::Stress { alpha } => {
            if !alpha.is_finite() || alpha < 0.0 {
                return Err(AnalyticsError::InvalidScenario(spec.label()));
            }
            if alpha > 1.0 {
                warnings.push(format!("stress alpha {alpha} exceeds total assets"));
            }
            // unused for stress losses
            YearRange::new(base_year, base_year).expect("valid")
        }
    };
    let layout: Vec<(Category, u32)> = ladder
        .bail_inable()
        .map(|c| (c.category, c.rank.expect("ranked")))
        .collect();

    let mut groups = Vec::new();
    for (key, members) in partition(records, by) {
        if let Some(missing) = members.iter().find(|r| r.balance(base_year).is_none()) {
            warnings.push(format!(
                "group {key} skipped: bank {} has no {base_year} balance sheet",
                missing.bank_id
            ));
            continue;
        }
        let agg = aggregate_members(key, &members, base_year, range)?;
        let result = match spec.mode {
            Mode::Aggregate => {
                let loss = scenario_loss(spec, (&agg.balance, agg.total_impairments))?;
                allocate_loss(loss, &bail_in_capacities(&agg.balance, ladder), ladder)?
            }
            Mode::PerBank => {
                let per_bank = members
                    .iter()
                    .map(|r| {
                        let sheet = r.balance(base_year).expect("checked above");
                        let loss = match spec.kind {
                            ScenarioKind::Actual { impairment_range } => {
                                compute_loss_actual(&r.impairments, impairment_range).to_eur()
                            }
                            ScenarioKind::Stress { alpha } => compute_loss_stress(sheet, alpha)?,
                        };
                        Ok(allocate_loss(
                            loss,
                            &bail_in_capacities(sheet, ladder),
                            ladder,
                        )?)
                    })
                    .collect::<Result<Vec<_>, AnalyticsError>>()?;
                WaterfallResult::combine(&layout, &per_bank)
            }
        };
        groups.push(GroupResult {
            key,
            bank_count: agg.bank_count,
            base_liabilities: agg.balance.total_liabilities_and_equity().to_eur(),
            total_assets: agg.balance.total_assets.to_eur(),
            result,
        });
    }
    Ok(ScenarioOutcome {
        spec: *spec,
        groups,
        warnings,
    })
}
