//! Bank-level domain types: funding categories, balance sheets, impairment
//! series and the per-bank record that ties them together.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::money::Amount;

pub type Year = i32;

/// Liability-side funding category of a balance sheet.
///
/// Declaration order is the column order of the balance-sheet file and the
/// default junior-to-senior order of the bail-inable categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Equity,
    SubordinatedDebt,
    SeniorDebt,
    CustomerDeposits,
    BankDeposits,
    OtherLiabilities,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Equity,
        Category::SubordinatedDebt,
        Category::SeniorDebt,
        Category::CustomerDeposits,
        Category::BankDeposits,
        Category::OtherLiabilities,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Equity => "equity",
            Category::SubordinatedDebt => "subordinated_debt",
            Category::SeniorDebt => "senior_debt",
            Category::CustomerDeposits => "customer_deposits",
            Category::BankDeposits => "bank_deposits",
            Category::OtherLiabilities => "other_liabilities",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown funding category {0:?}")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

/// Crisis outcome grouping. Ordering is the report ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Nationalized,
    Recapitalized,
    Surviving,
}

impl Status {
    pub const ALL: [Status; 3] = [
        Status::Nationalized,
        Status::Recapitalized,
        Status::Surviving,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Nationalized => "nationalized",
            Status::Recapitalized => "recapitalized",
            Status::Surviving => "surviving",
        }
    }

    /// Nationalized and recapitalized banks both required state capital.
    pub fn is_failed(self) -> bool {
        !matches!(self, Status::Surviving)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid status {0:?}")]
pub struct InvalidStatus(pub String);

impl FromStr for Status {
    type Err = InvalidStatus;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Status::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| InvalidStatus(s.to_string()))
    }
}

/// ISO-3166 alpha-2 country code (two upper-case ASCII letters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CountryCode([u8; 2]);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid country code {0:?}")]
pub struct InvalidCountry(pub String);

impl CountryCode {
    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("ascii")
    }
}

impl FromStr for CountryCode {
    type Err = InvalidCountry;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.as_bytes() {
            [a, b] if a.is_ascii_uppercase() && b.is_ascii_uppercase() => Ok(CountryCode([*a, *b])),
            _ => Err(InvalidCountry(s.to_string())),
        }
    }
}

impl TryFrom<String> for CountryCode {
    type Error = InvalidCountry;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<CountryCode> for String {
    fn from(c: CountryCode) -> String {
        c.as_str().to_string()
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BankId(pub String);

impl BankId {
    pub fn new(id: impl Into<String>) -> Self {
        BankId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BankId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Inclusive calendar-year range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YearRange {
    start: Year,
    end: Year,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("year range start {start} is after end {end}")]
pub struct InvalidYearRange {
    pub start: Year,
    pub end: Year,
}

impl YearRange {
    pub fn new(start: Year, end: Year) -> Result<Self, InvalidYearRange> {
        if start > end {
            return Err(InvalidYearRange { start, end });
        }
        Ok(YearRange { start, end })
    }

    pub fn start(&self) -> Year {
        self.start
    }

    pub fn end(&self) -> Year {
        self.end
    }

    pub fn contains(&self, year: Year) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl FromStr for YearRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("expected START:END, got {s:?}"))?;
        let start = a
            .trim()
            .parse()
            .map_err(|_| format!("invalid year {a:?}"))?;
        let end = b
            .trim()
            .parse()
            .map_err(|_| format!("invalid year {b:?}"))?;
        YearRange::new(start, end).map_err(|e| e.to_string())
    }
}

/// Liability side of one bank-year, in EUR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceSheet {
    pub year: Year,
    pub equity: Amount,
    pub subordinated_debt: Amount,
    pub senior_debt: Amount,
    pub customer_deposits: Amount,
    pub bank_deposits: Amount,
    pub other_liabilities: Amount,
    pub total_assets: Amount,
}

impl BalanceSheet {
    pub fn zero(year: Year) -> Self {
        BalanceSheet {
            year,
            equity: Amount::ZERO,
            subordinated_debt: Amount::ZERO,
            senior_debt: Amount::ZERO,
            customer_deposits: Amount::ZERO,
            bank_deposits: Amount::ZERO,
            other_liabilities: Amount::ZERO,
            total_assets: Amount::ZERO,
        }
    }

    pub fn amount(&self, category: Category) -> Amount {
        match category {
            Category::Equity => self.equity,
            Category::SubordinatedDebt => self.subordinated_debt,
            Category::SeniorDebt => self.senior_debt,
            Category::CustomerDeposits => self.customer_deposits,
            Category::BankDeposits => self.bank_deposits,
            Category::OtherLiabilities => self.other_liabilities,
        }
    }

    pub fn amount_mut(&mut self, category: Category) -> &mut Amount {
        match category {
            Category::Equity => &mut self.equity,
            Category::SubordinatedDebt => &mut self.subordinated_debt,
            Category::SeniorDebt => &mut self.senior_debt,
            Category::CustomerDeposits => &mut self.customer_deposits,
            Category::BankDeposits => &mut self.bank_deposits,
            Category::OtherLiabilities => &mut self.other_liabilities,
        }
    }

    /// Sum of the six funding categories.
    pub fn total_liabilities_and_equity(&self) -> Amount {
        Category::ALL.iter().map(|c| self.amount(*c)).sum()
    }

    pub fn long_term_debt(&self) -> Amount {
        self.subordinated_debt + self.senior_debt
    }

    /// First negative field, if any.
    pub fn negative_field(&self) -> Option<&'static str> {
        Category::ALL
            .iter()
            .find(|c| self.amount(**c).is_negative())
            .map(|c| c.as_str())
            .or_else(|| self.total_assets.is_negative().then_some("total_assets"))
    }

    /// Component-wise sum, keeping `self.year`.
    pub fn accumulate(&mut self, other: &BalanceSheet) {
        for c in Category::ALL {
            *self.amount_mut(c) += other.amount(c);
        }
        self.total_assets += other.total_assets;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpairmentEntry {
    pub loan_writedowns: Amount,
    pub nonrecurring_expenses: Amount,
    pub security_impairments: Amount,
}

impl ImpairmentEntry {
    pub fn total(&self) -> Amount {
        self.loan_writedowns + self.nonrecurring_expenses + self.security_impairments
    }
}

/// Yearly impairment charges; components may be negative (recoveries).
/// Keyed by year, so years are unique by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpairmentSeries {
    entries: BTreeMap<Year, ImpairmentEntry>,
}

impl ImpairmentSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces the entry for `year`, returning the previous one.
    pub fn insert(&mut self, year: Year, entry: ImpairmentEntry) -> Option<ImpairmentEntry> {
        self.entries.insert(year, entry)
    }

    pub fn get(&self, year: Year) -> Option<&ImpairmentEntry> {
        self.entries.get(&year)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Year, &ImpairmentEntry)> {
        self.entries.iter().map(|(y, e)| (*y, e))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Signed sum of all components over `range`.
    pub fn net_total(&self, range: YearRange) -> Amount {
        self.entries
            .range(range.start()..=range.end())
            .map(|(_, e)| e.total())
            .sum()
    }
}

impl FromIterator<(Year, ImpairmentEntry)> for ImpairmentSeries {
    fn from_iter<I: IntoIterator<Item = (Year, ImpairmentEntry)>>(iter: I) -> Self {
        ImpairmentSeries {
            entries: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankRecord {
    pub bank_id: BankId,
    pub name: String,
    pub country: CountryCode,
    pub status: Status,
    pub balance_sheets: BTreeMap<Year, BalanceSheet>,
    pub impairments: ImpairmentSeries,
}

impl BankRecord {
    pub fn balance(&self, year: Year) -> Option<&BalanceSheet> {
        self.balance_sheets.get(&year)
    }
}
