//! Loss measurement and the sequential loss-allocation waterfall.
//!
//! Losses run down the ladder from rank 1: each class absorbs up to its full
//! capacity before the next class is touched. Within a class holders share
//! pro rata, so one write-down fraction per class describes the outcome.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ladder::SeniorityLadder;
use crate::model::{BalanceSheet, Category, ImpairmentSeries, YearRange};
use crate::money::Amount;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaterfallError {
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },
    #[error("capacities do not match ladder: expected {expected:?}, got {found:?}")]
    LadderMismatch {
        expected: Vec<Category>,
        found: Vec<Category>,
    },
}

fn validation(field: impl Into<String>, reason: impl Into<String>) -> WaterfallError {
    WaterfallError::Validation {
        field: field.into(),
        reason: reason.into(),
    }
}

fn check_amount(field: impl Into<String>, value: f64) -> Result<(), WaterfallError> {
    if !value.is_finite() {
        return Err(validation(field, format!("must be finite, got {value}")));
    }
    if value < 0.0 {
        return Err(validation(
            field,
            format!("must be non-negative, got {value}"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassAllocation {
    pub category: Category,
    pub rank: u32,
    pub capacity: f64,
    pub absorbed: f64,
    /// `absorbed / capacity`, or 0 for an empty class.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterfallResult {
    pub loss: f64,
    /// One entry per bail-inable class, most junior first.
    pub classes: Vec<ClassAllocation>,
    /// Loss beyond the ladder's total capacity.
    pub residual: f64,
    /// Covered-deposit share of the amount absorbed by customer deposits.
    pub dgs_shortfall: f64,
}

fn fraction(absorbed: f64, capacity: f64) -> f64 {
    if capacity > 0.0 {
        (absorbed / capacity).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

impl WaterfallResult {
    pub fn class(&self, category: Category) -> Option<&ClassAllocation> {
        self.classes.iter().find(|c| c.category == category)
    }

    pub fn absorbed(&self, category: Category) -> f64 {
        self.class(category).map_or(0.0, |c| c.absorbed)
    }

    pub fn fraction(&self, category: Category) -> f64 {
        self.class(category).map_or(0.0, |c| c.fraction)
    }

    pub fn total_absorbed(&self) -> f64 {
        self.classes.iter().map(|c| c.absorbed).sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.classes.iter().map(|c| c.capacity).sum()
    }

    /// Sums results that share a class layout (per-bank runs rolled up to a
    /// group). Fractions are recomputed from the summed amounts.
    pub fn combine<'a, I>(classes: &[(Category, u32)], results: I) -> WaterfallResult
    where
        I: IntoIterator<Item = &'a WaterfallResult>,
    {
        let mut out = WaterfallResult {
            loss: 0.0,
            classes: classes
                .iter()
                .map(|(category, rank)| ClassAllocation {
                    category: *category,
                    rank: *rank,
                    capacity: 0.0,
                    absorbed: 0.0,
                    fraction: 0.0,
                })
                .collect(),
            residual: 0.0,
            dgs_shortfall: 0.0,
        };
        for r in results {
            out.loss += r.loss;
            out.residual += r.residual;
            out.dgs_shortfall += r.dgs_shortfall;
            for (acc, c) in out.classes.iter_mut().zip(&r.classes) {
                debug_assert_eq!(acc.category, c.category);
                acc.capacity += c.capacity;
                acc.absorbed += c.absorbed;
            }
        }
        for c in &mut out.classes {
            c.fraction = fraction(c.absorbed, c.capacity);
        }
        out
    }
}

/// Runs `loss` down the ladder.
///
/// `capacities` must list exactly the ladder's bail-inable classes in rank
/// order. Class `i` absorbs `clamp(loss - sum(capacity[..i]), 0, capacity[i])`.
pub fn allocate_loss(
    loss: f64,
    capacities: &[(Category, f64)],
    ladder: &SeniorityLadder,
) -> Result<WaterfallResult, WaterfallError> {
    check_amount("loss", loss)?;
    let expected = ladder.bail_inable_categories();
    let found: Vec<Category> = capacities.iter().map(|(c, _)| *c).collect();
    if expected != found {
        return Err(WaterfallError::LadderMismatch { expected, found });
    }
    for (category, cap) in capacities {
        check_amount(format!("capacity[{category}]"), *cap)?;
    }

    let mut junior = 0.0;
    let mut classes = Vec::with_capacity(capacities.len());
    for (class, (category, capacity)) in ladder.bail_inable().zip(capacities) {
        let absorbed = (loss - junior).clamp(0.0, *capacity);
        classes.push(ClassAllocation {
            category: *category,
            rank: class.rank.expect("bail-inable class has a rank"),
            capacity: *capacity,
            absorbed,
            fraction: fraction(absorbed, *capacity),
        });
        junior += capacity;
    }
    let residual = (loss - junior).max(0.0);
    let dgs_shortfall = ladder.covered_deposit_share()
        * classes
            .iter()
            .find(|c| c.category == Category::CustomerDeposits)
            .map_or(0.0, |c| c.absorbed);

    Ok(WaterfallResult {
        loss,
        classes,
        residual,
        dgs_shortfall,
    })
}

/// Realized impairments over `range`, floored at zero. Years missing from
/// the series contribute nothing.
pub fn compute_loss_actual(series: &ImpairmentSeries, range: YearRange) -> Amount {
    series.net_total(range).max(Amount::ZERO)
}

/// Stress loss as a fraction of total assets. Fractions above 1 are
/// accepted; callers decide whether to warn.
pub fn compute_loss_stress(balance: &BalanceSheet, alpha: f64) -> Result<f64, WaterfallError> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(validation(
            "alpha",
            format!("must be finite and non-negative, got {alpha}"),
        ));
    }
    Ok(alpha * balance.total_assets.to_eur())
}

/// Bail-inable capacity per ladder class, in rank order. Exempt categories
/// are left out entirely.
pub fn bail_in_capacities(
    balance: &BalanceSheet,
    ladder: &SeniorityLadder,
) -> Vec<(Category, f64)> {
    ladder
        .bail_inable()
        .map(|c| (c.category, balance.amount(c.category).to_eur()))
        .collect()
}
