//! The seniority ladder: which funding categories can be bailed in, and in
//! what order they absorb losses.
//!
//! A ladder is read from a small key-value file:
//!
//! ```text
//! # rank 1 absorbs first
//! equity = 1
//! subordinated_debt = 2
//! senior_debt = 3
//! customer_deposits = 4
//! bank_deposits = "exempt"
//! other_liabilities = "exempt"
//! covered_deposit_share = 0.0
//! ```
//!
//! Categories that are not mentioned are exempt.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Category;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LadderError {
    #[error("category {0} is assigned more than once")]
    DuplicateCategory(Category),
    #[error("ranks must be unique and contiguous from 1, got {0:?}")]
    NonContiguousRanks(Vec<u32>),
    #[error("covered_deposit_share must be within [0, 1], got {0}")]
    CoveredShareOutOfRange(f64),
    #[error("ladder has no bail-inable class")]
    Empty,
    #[error("ladder file: {0}")]
    Syntax(String),
}

/// One funding category's place on the ladder. Exempt classes carry no rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiabilityClass {
    pub category: Category,
    pub rank: Option<u32>,
}

impl LiabilityClass {
    pub fn ranked(category: Category, rank: u32) -> Self {
        LiabilityClass {
            category,
            rank: Some(rank),
        }
    }

    pub fn exempt(category: Category) -> Self {
        LiabilityClass {
            category,
            rank: None,
        }
    }

    pub fn name(&self) -> &'static str {
        self.category.as_str()
    }

    pub fn bail_inable(&self) -> bool {
        self.rank.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeniorityLadder {
    /// Bail-inable classes sorted by rank, then exempt classes in category order.
    classes: Vec<LiabilityClass>,
    covered_deposit_share: f64,
}

impl Default for SeniorityLadder {
    fn default() -> Self {
        SeniorityLadder::new(
            vec![
                LiabilityClass::ranked(Category::Equity, 1),
                LiabilityClass::ranked(Category::SubordinatedDebt, 2),
                LiabilityClass::ranked(Category::SeniorDebt, 3),
                LiabilityClass::ranked(Category::CustomerDeposits, 4),
            ],
            0.0,
        )
        .expect("default ladder is valid")
    }
}

impl SeniorityLadder {
    /// Builds a ladder from explicit class assignments. Any category not
    /// listed is added as exempt.
    pub fn new(
        assignments: Vec<LiabilityClass>,
        covered_deposit_share: f64,
    ) -> Result<Self, LadderError> {
        if !(0.0..=1.0).contains(&covered_deposit_share) {
            return Err(LadderError::CoveredShareOutOfRange(covered_deposit_share));
        }
        for (i, a) in assignments.iter().enumerate() {
            if assignments[..i].iter().any(|b| b.category == a.category) {
                return Err(LadderError::DuplicateCategory(a.category));
            }
        }
        let mut ranked: Vec<LiabilityClass> = assignments
            .iter()
            .copied()
            .filter(|c| c.bail_inable())
            .collect();
        ranked.sort_by_key(|c| c.rank);
        let ranks: Vec<u32> = ranked.iter().filter_map(|c| c.rank).collect();
        if ranks.is_empty() {
            return Err(LadderError::Empty);
        }
        if ranks.iter().enumerate().any(|(i, r)| *r as usize != i + 1) {
            return Err(LadderError::NonContiguousRanks(ranks));
        }
        let mut classes = ranked;
        for category in Category::ALL {
            if !classes.iter().any(|c| c.category == category) {
                classes.push(LiabilityClass::exempt(category));
            }
        }
        Ok(SeniorityLadder {
            classes,
            covered_deposit_share,
        })
    }

    pub fn with_covered_deposit_share(mut self, share: f64) -> Result<Self, LadderError> {
        if !(0.0..=1.0).contains(&share) {
            return Err(LadderError::CoveredShareOutOfRange(share));
        }
        self.covered_deposit_share = share;
        Ok(self)
    }

    /// Bail-inable classes, most junior first.
    pub fn bail_inable(&self) -> impl Iterator<Item = &LiabilityClass> {
        self.classes.iter().filter(|c| c.bail_inable())
    }

    pub fn bail_inable_categories(&self) -> Vec<Category> {
        self.bail_inable().map(|c| c.category).collect()
    }

    pub fn exempt(&self) -> impl Iterator<Item = &LiabilityClass> {
        self.classes.iter().filter(|c| !c.bail_inable())
    }

    pub fn classes(&self) -> &[LiabilityClass] {
        &self.classes
    }

    pub fn covered_deposit_share(&self) -> f64 {
        self.covered_deposit_share
    }

    pub fn rank_of(&self, category: Category) -> Option<u32> {
        self.classes
            .iter()
            .find(|c| c.category == category)
            .and_then(|c| c.rank)
    }

    pub fn parse(text: &str) -> Result<Self, LadderError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| LadderError::Syntax(e.message().to_string()))?;
        let mut share = 0.0;
        let mut assignments = Vec::new();
        for (key, value) in &table {
            if key == "covered_deposit_share" {
                share = match value {
                    toml::Value::Float(f) => *f,
                    toml::Value::Integer(i) => *i as f64,
                    other => {
                        return Err(LadderError::Syntax(format!(
                            "covered_deposit_share must be a number, got {other}"
                        )))
                    }
                };
                continue;
            }
            let category: Category = key
                .parse()
                .map_err(|e: crate::model::UnknownCategory| LadderError::Syntax(e.to_string()))?;
            let class = match value {
                toml::Value::Integer(r) if *r >= 1 && *r <= u32::MAX as i64 => {
                    LiabilityClass::ranked(category, *r as u32)
                }
                toml::Value::String(s) if s == "exempt" => LiabilityClass::exempt(category),
                other => {
                    return Err(LadderError::Syntax(format!(
                        "{key}: expected a positive rank or \"exempt\", got {other}"
                    )))
                }
            };
            assignments.push(class);
        }
        SeniorityLadder::new(assignments, share)
    }

    /// Inverse of [`SeniorityLadder::parse`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for class in &self.classes {
            match class.rank {
                Some(r) => writeln!(out, "{} = {}", class.name(), r),
                None => writeln!(out, "{} = \"exempt\"", class.name()),
            }
            .unwrap();
        }
        writeln!(
            out,
            "covered_deposit_share = {:?}",
            self.covered_deposit_share
        )
        .unwrap();
        out
    }
}
