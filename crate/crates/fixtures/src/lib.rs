//! Calibrated fixture datasets.
//!
//! Real bank-level inputs are proprietary, so the fixtures are synthetic
//! banks whose group aggregates reproduce a set of target aggregates:
//! funding shares, impairment totals and write-down fractions. The targets
//! are inverted into balance sheets and losses in two stages.
//!
//! 1. **Status level.** Each crisis-outcome group gets a base-year funding
//!    mix and a loss. Nationalized: equity 2.9% and long-term debt 40.8%,
//!    split 3.0% subordinated / 37.8% senior, with the loss set so equity
//!    and subordinated debt are exhausted and 6.9% of senior debt is
//!    written down. Recapitalized: equity 4.2%, subordinated 3.0%, senior
//!    15.0%, loss 4.0% of assets. Surviving: equity 5.0%; the
//!    subordinated/senior split is solved so a 20%-of-assets loss writes
//!    down exactly 77% of senior debt, and the surviving sizes and deposit
//!    shares are solved so the whole sample hits the all-bank funding
//!    shares. Failed-bank impairments total EUR 535bn, surviving EUR 405bn.
//! 2. **Country level.** Within each status, country cells carry their own
//!    mix and a target write-down (for example Greek recapitalized senior
//!    debt at 77.8%). One balancing cell per status takes whatever is left
//!    so the status totals stay exact.
//!
//! The target all-bank shares (35.2 / 15.7 / 4.5 / 18.9 / 25.5) sum to
//! 99.8%; each is raised by 0.04 points so the calibrated mix sums to one.
//!
//! Cells are then split into banks with seeded random sizes. Every bank in
//! a cell has the cell's funding mix, so per-bank and aggregate runs agree.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use bailin::ingest::{write_dataset, IngestError};
use bailin::{
    Amount, BalanceSheet, BankId, BankRecord, Category, CountryCode, ImpairmentEntry,
    ImpairmentSeries, Status,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0xba11_2006;

pub const BASE_YEAR: i32 = 2006;
const EUR_BN: f64 = 1e9;

/// Funding mix as fractions of total liabilities and equity, in
/// [`Category::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mix(pub [f64; 6]);

impl Mix {
    /// Builds a mix from the first five categories; other liabilities take
    /// the remainder.
    pub const fn new(equity: f64, sub: f64, senior: f64, deposits: f64, bank_deposits: f64) -> Mix {
        Mix([
            equity,
            sub,
            senior,
            deposits,
            bank_deposits,
            1.0 - equity - sub - senior - deposits - bank_deposits,
        ])
    }

    pub fn share(&self, c: Category) -> f64 {
        self.0[c as usize]
    }

    /// Loss that fills every class junior to `class` and writes down
    /// `fraction` of `class` itself, as a fraction of the balance sheet.
    pub fn loss_for_fraction(&self, class: Category, fraction: f64) -> f64 {
        let junior: f64 = Category::ALL[..class as usize]
            .iter()
            .map(|c| self.share(*c))
            .sum();
        junior + fraction * self.share(class)
    }

    /// Capital plus debt: the buffer in front of customer deposits.
    pub fn buffer(&self) -> f64 {
        self.share(Category::Equity)
            + self.share(Category::SubordinatedDebt)
            + self.share(Category::SeniorDebt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// Write down this fraction of the class, all junior classes in full.
    Fraction(Category, f64),
    /// Loss as a fraction of the balance sheet.
    LossRatio(f64),
}

impl Target {
    pub fn loss_ratio(&self, mix: &Mix) -> f64 {
        match *self {
            Target::Fraction(c, f) => mix.loss_for_fraction(c, f),
            Target::LossRatio(r) => r,
        }
    }
}

/// One country x status cell. `size_bn`, `mix` and `target` are `None` for
/// the balancing cell of a status.
#[derive(Debug, Clone, Copy)]
pub struct CellSpec {
    pub country: &'static str,
    pub status: Status,
    pub banks: usize,
    pub size_bn: Option<f64>,
    pub mix: Option<Mix>,
    pub target: Option<Target>,
}

const fn cell(
    country: &'static str,
    status: Status,
    banks: usize,
    size_bn: f64,
    mix: Mix,
    target: Target,
) -> CellSpec {
    CellSpec {
        country,
        status,
        banks,
        size_bn: Some(size_bn),
        mix: Some(mix),
        target: Some(target),
    }
}

const fn balancing(country: &'static str, status: Status, banks: usize) -> CellSpec {
    CellSpec {
        country,
        status,
        banks,
        size_bn: None,
        mix: None,
        target: None,
    }
}

use Category::{Equity as EQ, SeniorDebt as SEN, SubordinatedDebt as SUB};
use Status::{Nationalized as NAT, Recapitalized as REC, Surviving as SUR};

/// Whole-sample base-year shares: equity, long-term debt, customer
/// deposits, bank deposits, other liabilities.
pub const ALL_BANK_SHARES: [f64; 5] = [0.0454, 0.1894, 0.3524, 0.1574, 0.2554];

pub const NATIONALIZED_SIZE_BN: f64 = 800.0;
pub const NATIONALIZED_MIX: Mix = Mix::new(0.029, 0.030, 0.378, 0.30, 0.15);
pub const NATIONALIZED_SENIOR_WRITEDOWN: f64 = 0.069;

pub const RECAPITALIZED_MIX: Mix = Mix::new(0.042, 0.030, 0.150, 0.38, 0.15);
pub const RECAPITALIZED_LOSS_RATIO: f64 = 0.040;

pub const SURVIVING_EQUITY: f64 = 0.050;
pub const SURVIVING_STRESS_ALPHA: f64 = 0.20;
pub const SURVIVING_STRESS_SENIOR_WRITEDOWN: f64 = 0.77;

pub const FAILED_IMPAIRMENTS_BN: f64 = 535.0;
pub const SURVIVING_IMPAIRMENTS_BN: f64 = 405.0;

#[rustfmt::skip]
pub const CELLS: &[CellSpec] = &[
    // nationalized: 15 banks
    cell("GB", NAT, 5, 250.0, Mix::new(0.025, 0.015, 0.40, 0.30, 0.12), Target::Fraction(EQ, 1.0)),
    cell("IE", NAT, 4, 250.0, Mix::new(0.030, 0.030, 0.32, 0.34, 0.18), Target::Fraction(SEN, 0.246)),
    cell("AT", NAT, 2, 60.0, Mix::new(0.035, 0.030, 0.38, 0.25, 0.17), Target::Fraction(SEN, 0.03)),
    cell("PT", NAT, 1, 8.0, Mix::new(0.040, 0.040, 0.22, 0.45, 0.15), Target::Fraction(SUB, 0.5)),
    cell("NL", NAT, 1, 100.0, Mix::new(0.030, 0.010, 0.25, 0.40, 0.15), Target::Fraction(EQ, 1.0)),
    balancing("DE", NAT, 2),
    // recapitalized: 66 banks
    cell("GB", REC, 3, 2000.0, Mix::new(0.035, 0.030, 0.14, 0.36, 0.16), Target::Fraction(SUB, 0.755)),
    cell("IE", REC, 3, 300.0, Mix::new(0.045, 0.025, 0.2527, 0.35, 0.20), Target::LossRatio(0.233)),
    cell("GR", REC, 6, 300.0, Mix::new(0.060, 0.015, 0.13, 0.55, 0.12), Target::Fraction(SEN, 0.778)),
    cell("DE", REC, 8, 1400.0, Mix::new(0.035, 0.030, 0.17, 0.30, 0.18), Target::Fraction(SEN, 0.02)),
    cell("AT", REC, 4, 300.0, Mix::new(0.050, 0.025, 0.15, 0.40, 0.15), Target::Fraction(EQ, 0.9)),
    cell("PT", REC, 3, 150.0, Mix::new(0.050, 0.020, 0.16, 0.50, 0.12), Target::Fraction(EQ, 0.9)),
    cell("BE", REC, 4, 1200.0, Mix::new(0.040, 0.030, 0.15, 0.35, 0.15), Target::Fraction(EQ, 0.5)),
    cell("NL", REC, 4, 1300.0, Mix::new(0.040, 0.030, 0.16, 0.36, 0.14), Target::Fraction(EQ, 0.5)),
    cell("ES", REC, 10, 300.0, Mix::new(0.060, 0.020, 0.14, 0.50, 0.12), Target::Fraction(EQ, 0.6)),
    cell("IT", REC, 5, 200.0, Mix::new(0.060, 0.020, 0.15, 0.45, 0.12), Target::Fraction(EQ, 0.4)),
    cell("DK", REC, 6, 100.0, Mix::new(0.060, 0.020, 0.15, 0.45, 0.15), Target::Fraction(EQ, 0.5)),
    cell("SE", REC, 3, 200.0, Mix::new(0.045, 0.025, 0.16, 0.40, 0.15), Target::Fraction(EQ, 0.3)),
    balancing("FR", REC, 7),
    // surviving: 691 banks
    cell("ES", SUR, 50, 1800.0, Mix::new(0.055, 0.040, 0.15, 0.42, 0.12), Target::LossRatio(0.065)),
    cell("GB", SUR, 40, 2500.0, Mix::new(0.045, 0.035, 0.16, 0.30, 0.17), Target::LossRatio(0.036)),
    cell("IT", SUR, 100, 1500.0, Mix::new(0.060, 0.040, 0.16, 0.40, 0.14), Target::LossRatio(0.045)),
    cell("FR", SUR, 60, 1500.0, Mix::new(0.045, 0.030, 0.13, 0.30, 0.18), Target::LossRatio(0.020)),
    cell("AT", SUR, 50, 200.0, Mix::new(0.055, 0.035, 0.15, 0.35, 0.15), Target::LossRatio(0.030)),
    cell("DK", SUR, 40, 300.0, Mix::new(0.050, 0.030, 0.15, 0.30, 0.18), Target::LossRatio(0.050)),
    cell("SE", SUR, 20, 700.0, Mix::new(0.045, 0.035, 0.17, 0.30, 0.18), Target::LossRatio(0.015)),
    cell("NL", SUR, 20, 400.0, Mix::new(0.045, 0.030, 0.15, 0.35, 0.16), Target::LossRatio(0.020)),
    cell("BE", SUR, 15, 150.0, Mix::new(0.050, 0.030, 0.14, 0.38, 0.15), Target::LossRatio(0.020)),
    cell("PT", SUR, 15, 120.0, Mix::new(0.055, 0.035, 0.15, 0.42, 0.13), Target::LossRatio(0.040)),
    cell("IE", SUR, 5, 40.0, Mix::new(0.060, 0.030, 0.15, 0.40, 0.15), Target::LossRatio(0.050)),
    cell("GR", SUR, 6, 60.0, Mix::new(0.070, 0.030, 0.12, 0.50, 0.12), Target::LossRatio(0.060)),
    cell("LU", SUR, 30, 150.0, Mix::new(0.060, 0.020, 0.13, 0.45, 0.18), Target::LossRatio(0.010)),
    cell("FI", SUR, 10, 100.0, Mix::new(0.060, 0.030, 0.14, 0.40, 0.16), Target::LossRatio(0.015)),
    cell("PL", SUR, 30, 120.0, Mix::new(0.080, 0.020, 0.12, 0.55, 0.10), Target::LossRatio(0.020)),
    balancing("DE", SUR, 200),
];

/// Subsidiaries present in the raw files and removed by the exclusions
/// list: (subsidiary id, parent id, share of the parent's balance sheet).
pub const SUBSIDIARIES: &[(&str, &str, f64)] = &[
    ("GB-R-01-SUB", "GB-R-01", 0.15),
    ("IE-N-02-SUB", "IE-N-02", 0.20),
    ("DE-S-007-SUB", "DE-S-007", 0.30),
];

/// Status-level calibration: size, funding mix and loss ratio.
#[derive(Debug, Clone, Copy)]
pub struct StatusPlan {
    pub status: Status,
    pub size_bn: f64,
    pub mix: Mix,
    pub loss_ratio: f64,
}

impl StatusPlan {
    pub fn loss_bn(&self) -> f64 {
        self.size_bn * self.loss_ratio
    }
}

/// Solves the three status-level plans from the targets.
pub fn status_plans() -> [StatusPlan; 3] {
    let [eq_all, lt_all, dep_all, bank_all, _] = ALL_BANK_SHARES;
    let nat = StatusPlan {
        status: NAT,
        size_bn: NATIONALIZED_SIZE_BN,
        mix: NATIONALIZED_MIX,
        loss_ratio: NATIONALIZED_MIX.loss_for_fraction(SEN, NATIONALIZED_SENIOR_WRITEDOWN),
    };
    let rec_size = (FAILED_IMPAIRMENTS_BN - nat.loss_bn()) / RECAPITALIZED_LOSS_RATIO;
    let rec = StatusPlan {
        status: REC,
        size_bn: rec_size,
        mix: RECAPITALIZED_MIX,
        loss_ratio: RECAPITALIZED_LOSS_RATIO,
    };
    let failed_size = nat.size_bn + rec.size_bn;
    let failed = |c: Category| nat.mix.share(c) * nat.size_bn + rec.mix.share(c) * rec.size_bn;

    // whole-sample equity share fixes the surviving size
    let sur_size = (eq_all * failed_size - failed(EQ)) / (SURVIVING_EQUITY - eq_all);
    let total = failed_size + sur_size;
    let sur_long_term = (lt_all * total - failed(SUB) - failed(SEN)) / sur_size;
    // SURVIVING_STRESS_ALPHA = equity + sub + w * senior, sub + senior = long-term
    let buffer = SURVIVING_STRESS_ALPHA - SURVIVING_EQUITY;
    let sur_senior = (sur_long_term - buffer) / (1.0 - SURVIVING_STRESS_SENIOR_WRITEDOWN);
    let sur_sub = sur_long_term - sur_senior;
    let sur_deposits = (dep_all * total - failed(Category::CustomerDeposits)) / sur_size;
    let sur_bank = (bank_all * total - failed(Category::BankDeposits)) / sur_size;
    let sur = StatusPlan {
        status: SUR,
        size_bn: sur_size,
        mix: Mix::new(
            SURVIVING_EQUITY,
            sur_sub,
            sur_senior,
            sur_deposits,
            sur_bank,
        ),
        loss_ratio: SURVIVING_IMPAIRMENTS_BN / sur_size,
    };
    [nat, rec, sur]
}

/// A fully specified cell after balancing.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub country: &'static str,
    pub status: Status,
    pub banks: usize,
    pub size_bn: f64,
    pub mix: Mix,
    pub loss_ratio: f64,
}

/// Resolves every cell, computing the balancing cell of each status as
/// status totals minus the explicit cells.
pub fn cells() -> Vec<Cell> {
    let plans = status_plans();
    let mut out = Vec::new();
    for plan in plans {
        let specs: Vec<&CellSpec> = CELLS.iter().filter(|c| c.status == plan.status).collect();
        let mut size = plan.size_bn;
        let mut amounts: [f64; 6] = plan.mix.0.map(|s| s * plan.size_bn);
        let mut loss = plan.loss_bn();
        let mut balance_spec = None;
        for spec in specs {
            match (spec.size_bn, spec.mix, spec.target) {
                (Some(s), Some(mix), Some(target)) => {
                    let loss_ratio = target.loss_ratio(&mix);
                    size -= s;
                    loss -= loss_ratio * s;
                    for (a, share) in amounts.iter_mut().zip(mix.0) {
                        *a -= share * s;
                    }
                    out.push(Cell {
                        country: spec.country,
                        status: spec.status,
                        banks: spec.banks,
                        size_bn: s,
                        mix,
                        loss_ratio,
                    });
                }
                _ => balance_spec = Some(spec),
            }
        }
        let spec = balance_spec.expect("each status has a balancing cell");
        out.push(Cell {
            country: spec.country,
            status: spec.status,
            banks: spec.banks,
            size_bn: size,
            mix: Mix(amounts.map(|a| a / size)),
            loss_ratio: loss / size,
        });
    }
    out
}

fn split(total: i64, weights: &[f64]) -> Vec<i64> {
    let sum: f64 = weights.iter().sum();
    let mut parts: Vec<i64> = weights
        .iter()
        .map(|w| (total as f64 * w / sum).floor() as i64)
        .collect();
    let assigned: i64 = parts.iter().sum();
    *parts.last_mut().expect("non-empty") += total - assigned;
    parts
}

const YEAR_WEIGHTS: [(i32, f64); 5] = [
    (2008, 0.22),
    (2009, 0.30),
    (2010, 0.20),
    (2011, 0.16),
    (2012, 0.12),
];

fn impairment_series(loss_cents: i64, recovery: bool) -> ImpairmentSeries {
    let weights: Vec<f64> = YEAR_WEIGHTS.iter().map(|(_, w)| *w).collect();
    let yearly = split(loss_cents, &weights);
    let mut series = ImpairmentSeries::new();
    for ((year, _), y) in YEAR_WEIGHTS.iter().zip(yearly) {
        let loans = (y as f64 * 0.60).floor() as i64;
        let nonrecurring = (y as f64 * 0.15).floor() as i64;
        let mut securities = y - loans - nonrecurring;
        let mut loans = loans;
        if recovery && *year == 2010 {
            // securities write-back offset by extra loan losses
            let shift = (y as f64 * 0.30).floor() as i64;
            securities -= shift;
            loans += shift;
        }
        series.insert(
            *year,
            ImpairmentEntry {
                loan_writedowns: Amount::from_cents(loans),
                nonrecurring_expenses: Amount::from_cents(nonrecurring),
                security_impairments: Amount::from_cents(securities),
            },
        );
    }
    // outside the default window
    for (year, share) in [(2007, 0.03), (2013, 0.02)] {
        let y = (loss_cents as f64 * share).floor() as i64;
        series.insert(
            year,
            ImpairmentEntry {
                loan_writedowns: Amount::from_cents(y),
                ..Default::default()
            },
        );
    }
    series
}

fn sheet(year: i32, parts: [i64; 6]) -> BalanceSheet {
    let mut b = BalanceSheet::zero(year);
    for (c, v) in Category::ALL.iter().zip(parts) {
        *b.amount_mut(*c) = Amount::from_cents(v);
    }
    b.total_assets = b.total_liabilities_and_equity();
    b
}

fn status_letter(s: Status) -> &'static str {
    match s {
        NAT => "N",
        REC => "R",
        SUR => "S",
    }
}

/// Generates the raw fixture records (subsidiaries included) and the
/// exclusions list.
pub fn generate() -> (Vec<BankRecord>, Vec<(BankId, String)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut records = Vec::new();
    for cell in cells() {
        let total_cents = (cell.size_bn * EUR_BN * 100.0).round() as i64;
        let mut cell_parts = [0i64; 6];
        for (i, share) in cell.mix.0.iter().enumerate().take(5) {
            cell_parts[i] = (share * total_cents as f64).round() as i64;
        }
        cell_parts[5] = total_cents - cell_parts[..5].iter().sum::<i64>();
        let loss_cents = (cell.loss_ratio * total_cents as f64).round() as i64;

        let weights: Vec<f64> = (0..cell.banks).map(|_| rng.gen_range(0.2..1.2)).collect();
        let per_category: Vec<Vec<i64>> = cell_parts.iter().map(|p| split(*p, &weights)).collect();
        let losses = split(loss_cents, &weights);
        let width = if cell.banks >= 100 { 3 } else { 2 };
        for (i, loss) in losses.into_iter().enumerate() {
            let code = format!(
                "{}-{}-{:0width$}",
                cell.country,
                status_letter(cell.status),
                i + 1
            );
            let base: [i64; 6] = std::array::from_fn(|c| per_category[c][i]);
            let growth: f64 = rng.gen_range(1.02..1.12);
            let next: [i64; 6] = base.map(|v| (v as f64 * growth).round() as i64);
            records.push(BankRecord {
                bank_id: BankId::new(code.clone()),
                name: format!("{} {} Bank {}", cell.country, cell.status, &code[5..]),
                country: cell.country.parse::<CountryCode>().expect("valid code"),
                status: cell.status,
                balance_sheets: [
                    (BASE_YEAR, sheet(BASE_YEAR, base)),
                    (2007, sheet(2007, next)),
                ]
                .into_iter()
                .collect(),
                impairments: impairment_series(loss, i % 3 == 0),
            });
        }
    }

    let mut exclusions = Vec::new();
    for (sub_id, parent_id, share) in SUBSIDIARIES {
        let parent = records
            .iter()
            .find(|r| r.bank_id.as_str() == *parent_id)
            .expect("parent exists")
            .clone();
        let scale = |a: Amount| Amount::from_cents((a.cents() as f64 * share).round() as i64);
        let balance_sheets: BTreeMap<i32, BalanceSheet> = parent
            .balance_sheets
            .iter()
            .map(|(y, b)| {
                let parts: [i64; 6] =
                    std::array::from_fn(|c| scale(b.amount(Category::ALL[c])).cents());
                (*y, sheet(*y, parts))
            })
            .collect();
        let impairments = parent
            .impairments
            .iter()
            .map(|(y, e)| {
                (
                    y,
                    ImpairmentEntry {
                        loan_writedowns: scale(e.loan_writedowns),
                        nonrecurring_expenses: scale(e.nonrecurring_expenses),
                        security_impairments: scale(e.security_impairments),
                    },
                )
            })
            .collect();
        records.push(BankRecord {
            bank_id: BankId::new(*sub_id),
            name: format!("{} Subsidiary", parent.name),
            country: parent.country,
            status: parent.status,
            balance_sheets,
            impairments,
        });
        exclusions.push((BankId::new(*sub_id), format!("consolidated in {parent_id}")));
    }
    (records, exclusions)
}

pub const MANIFEST: &str = "\
banks_file = \"banks.csv\"
balance_file = \"balance.csv\"
impairments_file = \"impairments.csv\"
exclusions_file = \"exclusions.txt\"
base_year = 2006
impairment_range = [2008, 2012]
";

fn calibration_notes() -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Fixture calibration\n");
    let _ = writeln!(
        s,
        "Generated by `cargo run -p bailin-fixtures --bin calibrate`. Do not edit.\n"
    );
    let _ = writeln!(
        s,
        "Shares are of base-year ({BASE_YEAR}) liabilities and equity. Sizes in EUR bn.\n"
    );
    let _ = writeln!(s, "## Status level\n");
    let _ = writeln!(
        s,
        "| status | size | equity | sub | senior | deposits | bank dep. | other | loss ratio |"
    );
    let _ = writeln!(s, "|---|---:|---:|---:|---:|---:|---:|---:|---:|");
    for p in status_plans() {
        let m = p.mix.0;
        let _ = writeln!(
            s,
            "| {} | {:.1} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} |",
            p.status, p.size_bn, m[0], m[1], m[2], m[3], m[4], m[5], p.loss_ratio
        );
    }
    let _ = writeln!(s, "\n## Country cells\n");
    let _ = writeln!(
        s,
        "| country | status | banks | size | equity | sub | senior | deposits | bank dep. | other | loss ratio |"
    );
    let _ = writeln!(s, "|---|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|");
    for c in cells() {
        let m = c.mix.0;
        let _ = writeln!(
            s,
            "| {} | {} | {} | {:.1} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} | {:.4} |",
            c.country,
            c.status,
            c.banks,
            c.size_bn,
            m[0],
            m[1],
            m[2],
            m[3],
            m[4],
            m[5],
            c.loss_ratio
        );
    }
    let _ = writeln!(s, "\nThe last cell of each status is the balancing cell.");
    s
}

/// Writes the dataset, exclusions list, manifest and calibration notes.
pub fn write_fixtures(dir: &Path) -> Result<(), IngestError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| IngestError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let (records, exclusions) = generate();
    write_dataset(&records, dir)?;
    let mut text = String::from("# Subsidiaries consolidated in a parent; one bank_id per line.\n");
    for (id, note) in exclusions {
        let _ = writeln!(text, "{id}  # {note}");
    }
    let write = |name: &str, body: &str| {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(io_err(&path))
    };
    write("exclusions.txt", &text)?;
    write("manifest.toml", MANIFEST)?;
    write("CALIBRATION.md", &calibration_notes())?;
    Ok(())
}
