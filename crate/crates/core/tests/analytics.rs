mod common;

use bailin::analytics::partition;
use bailin::ingest::load_dataset;
use bailin::{
    aggregate, funding_mix, loss_ratio, run_scenario, Amount, BalanceSheet, BankId, BankRecord,
    Category, DatasetManifest, GroupBy, GroupKey, ImpairmentEntry, Mode, ScenarioSpec,
    SeniorityLadder, Status, YearRange,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BASE: i32 = 2006;
const GROUPINGS: [GroupBy; 4] = [
    GroupBy::None,
    GroupBy::Country,
    GroupBy::Status,
    GroupBy::Both,
];

fn range() -> YearRange {
    YearRange::new(2008, 2012).unwrap()
}

fn record() -> impl Strategy<Value = BankRecord> {
    (
        0u32..10_000,
        prop::sample::select(vec!["DE", "FR", "IE", "GR"]),
        prop::sample::select(Status::ALL.to_vec()),
        prop::collection::vec(0i64..1_000_000_000, 6),
        prop::collection::vec((2006i32..2014, -1_000_000i64..50_000_000), 0..6),
    )
        .prop_map(|(id, country, status, parts, imps)| {
            let mut sheet = BalanceSheet::zero(BASE);
            for (c, v) in Category::ALL.iter().zip(&parts) {
                *sheet.amount_mut(*c) = Amount::from_cents(*v + 1);
            }
            sheet.total_assets = sheet.total_liabilities_and_equity();
            BankRecord {
                bank_id: BankId::new(format!("{country}{id:05}")),
                name: String::new(),
                country: country.parse().unwrap(),
                status,
                balance_sheets: [(BASE, sheet)].into_iter().collect(),
                impairments: imps
                    .into_iter()
                    .map(|(y, v)| {
                        (
                            y,
                            ImpairmentEntry {
                                loan_writedowns: Amount::from_cents(v),
                                ..Default::default()
                            },
                        )
                    })
                    .collect(),
            }
        })
}

/// Records with unique ids.
fn records() -> impl Strategy<Value = Vec<BankRecord>> {
    prop::collection::vec(record(), 1..40).prop_map(|mut v| {
        v.sort_by(|a, b| a.bank_id.cmp(&b.bank_id));
        v.dedup_by(|a, b| a.bank_id == b.bank_id);
        v
    })
}

fn shuffled(records: &[BankRecord], seed: u64) -> Vec<BankRecord> {
    let mut v = records.to_vec();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}

fn fixtures() -> Vec<BankRecord> {
    let m = DatasetManifest::from_file(&common::fixture_manifest()).unwrap();
    load_dataset(&m).unwrap().0
}

fn scenarios() -> [ScenarioSpec; 3] {
    [
        ScenarioSpec::actual(range()),
        ScenarioSpec::stress(0.1),
        ScenarioSpec::stress(0.2),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partition_covers_every_bank_once(records in records()) {
        for by in GROUPINGS {
            let groups = partition(&records, by);
            let mut seen: Vec<&BankId> = groups.values().flatten().map(|r| &r.bank_id).collect();
            prop_assert_eq!(seen.len(), records.len());
            seen.sort();
            seen.dedup();
            prop_assert_eq!(seen.len(), records.len());
            for (key, members) in &groups {
                prop_assert!(!members.is_empty());
                for m in members {
                    prop_assert_eq!(GroupKey::of(m, by), *key);
                }
            }
        }
    }

    #[test]
    fn group_totals_add_up_to_the_whole(records in records()) {
        let whole = &aggregate(&records, GroupBy::None, BASE, range()).unwrap()[0];
        for by in GROUPINGS {
            let groups = aggregate(&records, by, BASE, range()).unwrap();
            let impairments: Amount = groups.iter().map(|g| g.total_impairments).sum();
            prop_assert_eq!(impairments, whole.total_impairments);
            for c in Category::ALL {
                let sum: Amount = groups.iter().map(|g| g.balance.amount(c)).sum();
                prop_assert_eq!(sum, whole.balance.amount(c));
            }
            prop_assert_eq!(groups.iter().map(|g| g.bank_count).sum::<usize>(), records.len());
        }
    }

    #[test]
    fn results_do_not_depend_on_input_order(records in records(), seed in any::<u64>()) {
        let other = shuffled(&records, seed);
        let ladder = SeniorityLadder::default();
        for by in GROUPINGS {
            prop_assert_eq!(
                aggregate(&records, by, BASE, range()).unwrap(),
                aggregate(&other, by, BASE, range()).unwrap()
            );
            for spec in scenarios() {
                for mode in [Mode::Aggregate, Mode::PerBank] {
                    let spec = spec.with_mode(mode);
                    prop_assert_eq!(
                        run_scenario(&records, by, BASE, &spec, &ladder).unwrap(),
                        run_scenario(&other, by, BASE, &spec, &ladder).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn larger_stress_writes_down_at_least_as_much(
        records in records(),
        a in 0.0..0.5f64,
        b in 0.0..0.5f64,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let ladder = SeniorityLadder::default();
        for mode in [Mode::Aggregate, Mode::PerBank] {
            let low = run_scenario(&records, GroupBy::Both, BASE, &ScenarioSpec::stress(lo).with_mode(mode), &ladder).unwrap();
            let high = run_scenario(&records, GroupBy::Both, BASE, &ScenarioSpec::stress(hi).with_mode(mode), &ladder).unwrap();
            for (x, y) in low.groups.iter().zip(&high.groups) {
                prop_assert_eq!(x.key, y.key);
                for (cx, cy) in x.result.classes.iter().zip(&y.result.classes) {
                    prop_assert!(cx.absorbed <= cy.absorbed, "{} {} > {}", cx.category, cx.absorbed, cy.absorbed);
                }
                prop_assert!(x.result.residual <= y.result.residual);
            }
        }
    }

    #[test]
    fn per_bank_mode_conserves_the_summed_loss(records in records()) {
        let ladder = SeniorityLadder::default();
        for spec in scenarios() {
            let out = run_scenario(&records, GroupBy::Status, BASE, &spec.with_mode(Mode::PerBank), &ladder).unwrap();
            for g in &out.groups {
                let r = &g.result;
                let err = (r.total_absorbed() + r.residual - r.loss).abs();
                prop_assert!(err <= 1e-9 * r.loss.max(1.0), "{err}");
                for c in &r.classes {
                    prop_assert!(c.absorbed <= c.capacity * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn per_bank_losses_dominate_aggregate_losses(records in records()) {
        // netting recoveries of one bank against another's losses can only
        // shrink the aggregate loss
        let ladder = SeniorityLadder::default();
        let spec = ScenarioSpec::actual(range());
        let agg = run_scenario(&records, GroupBy::Both, BASE, &spec, &ladder).unwrap();
        let per = run_scenario(&records, GroupBy::Both, BASE, &spec.with_mode(Mode::PerBank), &ladder).unwrap();
        for (a, p) in agg.groups.iter().zip(&per.groups) {
            prop_assert!(a.result.loss <= p.result.loss * (1.0 + 1e-12) + 1e-9);
        }
    }

    #[test]
    fn loss_ratio_matches_division(records in records()) {
        for g in aggregate(&records, GroupBy::Both, BASE, range()).unwrap() {
            let members: Vec<&BankRecord> = records.iter().filter(|r| GroupKey::of(r, GroupBy::Both) == g.key).collect();
            let mut losses: i128 = 0;
            let mut size: i128 = 0;
            for r in members {
                for (y, e) in r.impairments.iter() {
                    if (2008..=2012).contains(&y) {
                        losses += (e.loan_writedowns.cents() + e.nonrecurring_expenses.cents()
                            + e.security_impairments.cents()) as i128;
                    }
                }
                let b = r.balance(BASE).unwrap();
                size += Category::ALL.iter().map(|c| b.amount(*c).cents() as i128).sum::<i128>();
            }
            prop_assert_eq!(loss_ratio(&g).unwrap(), losses as f64 / size as f64);
            let mix = funding_mix(&g).unwrap();
            let total: f64 = Category::ALL.iter().map(|c| mix.share(*c)).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn per_bank_matches_aggregate_on_fixtures() {
    // every bank in a fixture cell has the same funding mix and positive
    // losses, so the two modes agree cell by cell
    let records = fixtures();
    let ladder = SeniorityLadder::default();
    for spec in scenarios() {
        let agg = run_scenario(&records, GroupBy::Both, BASE, &spec, &ladder).unwrap();
        let per = run_scenario(
            &records,
            GroupBy::Both,
            BASE,
            &spec.with_mode(Mode::PerBank),
            &ladder,
        )
        .unwrap();
        assert_eq!(agg.groups.len(), per.groups.len());
        for (a, p) in agg.groups.iter().zip(&per.groups) {
            assert!(
                (a.result.loss - p.result.loss).abs() <= 1.0,
                "{} {}",
                a.key,
                spec.label()
            );
            for (ca, cp) in a.result.classes.iter().zip(&p.result.classes) {
                assert!(
                    (ca.fraction - cp.fraction).abs() < 1e-4,
                    "{} {} {}: {} vs {}",
                    a.key,
                    spec.label(),
                    ca.category,
                    ca.fraction,
                    cp.fraction
                );
            }
        }
    }
}

#[test]
fn groups_are_ordered_country_then_status() {
    let out = run_scenario(
        &fixtures(),
        GroupBy::Both,
        BASE,
        &ScenarioSpec::actual(range()),
        &SeniorityLadder::default(),
    )
    .unwrap();
    let keys: Vec<(String, Status)> = out
        .groups
        .iter()
        .map(|g| (g.key.country_label().to_string(), g.key.status.unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(keys[0], ("AT".to_string(), Status::Nationalized));
}

#[test]
fn missing_base_year_skips_group_with_warning() {
    let mut records = fixtures();
    let victim = records
        .iter_mut()
        .find(|r| r.bank_id.as_str() == "PT-N-01")
        .unwrap();
    victim.balance_sheets.remove(&BASE);
    let out = run_scenario(
        &records,
        GroupBy::Both,
        BASE,
        &ScenarioSpec::actual(range()),
        &SeniorityLadder::default(),
    )
    .unwrap();
    assert!(out.warnings.iter().any(|w| w.contains("PT-N-01")));
    assert!(out
        .groups
        .iter()
        .all(|g| g.key.to_string() != "PT/nationalized"));
    assert!(aggregate(&records, GroupBy::Both, BASE, range()).is_err());
}

#[test]
fn stress_beyond_total_assets_warns() {
    let out = run_scenario(
        &fixtures(),
        GroupBy::Status,
        BASE,
        &ScenarioSpec::stress(1.5),
        &SeniorityLadder::default(),
    )
    .unwrap();
    assert!(!out.warnings.is_empty());
    assert!(out.groups.iter().all(|g| g.result.residual > 0.0));
}

#[test]
fn scenario_flags() {
    let r = range();
    assert!(ScenarioSpec::from_flag("actual", r, Mode::Aggregate).is_ok());
    let s = ScenarioSpec::from_flag("stress:0.2", r, Mode::PerBank).unwrap();
    assert_eq!(s.label(), "stress:0.2");
    assert_eq!(s.mode, Mode::PerBank);
    for bad in [
        "stress",
        "stress:",
        "stress:-0.1",
        "stress:nan",
        "stress:inf",
        "actual:1",
        "",
    ] {
        assert!(
            ScenarioSpec::from_flag(bad, r, Mode::Aggregate).is_err(),
            "{bad}"
        );
    }
    for (s, by) in [
        ("none", GroupBy::None),
        ("both", GroupBy::Both),
        ("country", GroupBy::Country),
    ] {
        assert_eq!(s.parse::<GroupBy>().unwrap(), by);
    }
    assert!("region".parse::<GroupBy>().is_err());
}
