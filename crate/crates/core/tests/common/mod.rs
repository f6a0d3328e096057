//! Shared oracles and generators for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use bailin::ladder::SeniorityLadder;
use bailin::{allocate_loss, Category, LiabilityClass, WaterfallResult};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_manifest() -> PathBuf {
    fixtures_dir().join("manifest.toml")
}

/// Walks the ladder subtracting `min(remaining, capacity)` from the loss.
pub fn oracle(loss: f64, capacities: &[f64]) -> (Vec<f64>, f64) {
    let mut remaining = loss;
    let mut absorbed = Vec::with_capacity(capacities.len());
    for &cap in capacities {
        let take = if remaining < cap { remaining } else { cap };
        absorbed.push(take);
        remaining -= take;
    }
    (absorbed, remaining)
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub ladder: SeniorityLadder,
    pub capacities: Vec<(Category, f64)>,
    pub loss: f64,
}

impl Instance {
    pub fn run(&self) -> WaterfallResult {
        allocate_loss(self.loss, &self.capacities, &self.ladder).expect("valid instance")
    }

    pub fn with_loss(&self, loss: f64) -> Instance {
        Instance {
            loss,
            ..self.clone()
        }
    }

    pub fn scaled(&self, k: f64) -> Instance {
        Instance {
            ladder: self.ladder.clone(),
            capacities: self.capacities.iter().map(|(c, v)| (*c, v * k)).collect(),
            loss: self.loss * k,
        }
    }

    pub fn total_capacity(&self) -> f64 {
        self.capacities.iter().map(|(_, v)| v).sum()
    }
}

/// Random ladder over a random subset of categories in random order.
pub fn random_ladder<R: Rng>(rng: &mut R) -> SeniorityLadder {
    let mut cats = Category::ALL.to_vec();
    cats.shuffle(rng);
    let n = rng.gen_range(1..=cats.len());
    let classes = cats[..n]
        .iter()
        .enumerate()
        .map(|(i, c)| LiabilityClass::ranked(*c, i as u32 + 1))
        .collect();
    SeniorityLadder::new(classes, rng.gen_range(0.0..=1.0)).expect("valid ladder")
}

/// Whole-euro capacities and loss, so every intermediate sum is an exact
/// integer in f64. About one capacity in eight is zero.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let ladder = random_ladder(rng);
    let capacities: Vec<(Category, f64)> = ladder
        .bail_inable_categories()
        .into_iter()
        .map(|c| {
            let v = if rng.gen_ratio(1, 8) {
                0.0
            } else {
                rng.gen_range(0..=100_000_000_000u64) as f64
            };
            (c, v)
        })
        .collect();
    let total: f64 = capacities.iter().map(|(_, v)| v).sum();
    let loss = rng.gen_range(0..=(total * 1.5) as u64 + 1) as f64;
    Instance {
        ladder,
        capacities,
        loss,
    }
}

/// Same shape with arbitrary real-valued amounts.
pub fn random_real_instance<R: Rng>(rng: &mut R) -> Instance {
    let mut inst = random_instance(rng);
    for (_, v) in &mut inst.capacities {
        *v *= rng.gen_range(0.5..1.5);
    }
    inst.loss = rng.gen_range(0.0..=inst.total_capacity() * 1.5 + 1.0);
    inst
}

/// 1e-6 EUR per million EUR of loss.
pub fn conservation_tolerance(loss: f64) -> f64 {
    1e-12 * loss.max(1.0)
}

pub fn check_conservation(inst: &Instance) -> Result<(), String> {
    let r = inst.run();
    let total = r.total_absorbed() + r.residual;
    let err = (total - inst.loss).abs();
    if err <= conservation_tolerance(inst.loss) {
        Ok(())
    } else {
        Err(format!(
            "absorbed + residual = {total}, loss = {}",
            inst.loss
        ))
    }
}

pub fn check_bounds(inst: &Instance) -> Result<(), String> {
    let r = inst.run();
    for c in &r.classes {
        if !(0.0 <= c.absorbed && c.absorbed <= c.capacity) {
            return Err(format!(
                "{}: absorbed {} of {}",
                c.category, c.absorbed, c.capacity
            ));
        }
        if !(0.0..=1.0).contains(&c.fraction) {
            return Err(format!("{}: fraction {}", c.category, c.fraction));
        }
    }
    if r.residual < 0.0 {
        return Err(format!("negative residual {}", r.residual));
    }
    Ok(())
}

pub fn check_seniority(inst: &Instance) -> Result<(), String> {
    let r = inst.run();
    for (i, c) in r.classes.iter().enumerate() {
        if c.absorbed > 0.0 {
            if let Some(j) = r.classes[..i].iter().find(|j| j.absorbed != j.capacity) {
                return Err(format!(
                    "{} hit while {} not exhausted",
                    c.category, j.category
                ));
            }
        }
    }
    if r.residual > 0.0 && r.classes.iter().any(|c| c.absorbed != c.capacity) {
        return Err("residual while a class has room".into());
    }
    Ok(())
}

pub fn check_monotonic(inst: &Instance, other_loss: f64) -> Result<(), String> {
    let (lo, hi) = if other_loss < inst.loss {
        (other_loss, inst.loss)
    } else {
        (inst.loss, other_loss)
    };
    let a = inst.with_loss(lo).run();
    let b = inst.with_loss(hi).run();
    for (x, y) in a.classes.iter().zip(&b.classes) {
        if x.absorbed > y.absorbed {
            return Err(format!(
                "{} fell from {} to {}",
                x.category, x.absorbed, y.absorbed
            ));
        }
    }
    if a.residual > b.residual {
        return Err("residual fell".into());
    }
    Ok(())
}

/// Exact for powers of two, relative 1e-9 otherwise.
pub fn check_scale(inst: &Instance, k: f64) -> Result<(), String> {
    let exact = k.log2().fract() == 0.0;
    let a = inst.run();
    let b = inst.scaled(k).run();
    for (x, y) in a.classes.iter().zip(&b.classes) {
        let ok = if exact {
            x.fraction == y.fraction && x.absorbed * k == y.absorbed
        } else {
            (x.fraction - y.fraction).abs() <= 1e-9
                && (x.absorbed * k - y.absorbed).abs() <= 1e-9 * (y.capacity.max(1.0))
        };
        if !ok {
            return Err(format!("{} changed under scaling by {k}", x.category));
        }
    }
    Ok(())
}

pub fn check_oracle(inst: &Instance) -> Result<(), String> {
    let r = inst.run();
    let caps: Vec<f64> = inst.capacities.iter().map(|(_, v)| *v).collect();
    let (absorbed, residual) = oracle(inst.loss, &caps);
    let got: Vec<f64> = r.classes.iter().map(|c| c.absorbed).collect();
    if got == absorbed && r.residual == residual {
        Ok(())
    } else {
        Err(format!(
            "engine {got:?} / {} vs oracle {absorbed:?} / {residual}",
            r.residual
        ))
    }
}
