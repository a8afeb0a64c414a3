//! Exact reference solvers for small instances.
//!
//! Both work on the original alternative sets, not on the hull, and are only
//! meant as ground truth for checking the greedy certificate and curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::{check_budget, fits};
use crate::model::{AltId, ChoiceSet, IndId, Instance};

/// Largest search space accepted by [`exact_enumerate`].
pub const MAX_ENUMERATION: f64 = 1e7;

/// Slack used when snapping weights and budgets to the DP grid.
const GRID_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    Dp,
    Enumerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Grid units per € for the DP.
    pub weight_scale: u32,
    /// Cap on individuals × budget units held by the DP table.
    pub max_states: usize,
    pub mode: OracleMode,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            weight_scale: 100,
            max_states: 200_000_000,
            mode: OracleMode::Dp,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub welfare: f64,
    /// Incentives paid, in original (unrounded) weights.
    pub spend: f64,
    pub choices: Vec<(IndId, AltId)>,
}

pub fn exact(instance: &Instance, budget: f64, config: &OracleConfig) -> Result<OracleSolution> {
    match config.mode {
        OracleMode::Dp => exact_dp(instance, budget, config),
        OracleMode::Enumerate => exact_enumerate(instance, budget),
    }
}

pub fn exact_enumerate(instance: &Instance, budget: f64) -> Result<OracleSolution> {
    enumerate_choices(&instance.choice_sets(), budget)
}

pub fn exact_dp(instance: &Instance, budget: f64, config: &OracleConfig) -> Result<OracleSolution> {
    dp_choices(&instance.choice_sets(), budget, config)
}

/// Exhaustive search over one option per individual.
pub fn enumerate_choices(sets: &[ChoiceSet], budget: f64) -> Result<OracleSolution> {
    check_budget(budget)?;
    let space: f64 = sets.iter().map(|s| s.options.len() as f64).product();
    if space > MAX_ENUMERATION {
        return Err(Error::OracleCap(format!(
            "enumeration space {space:.3e} exceeds {MAX_ENUMERATION:.0e}"
        )));
    }
    struct Search<'a> {
        sets: &'a [ChoiceSet],
        budget: f64,
        current: Vec<usize>,
        best: Vec<usize>,
        best_welfare: f64,
    }
    impl Search<'_> {
        fn go(&mut self, depth: usize, spend: f64, welfare: f64) {
            if depth == self.sets.len() {
                if welfare > self.best_welfare {
                    self.best_welfare = welfare;
                    self.best.clone_from(&self.current);
                }
                return;
            }
            for (k, o) in self.sets[depth].options.iter().enumerate() {
                let s = spend + o.weight;
                // weights are non-negative, so an over-budget prefix stays infeasible
                if !fits(s, self.budget) {
                    continue;
                }
                self.current[depth] = k;
                self.go(depth + 1, s, welfare + o.social_gain);
            }
        }
    }

    let defaults: Vec<usize> = sets
        .iter()
        .map(|s| {
            s.options
                .iter()
                .position(|o| o.alt_id == s.default_alt)
                .expect("choice set contains its default")
        })
        .collect();
    let mut search = Search {
        sets,
        budget,
        current: defaults.clone(),
        best: defaults,
        best_welfare: 0.0,
    };
    search.go(0, 0.0, 0.0);
    Ok(solution(sets, &search.best))
}

fn solution(sets: &[ChoiceSet], picks: &[usize]) -> OracleSolution {
    let mut welfare = 0.0;
    let mut spend = 0.0;
    let choices = sets
        .iter()
        .zip(picks)
        .map(|(s, &k)| {
            let o = &s.options[k];
            welfare += o.social_gain;
            spend += o.weight;
            (s.ind_id, o.alt_id)
        })
        .collect();
    OracleSolution {
        welfare,
        spend,
        choices,
    }
}

fn grid_weight(w: f64, scale: f64) -> usize {
    // round up so the reported allocation stays feasible unrounded
    (w * scale - GRID_SLACK).ceil().max(0.0) as usize
}

fn grid_budget(b: f64, scale: f64) -> usize {
    (b * scale + GRID_SLACK).floor() as usize
}

/// Per-individual DP table: `best[c]` is the best welfare with grid cost at
/// most `c`; `pick[i][c]` records the option taken by individual `i`.
struct DpTable {
    best: Vec<f64>,
    pick: Vec<Vec<u16>>,
    scaled: Vec<Vec<usize>>,
}

fn run_dp(sets: &[ChoiceSet], units: usize, config: &OracleConfig) -> Result<DpTable> {
    if config.weight_scale == 0 {
        return Err(Error::OracleCap("weight_scale must be at least 1".into()));
    }
    let states = (units + 1).saturating_mul(sets.len().max(1));
    if states > config.max_states {
        return Err(Error::OracleCap(format!(
            "DP needs {states} states, cap is {}",
            config.max_states
        )));
    }
    if sets.iter().any(|s| s.options.len() > u16::MAX as usize) {
        return Err(Error::OracleCap("too many alternatives for the DP".into()));
    }
    let scale = config.weight_scale as f64;
    let scaled: Vec<Vec<usize>> = sets
        .iter()
        .map(|s| s.options.iter().map(|o| grid_weight(o.weight, scale)).collect())
        .collect();

    let mut best = vec![0.0_f64; units + 1];
    let mut next = vec![0.0_f64; units + 1];
    let mut pick = Vec::with_capacity(sets.len());
    for (set, weights) in sets.iter().zip(&scaled) {
        let mut row = vec![0_u16; units + 1];
        for c in 0..=units {
            let mut value = f64::NEG_INFINITY;
            let mut arg = 0;
            for (k, (o, &w)) in set.options.iter().zip(weights).enumerate() {
                if w <= c {
                    let v = best[c - w] + o.social_gain;
                    if v > value {
                        value = v;
                        arg = k;
                    }
                }
            }
            next[c] = value;
            row[c] = arg as u16;
        }
        std::mem::swap(&mut best, &mut next);
        pick.push(row);
    }
    Ok(DpTable { best, pick, scaled })
}

/// Multiple-choice knapsack DP over budget grid units.
pub fn dp_choices(sets: &[ChoiceSet], budget: f64, config: &OracleConfig) -> Result<OracleSolution> {
    check_budget(budget)?;
    let units = grid_budget(budget, config.weight_scale as f64);
    let table = run_dp(sets, units, config)?;
    let mut c = units;
    let mut picks = vec![0; sets.len()];
    for i in (0..sets.len()).rev() {
        let k = table.pick[i][c] as usize;
        picks[i] = k;
        c -= table.scaled[i][k];
    }
    Ok(solution(sets, &picks))
}

/// Exact welfare for every grid budget `0, 1/scale, 2/scale, …, max_budget`.
pub fn exact_curve(
    instance: &Instance,
    max_budget: f64,
    config: &OracleConfig,
) -> Result<Vec<f64>> {
    check_budget(max_budget)?;
    let units = grid_budget(max_budget, config.weight_scale as f64);
    Ok(run_dp(&instance.choice_sets(), units, config)?.best)
}
