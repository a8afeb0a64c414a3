//! Greedy solver for the budget-constrained welfare problem.
//!
//! All hull steps of all individuals are sorted by decreasing incremental
//! efficiency. The solver walks that queue and takes each step while it fits
//! in the budget. The first step that does not fit is the *split item*;
//! scanning stops there. The split item's efficiency times the unused budget
//! bounds the distance to the exact optimum.
//!
//! Every inclusion adds one breakpoint to the welfare curve, so a single run
//! with budget `B` also answers every smaller budget. A finished result can be
//! resumed with a larger budget and yields exactly what a fresh run would.

use std::cmp::Ordering;

use rayon::slice::ParallelSliceMut;
use sha2::{Digest, Sha256};

use crate::concavize::ExtremeProfile;
use crate::error::{Error, Result};
use crate::model::{AltId, IndId};

/// Slack (€) allowed when testing whether a spend fits a budget. Absorbs
/// rounding in sums of weights obtained by utility subtraction.
pub const BUDGET_TOLERANCE: f64 = 1e-9;

/// Absolute tolerance of [`certify`].
pub const CERTIFY_TOLERANCE: f64 = 1e-9;

pub(crate) fn fits(spend: f64, budget: f64) -> bool {
    spend <= budget + BUDGET_TOLERANCE
}

pub(crate) fn check_budget(budget: f64) -> Result<()> {
    if budget.is_finite() && budget >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeBudget(budget))
    }
}

/// One hull step of one individual, as queued by the solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    /// Position of the individual in the profile slice.
    pub ind_index: usize,
    pub ind_id: IndId,
    pub alt_id: AltId,
    /// Position of the step in its profile (1 = first step after the default).
    pub rank: usize,
    pub incr_weight: f64,
    pub incr_social: f64,
    pub incr_eff: f64,
}

fn queue_order(a: &Step, b: &Step) -> Ordering {
    b.incr_eff
        .total_cmp(&a.incr_eff)
        .then(a.ind_id.cmp(&b.ind_id))
        .then(a.rank.cmp(&b.rank))
}

/// All non-default hull steps by decreasing incremental efficiency, ties by
/// individual id. Steps of one individual keep their profile order because
/// efficiency strictly decreases along a profile.
pub fn build_step_queue(profiles: &[ExtremeProfile]) -> Vec<Step> {
    let mut queue: Vec<Step> = profiles
        .iter()
        .enumerate()
        .flat_map(|(ind_index, p)| {
            assert!(
                p.steps.windows(2).all(|w| w[1].incr_eff < w[0].incr_eff),
                "profile of individual {} is not concave",
                p.ind_id
            );
            p.steps.iter().enumerate().map(move |(k, s)| Step {
                ind_index,
                ind_id: p.ind_id,
                alt_id: s.alt_id,
                rank: k + 1,
                incr_weight: s.incr_weight,
                incr_social: s.incr_social,
                incr_eff: s.incr_eff,
            })
        })
        .collect();
    queue.par_sort_unstable_by(queue_order);
    queue
}

/// Hash of everything in the profiles the solver depends on.
pub fn profiles_fingerprint(profiles: &[ExtremeProfile]) -> u64 {
    let mut h = Sha256::new();
    h.update((profiles.len() as u64).to_le_bytes());
    for p in profiles {
        h.update(p.ind_id.0.to_le_bytes());
        h.update(p.default_alt.0.to_le_bytes());
        h.update((p.steps.len() as u64).to_le_bytes());
        for s in &p.steps {
            h.update(s.alt_id.0.to_le_bytes());
            h.update(s.weight.to_bits().to_le_bytes());
            h.update(s.social_gain.to_bits().to_le_bytes());
        }
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub ind_id: IndId,
    pub alt_id: AltId,
    /// Incentive paid (€); zero when the default is kept.
    pub incentive: f64,
    pub social_gain: f64,
}

/// One chosen alternative per individual, in profile order.
#[derive(Clone, Debug, PartialEq)]
pub struct Allocation {
    choices: Vec<Choice>,
}

impl Allocation {
    pub fn choices(&self) -> &[Choice] {
        &self.choices
    }

    pub fn get(&self, ind: IndId) -> Option<&Choice> {
        self.choices.iter().find(|c| c.ind_id == ind)
    }

    pub fn total_incentive(&self) -> f64 {
        self.choices.iter().map(|c| c.incentive).sum()
    }

    pub fn total_social_gain(&self) -> f64 {
        self.choices.iter().map(|c| c.social_gain).sum()
    }

    /// Individuals moved away from their default.
    pub fn shifted(&self) -> usize {
        self.choices.iter().filter(|c| c.incentive > 0.0).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    pub spend: f64,
    pub welfare: f64,
}

/// Piecewise-constant, right-continuous welfare curve over `[0, domain_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WelfareCurve {
    breakpoints: Vec<Breakpoint>,
    /// Efficiency of the first step not taken after each breakpoint.
    next_eff: Vec<Option<f64>>,
    domain_max: f64,
}

impl WelfareCurve {
    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    fn governing(&self, y: f64) -> usize {
        // breakpoints[0].spend == 0, so the partition point is >= 1 for y >= 0
        self.breakpoints
            .partition_point(|b| fits(b.spend, y))
            .saturating_sub(1)
    }

    /// Welfare of the last breakpoint whose spend is at most `y`.
    pub fn value_at(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        self.breakpoints[self.governing(y)].welfare
    }

    /// Greedy welfare plus the gap bound a run with budget `y` would certify.
    /// Only meaningful for `y <= domain_max`.
    pub fn upper_bound_at(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        let k = self.governing(y);
        let b = self.breakpoints[k];
        let slack = (y - b.spend).max(0.0);
        b.welfare + self.next_eff[k].map_or(0.0, |eff| eff * slack)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitItem {
    pub ind_id: IndId,
    pub alt_id: AltId,
    pub incr_weight: f64,
    pub incr_eff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyResult {
    pub allocation: Allocation,
    pub curve: WelfareCurve,
    pub welfare: f64,
    pub budget_given: f64,
    pub budget_used: f64,
    pub split: Option<SplitItem>,
    /// `split.incr_eff * (budget_given - budget_used)`, zero without split item.
    pub gap_bound: f64,
    pub iterations: usize,
    /// Index of the next queue entry to examine.
    pub resume_cursor: usize,
    fingerprint: u64,
    ranks: Vec<u32>,
}

impl GreedyResult {
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Upper bound on the exact optimum at `budget_given`.
    pub fn upper_bound(&self) -> f64 {
        self.welfare + self.gap_bound
    }
}

/// A prepared queue over a fixed set of profiles. Building the queue is the
/// expensive part; solving, truncating and resuming all reuse it.
#[derive(Clone, Debug)]
pub struct GreedySolver<'a> {
    profiles: &'a [ExtremeProfile],
    queue: Vec<Step>,
    fingerprint: u64,
}

struct RunState {
    ranks: Vec<u32>,
    spend: f64,
    welfare: f64,
    cursor: usize,
    iterations: usize,
    breakpoints: Vec<Breakpoint>,
    next_eff: Vec<Option<f64>>,
}

impl<'a> GreedySolver<'a> {
    pub fn new(profiles: &'a [ExtremeProfile]) -> Self {
        GreedySolver {
            profiles,
            queue: build_step_queue(profiles),
            fingerprint: profiles_fingerprint(profiles),
        }
    }

    pub fn queue(&self) -> &[Step] {
        &self.queue
    }

    pub fn profiles(&self) -> &[ExtremeProfile] {
        self.profiles
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Sum of all incremental weights: the spend that moves everyone to their
    /// last extreme.
    pub fn total_weight(&self) -> f64 {
        self.queue.iter().map(|s| s.incr_weight).sum()
    }

    fn initial_state(&self) -> RunState {
        RunState {
            ranks: vec![0; self.profiles.len()],
            spend: 0.0,
            welfare: 0.0,
            cursor: 0,
            iterations: 0,
            breakpoints: vec![Breakpoint {
                spend: 0.0,
                welfare: 0.0,
            }],
            next_eff: vec![self.queue.first().map(|s| s.incr_eff)],
        }
    }

    pub fn solve(&self, budget: f64) -> Result<GreedyResult> {
        check_budget(budget)?;
        Ok(self.run(self.initial_state(), budget, None))
    }

    /// Like [`solve`](Self::solve) but stops after `max_iterations` inclusions.
    /// A truncated run is reported as a run with budget equal to what it spent.
    pub fn stop_anytime(&self, budget: f64, max_iterations: usize) -> Result<GreedyResult> {
        check_budget(budget)?;
        Ok(self.run(self.initial_state(), budget, Some(max_iterations)))
    }

    /// Continue `prev` with a larger budget.
    pub fn resume(&self, prev: &GreedyResult, new_budget: f64) -> Result<GreedyResult> {
        check_budget(new_budget)?;
        if prev.fingerprint != self.fingerprint || prev.ranks.len() != self.profiles.len() {
            return Err(Error::FingerprintMismatch);
        }
        if new_budget <= prev.budget_given {
            return Err(Error::BudgetNotIncreased {
                old: prev.budget_given,
                new: new_budget,
            });
        }
        let state = RunState {
            ranks: prev.ranks.clone(),
            spend: prev.budget_used,
            welfare: prev.welfare,
            cursor: prev.resume_cursor,
            iterations: prev.iterations,
            breakpoints: prev.curve.breakpoints.clone(),
            next_eff: prev.curve.next_eff.clone(),
        };
        Ok(self.run(state, new_budget, None))
    }

    pub fn curve(&self, budget: f64) -> Result<WelfareCurve> {
        Ok(self.solve(budget)?.curve)
    }

    fn run(&self, mut st: RunState, budget: f64, max_iterations: Option<usize>) -> GreedyResult {
        let mut split = None;
        let mut truncated = false;
        while let Some(step) = self.queue.get(st.cursor) {
            if !fits(st.spend + step.incr_weight, budget) {
                split = Some(SplitItem {
                    ind_id: step.ind_id,
                    alt_id: step.alt_id,
                    incr_weight: step.incr_weight,
                    incr_eff: step.incr_eff,
                });
                break;
            }
            if max_iterations.is_some_and(|m| st.iterations >= m) {
                truncated = true;
                break;
            }
            debug_assert_eq!(st.ranks[step.ind_index] as usize + 1, step.rank);
            st.ranks[step.ind_index] = step.rank as u32;
            st.spend += step.incr_weight;
            st.welfare += step.incr_social;
            st.iterations += 1;
            st.cursor += 1;
            st.breakpoints.push(Breakpoint {
                spend: st.spend,
                welfare: st.welfare,
            });
            st.next_eff
                .push(self.queue.get(st.cursor).map(|s| s.incr_eff));
        }

        let budget_given = if truncated { st.spend } else { budget };
        if truncated {
            let step = &self.queue[st.cursor];
            split = Some(SplitItem {
                ind_id: step.ind_id,
                alt_id: step.alt_id,
                incr_weight: step.incr_weight,
                incr_eff: step.incr_eff,
            });
        }
        let gap_bound = split.map_or(0.0, |s| s.incr_eff * (budget_given - st.spend).max(0.0));

        let choices = self
            .profiles
            .iter()
            .zip(&st.ranks)
            .map(|(p, &r)| Choice {
                ind_id: p.ind_id,
                alt_id: p.alt_at(r as usize),
                incentive: p.weight_at(r as usize),
                social_gain: p.social_gain_at(r as usize),
            })
            .collect();

        GreedyResult {
            allocation: Allocation { choices },
            curve: WelfareCurve {
                breakpoints: st.breakpoints,
                next_eff: st.next_eff,
                domain_max: budget_given,
            },
            welfare: st.welfare,
            budget_given,
            budget_used: st.spend,
            split,
            gap_bound,
            iterations: st.iterations,
            resume_cursor: st.cursor,
            fingerprint: self.fingerprint,
            ranks: st.ranks,
        }
    }
}

pub fn solve(profiles: &[ExtremeProfile], budget: f64) -> Result<GreedyResult> {
    GreedySolver::new(profiles).solve(budget)
}

pub fn curve(profiles: &[ExtremeProfile], budget: f64) -> Result<WelfareCurve> {
    GreedySolver::new(profiles).curve(budget)
}

pub fn resume(
    profiles: &[ExtremeProfile],
    prev: &GreedyResult,
    new_budget: f64,
) -> Result<GreedyResult> {
    GreedySolver::new(profiles).resume(prev, new_budget)
}

pub fn stop_anytime(
    profiles: &[ExtremeProfile],
    budget: f64,
    max_iterations: usize,
) -> Result<GreedyResult> {
    GreedySolver::new(profiles).stop_anytime(budget, max_iterations)
}

/// True iff the exact optimum is within the result's certified gap.
pub fn certify(result: &GreedyResult, exact_welfare: f64) -> bool {
    exact_welfare - result.welfare <= result.gap_bound + CERTIFY_TOLERANCE
}
