//! Incentives under imperfect information.
//!
//! Utilities are `v + ε`: the regulator knows the systematic part `v` and the
//! observed no-incentive choice, but not the Gumbel term `ε`. The incentive
//! proposed for alternative `j` is the expected utility gap to the observed
//! default conditional on the default being preferred. For i.i.d. Gumbel
//! terms of scale `μ`, with `z = (v_default - v_j) / μ`, that expectation is
//!
//! ```text
//! y = μ (1 + e^z) / e^z · ln(1 + e^z)
//! ```
//!
//! These expected weights go through the same hull and queue as the perfect
//! information case. Proposals are then made one by one, and each individual
//! accepts or refuses based on her realized utilities.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gumbel};
use serde::Serialize;

use crate::concavize::{hull_of, ExtremeProfile};
use crate::error::{Error, Result};
use crate::greedy::{build_step_queue, check_budget, fits};
use crate::model::{AltId, Alternative, ChoiceSet, IndId, Individual, Instance, WeightedOption};

/// Slack on the accept/refuse comparison. Offers are computed from utility
/// differences, so an exactly compensating offer can miss by an ulp.
pub const ACCEPTANCE_TOLERANCE: f64 = 1e-9;

fn check_scale(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidScale(mu))
    }
}

/// Expected incentive for a systematic utility gap `delta_v` (default minus
/// target) under Gumbel noise of scale `mu`.
///
/// Evaluated in a rearranged form that never overflows: for `z >= 0`,
/// `μ (1 + e^-z)(z + ln(1 + e^-z))`; for `z < 0`, `μ (1 + t) ln(1 + t) / t`
/// with `t = e^z`.
pub fn gumbel_incentive(delta_v: f64, mu: f64) -> Result<f64> {
    check_scale(mu)?;
    if !delta_v.is_finite() {
        return Err(Error::Parse {
            line: None,
            message: format!("utility difference must be finite, got {delta_v}"),
        });
    }
    let z = delta_v / mu;
    let y = if z >= 0.0 {
        let t = (-z).exp();
        mu * (1.0 + t) * (z + t.ln_1p())
    } else {
        let t = z.exp();
        if t == 0.0 {
            mu
        } else {
            mu * (1.0 + t) * t.ln_1p() / t
        }
    };
    Ok(y)
}

/// A population with known systematic utilities and one realization of the
/// Gumbel terms.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticInstance {
    deterministic: Instance,
    mu: f64,
    seed: Option<u64>,
    /// Aligned with `deterministic`'s individuals and alternatives.
    noise: Vec<Vec<f64>>,
}

impl StochasticInstance {
    /// Draws `ε ~ Gumbel(0, mu)` i.i.d. from ChaCha8 seeded with `seed`,
    /// individual by individual in id order, alternatives in list order.
    /// Sampling uses the inverse CDF `-μ ln(-ln U)`.
    pub fn new(deterministic: Instance, mu: f64, seed: u64) -> Result<Self> {
        check_scale(mu)?;
        let gumbel = Gumbel::new(0.0, mu).map_err(|_| Error::InvalidScale(mu))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = deterministic
            .individuals()
            .iter()
            .map(|ind| {
                ind.alternatives
                    .iter()
                    .map(|_| gumbel.sample(&mut rng))
                    .collect()
            })
            .collect();
        Ok(StochasticInstance {
            deterministic,
            mu,
            seed: Some(seed),
            noise,
        })
    }

    /// Uses the given realization instead of drawing one.
    pub fn with_noise(deterministic: Instance, mu: f64, noise: Vec<Vec<f64>>) -> Result<Self> {
        check_scale(mu)?;
        let aligned = noise.len() == deterministic.len()
            && deterministic
                .individuals()
                .iter()
                .zip(&noise)
                .all(|(i, n)| i.alternatives.len() == n.len() && n.iter().all(|e| e.is_finite()));
        if !aligned {
            return Err(Error::Parse {
                line: None,
                message: "noise table does not match the instance".into(),
            });
        }
        Ok(StochasticInstance {
            deterministic,
            mu,
            seed: None,
            noise,
        })
    }

    pub fn deterministic(&self) -> &Instance {
        &self.deterministic
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn noise(&self, ind: IndId, alt: AltId) -> Option<f64> {
        let i = self
            .deterministic
            .individuals()
            .binary_search_by_key(&ind, |x| x.id)
            .ok()?;
        let k = self.deterministic.individuals()[i]
            .alternatives
            .iter()
            .position(|a| a.id == alt)?;
        Some(self.noise[i][k])
    }

    fn realized_individual(&self, i: usize) -> Individual {
        let ind = &self.deterministic.individuals()[i];
        Individual {
            id: ind.id,
            alternatives: ind
                .alternatives
                .iter()
                .zip(&self.noise[i])
                .map(|(a, e)| Alternative {
                    utility: a.utility + e,
                    ..a.clone()
                })
                .collect(),
        }
    }

    /// The instance with realized utilities `v + ε`: what a regulator with
    /// perfect information would solve.
    pub fn realized(&self) -> Instance {
        let individuals = (0..self.deterministic.len())
            .map(|i| self.realized_individual(i))
            .collect();
        Instance::with_metadata(individuals, self.deterministic.metadata().clone())
            .expect("adding finite noise keeps the instance valid")
    }
}

/// Expected-incentive weight tables, one per individual. The default is the
/// alternative observed under realized utilities.
pub fn expected_weights(stoch: &StochasticInstance) -> Vec<ChoiceSet> {
    (0..stoch.deterministic.len())
        .map(|i| {
            let det = &stoch.deterministic.individuals()[i];
            let observed = stoch.realized_individual(i).default_alternative();
            let base = det
                .alternative(observed.alt_id)
                .expect("default belongs to the individual");
            let options = det
                .alternatives
                .iter()
                .map(|a| {
                    if a.id == observed.alt_id {
                        WeightedOption {
                            alt_id: a.id,
                            weight: 0.0,
                            social_gain: 0.0,
                        }
                    } else {
                        WeightedOption {
                            alt_id: a.id,
                            weight: gumbel_incentive(base.utility - a.utility, stoch.mu)
                                .expect("scale validated and utilities finite"),
                            social_gain: a.social - base.social,
                        }
                    }
                })
                .collect();
            ChoiceSet {
                ind_id: det.id,
                default_alt: observed.alt_id,
                options,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProposalEvent {
    pub step: usize,
    pub ind_id: IndId,
    pub alt_id: AltId,
    /// Total incentive offered for the alternative (not the increment).
    pub amount: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub budget: f64,
    pub budget_spent: f64,
    pub proposals: usize,
    pub acceptances: usize,
    pub acceptance_rate: f64,
    /// Realized social gain of all accepted shifts (kg CO2).
    pub welfare: f64,
    /// Individuals who ended away from their observed default.
    pub shifted: usize,
    pub log: Vec<ProposalEvent>,
}

/// Sequential propose/observe protocol.
///
/// Steps are proposed in queue order with the step's total expected weight
/// as the offer. An individual accepts iff the target's realized utility plus
/// the offer is at least the realized utility of her current choice plus the
/// incentive she already holds. Accepting an upgrade costs only the
/// difference to what she already holds; a refusal costs nothing and leaves
/// earlier incentives in place. The run stops at the first offer whose net
/// cost could exceed the remaining budget.
pub fn simulate_sequential(stoch: &StochasticInstance, budget: f64) -> Result<SimulationReport> {
    check_budget(budget)?;
    let sets = expected_weights(stoch);
    let profiles: Vec<ExtremeProfile> = sets.iter().map(hull_of).collect();
    let queue = build_step_queue(&profiles);

    let realized: Vec<Individual> = (0..stoch.deterministic.len())
        .map(|i| stoch.realized_individual(i))
        .collect();
    let lookup = |i: usize, alt: AltId| -> &Alternative {
        realized[i]
            .alternative(alt)
            .expect("hull alternatives belong to the individual")
    };

    let mut current: Vec<AltId> = profiles.iter().map(|p| p.default_alt).collect();
    let mut committed = vec![0.0_f64; profiles.len()];
    let mut spent = 0.0;
    let mut welfare = 0.0;
    let mut acceptances = 0;
    let mut log = Vec::new();

    for step in &queue {
        let i = step.ind_index;
        let offer = profiles[i].weight_at(step.rank);
        let net = offer - committed[i];
        if !fits(spent + net, budget) {
            break;
        }
        let target = lookup(i, step.alt_id);
        let held = lookup(i, current[i]);
        let accepted = target.utility + offer + ACCEPTANCE_TOLERANCE >= held.utility + committed[i];
        if accepted {
            spent += net;
            welfare += target.social - held.social;
            committed[i] = offer;
            current[i] = step.alt_id;
            acceptances += 1;
        }
        log.push(ProposalEvent {
            step: log.len(),
            ind_id: step.ind_id,
            alt_id: step.alt_id,
            amount: offer,
            accepted,
        });
    }

    let proposals = log.len();
    Ok(SimulationReport {
        budget,
        budget_spent: spent,
        proposals,
        acceptances,
        acceptance_rate: if proposals == 0 {
            0.0
        } else {
            acceptances as f64 / proposals as f64
        },
        welfare,
        shifted: committed.iter().filter(|&&c| c > 0.0).count(),
        log,
    })
}
