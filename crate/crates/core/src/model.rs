//! Population data model.
//!
//! Every individual owns an ordered list of alternatives, each carrying an
//! intrinsic utility (money units) and a social indicator (kg of CO2 avoided
//! per day). The alternative an individual picks without any incentive is the
//! *default*; the incentive weight of any other alternative is the utility gap
//! that must be compensated to make the individual weakly prefer it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AltId(pub u32);

impl fmt::Display for IndId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for AltId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alternative {
    pub id: AltId,
    /// Intrinsic utility in the absence of any incentive (€).
    pub utility: f64,
    /// Social indicator (kg CO2 avoided per day).
    pub social: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Alternative {
    pub fn new(id: u32, utility: f64, social: f64) -> Self {
        Alternative {
            id: AltId(id),
            utility,
            social,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: IndId,
    pub alternatives: Vec<Alternative>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefaultChoice {
    pub ind_id: IndId,
    pub alt_id: AltId,
    pub default_utility: f64,
    pub default_social: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IncentiveWeight {
    pub ind_id: IndId,
    pub alt_id: AltId,
    /// Minimum incentive (€) making the alternative weakly preferred to the default.
    pub weight: f64,
}

/// One alternative expressed relative to the individual's default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedOption {
    pub alt_id: AltId,
    pub weight: f64,
    pub social_gain: f64,
}

/// The (weight, social gain) table of one individual, which is all the
/// solvers need. Perfect and imperfect information differ only in how the
/// weights are obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceSet {
    pub ind_id: IndId,
    pub default_alt: AltId,
    /// All alternatives, the default included with weight 0 and gain 0.
    pub options: Vec<WeightedOption>,
}

impl Individual {
    pub fn new(id: u64, alternatives: Vec<Alternative>) -> Self {
        Individual {
            id: IndId(id),
            alternatives,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alternatives.is_empty() {
            return Err(Error::EmptyIndividual(self.id));
        }
        let mut seen = HashSet::with_capacity(self.alternatives.len());
        for alt in &self.alternatives {
            if !alt.utility.is_finite() {
                return Err(Error::NonFinite {
                    field: "utility",
                    ind: self.id,
                    alt: alt.id,
                    line: None,
                });
            }
            if !alt.social.is_finite() {
                return Err(Error::NonFinite {
                    field: "social",
                    ind: self.id,
                    alt: alt.id,
                    line: None,
                });
            }
            if !seen.insert(alt.id) {
                return Err(Error::DuplicateAlternative {
                    ind: self.id,
                    alt: alt.id,
                    line: None,
                });
            }
        }
        Ok(())
    }

    pub fn alternative(&self, alt: AltId) -> Option<&Alternative> {
        self.alternatives.iter().find(|a| a.id == alt)
    }

    /// Utility maximizer; ties go to the larger social indicator, then to the
    /// lowest alternative id.
    pub fn default_alternative(&self) -> DefaultChoice {
        let best = self
            .alternatives
            .iter()
            .reduce(|best, a| {
                // finite after validation, so partial_cmp is total here
                let better = a
                    .utility
                    .partial_cmp(&best.utility)
                    .unwrap_or(Ordering::Equal)
                    .then(a.social.partial_cmp(&best.social).unwrap_or(Ordering::Equal))
                    .then(best.id.cmp(&a.id));
                if better.is_gt() {
                    a
                } else {
                    best
                }
            })
            .expect("validated individual has at least one alternative");
        DefaultChoice {
            ind_id: self.id,
            alt_id: best.id,
            default_utility: best.utility,
            default_social: best.social,
        }
    }

    /// `u(default) - u(j)` for every alternative, in list order.
    pub fn incentive_weights(&self) -> Vec<IncentiveWeight> {
        let default = self.default_alternative();
        self.alternatives
            .iter()
            .map(|a| IncentiveWeight {
                ind_id: self.id,
                alt_id: a.id,
                weight: if a.id == default.alt_id {
                    0.0
                } else {
                    default.default_utility - a.utility
                },
            })
            .collect()
    }

    pub fn choice_set(&self) -> ChoiceSet {
        let default = self.default_alternative();
        let options = self
            .alternatives
            .iter()
            .map(|a| {
                if a.id == default.alt_id {
                    WeightedOption {
                        alt_id: a.id,
                        weight: 0.0,
                        social_gain: 0.0,
                    }
                } else {
                    WeightedOption {
                        alt_id: a.id,
                        weight: default.default_utility - a.utility,
                        social_gain: a.social - default.default_social,
                    }
                }
            })
            .collect();
        ChoiceSet {
            ind_id: self.id,
            default_alt: default.alt_id,
            options,
        }
    }
}

/// A validated population. Individuals are kept sorted by id.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    individuals: Vec<Individual>,
    metadata: BTreeMap<String, String>,
}

impl Instance {
    pub fn new(individuals: Vec<Individual>) -> Result<Self> {
        Self::with_metadata(individuals, BTreeMap::new())
    }

    pub fn with_metadata(
        mut individuals: Vec<Individual>,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self> {
        for ind in &individuals {
            ind.validate()?;
        }
        individuals.sort_by_key(|i| i.id);
        if let Some(w) = individuals.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateIndividual(w[0].id));
        }
        Ok(Instance {
            individuals,
            metadata,
        })
    }

    pub fn individuals(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn num_alternatives(&self) -> usize {
        self.individuals.iter().map(|i| i.alternatives.len()).sum()
    }

    pub fn individual(&self, id: IndId) -> Option<&Individual> {
        self.individuals
            .binary_search_by_key(&id, |i| i.id)
            .ok()
            .map(|k| &self.individuals[k])
    }

    pub fn choice_sets(&self) -> Vec<ChoiceSet> {
        self.individuals.iter().map(Individual::choice_set).collect()
    }
}
