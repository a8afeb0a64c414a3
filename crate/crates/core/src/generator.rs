//! Synthetic commuter populations for mode-choice case studies.
//!
//! Each individual gets a commute distance, an individual-specific set of
//! available modes and, per mode, a systematic utility
//! `constant + per_km * distance` with coefficients drawn uniformly from the
//! configured ranges. The social indicator of a mode is the CO2 it avoids on
//! the round trip compared to the most-emitting mode available to that
//! individual.
//!
//! The default coefficients and emission factors are plausible placeholders
//! for a French département, not calibrated values.

use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gumbel, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AltId, Alternative, IndId, Individual, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Range { lo, hi }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        // always consume one draw so the stream layout does not depend on widths
        let u: f64 = rng.gen();
        self.lo + (self.hi - self.lo) * u
    }

    fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub name: String,
    /// Tailpipe emissions per passenger-km (g CO2/km).
    pub emission_g_per_km: f64,
    /// Probability that the mode is in an individual's choice set.
    pub availability: f64,
    /// Mode is unavailable beyond this commute distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_distance_km: Option<f64>,
    /// Alternative-specific constant (€/day).
    pub constant: Range,
    /// Distance sensitivity (€/km of one-way commute).
    pub per_km: Range,
}

/// Log-normal one-way commute distance, clipped to `[min_km, max_km]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceDistribution {
    pub median_km: f64,
    pub sigma: f64,
    pub min_km: f64,
    pub max_km: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub individuals: usize,
    /// Gumbel scale of the unobserved utility term (€).
    pub mu: f64,
    /// Add a realized Gumbel draw to every utility. Leave off to obtain the
    /// deterministic part only.
    #[serde(default)]
    pub add_noise: bool,
    pub distance: DistanceDistribution,
    pub modes: Vec<ModeSpec>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        let mode = |name: &str, g: f64, avail: f64, max: Option<f64>, c: Range, k: Range| ModeSpec {
            name: name.into(),
            emission_g_per_km: g,
            availability: avail,
            max_distance_km: max,
            constant: c,
            per_km: k,
        };
        GeneratorConfig {
            individuals: 1000,
            mu: 1.0,
            add_noise: false,
            distance: DistanceDistribution {
                median_km: 8.0,
                sigma: 0.8,
                min_km: 0.5,
                max_km: 80.0,
            },
            modes: vec![
                mode("car", 193.0, 0.85, None, Range::new(0.0, 0.0), Range::new(-0.30, -0.20)),
                mode(
                    "public transit",
                    30.0,
                    0.7,
                    None,
                    Range::new(-3.0, -1.0),
                    Range::new(-0.25, -0.10),
                ),
                mode("walk", 0.0, 1.0, Some(5.0), Range::new(-1.0, 0.0), Range::new(-1.6, -1.0)),
                mode("bike", 0.0, 0.6, Some(15.0), Range::new(-2.0, -0.5), Range::new(-0.6, -0.35)),
                mode(
                    "motorcycle",
                    165.0,
                    0.15,
                    None,
                    Range::new(-1.5, -0.5),
                    Range::new(-0.25, -0.15),
                ),
            ],
        }
    }
}

impl GeneratorConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: GeneratorConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.modes.is_empty() {
            return bad("mode set is empty".into());
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return bad(format!("gumbel scale mu must be positive, got {}", self.mu));
        }
        let d = &self.distance;
        if !(d.median_km.is_finite() && d.median_km > 0.0) {
            return bad(format!("distance median must be positive, got {}", d.median_km));
        }
        if !(d.sigma.is_finite() && d.sigma >= 0.0) {
            return bad(format!("distance sigma must be non-negative, got {}", d.sigma));
        }
        if !(d.min_km.is_finite() && d.max_km.is_finite() && 0.0 <= d.min_km && d.min_km <= d.max_km)
        {
            return bad(format!("invalid distance bounds [{}, {}]", d.min_km, d.max_km));
        }
        for m in &self.modes {
            if !(m.emission_g_per_km.is_finite() && m.emission_g_per_km >= 0.0) {
                return bad(format!("mode '{}': emission factor must be >= 0", m.name));
            }
            if !(0.0..=1.0).contains(&m.availability) {
                return bad(format!("mode '{}': availability must lie in [0, 1]", m.name));
            }
            if !m.constant.is_valid() || !m.per_km.is_valid() {
                return bad(format!("mode '{}': invalid coefficient range", m.name));
            }
            if m.max_distance_km.is_some_and(|x| !(x.is_finite() && x > 0.0)) {
                return bad(format!("mode '{}': max distance must be positive", m.name));
            }
        }
        Ok(())
    }
}

/// Deterministic in `(config, seed)`. Alternative ids are mode indices in
/// `config.modes`, so the same id means the same mode for everyone.
///
/// An individual drawing no available mode falls back to the first mode
/// without a distance limit (or the first mode if all have one).
pub fn synthesize_population(config: &GeneratorConfig, seed: u64) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // separate stream so switching noise on leaves everything else unchanged
    let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
    noise_rng.set_stream(1);
    let d = &config.distance;
    let distance_law = LogNormal::new(d.median_km.ln(), d.sigma)
        .map_err(|e| Error::InvalidConfig(format!("distance distribution: {e}")))?;
    let noise = Gumbel::new(0.0, config.mu)
        .map_err(|e| Error::InvalidConfig(format!("gumbel: {e}")))?;
    let fallback = config
        .modes
        .iter()
        .position(|m| m.max_distance_km.is_none())
        .unwrap_or(0);

    let mut individuals = Vec::with_capacity(config.individuals);
    for i in 0..config.individuals {
        let distance = distance_law.sample(&mut rng).clamp(d.min_km, d.max_km);

        // (mode index, systematic utility)
        let mut drawn: Vec<(usize, f64)> = Vec::with_capacity(config.modes.len());
        for (k, m) in config.modes.iter().enumerate() {
            let u: f64 = rng.gen();
            let constant = m.constant.sample(&mut rng);
            let per_km = m.per_km.sample(&mut rng);
            let in_range = m.max_distance_km.is_none_or(|x| distance <= x);
            if u < m.availability && in_range {
                drawn.push((k, constant + per_km * distance));
            }
        }
        if drawn.is_empty() {
            let m = &config.modes[fallback];
            drawn.push((fallback, m.constant.lo + m.per_km.lo * distance));
        }

        let max_emission = drawn
            .iter()
            .map(|&(k, _)| config.modes[k].emission_g_per_km)
            .fold(0.0, f64::max);
        let alternatives = drawn
            .into_iter()
            .map(|(k, v)| {
                let m = &config.modes[k];
                let utility = if config.add_noise {
                    v + noise.sample(&mut noise_rng)
                } else {
                    v
                };
                // round trip, g -> kg
                let social = (max_emission - m.emission_g_per_km) / 1000.0 * distance * 2.0;
                Alternative {
                    id: AltId(k as u32),
                    utility,
                    social,
                    label: Some(m.name.clone()),
                }
            })
            .collect();
        individuals.push(Individual {
            id: IndId(i as u64),
            alternatives,
        });
    }

    let metadata = [
        ("source".to_string(), "synthetic".to_string()),
        ("seed".to_string(), seed.to_string()),
        ("utility_unit".to_string(), "EUR/day".to_string()),
        ("social_unit".to_string(), "kg CO2 avoided/day".to_string()),
    ]
    .into_iter()
    .collect();
    Instance::with_metadata(individuals, metadata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_instance_csv;

    fn small() -> GeneratorConfig {
        GeneratorConfig {
            individuals: 2,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic_bytes() {
        let dump = |seed| {
            let mut out = Vec::new();
            write_instance_csv(&synthesize_population(&small(), seed).unwrap(), &mut out).unwrap();
            out
        };
        assert_eq!(dump(42), dump(42));
        assert_ne!(dump(42), dump(43));
    }

    #[test]
    fn social_is_round_trip_saving_against_worst_mode() {
        let config = GeneratorConfig {
            individuals: 3,
            distance: DistanceDistribution {
                median_km: 10.0,
                sigma: 0.0,
                min_km: 0.0,
                max_km: 100.0,
            },
            modes: vec![
                ModeSpec {
                    name: "car".into(),
                    emission_g_per_km: 200.0,
                    availability: 1.0,
                    max_distance_km: None,
                    constant: Range::new(0.0, 0.0),
                    per_km: Range::new(-0.2, -0.2),
                },
                ModeSpec {
                    name: "walk".into(),
                    emission_g_per_km: 0.0,
                    availability: 1.0,
                    max_distance_km: None,
                    constant: Range::new(-1.0, -1.0),
                    per_km: Range::new(-1.0, -1.0),
                },
            ],
            ..Default::default()
        };
        let inst = synthesize_population(&config, 1).unwrap();
        for ind in inst.individuals() {
            let walk = ind.alternative(AltId(1)).unwrap();
            assert!((walk.social - 4.0).abs() < 1e-12, "{}", walk.social);
            assert_eq!(ind.alternative(AltId(0)).unwrap().social, 0.0);
            assert!((ind.alternative(AltId(0)).unwrap().utility + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_availability_gives_full_choice_sets() {
        let mut config = GeneratorConfig {
            individuals: 200,
            ..Default::default()
        };
        for m in &mut config.modes {
            m.availability = 1.0;
            m.max_distance_km = None;
        }
        let inst = synthesize_population(&config, 3).unwrap();
        assert!(inst.individuals().iter().all(|i| i.alternatives.len() == 5));
    }

    #[test]
    fn choice_sets_vary_by_default() {
        let inst = synthesize_population(
            &GeneratorConfig {
                individuals: 500,
                ..Default::default()
            },
            5,
        )
        .unwrap();
        let sizes: std::collections::BTreeSet<usize> =
            inst.individuals().iter().map(|i| i.alternatives.len()).collect();
        assert!(sizes.len() > 1);
        assert!(inst.individuals().iter().all(|i| !i.alternatives.is_empty()));
    }

    #[test]
    fn invalid_configs() {
        let mut c = small();
        c.modes.clear();
        assert!(matches!(synthesize_population(&c, 0), Err(Error::InvalidConfig(_))));
        let mut c = small();
        c.mu = 0.0;
        assert!(synthesize_population(&c, 0).is_err());
        let mut c = small();
        c.distance.sigma = -1.0;
        assert!(synthesize_population(&c, 0).is_err());
        let mut c = small();
        c.distance.min_km = 10.0;
        c.distance.max_km = 1.0;
        assert!(synthesize_population(&c, 0).is_err());
        let mut c = small();
        c.modes[0].availability = 1.5;
        assert!(synthesize_population(&c, 0).is_err());
        let mut c = small();
        c.modes[0].per_km = Range::new(1.0, -1.0);
        assert!(synthesize_population(&c, 0).is_err());
    }

    #[test]
    fn noise_changes_utilities_only() {
        let base = synthesize_population(&small(), 9).unwrap();
        let noisy = synthesize_population(
            &GeneratorConfig {
                add_noise: true,
                ..small()
            },
            9,
        )
        .unwrap();
        for (a, b) in base.individuals().iter().zip(noisy.individuals()) {
            for (x, y) in a.alternatives.iter().zip(&b.alternatives) {
                assert_eq!(x.social, y.social);
                assert_ne!(x.utility, y.utility);
            }
        }
    }

    #[test]
    fn config_json_round_trip() {
        let c = GeneratorConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<GeneratorConfig>(&text).unwrap(), c);
    }
}
