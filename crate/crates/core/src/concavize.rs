//! LP-extreme extraction ("concavization").
//!
//! Each individual's alternatives are mapped to points `(weight, social gain)`
//! relative to the default. Only the vertices of the upper-left convex hull
//! anchored at the default `(0, 0)` can appear in the greedy solution, so
//! everything else is dropped:
//!
//! * alternatives with no positive social gain,
//! * alternatives dominated by a cheaper one with at least as much gain,
//! * alternatives lying on or below a hull segment.
//!
//! The surviving vertices, ordered by increasing weight, form an
//! [`ExtremeProfile`]. Consecutive differences give the incremental weights,
//! incremental social gains and incremental efficiencies consumed by the
//! greedy solver; incremental efficiency strictly decreases along a profile.

use std::io::Write;

use rayon::prelude::*;

use crate::error::Result;
use crate::model::{AltId, ChoiceSet, IndId, Individual, Instance, WeightedOption};

/// Absolute tolerance on the hull cross product.
pub const HULL_TOLERANCE: f64 = 1e-12;

/// One non-default vertex of the hull.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullStep {
    pub alt_id: AltId,
    /// Total incentive needed to reach this alternative from the default.
    pub weight: f64,
    /// Social gain relative to the default.
    pub social_gain: f64,
    pub incr_weight: f64,
    pub incr_social: f64,
    /// `incr_social / incr_weight` (kg per €).
    pub incr_eff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeProfile {
    pub ind_id: IndId,
    pub default_alt: AltId,
    /// Hull vertices after the default, by strictly increasing weight.
    pub steps: Vec<HullStep>,
}

impl ExtremeProfile {
    /// Number of LP-extremes, default included.
    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Alternative reached after taking `rank` steps (rank 0 is the default).
    pub fn alt_at(&self, rank: usize) -> AltId {
        match rank {
            0 => self.default_alt,
            r => self.steps[r - 1].alt_id,
        }
    }

    pub fn weight_at(&self, rank: usize) -> f64 {
        match rank {
            0 => 0.0,
            r => self.steps[r - 1].weight,
        }
    }

    pub fn social_gain_at(&self, rank: usize) -> f64 {
        match rank {
            0 => 0.0,
            r => self.steps[r - 1].social_gain,
        }
    }

    /// Alternative ids of all extremes, default first.
    pub fn alt_ids(&self) -> Vec<AltId> {
        std::iter::once(self.default_alt)
            .chain(self.steps.iter().map(|s| s.alt_id))
            .collect()
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Hull of an arbitrary weight table. The default option must carry weight 0
/// and gain 0; other options with non-positive weight are ignored.
pub fn hull_of(choices: &ChoiceSet) -> ExtremeProfile {
    let mut candidates: Vec<WeightedOption> = choices
        .options
        .iter()
        .filter(|o| o.alt_id != choices.default_alt && o.weight > 0.0 && o.social_gain > 0.0)
        .copied()
        .collect();
    candidates.sort_by(|a, b| {
        a.weight
            .total_cmp(&b.weight)
            .then(b.social_gain.total_cmp(&a.social_gain))
            .then(a.alt_id.cmp(&b.alt_id))
    });
    candidates.dedup_by(|later, first| later.weight == first.weight);

    // Sorted by weight, so a point is undominated iff its gain beats every
    // cheaper point's gain.
    let mut best_gain = 0.0;
    candidates.retain(|o| {
        if o.social_gain > best_gain {
            best_gain = o.social_gain;
            true
        } else {
            false
        }
    });

    let origin = WeightedOption {
        alt_id: choices.default_alt,
        weight: 0.0,
        social_gain: 0.0,
    };
    let pt = |o: &WeightedOption| (o.weight, o.social_gain);
    let mut hull: Vec<WeightedOption> = Vec::with_capacity(candidates.len() + 1);
    hull.push(origin);
    for c in candidates {
        // Pop while the last vertex is not a strict right turn.
        while hull.len() >= 2
            && cross(pt(&hull[hull.len() - 2]), pt(&hull[hull.len() - 1]), pt(&c))
                > -HULL_TOLERANCE
        {
            hull.pop();
        }
        hull.push(c);
    }

    let steps: Vec<HullStep> = hull
        .windows(2)
        .map(|w| {
            let incr_weight = w[1].weight - w[0].weight;
            let incr_social = w[1].social_gain - w[0].social_gain;
            HullStep {
                alt_id: w[1].alt_id,
                weight: w[1].weight,
                social_gain: w[1].social_gain,
                incr_weight,
                incr_social,
                incr_eff: incr_social / incr_weight,
            }
        })
        .collect();
    debug_assert!(steps.windows(2).all(|w| w[1].incr_eff < w[0].incr_eff));

    ExtremeProfile {
        ind_id: choices.ind_id,
        default_alt: choices.default_alt,
        steps,
    }
}

pub fn lp_extremes(ind: &Individual) -> ExtremeProfile {
    hull_of(&ind.choice_set())
}

/// One profile per individual, in id order.
pub fn concavize_all(instance: &Instance) -> Vec<ExtremeProfile> {
    instance.individuals().par_iter().map(lp_extremes).collect()
}

pub fn concavize_sequential(instance: &Instance) -> Vec<ExtremeProfile> {
    instance.individuals().iter().map(lp_extremes).collect()
}

/// Debug dump: `ind_id,rank,alt_id,weight,social_gain,incr_weight,incr_social,incr_eff`.
/// The default row (rank 0) leaves `incr_eff` empty.
pub fn write_profiles_csv<W: Write>(profiles: &[ExtremeProfile], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record([
        "ind_id",
        "rank",
        "alt_id",
        "weight",
        "social_gain",
        "incr_weight",
        "incr_social",
        "incr_eff",
    ])?;
    for p in profiles {
        wtr.write_record([
            p.ind_id.to_string(),
            "0".into(),
            p.default_alt.to_string(),
            "0".into(),
            "0".into(),
            "0".into(),
            "0".into(),
            String::new(),
        ])?;
        for (k, s) in p.steps.iter().enumerate() {
            wtr.write_record([
                p.ind_id.to_string(),
                (k + 1).to_string(),
                s.alt_id.to_string(),
                s.weight.to_string(),
                s.social_gain.to_string(),
                s.incr_weight.to_string(),
                s.incr_social.to_string(),
                s.incr_eff.to_string(),
            ])?;
        }
    }
    wtr.flush().map_err(|e| crate::error::Error::io("<csv writer>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Alternative;

    /// Individual whose default sits at utility 0 / social 0 so that each
    /// `(w, g)` maps to utility `-w` and social `g`.
    fn from_points(points: &[(f64, f64)]) -> Individual {
        Individual::new(
            1,
            points
                .iter()
                .enumerate()
                .map(|(k, &(w, g))| Alternative::new(k as u32, -w, g))
                .collect(),
        )
    }

    fn coords(p: &ExtremeProfile) -> Vec<(f64, f64)> {
        std::iter::once((0.0, 0.0))
            .chain(p.steps.iter().map(|s| (s.weight, s.social_gain)))
            .collect()
    }

    #[test]
    fn below_segment_point_removed() {
        let p = lp_extremes(&from_points(&[(0.0, 0.0), (2.0, 10.0), (3.0, 10.5), (4.0, 16.0)]));
        assert_eq!(coords(&p), vec![(0.0, 0.0), (2.0, 10.0), (4.0, 16.0)]);
        assert_eq!(p.steps[0].incr_eff, 5.0);
        assert_eq!(p.steps[1].incr_weight, 2.0);
        assert_eq!(p.steps[1].incr_social, 6.0);
        assert_eq!(p.steps[1].incr_eff, 3.0);
    }

    #[test]
    fn single_alternative_has_no_steps() {
        let p = lp_extremes(&from_points(&[(0.0, 0.0)]));
        assert!(p.steps.is_empty());
        assert_eq!(p.len(), 1);
        assert_eq!(p.alt_at(0), AltId(0));
    }

    #[test]
    fn negative_gain_removed() {
        let p = lp_extremes(&from_points(&[(0.0, 0.0), (1.0, -2.0), (2.0, 3.0)]));
        assert_eq!(coords(&p), vec![(0.0, 0.0), (2.0, 3.0)]);
        assert_eq!(p.steps[0].alt_id, AltId(2));
    }

    #[test]
    fn dominated_point_removed() {
        // alt 2 costs more than alt 1 for less gain
        let p = lp_extremes(&from_points(&[(0.0, 0.0), (1.0, 5.0), (2.0, 4.0)]));
        assert_eq!(coords(&p), vec![(0.0, 0.0), (1.0, 5.0)]);
    }

    #[test]
    fn equal_weight_keeps_larger_gain() {
        let p = lp_extremes(&from_points(&[(0.0, 0.0), (2.0, 3.0), (2.0, 5.0)]));
        assert_eq!(p.steps.len(), 1);
        assert_eq!(p.steps[0].alt_id, AltId(2));
        // exact duplicates: lowest id wins
        let p = lp_extremes(&from_points(&[(0.0, 0.0), (2.0, 5.0), (2.0, 5.0)]));
        assert_eq!(p.steps[0].alt_id, AltId(1));
    }

    #[test]
    fn collinear_interior_point_dropped() {
        let p = lp_extremes(&from_points(&[(0.0, 0.0), (1.0, 2.0), (2.0, 4.0), (3.0, 5.0)]));
        assert_eq!(coords(&p), vec![(0.0, 0.0), (2.0, 4.0), (3.0, 5.0)]);
    }

    #[test]
    fn default_not_first_in_list() {
        let ind = Individual::new(
            9,
            vec![
                Alternative::new(4, 1.0, 12.0),
                Alternative::new(2, 3.0, 2.0),
                Alternative::new(7, 2.0, 5.0),
            ],
        );
        let p = lp_extremes(&ind);
        assert_eq!(p.default_alt, AltId(2));
        // gains are relative to the default's social indicator of 2; (1, 3)
        // lies below the chord from the origin to (2, 10)
        assert_eq!(coords(&p), vec![(0.0, 0.0), (2.0, 10.0)]);
        assert_eq!(p.steps[0].alt_id, AltId(4));
    }

    #[test]
    fn utility_tie_with_lower_social_dropped() {
        let ind = Individual::new(
            1,
            vec![Alternative::new(0, 5.0, 3.0), Alternative::new(1, 5.0, 1.0)],
        );
        assert!(lp_extremes(&ind).steps.is_empty());
    }

    #[test]
    fn parallel_matches_sequential() {
        let inds: Vec<Individual> = (0..50)
            .map(|i| {
                Individual::new(
                    i,
                    (0..5)
                        .map(|k| {
                            Alternative::new(
                                k,
                                ((i * 7 + k as u64 * 13) % 11) as f64,
                                ((i * 3 + k as u64 * 5) % 17) as f64,
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        let inst = Instance::new(inds).unwrap();
        assert_eq!(concavize_all(&inst), concavize_sequential(&inst));
    }

    #[test]
    fn profile_dump() {
        let p = lp_extremes(&from_points(&[(0.0, 0.0), (2.0, 10.0), (4.0, 16.0)]));
        let mut out = Vec::new();
        write_profiles_csv(&[p], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "ind_id,rank,alt_id,weight,social_gain,incr_weight,incr_social,incr_eff\n\
             1,0,0,0,0,0,0,\n\
             1,1,1,2,10,2,10,5\n\
             1,2,2,4,16,2,6,3\n"
        );
    }
}
