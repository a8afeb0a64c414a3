//! Reduce an individual's options to the upper concave hull of
//! (incentive, social gain) points.

use incentive_policy::{lp_extremes, Alternative, Individual};

fn main() {
    let ind = Individual::new(7, vec![
        Alternative::new(0, 0.0, 0.0),
        Alternative::new(1, -2.0, 10.0),
        Alternative::new(2, -3.0, 10.5), // below the chord from 1 to 3
        Alternative::new(3, -4.0, 16.0),
        Alternative::new(4, -5.0, 12.0), // dominated by 3
        Alternative::new(5, -1.0, -2.0), // worse for society
    ]);

    for w in ind.incentive_weights() {
        println!("alt {}: incentive {} €", w.alt_id, w.weight);
    }
    let profile = lp_extremes(&ind);
    println!("default: alt {}", profile.default_alt);
    println!("{:>4} {:>8} {:>8} {:>8}", "alt", "weight", "gain", "kg/€");
    for s in &profile.steps {
        println!("{:>4} {:>8} {:>8} {:>8.3}", s.alt_id.to_string(), s.weight, s.social_gain, s.incr_eff);
    }
}
