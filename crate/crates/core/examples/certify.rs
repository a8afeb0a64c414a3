//! Check the greedy gap bound against exact optima on random small instances.

use incentive_policy::{
    certify, concavize_all, exact_dp, exact_enumerate, solve, Alternative, Individual, Instance,
    OracleConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> incentive_policy::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let individuals = (0..8)
            .map(|i| {
                let k = rng.gen_range(1..=4);
                Individual::new(
                    i,
                    (0..k)
                        .map(|a| {
                            let u = -(rng.gen_range(0..500) as f64) / 100.0;
                            Alternative::new(a, u, rng.gen_range(0..200) as f64 / 10.0)
                        })
                        .collect(),
                )
            })
            .collect();
        let instance = Instance::new(individuals)?;
        let budget = rng.gen_range(1..1000) as f64 / 100.0;

        let greedy = solve(&concavize_all(&instance), budget)?;
        let dp = exact_dp(&instance, budget, &OracleConfig::default())?;
        let brute = exact_enumerate(&instance, budget)?;
        assert_eq!(dp.welfare, brute.welfare);

        let gap = dp.welfare - greedy.welfare;
        println!(
            "trial {trial:>2}  B={budget:>5.2}  greedy {:>7.2}  exact {:>7.2}  gap {gap:>5.2} <= bound {:>5.2}  {}",
            greedy.welfare,
            dp.welfare,
            greedy.gap_bound,
            if certify(&greedy, dp.welfare) { "PASS" } else { "FAIL" }
        );
        if greedy.gap_bound > 0.0 {
            worst = worst.max(gap / greedy.gap_bound);
        }
    }
    println!("largest gap / bound: {worst:.3}");
    Ok(())
}
