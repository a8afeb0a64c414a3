//! The regulator sees only systematic utilities; individuals carry Gumbel
//! noise. Offers are expected incentives, proposed one at a time.

use incentive_policy::cli::{run_repetitions, summarize};
use incentive_policy::{simulate_sequential, synthesize_population, GeneratorConfig, StochasticInstance};

fn main() -> incentive_policy::Result<()> {
    let config = GeneratorConfig {
        individuals: 2000,
        ..Default::default()
    };
    let instance = synthesize_population(&config, 7)?;
    let budget = 50.0;

    let one = simulate_sequential(&StochasticInstance::new(instance.clone(), 1.0, 0)?, budget)?;
    println!("single run: {} proposals, {} accepted", one.proposals, one.acceptances);
    for e in one.log.iter().take(5) {
        println!(
            "  offer {:>8.3} € to {} for alt {}: {}",
            e.amount,
            e.ind_id,
            e.alt_id,
            if e.accepted { "accepted" } else { "refused" }
        );
    }

    println!("\n{:>5} {:>12} {:>14} {:>14}", "mu", "acceptance", "welfare (kg)", "perfect (kg)");
    for mu in [0.25, 0.5, 1.0, 2.0] {
        let reps = run_repetitions(&instance, mu, 0, budget, 20)?;
        let s = summarize(&reps, budget, mu, 0);
        println!(
            "{mu:>5} {:>11.1}% {:>14.2} {:>14.2}",
            100.0 * s.imperfect_information.acceptance_rate.mean,
            s.imperfect_information.welfare_kg.mean,
            s.perfect_information.welfare_kg.mean
        );
    }
    Ok(())
}
