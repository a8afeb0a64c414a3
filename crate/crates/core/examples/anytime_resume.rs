//! Stop early with a valid solution, or raise the budget without starting over.

use incentive_policy::{concavize_all, synthesize_population, GeneratorConfig, GreedySolver};

fn main() -> incentive_policy::Result<()> {
    let config = GeneratorConfig {
        individuals: 10_000,
        ..Default::default()
    };
    let instance = synthesize_population(&config, 5)?;
    let profiles = concavize_all(&instance);
    let solver = GreedySolver::new(&profiles);

    let early = solver.stop_anytime(500.0, 100)?;
    println!(
        "after 100 steps: {:.2} kg for {:.2} € (a complete solution for that budget)",
        early.welfare, early.budget_used
    );
    assert_eq!(early.welfare, solver.solve(early.budget_used)?.welfare);

    let first = solver.solve(200.0)?;
    let more = solver.resume(&first, 500.0)?;
    println!(
        "200 €: {:.2} kg after {} steps; resumed to 500 €: {:.2} kg after {} steps",
        first.welfare, first.iterations, more.welfare, more.iterations
    );
    assert_eq!(more, solver.solve(500.0)?);
    println!("resumed result is identical to a fresh solve");
    Ok(())
}
