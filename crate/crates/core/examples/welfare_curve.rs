//! Welfare as a function of budget, with the certified upper envelope.
//!
//! `cargo run --example welfare_curve > curve.csv`

use incentive_policy::{concavize_all, synthesize_population, GeneratorConfig, GreedySolver};

fn main() -> incentive_policy::Result<()> {
    let config = GeneratorConfig {
        individuals: 500,
        ..Default::default()
    };
    let instance = synthesize_population(&config, 1)?;
    let profiles = concavize_all(&instance);
    let solver = GreedySolver::new(&profiles);
    let curve = solver.curve(100.0)?;

    eprintln!("{} breakpoints up to 100 €", curve.breakpoints().len());
    println!("budget_eur,welfare_kg,upper_bound_kg");
    for k in 0..=100 {
        let y = k as f64;
        println!("{y},{:.4},{:.4}", curve.value_at(y), curve.upper_bound_at(y));
    }
    Ok(())
}
