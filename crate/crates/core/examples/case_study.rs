//! Synthetic commuting population: generate, reduce, solve, summarize.
//!
//! `cargo run --release --example case_study -- [config.json] [budget]`

use std::path::Path;
use std::time::Instant;

use incentive_policy::{concavize_all, synthesize_population, GeneratorConfig, GreedySolver};

fn main() -> incentive_policy::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let config = match args.first() {
        Some(path) => GeneratorConfig::from_json_file(Path::new(path))?,
        None => GeneratorConfig {
            individuals: 200_000,
            ..Default::default()
        },
    };
    let budget: f64 = args.get(1).and_then(|b| b.parse().ok()).unwrap_or(2000.0);

    let started = Instant::now();
    let instance = synthesize_population(&config, 42)?;
    let generated = started.elapsed();
    let profiles = concavize_all(&instance);
    let reduced = started.elapsed();
    let result = GreedySolver::new(&profiles).solve(budget)?;
    let solved = started.elapsed();

    let kept: usize = profiles.iter().map(|p| p.steps.len()).sum();
    println!("individuals         {}", instance.len());
    println!("alternatives        {} ({} on hulls)", instance.num_alternatives(), kept);
    println!("budget              {budget} €");
    println!("spent               {:.2} €", result.budget_used);
    println!("CO2 avoided         {:.1} kg/day", result.welfare);
    println!("shifted             {} ({:.2}%)", result.allocation.shifted(),
        100.0 * result.allocation.shifted() as f64 / instance.len() as f64);
    println!("gap bound           {:.3} kg", result.gap_bound);
    println!("timings             generate {:.2?}, concavize {:.2?}, solve {:.2?}",
        generated, reduced - generated, solved - reduced);

    let mut by_mode = std::collections::BTreeMap::<String, usize>::new();
    for c in result.allocation.choices().iter().filter(|c| c.incentive > 0.0) {
        let ind = instance.individual(c.ind_id).expect("chosen individual exists");
        let label = ind.alternative(c.alt_id).and_then(|a| a.label.clone()).unwrap_or_default();
        *by_mode.entry(label).or_default() += 1;
    }
    for (mode, n) in by_mode {
        println!("  -> {mode:<16} {n}");
    }
    Ok(())
}
