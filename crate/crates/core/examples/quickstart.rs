//! Two individuals, a 4 € budget: solve and read the certified gap.

use incentive_policy::{concavize_all, solve, Alternative, Individual, Instance};

fn main() -> incentive_policy::Result<()> {
    // utility in € (0 for the preferred option), social gain in kg CO2
    let instance = Instance::new(vec![
        Individual::new(1, vec![
            Alternative::new(0, 0.0, 0.0).with_label("car"),
            Alternative::new(1, -1.0, 5.0).with_label("bus"),
            Alternative::new(2, -3.0, 9.0).with_label("bike"),
        ]),
        Individual::new(2, vec![
            Alternative::new(0, 0.0, 0.0).with_label("car"),
            Alternative::new(1, -2.0, 8.0).with_label("train"),
        ]),
    ])?;

    let profiles = concavize_all(&instance);
    let result = solve(&profiles, 4.0)?;

    for c in result.allocation.choices() {
        println!("individual {} -> alt {} for {} €", c.ind_id, c.alt_id, c.incentive);
    }
    println!("welfare   {} kg", result.welfare);
    println!("spent     {} of {} €", result.budget_used, result.budget_given);
    println!("optimum is at most {} kg above this", result.gap_bound);
    Ok(())
}
