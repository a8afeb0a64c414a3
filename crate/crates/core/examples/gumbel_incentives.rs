//! Expected incentive needed to switch someone whose preference gap is only
//! known up to Gumbel noise of scale mu.

use incentive_policy::gumbel_incentive;

fn main() -> incentive_policy::Result<()> {
    let mus = [0.1, 0.5, 1.0, 2.0];
    print!("{:>6}", "gap");
    for mu in mus {
        print!("{:>12}", format!("mu={mu}"));
    }
    println!();
    for delta in [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0] {
        print!("{delta:>6}");
        for mu in mus {
            print!("{:>12.4}", gumbel_incentive(delta, mu)?);
        }
        println!();
    }
    println!("\nlarge gap: y -> gap; strongly preferred target: y -> mu");
    Ok(())
}
