// The normalised rate function `J(x/S0, rho)` on both branches.

use asian_ld::scaling::growth_factor;
use asian_ld::{rate_j, VariationalConfig};

fn main() -> asian_ld::Result<()> {
    let cfg = VariationalConfig::default();
    for rho in [-0.5, 0.0, 0.5] {
        println!("rho = {rho}: minimum at x/S0 = {:.6}, branch switch at {:.3}", growth_factor(rho), 1.0 + 0.5 * rho);
        for x in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0] {
            let v = rate_j(x, rho, &cfg)?;
            println!("  x/S0 {x:4.2}  J {:10.6}  {:13} root {:.6}", v.value, v.branch.to_string(), v.root);
        }
    }
    Ok(())
}
