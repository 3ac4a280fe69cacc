// Closed-form variational values against direct minimisation of the
// discretised path functionals.

use asian_ld::{brute_force_lambda_extrapolated, brute_force_rate, lambda_mgf, rate_j, VariationalConfig};

fn main() -> asian_ld::Result<()> {
    println!("rate function, m = 1000");
    for (x, rho) in [(0.5, 0.0), (0.8, 0.2), (1.5, -0.2), (2.0, 0.1)] {
        let closed = rate_j(x, rho, &VariationalConfig::default())?.value;
        let brute = brute_force_rate(x, rho, 1000, 100.0)?;
        println!("  x/S0 {x:.2} rho {rho:5.2}  J {closed:.9}  oracle {brute:.9}  diff {:.1e}", closed - brute);
    }
    println!("MGF limit, m = 500 and 1000 with Richardson");
    for (a, b, rho) in [(0.5, 1.0, 0.0), (2.0, 1.0, 0.3), (0.05, 1.0, 0.5)] {
        let closed = lambda_mgf(a, b, rho)?;
        let brute = brute_force_lambda_extrapolated(-a, 1.0, 0.5 * b * b, rho, 500)?;
        println!(
            "  a {a:4.2} b {b:.1} rho {rho:.1}  lambda {:.10} ({})  oracle {brute:.10}",
            closed.value,
            closed.branch
        );
    }
    Ok(())
}
