// Limiting log-MGF of the average and its Legendre relation with the rate
// function.

use asian_ld::{mgf_log_limit, rate_i};

fn main() -> asian_ld::Result<()> {
    let (spot, beta, rho) = (1.0, 0.5, 0.2);
    let xs: Vec<f64> = (1..=20_000).map(|k| 3.0 * k as f64 / 20_000.0).collect();
    let rates = xs.iter().map(|&x| rate_i(x, spot, beta, rho)).collect::<asian_ld::Result<Vec<_>>>()?;
    println!("theta    Lambda(theta)   sup_x(theta x - I(x))");
    for theta in [-4.0, -2.0, -1.0, -0.5, -0.1, 0.0] {
        let lambda = mgf_log_limit(theta, spot, beta, rho)?;
        let sup = xs.iter().zip(&rates).map(|(x, i)| theta * x - i).fold(f64::NEG_INFINITY, f64::max);
        println!("{theta:5.1}   {lambda:13.9}   {sup:13.9}");
    }
    println!("theta > 0: {}", mgf_log_limit(0.1, spot, beta, rho)?);
    Ok(())
}
