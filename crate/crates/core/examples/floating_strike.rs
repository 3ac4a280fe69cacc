// Floating-strike calls and puts through the three regimes.

use asian_ld::pricing::floating_atm_kappa;
use asian_ld::{price_floating, scaled_params, AveragingGrid, Flavor, MarketParams, OptionSpec};

fn main() -> asian_ld::Result<()> {
    let market = MarketParams::new(1.0, 0.05, 0.0, 0.2)?;
    let grid = AveragingGrid::new(100, 0.01)?;
    let rho = scaled_params(&market, &grid).rho;
    let atm = floating_atm_kappa(rho);
    println!("at-the-money kappa = {atm:.8}");
    for kappa in [0.8, 0.9, atm, 1.1, 1.2] {
        let call = price_floating(&OptionSpec::floating(Flavor::Call, kappa), &market, &grid)?;
        let put = price_floating(&OptionSpec::floating(Flavor::Put, kappa), &market, &grid)?;
        let decay = call.decay_rate.or(put.decay_rate).map_or("-".to_string(), |d| format!("{d:.4}"));
        println!(
            "kappa {kappa:.4}  call {:3} {:.6}  put {:3} {:.6}  n*H {decay}",
            call.regime.to_string(),
            call.price,
            put.regime.to_string(),
            put.price
        );
    }
    Ok(())
}
