// Monte Carlo check of the asymptotic price and of the fluctuation law.

use asian_ld::{
    fluctuation_variance, implied_bs_vol, mc_average_moments, mc_price, price_fixed, scaled_params, AveragingGrid,
    Flavor, McConfig, MarketParams, OptionSpec,
};

fn main() -> asian_ld::Result<()> {
    let cfg = McConfig { paths: 200_000, ..McConfig::default() };

    let market = MarketParams::new(2.0, 0.02, 0.0, 0.1)?;
    let grid = AveragingGrid::from_maturity(250, 1.0)?;
    let spec = OptionSpec::fixed(Flavor::Call, 2.0);
    let mc = mc_price(&spec, &market, &grid, &cfg)?;
    let asym = price_fixed(&spec, &market, &grid)?;
    println!("K = 2: MC {:.6} +- {:.6}, asymptotic {:.6} ({:.2}s)", mc.mean, mc.stderr, asym.price, mc.elapsed);

    // r = q = 0, at the money: the implied vol tends to sigma / sqrt(3)
    let market = MarketParams::new(1.0, 0.0, 0.0, 0.2)?;
    for n in [50, 100, 200] {
        let grid = AveragingGrid::new(n, 0.01)?;
        let est = mc_price(&OptionSpec::fixed(Flavor::Call, 1.0), &market, &grid, &cfg)?;
        let vol = implied_bs_vol(est.mean, 1.0, 1.0, grid.maturity(), Flavor::Call)?;
        println!("n = {n:3}: ATM implied vol {vol:.5}, limit {:.5}", 0.2 / 3f64.sqrt());
    }

    let market = MarketParams::new(1.0, 0.05, 0.0, 0.2)?;
    let grid = AveragingGrid::new(200, 0.01)?;
    let sp = scaled_params(&market, &grid);
    let m = mc_average_moments(&market, &grid, &cfg)?;
    println!(
        "scaled variance {:.4} +- {:.4}, limit 2 beta v(rho) = {:.4}",
        m.scaled_variance.mean,
        m.scaled_variance.stderr,
        2.0 * sp.beta * fluctuation_variance(sp.rho)
    );
    Ok(())
}
