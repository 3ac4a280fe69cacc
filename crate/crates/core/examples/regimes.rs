// Leading-order behaviour in each moneyness regime as the number of fixings
// grows at fixed `(beta, rho)`.

use asian_ld::{atm_price_asymptotic, itm_expansion, otm_decay, a_infinity, AveragingGrid, Flavor, MarketParams, OptionSpec};

fn main() -> asian_ld::Result<()> {
    let (beta, rho, sigma, spot) = (0.5, 0.1, 0.2, 1.0);
    let a_inf = a_infinity(spot, rho);
    println!("A_inf = {a_inf:.8}");
    println!("    n   OTM I(1.2)     ATM price    ITM call(K=0.9)");
    for n in [50usize, 100, 200, 400, 800] {
        // hold beta and rho fixed while n grows
        let tau = 2.0 * beta / (sigma * sigma * (n * n) as f64);
        let grid = AveragingGrid::new(n, tau)?;
        let market = MarketParams::new(spot, rho / (n as f64 * tau), 0.0, sigma)?;
        let decay = otm_decay(&OptionSpec::fixed(Flavor::Call, 1.2), &market, &grid)?;
        let atm = atm_price_asymptotic(&market, &grid, Flavor::Call);
        let itm = itm_expansion(&OptionSpec::fixed(Flavor::Call, 0.9), &market, &grid)?;
        println!("{n:5}   {:12.6}   {atm:.8}   {itm:.8}", decay / n as f64);
    }
    Ok(())
}
