// Fixed-strike Asian call and put across strikes, with the equivalent
// log-normal and normal volatilities.

use asian_ld::{price_fixed, AveragingGrid, Flavor, MarketParams, OptionSpec};

fn main() -> asian_ld::Result<()> {
    let market = MarketParams::new(100.0, 0.05, 0.01, 0.3)?;
    let grid = AveragingGrid::from_maturity(252, 1.0)?;
    println!("strike  regime  sigma_ln  sigma_n   call       put");
    for strike in [70.0, 85.0, 100.0, 102.0, 115.0, 130.0] {
        let call = price_fixed(&OptionSpec::fixed(Flavor::Call, strike), &market, &grid)?;
        let put = price_fixed(&OptionSpec::fixed(Flavor::Put, strike), &market, &grid)?;
        println!(
            "{strike:6.1}  {:6}  {:.5}   {:7.4}  {:9.5}  {:9.5}",
            call.regime.to_string(),
            call.implied_ln_vol,
            call.implied_n_vol,
            call.price,
            put.price
        );
    }
    Ok(())
}
