//! Large-deviation asymptotics for discretely sampled Asian options under
//! Black-Scholes dynamics in the regime `n -> inf`, `tau -> 0` with
//! `beta = sigma^2 tau n^2 / 2` and `rho = (r - q) tau n` held fixed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

// lets the example programs compile inside the unit tests
extern crate self as asian_ld;

pub mod cli;
pub mod error;
pub mod mc;
pub mod optimizer;
pub mod pricing;
pub mod roots;
pub mod scaling;
pub mod tables;
pub mod variational;

pub use error::{Error, Result};
pub use mc::{mc_average_moments, mc_price, AverageMoments, McConfig, McEstimate};
pub use optimizer::{brute_force_lambda, brute_force_lambda_extrapolated, brute_force_rate};
pub use pricing::{
    atm_price_asymptotic, bachelier_kernel, bs_kernel, bs_vega, implied_bs_vol, implied_lognormal_vol,
    implied_normal_vol, itm_expansion, otm_decay, price, price_fixed, price_floating, Flavor,
    OptionSpec, PriceResult, Regime, Style,
};
pub use scaling::{
    a_infinity, discrete_forward, fluctuation_variance, scaled_params, AveragingGrid, MarketParams,
    ScaledParams,
};
pub use variational::{
    floating_rate_h0, lambda_mgf, mgf_log_limit, rate_i, rate_j, Branch, RateValue, VariationalConfig,
};

#[cfg(test)]
mod examples {
    macro_rules! run_example {
        ($($name:ident),* $(,)?) => {$(
            mod $name {
                include!(concat!("../examples/", stringify!($name), ".rs"));

                #[test]
                fn runs() {
                    main().unwrap();
                }
            }
        )*};
    }

    run_example!(
        benchmark_tables,
        fixed_strike,
        floating_strike,
        mgf_limit,
        monte_carlo,
        rate_function,
        regimes,
        variational_oracle,
    );
}
