//! Benchmarks live in `benches/`; this crate only hosts shared fixtures.

use cgmysv_core::{CgmysvParams, MarketEnv};

/// Parameters fitted to a short-dated SPX call chain.
pub fn spx_params() -> CgmysvParams {
    CgmysvParams::new(0.5184, 25.4592, 4.6040, 1.0029, 0.0711, 0.3443, -2.0283, 0.006381).expect("valid")
}

pub fn spx_env() -> MarketEnv {
    MarketEnv::new(2488.11, 0.01213, 0.01884).expect("valid")
}
