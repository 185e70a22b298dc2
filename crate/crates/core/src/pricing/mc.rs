//! Monte Carlo pricers on simulated spot paths.

use super::{lsm_american, LsmConfig, MarketEnv, OptionSpec, PricingResult, SpotPaths, Style};
use crate::error::{Error, Result};

fn require_style(spec: &OptionSpec, allowed: &[Style]) -> Result<()> {
    if allowed.contains(&spec.style) {
        Ok(())
    } else {
        Err(Error::invalid("style", format!("{:?} not handled by this pricer", spec.style)))
    }
}

fn prepare(paths: &SpotPaths, spec: &OptionSpec, env: &MarketEnv) -> Result<f64> {
    spec.validate(env)?;
    paths.check_maturity(spec)?;
    Ok(env.discount(spec.maturity))
}

/// `e^{−rT}·mean(payoff(S_T))`.
pub fn mc_european(paths: &SpotPaths, spec: &OptionSpec, env: &MarketEnv) -> Result<PricingResult> {
    require_style(spec, &[Style::European])?;
    let disc = prepare(paths, spec, env)?;
    let x: Vec<f64> = paths
        .spot
        .iter()
        .map(|p| disc * spec.right.payoff(p[p.len() - 1], spec.strike))
        .collect();
    PricingResult::from_samples(&x)
}

/// Arithmetic-average option on `S_{t_1}, …, S_{t_M}`.
pub fn mc_asian(paths: &SpotPaths, spec: &OptionSpec, env: &MarketEnv) -> Result<PricingResult> {
    require_style(spec, &[Style::AsianArithmetic])?;
    let disc = prepare(paths, spec, env)?;
    let x: Vec<f64> = paths
        .spot
        .iter()
        .map(|p| {
            let avg = p[1..].iter().sum::<f64>() / (p.len() - 1) as f64;
            disc * spec.right.payoff(avg, spec.strike)
        })
        .collect();
    PricingResult::from_samples(&x)
}

/// Knock-out option monitored at the grid dates.
pub fn mc_barrier(paths: &SpotPaths, spec: &OptionSpec, env: &MarketEnv) -> Result<PricingResult> {
    require_style(spec, &[Style::BarrierDownOut, Style::BarrierUpOut])?;
    let disc = prepare(paths, spec, env)?;
    let b = spec.barrier.expect("validated barrier");
    let knocked: Box<dyn Fn(f64) -> bool> = match spec.style {
        Style::BarrierDownOut => Box::new(move |s| s <= b),
        _ => Box::new(move |s| s >= b),
    };
    let x: Vec<f64> = paths
        .spot
        .iter()
        .map(|p| {
            if p.iter().any(|&s| knocked(s)) {
                0.0
            } else {
                disc * spec.right.payoff(p[p.len() - 1], spec.strike)
            }
        })
        .collect();
    PricingResult::from_samples(&x)
}

/// Dispatches on `spec.style`.
pub fn mc_price(paths: &SpotPaths, spec: &OptionSpec, env: &MarketEnv, lsm: &LsmConfig) -> Result<PricingResult> {
    match spec.style {
        Style::European => mc_european(paths, spec, env),
        Style::AsianArithmetic => mc_asian(paths, spec, env),
        Style::BarrierDownOut | Style::BarrierUpOut => mc_barrier(paths, spec, env),
        Style::American => lsm_american(paths, spec, env, lsm),
    }
}
