//! Least-squares calibration of CGMYSV (and baseline CGMY) parameters to
//! option chains.
//!
//! European quotes are repriced with the FFT. American quotes are repriced
//! by least-squares Monte Carlo on paths generated from one fixed master
//! seed, so every objective evaluation reuses the same variates.

mod chain;
mod metrics;
mod optimizer;

pub use chain::{ExerciseStyle, OptionChain, OptionQuote};
pub use metrics::{error_metrics, ErrorReport, ARPE_MIN_PRICE};
pub use optimizer::{minimize, Bounds, OptimResult, OptimizerConfig, TraceRow};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::cgmy::{sample_cgmy_path, CgmyParams, LevySymbol};
use crate::cgmysv::CgmysvParams;
use crate::error::{Error, Result};
use crate::pricing::{
    fft_european, lsm_american, spot_paths, DayCount, FftConfig, LsmConfig, MarketEnv, PathConfig,
    Right, SpotPaths, VolRegressor,
};

/// Box for `(α, λ₊, λ₋, κ, η, ζ, ρ, v₀)`.
pub fn default_cgmysv_bounds() -> Bounds {
    Bounds::new(
        vec![0.005, 1.001, 0.05, 0.01, 1e-4, 0.01, -20.0, 1e-5],
        vec![1.995, 150.0, 150.0, 20.0, 2.0, 5.0, 20.0, 2.0],
    )
    .expect("static bounds")
}

/// Box for `(α, C, λ₊, λ₋)`.
pub fn default_cgmy_bounds() -> Bounds {
    Bounds::new(vec![0.005, 1e-4, 1.001, 0.05], vec![1.995, 100.0, 150.0, 150.0]).expect("static bounds")
}

/// Optimum, its pricing errors and the optimizer trace.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationOutcome<P> {
    pub params: P,
    pub report: ErrorReport,
    pub model_prices: Vec<f64>,
    pub trace: Vec<TraceRow>,
    pub evaluations: usize,
    pub converged: bool,
    /// Fewer quotes than free parameters.
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EuropeanSettings {
    pub day_count: DayCount,
    pub fft: FftConfig,
    pub optimizer: OptimizerConfig,
}

/// Monte Carlo settings for American repricing; one grid step per
/// calendar day to expiry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmericanSettings {
    pub paths: usize,
    pub truncation: usize,
    pub master_seed: u64,
    pub lsm: LsmConfig,
    pub day_count: DayCount,
    pub optimizer: OptimizerConfig,
}

impl Default for AmericanSettings {
    fn default() -> Self {
        AmericanSettings {
            paths: 5000,
            truncation: 1024,
            master_seed: 0,
            lsm: LsmConfig::default(),
            day_count: DayCount::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

fn require_style(chain: &OptionChain, style: ExerciseStyle) -> Result<()> {
    if chain.quotes.iter().any(|q| q.style != style) {
        return Err(Error::invalid("chain", format!("all quotes must be {style:?}")));
    }
    Ok(())
}

/// FFT prices for every quote of `chain`, in quote order.
pub fn european_model_prices(
    params: &CgmysvParams,
    chain: &OptionChain,
    dc: DayCount,
    fft: &FftConfig,
) -> Result<Vec<f64>> {
    let mut groups: BTreeMap<(u32, bool), Vec<usize>> = BTreeMap::new();
    for (i, q) in chain.quotes.iter().enumerate() {
        groups.entry((q.days, q.right == Right::Call)).or_default().push(i);
    }
    let mut out = vec![0.0; chain.quotes.len()];
    for ((days, is_call), idx) in groups {
        let strikes: Vec<f64> = idx.iter().map(|&i| chain.quotes[i].strike).collect();
        let right = if is_call { Right::Call } else { Right::Put };
        let prices = fft_european(params, &chain.env, right, dc.year_fraction(days as f64), &strikes, fft)?;
        for (i, p) in idx.into_iter().zip(prices) {
            out[i] = p;
        }
    }
    Ok(out)
}

/// Objective value; no diagnostics, since it runs thousands of times.
fn rmse_or_inf(prices: Result<Vec<f64>>, market: &[f64]) -> f64 {
    match prices {
        Ok(p) if p.len() == market.len() && !p.is_empty() => {
            let sse: f64 = p.iter().zip(market).map(|(m, q)| (m - q) * (m - q)).sum();
            let rmse = (sse / p.len() as f64).sqrt();
            if rmse.is_finite() {
                rmse
            } else {
                f64::INFINITY
            }
        }
        _ => f64::INFINITY,
    }
}

fn finish<P>(
    params: P,
    model_prices: Vec<f64>,
    chain: &OptionChain,
    run: OptimResult,
    n_free: usize,
) -> Result<CalibrationOutcome<P>> {
    let report = error_metrics(&model_prices, &chain.prices())?;
    let degenerate = chain.quotes.len() < n_free;
    if degenerate {
        log::warn!("{} quote(s) for {n_free} parameters: the fit is underdetermined", chain.quotes.len());
    }
    if !run.converged {
        log::warn!("optimizer stopped before convergence; returning the best point found");
    }
    Ok(CalibrationOutcome {
        params,
        report,
        model_prices,
        trace: run.trace,
        evaluations: run.evaluations,
        converged: run.converged,
        degenerate,
    })
}

/// Minimises the RMSE between FFT prices and a European chain.
pub fn calibrate_european(
    chain: &OptionChain,
    initial: &CgmysvParams,
    bounds: &Bounds,
    settings: &EuropeanSettings,
) -> Result<CalibrationOutcome<CgmysvParams>> {
    chain.validate()?;
    require_style(chain, ExerciseStyle::European)?;
    initial.validate()?;
    let market = chain.prices();
    let objective = |x: &[f64]| {
        let prices = CgmysvParams::from_slice(x)
            .and_then(|p| european_model_prices(&p, chain, settings.day_count, &settings.fft));
        rmse_or_inf(prices, &market)
    };
    let run = minimize(objective, &initial.to_array(), bounds, &settings.optimizer)?;
    let params = CgmysvParams::from_slice(&run.x)?;
    let prices = european_model_prices(&params, chain, settings.day_count, &settings.fft)?;
    finish(params, prices, chain, run, 8)
}

/// Spot paths for every expiry of `chain`, generated from the fixed seed.
fn american_paths(params: &CgmysvParams, chain: &OptionChain, mc: &AmericanSettings) -> Result<Vec<(u32, SpotPaths)>> {
    chain
        .expiries()
        .into_iter()
        .map(|days| {
            let cfg = PathConfig {
                maturity: mc.day_count.year_fraction(days as f64),
                steps: days as usize,
                paths: mc.paths,
                truncation: mc.truncation,
                seed: mc.master_seed,
            };
            Ok((days, spot_paths(params, &chain.env, &cfg)?))
        })
        .collect()
}

fn price_on_paths(
    sets: &[(u32, SpotPaths)],
    chain: &OptionChain,
    dc: DayCount,
    lsm: &LsmConfig,
) -> Result<Vec<f64>> {
    chain
        .quotes
        .par_iter()
        .map(|q| {
            let paths = &sets.iter().find(|(d, _)| *d == q.days).expect("expiry simulated").1;
            Ok(lsm_american(paths, &q.spec(dc), &chain.env, lsm)?.price)
        })
        .collect()
}

/// LSM prices for an American chain on common random numbers.
pub fn american_model_prices(params: &CgmysvParams, chain: &OptionChain, mc: &AmericanSettings) -> Result<Vec<f64>> {
    let sets = american_paths(params, chain, mc)?;
    price_on_paths(&sets, chain, mc.day_count, &mc.lsm)
}

/// RMSE of the fixed-seed LSM prices; `+∞` for inadmissible parameters.
pub fn american_objective(params: &CgmysvParams, chain: &OptionChain, mc: &AmericanSettings) -> f64 {
    rmse_or_inf(american_model_prices(params, chain, mc), &chain.prices())
}

pub fn calibrate_american(
    chain: &OptionChain,
    initial: &CgmysvParams,
    bounds: &Bounds,
    mc: &AmericanSettings,
) -> Result<CalibrationOutcome<CgmysvParams>> {
    chain.validate()?;
    require_style(chain, ExerciseStyle::American)?;
    initial.validate()?;
    let objective = |x: &[f64]| match CgmysvParams::from_slice(x) {
        Ok(p) => american_objective(&p, chain, mc),
        Err(_) => f64::INFINITY,
    };
    let run = minimize(objective, &initial.to_array(), bounds, &mc.optimizer)?;
    let params = CgmysvParams::from_slice(&run.x)?;
    let prices = american_model_prices(&params, chain, mc)?;
    finish(params, prices, chain, run, 8)
}

/// `(α, C, λ₊, λ₋)` with zero location.
pub fn cgmy_from_slice(x: &[f64]) -> Result<CgmyParams> {
    if x.len() != 4 {
        return Err(Error::invalid("params", format!("expected 4 values, got {}", x.len())));
    }
    CgmyParams::new(x[0], x[1], x[2], x[3], 0.0)
}

/// Asset paths `S_t = s0·exp((r−q)t + X_t − tψ(−i))` driven by a CGMY
/// process simulated from the series representation.
pub fn cgmy_spot_paths(params: &CgmyParams, env: &MarketEnv, cfg: &PathConfig) -> Result<SpotPaths> {
    env.validate()?;
    if params.lambda_plus <= 1.0 {
        return Err(Error::invalid("lambda_plus", "martingale correction needs lambda_plus > 1"));
    }
    let dt = cfg.maturity / cfg.steps as f64;
    let times: Vec<f64> = (0..=cfg.steps).map(|m| m as f64 * dt).collect();
    let log_moment = params.symbol(num_complex::Complex64::new(0.0, -1.0))?.re;
    let spot = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|n| {
            let x = sample_cgmy_path(params, cfg.maturity, &times, cfg.truncation, cfg.seed, n)?;
            Ok(x.iter()
                .zip(&times)
                .map(|(x, &t)| env.s0 * ((env.r - env.q - log_moment) * t + x).exp())
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(SpotPaths {
        times,
        spot,
        variance: Vec::new(),
        master_seed: cfg.seed,
    })
}

/// Fixed-seed LSM prices under the CGMY baseline; the regression uses
/// `{1, S, S²}` since the model has no variance state.
pub fn cgmy_american_model_prices(params: &CgmyParams, chain: &OptionChain, mc: &AmericanSettings) -> Result<Vec<f64>> {
    let sets = chain
        .expiries()
        .into_iter()
        .map(|days| {
            let cfg = PathConfig {
                maturity: mc.day_count.year_fraction(days as f64),
                steps: days as usize,
                paths: mc.paths,
                truncation: mc.truncation,
                seed: mc.master_seed,
            };
            Ok((days, cgmy_spot_paths(params, &chain.env, &cfg)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let lsm = LsmConfig {
        vol_regressor: VolRegressor::None,
    };
    price_on_paths(&sets, chain, mc.day_count, &lsm)
}

pub fn calibrate_cgmy_american(
    chain: &OptionChain,
    initial: &CgmyParams,
    bounds: &Bounds,
    mc: &AmericanSettings,
) -> Result<CalibrationOutcome<CgmyParams>> {
    chain.validate()?;
    require_style(chain, ExerciseStyle::American)?;
    initial.validate()?;
    let market = chain.prices();
    let objective = |x: &[f64]| {
        let prices = cgmy_from_slice(x).and_then(|p| cgmy_american_model_prices(&p, chain, mc));
        rmse_or_inf(prices, &market)
    };
    let x0 = [initial.alpha, initial.c_scale, initial.lambda_plus, initial.lambda_minus];
    let run = minimize(objective, &x0, bounds, &mc.optimizer)?;
    let params = cgmy_from_slice(&run.x)?;
    let prices = cgmy_american_model_prices(&params, chain, mc)?;
    finish(params, prices, chain, run, 4)
}

/// Synthetic chain priced by the FFT at `params`.
pub fn synthetic_european_chain(
    params: &CgmysvParams,
    base: OptionChain,
    strikes: &[f64],
    days: &[u32],
    right: Right,
    settings: &EuropeanSettings,
) -> Result<OptionChain> {
    let mut chain = base;
    chain.quotes.clear();
    for &d in days {
        let prices = fft_european(
            params,
            &chain.env,
            right,
            settings.day_count.year_fraction(d as f64),
            strikes,
            &settings.fft,
        )?;
        for (&k, p) in strikes.iter().zip(prices) {
            chain.push(d, k, right, ExerciseStyle::European, p);
        }
    }
    chain.validate()?;
    Ok(chain)
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// `name,value` rows.
pub fn write_params_csv(path: &Path, names: &[&str], values: &[f64]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err(path))?);
    writeln!(w, "name,value").map_err(io_err(path))?;
    for (n, v) in names.iter().zip(values) {
        writeln!(w, "{n},{v:.16e}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_report_csv(path: &Path, report: &ErrorReport) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err(path))?);
    writeln!(w, "aae,ape,arpe,rmse,n").map_err(io_err(path))?;
    writeln!(
        w,
        "{:.16e},{:.16e},{:.16e},{:.16e},{}",
        report.aae, report.ape, report.arpe, report.rmse, report.n
    )
    .map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn write_trace_csv(path: &Path, names: &[&str], trace: &[TraceRow]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err(path))?);
    writeln!(w, "start,iteration,evaluations,rmse,{}", names.join(",")).map_err(io_err(path))?;
    for t in trace {
        let xs: Vec<String> = t.x.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{},{},{},{:.16e},{}", t.start, t.iteration, t.evaluations, t.value, xs.join(","))
            .map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
