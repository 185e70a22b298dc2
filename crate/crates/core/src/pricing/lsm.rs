//! Longstaff–Schwartz least-squares Monte Carlo for American options.

use nalgebra::{DMatrix, DVector};

use super::{MarketEnv, OptionSpec, PricingResult, SpotPaths, Style};
use crate::error::{Error, Result};

/// Volatility-like regressor paired with the spot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolRegressor {
    /// `σ = √v`.
    #[default]
    Sqrt,
    /// `σ = v`.
    Variance,
    /// No volatility regressor: basis `{1, S, S²}`.
    None,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LsmConfig {
    pub vol_regressor: VolRegressor,
}

/// Price together with exercise diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct LsmOutcome {
    pub result: PricingResult,
    /// Fraction of paths exercised before maturity.
    pub early_exercise_fraction: f64,
    /// Exercise dates at which the reduced basis was used.
    pub fallback_dates: usize,
}

const FULL_BASIS: usize = 6;
const REDUCED_BASIS: usize = 3;

fn basis_row(s: f64, sigma: f64, out: &mut [f64]) {
    out[0] = 1.0;
    out[1] = s;
    out[2] = s * s;
    if out.len() == FULL_BASIS {
        out[3] = sigma;
        out[4] = sigma * sigma;
        out[5] = sigma * s;
    }
}

/// Least-squares fit; `None` when the design is rank-deficient.
fn fit(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = x.clone().svd(true, true);
    let s = &svd.singular_values;
    let smax = s.max();
    if !(smax > 0.0) || s.min() <= smax * 1e-10 {
        return None;
    }
    svd.solve(y, 0.0).ok()
}

/// Early-exercise price on every grid date `t_1 … t_M`.
pub fn lsm_american(paths: &SpotPaths, spec: &OptionSpec, env: &MarketEnv, cfg: &LsmConfig) -> Result<PricingResult> {
    lsm_american_detailed(paths, spec, env, cfg).map(|o| o.result)
}

pub fn lsm_american_detailed(
    paths: &SpotPaths,
    spec: &OptionSpec,
    env: &MarketEnv,
    cfg: &LsmConfig,
) -> Result<LsmOutcome> {
    if spec.style != Style::American {
        return Err(Error::invalid("style", format!("{:?} is not American", spec.style)));
    }
    spec.validate(env)?;
    paths.check_maturity(spec)?;
    let uses_vol = cfg.vol_regressor != VolRegressor::None;
    if uses_vol && paths.variance.len() != paths.spot.len() {
        return Err(Error::GridMismatch("variance paths missing".into()));
    }
    let n = paths.n_paths();
    let m_steps = paths.steps();
    let k = spec.strike;
    let times = &paths.times;

    // cash[i] is paid at date when[i]
    let mut cash: Vec<f64> = paths.spot.iter().map(|p| spec.right.payoff(p[m_steps], k)).collect();
    let mut when = vec![m_steps; n];
    let mut fallback_dates = 0;

    for m in (1..m_steps).rev() {
        let itm: Vec<usize> = (0..n).filter(|&i| spec.right.payoff(paths.spot[i][m], k) > 0.0).collect();
        if itm.len() <= FULL_BASIS {
            continue;
        }
        let sigma = |i: usize| {
            match cfg.vol_regressor {
                VolRegressor::Sqrt => paths.variance[i][m].max(0.0).sqrt(),
                VolRegressor::Variance => paths.variance[i][m],
                VolRegressor::None => 0.0,
            }
        };
        let y = DVector::from_iterator(
            itm.len(),
            itm.iter()
                .map(|&i| cash[i] * (-env.r * (times[when[i]] - times[m])).exp()),
        );
        let design = |width: usize| {
            let mut x = DMatrix::zeros(itm.len(), width);
            let mut row = vec![0.0; width];
            for (r, &i) in itm.iter().enumerate() {
                basis_row(paths.spot[i][m] / k, sigma(i), &mut row);
                for c in 0..width {
                    x[(r, c)] = row[c];
                }
            }
            x
        };
        let full = design(if uses_vol { FULL_BASIS } else { REDUCED_BASIS });
        let (x, beta) = match fit(&full, &y) {
            Some(b) => (full, b),
            None if !uses_vol => continue,
            None => {
                log::warn!("singular LSM regression at date {m}; using the {{1, S, S^2}} basis");
                fallback_dates += 1;
                let reduced = design(REDUCED_BASIS);
                match fit(&reduced, &y) {
                    Some(b) => (reduced, b),
                    None => continue,
                }
            }
        };
        let continuation = &x * &beta;
        for (r, &i) in itm.iter().enumerate() {
            let exercise = spec.right.payoff(paths.spot[i][m], k);
            if exercise >= continuation[r] {
                cash[i] = exercise;
                when[i] = m;
            }
        }
    }

    let discounted: Vec<f64> = (0..n).map(|i| cash[i] * env.discount(times[when[i]])).collect();
    let early = when.iter().filter(|&&w| w < m_steps).count();
    Ok(LsmOutcome {
        result: PricingResult::from_samples(&discounted)?,
        early_exercise_fraction: early as f64 / n as f64,
        fallback_dates,
    })
}
