//! Risk-neutral asset model and option pricers.

mod bootstrap;
mod fft;
mod lsm;
mod mc;

pub use bootstrap::{bootstrap, interquartile_range, BootstrapRow};
pub use fft::{fft_european, FftConfig};
pub use lsm::{lsm_american, lsm_american_detailed, LsmConfig, LsmOutcome, VolRegressor};
pub use mc::{mc_asian, mc_barrier, mc_european, mc_price};

use crate::cgmysv::{generate_paths, log_exponential_moment, CgmysvParams, SimConfig};
use crate::error::{ensure_positive, Error, Result};

/// Two-sided 97.5% standard normal quantile.
pub const Z_975: f64 = 1.959964;

/// Spot, risk-free rate and dividend yield (continuous, per year).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MarketEnv {
    pub s0: f64,
    pub r: f64,
    pub q: f64,
}

impl MarketEnv {
    pub fn new(s0: f64, r: f64, q: f64) -> Result<Self> {
        let env = MarketEnv { s0, r, q };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("s0", self.s0)?;
        if !self.r.is_finite() || !self.q.is_finite() {
            return Err(Error::invalid("r/q", "rates must be finite"));
        }
        Ok(())
    }

    pub fn forward(&self, t: f64) -> f64 {
        self.s0 * ((self.r - self.q) * t).exp()
    }

    pub fn discount(&self, t: f64) -> f64 {
        (-self.r * t).exp()
    }
}

/// Maps calendar-day maturities to year fractions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DayCount {
    #[default]
    #[serde(rename = "365")]
    Calendar365,
    #[serde(rename = "252")]
    Trading252,
}

impl DayCount {
    pub fn days_per_year(self) -> f64 {
        match self {
            DayCount::Calendar365 => 365.0,
            DayCount::Trading252 => 252.0,
        }
    }

    pub fn year_fraction(self, days: f64) -> f64 {
        days / self.days_per_year()
    }

    pub fn from_days_per_year(d: u32) -> Result<Self> {
        match d {
            365 => Ok(DayCount::Calendar365),
            252 => Ok(DayCount::Trading252),
            other => Err(Error::invalid("day_count", format!("{other} (expected 365 or 252)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Right {
    #[serde(rename = "C")]
    Call,
    #[serde(rename = "P")]
    Put,
}

impl Right {
    #[inline]
    pub fn payoff(self, s: f64, k: f64) -> f64 {
        match self {
            Right::Call => (s - k).max(0.0),
            Right::Put => (k - s).max(0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Style {
    European,
    American,
    AsianArithmetic,
    BarrierDownOut,
    BarrierUpOut,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OptionSpec {
    pub strike: f64,
    /// Years.
    pub maturity: f64,
    pub right: Right,
    pub style: Style,
    pub barrier: Option<f64>,
}

impl OptionSpec {
    pub fn european(strike: f64, maturity: f64, right: Right) -> Self {
        OptionSpec {
            strike,
            maturity,
            right,
            style: Style::European,
            barrier: None,
        }
    }

    pub fn with_style(self, style: Style) -> Self {
        OptionSpec { style, ..self }
    }

    pub fn with_barrier(self, style: Style, barrier: f64) -> Self {
        OptionSpec {
            style,
            barrier: Some(barrier),
            ..self
        }
    }

    pub fn validate(&self, env: &MarketEnv) -> Result<()> {
        ensure_positive("strike", self.strike)?;
        ensure_positive("maturity", self.maturity)?;
        match (self.style, self.barrier) {
            (Style::BarrierDownOut, Some(b)) if b > 0.0 && b < env.s0 => Ok(()),
            (Style::BarrierUpOut, Some(b)) if b > env.s0 => Ok(()),
            (Style::BarrierDownOut | Style::BarrierUpOut, b) => Err(Error::invalid(
                "barrier",
                format!("{b:?} is not valid for {:?} with s0={}", self.style, env.s0),
            )),
            (_, Some(_)) => Err(Error::invalid("barrier", "only barrier styles take a barrier")),
            (_, None) => Ok(()),
        }
    }
}

/// Price with a 95% normal confidence interval.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PricingResult {
    pub price: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_paths: usize,
}

impl PricingResult {
    pub fn exact(price: f64) -> Self {
        PricingResult {
            price,
            std_error: 0.0,
            ci_low: price,
            ci_high: price,
            n_paths: 0,
        }
    }

    /// Mean and standard error of already-discounted payoffs.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("paths", "no samples"));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let se = (var / n).sqrt();
        Ok(PricingResult {
            price: mean,
            std_error: se,
            ci_low: mean - Z_975 * se,
            ci_high: mean + Z_975 * se,
            n_paths: samples.len(),
        })
    }
}

/// Simulated spot and variance paths on a uniform grid `t_m = mT/M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpotPaths {
    pub times: Vec<f64>,
    pub spot: Vec<Vec<f64>>,
    pub variance: Vec<Vec<f64>>,
    pub master_seed: u64,
}

impl SpotPaths {
    pub fn n_paths(&self) -> usize {
        self.spot.len()
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn terminal(&self) -> Vec<f64> {
        self.spot.iter().map(|p| p[p.len() - 1]).collect()
    }

    pub(crate) fn check_maturity(&self, spec: &OptionSpec) -> Result<()> {
        let t = self.horizon();
        if (t - spec.maturity).abs() > 1e-9 * spec.maturity.max(1.0) {
            return Err(Error::GridMismatch(format!(
                "option maturity {} does not match path horizon {t}",
                spec.maturity
            )));
        }
        Ok(())
    }
}

/// Path-simulation settings for the spot model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathConfig {
    pub maturity: f64,
    pub steps: usize,
    pub paths: usize,
    pub truncation: usize,
    pub seed: u64,
}

/// `S_t = s0·exp((r−q)t + L_t − log E[e^{L_t}])` along CGMYSV paths.
pub fn spot_paths(params: &CgmysvParams, env: &MarketEnv, cfg: &PathConfig) -> Result<SpotPaths> {
    env.validate()?;
    if params.lambda_plus <= 1.0 {
        return Err(Error::invalid(
            "lambda_plus",
            format!("martingale correction needs lambda_plus > 1 (got {})", params.lambda_plus),
        ));
    }
    let sim = SimConfig::new(cfg.maturity, cfg.steps, cfg.paths, cfg.truncation, cfg.seed);
    let ps = generate_paths(params, &sim)?;
    let drift: Vec<f64> = ps
        .times
        .iter()
        .map(|&t| Ok((env.r - env.q) * t - log_exponential_moment(params, t)?))
        .collect::<Result<_>>()?;
    let spot = ps
        .l_paths
        .iter()
        .map(|l| l.iter().zip(&drift).map(|(l, d)| env.s0 * (l + d).exp()).collect())
        .collect();
    Ok(SpotPaths {
        times: ps.times,
        spot,
        variance: ps.v_paths,
        master_seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn env_43() -> MarketEnv {
        MarketEnv::new(2488.0, 0.0121, 0.0188).unwrap()
    }

    #[test]
    fn spec_validation() {
        let env = env_43();
        let call = OptionSpec::european(2500.0, 0.1, Right::Call);
        assert!(call.validate(&env).is_ok());
        assert!(call.with_barrier(Style::BarrierDownOut, 2400.0).validate(&env).is_ok());
        assert!(call.with_barrier(Style::BarrierDownOut, 2600.0).validate(&env).is_err());
        assert!(call.with_barrier(Style::BarrierUpOut, 2400.0).validate(&env).is_err());
        assert!(call.with_style(Style::BarrierUpOut).validate(&env).is_err());
        assert!(OptionSpec { barrier: Some(1.0), ..call }.validate(&env).is_err());
        assert!(OptionSpec::european(-1.0, 0.1, Right::Put).validate(&env).is_err());
        assert!(MarketEnv::new(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn result_interval() {
        let r = PricingResult::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(r.price, 2.5);
        assert!(r.ci_low <= r.price && r.price <= r.ci_high);
        assert!((r.ci_high - r.price - Z_975 * r.std_error).abs() < 1e-15);
        assert!(PricingResult::from_samples(&[]).is_err());
    }

    #[test]
    fn day_count() {
        assert_eq!(DayCount::Trading252.year_fraction(252.0), 1.0);
        assert_eq!(DayCount::from_days_per_year(365).unwrap(), DayCount::Calendar365);
        assert!(DayCount::from_days_per_year(360).is_err());
    }

    #[test]
    fn spot_starts_at_s0() {
        let p = CgmysvParams::reference();
        let cfg = PathConfig {
            maturity: 25.0 / 252.0,
            steps: 25,
            paths: 50,
            truncation: 1024,
            seed: 1,
        };
        let sp = spot_paths(&p, &env_43(), &cfg).unwrap();
        for path in &sp.spot {
            assert!((path[0] - 2488.0).abs() < 1e-10 * 2488.0);
        }
        let mut bad = p;
        bad.lambda_plus = 0.9;
        assert!(spot_paths(&bad, &env_43(), &cfg).is_err());
    }

    #[test]
    fn discounted_spot_is_a_martingale() {
        let p = CgmysvParams::reference();
        let env = env_43();
        let t = 25.0 / 252.0;
        let cfg = PathConfig {
            maturity: t,
            steps: 25,
            paths: 100_000,
            truncation: 1024,
            seed: 9,
        };
        let sp = spot_paths(&p, &env, &cfg).unwrap();
        let x: Vec<f64> = sp.terminal().iter().map(|s| s / env.forward(t)).collect();
        let r = PricingResult::from_samples(&x).unwrap();
        assert!((r.price - 1.0).abs() < 4.0 * r.std_error, "{} ± {}", r.price, r.std_error);
    }
}
