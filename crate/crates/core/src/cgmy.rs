//! CGMY laws: characteristic functions, Lévy symbols, standardisation and
//! the truncated Rosiński series sampler.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};
use crate::rng::{arrivals_from_gaps, SeedSpec, Substream};
use crate::special::{expm1_c, gamma};

/// Default series truncation.
pub const DEFAULT_TRUNCATION: usize = 1024;

/// `CGMY(α, C, λ₊, λ₋, μ)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CgmyParams {
    pub alpha: f64,
    pub c_scale: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub mu: f64,
}

/// Standard CGMY: `C` and `μ` fixed so the law has mean 0 and variance 1.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StdCgmyParams {
    pub alpha: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("must lie in (0, 2), got {alpha}")));
    }
    if (alpha - 1.0).abs() < 1e-9 {
        return Err(Error::invalid("alpha", "alpha = 1 is not supported"));
    }
    Ok(())
}

impl CgmyParams {
    pub fn new(alpha: f64, c_scale: f64, lambda_plus: f64, lambda_minus: f64, mu: f64) -> Result<Self> {
        let p = CgmyParams {
            alpha,
            c_scale,
            lambda_plus,
            lambda_minus,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        validate_alpha(self.alpha)?;
        ensure_positive("c_scale", self.c_scale)?;
        ensure_positive("lambda_plus", self.lambda_plus)?;
        ensure_positive("lambda_minus", self.lambda_minus)?;
        if !self.mu.is_finite() {
            return Err(Error::invalid("mu", "must be finite"));
        }
        Ok(())
    }

    /// Centering `b = −CΓ(1−α)(λ₊^{α−1} − λ₋^{α−1})` of the series.
    pub fn series_drift(&self) -> f64 {
        let a = self.alpha;
        -self.c_scale * gamma(1.0 - a) * (self.lambda_plus.powf(a - 1.0) - self.lambda_minus.powf(a - 1.0))
    }
}

impl StdCgmyParams {
    pub fn new(alpha: f64, lambda_plus: f64, lambda_minus: f64) -> Result<Self> {
        let p = StdCgmyParams {
            alpha,
            lambda_plus,
            lambda_minus,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        validate_alpha(self.alpha)?;
        ensure_positive("lambda_plus", self.lambda_plus)?;
        ensure_positive("lambda_minus", self.lambda_minus)
    }

    /// `λ₊^{α−2} + λ₋^{α−2}`.
    fn tail_sum(&self) -> f64 {
        self.lambda_plus.powf(self.alpha - 2.0) + self.lambda_minus.powf(self.alpha - 2.0)
    }

    /// `C = (Γ(2−α)(λ₊^{α−2} + λ₋^{α−2}))^{−1}`.
    pub fn c_scale(&self) -> f64 {
        1.0 / (gamma(2.0 - self.alpha) * self.tail_sum())
    }

    pub fn to_cgmy(&self) -> CgmyParams {
        CgmyParams {
            alpha: self.alpha,
            c_scale: self.c_scale(),
            lambda_plus: self.lambda_plus,
            lambda_minus: self.lambda_minus,
            mu: 0.0,
        }
    }

    /// Per-unit-variance drift `−(λ₊^{α−1} − λ₋^{α−1}) / ((1−α)(λ₊^{α−2} + λ₋^{α−2}))`,
    /// i.e. `b / C·Γ(1−α)` written without gamma functions.
    pub fn unit_drift(&self) -> f64 {
        let a = self.alpha;
        -(self.lambda_plus.powf(a - 1.0) - self.lambda_minus.powf(a - 1.0)) / ((1.0 - a) * self.tail_sum())
    }
}

/// Log-characteristic function of a Lévy law at time 1.
pub trait LevySymbol {
    /// `ψ(u) = log E[e^{iuX_1}]`, continuous in `u` with `ψ(0) = 0`.
    fn symbol(&self, u: Complex64) -> Result<Complex64>;

    fn cf(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.symbol(u)?.exp())
    }

    /// Characteristic function of the process at time `t`.
    fn cf_at(&self, u: Complex64, t: f64) -> Result<Complex64> {
        Ok((t * self.symbol(u)?).exp())
    }
}

fn check_strip(u: Complex64, lambda_plus: f64, lambda_minus: f64) -> Result<()> {
    if u.im <= -lambda_plus || u.im >= lambda_minus || !u.is_finite() {
        return Err(Error::Domain(format!(
            "u = {u} outside the analyticity strip Im(u) in ({}, {lambda_minus})",
            -lambda_plus
        )));
    }
    Ok(())
}

/// `(λ₊ − iu)^α − λ₊^α + (λ₋ + iu)^α − λ₋^α` on the principal branch.
fn tempered_bracket(u: Complex64, alpha: f64, lambda_plus: f64, lambda_minus: f64) -> Complex64 {
    let i = Complex64::i();
    let side = |base: Complex64, lam: f64| {
        // (base)^α − λ^α = λ^α (exp(α log(base/λ)) − 1)
        let ratio = base / lam;
        lam.powf(alpha) * expm1_c(alpha * ratio.ln())
    };
    side(lambda_plus - i * u, lambda_plus) + side(lambda_minus + i * u, lambda_minus)
}

impl LevySymbol for CgmyParams {
    fn symbol(&self, u: Complex64) -> Result<Complex64> {
        check_strip(u, self.lambda_plus, self.lambda_minus)?;
        let a = self.alpha;
        let drift = self.mu + self.series_drift();
        let jump = self.c_scale * gamma(-a) * tempered_bracket(u, a, self.lambda_plus, self.lambda_minus);
        Ok(Complex64::i() * u * drift + jump)
    }
}

impl LevySymbol for StdCgmyParams {
    fn symbol(&self, u: Complex64) -> Result<Complex64> {
        check_strip(u, self.lambda_plus, self.lambda_minus)?;
        let a = self.alpha;
        let s = self.tail_sum();
        let lp = self.lambda_plus;
        let lm = self.lambda_minus;
        let drift = (lp.powf(a - 1.0) - lm.powf(a - 1.0)) / ((a - 1.0) * s);
        let jump = tempered_bracket(u, a, lp, lm) / (a * (a - 1.0) * s);
        Ok(Complex64::i() * u * drift + jump)
    }
}

pub fn cgmy_cf(params: &CgmyParams, u: Complex64) -> Result<Complex64> {
    params.cf(u)
}

pub fn std_cgmy_cf(params: &StdCgmyParams, u: Complex64) -> Result<Complex64> {
    params.cf(u)
}

pub fn levy_symbol<P: LevySymbol>(params: &P, u: Complex64) -> Result<Complex64> {
    params.symbol(u)
}

/// One term's raw ingredients `(Γ_j, E_j, U_j, U'_j, τ_j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesTerm {
    pub gamma: f64,
    pub e: f64,
    pub u: f64,
    /// `U'_j ≤ 1/2` selects `V_j = λ₊` (an upward jump).
    pub u_prime: f64,
    /// Arrival time on `(0, T)`; zero when the series is sampled as a variable.
    pub tau: f64,
}

impl SeriesTerm {
    #[inline]
    pub fn is_up(&self) -> bool {
        self.u_prime <= 0.5
    }
}

/// The per-path jump ingredients of a truncated series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesDraws {
    pub terms: Vec<SeriesTerm>,
}

impl SeriesDraws {
    /// Draws `truncation` terms for path `stream_id`. Each ingredient comes from
    /// its own substream. `horizon = None` leaves `τ_j = 0` and skips that stream.
    pub fn draw(master_seed: u64, stream_id: u64, truncation: usize, horizon: Option<f64>) -> Self {
        let base = SeedSpec::new(master_seed, stream_id, Substream::SeriesU);
        let mut gu = base.variates();
        let mut gup = base.with_substream(Substream::SeriesUPrime).variates();
        let mut ge = base.with_substream(Substream::SeriesE).variates();
        let mut gep = base.with_substream(Substream::SeriesEPrime).variates();
        let gaps: Vec<f64> = (0..truncation).map(|_| gep.exponential()).collect();
        let arrivals = arrivals_from_gaps(gaps);
        let mut gt = horizon.map(|_| base.with_substream(Substream::SeriesTau).variates());
        let terms = arrivals
            .into_iter()
            .map(|gamma| {
                let tau = match (&mut gt, horizon) {
                    (Some(g), Some(t)) => g.uniform() * t,
                    _ => 0.0,
                };
                SeriesTerm {
                    gamma,
                    e: ge.exponential(),
                    u: gu.uniform(),
                    u_prime: gup.uniform(),
                    tau,
                }
            })
            .collect();
        SeriesDraws { terms }
    }
}

/// Jump magnitude `(αΓ/(2·scale))^{−1/α} ∧ E U^{1/α} / |V|`, where `scale` is the
/// Lévy-measure mass factor (`C` for a variable, `C·T` or `c(τ)·T` for paths).
/// A non-positive scale yields no jump.
#[inline]
pub fn jump_magnitude(gamma_j: f64, e_j: f64, u_j: f64, v_abs: f64, scale: f64, alpha: f64) -> f64 {
    if scale <= 0.0 {
        return 0.0;
    }
    let inv_alpha = 1.0 / alpha;
    let stable = (alpha * gamma_j / (2.0 * scale)).powf(-inv_alpha);
    let tempered = e_j * u_j.powf(inv_alpha) / v_abs;
    stable.min(tempered)
}

/// Signed jump of one series term: `+` when `V_j = λ₊`, `−` when `V_j = λ₋`.
#[inline]
pub(crate) fn signed_jump(term: &SeriesTerm, lambda_plus: f64, lambda_minus: f64, scale: f64, alpha: f64) -> f64 {
    if term.is_up() {
        jump_magnitude(term.gamma, term.e, term.u, lambda_plus, scale, alpha)
    } else {
        -jump_magnitude(term.gamma, term.e, term.u, lambda_minus, scale, alpha)
    }
}

fn validate_truncation(truncation: usize) -> Result<()> {
    if truncation == 0 {
        Err(Error::invalid("truncation", "need J >= 1"))
    } else {
        Ok(())
    }
}

/// One draw of `X ~ CGMY(α, C, λ₊, λ₋, μ)` from the series truncated at `J` terms.
pub fn sample_cgmy_variable(params: &CgmyParams, truncation: usize, master_seed: u64, stream_id: u64) -> Result<f64> {
    params.validate()?;
    validate_truncation(truncation)?;
    let draws = SeriesDraws::draw(master_seed, stream_id, truncation, None);
    Ok(series_sum(params, &draws))
}

fn series_sum(params: &CgmyParams, draws: &SeriesDraws) -> f64 {
    let jumps: f64 = draws
        .terms
        .iter()
        .map(|t| signed_jump(t, params.lambda_plus, params.lambda_minus, params.c_scale, params.alpha))
        .sum();
    jumps + params.series_drift() + params.mu
}

/// `n` independent draws (stream ids `0..n`), generated in parallel.
pub fn sample_cgmy_variables(params: &CgmyParams, truncation: usize, n: usize, master_seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    validate_truncation(truncation)?;
    Ok((0..n as u64)
        .into_par_iter()
        .map(|k| series_sum(params, &SeriesDraws::draw(master_seed, k, truncation, None)))
        .collect())
}

/// A CGMY process path on `times` (`times[0] = 0`, last `≤ horizon`).
///
/// Jump `j` arrives at `τ_j ~ U(0, T)` with magnitude scaled by `C·T`; the drift is
/// `t·b_T` with the same `b_T` as the variable.
pub fn sample_cgmy_path(
    params: &CgmyParams,
    horizon: f64,
    times: &[f64],
    truncation: usize,
    master_seed: u64,
    stream_id: u64,
) -> Result<Vec<f64>> {
    params.validate()?;
    validate_truncation(truncation)?;
    ensure_positive("horizon", horizon)?;
    validate_times(times, horizon)?;
    let draws = SeriesDraws::draw(master_seed, stream_id, truncation, Some(horizon));
    Ok(path_from_draws(params, horizon, times, &draws))
}

pub(crate) fn validate_times(times: &[f64], horizon: f64) -> Result<()> {
    if times.is_empty() || times[0] != 0.0 {
        return Err(Error::invalid("times", "grid must start at 0"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("times", "grid must be strictly increasing"));
    }
    if *times.last().unwrap() > horizon * (1.0 + 1e-12) {
        return Err(Error::invalid("times", "grid extends past the horizon"));
    }
    Ok(())
}

pub(crate) fn path_from_draws(params: &CgmyParams, horizon: f64, times: &[f64], draws: &SeriesDraws) -> Vec<f64> {
    let scale = params.c_scale * horizon;
    // increments[k] collects jumps with times[k-1] < τ ≤ times[k]
    let mut increments = vec![0.0; times.len()];
    for term in &draws.terms {
        let slot = times.partition_point(|&t| t < term.tau);
        if slot == 0 || slot >= times.len() {
            continue;
        }
        increments[slot] += signed_jump(term, params.lambda_plus, params.lambda_minus, scale, params.alpha);
    }
    let drift = params.series_drift() + params.mu;
    let mut acc = 0.0;
    times
        .iter()
        .zip(increments)
        .map(|(&t, inc)| {
            acc += inc;
            acc + drift * t
        })
        .collect()
}
