//! Carr–Madan FFT pricing of European options.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{MarketEnv, Right};
use crate::cgmysv::{cgmysv_cf, critical_moment, log_exponential_moment, CgmysvParams};
use crate::error::{ensure_positive, Error, Result};

const DEFAULT_DAMPING: f64 = 1.25;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FftConfig {
    /// `None` selects `min(1.25, (θ* − 1)/2)` where `θ*` is the critical
    /// moment of `L_t` (at most `λ₊`).
    pub damping: Option<f64>,
    /// Minimum number of nodes; grows when the spacing is tightened.
    pub n: usize,
    /// Largest frequency spacing used.
    pub eta: f64,
}

impl Default for FftConfig {
    fn default() -> Self {
        FftConfig {
            damping: None,
            n: 1 << 12,
            eta: 0.25,
        }
    }
}

/// Simpson weights mix trapezoid sums at `η` and `2η`, so log-strike
/// aliasing has period `π/η` and is damped by `exp(−damping · π/η)`; the
/// spacing is tightened until that exponent reaches `ALIAS_DECAY`.
const ALIAS_DECAY: f64 = 20.0;
const MAX_N: usize = 1 << 20;
/// Bound on `|φ(v_max − i(1+damping))| / (φ(−i(1+damping)) · v_max)`, the
/// relative size of the neglected frequency tail.
const TAIL_TOL: f64 = 1e-6;

impl FftConfig {
    /// The damped call transform needs `E[S_T^{1+damping}] < ∞`, which the
    /// variance clock can cut well below `λ₊`.
    fn damping_for(&self, params: &CgmysvParams, t: f64) -> Result<f64> {
        let strip = critical_moment(params, t)? - 1.0;
        if !(strip > 0.0) {
            return Err(Error::Domain(format!("E[S_T] is infinite at t={t}; no damping is admissible")));
        }
        match self.damping {
            None => Ok(DEFAULT_DAMPING.min(0.5 * strip)),
            Some(a) if a > 0.0 && a < strip => Ok(a),
            Some(a) => Err(Error::Domain(format!(
                "damping {a} leaves the CF strip: need 0 < damping < {strip} at t={t}"
            ))),
        }
    }

    /// `(n, η)` actually used for a given damping: `η` never exceeds the
    /// configured value and `n·η` never falls below the configured range.
    fn grid_for(&self, damping: f64) -> (usize, f64) {
        let eta = self.eta.min(PI * damping / ALIAS_DECAY);
        if eta < self.eta {
            let n = ((self.n as f64 * self.eta / eta).ceil() as usize).next_power_of_two();
            let n = n.min(MAX_N.max(self.n));
            (n, eta)
        } else {
            (self.n, self.eta)
        }
    }
}

/// Call or put prices at `strikes` for maturity `t` (years).
///
/// Calls come from the damped transform on a log-strike grid centred at
/// `ln s0`, interpolated by six-point Lagrange polynomials; puts follow from
/// put–call parity.
pub fn fft_european(
    params: &CgmysvParams,
    env: &MarketEnv,
    right: Right,
    t: f64,
    strikes: &[f64],
    cfg: &FftConfig,
) -> Result<Vec<f64>> {
    params.validate()?;
    env.validate()?;
    ensure_positive("maturity", t)?;
    if !cfg.n.is_power_of_two() || cfg.n < 16 {
        return Err(Error::invalid("n", "FFT size must be a power of two >= 16"));
    }
    ensure_positive("eta", cfg.eta)?;
    for &k in strikes {
        ensure_positive("strike", k)?;
    }
    let alpha = cfg.damping_for(params, t)?;
    let (mut n, eta) = cfg.grid_for(alpha);
    // slowly decaying transforms need a longer frequency range
    let scale = cgmysv_cf(params, Complex64::new(0.0, -(alpha + 1.0)), t)?.norm();
    while n < MAX_N {
        let v_max = n as f64 * eta;
        let tail = cgmysv_cf(params, Complex64::new(v_max, -(alpha + 1.0)), t)?.norm();
        if tail / (scale * v_max) <= TAIL_TOL {
            break;
        }
        n *= 2;
    }
    let lambda = 2.0 * PI / (n as f64 * eta);
    let k_min = env.s0.ln() - 0.5 * n as f64 * lambda;
    let log_drift = env.s0.ln() + (env.r - env.q) * t - log_exponential_moment(params, t)?;
    let disc = env.discount(t);

    let mut buf = Vec::with_capacity(n);
    for j in 0..n {
        let v = j as f64 * eta;
        let u = Complex64::new(v, -(alpha + 1.0));
        let phi = (Complex64::i() * u * log_drift).exp() * cgmysv_cf(params, u, t)?;
        let denom = Complex64::new(alpha * alpha + alpha - v * v, (2.0 * alpha + 1.0) * v);
        let simpson = match j {
            0 => 1.0 / 3.0,
            j if j % 2 == 1 => 4.0 / 3.0,
            _ => 2.0 / 3.0,
        };
        let w = disc * phi / denom * eta * simpson;
        buf.push(w * Complex64::from_polar(1.0, -v * k_min));
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let calls: Vec<f64> = buf
        .iter()
        .enumerate()
        .map(|(u, z)| (-alpha * (k_min + u as f64 * lambda)).exp() / PI * z.re)
        .collect();

    strikes
        .iter()
        .map(|&k| {
            let pos = (k.ln() - k_min) / lambda;
            if pos < 2.0 || pos > (n - 4) as f64 {
                return Err(Error::Domain(format!("strike {k} outside the FFT log-strike grid")));
            }
            let call = lagrange6(&calls, pos);
            Ok(match right {
                Right::Call => call,
                Right::Put => call - env.s0 * (-env.q * t).exp() + k * disc,
            })
        })
        .collect()
}

fn lagrange6(y: &[f64], pos: f64) -> f64 {
    let i = (pos.floor() as usize).saturating_sub(2);
    let s = pos - i as f64;
    let mut acc = 0.0;
    for a in 0..6 {
        let mut w = 1.0;
        for b in 0..6 {
            if a != b {
                w *= (s - b as f64) / (a as f64 - b as f64);
            }
        }
        acc += w * y[i + a];
    }
    acc
}
