//! CIR variance clock: exact transition sampling and the joint
//! characteristic function of `(v_t, ∫₀ᵗ v_s ds)`.

use num_complex::Complex64;

use crate::error::{ensure_positive, Error, Result};
use crate::rng::{SeedSpec, Variates};
use crate::special::{expm1_c, log1p_c};

/// Parameters of `dv = κ(η − v)dt + ζ√v dW`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CirParams {
    pub kappa: f64,
    pub eta: f64,
    pub zeta: f64,
    pub v0: f64,
}

impl CirParams {
    pub fn new(kappa: f64, eta: f64, zeta: f64, v0: f64) -> Result<Self> {
        let p = CirParams {
            kappa,
            eta,
            zeta,
            v0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("kappa", self.kappa)?;
        ensure_positive("eta", self.eta)?;
        ensure_positive("zeta", self.zeta)?;
        ensure_positive("v0", self.v0)
    }

    /// `2κη ≥ ζ²`. Diagnostic only; violating sets are still simulated exactly.
    pub fn feller_satisfied(&self) -> bool {
        2.0 * self.kappa * self.eta >= self.zeta * self.zeta
    }

    /// Degrees of freedom `4κη/ζ²` of the transition law.
    pub fn degrees_of_freedom(&self) -> f64 {
        4.0 * self.kappa * self.eta / (self.zeta * self.zeta)
    }

    /// `E[v_{t+dt} | v_t = v]`.
    pub fn conditional_mean(&self, v: f64, dt: f64) -> f64 {
        self.eta + (v - self.eta) * (-self.kappa * dt).exp()
    }

    /// `E[∫₀ᵗ v_s ds | v_0 = v]`.
    pub fn integrated_mean(&self, v: f64, t: f64) -> f64 {
        self.eta * t + (v - self.eta) * (1.0 - (-self.kappa * t).exp()) / self.kappa
    }
}

/// Transition sampler for a fixed step size.
#[derive(Clone, Copy, Debug)]
pub struct CirStep {
    scale: f64,
    df: f64,
    decay: f64,
}

impl CirStep {
    pub fn new(params: &CirParams, dt: f64) -> Result<Self> {
        params.validate()?;
        ensure_positive("dt", dt)?;
        let decay = (-params.kappa * dt).exp();
        // c = 2κ / ((1 − e^{−κΔt}) ζ²); -expm1 keeps precision for tiny κΔt.
        let scale = 2.0 * params.kappa / (-(-params.kappa * dt).exp_m1() * params.zeta * params.zeta);
        Ok(CirStep {
            scale,
            df: params.degrees_of_freedom(),
            decay,
        })
    }

    /// Draws `v_{t+dt}` given `v_t = v` as `ξ / (2c)`.
    #[inline]
    pub fn sample(&self, v: f64, variates: &mut Variates) -> f64 {
        let nc = 2.0 * self.scale * v * self.decay;
        variates.noncentral_chi_squared(self.df, nc) / (2.0 * self.scale)
    }
}

/// Exact one-step transition of the CIR process.
pub fn cir_transition(params: &CirParams, v_current: f64, dt: f64, seed: SeedSpec) -> Result<f64> {
    if !(v_current.is_finite() && v_current >= 0.0) {
        return Err(Error::invalid(
            "v_current",
            format!("must be >= 0, got {v_current}"),
        ));
    }
    let step = CirStep::new(params, dt)?;
    Ok(step.sample(v_current, &mut seed.variates()))
}

/// A sampled variance path on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VariancePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Left-endpoint running integral `Σ v_{k−1} Δt`.
    pub integrated: Vec<f64>,
}

/// Simulates `v` on `0 = t_0 < … < t_M = horizon`. Step `m` draws from
/// `seed.with_counter(m)`.
pub fn simulate_variance_path(
    params: &CirParams,
    horizon: f64,
    steps: usize,
    seed: SeedSpec,
) -> Result<VariancePath> {
    ensure_positive("horizon", horizon)?;
    if steps == 0 {
        return Err(Error::invalid("steps", "need at least one step"));
    }
    let dt = horizon / steps as f64;
    let stepper = CirStep::new(params, dt)?;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(params.v0);
    fill_variance(&stepper, seed, &mut values, steps);
    let times = (0..=steps).map(|m| m as f64 * dt).collect();
    let integrated = left_integral(&values, dt);
    Ok(VariancePath {
        times,
        values,
        integrated,
    })
}

pub(crate) fn fill_variance(stepper: &CirStep, seed: SeedSpec, values: &mut Vec<f64>, steps: usize) {
    let mut v = *values.last().expect("path seeded with v0");
    for m in 1..=steps {
        let mut g = seed.with_counter(m as u64).variates();
        v = stepper.sample(v, &mut g);
        values.push(v);
    }
}

pub(crate) fn left_integral(values: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for v in &values[..values.len() - 1] {
        acc += v * dt;
        out.push(acc);
    }
    out
}

/// `Φ_t(a, b, x) = A(t,a,b)·exp(B(t,a,b)·x)`, i.e. `E[exp(i·a·V_t + i·b·v_t) | v_0 = x]`.
///
/// `log A` is assembled as `(2κη/ζ²)·((κ−γ)t/2 − log(1 + w))` where
/// `2(1 + w) = (1+g) + (1−g)e^{−γt}`, `g = (κ − ibζ²)/γ`. Both factors are
/// computed without cancellation, so the small-`ζ` limit stays accurate.
/// The logarithm is the one continuous in `t` from `log 1 = 0`: when
/// `Re g > 0` it splits into two principal `log1p` terms, otherwise the phase
/// is unwrapped along `[0, t]`.
pub fn cir_joint_cf(params: &CirParams, a: Complex64, b: Complex64, t: f64, x: f64) -> Result<Complex64> {
    ensure_positive("t", t)?;
    let CirParams {
        kappa, eta, zeta, ..
    } = *params;
    let i = Complex64::i();
    let z2 = zeta * zeta;
    let gamma = (Complex64::from(kappa * kappa) - 2.0 * z2 * i * a).sqrt();
    // Re γ = 0 is legitimate (oscillating transform before moment explosion)
    if gamma.re < 0.0 || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "CIR transform outside strip: gamma = {gamma}"
        )));
    }
    // κ − γ = (κ² − γ²)/(κ + γ)
    let kappa_minus_gamma = 2.0 * z2 * i * a / (kappa + gamma);
    let k_b = Complex64::from(kappa) - i * b * z2;
    let g = k_b / gamma;
    let g_minus_1 = (kappa_minus_gamma - i * b * z2) / gamma;
    let e = (-gamma * t).exp();
    let one_minus_e = -expm1_c(-gamma * t);

    let denom = gamma * (1.0 + e) + k_b * one_minus_e;
    if denom.norm() <= 1e-300 * (gamma.norm() + k_b.norm()) {
        return Err(Error::Domain("CIR transform denominator vanishes".into()));
    }
    let big_b = (i * b * (gamma * (1.0 + e) - kappa * one_minus_e) + 2.0 * i * a * one_minus_e) / denom;

    let log_bracket = if g.re > 0.0 {
        let big_g = -g_minus_1 / (1.0 + g);
        log1p_c(0.5 * g_minus_1) + log1p_c(big_g * e)
    } else {
        winding_log_bracket(gamma, g_minus_1, 1.0 + g, t)?
    };
    let power = 2.0 * kappa * eta / z2;
    let log_a = power * (0.5 * kappa_minus_gamma * t - log_bracket);
    let out = (log_a + big_b * x).exp();
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::Numerical(format!(
            "CIR transform overflow at a={a}, b={b}, t={t}"
        )))
    }
}

/// Continuous `log(1 + w(s))` at `s = t` for `w(s) = (g−1)(1 − e^{−γs})/2`
/// when `Re g ≤ 0`.
///
/// Up to a constant factor `1 + w(s) = 1 − G e^{−γs}` with `G = (g−1)/(g+1)`,
/// `|G| ≥ 1`. While `|G e^{−γs}| > 1` the branch `log(−G) − γs + log(1 − 1/z)`
/// is continuous; afterwards the principal `log(1 − z)` is. The two are
/// joined at `|z| = 1` by a multiple of `2πi`.
fn winding_log_bracket(gamma: Complex64, g_minus_1: Complex64, g_plus_1: Complex64, t: f64) -> Result<Complex64> {
    if g_plus_1.norm() < 1e-300 {
        return Err(Error::Domain("CIR transform denominator vanishes".into()));
    }
    let big_g = g_minus_1 / g_plus_1;
    let z_at = |s: f64| big_g * (-gamma * s).exp();
    let outer = |s: f64| -gamma * s + log1p_c(-1.0 / z_at(s));
    let inner = |s: f64| log1p_c(-z_at(s));
    let s_star = big_g.norm().ln() / gamma.re;
    if !s_star.is_finite() {
        // |z(s)| = |G| for all s: a single branch covers the whole interval
        let out = if big_g.norm() >= 1.0 {
            outer(t) - outer(0.0)
        } else {
            inner(t) - inner(0.0)
        };
        return if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::Domain("CIR transform denominator vanishes".into()))
        };
    }
    if t <= s_star {
        return Ok(outer(t) - outer(0.0));
    }
    let log_neg_g = (-big_g).ln();
    let jump = log_neg_g + outer(s_star) - inner(s_star);
    let k = (jump.im / (2.0 * std::f64::consts::PI)).round();
    let out = inner(t) + Complex64::new(0.0, 2.0 * std::f64::consts::PI * k) - log_neg_g - outer(0.0);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::Domain("CIR transform denominator vanishes".into()))
    }
}

/// Tracks the argument of `1 + w(s)` numerically; oracle for the closed form.
#[cfg(test)]
fn unwrapped_log_bracket(gamma: Complex64, g_minus_1: Complex64, t: f64) -> Result<Complex64> {
    const SUBSTEPS: usize = 512;
    let mut unwrapped = 0.0;
    let mut prev_arg = 0.0;
    let mut last = Complex64::from(1.0);
    for k in 1..=SUBSTEPS {
        let s = t * k as f64 / SUBSTEPS as f64;
        let w = 0.5 * g_minus_1 * -expm1_c(-gamma * s);
        let d = 1.0 + w;
        if d.norm() < 1e-300 {
            return Err(Error::Domain("CIR transform denominator vanishes".into()));
        }
        let arg = d.arg();
        let mut delta = arg - prev_arg;
        while delta > std::f64::consts::PI {
            delta -= 2.0 * std::f64::consts::PI;
        }
        while delta < -std::f64::consts::PI {
            delta += 2.0 * std::f64::consts::PI;
        }
        unwrapped += delta;
        prev_arg = arg;
        last = d;
    }
    Ok(Complex64::new(last.norm().ln(), unwrapped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Substream;

    /// SPX call-column parameters.
    fn call_column() -> CirParams {
        CirParams::new(1.0029, 0.0711, 0.3443, 0.006381).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `E[exp(θV_t + φv_t)]` from the Riccati system by RK4.
    fn riccati_mgf(p: &CirParams, theta: f64, phi: f64, t: f64, x: f64) -> f64 {
        let n = 20_000;
        let h = t / n as f64;
        let db = |b: f64| theta - p.kappa * b + 0.5 * p.zeta * p.zeta * b * b;
        let (mut a, mut b) = (0.0, phi);
        for _ in 0..n {
            let k1 = db(b);
            let k2 = db(b + 0.5 * h * k1);
            let k3 = db(b + 0.5 * h * k2);
            let k4 = db(b + h * k3);
            // A' = κηB, integrated with Simpson on the same stages
            a += p.kappa * p.eta * h * (b + 2.0 * (b + 0.5 * h * k1) + 2.0 * (b + 0.5 * h * k2) + (b + h * k3)) / 6.0;
            b += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        }
        (a + b * x).exp()
    }

    #[test]
    fn moment_generating_function_beyond_the_real_gamma_region() {
        // θ above κ²/(2ζ²) makes γ purely imaginary; the transform stays
        // finite until the explosion time
        let p = CirParams::new(1.4333, 0.1961, 1.1931, 0.0619).unwrap();
        let threshold = p.kappa * p.kappa / (2.0 * p.zeta * p.zeta);
        for (theta, phi, t) in [(2.0 * threshold, 0.0, 0.1), (3.0, 0.5, 0.2), (0.5 * threshold, -1.0, 1.0), (1.25 * threshold, 0.3, 0.5)] {
            let got = cir_joint_cf(&p, c(0.0, -theta), c(0.0, -phi), t, p.v0).unwrap();
            let want = riccati_mgf(&p, theta, phi, t, p.v0);
            assert!(got.im.abs() < 1e-10 * want, "theta={theta}: {got}");
            assert!((got.re - want).abs() < 1e-8 * want, "theta={theta} phi={phi} t={t}: {} vs {want}", got.re);
        }
    }

    #[test]
    fn winding_branch_matches_numerical_unwrapping() {
        let p = call_column();
        let i = Complex64::i();
        let z2 = p.zeta * p.zeta;
        let mut checked = 0;
        for (ar, ai, br, bi) in [
            (0.0, 5.0, -400.0, 2.0),
            (3.0, 40.0, -900.0, 4.5),
            (0.5, 0.0, 60.0, 0.0),
            (-2.0, 300.0, 2000.0, -3.0),
            (10.0, 2.0, -50.0, 1.0),
        ] {
            let (a, b) = (c(ar, ai), c(br, bi));
            let gamma = (Complex64::from(p.kappa * p.kappa) - 2.0 * z2 * i * a).sqrt();
            let kmg = 2.0 * z2 * i * a / (p.kappa + gamma);
            let g = (p.kappa - i * b * z2) / gamma;
            let gm1 = (kmg - i * b * z2) / gamma;
            if g.re > 0.0 {
                continue;
            }
            for t in [0.01, 0.1, 0.5, 2.0, 10.0] {
                let fast = winding_log_bracket(gamma, gm1, 1.0 + g, t).unwrap();
                let slow = unwrapped_log_bracket(gamma, gm1, t).unwrap();
                assert!((fast - slow).norm() < 1e-9 * (1.0 + slow.norm()), "a={a} b={b} t={t}: {fast} vs {slow}");
                checked += 1;
            }
        }
        assert!(checked >= 10, "only {checked} cases on the winding branch");
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(CirParams::new(0.0, 0.1, 0.1, 0.1).is_err());
        let p = call_column();
        let seed = SeedSpec::new(1, 0, Substream::Cir);
        assert!(cir_transition(&p, 0.01, 0.0, seed).is_err());
        assert!(cir_transition(&p, -0.01, 0.1, seed).is_err());
        assert!(simulate_variance_path(&p, 1.0, 0, seed).is_err());
    }

    #[test]
    fn feller_indicator() {
        assert!(call_column().feller_satisfied());
        // the SPX put-column parameters violate it.
        assert!(!CirParams::new(1.4333, 0.1961, 1.1931, 0.0619).unwrap().feller_satisfied());
    }

    #[test]
    fn conditional_mean_of_transition() {
        let p = call_column();
        let dt = 1.0 / 252.0;
        let expected = p.conditional_mean(p.v0, dt);
        assert!((expected - 0.0066381).abs() < 1e-7);
        let step = CirStep::new(&p, dt).unwrap();
        let mut g = SeedSpec::new(99, 0, Substream::Cir).variates();
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| step.sample(p.v0, &mut g)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((mean - expected).abs() < 4.0 * (var / n as f64).sqrt());
        // Analytic conditional variance: v ζ²/κ (e^{−κΔt} − e^{−2κΔt}) + ηζ²/(2κ)(1 − e^{−κΔt})².
        let e = (-p.kappa * dt).exp();
        let z2 = p.zeta * p.zeta;
        let avar = p.v0 * z2 / p.kappa * (e - e * e) + p.eta * z2 / (2.0 * p.kappa) * (1.0 - e).powi(2);
        assert!((var - avar).abs() / avar < 0.02, "var {var} vs {avar}");
    }

    #[test]
    fn vanishing_vol_of_vol_is_deterministic() {
        let p = CirParams::new(1.0029, 0.0711, 1e-6, 0.006381).unwrap();
        let dt = 1.0 / 252.0;
        let x = cir_transition(&p, p.v0, dt, SeedSpec::new(3, 0, Substream::Cir)).unwrap();
        let ode = p.conditional_mean(p.v0, dt);
        assert!((x - ode).abs() / ode < 5e-6, "{x} vs {ode}");
    }

    #[test]
    fn zero_start_stays_positive() {
        let p = call_column();
        for k in 0..100 {
            let x = cir_transition(&p, 0.0, 1.0 / 252.0, SeedSpec::new(k, 0, Substream::Cir)).unwrap();
            assert!(x > 0.0);
        }
    }

    #[test]
    fn single_step_path() {
        let p = call_column();
        let path = simulate_variance_path(&p, 0.5, 1, SeedSpec::new(1, 0, Substream::Cir)).unwrap();
        assert_eq!(path.values.len(), 2);
        assert_eq!(path.values[0], p.v0);
        assert_eq!(path.integrated, vec![0.0, p.v0 * 0.5]);
    }

    #[test]
    fn terminal_mean_over_many_paths() {
        let p = call_column();
        let horizon = 100.0 / 252.0;
        let n = 10_000;
        let vt: Vec<f64> = (0..n)
            .map(|k| {
                let path = simulate_variance_path(&p, horizon, 100, SeedSpec::new(5, k, Substream::Cir)).unwrap();
                assert!(path.values.iter().all(|&v| v >= 0.0));
                assert!(path.integrated.windows(2).all(|w| w[1] >= w[0]));
                *path.values.last().unwrap()
            })
            .collect();
        let mean = vt.iter().sum::<f64>() / n as f64;
        let sd = (vt.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        let expected = p.conditional_mean(p.v0, horizon);
        assert!((expected - 0.027630).abs() < 1e-6);
        assert!((mean - expected).abs() < 4.0 * sd / (n as f64).sqrt(), "{mean} vs {expected}");
    }

    #[test]
    fn transform_is_normalised() {
        for p in [call_column(), CirParams::new(1.4333, 0.1961, 1.1931, 0.0619).unwrap()] {
            for &t in &[0.01, 0.5, 3.0, 30.0] {
                let phi = cir_joint_cf(&p, c(0.0, 0.0), c(0.0, 0.0), t, 0.37).unwrap();
                assert!((phi - 1.0).norm() < 1e-12, "{phi}");
            }
        }
    }

    #[test]
    fn derivative_in_b_gives_conditional_mean() {
        let p = call_column();
        let t = 0.4;
        let x = 0.02;
        let h = 1e-4;
        let plus = cir_joint_cf(&p, c(0.0, 0.0), c(h, 0.0), t, x).unwrap();
        let minus = cir_joint_cf(&p, c(0.0, 0.0), c(-h, 0.0), t, x).unwrap();
        let mean = ((plus - minus) / (2.0 * h) / Complex64::i()).re;
        let exact = p.conditional_mean(x, t);
        assert!((mean - exact).abs() / exact < 1e-6, "{mean} vs {exact}");
        // Same for a: E[V_t].
        let plus = cir_joint_cf(&p, c(h, 0.0), c(0.0, 0.0), t, x).unwrap();
        let minus = cir_joint_cf(&p, c(-h, 0.0), c(0.0, 0.0), t, x).unwrap();
        let mean_int = ((plus - minus) / (2.0 * h) / Complex64::i()).re;
        let exact_int = p.integrated_mean(x, t);
        assert!((mean_int - exact_int).abs() / exact_int < 1e-6);
    }

    #[test]
    fn variance_marginal_is_a_characteristic_function() {
        let p = CirParams::new(1.4333, 0.1961, 1.1931, 0.0619).unwrap();
        for k in -400..=400 {
            let b = k as f64 * 0.75;
            let phi = cir_joint_cf(&p, c(0.0, 0.0), c(b, 0.0), 2.0, p.v0).unwrap();
            assert!(phi.norm() <= 1.0 + 1e-12, "b={b}: {phi}");
        }
    }

    #[test]
    fn transform_is_continuous_in_b_for_long_maturity() {
        let p = CirParams::new(0.3, 0.2, 1.5, 0.04).unwrap();
        let t = 25.0;
        let max_jump = |step: f64| {
            let mut prev = cir_joint_cf(&p, c(0.0, 0.0), c(0.0, 0.0), t, p.v0).unwrap();
            let mut worst: f64 = 0.0;
            let mut b = step;
            while b <= 60.0 {
                let cur = cir_joint_cf(&p, c(0.0, 0.0), c(b, 0.0), t, p.v0).unwrap();
                worst = worst.max((cur - prev).norm());
                prev = cur;
                b += step;
            }
            worst
        };
        let coarse = max_jump(0.02);
        let fine = max_jump(0.005);
        assert!(fine < 0.5 * coarse + 1e-12, "coarse {coarse}, fine {fine}");
        assert!(fine < 1e-2);
    }

    #[test]
    fn laplace_transform_of_integrated_variance_matches_monte_carlo() {
        // Φ_t(i, 0, x) = E[exp(−V_t)]; scale up the exponent to −20 V_t for a sharper test.
        let p = call_column();
        let t = 28.0 / 365.0;
        let lam = 20.0;
        let phi = cir_joint_cf(&p, c(0.0, lam), c(0.0, 0.0), t, p.v0).unwrap();
        assert!(phi.im.abs() < 1e-14);
        let n = 100_000u64;
        let steps = 56;
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let path = simulate_variance_path(&p, t, steps, SeedSpec::new(17, k, Substream::Cir)).unwrap();
                // Trapezoid oracle, independent of the left rule used by the engine.
                let dt = t / steps as f64;
                let v = &path.values;
                let integral: f64 = v.windows(2).map(|w| 0.5 * (w[0] + w[1]) * dt).sum();
                (-lam * integral).exp()
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        let se = sd / (n as f64).sqrt();
        assert!((mean - phi.re).abs() < 4.0 * se, "MC {mean} ± {se} vs {}", phi.re);
    }
}
