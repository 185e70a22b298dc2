//! The stochastic-volatility CGMY process `L_t = Z_{V_t} + ρ v_t`.
//!
//! `Z` is a standard CGMY process run on the business clock
//! `V_t = ∫₀ᵗ v_s ds` of an independent CIR variance `v`. Paths are
//! generated by thinning a single truncated series over `(0, T)` with a
//! piecewise-constant Lévy intensity `c(τ) = C·v_{k−1}` on
//! `((k−1)Δt, kΔt]`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cgmy::{signed_jump, validate_alpha, LevySymbol, SeriesDraws, StdCgmyParams};
use crate::cir::{cir_joint_cf, fill_variance, CirParams, CirStep};
use crate::error::{ensure_positive, Error, Result};
use crate::rng::{SeedSpec, Substream};

/// `(α, λ₊, λ₋, κ, η, ζ, ρ, v₀)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CgmysvParams {
    pub alpha: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub kappa: f64,
    pub eta: f64,
    pub zeta: f64,
    pub rho: f64,
    pub v0: f64,
}

impl CgmysvParams {
    pub const NAMES: [&'static str; 8] = ["alpha", "lambda_plus", "lambda_minus", "kappa", "eta", "zeta", "rho", "v0"];

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        lambda_plus: f64,
        lambda_minus: f64,
        kappa: f64,
        eta: f64,
        zeta: f64,
        rho: f64,
        v0: f64,
    ) -> Result<Self> {
        let p = CgmysvParams {
            alpha,
            lambda_plus,
            lambda_minus,
            kappa,
            eta,
            zeta,
            rho,
            v0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        validate_alpha(self.alpha)?;
        self.std_cgmy().validate()?;
        self.cir().validate()?;
        if !self.rho.is_finite() {
            return Err(Error::invalid("rho", "must be finite"));
        }
        Ok(())
    }

    pub fn std_cgmy(&self) -> StdCgmyParams {
        StdCgmyParams {
            alpha: self.alpha,
            lambda_plus: self.lambda_plus,
            lambda_minus: self.lambda_minus,
        }
    }

    pub fn cir(&self) -> CirParams {
        CirParams {
            kappa: self.kappa,
            eta: self.eta,
            zeta: self.zeta,
            v0: self.v0,
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.alpha,
            self.lambda_plus,
            self.lambda_minus,
            self.kappa,
            self.eta,
            self.zeta,
            self.rho,
            self.v0,
        ]
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != 8 {
            return Err(Error::invalid("params", format!("expected 8 values, got {}", x.len())));
        }
        Self::new(x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7])
    }

    /// Simulation parameters used for the path-generation study.
    pub fn reference() -> Self {
        CgmysvParams {
            alpha: 0.52,
            lambda_plus: 25.46,
            lambda_minus: 4.604,
            kappa: 1.003,
            eta: 0.0711,
            zeta: 0.3443,
            rho: -2.028,
            v0: 0.0064,
        }
    }
}

/// `φ_{L_t}(u) = Φ_t(−iψ(u), ρu, v₀)` for complex `u` in the CGMY strip.
pub fn cgmysv_cf(params: &CgmysvParams, u: Complex64, t: f64) -> Result<Complex64> {
    let psi = params.std_cgmy().symbol(u)?;
    let a = -Complex64::i() * psi;
    cir_joint_cf(&params.cir(), a, params.rho * u, t, params.v0)
}

/// `log E[e^{L_t}]`, the martingale correction. Requires `λ₊ > 1`.
pub fn log_exponential_moment(params: &CgmysvParams, t: f64) -> Result<f64> {
    if params.lambda_plus <= 1.0 {
        return Err(Error::invalid(
            "lambda_plus",
            format!("E[exp(L_t)] is infinite unless lambda_plus > 1 (got {})", params.lambda_plus),
        ));
    }
    if t == 0.0 {
        return Ok(params.rho * params.v0);
    }
    if moment_explodes(params, 1.0, t) {
        return Err(Error::Domain(format!(
            "E[exp(L_t)] is infinite at t={t}: the variance clock explodes before maturity"
        )));
    }
    let phi = cgmysv_cf(params, Complex64::new(0.0, -1.0), t)?;
    if !(phi.re > 0.0) {
        return Err(Error::Numerical(format!("E[exp(L_t)] not positive at t={t}: {phi}")));
    }
    Ok(phi.re.ln())
}

/// Time at which `E[exp(θ L_s)]` first becomes infinite (`+∞` if never).
///
/// With `ψ̃ = log E[e^{θZ_1}]`, the moment is `E[exp(ψ̃ V_s + ρθ v_s)]`, whose
/// Riccati coefficient `B' = ½ζ²B² − κB + ψ̃`, `B(0) = ρθ`, blows up in
/// closed form. Requires `−λ₋ < θ < λ₊`.
pub fn explosion_time(params: &CgmysvParams, theta: f64) -> Result<f64> {
    let psi = params.std_cgmy().symbol(Complex64::new(0.0, -theta))?.re;
    let (kappa, z2) = (params.kappa, params.zeta * params.zeta);
    let b0 = params.rho * theta;
    let d = kappa * kappa - 2.0 * z2 * psi;
    if d < 0.0 {
        let s = (-d).sqrt();
        return Ok(2.0 / s * (std::f64::consts::FRAC_PI_2 - ((z2 * b0 - kappa) / s).atan()));
    }
    let sd = d.sqrt();
    let (r_lo, r_hi) = ((kappa - sd) / z2, (kappa + sd) / z2);
    if b0 <= r_hi {
        return Ok(f64::INFINITY);
    }
    Ok(((b0 - r_lo) / (b0 - r_hi)).ln() / sd)
}

fn moment_explodes(params: &CgmysvParams, theta: f64, t: f64) -> bool {
    explosion_time(params, theta).map_or(true, |s| s <= t)
}

/// Supremum of `θ ∈ (0, λ₊)` with `E[exp(θ L_t)] < ∞`.
pub fn critical_moment(params: &CgmysvParams, t: f64) -> Result<f64> {
    params.validate()?;
    ensure_positive("t", t)?;
    let top = params.lambda_plus;
    const SCAN: usize = 256;
    let mut prev = 0.0;
    for k in 1..=SCAN {
        let theta = top * k as f64 / (SCAN as f64 + 1.0);
        if moment_explodes(params, theta, t) {
            let (mut lo, mut hi) = (prev, theta);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if moment_explodes(params, mid, t) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(lo);
        }
        prev = theta;
    }
    Ok(top)
}

/// Grid and sample-size settings for path generation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub horizon: f64,
    pub steps: usize,
    pub paths: usize,
    pub truncation: usize,
    pub master_seed: u64,
    /// Retain the time-changed CGMY component `Y`.
    pub keep_y: bool,
}

impl SimConfig {
    pub fn new(horizon: f64, steps: usize, paths: usize, truncation: usize, master_seed: u64) -> Self {
        SimConfig {
            horizon,
            steps,
            paths,
            truncation,
            master_seed,
            keep_y: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("horizon", self.horizon)?;
        if self.steps == 0 {
            return Err(Error::invalid("steps", "need M >= 1"));
        }
        if self.paths == 0 {
            return Err(Error::invalid("paths", "need N >= 1"));
        }
        if self.truncation == 0 {
            return Err(Error::invalid("truncation", "need J >= 1"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.steps).map(|m| m as f64 * dt).collect()
    }
}

/// Simulated variance and CGMYSV paths on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSet {
    pub times: Vec<f64>,
    pub v_paths: Vec<Vec<f64>>,
    pub l_paths: Vec<Vec<f64>>,
    pub y_paths: Option<Vec<Vec<f64>>>,
    pub master_seed: u64,
}

impl PathSet {
    pub fn n_paths(&self) -> usize {
        self.l_paths.len()
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty grid")
    }

    /// Cross-section `L_{n, m}` over all paths.
    pub fn l_at(&self, m: usize) -> Vec<f64> {
        self.l_paths.iter().map(|p| p[m]).collect()
    }
}

/// Signed jump of one term with arrival-time dependent intensity `c(τ)`.
pub fn jump_scale_term(
    gamma_j: f64,
    e_j: f64,
    u_j: f64,
    v_j: f64,
    upward: bool,
    c_tau: f64,
    alpha: f64,
    horizon: f64,
) -> f64 {
    let m = crate::cgmy::jump_magnitude(gamma_j, e_j, u_j, v_j, c_tau * horizon, alpha);
    if upward {
        m
    } else {
        -m
    }
}

struct SinglePath {
    v: Vec<f64>,
    y: Vec<f64>,
}

/// Generates one path: CIR values from `variance_seed`, series terms from
/// `series_seed`, both on stream `stream_id`.
fn generate_one(
    params: &CgmysvParams,
    cfg: &SimConfig,
    stepper: &CirStep,
    c_std: f64,
    unit_drift: f64,
    variance_seed: u64,
    series_seed: u64,
    stream_id: u64,
) -> SinglePath {
    let m_steps = cfg.steps;
    let dt = cfg.dt();
    let mut v = Vec::with_capacity(m_steps + 1);
    v.push(params.v0);
    fill_variance(
        stepper,
        SeedSpec::new(variance_seed, stream_id, Substream::Cir),
        &mut v,
        m_steps,
    );

    let draws = SeriesDraws::draw(series_seed, stream_id, cfg.truncation, Some(cfg.horizon));
    let mut increments = vec![0.0; m_steps + 1];
    for term in &draws.terms {
        // (k−1)Δt < τ ≤ kΔt
        let k = ((term.tau / dt).ceil() as usize).clamp(1, m_steps);
        let c_tau = c_std * v[k - 1];
        increments[k] += signed_jump(
            term,
            params.lambda_plus,
            params.lambda_minus,
            c_tau * cfg.horizon,
            params.alpha,
        );
    }
    let mut y = Vec::with_capacity(m_steps + 1);
    y.push(0.0);
    let mut acc = 0.0;
    for m in 1..=m_steps {
        let b_m = v[m - 1] * unit_drift;
        acc += increments[m] + b_m * dt;
        y.push(acc);
    }
    SinglePath { v, y }
}

/// CGMYSV sample paths; every path draws from its own substreams of
/// `cfg.master_seed`, so the result is independent of scheduling.
pub fn generate_paths(params: &CgmysvParams, cfg: &SimConfig) -> Result<PathSet> {
    generate_paths_with_seeds(params, cfg, cfg.master_seed, cfg.master_seed)
}

/// As [`generate_paths`], with separate seeds for the variance clock and the
/// jump series.
pub fn generate_paths_with_seeds(
    params: &CgmysvParams,
    cfg: &SimConfig,
    variance_seed: u64,
    series_seed: u64,
) -> Result<PathSet> {
    params.validate()?;
    cfg.validate()?;
    let stepper = CirStep::new(&params.cir(), cfg.dt())?;
    let std = params.std_cgmy();
    let c_std = std.c_scale();
    let unit_drift = std.unit_drift();

    let singles: Vec<SinglePath> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|n| generate_one(params, cfg, &stepper, c_std, unit_drift, variance_seed, series_seed, n))
        .collect();

    let mut v_paths = Vec::with_capacity(cfg.paths);
    let mut l_paths = Vec::with_capacity(cfg.paths);
    let mut y_paths = cfg.keep_y.then(|| Vec::with_capacity(cfg.paths));
    for SinglePath { v, y } in singles {
        let l: Vec<f64> = y.iter().zip(&v).map(|(y, v)| y + params.rho * v).collect();
        if let Some(ys) = y_paths.as_mut() {
            ys.push(y);
        }
        v_paths.push(v);
        l_paths.push(l);
    }
    Ok(PathSet {
        times: cfg.times(),
        v_paths,
        l_paths,
        y_paths,
        master_seed: cfg.master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgmy::LevySymbol;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn cf_normalised() {
        let p = CgmysvParams::reference();
        for &t in &[1.0 / 252.0, 0.1, 2.0] {
            let phi = cgmysv_cf(&p, re(0.0), t).unwrap();
            assert!((phi - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn deterministic_clock_limit() {
        let mut p = CgmysvParams::reference();
        p.rho = 0.0;
        p.zeta = 1e-8;
        p.eta = p.v0;
        let t = 10.0 / 252.0;
        let std = p.std_cgmy();
        for k in -40..=40 {
            let u = k as f64 * 0.5;
            let a = cgmysv_cf(&p, re(u), t).unwrap();
            let b = std.cf_at(re(u), p.v0 * t).unwrap();
            assert!((a - b).norm() < 1e-4, "u={u}: {a} vs {b}");
        }
    }

    #[test]
    fn exponential_moment_matches_initial_leverage_at_zero() {
        let p = CgmysvParams::reference();
        assert_eq!(log_exponential_moment(&p, 0.0).unwrap(), p.rho * p.v0);
        let small = log_exponential_moment(&p, 1e-9).unwrap();
        assert!((small - p.rho * p.v0).abs() < 1e-8);
        let mut bad = p;
        bad.lambda_plus = 0.8;
        assert!(log_exponential_moment(&bad, 0.1).is_err());
    }

    #[test]
    fn jump_term_cases() {
        assert_eq!(jump_scale_term(1.0, 0.5, 0.25, 4.604, false, 0.0, 0.52, 0.4), 0.0);
        let tempered = 0.5 * 0.25f64.powf(1.0 / 0.52) / 4.604;
        let j = jump_scale_term(1e-3, 0.5, 0.25, 4.604, false, 1.0, 0.52, 0.4);
        assert_eq!(j, -tempered);
        assert!(jump_scale_term(1e15, 0.5, 0.25, 25.46, true, 1.0, 0.52, 0.4).abs() < 1e-20);
    }

    #[test]
    fn path_set_shape_and_start() {
        let p = CgmysvParams::reference();
        let mut cfg = SimConfig::new(100.0 / 252.0, 100, 20, 1024, 42);
        cfg.keep_y = true;
        let ps = generate_paths(&p, &cfg).unwrap();
        assert_eq!(ps.n_paths(), 20);
        assert_eq!(ps.times.len(), 101);
        for n in 0..20 {
            assert_eq!(ps.l_paths[n][0], p.rho * p.v0);
            assert_eq!(ps.y_paths.as_ref().unwrap()[n][0], 0.0);
            assert!(ps.v_paths[n].iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let p = CgmysvParams::reference();
        let cfg = SimConfig::new(0.1, 25, 64, 256, 7);
        let a = generate_paths(&p, &cfg).unwrap();
        let b = generate_paths(&p, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn series_seed_moves_l_but_not_v() {
        let p = CgmysvParams::reference();
        let cfg = SimConfig::new(0.1, 25, 16, 256, 7);
        let a = generate_paths_with_seeds(&p, &cfg, 7, 7).unwrap();
        let b = generate_paths_with_seeds(&p, &cfg, 7, 8).unwrap();
        assert_eq!(a.v_paths, b.v_paths);
        assert_ne!(a.l_paths, b.l_paths);
    }

    #[test]
    fn invalid_configs_rejected() {
        let p = CgmysvParams::reference();
        assert!(generate_paths(&p, &SimConfig::new(0.1, 0, 1, 1, 0)).is_err());
        assert!(generate_paths(&p, &SimConfig::new(0.1, 1, 0, 1, 0)).is_err());
        assert!(generate_paths(&p, &SimConfig::new(0.1, 1, 1, 0, 0)).is_err());
        assert!(generate_paths(&p, &SimConfig::new(-0.1, 1, 1, 1, 0)).is_err());
    }

    #[test]
    fn symmetric_case_has_real_cf() {
        let mut p = CgmysvParams::reference();
        p.rho = 0.0;
        p.lambda_plus = 10.0;
        p.lambda_minus = 10.0;
        let n = 10_000;
        let ps = generate_paths(&p, &SimConfig::new(25.0 / 252.0, 25, n, 1024, 3)).unwrap();
        let x = ps.l_at(25);
        for &u in &[2.0, 8.0, 20.0] {
            let s: Vec<f64> = x.iter().map(|&l| (u * l).sin()).collect();
            let m = s.iter().sum::<f64>() / n as f64;
            let sd = (s.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
            assert!(m.abs() < 4.0 * sd / (n as f64).sqrt(), "u={u}: E sin = {m}");
            assert!(cgmysv_cf(&p, re(u), 25.0 / 252.0).unwrap().im.abs() < 1e-12);
        }
    }

    #[test]
    fn monte_carlo_matches_cf() {
        let p = CgmysvParams::reference();
        let t = 10.0 / 252.0;
        let n = 10_000;
        let ps = generate_paths(&p, &SimConfig::new(t, 10, n, 1024, 2024)).unwrap();
        let x = ps.l_at(10);
        for &u in &[1.0, 5.0, 10.0] {
            let phi = cgmysv_cf(&p, re(u), t).unwrap();
            let (c, s): (Vec<f64>, Vec<f64>) = x.iter().map(|&l| ((u * l).cos(), (u * l).sin())).unzip();
            for (vals, target) in [(c, phi.re), (s, phi.im)] {
                let m = vals.iter().sum::<f64>() / n as f64;
                let sd = (vals.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
                let se = sd / (n as f64).sqrt();
                assert!((m - target).abs() < 4.0 * se + 1e-12, "u={u}: {m} vs {target} (se {se})");
            }
        }
    }

    #[test]
    fn explosion_time_matches_riccati_blow_up() {
        let p = CgmysvParams::new(0.0089, 2.0852, 6.2380, 1.4333, 0.1961, 1.1931, -0.1695, 0.0619).unwrap();
        for theta in [1.5, 1.9, 2.05] {
            let psi = p.std_cgmy().symbol(Complex64::new(0.0, -theta)).unwrap().re;
            let z2 = p.zeta * p.zeta;
            let rhs = |b: f64| 0.5 * z2 * b * b - p.kappa * b + psi;
            // RK4 until B passes 1e6
            let (mut b, mut s, h) = (p.rho * theta, 0.0, 1e-5);
            while b < 1e6 && s < 50.0 {
                let k1 = rhs(b);
                let k2 = rhs(b + 0.5 * h * k1);
                let k3 = rhs(b + 0.5 * h * k2);
                let k4 = rhs(b + h * k3);
                b += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
                s += h;
            }
            let closed = explosion_time(&p, theta).unwrap();
            // the remaining time from B = 1e6 to infinity is about 2/(ζ²·1e6)
            assert!((closed - s).abs() < 1e-4, "theta={theta}: {closed} vs {s}");
        }
        // the reference parameters never explode at order one
        assert_eq!(explosion_time(&CgmysvParams::reference(), 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn moments_finite_below_critical_order() {
        let p = CgmysvParams::new(0.0089, 2.0852, 6.2380, 1.4333, 0.1961, 1.1931, -0.1695, 0.0619).unwrap();
        // a horizon just past the blow-up time of the order-1.9 moment
        let t = 1.01 * explosion_time(&p, 1.9).unwrap();
        let theta = critical_moment(&p, t).unwrap();
        assert!(theta < 1.9 && theta > 1.0, "critical moment {theta}");
        let below = cgmysv_cf(&p, Complex64::new(0.0, -(theta - 0.05)), t).unwrap();
        assert!(below.re > 0.0 && below.im.abs() < 1e-9 * below.re);
        assert!(explosion_time(&p, theta + 1e-6).unwrap() <= t);
        assert!(explosion_time(&p, theta - 1e-6).unwrap() > t);
    }
}
