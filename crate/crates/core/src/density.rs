//! Fourier inversion of characteristic functions and Kolmogorov–Smirnov tests.
//!
//! Both the density and the distribution function are evaluated with a
//! midpoint rule on the positive frequency half-line, `u_j = (j + ½)Δu`,
//! accelerated by one FFT. The quadrature is periodic in `x` with period
//! `2π/Δu`; the grid places twice the tabulated range inside one period so
//! aliased tail mass stays negligible.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Magnitude below which the characteristic function counts as decayed.
pub const CF_TAIL_TOL: f64 = 1e-8;
const MIN_FREQ: usize = 1 << 14;
const MAX_FREQ: usize = 1 << 22;
const SD_MULTIPLE: f64 = 12.0;
const EDGE_MASS_TOL: f64 = 1e-7;

/// Frequency cutoff, FFT size and the tabulated abscissa range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InversionGrid {
    pub u_max: f64,
    pub n_freq: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl InversionGrid {
    pub fn new(u_max: f64, n_freq: usize, x_min: f64, x_max: f64) -> Result<Self> {
        let g = InversionGrid {
            u_max,
            n_freq,
            x_min,
            x_max,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid sized from `range = x_max − x_min`: `Δu = π/range` and enough
    /// nodes to reach `u_max`.
    pub fn covering(u_max: f64, x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_max > x_min) {
            return Err(Error::invalid("x_max", "must exceed x_min"));
        }
        let du = PI / (x_max - x_min);
        let needed = (u_max / du).ceil() as usize;
        let n_freq = needed.next_power_of_two().max(MIN_FREQ);
        if n_freq > MAX_FREQ {
            return Err(Error::Numerical(format!(
                "inversion grid needs {n_freq} nodes (u_max={u_max}, range={})",
                x_max - x_min
            )));
        }
        Self::new(u_max, n_freq, x_min, x_max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u_max > 0.0) || !self.u_max.is_finite() {
            return Err(Error::invalid("u_max", "must be positive and finite"));
        }
        if !self.n_freq.is_power_of_two() || self.n_freq < 2 {
            return Err(Error::invalid("n_freq", format!("{} is not a power of two", self.n_freq)));
        }
        if !(self.x_max > self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::invalid("x_max", "must exceed x_min"));
        }
        if self.n_freq as f64 * self.du() < self.u_max * (1.0 - 1e-12) {
            return Err(Error::invalid(
                "n_freq",
                format!("{} nodes at spacing {} stop short of u_max={}", self.n_freq, self.du(), self.u_max),
            ));
        }
        Ok(())
    }

    /// Frequency spacing; the quadrature period `2π/Δu` is twice the range.
    pub fn du(&self) -> f64 {
        PI / (self.x_max - self.x_min)
    }

    /// Abscissa spacing of the FFT output.
    pub fn dx(&self) -> f64 {
        2.0 * PI / (self.n_freq as f64 * self.du())
    }

    /// Builds a grid for `cf`: the range covers `±12` standard deviations
    /// (inferred from the curvature of `log φ` at 0) and is widened until the
    /// tabulated CDF leaves less than `1e−7` mass outside; `u_max` doubles
    /// until `|φ(u_max)| < 1e−8`.
    pub fn auto<F>(cf: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        let (mean, sd) = cf_moments(&cf)?;
        let u_max = decay_cutoff(&cf, 1.0 / sd)?;
        let mut half = SD_MULTIPLE * sd;
        for _ in 0..12 {
            let grid = Self::covering(u_max, mean - half, mean + half)?;
            let cdf = cdf_on_grid(&cf, &grid)?;
            let lo = cdf.values[0];
            let hi = 1.0 - cdf.values[cdf.values.len() - 1];
            if lo < EDGE_MASS_TOL && hi < EDGE_MASS_TOL {
                return Ok(grid);
            }
            half *= 2.0;
        }
        Err(Error::Numerical("tail mass does not vanish on any tried range".into()))
    }
}

/// Mean and standard deviation from central differences of `log φ` at 0.
pub fn cf_moments<F>(cf: &F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let estimate = |h: f64| -> Result<(f64, f64)> {
        let lp = cf(h)?.ln();
        let lm = cf(-h)?.ln();
        let mean = (lp - lm).im / (2.0 * h);
        let var = -(lp + lm).re / (h * h);
        Ok((mean, var))
    };
    let (_, var0) = estimate(1e-3)?;
    if !(var0 > 0.0) {
        return Err(Error::Numerical(format!("non-positive variance {var0} from the CF")));
    }
    let (mean, var) = estimate(1e-2 / var0.sqrt())?;
    if !(var > 0.0) || !mean.is_finite() {
        return Err(Error::Numerical(format!("bad CF moments mean={mean} var={var}")));
    }
    Ok((mean, var.sqrt()))
}

fn decay_cutoff<F>(cf: &F, start: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut u = start.max(1e-6);
    for _ in 0..80 {
        // Oscillating CFs can dip through zero; require three consecutive
        // octaves below tolerance.
        if (0..3).all(|k| cf(u * 2f64.powi(k)).map(|c| c.norm() < CF_TAIL_TOL).unwrap_or(false)) {
            return Ok(u);
        }
        u *= 2.0;
    }
    Err(Error::Numerical("characteristic function does not decay".into()))
}

/// Values on the uniform abscissae `x_min + k·dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl Tabulated {
    pub fn x(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.x(k)).collect()
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.values.len() - 1)
    }

    /// Linear interpolation; constant extrapolation beyond either end.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let s = (x - self.x0) / self.dx;
        if !(s > 0.0) {
            return self.values[0];
        }
        if s >= (n - 1) as f64 {
            return self.values[n - 1];
        }
        let k = s.floor() as usize;
        let w = s - k as f64;
        self.values[k] * (1.0 - w) + self.values[k + 1] * w
    }

    /// Riemann sum `Σ f·dx` with trapezoid end corrections.
    pub fn integral(&self) -> f64 {
        let v = &self.values;
        let inner: f64 = v.iter().sum();
        (inner - 0.5 * (v[0] + v[v.len() - 1])) * self.dx
    }

    /// Two-column CSV with header `x,value`.
    pub fn write_csv(&self, path: &Path, value_name: &str) -> Result<()> {
        let io = |source| Error::Io {
            path: path.display().to_string(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io)?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(w, "x,{value_name}").map_err(io)?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.x(k), v).map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// `Σ_j w(u_j) e^{−i u_j x_k}` for `u_j = (j+½)Δu`, `x_k = x_min + k·dx`,
/// returned for the abscissae inside `[x_min, x_max]`.
fn half_line_sums<F>(weight: F, grid: &InversionGrid) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    grid.validate()?;
    let n = grid.n_freq;
    let du = grid.du();
    let dx = grid.dx();
    let mut buf = Vec::with_capacity(n);
    for j in 0..n {
        let u = (j as f64 + 0.5) * du;
        let w = if u <= grid.u_max { weight(u)? } else { Complex64::new(0.0, 0.0) };
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::Numerical(format!("non-finite CF value at u={u}")));
        }
        buf.push(w * Complex64::from_polar(1.0, -u * grid.x_min));
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let n_out = (((grid.x_max - grid.x_min) / dx).round() as usize + 1).min(n);
    Ok((0..n_out)
        .map(|k| buf[k] * Complex64::from_polar(1.0, -PI * k as f64 / n as f64))
        .collect())
}

fn warn_if_truncated<F>(cf: &F, grid: &InversionGrid) -> Result<()>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let tail = cf(grid.u_max)?.norm();
    if tail >= CF_TAIL_TOL {
        log::warn!("|cf(u_max)| = {tail:.3e} at u_max = {}: frequency cutoff too small", grid.u_max);
    }
    Ok(())
}

/// Density `f(x) = (1/π) ∫₀^∞ Re(e^{−iux} φ(u)) du` on the grid abscissae.
pub fn pdf_from_cf<F>(cf: F, grid: &InversionGrid) -> Result<Tabulated>
where
    F: Fn(f64) -> Result<Complex64>,
{
    warn_if_truncated(&cf, grid)?;
    let du = grid.du();
    let sums = half_line_sums(&cf, grid)?;
    Ok(Tabulated {
        x0: grid.x_min,
        dx: grid.dx(),
        values: sums.iter().map(|s| s.re * du / PI).collect(),
    })
}

fn cdf_on_grid<F>(cf: &F, grid: &InversionGrid) -> Result<Tabulated>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let du = grid.du();
    let sums = half_line_sums(|u| Ok(cf(u)? / u), grid)?;
    let mut values: Vec<f64> = sums.iter().map(|s| 0.5 - s.im * du / PI).collect();
    let mut running = f64::NEG_INFINITY;
    for v in values.iter_mut() {
        running = running.max(*v);
        *v = running.clamp(0.0, 1.0);
    }
    Ok(Tabulated {
        x0: grid.x_min,
        dx: grid.dx(),
        values,
    })
}

/// Gil-Pelaez distribution function
/// `F(x) = ½ − (1/π) ∫₀^∞ Im(e^{−iux} φ(u))/u du`, rectified by a running
/// maximum so it is non-decreasing.
pub fn cdf_from_cf<F>(cf: F, grid: &InversionGrid) -> Result<Tabulated>
where
    F: Fn(f64) -> Result<Complex64>,
{
    warn_if_truncated(&cf, grid)?;
    cdf_on_grid(&cf, grid)
}

/// Unrectified Gil-Pelaez values, exposed to measure the rectification.
pub fn raw_cdf_from_cf<F>(cf: F, grid: &InversionGrid) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let du = grid.du();
    let sums = half_line_sums(|u| Ok(cf(u)? / u), grid)?;
    Ok(sums.iter().map(|s| 0.5 - s.im * du / PI).collect())
}

/// Result of a Kolmogorov–Smirnov test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Minimum sample size accepted by [`ks_test`].
pub const KS_MIN_SAMPLES: usize = 100;

/// One-sample test of sorted `samples` against `cdf`.
pub fn ks_test<F>(samples: &[f64], cdf: F) -> Result<KsResult>
where
    F: Fn(f64) -> f64,
{
    check_sorted(samples)?;
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::invalid(
            "samples",
            format!("need at least {KS_MIN_SAMPLES}, got {}", samples.len()),
        ));
    }
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(n.sqrt() * d),
        n: samples.len(),
    })
}

/// Two-sample test on sorted inputs; `n` reports the effective size
/// `n₁n₂/(n₁+n₂)` rounded down.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    check_sorted(a)?;
    check_sorted(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("samples", "both samples must be non-empty"));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = na * nb / (na + nb);
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(en.sqrt() * d),
        n: en as usize,
    })
}

/// Critical value of the two-sample statistic at significance `level`
/// (asymptotic, `c(level)·√((n₁+n₂)/(n₁n₂))`).
pub fn ks_two_sample_critical(n1: usize, n2: usize, level: f64) -> f64 {
    let c = (-0.5 * (level / 2.0).ln()).sqrt();
    c * ((n1 + n2) as f64 / (n1 as f64 * n2 as f64)).sqrt()
}

fn check_sorted(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("samples", "contains NaN"));
    }
    if xs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("samples", "must be sorted ascending"));
    }
    Ok(())
}

/// `P(K > x) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²x²}`, summed until a term drops
/// below `1e−10`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..100_000u64 {
        let term = 2.0 * (-2.0 * (k * k) as f64 * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-10 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Sorts a copy of `xs` in ascending order.
pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgmy::{LevySymbol, StdCgmyParams};
    use crate::cgmysv::{cgmysv_cf, CgmysvParams};
    use crate::rng::{SeedSpec, Substream};

    fn gauss(u: f64) -> Result<Complex64> {
        Ok(Complex64::new((-0.5 * u * u).exp(), 0.0))
    }

    fn normal_cdf(x: f64) -> f64 {
        // Abramowitz–Stegun 7.1.26 is too coarse; integrate the density instead.
        let n = 20_000;
        let a = -12.0;
        let h = (x - a) / n as f64;
        let f = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
        let mut s = f(a) + f(x);
        for k in 1..n {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn grid_validation() {
        assert!(InversionGrid::new(10.0, 1000, -1.0, 1.0).is_err());
        assert!(InversionGrid::new(-1.0, 1024, -1.0, 1.0).is_err());
        assert!(InversionGrid::new(10.0, 1024, 1.0, 1.0).is_err());
        assert!(InversionGrid::new(1e6, 16, -1.0, 1.0).is_err());
        assert!(InversionGrid::new(10.0, 1024, -8.0, 8.0).is_ok());
    }

    #[test]
    fn gaussian_pdf() {
        let grid = InversionGrid::covering(40.0, -12.0, 12.0).unwrap();
        let pdf = pdf_from_cf(gauss, &grid).unwrap();
        let err = pdf
            .xs()
            .iter()
            .zip(&pdf.values)
            .map(|(&x, &f)| (f - (-0.5 * x * x).exp() / (2.0 * PI).sqrt()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "sup error {err}");
        assert!((pdf.integral() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_quantile() {
        let grid = InversionGrid::auto(gauss).unwrap();
        let cdf = cdf_from_cf(gauss, &grid).unwrap();
        assert!((cdf.eval(1.959964) - 0.975).abs() < 1e-6);
        assert!((cdf.eval(0.0) - 0.5).abs() < 1e-9);
        assert!((cdf.eval(-1.0) - normal_cdf(-1.0)).abs() < 1e-6);
    }

    #[test]
    fn auto_grid_moments() {
        let (m, s) = cf_moments(&|u: f64| Ok(Complex64::from_polar((-2.0 * u * u).exp(), 0.3 * u))).unwrap();
        assert!((m - 0.3).abs() < 1e-6 && (s - 2.0).abs() < 1e-6);
    }

    #[test]
    fn std_cgmy_density_moments() {
        let p = StdCgmyParams::new(0.52, 25.46, 4.604).unwrap();
        let cf = |u: f64| p.cf(Complex64::new(u, 0.0));
        let grid = InversionGrid::auto(cf).unwrap();
        let pdf = pdf_from_cf(cf, &grid).unwrap();
        let xs = pdf.xs();
        let mass = pdf.integral();
        let mean: f64 = xs.iter().zip(&pdf.values).map(|(x, f)| x * f).sum::<f64>() * pdf.dx;
        let var: f64 = xs.iter().zip(&pdf.values).map(|(x, f)| x * x * f).sum::<f64>() * pdf.dx - mean * mean;
        assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
        assert!(mean.abs() < 1e-4, "mean {mean}");
        assert!((var - 1.0).abs() < 1e-3, "var {var}");
        let undershoot = pdf.values.iter().cloned().fold(0.0, f64::min);
        assert!(undershoot > -1e-6, "undershoot {undershoot}");
    }

    #[test]
    fn symmetric_cdf_is_half_at_zero() {
        let mut p = CgmysvParams::reference();
        p.rho = 0.0;
        p.lambda_plus = 8.0;
        p.lambda_minus = 8.0;
        let cf = |u: f64| cgmysv_cf(&p, Complex64::new(u, 0.0), 25.0 / 252.0);
        let grid = InversionGrid::auto(cf).unwrap();
        let cdf = cdf_from_cf(cf, &grid).unwrap();
        assert!((cdf.eval(0.0) - 0.5).abs() < 1e-6);
    }

    fn cgmysv_tables(days: f64) -> (Tabulated, Tabulated, Vec<f64>) {
        let p = CgmysvParams::reference();
        let cf = |u: f64| cgmysv_cf(&p, Complex64::new(u, 0.0), days / 252.0);
        let grid = InversionGrid::auto(cf).unwrap();
        (
            pdf_from_cf(cf, &grid).unwrap(),
            cdf_from_cf(cf, &grid).unwrap(),
            raw_cdf_from_cf(cf, &grid).unwrap(),
        )
    }

    #[test]
    fn cdf_matches_accumulated_pdf_and_is_monotone() {
        for days in [10.0, 100.0] {
            let (pdf, cdf, raw) = cgmysv_tables(days);
            assert_eq!(pdf.values.len(), cdf.values.len());
            let mut acc = cdf.values[0];
            let mut worst: f64 = 0.0;
            for k in 1..pdf.values.len() {
                acc += 0.5 * (pdf.values[k - 1] + pdf.values[k]) * pdf.dx;
                worst = worst.max((acc - cdf.values[k]).abs());
            }
            assert!(worst < 1e-4, "{days} days: {worst}");
            assert!(cdf.values.windows(2).all(|w| w[1] >= w[0]));
            let tv: f64 = raw.iter().zip(&cdf.values).map(|(r, c)| (r - c).abs()).sum::<f64>();
            assert!(tv < 1e-5, "rectification {tv}");
            assert!((pdf.integral() - 1.0).abs() < 1e-5);
            assert!(pdf.values.iter().all(|&f| f > -1e-6));
        }
    }

    #[test]
    fn parseval() {
        let p = CgmysvParams::reference();
        let t = 25.0 / 252.0;
        let cf = |u: f64| cgmysv_cf(&p, Complex64::new(u, 0.0), t);
        let grid = InversionGrid::auto(cf).unwrap();
        let pdf = pdf_from_cf(cf, &grid).unwrap();
        let x_side = pdf.values.iter().map(|f| f * f).sum::<f64>() * pdf.dx;
        let du = grid.du() / 8.0;
        let mut u_side = 0.0;
        let mut u = 0.5 * du;
        while u < grid.u_max {
            u_side += cf(u).unwrap().norm_sqr() * du;
            u += du;
        }
        u_side /= PI;
        assert!((x_side - u_side).abs() / u_side < 1e-4, "{x_side} vs {u_side}");
    }

    #[test]
    fn kolmogorov_series_values() {
        assert!((kolmogorov_survival(0.7) - 0.7112).abs() < 1e-4);
        let r = 0.0070 * 100.0;
        assert!((kolmogorov_survival(r) - 0.7129).abs() < 0.02);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(3.0) < 1e-7);
    }

    #[test]
    fn ks_rejects_unsorted_and_small() {
        let xs: Vec<f64> = (0..200).map(|k| k as f64).rev().collect();
        assert!(ks_test(&xs, |x| x).is_err());
        assert!(ks_test(&[0.1, 0.2], |x| x).is_err());
    }

    #[test]
    fn ks_at_exact_quantiles() {
        let n = 1000;
        let xs: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let r = ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.statistic <= 1.0 / (n + 1) as f64 + 1e-12);
    }

    #[test]
    fn p_values_are_calibrated() {
        let grid = InversionGrid::auto(gauss).unwrap();
        let cdf = cdf_from_cf(gauss, &grid).unwrap();
        let quantile = |p: f64| {
            // bisection on the tabulated CDF
            let (mut lo, mut hi) = (-12.0, 12.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if cdf.eval(mid) < p {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            0.5 * (lo + hi)
        };
        let reps = 200;
        let mut rejected = 0;
        for r in 0..reps {
            let mut g = SeedSpec::new(77, r, Substream::SeriesU).variates();
            let xs = sorted(&(0..500).map(|_| quantile(g.uniform())).collect::<Vec<_>>());
            if ks_test(&xs, |x| cdf.eval(x)).unwrap().p_value < 0.05 {
                rejected += 1;
            }
        }
        let frac = rejected as f64 / reps as f64;
        assert!((0.01..=0.10).contains(&frac), "rejection rate {frac}");
    }

    #[test]
    fn two_sample_same_law() {
        let mut g = SeedSpec::new(5, 0, Substream::SeriesE).variates();
        let a = sorted(&(0..4000).map(|_| g.standard_normal()).collect::<Vec<_>>());
        let b = sorted(&(0..3000).map(|_| g.standard_normal()).collect::<Vec<_>>());
        let r = ks_two_sample(&a, &b).unwrap();
        assert!(r.statistic < ks_two_sample_critical(4000, 3000, 0.01));
        let shifted: Vec<f64> = b.iter().map(|x| x + 0.3).collect();
        assert!(ks_two_sample(&a, &shifted).unwrap().p_value < 1e-6);
    }

    #[test]
    fn csv_export() {
        let dir = tempfile::tempdir().unwrap();
        let t = Tabulated {
            x0: -1.0,
            dx: 0.5,
            values: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        };
        let path = dir.path().join("cdf.csv");
        t.write_csv(&path, "cdf").unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("x,cdf\n"));
        assert_eq!(t.eval(-0.75), 0.125);
        assert_eq!(t.eval(-5.0), 0.0);
        assert_eq!(t.eval(5.0), 1.0);
    }
}
