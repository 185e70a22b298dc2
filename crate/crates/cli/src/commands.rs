//! Subcommand implementations. Each command computes its tables in full
//! before anything is written.

use std::collections::BTreeMap;

use cgmysv_core::calibration::{
    calibrate_american, calibrate_cgmy_american, calibrate_european, default_cgmy_bounds, default_cgmysv_bounds,
    write_params_csv, write_report_csv, write_trace_csv, AmericanSettings, CalibrationOutcome, EuropeanSettings,
    ExerciseStyle, OptionChain, OptimizerConfig,
};
use cgmysv_core::calibration::cgmy_spot_paths;
use cgmysv_core::cgmy::CgmyParams;
use cgmysv_core::density::{cdf_from_cf, pdf_from_cf, sorted, InversionGrid};
use cgmysv_core::pricing::{
    bootstrap, fft_european, interquartile_range, mc_price, spot_paths, FftConfig, LsmConfig, PathConfig,
    VolRegressor,
};
use cgmysv_core::rng::derive_seed;
use cgmysv_core::{cgmysv_cf, generate_paths, CgmysvParams, OptionSpec, SimConfig, SpotPaths, Style};
use num_complex::Complex64;

use crate::config::{CalibrationModel, OptionEntry, RunConfig};
use crate::error::CliError;
use crate::output::{num, write_tables, Table};

fn sim_config(cfg: &RunConfig) -> Result<SimConfig, CliError> {
    let sim = SimConfig::new(cfg.horizon()?, cfg.grid.steps, cfg.grid.paths, cfg.grid.truncation, cfg.seed);
    sim.validate()?;
    Ok(sim)
}

fn moments(xs: &[f64]) -> [f64; 4] {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    [mean, m2, m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0]
}

/// Sample paths and cross-sectional moments of `L`.
pub fn simulate(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let sim = sim_config(cfg)?;
    for &m in &cfg.simulate.summary_steps {
        if m == 0 || m > sim.steps {
            return Err(CliError::Config(format!(
                "summary step {m} outside 1..={}",
                sim.steps
            )));
        }
    }
    let set = generate_paths(&cfg.model, &sim)?;
    let mut paths = Table::new("paths.csv", &["path", "step", "t", "v", "l"]);
    for n in 0..cfg.simulate.write_paths.min(set.n_paths()) {
        for (m, t) in set.times.iter().enumerate() {
            paths.push(vec![
                n.to_string(),
                m.to_string(),
                num(*t),
                num(set.v_paths[n][m]),
                num(set.l_paths[n][m]),
            ]);
        }
    }
    let mut summary = Table::new("summary.csv", &["step", "t", "mean", "variance", "skewness", "excess_kurtosis"]);
    let mut steps = cfg.simulate.summary_steps.clone();
    steps.sort_unstable();
    steps.dedup();
    for m in steps {
        let [mean, var, skew, kurt] = moments(&set.l_at(m));
        summary.push(vec![m.to_string(), num(set.times[m]), num(mean), num(var), num(skew), num(kurt)]);
    }
    Ok(vec![paths, summary])
}

fn cf_closure(params: &CgmysvParams, t: f64) -> impl Fn(f64) -> cgmysv_core::Result<Complex64> + '_ {
    move |u| cgmysv_cf(params, Complex64::new(u, 0.0), t)
}

/// Kolmogorov–Smirnov distances between simulated `L_t` and the inverted
/// model CDF. Horizons are grid step indices.
pub fn kstest(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let sim = sim_config(cfg)?;
    let mut horizons = cfg.kstest.horizons.clone();
    horizons.sort_unstable();
    horizons.dedup();
    if let Some(&m) = horizons.iter().find(|&&m| m == 0 || m > sim.steps) {
        return Err(CliError::Config(format!("kstest horizon {m} outside 1..={}", sim.steps)));
    }
    let mut table = Table::new("kstest.csv", &["horizon", "t", "statistic", "p_value", "n"]);
    if horizons.is_empty() {
        return Ok(vec![table]);
    }
    let set = generate_paths(&cfg.model, &sim)?;
    for m in horizons {
        let t = set.times[m];
        let cf = cf_closure(&cfg.model, t);
        let grid = InversionGrid::auto(&cf)?;
        let cdf = cdf_from_cf(&cf, &grid)?;
        let ks = cgmysv_core::ks_test(&sorted(&set.l_at(m)), |x| cdf.eval(x))?;
        table.push(vec![m.to_string(), num(t), num(ks.statistic), num(ks.p_value), ks.n.to_string()]);
    }
    Ok(vec![table])
}

/// Density of `L_t` at each requested day, in long format.
pub fn pdf(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let dc = cfg.day_count()?;
    let mut days = cfg.pdf.days.clone();
    if let Some(d) = days.iter().find(|d| !(**d > 0.0)) {
        return Err(CliError::Config(format!("pdf day {d} must be positive")));
    }
    days.sort_by(f64::total_cmp);
    days.dedup();
    let mut table = Table::new("pdf.csv", &["days", "t", "x", "pdf"]);
    for d in days {
        let t = dc.year_fraction(d);
        let cf = cf_closure(&cfg.model, t);
        let grid = InversionGrid::auto(&cf)?;
        let f = pdf_from_cf(&cf, &grid)?;
        for (k, v) in f.values.iter().enumerate() {
            table.push(vec![num(d), num(t), num(f.x(k)), num(*v)]);
        }
    }
    Ok(vec![table])
}

fn lsm_config(cfg: &RunConfig) -> LsmConfig {
    LsmConfig {
        vol_regressor: cfg.lsm.vol_regressor,
    }
}

/// One grid step per day to expiry.
fn path_config(cfg: &RunConfig, days: f64, paths: usize, seed: u64) -> Result<PathConfig, CliError> {
    Ok(PathConfig {
        maturity: cfg.day_count()?.year_fraction(days),
        steps: (days.round() as usize).max(1),
        paths,
        truncation: cfg.grid.truncation,
        seed,
    })
}

const PRICE_HEADER: [&str; 14] = [
    "index", "model", "method", "strike", "days", "right", "style", "barrier", "price", "std_error", "ci_low",
    "ci_high", "n_paths", "error",
];

struct PriceRow<'a> {
    index: usize,
    model: &'static str,
    method: &'static str,
    entry: &'a OptionEntry,
}

impl PriceRow<'_> {
    fn cells(&self, outcome: Result<cgmysv_core::PricingResult, String>) -> Vec<String> {
        let e = self.entry;
        let mut row = vec![
            self.index.to_string(),
            self.model.to_string(),
            self.method.to_string(),
            num(e.strike),
            num(e.days),
            RunConfig::right_label(e.right).to_string(),
            e.style.clone(),
            e.barrier.map(num).unwrap_or_default(),
        ];
        match outcome {
            Ok(r) => {
                row.extend([num(r.price), num(r.std_error), num(r.ci_low), num(r.ci_high), r.n_paths.to_string()]);
                row.push(String::new());
            }
            Err(msg) => {
                log::error!("option {} ({}/{}): {msg}", self.index, self.model, self.method);
                row.extend(std::iter::repeat_n(String::new(), 5));
                row.push(msg.replace([',', '\n'], ";"));
            }
        }
        row
    }
}

/// Routes every option to its pricer; European options get both an FFT and
/// a Monte Carlo row. Failures are reported per row.
pub fn price(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let dc = cfg.day_count()?;
    let lsm = lsm_config(cfg);
    let mut cache: BTreeMap<(u64, bool), Result<SpotPaths, String>> = BTreeMap::new();
    let mut paths_for = |days: f64, baseline: bool| -> Result<SpotPaths, String> {
        cache
            .entry((days.to_bits(), baseline))
            .or_insert_with(|| {
                let pc = path_config(cfg, days, cfg.grid.paths, cfg.seed).map_err(|e| e.to_string())?;
                let res = match (&cfg.cgmy, baseline) {
                    (Some(c), true) => cgmy_spot_paths(c, &cfg.market, &pc),
                    _ => spot_paths(&cfg.model, &cfg.market, &pc),
                };
                res.map_err(|e| e.to_string())
            })
            .clone()
    };
    let mut table = Table::new("prices.csv", &PRICE_HEADER);
    for (index, entry) in cfg.options.iter().enumerate() {
        let spec = entry
            .to_spec(dc)
            .and_then(|s| s.validate(&cfg.market).map(|_| s).map_err(|e| e.to_string()));
        let row = |model, method| PriceRow {
            index,
            model,
            method,
            entry,
        };
        let spec = match spec {
            Ok(s) => s,
            Err(msg) => {
                table.push(row("cgmysv", "none").cells(Err(msg)));
                continue;
            }
        };
        if spec.style == Style::European {
            let fft = fft_european(&cfg.model, &cfg.market, spec.right, spec.maturity, &[spec.strike], &FftConfig::default())
                .map(|p| cgmysv_core::PricingResult::exact(p[0]))
                .map_err(|e| e.to_string());
            table.push(row("cgmysv", "fft").cells(fft));
        }
        let method = if spec.style == Style::American { "lsm" } else { "mc" };
        let mc = paths_for(entry.days, false).and_then(|p| mc_price(&p, &spec, &cfg.market, &lsm).map_err(|e| e.to_string()));
        table.push(row("cgmysv", method).cells(mc));
        if cfg.cgmy.is_some() {
            let base_lsm = LsmConfig {
                vol_regressor: VolRegressor::None,
            };
            let mc = paths_for(entry.days, true)
                .and_then(|p| mc_price(&p, &spec, &cfg.market, &base_lsm).map_err(|e| e.to_string()));
            table.push(row("cgmy", method).cells(mc));
        }
    }
    Ok(vec![table])
}

fn optimizer(cfg: &RunConfig) -> OptimizerConfig {
    OptimizerConfig {
        max_evals: cfg.calibrate.max_evals,
        n_starts: cfg.calibrate.n_starts,
        restarts: cfg.calibrate.restarts,
        seed: cfg.seed,
        ..OptimizerConfig::default()
    }
}

/// Calibration results; written by [`write_calibration`] because the core
/// crate owns these file formats.
pub struct CalibrationRun {
    pub label: &'static str,
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
    pub outcome_report: cgmysv_core::calibration::ErrorReport,
    pub trace: Vec<cgmysv_core::calibration::TraceRow>,
    pub fitted: Table,
}

fn fitted_table(label: &'static str, chain: &OptionChain, model: &[f64]) -> Table {
    let name = if label == "european" { "european_fit.csv" } else { "american_fit.csv" };
    let mut t = Table::new(name, &["expiry_date", "days", "strike", "right", "market", "model"]);
    for (q, m) in chain.quotes.iter().zip(model) {
        t.push(vec![
            q.expiry.to_string(),
            q.days.to_string(),
            num(q.strike),
            RunConfig::right_label(q.right).to_string(),
            num(q.price),
            num(*m),
        ]);
    }
    t
}

fn run_from<P>(
    label: &'static str,
    names: &[&'static str],
    values: Vec<f64>,
    chain: &OptionChain,
    out: CalibrationOutcome<P>,
) -> CalibrationRun {
    CalibrationRun {
        label,
        names: names.to_vec(),
        values,
        fitted: fitted_table(label, chain, &out.model_prices),
        outcome_report: out.report,
        trace: out.trace,
    }
}

const CGMY_NAMES: [&str; 4] = ["alpha", "c", "lambda_plus", "lambda_minus"];

/// Splits the chain by exercise style and calibrates each part.
pub fn calibrate(cfg: &RunConfig) -> Result<Vec<CalibrationRun>, CliError> {
    let path = cfg
        .calibrate
        .chain
        .as_ref()
        .ok_or_else(|| CliError::Config("calibrate.chain is not set".into()))?;
    let chain = OptionChain::read_csv(path)?;
    if chain.quotes.is_empty() {
        return Err(CliError::Config(format!("{}: chain has no quotes", path.display())));
    }
    let dc = cfg.day_count()?;
    let part = |style: ExerciseStyle| OptionChain {
        quote_date: chain.quote_date,
        env: chain.env,
        quotes: chain.quotes.iter().filter(|q| q.style == style).cloned().collect(),
    };
    let mut runs = Vec::new();
    let european = part(ExerciseStyle::European);
    if !european.quotes.is_empty() {
        let settings = EuropeanSettings {
            day_count: dc,
            fft: FftConfig::default(),
            optimizer: optimizer(cfg),
        };
        let out = calibrate_european(&european, &cfg.model, &default_cgmysv_bounds(), &settings)?;
        let values = out.params.to_array().to_vec();
        runs.push(run_from("european", &CgmysvParams::NAMES, values, &european, out));
    }
    let american = part(ExerciseStyle::American);
    if !american.quotes.is_empty() {
        let mc = AmericanSettings {
            paths: cfg.calibrate.american_paths,
            truncation: cfg.grid.truncation,
            master_seed: cfg.seed,
            lsm: lsm_config(cfg),
            day_count: dc,
            optimizer: optimizer(cfg),
        };
        match cfg.calibrate.american_model {
            CalibrationModel::Cgmysv => {
                let out = calibrate_american(&american, &cfg.model, &default_cgmysv_bounds(), &mc)?;
                let values = out.params.to_array().to_vec();
                runs.push(run_from("american", &CgmysvParams::NAMES, values, &american, out));
            }
            CalibrationModel::Cgmy => {
                let init: CgmyParams = cfg
                    .cgmy
                    .ok_or_else(|| CliError::Config("american_model = \"cgmy\" needs a [cgmy] section".into()))?;
                let out = calibrate_cgmy_american(&american, &init, &default_cgmy_bounds(), &mc)?;
                let p = out.params;
                let values = vec![p.alpha, p.c_scale, p.lambda_plus, p.lambda_minus];
                runs.push(run_from("american", &CGMY_NAMES, values, &american, out));
            }
        }
    }
    Ok(runs)
}

pub fn write_calibration(dir: &std::path::Path, runs: &[CalibrationRun]) -> Result<(), CliError> {
    crate::output::ensure_dir(dir)?;
    for r in runs {
        write_params_csv(&dir.join(format!("{}_params.csv", r.label)), &r.names, &r.values)?;
        write_report_csv(&dir.join(format!("{}_report.csv", r.label)), &r.outcome_report)?;
        write_trace_csv(&dir.join(format!("{}_trace.csv", r.label)), &r.names, &r.trace)?;
    }
    write_tables(dir, runs.iter().map(|r| &r.fitted))?;
    Ok(())
}

/// Monte Carlo price of `spec` with `n` paths from `seed`.
fn mc_once(cfg: &RunConfig, entry: &OptionEntry, spec: &OptionSpec, n: usize, seed: u64) -> cgmysv_core::Result<f64> {
    let pc = path_config(cfg, entry.days, n, seed).map_err(|e| cgmysv_core::Error::Numerical(e.to_string()))?;
    let paths = spot_paths(&cfg.model, &cfg.market, &pc)?;
    Ok(mc_price(&paths, spec, &cfg.market, &lsm_config(cfg))?.price)
}

/// Repeated Monte Carlo prices of one option over several sample sizes.
pub fn bootstrap_cmd(cfg: &RunConfig) -> Result<Vec<Table>, CliError> {
    let b = &cfg.bootstrap;
    let entry = cfg.options.get(b.option).ok_or_else(|| {
        CliError::Config(format!("bootstrap.option = {} but only {} option(s) given", b.option, cfg.options.len()))
    })?;
    let spec = entry.to_spec(cfg.day_count()?).map_err(CliError::Config)?;
    spec.validate(&cfg.market)?;
    if b.repeats == 0 || b.n_list.is_empty() || b.n_list.contains(&0) {
        return Err(CliError::Config("bootstrap needs repeats >= 1 and positive sample sizes".into()));
    }
    let pricer = |n: usize, seed: u64| mc_once(cfg, entry, &spec, n, seed);
    let rows = if b.repeats == 1 {
        // same seed derivation as the multi-repeat driver, first repeat
        b.n_list
            .iter()
            .map(|&n| {
                let seed = derive_seed(derive_seed(cfg.seed, n as u64), 0);
                Ok(cgmysv_core::pricing::BootstrapRow {
                    n_paths: n,
                    repeat: 0,
                    price: pricer(n, seed)?,
                })
            })
            .collect::<cgmysv_core::Result<Vec<_>>>()?
    } else {
        bootstrap(pricer, b.repeats, &b.n_list, cfg.seed)?
    };
    let mut long = Table::new("bootstrap.csv", &["n_paths", "repeat", "price"]);
    for r in &rows {
        long.push(vec![r.n_paths.to_string(), r.repeat.to_string(), num(r.price)]);
    }
    let mut summary = Table::new("bootstrap_summary.csv", &["n_paths", "repeats", "mean", "iqr"]);
    for &n in &b.n_list {
        let xs: Vec<f64> = rows.iter().filter(|r| r.n_paths == n).map(|r| r.price).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        summary.push(vec![n.to_string(), xs.len().to_string(), num(mean), num(interquartile_range(&xs))]);
    }
    Ok(vec![long, summary])
}
