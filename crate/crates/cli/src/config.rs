//! Run configuration read from TOML; every field has a default mirroring the
//! path-generation study (Δt = 1/252, M = 100, N = 10⁴, J = 1024).

use std::path::{Path, PathBuf};

use cgmysv_core::cgmy::CgmyParams;
use cgmysv_core::pricing::{DayCount, MarketEnv, OptionSpec, Right, Style, VolRegressor};
use cgmysv_core::CgmysvParams;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// 365 or 252.
    pub day_count: u32,
    pub out_dir: PathBuf,
    pub model: CgmysvParams,
    pub cgmy: Option<CgmyParams>,
    pub market: MarketEnv,
    pub grid: GridConfig,
    pub simulate: SimulateConfig,
    pub kstest: KsConfig,
    pub pdf: PdfConfig,
    pub lsm: LsmSection,
    pub options: Vec<OptionEntry>,
    pub calibrate: CalibrateConfig,
    pub bootstrap: BootstrapConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 2024,
            day_count: 252,
            out_dir: PathBuf::from("out"),
            model: CgmysvParams::reference(),
            cgmy: None,
            market: MarketEnv {
                s0: 2488.0,
                r: 0.0121,
                q: 0.0188,
            },
            grid: GridConfig::default(),
            simulate: SimulateConfig::default(),
            kstest: KsConfig::default(),
            pdf: PdfConfig::default(),
            lsm: LsmSection::default(),
            options: Vec::new(),
            calibrate: CalibrateConfig::default(),
            bootstrap: BootstrapConfig::default(),
        }
    }
}

/// Simulation grid: `steps` intervals of one day each unless `horizon_days`
/// says otherwise.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub horizon_days: f64,
    pub steps: usize,
    pub paths: usize,
    pub truncation: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            horizon_days: 100.0,
            steps: 100,
            paths: 10_000,
            truncation: 1024,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    /// Paths written to `paths.csv`; the summary uses all of them.
    pub write_paths: usize,
    /// Grid steps at which the summary is reported.
    pub summary_steps: Vec<usize>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            write_paths: 20,
            summary_steps: vec![10, 25, 50, 100],
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KsConfig {
    pub horizons: Vec<usize>,
}

impl Default for KsConfig {
    fn default() -> Self {
        KsConfig {
            horizons: vec![10, 25, 50, 100],
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PdfConfig {
    pub days: Vec<f64>,
}

impl Default for PdfConfig {
    fn default() -> Self {
        PdfConfig {
            days: vec![10.0, 25.0, 50.0, 100.0],
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LsmSection {
    pub vol_regressor: VolRegressor,
}

/// One option of the `price`/`bootstrap` commands. Style is kept as text so
/// an unknown style fails only its own row.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionEntry {
    pub strike: f64,
    pub days: f64,
    pub right: Right,
    #[serde(default = "default_style")]
    pub style: String,
    pub barrier: Option<f64>,
}

fn default_style() -> String {
    "european".into()
}

impl OptionEntry {
    pub fn to_spec(&self, dc: DayCount) -> Result<OptionSpec, String> {
        let style = match self.style.as_str() {
            "european" => Style::European,
            "american" => Style::American,
            "asian_arithmetic" => Style::AsianArithmetic,
            "barrier_down_out" => Style::BarrierDownOut,
            "barrier_up_out" => Style::BarrierUpOut,
            other => return Err(format!("unknown style '{other}'")),
        };
        Ok(OptionSpec {
            strike: self.strike,
            maturity: dc.year_fraction(self.days),
            right: self.right,
            style,
            barrier: self.barrier,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationModel {
    #[default]
    Cgmysv,
    Cgmy,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrateConfig {
    pub chain: Option<PathBuf>,
    /// Model used for American quotes.
    pub american_model: CalibrationModel,
    pub american_paths: usize,
    pub n_starts: usize,
    pub max_evals: usize,
    pub restarts: usize,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        CalibrateConfig {
            chain: None,
            american_model: CalibrationModel::Cgmysv,
            american_paths: 5000,
            n_starts: 5,
            max_evals: 4000,
            restarts: 3,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BootstrapConfig {
    /// Index into `options`.
    pub option: usize,
    pub repeats: usize,
    pub n_list: Vec<usize>,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            option: 0,
            repeats: 100,
            n_list: vec![100, 1000, 5000, 10_000],
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // chain paths are relative to the config file
        if let (Some(chain), Some(dir)) = (cfg.calibrate.chain.as_mut(), path.parent()) {
            if chain.is_relative() {
                *chain = dir.join(&*chain);
            }
        }
        Ok(cfg)
    }

    pub fn day_count(&self) -> Result<DayCount, CliError> {
        Ok(DayCount::from_days_per_year(self.day_count)?)
    }

    pub fn horizon(&self) -> Result<f64, CliError> {
        Ok(self.day_count()?.year_fraction(self.grid.horizon_days))
    }

    /// Checks everything shared by all commands.
    pub fn validate(&self) -> Result<(), CliError> {
        self.day_count()?;
        self.model.validate()?;
        self.market.validate()?;
        if let Some(c) = &self.cgmy {
            c.validate()?;
        }
        let g = &self.grid;
        if !(g.horizon_days > 0.0) {
            return Err(CliError::Config("grid.horizon_days must be positive".into()));
        }
        if g.steps == 0 || g.paths == 0 || g.truncation == 0 {
            return Err(CliError::Config("grid.steps, grid.paths and grid.truncation must be >= 1".into()));
        }
        for o in &self.options {
            if !(o.days > 0.0) {
                return Err(CliError::Config(format!("option days must be positive (got {})", o.days)));
            }
        }
        Ok(())
    }

    pub fn right_label(r: Right) -> &'static str {
        match r {
            Right::Call => "C",
            Right::Put => "P",
        }
    }
}
