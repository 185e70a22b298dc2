//! Stochastic-volatility CGMY engine.
//!
//! Exact CIR variance sampling, truncated series simulation of time-changed
//! standard CGMY paths, Fourier inversion of the characteristic function,
//! Carr–Madan and Monte Carlo pricing (European, American via
//! Longstaff–Schwartz, arithmetic Asian, knock-out barrier) and least-squares
//! calibration to option chains.

pub mod calibration;
pub mod cgmy;
pub mod cgmysv;
pub mod cir;
pub mod density;
pub mod error;
pub mod pricing;
pub mod rng;
pub mod special;

pub use cgmy::{CgmyParams, LevySymbol, StdCgmyParams};
pub use cgmysv::{cgmysv_cf, generate_paths, CgmysvParams, PathSet, SimConfig};
pub use cir::{CirParams, VariancePath};
pub use density::{cdf_from_cf, ks_test, pdf_from_cf, InversionGrid, KsResult, Tabulated};
pub use error::{Error, Result};
pub use pricing::{MarketEnv, OptionSpec, PricingResult, Right, SpotPaths, Style};
pub use rng::{SeedSpec, Substream};
