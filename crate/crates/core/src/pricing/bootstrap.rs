//! Repeated pricing over sample sizes for dispersion studies.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BootstrapRow {
    pub n_paths: usize,
    pub repeat: usize,
    pub price: f64,
}

/// Runs `pricer(n_paths, seed)` `n_repeats` times for every size in
/// `n_list`. The seed of each run depends only on `(seed, n_paths, repeat)`.
pub fn bootstrap<F>(pricer: F, n_repeats: usize, n_list: &[usize], seed: u64) -> Result<Vec<BootstrapRow>>
where
    F: Fn(usize, u64) -> Result<f64> + Sync,
{
    if n_repeats < 2 {
        return Err(Error::invalid("n_repeats", "need at least 2 repeats"));
    }
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::invalid("n_list", "sample sizes must be positive"));
    }
    let jobs: Vec<(usize, usize)> = n_list
        .iter()
        .flat_map(|&n| (0..n_repeats).map(move |r| (n, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(n, r)| {
            let run_seed = derive_seed(derive_seed(seed, n as u64), r as u64);
            Ok(BootstrapRow {
                n_paths: n,
                repeat: r,
                price: pricer(n, run_seed)?,
            })
        })
        .collect()
}

/// Interquartile range with linear interpolation between order statistics.
pub fn interquartile_range(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let i = h.floor() as usize;
        let j = (i + 1).min(v.len() - 1);
        v[i] + (h - i as f64) * (v[j] - v[i])
    };
    q(0.75) - q(0.25)
}
