//! Deterministic, substream-addressable random variates.
//!
//! Every variate in the engine is drawn from a generator keyed by
//! `(master_seed, stream_id, substream, counter)`. The key is hashed into a
//! ChaCha8 seed, so a stream never depends on how many variates any other
//! stream consumed. Paths can be generated in any order, on any number of
//! threads, and reproduce bit for bit.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use crate::error::{Error, Result};

/// Independent variate families used by the samplers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Substream {
    Cir,
    SeriesU,
    SeriesUPrime,
    SeriesE,
    SeriesEPrime,
    SeriesTau,
}

impl Substream {
    pub const ALL: [Substream; 6] = [
        Substream::Cir,
        Substream::SeriesU,
        Substream::SeriesUPrime,
        Substream::SeriesE,
        Substream::SeriesEPrime,
        Substream::SeriesTau,
    ];

    fn tag(self) -> u64 {
        match self {
            Substream::Cir => 0x43_49_52,
            Substream::SeriesU => 0x53_55,
            Substream::SeriesUPrime => 0x53_55_50,
            Substream::SeriesE => 0x53_45,
            Substream::SeriesEPrime => 0x53_45_50,
            Substream::SeriesTau => 0x53_54,
        }
    }
}

/// Address of one reproducible variate stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    /// One stream per sample path.
    pub stream_id: u64,
    pub substream: Substream,
    /// Secondary counter, e.g. the time step for per-step CIR draws.
    pub counter: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64, substream: Substream) -> Self {
        SeedSpec {
            master_seed,
            stream_id,
            substream,
            counter: 0,
        }
    }

    pub fn with_counter(self, counter: u64) -> Self {
        SeedSpec { counter, ..self }
    }

    pub fn with_substream(self, substream: Substream) -> Self {
        SeedSpec { substream, ..self }
    }

    /// Opens the generator for this address.
    pub fn variates(&self) -> Variates {
        let mut state = splitmix64(self.master_seed ^ 0x9E37_79B9_7F4A_7C15);
        state = splitmix64(state ^ self.stream_id);
        state = splitmix64(state ^ self.substream.tag());
        state = splitmix64(state ^ self.counter.wrapping_mul(0xD1B5_4A32_D192_ED03));
        let mut seed = [0u8; 32];
        let mut s = state;
        for chunk in seed.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        Variates {
            rng: ChaCha8Rng::from_seed(seed),
        }
    }
}

/// Derives a fresh master seed from a parent seed and a label. Used for
/// bootstrap repeats and multi-start optimisers.
pub fn derive_seed(parent: u64, label: u64) -> u64 {
    splitmix64(splitmix64(parent ^ 0xA076_1D64_78BD_642F) ^ label)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Inverse CDF of the rate-1 exponential law.
#[inline]
pub fn exponential_from_uniform(u: f64) -> f64 {
    -(1.0 - u).ln()
}

/// A value-like generator bound to one [`SeedSpec`].
#[derive(Clone, Debug)]
pub struct Variates {
    rng: ChaCha8Rng,
}

impl Variates {
    /// Uniform on the open interval (0, 1); exact zeros are rejected.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Central chi-square with `df > 0` degrees of freedom.
    pub fn chi_squared(&mut self, df: f64) -> f64 {
        // Gamma(df/2, scale 2); parameters are validated by callers.
        Gamma::new(0.5 * df, 2.0)
            .expect("chi-square degrees of freedom validated by caller")
            .sample(&mut self.rng)
    }

    pub fn poisson(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        let draw: f64 = Poisson::new(mean)
            .expect("poisson mean validated by caller")
            .sample(&mut self.rng);
        draw as u64
    }

    /// Non-central chi-square. For `df > 1` uses `chi2(df-1) + (Z + sqrt(nc))^2`,
    /// otherwise the Poisson mixture `chi2(df + 2N)`, `N ~ Poisson(nc/2)`.
    pub fn noncentral_chi_squared(&mut self, df: f64, noncentrality: f64) -> f64 {
        if noncentrality <= 0.0 {
            return self.chi_squared(df);
        }
        if df > 1.0 {
            let z = self.standard_normal() + noncentrality.sqrt();
            let rest = if df - 1.0 > 1e-12 {
                self.chi_squared(df - 1.0)
            } else {
                0.0
            };
            rest + z * z
        } else {
            let k = self.poisson(0.5 * noncentrality);
            self.chi_squared(df + 2.0 * k as f64)
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// `n` open-interval uniforms.
pub fn uniform(seed: SeedSpec, n: usize) -> Vec<f64> {
    let mut g = seed.variates();
    (0..n).map(|_| g.uniform()).collect()
}

/// `n` rate-1 exponentials.
pub fn exponential(seed: SeedSpec, n: usize) -> Vec<f64> {
    let mut g = seed.variates();
    (0..n).map(|_| g.exponential()).collect()
}

/// Arrival times `Γ_1 < … < Γ_n` of a unit-rate Poisson process.
pub fn poisson_arrivals(seed: SeedSpec, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("n", "poisson_arrivals needs n >= 1"));
    }
    Ok(arrivals_from_gaps(exponential(seed, n)))
}

/// Running sum of inter-arrival gaps.
pub fn arrivals_from_gaps(mut gaps: Vec<f64>) -> Vec<f64> {
    let mut acc = 0.0;
    for g in gaps.iter_mut() {
        acc += *g;
        *g = acc;
    }
    gaps
}

pub fn noncentral_chisq(seed: SeedSpec, df: f64, noncentrality: f64, n: usize) -> Result<Vec<f64>> {
    validate_ncx2(df, noncentrality)?;
    let mut g = seed.variates();
    Ok((0..n)
        .map(|_| g.noncentral_chi_squared(df, noncentrality))
        .collect())
}

pub(crate) fn validate_ncx2(df: f64, noncentrality: f64) -> Result<()> {
    if !(df.is_finite() && df > 0.0) {
        return Err(Error::invalid("df", format!("must be > 0, got {df}")));
    }
    if !(noncentrality.is_finite() && noncentrality >= 0.0) {
        return Err(Error::invalid(
            "noncentrality",
            format!("must be >= 0, got {noncentrality}"),
        ));
    }
    Ok(())
}
