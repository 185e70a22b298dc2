//! Pricing-error estimators.

use crate::error::{Error, Result};

/// Quotes priced below this are left out of the relative error.
pub const ARPE_MIN_PRICE: f64 = 0.10;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ErrorReport {
    /// Average absolute error.
    pub aae: f64,
    /// Average absolute error relative to the mean market price.
    pub ape: f64,
    /// Average relative error over quotes priced at least [`ARPE_MIN_PRICE`].
    pub arpe: f64,
    pub rmse: f64,
    pub n: usize,
}

/// Errors of `model` against observed `market` prices.
pub fn error_metrics(model: &[f64], market: &[f64]) -> Result<ErrorReport> {
    if model.len() != market.len() {
        return Err(Error::invalid(
            "prices",
            format!("{} model prices vs {} market prices", model.len(), market.len()),
        ));
    }
    if market.is_empty() {
        return Err(Error::invalid("prices", "need at least one quote"));
    }
    let n = market.len() as f64;
    let abs: Vec<f64> = model.iter().zip(market).map(|(p, m)| (m - p).abs()).collect();
    let aae = abs.iter().sum::<f64>() / n;
    let mean_market = market.iter().sum::<f64>() / n;
    let rmse = (abs.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    let kept: Vec<f64> = abs
        .iter()
        .zip(market)
        .filter(|(_, &m)| m >= ARPE_MIN_PRICE)
        .map(|(e, m)| e / m)
        .collect();
    if kept.len() < market.len() {
        log::warn!(
            "{} quote(s) below {ARPE_MIN_PRICE} left out of ARPE",
            market.len() - kept.len()
        );
    }
    let arpe = if kept.is_empty() {
        0.0
    } else {
        kept.iter().sum::<f64>() / kept.len() as f64
    };
    let ape = if mean_market > 0.0 { aae / mean_market } else { 0.0 };
    Ok(ErrorReport {
        aae,
        ape,
        arpe,
        rmse,
        n: market.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_fit() {
        let r = error_metrics(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!((r.aae, r.ape, r.arpe, r.rmse), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn hand_examples() {
        let r = error_metrics(&[9.0], &[10.0]).unwrap();
        assert_eq!((r.aae, r.ape, r.arpe, r.rmse), (1.0, 0.1, 0.1, 1.0));
        let r = error_metrics(&[9.0, 22.0], &[10.0, 20.0]).unwrap();
        assert_eq!(r.aae, 1.5);
        assert_eq!(r.ape, 0.1);
        assert!((r.arpe - 0.1).abs() < 1e-15);
        assert_eq!(r.rmse, 2.5f64.sqrt());
        assert_eq!(r.n, 2);
    }

    #[test]
    fn penny_quotes_skip_arpe() {
        let r = error_metrics(&[0.06, 9.0], &[0.05, 10.0]).unwrap();
        assert!((r.arpe - 0.1).abs() < 1e-15);
        assert!(r.rmse > 0.0);
    }

    #[test]
    fn mismatched_lengths() {
        assert!(error_metrics(&[1.0], &[1.0, 2.0]).is_err());
        assert!(error_metrics(&[], &[]).is_err());
    }

    proptest! {
        #[test]
        fn rmse_dominates_aae(pairs in prop::collection::vec((0.2f64..100.0, 0.2f64..100.0), 1..40)) {
            let (model, market): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let r = error_metrics(&model, &market).unwrap();
            prop_assert!(r.rmse >= r.aae * (1.0 - 1e-12));
            let mean = market.iter().sum::<f64>() / market.len() as f64;
            prop_assert!((r.ape * mean - r.aae).abs() <= 1e-12 * r.aae.max(1.0));
            prop_assert!(r.aae >= 0.0 && r.arpe >= 0.0);
        }
    }
}
