//! Option chains and their CSV form.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::pricing::{DayCount, MarketEnv, OptionSpec, Right, Style};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExerciseStyle {
    #[serde(rename = "E")]
    European,
    #[serde(rename = "A")]
    American,
}

/// One quote of a chain.
#[derive(Clone, Debug, PartialEq)]
pub struct OptionQuote {
    pub expiry: NaiveDate,
    /// Calendar days from the quote date to expiry.
    pub days: u32,
    pub strike: f64,
    pub right: Right,
    pub style: ExerciseStyle,
    pub price: f64,
}

impl OptionQuote {
    pub fn maturity(&self, dc: DayCount) -> f64 {
        dc.year_fraction(self.days as f64)
    }

    pub fn spec(&self, dc: DayCount) -> OptionSpec {
        let style = match self.style {
            ExerciseStyle::European => Style::European,
            ExerciseStyle::American => Style::American,
        };
        OptionSpec::european(self.strike, self.maturity(dc), self.right).with_style(style)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptionChain {
    pub quote_date: NaiveDate,
    pub env: MarketEnv,
    pub quotes: Vec<OptionQuote>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    quote_date: NaiveDate,
    expiry_date: NaiveDate,
    strike: f64,
    right: Right,
    style: ExerciseStyle,
    price: f64,
    spot: f64,
    rate: f64,
    div_yield: f64,
}

impl OptionChain {
    pub fn new(quote_date: NaiveDate, env: MarketEnv, quotes: Vec<OptionQuote>) -> Result<Self> {
        let chain = OptionChain { quote_date, env, quotes };
        chain.validate()?;
        Ok(chain)
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        if self.quotes.is_empty() {
            return Err(Error::invalid("chain", "needs at least one quote"));
        }
        for q in &self.quotes {
            ensure_positive("strike", q.strike)?;
            ensure_positive("price", q.price)?;
            if q.days == 0 || q.expiry <= self.quote_date {
                return Err(Error::invalid("expiry_date", format!("{} is not after the quote date", q.expiry)));
            }
        }
        Ok(())
    }

    /// Appends a quote expiring `days` calendar days after the quote date.
    pub fn push(&mut self, days: u32, strike: f64, right: Right, style: ExerciseStyle, price: f64) {
        self.quotes.push(OptionQuote {
            expiry: self.quote_date + chrono::Days::new(days as u64),
            days,
            strike,
            right,
            style,
            price,
        });
    }

    pub fn prices(&self) -> Vec<f64> {
        self.quotes.iter().map(|q| q.price).collect()
    }

    /// Distinct day counts to expiry, ascending.
    pub fn expiries(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.quotes.iter().map(|q| q.days).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let shown = path.display().to_string();
        let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(&shown, e))?;
        let mut head: Option<(NaiveDate, MarketEnv)> = None;
        let mut quotes = Vec::new();
        for rec in rdr.deserialize::<Row>() {
            let row = rec.map_err(|e| csv_error(&shown, e))?;
            let env = MarketEnv {
                s0: row.spot,
                r: row.rate,
                q: row.div_yield,
            };
            match head {
                None => head = Some((row.quote_date, env)),
                Some((d, e)) if d == row.quote_date && e == env => {}
                Some(_) => {
                    return Err(Error::Parse {
                        path: shown,
                        line: quotes.len() as u64 + 2,
                        reason: "quote date, spot, rate and dividend yield must agree across rows".into(),
                    })
                }
            }
            let days = (row.expiry_date - row.quote_date).num_days();
            quotes.push(OptionQuote {
                expiry: row.expiry_date,
                days: u32::try_from(days).unwrap_or(0),
                strike: row.strike,
                right: row.right,
                style: row.style,
                price: row.price,
            });
        }
        let (quote_date, env) = head.ok_or_else(|| Error::Parse {
            path: shown.clone(),
            line: 1,
            reason: "no quotes".into(),
        })?;
        Self::new(quote_date, env, quotes)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let shown = path.display().to_string();
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(&shown, e))?;
        for q in &self.quotes {
            w.serialize(Row {
                quote_date: self.quote_date,
                expiry_date: q.expiry,
                strike: q.strike,
                right: q.right,
                style: q.style,
                price: q.price,
                spot: self.env.s0,
                rate: self.env.r,
                div_yield: self.env.q,
            })
            .map_err(|e| csv_error(&shown, e))?;
        }
        w.flush().map_err(|e| Error::Io { path: shown, source: e })
    }
}

pub(crate) fn csv_error(path: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_string(),
            source,
        },
        other => Error::Parse {
            path: path.to_string(),
            line,
            reason: format!("{other:?}"),
        },
    }
}
