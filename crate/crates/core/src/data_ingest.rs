//! Ingestion of real-world winning-price records into an empirical
//! distribution: parse a delimited column, normalize prices into [0, 1] by
//! the pool maximum, and derive the scaled outside-bid law.
//!
//! Advertiser identities in the source files are deliberately discarded
//! beyond a distinct count; the empirical model is i.i.d. over the pooled
//! prices.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};

/// Which column of the input holds the prices (or advertiser ids).
#[derive(Debug, Clone)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    fn resolve(&self, header: Option<&[String]>) -> Result<usize> {
        match self {
            ColumnSelector::Index(i) => Ok(*i),
            ColumnSelector::Name(name) => {
                let header = header.ok_or_else(|| {
                    Error::Parse(format!(
                        "column selected by name '{name}' but the file has no header row"
                    ))
                })?;
                header.iter().position(|h| h == name).ok_or_else(|| {
                    Error::Parse(format!("column '{name}' not found in header {header:?}"))
                })
            }
        }
    }
}

/// A parsed and normalized price pool. Order-preserving: `normalized[k]`
/// corresponds to the k-th successfully parsed input row.
#[derive(Debug, Clone)]
pub struct PricePool {
    pub raw_prices: Vec<f64>,
    pub normalization_max: f64,
    pub normalized: Vec<f64>,
    pub parse_failures: usize,
    pub distinct_advertisers: Option<usize>,
}

impl PricePool {
    pub fn stats(&self) -> PoolStats {
        let count = self.raw_prices.len();
        let mean = self.raw_prices.iter().sum::<f64>() / count as f64;
        PoolStats {
            count,
            max: self.normalization_max,
            mean,
            normalized_mean: self.normalized.iter().sum::<f64>() / count as f64,
            parse_failures: self.parse_failures,
            distinct_advertisers: self.distinct_advertisers,
        }
    }
}

/// Pool statistics block embedded in summary JSON.
#[derive(Debug, Clone, Serialize)]
pub struct PoolStats {
    pub count: usize,
    pub max: f64,
    pub mean: f64,
    pub normalized_mean: f64,
    pub parse_failures: usize,
    pub distinct_advertisers: Option<usize>,
}

/// Load winning prices from a delimited text file.
///
/// Rows whose price field fails to parse as a nonnegative real are counted
/// and skipped; the load only fails if no row parses at all. Normalization
/// divides by the maximum over the full parsed pool (no outlier handling).
pub fn load_price_pool(
    path: &Path,
    column: &ColumnSelector,
    delimiter: char,
    has_header: bool,
    advertiser_column: Option<&ColumnSelector>,
) -> Result<PricePool> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();

    let header: Option<Vec<String>> = if has_header {
        match lines.next() {
            Some(line) => {
                let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
                Some(line.split(delimiter).map(|s| s.trim().to_string()).collect())
            }
            None => return Err(Error::Parse(format!("{}: file is empty", path.display()))),
        }
    } else {
        None
    };

    let price_col = column.resolve(header.as_deref())?;
    let adv_col = advertiser_column
        .map(|c| c.resolve(header.as_deref()))
        .transpose()?;

    let mut raw_prices = Vec::new();
    let mut parse_failures = 0usize;
    let mut advertisers: Option<std::collections::HashSet<String>> =
        adv_col.map(|_| std::collections::HashSet::new());

    for line in lines {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(delimiter).collect();
        let price = fields
            .get(price_col)
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|p| p.is_finite() && *p >= 0.0);
        match price {
            Some(p) => {
                raw_prices.push(p);
                if let (Some(set), Some(col)) = (advertisers.as_mut(), adv_col) {
                    if let Some(id) = fields.get(col) {
                        set.insert(id.trim().to_string());
                    }
                }
            }
            None => parse_failures += 1,
        }
    }

    if raw_prices.is_empty() {
        return Err(Error::Parse(format!(
            "{}: no parseable nonnegative prices in column (failures: {parse_failures})",
            path.display()
        )));
    }
    let normalization_max = raw_prices.iter().cloned().fold(0.0f64, f64::max);
    if normalization_max <= 0.0 {
        return Err(Error::Parse(format!(
            "{}: pool maximum must be positive to normalize",
            path.display()
        )));
    }
    let normalized = raw_prices.iter().map(|p| p / normalization_max).collect();
    Ok(PricePool {
        raw_prices,
        normalization_max,
        normalized,
        parse_failures,
        distinct_advertisers: advertisers.map(|s| s.len()),
    })
}

/// Build the outside-bid law from a pool: empirical draws scaled by an
/// independent U[1, 2] factor. The product may exceed 1 while values stay in
/// [0, 1]; payments remain well defined, so this is allowed.
pub fn outside_spec_from_pool(pool: &PricePool) -> Result<(DistributionSpec, DistributionSpec)> {
    let empirical = DistributionSpec::empirical(pool.normalized.clone())?;
    let scale = DistributionSpec::uniform(1.0, 2.0)?;
    Ok((empirical, scale))
}

/// Value law from a pool: plain empirical draws of normalized prices.
pub fn value_spec_from_pool(pool: &PricePool) -> Result<DistributionSpec> {
    DistributionSpec::empirical(pool.normalized.clone())
}
