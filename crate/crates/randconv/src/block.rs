//! Block-compressed distributions: sorted (value, multiplicity) tables.
//!
//! An i.i.d. power P^n has astronomically many atoms but only as many
//! distinct values as there are type classes, so it is stored as blocks of
//! equal-probability atoms. Values and multiplicities are kept in the log
//! domain; multiplicities additionally carry an exact integer while one fits
//! in 63 bits. All rank arithmetic runs on log-ranks so supports like 2^400
//! never leave the representable range.

use crate::normal::{log_add_exp, log_sub_exp};
use crate::{dist::FiniteDist, Error, Result};

/// Merge blocks whose log-values coincide within this absolute tolerance.
pub const LOG_VALUE_MERGE_TOL: f64 = 1e-12;
/// Total mass must be 1 within this tolerance in the log domain.
pub const LOG_MASS_TOL: f64 = 1e-9;
/// Exact multiplicities are kept while they fit below 2^63.
pub const MAX_EXACT_COUNT: u128 = (1u128 << 63) - 1;
/// Refuse i.i.d. powers with more type classes than this.
pub const MAX_TYPE_CLASSES: u64 = 4_000_000;

/// One run of equal-probability atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    /// ln of the per-atom probability.
    pub log_value: f64,
    /// ln of the multiplicity.
    pub log_count: f64,
    /// Exact multiplicity when representable below 2^63.
    pub count: Option<u64>,
}

/// A distribution as a sorted block table, with prefix sums precomputed.
#[derive(Debug, Clone)]
pub struct BlockDist {
    blocks: Vec<Block>,
    /// Prefix masses, rescaled so the last entry is exactly 1.
    cum_mass: Vec<f64>,
    /// Prefix log-counts (log-ranks of block boundaries).
    log_cum_count: Vec<f64>,
    /// Exact prefix counts while they fit in a u128.
    cum_count: Vec<Option<u128>>,
}

impl BlockDist {
    /// Builds a table from raw blocks: sorts, merges near-equal values,
    /// checks normalization and precomputes prefix sums.
    pub fn assemble(mut raw: Vec<Block>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptySupport);
        }
        for b in &raw {
            if !b.log_value.is_finite() || !b.log_count.is_finite() || b.log_count < -1e-9 {
                return Err(Error::BadBlocks(format!(
                    "bad block (log_value {}, log_count {})",
                    b.log_value, b.log_count
                )));
            }
        }
        raw.sort_by(|a, b| b.log_value.total_cmp(&a.log_value));
        let mut blocks: Vec<Block> = Vec::with_capacity(raw.len());
        for b in raw {
            match blocks.last_mut() {
                Some(last) if last.log_value - b.log_value <= LOG_VALUE_MERGE_TOL => {
                    last.log_count = log_add_exp(last.log_count, b.log_count);
                    last.count = match (last.count, b.count) {
                        (Some(x), Some(y)) => x
                            .checked_add(y)
                            .filter(|&c| c as u128 <= MAX_EXACT_COUNT),
                        _ => None,
                    };
                }
                _ => blocks.push(b),
            }
        }

        let mut log_mass = f64::NEG_INFINITY;
        let mut log_cum_count = Vec::with_capacity(blocks.len());
        let mut cum_count = Vec::with_capacity(blocks.len());
        let mut log_rank = f64::NEG_INFINITY;
        let mut exact: Option<u128> = Some(0);
        for b in &blocks {
            log_mass = log_add_exp(log_mass, b.log_count + b.log_value);
            log_rank = log_add_exp(log_rank, b.log_count);
            exact = match (exact, b.count) {
                (Some(x), Some(y)) => x.checked_add(y as u128),
                _ => None,
            };
            log_cum_count.push(log_rank);
            cum_count.push(exact);
        }
        if log_mass.abs() > LOG_MASS_TOL {
            return Err(Error::BadBlocks(format!(
                "total mass off by {log_mass:e} in log domain"
            )));
        }

        // prefix masses in the linear domain, pinned to end at exactly 1
        let total = log_mass.exp();
        let mut cum_mass = Vec::with_capacity(blocks.len());
        let mut acc = 0.0;
        for b in &blocks {
            acc += (b.log_count + b.log_value).exp();
            cum_mass.push((acc / total).min(1.0));
        }
        if let Some(last) = cum_mass.last_mut() {
            *last = 1.0;
        }
        Ok(Self {
            blocks,
            cum_mass,
            log_cum_count,
            cum_count,
        })
    }

    /// Explicit distribution as a one-atom-per-entry block table.
    pub fn from_finite(p: &FiniteDist) -> Self {
        let raw = p
            .sorted_desc()
            .into_iter()
            .map(|v| Block {
                log_value: v.ln(),
                log_count: 0.0,
                count: Some(1),
            })
            .collect();
        Self::assemble(raw).expect("a valid FiniteDist always assembles")
    }

    /// The i.i.d. power P^n as merged type-class blocks.
    ///
    /// Enumerates histograms of n over the support, with exact multinomial
    /// multiplicities while they fit. Errors when the type-class count
    /// exceeds [`MAX_TYPE_CLASSES`].
    pub fn iid_power(p: &FiniteDist, n: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("power requires n >= 1".into()));
        }
        let masses = p.sorted_desc();
        let k = masses.len();
        let classes = count_compositions(n, k)?;
        if classes > MAX_TYPE_CLASSES {
            return Err(Error::PowerTooLarge(classes, MAX_TYPE_CLASSES));
        }
        let ln_masses: Vec<f64> = masses.iter().map(|&m| m.ln()).collect();
        let lnfact = ln_factorial_table(n as usize);
        let mut raw = Vec::with_capacity(classes as usize);
        let mut counts = vec![0u64; k];
        enumerate_histograms(&mut counts, 0, n, &mut |hist| {
            let mut log_value = 0.0;
            let mut log_count = lnfact[n as usize];
            for (i, &c) in hist.iter().enumerate() {
                log_value += c as f64 * ln_masses[i];
                log_count -= lnfact[c as usize];
            }
            raw.push(Block {
                log_value,
                log_count,
                count: multinomial_exact(n, hist),
            });
        });
        Self::assemble(raw)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Log of the total number of atoms.
    pub fn log_support_size(&self) -> f64 {
        *self.log_cum_count.last().unwrap()
    }

    /// Block-boundary ranks in the log domain (prefix counts).
    pub fn boundary_log_ranks(&self) -> &[f64] {
        &self.log_cum_count
    }

    /// Exact prefix count at a boundary, when representable.
    pub fn boundary_exact_count(&self, idx: usize) -> Option<u128> {
        self.cum_count[idx]
    }

    /// Prefix mass at a block boundary.
    pub fn boundary_mass(&self, idx: usize) -> f64 {
        self.cum_mass[idx]
    }

    /// Mass of the `l` largest atoms, with fractional `l` interpolating
    /// linearly inside a block. Errors on negative `l`.
    pub fn cumulative(&self, l: f64) -> Result<f64> {
        if !(l >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cumulative requires l >= 0, got {l}"
            )));
        }
        if l == 0.0 {
            return Ok(0.0);
        }
        Ok(self.cumulative_at_log_rank(l.ln()))
    }

    /// Same as [`Self::cumulative`] with the rank given as ln(l).
    pub fn cumulative_at_log_rank(&self, log_l: f64) -> f64 {
        if log_l == f64::NEG_INFINITY {
            return 0.0;
        }
        if log_l >= self.log_support_size() {
            return 1.0;
        }
        // first block whose boundary reaches log_l
        let idx = self
            .log_cum_count
            .partition_point(|&r| r < log_l);
        let prev_rank = if idx == 0 {
            f64::NEG_INFINITY
        } else {
            self.log_cum_count[idx - 1]
        };
        let prev_mass = if idx == 0 { 0.0 } else { self.cum_mass[idx - 1] };
        if log_l <= prev_rank {
            return prev_mass;
        }
        let log_span = log_sub_exp(log_l, prev_rank);
        (prev_mass + (self.blocks[idx].log_value + log_span).exp()).min(1.0)
    }

    /// Expands to an explicit sorted probability vector. Errors when the
    /// support is too large to enumerate.
    pub fn to_sorted_probs(&self) -> Result<Vec<f64>> {
        const LIMIT: u128 = 4_000_000;
        let mut out = Vec::new();
        for b in &self.blocks {
            let c = b
                .count
                .ok_or_else(|| Error::BadBlocks("multiplicity too large to expand".into()))?;
            if out.len() as u128 + c as u128 > LIMIT {
                return Err(Error::BadBlocks("support too large to expand".into()));
            }
            let v = b.log_value.exp();
            out.extend(std::iter::repeat(v).take(c as usize));
        }
        Ok(out)
    }
}

/// Sorted union of block-boundary log-ranks of two tables.
pub fn merged_log_ranks(a: &BlockDist, b: &BlockDist) -> Vec<f64> {
    let mut ranks: Vec<f64> = a
        .boundary_log_ranks()
        .iter()
        .chain(b.boundary_log_ranks())
        .copied()
        .collect();
    ranks.sort_by(f64::total_cmp);
    ranks.dedup();
    ranks
}

/// Fidelity Σ √(p q) between two block tables under the sorted pairing.
pub fn fidelity_blocks(a: &BlockDist, b: &BlockDist) -> f64 {
    let stop = a.log_support_size().min(b.log_support_size());
    let mut total = 0.0;
    let mut prev = f64::NEG_INFINITY;
    let mut ia = 0usize;
    let mut ib = 0usize;
    for &r in merged_log_ranks(a, b).iter().filter(|&&r| r <= stop) {
        if r > prev {
            let log_span = log_sub_exp(r, prev);
            let half = 0.5 * (a.blocks[ia].log_value + b.blocks[ib].log_value);
            total += (log_span + half).exp();
        }
        while ia + 1 < a.blocks.len() && a.log_cum_count[ia] <= r {
            ia += 1;
        }
        while ib + 1 < b.blocks.len() && b.log_cum_count[ib] <= r {
            ib += 1;
        }
        prev = r;
    }
    total.min(1.0)
}

fn count_compositions(n: u64, k: usize) -> Result<u64> {
    // C(n + k - 1, k - 1)
    let mut c: u128 = 1;
    for i in 1..=(k as u128 - 1) {
        c = c
            .checked_mul(n as u128 + i)
            .ok_or(Error::PowerTooLarge(u64::MAX, MAX_TYPE_CLASSES))?
            / i;
        if c > u64::MAX as u128 {
            return Err(Error::PowerTooLarge(u64::MAX, MAX_TYPE_CLASSES));
        }
    }
    Ok(c as u64)
}

fn enumerate_histograms(counts: &mut Vec<u64>, dim: usize, left: u64, f: &mut impl FnMut(&[u64])) {
    if dim == counts.len() - 1 {
        counts[dim] = left;
        f(counts);
        return;
    }
    for c in 0..=left {
        counts[dim] = c;
        enumerate_histograms(counts, dim + 1, left - c, f);
    }
}

fn ln_factorial_table(n: usize) -> Vec<f64> {
    // compensated summation keeps the absolute error near eps * ln(n!)
    let mut table = Vec::with_capacity(n + 1);
    table.push(0.0);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 1..=n {
        let term = (k as f64).ln() - comp;
        let t = sum + term;
        comp = (t - sum) - term;
        sum = t;
        table.push(sum);
    }
    table
}

fn multinomial_exact(n: u64, hist: &[u64]) -> Option<u64> {
    let mut result: u128 = 1;
    let mut remaining = n;
    for &c in hist {
        result = mul_binom(result, remaining, c)?;
        remaining -= c;
    }
    u64::try_from(result).ok().filter(|&c| c as u128 <= MAX_EXACT_COUNT)
}

fn mul_binom(acc: u128, n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut r = acc;
    for i in 1..=k {
        r = r.checked_mul((n - k + i) as u128)? / i as u128;
        if r > MAX_EXACT_COUNT.checked_mul(n as u128 + 1)? {
            return None;
        }
    }
    Some(r)
}
