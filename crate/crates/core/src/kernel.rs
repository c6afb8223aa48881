//! Rank growth of the `k`-kernel `{a(k^e n + i)}`.
//!
//! For each level `e` the rows `[a(k^e n + i)]_{n < trunc_len}`, `0 <= i < k^e`,
//! are stacked with all lower levels and the rank over the rationals is
//! recorded. A bounded rank is necessary for `k`-regularity, so a plateau is
//! evidence for it and steady growth is evidence against. Neither is a proof.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::alpha::AlphaSpec;
use crate::error::{Error, Result};
use crate::linalg::IntEchelon;
use crate::seq::FloorLogSeq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelIndex {
    e: u32,
    i: u64,
}

impl KernelIndex {
    pub fn new(k: u64, e: u32, i: u64) -> Result<Self> {
        let ke = k
            .checked_pow(e)
            .ok_or_else(|| Error::Parameter(format!("{k}^{e} overflows")))?;
        if i >= ke {
            return Err(Error::Parameter(format!("kernel offset {i} must be below {k}^{e}")));
        }
        Ok(Self { e, i })
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn i(&self) -> u64 {
        self.i
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankProfile {
    pub trunc_len: usize,
    /// `ranks[e]`: rank of all kernel rows with exponent at most `e`.
    pub ranks: Vec<usize>,
    /// Three equal ranks at the top levels. Evidence only.
    pub stabilized: bool,
}

/// JSON report for one profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub k: u64,
    pub alpha: AlphaSpec,
    pub trunc_len: usize,
    pub ranks: Vec<usize>,
    pub stabilized: bool,
    pub verdict: String,
    pub wall_time_ms: Option<u64>,
}

impl KernelReport {
    pub fn new(k: u64, alpha: &AlphaSpec, profile: &RankProfile, wall_time_ms: Option<u64>) -> Self {
        let e_max = profile.ranks.len().saturating_sub(1);
        let verdict = if profile.stabilized {
            format!("evidence of regularity: rank plateau at {} for e = {}..{e_max} (trunc_len {})", profile.ranks[e_max], e_max - 2, profile.trunc_len)
        } else {
            format!("no rank plateau up to e = {e_max} (trunc_len {}); evidence against regularity, not a proof", profile.trunc_len)
        };
        Self {
            k,
            alpha: alpha.clone(),
            trunc_len: profile.trunc_len,
            ranks: profile.ranks.clone(),
            stabilized: profile.stabilized,
            verdict,
            wall_time_ms,
        }
    }
}

fn row_count_limit(k: u64, e_max: u32, trunc_len: usize) -> Result<u64> {
    k.checked_pow(e_max)
        .and_then(|ke| ke.checked_mul(trunc_len as u64))
        .ok_or_else(|| Error::Parameter(format!("{k}^{e_max} * {trunc_len} overflows")))
}

/// `[a(k^e n + i)]` for `n < trunc_len`.
pub fn kernel_row(k: u64, alpha: &AlphaSpec, idx: KernelIndex, trunc_len: usize) -> Result<Vec<i64>> {
    let exact = alpha.exact()?;
    let ke = k.pow(idx.e);
    let max_n = ke * (trunc_len as u64).max(1);
    let seq = FloorLogSeq::new(k, exact, max_n)?;
    Ok((0..trunc_len as u64).map(|n| seq.get(ke * n + idx.i)).collect())
}

pub fn rank_profile(k: u64, alpha: &AlphaSpec, e_max: u32, trunc_len: usize) -> Result<RankProfile> {
    let exact = alpha.exact()?;
    let max_n = row_count_limit(k, e_max, trunc_len)?;
    let seq = FloorLogSeq::new(k, exact, max_n)?;
    profile(k, e_max, trunc_len, |n| BigInt::from(seq.get(n)))
}

/// Same engine for any integer sequence; `seq` must be defined up to `k^e_max * trunc_len`.
pub fn rank_profile_generic<F>(seq: F, k: u64, e_max: u32, trunc_len: usize) -> Result<RankProfile>
where
    F: Fn(u64) -> BigInt,
{
    row_count_limit(k, e_max, trunc_len)?;
    profile(k, e_max, trunc_len, seq)
}

fn profile<F: Fn(u64) -> BigInt>(k: u64, e_max: u32, trunc_len: usize, seq: F) -> Result<RankProfile> {
    if k < 2 {
        return Err(Error::Parameter(format!("base k must be at least 2, got {k}")));
    }
    if e_max < 2 {
        return Err(Error::Parameter(format!(
            "stabilization compares three levels; e_max must be at least 2, got {e_max}"
        )));
    }
    if trunc_len == 0 {
        return Err(Error::Parameter("trunc_len must be positive".into()));
    }
    // Rows as first differences along n: an invertible column transform, so
    // ranks are unchanged, and step-like rows become sparse.
    let mut levels: Vec<Vec<Vec<(usize, BigInt)>>> = Vec::with_capacity(e_max as usize + 1);
    let mut used = vec![false; trunc_len];
    let mut ke = 1u64;
    for _ in 0..=e_max {
        let mut rows = Vec::with_capacity(ke as usize);
        for i in 0..ke {
            let mut prev = BigInt::zero();
            let mut sparse = Vec::new();
            for (n, seen) in used.iter_mut().enumerate() {
                let v = seq(ke * n as u64 + i);
                let d = &v - &prev;
                if !d.is_zero() {
                    *seen = true;
                    sparse.push((n, d));
                }
                prev = v;
            }
            rows.push(sparse);
        }
        levels.push(rows);
        ke *= k;
    }
    let mut compact = vec![usize::MAX; trunc_len];
    let mut width = 0;
    for (n, &u) in used.iter().enumerate() {
        if u {
            compact[n] = width;
            width += 1;
        }
    }
    let mut ech = IntEchelon::new(width);
    let mut ranks = Vec::with_capacity(levels.len());
    for rows in levels {
        for sparse in rows {
            let mut dense = vec![BigInt::zero(); width];
            for (n, d) in sparse {
                dense[compact[n]] = d;
            }
            ech.insert(dense);
        }
        ranks.push(ech.rank());
    }
    let top = ranks.len() - 1;
    let stabilized = ranks[top] == ranks[top - 1] && ranks[top - 1] == ranks[top - 2];
    Ok(RankProfile { trunc_len, ranks, stabilized })
}
