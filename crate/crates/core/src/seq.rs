//! The sequence `a(n) = floor(alpha + log_k(n + 1))`, base-`k` words and
//! the grouping of terms by word length.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::alpha::{floor_alpha_plus_log, AlphaSpec, ExactAlpha, FracPower};
use crate::arith::digits_lsb;
use crate::error::{Error, Result};

/// Default cap on the number of terms a single enumeration may touch.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// The word `tau(n) = x_{n_0} x_{n_1} ... x_{n_l}`: base-`k` digits, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BaseKWord {
    k: u64,
    digits: Vec<u32>,
}

impl BaseKWord {
    pub fn new(k: u64, digits: Vec<u32>) -> Result<Self> {
        if digits.iter().any(|&d| u64::from(d) >= k) {
            return Err(Error::Domain(format!("digit out of range for base {k}")));
        }
        if digits.last() == Some(&0) {
            return Err(Error::Domain("word ends in x_0; not a standard representation".into()));
        }
        Ok(Self { k, digits })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Digits least significant first.
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn value(&self) -> BigUint {
        self.digits
            .iter()
            .rev()
            .fold(BigUint::default(), |acc, &d| acc * self.k + d)
    }

    /// Digits as a string in word order (LSB first); bases above 10 use `.` separators.
    pub fn digit_string(&self) -> String {
        self.render(self.digits.iter())
    }

    /// Conventional most-significant-first rendering, for display only.
    pub fn msb_string(&self) -> String {
        self.render(self.digits.iter().rev())
    }

    fn render<'a>(&self, it: impl Iterator<Item = &'a u32>) -> String {
        let sep = if self.k > 10 { "." } else { "" };
        it.map(u32::to_string).collect::<Vec<_>>().join(sep)
    }

    /// Count of each letter `x_0 .. x_{k-1}`.
    pub fn letter_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.k as usize];
        for &d in &self.digits {
            counts[d as usize] += 1;
        }
        counts
    }
}

impl fmt::Display for BaseKWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return f.write_str("ε");
        }
        for d in &self.digits {
            write!(f, "x{d}")?;
        }
        Ok(())
    }
}

pub fn tau(k: u64, n: u64) -> BaseKWord {
    BaseKWord { k, digits: digits_lsb(k, &BigUint::from(n)) }
}

/// `|tau(n)|`: 0 for `n = 0`, else `floor(log_k n) + 1`.
pub fn tau_length(k: u64, n: u64) -> u32 {
    let mut len = 0u32;
    let mut p: u128 = 1;
    while p <= u128::from(n) {
        p *= u128::from(k);
        len += 1;
    }
    len
}

/// Fast evaluator for `a(n)` on `0 <= n <= max_n`.
///
/// Stores the thresholds `t_m = ceil(k^(m - frac(alpha)))`; `a(n)` equals
/// `floor(alpha) + #{m >= 1 : t_m <= n + 1}`.
#[derive(Debug, Clone)]
pub struct FloorLogSeq {
    floor_alpha: i64,
    max_n: u64,
    thresholds: Vec<u64>,
}

impl FloorLogSeq {
    pub fn new(k: u64, alpha: &ExactAlpha, max_n: u64) -> Result<Self> {
        let fp = FracPower::new(k, alpha)?;
        let limit = BigInt::from(max_n) + 1u32;
        let mut thresholds = Vec::new();
        for m in 1i64.. {
            let t = fp.threshold(m);
            if t > limit {
                break;
            }
            thresholds.push(t.to_u64().expect("threshold bounded by max_n + 1"));
        }
        Ok(Self { floor_alpha: fp.floor_alpha(), max_n, thresholds })
    }

    pub fn max_n(&self) -> u64 {
        self.max_n
    }

    pub fn floor_alpha(&self) -> i64 {
        self.floor_alpha
    }

    pub fn get(&self, n: u64) -> i64 {
        assert!(n <= self.max_n, "index {n} beyond evaluator range {}", self.max_n);
        self.floor_alpha + self.thresholds.partition_point(|&t| t <= n + 1) as i64
    }

    /// Values for `start..start+count`, advancing one threshold at a time.
    pub fn window(&self, start: u64, count: u64) -> Vec<i64> {
        if count == 0 {
            return Vec::new();
        }
        assert!(start + count - 1 <= self.max_n);
        let mut idx = self.thresholds.partition_point(|&t| t <= start + 1);
        let mut out = Vec::with_capacity(count as usize);
        for n in start..start + count {
            while idx < self.thresholds.len() && self.thresholds[idx] <= n + 1 {
                idx += 1;
            }
            out.push(self.floor_alpha + idx as i64);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceWindow {
    pub k: u64,
    pub alpha: AlphaSpec,
    pub start: u64,
    pub values: Vec<i64>,
}

impl SequenceWindow {
    /// CSV with columns `n,a(n),|tau(n)|,tau(n)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,a(n),|tau(n)|,tau(n)\n");
        for (i, v) in self.values.iter().enumerate() {
            let n = self.start + i as u64;
            let w = tau(self.k, n);
            writeln!(out, "{n},{v},{},{}", w.len(), w.digit_string()).expect("write to string");
        }
        out
    }
}

pub fn sequence_terms(k: u64, alpha: &AlphaSpec, start: u64, count: u64) -> Result<SequenceWindow> {
    let values = match alpha {
        AlphaSpec::Exact(a) if count > 0 => {
            let end = start
                .checked_add(count - 1)
                .ok_or_else(|| Error::Parameter("window end overflows u64".into()))?;
            FloorLogSeq::new(k, a, end)?.window(start, count)
        }
        AlphaSpec::Exact(_) => Vec::new(),
        AlphaSpec::Interval(_) => (start..start.saturating_add(count))
            .map(|n| floor_alpha_plus_log(k, alpha, n))
            .collect::<Result<_>>()?,
    };
    Ok(SequenceWindow { k, alpha: alpha.clone(), start, values })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentGroup {
    pub m: u32,
    pub values: Vec<i64>,
}

/// Terms grouped by `|tau(n)|`: group `m >= 1` covers `k^(m-1) <= n < k^m`, group 0 is `{a(0)}`.
pub fn grouped_by_exponent(k: u64, alpha: &AlphaSpec, m_max: u32) -> Result<Vec<ExponentGroup>> {
    let exact = alpha.exact()?;
    let end = checked_kpow(k, m_max)
        .filter(|&t| t <= DEFAULT_BUDGET)
        .ok_or_else(|| Error::Budget {
            needed: format!("{k}^{m_max}"),
            budget: DEFAULT_BUDGET,
        })?;
    let values = FloorLogSeq::new(k, exact, end - 1)?.window(0, end);
    let mut groups = vec![ExponentGroup { m: 0, values: vec![values[0]] }];
    let mut lo = 1u64;
    for m in 1..=m_max {
        let hi = lo * k;
        groups.push(ExponentGroup { m, values: values[lo as usize..hi as usize].to_vec() });
        lo = hi;
    }
    Ok(groups)
}

/// Blocks separated by spaces: `0 1 22 2333 ...`, one per group.
pub fn grouped_display(groups: &[ExponentGroup]) -> String {
    groups
        .iter()
        .map(|g| g.values.iter().map(i64::to_string).collect::<Vec<_>>().join(if g.values.iter().any(|v| *v > 9 || *v < 0) { "," } else { "" }))
        .collect::<Vec<_>>()
        .join(" ")
}

pub(crate) fn checked_kpow(k: u64, e: u32) -> Option<u64> {
    k.checked_pow(e)
}
