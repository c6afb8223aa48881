//! Bounded detectors for structure in finite integer sequences: constant
//! linear recurrences, rational generating functions, eventual periodicity
//! and polynomial-coefficient recurrences.
//!
//! Every fit is an exact rational solve. A `None` result means the exact
//! system has no solution within the stated bounds; it says nothing beyond
//! them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{nullspace, solve, to_primitive_integers};
use crate::poly::{Poly, RationalFunctionQ};

/// Terms held out from fitting a linear recurrence.
pub const LINEAR_HOLDOUT: usize = 4;
/// Terms held out from fitting a polynomial recurrence.
pub const POLY_HOLDOUT: usize = 8;

/// `u(m + order) = sum_j coeffs[j-1] u(m + order - j)` for all `m >= valid_from`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRecurrence {
    pub order: usize,
    pub coeffs: Vec<BigRational>,
    pub valid_from: usize,
}

impl LinearRecurrence {
    /// Does the recurrence reproduce every term of `seq`?
    pub fn holds_on(&self, seq: &[BigInt]) -> bool {
        let d = self.order;
        (self.valid_from..seq.len().saturating_sub(d)).all(|m| {
            let rhs = self.coeffs.iter().enumerate().fold(BigRational::zero(), |acc, (j, c)| {
                acc + c * BigRational::from_integer(seq[m + d - j - 1].clone())
            });
            rhs == BigRational::from_integer(seq[m + d].clone())
        })
    }

    /// The characteristic denominator `1 - c_1 x - ... - c_d x^d`, scaled to integers.
    pub fn denominator(&self) -> Poly {
        let mut v = vec![BigRational::one()];
        v.extend(self.coeffs.iter().map(|c| -c.clone()));
        Poly::new(to_primitive_integers(&v))
    }
}

impl std::fmt::Display for LinearRecurrence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "u(m+{}) =", self.order)?;
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let shift = self.order - j - 1;
            let var = if shift == 0 { "u(m)".to_string() } else { format!("u(m+{shift})") };
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            let term = if mag.is_one() { var } else { format!("{mag}*{var}") };
            match (first, c.is_negative()) {
                (true, false) => write!(f, " {term}")?,
                (true, true) => write!(f, " -{term}")?,
                _ => write!(f, " {sign} {term}")?,
            }
            first = false;
        }
        if first {
            f.write_str(" 0")?;
        }
        write!(f, " for m >= {}", self.valid_from)
    }
}

impl Serialize for LinearRecurrence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            order: usize,
            coeffs: Vec<String>,
            valid_from: usize,
            text: String,
        }
        Repr {
            order: self.order,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
            valid_from: self.valid_from,
            text: self.to_string(),
        }
        .serialize(s)
    }
}

fn q(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Minimal-order constant-coefficient recurrence with order at most `max_order`.
///
/// A recurrence of order `d` valid from `v` must hold on every term of `seq`
/// from `v` on, with at least [`LINEAR_HOLDOUT`] more equations than unknowns.
/// Dropping equations keeps a consistent system consistent, so the smallest
/// `v` is found by bisection.
pub fn guess_linear_recurrence(seq: &[BigInt], max_order: usize) -> Result<Option<LinearRecurrence>> {
    let need = 2 * max_order + LINEAR_HOLDOUT;
    if max_order == 0 || seq.len() < need {
        return Err(Error::InsufficientTerms { need: need.max(LINEAR_HOLDOUT + 2), got: seq.len() });
    }
    let fit_from = |order: usize, valid_from: usize| -> Option<LinearRecurrence> {
        let rows: Vec<Vec<BigRational>> = (valid_from..seq.len() - order)
            .map(|m| (1..=order).map(|j| q(&seq[m + order - j])).collect())
            .collect();
        let rhs: Vec<BigRational> = (valid_from..seq.len() - order).map(|m| q(&seq[m + order])).collect();
        let coeffs = solve(&rows, &rhs)?;
        let rec = LinearRecurrence { order, coeffs, valid_from };
        rec.holds_on(seq).then_some(rec)
    };
    for order in 1..=max_order {
        let last = seq.len() - 2 * order - LINEAR_HOLDOUT;
        let Some(mut best) = fit_from(order, last) else { continue };
        let (mut lo, mut hi) = (0, last);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match fit_from(order, mid) {
                Some(rec) => {
                    hi = mid;
                    best = rec;
                }
                None => lo = mid + 1,
            }
        }
        return Ok(Some(best));
    }
    Ok(None)
}

/// The reduced rational function with numerator and denominator degree at most
/// `max_deg` whose Taylor coefficients are exactly `seq`, if one exists.
pub fn series_to_rational(seq: &[BigInt], max_deg: usize) -> Result<Option<RationalFunctionQ>> {
    let need = 2 * max_deg + 2;
    if seq.len() < need {
        return Err(Error::InsufficientTerms { need, got: seq.len() });
    }
    let n = seq.len();
    for dq in 0..=max_deg {
        // Q = 1 + q_1 x + ... + q_dq x^dq with [x^t](Q S) = 0 for max_deg < t < n.
        let rows: Vec<Vec<BigRational>> = (max_deg + 1..n)
            .map(|t| (1..=dq).map(|j| if t >= j { q(&seq[t - j]) } else { BigRational::zero() }).collect())
            .collect();
        let rhs: Vec<BigRational> = (max_deg + 1..n).map(|t| -q(&seq[t])).collect();
        let qcoeffs = if dq == 0 {
            rhs.iter().all(Zero::is_zero).then(Vec::new)
        } else {
            solve(&rows, &rhs)
        };
        let Some(qcoeffs) = qcoeffs else { continue };
        let mut den_q = vec![BigRational::one()];
        den_q.extend(qcoeffs);
        let num_q: Vec<BigRational> = (0..=max_deg.min(n - 1))
            .map(|t| {
                den_q
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j <= t)
                    .fold(BigRational::zero(), |acc, (j, c)| acc + c * q(&seq[t - j]))
            })
            .collect();
        let all: Vec<BigRational> = num_q.iter().chain(&den_q).cloned().collect();
        let ints = to_primitive_integers(&all);
        let (num, den) = ints.split_at(num_q.len());
        let rf = RationalFunctionQ::new(Poly::new(num.to_vec()), Poly::new(den.to_vec()))?;
        let replay = rf.coefficients(n);
        if replay.iter().zip(seq).all(|(c, s)| *c == q(s)) {
            return Ok(Some(rf));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Period {
    pub preperiod: usize,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub found: Option<Period>,
    pub horizon: usize,
    /// Largest `preperiod + period` searched.
    pub max_span: usize,
}

/// Lexicographically minimal `(preperiod, period)` with `preperiod + period <= horizon / 3`.
pub fn detect_period(digits: &[u32], horizon: usize) -> Result<PeriodReport> {
    detect_period_bounded(digits, horizon, horizon / 3)
}

/// Lexicographically minimal `(preperiod, period)` with `preperiod + period <= max_span`,
/// consistent with the first `horizon` digits and leaving at least three full
/// periods after the preperiod.
pub fn detect_period_bounded(digits: &[u32], horizon: usize, max_span: usize) -> Result<PeriodReport> {
    if horizon < 8 {
        return Err(Error::Parameter(format!("horizon must be at least 8, got {horizon}")));
    }
    if digits.len() < horizon {
        return Err(Error::InsufficientTerms { need: horizon, got: digits.len() });
    }
    let d = &digits[..horizon];
    let found = (0..max_span).find_map(|pre| {
        (1..=max_span - pre)
            .filter(|&p| horizon - pre >= 3 * p)
            .find(|&p| (pre..horizon - p).all(|i| d[i] == d[i + p]))
            .map(|period| Period { preperiod: pre, period })
    });
    Ok(PeriodReport { found, horizon, max_span })
}

/// `sum_{i=0..order} p_i(m) u(m+i) = 0`, each `p_i` of degree at most `degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PRecCandidate {
    pub order: usize,
    pub degree: usize,
    /// `polys[i]` is `p_i`, low degree first.
    pub polys: Vec<Poly>,
    pub validated: bool,
}

impl PRecCandidate {
    pub fn holds_on(&self, seq: &[BigInt]) -> bool {
        (0..seq.len().saturating_sub(self.order)).all(|m| {
            let mb = BigInt::from(m);
            self.polys
                .iter()
                .enumerate()
                .map(|(i, p)| eval(p, &mb) * &seq[m + i])
                .sum::<BigInt>()
                .is_zero()
        })
    }
}

fn eval(p: &Poly, x: &BigInt) -> BigInt {
    p.coeffs().iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

impl std::fmt::Display for PRecCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .polys
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| {
                let poly = p.to_string().replace('x', "m");
                if i == 0 {
                    format!("({poly}) u(m)")
                } else {
                    format!("({poly}) u(m+{i})")
                }
            })
            .collect();
        write!(f, "{} = 0", terms.join(" + "))
    }
}

impl Serialize for PRecCandidate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            order: usize,
            degree: usize,
            polys: Vec<Vec<String>>,
            validated: bool,
            text: String,
        }
        Repr {
            order: self.order,
            degree: self.degree,
            polys: self
                .polys
                .iter()
                .map(|p| p.coeffs().iter().map(ToString::to_string).collect())
                .collect(),
            validated: self.validated,
            text: self.to_string(),
        }
        .serialize(s)
    }
}

/// Searches `order = 1..=max_order`, then `degree = 0..=max_degree`, for a
/// polynomial-coefficient recurrence that fits all but the last
/// [`POLY_HOLDOUT`] terms and also holds on them.
pub fn guess_polynomial_recurrence(seq: &[BigInt], max_order: usize, max_degree: usize) -> Result<Option<PRecCandidate>> {
    let need = (max_order + 1) * (max_degree + 1) + max_order + POLY_HOLDOUT;
    if max_order == 0 || seq.len() < need {
        return Err(Error::InsufficientTerms { need, got: seq.len() });
    }
    let fit_len = seq.len() - POLY_HOLDOUT;
    for order in 1..=max_order {
        for degree in 0..=max_degree {
            let unknowns = (order + 1) * (degree + 1);
            // unknown index: i * (degree + 1) + d  ->  coefficient of m^d in p_i
            let row = |m: usize| -> Vec<BigRational> {
                let mut r = Vec::with_capacity(unknowns);
                for i in 0..=order {
                    let mut pw = BigInt::one();
                    for _ in 0..=degree {
                        r.push(BigRational::from_integer(&pw * &seq[m + i]));
                        pw *= m;
                    }
                }
                r
            };
            let fit: Vec<Vec<BigRational>> = (0..fit_len - order).map(row).collect();
            let basis = nullspace(&fit, unknowns);
            if basis.is_empty() {
                continue;
            }
            // Restrict to combinations that also satisfy the held-out equations.
            let held: Vec<Vec<BigRational>> = (fit_len - order..seq.len() - order).map(row).collect();
            let projected: Vec<Vec<BigRational>> = held
                .iter()
                .map(|h| {
                    basis
                        .iter()
                        .map(|b| h.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y))
                        .collect()
                })
                .collect();
            let combos = nullspace(&projected, basis.len());
            let Some(weights) = combos.first() else { continue };
            let mut v = vec![BigRational::zero(); unknowns];
            for (w, b) in weights.iter().zip(&basis) {
                for (x, y) in v.iter_mut().zip(b) {
                    *x += w * y;
                }
            }
            let ints = to_primitive_integers(&v);
            let polys: Vec<Poly> = ints.chunks(degree + 1).map(|c| Poly::new(c.to_vec())).collect();
            let mut cand = PRecCandidate { order, degree, polys, validated: false };
            cand.validated = cand.holds_on(seq);
            if cand.validated {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

/// Machine-readable outcome of one detector run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorResult {
    pub kind: String,
    pub bounds: Bounds,
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<String>,
    pub validated: bool,
    pub summary: String,
}

/// Bounds recorded alongside detector results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct Bounds {
    pub terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_span: Option<usize>,
}

impl DetectorResult {
    fn from_option<T: std::fmt::Display>(kind: &str, bounds: Bounds, found: Option<(T, bool)>) -> Self {
        match found {
            Some((t, validated)) => Self {
                kind: kind.into(),
                bounds,
                found: true,
                summary: format!("{kind}: {t}"),
                parameters: Some(t.to_string()),
                validated,
            },
            None => Self {
                kind: kind.into(),
                summary: format!("{kind}: no fit within bounds ({bounds})"),
                bounds,
                found: false,
                parameters: None,
                validated: false,
            },
        }
    }
}

pub fn linear_detector(seq: &[BigInt], max_order: usize) -> Result<DetectorResult> {
    let found = guess_linear_recurrence(seq, max_order)?;
    let bounds = Bounds { terms: seq.len(), max_order: Some(max_order), ..Bounds::default() };
    Ok(DetectorResult::from_option("linear", bounds, found.map(|r| (r, true))))
}

pub fn rational_detector(seq: &[BigInt], max_deg: usize) -> Result<DetectorResult> {
    let found = series_to_rational(seq, max_deg)?;
    let bounds = Bounds { terms: seq.len(), max_degree: Some(max_deg), ..Bounds::default() };
    Ok(DetectorResult::from_option("rational", bounds, found.map(|r| (r, true))))
}

pub fn period_detector(digits: &[u32], max_span: usize) -> Result<DetectorResult> {
    let report = detect_period_bounded(digits, digits.len(), max_span)?;
    let bounds = Bounds { terms: digits.len(), max_span: Some(max_span), ..Bounds::default() };
    let found = report.found.map(|p| (format!("preperiod {} period {}", p.preperiod, p.period), true));
    Ok(DetectorResult::from_option("period", bounds, found))
}

pub fn polynomial_detector(seq: &[BigInt], max_order: usize, max_degree: usize) -> Result<DetectorResult> {
    let found = guess_polynomial_recurrence(seq, max_order, max_degree)?;
    let bounds = Bounds {
        terms: seq.len(),
        max_order: Some(max_order),
        max_degree: Some(max_degree),
        ..Bounds::default()
    };
    Ok(DetectorResult::from_option("polynomial", bounds, found.map(|c| {
        let v = c.validated;
        (c, v)
    })))
}

impl std::fmt::Display for Bounds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(r) = self.max_order {
            write!(f, "order <= {r}, ")?;
        }
        if let Some(d) = self.max_degree {
            write!(f, "degree <= {d}, ")?;
        }
        if let Some(s) = self.max_span {
            write!(f, "preperiod + period <= {s}, ")?;
        }
        write!(f, "horizon {}", self.terms)
    }
}
