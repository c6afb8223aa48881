//! The length-graded series `f(x) = sum_n a(n) x^|tau(n)| = sum_m b(m) x^m`.
//!
//! `b(m)` is computed two ways: by summing `a(n)` over one word length, and by
//! the closed form
//!
//! ```text
//! b(m) = k^(m-1) ((k-1)(m + floor(alpha)) + 1) + 1 - ceil(k^(m - frac(alpha)))
//! ```
//!
//! which splits `f` into a fixed rational function plus the floor series
//! `sum_{m>=1} floor(-k^(m - frac(alpha))) x^m`. Applying `(1/x - k)` to the
//! floor series gives `g(x)`, whose coefficients are the base-`k` digits of
//! `frac(-k^(1 - frac(alpha)))`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::alpha::{AlphaSpec, ExactAlpha, FracPower, Rounding, Sign2};
use crate::arith::kpow;
use crate::error::{Error, Result};
use crate::poly::{Poly, RationalFunctionQ};
use crate::seq::{tau, BaseKWord, FloorLogSeq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoeffTable {
    pub k: u64,
    pub alpha: AlphaSpec,
    pub m_max: u32,
    #[serde(serialize_with = "ser_bigints")]
    pub b: Vec<BigInt>,
    pub method: Method,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

/// Number of summands `k^m`, if it fits the budget.
fn check_budget(k: u64, m: u32, budget: u64) -> Result<u64> {
    k.checked_pow(m).filter(|&n| n <= budget).ok_or_else(|| Error::Budget {
        needed: format!("{k}^{m}"),
        budget,
    })
}

/// Walks `a(n)` upward using only the direct floor comparison.
///
/// Each jump position is located by galloping plus bisection on
/// `floor(alpha + log_k(n+1)) > current`, so this path never touches the
/// root extraction used by the closed form.
struct DirectStepper<'a> {
    k: u64,
    alpha: &'a ExactAlpha,
    value: i64,
    next_jump: u64,
}

impl<'a> DirectStepper<'a> {
    fn new(k: u64, alpha: &'a ExactAlpha, start: u64) -> Self {
        let value = direct(k, alpha, start);
        let next_jump = Self::find_jump(k, alpha, start, value);
        Self { k, alpha, value, next_jump }
    }

    /// Smallest `n > from` with `a(n) > value`.
    fn find_jump(k: u64, alpha: &ExactAlpha, from: u64, value: i64) -> u64 {
        let mut step = 1u64;
        let mut lo = from; // a(lo) <= value
        let mut hi = from.saturating_add(1);
        while direct(k, alpha, hi) <= value {
            lo = hi;
            step = step.saturating_mul(2);
            hi = hi.saturating_add(step);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if direct(k, alpha, mid) > value {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    fn advance_to(&mut self, n: u64) {
        while n >= self.next_jump {
            self.value = direct(self.k, self.alpha, self.next_jump);
            self.next_jump = Self::find_jump(self.k, self.alpha, self.next_jump, self.value);
        }
    }
}

fn direct(k: u64, alpha: &ExactAlpha, n: u64) -> i64 {
    alpha.floor_plus_log_ratio(k, &(BigInt::from(n) + 1u32), &BigInt::one())
}

/// `b(m)` by summing `a(n)` over `k^(m-1) <= n < k^m`; `b(0) = floor(alpha)`.
pub fn b_bruteforce(k: u64, alpha: &AlphaSpec, m: u32, budget: u64) -> Result<BigInt> {
    let exact = alpha.exact()?;
    if m == 0 {
        return Ok(BigInt::from(exact.floor(k)));
    }
    let end = check_budget(k, m, budget)?;
    let start = end / k;
    let mut stepper = DirectStepper::new(k, exact, start);
    let mut sum: i128 = 0;
    for n in start..end {
        stepper.advance_to(n);
        sum += i128::from(stepper.value);
    }
    Ok(BigInt::from(sum))
}

/// `b(m)` for `m >= 1` from the closed form, without summation.
pub fn b_closed_form(k: u64, alpha: &AlphaSpec, m: u32) -> Result<BigInt> {
    if m == 0 {
        return Err(Error::Domain("closed form holds for m >= 1; b(0) = floor(alpha)".into()));
    }
    let fp = FracPower::new(k, alpha.exact()?)?;
    Ok(closed_form(&fp, m))
}

fn closed_form(fp: &FracPower, m: u32) -> BigInt {
    let k = fp.k();
    let lead = kpow(k, u64::from(m - 1))
        * (BigInt::from(k - 1) * (i64::from(m) + fp.floor_alpha()) + 1);
    lead + 1 - fp.value(i64::from(m), Sign2::Plus, Rounding::Ceil)
}

pub fn coeff_table(k: u64, alpha: &AlphaSpec, m_max: u32, method: Method, budget: u64) -> Result<CoeffTable> {
    let exact = alpha.exact()?;
    let mut b = Vec::with_capacity(m_max as usize + 1);
    b.push(BigInt::from(exact.floor(k)));
    match method {
        Method::Brute => {
            for m in 1..=m_max {
                b.push(b_bruteforce(k, alpha, m, budget)?);
            }
        }
        Method::Closed => {
            let fp = FracPower::new(k, exact)?;
            b.extend((1..=m_max).map(|m| closed_form(&fp, m)));
        }
    }
    Ok(CoeffTable { k, alpha: alpha.clone(), m_max, b, method })
}

/// `(c, b)` for `k = 2, alpha = 1/2`: `c = floor(2^(m - 1/2))`, `b = (m+1) 2^(m-1) - c`.
///
/// `c` is computed as `isqrt(2^(2m-1))`; the two-block count
/// `(m-1)(c - 2^(m-1)) + m(2^m - c)` is checked against `b`.
pub fn b_special_case_k2_half(m: u32) -> Result<(BigInt, BigInt)> {
    if m == 0 {
        return Err(Error::Domain("special case holds for m >= 1".into()));
    }
    let c = (BigInt::one() << (2 * m - 1)).sqrt();
    let half = BigInt::one() << (m - 1);
    let full = BigInt::one() << m;
    let b = BigInt::from(m + 1) * &half - &c;
    let blocks = BigInt::from(m - 1) * (&c - &half) + BigInt::from(m) * (&full - &c);
    if blocks != b {
        return Err(Error::Consistency(format!("two-block count {blocks} differs from b({m}) = {b}")));
    }
    Ok((c, b))
}

/// `(1 - x)(kx + F(1 - kx)) / (1 - kx)^2 + x / (1 - x)` with `F = floor(alpha)`, reduced.
pub fn rational_part(k: u64, alpha: &AlphaSpec) -> Result<RationalFunctionQ> {
    let f = FracPower::new(k, alpha.exact()?)?.floor_alpha();
    Ok(rational_part_for(k, f))
}

fn rational_part_for(k: u64, floor_alpha: i64) -> RationalFunctionQ {
    let kk = BigInt::from(k);
    let one_minus_x = Poly::from_i64(&[1, -1]);
    let one_minus_kx = Poly::new(vec![BigInt::one(), -kk.clone()]);
    // kx + F(1 - kx) = F + k(1 - F) x
    let inner = Poly::new(vec![BigInt::from(floor_alpha), kk * (1 - floor_alpha)]);
    let first = RationalFunctionQ::new(one_minus_x.mul(&inner), one_minus_kx.pow(2)).expect("pole-free at 0");
    let second = RationalFunctionQ::new(Poly::from_i64(&[0, 1]), one_minus_x).expect("pole-free at 0");
    first.add(&second)
}

/// `floor(-k^(m - frac(alpha)))`, the non-rational part of `b(m)`.
pub fn floor_term(k: u64, alpha: &AlphaSpec, m: i64) -> Result<BigInt> {
    Ok(FracPower::new(k, alpha.exact()?)?.value(m, Sign2::Minus, Rounding::Floor))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GTransform {
    pub k: u64,
    pub alpha: AlphaSpec,
    pub m_max: u32,
    /// `g[i]` is `g(i + 1)`.
    pub g: Vec<u32>,
}

/// `g(m) = floor(-k^(m+1-frac(alpha))) - k floor(-k^(m-frac(alpha)))` for `1 <= m <= m_max`.
pub fn g_coefficients(k: u64, alpha: &AlphaSpec, m_max: u32) -> Result<GTransform> {
    let fp = FracPower::new(k, alpha.exact()?)?;
    let kk = BigInt::from(k);
    let mut prev = fp.value(1, Sign2::Minus, Rounding::Floor);
    let mut g = Vec::with_capacity(m_max as usize);
    for m in 1..=i64::from(m_max) {
        let next = fp.value(m + 1, Sign2::Minus, Rounding::Floor);
        let digit = &next - &kk * &prev;
        match digit.to_u32() {
            Some(d) if u64::from(d) < k => g.push(d),
            _ => {
                return Err(Error::Consistency(format!(
                    "g({m}) = {digit} is not a base-{k} digit (k={k}, alpha={alpha})"
                )))
            }
        }
        prev = next;
    }
    Ok(GTransform { k, alpha: alpha.clone(), m_max, g })
}

/// Base-`k` digits of `y = frac(-k^(1 - frac(alpha)))`, computed independently of
/// [`g_coefficients`].
///
/// With `z = k^(1 - frac(alpha))`: if `k^alpha` is rational, `y` is an exact
/// rational and its digits come from long division. Otherwise `z` is
/// irrational, `floor(k^m y) = k^m ceil(z) - ceil(k^m z)`, and each ceiling is
/// found by bisection on `t^v p^v >= k^(...) q^v`.
pub fn digit_oracle(k: u64, alpha: &AlphaSpec, m_max: u32) -> Result<Vec<u32>> {
    let a = alpha.exact()?;
    if k < 2 {
        return Err(Error::Parameter(format!("base k must be at least 2, got {k}")));
    }
    match a.classify(k).value() {
        Some(v) => Ok(rational_digits(k, &frac_neg_z_rational(k, a, &v), m_max as usize)),
        None => Ok(irrational_digits(k, a, m_max)),
    }
}

/// Largest `j` with `k^j <= k^alpha`, by scanning powers (oracle-local).
fn oracle_floor(k: u64, a: &ExactAlpha) -> i64 {
    let v = a.r_den();
    let (pv, qv) = (a.p().pow(v), a.q().pow(v));
    // k^j <= k^alpha  <=>  k^(j v - u) q^v <= p^v
    let le = |j: i64| {
        let e = j * i64::from(v) - a.r_num();
        if e >= 0 {
            kpow(k, e as u64) * &qv <= pv
        } else {
            qv <= &pv * kpow(k, e.unsigned_abs())
        }
    };
    let mut j = 0i64;
    while !le(j) {
        j -= 1;
    }
    while le(j + 1) {
        j += 1;
    }
    j
}

/// `y = ceil(z) - z` with `z = k^(1 + floor(alpha)) / k^alpha` rational.
fn frac_neg_z_rational(k: u64, a: &ExactAlpha, k_alpha: &BigRational) -> BigRational {
    let f = oracle_floor(k, a);
    let num = if f + 1 >= 0 {
        BigRational::from_integer(kpow(k, (f + 1) as u64))
    } else {
        BigRational::new(BigInt::one(), kpow(k, (f + 1).unsigned_abs()))
    };
    let z = num / k_alpha;
    z.ceil() - z
}

fn rational_digits(k: u64, y: &BigRational, count: usize) -> Vec<u32> {
    let den = y.denom().clone();
    let mut rem = y.numer().clone();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        rem *= k;
        let (d, r) = rem.div_rem(&den);
        out.push(d.to_u32().expect("digit below k"));
        rem = r;
    }
    out
}

fn irrational_digits(k: u64, a: &ExactAlpha, m_max: u32) -> Vec<u32> {
    let f = oracle_floor(k, a);
    let v = a.r_den();
    // (k^m z)^v = k^(m v + (1 + f) v - u) q^v / p^v
    let (pv, qv) = (a.p().pow(v), a.q().pow(v));
    let ceil_kmz = |m: u32| -> BigInt {
        let e = (i64::from(m) + 1 + f) * i64::from(v) - a.r_num();
        let (target, scale) = if e >= 0 {
            (kpow(k, e as u64) * &qv, pv.clone())
        } else {
            (qv.clone(), &pv * kpow(k, e.unsigned_abs()))
        };
        // smallest t >= 0 with t^v * scale >= target
        let ge = |t: &BigInt| t.pow(v) * &scale >= target;
        let mut hi = BigInt::one();
        while !ge(&hi) {
            hi <<= 1u32;
        }
        let mut lo = BigInt::zero();
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1u32;
            if ge(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if ge(&lo) {
            lo
        } else {
            hi
        }
    };
    let ceil_z = ceil_kmz(0);
    let kk = BigInt::from(k);
    // floor(k^m y) = k^m ceil(z) - ceil(k^m z)
    let floor_kmy = |m: u32| kpow(k, u64::from(m)) * &ceil_z - ceil_kmz(m);
    let mut prev = floor_kmy(0);
    (1..=m_max)
        .map(|m| {
            let cur = floor_kmy(m);
            let d = &cur - &kk * &prev;
            prev = cur;
            d.to_u32().expect("digit in range")
        })
        .collect()
}

/// The eventually periodic digit stream of a rational `y` in `[0, 1)`:
/// `(preperiod, period)` from the first repeated remainder of long division.
fn rational_digit_period(k: u64, y: &BigRational) -> (usize, usize) {
    let den = y.denom().clone();
    let mut seen: BTreeMap<BigInt, usize> = BTreeMap::new();
    let mut rem = y.numer().clone();
    let mut i = 0usize;
    loop {
        if let Some(&first) = seen.get(&rem) {
            return (first, i - first);
        }
        seen.insert(rem.clone(), i);
        rem = (rem * k).mod_floor(&den);
        i += 1;
    }
}

/// The exact generating function `f(x)` when `k^alpha` is rational, `None` otherwise.
///
/// Assembled as `rational_part + H(x)` with `H(x) = x (G(x) + h(1)) / (1 - kx)`,
/// where `h(m) = floor(-k^(m - frac(alpha)))` and `G` is the periodic digit series.
pub fn exact_generating_function(k: u64, alpha: &AlphaSpec) -> Result<Option<RationalFunctionQ>> {
    let a = alpha.exact()?;
    let fp = FracPower::new(k, a)?;
    let Some(v) = a.classify(k).value() else { return Ok(None) };
    let y = frac_neg_z_rational(k, a, &v);
    let (pre, period) = rational_digit_period(k, &y);
    let digits = rational_digits(k, &y, pre + period);
    // G = sum_{m<=pre} g_m x^m + x^pre (sum_{j=1..period} g_{pre+j} x^j) / (1 - x^period)
    let head = Poly::new(
        std::iter::once(BigInt::zero())
            .chain(digits[..pre].iter().map(|&d| BigInt::from(d)))
            .collect(),
    );
    let mut cyc = vec![BigInt::zero(); pre + period + 1];
    for j in 1..=period {
        cyc[pre + j] = BigInt::from(digits[pre + j - 1]);
    }
    let mut cyc_den = vec![BigInt::zero(); period + 1];
    cyc_den[0] = BigInt::one();
    cyc_den[period] = BigInt::from(-1);
    let g = RationalFunctionQ::polynomial(head).add(&RationalFunctionQ::new(Poly::new(cyc), Poly::new(cyc_den))?);
    let h1 = fp.value(1, Sign2::Minus, Rounding::Floor);
    let shifted = g.add(&RationalFunctionQ::polynomial(Poly::constant(h1)));
    let x_over = RationalFunctionQ::new(Poly::from_i64(&[0, 1]), Poly::new(vec![BigInt::one(), -BigInt::from(k)]))?;
    Ok(Some(rational_part_for(k, fp.floor_alpha()).add(&shifted.mul(&x_over))))
}

/// Coefficients `a(n)` attached to the words `tau(n)` with `|tau(n)| <= max_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCTermTable {
    pub k: u64,
    pub alpha: AlphaSpec,
    pub max_len: u32,
    /// Length-then-radix order, which is the order of `n`.
    pub entries: Vec<(BaseKWord, i64)>,
}

impl Serialize for NCTermTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            word: String,
            coeff: i64,
        }
        #[derive(Serialize)]
        struct Table<'a> {
            k: u64,
            alpha: &'a AlphaSpec,
            max_len: u32,
            entries: Vec<Entry>,
        }
        Table {
            k: self.k,
            alpha: &self.alpha,
            max_len: self.max_len,
            entries: self
                .entries
                .iter()
                .map(|(w, c)| Entry { word: w.digit_string(), coeff: *c })
                .collect(),
        }
        .serialize(s)
    }
}

pub fn nc_series_terms(k: u64, alpha: &AlphaSpec, max_len: u32, budget: u64) -> Result<NCTermTable> {
    let exact = alpha.exact()?;
    let count = check_budget(k, max_len, budget)?;
    let values = FloorLogSeq::new(k, exact, count - 1)?.window(0, count);
    let entries = values.into_iter().enumerate().map(|(n, v)| (tau(k, n as u64), v)).collect();
    Ok(NCTermTable { k, alpha: alpha.clone(), max_len, entries })
}

/// `f(x) = f(x, ..., x)`: sum the coefficients of each word length.
pub fn univariate_specialize(table: &NCTermTable) -> CoeffTable {
    let mut b = vec![BigInt::zero(); table.max_len as usize + 1];
    for (w, c) in &table.entries {
        b[w.len()] += *c;
    }
    if table.entries.is_empty() {
        b.truncate(1);
    }
    CoeffTable {
        k: table.k,
        alpha: table.alpha.clone(),
        m_max: table.max_len,
        b,
        method: Method::Brute,
    }
}

/// Letting the variables commute: coefficient per letter-count vector `(i_0, ..., i_{k-1})`.
pub fn commutative_projection(table: &NCTermTable) -> BTreeMap<Vec<u32>, BigInt> {
    let mut out: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    for (w, c) in &table.entries {
        *out.entry(w.letter_counts()).or_default() += *c;
    }
    out
}

/// One row of the coefficient report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesRow {
    pub m: u32,
    pub b_brute: Option<String>,
    pub b_closed: String,
    pub rational_part_coeff: String,
    pub floor_term: Option<String>,
    pub g_m: Option<u32>,
    pub digit_m: Option<u32>,
    /// brute equals closed, and the decomposition adds up
    pub matches: bool,
}

/// Rows `m = 0..=m_max`; brute-force columns are `None` beyond the budget.
pub fn series_rows(k: u64, alpha: &AlphaSpec, m_max: u32, budget: u64) -> Result<Vec<SeriesRow>> {
    let exact = alpha.exact()?;
    let fp = FracPower::new(k, exact)?;
    let rp = rational_part_for(k, fp.floor_alpha()).integer_coefficients(m_max as usize + 1).ok_or_else(|| {
        Error::Consistency("rational part has non-integer coefficients".into())
    })?;
    let g = g_coefficients(k, alpha, m_max)?.g;
    let digits = digit_oracle(k, alpha, m_max)?;
    let mut rows = Vec::with_capacity(m_max as usize + 1);
    for m in 0..=m_max {
        let brute = match b_bruteforce(k, alpha, m, budget) {
            Ok(b) => Some(b),
            Err(Error::Budget { .. }) => None,
            Err(e) => return Err(e),
        };
        let (closed, floor, gm, dm) = if m == 0 {
            (BigInt::from(fp.floor_alpha()), None, None, None)
        } else {
            let i = m as usize - 1;
            (
                closed_form(&fp, m),
                Some(fp.value(i64::from(m), Sign2::Minus, Rounding::Floor)),
                Some(g[i]),
                Some(digits[i]),
            )
        };
        let decomposed = match &floor {
            Some(t) => &rp[m as usize] + t,
            None => rp[0].clone(),
        };
        let matches = brute.as_ref().is_none_or(|b| *b == closed) && decomposed == closed && gm == dm;
        rows.push(SeriesRow {
            m,
            b_brute: brute.map(|b| b.to_string()),
            b_closed: closed.to_string(),
            rational_part_coeff: rp[m as usize].to_string(),
            floor_term: floor.map(|t| t.to_string()),
            g_m: gm,
            digit_m: dm,
            matches,
        });
    }
    Ok(rows)
}

pub fn series_csv(rows: &[SeriesRow]) -> String {
    let opt = |o: &Option<String>| o.clone().unwrap_or_default();
    let optd = |o: Option<u32>| o.map(|d| d.to_string()).unwrap_or_default();
    let mut out = String::from("m,b_brute,b_closed,rational_part_coeff,floor_term,g_m,digit_m,match\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.m,
            opt(&r.b_brute),
            r.b_closed,
            r.rational_part_coeff,
            opt(&r.floor_term),
            optd(r.g_m),
            optd(r.digit_m),
            r.matches
        )
        .expect("write to string");
    }
    out
}
