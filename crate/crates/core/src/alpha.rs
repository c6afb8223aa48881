//! Exact representation of the real parameter alpha and the floors built from it.
//!
//! An exact alpha has the form `r + log_k(p/q)` with `r` rational and `p/q` a
//! positive rational. Every floor and ceiling below reduces to comparisons of
//! big integers; no floating point is involved. A [`DecimalInterval`] is kept
//! for best-effort irrational inputs: its floors are either certified or
//! rejected.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{cmp_scaled, exact_root, floor_root, ilog, kpow, rational_floor};
use crate::error::{Error, Result};

/// Default precision cap, in bits, for decimal-interval floors.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

/// `r_num/r_den + log_k(p/q)`, fully reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactAlpha {
    r_num: i64,
    r_den: u32,
    p: BigInt,
    q: BigInt,
}

/// A decimal midpoint with a rational radius, for irrational alpha.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecimalInterval {
    digits: String,
    mid: BigRational,
    radius: BigRational,
    radius_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaSpec {
    Exact(ExactAlpha),
    Interval(DecimalInterval),
}

/// Whether `k^alpha` is rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class")]
pub enum KAlphaClass {
    RationalValue { num: String, den: String },
    Irrational,
}

impl KAlphaClass {
    pub fn is_rational(&self) -> bool {
        matches!(self, KAlphaClass::RationalValue { .. })
    }

    pub fn value(&self) -> Option<BigRational> {
        match self {
            KAlphaClass::RationalValue { num, den } => Some(BigRational::new(
                num.parse().expect("stored numerator"),
                den.parse().expect("stored denominator"),
            )),
            KAlphaClass::Irrational => None,
        }
    }
}

impl fmt::Display for KAlphaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KAlphaClass::RationalValue { num, den } if den == "1" => write!(f, "Rational({num})"),
            KAlphaClass::RationalValue { num, den } => write!(f, "Rational({num}/{den})"),
            KAlphaClass::Irrational => f.write_str("Irrational"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign2 {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
}

fn check_base(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::Parameter(format!("base k must be at least 2, got {k}")));
    }
    if k > u64::from(u32::MAX) {
        return Err(Error::Parameter(format!("base k too large: {k}")));
    }
    Ok(())
}

impl ExactAlpha {
    /// Builds `r_num/r_den + log_k(p/q)` and reduces both fractions.
    pub fn new(r_num: i64, r_den: i64, p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if r_den == 0 {
            return Err(Error::Parse("zero denominator in rational part".into()));
        }
        if !p.is_positive() || !q.is_positive() {
            return Err(Error::Parse("log argument must be a positive rational".into()));
        }
        let (mut n, mut d) = (r_num as i128, r_den as i128);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        let (n, d) = (n / g, d / g);
        let r_den = u32::try_from(d).map_err(|_| Error::Parse("rational denominator too large".into()))?;
        let r_num = i64::try_from(n).map_err(|_| Error::Parse("rational numerator too large".into()))?;
        let g = p.gcd(&q);
        Ok(Self { r_num, r_den, p: p / &g, q: q / g })
    }

    pub fn rational(num: i64, den: i64) -> Result<Self> {
        Self::new(num, den, 1, 1)
    }

    pub fn integer(n: i64) -> Self {
        Self::new(n, 1, 1, 1).expect("integer alpha")
    }

    pub fn r_num(&self) -> i64 {
        self.r_num
    }

    pub fn r_den(&self) -> u32 {
        self.r_den
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn has_log_part(&self) -> bool {
        !(self.p.is_one() && self.q.is_one())
    }

    /// Is `k^j <= k^alpha * x` for the positive rational `x = xn/xd`?
    ///
    /// Raised to the `r_den` power: `k^(j v - u) (q xd)^v <= (p xn)^v`.
    fn kpow_le(&self, k: u64, j: i64, xn: &BigInt, xd: &BigInt) -> bool {
        let v = self.r_den;
        let e = j * i64::from(v) - self.r_num;
        let lhs = (&self.q * xd).pow(v);
        let rhs = (&self.p * xn).pow(v);
        cmp_scaled(k, e, &lhs, &rhs) != Ordering::Greater
    }

    /// `floor(alpha + log_k(xn/xd))` for a positive rational argument.
    pub fn floor_plus_log_ratio(&self, k: u64, xn: &BigInt, xd: &BigInt) -> i64 {
        debug_assert!(xn.is_positive() && xd.is_positive());
        let a = &self.p * xn;
        let b = &self.q * xd;
        let est = ilog(k, &a) as i64 - ilog(k, &b) as i64 + Integer::div_floor(&self.r_num, &i64::from(self.r_den));
        let mut j = est;
        while !self.kpow_le(k, j, xn, xd) {
            j -= 1;
        }
        while self.kpow_le(k, j + 1, xn, xd) {
            j += 1;
        }
        j
    }

    pub fn floor(&self, k: u64) -> i64 {
        self.floor_plus_log_ratio(k, &BigInt::one(), &BigInt::one())
    }

    /// Splits alpha into `floor(alpha)` and a fractional part in `[0, 1)`.
    ///
    /// The fractional part keeps its rational component in `[0, 1)` and folds
    /// the remaining integer shift into the log argument.
    pub fn floor_and_frac(&self, k: u64) -> (i64, ExactAlpha) {
        let fl = self.floor(k);
        let v = i64::from(self.r_den);
        let r_int = Integer::div_floor(&self.r_num, &v);
        let r_frac = self.r_num - r_int * v;
        // alpha - fl = r_frac/v + log_k(p/q * k^(r_int - fl))
        let shift = r_int - fl;
        let (mut p, mut q) = (self.p.clone(), self.q.clone());
        if shift >= 0 {
            p *= kpow(k, shift as u64);
        } else {
            q *= kpow(k, shift.unsigned_abs());
        }
        let theta = ExactAlpha::new(r_frac, v, p, q).expect("normalized fractional part");
        debug_assert_eq!(theta.floor(k), 0);
        (fl, theta)
    }

    pub fn classify(&self, k: u64) -> KAlphaClass {
        // k^alpha = k^(u/v) * p/q; rational iff k^|u| is a perfect v-th power.
        let base = kpow(k, self.r_num.unsigned_abs());
        match exact_root(&base, self.r_den) {
            None => KAlphaClass::Irrational,
            Some(root) => {
                let value = if self.r_num >= 0 {
                    BigRational::new(root * &self.p, self.q.clone())
                } else {
                    BigRational::new(self.p.clone(), root * &self.q)
                };
                KAlphaClass::RationalValue {
                    num: value.numer().to_string(),
                    den: value.denom().to_string(),
                }
            }
        }
    }
}

impl fmt::Display for ExactAlpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rational = if self.r_den == 1 {
            self.r_num.to_string()
        } else {
            format!("{}/{}", self.r_num, self.r_den)
        };
        if !self.has_log_part() {
            return f.write_str(&rational);
        }
        let arg = if self.q.is_one() {
            self.p.to_string()
        } else {
            format!("{}/{}", self.p, self.q)
        };
        if self.r_num == 0 {
            write!(f, "log({arg})")
        } else {
            write!(f, "{rational}+log({arg})")
        }
    }
}

/// Floors of `±k^(m - frac(alpha))` for a fixed base and exact alpha.
#[derive(Debug, Clone)]
pub struct FracPower {
    k: u64,
    floor_alpha: i64,
    theta: ExactAlpha,
}

impl FracPower {
    pub fn new(k: u64, alpha: &ExactAlpha) -> Result<Self> {
        check_base(k)?;
        let (floor_alpha, theta) = alpha.floor_and_frac(k);
        Ok(Self { k, floor_alpha, theta })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn floor_alpha(&self) -> i64 {
        self.floor_alpha
    }

    pub fn theta(&self) -> &ExactAlpha {
        &self.theta
    }

    /// `(floor(y), y is an integer)` for `y = k^(m - theta) > 0`.
    ///
    /// With `theta = u/v + log_k(p/q)`, `y^v = k^(m v - u) (q/p)^v`, and
    /// `floor(y)` is the integer `v`-th root of `floor(y^v)`.
    fn floor_positive(&self, m: i64) -> (BigInt, bool) {
        let t = &self.theta;
        let v = t.r_den;
        let e = m * i64::from(v) - t.r_num;
        let (mut num, mut den) = (t.q.pow(v), t.p.pow(v));
        if e >= 0 {
            num *= kpow(self.k, e as u64);
        } else {
            den *= kpow(self.k, e.unsigned_abs());
        }
        let root = floor_root(&(&num / &den), v);
        let exact = root.pow(v) * &den == num;
        (root, exact)
    }

    pub fn value(&self, m: i64, sign: Sign2, mode: Rounding) -> BigInt {
        let (fl, exact) = self.floor_positive(m);
        let ceil = if exact { fl.clone() } else { &fl + 1 };
        match (sign, mode) {
            (Sign2::Plus, Rounding::Floor) => fl,
            (Sign2::Plus, Rounding::Ceil) => ceil,
            (Sign2::Minus, Rounding::Floor) => -ceil,
            (Sign2::Minus, Rounding::Ceil) => -fl,
        }
    }

    /// `ceil(k^(m - theta))`: the smallest `n+1` at which `a(n)` reaches `floor(alpha) + m`.
    pub fn threshold(&self, m: i64) -> BigInt {
        self.value(m, Sign2::Plus, Rounding::Ceil)
    }
}

impl DecimalInterval {
    pub fn mid(&self) -> &BigRational {
        &self.mid
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn lo(&self) -> BigRational {
        &self.mid - &self.radius
    }

    pub fn hi(&self) -> BigRational {
        &self.mid + &self.radius
    }

    /// Certified `floor(alpha + log_k(n+1))` for every alpha in the interval.
    pub fn floor_plus_log(&self, k: u64, n: u64, cap_bits: u32) -> Result<i64> {
        let x = BigInt::from(n) + 1u32;
        let mut bits = 64u32.min(cap_bits.max(1));
        loop {
            let (llo, lhi) = log_interval(k, &x, bits);
            let lo = rational_floor(&(self.lo() + llo));
            let hi = rational_floor(&(self.hi() + lhi));
            if lo == hi {
                return lo
                    .to_i64()
                    .ok_or_else(|| Error::Domain("floor out of i64 range".into()));
            }
            if bits >= cap_bits {
                return Err(Error::AmbiguousFloor {
                    bits,
                    detail: format!(
                        "n={n}: alpha + log_k(n+1) spans [{lo}, {hi}]; more than {cap_bits} bits or a radius below the distance to the nearest integer is required"
                    ),
                });
            }
            bits = bits.saturating_mul(2).min(cap_bits);
        }
    }
}

/// Rigorous enclosure `[lo, hi]` of `log_k(x)` for an integer `x >= 1`, using
/// up to `bits` fractional binary digits.
///
/// Digits come from repeated squaring of `x / k^c` held as a fixed-point
/// interval; extraction stops early if a digit cannot be certified.
pub fn log_interval(k: u64, x: &BigInt, bits: u32) -> (BigRational, BigRational) {
    let c = ilog(k, x);
    let kk = BigInt::from(k);
    let scale_bits = u64::from(bits) + 64;
    let one = BigInt::one() << scale_bits;
    let kscaled = &kk * &one;
    let denom = kpow(k, c);
    let scaled = x << scale_bits;
    let mut xl = &scaled / &denom;
    let mut xh = (&scaled + &denom - 1u32) / &denom;
    let mut acc = BigInt::zero();
    let mut got = 0u32;
    while got < bits {
        xl = (&xl * &xl) >> scale_bits;
        xh = (&xh * &xh + &one - 1u32) >> scale_bits;
        let bit = if xl >= kscaled {
            xl = &xl / &kk;
            xh = (&xh + &kk - 1u32) / &kk;
            1u32
        } else if xh < kscaled {
            0u32
        } else {
            break;
        };
        acc = (acc << 1u32) + bit;
        got += 1;
    }
    let den = BigInt::one() << got;
    let base = BigRational::from_integer(BigInt::from(c));
    let lo = &base + BigRational::new(acc.clone(), den.clone());
    let hi = &base + BigRational::new(acc + 1u32, den);
    (lo, hi)
}

impl AlphaSpec {
    pub fn exact(&self) -> Result<&ExactAlpha> {
        match self {
            AlphaSpec::Exact(a) => Ok(a),
            AlphaSpec::Interval(d) => Err(Error::UndecidableRepresentation(format!(
                "operation needs an exact alpha, got dec:{}",
                d.digits
            ))),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AlphaSpec::Exact(_))
    }
}

impl From<ExactAlpha> for AlphaSpec {
    fn from(a: ExactAlpha) -> Self {
        AlphaSpec::Exact(a)
    }
}

/// Decides whether `k^alpha` is rational.
pub fn classify_k_alpha(k: u64, alpha: &AlphaSpec) -> Result<KAlphaClass> {
    check_base(k)?;
    Ok(alpha.exact()?.classify(k))
}

/// `floor(alpha + log_k(n + 1))`.
pub fn floor_alpha_plus_log(k: u64, alpha: &AlphaSpec, n: u64) -> Result<i64> {
    check_base(k)?;
    match alpha {
        AlphaSpec::Exact(a) => Ok(a.floor_plus_log_ratio(k, &(BigInt::from(n) + 1u32), &BigInt::one())),
        AlphaSpec::Interval(d) => d.floor_plus_log(k, n, DEFAULT_PRECISION_CAP),
    }
}

/// `floor` or `ceil` of `sign * k^(m - frac(alpha))`.
pub fn floor_k_power(k: u64, alpha: &AlphaSpec, m: i64, sign: Sign2, mode: Rounding) -> Result<BigInt> {
    Ok(FracPower::new(k, alpha.exact()?)?.value(m, sign, mode))
}

/// `(floor(alpha), frac(alpha))` with the fractional part renormalized into `[0, 1)`.
pub fn floor_and_frac_alpha(k: u64, alpha: &AlphaSpec) -> Result<(i64, ExactAlpha)> {
    check_base(k)?;
    Ok(alpha.exact()?.floor_and_frac(k))
}

// ---------------------------------------------------------------------------
// Parsing

fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    if t.is_empty() || !t.trim_start_matches(['-', '+']).chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not an integer: {s:?}")));
    }
    t.parse::<BigInt>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

fn parse_ratio(s: &str) -> Result<(BigInt, BigInt)> {
    match s.split_once('/') {
        Some((a, b)) => {
            let b = parse_int(b)?;
            if b.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok((parse_int(a)?, b))
        }
        None => Ok((parse_int(s)?, BigInt::one())),
    }
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.contains('/') {
        let (a, b) = parse_ratio(t)?;
        return Ok(BigRational::new(a, b));
    }
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("not a decimal: {s:?}")));
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().expect("digits");
    let scale = frac_part.len() as i32 - exp;
    let mut value = if scale >= 0 {
        BigRational::new(digits, BigInt::from(10u32).pow(scale as u32))
    } else {
        BigRational::from_integer(digits * BigInt::from(10u32).pow(scale.unsigned_abs()))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

fn parse_log(s: &str) -> Result<Option<(BigInt, BigInt)>> {
    let t = s.trim();
    let Some(inner) = t.strip_prefix("log(").and_then(|r| r.strip_suffix(')')) else {
        return Ok(None);
    };
    let (p, q) = parse_ratio(inner)?;
    if !p.is_positive() || !q.is_positive() {
        return Err(Error::Parse(format!("log argument must be positive: {s:?}")));
    }
    Ok(Some((p, q)))
}

fn small(x: BigInt, what: &str) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Parse(format!("{what} out of range: {x}")))
}

impl FromStr for AlphaSpec {
    type Err = Error;

    /// Grammar (whitespace ignored):
    ///
    /// ```text
    /// alpha    := exact | "dec:" decimal "~" radius
    /// exact    := rat | rat ("+" | "-") log | ["-"] log
    /// log      := "log(" posrat ")"
    /// rat      := ["-"] int ["/" int]
    /// radius   := decimal | int "/" int        (must be > 0)
    /// decimal  := ["-"] digits ["." digits] ["e" ["-"] digits]
    /// ```
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty alpha".into()));
        }
        if let Some(rest) = compact.strip_prefix("dec:") {
            let (mid_text, rad_text) = rest
                .split_once('~')
                .ok_or_else(|| Error::Parse(format!("expected dec:<digits>~<radius>, got {s:?}")))?;
            let mid = parse_decimal(mid_text)?;
            let radius = parse_decimal(rad_text)?;
            if !radius.is_positive() {
                return Err(Error::Parse("interval radius must be positive".into()));
            }
            return Ok(AlphaSpec::Interval(DecimalInterval {
                digits: mid_text.to_string(),
                mid,
                radius,
                radius_text: rad_text.to_string(),
            }));
        }
        // A leading sign belongs to the first term; split at the sign before "log(".
        let (rat_text, log_text, negate_log) = match compact.find("log(") {
            None => (compact.as_str(), None, false),
            Some(0) => ("0", Some(&compact[..]), false),
            Some(i) => {
                let head = &compact[..i];
                let (rat, neg) = match head.chars().last() {
                    Some('+') => (&head[..head.len() - 1], false),
                    Some('-') => (&head[..head.len() - 1], true),
                    _ => return Err(Error::Parse(format!("expected '+' or '-' before log in {s:?}"))),
                };
                let rat = if rat.is_empty() { "0" } else { rat };
                (rat, Some(&compact[i..]), neg)
            }
        };
        let (rn, rd) = parse_ratio(rat_text)?;
        let (mut p, mut q) = (BigInt::one(), BigInt::one());
        if let Some(lt) = log_text {
            let (lp, lq) = parse_log(lt)?.ok_or_else(|| Error::Parse(format!("malformed log term in {s:?}")))?;
            if negate_log {
                (p, q) = (lq, lp);
            } else {
                (p, q) = (lp, lq);
            }
        }
        let exact = ExactAlpha::new(small(rn, "numerator")?, small(rd, "denominator")?, p, q)?;
        Ok(AlphaSpec::Exact(exact))
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Exact(a) => a.fmt(f),
            AlphaSpec::Interval(d) => write!(f, "dec:{}~{}", d.digits, d.radius_text),
        }
    }
}

impl Serialize for AlphaSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AlphaSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for ExactAlpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
