//! Univariate polynomials over the integers and reduced rational functions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Coefficients low degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<BigInt>);

impl Poly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `c x^d`
    pub fn monomial(c: impl Into<BigInt>, d: usize) -> Self {
        let mut v = vec![BigInt::zero(); d + 1];
        v[d] = c.into();
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::default();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(1), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        Poly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn to_rational(&self) -> Vec<BigRational> {
        self.0.iter().cloned().map(BigRational::from_integer).collect()
    }

    /// Truncated power series of `self`: first `n` coefficients.
    pub fn truncated(&self, n: usize) -> Vec<BigInt> {
        (0..n).map(|i| self.coeff(i)).collect()
    }
}

fn trim_q(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

/// Remainder of `a` modulo `b` over the rationals.
fn rem_q(mut a: Vec<BigRational>, b: &[BigRational]) -> Vec<BigRational> {
    trim_q(&mut a);
    let lead = b.last().expect("nonzero divisor").clone();
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let f = a.last().expect("nonempty") / &lead;
        for (i, y) in b.iter().enumerate() {
            a[shift + i] -= &f * y;
        }
        a.pop();
        trim_q(&mut a);
    }
    a
}

/// Quotient of an exact division over the rationals.
fn div_exact_q(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut rem = a.to_vec();
    trim_q(&mut rem);
    if rem.is_empty() {
        return Vec::new();
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut quot = vec![BigRational::zero(); rem.len() + 1 - b.len()];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let f = rem.last().expect("nonempty") / &lead;
        for (i, y) in b.iter().enumerate() {
            rem[shift + i] -= &f * y;
        }
        quot[shift] = f;
        rem.pop();
        trim_q(&mut rem);
    }
    debug_assert!(rem.is_empty(), "division was not exact");
    quot
}

/// Monic-free gcd over the rationals, returned as a primitive integer polynomial.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.to_rational(), b.to_rational());
    while !y.is_empty() {
        let r = rem_q(x, &y);
        x = y;
        y = r;
    }
    let g = primitive_from_rational(&x);
    if g.0.last().is_some_and(Signed::is_negative) {
        g.scale(&BigInt::from(-1))
    } else {
        g
    }
}

fn primitive_from_rational(v: &[BigRational]) -> Poly {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let p = Poly::new(v.iter().map(|x| (x * &lcm).to_integer()).collect());
    let c = p.content();
    if c.is_zero() || c.is_one() {
        p
    } else {
        Poly::new(p.0.iter().map(|x| x / &c).collect())
    }
}

/// `numerator / denominator` in lowest terms with integer coefficients.
///
/// Normalized so that the denominator has a positive constant term and the
/// coefficients of numerator and denominator together have gcd 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunctionQ {
    numerator: Poly,
    denominator: Poly,
}

impl RationalFunctionQ {
    pub fn new(numerator: Poly, denominator: Poly) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        let g = gcd(&numerator, &denominator);
        let (gq, nq, dq) = (g.to_rational(), numerator.to_rational(), denominator.to_rational());
        let n = div_exact_q(&nq, &gq);
        let d = div_exact_q(&dq, &gq);
        let lcm = n.iter().chain(&d).fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut num = Poly::new(n.iter().map(|x| (x * &lcm).to_integer()).collect());
        let mut den = Poly::new(d.iter().map(|x| (x * &lcm).to_integer()).collect());
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = Poly::new(num.0.iter().map(|x| x / &c).collect());
            den = Poly::new(den.0.iter().map(|x| x / &c).collect());
        }
        let d0 = den.coeff(0);
        if d0.is_zero() {
            return Err(Error::Domain("denominator vanishes at x = 0; not a power series".into()));
        }
        if d0.is_negative() {
            let m1 = BigInt::from(-1);
            num = num.scale(&m1);
            den = den.scale(&m1);
        }
        Ok(Self { numerator: num, denominator: den })
    }

    pub fn polynomial(p: Poly) -> Self {
        Self::new(p, Poly::constant(1)).expect("unit denominator")
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self
            .numerator
            .mul(&other.denominator)
            .add(&other.numerator.mul(&self.denominator));
        let d = self.denominator.mul(&other.denominator);
        Self::new(n, d).expect("product of series denominators")
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.numerator.mul(&other.numerator), self.denominator.mul(&other.denominator))
            .expect("product of series denominators")
    }

    /// First `n` Taylor coefficients, via the linear recurrence of the denominator.
    pub fn coefficients(&self, n: usize) -> Vec<BigRational> {
        let d = self.denominator.coeffs();
        let d0 = BigRational::from_integer(d[0].clone());
        let mut out: Vec<BigRational> = Vec::with_capacity(n);
        for m in 0..n {
            let mut acc = BigRational::from_integer(self.numerator.coeff(m));
            for (j, dj) in d.iter().enumerate().skip(1).take(m) {
                if !dj.is_zero() {
                    acc -= &out[m - j] * dj;
                }
            }
            out.push(acc / &d0);
        }
        out
    }

    /// Taylor coefficients when they are all integers.
    pub fn integer_coefficients(&self, n: usize) -> Option<Vec<BigInt>> {
        self.coefficients(n)
            .into_iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

fn fmt_poly(p: &Poly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_zero() {
        return f.write_str("0");
    }
    let mut first = true;
    for (i, c) in p.0.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        let show_coeff = i == 0 || !mag.is_one();
        if show_coeff {
            write!(f, "{mag}")?;
        }
        match i {
            0 => {}
            1 => f.write_str("x")?,
            _ => write!(f, "x^{i}")?,
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_poly(self, f)
    }
}

impl fmt::Display for RationalFunctionQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

impl Serialize for RationalFunctionQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs = |p: &Poly| p.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>();
        let mut st = s.serialize_struct("RationalFunctionQ", 3)?;
        st.serialize_field("numerator", &strs(&self.numerator))?;
        st.serialize_field("denominator", &strs(&self.denominator))?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}
