//! Truncated bivariate power series over exact rationals.
//!
//! A [`TruncatedSeries`] of order `N` stores every coefficient of `x^i y^j`
//! with `i + j < N`. Monomials of total degree `>= N` are unknown, not zero,
//! and every operation reports the order it can actually guarantee.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, WebError};

pub type Rational = BigRational;

/// Builds an exact rational from integer numerator and denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[inline]
fn tri(t: usize) -> usize {
    t * (t + 1) / 2
}

/// Dense index of `x^i y^j`, sorted by total degree, then by `i`.
#[inline]
pub fn monomial_index(i: usize, j: usize) -> usize {
    tri(i + j) + i
}

/// Inverse of [`monomial_index`].
pub fn monomial_at(index: usize) -> (usize, usize) {
    let mut t = 0;
    while tri(t + 1) <= index {
        t += 1;
    }
    let i = index - tri(t);
    (i, t - i)
}

/// A bivariate Taylor jet at the origin with explicit precision.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    order: usize,
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        Self { order, coeffs: vec![Rational::zero(); tri(order)] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(value: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.coeffs[0] = value;
        }
        s
    }

    /// `c * x^i * y^j`, truncated at `order`.
    pub fn monomial(i: usize, j: usize, c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if i + j < order {
            s.coeffs[monomial_index(i, j)] = c;
        }
        s
    }

    pub fn x(order: usize) -> Self {
        Self::monomial(1, 0, Rational::one(), order)
    }

    pub fn y(order: usize) -> Self {
        Self::monomial(0, 1, Rational::one(), order)
    }

    /// Builds a series from `(i, j, c)` terms. Repeated monomials accumulate;
    /// terms of total degree `>= order` are dropped.
    pub fn from_terms<I>(terms: I, order: usize) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut s = Self::zero(order);
        for (i, j, c) in terms {
            if i + j < order {
                let k = monomial_index(i, j);
                s.coeffs[k] = &s.coeffs[k] + c;
            }
        }
        s
    }

    /// Convenience constructor from small integer fractions `(i, j, num, den)`.
    pub fn from_int_terms(terms: &[(usize, usize, i64, i64)], order: usize) -> Self {
        Self::from_terms(terms.iter().map(|&(i, j, n, d)| (i, j, rat(n, d))), order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        if i + j < self.order {
            self.coeffs[monomial_index(i, j)].clone()
        } else {
            Rational::zero()
        }
    }

    pub fn coeff_ref(&self, i: usize, j: usize) -> Option<&Rational> {
        (i + j < self.order).then(|| &self.coeffs[monomial_index(i, j)])
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: Rational) {
        assert!(i + j < self.order, "monomial x^{i} y^{j} beyond order {}", self.order);
        self.coeffs[monomial_index(i, j)] = c;
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(0, 0)
    }

    /// Nonzero terms `(i, j, c)` in canonical order (total degree, then `i`).
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| {
            let (i, j) = monomial_at(k);
            (i, j, c)
        })
    }

    /// Zero at the series' own precision: every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Zero at precision `n`: coefficients with `i + j < min(n, order)` vanish.
    pub fn is_zero_at(&self, n: usize) -> bool {
        self.coeffs[..tri(n.min(self.order))].iter().all(Zero::is_zero)
    }

    /// Invertible in the local ring: the constant term is known and nonzero.
    pub fn is_unit(&self) -> bool {
        self.order > 0 && !self.coeffs[0].is_zero()
    }

    /// Lowest total degree carrying a nonzero coefficient, if any is known.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|k| {
            let (i, j) = monomial_at(k);
            i + j
        })
    }

    /// Drops every coefficient of total degree `>= order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self { order, coeffs: self.coeffs[..tri(order)].to_vec() }
    }

    /// Declares more precision than the series carries by padding with zeros.
    /// Only sound for series known to be exact polynomials.
    pub fn extend_exact(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(tri(order.max(self.order)), Rational::zero());
        let mut s = Self { order: order.max(self.order), coeffs };
        if order < self.order {
            s = s.truncate(order);
        }
        s
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.order);
        }
        Self { order: self.order, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let n = tri(order);
        Self { order, coeffs: self.coeffs[..n].iter().zip(&other.coeffs[..n]).map(|(a, b)| a + b).collect() }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let n = tri(order);
        Self { order, coeffs: self.coeffs[..n].iter().zip(&other.coeffs[..n]).map(|(a, b)| a - b).collect() }
    }

    pub fn neg_ref(&self) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = vec![Rational::zero(); tri(order)];
        let (lhs, ld) = integer_terms(&self.coeffs, order);
        if lhs.is_empty() {
            return Self { order, coeffs: out };
        }
        let (rhs, rd) = integer_terms(&other.coeffs, order);
        // Accumulate over the common denominator; one reduction per output.
        let mut acc = vec![BigInt::zero(); tri(order)];
        for (i1, j1, a) in &lhs {
            let t1 = i1 + j1;
            for (i2, j2, b) in &rhs {
                if t1 + i2 + j2 >= order {
                    // rhs is sorted by total degree
                    break;
                }
                acc[monomial_index(i1 + i2, j1 + j2)] += a * b;
            }
        }
        let den = ld * rd;
        for (o, n) in out.iter_mut().zip(acc) {
            if !n.is_zero() {
                *o = BigRational::new(n, den.clone());
            }
        }
        Self { order, coeffs: out }
    }

    /// Multiplicative inverse; the order is preserved.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(WebError::NotAUnit);
        }
        let order = self.order;
        // With s = S / D for integer S, 1/s = D * (1/S), and the degree-t
        // coefficients of 1/S are N / c^(t+1) with integer N, c = S(0):
        // N_t = -sum_s S_s N_(t-s) c^(s-1).
        let (terms, den) = integer_terms(&self.coeffs, order);
        let c0 = terms[0].2.clone();
        let mut powers = vec![BigInt::one()];
        for _ in 0..order {
            let next = powers.last().expect("nonempty") * &c0;
            powers.push(next);
        }
        let mut num = vec![BigInt::zero(); tri(order)];
        num[0] = BigInt::one();
        for t in 1..order {
            for i in 0..=t {
                let j = t - i;
                let mut acc = BigInt::zero();
                for (a, b, c) in terms.iter().skip(1) {
                    if a + b > t {
                        break;
                    }
                    if *a <= i && *b <= j {
                        acc += c * &num[monomial_index(i - a, j - b)] * &powers[a + b - 1];
                    }
                }
                num[monomial_index(i, j)] = -acc;
            }
        }
        let coeffs = num
            .into_iter()
            .enumerate()
            .map(|(k, n)| {
                if n.is_zero() {
                    return Rational::zero();
                }
                let (i, j) = monomial_at(k);
                BigRational::new(n * &den, powers[i + j + 1].clone())
            })
            .collect();
        Ok(Self { order, coeffs })
    }

    pub fn derive_x(&self) -> Result<Self> {
        self.derive(true)
    }

    pub fn derive_y(&self) -> Result<Self> {
        self.derive(false)
    }

    fn derive(&self, along_x: bool) -> Result<Self> {
        if self.order <= 1 {
            return Err(WebError::PrecisionExhausted { context: "derivative of a series with order <= 1".into() });
        }
        let order = self.order - 1;
        let mut out = vec![Rational::zero(); tri(order)];
        for t in 0..order {
            for i in 0..=t {
                let j = t - i;
                let (src, factor) = if along_x { ((i + 1, j), i + 1) } else { ((i, j + 1), j + 1) };
                let c = &self.coeffs[monomial_index(src.0, src.1)];
                if !c.is_zero() {
                    out[monomial_index(i, j)] = c * BigInt::from(factor);
                }
            }
        }
        Ok(Self { order, coeffs: out })
    }

    /// Mixed derivative `d_x^a d_y^b`.
    pub fn derive_xy(&self, a: usize, b: usize) -> Result<Self> {
        let mut s = self.clone();
        for _ in 0..a {
            s = s.derive_x()?;
        }
        for _ in 0..b {
            s = s.derive_y()?;
        }
        Ok(s)
    }

    /// Composes with the linear substitution `x -> m00 X + m01 Y`,
    /// `y -> m10 X + m11 Y`. Order is preserved since homogeneous parts map
    /// to homogeneous parts.
    pub fn linear_substitute(&self, m: [[Rational; 2]; 2]) -> Self {
        let order = self.order;
        let powers = |a: &Rational, b: &Rational, n: usize| -> Vec<Self> {
            // (a X + b Y)^k for k < n
            let base = Self::from_terms([(1, 0, a.clone()), (0, 1, b.clone())], order);
            let mut v = vec![Self::one(order)];
            for k in 1..n {
                let next = v[k - 1].mul_ref(&base);
                v.push(next);
            }
            v
        };
        let xs = powers(&m[0][0], &m[0][1], order.max(1));
        let ys = powers(&m[1][0], &m[1][1], order.max(1));
        let mut out = Self::zero(order);
        for (i, j, c) in self.terms() {
            out = out.add_ref(&xs[i].mul_ref(&ys[j]).scale(c));
        }
        out
    }

    /// Evaluates the truncated polynomial at a rational point.
    pub fn evaluate(&self, x: &Rational, y: &Rational) -> Rational {
        self.terms().fold(Rational::zero(), |acc, (i, j, c)| acc + c * num_traits::pow(x.clone(), i) * num_traits::pow(y.clone(), j))
    }

    /// Largest absolute numerator/denominator bit length, a cheap size gauge.
    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.numer().bits().max(c.denom().bits())).max().unwrap_or(0)
    }
}

/// Nonzero terms as integer numerators over a common denominator, sorted by
/// total degree.
fn integer_terms(coeffs: &[Rational], order: usize) -> (Vec<(usize, usize, BigInt)>, BigInt) {
    let den = coeffs[..tri(order)].iter().filter(|c| !c.is_zero()).fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let terms = nonzero_terms(coeffs, order).into_iter().map(|(i, j, c)| (i, j, c.numer() * (&den / c.denom()))).collect();
    (terms, den)
}

fn nonzero_terms(coeffs: &[Rational], order: usize) -> Vec<(usize, usize, &Rational)> {
    coeffs[..tri(order)]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| {
            let (i, j) = monomial_at(k);
            (i, j, c)
        })
        .collect()
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, c) in self.terms() {
            let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono = match (i, j) {
                (0, 0) => String::new(),
                (1, 0) => "x".into(),
                (0, 1) => "y".into(),
                (i, 0) => format!("x^{i}"),
                (0, j) => format!("y^{j}"),
                (1, 1) => "x*y".into(),
                (1, j) => format!("x*y^{j}"),
                (i, 1) => format!("x^{i}*y"),
                (i, j) => format!("x^{i}*y^{j}"),
            };
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({})", self.order)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.add_ref(rhs)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.sub_ref(rhs)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.mul_ref(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.neg_ref()
    }
}

impl Add for TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.add_ref(&rhs)
    }
}

impl Sub for TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.sub_ref(&rhs)
    }
}

impl Mul for TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.mul_ref(&rhs)
    }
}

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(terms: &[(usize, usize, i64, i64)], order: usize) -> TruncatedSeries {
        TruncatedSeries::from_int_terms(terms, order)
    }

    #[test]
    fn index_roundtrip() {
        for k in 0..200 {
            let (i, j) = monomial_at(k);
            assert_eq!(monomial_index(i, j), k);
        }
        assert_eq!(monomial_at(1), (0, 1));
        assert_eq!(monomial_at(2), (1, 0));
    }

    #[test]
    fn add_keeps_min_order() {
        let a = s(&[(0, 0, 1, 1), (1, 0, 1, 1)], 5);
        let b = s(&[(0, 1, 1, 1)], 5);
        assert_eq!(&a + &b, s(&[(0, 0, 1, 1), (1, 0, 1, 1), (0, 1, 1, 1)], 5));
        let c = s(&[(0, 1, 1, 1)], 3);
        assert_eq!((&a + &c).order(), 3);
    }

    #[test]
    fn monomial_product() {
        let xy = &TruncatedSeries::x(4) * &TruncatedSeries::y(4);
        assert_eq!(xy, s(&[(1, 1, 1, 1)], 4));
    }

    #[test]
    fn product_truncates() {
        // (1 + x + x^2 + x^3)(1 - x) = 1 - x^4, and x^4 is beyond order 4
        let a = s(&[(0, 0, 1, 1), (1, 0, 1, 1), (2, 0, 1, 1), (3, 0, 1, 1)], 4);
        let b = s(&[(0, 0, 1, 1), (1, 0, -1, 1)], 4);
        assert_eq!(&a * &b, TruncatedSeries::one(4));
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(TruncatedSeries::one(6).invert().unwrap(), TruncatedSeries::one(6));
        let geo = s(&[(0, 0, 1, 1), (1, 0, -1, 1)], 4).invert().unwrap();
        assert_eq!(geo, s(&[(0, 0, 1, 1), (1, 0, 1, 1), (2, 0, 1, 1), (3, 0, 1, 1)], 4));
        let u = s(&[(0, 0, 2, 1), (1, 0, -3, 1), (2, 0, 1, 1)], 3).invert().unwrap();
        assert_eq!(u, s(&[(0, 0, 1, 2), (1, 0, 3, 4), (2, 0, 7, 8)], 3));
    }

    #[test]
    fn inversion_rejects_non_units() {
        assert_eq!(TruncatedSeries::x(5).invert(), Err(WebError::NotAUnit));
    }

    #[test]
    fn derivative_examples() {
        let d = s(&[(2, 1, 1, 1)], 6).derive_x().unwrap();
        assert_eq!(d, s(&[(1, 1, 2, 1)], 5));
        assert!(TruncatedSeries::constant(int(7), 4).derive_y().unwrap().is_zero());
        let geo = s(&[(0, 0, 1, 1), (1, 0, -1, 1)], 5).invert().unwrap().derive_x().unwrap();
        assert_eq!(geo, s(&[(0, 0, 1, 1), (1, 0, 2, 1), (2, 0, 3, 1), (3, 0, 4, 1)], 4));
    }

    #[test]
    fn derivative_exhausts_precision() {
        let c = TruncatedSeries::one(1);
        assert!(matches!(c.derive_x(), Err(WebError::PrecisionExhausted { .. })));
    }

    #[test]
    fn zero_is_relative_to_order() {
        let a = s(&[(3, 0, 1, 1)], 6);
        assert!(a.is_zero_at(3));
        assert!(!a.is_zero_at(4));
        assert!(!a.is_zero());
        assert_eq!(a.valuation(), Some(3));
    }

    #[test]
    fn linear_substitution_composes() {
        // (x + y)^2 under x -> X + Y, y -> X - Y becomes 4 X^2
        let a = s(&[(2, 0, 1, 1), (1, 1, 2, 1), (0, 2, 1, 1)], 5);
        let m = [[int(1), int(1)], [int(1), int(-1)]];
        assert_eq!(a.linear_substitute(m), s(&[(2, 0, 4, 1)], 5));
    }

    #[test]
    fn display_is_readable() {
        let a = s(&[(0, 0, 1, 2), (1, 0, -1, 1), (1, 1, 3, 1)], 4);
        assert_eq!(a.to_string(), "1/2 - x + 3*x*y + O(4)");
    }
}
