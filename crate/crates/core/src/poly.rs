//! Polynomials in the slope variable `p` with truncated-series coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Result, WebError};
use crate::matrix::SeriesMatrix;
use crate::series::TruncatedSeries;

/// An element of `O[p]`. Coefficients are stored by ascending power of `p`;
/// the formal degree is `len - 1` even when the leading coefficient vanishes.
#[derive(Clone, PartialEq, Eq)]
pub struct SlopePolynomial {
    coeffs: Vec<TruncatedSeries>,
}

impl SlopePolynomial {
    pub fn from_ascending(coeffs: Vec<TruncatedSeries>) -> Self {
        assert!(!coeffs.is_empty(), "a slope polynomial needs at least one coefficient");
        Self { coeffs }
    }

    /// Builds `c_0 p^n + c_1 p^{n-1} + ... + c_n` from `[c_0, ..., c_n]`.
    pub fn from_descending(mut coeffs: Vec<TruncatedSeries>) -> Self {
        coeffs.reverse();
        Self::from_ascending(coeffs)
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(TruncatedSeries::zero(order))
    }

    pub fn constant(c: TruncatedSeries) -> Self {
        Self { coeffs: vec![c] }
    }

    /// The monomial `p^k` with unit coefficient.
    pub fn p_power(k: usize, order: usize) -> Self {
        let mut coeffs = vec![TruncatedSeries::zero(order); k + 1];
        coeffs[k] = TruncatedSeries::one(order);
        Self { coeffs }
    }

    /// `p - root`.
    pub fn linear_factor(root: &TruncatedSeries) -> Self {
        Self::from_ascending(vec![root.neg_ref(), TruncatedSeries::one(root.order())])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Option<&TruncatedSeries> {
        self.coeffs.get(k)
    }

    pub fn ascending(&self) -> &[TruncatedSeries] {
        &self.coeffs
    }

    pub fn descending(&self) -> Vec<TruncatedSeries> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn leading(&self) -> &TruncatedSeries {
        self.coeffs.last().expect("non-empty")
    }

    pub fn order(&self) -> usize {
        self.coeffs.iter().map(TruncatedSeries::order).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(TruncatedSeries::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|c| c.truncate(order))
    }

    pub fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> Self {
        Self { coeffs: self.coeffs.iter().map(f).collect() }
    }

    fn try_map(&self, f: impl Fn(&TruncatedSeries) -> Result<TruncatedSeries>) -> Result<Self> {
        Ok(Self { coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let order = self.order().min(other.order());
        let zero = TruncatedSeries::zero(order);
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).unwrap_or(&zero);
                let b = other.coeffs.get(k).unwrap_or(&zero);
                a.add_ref(b)
            })
            .collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(TruncatedSeries::neg_ref)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut coeffs = vec![TruncatedSeries::zero(order); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add_ref(&a.mul_ref(b));
                }
            }
        }
        Self { coeffs }
    }

    pub fn scale(&self, c: &TruncatedSeries) -> Self {
        self.map(|a| a.mul_ref(c))
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: usize) -> Self {
        let order = self.order();
        let mut coeffs = vec![TruncatedSeries::zero(order); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Formal derivative in `p`; the formal degree drops by one.
    pub fn derive_p(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(self.order());
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.scale(&BigRational::from_integer(BigInt::from(k)))).collect();
        Self { coeffs }
    }

    pub fn derive_x(&self) -> Result<Self> {
        self.try_map(TruncatedSeries::derive_x)
    }

    pub fn derive_y(&self) -> Result<Self> {
        self.try_map(TruncatedSeries::derive_y)
    }

    /// Horner evaluation at a series value of `p`.
    pub fn eval(&self, p: &TruncatedSeries) -> TruncatedSeries {
        let mut acc = self.leading().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul_ref(p).add_ref(c);
        }
        acc
    }

    /// Euclidean division by a polynomial whose leading coefficient is a unit.
    pub fn divmod(&self, divisor: &Self) -> Result<(Self, Self)> {
        let lead_inv = divisor.leading().invert()?;
        let db = divisor.degree();
        let order = self.order().min(divisor.order());
        let mut rem = self.truncate(order).coeffs;
        if rem.len() <= db {
            let mut r = rem;
            r.resize(db.max(1), TruncatedSeries::zero(order));
            return Ok((Self::zero(order), Self { coeffs: r }));
        }
        let qlen = rem.len() - db;
        let mut quot = vec![TruncatedSeries::zero(order); qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + db].mul_ref(&lead_inv);
            if !c.is_zero() {
                for (i, b) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] = rem[k + i].sub_ref(&c.mul_ref(b));
                }
            }
            quot[k] = c;
        }
        rem.truncate(db.max(1));
        if db == 0 {
            rem[0] = TruncatedSeries::zero(order);
        }
        Ok((Self { coeffs: quot }, Self { coeffs: rem }))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.divmod(divisor)?.1)
    }

    /// `self * other mod modulus`.
    pub fn mul_mod(&self, other: &Self, modulus: &Self) -> Result<Self> {
        self.mul(other).rem(modulus)
    }

    /// Pads the coefficient list with zeros up to formal degree `deg`.
    pub fn padded(&self, deg: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < deg + 1 {
            coeffs.resize(deg + 1, TruncatedSeries::zero(self.order()));
        }
        Self { coeffs }
    }
}

/// Sylvester matrix of `a` (degree m) and `b` (degree n), size m+n.
pub fn sylvester_matrix(a: &SlopePolynomial, b: &SlopePolynomial) -> SeriesMatrix {
    let (m, n) = (a.degree(), b.degree());
    let size = m + n;
    let order = a.order().min(b.order());
    let mut s = SeriesMatrix::zeros(size, size, order);
    let (ad, bd) = (a.descending(), b.descending());
    for r in 0..n {
        for (k, c) in ad.iter().enumerate() {
            s.set(r, r + k, c.clone());
        }
    }
    for r in 0..m {
        for (k, c) in bd.iter().enumerate() {
            s.set(n + r, r + k, c.clone());
        }
    }
    s
}

/// `Res_p(a, b)` as the determinant of the Sylvester matrix.
pub fn sylvester_resultant(a: &SlopePolynomial, b: &SlopePolynomial) -> Result<TruncatedSeries> {
    if a.degree() < 1 || b.degree() < 1 {
        return Err(WebError::InvalidDegree { degree: a.degree().min(b.degree()), reason: "resultant needs both degrees >= 1".into() });
    }
    let m = sylvester_matrix(a, b);
    if m.order() == 0 {
        return Err(WebError::PrecisionExhausted { context: "resultant of polynomials with no known coefficients".into() });
    }
    m.determinant()
}

/// Returns `u` with `u * g = 1 mod f` and `deg u < deg f`.
pub fn bezout_inverse_mod(f: &SlopePolynomial, g: &SlopePolynomial) -> Result<SlopePolynomial> {
    let d = f.degree();
    if d == 0 {
        return Err(WebError::InvalidDegree { degree: 0, reason: "modulus must have positive degree".into() });
    }
    let order = f.order().min(g.order());
    let g = g.rem(f)?;
    // Column j holds the coefficients of g * p^j mod f.
    let mut m = SeriesMatrix::zeros(d, d, order);
    for j in 0..d {
        let col = g.shift(j).rem(f)?.padded(d - 1);
        for i in 0..d {
            m.set(i, j, col.ascending()[i].clone());
        }
    }
    let mut rhs = vec![TruncatedSeries::zero(order); d];
    rhs[0] = TruncatedSeries::one(order);
    let u = m.solve(&rhs).map_err(|e| match e {
        WebError::NotAUnit => WebError::NotCoprime,
        other => other,
    })?;
    Ok(SlopePolynomial::from_ascending(u))
}

/// Monic product of `(p - r)` over the given roots.
pub fn product_of_linear_factors(roots: &[TruncatedSeries], order: usize) -> SlopePolynomial {
    roots.iter().fold(SlopePolynomial::constant(TruncatedSeries::one(order)), |acc, r| acc.mul(&SlopePolynomial::linear_factor(r)))
}

impl fmt::Debug for SlopePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().enumerate().rev().map(|(k, c)| format!("({c})*p^{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
