//! The first-order linear system whose solutions `b_3, ..., b_d` are exactly
//! the closed forms `b(p) (dy - p dx) / F_p` on the surface `F = 0`.
//!
//! Closedness on every sheet reads `X(b) - Q b = 0 mod F`, where
//! `X = d_x + p d_y + P d_p` is the transport along the leaves and
//! `Q = (X(F_p) + F_y) / F_p mod F`. The derivative part `b_x + p b_y` has
//! degree at most `d - 2` in `p`; the zeroth-order part reduces to degree
//! `d - 1`, and its top coefficient vanishes identically because the sheet
//! forms always sum to zero. The remaining `d - 1` coefficients are the rows.

use crate::dynamics::compute_pw;
use crate::error::{Result, WebError};
use crate::poly::{bezout_inverse_mod, SlopePolynomial};
use crate::presentation::WebPresentation;
use crate::series::TruncatedSeries;

/// Zeroth-order coefficients `A[r][j]`: row `r` is the coefficient of `p^r`,
/// column `j` multiplies `b_{j+3}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeSystem {
    degree: usize,
    table: Vec<Vec<TruncatedSeries>>,
}

/// Coefficients `b_3, ..., b_d` of `b(p) = b_3 p^{d-3} + ... + b_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianCandidate {
    b: Vec<TruncatedSeries>,
}

impl AbelianCandidate {
    pub fn new(b: Vec<TruncatedSeries>) -> Self {
        Self { b }
    }

    pub fn zero(degree: usize, order: usize) -> Self {
        Self { b: vec![TruncatedSeries::zero(order); degree - 2] }
    }

    /// `b_j` for `3 <= j <= d`.
    pub fn get(&self, j: usize) -> &TruncatedSeries {
        &self.b[j - 3]
    }

    pub fn coefficients(&self) -> &[TruncatedSeries] {
        &self.b
    }

    /// `b(p)` as a polynomial in `p`.
    pub fn polynomial(&self) -> SlopePolynomial {
        SlopePolynomial::from_descending(self.b.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { b: self.b.iter().zip(&other.b).map(|(a, c)| a.add_ref(c)).collect() }
    }

    pub fn scale(&self, c: &TruncatedSeries) -> Self {
        Self { b: self.b.iter().map(|a| a.mul_ref(c)).collect() }
    }
}

impl SlopeSystem {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The `(d - 1) x (d - 2)` table.
    pub fn table(&self) -> &[Vec<TruncatedSeries>] {
        &self.table
    }

    /// `A_{r+1, j+1}` with zero-based `r`, `j`.
    pub fn entry(&self, r: usize, j: usize) -> &TruncatedSeries {
        &self.table[r][j]
    }

    pub fn order(&self) -> usize {
        self.table.iter().flatten().map(TruncatedSeries::order).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().flatten().all(TruncatedSeries::is_zero)
    }

    /// Function index (as in `b_j`) carrying `d_x` in row `r`, if any.
    pub fn x_function(&self, r: usize) -> Option<usize> {
        (r + 3 <= self.degree).then(|| self.degree - r)
    }

    /// Function index carrying `d_y` in row `r`, if any.
    pub fn y_function(&self, r: usize) -> Option<usize> {
        (r >= 1).then(|| self.degree - r + 1)
    }
}

/// The zeroth-order polynomials `P d_p(p^{d-j}) - Q p^{d-j} mod F`, one per
/// unknown `b_j`, each padded to formal degree `d - 1`.
pub fn zeroth_order_terms(w: &WebPresentation) -> Result<Vec<SlopePolynomial>> {
    let f = w.polynomial();
    let d = w.degree();
    let fp = f.derive_p();
    let u = bezout_inverse_mod(f, &fp)?;
    let pw = compute_pw(w)?;
    let p_poly = pw.polynomial();
    let fy = f.derive_y()?;
    let x_fp = fp.derive_x()?.add(&fp.derive_y()?.shift(1)).add(&p_poly.mul(&fp.derive_p()));
    let q = x_fp.add(&fy).mul_mod(&u, f)?;
    let order = p_poly.order().min(q.order());
    (3..=d)
        .map(|j| {
            let monomial = SlopePolynomial::p_power(d - j, order);
            let z = p_poly.mul(&monomial.derive_p()).sub(&q.mul(&monomial));
            Ok(z.rem(f)?.padded(d - 1))
        })
        .collect()
}

/// Derives the coefficient table of the system from the presentation.
pub fn derive_system(w: &WebPresentation) -> Result<SlopeSystem> {
    let d = w.degree();
    let z = zeroth_order_terms(w)?;
    for (k, poly) in z.iter().enumerate() {
        let top = &poly.ascending()[d - 1];
        if !top.is_zero() {
            return Err(WebError::Dimension(format!("closedness for b_{} leaves a nonzero p^{} coefficient {top}", k + 3, d - 1)));
        }
    }
    let table = (0..d - 1).map(|r| z.iter().map(|poly| poly.ascending()[r].clone()).collect()).collect();
    Ok(SlopeSystem { degree: d, table })
}

/// Left-hand sides of the `d - 1` equations for a concrete candidate.
pub fn residual(sys: &SlopeSystem, c: &AbelianCandidate) -> Result<Vec<TruncatedSeries>> {
    let d = sys.degree;
    if c.b.len() != d - 2 {
        return Err(WebError::Dimension(format!("candidate has {} coefficients, expected {}", c.b.len(), d - 2)));
    }
    (0..d - 1)
        .map(|r| {
            let mut acc = sys.table[r].iter().zip(&c.b).fold(TruncatedSeries::zero(sys.order()), |acc, (a, b)| acc.add_ref(&a.mul_ref(b)));
            if let Some(j) = sys.x_function(r) {
                acc = acc.add_ref(&c.get(j).derive_x()?);
            }
            if let Some(j) = sys.y_function(r) {
                acc = acc.add_ref(&c.get(j).derive_y()?);
            }
            Ok(acc)
        })
        .collect()
}

/// Encodes sheet data `h_i` (with `sum h_i (dy - p_i dx)` the candidate
/// relation, i.e. `h_i = g_i(F_i) d_y F_i`) as `b = a_0 sum h_i prod_{j != i} (p - p_j)`,
/// so that `b(p_i) = h_i F_p(p_i)`. Fails unless `b` has degree at most `d - 3`,
/// which is the condition `sum h_i (dy - p_i dx) = 0`.
pub fn encode_relation(w: &WebPresentation, h: &[TruncatedSeries]) -> Result<AbelianCandidate> {
    let slopes = w.slopes().ok_or(WebError::NoExplicitSlopes)?;
    let d = w.degree();
    if h.len() != d {
        return Err(WebError::Dimension(format!("{} sheet values for a {d}-web", h.len())));
    }
    let order = w.order().min(h.iter().map(TruncatedSeries::order).min().unwrap_or(0));
    let mut b = SlopePolynomial::zero(order);
    for (i, hi) in h.iter().enumerate() {
        let others: Vec<_> = slopes.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, s)| s.clone()).collect();
        b = b.add(&crate::poly::product_of_linear_factors(&others, order).scale(hi));
    }
    let b = b.scale(w.polynomial().leading()).padded(d - 1);
    let coeffs = b.ascending();
    for k in [d - 2, d - 1] {
        if !coeffs[k].is_zero() {
            return Err(WebError::Dimension(format!("sheet forms do not sum to zero (p^{k} coefficient {})", coeffs[k])));
        }
    }
    Ok(AbelianCandidate::new(coeffs[..d - 2].iter().rev().cloned().collect()))
}
