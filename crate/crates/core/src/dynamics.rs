//! The polynomial `P` with `y'' = P(x, y, y')` along every leaf.

use crate::error::Result;
use crate::poly::{bezout_inverse_mod, SlopePolynomial};
use crate::presentation::WebPresentation;
use crate::series::TruncatedSeries;

/// `P(x, y, p)` of degree at most `d - 1`, stored with all `d` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwPolynomial {
    degree_bound: usize,
    poly: SlopePolynomial,
}

impl PwPolynomial {
    pub fn polynomial(&self) -> &SlopePolynomial {
        &self.poly
    }

    /// Coefficients by ascending power of `p`.
    pub fn coefficients(&self) -> &[TruncatedSeries] {
        self.poly.ascending()
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn order(&self) -> usize {
        self.poly.order()
    }

    /// For 4-webs, `(v_1, v_2, v_3, v_4)` with `P = -v_1 p^3 - v_2 p^2 - v_3 p - v_4`.
    pub fn v_aliases(&self) -> Option<[TruncatedSeries; 4]> {
        if self.degree_bound != 3 {
            return None;
        }
        let c = self.poly.ascending();
        Some([c[3].neg_ref(), c[2].neg_ref(), c[1].neg_ref(), c[0].neg_ref()])
    }

    pub fn eval(&self, p: &TruncatedSeries) -> TruncatedSeries {
        self.poly.eval(p)
    }
}

/// `P = -(F_x + p F_y) * F_p^{-1} mod F`.
pub fn compute_pw(w: &WebPresentation) -> Result<PwPolynomial> {
    let f = w.polynomial();
    let d = w.degree();
    let u = bezout_inverse_mod(f, &f.derive_p())?;
    let transport = f.derive_x()?.add(&f.derive_y()?.shift(1));
    let poly = transport.neg().mul_mod(&u, f)?.padded(d - 1);
    Ok(PwPolynomial { degree_bound: d - 1, poly })
}

/// The web is linear iff `P` vanishes.
pub fn is_linear(pw: &PwPolynomial) -> bool {
    pw.poly.is_zero()
}

/// Necessary condition for linearizability: `deg P <= 3`.
pub fn linearizability_degree_gate(pw: &PwPolynomial) -> bool {
    pw.poly.ascending().iter().skip(4).all(TruncatedSeries::is_zero)
}

/// `P(p_i) - (d_x p_i + p_i d_y p_i)` for each slope.
pub fn interpolation_residuals(pw: &PwPolynomial, slopes: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>> {
    slopes
        .iter()
        .map(|p| {
            let transport = p.derive_x()?.add_ref(&p.mul_ref(&p.derive_y()?));
            Ok(pw.eval(p).sub_ref(&transport))
        })
        .collect()
}
