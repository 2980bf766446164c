//! Classical 3-web curvature computed directly from slopes, and the checks
//! that compare it with the connection pipeline.

use log::info;
use num_traits::One;

use crate::connection::{blaschke_chern_trace, connection_of};
use crate::error::{Result, WebError};
use crate::presentation::{SubwebSelector, WebPresentation};
use crate::series::{Rational, TruncatedSeries};

/// `gamma = g_1 dx + g_2 dy` with `d omega_i = gamma ^ omega_i`, and
/// `d gamma = (d_x g_2 - d_y g_1) dx ^ dy`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlaschkeData {
    pub gamma_form: (TruncatedSeries, TruncatedSeries),
    pub curvature: TruncatedSeries,
}

fn check_distinct(slopes: &[TruncatedSeries]) -> Result<()> {
    for i in 0..slopes.len() {
        for j in i + 1..slopes.len() {
            if slopes[i].constant_term() == slopes[j].constant_term() {
                return Err(WebError::SlopeCollision { first: i + 1, second: j + 1 });
            }
        }
    }
    Ok(())
}

/// Normalization with `rho_1 = 1` so that `sum rho_i (dy - p_i dx) = 0`.
pub fn normalizing_factors(p: &[TruncatedSeries; 3]) -> Result<[TruncatedSeries; 3]> {
    check_distinct(p)?;
    let inv = p[1].sub_ref(&p[2]).invert()?;
    let order = inv.order();
    Ok([TruncatedSeries::one(order), p[2].sub_ref(&p[0]).mul_ref(&inv), p[0].sub_ref(&p[1]).mul_ref(&inv)])
}

/// Solves `d omega_i = gamma ^ omega_i` for `omega_i = rho_i (dy - p_i dx)`,
/// using sheets 1 and 2 and checking sheet 3.
pub fn gamma_for(p: &[TruncatedSeries; 3], rho: &[TruncatedSeries; 3]) -> Result<(TruncatedSeries, TruncatedSeries)> {
    // (g_1 + p_i g_2) rho_i = d_x rho_i + d_y (rho_i p_i)
    let h = |i: usize| -> Result<TruncatedSeries> {
        let lhs = rho[i].derive_x()?.add_ref(&rho[i].mul_ref(&p[i]).derive_y()?);
        Ok(lhs.mul_ref(&rho[i].invert()?))
    };
    let (h1, h2, h3) = (h(0)?, h(1)?, h(2)?);
    let g2 = h1.sub_ref(&h2).mul_ref(&p[0].sub_ref(&p[1]).invert()?);
    let g1 = h1.sub_ref(&p[0].mul_ref(&g2));
    let check = g1.add_ref(&p[2].mul_ref(&g2)).sub_ref(&h3);
    if !check.is_zero() {
        return Err(WebError::Dimension(format!("third sheet is inconsistent: {check}")));
    }
    Ok((g1, g2))
}

pub fn blaschke_curvature_3web(slopes: &[TruncatedSeries]) -> Result<BlaschkeData> {
    let p: [TruncatedSeries; 3] =
        slopes.to_vec().try_into().map_err(|_| WebError::Dimension(format!("{} slopes for a 3-web", slopes.len())))?;
    let rho = normalizing_factors(&p)?;
    let (g1, g2) = gamma_for(&p, &rho)?;
    let curvature = g2.derive_x()?.sub_ref(&g1.derive_y()?);
    Ok(BlaschkeData { gamma_form: (g1, g2), curvature })
}

/// Curvature of every 3-subweb, in canonical selector order.
pub fn subweb_curvatures(w: &WebPresentation) -> Result<Vec<(SubwebSelector, TruncatedSeries)>> {
    let slopes = w.slopes().ok_or(WebError::NoExplicitSlopes)?;
    SubwebSelector::all(3, w.degree())
        .into_iter()
        .map(|sel| {
            let picked: Vec<_> = sel.indices().iter().map(|&i| slopes[i - 1].clone()).collect();
            Ok((sel, blaschke_curvature_3web(&picked)?.curvature))
        })
        .collect()
}

fn sum(items: impl IntoIterator<Item = TruncatedSeries>, order: usize) -> TruncatedSeries {
    items.into_iter().fold(TruncatedSeries::zero(order), |a, b| a.add_ref(&b))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceCheck {
    pub lhs: TruncatedSeries,
    pub rhs: TruncatedSeries,
    pub subwebs: Vec<(SubwebSelector, TruncatedSeries)>,
    pub equal: bool,
}

/// Trace of the connection curvature against the sum of the 3-subweb
/// curvatures.
pub fn trace_formula_check(w: &WebPresentation) -> Result<TraceCheck> {
    if w.slopes().is_none() {
        return Err(WebError::NoExplicitSlopes);
    }
    let lhs = blaschke_chern_trace(&connection_of(w)?)?;
    let subwebs = subweb_curvatures(w)?;
    let rhs = sum(subwebs.iter().map(|(_, k)| k.clone()), w.order());
    let equal = lhs.sub_ref(&rhs).is_zero();
    Ok(TraceCheck { lhs, rhs, subwebs, equal })
}

/// Cross-ratio and extracted curvatures of a 4-web.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossRatioReport {
    pub cross_ratio: TruncatedSeries,
    pub is_constant: bool,
    /// Curvature of the 3-subweb obtained by omitting leaf `i + 1`.
    pub extracted_curvatures: Vec<TruncatedSeries>,
    pub all_equal: bool,
}

impl CrossRatioReport {
    /// Constant cross-ratio and equal extracted curvatures go together.
    pub fn equivalence_holds(&self) -> bool {
        self.is_constant == self.all_equal
    }
}

/// `(p_1 - p_3)(p_2 - p_4) / ((p_1 - p_4)(p_2 - p_3))`.
pub fn cross_ratio(p: &[TruncatedSeries]) -> Result<TruncatedSeries> {
    check_distinct(p)?;
    let num = p[0].sub_ref(&p[2]).mul_ref(&p[1].sub_ref(&p[3]));
    let den = p[0].sub_ref(&p[3]).mul_ref(&p[1].sub_ref(&p[2]));
    Ok(num.mul_ref(&den.invert()?))
}

pub fn nakai_checks_d4(w: &WebPresentation) -> Result<CrossRatioReport> {
    if w.degree() != 4 {
        return Err(WebError::InvalidDegree { degree: w.degree(), reason: "cross-ratio checks need a 4-web".into() });
    }
    let slopes = w.slopes().ok_or(WebError::NoExplicitSlopes)?;
    let cr = cross_ratio(slopes)?;
    let is_constant = cr.terms().all(|(i, j, _)| i + j == 0);
    let extracted = (0..4)
        .map(|omit| {
            let picked: Vec<_> = (0..4).filter(|&i| i != omit).map(|i| slopes[i].clone()).collect();
            Ok(blaschke_curvature_3web(&picked)?.curvature)
        })
        .collect::<Result<Vec<_>>>()?;
    let all_equal = extracted.windows(2).all(|w| w[0].sub_ref(&w[1]).is_zero());
    let report = CrossRatioReport { cross_ratio: cr, is_constant, extracted_curvatures: extracted, all_equal };
    if !report.equivalence_holds() {
        info!("cross-ratio constancy and curvature equality disagree");
    }
    Ok(report)
}

/// Sum of the four extracted curvatures, computed without the connection.
pub fn rectified_trace_oracle(w: &WebPresentation) -> Result<TruncatedSeries> {
    let report = nakai_checks_d4(w)?;
    Ok(sum(report.extracted_curvatures, w.order()))
}

/// Curvature of the 3-web `(x, y, F)` in those coordinates:
/// `d_x d_y log(F_x / F_y)`, computed as
/// `d_y (F_xx / F_x - F_xy / F_y)`.
pub fn rectified_curvature(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    let fx = f.derive_x()?;
    let fy = f.derive_y()?;
    let a = fx.derive_x()?.mul_ref(&fx.invert()?);
    let b = fy.derive_x()?.mul_ref(&fy.invert()?);
    a.sub_ref(&b).derive_y()
}

/// Coefficient of a curvature 2-form after the similarity chart
/// `(X, Y) = (x - t y, t x + y)`, for which `dX ^ dY = (1 + t^2) dx ^ dy`.
pub fn chart_curvature(k: &TruncatedSeries, t: &Rational) -> TruncatedSeries {
    let norm = (Rational::one() + t * t).recip();
    let back = [[norm.clone(), t * &norm], [-(t * &norm), norm.clone()]];
    k.linear_substitute(back).scale(&norm)
}
