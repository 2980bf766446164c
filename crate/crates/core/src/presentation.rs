//! Implicit presentations `F(x, y, p) = a_0 p^d + ... + a_d` of planar webs.

use num_traits::{One, Zero};

use crate::error::{Result, WebError};
use crate::poly::{product_of_linear_factors, sylvester_resultant, SlopePolynomial};
use crate::series::{Rational, TruncatedSeries};

/// A non-singular web presentation: `a_0` is a unit and `Res_p(F, F_p)(0) != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WebPresentation {
    degree: usize,
    polynomial: SlopePolynomial,
    resultant: TruncatedSeries,
    slopes: Option<Vec<TruncatedSeries>>,
}

/// One check of [`validate`], with the precision at which it was decided.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRecord {
    pub passed: bool,
    pub precision: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub degree: usize,
    pub leading_unit: CheckRecord,
    pub resultant: TruncatedSeries,
    pub resultant_unit: CheckRecord,
    /// `F(p_i) = 0` for every cached slope, when slopes are known.
    pub slopes_are_roots: Option<CheckRecord>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.leading_unit.passed && self.resultant_unit.passed && self.slopes_are_roots.as_ref().is_none_or(|c| c.passed)
    }
}

/// Sorted 1-based leaf indices selecting a subweb.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubwebSelector {
    indices: Vec<usize>,
}

impl SubwebSelector {
    pub fn new(mut indices: Vec<usize>, degree: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(WebError::InvalidSelector { reason: format!("indices {indices:?} are not distinct") });
        }
        if indices.iter().any(|&i| i == 0 || i > degree) {
            return Err(WebError::InvalidSelector { reason: format!("indices {indices:?} outside 1..={degree}") });
        }
        if indices.len() < 3 {
            return Err(WebError::InvalidSelector { reason: "a subweb needs at least three leaves".into() });
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// All selectors of the given size in lexicographic order.
    pub fn all(size: usize, degree: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(size);
        fn rec(start: usize, size: usize, degree: usize, cur: &mut Vec<usize>, out: &mut Vec<SubwebSelector>) {
            if cur.len() == size {
                out.push(SubwebSelector { indices: cur.clone() });
                return;
            }
            for i in start..=degree {
                cur.push(i);
                rec(i + 1, size, degree, cur, out);
                cur.pop();
            }
        }
        rec(1, size, degree, &mut cur, &mut out);
        out
    }

    /// The single leaf of `1..=degree` missing from a selector of size `degree - 1`.
    pub fn omitted(&self, degree: usize) -> Vec<usize> {
        (1..=degree).filter(|i| !self.indices.contains(i)).collect()
    }
}

fn check_distinct_constants(slopes: &[TruncatedSeries]) -> Result<()> {
    for i in 0..slopes.len() {
        for j in i + 1..slopes.len() {
            if slopes[i].order() == 0 || slopes[i].constant_term() == slopes[j].constant_term() {
                return Err(WebError::SlopeCollision { first: i + 1, second: j + 1 });
            }
        }
    }
    Ok(())
}

impl WebPresentation {
    /// Monic presentation `prod (p - p_i)` of a web given by its slopes.
    pub fn from_slopes(slopes: Vec<TruncatedSeries>) -> Result<Self> {
        let d = slopes.len();
        if d < 3 {
            return Err(WebError::InvalidDegree { degree: d, reason: "a web needs at least three foliations".into() });
        }
        check_distinct_constants(&slopes)?;
        let order = slopes.iter().map(TruncatedSeries::order).min().unwrap_or(0);
        let polynomial = product_of_linear_factors(&slopes, order);
        let mut w = Self::checked(polynomial)?;
        w.slopes = Some(slopes);
        Ok(w)
    }

    /// Presentation from `[a_0, ..., a_d]` (descending powers of `p`), kept as given.
    pub fn from_coefficients(descending: Vec<TruncatedSeries>) -> Result<Self> {
        Self::checked(SlopePolynomial::from_descending(descending))
    }

    fn checked(polynomial: SlopePolynomial) -> Result<Self> {
        let d = polynomial.degree();
        if d < 3 {
            return Err(WebError::InvalidDegree { degree: d, reason: "a web needs at least three foliations".into() });
        }
        if !polynomial.leading().is_unit() {
            return Err(WebError::SingularAtOrigin { reason: "leading coefficient a_0 is not a unit".into() });
        }
        let resultant = sylvester_resultant(&polynomial, &polynomial.derive_p())?;
        if !resultant.is_unit() {
            return Err(WebError::SingularAtOrigin { reason: "p-resultant vanishes at the origin".into() });
        }
        Ok(Self { degree: d, polynomial, resultant, slopes: None })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn polynomial(&self) -> &SlopePolynomial {
        &self.polynomial
    }

    /// `[a_0, ..., a_d]`.
    pub fn coefficients(&self) -> Vec<TruncatedSeries> {
        self.polynomial.descending()
    }

    pub fn resultant(&self) -> &TruncatedSeries {
        &self.resultant
    }

    pub fn slopes(&self) -> Option<&[TruncatedSeries]> {
        self.slopes.as_deref()
    }

    pub fn order(&self) -> usize {
        self.polynomial.order()
    }

    /// `pi_d = (d - 1)(d - 2) / 2`, the rank bound.
    pub fn rank_bound(&self) -> usize {
        rank_bound(self.degree)
    }

    /// The same web presented by `u * F`; cached slopes are kept.
    pub fn scaled(&self, unit: &TruncatedSeries) -> Result<Self> {
        if !unit.is_unit() {
            return Err(WebError::NotAUnit);
        }
        let mut w = Self::checked(self.polynomial.scale(unit))?;
        w.slopes = self.slopes.clone();
        Ok(w)
    }

    /// Lowers the working precision.
    pub fn truncated(&self, order: usize) -> Result<Self> {
        let mut w = Self::checked(self.polynomial.truncate(order))?;
        w.slopes = self.slopes.as_ref().map(|s| s.iter().map(|p| p.truncate(order)).collect());
        Ok(w)
    }

    pub fn extract_subweb(&self, selector: &SubwebSelector) -> Result<Self> {
        let slopes = self.slopes.as_ref().ok_or(WebError::NoExplicitSlopes)?;
        if selector.indices.iter().any(|&i| i > slopes.len()) {
            return Err(WebError::InvalidSelector { reason: format!("selector {:?} exceeds degree {}", selector.indices, slopes.len()) });
        }
        Self::from_slopes(selector.indices.iter().map(|&i| slopes[i - 1].clone()).collect())
    }

    /// Pushes an explicit-slope web through [`apply_affine_chart`].
    pub fn apply_affine_chart(&self, t: &Rational) -> Result<Self> {
        let slopes = self.slopes.as_ref().ok_or(WebError::NoExplicitSlopes)?;
        let leaves: Vec<LeafDirection> = slopes.iter().cloned().map(LeafDirection::Slope).collect();
        Self::from_slopes(apply_affine_chart(&leaves, t)?)
    }
}

pub fn rank_bound(d: usize) -> usize {
    (d - 1) * (d - 2) / 2
}

/// Non-singularity checks of a presentation, each with its decision precision.
pub fn validate(w: &WebPresentation) -> ValidationReport {
    validate_polynomial(w.polynomial(), w.slopes())
}

/// As [`validate`], on raw coefficients that may fail the checks.
pub fn validate_polynomial(f: &SlopePolynomial, slopes: Option<&[TruncatedSeries]>) -> ValidationReport {
    let lead = f.leading();
    let resultant = sylvester_resultant(f, &f.derive_p()).unwrap_or_else(|_| TruncatedSeries::zero(f.order()));
    let slopes_are_roots = slopes.map(|s| {
        let values: Vec<TruncatedSeries> = s.iter().map(|p| f.eval(p)).collect();
        CheckRecord {
            passed: values.iter().all(TruncatedSeries::is_zero),
            precision: values.iter().map(TruncatedSeries::order).min().unwrap_or(0),
        }
    });
    ValidationReport {
        degree: f.degree(),
        leading_unit: CheckRecord { passed: lead.is_unit(), precision: lead.order() },
        resultant_unit: CheckRecord { passed: resultant.is_unit(), precision: resultant.order() },
        resultant,
        slopes_are_roots,
    }
}

/// Direction of a foliation at each point: `dy = p dx` or `dx = q dy`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafDirection {
    Slope(TruncatedSeries),
    InverseSlope(TruncatedSeries),
}

impl LeafDirection {
    /// Leaves `x = const`.
    pub fn vertical(order: usize) -> Self {
        LeafDirection::InverseSlope(TruncatedSeries::zero(order))
    }

    /// Leaves of `g = const` for a first integral `g` with `g_y(0) != 0`
    /// (slope) or else `g_x(0) != 0` (inverse slope).
    pub fn from_first_integral(g: &TruncatedSeries) -> Result<Self> {
        let gx = g.derive_x()?;
        let gy = g.derive_y()?;
        if gy.is_unit() {
            Ok(LeafDirection::Slope(gx.mul_ref(&gy.invert()?).neg_ref()))
        } else if gx.is_unit() {
            Ok(LeafDirection::InverseSlope(gy.mul_ref(&gx.invert()?).neg_ref()))
        } else {
            Err(WebError::SingularAtOrigin { reason: "first integral has vanishing differential at the origin".into() })
        }
    }
}

/// Similarity chart `(X, Y) = (x - t y, t x + y)`.
///
/// A direction `(1, p)` maps to slope `(p + t) / (1 - t p)` and `(q, 1)` to
/// `(t q + 1) / (q - t)`; the result is re-expressed in the new coordinates.
pub fn apply_affine_chart(leaves: &[LeafDirection], t: &Rational) -> Result<Vec<TruncatedSeries>> {
    let one = Rational::one();
    let norm = (&one + t * t).recip();
    let back = [[norm.clone(), t * &norm], [-(t * &norm), norm.clone()]];
    let mut out = Vec::with_capacity(leaves.len());
    for (k, leaf) in leaves.iter().enumerate() {
        let (num, den) = match leaf {
            LeafDirection::Slope(p) => {
                let o = p.order();
                (p.add_ref(&TruncatedSeries::constant(t.clone(), o)), TruncatedSeries::one(o).sub_ref(&p.scale(t)))
            }
            LeafDirection::InverseSlope(q) => {
                let o = q.order();
                (q.scale(t).add_ref(&TruncatedSeries::one(o)), q.sub_ref(&TruncatedSeries::constant(t.clone(), o)))
            }
        };
        let inv = den.invert().map_err(|_| WebError::BadChart { reason: format!("leaf {} becomes vertical", k + 1) })?;
        let slope = num.mul_ref(&inv);
        out.push(if t.is_zero() { slope } else { slope.linear_substitute(back.clone()) });
    }
    check_distinct_constants(&out).map_err(|e| match e {
        WebError::SlopeCollision { first, second } => WebError::BadChart { reason: format!("leaves {first} and {second} collide") },
        other => other,
    })?;
    Ok(out)
}
