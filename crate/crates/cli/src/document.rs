//! The input document: a web given by slopes or by implicit coefficients.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use weblab_core::presentation::{apply_affine_chart, LeafDirection, WebPresentation};
use weblab_core::{Rational, TruncatedSeries};

use crate::json::{series_json, CliError};

pub const FORMAT_VERSION: &str = "1";

/// An integer written either as a JSON number or as a decimal string.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Integer {
    Number(i64),
    Text(String),
}

impl Integer {
    fn parse(&self) -> Result<BigInt, CliError> {
        match self {
            Integer::Number(n) => Ok(BigInt::from(*n)),
            Integer::Text(s) => s.trim().parse().map_err(|_| CliError::Malformed(format!("not an integer: {s:?}"))),
        }
    }
}

/// `[i, j, numerator, denominator]`.
pub type Term = (usize, usize, Integer, Integer);

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Leaf {
    /// The string `"vertical"`: leaves `x = const`.
    Marker(String),
    Terms(Vec<Term>),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WebDocument {
    pub format_version: String,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slopes: Option<Vec<Leaf>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Vec<Term>>>,
    /// Similarity chart parameter `t` as `[numerator, denominator]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<(Integer, Integer)>,
}

fn rational(num: &Integer, den: &Integer) -> Result<Rational, CliError> {
    let den = den.parse()?;
    if den.is_zero() {
        return Err(CliError::Malformed("zero denominator".into()));
    }
    Ok(Rational::new(num.parse()?, den))
}

fn series(terms: &[Term], order: usize) -> Result<TruncatedSeries, CliError> {
    let parsed = terms.iter().map(|(i, j, n, d)| Ok((*i, *j, rational(n, d)?))).collect::<Result<Vec<_>, CliError>>()?;
    Ok(TruncatedSeries::from_terms(parsed, order))
}

impl WebDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: WebDocument = serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(CliError::Malformed(format!("unsupported format_version {:?}", doc.format_version)));
        }
        match (&doc.slopes, &doc.coefficients) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return Err(CliError::Malformed("exactly one of slopes and coefficients must be given".into())),
        }
        if doc.chart.is_some() && doc.coefficients.is_some() {
            return Err(CliError::Malformed("a chart applies to slope input only".into()));
        }
        Ok(doc)
    }

    pub fn degree(&self) -> usize {
        match (&self.slopes, &self.coefficients) {
            (Some(s), _) => s.len(),
            (_, Some(c)) => c.len().saturating_sub(1),
            _ => 0,
        }
    }

    /// Builds the presentation at working precision `order`.
    pub fn presentation(&self, order: usize) -> Result<WebPresentation, CliError> {
        let d = self.degree();
        if order < d + 4 {
            return Err(CliError::Malformed(format!("order {order} is below d + 4 = {}", d + 4)));
        }
        if let Some(coeffs) = &self.coefficients {
            let coeffs = coeffs.iter().map(|t| series(t, order)).collect::<Result<Vec<_>, _>>()?;
            return Ok(WebPresentation::from_coefficients(coeffs)?);
        }
        let leaves = self
            .slopes
            .as_ref()
            .expect("checked in parse")
            .iter()
            .map(|leaf| match leaf {
                Leaf::Marker(m) if m == "vertical" => Ok(LeafDirection::vertical(order)),
                Leaf::Marker(m) => Err(CliError::Malformed(format!("unknown leaf marker {m:?}"))),
                Leaf::Terms(t) => Ok(LeafDirection::Slope(series(t, order)?)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let slopes = match &self.chart {
            Some((n, d)) => apply_affine_chart(&leaves, &rational(n, d)?)?,
            None => leaves
                .into_iter()
                .map(|l| match l {
                    LeafDirection::Slope(p) => Ok(p),
                    LeafDirection::InverseSlope(_) => Err(CliError::Malformed("vertical leaves need a chart".into())),
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        Ok(WebPresentation::from_slopes(slopes)?)
    }

    /// Normalized echo: effective order and the slopes or coefficients as
    /// serialized series.
    pub fn echo(&self, w: &WebPresentation) -> Value {
        let mut echo = json!({
            "format_version": self.format_version,
            "order": w.order(),
            "degree": w.degree(),
        });
        match w.slopes() {
            Some(slopes) if self.slopes.is_some() => echo["slopes"] = slopes.iter().map(series_json).collect(),
            _ => echo["coefficients"] = w.coefficients().iter().map(series_json).collect(),
        }
        if let Some((n, d)) = &self.chart {
            if let Ok(t) = rational(n, d) {
                echo["chart"] = crate::json::rational_json(&t);
            }
        }
        echo
    }
}
