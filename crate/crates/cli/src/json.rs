//! Canonical JSON for exact values: rationals as `["num", "den"]` in lowest
//! terms, series as `{order, terms}` with terms in (total degree, i) order.

use serde_json::{json, Value};
use thiserror::Error;
use weblab_core::{Rational, SeriesMatrix, TruncatedSeries, WebError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("cannot read or write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Web(#[from] WebError),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Malformed(_) => "malformed_input",
            CliError::Io { .. } => "io_error",
            CliError::Web(e) => e.code(),
        }
    }

    /// 0 success, 1 malformed input, 2 singular presentation, 3 precision
    /// exhausted, 4 any other failure of the computation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) | CliError::Io { .. } => 1,
            CliError::Web(WebError::SingularAtOrigin { .. } | WebError::SlopeCollision { .. }) => 2,
            CliError::Web(WebError::PrecisionExhausted { .. }) => 3,
            CliError::Web(
                WebError::NoExplicitSlopes | WebError::BadChart { .. } | WebError::InvalidDegree { .. } | WebError::InvalidSelector { .. },
            ) => 1,
            CliError::Web(_) => 4,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "code": self.code(), "message": self.to_string() })
    }
}

pub fn rational_json(r: &Rational) -> Value {
    json!([r.numer().to_string(), r.denom().to_string()])
}

pub fn series_json(s: &TruncatedSeries) -> Value {
    let terms: Vec<Value> = s.terms().map(|(i, j, c)| json!([i, j, c.numer().to_string(), c.denom().to_string()])).collect();
    json!({ "order": s.order(), "terms": terms })
}

pub fn series_list(v: &[TruncatedSeries]) -> Value {
    v.iter().map(series_json).collect()
}

pub fn matrix_json(m: &SeriesMatrix) -> Value {
    (0..m.rows()).map(|r| series_list(m.row(r))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use weblab_core::series::rat;

    #[test]
    fn rationals_are_canonical() {
        assert_eq!(rational_json(&rat(2, -4)), json!(["-1", "2"]));
        let s = TruncatedSeries::from_terms([(0, 1, rat(3, 6)), (1, 0, rat(-1, 1)), (0, 0, rat(0, 1))], 3);
        assert_eq!(series_json(&s), json!({ "order": 3, "terms": [[0, 1, "1", "2"], [1, 0, "-1", "1"]] }));
    }

    #[test]
    fn exit_codes() {
        let exhausted = CliError::Web(WebError::PrecisionExhausted { context: String::new() });
        assert_eq!(exhausted.exit_code(), 3);
        assert_eq!(CliError::Web(WebError::SingularAtOrigin { reason: String::new() }).exit_code(), 2);
        assert_eq!(CliError::Malformed(String::new()).exit_code(), 1);
        assert_eq!(CliError::Web(WebError::DegenerateProlongation { level: 1 }).exit_code(), 4);
        assert_eq!(exhausted.to_json()["code"], "precision_exhausted");
    }
}
