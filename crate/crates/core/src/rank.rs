//! The rank of a web as the corank of the matrix of covariant derivatives of
//! the curvature row.
//!
//! Every horizontal section `f` satisfies `k f = 0`; differentiating along
//! `d f = -gamma f` gives `(d k - k gamma) f = 0`, and so on. Stacking all
//! covariant derivatives up to order `d - 3` gives a square matrix whose
//! kernel is spanned by the horizontal sections.

use log::{debug, info};

use crate::blaschke::CrossRatioReport;
use crate::connection::ConnectionData;
use crate::error::{Result, WebError};
use crate::matrix::{PivotRecord, SeriesMatrix};
use crate::series::TruncatedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

/// `d(row) - row * gamma_direction`.
pub fn covariant_row_derive(row: &[TruncatedSeries], c: &ConnectionData, direction: Direction) -> Result<Vec<TruncatedSeries>> {
    let (gamma, derive): (&SeriesMatrix, fn(&TruncatedSeries) -> Result<TruncatedSeries>) = match direction {
        Direction::X => (&c.gamma_x, TruncatedSeries::derive_x),
        Direction::Y => (&c.gamma_y, TruncatedSeries::derive_y),
    };
    let twisted = gamma.left_mul_row(row);
    row.iter().zip(&twisted).map(|(r, t)| Ok(derive(r)?.sub_ref(t))).collect()
}

/// Which covariant derivative of `k` a row is: `D_x^dx D_y^dy k`, with
/// `y_first` telling whether the `y` derivatives were applied first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowLabel {
    pub dx: usize,
    pub dy: usize,
    pub y_first: bool,
}

#[derive(Clone, Debug)]
pub struct RankMatrix {
    pub matrix: SeriesMatrix,
    pub labels: Vec<RowLabel>,
}

impl RankMatrix {
    pub fn order(&self) -> usize {
        self.matrix.order()
    }
}

fn derive_chain(start: &[TruncatedSeries], c: &ConnectionData, dir: Direction, times: usize) -> Result<Vec<Vec<TruncatedSeries>>> {
    let mut out = vec![start.to_vec()];
    for _ in 0..times {
        let next = covariant_row_derive(out.last().expect("nonempty"), c, dir)?;
        out.push(next);
    }
    Ok(out)
}

/// Rows `D_x^a D_y^b k` for `a + b <= d - 3`, by total order and then `a`
/// descending. With `y_first = false` the `x` derivatives are applied first.
fn covariant_rows(c: &ConnectionData, y_first: bool) -> Result<Vec<(RowLabel, Vec<TruncatedSeries>)>> {
    let top = c.schema.degree() - 3;
    let (inner, outer) = if y_first { (Direction::Y, Direction::X) } else { (Direction::X, Direction::Y) };
    let inner_chain = derive_chain(&c.k, c, inner, top)?;
    let mut rows = Vec::new();
    for total in 0..=top {
        for a in (0..=total).rev() {
            let b = total - a;
            let (first, then) = if y_first { (b, a) } else { (a, b) };
            let row = derive_chain(&inner_chain[first], c, outer, then)?.pop().expect("nonempty");
            rows.push((RowLabel { dx: a, dy: b, y_first }, row));
        }
    }
    Ok(rows)
}

pub fn build_rank_matrix(c: &ConnectionData) -> Result<RankMatrix> {
    let rows = covariant_rows(c, true)?;
    let (labels, rows): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    debug_assert_eq!(rows.len(), c.rank());
    Ok(RankMatrix { matrix: SeriesMatrix::from_rows(rows), labels })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank_of_web: usize,
    pub corank: usize,
    pub pi_d: usize,
    pub flat: bool,
    pub generic_rank: usize,
    pub pivots: Vec<PivotRecord>,
    /// Working precision of the matrix entries when the rank was decided.
    pub decision_precision: usize,
    /// Precision at which the leftover block was declared zero.
    pub zero_precision: Option<usize>,
    pub advisory: Option<String>,
}

/// Leftover blocks declared zero with fewer known jet levels than this are
/// flagged in the certificate.
const MARGINAL_PRECISION: usize = 3;

pub fn rank_of_web(m: &RankMatrix) -> Result<RankCertificate> {
    let pi_d = m.matrix.rows();
    let decision_precision = m.order();
    if m.matrix.is_zero() {
        if decision_precision == 0 {
            return Err(WebError::PrecisionExhausted { context: "curvature matrix has no known coefficients".into() });
        }
        return Ok(RankCertificate {
            rank_of_web: pi_d,
            corank: pi_d,
            pi_d,
            flat: true,
            generic_rank: 0,
            pivots: Vec::new(),
            decision_precision,
            zero_precision: Some(decision_precision),
            advisory: (decision_precision < MARGINAL_PRECISION)
                .then(|| format!("flatness decided with only {decision_precision} jet levels; raise the order")),
        });
    }
    let decision = m.matrix.rank()?;
    let corank = pi_d - decision.rank;
    let advisory = decision
        .zero_precision
        .filter(|&p| p < MARGINAL_PRECISION)
        .map(|p| format!("{corank} kernel direction(s) rest on zero-tests with {p} jet levels; rerun at a higher order"));
    debug!("rank matrix {pi_d}x{pi_d}: generic rank {}", decision.rank);
    Ok(RankCertificate {
        rank_of_web: corank,
        corank,
        pi_d,
        flat: false,
        generic_rank: decision.rank,
        pivots: decision.pivots,
        decision_precision,
        zero_precision: decision.zero_precision,
        advisory,
    })
}

pub fn determinant(m: &RankMatrix) -> Result<TruncatedSeries> {
    m.matrix.determinant()
}

/// Rank of the matrix extended by the mixed rows taken in the other
/// derivation order. Never smaller than the canonical generic rank; a larger
/// value means the other order sees extra constraints, which is logged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingDiagnostic {
    pub canonical_rank: usize,
    pub extended_rank: usize,
    pub extra_rows: usize,
}

impl OrderingDiagnostic {
    pub fn consistent(&self) -> bool {
        self.canonical_rank == self.extended_rank
    }
}

pub fn ordering_diagnostic(c: &ConnectionData, m: &RankMatrix) -> Result<OrderingDiagnostic> {
    let canonical_rank = m.matrix.rank()?.rank;
    let mut rows = m.matrix.to_rows();
    let extra: Vec<_> = covariant_rows(c, false)?.into_iter().filter(|(l, _)| l.dx > 0 && l.dy > 0).map(|(_, r)| r).collect();
    let extra_rows = extra.len();
    rows.extend(extra);
    let extended_rank = SeriesMatrix::from_rows(rows).rank()?.rank;
    if extended_rank != canonical_rank {
        info!("mixed derivation order raises the generic rank from {canonical_rank} to {extended_rank}");
    }
    Ok(OrderingDiagnostic { canonical_rank, extended_rank, extra_rows })
}

/// Consequences for 4-webs that tie the rank to the subweb curvatures,
/// the trace and the determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryReport {
    /// Equal nonzero extracted curvatures force rank at most one.
    pub equal_curvatures_bound: Option<bool>,
    /// Vanishing trace excludes rank two.
    pub zero_trace_excludes_two: Option<bool>,
    /// The determinant vanishes exactly when the rank is positive.
    pub determinant_matches: bool,
    pub determinant_is_zero: bool,
}

impl CorollaryReport {
    pub fn all_hold(&self) -> bool {
        self.equal_curvatures_bound != Some(false) && self.zero_trace_excludes_two != Some(false) && self.determinant_matches
    }
}

pub fn d4_corollary_checks(
    cert: &RankCertificate,
    report: &CrossRatioReport,
    trace: &TruncatedSeries,
    det: &TruncatedSeries,
) -> Result<CorollaryReport> {
    if cert.pi_d != 3 {
        return Err(WebError::InvalidDegree { degree: 0, reason: "corollary checks apply to 4-webs".into() });
    }
    let nonzero_equal = report.all_equal && report.extracted_curvatures.iter().any(|k| !k.is_zero());
    let equal_curvatures_bound = nonzero_equal.then_some(cert.rank_of_web <= 1);
    let zero_trace_excludes_two = trace.is_zero().then_some(cert.rank_of_web != 2);
    let determinant_is_zero = det.is_zero();
    Ok(CorollaryReport {
        equal_curvatures_bound,
        zero_trace_excludes_two,
        determinant_matches: determinant_is_zero == (cert.rank_of_web >= 1),
        determinant_is_zero,
    })
}
