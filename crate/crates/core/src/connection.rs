//! Prolongation of the abelian system to a connection on the bundle of free
//! jets, its curvature and the Blaschke–Chern trace.
//!
//! Write `n = d - 2` and index the unknowns `b_3 .. b_d` by `f = j - 3`.
//! Differentiating every equation `a + b = m - 1` times gives as many
//! equations as there are order-`m` jets outside the staircase
//! `{ d_y^m b_j : j - 3 >= m }`, with a constant symbol. Solving level by
//! level expresses every jet up to order `n` as a series-linear combination of
//! the staircase coordinates, which yields `d f = -gamma f`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use log::{debug, warn};
use num_integer::binomial;

use crate::abelian::{derive_system, SlopeSystem};
use crate::dynamics::PwPolynomial;
use crate::error::{Result, WebError};
use crate::matrix::{rational_inverse, SeriesMatrix};
use crate::presentation::{rank_bound, WebPresentation};
use crate::series::{int, Rational, TruncatedSeries};

/// `d_x^dx d_y^dy b_function`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetLabel {
    pub function: usize,
    pub dx: usize,
    pub dy: usize,
}

impl JetLabel {
    pub fn order(&self) -> usize {
        self.dx + self.dy
    }
}

/// The free jet coordinates `d_y^m b_j` (`j - 3 >= m`), highest order first
/// and then by function index descending. The first coordinate is the only
/// one whose compatibility condition is not already implied by the
/// prolonged system, so it carries the whole curvature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetCoordinateSchema {
    degree: usize,
    labels: Vec<JetLabel>,
}

impl JetCoordinateSchema {
    pub fn new(degree: usize) -> Self {
        let n = degree - 2;
        let labels = (0..n).rev().flat_map(|m| (m..n).rev().map(move |f| JetLabel { function: f + 3, dx: 0, dy: m })).collect();
        Self { degree, labels }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn labels(&self) -> &[JetLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: &JetLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn permuted(&self, perm: &[usize]) -> Self {
        Self { degree: self.degree, labels: perm.iter().map(|&i| self.labels[i]).collect() }
    }
}

/// Every jet up to order `d - 2` written in the free coordinates.
#[derive(Clone, Debug)]
pub struct Prolongation {
    schema: JetCoordinateSchema,
    jets: HashMap<JetLabel, Vec<TruncatedSeries>>,
    gamma_x: SeriesMatrix,
    gamma_y: SeriesMatrix,
}

impl Prolongation {
    pub fn schema(&self) -> &JetCoordinateSchema {
        &self.schema
    }

    /// Coefficients of the jet in the free coordinates.
    pub fn jet(&self, label: &JetLabel) -> Option<&[TruncatedSeries]> {
        self.jets.get(label).map(Vec::as_slice)
    }

    pub fn gamma_x(&self) -> &SeriesMatrix {
        &self.gamma_x
    }

    pub fn gamma_y(&self) -> &SeriesMatrix {
        &self.gamma_y
    }
}

type Expr = Vec<TruncatedSeries>;

fn axpy(acc: &mut Expr, c: &TruncatedSeries, v: &Expr) {
    for (a, e) in acc.iter_mut().zip(v) {
        if !e.is_zero() {
            *a = a.add_ref(&c.mul_ref(e));
        }
    }
}

pub fn prolong(sys: &SlopeSystem) -> Result<Prolongation> {
    let d = sys.degree();
    let n = d - 2;
    let schema = JetCoordinateSchema::new(d);
    let pi = schema.len();
    let order = sys.order();
    let unit = |s: usize| -> Expr {
        let mut e = vec![TruncatedSeries::zero(order); pi];
        e[s] = TruncatedSeries::one(order);
        e
    };
    let is_free = |f: usize, a: usize, m: usize| a == 0 && f >= m && m < n;
    let label = |f: usize, a: usize, b: usize| JetLabel { function: f + 3, dx: a, dy: b };

    let mut jets: HashMap<JetLabel, Expr> = HashMap::new();
    for f in 0..n {
        jets.insert(label(f, 0, 0), unit(schema.position(&label(f, 0, 0)).expect("order-0 jets are free")));
    }

    let mut a_derivs: HashMap<(usize, usize, usize, usize), TruncatedSeries> = HashMap::new();
    for m in 1..=n {
        let principal: Vec<(usize, usize, usize)> =
            (0..=m).flat_map(|a| (0..n).map(move |f| (f, a, m - a))).filter(|&(f, a, _)| !is_free(f, a, m)).collect();
        let index: HashMap<(usize, usize, usize), usize> = principal.iter().enumerate().map(|(k, &t)| (t, k)).collect();
        let equations: Vec<(usize, usize, usize)> = (0..=n).flat_map(|r| (0..m).map(move |a| (r, a, m - 1 - a))).collect();
        debug_assert_eq!(principal.len(), equations.len());

        let mut symbol = vec![vec![int(0); principal.len()]; equations.len()];
        let mut rhs: Vec<Expr> = Vec::with_capacity(equations.len());
        for (e, &(r, a, b)) in equations.iter().enumerate() {
            let mut acc = vec![TruncatedSeries::zero(order); pi];
            let mut symbol_terms = Vec::new();
            if r < n {
                symbol_terms.push((n - 1 - r, a + 1, b));
            }
            if r >= 1 {
                symbol_terms.push((n - r, a, b + 1));
            }
            for (f, ja, jb) in symbol_terms {
                match index.get(&(f, ja, jb)) {
                    Some(&k) => symbol[e][k] = int(1),
                    None => {
                        let s = schema.position(&label(f, ja, jb)).expect("non-principal jet is free");
                        acc[s] = acc[s].add_ref(&TruncatedSeries::one(order));
                    }
                }
            }
            for f in 0..n {
                for a1 in 0..=a {
                    for b1 in 0..=b {
                        let key = (r, f, a1, b1);
                        let coeff = match a_derivs.entry(key) {
                            Entry::Occupied(e) => e.into_mut(),
                            Entry::Vacant(e) => e.insert(sys.entry(r, f).derive_xy(a1, b1)?),
                        };
                        if coeff.is_zero() {
                            continue;
                        }
                        let weight = Rational::from_integer((binomial(a, a1) * binomial(b, b1)).into());
                        let lower = &jets[&label(f, a - a1, b - b1)];
                        axpy(&mut acc, &coeff.scale(&weight), lower);
                    }
                }
            }
            rhs.push(acc);
        }
        let inverse = rational_inverse(&symbol).ok_or(WebError::DegenerateProlongation { level: m })?;
        for (k, &(f, a, b)) in principal.iter().enumerate() {
            let mut value = vec![TruncatedSeries::zero(order); pi];
            for (e, row) in rhs.iter().enumerate() {
                let c = &inverse[k][e];
                if num_traits::Zero::is_zero(c) {
                    continue;
                }
                for (v, t) in value.iter_mut().zip(row) {
                    *v = v.sub_ref(&t.scale(c));
                }
            }
            jets.insert(label(f, a, b), value);
        }
        for f in 0..n {
            if is_free(f, 0, m) {
                let l = label(f, 0, m);
                jets.insert(l, unit(schema.position(&l).expect("free jet in schema")));
            }
        }
    }

    let mut gx = Vec::with_capacity(pi);
    let mut gy = Vec::with_capacity(pi);
    for l in schema.labels() {
        let along_x = JetLabel { dx: l.dx + 1, ..*l };
        let along_y = JetLabel { dy: l.dy + 1, ..*l };
        gx.push(jets[&along_x].iter().map(TruncatedSeries::neg_ref).collect());
        gy.push(jets[&along_y].iter().map(TruncatedSeries::neg_ref).collect());
    }
    Ok(Prolongation { schema, jets, gamma_x: SeriesMatrix::from_rows(gx), gamma_y: SeriesMatrix::from_rows(gy) })
}

/// `d_x gamma_y - d_y gamma_x + gamma_x gamma_y - gamma_y gamma_x`.
pub fn curvature_matrix(gamma_x: &SeriesMatrix, gamma_y: &SeriesMatrix) -> Result<SeriesMatrix> {
    let d = gamma_y.derive_x()?.sub(&gamma_x.derive_y()?);
    Ok(d.add(&gamma_x.mul(gamma_y)).sub(&gamma_y.mul(gamma_x)))
}

/// Connection matrices in an adapted basis together with the curvature.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    pub schema: JetCoordinateSchema,
    pub gamma_x: SeriesMatrix,
    pub gamma_y: SeriesMatrix,
    pub curvature: SeriesMatrix,
    /// First curvature row `(k_1, ..., k_pi)`.
    pub k: Vec<TruncatedSeries>,
    /// Trace of the full curvature matrix, computed independently of `k_1`.
    pub trace: TruncatedSeries,
    /// Set when the natural schema had to be reordered to be adapted.
    pub permutation: Option<Vec<usize>>,
}

impl ConnectionData {
    /// Builds the adapted connection from a prolongation. If the natural
    /// schema has its single nonzero curvature row elsewhere, the basis is
    /// reordered to bring it first; any other shape is a hard error.
    pub fn from_prolongation(p: &Prolongation) -> Result<Self> {
        let curvature = curvature_matrix(&p.gamma_x, &p.gamma_y)?;
        let precision = curvature.order();
        let nonzero: Vec<usize> = (0..curvature.rows()).filter(|&r| curvature.row(r).iter().any(|e| !e.is_zero())).collect();
        let (schema, gamma_x, gamma_y, curvature, permutation) = match nonzero.as_slice() {
            [] | [0] => (p.schema.clone(), p.gamma_x.clone(), p.gamma_y.clone(), curvature, None),
            [row] => {
                warn!("curvature concentrated on row {row}; reordering basis");
                let mut perm: Vec<usize> = (0..curvature.rows()).collect();
                perm.swap(0, *row);
                let conj = |m: &SeriesMatrix| permute(m, &perm);
                (p.schema.permuted(&perm), conj(&p.gamma_x), conj(&p.gamma_y), conj(&curvature), Some(perm))
            }
            [_, second, ..] => {
                return Err(WebError::AdaptedBasisViolation { row: *second, precision });
            }
        };
        let k = curvature.row(0).to_vec();
        let trace = curvature.trace();
        debug!("connection of rank {} at precision {precision}", schema.len());
        Ok(Self { schema, gamma_x, gamma_y, curvature, k, trace, permutation })
    }

    pub fn rank(&self) -> usize {
        self.schema.len()
    }

    /// Precision of the curvature data.
    pub fn order(&self) -> usize {
        self.curvature.order()
    }

    pub fn is_flat(&self) -> bool {
        self.k.iter().all(TruncatedSeries::is_zero)
    }

    /// True when every row below the first vanishes at precision.
    pub fn full_check(&self) -> bool {
        (1..self.curvature.rows()).all(|r| self.curvature.row(r).iter().all(TruncatedSeries::is_zero))
    }

    /// `d f + gamma f` for a section given in the schema coordinates.
    pub fn horizontality_defect(&self, f: &[TruncatedSeries]) -> Result<[Vec<TruncatedSeries>; 2]> {
        let gx = self.gamma_x.mul_vec(f);
        let gy = self.gamma_y.mul_vec(f);
        let dx = f.iter().zip(&gx).map(|(v, g)| Ok(v.derive_x()?.add_ref(g))).collect::<Result<_>>()?;
        let dy = f.iter().zip(&gy).map(|(v, g)| Ok(v.derive_y()?.add_ref(g))).collect::<Result<_>>()?;
        Ok([dx, dy])
    }
}

fn permute(m: &SeriesMatrix, perm: &[usize]) -> SeriesMatrix {
    SeriesMatrix::from_rows(perm.iter().map(|&r| perm.iter().map(|&c| m.get(r, c).clone()).collect()).collect())
}

/// Full pipeline from a presentation to its adapted connection.
pub fn connection_of(w: &WebPresentation) -> Result<ConnectionData> {
    let sys = derive_system(w)?;
    ConnectionData::from_prolongation(&prolong(&sys)?)
}

/// `k_1`, checked against the trace of the full curvature matrix.
pub fn blaschke_chern_trace(c: &ConnectionData) -> Result<TruncatedSeries> {
    let k1 = c.k.first().cloned().unwrap_or_else(|| TruncatedSeries::zero(c.order()));
    let diff = k1.sub_ref(&c.trace);
    if !diff.is_zero() {
        return Err(WebError::AdaptedBasisViolation { row: 1, precision: diff.order() });
    }
    Ok(k1)
}

/// Linearizability test for 4-webs.
///
/// The staircase basis is moved to one in which linear webs have curvature
/// row `(3 kappa, 3 d_x kappa, 3 d_y kappa)`: with `P = -v_1 p^3 - ... - v_4`
/// and `A` the system table, the new row is
/// `(k_1, -3 k_3 - v_3 k_1, 3 k_2 + (v_2 - 3 A_22) k_1)`. The change of basis
/// fixes the first basis vector, so the curvature stays single-row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizabilityReport {
    pub kappa: TruncatedSeries,
    /// Curvature row in the aligned basis.
    pub aligned_row: [TruncatedSeries; 3],
    pub l1_residual: TruncatedSeries,
    pub l2_residual: TruncatedSeries,
    pub degree_gate: bool,
    pub linearizable: bool,
}

pub fn aligned_curvature_row(c: &ConnectionData, pw: &PwPolynomial, sys: &SlopeSystem) -> Result<[TruncatedSeries; 3]> {
    if c.schema.degree() != 4 || c.k.len() != rank_bound(4) || c.permutation.is_some() {
        return Err(WebError::InvalidDegree {
            degree: c.schema.degree(),
            reason: "the aligned basis is defined for 4-webs in the staircase schema".into(),
        });
    }
    let [_, v2, v3, _] = pw.v_aliases().expect("4-web dynamics");
    let k = &c.k;
    let second = k[2].scale(&int(-3)).sub_ref(&v3.mul_ref(&k[0]));
    let shift = v2.sub_ref(&sys.entry(1, 1).scale(&int(3)));
    let third = k[1].scale(&int(3)).add_ref(&shift.mul_ref(&k[0]));
    Ok([k[0].clone(), second, third])
}

pub fn linearizability_d4(c: &ConnectionData, pw: &PwPolynomial, sys: &SlopeSystem) -> Result<LinearizabilityReport> {
    let aligned_row = aligned_curvature_row(c, pw, sys)?;
    let kappa = aligned_row[0].scale(&Rational::new(1.into(), 3.into()));
    let three_kappa = &aligned_row[0];
    let l1_residual = aligned_row[1].sub_ref(&three_kappa.derive_x()?);
    let l2_residual = aligned_row[2].sub_ref(&three_kappa.derive_y()?);
    let degree_gate = crate::dynamics::linearizability_degree_gate(pw);
    let linearizable = degree_gate && l1_residual.is_zero() && l2_residual.is_zero();
    Ok(LinearizabilityReport { kappa, aligned_row, l1_residual, l2_residual, degree_gate, linearizable })
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 10;

    fn c(v: i64) -> TruncatedSeries {
        TruncatedSeries::constant(int(v), N)
    }

    #[test]
    fn schema_staircase() {
        let s = JetCoordinateSchema::new(5);
        assert_eq!(s.len(), 6);
        let orders: Vec<usize> = s.labels().iter().map(JetLabel::order).collect();
        assert_eq!(orders, vec![2, 1, 1, 0, 0, 0]);
        assert_eq!(s.labels()[0], JetLabel { function: 5, dx: 0, dy: 2 });
        assert_eq!(JetCoordinateSchema::new(3).len(), 1);
    }

    #[test]
    fn parallel_webs_are_flat() {
        for d in 3..=5 {
            let w = WebPresentation::from_slopes((1..=d as i64).map(c).collect()).unwrap();
            let conn = connection_of(&w).unwrap();
            assert_eq!(conn.rank(), rank_bound(d));
            // Nilpotent constant connection: b_d = y, b_{d-1} = -x solves the
            // pure derivative system, so gamma cannot vanish for d >= 4.
            assert!(conn.gamma_x.derive_x().unwrap().is_zero() && conn.gamma_y.derive_y().unwrap().is_zero());
            assert!(conn.gamma_x.mul(&conn.gamma_x).mul(&conn.gamma_x).is_zero());
            assert_eq!(conn.gamma_x.is_zero(), d == 3);
            assert!(conn.is_flat());
            assert!(conn.full_check());
        }
    }

    #[test]
    fn curvature_is_single_row() {
        let x = TruncatedSeries::x(N);
        let y = TruncatedSeries::y(N);
        let w = WebPresentation::from_slopes(vec![x.clone(), &c(3) + &y, c(1), &c(2) + &(&x * &y)]).unwrap();
        let conn = connection_of(&w).unwrap();
        assert!(conn.full_check());
        assert!(conn.permutation.is_none());
        assert!(!conn.is_flat());
        blaschke_chern_trace(&conn).unwrap();
    }
}
