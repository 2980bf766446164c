//! Brute-force polynomial solving of the abelian system, independent of the
//! connection. Used to cross-check ranks.

use crate::abelian::SlopeSystem;
use crate::connection::JetCoordinateSchema;
use crate::error::{Result, WebError};
use crate::matrix::{rational_nullspace, rational_rank};
use crate::series::{int, monomial_index, Rational};

/// Number of independent initial values `d_y^m b_j(0)` (the staircase) that
/// extend to a solution of the system through total degree `degree`.
///
/// Unknowns are the Taylor coefficients of `b_3 .. b_d` up to `degree`;
/// equations are the coefficients of every row below `degree`, which involve
/// no truncated terms. As `degree` grows the count decreases to the rank.
pub fn jet_solution_dimension(sys: &SlopeSystem, degree: usize) -> Result<usize> {
    if sys.order() < degree {
        return Err(WebError::PrecisionExhausted { context: format!("system known to order {}, jet solver needs {degree}", sys.order()) });
    }
    let d = sys.degree();
    let n = d - 2;
    let per = (degree + 1) * (degree + 2) / 2;
    let var = |f: usize, i: usize, j: usize| f * per + monomial_index(i, j);
    let cols = n * per;
    let mut rows = Vec::new();
    for r in 0..d - 1 {
        for total in 0..degree {
            for i in 0..=total {
                let j = total - i;
                let mut row = vec![int(0); cols];
                if let Some(jf) = sys.x_function(r) {
                    row[var(jf - 3, i + 1, j)] += Rational::from_integer((i as i64 + 1).into());
                }
                if let Some(jf) = sys.y_function(r) {
                    row[var(jf - 3, i, j + 1)] += Rational::from_integer((j as i64 + 1).into());
                }
                for f in 0..n {
                    let a = sys.entry(r, f);
                    for i1 in 0..=i {
                        for j1 in 0..=j {
                            if let Some(c) = a.coeff_ref(i - i1, j - j1) {
                                row[var(f, i1, j1)] += c;
                            }
                        }
                    }
                }
                rows.push(row);
            }
        }
    }
    let kernel = rational_nullspace(&rows, cols);
    let staircase: Vec<usize> =
        JetCoordinateSchema::new(d).labels().iter().filter(|l| l.dy <= degree).map(|l| var(l.function - 3, 0, l.dy)).collect();
    let projected: Vec<Vec<Rational>> = kernel.iter().map(|v| staircase.iter().map(|&k| v[k].clone()).collect()).collect();
    Ok(rational_rank(&projected, staircase.len()))
}
