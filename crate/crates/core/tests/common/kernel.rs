//! Kernel property bodies shared by the proptest suite and the acceptance run.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use weblab_core::poly::{product_of_linear_factors, sylvester_resultant, SlopePolynomial};
use weblab_core::series::int;
use weblab_core::{SeriesMatrix, TruncatedSeries};

type Check = Result<(), TestCaseError>;

pub fn ring_axioms(a: &TruncatedSeries, b: &TruncatedSeries, c: &TruncatedSeries) -> Check {
    let zero = TruncatedSeries::zero(a.order());
    let one = TruncatedSeries::one(a.order());
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(a + &zero, a.clone());
    prop_assert_eq!(a * &one, a.clone());
    prop_assert!((a + &(-a)).is_zero());
    Ok(())
}

pub fn inversion_round_trip(u: &TruncatedSeries) -> Check {
    let inv = u.invert().map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(u * &inv, TruncatedSeries::one(u.order()));
    prop_assert_eq!(inv.invert().unwrap(), u.clone());
    Ok(())
}

pub fn divmod_round_trip(a: &SlopePolynomial, b: &SlopePolynomial) -> Check {
    let (q, r) = a.divmod(b).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(r.is_zero() || r.degree() < b.degree());
    prop_assert!(b.mul(&q).add(&r).sub(a).is_zero());
    Ok(())
}

pub fn monic(roots: &[TruncatedSeries]) -> SlopePolynomial {
    product_of_linear_factors(roots, roots[0].order())
}

/// `Res(F, F') = (-1)^{d(d-1)/2} prod_{i<j} (r_i - r_j)^2` for monic `F`
/// with roots `r_i`.
pub fn resultant_discriminant(roots: &[TruncatedSeries]) -> Check {
    let d = roots.len();
    let f = monic(roots);
    let res = sylvester_resultant(&f, &f.derive_p()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let mut disc = TruncatedSeries::one(roots[0].order());
    for i in 0..d {
        for j in i + 1..d {
            let diff = &roots[i] - &roots[j];
            disc = &disc * &(&diff * &diff);
        }
    }
    let sign = if (d * (d - 1) / 2).is_multiple_of(2) { int(1) } else { int(-1) };
    prop_assert_eq!(res, disc.scale(&sign));
    Ok(())
}

/// Resultants vanish exactly on a shared factor: split `roots` as
/// `A = (p - r_0)(p - r_1)`, `B = (p - r_2)` and `C = (p - r_3)`.
pub fn resultant_common_factor(roots: &[TruncatedSeries]) -> Check {
    let a = monic(&roots[..2]);
    let b = monic(&roots[2..3]);
    let common = monic(&roots[3..4]);
    let shared = sylvester_resultant(&a.mul(&common), &b.mul(&common)).unwrap();
    prop_assert!(shared.is_zero());
    prop_assert!(sylvester_resultant(&a, &b).unwrap().is_unit());
    Ok(())
}

/// Generic rank of a matrix whose third row depends on the first two does
/// not change under row swaps or scaling a row by a unit.
pub fn rank_invariance(r0: &[TruncatedSeries], r1: &[TruncatedSeries], combo: &TruncatedSeries, u: &TruncatedSeries) -> Check {
    let r2: Vec<_> = r0.iter().zip(r1).map(|(a, b)| &(a * combo) + b).collect();
    let m = SeriesMatrix::from_rows(vec![r0.to_vec(), r1.to_vec(), r2.clone()]);
    let swapped = SeriesMatrix::from_rows(vec![r2.clone(), r0.to_vec(), r1.to_vec()]);
    let scaled = SeriesMatrix::from_rows(vec![r0.iter().map(|e| e * u).collect(), r1.to_vec(), r2]);
    let rank = m.rank().unwrap().rank;
    prop_assert!(rank <= 2);
    prop_assert_eq!(swapped.rank().unwrap().rank, rank);
    prop_assert_eq!(scaled.rank().unwrap().rank, rank);
    Ok(())
}
