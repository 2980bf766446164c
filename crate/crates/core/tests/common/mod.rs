#![allow(dead_code)]

pub mod kernel;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weblab_core::series::{int, monomial_at, rat, Rational};
use weblab_core::{SlopePolynomial, TruncatedSeries};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(v: i64, order: usize) -> TruncatedSeries {
    TruncatedSeries::constant(int(v), order)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

/// Arbitrary series of the given order with small rational coefficients.
pub fn series(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    let len = order * (order + 1) / 2;
    prop::collection::vec(small_rational(), len).prop_map(move |coeffs| {
        let terms = coeffs.into_iter().enumerate().map(|(k, c)| {
            let (i, j) = monomial_at(k);
            (i, j, c)
        });
        TruncatedSeries::from_terms(terms, order)
    })
}

/// Series vanishing at the origin.
pub fn nonunit(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    series(order).prop_map(|mut s| {
        s.set_coeff(0, 0, int(0));
        s
    })
}

/// Series with nonzero constant term.
pub fn unit(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    (nonunit(order), prop_oneof![Just(-2i64), Just(-1), Just(1), Just(2), Just(3)])
        .prop_map(move |(s, c)| &s + &TruncatedSeries::constant(int(c), order))
}

/// Roots with the given pairwise distinct constant terms.
pub fn roots(bases: &'static [i64], order: usize) -> impl Strategy<Value = Vec<TruncatedSeries>> {
    prop::collection::vec(nonunit(order), bases.len())
        .prop_map(move |tails| tails.into_iter().zip(bases).map(|(t, &b)| &t + &c(b, order)).collect())
}

/// A dividend of degree 4 and a divisor of degree 2 with unit leading
/// coefficient.
pub fn division_pair(order: usize) -> impl Strategy<Value = (SlopePolynomial, SlopePolynomial)> {
    (prop::collection::vec(series(order), 5), prop::collection::vec(series(order), 2), unit(order)).prop_map(|(a, mut b, lead)| {
        b.push(lead);
        (SlopePolynomial::from_ascending(a), SlopePolynomial::from_ascending(b))
    })
}

use weblab_core::abelian::{derive_system, SlopeSystem};
use weblab_core::connection::{connection_of, ConnectionData};
use weblab_core::dynamics::{compute_pw, PwPolynomial};
use weblab_core::presentation::WebPresentation;
use weblab_core::rank::{build_rank_matrix, rank_of_web, RankCertificate, RankMatrix};

/// Every stage of the pipeline for one web.
pub struct Run {
    pub pw: PwPolynomial,
    pub sys: SlopeSystem,
    pub conn: ConnectionData,
    pub matrix: RankMatrix,
    pub cert: RankCertificate,
}

pub fn run(w: &WebPresentation) -> weblab_core::Result<Run> {
    let pw = compute_pw(w)?;
    let sys = derive_system(w)?;
    let conn = connection_of(w)?;
    let matrix = build_rank_matrix(&conn)?;
    let cert = rank_of_web(&matrix)?;
    Ok(Run { pw, sys, conn, matrix, cert })
}

/// `x`, `y` and integer constants at a fixed order.
pub struct Vars {
    pub x: TruncatedSeries,
    pub y: TruncatedSeries,
    pub order: usize,
}

impl Vars {
    pub fn new(order: usize) -> Self {
        Vars { x: TruncatedSeries::x(order), y: TruncatedSeries::y(order), order }
    }

    pub fn c(&self, v: i64) -> TruncatedSeries {
        c(v, self.order)
    }

    pub fn poly(&self, terms: &[(usize, usize, i64)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(terms.iter().map(|&(i, j, v)| (i, j, int(v))), self.order)
    }
}
