//! Families of webs with known geometry, used by tests, benches and the CLI
//! fixtures. Randomized families take a seeded generator so runs replay.

use num_traits::Zero;
use rand::Rng;

use crate::error::{Result, WebError};
use crate::matrix::rational_nullspace;
use crate::presentation::{apply_affine_chart, LeafDirection, WebPresentation};
use crate::series::{int, rat, Rational, TruncatedSeries};

fn constant(v: i64, order: usize) -> TruncatedSeries {
    TruncatedSeries::constant(int(v), order)
}

/// Slopes of the level curves of `g`, which must have `g_y(0) != 0`.
pub fn slope_of(g: &TruncatedSeries) -> Result<TruncatedSeries> {
    match LeafDirection::from_first_integral(g)? {
        LeafDirection::Slope(p) => Ok(p),
        LeafDirection::InverseSlope(_) => {
            Err(WebError::SingularAtOrigin { reason: "first integral has vertical leaves at the origin".into() })
        }
    }
}

/// Constant slopes `1, 2, ..., d`.
pub fn parallel(d: usize, order: usize) -> Result<WebPresentation> {
    WebPresentation::from_slopes((1..=d as i64).map(|c| constant(c, order)).collect())
}

/// Pencils of lines through the given vertices (none at the origin).
pub fn pencils(vertices: &[(i64, i64)], order: usize) -> Result<WebPresentation> {
    let x = TruncatedSeries::x(order);
    let y = TruncatedSeries::y(order);
    let slopes = vertices
        .iter()
        .map(|&(a, b)| Ok(y.sub_ref(&constant(b, order)).mul_ref(&x.sub_ref(&constant(a, order)).invert()?)))
        .collect::<Result<Vec<_>>>()?;
    WebPresentation::from_slopes(slopes)
}

/// Projective image of a parallel web: leaves of
/// `F_i = (y - c_i x) / (1 + alpha x + beta y)`, i.e. pencils of lines whose
/// vertices lie on the line `1 + alpha x + beta y = 0`.
#[derive(Clone, Debug)]
pub struct ProjectiveParallel {
    pub web: WebPresentation,
    pub integrals: Vec<TruncatedSeries>,
    pub directions: Vec<Rational>,
}

impl ProjectiveParallel {
    pub fn new(directions: &[i64], alpha: Rational, beta: Rational, order: usize) -> Result<Self> {
        let x = TruncatedSeries::x(order);
        let y = TruncatedSeries::y(order);
        let denom = TruncatedSeries::from_terms([(0, 0, int(1)), (1, 0, alpha), (0, 1, beta)], order).invert()?;
        let integrals: Vec<_> = directions.iter().map(|&c| y.sub_ref(&x.scale(&int(c))).mul_ref(&denom)).collect();
        let slopes = integrals.iter().map(slope_of).collect::<Result<Vec<_>>>()?;
        Ok(Self { web: WebPresentation::from_slopes(slopes)?, integrals, directions: directions.iter().map(|&c| int(c)).collect() })
    }

    /// Sheet data `h_i = g_i(F_i) d_y F_i` of a basis of the abelian
    /// relations: `g_i = w_i F_i^k` with `sum w_i c_i^m = 0` for `m <= k + 1`.
    pub fn relations(&self) -> Result<Vec<Vec<TruncatedSeries>>> {
        let d = self.directions.len();
        let mut out = Vec::new();
        for k in 0..d.saturating_sub(2) {
            let rows: Vec<Vec<Rational>> =
                (0..=k + 1).map(|m| self.directions.iter().map(|c| num_traits::pow(c.clone(), m)).collect()).collect();
            for w in rational_nullspace(&rows, d) {
                let h = self
                    .integrals
                    .iter()
                    .zip(&w)
                    .map(|(f, wi)| {
                        let power = (0..k).fold(TruncatedSeries::one(f.order()), |acc, _| acc.mul_ref(f));
                        Ok(power.mul_ref(&f.derive_y()?).scale(wi))
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(h);
            }
        }
        Ok(out)
    }
}

/// Solves `G(p) = 0` by Newton iteration from the constant `start`, where
/// `G` and `G_p` are given as closures on series.
fn newton(
    start: TruncatedSeries,
    g: impl Fn(&TruncatedSeries) -> TruncatedSeries,
    gp: impl Fn(&TruncatedSeries) -> TruncatedSeries,
) -> Result<TruncatedSeries> {
    let mut p = start;
    let mut sweeps = 0;
    let mut precision = 1;
    while precision < p.order() {
        p = p.sub_ref(&g(&p).mul_ref(&gp(&p).invert()?));
        precision *= 2;
        sweeps += 1;
        debug_assert!(sweeps < 64);
    }
    Ok(p)
}

/// A family of lines `Y = p X + phi(p)` in coordinates `(X, Y)`; its leaves
/// are level curves of the solution `p(x, y)`.
#[derive(Clone, Debug)]
pub struct LineFamily {
    /// Slope of the line through the origin.
    pub base: i64,
    /// Coefficients of `phi(p) = sum phi_k (p - base)^(k + 1)`; `phi_0 != 0`.
    pub phi: Vec<i64>,
}

impl LineFamily {
    fn integral(&self, big_x: &TruncatedSeries, big_y: &TruncatedSeries) -> Result<TruncatedSeries> {
        let order = big_x.order();
        let base = constant(self.base, order);
        let g = |p: &TruncatedSeries| {
            let u = p.sub_ref(&base);
            let mut phi = TruncatedSeries::zero(order);
            let mut power = u.clone();
            for &c in &self.phi {
                phi = phi.add_ref(&power.scale(&int(c)));
                power = power.mul_ref(&u);
            }
            p.mul_ref(big_x).add_ref(&phi).sub_ref(big_y)
        };
        let gp = |p: &TruncatedSeries| {
            let u = p.sub_ref(&base);
            let mut dphi = TruncatedSeries::zero(order);
            let mut power = TruncatedSeries::one(order);
            for (k, &c) in self.phi.iter().enumerate() {
                dphi = dphi.add_ref(&power.scale(&int(c * (k as i64 + 1))));
                power = power.mul_ref(&u);
            }
            big_x.add_ref(&dphi)
        };
        newton(base.clone(), g, gp)
    }
}

/// A polynomial change of coordinates `(X, Y)` fixing the origin with
/// identity linear part.
#[derive(Clone, Debug, Default)]
pub struct Diffeo {
    /// Terms `(i, j, c)` added to `X = x`.
    pub x_terms: Vec<(usize, usize, i64)>,
    /// Terms added to `Y = y`.
    pub y_terms: Vec<(usize, usize, i64)>,
}

impl Diffeo {
    fn apply(&self, order: usize) -> (TruncatedSeries, TruncatedSeries) {
        let build = |linear: (usize, usize), extra: &[(usize, usize, i64)]| {
            let terms = std::iter::once((linear.0, linear.1, int(1))).chain(extra.iter().map(|&(i, j, c)| (i, j, int(c))));
            TruncatedSeries::from_terms(terms, order)
        };
        (build((1, 0), &self.x_terms), build((0, 1), &self.y_terms))
    }
}

/// Web of line families, possibly pulled back by a diffeomorphism: linear
/// when the diffeomorphism is the identity, linearizable in any case.
pub fn line_families(families: &[LineFamily], diffeo: &Diffeo, order: usize) -> Result<WebPresentation> {
    let (big_x, big_y) = diffeo.apply(order);
    let slopes = families.iter().map(|f| slope_of(&f.integral(&big_x, &big_y)?)).collect::<Result<Vec<_>>>()?;
    WebPresentation::from_slopes(slopes)
}

/// `p_i = (1 + x y) c_i + x^2`: the slopes are an affine image of constants,
/// so the cross-ratio is constant, but the web is not hexagonal.
pub fn constant_cross_ratio_affine(cs: &[i64], order: usize) -> Result<WebPresentation> {
    let x = TruncatedSeries::x(order);
    let y = TruncatedSeries::y(order);
    let scale = constant(1, order).add_ref(&x.mul_ref(&y));
    let shift = x.mul_ref(&x);
    WebPresentation::from_slopes(cs.iter().map(|&c| scale.scale(&int(c)).add_ref(&shift)).collect())
}

/// `p_i = (c_i + y^2) / (1 + c_i x)`: a Moebius image of constants.
pub fn constant_cross_ratio_moebius(cs: &[i64], order: usize) -> Result<WebPresentation> {
    let x = TruncatedSeries::x(order);
    let y = TruncatedSeries::y(order);
    let slopes = cs
        .iter()
        .map(|&c| {
            let num = constant(c, order).add_ref(&y.mul_ref(&y));
            Ok(num.mul_ref(&constant(1, order).add_ref(&x.scale(&int(c))).invert()?))
        })
        .collect::<Result<Vec<_>>>()?;
    WebPresentation::from_slopes(slopes)
}

/// `{q, 2q, 3q, 4q}` with `q = 1 + x`.
pub fn scaled_constant_family(order: usize) -> Result<WebPresentation> {
    let q = constant(1, order).add_ref(&TruncatedSeries::x(order));
    WebPresentation::from_slopes((1..=4).map(|k| q.scale(&int(k))).collect())
}

/// The rectified web `(x, y, F_3, ..., F_d)` moved by the similarity chart
/// with parameter `t` so that no leaf is vertical.
pub fn rectified(integrals: &[TruncatedSeries], t: &Rational) -> Result<WebPresentation> {
    let order = integrals.iter().map(TruncatedSeries::order).min().unwrap_or(0);
    let mut leaves = vec![LeafDirection::vertical(order), LeafDirection::Slope(TruncatedSeries::zero(order))];
    for f in integrals {
        leaves.push(LeafDirection::from_first_integral(f)?);
    }
    WebPresentation::from_slopes(apply_affine_chart(&leaves, t)?)
}

fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=3);
    rat(num, den)
}

/// Sparse random series with the given constant term and small rational
/// coefficients up to total degree `degree`.
pub fn random_series<R: Rng>(rng: &mut R, constant_term: Rational, degree: usize, order: usize) -> TruncatedSeries {
    let mut terms = vec![(0, 0, constant_term)];
    for total in 1..=degree.min(order.saturating_sub(1)) {
        for i in 0..=total {
            if rng.gen_bool(0.6) {
                terms.push((i, total - i, random_rational(rng, 3)));
            }
        }
    }
    TruncatedSeries::from_terms(terms, order)
}

/// A unit with constant term in `{1, 2, -1, 3/2, ...}`.
pub fn random_unit<R: Rng>(rng: &mut R, order: usize) -> TruncatedSeries {
    let mut c = random_rational(rng, 3);
    if c.is_zero() {
        c = int(1);
    }
    random_series(rng, c, 3, order)
}

/// A web with `d` random slopes: distinct integer constant terms and random
/// terms up to degree 3. Such webs have rank zero almost surely for `d >= 4`.
pub fn random_web<R: Rng>(rng: &mut R, d: usize, order: usize) -> Result<WebPresentation> {
    let mut constants: Vec<i64> = Vec::with_capacity(d);
    while constants.len() < d {
        let c = rng.gen_range(-4..=4);
        if !constants.contains(&c) {
            constants.push(c);
        }
    }
    WebPresentation::from_slopes(constants.into_iter().map(|c| random_series(rng, int(c), 3, order)).collect())
}

/// Random 4-web whose slopes are a random Moebius image of random constants
/// (so the cross-ratio is constant).
pub fn random_constant_cross_ratio<R: Rng>(rng: &mut R, order: usize) -> Result<WebPresentation> {
    let mut constants: Vec<i64> = Vec::with_capacity(4);
    while constants.len() < 4 {
        let c = rng.gen_range(-3..=3);
        if !constants.contains(&c) {
            constants.push(c);
        }
    }
    let a = random_series(rng, int(1), 2, order);
    let b = random_series(rng, int(0), 2, order);
    let e = random_series(rng, int(0), 2, order);
    let slopes = constants
        .iter()
        .map(|&c| {
            let num = a.scale(&int(c)).add_ref(&b);
            Ok(num.mul_ref(&constant(1, order).add_ref(&e.scale(&int(c))).invert()?))
        })
        .collect::<Result<Vec<_>>>()?;
    WebPresentation::from_slopes(slopes)
}
