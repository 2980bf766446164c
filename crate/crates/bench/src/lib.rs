//! Inputs shared by the criterion benchmarks in `benches/`.

use weblab_core::corpus;
use weblab_core::presentation::WebPresentation;
use weblab_core::series::int;
use weblab_core::TruncatedSeries;

/// Fixed generic web of degree `d` (seeded), at working order `order`.
pub fn generic_web(d: usize, order: usize) -> WebPresentation {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(d as u64);
    corpus::random_web(&mut rng, d, order).expect("random webs are in general position")
}

/// A dense series with small integer coefficients and constant term 1.
pub fn dense_series(order: usize) -> TruncatedSeries {
    let terms = (0..order).flat_map(|t| (0..=t).map(move |i| (i, t - i, int(((i * 7 + t * 3) % 5) as i64 - 2))));
    let mut s = TruncatedSeries::from_terms(terms, order);
    s.set_coeff(0, 0, int(1));
    s
}
