//! Deterministic random-variate plumbing: per-run stream derivation via a
//! 64-bit mixing hash, and inverse-CDF sampling on a 53-bit (0, 1] grid.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator behind every simulation run. ChaCha8 is counter-based,
/// platform-stable, and documented to produce the same stream for the same
/// seed everywhere, which is what the byte-identical-report guarantee rests
/// on.
pub type SimRng = ChaCha8Rng;

/// Finalizer of the splitmix64 generator; a strong 64-bit mixing hash.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Seed for run `index` of a sweep driven by `master`. Distinct indices give
/// well-separated ChaCha streams, so parallel cells never overlap and any
/// execution order reproduces the same per-cell results.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// 2^-53, the spacing of the uniform grid below.
const GRID: f64 = 1.0 / (1u64 << 53) as f64;

/// Uniform draw on (0, 1] with 53-bit resolution. A raw draw of exactly 1
/// (which would map to 0 under the exponential inverse CDF) is remapped to
/// the smallest positive grid point, so downstream variates are never 0 and
/// never infinite.
pub fn uniform_open_closed(rng: &mut impl RngCore) -> f64 {
    let u = ((rng.next_u64() >> 11) as f64 + 1.0) * GRID;
    if u == 1.0 {
        GRID
    } else {
        u
    }
}

/// Inverse CDF of the exponential distribution with the given rate.
pub fn exp_inv_cdf(rate: f64, u: f64) -> f64 {
    -u.ln() / rate
}

/// Exponential variate with the given rate; strictly positive and finite.
pub fn sample_exponential(rate: f64, rng: &mut impl RngCore) -> f64 {
    debug_assert!(rate > 0.0);
    exp_inv_cdf(rate, uniform_open_closed(rng))
}

/// Bernoulli trial with success probability `p`; exact at p = 1 because the
/// uniform never exceeds 1.
pub fn sample_bernoulli(p: f64, rng: &mut impl RngCore) -> bool {
    uniform_open_closed(rng) <= p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_formula() {
        assert!((exp_inv_cdf(2.0, 0.5) - 0.5f64.ln().abs() / 2.0).abs() < 1e-15);
        assert_eq!(exp_inv_cdf(1.0, 1.0), 0.0);
    }

    #[test]
    fn uniform_stays_in_open_closed_interval() {
        let mut rng = rng_from_seed(7);
        for _ in 0..100_000 {
            let u = uniform_open_closed(&mut rng);
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn samples_are_positive_and_finite() {
        let mut rng = rng_from_seed(11);
        for _ in 0..100_000 {
            let x = sample_exponential(3.0, &mut rng);
            assert!(x > 0.0 && x.is_finite());
        }
    }

    // Frozen from the chosen generator once; guards against platform or
    // version drift in the stream.
    #[test]
    fn regression_first_draws() {
        let mut rng = rng_from_seed(0);
        let a = sample_exponential(1.0, &mut rng);
        let b = sample_exponential(1.0, &mut rng);
        assert_eq!(a.to_bits(), FIRST_DRAW_BITS);
        assert_eq!(b.to_bits(), SECOND_DRAW_BITS);
    }

    const FIRST_DRAW_BITS: u64 = 0x3fd33258e2464366;
    const SECOND_DRAW_BITS: u64 = 0x3fc1303ef65427eb;

    #[test]
    fn bernoulli_certain_at_p_one() {
        let mut rng = rng_from_seed(3);
        assert!((0..10_000).all(|_| sample_bernoulli(1.0, &mut rng)));
    }

    #[test]
    fn sample_mean_tracks_rate() {
        let mut rng = rng_from_seed(5);
        let n = 200_000;
        let sum: f64 = (0..n).map(|_| sample_exponential(4.0, &mut rng)).sum();
        let mean = sum / n as f64;
        // SE of the mean is 0.25/sqrt(n) ~ 5.6e-4; allow 5 SEs.
        assert!((mean - 0.25).abs() < 2.8e-3, "mean = {mean}");
    }

    #[test]
    fn stream_seeds_differ_by_index() {
        let seeds: Vec<u64> = (0..64).map(|i| stream_seed(42, i)).collect();
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), seeds.len());
    }
}
