//! Seeded sample points.
//!
//! Every sample owns its own ChaCha8 stream, keyed by the check id and the
//! sample index, so results do not depend on evaluation order or threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest admissible pole ratio |s z| / pi for a sample point.
pub const MAX_POLE_RATIO: f64 = 0.5;

/// Factor applied to a point whose pole ratio is too large.
pub const CONTRACTION: f64 = 0.8;

/// FNV-1a hash of a check id.
pub fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Random stream of sample `index` of check `check` under `seed`.
pub fn stream(seed: u64, check: &str, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(check));
    rng.set_stream(index as u64);
    rng
}

/// Coordinates uniform in [-radius, radius].
pub fn uniform(rng: &mut impl Rng, dim: usize, radius: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-radius..=radius)).collect()
}

/// A sample point together with the number of contractions it needed.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub point: Vec<f64>,
    pub contractions: u32,
}

/// Draws a point and contracts it towards the origin until `ratio` is at
/// most [`MAX_POLE_RATIO`].
pub fn sample_in_domain(
    seed: u64,
    check: &str,
    index: usize,
    dim: usize,
    radius: f64,
    ratio: impl Fn(&[f64]) -> Result<f64>,
) -> Result<Sample> {
    let mut rng = stream(seed, check, index);
    let mut point = uniform(&mut rng, dim, radius);
    let mut contractions = 0;
    while ratio(&point)? > MAX_POLE_RATIO {
        if contractions >= 200 {
            return Err(Error::Domain(format!(
                "{check}: sample {index} never enters the domain"
            )));
        }
        point.iter_mut().for_each(|v| *v *= CONTRACTION);
        contractions += 1;
    }
    Ok(Sample { point, contractions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = uniform(&mut stream(42, "cdybe", 3), 4, 0.3);
        let b = uniform(&mut stream(42, "cdybe", 3), 4, 0.3);
        let c = uniform(&mut stream(42, "cdybe", 4), 4, 0.3);
        let d = uniform(&mut stream(42, "jacobi", 3), 4, 0.3);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert!(a.iter().all(|v| v.abs() <= 0.3));
    }

    #[test]
    fn contraction_reaches_domain() {
        let s = sample_in_domain(1, "x", 0, 3, 10.0, |p| {
            Ok(p.iter().map(|v| v.abs()).fold(0.0, f64::max))
        })
        .unwrap();
        assert!(s.point.iter().all(|v| v.abs() <= MAX_POLE_RATIO));
        assert!(s.contractions > 0);
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(""), 0xcbf29ce484222325);
        assert_eq!(fnv1a("a"), 0xaf63dc4c8601ec8c);
    }
}
