//! Counter-based random draws.
//!
//! Every random number used by the disorder/noise machinery is a pure
//! function of a master seed and a small key (realization, segment,
//! domain, term index). There is no mutable generator state, so results
//! do not depend on evaluation order or on how work is split across
//! threads.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash the key words into a single well-mixed 64-bit value.
///
/// Each word is offset by a position-dependent constant before mixing so
/// that permuted keys land in unrelated streams.
fn stream_u64(seed: u64, words: [u64; 4]) -> u64 {
    let mut z = mix64(seed ^ GOLDEN);
    for (k, w) in words.into_iter().enumerate() {
        z = mix64(z ^ w.wrapping_add((k as u64 + 1).wrapping_mul(GOLDEN)));
    }
    z
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub fn unit_draw(seed: u64, words: [u64; 4]) -> f64 {
    (stream_u64(seed, words) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[-half_width, half_width)`.
pub fn symmetric_draw(seed: u64, words: [u64; 4], half_width: f64) -> f64 {
    (2.0 * unit_draw(seed, words) - 1.0) * half_width
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_deterministic() {
        let a = unit_draw(7, [1, 2, 3, 4]);
        let b = unit_draw(7, [1, 2, 3, 4]);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn distinct_keys_decorrelate() {
        let a = unit_draw(7, [1, 2, 3, 4]);
        let b = unit_draw(7, [2, 1, 3, 4]);
        let c = unit_draw(8, [1, 2, 3, 4]);
        assert_ne!(a.to_bits(), b.to_bits());
        assert_ne!(a.to_bits(), c.to_bits());
    }

    /// Kolmogorov-Smirnov statistic of 1e5 consecutive-index draws against
    /// the uniform CDF; a sound generator sits well below 0.01.
    #[test]
    fn unit_draws_are_uniform() {
        let n = 100_000usize;
        let mut xs: Vec<f64> = (0..n).map(|i| unit_draw(42, [0, 0, 1, i as u64])).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        let mut ks: f64 = 0.0;
        for (i, x) in xs.iter().enumerate() {
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            ks = ks.max((x - lo).abs()).max((hi - x).abs());
        }
        assert!(ks < 0.01, "KS statistic {ks} too large");
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean} off");
    }

    #[test]
    fn symmetric_draw_respects_half_width() {
        for i in 0..1000 {
            let d = symmetric_draw(3, [0, 0, 0, i], 0.1);
            assert!((-0.1..0.1).contains(&d));
        }
    }
}
