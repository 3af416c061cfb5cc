//! Counter-based random streams.
//!
//! A stream is identified by a key built from `(seed, replication,
//! component, mode)`; the `counter`-th draw of that stream is a pure
//! function of key and counter. Replications can therefore run in any order
//! or on any thread and still see the same numbers.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Failure mode a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Mode {
    /// Share E of the hazard, renewed at every test.
    Detectable = 0,
    /// Share 1 - E, renewed by the full test only.
    Latent = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64, replication: u64, component: u64, mode: Mode) -> Self {
        let mut k = mix(seed ^ GOLDEN);
        k = mix(k ^ replication.wrapping_mul(GOLDEN));
        k = mix(k ^ component.wrapping_mul(0xd6e8_feb8_6659_fd93));
        k = mix(k ^ (mode as u64 + 1).wrapping_mul(0xa076_1d64_78bd_642f));
        StreamKey(k)
    }

    /// The `counter`-th 64-bit draw of the stream.
    #[inline]
    pub fn draw(self, counter: u64) -> u64 {
        mix(self.0.wrapping_add((counter + 1).wrapping_mul(GOLDEN)))
    }

    /// Uniform in (0, 1].
    #[inline]
    pub fn uniform(self, counter: u64) -> f64 {
        ((self.draw(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential with the given rate; infinite for a zero rate.
    #[inline]
    pub fn exponential(self, counter: u64, rate: f64) -> f64 {
        if rate <= 0.0 {
            return f64::INFINITY;
        }
        -self.uniform(counter).ln() / rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_pure_functions_of_key_and_counter() {
        let k = StreamKey::new(42, 7, 3, Mode::Latent);
        assert_eq!(k.draw(5), StreamKey::new(42, 7, 3, Mode::Latent).draw(5));
        assert_ne!(k.draw(5), k.draw(6));
        assert_ne!(k, StreamKey::new(42, 7, 3, Mode::Detectable));
        assert_ne!(k, StreamKey::new(42, 8, 3, Mode::Latent));
        assert_ne!(k, StreamKey::new(43, 7, 3, Mode::Latent));
    }

    #[test]
    fn uniform_moments() {
        let k = StreamKey::new(1, 0, 0, Mode::Detectable);
        let n = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for c in 0..n {
            let u = k.uniform(c);
            assert!(u > 0.0 && u <= 1.0);
            s += u;
            s2 += u * u;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((mean - 0.5).abs() < 3e-3);
        assert!((var - 1.0 / 12.0).abs() < 2e-3);
    }

    #[test]
    fn exponential_mean() {
        let n = 200_000u64;
        let mean = (0..n)
            .map(|r| StreamKey::new(9, r, 0, Mode::Detectable).exponential(0, 2.0))
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 5e-3);
        assert_eq!(
            StreamKey::new(9, 0, 0, Mode::Latent).exponential(0, 0.0),
            f64::INFINITY
        );
    }
}
