//! Deterministic numerical kernels: seeded PRNG with named sub-streams,
//! normal CDF/quantile, Cholesky factorization.

mod cholesky;
mod normal;

pub use cholesky::{cholesky, solve_spd, CholeskyError, CorrelationFactor};
pub use normal::{erf, erfc, std_normal_cdf, std_normal_quantile, NormalError};

/// Identifier of the generator algorithm, recorded in dataset metadata so a
/// regenerated dataset can be audited against the stream that produced it.
pub const PRNG_ALGORITHM: &str = "xoshiro256++ (splitmix64-seeded, fnv1a64 label substreams)";

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seeded deterministic generator (xoshiro256++).
///
/// The same seed yields a bit-identical `u64` stream on every platform.
/// Sub-streams are derived by hashing a label into the seed, so the draws
/// for one purpose (say, nuisance columns) never perturb the draws for
/// another (the informative columns).
#[derive(Debug, Clone)]
pub struct Prng {
    state: [u64; 4],
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Self::from_mixed(seed)
    }

    /// Generator for the named sub-stream of `seed`.
    pub fn substream(seed: u64, label: &str) -> Self {
        Self::from_mixed(seed ^ fnv1a64(label.as_bytes()))
    }

    fn from_mixed(mixed: u64) -> Self {
        // splitmix64 expansion as recommended by the xoshiro authors; it
        // cannot produce the forbidden all-zero state in practice.
        let mut sm = mixed;
        let state = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform draw strictly inside (0, 1).
    ///
    /// Maps the top 53 bits to (k + 0.5) / 2^53, so 0.0 and 1.0 are never
    /// produced and quantile transforms are always safe.
    pub fn uniform_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    pub fn draw_uniform(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.uniform_open01()).collect()
    }

    /// Standard normal via inverse-CDF transform of one uniform.
    pub fn standard_normal(&mut self) -> f64 {
        std_normal_quantile(self.uniform_open01()).expect("open-interval uniform")
    }

    /// Unbiased integer in `0..bound` by rejection sampling.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        let bound = bound as u64;
        loop {
            let x = self.next_u64();
            let r = x % bound;
            if x - r <= u64::MAX - (bound - 1) {
                return r as usize;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Prng::new(1);
        let mut b = Prng::new(1);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        // First uniform from a fresh generator is reproducible.
        assert_eq!(Prng::new(1).uniform_open01(), Prng::new(1).uniform_open01());
    }

    #[test]
    fn substreams_differ_and_do_not_interfere() {
        let mut inf = Prng::substream(7, "informative");
        let mut nui = Prng::substream(7, "nuisance");
        assert_ne!(inf.next_u64(), nui.next_u64());
        // Advancing one stream never changes the other.
        let expected: Vec<u64> = {
            let mut fresh = Prng::substream(7, "informative");
            (0..16).map(|_| fresh.next_u64()).collect()
        };
        let mut interleaved = Prng::substream(7, "informative");
        let mut other = Prng::substream(7, "nuisance");
        for &want in &expected {
            other.next_u64();
            assert_eq!(interleaved.next_u64(), want);
        }
    }

    #[test]
    fn uniforms_stay_strictly_inside_unit_interval() {
        let mut prng = Prng::new(99);
        for u in prng.draw_uniform(100_000) {
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn uniform_sample_passes_ks_test() {
        // Kolmogorov-Smirnov against U(0,1) at alpha = 0.01:
        // critical value 1.628 / sqrt(n).
        let n = 100_000;
        let mut prng = Prng::new(20240901);
        let mut sample = prng.draw_uniform(n);
        sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut d: f64 = 0.0;
        for (i, &x) in sample.iter().enumerate() {
            let hi = (i + 1) as f64 / n as f64 - x;
            let lo = x - i as f64 / n as f64;
            d = d.max(hi).max(lo);
        }
        assert!(d <= 1.628 / (n as f64).sqrt(), "KS statistic {d} too large");
    }

    #[test]
    fn shuffle_is_deterministic_and_a_permutation() {
        let mut a: Vec<usize> = (0..50).collect();
        let mut b: Vec<usize> = (0..50).collect();
        Prng::substream(3, "shuffle").shuffle(&mut a);
        Prng::substream(3, "shuffle").shuffle(&mut b);
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }
}
