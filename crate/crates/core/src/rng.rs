//! Counter-based pseudo random numbers.
//!
//! Every random draw in the crate goes through [`CounterRng`], a SplitMix64
//! finalizer applied to `seed + counter * 0x9E3779B97F4A7C15`. The generator is
//! small enough to port to any language bit-exactly:
//!
//! ```text
//! state_k = seed + k * 0x9E3779B97F4A7C15          (wrapping, k = 1, 2, ...)
//! z = state_k
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! out_k = z ^ (z >> 31)
//! ```
//!
//! Reference output for seed 0: `0xE220A8397B1DCDAF`, `0x6E789E6AA1B965F4`,
//! `0x06C45D188009454F`.
//!
//! Derived distributions:
//! - uniform `[0, 1)`: `(out >> 11) * 2^-53`
//! - uniform `[a, b)`: `a + (b - a) * u`
//! - standard normal: Box-Muller, `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`, one
//!   normal per pair of draws (the sine branch is discarded)
//! - index below `n`: `floor(u * n)`

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    /// A generator for an independent stream, e.g. one per restart.
    pub fn fork(&self, stream: u64) -> Self {
        Self::new(mix(self.seed ^ mix(stream.wrapping_add(GOLDEN_GAMMA))))
    }

    /// Value of the `k`-th draw (1-based) without advancing.
    pub fn at(seed: u64, k: u64) -> u64 {
        mix(seed.wrapping_add(k.wrapping_mul(GOLDEN_GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        Self::at(self.seed, self.counter)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lower: f64, upper: f64) -> f64 {
        lower + (upper - lower) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n.saturating_sub(1))
    }

    /// Fisher-Yates shuffle, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
