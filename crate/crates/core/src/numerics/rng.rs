//! Seeded random streams and binomial sampling for the simulator.
//!
//! Every replicate draws from its own [`StreamRng`], built from a
//! [`RngSeed`] `(master_seed, stream_id)`. The generator is xoshiro256**;
//! its 256-bit state is
//!
//! ```text
//! s0 = master_seed ^ K0
//! s1 = stream_id   ^ K1
//! s2 = mix64(master_seed ^ K2)
//! s3 = mix64(stream_id   ^ K3)
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer. The first two words make the
//! map from `(master_seed, stream_id)` to state injective. The first
//! [`WARMUP`] outputs are discarded.

use serde::{Deserialize, Serialize};

const K0: u64 = 0x9E37_79B9_7F4A_7C15;
const K1: u64 = 0xD1B5_4A32_D192_ED03;
const K2: u64 = 0xA076_1D64_78BD_642F;
const K3: u64 = 0xE703_7ED1_A0B4_28DB;
const WARMUP: usize = 8;

/// SplitMix64 output finalizer; a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngSeed {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }
}

/// xoshiro256** generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamRng {
    s: [u64; 4],
}

impl StreamRng {
    pub fn new(seed: RngSeed) -> Self {
        let mut rng = Self {
            s: [
                seed.master_seed ^ K0,
                seed.stream_id ^ K1,
                mix64(seed.master_seed ^ K2),
                mix64(seed.stream_id ^ K3),
            ],
        };
        for _ in 0..WARMUP {
            rng.next_u64();
        }
        rng
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform on [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Draws one Binomial(n, p) variate from the stream identified by `seed`.
pub fn binomial_sample(n: u64, p: f64, seed: RngSeed) -> u64 {
    sample_binomial(&mut StreamRng::new(seed), n, p)
}

// Below this mean the CDF is inverted from zero; above it the search starts at the mode.
const SEQUENTIAL_MEAN_LIMIT: f64 = 30.0;

/// Draws a Binomial(n, p) variate by inversion.
///
/// Works with `p' = min(p, 1 - p)` and reflects, so `sample(n, p)` and
/// `n - sample(n, 1 - p)` coincide draw for draw when `p != 0.5`. Small means
/// invert the CDF sequentially from zero. Larger means use chop-down search
/// from the mode, alternating right and left, with pmf ratios after a single
/// log-factorial evaluation at the mode. Both are exact up to floating-point
/// rounding. In the rare event that accumulated rounding leaves mass
/// unassigned, a fresh uniform is drawn.
///
/// # Panics
///
/// If `p` is not in [0, 1].
pub fn sample_binomial(rng: &mut StreamRng, n: u64, p: f64) -> u64 {
    assert!((0.0..=1.0).contains(&p), "binomial probability {p} not in [0, 1]");
    if n == 0 || p == 0.0 {
        return 0;
    }
    if p == 1.0 {
        return n;
    }
    let flip = p > 0.5;
    let pp = if flip { 1.0 - p } else { p };
    let k = if (n as f64) * pp < SEQUENTIAL_MEAN_LIMIT {
        sequential_inversion(rng, n, pp)
    } else {
        mode_inversion(rng, n, pp)
    };
    if flip {
        n - k
    } else {
        k
    }
}

fn sequential_inversion(rng: &mut StreamRng, n: u64, p: f64) -> u64 {
    let q = 1.0 - p;
    let ratio = p / q;
    let a = (n as f64 + 1.0) * ratio;
    let p_zero = q.powf(n as f64);
    loop {
        let mut u = rng.next_f64();
        let mut pmf = p_zero;
        let mut k: u64 = 0;
        loop {
            if u < pmf {
                return k;
            }
            u -= pmf;
            k += 1;
            if k > n {
                break;
            }
            pmf *= a / k as f64 - ratio;
            if pmf <= 0.0 {
                break;
            }
        }
    }
}

fn mode_inversion(rng: &mut StreamRng, n: u64, p: f64) -> u64 {
    let q = 1.0 - p;
    let nf = n as f64;
    let mode = (((n + 1) as f64) * p).floor().min(nf) as u64;
    let ln_pmf_mode = ln_factorial(n) - ln_factorial(mode) - ln_factorial(n - mode)
        + mode as f64 * p.ln()
        + (n - mode) as f64 * q.ln();
    let pmf_mode = ln_pmf_mode.exp();
    let odds = p / q;

    loop {
        let mut u = rng.next_f64();
        u -= pmf_mode;
        if u < 0.0 {
            return mode;
        }
        let (mut up, mut down) = (mode, mode);
        let (mut p_up, mut p_down) = (pmf_mode, pmf_mode);
        loop {
            let mut moved = false;
            if up < n {
                p_up *= (n - up) as f64 / (up + 1) as f64 * odds;
                up += 1;
                u -= p_up;
                if u < 0.0 {
                    return up;
                }
                moved = true;
            }
            if down > 0 {
                p_down *= down as f64 / (n - down + 1) as f64 / odds;
                down -= 1;
                u -= p_down;
                if u < 0.0 {
                    return down;
                }
                moved = true;
            }
            if !moved || (p_up == 0.0 && p_down == 0.0) {
                break;
            }
        }
    }
}

/// `ln(k!)`: direct product for small k, Stirling series beyond.
pub(crate) fn ln_factorial(k: u64) -> f64 {
    if k <= 20 {
        let mut prod = 1.0f64;
        for i in 2..=k {
            prod *= i as f64;
        }
        return prod.ln();
    }
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}
