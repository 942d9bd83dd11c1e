//! Deterministic random streams.
//!
//! Every stream is a xoshiro256** generator whose 256-bit state is derived
//! from a `(global_seed, stream_label)` pair with the SplitMix64 finalizer.
//! The generator is implemented here rather than pulled from a crate so the
//! emitted sequence is pinned to this source file: golden fixtures and
//! dataset digests stay valid across toolchain and dependency upgrades.

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer (a bijection on `u64`).
#[inline]
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies one stream: a global seed plus a label such as an image index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub global_seed: u64,
    pub stream_label: u64,
}

impl SeedSpec {
    pub fn new(global_seed: u64, stream_label: u64) -> Self {
        Self {
            global_seed,
            stream_label,
        }
    }
}

/// Builds the initial state for a seed spec.
///
/// Words 0 and 1 come from the finalizer applied to `seed ^ rotl(label, 32)`.
/// Words 2 and 3 are bijective images of the seed and the label alone, so
/// distinct `(seed, label)` pairs can never share an initial state.
pub fn derive_stream(spec: SeedSpec) -> RngStream {
    let SeedSpec {
        global_seed,
        stream_label,
    } = spec;
    let mixed = global_seed ^ stream_label.rotate_left(32);
    let mut s = [
        splitmix64_mix(mixed.wrapping_add(GOLDEN_GAMMA)),
        splitmix64_mix(mixed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(2))),
        splitmix64_mix(global_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(3))),
        splitmix64_mix(stream_label ^ 0xD1B5_4A32_D192_ED03),
    ];
    if s == [0; 4] {
        s[0] = GOLDEN_GAMMA;
    }
    RngStream { s }
}

/// A single-owner xoshiro256** stream. `Clone` forks the state explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    s: [u64; 4],
}

impl RngStream {
    pub fn from_spec(spec: SeedSpec) -> Self {
        derive_stream(spec)
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

    /// Uniform in `[0, 1)`: the top 53 bits of one word, scaled by 2^-53.
    #[inline]
    pub fn next_unit_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit_uniform()
    }

    /// Top byte of one word.
    #[inline]
    pub fn next_byte_uniform(&mut self) -> u8 {
        (self.next_u64() >> 56) as u8
    }

    /// Uniform index in `[0, n)` without modulo bias (Lemire's method with rejection).
    pub fn next_index(&mut self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::argument("next_index requires n >= 1"));
        }
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return Ok((m >> 64) as usize);
            }
        }
    }

    /// Gaussian sample via Box-Muller; consumes two words.
    pub fn next_gaussian(&mut self, mean: f64, stddev: f64) -> f64 {
        let u1 = 1.0 - self.next_unit_uniform();
        let u2 = self.next_unit_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        mean + stddev * r * (std::f64::consts::TAU * u2).cos()
    }

    /// Fills `buf` with uniform bytes, eight per word in little-endian order.
    #[inline]
    pub fn fill_bytes(&mut self, buf: &mut [u8]) {
        // Runs on a local copy of the state so it stays in registers.
        let mut g = RngStream { s: self.s };
        let mut chunks = buf.chunks_exact_mut(8);
        for chunk in &mut chunks {
            chunk.copy_from_slice(&g.next_u64().to_le_bytes());
        }
        let rest = chunks.into_remainder();
        if !rest.is_empty() {
            let word = g.next_u64().to_le_bytes();
            rest.copy_from_slice(&word[..rest.len()]);
        }
        self.s = g.s;
    }

    /// Advances the state by 2^128 steps.
    pub fn jump(&mut self) {
        const JUMP: [u64; 4] = [
            0x180e_c6d3_3cfd_0aba,
            0xd5a6_1266_f0c9_392c,
            0xa958_2618_e03f_c9aa,
            0x39ab_dc45_29b1_661c,
        ];
        let mut acc = [0u64; 4];
        for word in JUMP {
            for bit in 0..64 {
                if word & (1u64 << bit) != 0 {
                    for (a, s) in acc.iter_mut().zip(self.s.iter()) {
                        *a ^= *s;
                    }
                }
                self.next_u64();
            }
        }
        self.s = acc;
    }

    /// Returns a child stream positioned at the current state and moves `self`
    /// 2^128 steps ahead, so parent and child never overlap.
    pub fn split(&mut self) -> RngStream {
        let child = self.clone();
        self.jump();
        child
    }
}

/// The three named sub-streams every image consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamRole {
    /// Structural coins: cut axis and masked side.
    Structure = 0,
    /// Parameters of the augmentation.
    Augment = 1,
    /// Mask bytes.
    Noise = 2,
}

/// Label for the `role` sub-stream of image `index`.
pub fn image_stream_label(index: u64, role: StreamRole) -> u64 {
    (index << 2) | role as u64
}

/// Per-image streams, derived only from `(global_seed, image_index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageStreams {
    pub structure: RngStream,
    pub augment: RngStream,
    pub noise: RngStream,
}

impl ImageStreams {
    pub fn derive(global_seed: u64, image_index: u64) -> Self {
        let stream =
            |role| derive_stream(SeedSpec::new(global_seed, image_stream_label(image_index, role)));
        Self {
            structure: stream(StreamRole::Structure),
            augment: stream(StreamRole::Augment),
            noise: stream(StreamRole::Noise),
        }
    }
}
