//! Counter-based deterministic random numbers.
//!
//! Every draw is a pure function of (stream key, step, cell, lane), so
//! ensemble members and noise cells can be generated in any order — including
//! concurrently — with bitwise-identical results. Streams are derived by
//! hashing, never by sequential state, which is what makes replay across
//! thread counts exact.

const PHI64: u64 = 0x9E37_79B9_7F4A_7C15;
const C_STEP: u64 = 0xBF58_476D_1CE4_E5B9;
const C_CELL: u64 = 0x94D0_49BB_1331_11EB;
const C_LANE: u64 = 0xD6E8_FEB8_6659_FD93;

/// splitmix64 finalizer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A derived random stream, identified by a 64-bit key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stream {
    key: u64,
}

impl Stream {
    /// Root stream of a run.
    pub fn root(seed: u64) -> Self {
        Stream {
            key: mix(seed ^ PHI64),
        }
    }

    /// Child stream (ensemble member, auxiliary draw family, ...).
    pub fn child(self, tag: u64) -> Self {
        Stream {
            key: mix(self.key ^ tag.wrapping_mul(PHI64).wrapping_add(PHI64)),
        }
    }

    /// Member stream shorthand.
    pub fn member(seed: u64, member: u64) -> Self {
        Stream::root(seed).child(member)
    }

    pub fn key(self) -> u64 {
        self.key
    }

    /// Raw 64-bit draw for (step, cell, lane).
    #[inline]
    pub fn draw_u64(self, step: u64, cell: u64, lane: u64) -> u64 {
        let mut h = self.key;
        h = mix(h ^ step.wrapping_mul(C_STEP).wrapping_add(1));
        h = mix(h ^ cell.wrapping_mul(C_CELL).wrapping_add(2));
        h = mix(h ^ lane.wrapping_mul(C_LANE).wrapping_add(3));
        h
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn uniform(self, step: u64, cell: u64, lane: u64) -> f64 {
        // 53 significant bits, offset by half an ulp so 0 is never produced
        ((self.draw_u64(step, cell, lane) >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Pair of independent standard normals by Box–Muller.
    #[inline]
    pub fn normal_pair(self, step: u64, cell: u64, lane: u64) -> (f64, f64) {
        let u1 = self.uniform(step, cell, 2 * lane);
        let u2 = self.uniform(step, cell, 2 * lane + 1);
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * u2;
        (r * th.cos(), r * th.sin())
    }

    /// Single standard normal.
    #[inline]
    pub fn normal(self, step: u64, cell: u64, lane: u64) -> f64 {
        self.normal_pair(step, cell, lane).0
    }
}
