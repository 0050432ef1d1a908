//! Seeded random streams.
//!
//! One root seed fans out into independent ChaCha streams. The key is derived
//! from the root seed and a purpose tag, the ChaCha stream id is the replica
//! index, so replica `i` draws the same numbers no matter which thread runs it
//! or in which order replicas are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Different purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Positions,
    Appetites,
    Auxiliary(u32),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Positions => 0x504f_5349_5449_4f4e,
            Purpose::Appetites => 0x4150_5045_5449_5445,
            Purpose::Auxiliary(k) => 0x4155_5800_0000_0000 ^ u64::from(k),
        }
    }
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The stream for `(root, replica, purpose)`.
pub fn stream(root: u64, replica: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut state = root ^ purpose.tag();
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replica);
    rng
}
