//! Hierarchical, order-independent random streams.
//!
//! A stream is named by a master seed plus a path of integer labels. The seed
//! of the underlying ChaCha generator is a hash of the full path, so any
//! worker can rebuild the stream it needs without coordinating with others.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Generator type handed out by [`RngStream::rng`].
pub type StreamRng = ChaCha12Rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    master_seed: u64,
    path: Vec<u64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            path: Vec::new(),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Sub-stream one level down.
    pub fn child(&self, label: u64) -> Self {
        let mut path = self.path.clone();
        path.push(label);
        Self {
            master_seed: self.master_seed,
            path,
        }
    }

    pub fn descend(&self, labels: &[u64]) -> Self {
        let mut path = self.path.clone();
        path.extend_from_slice(labels);
        Self {
            master_seed: self.master_seed,
            path,
        }
    }

    fn seed_bytes(&self) -> [u8; 32] {
        let mut state = self.master_seed;
        let mut acc = splitmix64(&mut state);
        for (depth, &label) in self.path.iter().enumerate() {
            let mut s = label ^ (depth as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03);
            acc ^= splitmix64(&mut s);
            state ^= acc;
            acc = splitmix64(&mut state);
        }
        // path length disambiguates prefixes such as [] and [0]
        state ^= (self.path.len() as u64).rotate_left(32);
        let mut out = [0u8; 32];
        for chunk in out.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        out
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        ChaCha12Rng::from_seed(self.seed_bytes())
    }
}

pub fn derive_rng(master: u64, path: &[u64]) -> RngStream {
    RngStream::new(master).descend(path)
}
