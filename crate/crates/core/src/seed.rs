//! Labeled seed derivation.
//!
//! Every random stream in a run is derived from one master seed plus a label
//! `(trial, client, role)`. Shared streams (rotation signs, coordinate subsets)
//! are reproducible by both the client and the server; the rounding-coin
//! stream is private to the client but still deterministic for replay.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Rotation,
    Subset,
    Coins,
    Instance,
}

impl Role {
    fn tag(self) -> u64 {
        match self {
            Role::Rotation => 0x524f_5441,
            Role::Subset => 0x5355_4253,
            Role::Coins => 0x434f_494e,
            Role::Instance => 0x494e_5354,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Rotation => "rotation",
            Role::Subset => "subset",
            Role::Coins => "coins",
            Role::Instance => "instance",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamLabel {
    pub trial: u64,
    pub client: u64,
    pub role: Role,
}

impl StreamLabel {
    pub fn new(trial: u64, client: usize, role: Role) -> Self {
        StreamLabel {
            trial,
            client: client as u64,
            role,
        }
    }

    pub fn tag(&self) -> String {
        format!(
            "trial={};client={};role={}",
            self.trial,
            self.client,
            self.role.name()
        )
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `words` into `master` with SplitMix64 mixing.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    let mut state = master;
    let mut acc = splitmix64(&mut state);
    for &w in words {
        state ^= w.wrapping_add(acc);
        acc = splitmix64(&mut state);
    }
    acc
}

pub fn stream(master: u64, label: &StreamLabel) -> StreamRng {
    let seed = derive_seed(master, &[label.trial, label.client, label.role.tag()]);
    StreamRng::seed_from_u64(seed)
}
