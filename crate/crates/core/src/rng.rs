//! Deterministic random substreams.
//!
//! Every Monte-Carlo trial draws from streams keyed by
//! `(master_seed, trial_index, stream)`, so results do not depend on the
//! order in which trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every path and noise draw in the crate.
pub type SimRng = ChaCha8Rng;

/// Which random stream of a trial is being drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Clean signal path (shared by the H1 observation and the H0 template).
    Signal = 1,
    /// Additive noise of the H0 observation.
    NoiseH0 = 2,
    /// Additive noise of the H1 observation.
    NoiseH1 = 3,
    /// Paths used for calibration fits.
    Calibration = 4,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of one substream from the experiment's master seed.
///
/// The counters are absorbed one at a time through the SplitMix64
/// finalizer, so neighbouring trial indices give unrelated seeds.
pub fn substream_seed(master_seed: u64, trial: u64, stream: Stream) -> u64 {
    let mut h = splitmix64(master_seed);
    h = splitmix64(h ^ trial.wrapping_mul(GOLDEN));
    splitmix64(h ^ (stream as u64))
}

/// Seeded generator for a single 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
