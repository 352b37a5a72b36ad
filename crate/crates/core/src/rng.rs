//! Seeded random streams.
//!
//! Every robot draws from its own ChaCha8 stream derived from the
//! performance seed, so a robot's behavior never depends on how many draws
//! another robot made.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SimRng = ChaCha8Rng;

/// Independent stream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The stream owned by robot `robot_id`.
pub fn robot_stream(seed: u64, robot_id: usize) -> SimRng {
    stream(seed, robot_id as u64 + 1)
}

/// Zero-mean normal sample with standard deviation `sigma`, resampled until
/// it lies within `bound` standard deviations. `sigma == 0` still consumes
/// one draw so streams stay aligned across configurations.
pub fn truncated_normal<R: Rng + ?Sized>(rng: &mut R, sigma: f64, bound: f64) -> f64 {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() <= bound {
            return z * sigma;
        }
    }
}
