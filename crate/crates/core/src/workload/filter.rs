use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{TraceRecord, WorkloadError};

/// Drop each record with probability `hit_rate`, standing in for requests
/// absorbed by an eDRAM write cache in front of the memory.
pub fn write_cache_filter(
    records: &[TraceRecord],
    hit_rate: f64,
    seed: u64,
) -> Result<Vec<TraceRecord>, WorkloadError> {
    if !(0.0..=1.0).contains(&hit_rate) {
        return Err(WorkloadError::InvalidSpec(format!(
            "hit_rate must be in [0, 1], got {hit_rate}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(records
        .iter()
        .filter(|_| !rng.gen_bool(hit_rate))
        .copied()
        .collect())
}
