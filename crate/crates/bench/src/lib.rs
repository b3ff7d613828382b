//! Shared inputs for the benchmarks.

use ostn_core::NetworkConfig;

/// Baseline scenario with K IoT pairs at the given SNR.
pub fn scenario(k: usize, snr_db: f64) -> NetworkConfig {
    NetworkConfig::baseline().with_k(k).with_snr_db(snr_db)
}
