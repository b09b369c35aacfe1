//! Synthetic-data generation, metrics, default parameters and recovery sweeps.

mod metrics;
mod params;
mod rng;
mod sweep;
mod synth;

pub use metrics::{core_tensor, estimate_rank, reconstruct, rel_error};
pub use params::default_params;
pub use rng::derive_seed;
pub use sweep::{
    parse_sweep_spec, run_sweep, write_records_csv, SweepRecord, SweepSpec, SUCCESS_THRESHOLD,
};
pub use synth::{
    corrupt, corrupt_within, gen_low_rank, sample_mask, CorruptionSpec, SynthSpec,
};
