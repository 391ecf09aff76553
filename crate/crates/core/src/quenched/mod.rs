//! Disordered model: quenched partition functions, Monte Carlo free energy,
//! annealed references, variance diagnostics and critical-point scans.

mod disorder;
mod estimate;
mod partition;
mod scan;
mod variance;

pub use disorder::{sample_disorder, DisorderSample};
pub use disorder::log_xi;
pub use estimate::{annealed_reference, free_energy_mc, AnnealedReference, FreeEnergyEstimate};
pub use partition::{log_partition, LogPartitionTable, QuenchedSolver};
pub use scan::{critical_scan, CriticalScan, ScanRow};
pub use variance::{
    flno_prediction, second_moment_window, variance_at_annealed_critical, FlnoPrediction,
    SecondMomentWindow, VarianceReport,
};

/// Largest system size accepted by the O(N^2) recursions.
pub const MAX_SIZE: usize = 1 << 16;
