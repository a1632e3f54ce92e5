//! Correlated fading simulation and empirical estimators.
//!
//! Each independent source is a sum of sinusoids (Clarke model) with its own
//! ChaCha stream keyed by `(seed, stream id, source)`. Spatial structure is
//! imposed afterwards by a factor of the correlation matrix.

mod estimate;
mod fading;
mod sim;
mod snr;

pub use estimate::{
    count_upcrossings, empirical_derivative_variance, empirical_lcr, empirical_mean_speed, empirical_moments,
    empirical_pdf, CentralDifference, EmpiricalLcr, EmpiricalPdf, RunningMoments, UpcrossingCounter,
    WindowDensity, BATCHES, CONFIDENCE, MIN_CROSSINGS,
};
pub use fading::{
    gen_correlated_fading, CorrelatedFading, FadingGenerator, FadingProcessConfig, FadingSeries, BLOCK_LEN,
    COLORING_FLOOR,
};
pub use sim::{simulate, simulate_branches, LinkSpec, SimPlan, SimResult, SimScene};
pub use snr::{ris_phase_cascade, ris_phase_matrix, snr_closed_form, snr_explicit, snr_series, SnrSeries};
