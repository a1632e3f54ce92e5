//! Closed-form LCR evaluators.
//!
//! Every LCR returned here is normalised by the Doppler frequency of the
//! link it describes.

mod cf;
mod curve;
mod direct;
mod grouping;
mod ris;
mod speed;
mod theorem2;
mod theorem2_mp;

pub use cf::{lcr_direct_numeric_cf, lcr_numeric_cf_weighted, CfOptions};
pub use curve::{LcrCurve, LcrSource};
pub use direct::{lcr_direct_exact, lcr_direct_stable, ExactLcr};
pub use grouping::{group_eigenvalues, GroupedSpectrum, GroupingPolicy, TIE_NUDGE, TIE_TOLERANCE};
pub use ris::{lcr_ris, lcr_ris_exact_form, omega_sq, y_moments, RisLcrParams};
pub use theorem2::{Theorem2Eval, Theorem2Workspace, CANCELLATION_LIMIT, IMAG_TOLERANCE};
pub use speed::{
    mean_snr_speed_direct, mean_snr_speed_direct_asymptotic, mean_snr_speed_ris,
    mean_snr_speed_ris_asymptotic,
};
