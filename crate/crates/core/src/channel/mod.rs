//! Physical scene: array geometry, link gains, spatial correlation and
//! steering vectors.

mod correlation;
mod geometry;
mod layout;

pub use correlation::{scaled_eigenvalues, spatial_correlation, CorrelationMatrix, PSD_TOLERANCE};
pub use geometry::{steering_vector, ArrayGeometry, SteeringVector};
pub use layout::{layout_gains, path_gain, Layout, LayoutPreset, LinkGains};
