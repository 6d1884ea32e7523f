//! Mesoscopic smoothing of the field and multiplicative chaos.

mod measure;
mod mollifier;
mod smoothing;

pub use measure::{gmc_measure, smoothed_max_scan, GmcMeasure, MaxScanReport, Normalizer, SUBCRITICAL_LIMIT};
pub use mollifier::{bump, RadialMollifier};
pub use smoothing::{
    conv_eq, covariance_prediction, g_field_at, g_field_disk, g_field_nodes, g_field_points, psi_eps, smoothed_field_at,
    smoothed_field_points, LocalIndex,
};
