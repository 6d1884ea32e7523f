//! Moments of the characteristic polynomial: exact kernel formulas, their
//! large-N prediction, Monte Carlo estimators and the loop equation.

mod barnes;
mod exact;
mod ward;

pub use barnes::barnes_g_log;
pub use exact::{
    heine_moment_general, joint_even_moment_exact, joint_even_moment_mc, log_mean_jackknife, log_product_sq, ww_convergence_report,
    ww_prediction, ww_prediction_log, MomentSpec, WwReport, WwRow,
};
pub use ward::{ward_estimate, ward_integrand, ward_log_weight, ward_residual, CompactBump, WardEstimate};
