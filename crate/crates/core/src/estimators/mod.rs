//! Monte Carlo experiments: one-arm curves, threshold bisections, the
//! uniqueness count for `X^F`, and the surface constructions.

mod one_arm;
mod surfaces;
mod threshold;

pub use one_arm::{
    capped_radii, fit_one_arm_exponent, one_arm_curve, one_arm_probability, OneArmCurve, OneArmFit, OneArmPoint,
};
pub use surfaces::{
    flat_sheet, hyperplane_experiment, pi_infinity_experiment, pi_infinity_runs, sample_labeled, sep_surface,
    summarize, HyperplaneReport, PiInfinityReport, PiInfinitySummary, SepSurface,
};
pub use threshold::{
    count_spanning_x_components, crossing_probability, estimate_pc, estimate_pfin, pooled_multiple,
    uniqueness_experiment, xfin_spanning_probability, Bisection, BisectionStep, StopReason, ThresholdEstimate,
    UniquenessRow,
};
