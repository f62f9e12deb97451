//! Random walks on full groups: exact convolution powers, sampled orbit
//! walks, and the entropy, displacement and return-probability reports.

mod measure;
mod reports;
mod sampling;

pub use measure::{
    convolution_powers, entropy, exact_convolution, mixture_entropy_check, ratio_to_f64, GroupDistribution, MixtureCheck,
    StepMeasure, DEFAULT_SUPPORT_CAP,
};
pub use reports::{
    an_depth, an_report, default_envelope_grid, entropy_envelope, folner_bound, folner_exponent,
    return_probability_suite, single_cylinder_check, AnReport, AnSource, CylinderRow, EntropyEnvelope,
    EnvelopeRow, ReturnRow, SingleCylinderReport,
};
pub use sampling::{
    default_tail_grid, max_displacement_tail, sample_group_walks, sample_orbit_walks, sample_step_indices,
    shannon_diagnostic, trial_rng, TailFit, TailReport, TailRow, WalkSample, MIN_EXCEEDANCES,
};
