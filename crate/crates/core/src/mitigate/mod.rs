//! Error mitigation: ALAP scheduling with CPMG dynamical decoupling,
//! CX-folding zero-noise extrapolation and readout-error correction.

mod readout;
mod schedule;
mod zne;

pub use readout::{
    apply_confusion, clip_quasi, counts_distribution, quasi_expectation, rem_correct, ConfusionModel,
    QuasiDistribution, FULL_INVERSE_LIMIT, MAX_SUBSPACE,
};
pub use schedule::{insert_dd, materialize_idles, schedule_alap, IdleWindow, ScheduledCircuit, ScheduledGate};
pub use zne::{fold, partial_folds, zne, zne_expectation, zne_with, Extrapolation, ZneReport, SCALES_3, SCALES_5};
