//! Theorem-verification harness: the adversarial ε-family, power-law fits,
//! distortion scans and the metric inequality suite.

mod distortion;
mod epsilon;
mod holder;
mod theorems;

pub use distortion::{
    distortion_scan, DistortionReport, EpsilonPairs, MetricKind, PairRow, PairSampler, RandomPairs,
    ScanOptions, MIN_METRIC,
};
pub use epsilon::{make_epsilon_family, EpsilonFamily, DEFAULT_EPSILONS};
pub use holder::{fit_holder, HolderFit};
pub use theorems::{verify_theorems, Check, PairRecord, TheoremOptions, TheoremReport, Violation};
