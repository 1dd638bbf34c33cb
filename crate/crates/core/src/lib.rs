//! A two-level system exchanging energy with a single-qubit bath under a
//! time-dependent exchange coupling, and a quantum Otto engine built on it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cycle;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod profile;
pub mod scan;
pub mod sweep;
pub mod thermo;
pub mod tolerances;

pub use cycle::{
    classify_regime, strong_cycle, strong_cycle_via_oracle, weak_cycle, CycleConfig, CycleParams,
    CycleReport, Regime, Stroke,
};
pub use error::{Error, Result};
pub use linalg::{DensityOperator, OperatorMatrix, C64};
pub use profile::{CouplingProfile, ProfileShape, TabulatedCoupling};
pub use sweep::{run_sweep, SweepAxis, SweepMethod, SweepSpec};
pub use tolerances::{Tolerances, TOL};
