//! Cancellation of Coulomb-mediated phonon hopping between the radial local
//! modes of a trapped-ion chain.
//!
//! * [`constants`], [`chain`]: chain geometry and hopping rates `κ_{j,k}`.
//! * [`fock`], [`operator`]: truncated Fock space, ladder operators, hopping
//!   and trap-modulation Hamiltonians.
//! * [`schedule`], [`synth`], [`dwell`], [`feasibility`]: decoupling
//!   schedules built by recursive concatenation, checked by coupling signs.
//! * [`pulse`], [`quadrature`], [`roots`], [`trap`]: the trap-modulation π
//!   pulse and its electrode waveforms.
//! * [`expm`], [`integrator`], [`propagator`]: schedule execution.
//! * [`scenario`]: built-in experiments, sweeps and reports.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod constants;
pub mod dwell;
pub mod error;
pub mod expm;
pub mod feasibility;
pub mod fock;
pub mod integrator;
pub mod operator;
pub mod propagator;
pub mod pulse;
pub mod quadrature;
pub mod roots;
pub mod scenario;
pub mod schedule;
pub mod synth;
pub mod trap;

pub use num_complex::Complex64;

pub use chain::{CouplingMatrix, IonChainConfig, Truncation};
pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use fock::{FockSpace, PhononState};
pub use operator::{HoppingForm, LadderKind, SparseOperator};
pub use propagator::{PropagatorConfig, SimulationResult};
pub use pulse::{BFunctionParams, ShapedPulse};
pub use schedule::{PulseModel, PulseSchedule, ScheduleEvent};
pub use synth::DDSpec;
