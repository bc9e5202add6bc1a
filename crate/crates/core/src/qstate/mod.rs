//! Dense state-vector simulation: single-qubit gates, parity gadgets,
//! destructive X measurements and exhaustive branch enumeration.

mod gate;
mod pauli;
mod schedule;
mod state;

pub use gate::{unitarity_deviation, Gate, Matrix2};
pub use pauli::{Pauli, PauliString};
pub use schedule::{
    run_schedule, run_schedule_with, BranchRecord, Condition, Instruction, Outcomes, RunMode,
    Schedule,
};
pub use state::{Basis, Click, ParityOutcome, StateVector};
