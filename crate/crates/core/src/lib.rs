//! Measurement-based entanglement generation with spin qubits carried by
//! noninteracting electrons.
//!
//! * [`qstate`]: dense state vectors, parity gadgets, branch enumeration.
//! * [`cluster`]: linear cluster states from chained parity gadgets, Pauli
//!   feedforward tables and stabilizer checks.
//! * [`analyzer`]: Bell, three-qubit and four-qubit entangled-basis analyzers.
//! * [`fermion`]: two-electron Fock-space model of the beam-splitter encoder.
//! * [`cli`]: the `fermicluster` command-line front end.

pub mod analyzer;
pub mod cli;
pub mod cluster;
pub mod config;
pub mod error;
pub mod fermion;
pub mod par;
pub mod qstate;
pub mod report;
pub mod selfcheck;

pub use error::{Error, Result};
pub use par::Exec;
