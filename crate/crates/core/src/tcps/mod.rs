//! Coherent summation of Pauli means on a single memory qubit.

pub mod boundary;
pub mod budget;
pub mod elliptic;
pub mod estimate;
pub mod hadamard;
pub mod ladder;
pub mod memory;
pub mod readout;
pub mod rotation;
pub mod taylor;
