//! Dense statevector simulation of coherent Pauli summation against
//! per-term sampling.
//!
//! The crate is layered bottom-up:
//!
//! * [`statevector`]: registers, gates, controlled sequences and measurement.
//! * [`pauli`]: bit-mask Pauli strings, observables and exact expectation values.
//! * [`qee`]: the per-term sampling baseline.
//! * [`tcps`]: the phase kick-back pipeline that accumulates every term on one memory qubit.
//! * [`ledger`]: resource counters shared by both estimators.

pub mod error;
pub mod ledger;
pub mod pauli;
pub mod qee;
pub mod rng;
pub mod statevector;
pub mod tcps;

pub use error::{Error, Result};

// Book chapters, compiled as doctests so their snippets stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub mod overview {}
    #[doc = include_str!("../../../book/src/statevector.md")]
    pub mod statevector {}
    #[doc = include_str!("../../../book/src/observables.md")]
    pub mod observables {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    pub mod sampling {}
    #[doc = include_str!("../../../book/src/phase-encoding.md")]
    pub mod phase_encoding {}
    #[doc = include_str!("../../../book/src/readout.md")]
    pub mod readout {}
    #[doc = include_str!("../../../book/src/ladder.md")]
    pub mod ladder {}
    #[doc = include_str!("../../../book/src/budget.md")]
    pub mod budget {}
}
