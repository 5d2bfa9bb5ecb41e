//! A desk-scale laboratory for the profinite topology on the integers and
//! the lamplighter amalgams `L(A)`.
//!
//! * [`profinite`]: the metric `d(x, y) = ||x - y||`, balls as arithmetic
//!   progressions, exact covering checks.
//! * [`machines`]: one-tape Turing machines and step-bounded runs.
//! * [`halting_set`]: a decidable open set `B` (complement `A`) whose
//!   openness cannot be witnessed effectively.
//! * [`lamp_groups`]: lamplighter arithmetic and the word problem of `L(A)`.
//! * [`depth`]: modulus-level separation experiments.
//! * [`cli`]: the `profinite-lab` command line.

pub mod cli;
pub mod depth;
pub mod fixtures;
pub mod halting_set;
pub mod lamp_groups;
pub mod machines;
pub mod par;
pub mod primes;
pub mod profinite;

pub use halting_set::HaltingSet;
pub use machines::{MachineSpec, Registry, RunStatus};
pub use profinite::{Progression, ProfiniteNorm, Radius};
