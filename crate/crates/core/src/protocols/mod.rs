//! Measurement schemes and variants built on the characteristic-function
//! relation: an ancilla-qubit readout of ⟨e^{iλp p̂}⟩, Weyl pairs in finite
//! dimension, and the scalar relation for a volume/connection pair.

pub mod lqc;
pub mod qubit;
pub mod weyl;

pub use lqc::{lqc_bound_check, LqcReport, LqcScenario};
pub use qubit::{qubit_exact, qubit_sampled, QubitReadout, QubitRecord, SampledReadout};
pub use weyl::{finite_dim_chur, finite_dim_scan, random_unit_vector, FiniteDimCheck, FiniteDimRecord, WeylPair};
