//! Coherence of qubit channels measured on their normalized Choi states, and
//! uncertainty relations bounding the coherence in two measurement bases.
//!
//! ```
//! use qchan_core::{check_relation, pauli_x, CoherenceMeasure, QubitBasis};
//!
//! let report = check_relation(
//!     &pauli_x(),
//!     &QubitBasis::computational(),
//!     &QubitBasis::plus_minus(),
//!     CoherenceMeasure::L1Norm,
//!     None,
//! )
//! .unwrap();
//! assert!((report.sum_coherence - 4.0).abs() < 1e-9);
//! assert!(report.saturated);
//! ```

pub mod bases;
pub mod bounds;
pub mod channels;
pub mod coherence;
pub mod error;
pub mod input;
pub mod numerics;
pub mod sweep;
pub mod verify;

#[cfg(test)]
mod properties;

pub use bases::{overlap, BasisOverlap, BlochAngles, QubitBasis};
pub use bounds::{
    analytic_g_minimum, check_relation, l1_unitary_bound, lemma1_check, lemma2_check,
    minimize_g_bruteforce, rel_entropy_bound, saturation_condition, SaturationCheck,
    UncertaintyReport, SATURATION_CONDITION_TOL, SATURATION_TOL,
};
pub use channels::{
    bit_flip, choi, identity, pauli_x, phase_damping, rotation, unitary, validate_cptp, ChoiState,
    KrausChannel, Preset,
};
pub use coherence::{
    coherence, l1_coherence, rel_entropy_coherence, unitary_l1_closed_form, CoherenceMeasure,
    CoherenceValue,
};
pub use error::{Error, Result};
pub use input::{parse_basis, parse_channel, parse_number};
pub use numerics::{
    binary_entropy, hermitian_eigenvalues, von_neumann_entropy, ComplexMatrix, Ket, DERIVED_TOL,
    STRUCTURAL_TOL,
};
pub use sweep::{to_csv, SweepRow, SweepSpec};
pub use verify::{run_falsification, FalsificationConfig, Target, VerificationReport};
