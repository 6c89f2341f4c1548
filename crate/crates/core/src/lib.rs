//! Optimal parallel conjugation of unknown qudit unitaries.
//!
//! Given `k` parallel uses of an unknown `U ∈ SU(d)`, the circuit built here
//! implements `Ū` with average fidelity `(k+1)/(d(d-k))`, exactly when
//! `k = d-1`. The crate also checks optimality: it builds the performance
//! operator, a primal superchannel and a dual feasible point, and compares
//! their values.
//!
//! Modules:
//! - [`linalg`]: dense complex matrices on tensor products of qudits.
//! - [`symmetric`]: permutations, their tensor-factor action, antisymmetric subspaces.
//! - [`young`]: partitions, hook lengths, exact `c(λ)` and its maximum.
//! - [`schur_weyl`]: Young's orthogonal form and the matrix units `E^λ_ij`.
//! - [`haar`]: seeded Haar sampling.
//! - [`circuit`]: encoder, decoder, the composed circuit and the inversion demo.
//! - [`performance`]: `Ω`, primal value, dual operator and certificates.

pub mod circuit;
pub mod error;
pub mod haar;
pub mod linalg;
pub mod performance;
pub mod schur_weyl;
pub mod symmetric;
pub mod young;

pub use circuit::{
    apply_circuit, channel_fidelity, conjugation_fidelity, decoder, encoder,
    exact_conjugation_isometry, inversion_simulation, theory_fidelity, ChoiOperator,
    InversionReport, KrausSet,
};
pub use error::{Error, Result};
pub use haar::haar_unitary;
pub use linalg::{ComplexMatrix, SubsystemShape, C64};
pub use performance::{
    certify, dual_operator, performance_operator, primal_value, CertificateReport,
};
pub use symmetric::Permutation;
pub use young::Partition;
