//! Certified decision procedures for the original, quasi-strong, and strong
//! Birkhoff-James orthogonality relations on Hilbert C*-modules over
//! finite-dimensional C*-algebras, together with the constructions that
//! separate the relations and seeded surveys over families of modules.

pub mod algebra;
pub mod constructions;
pub mod error;
pub mod interchange;
pub mod module;
pub mod nr;
pub mod orthogonality;
pub mod sampling;
pub mod survey;
pub mod tolerance;
pub mod verify;

pub use algebra::{
    c64, spectral_decomposition, AlgebraElement, BlockAlgebra, CMatrix, CVector, PureState,
    StateMixture,
};
pub use error::{Error, Result};
pub use module::{inner_product, right_action, ModuleElement, ModuleSpace};
pub use nr::{
    compress, contains_zero, kernel_vector_in_frame, support_function, top_eigenframe,
    Certainty, CertifiedBool, EigenFrame, ZeroMode, ZeroWitness,
};
pub use constructions::{
    alpha_beta_grid, make_prime_pair, make_quasi_pair, make_sqc_pair, quasi_pair_from,
    sqc_pair_from_element, verify_max_norm_formula, CaseLabel, PrimeCounterexample, Profile,
    QuasiPair, SqcCounterexample,
};
pub use orthogonality::{
    bj_minimization_report, bj_module_algebra_consistency, is_bj, is_bj_minimization,
    is_quasi_strong, is_strong, replay_witness, strong_definitional_probe, FailureCertificate,
    ProbeOutcome, Relation, StateWitness, Verdict,
};
pub use survey::{
    chain_family, run_equivalence_survey, run_implication_survey, sample_element,
    standard_family, ElementKind, EnsembleConfig, SurveyReport,
};
pub use tolerance::Tolerances;
pub use verify::{run_all, CriterionResult};
