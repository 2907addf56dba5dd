//! Finite universal algebra: signatures, terms, identities, homomorphisms,
//! H/S/P closure operators, equational proofs, relatively free algebras and
//! checkers for both directions of the HSP variety theorem.

pub mod birkhoff;
pub mod caps;
pub mod catalog;
pub mod closure;
pub mod entail;
pub mod eqlogic;
pub mod format;
pub mod free;
pub mod homs;
pub mod sigcore;
pub mod terms;

pub use birkhoff::{
    eqcl_to_var_check, square_certificates, var_to_eqcl_check, verify_invariance, BirkhoffError, Derivation,
    PipelineReport, Stage, StageStatus, Witness,
};
pub use caps::{Caps, CapsError};
pub use closure::{
    check_leq, hom_image, hsp_certificate_check, product, product_map, subalgebra_generate, CertError, CertFactor,
    ClosureError, HomImage, HspCertificate, HspReplay, Product, ProductCodec, Subalgebra,
};
pub use entail::{
    check_proof, search_proof, soundness_audit, AuditReport, Proof, ProofError, SearchLimits, SearchOutcome,
};
pub use eqlogic::{class_satisfies, mod_check, satisfies, theory_upto, CheckResult, SatError, SatResult, TheoryCaps};
pub use format::{AlgebraFile, FormatError, NamedAlgebra, SourceSpan};
pub use free::{build_free, nat_epi, universal_map, FreeAlgebra, FreeCaps, FreeError, UniversalMap};
pub use homs::{
    classify, compose, find_first_hom, find_homs, find_iso, hom_factor, kernel_pairs, CarrierMap, HomClassification,
    HomConstraints, HomError, HomViolation,
};
pub use sigcore::{Elem, FiniteAlgebra, OpSymbol, Signature, Violation};
pub use terms::{
    enumerate_terms, evaluate, free_lift, substitute, Environment, Equation, EvalError, Substitution, Term,
};
