//! Exact arithmetic for Misiurewicz polynomials of the cyclic-automorphism
//! rational map family in degree d: forward-orbit polynomials, the
//! sigma/tau decomposition, p-adic Newton polygons, finite-field factor
//! degree data, and machine-checkable irreducibility certificates.
//!
//! Everything is computed over Z with arbitrary precision; no floating
//! point appears anywhere in results or renderings.

pub mod arith;
pub mod modp;
pub mod orbit;
pub mod padic;
pub mod poly;
pub mod verify;

/// Library version, for reproduction manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use arith::{Prime, PrimeError};
pub use modp::{
    audit, certify, certify_polynomial, certify_with_table, AuditError, CertifyError,
    CertifyOptions, DegreeMultiset, FactorError, IrreducibilityAnalysis,
    IrreducibilityCertificate, ModPoly, Verdict,
};
pub use orbit::{OrbitError, OrbitTable};
pub use poly::{Degree, IntPoly, PolyDump, PolyError, SizeGuard};
pub use verify::{run_all, summarize, CheckReport, VerifyError, VerifyOptions, VerifySummary};
