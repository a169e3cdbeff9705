//! Verification, kernel spans, ovoid recovery and classification.

pub mod report;

pub use report::{Check, VerificationReport};
pub mod verify;

pub use verify::{h_o_steps, min_size_check, plane_disjointness_check, regular_sections_check, verify_hyperoval};
pub mod kernel;

pub use kernel::{
    kernel_span, recover_ovoid, recover_ovoid_auto, recover_ovoid_in, special_points, KernelSpan, RecoveryRoute, ScanLevel,
};
pub mod classify;

pub use classify::{
    classical_invariant, classify_classical, classify_sweep, orbit_count_trace_zero, ClassInvariant, ClassSweep,
    TraceZeroOrbits,
};
pub mod iso;

pub use iso::{are_isomorphic, image_of, Collineation, Stabilizer};
