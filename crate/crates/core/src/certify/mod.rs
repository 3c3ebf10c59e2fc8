//! Exact linear-programming certificates for axiom systems over finite profile sets.

mod encode;
mod fm;
mod presolve;
mod simplex;
mod system;
mod theorems;

pub use encode::{
    encode_axioms, encode_axioms_with_budget, var_name, AssignmentSystem, Axiom, DEFAULT_VARIABLE_BUDGET,
};
pub use fm::{fourier_motzkin, FmOutcome};
pub use simplex::{lp_solve, lp_solve_objectives, lp_solve_with, PivotRule, SolveOptions};
pub use system::{combine, verify, Certificate, Direction, LinearSystem, Objective, Row, Sense};
pub use theorems::{
    certificate_text, certify_strong_hardness, certify_theorem1, derive_profile_c, family_profile,
    family_zero_allocation_violations, impossibility_profiles, lift_by_label, FullConfirmation, Interval, OrbitMax,
    ProfileCReport, StrongHardnessReport, Theorem1Report,
};
