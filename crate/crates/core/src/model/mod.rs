//! Objects, strict preferences, profiles, assignment matrices and the stochastic-dominance
//! order.
//!
//! Agents and objects are addressed by 0-based indices in the API. Text formats and
//! reports use the 1-based agent numbering of the usual tables.

mod assignment;
mod dominance;
mod io;
mod objects;
mod permutation;
mod preference;
mod profile;
mod space;

pub use assignment::Assignment;
pub use dominance::{first_sd_violation, sd_compare, sd_dominates, SdOutcome};
pub use io::{format_assignment, format_profile, parse_profile};
pub use objects::{ObjectId, ObjectSet};
pub use permutation::Permutation;
pub use preference::{factorial, Preference};
pub use profile::Profile;
pub use space::{enumerate_profiles, ProfileSpace, DEFAULT_PROFILE_CAP};
