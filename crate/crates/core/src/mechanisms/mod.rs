//! Random assignment mechanisms behind one evaluator interface.

mod linear;
mod ps;
mod serial;

use std::fmt;
use std::sync::Arc;

pub use linear::{linear_mechanism, LinearVector};
pub use ps::{probabilistic_serial, probabilistic_serial_trace, EatingTrace};
pub use serial::{random_serial_dictatorship, serial_dictatorship, DEFAULT_RSD_CAP};

use crate::model::{Assignment, Permutation, Profile};
use crate::transfers::{pairwise_exchange, TransferFunction};
use crate::Result;

/// A map from profiles to doubly stochastic assignments.
///
/// Implementations must be deterministic. Every evaluator returns an [`Assignment`], whose
/// constructor checks double stochasticity.
pub trait Mechanism: Send + Sync {
    fn name(&self) -> String;

    fn evaluate(&self, profile: &Profile) -> Result<Assignment>;

    /// Parameter record, e.g. the vector of a linear mechanism.
    fn metadata(&self) -> Option<String> {
        None
    }

    /// Whether outputs are of the form `1/n + Σ f(≻i, ≻j, ·)` for a known transfer function.
    fn is_pairwise_exchange(&self) -> bool {
        false
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Arc<M> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn evaluate(&self, profile: &Profile) -> Result<Assignment> {
        (**self).evaluate(profile)
    }
    fn metadata(&self) -> Option<String> {
        (**self).metadata()
    }
    fn is_pairwise_exchange(&self) -> bool {
        (**self).is_pairwise_exchange()
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn evaluate(&self, profile: &Profile) -> Result<Assignment> {
        (**self).evaluate(profile)
    }
    fn metadata(&self) -> Option<String> {
        (**self).metadata()
    }
    fn is_pairwise_exchange(&self) -> bool {
        (**self).is_pairwise_exchange()
    }
}

/// Every agent receives `1/n` of every object.
pub fn equal_division(profile: &Profile) -> Assignment {
    Assignment::uniform(profile.n())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EqualDivision;

impl Mechanism for EqualDivision {
    fn name(&self) -> String {
        "ed".into()
    }
    fn evaluate(&self, profile: &Profile) -> Result<Assignment> {
        Ok(equal_division(profile))
    }
    fn is_pairwise_exchange(&self) -> bool {
        true
    }
}

/// Serial dictatorship with a fixed agent order.
#[derive(Debug, Clone)]
pub struct SerialDictatorship {
    pub order: Permutation,
}

impl Mechanism for SerialDictatorship {
    fn name(&self) -> String {
        let order: Vec<String> = self.order.as_slice().iter().map(|i| (i + 1).to_string()).collect();
        format!("sd:{}", order.join(","))
    }
    fn evaluate(&self, profile: &Profile) -> Result<Assignment> {
        serial_dictatorship(profile, &self.order)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RandomSerialDictatorship {
    pub cap: usize,
}

impl Default for RandomSerialDictatorship {
    fn default() -> Self {
        RandomSerialDictatorship { cap: DEFAULT_RSD_CAP }
    }
}

impl Mechanism for RandomSerialDictatorship {
    fn name(&self) -> String {
        "rsd".into()
    }
    fn evaluate(&self, profile: &Profile) -> Result<Assignment> {
        serial::random_serial_dictatorship_capped(profile, self.cap)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ProbabilisticSerial;

impl Mechanism for ProbabilisticSerial {
    fn name(&self) -> String {
        "ps".into()
    }
    fn evaluate(&self, profile: &Profile) -> Result<Assignment> {
        Ok(probabilistic_serial(profile))
    }
}

/// Pairwise exchange mechanism for a caller-supplied transfer function.
#[derive(Debug, Clone)]
pub struct PairwiseExchange {
    pub f: Arc<TransferFunction>,
    pub label: String,
}

impl PairwiseExchange {
    pub fn new(f: TransferFunction) -> PairwiseExchange {
        PairwiseExchange {
            f: Arc::new(f),
            label: "pairwise".into(),
        }
    }
}

impl Mechanism for PairwiseExchange {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn evaluate(&self, profile: &Profile) -> Result<Assignment> {
        pairwise_exchange(profile, &self.f)
    }
    fn is_pairwise_exchange(&self) -> bool {
        true
    }
}

/// The linear mechanism `φ^v`.
#[derive(Debug, Clone)]
pub struct LinearMechanism {
    pub v: LinearVector,
}

impl LinearMechanism {
    pub fn new(v: LinearVector) -> LinearMechanism {
        LinearMechanism { v }
    }
}

impl Mechanism for LinearMechanism {
    fn name(&self) -> String {
        format!("linear:{}", self.v)
    }
    fn evaluate(&self, profile: &Profile) -> Result<Assignment> {
        linear_mechanism(profile, &self.v)
    }
    fn metadata(&self) -> Option<String> {
        Some(format!("v = {}", self.v))
    }
    fn is_pairwise_exchange(&self) -> bool {
        true
    }
}

/// Wraps a closure as a mechanism; handy for tests and ad-hoc experiments.
pub struct FnMechanism<F> {
    pub name: String,
    pub f: F,
}

impl<F> Mechanism for FnMechanism<F>
where
    F: Fn(&Profile) -> Result<Assignment> + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }
    fn evaluate(&self, profile: &Profile) -> Result<Assignment> {
        (self.f)(profile)
    }
}

impl fmt::Debug for dyn Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mechanism({})", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProfileSpace;

    #[test]
    fn equal_division_ignores_reports() {
        let s = ProfileSpace::new(3).unwrap();
        for p in s.iter() {
            assert_eq!(EqualDivision.evaluate(&p).unwrap(), Assignment::uniform(3));
        }
        let p = Profile::from_rankings(&["abcd", "dcba", "abdc", "bacd"]).unwrap();
        assert_eq!(equal_division(&p), Assignment::uniform(4));
    }
}
