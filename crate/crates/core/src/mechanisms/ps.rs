use crate::model::{Assignment, Profile};
use crate::Rational;

/// Breakpoints of a simultaneous-eating run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EatingTrace {
    /// Times at which at least one object is exhausted, ending with 1.
    pub breakpoints: Vec<Rational>,
    pub assignment: Assignment,
}

/// Probabilistic serial: all agents eat their best remaining object at unit speed.
pub fn probabilistic_serial(profile: &Profile) -> Assignment {
    probabilistic_serial_trace(profile).assignment
}

/// Event-driven eating. Objects exhausted at the same instant are retired in one batch.
pub fn probabilistic_serial_trace(profile: &Profile) -> EatingTrace {
    let n = profile.n();
    let mut remaining = vec![Rational::ONE; n];
    let mut cells = vec![Rational::ZERO; n * n];
    let mut t = Rational::ZERO;
    let mut breakpoints = Vec::new();

    while t < Rational::ONE {
        let targets: Vec<usize> = (0..n)
            .map(|i| {
                profile
                    .pref(i)
                    .order()
                    .iter()
                    .find(|a| remaining[a.0].is_positive())
                    .expect("supply remains while time remains")
                    .0
            })
            .collect();
        let mut eaters = vec![0i64; n];
        for &a in &targets {
            eaters[a] += 1;
        }
        let dt = (0..n)
            .filter(|&a| eaters[a] > 0)
            .map(|a| &remaining[a] / Rational::from_integer(eaters[a]))
            .min()
            .expect("someone eats")
            .min(Rational::ONE - &t);
        for (i, &a) in targets.iter().enumerate() {
            cells[i * n + a] += &dt;
        }
        for a in 0..n {
            if eaters[a] > 0 {
                remaining[a] -= &dt * Rational::from_integer(eaters[a]);
            }
        }
        t += &dt;
        breakpoints.push(t.clone());
    }
    EatingTrace {
        breakpoints,
        assignment: Assignment::from_cells(n, cells).expect("eating yields a doubly stochastic matrix"),
    }
}
