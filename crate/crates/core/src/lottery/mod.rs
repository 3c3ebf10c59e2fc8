//! Lotteries over deterministic assignments: Birkhoff decomposition, hull membership and
//! seeded sampling.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certify::{lp_solve, Certificate, LinearSystem, Sense};
use crate::mechanisms::serial_dictatorship;
use crate::model::{Assignment, ObjectSet, Permutation, Profile};
use crate::{Error, Rational, Result};

/// A finite distribution over deterministic assignments (agent `i` gets object `perm(i)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lottery {
    pub support: Vec<(Rational, Permutation)>,
}

impl Lottery {
    pub fn n(&self) -> usize {
        self.support.first().map_or(0, |(_, p)| p.len())
    }

    /// `Σ weight · matrix(perm)`.
    pub fn expected(&self) -> Result<Assignment> {
        let n = self.n();
        let mut cells = vec![Rational::ZERO; n * n];
        for (w, p) in &self.support {
            for i in 0..n {
                cells[i * n + p.apply(i)] += w;
            }
        }
        Assignment::from_cells(n, cells)
    }

    /// Positive weights summing to one over permutations of a common size.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.support.is_empty() {
            return Err(Error::Invalid("empty lottery".into()));
        }
        if let Some((w, _)) = self.support.iter().find(|(w, p)| !w.is_positive() || p.len() != n) {
            return Err(Error::Invalid(format!(
                "support weight {w} is not positive or sizes differ"
            )));
        }
        let total: Rational = self.support.iter().map(|(w, _)| w).sum();
        if total != Rational::ONE {
            return Err(Error::Invalid(format!("weights sum to {total}")));
        }
        Ok(())
    }

    /// Lines `<p/q>: 1↦a 2↦b …`.
    pub fn display<'a>(&'a self, objects: &'a ObjectSet) -> impl fmt::Display + 'a {
        DisplayLottery { lottery: self, objects }
    }
}

struct DisplayLottery<'a> {
    lottery: &'a Lottery,
    objects: &'a ObjectSet,
}

impl fmt::Display for DisplayLottery<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, p) in &self.lottery.support {
            writeln!(f, "{w}: {}", perm_text(p, self.objects))?;
        }
        Ok(())
    }
}

/// `1↦a 2↦c 3↦b`.
pub fn perm_text(p: &Permutation, objects: &ObjectSet) -> String {
    (0..p.len())
        .map(|i| format!("{}↦{}", i + 1, objects.token(crate::model::ObjectId(p.apply(i)))))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Kuhn's augmenting paths over positive cells, agents in order and objects tried smallest first.
fn perfect_matching(n: usize, positive: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    fn augment(
        i: usize,
        n: usize,
        positive: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for a in 0..n {
            if positive(i, a) && !seen[a] {
                seen[a] = true;
                if owner[a].is_none_or(|j| augment(j, n, positive, seen, owner)) {
                    owner[a] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, n, &positive, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut map = vec![0; n];
    for (a, i) in owner.iter().enumerate() {
        map[i.expect("perfect")] = a;
    }
    Some(map)
}

/// Writes a doubly stochastic matrix as a lottery over permutation matrices by repeatedly
/// removing a perfect matching of the positive cells at its bottleneck weight.
pub fn birkhoff_decompose(p: &Assignment) -> Result<Lottery> {
    let n = p.n();
    let p = Assignment::from_cells(n, p.cells().to_vec()).map_err(|e| Error::NotDoublyStochastic(e.to_string()))?;
    let mut rest = p.cells().to_vec();
    let mut support = Vec::new();
    while rest.iter().any(Rational::is_positive) {
        let map = perfect_matching(n, |i, a| rest[i * n + a].is_positive())
            .expect("a nonzero scaled doubly stochastic matrix has a perfect matching on its support");
        let w = (0..n).map(|i| rest[i * n + map[i]].clone()).min().expect("n >= 1");
        for i in 0..n {
            rest[i * n + map[i]] -= &w;
        }
        support.push((w, Permutation::new(map)?));
    }
    let lottery = Lottery { support };
    assert!(
        lottery.support.len() <= (n - 1) * (n - 1) + 1,
        "support exceeds the Birkhoff bound"
    );
    debug_assert_eq!(lottery.expected().as_ref(), Ok(&p));
    Ok(lottery)
}

/// Exact LP deciding whether `p` is a convex combination of the given permutation matrices:
/// a feasible point gives the weights, a Farkas certificate proves non-membership.
pub fn hull_membership(p: &Assignment, vertices: &[Permutation]) -> Result<Certificate> {
    let n = p.n();
    if vertices.is_empty() {
        return Err(Error::Invalid("no vertices".into()));
    }
    if let Some(v) = vertices.iter().find(|v| v.len() != n) {
        return Err(Error::Invalid(format!("vertex {v} has size {} for n={n}", v.len())));
    }
    let mut sys = LinearSystem::new();
    for v in vertices {
        sys.add_var(format!("w{v}"));
    }
    sys.add_row(
        (0..vertices.len()).map(|k| (k, Rational::ONE)),
        Sense::Eq,
        Rational::ONE,
        "total",
    );
    for i in 0..n {
        for a in 0..n {
            let terms = vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| v.apply(i) == a)
                .map(|(k, _)| (k, Rational::ONE));
            sys.add_row(
                terms,
                Sense::Eq,
                p.get(i, a).clone(),
                format!("cell {} {}", i + 1, a + 1),
            );
        }
    }
    lp_solve(&sys)
}

/// Draws a permutation from `lottery` by comparing a seeded uniform `u/2^32` against
/// cumulative weights.
pub fn sample(lottery: &Lottery, seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = Rational::from_big(num_rational::BigRational::new(
        rng.next_u32().into(),
        num_bigint::BigInt::from(1u64 << 32),
    ));
    let mut cum = Rational::ZERO;
    for (w, p) in &lottery.support {
        cum += w;
        if u < cum {
            return p.clone();
        }
    }
    lottery.support.last().expect("non-empty lottery").1.clone()
}

/// Uniformly random agent order, for sampling random serial dictatorship where exact
/// enumeration of all orders is too large.
pub fn sample_serial_order(n: usize, seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    Permutation::new(order).expect("shuffled identity")
}

/// Empirical random serial dictatorship from `samples` seeded orders.
pub fn sampled_rsd(profile: &Profile, samples: usize, seed: u64) -> Result<Assignment> {
    if samples == 0 {
        return Err(Error::Invalid("at least one sample needed".into()));
    }
    let n = profile.n();
    let mut counts = vec![0i64; n * n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let order = sample_serial_order(n, rng.next_u64());
        let p = serial_dictatorship(profile, &order)?;
        for (c, v) in counts.iter_mut().zip(p.cells()) {
            if v.is_one() {
                *c += 1;
            }
        }
    }
    Assignment::from_cells(
        n,
        counts.into_iter().map(|c| Rational::new(c, samples as i64)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn permutation_matrix_is_a_point_mass() {
        let p = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        let l = birkhoff_decompose(&Assignment::from_permutation(&p)).unwrap();
        assert_eq!(l.support, vec![(Rational::ONE, p)]);
    }

    #[test]
    fn profile_c_matrix() {
        let a = Assignment::from_rows(vec![
            vec![q(1, 2), q(1, 2), q(0, 1)],
            vec![q(1, 2), q(1, 4), q(1, 4)],
            vec![q(0, 1), q(1, 4), q(3, 4)],
        ])
        .unwrap();
        let l = birkhoff_decompose(&a).unwrap();
        l.validate().unwrap();
        assert_eq!(l.expected().unwrap(), a);
    }

    #[test]
    fn hull_of_identity_excludes_uniform() {
        let c = hull_membership(&Assignment::uniform(3), &[Permutation::identity(3)]).unwrap();
        assert!(c.is_infeasible());
        let c = hull_membership(&Assignment::uniform(3), &Permutation::all(3)).unwrap();
        assert!(!c.is_infeasible());
    }

    #[test]
    fn sampling_is_seeded() {
        let l = birkhoff_decompose(&Assignment::uniform(3)).unwrap();
        assert_eq!(sample(&l, 7), sample(&l, 7));
        assert_eq!(sample_serial_order(5, 3), sample_serial_order(5, 3));
    }

    #[test]
    fn sampled_rsd_is_doubly_stochastic() {
        let p = Profile::from_rankings(&["abc", "abc", "bac"]).unwrap();
        sampled_rsd(&p, 100, 1).unwrap();
    }
}
