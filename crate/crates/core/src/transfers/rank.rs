use std::fmt;

use super::function::TransferFunction;
use crate::model::{ObjectId, Permutation};
use crate::{Error, Rational, Result};

/// Largest `n` for which `v_from_g` enumerates all `n!` permutations.
pub const RANK_PERMUTATION_CAP: usize = 8;

/// A rank-pair transfer table `g(i, j)` for ranks `i, j` in `1..=n`.
#[derive(Clone, PartialEq, Eq)]
pub struct RankTransfer {
    n: usize,
    g: Vec<Rational>,
}

impl RankTransfer {
    /// `g(i, j) = f(i, j)` for 1-based ranks.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> RankTransfer {
        let mut g = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                g.push(f(i, j));
            }
        }
        RankTransfer { n, g }
    }

    /// `g(i, j) = v[i] − v[j]`.
    pub fn from_vector(v: &[Rational]) -> RankTransfer {
        RankTransfer::from_fn(v.len(), |i, j| &v[i - 1] - &v[j - 1])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.g[(i - 1) * self.n + (j - 1)]
    }
}

impl fmt::Debug for RankTransfer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            let row: Vec<String> = (1..=self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join("\t"))?;
        }
        Ok(())
    }
}

/// Result of reading `f` as a function of the rank pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankDerivation {
    Derived(RankTransfer),
    /// Two triples share a rank pair but carry different values.
    Conflict {
        ranks: (usize, usize),
        first: String,
        second: String,
    },
}

/// Recovers `g` with `f(≻, ≻′, a) = g(rank(≻, a), rank(≻′, a))`, or the first pair of
/// triples (canonical order) that share a rank pair with different values.
pub fn g_from_f(f: &TransferFunction) -> Result<RankDerivation> {
    f.require_valid()?;
    let n = f.n();
    let prefs = f.prefs();
    let mut g: Vec<Option<(Rational, String)>> = vec![None; n * n];
    for (p, x) in prefs.iter().enumerate() {
        for (q, y) in prefs.iter().enumerate() {
            for a in 0..n {
                let (i, j) = (x.rank_of(ObjectId(a)), y.rank_of(ObjectId(a)));
                let val = f.at(p, q, a);
                let slot = &mut g[(i - 1) * n + (j - 1)];
                match slot {
                    None => *slot = Some((val, f.triple(p, q, Some(a)))),
                    Some((first, first_at)) if *first != val => {
                        return Ok(RankDerivation::Conflict {
                            ranks: (i, j),
                            first: format!("{first_at} = {first}"),
                            second: format!("{} = {val}", f.triple(p, q, Some(a))),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let g = g.into_iter().map(|s| s.expect("every rank pair occurs").0).collect();
    Ok(RankDerivation::Derived(RankTransfer { n, g }))
}

/// Result of reading a rank table as `g(i, j) = v[i] − v[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VectorDerivation {
    /// `v[i] = g(i, n)`; not necessarily a valid linear vector.
    Vector(Vec<Rational>),
    DiagonalNonzero {
        rank: usize,
        value: Rational,
    },
    PermutationSum {
        perm: Permutation,
        sum: Rational,
    },
}

/// Checks `g(i, i) = 0` and `Σ_i g(i, π(i)) = 0` for every permutation `π` (`n <= 8`),
/// then returns `v[i] = g(i, n)`.
pub fn v_from_g(g: &RankTransfer) -> Result<VectorDerivation> {
    let n = g.n();
    if n > RANK_PERMUTATION_CAP {
        return Err(Error::CapExceeded(format!(
            "v_from_g enumerates n! permutations, cap n <= {RANK_PERMUTATION_CAP}, got {n}"
        )));
    }
    if let Some(i) = (1..=n).find(|&i| !g.get(i, i).is_zero()) {
        return Ok(VectorDerivation::DiagonalNonzero {
            rank: i,
            value: g.get(i, i).clone(),
        });
    }
    for perm in Permutation::all(n) {
        let sum: Rational = (0..n).map(|i| g.get(i + 1, perm.apply(i) + 1)).sum();
        if !sum.is_zero() {
            return Ok(VectorDerivation::PermutationSum { perm, sum });
        }
    }
    let v: Vec<Rational> = (1..=n).map(|i| g.get(i, n).clone()).collect();
    for m in 1..=n {
        for k in 1..=n {
            assert_eq!(
                *g.get(m, k),
                &v[m - 1] - &v[k - 1],
                "permutation sums vanish, so g(m,k) = g(m,n) - g(k,n)"
            );
        }
    }
    Ok(VectorDerivation::Vector(v))
}
