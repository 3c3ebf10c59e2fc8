use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use super::system::{LinearSystem, Sense};
use crate::model::{Assignment, ObjectId, Permutation, Profile};
use crate::{Error, Rational, Result};

/// Axiom families that can be linearized over a finite set of profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// Truthful report SD-dominates every single-agent misreport between registered profiles.
    Sp,
    /// Own share SD-dominates every other agent's share, per profile.
    Ef,
    /// Agents with identical reports get identical rows.
    Ete,
    /// Every agent gets its top object fully at contention-free profiles.
    Cfe,
    /// Relabelling objects relabels columns; closes the profile set under object permutations.
    Neutral,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [Axiom::Sp, Axiom::Ef, Axiom::Ete, Axiom::Cfe, Axiom::Neutral];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Sp => "SP",
            Axiom::Ef => "EF",
            Axiom::Ete => "ETE",
            Axiom::Cfe => "CFE",
            Axiom::Neutral => "NEUTRAL",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Axiom> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown axiom {s:?} (expected SP, EF, ETE, CFE or NEUTRAL)")))
    }
}

/// Default cap on the number of assignment variables after closure.
pub const DEFAULT_VARIABLE_BUDGET: usize = 100_000;

/// Linear system over the variables `P^≻[i][a]` of a set of registered profiles.
#[derive(Debug, Clone)]
pub struct AssignmentSystem {
    pub system: LinearSystem,
    /// Registered profiles in canonical index order.
    pub profiles: Vec<Profile>,
    pub axioms: Vec<Axiom>,
    /// Number of distinct profiles requested before closure.
    pub requested: usize,
    n: usize,
    slot_of: HashMap<usize, usize>,
}

impl AssignmentSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of registered profiles after closure.
    pub fn closure_size(&self) -> usize {
        self.profiles.len()
    }

    pub fn slot(&self, profile: &Profile) -> Option<usize> {
        self.slot_of.get(&profile.index()).copied()
    }

    pub fn var_at(&self, slot: usize, i: usize, a: usize) -> usize {
        (slot * self.n + i) * self.n + a
    }

    /// Variable of `P^profile[i][a]` (0-based), if the profile is registered.
    pub fn var(&self, profile: &Profile, i: usize, a: usize) -> Option<usize> {
        self.slot(profile).map(|s| self.var_at(s, i, a))
    }

    /// The assignment a point of the system gives at a registered profile.
    pub fn assignment_at(&self, point: &[Rational], profile: &Profile) -> Result<Assignment> {
        let s = self
            .slot(profile)
            .ok_or_else(|| Error::Invalid(format!("profile {} is not registered", profile.code())))?;
        let cells = (0..self.n * self.n)
            .map(|k| point[s * self.n * self.n + k].clone())
            .collect();
        Assignment::from_cells(self.n, cells)
    }
}

/// Variable name of `P^profile[i][a]` with 1-based agent.
pub fn var_name(profile: &Profile, i: usize, a: usize) -> String {
    format!(
        "P[{}][{}][{}]",
        profile.code(),
        i + 1,
        profile.objects().token(ObjectId(a))
    )
}

/// Encodes the chosen axioms over `profiles`, closing the set under object permutations when
/// NEUTRAL is requested. SP rows link registered profiles that differ in one agent's report.
pub fn encode_axioms(profiles: &[Profile], axioms: &[Axiom]) -> Result<AssignmentSystem> {
    encode_axioms_with_budget(profiles, axioms, DEFAULT_VARIABLE_BUDGET)
}

pub fn encode_axioms_with_budget(profiles: &[Profile], axioms: &[Axiom], budget: usize) -> Result<AssignmentSystem> {
    let first = profiles
        .first()
        .ok_or_else(|| Error::Invalid("no profiles to encode".into()))?;
    let n = first.n();
    let objects = first.objects().clone();
    if let Some(p) = profiles.iter().find(|p| !p.objects().same_tokens(&objects)) {
        return Err(Error::Invalid(format!(
            "profile {} uses a different object set",
            p.code()
        )));
    }
    let has = |a: Axiom| axioms.contains(&a);

    let mut set: BTreeMap<usize, Profile> = profiles.iter().map(|p| (p.index(), p.clone())).collect();
    let requested = set.len();
    let perms = Permutation::all(n);
    if has(Axiom::Neutral) {
        let base: Vec<Profile> = set.values().cloned().collect();
        for p in &base {
            for pi in &perms {
                let img = p.permute_objects(pi)?;
                set.entry(img.index()).or_insert(img);
                if set.len() * n * n > budget {
                    return Err(Error::Budget {
                        needed: base.len() * perms.len() * n * n,
                        budget,
                    });
                }
            }
        }
    }
    let needed = set.len() * n * n;
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }

    let profiles: Vec<Profile> = set.into_values().collect();
    let slot_of: HashMap<usize, usize> = profiles.iter().enumerate().map(|(s, p)| (p.index(), s)).collect();
    let mut sys = LinearSystem::new();
    for p in &profiles {
        for i in 0..n {
            for a in 0..n {
                sys.add_var(var_name(p, i, a));
            }
        }
    }
    let var = |s: usize, i: usize, a: usize| (s * n + i) * n + a;
    let one = Rational::ONE;
    let tok = |a: ObjectId| objects.token(a).to_string();

    for (s, p) in profiles.iter().enumerate() {
        let code = p.code();
        for i in 0..n {
            sys.add_row(
                (0..n).map(|a| (var(s, i, a), one.clone())),
                Sense::Eq,
                one.clone(),
                format!("row {code} i={}", i + 1),
            );
        }
        for a in 0..n {
            sys.add_row(
                (0..n).map(|i| (var(s, i, a), one.clone())),
                Sense::Eq,
                one.clone(),
                format!("col {code} {}", tok(ObjectId(a))),
            );
        }
        for i in 0..n {
            for a in 0..n {
                sys.add_row(
                    [(var(s, i, a), one.clone())],
                    Sense::Le,
                    one.clone(),
                    format!("ub {code} i={} {}", i + 1, tok(ObjectId(a))),
                );
            }
        }
    }

    if has(Axiom::Sp) {
        for (s, p) in profiles.iter().enumerate() {
            for i in 0..n {
                let truth = p.pref(i);
                for s2 in 0..profiles.len() {
                    if s2 == s {
                        continue;
                    }
                    let other = &profiles[s2];
                    let differs: Vec<usize> = (0..n).filter(|&k| other.pref(k) != p.pref(k)).collect();
                    if differs != [i] {
                        continue;
                    }
                    for t in 1..n {
                        let mut terms = Vec::new();
                        for k in 1..=t {
                            let a = truth.sigma(k).0;
                            terms.push((var(s, i, a), one.clone()));
                            terms.push((var(s2, i, a), -one.clone()));
                        }
                        sys.add_row(
                            terms,
                            Sense::Ge,
                            Rational::ZERO,
                            format!("sp {} i={} lie={} t={t}", p.code(), i + 1, other.code()),
                        );
                    }
                }
            }
        }
    }

    if has(Axiom::Ef) {
        for (s, p) in profiles.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    for t in 1..n {
                        let terms = (1..=t).flat_map(|k| {
                            let a = p.pref(i).sigma(k).0;
                            [(var(s, i, a), one.clone()), (var(s, j, a), -one.clone())]
                        });
                        sys.add_row(
                            terms,
                            Sense::Ge,
                            Rational::ZERO,
                            format!("ef {} i={} j={} t={t}", p.code(), i + 1, j + 1),
                        );
                    }
                }
            }
        }
    }

    if has(Axiom::Ete) {
        for (s, p) in profiles.iter().enumerate() {
            for i in 0..n {
                for j in i + 1..n {
                    if p.pref(i) == p.pref(j) {
                        for a in 0..n {
                            sys.add_row(
                                [(var(s, i, a), one.clone()), (var(s, j, a), -one.clone())],
                                Sense::Eq,
                                Rational::ZERO,
                                format!("ete {} i={} j={} {}", p.code(), i + 1, j + 1, tok(ObjectId(a))),
                            );
                        }
                    }
                }
            }
        }
    }

    if has(Axiom::Cfe) {
        for (s, p) in profiles.iter().enumerate() {
            if p.is_contention_free() {
                for i in 0..n {
                    let top = p.pref(i).top();
                    sys.add_row(
                        [(var(s, i, top.0), one.clone())],
                        Sense::Eq,
                        one.clone(),
                        format!("cfe {} i={}", p.code(), i + 1),
                    );
                }
            }
        }
    }

    if has(Axiom::Neutral) {
        // link every profile to the smallest member of its orbit
        for (s, p) in profiles.iter().enumerate() {
            let (rep_idx, pi) = perms
                .iter()
                .map(|pi| {
                    let img = p.permute_objects(&pi.inverse()).expect("same size");
                    (img.index(), pi.clone())
                })
                .min_by_key(|(idx, _)| *idx)
                .expect("non-empty group");
            if rep_idx == p.index() {
                continue;
            }
            // p = pi(rep): P^p[i][pi(a)] = P^rep[i][a]
            let r = slot_of[&rep_idx];
            for i in 0..n {
                for a in 0..n {
                    sys.add_row(
                        [(var(s, i, pi.apply(a)), one.clone()), (var(r, i, a), -one.clone())],
                        Sense::Eq,
                        Rational::ZERO,
                        format!("neutral {} i={} {}", p.code(), i + 1, tok(ObjectId(pi.apply(a)))),
                    );
                }
            }
        }
    }

    Ok(AssignmentSystem {
        system: sys,
        profiles,
        axioms: axioms.to_vec(),
        requested,
        n,
        slot_of,
    })
}

#[cfg(test)]
mod tests {
    use super::super::lp_solve;
    use super::super::system::Direction;
    use super::*;
    use crate::model::ProfileSpace;

    #[test]
    fn profile_a_with_ef_and_cfe_is_pinned_to_identity() {
        let a = Profile::from_rankings(&["abc", "bac", "cab"]).unwrap();
        let enc = encode_axioms(std::slice::from_ref(&a), &[Axiom::Ef, Axiom::Cfe]).unwrap();
        let point = lp_solve(&enc.system).unwrap().point().unwrap().to_vec();
        let p = enc.assignment_at(&point, &a).unwrap();
        assert_eq!(p, Assignment::from_permutation(&Permutation::identity(3)));
        // every cell is fixed: min and max coincide
        for v in 0..9 {
            let mut lo = enc.system.clone();
            lo.set_objective(Direction::Minimize, [(v, Rational::ONE)]);
            let mut hi = enc.system.clone();
            hi.set_objective(Direction::Maximize, [(v, Rational::ONE)]);
            assert_eq!(lp_solve(&lo).unwrap().value(), lp_solve(&hi).unwrap().value());
        }
    }

    #[test]
    fn no_axioms_is_stochasticity_only() {
        let all: Vec<Profile> = ProfileSpace::new(3).unwrap().iter().collect();
        let enc = encode_axioms(&all, &[]).unwrap();
        assert_eq!(enc.system.num_vars(), 216 * 9);
        assert_eq!(enc.system.rows.len(), 216 * (3 + 3 + 9));
        let third = Rational::new(1, 3);
        assert!(enc.system.rows.iter().all(|r| r.holds(&vec![third.clone(); 216 * 9])));
    }

    #[test]
    fn neutral_closure_and_budget() {
        let a = Profile::from_rankings(&["abc", "bac", "cab"]).unwrap();
        let enc = encode_axioms(std::slice::from_ref(&a), &[Axiom::Neutral]).unwrap();
        assert_eq!(enc.requested, 1);
        assert_eq!(enc.closure_size(), 6);
        match encode_axioms_with_budget(&[a], &[Axiom::Neutral], 20) {
            Err(Error::Budget { needed, budget }) => assert_eq!((needed, budget), (54, 20)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn axiom_parse() {
        assert_eq!("sp".parse::<Axiom>().unwrap(), Axiom::Sp);
        assert!("xx".parse::<Axiom>().is_err());
    }
}
