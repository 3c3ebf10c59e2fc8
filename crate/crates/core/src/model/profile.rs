use std::fmt;
use std::sync::Arc;

use super::{factorial, ObjectId, ObjectSet, Permutation, Preference};
use crate::{Error, Result};

/// One strict preference per agent over a shared object set, `n >= 3`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    objects: Arc<ObjectSet>,
    prefs: Vec<Preference>,
}

impl Profile {
    pub fn new(objects: Arc<ObjectSet>, prefs: Vec<Preference>) -> Result<Profile> {
        let n = objects.len();
        if n < 3 {
            return Err(Error::Invalid(format!("n = {n} < 3")));
        }
        if prefs.len() != n {
            return Err(Error::Invalid(format!("{} agents for {n} objects", prefs.len())));
        }
        if let Some(i) = prefs.iter().position(|p| p.len() != n) {
            return Err(Error::Invalid(format!(
                "agent {} ranks {} objects, expected {n}",
                i + 1,
                prefs[i].len()
            )));
        }
        Ok(Profile { objects, prefs })
    }

    /// Profile over the standard object set `a, b, c, ...`.
    pub fn standard(prefs: Vec<Preference>) -> Result<Profile> {
        Profile::new(ObjectSet::standard(prefs.len()), prefs)
    }

    /// Convenience constructor from compact rankings over the standard objects, e.g.
    /// `["abc", "bac", "cab"]`.
    pub fn from_rankings(rankings: &[&str]) -> Result<Profile> {
        let objects = ObjectSet::standard(rankings.len());
        let prefs = rankings
            .iter()
            .map(|r| Preference::parse(&objects, r))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(objects, prefs)
    }

    pub fn n(&self) -> usize {
        self.prefs.len()
    }

    pub fn objects(&self) -> &Arc<ObjectSet> {
        &self.objects
    }

    pub fn prefs(&self) -> &[Preference] {
        &self.prefs
    }

    /// Preference of agent `i` (0-based).
    pub fn pref(&self, i: usize) -> &Preference {
        &self.prefs[i]
    }

    /// Copy with agent `i` reporting `pref` instead.
    pub fn with_pref(&self, i: usize, pref: Preference) -> Profile {
        let mut prefs = self.prefs.clone();
        prefs[i] = pref;
        Profile {
            objects: self.objects.clone(),
            prefs,
        }
    }

    /// Position of this profile in the lexicographic enumeration of all profiles, agent 1
    /// being the most significant digit.
    pub fn index(&self) -> usize {
        let base = factorial(self.n());
        self.prefs.iter().fold(0, |acc, p| acc * base + p.index())
    }

    /// Tops are pairwise distinct.
    pub fn is_contention_free(&self) -> bool {
        let mut seen = vec![false; self.n()];
        self.prefs
            .iter()
            .all(|p| !std::mem::replace(&mut seen[p.top().0], true))
    }

    /// Relabels every object in every preference by `pi`.
    pub fn permute_objects(&self, pi: &Permutation) -> Result<Profile> {
        if pi.len() != self.n() {
            return Err(Error::Invalid(format!(
                "object permutation of size {} for n={}",
                pi.len(),
                self.n()
            )));
        }
        Ok(Profile {
            objects: self.objects.clone(),
            prefs: self.prefs.iter().map(|p| p.relabel(pi)).collect(),
        })
    }

    /// Agent `i` of the result reports what agent `pi(i)` reported here.
    pub fn permute_agents(&self, pi: &Permutation) -> Result<Profile> {
        if pi.len() != self.n() {
            return Err(Error::Invalid(format!(
                "agent permutation of size {} for n={}",
                pi.len(),
                self.n()
            )));
        }
        Ok(Profile {
            objects: self.objects.clone(),
            prefs: (0..self.n()).map(|i| self.prefs[pi.apply(i)].clone()).collect(),
        })
    }

    /// Re-expresses the profile over another canonical order of the same tokens.
    pub fn reindex(&self, objects: &Arc<ObjectSet>) -> Result<Profile> {
        if Arc::ptr_eq(&self.objects, objects) || *self.objects == **objects {
            return Ok(self.clone());
        }
        if !self.objects.same_tokens(objects) {
            return Err(Error::Invalid(format!(
                "object sets differ: {:?} vs {:?}",
                self.objects.tokens(),
                objects.tokens()
            )));
        }
        let map: Vec<ObjectId> = self
            .objects
            .tokens()
            .iter()
            .map(|t| objects.get(t).expect("same tokens"))
            .collect();
        let prefs = self
            .prefs
            .iter()
            .map(|p| Preference::new(p.order().iter().map(|a| map[a.0]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(objects.clone(), prefs)
    }

    /// Compact one-line rendering, e.g. `abc|bac|cab`.
    pub fn code(&self) -> String {
        let sep = if self.objects.tokens().iter().all(|t| t.chars().count() == 1) {
            ""
        } else {
            ","
        };
        self.prefs
            .iter()
            .map(|p| p.display_with(&self.objects, sep).to_string())
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format_profile(self))
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({})", self.code())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn object_swap_maps_e_to_relabelled_profile() {
        let e = Profile::from_rankings(&["abc", "acb", "acb"]).unwrap();
        let swap_ac = Permutation::transposition(3, 0, 2);
        let image = e.permute_objects(&swap_ac).unwrap();
        assert_eq!(image, Profile::from_rankings(&["cba", "cab", "cab"]).unwrap());
        assert_eq!(image.permute_objects(&swap_ac.inverse()).unwrap(), e);
    }

    #[test]
    fn contention_free() {
        assert!(Profile::from_rankings(&["abc", "bac", "cab"])
            .unwrap()
            .is_contention_free());
        assert!(!Profile::from_rankings(&["abc", "acb", "acb"])
            .unwrap()
            .is_contention_free());
    }

    #[test]
    fn agent_permutation_inverts() {
        let p = Profile::from_rankings(&["abc", "bca", "cab"]).unwrap();
        for pi in Permutation::all(3) {
            let moved = p.permute_agents(&pi).unwrap();
            assert_eq!(moved.permute_agents(&pi.inverse()).unwrap(), p);
        }
    }

    #[test]
    fn rejects_small_n() {
        assert!(Profile::from_rankings(&["ab", "ba"]).is_err());
    }
}
