use std::sync::Arc;

use super::{factorial, ObjectSet, Preference, Profile};
use crate::{Error, Result};

/// Largest `n` for which full profile enumeration is allowed by default.
pub const DEFAULT_PROFILE_CAP: usize = 4;

/// The set `R^n` of all profiles over a fixed object set, indexed lexicographically.
///
/// Profile index `k` has base-`n!` digits `(d_1, ..., d_n)`, agent 1 most significant, where
/// `d_i` is the index of agent `i`'s preference in [`Preference::all`].
#[derive(Clone, Debug)]
pub struct ProfileSpace {
    n: usize,
    objects: Arc<ObjectSet>,
    prefs: Vec<Preference>,
    // weights[i] = (n!)^(n-1-i)
    weights: Vec<usize>,
    count: usize,
}

impl ProfileSpace {
    pub fn new(n: usize) -> Result<ProfileSpace> {
        ProfileSpace::with_cap(n, DEFAULT_PROFILE_CAP)
    }

    pub fn with_cap(n: usize, cap: usize) -> Result<ProfileSpace> {
        ProfileSpace::over(ObjectSet::standard(n), cap)
    }

    pub fn over(objects: Arc<ObjectSet>, cap: usize) -> Result<ProfileSpace> {
        let n = objects.len();
        if n < 3 {
            return Err(Error::Invalid(format!("n = {n} < 3")));
        }
        if n > cap {
            return Err(Error::CapExceeded(format!(
                "exhaustive enumeration of ({n}!)^{n} profiles exceeds the cap n <= {cap}; use sampling instead"
            )));
        }
        let base = factorial(n);
        let mut weights = vec![1usize; n];
        for i in (0..n - 1).rev() {
            weights[i] = weights[i + 1] * base;
        }
        Ok(ProfileSpace {
            n,
            objects,
            prefs: Preference::all(n),
            count: weights[0] * base,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn objects(&self) -> &Arc<ObjectSet> {
        &self.objects
    }

    /// All `n!` preferences in canonical order.
    pub fn prefs(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn pref_count(&self) -> usize {
        self.prefs.len()
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Preference index of agent `i` in profile `index`.
    pub fn digit(&self, index: usize, i: usize) -> usize {
        (index / self.weights[i]) % self.prefs.len()
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.n).map(|i| self.digit(index, i)).collect()
    }

    pub fn index_of_digits(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.weights).map(|(d, w)| d * w).sum()
    }

    /// Index of the profile obtained from `index` by agent `i` reporting preference `pref`.
    pub fn with_digit(&self, index: usize, i: usize, pref: usize) -> usize {
        index - self.digit(index, i) * self.weights[i] + pref * self.weights[i]
    }

    pub fn profile(&self, index: usize) -> Profile {
        let prefs = (0..self.n).map(|i| self.prefs[self.digit(index, i)].clone()).collect();
        Profile::new(self.objects.clone(), prefs).expect("space profiles are valid")
    }

    pub fn index_of(&self, profile: &Profile) -> Result<usize> {
        let p = profile.reindex(&self.objects)?;
        Ok(p.index())
    }

    pub fn iter(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.count).map(move |k| self.profile(k))
    }
}

/// Every profile of `R^n` exactly once, in lexicographic order (cap `n <= 4`).
pub fn enumerate_profiles(n: usize) -> Result<impl Iterator<Item = Profile>> {
    let space = ProfileSpace::new(n)?;
    Ok((0..space.len()).map(move |k| space.profile(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn counts_and_order() {
        let all: Vec<Profile> = enumerate_profiles(3).unwrap().collect();
        assert_eq!(all.len(), 216);
        assert_eq!(all[0], Profile::from_rankings(&["abc", "abc", "abc"]).unwrap());
        let distinct: HashSet<_> = all.iter().collect();
        assert_eq!(distinct.len(), 216);
        for (k, p) in all.iter().enumerate() {
            assert_eq!(p.index(), k);
        }
        assert_eq!(ProfileSpace::new(4).unwrap().len(), 331_776);
        assert!(matches!(enumerate_profiles(5), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn digit_replacement() {
        let s = ProfileSpace::new(3).unwrap();
        for k in 0..s.len() {
            for i in 0..3 {
                for d in 0..6 {
                    let k2 = s.with_digit(k, i, d);
                    assert_eq!(s.profile(k2), s.profile(k).with_pref(i, s.prefs()[d].clone()));
                }
            }
        }
    }
}
