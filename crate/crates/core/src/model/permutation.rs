use std::fmt;

use crate::{Error, Result};

/// A bijection on `0..n`. Whether it acts on agents or on objects is stated by the caller.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Permutation> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || seen[m] {
                return Err(Error::Invalid(format!("not a bijection: {map:?}")));
            }
            seen[m] = true;
        }
        Ok(Permutation { map })
    }

    /// Builds from 1-based images, e.g. `[2, 1, 3]` swaps the first two points.
    pub fn from_one_based(images: &[usize]) -> Result<Permutation> {
        if images.contains(&0) {
            return Err(Error::Invalid(format!("1-based permutation contains 0: {images:?}")));
        }
        Permutation::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation { map: (0..n).collect() }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Permutation {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(i, j);
        Permutation { map }
    }

    /// All `n!` permutations in lexicographic order of their image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation { map: cur.clone() });
            if !next_permutation(&mut cur) {
                break;
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        Permutation { map: inv }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            map: other.map.iter().map(|&i| self.map[i]).collect(),
        }
    }

    /// Parses `1,2,3`, `(1,2,3)`, `1 2 3` or the compact `123` (1-based images).
    pub fn parse_one_based(text: &str) -> Result<Permutation> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = if t.contains(',') || t.contains(' ') {
            t.split([',', ' ']).filter(|s| !s.is_empty()).collect()
        } else {
            t.split("").filter(|s| !s.is_empty()).collect()
        };
        let images = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad permutation entry {p:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_one_based(&images)
    }
}

/// Advances to the next permutation in lexicographic order; false when already last.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, m) in self.map.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", m + 1)?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_is_lexicographic_and_complete() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all[0].is_identity());
    }

    #[test]
    fn inverse_and_compose() {
        for p in Permutation::all(4) {
            assert!(p.compose(&p.inverse()).is_identity());
            assert!(p.inverse().compose(&p).is_identity());
        }
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn parse_forms() {
        let p = Permutation::parse_one_based("3,2,1").unwrap();
        assert_eq!(p.as_slice(), &[2, 1, 0]);
        assert_eq!(Permutation::parse_one_based("321").unwrap(), p);
        assert_eq!(Permutation::parse_one_based("(3, 2, 1)").unwrap(), p);
        assert_eq!(p.to_string(), "(3,2,1)");
        assert!(Permutation::parse_one_based("1,1,2").is_err());
    }
}
