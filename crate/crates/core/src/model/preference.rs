use std::fmt;

use super::{ObjectId, ObjectSet, Permutation};
use crate::{Error, Result};

/// A strict ranking of all `n` objects, most preferred first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Preference {
    order: Vec<ObjectId>,
    // rank[a] is the 0-based position of object a
    rank: Vec<usize>,
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl Preference {
    pub fn new(order: Vec<ObjectId>) -> Result<Preference> {
        let n = order.len();
        let mut rank = vec![usize::MAX; n];
        for (pos, a) in order.iter().enumerate() {
            if a.0 >= n {
                return Err(Error::Invalid(format!("object index {} out of range for n={n}", a.0)));
            }
            if rank[a.0] != usize::MAX {
                return Err(Error::Invalid(format!("object index {} ranked twice", a.0)));
            }
            rank[a.0] = pos;
        }
        Ok(Preference { order, rank })
    }

    pub fn from_indices(order: &[usize]) -> Result<Preference> {
        Preference::new(order.iter().copied().map(ObjectId).collect())
    }

    /// Parses whitespace- or comma-separated tokens, or a compact string of one-character
    /// tokens such as `"abc"`.
    pub fn parse(objects: &ObjectSet, text: &str) -> Result<Preference> {
        let parts: Vec<&str> = if text.contains([',', ' ', '\t']) {
            text.split([',', ' ', '\t']).filter(|s| !s.is_empty()).collect()
        } else if objects.get(text.trim()).is_some() && objects.len() == 1 {
            vec![text.trim()]
        } else {
            text.trim().split("").filter(|s| !s.is_empty()).collect()
        };
        if parts.len() != objects.len() {
            return Err(Error::Invalid(format!(
                "preference {text:?} lists {} objects, expected {}",
                parts.len(),
                objects.len()
            )));
        }
        let order = parts
            .iter()
            .map(|t| {
                objects
                    .get(t)
                    .ok_or_else(|| Error::Invalid(format!("unknown object {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Preference::new(order)
    }

    pub fn identity(n: usize) -> Preference {
        Preference {
            order: (0..n).map(ObjectId).collect(),
            rank: (0..n).collect(),
        }
    }

    /// All `n!` preferences in lexicographic order of object indices.
    pub fn all(n: usize) -> Vec<Preference> {
        Permutation::all(n)
            .into_iter()
            .map(|p| Preference::from_indices(p.as_slice()).expect("permutation"))
            .collect()
    }

    /// Inverse of [`Preference::index`].
    pub fn from_index(n: usize, mut index: usize) -> Preference {
        let mut pool: Vec<usize> = (0..n).collect();
        let mut order = Vec::with_capacity(n);
        for k in (0..n).rev() {
            let f = factorial(k);
            let d = index / f;
            index %= f;
            order.push(ObjectId(pool.remove(d)));
        }
        Preference::new(order).expect("lehmer code decodes to a permutation")
    }

    /// Position in the lexicographic enumeration of [`Preference::all`].
    pub fn index(&self) -> usize {
        let n = self.order.len();
        let mut idx = 0;
        for i in 0..n {
            let smaller_later = self.order[i + 1..].iter().filter(|b| b.0 < self.order[i].0).count();
            idx += smaller_later * factorial(n - 1 - i);
        }
        idx
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[ObjectId] {
        &self.order
    }

    /// The `k`-th most preferred object, `k` in `1..=n`.
    pub fn sigma(&self, k: usize) -> ObjectId {
        self.order[k - 1]
    }

    /// Rank of `a`, in `1..=n`.
    pub fn rank_of(&self, a: ObjectId) -> usize {
        self.rank[a.0] + 1
    }

    /// 0-based position of `a`.
    pub fn position(&self, a: ObjectId) -> usize {
        self.rank[a.0]
    }

    pub fn top(&self) -> ObjectId {
        self.order[0]
    }

    pub fn prefers(&self, a: ObjectId, b: ObjectId) -> bool {
        self.rank[a.0] < self.rank[b.0]
    }

    /// `U(≻, a)`: every object ranked at least as high as `a`, in preference order.
    pub fn upper_contour(&self, a: ObjectId) -> Result<Vec<ObjectId>> {
        if a.0 >= self.order.len() {
            return Err(Error::Invalid(format!("unknown object index {}", a.0)));
        }
        Ok(self.order[..=self.rank[a.0]].to_vec())
    }

    /// Swaps the objects at 0-based positions `pos` and `pos + 1`.
    pub fn swap_adjacent(&self, pos: usize) -> Preference {
        let mut order = self.order.clone();
        order.swap(pos, pos + 1);
        let mut rank = self.rank.clone();
        rank[order[pos].0] = pos;
        rank[order[pos + 1].0] = pos + 1;
        Preference { order, rank }
    }

    /// The neighbourhood: the `n - 1` preferences one adjacent transposition away, ordered by
    /// the position of the swap.
    pub fn neighbors(&self) -> Vec<Preference> {
        (0..self.order.len().saturating_sub(1))
            .map(|p| self.swap_adjacent(p))
            .collect()
    }

    /// Relabels every object by `pi`.
    pub fn relabel(&self, pi: &Permutation) -> Preference {
        Preference::new(self.order.iter().map(|a| ObjectId(pi.apply(a.0))).collect())
            .expect("relabelling by a bijection")
    }

    pub fn display<'a>(&'a self, objects: &'a ObjectSet) -> impl fmt::Display + 'a {
        DisplayPref {
            pref: self,
            objects,
            sep: " ",
        }
    }

    pub fn display_with<'a>(&'a self, objects: &'a ObjectSet, sep: &'a str) -> impl fmt::Display + 'a {
        DisplayPref {
            pref: self,
            objects,
            sep,
        }
    }
}

struct DisplayPref<'a> {
    pref: &'a Preference,
    objects: &'a ObjectSet,
    sep: &'a str,
}

impl fmt::Display for DisplayPref<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.pref.order.iter().enumerate() {
            if k > 0 {
                f.write_str(self.sep)?;
            }
            f.write_str(self.objects.token(*a))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (k, a) in self.order.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a.0)?;
        }
        write!(f, ">")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for n in 1..=5 {
            let all = Preference::all(n);
            assert_eq!(all.len(), factorial(n));
            for (i, p) in all.iter().enumerate() {
                assert_eq!(p.index(), i);
                assert_eq!(&Preference::from_index(n, i), p);
            }
        }
    }

    #[test]
    fn rank_and_sigma_agree() {
        for p in Preference::all(4) {
            for k in 1..=4 {
                assert_eq!(p.rank_of(p.sigma(k)), k);
                assert_eq!(p.upper_contour(p.sigma(k)).unwrap().len(), k);
            }
        }
    }

    #[test]
    fn neighbors_of_four() {
        let objs = ObjectSet::standard(4);
        let p = Preference::parse(&objs, "a b c d").unwrap();
        let shown: Vec<String> = p.neighbors().iter().map(|q| q.display(&objs).to_string()).collect();
        assert_eq!(shown, ["b a c d", "a c b d", "a b d c"]);
    }

    #[test]
    fn upper_contour_examples() {
        let objs = ObjectSet::standard(3);
        let p = Preference::parse(&objs, "abc").unwrap();
        let a = objs.get("a").unwrap();
        let b = objs.get("b").unwrap();
        let c = objs.get("c").unwrap();
        assert_eq!(p.upper_contour(a).unwrap(), vec![a]);
        assert_eq!(p.upper_contour(b).unwrap(), vec![a, b]);
        assert_eq!(p.upper_contour(c).unwrap(), vec![a, b, c]);
        assert!(p.upper_contour(ObjectId(7)).is_err());
    }
}
