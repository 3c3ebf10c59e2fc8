use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::{Error, Result};

/// Position of an object in its instance's canonical object list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub usize);

impl ObjectId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// The canonical, ordered list of object tokens of an instance.
#[derive(Clone)]
pub struct ObjectSet {
    tokens: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl ObjectSet {
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Result<Arc<ObjectSet>> {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let mut lookup = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() || t.chars().any(|c| c.is_whitespace() || c == ',' || c == '|') {
                return Err(Error::Invalid(format!("bad object token {t:?}")));
            }
            if lookup.insert(t.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate object token {t:?}")));
            }
        }
        Ok(Arc::new(ObjectSet { tokens, lookup }))
    }

    /// `a, b, c, ...` for up to 26 objects, otherwise `a1, ..., an`.
    pub fn standard(n: usize) -> Arc<ObjectSet> {
        if n <= 26 {
            ObjectSet::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string()))
        } else {
            ObjectSet::indexed(n)
        }
        .expect("standard tokens are distinct")
    }

    /// `a1, ..., an`.
    pub fn indexed(n: usize) -> Result<Arc<ObjectSet>> {
        ObjectSet::new((1..=n).map(|i| format!("a{i}")))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, a: ObjectId) -> &str {
        &self.tokens[a.0]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn get(&self, token: &str) -> Option<ObjectId> {
        self.lookup.get(token).copied().map(ObjectId)
    }

    pub fn ids(&self) -> impl Iterator<Item = ObjectId> {
        (0..self.tokens.len()).map(ObjectId)
    }

    /// Same token set, possibly in another canonical order.
    pub fn same_tokens(&self, other: &ObjectSet) -> bool {
        self.len() == other.len() && self.tokens.iter().all(|t| other.lookup.contains_key(t))
    }
}

impl PartialEq for ObjectSet {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl Eq for ObjectSet {}

impl Hash for ObjectSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.tokens.hash(state);
    }
}

impl fmt::Debug for ObjectSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.tokens).finish()
    }
}
