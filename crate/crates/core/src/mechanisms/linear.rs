use std::fmt;
use std::str::FromStr;

use crate::model::{Assignment, ObjectId, Profile};
use crate::{Error, Rational, Result};

/// Rank weights `v[1..=n]` of a linear mechanism: non-increasing, non-negative, `v[n] = 0`
/// and `v[1] <= 1/(n(n-1))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearVector {
    v: Vec<Rational>,
}

impl LinearVector {
    pub fn new(v: Vec<Rational>) -> Result<LinearVector> {
        let n = v.len();
        if n < 3 {
            return Err(Error::InvalidVector(format!("length {n} < 3")));
        }
        if let Some(k) = v.iter().position(|x| x.is_negative()) {
            return Err(Error::InvalidVector(format!("v[{}] = {} is negative", k + 1, v[k])));
        }
        if let Some(k) = (0..n - 1).find(|&k| v[k] < v[k + 1]) {
            return Err(Error::InvalidVector(format!(
                "unsorted: v[{}] = {} < v[{}] = {}",
                k + 1,
                v[k],
                k + 2,
                v[k + 1]
            )));
        }
        if !v[n - 1].is_zero() {
            return Err(Error::InvalidVector(format!("v[n] = {} is not 0", v[n - 1])));
        }
        let bound = Rational::new(1, (n * (n - 1)) as i64);
        if v[0] > bound {
            return Err(Error::InvalidVector(format!(
                "v[1] = {} exceeds 1/(n(n-1)) = {bound}",
                v[0]
            )));
        }
        Ok(LinearVector { v })
    }

    pub fn zero(n: usize) -> LinearVector {
        LinearVector {
            v: vec![Rational::ZERO; n],
        }
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// `v[k]` for a rank `k` in `1..=n`.
    pub fn at_rank(&self, k: usize) -> &Rational {
        &self.v[k - 1]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.v
    }

    /// Parses the vector file format: a single line `v <p/q> <p/q> ...`.
    pub fn parse_file(text: &str) -> Result<LinearVector> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let &(line, content) = lines.first().ok_or_else(|| Error::parse(1, "", "empty vector file"))?;
        if lines.len() > 1 {
            return Err(Error::parse(lines[1].0, lines[1].1, "vector file has a single line"));
        }
        let mut toks = content.split_whitespace();
        let head = toks.next().unwrap_or("");
        if head != "v" {
            return Err(Error::parse(line, head, "expected `v <p/q> ...`"));
        }
        let entries = toks
            .map(|t| {
                t.parse::<Rational>()
                    .map_err(|_| Error::parse(line, t, "not a rational"))
            })
            .collect::<Result<Vec<_>>>()?;
        LinearVector::new(entries)
    }

    pub fn to_file(&self) -> String {
        let entries: Vec<String> = self.v.iter().map(|x| x.to_string()).collect();
        format!("v {}\n", entries.join(" "))
    }
}

/// Accepts `(1/6,1/12,0)` or `1/6,1/12,0`.
impl FromStr for LinearVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<LinearVector> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = t
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<Rational>()
                    .map_err(|_| Error::InvalidVector(format!("entry {:?} is not a rational", x.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        LinearVector::new(entries)
    }
}

impl fmt::Display for LinearVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self.v.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", entries.join(","))
    }
}

impl fmt::Debug for LinearVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `P[i][a] = 1/n + Σ_{j≠i} (v[rank(≻i,a)] − v[rank(≻j,a)])`.
pub fn linear_mechanism(profile: &Profile, v: &LinearVector) -> Result<Assignment> {
    let n = profile.n();
    if v.n() != n {
        return Err(Error::InvalidVector(format!("length {} for n={n}", v.n())));
    }
    let base = Rational::new(1, n as i64);
    let mut cells = Vec::with_capacity(n * n);
    // column totals Σ_j v[rank(≻j, a)]
    let totals: Vec<Rational> = (0..n)
        .map(|a| {
            profile
                .prefs()
                .iter()
                .map(|p| v.v[p.position(ObjectId(a))].clone())
                .sum()
        })
        .collect();
    for i in 0..n {
        let pref = profile.pref(i);
        for (a, total) in totals.iter().enumerate() {
            let own = &v.v[pref.position(ObjectId(a))];
            // (n-1) v_i - (total - v_i) = n v_i - total
            cells.push(&base + own * Rational::from_integer(n as i64) - total);
        }
    }
    Assignment::from_cells(n, cells)
}
