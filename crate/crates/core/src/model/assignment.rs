use std::fmt;

use super::Permutation;
use crate::{Error, Rational, Result};

/// An `n × n` doubly stochastic matrix of exact rationals; rows are agents, columns objects.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    cells: Vec<Rational>,
}

impl Assignment {
    /// Validates entries in `[0, 1]` and unit row and column sums.
    pub fn from_cells(n: usize, cells: Vec<Rational>) -> Result<Assignment> {
        if cells.len() != n * n {
            return Err(Error::NotDoublyStochastic(format!("{} cells for n={n}", cells.len())));
        }
        for (k, c) in cells.iter().enumerate() {
            if c.is_negative() || *c > Rational::ONE {
                return Err(Error::NotDoublyStochastic(format!(
                    "cell (agent {}, object {}) = {c} outside [0,1]",
                    k / n + 1,
                    k % n + 1
                )));
            }
        }
        for i in 0..n {
            let s: Rational = cells[i * n..(i + 1) * n].iter().sum();
            if !s.is_one() {
                return Err(Error::NotDoublyStochastic(format!(
                    "row of agent {} sums to {s}",
                    i + 1
                )));
            }
        }
        for a in 0..n {
            let s: Rational = (0..n).map(|i| &cells[i * n + a]).sum();
            if !s.is_one() {
                return Err(Error::NotDoublyStochastic(format!(
                    "column of object {} sums to {s}",
                    a + 1
                )));
            }
        }
        Ok(Assignment { n, cells })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Assignment> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotDoublyStochastic("matrix is not square".into()));
        }
        Assignment::from_cells(n, rows.into_iter().flatten().collect())
    }

    /// Equal division: every entry `1/n`.
    pub fn uniform(n: usize) -> Assignment {
        Assignment {
            n,
            cells: vec![Rational::new(1, n as i64); n * n],
        }
    }

    /// Agent `i` receives object `perm(i)`.
    pub fn from_permutation(perm: &Permutation) -> Assignment {
        let n = perm.len();
        let mut cells = vec![Rational::ZERO; n * n];
        for i in 0..n {
            cells[i * n + perm.apply(i)] = Rational::ONE;
        }
        Assignment { n, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, agent: usize, object: usize) -> &Rational {
        &self.cells[agent * self.n + object]
    }

    pub fn row(&self, agent: usize) -> &[Rational] {
        &self.cells[agent * self.n..(agent + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.cells.chunks(self.n)
    }

    pub fn cells(&self) -> &[Rational] {
        &self.cells
    }

    /// `Some(perm)` when the matrix is a permutation matrix.
    pub fn as_permutation(&self) -> Option<Permutation> {
        let map: Option<Vec<usize>> = self.rows().map(|r| r.iter().position(|x| x.is_one())).collect();
        Permutation::new(map?).ok()
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn validation_names_offending_line() {
        let err = Assignment::from_rows(vec![
            vec![q(1, 2), q(1, 2), q(0, 1)],
            vec![q(1, 2), q(1, 2), q(0, 1)],
            vec![q(1, 2), q(0, 1), q(1, 2)],
        ])
        .unwrap_err();
        assert!(err.to_string().contains("column of object 1"), "{err}");
        assert!(Assignment::from_rows(vec![vec![q(-1, 1), q(2, 1)], vec![q(2, 1), q(-1, 1)]]).is_err());
    }

    #[test]
    fn permutation_round_trip() {
        for p in Permutation::all(4) {
            assert_eq!(Assignment::from_permutation(&p).as_permutation(), Some(p));
        }
        assert_eq!(Assignment::uniform(3).as_permutation(), None);
    }
}
