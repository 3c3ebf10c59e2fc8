use std::collections::HashSet;

use super::system::{combine, verify, Certificate, LinearSystem, Sense};
use crate::{Error, Rational, Result};

/// Verdict of Fourier–Motzkin elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FmOutcome {
    Feasible,
    Infeasible(Certificate),
}

#[derive(Clone)]
struct FmRow {
    coeffs: Vec<Rational>,
    rhs: Rational,
    /// multipliers of the original rows producing this one (≤ orientation)
    origin: Vec<Rational>,
}

impl FmRow {
    fn scaled_add(&self, s: &Rational, other: &FmRow, t: &Rational) -> FmRow {
        let mix = |x: &[Rational], y: &[Rational]| x.iter().zip(y).map(|(a, b)| s * a + t * b).collect();
        FmRow {
            coeffs: mix(&self.coeffs, &other.coeffs),
            rhs: s * &self.rhs + t * &other.rhs,
            origin: mix(&self.origin, &other.origin),
        }
    }

    /// Scale so the first nonzero coefficient has magnitude one.
    fn normalized(mut self) -> FmRow {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(Rational::abs) {
            let inv = lead.recip();
            for c in self.coeffs.iter_mut().chain(self.origin.iter_mut()) {
                *c *= &inv;
            }
            self.rhs *= &inv;
        }
        self
    }
}

/// Decides feasibility of `sys` (with `x ≥ 0`) by eliminating variables one at a time,
/// tracking the row combination behind every derived inequality. Meant as an independent
/// cross-check on small systems; fails with [`Error::Budget`] once more than `max_rows`
/// rows are alive.
pub fn fourier_motzkin(sys: &LinearSystem, max_rows: usize) -> Result<FmOutcome> {
    sys.check_well_formed()?;
    let nx = sys.num_vars();
    let m = sys.rows.len();
    let mut rows: Vec<FmRow> = Vec::new();
    for (r, row) in sys.rows.iter().enumerate() {
        // ≤ orientation: Ge rows negated, Eq rows as both halves
        let signs: &[i64] = match row.sense {
            Sense::Le | Sense::Ge => &[1],
            Sense::Eq => &[1, -1],
        };
        for &sg in signs {
            let s = row.sense.le_sign() * Rational::from_integer(sg);
            let mut coeffs = vec![Rational::ZERO; nx];
            for (j, a) in &row.terms {
                coeffs[*j] = a * &s;
            }
            let mut origin = vec![Rational::ZERO; m];
            origin[r] = Rational::from_integer(sg);
            rows.push(FmRow {
                coeffs,
                rhs: &row.rhs * &s,
                origin,
            });
        }
    }
    // bounds -x_j <= 0 carry no row multiplier
    for j in 0..nx {
        let mut coeffs = vec![Rational::ZERO; nx];
        coeffs[j] = -Rational::ONE;
        rows.push(FmRow {
            coeffs,
            rhs: Rational::ZERO,
            origin: vec![Rational::ZERO; m],
        });
    }

    for j in 0..nx {
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for row in rows {
            if row.coeffs[j].is_positive() {
                pos.push(row);
            } else if row.coeffs[j].is_negative() {
                neg.push(row);
            } else {
                keep.push(row);
            }
        }
        for p in &pos {
            for q in &neg {
                let (s, t) = (q.coeffs[j].abs(), p.coeffs[j].clone());
                keep.push(p.scaled_add(&s, q, &t).normalized());
            }
            if keep.len() > max_rows {
                return Err(Error::Budget {
                    needed: keep.len(),
                    budget: max_rows,
                });
            }
        }
        let mut seen = HashSet::new();
        rows = keep
            .into_iter()
            .filter(|r| seen.insert((r.coeffs.clone(), r.rhs.clone())))
            .collect();
    }

    match rows.into_iter().find(|r| r.rhs.is_negative()) {
        None => Ok(FmOutcome::Feasible),
        Some(r) => {
            let (_, rhs) = combine(sys, &r.origin);
            let cert = Certificate::FarkasInfeasible {
                multipliers: r.origin,
                delta: -rhs,
            };
            verify(sys, &cert)?;
            Ok(FmOutcome::Infeasible(cert))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn textbook_infeasible() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x");
        s.add_row([(x, q(1, 1))], Sense::Ge, Rational::ZERO, "lo");
        s.add_row([(x, q(1, 1))], Sense::Le, q(-1, 1), "hi");
        match fourier_motzkin(&s, 100).unwrap() {
            FmOutcome::Infeasible(Certificate::FarkasInfeasible { delta, .. }) => assert!(delta.is_positive()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_and_ge() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x");
        let y = s.add_var("y");
        s.add_row([(x, q(1, 1)), (y, q(1, 1))], Sense::Eq, q(1, 1), "sum");
        s.add_row([(x, q(1, 1))], Sense::Ge, q(1, 2), "x");
        assert_eq!(fourier_motzkin(&s, 100).unwrap(), FmOutcome::Feasible);
        s.add_row([(y, q(1, 1))], Sense::Ge, q(2, 3), "y");
        assert!(matches!(fourier_motzkin(&s, 100).unwrap(), FmOutcome::Infeasible(_)));
    }
}
