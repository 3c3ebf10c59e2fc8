use super::Preference;
use crate::{Error, Rational, Result};

/// Result of comparing two allocation rows under first-order stochastic dominance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SdOutcome {
    pub dominates: bool,
    pub strict: bool,
}

/// Compares `p` against `q` under `pref`: `p` dominates when every prefix sum along `pref`
/// is at least that of `q`; strict when in addition one prefix is larger.
pub fn sd_compare(p: &[Rational], q: &[Rational], pref: &Preference) -> Result<SdOutcome> {
    let n = pref.len();
    if p.len() != n || q.len() != n {
        return Err(Error::Invalid(format!(
            "rows of length {} and {} under a preference over {n} objects",
            p.len(),
            q.len()
        )));
    }
    for (name, row) in [("p", p), ("q", q)] {
        if row.iter().any(|x| x.is_negative() || *x > Rational::ONE) {
            return Err(Error::Invalid(format!("{name} has an entry outside [0,1]")));
        }
        let s: Rational = row.iter().sum();
        if !s.is_one() {
            return Err(Error::Invalid(format!("{name} sums to {s}, not 1")));
        }
    }
    let (dominates, strict) = sd_dominates(p, q, pref);
    Ok(SdOutcome { dominates, strict })
}

/// Unchecked dominance test returning `(dominates, strict)`.
pub fn sd_dominates(p: &[Rational], q: &[Rational], pref: &Preference) -> (bool, bool) {
    let mut diff = Rational::ZERO;
    let mut strict = false;
    for a in pref.order() {
        diff += &p[a.0];
        diff -= &q[a.0];
        if diff.is_negative() {
            return (false, false);
        }
        if diff.is_positive() {
            strict = true;
        }
    }
    (true, strict)
}

/// First prefix length `t` (1-based) at which `p` falls short of `q`, if any.
pub fn first_sd_violation(p: &[Rational], q: &[Rational], pref: &Preference) -> Option<usize> {
    let mut diff = Rational::ZERO;
    for (t, a) in pref.order().iter().enumerate() {
        diff += &p[a.0];
        diff -= &q[a.0];
        if diff.is_negative() {
            return Some(t + 1);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    // Oracle: materialize every prefix sum of both rows and compare them directly.
    fn oracle(p: &[Rational], r: &[Rational], pref: &Preference) -> (bool, bool) {
        let prefix = |row: &[Rational], t: usize| -> Rational { (1..=t).map(|k| row[pref.sigma(k).0].clone()).sum() };
        let n = pref.len();
        let ge = (1..=n).all(|t| prefix(p, t) >= prefix(r, t));
        let gt = (1..=n).any(|t| prefix(p, t) > prefix(r, t));
        (ge, ge && gt)
    }

    #[test]
    fn examples() {
        let abc = Preference::identity(3);
        let third = vec![q(1, 3); 3];
        let out = sd_compare(&third, &third, &abc).unwrap();
        assert_eq!((out.dominates, out.strict), (true, false));

        let p = [q(1, 2), q(1, 2), q(0, 1)];
        let out = sd_compare(&p, &third, &abc).unwrap();
        assert_eq!((out.dominates, out.strict), (true, true));
        assert_eq!(oracle(&p, &third, &abc), (true, true));

        let p = [q(1, 2), q(0, 1), q(1, 2)];
        let r = [q(0, 1), q(1, 1), q(0, 1)];
        let out = sd_compare(&p, &r, &abc).unwrap();
        assert_eq!((out.dominates, out.strict), (false, false));
        assert_eq!(oracle(&p, &r, &abc), (false, false));
        assert_eq!(first_sd_violation(&p, &r, &abc), Some(2));
    }

    #[test]
    fn rejects_bad_rows() {
        let abc = Preference::identity(3);
        assert!(sd_compare(&[q(1, 2), q(1, 2)], &vec![q(1, 3); 3], &abc).is_err());
        assert!(sd_compare(&[q(1, 2), q(1, 2), q(1, 2)], &vec![q(1, 3); 3], &abc).is_err());
    }

    #[test]
    fn agrees_with_oracle_on_grid() {
        let grid: Vec<Vec<Rational>> = (0..=4)
            .flat_map(|i| (0..=4 - i).map(move |j| vec![q(i, 4), q(j, 4), q(4 - i - j, 4)]))
            .collect();
        for pref in Preference::all(3) {
            for p in &grid {
                for r in &grid {
                    assert_eq!(sd_dominates(p, r, &pref), oracle(p, r, &pref));
                }
            }
        }
    }
}
