use std::fmt;

use crate::{Error, Rational, Result};

/// Relation of a row `Σ a_j x_j  (≤ | = | ≥)  b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    /// Sign turning the row into `≤` form (`Ge` rows are negated).
    pub(crate) fn le_sign(self) -> Rational {
        match self {
            Sense::Ge => -Rational::ONE,
            _ => Rational::ONE,
        }
    }
}

/// A sparse row with terms sorted by variable and free of zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub terms: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
    pub label: String,
}

impl Row {
    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.terms.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let l = self.lhs(x);
        match self.sense {
            Sense::Le => l <= self.rhs,
            Sense::Ge => l >= self.rhs,
            Sense::Eq => l == self.rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub direction: Direction,
    pub terms: Vec<(usize, Rational)>,
}

impl Objective {
    pub fn new(direction: Direction, terms: impl IntoIterator<Item = (usize, Rational)>) -> Objective {
        Objective {
            direction,
            terms: normalize_terms(terms),
        }
    }
    pub fn value(&self, x: &[Rational]) -> Rational {
        self.terms.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    /// Coefficients of the equivalent maximization.
    pub(crate) fn max_terms(&self) -> Vec<(usize, Rational)> {
        match self.direction {
            Direction::Maximize => self.terms.clone(),
            Direction::Minimize => self.terms.iter().map(|(j, c)| (*j, -c)).collect(),
        }
    }
}

/// Rows over named variables, every variable implicitly `≥ 0`, with an optional objective.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub names: Vec<String>,
    pub rows: Vec<Row>,
    pub objective: Option<Objective>,
}

pub(crate) fn normalize_terms(terms: impl IntoIterator<Item = (usize, Rational)>) -> Vec<(usize, Rational)> {
    let mut t: Vec<(usize, Rational)> = terms.into_iter().filter(|(_, a)| !a.is_zero()).collect();
    t.sort_by_key(|(j, _)| *j);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(t.len());
    for (j, a) in t {
        match out.last_mut() {
            Some((k, b)) if *k == j => *b += a,
            _ => out.push((j, a)),
        }
    }
    out.retain(|(_, a)| !a.is_zero());
    out
}

impl LinearSystem {
    pub fn new() -> LinearSystem {
        LinearSystem::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn add_row(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        sense: Sense,
        rhs: Rational,
        label: impl Into<String>,
    ) -> usize {
        let terms = normalize_terms(terms);
        debug_assert!(terms.iter().all(|(j, _)| *j < self.names.len()));
        self.rows.push(Row {
            terms,
            sense,
            rhs,
            label: label.into(),
        });
        self.rows.len() - 1
    }

    pub fn set_objective(&mut self, direction: Direction, terms: impl IntoIterator<Item = (usize, Rational)>) {
        self.objective = Some(Objective {
            direction,
            terms: normalize_terms(terms),
        });
    }

    /// Checks that every row references declared variables only.
    pub fn check_well_formed(&self) -> Result<()> {
        let nv = self.names.len();
        for r in &self.rows {
            if let Some((j, _)) = r.terms.iter().find(|(j, _)| *j >= nv) {
                return Err(Error::Invalid(format!(
                    "row {:?} references undeclared variable {j}",
                    r.label
                )));
            }
        }
        if let Some(o) = &self.objective {
            if let Some((j, _)) = o.terms.iter().find(|(j, _)| *j >= nv) {
                return Err(Error::Invalid(format!("objective references undeclared variable {j}")));
            }
        }
        Ok(())
    }

    /// Renders `Σ a x (sense) b` with variable names.
    pub fn render_row(&self, r: &Row) -> String {
        let mut s = String::new();
        for (k, (j, a)) in r.terms.iter().enumerate() {
            let name = &self.names[*j];
            let (sign, mag) = if a.is_negative() { ("-", -a) } else { ("+", a.clone()) };
            if k == 0 {
                if sign == "-" {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            if mag.is_one() {
                s.push_str(name);
            } else {
                s.push_str(&format!("{mag}*{name}"));
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        format!("{s} {} {}", r.sense.symbol(), r.rhs)
    }
}

/// Proof object returned by the solver; every variant can be re-checked against the system
/// with [`verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// A point satisfying every row and `x ≥ 0`.
    FeasiblePoint { point: Vec<Rational> },
    /// Multipliers `y_r` per row in `≤` orientation (`Ge` rows negated), non-negative on
    /// inequalities. The combination `Σ y_r (s_r a_r)` has non-negative coefficients while
    /// `Σ y_r (s_r b_r) = −δ < 0`, so `0 ≤ −δ` follows from any feasible point.
    FarkasInfeasible {
        multipliers: Vec<Rational>,
        delta: Rational,
    },
    /// A feasible point attaining `value` and row multipliers bounding the objective:
    /// for a maximization `Σ y_r (s_r a_r) ≥ c` and `Σ y_r (s_r b_r) = value`.
    Optimum {
        point: Vec<Rational>,
        value: Rational,
        multipliers: Vec<Rational>,
    },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::FeasiblePoint { .. } => "feasible-point",
            Certificate::FarkasInfeasible { .. } => "farkas-infeasible",
            Certificate::Optimum { .. } => "optimum",
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Certificate::FarkasInfeasible { .. })
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            Certificate::FeasiblePoint { point } | Certificate::Optimum { point, .. } => Some(point),
            Certificate::FarkasInfeasible { .. } => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Certificate::Optimum { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// `Σ_r y_r s_r a_r` and `Σ_r y_r s_r b_r` for row multipliers in `≤` orientation.
pub fn combine(sys: &LinearSystem, multipliers: &[Rational]) -> (Vec<Rational>, Rational) {
    let mut w = vec![Rational::ZERO; sys.num_vars()];
    let mut rhs = Rational::ZERO;
    for (r, y) in sys.rows.iter().zip(multipliers) {
        if y.is_zero() {
            continue;
        }
        let ys = y * r.sense.le_sign();
        for (j, a) in &r.terms {
            w[*j] += &ys * a;
        }
        rhs += &ys * &r.rhs;
    }
    (w, rhs)
}

fn check_point(sys: &LinearSystem, x: &[Rational]) -> Result<()> {
    if x.len() != sys.num_vars() {
        return Err(Error::Certificate(format!(
            "point has {} entries for {} variables",
            x.len(),
            sys.num_vars()
        )));
    }
    if let Some(j) = x.iter().position(Rational::is_negative) {
        return Err(Error::Certificate(format!("{} = {} is negative", sys.names[j], x[j])));
    }
    if let Some(r) = sys.rows.iter().find(|r| !r.holds(x)) {
        return Err(Error::Certificate(format!(
            "row {:?} violated: {} but lhs = {}",
            r.label,
            sys.render_row(r),
            r.lhs(x)
        )));
    }
    Ok(())
}

fn check_multiplier_signs(sys: &LinearSystem, y: &[Rational]) -> Result<()> {
    if y.len() != sys.rows.len() {
        return Err(Error::Certificate(format!(
            "{} multipliers for {} rows",
            y.len(),
            sys.rows.len()
        )));
    }
    if let Some((r, m)) = sys
        .rows
        .iter()
        .zip(y)
        .find(|(r, m)| r.sense != Sense::Eq && m.is_negative())
    {
        return Err(Error::Certificate(format!(
            "negative multiplier {m} on inequality {:?}",
            r.label
        )));
    }
    Ok(())
}

/// Re-checks a certificate by direct substitution, independently of how it was found.
pub fn verify(sys: &LinearSystem, cert: &Certificate) -> Result<()> {
    sys.check_well_formed()?;
    match cert {
        Certificate::FeasiblePoint { point } => check_point(sys, point),
        Certificate::FarkasInfeasible { multipliers, delta } => {
            check_multiplier_signs(sys, multipliers)?;
            let (w, rhs) = combine(sys, multipliers);
            if let Some(j) = w.iter().position(Rational::is_negative) {
                return Err(Error::Certificate(format!(
                    "combined coefficient of {} is {} < 0",
                    sys.names[j], w[j]
                )));
            }
            if !delta.is_positive() {
                return Err(Error::Certificate(format!("delta = {delta} is not positive")));
            }
            if rhs != -delta {
                return Err(Error::Certificate(format!(
                    "combined right-hand side {rhs} != -delta = {}",
                    -delta
                )));
            }
            Ok(())
        }
        Certificate::Optimum {
            point,
            value,
            multipliers,
        } => {
            let obj = sys
                .objective
                .as_ref()
                .ok_or_else(|| Error::Certificate("optimum certificate for a system without objective".into()))?;
            check_point(sys, point)?;
            if obj.value(point) != *value {
                return Err(Error::Certificate(format!(
                    "objective at point is {} not {value}",
                    obj.value(point)
                )));
            }
            check_multiplier_signs(sys, multipliers)?;
            let (w, rhs) = combine(sys, multipliers);
            let mut c = vec![Rational::ZERO; sys.num_vars()];
            for (j, a) in obj.max_terms() {
                c[j] = a;
            }
            if let Some(j) = (0..c.len()).find(|&j| w[j] < c[j]) {
                return Err(Error::Certificate(format!(
                    "dual bound fails at {}: {} < {}",
                    sys.names[j], w[j], c[j]
                )));
            }
            let bound = match obj.direction {
                Direction::Maximize => rhs,
                Direction::Minimize => -rhs,
            };
            if bound != *value {
                return Err(Error::Certificate(format!(
                    "dual bound {bound} differs from value {value}"
                )));
            }
            Ok(())
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn textbook_farkas_is_accepted() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x");
        s.add_row([(x, q(1, 1))], Sense::Ge, q(0, 1), "x >= 0");
        s.add_row([(x, q(1, 1))], Sense::Le, q(-1, 1), "x <= -1");
        let cert = Certificate::FarkasInfeasible {
            multipliers: vec![q(1, 1), q(1, 1)],
            delta: q(1, 1),
        };
        verify(&s, &cert).unwrap();
        let bad = Certificate::FarkasInfeasible {
            multipliers: vec![q(1, 1), q(0, 1)],
            delta: q(1, 1),
        };
        assert!(verify(&s, &bad).is_err());
    }

    #[test]
    fn optimum_needs_matching_bound() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x");
        let y = s.add_var("y");
        s.add_row([(x, q(1, 1)), (y, q(1, 1))], Sense::Eq, q(1, 1), "sum");
        s.set_objective(Direction::Maximize, [(x, q(1, 1))]);
        let good = Certificate::Optimum {
            point: vec![q(1, 1), q(0, 1)],
            value: q(1, 1),
            multipliers: vec![q(1, 1)],
        };
        verify(&s, &good).unwrap();
        let weak = Certificate::Optimum {
            point: vec![q(1, 2), q(1, 2)],
            value: q(1, 2),
            multipliers: vec![q(1, 1)],
        };
        assert!(verify(&s, &weak).is_err());
    }

    #[test]
    fn rendering() {
        let mut s = LinearSystem::new();
        let x = s.add_var("x");
        let y = s.add_var("y");
        let r = s.add_row([(x, q(1, 1)), (y, q(-1, 2)), (x, q(1, 1))], Sense::Le, q(3, 1), "r");
        assert_eq!(s.render_row(&s.rows[r]), "2*x - 1/2*y <= 3");
    }
}
