use std::time::Instant;

use super::presolve;
use super::system::{verify, Certificate, Direction, LinearSystem, Objective, Sense};
use crate::{Error, Rational, Result};

/// Entering-variable rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest improving index; never cycles.
    #[default]
    Bland,
    /// Most negative reduced cost with a lexicographic ratio test, which also rules out cycling.
    Dantzig,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub pivot: PivotRule,
    /// Merge `x_u = x_v` rows and drop duplicate rows before pivoting.
    pub presolve: bool,
    /// Give up with [`Error::Timeout`] once this instant has passed.
    pub deadline: Option<Instant>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            pivot: PivotRule::Bland,
            presolve: true,
            deadline: None,
        }
    }
}

/// Solves with default options and re-verifies the certificate against `sys`.
pub fn lp_solve(sys: &LinearSystem) -> Result<Certificate> {
    lp_solve_with(sys, &SolveOptions::default())
}

/// Exact two-phase simplex over the rationals. Returns a feasible point (no objective),
/// an optimum with dual multipliers, or a Farkas certificate; the result always passes
/// [`verify`] against the original system. Unbounded objectives give [`Error::Unbounded`].
pub fn lp_solve_with(sys: &LinearSystem, opts: &SolveOptions) -> Result<Certificate> {
    sys.check_well_formed()?;
    let cert = if opts.presolve {
        presolve::solve_presolved(sys, opts)?
    } else {
        solve_raw(sys, opts)?
    };
    verify(sys, &cert)?;
    Ok(cert)
}

/// Optimizes each objective over the rows of `sys` (its own objective is ignored), sharing
/// presolve and phase one. Objectives are solved on the rayon pool; every certificate is
/// verified against `sys` with the corresponding objective.
pub fn lp_solve_objectives(
    sys: &LinearSystem,
    objectives: &[Objective],
    opts: &SolveOptions,
) -> Result<Vec<Certificate>> {
    use rayon::prelude::*;
    sys.check_well_formed()?;
    let solved: Vec<Certificate> = if opts.presolve {
        presolve::solve_presolved_many(sys, objectives, opts)?
    } else {
        match phase_one(sys, opts)? {
            PhaseOne::Infeasible(cert) => vec![cert; objectives.len()],
            PhaseOne::Feasible(start) => objectives
                .par_iter()
                .map(|obj| start.optimize(&sys.names, obj, opts))
                .collect::<Result<_>>()?,
        }
    };
    objectives.par_iter().zip(&solved).try_for_each(|(obj, cert)| {
        let mut with = sys.clone();
        with.objective = Some(obj.clone());
        verify(&with, cert)
    })?;
    Ok(solved)
}

type SparseRow = Vec<(usize, Rational)>;

fn coeff(row: &SparseRow, col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&col, |(j, _)| *j).ok().map(|k| &row[k].1)
}

/// `row + factor * other`, both sorted.
fn axpy(row: &SparseRow, factor: &Rational, other: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(row.len() + other.len());
    let (mut i, mut k) = (0, 0);
    while i < row.len() || k < other.len() {
        let take_row = k >= other.len() || (i < row.len() && row[i].0 < other[k].0);
        let take_other = i >= row.len() || (k < other.len() && other[k].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_other {
            out.push((other[k].0, factor * &other[k].1));
            k += 1;
        } else {
            let v = &row[i].1 + factor * &other[k].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            k += 1;
        }
    }
    out
}

#[derive(Clone)]
struct Tableau {
    rows: Vec<SparseRow>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// reduced costs of the current (minimization) phase
    d: Vec<Rational>,
    obj: Rational,
    ncols: usize,
    art_start: usize,
    /// for each column, the row whose initial basic variable it was
    init_rank: Vec<Option<usize>>,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, q: usize) {
        let inv = coeff(&self.rows[r], q).expect("pivot on a nonzero").recip();
        for (_, a) in self.rows[r].iter_mut() {
            *a *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            if let Some(c) = coeff(&self.rows[i], q) {
                let f = -c.clone();
                self.rows[i] = axpy(&self.rows[i], &f, &prow);
                self.rhs[i] += &f * &prhs;
            }
        }
        let dq = self.d[q].clone();
        if !dq.is_zero() {
            for (j, a) in &prow {
                self.d[*j] -= &dq * a;
            }
            self.obj += &dq * &prhs;
        }
        self.basis[r] = q;
    }

    fn entering(&self, rule: PivotRule) -> Option<usize> {
        let cols = 0..self.art_start;
        if rule == PivotRule::Bland {
            cols.into_iter().find(|&j| self.d[j].is_negative())
        } else {
            let mut best: Option<usize> = None;
            for j in cols {
                if self.d[j].is_negative() && best.is_none_or(|b| self.d[j] < self.d[b]) {
                    best = Some(j);
                }
            }
            best
        }
    }

    /// Row `r` of the current basis inverse scaled by `1/a`, as sorted `(initial row, value)`.
    fn inverse_row(&self, r: usize, a: &Rational) -> Vec<(usize, Rational)> {
        let mut v: Vec<(usize, Rational)> = self.rows[r]
            .iter()
            .filter_map(|(j, x)| self.init_rank[*j].map(|k| (k, x / a)))
            .collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }

    fn lex_less(&self, r1: usize, a1: &Rational, r2: usize, a2: &Rational) -> bool {
        let (u, w) = (self.inverse_row(r1, a1), self.inverse_row(r2, a2));
        let (mut i, mut k) = (0, 0);
        loop {
            let ku = u.get(i).map_or(usize::MAX, |e| e.0);
            let kw = w.get(k).map_or(usize::MAX, |e| e.0);
            if ku == usize::MAX && kw == usize::MAX {
                return self.basis[r1] < self.basis[r2];
            }
            let key = ku.min(kw);
            let x = if ku == key { u[i].1.clone() } else { Rational::ZERO };
            let y = if kw == key { w[k].1.clone() } else { Rational::ZERO };
            if x != y {
                return x < y;
            }
            i += usize::from(ku == key);
            k += usize::from(kw == key);
        }
    }

    fn leaving(&self, q: usize, lexicographic: bool) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(a) = coeff(row, q) {
                if a.is_positive() {
                    let ratio = &self.rhs[r] / a;
                    let better = match &best {
                        None => true,
                        Some((b, br)) => {
                            ratio < *br
                                || (ratio == *br
                                    && if lexicographic {
                                        self.lex_less(r, a, *b, coeff(&self.rows[*b], q).expect("candidate"))
                                    } else {
                                        self.basis[r] < self.basis[*b]
                                    })
                        }
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
        }
        best.map(|(r, _)| r)
    }

    /// With `stop_at_zero`, returns as soon as the objective value reaches zero (phase one).
    fn run(&mut self, opts: &SolveOptions, stop_at_zero: bool) -> Result<Step> {
        let mut iter = 0u64;
        loop {
            iter += 1;
            if iter.is_multiple_of(64) {
                if let Some(dl) = opts.deadline {
                    if Instant::now() > dl {
                        return Err(Error::Timeout(format!("simplex stopped after {iter} pivots")));
                    }
                }
            }
            if stop_at_zero && self.obj.is_zero() {
                return Ok(Step::Optimal);
            }
            let Some(q) = self.entering(opts.pivot) else {
                return Ok(Step::Optimal);
            };
            let Some(r) = self.leaving(q, opts.pivot == PivotRule::Dantzig) else {
                return Ok(Step::Unbounded(q));
            };
            self.pivot(r, q);
        }
    }

    fn set_costs(&mut self, c: &[Rational]) {
        self.d = c.to_vec();
        self.d.resize(self.ncols, Rational::ZERO);
        self.obj = Rational::ZERO;
        for r in 0..self.rows.len() {
            let cb = self.d_init(c, self.basis[r]);
            if cb.is_zero() {
                continue;
            }
            for (j, a) in &self.rows[r] {
                self.d[*j] -= &cb * a;
            }
            self.obj += &cb * &self.rhs[r];
        }
    }

    fn d_init(&self, c: &[Rational], j: usize) -> Rational {
        c.get(j).cloned().unwrap_or(Rational::ZERO)
    }
}

/// Tableau at a feasible basis after phase one, reusable across objectives on the same rows.
pub(crate) struct FeasibleStart {
    t: Tableau,
    init_col: Vec<usize>,
    sign: Vec<Rational>,
    senses: Vec<Sense>,
    nx: usize,
}

pub(crate) enum PhaseOne {
    Infeasible(Certificate),
    Feasible(FeasibleStart),
}

impl FeasibleStart {
    /// Multipliers in `≤` orientation from reduced costs of the initial basis columns.
    fn duals(&self, t: &Tableau, c_init: &[Rational]) -> Vec<Rational> {
        (0..self.init_col.len())
            .map(|r| {
                let col = self.init_col[r];
                let u = &t.d[col] - t.d_init(c_init, col);
                let lambda = u * &self.sign[r];
                match self.senses[r] {
                    Sense::Ge => -lambda,
                    _ => lambda,
                }
            })
            .collect()
    }

    fn point_of(&self, t: &Tableau) -> Vec<Rational> {
        let mut x = vec![Rational::ZERO; self.nx];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < self.nx {
                x[b] = t.rhs[r].clone();
            }
        }
        x
    }

    pub(crate) fn point(&self) -> Vec<Rational> {
        self.point_of(&self.t)
    }

    /// Phase two from the shared feasible basis.
    pub(crate) fn optimize(&self, names: &[String], obj: &Objective, opts: &SolveOptions) -> Result<Certificate> {
        let mut t = self.t.clone();
        let mut c = vec![Rational::ZERO; self.nx];
        for (j, a) in &obj.terms {
            c[*j] = match obj.direction {
                Direction::Maximize => -a.clone(),
                Direction::Minimize => a.clone(),
            };
        }
        t.set_costs(&c);
        match t.run(opts, false)? {
            Step::Unbounded(q) => {
                let name = |j: usize| {
                    names
                        .get(j)
                        .cloned()
                        .unwrap_or_else(|| format!("slack#{}", j - self.nx))
                };
                let mut ray = vec![format!("increase {}", name(q))];
                for (r, row) in t.rows.iter().enumerate() {
                    if let Some(a) = coeff(row, q) {
                        if t.basis[r] < self.nx {
                            ray.push(format!("{} changes by {} per unit", name(t.basis[r]), -a.clone()));
                        }
                    }
                }
                Err(Error::Unbounded { ray })
            }
            Step::Optimal => {
                let value = match obj.direction {
                    Direction::Maximize => -t.obj.clone(),
                    Direction::Minimize => t.obj.clone(),
                };
                Ok(Certificate::Optimum {
                    point: self.point_of(&t),
                    value,
                    multipliers: self.duals(&t, &[]),
                })
            }
        }
    }
}

/// Builds the tableau and runs phase one.
pub(crate) fn phase_one(sys: &LinearSystem, opts: &SolveOptions) -> Result<PhaseOne> {
    let nx = sys.num_vars();
    let m = sys.rows.len();
    let mut ncols = nx;
    let mut rows: Vec<SparseRow> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut sign = Vec::with_capacity(m);
    let mut slack_of = vec![None; m];
    for (r, row) in sys.rows.iter().enumerate() {
        // flip so b >= 0, and flip `>= 0` rows so their slack can start in the basis
        let flip = row.rhs.is_negative() || (row.rhs.is_zero() && row.sense == Sense::Ge);
        let s = if flip { -Rational::ONE } else { Rational::ONE };
        let mut terms: SparseRow = row.terms.iter().map(|(j, a)| (*j, a * &s)).collect();
        if row.sense != Sense::Eq {
            let sigma = match row.sense {
                Sense::Le => s.clone(),
                _ => -s.clone(),
            };
            terms.push((ncols, sigma));
            slack_of[r] = Some(ncols);
            ncols += 1;
        }
        rows.push(terms);
        rhs.push(&row.rhs * &s);
        sign.push(s);
    }
    let art_start = ncols;
    let mut init_col = vec![0; m];
    let mut phase1 = vec![Rational::ZERO; ncols];
    for r in 0..m {
        let slack_basic = slack_of[r].is_some_and(|c| coeff(&rows[r], c).is_some_and(Rational::is_positive));
        if slack_basic {
            init_col[r] = slack_of[r].expect("slack");
        } else {
            init_col[r] = ncols;
            rows[r].push((ncols, Rational::ONE));
            phase1.push(Rational::ONE);
            ncols += 1;
        }
    }
    let mut init_rank = vec![None; ncols];
    for (r, &c) in init_col.iter().enumerate() {
        init_rank[c] = Some(r);
    }
    let t = Tableau {
        rows,
        rhs,
        basis: init_col.clone(),
        d: Vec::new(),
        obj: Rational::ZERO,
        ncols,
        art_start,
        init_rank,
    };
    let mut start = FeasibleStart {
        t,
        init_col,
        sign,
        senses: sys.rows.iter().map(|r| r.sense).collect(),
        nx,
    };

    if ncols > art_start {
        let t = &mut start.t;
        t.set_costs(&phase1);
        match t.run(opts, true)? {
            Step::Optimal => {}
            Step::Unbounded(_) => unreachable!("phase one is bounded below by zero"),
        }
        if t.obj.is_positive() {
            // d - c_init on the initial basis is minus the simplex dual, i.e. the Farkas combination
            let y = start.duals(&start.t, &phase1);
            let (_, rhs) = super::system::combine(sys, &y);
            return Ok(PhaseOne::Infeasible(Certificate::FarkasInfeasible {
                multipliers: y,
                delta: -rhs,
            }));
        }
        // drive zero-level artificials out of the basis
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(&(j, _)) = t.rows[r].iter().find(|(j, _)| *j < art_start) {
                    t.pivot(r, j);
                }
            }
        }
    }
    Ok(PhaseOne::Feasible(start))
}

/// Simplex without presolve; the caller verifies.
pub(crate) fn solve_raw(sys: &LinearSystem, opts: &SolveOptions) -> Result<Certificate> {
    match phase_one(sys, opts)? {
        PhaseOne::Infeasible(cert) => Ok(cert),
        PhaseOne::Feasible(start) => match &sys.objective {
            None => Ok(Certificate::FeasiblePoint { point: start.point() }),
            Some(obj) => start.optimize(&sys.names, obj, opts),
        },
    }
}
