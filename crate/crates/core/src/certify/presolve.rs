use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use super::simplex::{phase_one, solve_raw, PhaseOne, SolveOptions};
use super::system::{combine, normalize_terms, Certificate, LinearSystem, Objective, Sense};
use crate::{Rational, Result};

/// A tree edge `x_child = x_parent` given by `row`, with `alpha` the child's coefficient.
struct Edge {
    child: usize,
    parent: usize,
    row: usize,
    alpha: Rational,
}

/// System with `x_u − x_v = 0` rows contracted and duplicate or trivial rows removed.
pub(crate) struct Presolved {
    pub reduced: LinearSystem,
    pub class_of: Vec<usize>,
    /// original row behind each reduced row
    pub row_origin: Vec<usize>,
    /// in BFS order from each class root
    edges: Vec<Edge>,
    /// a row that became `0 (sense) b` and fails
    pub infeasible_row: Option<usize>,
}

fn find(parent: &mut [usize], mut u: usize) -> usize {
    while parent[u] != u {
        parent[u] = parent[parent[u]];
        u = parent[u];
    }
    u
}

fn merge_pair(row: &super::system::Row) -> Option<(usize, usize)> {
    if row.sense != Sense::Eq || !row.rhs.is_zero() || row.terms.len() != 2 {
        return None;
    }
    let (u, a) = &row.terms[0];
    let (v, b) = &row.terms[1];
    let one = Rational::ONE;
    ((a == &one && b == &-one.clone()) || (a == &-one.clone() && b == &one)).then_some((*u, *v))
}

pub(crate) fn presolve(sys: &LinearSystem) -> Presolved {
    let nx = sys.num_vars();
    let mut uf: Vec<usize> = (0..nx).collect();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nx];
    let mut is_edge = vec![false; sys.rows.len()];
    for (r, row) in sys.rows.iter().enumerate() {
        if let Some((u, v)) = merge_pair(row) {
            let (ru, rv) = (find(&mut uf, u), find(&mut uf, v));
            if ru != rv {
                uf[ru.max(rv)] = ru.min(rv);
                adj[u].push((v, r));
                adj[v].push((u, r));
                is_edge[r] = true;
            }
        }
    }

    // classes numbered by smallest member; BFS from that member
    let mut class_of = vec![usize::MAX; nx];
    let mut edges = Vec::new();
    let mut reduced = LinearSystem::new();
    for root in 0..nx {
        if class_of[root] != usize::MAX {
            continue;
        }
        let c = reduced.add_var(sys.names[root].clone());
        class_of[root] = c;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, r) in &adj[u] {
                if class_of[v] == usize::MAX {
                    class_of[v] = c;
                    let alpha = sys.rows[r]
                        .terms
                        .iter()
                        .find(|(j, _)| *j == v)
                        .map(|(_, a)| a.clone())
                        .expect("edge row mentions both ends");
                    edges.push(Edge {
                        child: v,
                        parent: u,
                        row: r,
                        alpha,
                    });
                    queue.push_back(v);
                }
            }
        }
    }

    let mut seen: HashMap<(Vec<(usize, Rational)>, Sense, Rational), usize> = HashMap::new();
    let mut row_origin = Vec::new();
    let mut infeasible_row = None;
    for (r, row) in sys.rows.iter().enumerate() {
        if is_edge[r] {
            continue;
        }
        let terms = normalize_terms(row.terms.iter().map(|(j, a)| (class_of[*j], a.clone())));
        if terms.is_empty() {
            let ok = match row.sense {
                Sense::Le => !row.rhs.is_negative(),
                Sense::Ge => !row.rhs.is_positive(),
                Sense::Eq => row.rhs.is_zero(),
            };
            if !ok && infeasible_row.is_none() {
                infeasible_row = Some(r);
            }
            continue;
        }
        let key = (terms, row.sense, row.rhs.clone());
        if seen.contains_key(&key) {
            continue;
        }
        let (terms, sense, rhs) = key.clone();
        let idx = reduced.add_row(terms, sense, rhs, row.label.clone());
        seen.insert(key, idx);
        row_origin.push(r);
    }
    if let Some(obj) = &sys.objective {
        reduced.objective = Some(Objective {
            direction: obj.direction,
            terms: normalize_terms(obj.terms.iter().map(|(j, a)| (class_of[*j], a.clone()))),
        });
    }
    Presolved {
        reduced,
        class_of,
        row_origin,
        edges,
        infeasible_row,
    }
}

impl Presolved {
    /// Original-row multipliers from reduced ones, with tree edges absorbing the
    /// per-variable excess so each class keeps only its aggregate at the root.
    fn lift_multipliers(&self, sys: &LinearSystem, mut y: Vec<Rational>, with_objective: bool) -> Vec<Rational> {
        let (w, _) = combine(sys, &y);
        let mut excess = w;
        if let Some(obj) = sys.objective.as_ref().filter(|_| with_objective) {
            for (j, c) in obj.max_terms() {
                excess[j] -= c;
            }
        }
        for e in self.edges.iter().rev() {
            let m = std::mem::replace(&mut excess[e.child], Rational::ZERO);
            if m.is_zero() {
                continue;
            }
            // contribution y*alpha at child, -y*alpha at parent
            y[e.row] = -(&m * &e.alpha);
            excess[e.parent] += m;
        }
        y
    }

    fn lift_point(&self, x: &[Rational]) -> Vec<Rational> {
        self.class_of.iter().map(|&c| x[c].clone()).collect()
    }

    pub fn lift(&self, sys: &LinearSystem, cert: Certificate) -> Certificate {
        let expand = |yr: &[Rational]| {
            let mut y = vec![Rational::ZERO; sys.rows.len()];
            for (k, v) in yr.iter().enumerate() {
                y[self.row_origin[k]] = v.clone();
            }
            y
        };
        match cert {
            Certificate::FeasiblePoint { point } => Certificate::FeasiblePoint {
                point: self.lift_point(&point),
            },
            Certificate::Optimum {
                point,
                value,
                multipliers,
            } => Certificate::Optimum {
                point: self.lift_point(&point),
                value,
                multipliers: self.lift_multipliers(sys, expand(&multipliers), true),
            },
            Certificate::FarkasInfeasible { multipliers, .. } => {
                let y = self.lift_multipliers(sys, expand(&multipliers), false);
                let (_, rhs) = combine(sys, &y);
                Certificate::FarkasInfeasible {
                    multipliers: y,
                    delta: -rhs,
                }
            }
        }
    }

    fn trivial_farkas(&self, sys: &LinearSystem, r: usize) -> Certificate {
        let mut y = vec![Rational::ZERO; sys.rows.len()];
        // `0 <= b` with b < 0 after orienting; Eq rows may need the negative multiplier
        let oriented = &sys.rows[r].rhs * sys.rows[r].sense.le_sign();
        y[r] = if oriented.is_negative() {
            Rational::ONE
        } else {
            -Rational::ONE
        };
        let y = self.lift_multipliers(sys, y, false);
        let (_, rhs) = combine(sys, &y);
        Certificate::FarkasInfeasible {
            multipliers: y,
            delta: -rhs,
        }
    }
}

pub(crate) fn solve_presolved(sys: &LinearSystem, opts: &SolveOptions) -> Result<Certificate> {
    let p = presolve(sys);
    if let Some(r) = p.infeasible_row {
        return Ok(p.trivial_farkas(sys, r));
    }
    let cert = solve_raw(&p.reduced, opts)?;
    Ok(p.lift(sys, cert))
}

pub(crate) fn solve_presolved_many(
    sys: &LinearSystem,
    objectives: &[Objective],
    opts: &SolveOptions,
) -> Result<Vec<Certificate>> {
    let p = presolve(sys);
    if let Some(r) = p.infeasible_row {
        return Ok(vec![p.trivial_farkas(sys, r); objectives.len()]);
    }
    match phase_one(&p.reduced, opts)? {
        PhaseOne::Infeasible(cert) => {
            let lifted = p.lift(sys, cert);
            Ok(vec![lifted; objectives.len()])
        }
        PhaseOne::Feasible(start) => objectives
            .par_iter()
            .map(|obj| {
                let reduced = Objective {
                    direction: obj.direction,
                    terms: normalize_terms(obj.terms.iter().map(|(j, a)| (p.class_of[*j], a.clone()))),
                };
                let cert = start.optimize(&p.reduced.names, &reduced, opts)?;
                let mut with = sys.clone();
                with.objective = Some(obj.clone());
                Ok(p.lift(&with, cert))
            })
            .collect(),
    }
}
