use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use super::encode::{encode_axioms, AssignmentSystem, Axiom};
use super::simplex::{lp_solve, lp_solve_objectives, PivotRule, SolveOptions};
use super::system::{combine, verify, Certificate, Direction, LinearSystem, Objective, Sense};
use crate::model::{Assignment, ObjectId, ObjectSet, Permutation, Preference, Profile, ProfileSpace};
use crate::{Error, Rational, Result};

/// The six n=3 profiles whose SP+EF+CFE system is infeasible, in the order A–F.
pub fn impossibility_profiles() -> Vec<(char, Profile)> {
    [
        ('A', ["abc", "bac", "cab"]),
        ('B', ["abc", "abc", "cab"]),
        ('C', ["abc", "acb", "cab"]),
        ('D', ["bac", "acb", "cab"]),
        ('E', ["abc", "acb", "acb"]),
        ('F', ["bac", "acb", "acb"]),
    ]
    .into_iter()
    .map(|(name, r)| (name, Profile::from_rankings(&r).expect("fixed profiles")))
    .collect()
}

fn named(names: &[char]) -> Vec<Profile> {
    impossibility_profiles()
        .into_iter()
        .filter(|(c, _)| names.contains(c))
        .map(|(_, p)| p)
        .collect()
}

/// Outcome of the SP+EF+CFE impossibility check at n=3.
#[derive(Debug, Clone)]
pub struct Theorem1Report {
    pub encoded: AssignmentSystem,
    /// Verified Farkas certificate for the six-profile system.
    pub certificate: Certificate,
    /// A verified feasible point for the same profiles with one axiom family removed.
    pub drop_one: Vec<(Axiom, Certificate)>,
    pub full: FullConfirmation,
}

/// The six-profile certificate lifted (zeros elsewhere) into the system over all profiles.
#[derive(Debug, Clone)]
pub struct FullConfirmation {
    pub profiles: usize,
    pub variables: usize,
    pub rows: usize,
    pub certificate: Certificate,
    /// Result of solving the full system from scratch, when requested.
    pub solved: Option<Certificate>,
}

/// Builds and solves the SP+EF+CFE system over the six profiles, checks that dropping any
/// one family leaves it feasible, and re-verifies the certificate on the full 216-profile
/// system. With `solve_full`, the full system is also solved independently.
pub fn certify_theorem1(solve_full: bool) -> Result<Theorem1Report> {
    let axioms = [Axiom::Sp, Axiom::Ef, Axiom::Cfe];
    let profiles = named(&['A', 'B', 'C', 'D', 'E', 'F']);
    let encoded = encode_axioms(&profiles, &axioms)?;
    let certificate = lp_solve(&encoded.system)?;
    if !certificate.is_infeasible() {
        let point = certificate.point().expect("feasible certificates carry a point");
        let shown: Vec<String> = encoded
            .profiles
            .iter()
            .map(|p| {
                format!(
                    "{}:\n{}",
                    p.code(),
                    encoded
                        .assignment_at(point, p)
                        .map(|a| format!("{a:?}"))
                        .unwrap_or_default()
                )
            })
            .collect();
        return Err(Error::Certificate(format!(
            "SP+EF+CFE system is feasible, contradicting the impossibility:\n{}",
            shown.join("\n")
        )));
    }

    let mut drop_one = Vec::new();
    for dropped in axioms {
        let kept: Vec<Axiom> = axioms.iter().copied().filter(|a| *a != dropped).collect();
        let sys = encode_axioms(&profiles, &kept)?;
        let cert = lp_solve(&sys.system)?;
        if cert.is_infeasible() {
            return Err(Error::Certificate(format!(
                "system without {dropped} is already infeasible"
            )));
        }
        drop_one.push((dropped, cert));
    }

    let all: Vec<Profile> = ProfileSpace::new(3)?.iter().collect();
    let big = encode_axioms(&all, &axioms)?;
    let lifted = lift_by_label(&encoded.system, &certificate, &big.system)?;
    let solved = if solve_full {
        let c = lp_solve(&big.system)?;
        if !c.is_infeasible() {
            return Err(Error::Certificate("full SP+EF+CFE system solved as feasible".into()));
        }
        Some(c)
    } else {
        None
    };
    Ok(Theorem1Report {
        full: FullConfirmation {
            profiles: big.closure_size(),
            variables: big.system.num_vars(),
            rows: big.system.rows.len(),
            certificate: lifted,
            solved,
        },
        encoded,
        certificate,
        drop_one,
    })
}

/// Carries Farkas multipliers from `small` to `big` by row label, with zeros on rows of
/// `big` absent from `small`, then re-verifies against `big`.
pub fn lift_by_label(small: &LinearSystem, cert: &Certificate, big: &LinearSystem) -> Result<Certificate> {
    let Certificate::FarkasInfeasible { multipliers, delta } = cert else {
        return Err(Error::Certificate("only Farkas certificates can be lifted".into()));
    };
    let row_of: HashMap<&str, usize> = big
        .rows
        .iter()
        .enumerate()
        .map(|(k, r)| (r.label.as_str(), k))
        .collect();
    let var_of: HashMap<&str, usize> = big.names.iter().enumerate().map(|(k, v)| (v.as_str(), k)).collect();
    let mut y = vec![Rational::ZERO; big.rows.len()];
    for (row, m) in small.rows.iter().zip(multipliers) {
        if m.is_zero() {
            continue;
        }
        let k = *row_of
            .get(row.label.as_str())
            .ok_or_else(|| Error::Certificate(format!("row {:?} missing from the larger system", row.label)))?;
        let same = big.rows[k].sense == row.sense
            && big.rows[k].rhs == row.rhs
            && big.rows[k].terms.len() == row.terms.len()
            && row
                .terms
                .iter()
                .zip(&big.rows[k].terms)
                .all(|((j, a), (j2, b))| var_of.get(small.names[*j].as_str()) == Some(j2) && a == b);
        if !same {
            return Err(Error::Certificate(format!(
                "row {:?} differs between the systems",
                row.label
            )));
        }
        y[k] = m.clone();
    }
    let lifted = Certificate::FarkasInfeasible {
        multipliers: y,
        delta: delta.clone(),
    };
    verify(big, &lifted)?;
    Ok(lifted)
}

/// Plain-text audit artifact: rows with nonzero multipliers, the combined inequality and
/// the resulting contradiction `0 <= -delta`.
pub fn certificate_text(sys: &LinearSystem, cert: &Certificate) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {} certificate", cert.kind());
    let _ = writeln!(out, "# variables: {}  rows: {}", sys.num_vars(), sys.rows.len());
    match cert {
        Certificate::FarkasInfeasible { multipliers, delta } => {
            let _ = writeln!(out, "# multiplier  label  row (>= rows enter negated)");
            for (r, m) in sys.rows.iter().zip(multipliers) {
                if !m.is_zero() {
                    let _ = writeln!(out, "{m}\t{}\t{}", r.label, sys.render_row(r));
                }
            }
            let (w, rhs) = combine(sys, multipliers);
            let lhs: Vec<String> = w
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| format!("{c}*{}", sys.names[j]))
                .collect();
            let lhs = if lhs.is_empty() {
                "0".to_string()
            } else {
                lhs.join(" + ")
            };
            let _ = writeln!(out, "combined: {lhs} <= {rhs}");
            let _ = writeln!(out, "all combined coefficients are >= 0 and x >= 0, so 0 <= {rhs}");
            let _ = writeln!(out, "contradiction: 0 <= -{delta}");
        }
        Certificate::FeasiblePoint { point } | Certificate::Optimum { point, .. } => {
            for (j, v) in point.iter().enumerate() {
                if !v.is_zero() {
                    let _ = writeln!(out, "{}\t{v}", sys.names[j]);
                }
            }
            if let Some(v) = cert.value() {
                let _ = writeln!(out, "value: {v}");
            }
        }
    }
    out
}

/// Exact range of one variable over a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn range_of(sys: &LinearSystem, var: usize) -> Result<Interval> {
    let bound = |dir| -> Result<Rational> {
        let mut s = sys.clone();
        s.set_objective(dir, [(var, Rational::ONE)]);
        match lp_solve(&s)? {
            Certificate::Optimum { value, .. } => Ok(value),
            other => Err(Error::Certificate(format!("expected an optimum, got {}", other.kind()))),
        }
    };
    Ok(Interval {
        lo: bound(Direction::Minimize)?,
        hi: bound(Direction::Maximize)?,
    })
}

/// The forced Profile C assignment and the range of `y = P^C[2][b]` before Profile D is added.
#[derive(Debug, Clone)]
pub struct ProfileCReport {
    pub profile: Profile,
    pub assignment: Assignment,
    /// Range of `y` over profiles A–C from the rows on agents 2 and 3 alone (agent 1's `b`
    /// and `c` cells at C left unconstrained).
    pub local_interval: Interval,
    /// Range of `y` over the full A–C system, where stochasticity already bounds it.
    pub system_interval: Interval,
    /// Range of `y` once Profile D is added; collapses to a point.
    pub final_interval: Interval,
}

fn with_pin(enc: &mut AssignmentSystem) {
    let a = &named(&['A'])[0];
    for (i, obj) in [0usize, 1, 2].into_iter().enumerate() {
        let v = enc.var(a, i, obj).expect("profile A registered");
        enc.system.add_row(
            [(v, Rational::ONE)],
            Sense::Eq,
            Rational::ONE,
            format!("pin {} i={}", a.code(), i + 1),
        );
    }
}

/// Derives the Profile C assignment forced by SP+EF+CFE over profiles A–D (with profile A
/// pinned to its top choices) and checks that every cell is uniquely determined.
pub fn derive_profile_c() -> Result<ProfileCReport> {
    let axioms = [Axiom::Sp, Axiom::Ef, Axiom::Cfe];
    let c = named(&['C']).remove(0);

    let mut pre = encode_axioms(&named(&['A', 'B', 'C']), &axioms)?;
    with_pin(&mut pre);
    let y_pre = pre.var(&c, 1, 1).expect("C registered");
    let system_interval = range_of(&pre.system, y_pre)?;
    let loose: Vec<usize> = [1usize, 2]
        .iter()
        .map(|&a| pre.var(&c, 0, a).expect("C registered"))
        .collect();
    let mut local = pre.system.clone();
    local.rows.retain(|r| !r.terms.iter().any(|(j, _)| loose.contains(j)));
    let local_interval = range_of(&local, y_pre)?;

    let mut full = encode_axioms(&named(&['A', 'B', 'C', 'D']), &axioms)?;
    with_pin(&mut full);
    let y = full.var(&c, 1, 1).expect("C registered");
    let final_interval = range_of(&full.system, y)?;

    let mut cells = Vec::with_capacity(9);
    for i in 0..3 {
        for a in 0..3 {
            let r = range_of(&full.system, full.var(&c, i, a).expect("C registered"))?;
            if r.lo != r.hi {
                return Err(Error::Certificate(format!(
                    "P^C[{}][{}] is not unique: {r}",
                    i + 1,
                    c.objects().token(ObjectId(a))
                )));
            }
            cells.push(r.lo);
        }
    }
    Ok(ProfileCReport {
        assignment: Assignment::from_cells(3, cells)?,
        profile: c,
        local_interval,
        system_interval,
        final_interval,
    })
}

/// Maximum of one cell over its symmetry orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitMax {
    pub profile: Profile,
    /// 0-based agent and object of the representative cell
    pub agent: usize,
    pub object: usize,
    /// number of `(profile, agent, object)` cells in the orbit
    pub orbit_size: usize,
    pub value: Rational,
    /// solver point attaining the maximum
    pub point: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct StrongHardnessReport {
    pub axioms: Vec<Axiom>,
    /// SP+EF+NEUTRAL exactly; other configurations are exploratory.
    pub theorem_configuration: bool,
    pub maxima: Vec<OrbitMax>,
    pub variables: usize,
    pub reduced_variables: usize,
    pub elapsed: Duration,
}

impl StrongHardnessReport {
    pub fn all_below_one(&self) -> bool {
        self.maxima.iter().all(|m| m.value < Rational::ONE)
    }

    pub fn largest(&self) -> Option<&OrbitMax> {
        self.maxima.iter().max_by(|a, b| a.value.cmp(&b.value))
    }
}

/// Smallest image of `(profile, i, a)` under simultaneous relabelling of agents and objects.
fn orbit_key(
    profile: &Profile,
    i: usize,
    a: usize,
    agent_perms: &[Permutation],
    object_perms: &[Permutation],
) -> (usize, usize, usize) {
    let mut best = (usize::MAX, 0, 0);
    for sigma in agent_perms {
        let moved = profile.permute_agents(sigma).expect("same size");
        let new_i = sigma.inverse().apply(i);
        for pi in object_perms {
            let img = moved.permute_objects(pi).expect("same size");
            best = best.min((img.index(), new_i, pi.apply(a)));
        }
    }
    best
}

/// Maximizes every cell `P^≻[i][a]` at n=3 under `axioms` over all 216 profiles, one LP per
/// orbit of the agent × object relabelling group (the encoded system is invariant under both).
/// Independent LPs run on the rayon pool. With the theorem configuration SP+EF+NEUTRAL, a
/// maximum equal to one is a hard error.
pub fn certify_strong_hardness(axioms: &[Axiom], budget: Option<Duration>) -> Result<StrongHardnessReport> {
    let start = Instant::now();
    let mut sorted = axioms.to_vec();
    sorted.sort();
    sorted.dedup();
    let theorem_configuration = sorted == [Axiom::Sp, Axiom::Ef, Axiom::Neutral];
    let space = ProfileSpace::new(3)?;
    let all: Vec<Profile> = space.iter().collect();
    let enc = encode_axioms(&all, &sorted)?;
    let perms = Permutation::all(3);

    let mut orbits: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for p in &all {
        for i in 0..3 {
            for a in 0..3 {
                *orbits.entry(orbit_key(p, i, a, &perms, &perms)).or_default() += 1;
            }
        }
    }
    // Bland's rule stalls for thousands of degenerate pivots on these objectives
    let opts = SolveOptions {
        pivot: PivotRule::Dantzig,
        deadline: budget.map(|b| start + b),
        ..SolveOptions::default()
    };
    let reduced_variables = super::presolve::presolve(&enc.system).reduced.num_vars();
    let jobs: Vec<((usize, usize, usize), usize)> = orbits.into_iter().collect();
    let objectives: Vec<Objective> = jobs
        .iter()
        .map(|&((idx, i, a), _)| {
            let v = enc.var(&space.profile(idx), i, a).expect("all profiles registered");
            Objective::new(Direction::Maximize, [(v, Rational::ONE)])
        })
        .collect();
    let certs = lp_solve_objectives(&enc.system, &objectives, &opts)?;
    let maxima: Vec<OrbitMax> = jobs
        .iter()
        .zip(certs)
        .map(|(&((idx, i, a), size), cert)| match cert {
            Certificate::Optimum { value, point, .. } => Ok(OrbitMax {
                profile: space.profile(idx),
                agent: i,
                object: a,
                orbit_size: size,
                value,
                point,
            }),
            other => Err(Error::Certificate(format!("expected an optimum, got {}", other.kind()))),
        })
        .collect::<Result<_>>()?;

    let report = StrongHardnessReport {
        axioms: sorted,
        theorem_configuration,
        variables: enc.system.num_vars(),
        reduced_variables,
        maxima,
        elapsed: start.elapsed(),
    };
    if theorem_configuration {
        if let Some(m) = report.maxima.iter().find(|m| m.value >= Rational::ONE) {
            let attained = enc.assignment_at(&m.point, &m.profile)?;
            return Err(Error::Certificate(format!(
                "P[{}][{}] reaches 1 at {}; assignment {:?}",
                m.agent + 1,
                m.profile.objects().token(ObjectId(m.object)),
                m.profile.code(),
                attained
            )));
        }
    }
    Ok(report)
}

/// Member of the n-agent family whose first three agents rank `a1, a2, a3` (in the orders
/// given by `top_block`) ahead of `a4..an`, while agent `i > 3` reports
/// `a_i, …, a_n, a_1, …, a_{i−1}`.
pub fn family_profile(n: usize, top_block: &[Preference]) -> Result<Profile> {
    if n <= 3 {
        return Err(Error::Invalid(format!("family profiles need n > 3, got {n}")));
    }
    if top_block.len() != 3 || top_block.iter().any(|p| p.len() != 3) {
        return Err(Error::Invalid(
            "top block must hold three rankings of a1, a2, a3".into(),
        ));
    }
    let objects = ObjectSet::indexed(n)?;
    let mut prefs = Vec::with_capacity(n);
    for p in top_block {
        let order = p.order().iter().copied().chain((3..n).map(ObjectId)).collect();
        prefs.push(Preference::new(order)?);
    }
    for i in 3..n {
        let order = (i..n).chain(0..i).map(ObjectId).collect();
        prefs.push(Preference::new(order)?);
    }
    Profile::new(objects, prefs)
}

/// Cells `P[i][a_j]` with `i ≤ 3 < j` that are nonzero; empty means the zero-allocation
/// condition on the family holds.
pub fn family_zero_allocation_violations(p: &Assignment) -> Vec<(usize, usize, Rational)> {
    let n = p.n();
    let mut out = Vec::new();
    for i in 0..3 {
        for a in 3..n {
            if !p.get(i, a).is_zero() {
                out.push((i, a, p.get(i, a).clone()));
            }
        }
    }
    out
}
