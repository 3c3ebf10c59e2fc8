//! Exhaustive axiom checkers, efficiency tests for single assignments, and dominance between
//! mechanisms.
//!
//! Mechanism-level checks first evaluate the mechanism on every profile of `R^n` (an
//! [`OutputTable`]) and then scan profiles in canonical index order. Inner loops run in a
//! fixed order and the parallel scan keeps the first hit by profile index, so the reported
//! witness is the same with or without threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::certify::{lp_solve, Certificate, Direction, LinearSystem, Sense};
use crate::lottery::hull_membership;
use crate::mechanisms::Mechanism;
use crate::model::{
    first_sd_violation, sd_dominates, Assignment, ObjectId, Permutation, Preference, Profile, ProfileSpace,
};
use crate::{Error, Rational, Result};

/// Largest `n` for which the Pareto-optimal permutations are enumerated.
pub const PARETO_CAP: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    StrategyProof,
    EnvyFree,
    EqualTreatment,
    Neutral,
    Anonymous,
    Separable,
    SwapMonotonic,
    UpperInvariant,
    LowerInvariant,
    ContentionFreeEfficient,
    ExPostEfficient,
    OrdinalEfficient,
}

impl Property {
    pub const ALL: [Property; 12] = [
        Property::StrategyProof,
        Property::EnvyFree,
        Property::EqualTreatment,
        Property::Neutral,
        Property::Anonymous,
        Property::Separable,
        Property::SwapMonotonic,
        Property::UpperInvariant,
        Property::LowerInvariant,
        Property::ContentionFreeEfficient,
        Property::ExPostEfficient,
        Property::OrdinalEfficient,
    ];

    /// Command-line name.
    pub fn code(self) -> &'static str {
        match self {
            Property::StrategyProof => "sp",
            Property::EnvyFree => "ef",
            Property::EqualTreatment => "ete",
            Property::Neutral => "neutral",
            Property::Anonymous => "anon",
            Property::Separable => "sep",
            Property::SwapMonotonic => "swap",
            Property::UpperInvariant => "upper",
            Property::LowerInvariant => "lower",
            Property::ContentionFreeEfficient => "cfe",
            Property::ExPostEfficient => "expost",
            Property::OrdinalEfficient => "ordinal",
        }
    }

    /// Column header used in sweep tables.
    pub fn label(self) -> &'static str {
        match self {
            Property::StrategyProof => "SP",
            Property::EnvyFree => "EF",
            Property::EqualTreatment => "ETE",
            Property::Neutral => "neutral",
            Property::Anonymous => "anon",
            Property::Separable => "sep",
            Property::SwapMonotonic => "swap",
            Property::UpperInvariant => "upper",
            Property::LowerInvariant => "lower",
            Property::ContentionFreeEfficient => "CFE",
            Property::ExPostEfficient => "ex-post",
            Property::OrdinalEfficient => "ordinal",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Property> {
        let s = s.trim().to_ascii_lowercase();
        Property::ALL
            .into_iter()
            .find(|p| p.code() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown property {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Serial,
    #[default]
    Parallel,
}

/// A concrete instance violating a property. Which fields are set depends on the property:
/// `other` is the misreport, permuted or deviation profile, `permutation` the relabelling,
/// `prefix` the 1-based prefix length whose sum falls short.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub property: Property,
    pub profile: Profile,
    pub other: Option<Profile>,
    pub agent: Option<usize>,
    pub other_agent: Option<usize>,
    pub permutation: Option<Permutation>,
    pub object: Option<ObjectId>,
    pub prefix: Option<usize>,
    /// An assignment dominating the checked one (ordinal efficiency).
    pub dominating: Option<Assignment>,
    /// Farkas certificate of non-membership in the Pareto hull (ex-post efficiency).
    pub certificate: Option<Certificate>,
    pub detail: String,
}

impl Witness {
    fn new(property: Property, profile: Profile) -> Witness {
        Witness {
            property,
            profile,
            other: None,
            agent: None,
            other_agent: None,
            permutation: None,
            object: None,
            prefix: None,
            dominating: None,
            certificate: None,
            detail: String::new(),
        }
    }

    fn agent_pref(&self) -> Result<&Preference> {
        let i = self
            .agent
            .ok_or_else(|| Error::Invalid("witness has no agent".into()))?;
        Ok(self.profile.pref(i))
    }

    fn need<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field
            .as_ref()
            .ok_or_else(|| Error::Invalid(format!("witness has no {name}")))
    }

    /// Re-evaluates `mech` on the recorded instance; `true` when the violation reproduces.
    pub fn replay(&self, mech: &dyn Mechanism) -> Result<bool> {
        let p = mech.evaluate(&self.profile)?;
        let n = p.n();
        Ok(match self.property {
            Property::StrategyProof => {
                let i = *Witness::need(&self.agent, "agent")?;
                let q = mech.evaluate(Witness::need(&self.other, "misreport")?)?;
                first_sd_violation(p.row(i), q.row(i), self.agent_pref()?).is_some()
            }
            Property::EnvyFree => {
                let (i, j) = (
                    *Witness::need(&self.agent, "agent")?,
                    *Witness::need(&self.other_agent, "other agent")?,
                );
                first_sd_violation(p.row(i), p.row(j), self.agent_pref()?).is_some()
            }
            Property::EqualTreatment => {
                let (i, j) = (
                    *Witness::need(&self.agent, "agent")?,
                    *Witness::need(&self.other_agent, "other agent")?,
                );
                self.profile.pref(i) == self.profile.pref(j) && p.row(i) != p.row(j)
            }
            Property::Neutral => {
                let pi = Witness::need(&self.permutation, "permutation")?;
                let q = mech.evaluate(&self.profile.permute_objects(pi)?)?;
                (0..n).any(|i| (0..n).any(|a| p.get(i, a) != q.get(i, pi.apply(a))))
            }
            Property::Anonymous => {
                let s = Witness::need(&self.permutation, "permutation")?;
                let q = mech.evaluate(&self.profile.permute_agents(s)?)?;
                (0..n).any(|k| (0..n).any(|a| q.get(k, a) != p.get(s.apply(k), a)))
            }
            Property::Separable => {
                let i = *Witness::need(&self.agent, "agent")?;
                let dev = Witness::need(&self.other, "deviation profile")?;
                let (lhs, rhs) = separability_sides(mech, &self.profile, dev, i)?;
                lhs != rhs
            }
            Property::SwapMonotonic | Property::UpperInvariant | Property::LowerInvariant => {
                let i = *Witness::need(&self.agent, "agent")?;
                let other = Witness::need(&self.other, "swapped profile")?;
                let pos = swap_position(self.profile.pref(i), other.pref(i))
                    .ok_or_else(|| Error::Invalid("the reports differ by more than one adjacent swap".into()))?;
                let q = mech.evaluate(other)?;
                !swap_condition(self.property, p.row(i), q.row(i), self.profile.pref(i), pos)
            }
            Property::ContentionFreeEfficient => {
                self.profile.is_contention_free() && (0..n).any(|i| !p.get(i, self.profile.pref(i).top().0).is_one())
            }
            Property::ExPostEfficient => !check_ex_post_efficient(&p, &self.profile)?.holds,
            Property::OrdinalEfficient => !check_ordinal_efficient(&p, &self.profile)?.holds,
        })
    }

    /// Indented `key: value` lines.
    pub fn render(&self) -> String {
        let objects = self.profile.objects();
        let mut out = format!("  property: {}\n  profile: {}\n", self.property, self.profile.code());
        if let Some(i) = self.agent {
            out += &format!("  agent: {}\n", i + 1);
        }
        if let Some(j) = self.other_agent {
            out += &format!("  other agent: {}\n", j + 1);
        }
        if let Some(o) = &self.other {
            out += &format!("  other profile: {}\n", o.code());
        }
        if let Some(pi) = &self.permutation {
            out += &format!("  permutation: {pi}\n");
        }
        if let Some(a) = self.object {
            out += &format!("  object: {}\n", objects.token(a));
        }
        if let Some(t) = self.prefix {
            out += &format!("  prefix: {t}\n");
        }
        if let Some(q) = &self.dominating {
            out += "  dominating assignment:\n";
            for row in q.rows() {
                out += &format!(
                    "    {}\n",
                    row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
                );
            }
        }
        if let Some(Certificate::FarkasInfeasible { delta, .. }) = &self.certificate {
            out += &format!("  farkas delta: {delta}\n");
        }
        out += &format!("  detail: {}\n", self.detail);
        out
    }

    pub fn to_json(&self) -> Value {
        let objects = self.profile.objects();
        json!({
            "property": self.property.code(),
            "profile": self.profile.code(),
            "agent": self.agent.map(|i| i + 1),
            "other_agent": self.other_agent.map(|j| j + 1),
            "other_profile": self.other.as_ref().map(Profile::code),
            "permutation": self.permutation.as_ref().map(|p| p.to_string()),
            "object": self.object.map(|a| objects.token(a).to_string()),
            "prefix": self.prefix,
            "dominating": self.dominating.as_ref().map(|q| {
                q.rows().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()
            }),
            "farkas_delta": match &self.certificate {
                Some(Certificate::FarkasInfeasible { delta, .. }) => Some(delta.to_string()),
                _ => None,
            },
            "detail": self.detail,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Profiles in scope.
    pub profiles: usize,
}

impl Verdict {
    fn from_witness(property: Property, witness: Option<Witness>, profiles: usize) -> Verdict {
        Verdict {
            property,
            holds: witness.is_none(),
            witness,
            profiles,
        }
    }

    pub fn mark(&self) -> &'static str {
        if self.holds {
            "✓"
        } else {
            "✗"
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "property": self.property.code(),
            "holds": self.holds,
            "profiles": self.profiles,
            "witness": self.witness.as_ref().map(Witness::to_json),
        })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} profiles)",
            self.property.label(),
            if self.holds { "holds" } else { "fails" },
            self.profiles
        )?;
        if let Some(w) = &self.witness {
            writeln!(f, "witness:")?;
            f.write_str(&w.render())?;
        }
        Ok(())
    }
}

/// Swap-monotonicity, upper invariance and lower invariance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapReport {
    pub swap_monotonic: Verdict,
    pub upper_invariant: Verdict,
    pub lower_invariant: Verdict,
}

impl SwapReport {
    pub fn all_hold(&self) -> bool {
        self.swap_monotonic.holds && self.upper_invariant.holds && self.lower_invariant.holds
    }

    pub fn verdicts(&self) -> [&Verdict; 3] {
        [&self.swap_monotonic, &self.upper_invariant, &self.lower_invariant]
    }
}

/// Outputs of one mechanism on every profile of `R^n`, indexed like [`ProfileSpace`].
pub struct OutputTable {
    space: ProfileSpace,
    outputs: Vec<Assignment>,
}

impl OutputTable {
    pub fn build(mech: &dyn Mechanism, n: usize, par: Parallelism) -> Result<OutputTable> {
        let space = ProfileSpace::new(n)?;
        let eval = |k: usize| mech.evaluate(&space.profile(k));
        let outputs = match par {
            Parallelism::Serial => (0..space.len()).map(eval).collect::<Result<Vec<_>>>()?,
            Parallelism::Parallel => (0..space.len()).into_par_iter().map(eval).collect::<Result<Vec<_>>>()?,
        };
        Ok(OutputTable { space, outputs })
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    pub fn get(&self, index: usize) -> &Assignment {
        &self.outputs[index]
    }
}

/// All mechanism-level checks over one [`OutputTable`].
pub struct Checker {
    table: OutputTable,
    par: Parallelism,
    perms: Vec<Permutation>,
    /// relabel[π][d]: index of preference `d` relabelled by `perms[π]`
    relabel: Vec<Vec<usize>>,
    /// swapped[d][k]: index of preference `d` with positions `k`, `k+1` exchanged
    swapped: Vec<Vec<usize>>,
}

impl Checker {
    pub fn new(mech: &dyn Mechanism, n: usize, par: Parallelism) -> Result<Checker> {
        Ok(Checker::from_table(OutputTable::build(mech, n, par)?, par))
    }

    pub fn from_table(table: OutputTable, par: Parallelism) -> Checker {
        let n = table.space.n();
        let prefs = table.space.prefs();
        let perms = Permutation::all(n);
        let relabel = perms
            .iter()
            .map(|pi| prefs.iter().map(|p| p.relabel(pi).index()).collect())
            .collect();
        let swapped = prefs
            .iter()
            .map(|p| p.neighbors().iter().map(Preference::index).collect())
            .collect();
        Checker {
            table,
            par,
            perms,
            relabel,
            swapped,
        }
    }

    pub fn table(&self) -> &OutputTable {
        &self.table
    }

    fn n(&self) -> usize {
        self.table.space.n()
    }

    fn profiles(&self) -> usize {
        self.table.space.len()
    }

    fn out(&self, k: usize) -> &Assignment {
        &self.table.outputs[k]
    }

    fn profile(&self, k: usize) -> Profile {
        self.table.space.profile(k)
    }

    fn pref(&self, d: usize) -> &Preference {
        &self.table.space.prefs()[d]
    }

    /// First `Some` by profile index.
    fn search<T: Send>(&self, f: impl Fn(usize) -> Option<T> + Sync + Send) -> Option<T> {
        match self.par {
            Parallelism::Serial => (0..self.profiles()).find_map(f),
            Parallelism::Parallel => (0..self.profiles()).into_par_iter().find_map_first(f),
        }
    }

    fn verdict(&self, property: Property, witness: Option<Witness>) -> Verdict {
        Verdict::from_witness(property, witness, self.profiles())
    }

    pub fn check(&self, property: Property) -> Result<Verdict> {
        Ok(match property {
            Property::StrategyProof => self.strategy_proof(),
            Property::EnvyFree => self.envy_free(),
            Property::EqualTreatment => self.equal_treatment(),
            Property::Neutral => self.neutral(),
            Property::Anonymous => self.anonymous(),
            Property::Separable => self.separable(),
            Property::SwapMonotonic | Property::UpperInvariant | Property::LowerInvariant => {
                self.swap_property(property)
            }
            Property::ContentionFreeEfficient => self.contention_free_efficient(),
            Property::ExPostEfficient => self.ex_post_efficient()?,
            Property::OrdinalEfficient => self.ordinal_efficient()?,
        })
    }

    /// Truthful reporting SD-dominates every misreport, for every profile and agent.
    pub fn strategy_proof(&self) -> Verdict {
        let n = self.n();
        let space = &self.table.space;
        let w = self.search(|k| {
            let p = self.out(k);
            for i in 0..n {
                let truth = space.digit(k, i);
                for m in (0..space.pref_count()).filter(|&m| m != truth) {
                    let k2 = space.with_digit(k, i, m);
                    let q = self.out(k2);
                    if let Some(t) = first_sd_violation(p.row(i), q.row(i), self.pref(truth)) {
                        let mut w = Witness::new(Property::StrategyProof, self.profile(k));
                        w.detail = format!(
                            "agent {} reporting {} raises its top-{t} share from {} to {}",
                            i + 1,
                            self.pref(m).display(space.objects()),
                            prefix_sum(p.row(i), self.pref(truth), t),
                            prefix_sum(q.row(i), self.pref(truth), t)
                        );
                        w.other = Some(self.profile(k2));
                        w.agent = Some(i);
                        w.prefix = Some(t);
                        return Some(w);
                    }
                }
            }
            None
        });
        self.verdict(Property::StrategyProof, w)
    }

    /// Every agent's row SD-dominates every other row under its own preference.
    pub fn envy_free(&self) -> Verdict {
        let n = self.n();
        let w = self.search(|k| {
            let p = self.out(k);
            let digits = self.table.space.digits(k);
            for i in 0..n {
                let pref = self.pref(digits[i]);
                for j in (0..n).filter(|&j| j != i) {
                    if let Some(t) = first_sd_violation(p.row(i), p.row(j), pref) {
                        let mut w = Witness::new(Property::EnvyFree, self.profile(k));
                        w.detail = format!(
                            "agent {} envies agent {}: top-{t} share {} < {}",
                            i + 1,
                            j + 1,
                            prefix_sum(p.row(i), pref, t),
                            prefix_sum(p.row(j), pref, t)
                        );
                        w.agent = Some(i);
                        w.other_agent = Some(j);
                        w.prefix = Some(t);
                        return Some(w);
                    }
                }
            }
            None
        });
        self.verdict(Property::EnvyFree, w)
    }

    /// Agents with identical reports receive identical rows.
    pub fn equal_treatment(&self) -> Verdict {
        let n = self.n();
        let w = self.search(|k| {
            let p = self.out(k);
            let digits = self.table.space.digits(k);
            for i in 0..n {
                for j in (i + 1..n).filter(|&j| digits[j] == digits[i]) {
                    if p.row(i) != p.row(j) {
                        let a = (0..n).find(|&a| p.get(i, a) != p.get(j, a)).expect("rows differ");
                        let mut w = Witness::new(Property::EqualTreatment, self.profile(k));
                        w.detail = format!("same report, shares {} and {}", p.get(i, a), p.get(j, a));
                        w.agent = Some(i);
                        w.other_agent = Some(j);
                        w.object = Some(ObjectId(a));
                        return Some(w);
                    }
                }
            }
            None
        });
        self.verdict(Property::EqualTreatment, w)
    }

    /// `P[i][a] = Q[i][π(a)]` where `Q` is the output on the profile relabelled by `π`.
    pub fn neutral(&self) -> Verdict {
        let n = self.n();
        let space = &self.table.space;
        let w = self.search(|k| {
            let p = self.out(k);
            let digits = space.digits(k);
            for (pi_idx, pi) in self.perms.iter().enumerate().filter(|(_, pi)| !pi.is_identity()) {
                let moved: Vec<usize> = digits.iter().map(|&d| self.relabel[pi_idx][d]).collect();
                let k2 = space.index_of_digits(&moved);
                let q = self.out(k2);
                for i in 0..n {
                    for a in 0..n {
                        if p.get(i, a) != q.get(i, pi.apply(a)) {
                            let mut w = Witness::new(Property::Neutral, self.profile(k));
                            w.detail = format!(
                                "agent {} gets {} of the object but {} of its image",
                                i + 1,
                                p.get(i, a),
                                q.get(i, pi.apply(a))
                            );
                            w.other = Some(self.profile(k2));
                            w.agent = Some(i);
                            w.object = Some(ObjectId(a));
                            w.permutation = Some(pi.clone());
                            return Some(w);
                        }
                    }
                }
            }
            None
        });
        self.verdict(Property::Neutral, w)
    }

    /// `Q[k][a] = P[σ(k)][a]` where `Q` is the output after agent `k` takes over the report of
    /// agent `σ(k)`.
    pub fn anonymous(&self) -> Verdict {
        let n = self.n();
        let space = &self.table.space;
        let w = self.search(|k| {
            let p = self.out(k);
            let digits = space.digits(k);
            for s in self.perms.iter().filter(|s| !s.is_identity()) {
                let moved: Vec<usize> = (0..n).map(|x| digits[s.apply(x)]).collect();
                let k2 = space.index_of_digits(&moved);
                let q = self.out(k2);
                for x in 0..n {
                    for a in 0..n {
                        if q.get(x, a) != p.get(s.apply(x), a) {
                            let mut w = Witness::new(Property::Anonymous, self.profile(k));
                            w.detail = format!(
                                "agent {} gets {} after taking over the report of agent {}, which got {}",
                                x + 1,
                                q.get(x, a),
                                s.apply(x) + 1,
                                p.get(s.apply(x), a)
                            );
                            w.other = Some(self.profile(k2));
                            w.agent = Some(s.apply(x));
                            w.other_agent = Some(x);
                            w.object = Some(ObjectId(a));
                            w.permutation = Some(s.clone());
                            return Some(w);
                        }
                    }
                }
            }
            None
        });
        self.verdict(Property::Anonymous, w)
    }

    /// The change in agent `i`'s row when several opponents deviate at once equals the sum of
    /// the single-opponent changes.
    ///
    /// At `n = 3` every base profile and every deviation tuple is tried. For larger `n` the
    /// identity is checked against one base point per agent and own report (all opponents
    /// reporting the first preference); this is equivalent, because the identity at a fixed
    /// base makes agent `i`'s row additively separable in the opponents' reports, which in
    /// turn gives the identity at every base.
    pub fn separable(&self) -> Verdict {
        let w = if self.n() <= 3 {
            self.separable_full()
        } else {
            self.separable_base_point()
        };
        self.verdict(Property::Separable, w)
    }

    fn separable_full(&self) -> Option<Witness> {
        let n = self.n();
        let space = &self.table.space;
        self.search(|k| {
            let digits = space.digits(k);
            for i in 0..n {
                // deviation profiles keep agent i's report
                for dev in (0..space.len()).filter(|&d| space.digit(d, i) == digits[i]) {
                    if let Some(w) = self.separability_gap(k, dev, i) {
                        return Some(w);
                    }
                }
            }
            None
        })
    }

    fn separable_base_point(&self) -> Option<Witness> {
        let n = self.n();
        let space = &self.table.space;
        self.search(|dev| {
            for i in 0..n {
                let base = space.with_digit(0, i, space.digit(dev, i));
                if let Some(w) = self.separability_gap(base, dev, i) {
                    return Some(w);
                }
            }
            None
        })
    }

    /// Compares both sides of the separability identity at base `k` and deviation `dev`.
    fn separability_gap(&self, k: usize, dev: usize, i: usize) -> Option<Witness> {
        let n = self.n();
        let space = &self.table.space;
        let p = self.out(k);
        let joint = self.out(dev);
        let singles: Vec<&Assignment> = (0..n)
            .filter(|&j| j != i)
            .map(|j| self.out(space.with_digit(k, j, space.digit(dev, j))))
            .collect();
        for a in 0..n {
            let lhs = joint.get(i, a) - p.get(i, a);
            let rhs: Rational = singles.iter().map(|s| s.get(i, a) - p.get(i, a)).sum();
            if lhs != rhs {
                let mut w = Witness::new(Property::Separable, self.profile(k));
                w.detail = format!("joint change {lhs} but the single changes sum to {rhs}");
                w.other = Some(self.profile(dev));
                w.agent = Some(i);
                w.object = Some(ObjectId(a));
                return Some(w);
            }
        }
        None
    }

    /// All three adjacent-swap conditions.
    pub fn swap_upper_lower(&self) -> SwapReport {
        SwapReport {
            swap_monotonic: self.swap_property(Property::SwapMonotonic),
            upper_invariant: self.swap_property(Property::UpperInvariant),
            lower_invariant: self.swap_property(Property::LowerInvariant),
        }
    }

    fn swap_property(&self, property: Property) -> Verdict {
        let n = self.n();
        let space = &self.table.space;
        let w = self.search(|k| {
            let p = self.out(k);
            for i in 0..n {
                let d = space.digit(k, i);
                let pref = self.pref(d);
                for pos in 0..n - 1 {
                    let k2 = space.with_digit(k, i, self.swapped[d][pos]);
                    let q = self.out(k2);
                    if !swap_condition(property, p.row(i), q.row(i), pref, pos) {
                        let objects = space.objects();
                        let (a, b) = (pref.order()[pos], pref.order()[pos + 1]);
                        let mut w = Witness::new(property, self.profile(k));
                        w.detail = format!(
                            "agent {} swaps {} and {}: row {} becomes {}",
                            i + 1,
                            objects.token(a),
                            objects.token(b),
                            row_text(p.row(i)),
                            row_text(q.row(i))
                        );
                        w.other = Some(self.profile(k2));
                        w.agent = Some(i);
                        w.object = Some(b);
                        return Some(w);
                    }
                }
            }
            None
        });
        self.verdict(property, w)
    }

    /// On contention-free profiles every agent receives its top object with certainty.
    pub fn contention_free_efficient(&self) -> Verdict {
        let n = self.n();
        let space = &self.table.space;
        let w = self.search(|k| {
            let digits = space.digits(k);
            let mut seen = vec![false; n];
            if !digits
                .iter()
                .all(|&d| !std::mem::replace(&mut seen[self.pref(d).top().0], true))
            {
                return None;
            }
            let p = self.out(k);
            (0..n).find_map(|i| {
                let top = self.pref(digits[i]).top();
                (!p.get(i, top.0).is_one()).then(|| {
                    let mut w = Witness::new(Property::ContentionFreeEfficient, self.profile(k));
                    w.detail = format!(
                        "agent {} gets its top object with probability {}",
                        i + 1,
                        p.get(i, top.0)
                    );
                    w.agent = Some(i);
                    w.object = Some(top);
                    w
                })
            })
        });
        let profiles = (0..self.profiles())
            .filter(|&k| self.profile(k).is_contention_free())
            .count();
        Verdict::from_witness(Property::ContentionFreeEfficient, w, profiles)
    }

    /// Output is ex-post efficient on every profile.
    pub fn ex_post_efficient(&self) -> Result<Verdict> {
        self.per_profile(Property::ExPostEfficient, check_ex_post_efficient)
    }

    /// Output is ordinally efficient on every profile.
    pub fn ordinal_efficient(&self) -> Result<Verdict> {
        self.per_profile(Property::OrdinalEfficient, check_ordinal_efficient)
    }

    fn per_profile(&self, property: Property, check: fn(&Assignment, &Profile) -> Result<Verdict>) -> Result<Verdict> {
        let hit = self.search(|k| match check(self.out(k), &self.profile(k)) {
            Ok(v) if v.holds => None,
            Ok(v) => Some(Ok(v.witness.expect("failing verdicts carry a witness"))),
            Err(e) => Some(Err(e)),
        });
        Ok(self.verdict(property, hit.transpose()?))
    }
}

fn prefix_sum(row: &[Rational], pref: &Preference, t: usize) -> Rational {
    pref.order()[..t].iter().map(|a| &row[a.0]).sum()
}

fn row_text(row: &[Rational]) -> String {
    format!("({})", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

/// Position `k` such that `b` is `a` with positions `k`, `k+1` exchanged.
fn swap_position(a: &Preference, b: &Preference) -> Option<usize> {
    (0..a.len().saturating_sub(1)).find(|&k| a.swap_adjacent(k) == *b)
}

/// `p` is the truthful row, `q` the row after swapping positions `pos`, `pos + 1` of `pref`.
fn swap_condition(property: Property, p: &[Rational], q: &[Rational], pref: &Preference, pos: usize) -> bool {
    let order = pref.order();
    match property {
        Property::SwapMonotonic => {
            let b = order[pos + 1].0;
            p == q || q[b] > p[b]
        }
        Property::UpperInvariant => order[..pos].iter().all(|a| p[a.0] == q[a.0]),
        Property::LowerInvariant => order[pos + 2..].iter().all(|a| p[a.0] == q[a.0]),
        _ => unreachable!("not an adjacent-swap property"),
    }
}

/// Agent `i`'s joint change and summed single changes at base `profile` when the opponents
/// switch to their reports in `dev`.
fn separability_sides(
    mech: &dyn Mechanism,
    profile: &Profile,
    dev: &Profile,
    i: usize,
) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let n = profile.n();
    let p = mech.evaluate(profile)?;
    let joint = mech.evaluate(&dev.with_pref(i, profile.pref(i).clone()))?;
    let lhs: Vec<Rational> = (0..n).map(|a| joint.get(i, a) - p.get(i, a)).collect();
    let mut rhs = vec![Rational::ZERO; n];
    for j in (0..n).filter(|&j| j != i) {
        let single = mech.evaluate(&profile.with_pref(j, dev.pref(j).clone()))?;
        for a in 0..n {
            rhs[a] += single.get(i, a) - p.get(i, a);
        }
    }
    Ok((lhs, rhs))
}

pub fn check_strategy_proof(mech: &dyn Mechanism, n: usize) -> Result<Verdict> {
    Ok(Checker::new(mech, n, Parallelism::Parallel)?.strategy_proof())
}

pub fn check_envy_free(mech: &dyn Mechanism, n: usize) -> Result<Verdict> {
    Ok(Checker::new(mech, n, Parallelism::Parallel)?.envy_free())
}

pub fn check_equal_treatment(mech: &dyn Mechanism, n: usize) -> Result<Verdict> {
    Ok(Checker::new(mech, n, Parallelism::Parallel)?.equal_treatment())
}

pub fn check_neutral(mech: &dyn Mechanism, n: usize) -> Result<Verdict> {
    Ok(Checker::new(mech, n, Parallelism::Parallel)?.neutral())
}

pub fn check_anonymous(mech: &dyn Mechanism, n: usize) -> Result<Verdict> {
    Ok(Checker::new(mech, n, Parallelism::Parallel)?.anonymous())
}

pub fn check_separable(mech: &dyn Mechanism, n: usize) -> Result<Verdict> {
    Ok(Checker::new(mech, n, Parallelism::Parallel)?.separable())
}

pub fn check_swap_upper_lower(mech: &dyn Mechanism, n: usize) -> Result<SwapReport> {
    Ok(Checker::new(mech, n, Parallelism::Parallel)?.swap_upper_lower())
}

pub fn check_contention_free_efficient(mech: &dyn Mechanism, n: usize) -> Result<Verdict> {
    Ok(Checker::new(mech, n, Parallelism::Parallel)?.contention_free_efficient())
}

pub fn is_contention_free(profile: &Profile) -> bool {
    profile.is_contention_free()
}

/// Permutations not Pareto-dominated by another permutation: no other deterministic
/// assignment makes every agent weakly better off and one strictly better off.
pub fn pareto_optimal_deterministic(profile: &Profile) -> Result<Vec<Permutation>> {
    let n = profile.n();
    if n > PARETO_CAP {
        return Err(Error::CapExceeded(format!(
            "enumerating {n}! permutations exceeds the cap n <= {PARETO_CAP}"
        )));
    }
    let perms = Permutation::all(n);
    let ranks: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| (0..n).map(|i| profile.pref(i).position(ObjectId(p.apply(i)))).collect())
        .collect();
    let dominated = |t: usize| {
        ranks
            .iter()
            .any(|r| r.iter().zip(&ranks[t]).all(|(x, y)| x <= y) && *r != ranks[t])
    };
    Ok(perms
        .iter()
        .enumerate()
        .filter(|(t, _)| !dominated(*t))
        .map(|(_, p)| p.clone())
        .collect())
}

fn check_sizes(p: &Assignment, profile: &Profile) -> Result<()> {
    if p.n() != profile.n() {
        return Err(Error::Invalid(format!(
            "assignment of size {} for a profile of size {}",
            p.n(),
            profile.n()
        )));
    }
    Ok(())
}

/// Whether `p` is a lottery over Pareto-optimal permutations, decided by an exact hull LP.
pub fn check_ex_post_efficient(p: &Assignment, profile: &Profile) -> Result<Verdict> {
    check_sizes(p, profile)?;
    let po = pareto_optimal_deterministic(profile)?;
    let cert = hull_membership(p, &po)?;
    let witness = cert.is_infeasible().then(|| {
        let mut w = Witness::new(Property::ExPostEfficient, profile.clone());
        w.detail = format!("outside the hull of the {} Pareto-optimal permutations", po.len());
        w.certificate = Some(cert);
        w
    });
    Ok(Verdict::from_witness(Property::ExPostEfficient, witness, 1))
}

/// Whether some doubly stochastic `Q` SD-dominates `p` for every agent with a strict gain.
///
/// Maximizes the total of all prefix sums of `Q` subject to every prefix of every agent
/// being at least that of `p`; `p` is ordinally efficient iff the surplus is zero.
pub fn check_ordinal_efficient(p: &Assignment, profile: &Profile) -> Result<Verdict> {
    check_sizes(p, profile)?;
    let n = p.n();
    let mut sys = LinearSystem::new();
    for i in 0..n {
        for a in 0..n {
            sys.add_var(format!("Q[{}][{}]", i + 1, a + 1));
        }
    }
    let var = |i: usize, a: usize| i * n + a;
    for i in 0..n {
        sys.add_row(
            (0..n).map(|a| (var(i, a), Rational::ONE)),
            Sense::Eq,
            Rational::ONE,
            format!("row {}", i + 1),
        );
    }
    for a in 0..n {
        sys.add_row(
            (0..n).map(|i| (var(i, a), Rational::ONE)),
            Sense::Eq,
            Rational::ONE,
            format!("col {}", a + 1),
        );
    }
    let mut objective = Vec::new();
    let mut baseline = Rational::ZERO;
    for i in 0..n {
        let order = profile.pref(i).order();
        for t in 1..n {
            let floor: Rational = order[..t].iter().map(|a| p.get(i, a.0)).sum();
            let terms: Vec<(usize, Rational)> = order[..t].iter().map(|a| (var(i, a.0), Rational::ONE)).collect();
            objective.extend(terms.iter().cloned());
            sys.add_row(terms, Sense::Ge, floor.clone(), format!("prefix {} {t}", i + 1));
            baseline += floor;
        }
    }
    sys.set_objective(Direction::Maximize, objective);
    let cert = lp_solve(&sys)?;
    let Certificate::Optimum { point, value, .. } = cert else {
        return Err(Error::Certificate(format!("dominance LP returned {}", cert.kind())));
    };
    let surplus = &value - &baseline;
    let witness = surplus.is_positive().then(|| -> Result<Witness> {
        let q = Assignment::from_cells(n, point)?;
        let mut w = Witness::new(Property::OrdinalEfficient, profile.clone());
        w.detail = format!("a dominating assignment gains {surplus} in total prefix sums");
        w.dominating = Some(q);
        Ok(w)
    });
    Ok(Verdict::from_witness(
        Property::OrdinalEfficient,
        witness.transpose()?,
        1,
    ))
}

/// Outcome of comparing mechanism `A` against `B` on every profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceReport {
    /// Every agent's `A` row SD-dominates its `B` row on every profile.
    pub weak: bool,
    /// `weak` and a strict improvement for some agent at some profile.
    pub strict: bool,
    /// First profile and agent where `A` fails to dominate.
    pub witness: Option<DominanceWitness>,
    /// First profile and agent with a strict improvement.
    pub strict_at: Option<(Profile, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceWitness {
    pub profile: Profile,
    pub agent: usize,
    pub prefix: usize,
    pub a_row: Vec<Rational>,
    pub b_row: Vec<Rational>,
}

impl DominanceReport {
    pub fn to_json(&self) -> Value {
        json!({
            "weak": self.weak,
            "strict": self.strict,
            "witness": self.witness.as_ref().map(|w| json!({
                "profile": w.profile.code(),
                "agent": w.agent + 1,
                "prefix": w.prefix,
                "a_row": w.a_row.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "b_row": w.b_row.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })),
            "strict_at": self.strict_at.as_ref().map(|(p, i)| json!({"profile": p.code(), "agent": i + 1})),
        })
    }
}

impl fmt::Display for DominanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "weak: {}", self.weak)?;
        writeln!(f, "strict: {}", self.strict)?;
        if let Some(w) = &self.witness {
            writeln!(f, "witness:")?;
            writeln!(f, "  profile: {}", w.profile.code())?;
            writeln!(f, "  agent: {}", w.agent + 1)?;
            writeln!(f, "  prefix: {}", w.prefix)?;
            writeln!(f, "  a row: {}", row_text(&w.a_row))?;
            writeln!(f, "  b row: {}", row_text(&w.b_row))?;
        }
        if let Some((p, i)) = &self.strict_at {
            writeln!(f, "strict at: {} agent {}", p.code(), i + 1)?;
        }
        Ok(())
    }
}

pub fn mechanism_dominates(
    a: &dyn Mechanism,
    b: &dyn Mechanism,
    n: usize,
    par: Parallelism,
) -> Result<DominanceReport> {
    let ta = OutputTable::build(a, n, par)?;
    let tb = OutputTable::build(b, n, par)?;
    Ok(dominance_of_tables(&ta, &tb, par))
}

pub fn dominance_of_tables(ta: &OutputTable, tb: &OutputTable, par: Parallelism) -> DominanceReport {
    let space = &ta.space;
    let n = space.n();
    let first = |f: &(dyn Fn(usize) -> Option<(usize, usize)> + Sync)| match par {
        Parallelism::Serial => (0..space.len()).find_map(f),
        Parallelism::Parallel => (0..space.len()).into_par_iter().find_map_first(f),
    };
    let violation = first(&|k| {
        (0..n).find_map(|i| {
            let pref = &space.prefs()[space.digit(k, i)];
            first_sd_violation(ta.get(k).row(i), tb.get(k).row(i), pref).map(|_| (k, i))
        })
    });
    let strict_at = first(&|k| {
        (0..n).find_map(|i| {
            let pref = &space.prefs()[space.digit(k, i)];
            let (dom, strict) = sd_dominates(ta.get(k).row(i), tb.get(k).row(i), pref);
            (dom && strict).then_some((k, i))
        })
    });
    let witness = violation.map(|(k, i)| {
        let pref = &space.prefs()[space.digit(k, i)];
        DominanceWitness {
            profile: space.profile(k),
            agent: i,
            prefix: first_sd_violation(ta.get(k).row(i), tb.get(k).row(i), pref).expect("violation"),
            a_row: ta.get(k).row(i).to_vec(),
            b_row: tb.get(k).row(i).to_vec(),
        }
    });
    let weak = witness.is_none();
    DominanceReport {
        weak,
        strict: weak && strict_at.is_some(),
        witness,
        strict_at: strict_at.map(|(k, i)| (space.profile(k), i)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{
        EqualDivision, LinearMechanism, LinearVector, ProbabilisticSerial, RandomSerialDictatorship, SerialDictatorship,
    };
    use crate::rational::q;

    fn linear(v: &[(i64, i64)]) -> LinearMechanism {
        LinearMechanism::new(LinearVector::new(v.iter().map(|&(a, b)| q(a, b)).collect()).unwrap())
    }

    #[test]
    fn equal_division_passes_the_fairness_checks() {
        let c = Checker::new(&EqualDivision, 3, Parallelism::Serial).unwrap();
        for p in [
            Property::StrategyProof,
            Property::EnvyFree,
            Property::EqualTreatment,
            Property::Neutral,
            Property::Anonymous,
            Property::Separable,
        ] {
            assert!(c.check(p).unwrap().holds, "{p}");
        }
        assert!(c.swap_upper_lower().all_hold());
        let cfe = c.contention_free_efficient();
        assert!(!cfe.holds);
        assert!(cfe.witness.unwrap().replay(&EqualDivision).unwrap());
    }

    #[test]
    fn ps_is_manipulable_with_a_replayable_witness() {
        let v = check_strategy_proof(&ProbabilisticSerial, 3).unwrap();
        assert!(!v.holds);
        assert!(v.witness.unwrap().replay(&ProbabilisticSerial).unwrap());
        assert!(check_envy_free(&ProbabilisticSerial, 3).unwrap().holds);
    }

    #[test]
    fn linear_mechanism_is_separable_but_ps_is_not() {
        assert!(check_separable(&linear(&[(1, 6), (0, 1), (0, 1)]), 3).unwrap().holds);
        let v = check_separable(&ProbabilisticSerial, 3).unwrap();
        assert!(!v.holds);
        assert!(v.witness.unwrap().replay(&ProbabilisticSerial).unwrap());
    }

    #[test]
    fn fixed_order_dictatorship_is_not_anonymous() {
        let sd = SerialDictatorship {
            order: Permutation::identity(3),
        };
        let v = check_anonymous(&sd, 3).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(w.replay(&sd).unwrap());
    }

    #[test]
    fn serial_and_parallel_witnesses_agree() {
        let a = Checker::new(&RandomSerialDictatorship::default(), 3, Parallelism::Serial)
            .unwrap()
            .envy_free();
        let b = Checker::new(&RandomSerialDictatorship::default(), 3, Parallelism::Parallel)
            .unwrap()
            .envy_free();
        assert_eq!(a, b);
        assert!(!a.holds);
    }

    #[test]
    fn pareto_sets() {
        let a = Profile::from_rankings(&["abc", "bac", "cab"]).unwrap();
        assert_eq!(
            pareto_optimal_deterministic(&a).unwrap(),
            vec![Permutation::identity(3)]
        );
        let same = Profile::from_rankings(&["abc", "abc", "abc"]).unwrap();
        assert_eq!(pareto_optimal_deterministic(&same).unwrap().len(), 6);
    }

    #[test]
    fn efficiency_of_equal_division() {
        let a = Profile::from_rankings(&["abc", "bac", "cab"]).unwrap();
        let ed = Assignment::uniform(3);
        assert!(!check_ex_post_efficient(&ed, &a).unwrap().holds);
        let v = check_ordinal_efficient(&ed, &a).unwrap();
        assert_eq!(
            v.witness.unwrap().dominating,
            Some(Assignment::from_permutation(&Permutation::identity(3)))
        );
        let same = Profile::from_rankings(&["abc", "abc", "abc"]).unwrap();
        assert!(check_ex_post_efficient(&ed, &same).unwrap().holds);
    }

    #[test]
    fn linear_family_strictly_dominates_equal_division() {
        let r = mechanism_dominates(
            &linear(&[(1, 6), (0, 1), (0, 1)]),
            &EqualDivision,
            3,
            Parallelism::Parallel,
        )
        .unwrap();
        assert!(r.weak && r.strict);
        let r = mechanism_dominates(&EqualDivision, &EqualDivision, 3, Parallelism::Serial).unwrap();
        assert!(r.weak && !r.strict);
        let r = mechanism_dominates(
            &linear(&[(1, 12), (0, 1), (0, 1)]),
            &linear(&[(1, 6), (0, 1), (0, 1)]),
            3,
            Parallelism::Serial,
        )
        .unwrap();
        assert!(!r.weak && r.witness.is_some());
    }

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.code().parse::<Property>().unwrap(), p);
        }
    }
}
