use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::mechanisms::LinearVector;
use crate::model::{factorial, Assignment, ObjectId, ObjectSet, Preference, Profile};
use crate::{Error, Rational, Result};

/// Largest `n` for which transfer tables are stored densely.
pub const DENSE_CAP: usize = 4;

#[derive(Clone)]
enum Repr {
    /// `table[(p * m + q) * n + a]` with `p, q` preference indices and `m = n!`.
    Dense(Vec<Rational>),
    /// `f(≻, ≻′, a) = v[rank(≻, a)] − v[rank(≻′, a)]`, evaluated on demand.
    Linear(LinearVector),
}

/// A transfer function `f(≻, ≻′, a)`: the share of `a` an agent reporting `≻` receives from
/// an agent reporting `≻′`.
pub struct TransferFunction {
    objects: Arc<ObjectSet>,
    prefs: Vec<Preference>,
    repr: Repr,
    report: OnceLock<TransferReport>,
}

impl Clone for TransferFunction {
    fn clone(&self) -> Self {
        TransferFunction {
            objects: self.objects.clone(),
            prefs: self.prefs.clone(),
            repr: self.repr.clone(),
            report: self.report.clone(),
        }
    }
}

impl fmt::Debug for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Dense(_) => write!(f, "TransferFunction(n={}, dense)", self.n()),
            Repr::Linear(v) => write!(f, "TransferFunction(n={}, linear {v})", self.n()),
        }
    }
}

impl PartialEq for TransferFunction {
    /// Equal on the whole domain, over the same token set.
    fn eq(&self, other: &Self) -> bool {
        if !self.objects.same_tokens(&other.objects) {
            return false;
        }
        if let (Repr::Linear(a), Repr::Linear(b)) = (&self.repr, &other.repr) {
            if *self.objects == *other.objects {
                return a == b;
            }
        }
        if self.n() > DENSE_CAP {
            return false;
        }
        let Ok(other) = other.aligned(&self.objects) else {
            return false;
        };
        let m = self.prefs.len();
        (0..m).all(|p| (0..m).all(|q| (0..self.n()).all(|a| self.at(p, q, a) == other.at(p, q, a))))
    }
}

/// Verdict of one transfer-function property with its canonical-first witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub holds: bool,
    pub witness: Option<String>,
}

impl Check {
    pub fn pass() -> Check {
        Check {
            holds: true,
            witness: None,
        }
    }

    pub fn fail(witness: String) -> Check {
        Check {
            holds: false,
            witness: Some(witness),
        }
    }

    pub(crate) fn from_first(witness: Option<String>) -> Check {
        match witness {
            Some(w) => Check::fail(w),
            None => Check::pass(),
        }
    }
}

/// The four feasibility properties every transfer function of a well-defined mechanism has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferReport {
    pub no_transfers: Check,
    pub balanced: Check,
    pub anti_symmetry: Check,
    pub bounded: Check,
}

impl TransferReport {
    pub fn is_valid(&self) -> bool {
        self.no_transfers.holds && self.balanced.holds && self.anti_symmetry.holds && self.bounded.holds
    }

    pub fn checks(&self) -> [(&'static str, &Check); 4] {
        [
            ("no transfers", &self.no_transfers),
            ("balanced", &self.balanced),
            ("anti-symmetry", &self.anti_symmetry),
            ("bounded", &self.bounded),
        ]
    }
}

impl fmt::Display for TransferReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, c) in self.checks() {
            match &c.witness {
                None => writeln!(f, "{name}: holds")?,
                Some(w) => writeln!(f, "{name}: fails at {w}")?,
            }
        }
        Ok(())
    }
}

impl TransferFunction {
    fn build(objects: Arc<ObjectSet>, repr: Repr) -> TransferFunction {
        let prefs = if objects.len() <= DENSE_CAP {
            Preference::all(objects.len())
        } else {
            Vec::new()
        };
        TransferFunction {
            objects,
            prefs,
            repr,
            report: OnceLock::new(),
        }
    }

    /// Dense table in canonical `(≻, ≻′, a)` order; the length must cover the whole domain.
    pub fn from_dense(objects: Arc<ObjectSet>, table: Vec<Rational>) -> Result<TransferFunction> {
        let n = objects.len();
        if n > DENSE_CAP {
            return Err(Error::CapExceeded(format!(
                "dense transfer tables need n <= {DENSE_CAP}, got {n}"
            )));
        }
        let m = factorial(n);
        if table.len() != m * m * n {
            return Err(Error::InvalidTransfer(format!(
                "partial table: {} entries for a domain of {}",
                table.len(),
                m * m * n
            )));
        }
        Ok(TransferFunction::build(objects, Repr::Dense(table)))
    }

    /// Tabulates `f(≻, ≻′, a)` from a closure over the standard preference enumeration.
    pub fn from_fn(
        objects: Arc<ObjectSet>,
        mut f: impl FnMut(&Preference, &Preference, ObjectId) -> Rational,
    ) -> Result<TransferFunction> {
        let n = objects.len();
        if n > DENSE_CAP {
            return Err(Error::CapExceeded(format!(
                "dense transfer tables need n <= {DENSE_CAP}, got {n}"
            )));
        }
        let prefs = Preference::all(n);
        let mut table = Vec::with_capacity(prefs.len() * prefs.len() * n);
        for p in &prefs {
            for q in &prefs {
                for a in 0..n {
                    table.push(f(p, q, ObjectId(a)));
                }
            }
        }
        TransferFunction::from_dense(objects, table)
    }

    pub fn zero(n: usize) -> TransferFunction {
        let objects = ObjectSet::standard(n);
        if n <= DENSE_CAP {
            let m = factorial(n);
            TransferFunction::build(objects, Repr::Dense(vec![Rational::ZERO; m * m * n]))
        } else {
            TransferFunction::build(objects, Repr::Linear(LinearVector::zero(n)))
        }
    }

    /// The rank-difference transfer function of a linear vector. Tabulated for `n <= 4`,
    /// evaluated lazily otherwise.
    pub fn from_vector(v: &LinearVector) -> TransferFunction {
        let objects = ObjectSet::standard(v.n());
        if v.n() <= DENSE_CAP {
            TransferFunction::from_fn(objects, |p, q, a| v.at_rank(p.rank_of(a)) - v.at_rank(q.rank_of(a)))
                .expect("within dense cap")
        } else {
            TransferFunction::build(objects, Repr::Linear(v.clone()))
        }
    }

    pub fn n(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &Arc<ObjectSet> {
        &self.objects
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense(_))
    }

    pub fn as_linear(&self) -> Option<&LinearVector> {
        match &self.repr {
            Repr::Linear(v) => Some(v),
            Repr::Dense(_) => None,
        }
    }

    /// The canonical preference enumeration used for indexing (empty above the dense cap).
    pub fn prefs(&self) -> &[Preference] {
        &self.prefs
    }

    /// `f(≻, ≻′, a)`.
    pub fn get(&self, p: &Preference, q: &Preference, a: ObjectId) -> Rational {
        match &self.repr {
            Repr::Dense(t) => {
                let m = self.prefs.len();
                t[(p.index() * m + q.index()) * self.n() + a.0].clone()
            }
            Repr::Linear(v) => v.at_rank(p.rank_of(a)) - v.at_rank(q.rank_of(a)),
        }
    }

    /// `f` by preference indices; requires `n <= 4`.
    pub fn at(&self, p: usize, q: usize, a: usize) -> Rational {
        match &self.repr {
            Repr::Dense(t) => t[(p * self.prefs.len() + q) * self.n() + a].clone(),
            Repr::Linear(v) => {
                v.at_rank(self.prefs[p].rank_of(ObjectId(a))) - v.at_rank(self.prefs[q].rank_of(ObjectId(a)))
            }
        }
    }

    pub(crate) fn require_tabulated(&self) -> Result<()> {
        if self.n() > DENSE_CAP {
            return Err(Error::CapExceeded(format!(
                "exhaustive transfer checks need n <= {DENSE_CAP}, got {}",
                self.n()
            )));
        }
        Ok(())
    }

    /// Same function over another canonical order of the same tokens.
    pub fn aligned(&self, objects: &Arc<ObjectSet>) -> Result<TransferFunction> {
        if *self.objects == **objects {
            return Ok(self.clone());
        }
        if !self.objects.same_tokens(objects) {
            return Err(Error::InvalidTransfer(format!(
                "transfer function over {:?} applied to objects {:?}",
                self.objects.tokens(),
                objects.tokens()
            )));
        }
        // to_self[b] = our id of the object the target calls b
        let to_self: Vec<ObjectId> = objects
            .tokens()
            .iter()
            .map(|t| self.objects.get(t).expect("same tokens"))
            .collect();
        let translate =
            |p: &Preference| Preference::new(p.order().iter().map(|b| to_self[b.0]).collect()).expect("bijection");
        match &self.repr {
            Repr::Linear(v) => Ok(TransferFunction::build(objects.clone(), Repr::Linear(v.clone()))),
            Repr::Dense(_) => TransferFunction::from_fn(objects.clone(), |p, q, a| {
                self.get(&translate(p), &translate(q), to_self[a.0])
            }),
        }
    }

    /// Checks the four feasibility properties; the result is cached.
    pub fn report(&self) -> Result<&TransferReport> {
        self.require_tabulated()?;
        Ok(self.report.get_or_init(|| validate(self)))
    }

    pub fn is_valid(&self) -> Result<bool> {
        Ok(self.report()?.is_valid())
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        let r = self.report()?;
        if r.is_valid() {
            return Ok(());
        }
        let (name, c) = r
            .checks()
            .into_iter()
            .find(|(_, c)| !c.holds)
            .expect("some check fails");
        Err(Error::InvalidTransfer(format!(
            "{name} fails at {}",
            c.witness.as_deref().unwrap_or("?")
        )))
    }

    /// `f(≻, ≻′, a)` rendered with object tokens.
    pub(crate) fn triple(&self, p: usize, q: usize, a: Option<usize>) -> String {
        let objs = &self.objects;
        match a {
            Some(a) => format!(
                "f(<{}>, <{}>, {})",
                self.prefs[p].display_with(objs, ","),
                self.prefs[q].display_with(objs, ","),
                objs.token(ObjectId(a))
            ),
            None => format!(
                "(<{}>, <{}>)",
                self.prefs[p].display_with(objs, ","),
                self.prefs[q].display_with(objs, ",")
            ),
        }
    }

    /// Parses the transfer-function file format:
    ///
    /// ```text
    /// f n=3
    /// a,b,c | c,a,b | a | 1/6
    /// ```
    ///
    /// Absent entries are zero. Objects are ordered by token length, then lexicographically;
    /// without entries the standard tokens `a, b, c, ...` are used.
    pub fn parse_file(text: &str) -> Result<TransferFunction> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "", "empty transfer file"))?;
        let ntok = header
            .strip_prefix('f')
            .map(str::trim)
            .and_then(|r| r.strip_prefix("n="))
            .ok_or_else(|| Error::parse(hline, header, "expected header `f n=<int>`"))?;
        let n: usize = ntok
            .trim()
            .parse()
            .map_err(|_| Error::parse(hline, ntok, "expected an integer"))?;
        if n < 3 {
            return Err(Error::parse(hline, ntok, "n must be at least 3"));
        }
        if n > DENSE_CAP {
            return Err(Error::parse(
                hline,
                ntok,
                format!("transfer files support n <= {DENSE_CAP}"),
            ));
        }

        struct Entry {
            line: usize,
            p: Vec<String>,
            q: Vec<String>,
            a: String,
            value: Rational,
        }
        let mut entries = Vec::new();
        for (line, content) in lines {
            let fields: Vec<&str> = content.split('|').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::parse(
                    line,
                    content,
                    "expected `<pref> | <pref> | <object> | <p/q>`",
                ));
            }
            let split = |s: &str| -> Vec<String> { s.split(',').map(|t| t.trim().to_string()).collect() };
            let value = fields[3]
                .parse::<Rational>()
                .map_err(|_| Error::parse(line, fields[3], "not a rational"))?;
            entries.push(Entry {
                line,
                p: split(fields[0]),
                q: split(fields[1]),
                a: fields[2].to_string(),
                value,
            });
        }

        let objects = match entries.first() {
            None => ObjectSet::standard(n),
            Some(e) => {
                let mut tokens = e.p.clone();
                tokens.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
                ObjectSet::new(tokens).map_err(|err| Error::parse(e.line, &e.a, err.to_string()))?
            }
        };
        if objects.len() != n {
            let e = &entries[0];
            return Err(Error::parse(
                e.line,
                e.p.join(","),
                format!("preference does not rank {n} objects"),
            ));
        }
        let m = factorial(n);
        let mut table = vec![Rational::ZERO; m * m * n];
        let mut seen = vec![false; m * m * n];
        for e in &entries {
            let pref = |toks: &[String]| -> Result<Preference> {
                if toks.len() != n {
                    return Err(Error::parse(
                        e.line,
                        toks.join(","),
                        format!("preference does not rank {n} objects"),
                    ));
                }
                let ids = toks
                    .iter()
                    .map(|t| objects.get(t).ok_or_else(|| Error::parse(e.line, t, "unknown object")))
                    .collect::<Result<Vec<_>>>()?;
                Preference::new(ids).map_err(|_| Error::parse(e.line, toks.join(","), "duplicate object in preference"))
            };
            let p = pref(&e.p)?;
            let q = pref(&e.q)?;
            let a = objects
                .get(&e.a)
                .ok_or_else(|| Error::parse(e.line, &e.a, "unknown object"))?;
            let k = (p.index() * m + q.index()) * n + a.0;
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::parse(e.line, &e.a, "duplicate entry"));
            }
            table[k] = e.value.clone();
        }
        TransferFunction::from_dense(objects, table)
    }

    /// Renders the nonzero entries in canonical order.
    pub fn to_file(&self) -> Result<String> {
        self.require_tabulated()?;
        let n = self.n();
        let mut out = format!("f n={n}\n");
        let m = self.prefs.len();
        for p in 0..m {
            for q in 0..m {
                for a in 0..n {
                    let x = self.at(p, q, a);
                    if !x.is_zero() {
                        out.push_str(&format!(
                            "{} | {} | {} | {x}\n",
                            self.prefs[p].display_with(&self.objects, ","),
                            self.prefs[q].display_with(&self.objects, ","),
                            self.objects.token(ObjectId(a))
                        ));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Checks the four feasibility properties exhaustively, reporting for each the first
/// violating `(≻, ≻′, a)` in canonical order.
pub fn validate_transfer_function(f: &TransferFunction) -> Result<TransferReport> {
    f.report().cloned()
}

fn validate(f: &TransferFunction) -> TransferReport {
    let n = f.n();
    let m = f.prefs.len();
    let bound = Rational::new(1, (n * (n - 1)) as i64);
    let mut no_transfers = None;
    let mut balanced = None;
    let mut anti_symmetry = None;
    let mut bounded = None;
    for p in 0..m {
        for q in 0..m {
            let mut total = Rational::ZERO;
            for a in 0..n {
                let x = f.at(p, q, a);
                if p == q && !x.is_zero() && no_transfers.is_none() {
                    no_transfers = Some(format!("{} = {x}, expected 0", f.triple(p, q, Some(a))));
                }
                let back = f.at(q, p, a);
                if x != -&back && anti_symmetry.is_none() {
                    anti_symmetry = Some(format!(
                        "{} = {x} but {} = {back}",
                        f.triple(p, q, Some(a)),
                        f.triple(q, p, Some(a))
                    ));
                }
                if x.abs() > bound && bounded.is_none() {
                    bounded = Some(format!("|{}| = |{x}| > {bound}", f.triple(p, q, Some(a))));
                }
                total += x;
            }
            if !total.is_zero() && balanced.is_none() {
                balanced = Some(format!(
                    "sum over objects at {} = {total}, expected 0",
                    f.triple(p, q, None)
                ));
            }
        }
    }
    TransferReport {
        no_transfers: Check::from_first(no_transfers),
        balanced: Check::from_first(balanced),
        anti_symmetry: Check::from_first(anti_symmetry),
        bounded: Check::from_first(bounded),
    }
}

/// `f_from_v`: the linear transfer function for `v`.
pub fn f_from_v(v: &LinearVector) -> TransferFunction {
    TransferFunction::from_vector(v)
}

/// Raw cells `1/n + Σ_{j≠i} f(≻i, ≻j, a)` without any validation.
pub fn pairwise_cells(profile: &Profile, f: &TransferFunction) -> Result<Vec<Rational>> {
    let n = profile.n();
    if f.n() != n {
        return Err(Error::InvalidTransfer(format!(
            "transfer function for n={} on a profile with n={n}",
            f.n()
        )));
    }
    let aligned;
    let f = if *f.objects == **profile.objects() {
        f
    } else {
        aligned = f.aligned(profile.objects())?;
        &aligned
    };
    let base = Rational::new(1, n as i64);
    let mut cells = vec![base; n * n];
    match &f.repr {
        Repr::Dense(_) => {
            let idx: Vec<usize> = profile.prefs().iter().map(|p| p.index()).collect();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        for a in 0..n {
                            cells[i * n + a] += f.at(idx[i], idx[j], a);
                        }
                    }
                }
            }
        }
        Repr::Linear(_) => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        for a in 0..n {
                            cells[i * n + a] += f.get(profile.pref(i), profile.pref(j), ObjectId(a));
                        }
                    }
                }
            }
        }
    }
    Ok(cells)
}

/// The pairwise exchange mechanism `φ^f` on one profile. `f` must pass
/// [`validate_transfer_function`]; the output is checked to be doubly stochastic.
pub fn pairwise_exchange(profile: &Profile, f: &TransferFunction) -> Result<Assignment> {
    if f.n() <= DENSE_CAP {
        f.require_valid()?;
    }
    let n = profile.n();
    Assignment::from_cells(n, pairwise_cells(profile, f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::linear_mechanism;
    use crate::model::ProfileSpace;
    use crate::rational::q;

    fn v(s: &str) -> LinearVector {
        s.parse().unwrap()
    }

    #[test]
    fn zero_and_linear_are_valid() {
        assert!(TransferFunction::zero(3).is_valid().unwrap());
        assert!(f_from_v(&v("(1/6,0,0)")).is_valid().unwrap());
        assert!(f_from_v(&v("(1/12,1/24,0,0)")).is_valid().unwrap());
    }

    #[test]
    fn formula_value() {
        let f = f_from_v(&v("(1/6,0,0)"));
        let objs = f.objects().clone();
        let abc = Preference::parse(&objs, "abc").unwrap();
        let cab = Preference::parse(&objs, "cab").unwrap();
        assert_eq!(f.get(&abc, &cab, objs.get("a").unwrap()), q(1, 6));
    }

    #[test]
    fn no_transfer_violation_is_reported() {
        let objs = ObjectSet::standard(3);
        let f = TransferFunction::from_fn(objs, |p, r, a| {
            if p == r && p.index() == 2 && a.0 == 0 {
                q(1, 12)
            } else {
                Rational::ZERO
            }
        })
        .unwrap();
        let r = validate_transfer_function(&f).unwrap();
        assert!(!r.no_transfers.holds);
        assert_eq!(
            r.no_transfers.witness.as_deref(),
            Some("f(<b,a,c>, <b,a,c>, a) = 1/12, expected 0")
        );
        assert!(pairwise_exchange(&Profile::from_rankings(&["abc", "abc", "abc"]).unwrap(), &f).is_err());
    }

    #[test]
    fn partial_table_rejected() {
        assert!(TransferFunction::from_dense(ObjectSet::standard(3), vec![Rational::ZERO; 10]).is_err());
    }

    #[test]
    fn pairwise_matches_linear_everywhere() {
        let vec = v("(1/6,1/12,0)");
        let f = f_from_v(&vec);
        for p in ProfileSpace::new(3).unwrap().iter() {
            assert_eq!(pairwise_exchange(&p, &f).unwrap(), linear_mechanism(&p, &vec).unwrap());
        }
    }

    #[test]
    fn file_round_trip() {
        let f = f_from_v(&v("(1/6,1/12,0)"));
        let text = f.to_file().unwrap();
        assert!(text.starts_with("f n=3\n"));
        assert_eq!(TransferFunction::parse_file(&text).unwrap(), f);
        let z = TransferFunction::parse_file("f n=3\n").unwrap();
        assert_eq!(z, TransferFunction::zero(3));
        assert!(matches!(
            TransferFunction::parse_file("f n=3\na,b,c | a,b | a | 1/6\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn alignment_to_other_token_order() {
        let vec = v("(1/6,1/12,0)");
        let f = f_from_v(&vec);
        let p = crate::model::parse_profile("n 3\n1: c a b\n2: a b c\n3: b c a\n").unwrap();
        let direct = linear_mechanism(&p, &vec).unwrap();
        assert_eq!(pairwise_exchange(&p, &f).unwrap(), direct);
    }
}
