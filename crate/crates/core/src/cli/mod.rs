//! The `randassign` command line.
//!
//! Exit codes: 0 when the command succeeds and the checked property holds, 1 when it fails
//! (a witness is printed), 2 on usage or input errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::certify::{
    certificate_text, certify_strong_hardness, certify_theorem1, derive_profile_c, Axiom, Certificate,
};
use crate::lottery::{birkhoff_decompose, perm_text, sample};
use crate::mechanisms::{
    EqualDivision, LinearMechanism, LinearVector, Mechanism, PairwiseExchange, ProbabilisticSerial,
    RandomSerialDictatorship, SerialDictatorship,
};
use crate::model::{format_assignment, parse_profile, Assignment, Permutation, Profile};
use crate::properties::{mechanism_dominates, Checker, Parallelism, Property, Verdict};
use crate::transfers::{check_f_axioms, decompose_to_transfers, f_from_v, TransferFunction};
use crate::{Error, Rational, Result};

/// A mechanism named on the command line: `ed`, `rsd`, `ps`, `sd:<order>`,
/// `linear:<vector file or inline (v1,...,vn)>` or `pairwise:<transfer file>`.
#[derive(Debug, Clone)]
pub enum MechanismSpec {
    Ed,
    Rsd,
    Ps,
    Sd(Permutation),
    Linear(LinearVector),
    Pairwise { f: TransferFunction, source: String },
}

impl MechanismSpec {
    pub fn build(&self) -> Box<dyn Mechanism> {
        match self {
            MechanismSpec::Ed => Box::new(EqualDivision),
            MechanismSpec::Rsd => Box::new(RandomSerialDictatorship::default()),
            MechanismSpec::Ps => Box::new(ProbabilisticSerial),
            MechanismSpec::Sd(order) => Box::new(SerialDictatorship { order: order.clone() }),
            MechanismSpec::Linear(v) => Box::new(LinearMechanism::new(v.clone())),
            MechanismSpec::Pairwise { f, .. } => {
                let mut m = PairwiseExchange::new(f.clone());
                m.label = self.label();
                Box::new(m)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            MechanismSpec::Ed => "ed".into(),
            MechanismSpec::Rsd => "rsd".into(),
            MechanismSpec::Ps => "ps".into(),
            MechanismSpec::Sd(order) => {
                let o: Vec<String> = order.as_slice().iter().map(|i| (i + 1).to_string()).collect();
                format!("sd:{}", o.join(","))
            }
            MechanismSpec::Linear(v) => format!("linear:{v}"),
            MechanismSpec::Pairwise { source, .. } => format!("pairwise:{source}"),
        }
    }

    pub fn is_pairwise_exchange(&self) -> bool {
        matches!(self, MechanismSpec::Linear(_) | MechanismSpec::Pairwise { .. })
    }

    /// Size fixed by the parameters, if any.
    fn size(&self) -> Option<usize> {
        match self {
            MechanismSpec::Sd(o) => Some(o.len()),
            MechanismSpec::Linear(v) => Some(v.n()),
            MechanismSpec::Pairwise { f, .. } => Some(f.n()),
            _ => None,
        }
    }

    fn require_size(&self, n: usize) -> Result<()> {
        match self.size() {
            Some(m) if m != n => Err(Error::Invalid(format!(
                "{} is defined for n={m}, not n={n}",
                self.label()
            ))),
            _ => Ok(()),
        }
    }
}

impl FromStr for MechanismSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<MechanismSpec> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match (kind.to_ascii_lowercase().as_str(), arg) {
            ("ed", None) => Ok(MechanismSpec::Ed),
            ("rsd", None) => Ok(MechanismSpec::Rsd),
            ("ps", None) => Ok(MechanismSpec::Ps),
            ("sd", Some(a)) => Ok(MechanismSpec::Sd(Permutation::parse_one_based(a)?)),
            ("linear", Some(a)) => {
                let inline = a.trim_start().starts_with('(') || a.contains(',');
                let v = if inline {
                    a.parse()?
                } else {
                    LinearVector::parse_file(&read(Path::new(a))?)?
                };
                Ok(MechanismSpec::Linear(v))
            }
            ("pairwise", Some(a)) => {
                let f = TransferFunction::parse_file(&read(Path::new(a))?)?;
                f.require_valid()?;
                Ok(MechanismSpec::Pairwise {
                    f,
                    source: a.to_string(),
                })
            }
            _ => Err(Error::Invalid(format!(
                "unknown mechanism {s:?} (expected ed, rsd, ps, sd:<order>, linear:<vector>, pairwise:<file>)"
            ))),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_profile(path: &Path) -> Result<Profile> {
    parse_profile(&read(path)?)
}

#[derive(Parser, Debug)]
#[command(
    name = "randassign",
    about = "Exact random assignment mechanisms, axiom checks and LP certificates"
)]
struct Cli {
    /// Emit a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a mechanism on a profile file.
    Assign {
        #[arg(long)]
        mechanism: MechanismSpec,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Check one property exhaustively over all profiles of size n.
    Check {
        #[arg(long)]
        mechanism: MechanismSpec,
        #[arg(long)]
        n: usize,
        /// sp, ef, ete, neutral, anon, sep, sul, cfe, expost, ordinal (or swap, upper, lower)
        #[arg(long)]
        property: String,
        #[command(flatten)]
        par: ParArgs,
    },
    /// Stochastic dominance of mechanism A over mechanism B on every profile.
    Compare {
        #[arg(long)]
        a: MechanismSpec,
        #[arg(long)]
        b: MechanismSpec,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        par: ParArgs,
    },
    /// Transfer functions: validation, linear vectors, per-profile decomposition
    #[command(subcommand)]
    Transfers(TransfersCommand),
    /// Exact LP certificates for the impossibility and hardness results
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Birkhoff decomposition of a mechanism's output into a lottery over permutations.
    Decompose {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        mechanism: MechanismSpec,
        #[command(subcommand)]
        then: Option<DecomposeThen>,
    },
    /// Every mechanism against every property.
    Sweep {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Comma-separated specs; defaults to the built-in catalog for n.
        #[arg(long, value_delimiter = ',')]
        mechanisms: Vec<String>,
        /// Comma-separated property codes; defaults to all.
        #[arg(long, value_delimiter = ',')]
        properties: Vec<Property>,
        #[command(flatten)]
        par: ParArgs,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct ParArgs {
    /// Scan profiles on one thread.
    #[arg(long, conflicts_with = "threads")]
    serial: bool,
    /// Worker threads for the profile scan.
    #[arg(long)]
    threads: Option<usize>,
}

impl ParArgs {
    fn mode(&self) -> Parallelism {
        if self.serial {
            Parallelism::Serial
        } else {
            Parallelism::Parallel
        }
    }

    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum TransfersCommand {
    /// Validate a transfer-function file and report its invariance properties.
    Check {
        #[arg(long)]
        f: PathBuf,
    },
    /// Transfer function of the linear mechanism for a vector file or inline vector.
    FromV {
        #[arg(long)]
        v: String,
    },
    /// Pairwise transfers reproducing a mechanism's output on a profile.
    Decompose {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        mechanism: MechanismSpec,
    },
}

#[derive(Subcommand, Debug)]
enum CertifyCommand {
    /// Farkas certificate that SP, EF and contention-free efficiency are incompatible at n=3.
    Theorem1 {
        /// Certificate file.
        #[arg(long, default_value = "theorem1.farkas.txt")]
        out: PathBuf,
        /// Also solve the 216-profile system from scratch (slow).
        #[arg(long)]
        solve_full: bool,
    },
    /// The Profile C assignment forced by SP, EF and contention-free efficiency.
    ProfileC,
    /// Maximum of every assignment cell under SP, EF and neutrality at n=3.
    StrongHardness {
        #[arg(long)]
        budget_seconds: Option<u64>,
        /// Comma-separated axiom families.
        #[arg(long, value_delimiter = ',', default_value = "SP,EF,NEUTRAL")]
        axioms: Vec<Axiom>,
    },
}

#[derive(Subcommand, Debug)]
enum DecomposeThen {
    /// Draw one deterministic assignment from the lottery.
    Sample {
        #[arg(long)]
        seed: u64,
    },
}

/// Outcome of a command: text or JSON plus the exit code.
struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Report {
        Report { text, json, code: 0 }
    }

    fn verdict(text: String, json: Value, holds: bool) -> Report {
        Report {
            text,
            json,
            code: if holds { 0 } else { 1 },
        }
    }
}

/// Parses `args` (program name first), runs the command and writes its report to `out`.
/// Usage and command errors go to `err`, except under `--json`, where they are reported on
/// `out` as `{"error": ...}`.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{}", e.render());
            return 2;
        }
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match execute(cli.command) {
        Ok(r) => {
            let _ = if cli.json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&r.json).expect("json values serialize")
                )
            } else {
                write!(out, "{}", r.text)
            };
            r.code
        }
        Err(e) => {
            let _ = if cli.json {
                writeln!(out, "{}", json!({ "error": e.to_string() }))
            } else {
                writeln!(err, "error: {e}")
            };
            2
        }
    }
}

fn execute(cmd: Command) -> Result<Report> {
    match cmd {
        Command::Assign { mechanism, profile } => assign(&mechanism, &read_profile(&profile)?),
        Command::Check {
            mechanism,
            n,
            property,
            par,
        } => check(&mechanism, n, &property, par),
        Command::Compare { a, b, n, par } => compare(&a, &b, n, par),
        Command::Transfers(t) => transfers(t),
        Command::Certify(c) => certify(c),
        Command::Decompose {
            profile,
            mechanism,
            then,
        } => decompose(&read_profile(&profile)?, &mechanism, then),
        Command::Sweep {
            n,
            mechanisms,
            properties,
            par,
        } => {
            let specs = if mechanisms.is_empty() {
                catalog(n)
            } else {
                mechanisms.iter().map(|m| m.parse()).collect::<Result<Vec<_>>>()?
            };
            let props = if properties.is_empty() {
                SWEEP_PROPERTIES.to_vec()
            } else {
                properties
            };
            par.install(|| sweep(n, &specs, &props, par.mode()))?
        }
    }
}

fn evaluate(spec: &MechanismSpec, profile: &Profile) -> Result<Assignment> {
    spec.require_size(profile.n())?;
    spec.build().evaluate(profile)
}

fn matrix_json(p: &Assignment) -> Value {
    json!(p
        .rows()
        .map(|r| r.iter().map(Rational::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn assign(spec: &MechanismSpec, profile: &Profile) -> Result<Report> {
    let p = evaluate(spec, profile)?;
    Ok(Report::ok(
        format_assignment(&p, profile.objects()),
        json!({
            "mechanism": spec.label(),
            "objects": profile.objects().tokens(),
            "assignment": matrix_json(&p),
        }),
    ))
}

fn check(spec: &MechanismSpec, n: usize, property: &str, par: ParArgs) -> Result<Report> {
    spec.require_size(n)?;
    let props: Vec<Property> = if property.eq_ignore_ascii_case("sul") {
        vec![
            Property::SwapMonotonic,
            Property::UpperInvariant,
            Property::LowerInvariant,
        ]
    } else {
        vec![property.parse()?]
    };
    let mech = spec.build();
    let verdicts = par.install(|| -> Result<Vec<Verdict>> {
        let checker = Checker::new(mech.as_ref(), n, par.mode())?;
        props.iter().map(|&p| checker.check(p)).collect()
    })??;
    let holds = verdicts.iter().all(|v| v.holds);
    let mut text = format!("mechanism: {}\nn: {n}\n", spec.label());
    for v in &verdicts {
        text += &v.to_string();
    }
    if verdicts.len() > 1 {
        let _ = writeln!(text, "conjunction: {}", if holds { "holds" } else { "fails" });
    }
    Ok(Report::verdict(
        text,
        json!({
            "mechanism": spec.label(),
            "n": n,
            "holds": holds,
            "verdicts": verdicts.iter().map(Verdict::to_json).collect::<Vec<_>>(),
        }),
        holds,
    ))
}

fn compare(a: &MechanismSpec, b: &MechanismSpec, n: usize, par: ParArgs) -> Result<Report> {
    a.require_size(n)?;
    b.require_size(n)?;
    let (ma, mb) = (a.build(), b.build());
    let r = par.install(|| mechanism_dominates(ma.as_ref(), mb.as_ref(), n, par.mode()))??;
    let text = format!("a: {}\nb: {}\nn: {n}\n{r}", a.label(), b.label());
    let mut json = r.to_json();
    json["a"] = json!(a.label());
    json["b"] = json!(b.label());
    Ok(Report::verdict(text, json, r.weak))
}

fn transfers(cmd: TransfersCommand) -> Result<Report> {
    match cmd {
        TransfersCommand::Check { f } => {
            let f = TransferFunction::parse_file(&read(&f)?)?;
            let report = f.report()?.clone();
            let axioms = check_f_axioms(&f)?;
            let mut text = format!("n: {}\n{report}", f.n());
            let extra = [
                ("sender invariance", &axioms.sender_invariance),
                ("receiver invariance", &axioms.receiver_invariance),
                ("swap-monotonicity", &axioms.swap_monotonicity),
            ];
            for (name, c) in extra {
                match &c.witness {
                    None => text += &format!("{name}: holds\n"),
                    Some(w) => text += &format!("{name}: fails at {w}\n"),
                }
            }
            let check_json = |c: &crate::transfers::Check| json!({ "holds": c.holds, "witness": c.witness });
            let json = json!({
                "n": f.n(),
                "valid": report.is_valid(),
                "checks": report.checks().iter().map(|(name, c)| (name.to_string(), check_json(c))).collect::<serde_json::Map<_, _>>(),
                "axioms": extra.iter().map(|(name, c)| (name.to_string(), check_json(c))).collect::<serde_json::Map<_, _>>(),
            });
            Ok(Report::verdict(text, json, report.is_valid()))
        }
        TransfersCommand::FromV { v } => {
            let v: LinearVector = if v.trim_start().starts_with('(') || v.contains(',') {
                v.parse()?
            } else {
                LinearVector::parse_file(&read(Path::new(&v))?)?
            };
            let text = f_from_v(&v).to_file()?;
            Ok(Report::ok(text.clone(), json!({ "v": v.to_string(), "file": text })))
        }
        TransfersCommand::Decompose { profile, mechanism } => {
            let profile = read_profile(&profile)?;
            let p = evaluate(&mechanism, &profile)?;
            let map = decompose_to_transfers(&p, &profile)?;
            let text = format!("{map}max |h|: {}\n", map.max_abs());
            let n = profile.n();
            let mut h = Vec::new();
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    for a in 0..n {
                        let x = map.get(i, j, a);
                        if !x.is_zero() {
                            h.push(json!({
                                "i": i + 1,
                                "j": j + 1,
                                "object": profile.objects().tokens()[a],
                                "h": x.to_string(),
                            }));
                        }
                    }
                }
            }
            Ok(Report::ok(
                text,
                json!({ "max_abs": map.max_abs().to_string(), "transfers": h }),
            ))
        }
    }
}

fn certify(cmd: CertifyCommand) -> Result<Report> {
    match cmd {
        CertifyCommand::Theorem1 { out, solve_full } => {
            let r = certify_theorem1(solve_full)?;
            let sys = &r.encoded.system;
            let delta = match &r.certificate {
                Certificate::FarkasInfeasible { delta, .. } => delta.clone(),
                other => {
                    return Err(Error::Certificate(format!(
                        "expected a Farkas certificate, got {}",
                        other.kind()
                    )))
                }
            };
            std::fs::write(&out, certificate_text(sys, &r.certificate))
                .map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
            let mut text = String::new();
            let _ = writeln!(text, "SP+EF+CFE over profiles A-F: infeasible");
            let _ = writeln!(text, "variables: {}  rows: {}", sys.num_vars(), sys.rows.len());
            let _ = writeln!(text, "farkas delta: {delta} (verified by substitution)");
            for (axiom, cert) in &r.drop_one {
                let _ = writeln!(text, "without {axiom}: {}", cert.kind());
            }
            let _ = writeln!(
                text,
                "lifted to all {} profiles ({} variables, {} rows): verified",
                r.full.profiles, r.full.variables, r.full.rows
            );
            if let Some(c) = &r.full.solved {
                let _ = writeln!(text, "full system solved from scratch: {}", c.kind());
            }
            let _ = writeln!(text, "certificate: {}", out.display());
            let json = json!({
                "infeasible": true,
                "variables": sys.num_vars(),
                "rows": sys.rows.len(),
                "delta": delta.to_string(),
                "drop_one": r.drop_one.iter().map(|(a, c)| (a.to_string(), json!(c.kind()))).collect::<serde_json::Map<_, _>>(),
                "full": { "profiles": r.full.profiles, "variables": r.full.variables, "rows": r.full.rows, "verified": true },
                "certificate_file": out.display().to_string(),
            });
            Ok(Report::ok(text, json))
        }
        CertifyCommand::ProfileC => {
            let r = derive_profile_c()?;
            let mut text = format!("profile C: {}\n", r.profile.code());
            for (i, row) in r.assignment.rows().enumerate() {
                let cells: Vec<String> = row.iter().map(Rational::to_string).collect();
                let _ = writeln!(text, "row {}: ({})", i + 1, cells.join(", "));
            }
            let _ = writeln!(
                text,
                "y = P^C[2][b] from the agent 2 and 3 rows over A-C: {}",
                r.local_interval
            );
            let _ = writeln!(text, "y over the whole A-C system: {}", r.system_interval);
            let _ = writeln!(text, "y once profile D is added: {}", r.final_interval);
            let iv = |x: &crate::certify::Interval| json!([x.lo.to_string(), x.hi.to_string()]);
            let json = json!({
                "profile": r.profile.code(),
                "assignment": matrix_json(&r.assignment),
                "local_interval": iv(&r.local_interval),
                "system_interval": iv(&r.system_interval),
                "final_interval": iv(&r.final_interval),
            });
            Ok(Report::ok(text, json))
        }
        CertifyCommand::StrongHardness { budget_seconds, axioms } => {
            let r = certify_strong_hardness(&axioms, budget_seconds.map(Duration::from_secs))?;
            let names: Vec<String> = r.axioms.iter().map(Axiom::to_string).collect();
            let mut text = format!(
                "axioms: {}\nvariables: {} ({} after merging)\norbits: {}\n",
                names.join("+"),
                r.variables,
                r.reduced_variables,
                r.maxima.len()
            );
            for m in &r.maxima {
                let _ = writeln!(
                    text,
                    "{} agent {} object {} (orbit {}): max {}",
                    m.profile.code(),
                    m.agent + 1,
                    m.profile.objects().tokens()[m.object],
                    m.orbit_size,
                    m.value
                );
            }
            let below = r.all_below_one();
            let largest = r.largest().map(|m| m.value.to_string()).unwrap_or_default();
            let _ = writeln!(text, "largest maximum: {largest}");
            let _ = writeln!(text, "all maxima below 1: {}", if below { "yes" } else { "no" });
            let json = json!({
                "axioms": names,
                "variables": r.variables,
                "reduced_variables": r.reduced_variables,
                "maxima": r.maxima.iter().map(|m| json!({
                    "profile": m.profile.code(),
                    "agent": m.agent + 1,
                    "object": m.profile.objects().tokens()[m.object],
                    "orbit_size": m.orbit_size,
                    "max": m.value.to_string(),
                })).collect::<Vec<_>>(),
                "largest": largest,
                "all_below_one": below,
            });
            Ok(Report::verdict(text, json, below))
        }
    }
}

fn decompose(profile: &Profile, spec: &MechanismSpec, then: Option<DecomposeThen>) -> Result<Report> {
    let p = evaluate(spec, profile)?;
    let lottery = birkhoff_decompose(&p)?;
    let objects = profile.objects();
    let mut text = lottery.display(objects).to_string();
    let mut json = json!({
        "mechanism": spec.label(),
        "lottery": lottery.support.iter().map(|(w, perm)| json!({
            "weight": w.to_string(),
            "assignment": perm_text(perm, objects),
        })).collect::<Vec<_>>(),
    });
    if let Some(DecomposeThen::Sample { seed }) = then {
        let drawn = sample(&lottery, seed);
        let _ = writeln!(text, "sample (seed {seed}): {}", perm_text(&drawn, objects));
        json["sample"] = json!({ "seed": seed, "assignment": perm_text(&drawn, objects) });
    }
    Ok(Report::ok(text, json))
}

/// Columns of the sweep table.
pub const SWEEP_PROPERTIES: [Property; 12] = Property::ALL;

/// Built-in mechanisms for a sweep at size `n`.
pub fn catalog(n: usize) -> Vec<MechanismSpec> {
    let top = Rational::new(1, (n * (n - 1)) as i64);
    let vec_of = |head: &[Rational]| {
        let mut v = head.to_vec();
        v.resize(n, Rational::ZERO);
        MechanismSpec::Linear(LinearVector::new(v).expect("catalog vectors are valid"))
    };
    let half = &top / &Rational::from_integer(2);
    vec![
        MechanismSpec::Ed,
        MechanismSpec::Sd(Permutation::identity(n)),
        MechanismSpec::Rsd,
        MechanismSpec::Ps,
        vec_of(std::slice::from_ref(&top)),
        vec_of(&[top, half.clone()]),
        vec_of(&[half]),
    ]
}

/// Checks every mechanism against every property. Output is independent of parallelism.
pub fn sweep_report(
    n: usize,
    specs: &[MechanismSpec],
    props: &[Property],
    par: Parallelism,
) -> Result<(String, Value, bool)> {
    let mut rows = Vec::new();
    for spec in specs {
        spec.require_size(n)?;
        let mech = spec.build();
        let checker = Checker::new(mech.as_ref(), n, par)?;
        let verdicts = props.iter().map(|&p| checker.check(p)).collect::<Result<Vec<_>>>()?;
        rows.push((spec, verdicts));
    }

    let labels: Vec<String> = rows.iter().map(|(s, _)| s.label()).collect();
    let width = labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(0)
        .max("mechanism".len());
    let has = |p: Property| props.contains(&p);
    let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w.saturating_sub(s.chars().count())));

    let mut text = format!("sweep n={n}\n{}", pad("mechanism", width));
    for p in props {
        text += &format!("  {}", p.label());
    }
    let biconditional = has(Property::StrategyProof) && has(Property::EnvyFree);
    if biconditional {
        text += "  SP⇔EF";
    }
    text.push('\n');

    let mut consistent = true;
    let mut json_rows = Vec::new();
    for ((spec, verdicts), label) in rows.iter().zip(&labels) {
        text += &pad(label, width);
        for v in verdicts {
            text += &format!("  {}", pad(v.mark(), v.property.label().chars().count()));
        }
        let holds = |p: Property| verdicts.iter().find(|v| v.property == p).map(|v| v.holds);
        let agree = (biconditional && spec.is_pairwise_exchange())
            .then(|| holds(Property::StrategyProof) == holds(Property::EnvyFree));
        if biconditional {
            text += &format!("  {}", agree.map_or("-", |a| if a { "✓" } else { "✗" }));
        }
        text.push('\n');
        consistent &= agree.unwrap_or(true);
        json_rows.push(json!({
            "mechanism": label,
            "verdicts": verdicts.iter().map(|v| (v.property.code().to_string(), json!(v.holds))).collect::<serde_json::Map<_, _>>(),
            "sp_iff_ef": agree,
            "witnesses": verdicts.iter().filter_map(|v| v.witness.as_ref()).map(|w| w.to_json()).collect::<Vec<_>>(),
        }));
    }
    if biconditional {
        let _ = writeln!(
            text,
            "SP and EF agree on every pairwise exchange row: {}",
            if consistent { "yes" } else { "no" }
        );
    }
    text += "witnesses:\n";
    for ((_, verdicts), label) in rows.iter().zip(&labels) {
        for w in verdicts.iter().filter_map(|v| v.witness.as_ref()) {
            let _ = writeln!(
                text,
                "  {label} {}: {} | {}",
                w.property.label(),
                w.profile.code(),
                w.detail
            );
        }
    }
    let json = json!({ "n": n, "properties": props.iter().map(|p| p.code()).collect::<Vec<_>>(), "rows": json_rows, "sp_iff_ef": consistent });
    Ok((text, json, consistent))
}

fn sweep(n: usize, specs: &[MechanismSpec], props: &[Property], par: Parallelism) -> Result<Report> {
    let (text, json, consistent) = sweep_report(n, specs, props, par)?;
    Ok(Report::verdict(text, json, consistent))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String) {
        let mut argv = vec!["randassign".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        let mut out = Vec::new();
        let code = run(&argv, &mut out, &mut std::io::sink());
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn specs_parse() {
        assert_eq!(
            "linear:(1/6,1/12,0)".parse::<MechanismSpec>().unwrap().label(),
            "linear:(1/6,1/12,0)"
        );
        assert_eq!("sd:2,1,3".parse::<MechanismSpec>().unwrap().label(), "sd:2,1,3");
        assert!("linear:(1/2,0,0)".parse::<MechanismSpec>().is_err());
        assert!("ttc".parse::<MechanismSpec>().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run_args(&["check", "--mechanism", "ed", "--n", "3", "--property", "sp"]).0,
            0
        );
        let (code, text) = run_args(&["check", "--mechanism", "ps", "--n", "3", "--property", "sp"]);
        assert_eq!(code, 1);
        assert!(text.contains("witness:"));
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(
            run_args(&["check", "--mechanism", "ed", "--n", "3", "--property", "nope"]).0,
            2
        );
    }

    #[test]
    fn catalog_vectors_are_valid() {
        for n in 3..=5 {
            assert_eq!(catalog(n).len(), 7);
        }
    }
}
