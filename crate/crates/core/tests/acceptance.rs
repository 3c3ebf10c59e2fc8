//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. All comparisons are
//! exact; the only tolerances are the wall-clock budgets below.
//!
//! Set `RANDASSIGN_SKIP_STRONG=1` to skip the strong hardness run (six to nine minutes on
//! one core); the line then reads SKIP and does not count as a failure.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use randassign::certify::{
    certify_strong_hardness, certify_theorem1, derive_profile_c, impossibility_profiles, verify, Axiom, Certificate,
};
use randassign::cli::{catalog, sweep_report, MechanismSpec, SWEEP_PROPERTIES};
use randassign::lottery::{birkhoff_decompose, hull_membership, Lottery};
use randassign::mechanisms::{
    EqualDivision, LinearMechanism, LinearVector, Mechanism, PairwiseExchange, ProbabilisticSerial,
};
use randassign::model::{Assignment, ObjectSet, Permutation, Preference, Profile, ProfileSpace};
use randassign::properties::{mechanism_dominates, Checker, Parallelism, Property};
use randassign::rational::q;
use randassign::transfers::{
    decompose_to_transfers, f_from_v, g_from_f, reconstruct_f, v_from_g, RankDerivation, TransferFunction,
    VectorDerivation,
};
use randassign::Rational;

const THEOREM1_BUDGET: Duration = Duration::from_secs(60);
const GRID3_BUDGET: Duration = Duration::from_secs(60);
const PER_VECTOR4_BUDGET: Duration = Duration::from_secs(30 * 60);
const STRONG_BUDGET: Duration = Duration::from_secs(30 * 60);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: randassign::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// All `(a, b, 0)` with `1/6 >= a >= b >= 0` on a step of `1/36`: 28 vectors.
fn grid3() -> Vec<LinearVector> {
    let mut out = Vec::new();
    for a in 0..=6 {
        for b in 0..=a {
            out.push(LinearVector::new(vec![q(a, 36), q(b, 36), Rational::ZERO]).unwrap());
        }
    }
    out
}

fn grid4() -> Vec<LinearVector> {
    [
        [q(1, 12), q(1, 24), q(1, 48)],
        [q(1, 12), q(1, 12), Rational::ZERO],
        [q(1, 24), q(1, 36), q(1, 72)],
    ]
    .into_iter()
    .map(|head| {
        let mut v = head.to_vec();
        v.push(Rational::ZERO);
        LinearVector::new(v).unwrap()
    })
    .collect()
}

fn fmt_vec(v: &LinearVector) -> String {
    let parts: Vec<String> = v.as_slice().iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

const SYMMETRIC_AXIOMS: [Property; 6] = [
    Property::StrategyProof,
    Property::EnvyFree,
    Property::EqualTreatment,
    Property::Neutral,
    Property::Anonymous,
    Property::Separable,
];

fn linear_passes(v: &LinearVector) -> Result<(), String> {
    let mech = LinearMechanism::new(v.clone());
    let checker = lib(Checker::new(&mech, v.n(), Parallelism::Parallel))?;
    for p in SYMMETRIC_AXIOMS {
        let verdict = lib(checker.check(p))?;
        if !verdict.holds {
            let w = verdict.witness.map(|w| w.render()).unwrap_or_default();
            return Err(format!("{} fails {}: {w}", fmt_vec(v), p.label()));
        }
    }
    Ok(())
}

fn c1_theorem1() -> Outcome {
    let start = Instant::now();
    let report = lib(certify_theorem1(false))?;
    let elapsed = start.elapsed();
    ensure(report.certificate.is_infeasible(), || {
        "six-profile system not infeasible".into()
    })?;
    lib(verify(&report.encoded.system, &report.certificate)).map_err(|e| format!("re-verification: {e}"))?;
    ensure(report.full.certificate.is_infeasible(), || {
        "lifted certificate not infeasible".into()
    })?;
    ensure(report.drop_one.len() == 3, || {
        format!("{} drop-one systems", report.drop_one.len())
    })?;
    let profiles: Vec<Profile> = impossibility_profiles().into_iter().map(|(_, p)| p).collect();
    for (dropped, cert) in &report.drop_one {
        let kept: Vec<Axiom> = [Axiom::Sp, Axiom::Ef, Axiom::Cfe]
            .into_iter()
            .filter(|a| a != dropped)
            .collect();
        let sys = lib(randassign::certify::encode_axioms(&profiles, &kept))?;
        ensure(
            matches!(cert, Certificate::FeasiblePoint { .. } | Certificate::Optimum { .. }),
            || format!("without {dropped}: {}", cert.kind()),
        )?;
        lib(verify(&sys.system, cert)).map_err(|e| format!("without {dropped}: {e}"))?;
    }
    ensure(elapsed <= THEOREM1_BUDGET, || format!("took {elapsed:.1?}"))?;
    Ok(format!(
        "Farkas certificate verified on {} and {} variables; each drop-one system feasible; {elapsed:.2?}",
        report.encoded.system.num_vars(),
        report.full.variables
    ))
}

fn c2_profile_c() -> Outcome {
    let r = lib(derive_profile_c())?;
    let expected = lib(Assignment::from_rows(vec![
        vec![q(1, 2), q(1, 2), q(0, 1)],
        vec![q(1, 2), q(1, 4), q(1, 4)],
        vec![q(0, 1), q(1, 4), q(3, 4)],
    ]))?;
    ensure(r.assignment == expected, || format!("rows {:?}", r.assignment))?;
    ensure(r.local_interval.lo == q(0, 1) && r.local_interval.hi == q(1, 2), || {
        format!("y interval {}", r.local_interval)
    })?;
    ensure(r.final_interval.lo == q(1, 4) && r.final_interval.hi == q(1, 4), || {
        format!("final interval {}", r.final_interval)
    })?;
    Ok(format!(
        "rows (1/2,1/2,0) (1/2,1/4,1/4) (0,1/4,3/4); y in {} before D",
        r.local_interval
    ))
}

fn c3_linear_sufficiency() -> Outcome {
    let start = Instant::now();
    let g3 = grid3();
    for v in &g3 {
        linear_passes(v)?;
    }
    let t3 = start.elapsed();
    ensure(t3 <= GRID3_BUDGET, || format!("n=3 grid took {t3:.1?}"))?;
    let g4 = grid4();
    let mut slowest = Duration::ZERO;
    for v in &g4 {
        let s = Instant::now();
        linear_passes(v)?;
        let t = s.elapsed();
        ensure(t <= PER_VECTOR4_BUDGET, || format!("{} took {t:.1?}", fmt_vec(v)))?;
        slowest = slowest.max(t);
    }
    Ok(format!(
        "{} vectors at n=3 in {t3:.2?}; {} vectors at n=4, slowest {slowest:.1?}",
        g3.len(),
        g4.len()
    ))
}

fn same_table(a: &TransferFunction, b: &TransferFunction) -> bool {
    let (n, m) = (a.n(), a.prefs().len());
    b.n() == n && (0..m).all(|p| (0..m).all(|r| (0..n).all(|x| a.at(p, r, x) == b.at(p, r, x))))
}

fn c4_linear_necessity() -> Outcome {
    let mut count = 0;
    for v in grid3().iter().chain(grid4().iter()) {
        let n = v.n();
        let f = lib(reconstruct_f(&LinearMechanism::new(v.clone()), n))?;
        ensure(same_table(&f, &f_from_v(v)), || {
            format!("reconstructed f differs for {}", fmt_vec(v))
        })?;
        let g = match lib(g_from_f(&f))? {
            RankDerivation::Derived(g) => g,
            other => return Err(format!("{}: {other:?}", fmt_vec(v))),
        };
        match lib(v_from_g(&g))? {
            VectorDerivation::Vector(w) if w.as_slice() == v.as_slice() => {}
            other => return Err(format!("{}: recovered {other:?}", fmt_vec(v))),
        }
        count += 1;
    }
    Ok(format!(
        "{count} vectors: reconstruct_f matches f_from_v and g/v recovers v"
    ))
}

/// Anti-symmetric, balanced, bounded transfers at n=3. A third each of: unstructured
/// tables, functions of the rank pair, and linear vectors.
fn random_transfer(rng: &mut ChaCha8Rng, k: usize) -> TransferFunction {
    let objects = ObjectSet::standard(3);
    let prefs = Preference::all(3);
    let m = prefs.len();
    match k % 3 {
        0 => {
            let mut table = vec![Rational::ZERO; m * m * 3];
            for p in 0..m {
                for r in p + 1..m {
                    // x + y + z = 0 with |x|, |y|, |z| <= 4/24 = 1/6
                    let x: i64 = rng.gen_range(-2..=2);
                    let y: i64 = rng.gen_range(-2..=2);
                    let vals = [x, y, -(x + y)];
                    let mut order = [0usize, 1, 2];
                    order.shuffle(rng);
                    for (a, &s) in order.iter().zip(vals.iter()) {
                        table[(p * m + r) * 3 + a] = q(s, 24);
                        table[(r * m + p) * 3 + a] = q(-s, 24);
                    }
                }
            }
            TransferFunction::from_dense(objects, table).unwrap()
        }
        1 => {
            // anti-symmetric rank table; balanced only when the 3-cycle sum vanishes, so resample
            loop {
                let mut g = [[0i64; 3]; 3];
                for i in 0..3 {
                    for j in i + 1..3 {
                        let x = rng.gen_range(-4..=4);
                        g[i][j] = x;
                        g[j][i] = -x;
                    }
                }
                let f =
                    TransferFunction::from_fn(objects.clone(), |p, r, a| q(g[p.rank_of(a) - 1][r.rank_of(a) - 1], 24))
                        .unwrap();
                if f.is_valid().unwrap() {
                    return f;
                }
            }
        }
        _ => {
            let a = rng.gen_range(0..=12);
            let b = rng.gen_range(0..=a);
            f_from_v(&LinearVector::new(vec![q(a, 72), q(b, 72), Rational::ZERO]).unwrap())
        }
    }
}

fn c5_sp_iff_ef() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut both, mut neither) = (0, 0);
    for k in 0..1000 {
        let f = random_transfer(&mut rng, k);
        ensure(lib(f.is_valid())?, || {
            format!("sample {k} is not a valid transfer function")
        })?;
        let mech = PairwiseExchange::new(f);
        let checker = lib(Checker::new(&mech, 3, Parallelism::Serial))?;
        let (sp, ef) = (checker.strategy_proof().holds, checker.envy_free().holds);
        ensure(sp == ef, || format!("sample {k}: SP {sp}, EF {ef}"))?;
        if sp {
            both += 1;
        } else {
            neither += 1;
        }
    }
    Ok(format!(
        "1000 seeded transfer functions: {both} satisfy both, {neither} satisfy neither"
    ))
}

fn c6_swap_decomposition() -> Outcome {
    let mut labels = Vec::new();
    for spec in catalog(3) {
        let mech = spec.build();
        let checker = lib(Checker::new(&*mech, 3, Parallelism::Parallel))?;
        let sp = checker.strategy_proof().holds;
        let sul = checker.swap_upper_lower();
        ensure(sp == sul.all_hold(), || {
            format!("{}: SP {sp} but swap/upper/lower {}", spec.label(), sul.all_hold())
        })?;
        labels.push(format!("{}={}", spec.label(), if sp { "SP" } else { "not SP" }));
    }
    Ok(labels.join(", "))
}

fn expect_verdict(
    checker: &Checker,
    mech: &dyn Mechanism,
    label: &str,
    p: Property,
    want: bool,
) -> Result<Option<String>, String> {
    let v = lib(checker.check(p))?;
    ensure(v.holds == want, || format!("{label} {}: expected {want}", p.label()))?;
    match &v.witness {
        Some(w) => {
            ensure(lib(w.replay(mech))?, || {
                format!("{label} {} witness does not replay", p.label())
            })?;
            Ok(Some(w.render()))
        }
        None => Ok(None),
    }
}

fn c7_catalog_verdicts() -> Outcome {
    use Property::*;
    let mut lines = Vec::new();
    let cases: [(Box<dyn Mechanism>, &str, Vec<(Property, bool)>); 3] = [
        (
            Box::new(EqualDivision),
            "ED",
            vec![
                (StrategyProof, true),
                (EnvyFree, true),
                (ContentionFreeEfficient, false),
            ],
        ),
        (
            MechanismSpec::Rsd.build(),
            "RSD",
            vec![
                (StrategyProof, true),
                (ExPostEfficient, true),
                (ContentionFreeEfficient, true),
                (EnvyFree, false),
            ],
        ),
        (
            Box::new(ProbabilisticSerial),
            "PS",
            vec![(EnvyFree, true), (OrdinalEfficient, true), (StrategyProof, false)],
        ),
    ];
    for (mech, label, expected) in &cases {
        let checker = lib(Checker::new(&**mech, 3, Parallelism::Parallel))?;
        for &(p, want) in expected {
            if let Some(w) = expect_verdict(&checker, &**mech, label, p, want)? {
                lines.push(format!(
                    "{label} {} witness: {}",
                    p.label(),
                    w.lines().map(str::trim).collect::<Vec<_>>().join(" / ")
                ));
            }
        }
    }
    let e = lib(Profile::from_rankings(&["abc", "acb", "acb"]))?;
    let ps = lib(ProbabilisticSerial.evaluate(&e))?;
    let expected = lib(Assignment::from_rows(vec![
        vec![q(1, 3), q(2, 3), q(0, 1)],
        vec![q(1, 3), q(1, 6), q(1, 2)],
        vec![q(1, 3), q(1, 6), q(1, 2)],
    ]))?;
    ensure(ps == expected, || format!("PS on profile E: {ps:?}"))?;
    lines.push("PS on profile E matches".into());
    Ok(lines.join("; "))
}

fn c8_dominance() -> Outcome {
    let sixth = q(1, 6);
    let phi = |v: &LinearVector| LinearMechanism::new(v.clone());
    let top = LinearVector::new(vec![sixth.clone(), Rational::ZERO, Rational::ZERO]).unwrap();
    let r = lib(mechanism_dominates(
        &phi(&top),
        &EqualDivision,
        3,
        Parallelism::Parallel,
    ))?;
    ensure(r.strict, || format!("(1/6,0,0) vs ED: {r}"))?;
    let grid = grid3();
    let (mut lifted, mut maximal) = (0, 0);
    for v in &grid {
        let s = v.as_slice();
        if s[0] < sixth {
            let u = LinearVector::new(vec![sixth.clone(), s[1].clone(), s[2].clone()]).unwrap();
            let r = lib(mechanism_dominates(&phi(&u), &phi(v), 3, Parallelism::Parallel))?;
            ensure(r.strict, || {
                format!("{} does not strictly dominate {}", fmt_vec(&u), fmt_vec(v))
            })?;
            lifted += 1;
        } else {
            for u in grid.iter().filter(|u| *u != v) {
                let r = lib(mechanism_dominates(&phi(u), &phi(v), 3, Parallelism::Parallel))?;
                ensure(!r.weak, || format!("{} dominates {}", fmt_vec(u), fmt_vec(v)))?;
            }
            maximal += 1;
        }
    }
    Ok(format!(
        "(1/6,0,0) strictly dominates ED; {lifted} lifts strictly dominate; {maximal} vectors with v1 = 1/6 undominated in the grid"
    ))
}

fn c9_strong_hardness() -> Option<Outcome> {
    if std::env::var_os("RANDASSIGN_SKIP_STRONG").is_some_and(|v| v != "0") {
        return None;
    }
    Some((|| {
        let r = lib(certify_strong_hardness(
            &[Axiom::Sp, Axiom::Ef, Axiom::Neutral],
            Some(STRONG_BUDGET),
        ))?;
        ensure(r.all_below_one(), || "some orbit maximum equals 1".into())?;
        ensure(r.elapsed <= STRONG_BUDGET, || format!("took {:.0?}", r.elapsed))?;
        let largest = r.largest().map(|m| m.value.to_string()).unwrap_or_default();
        Ok(format!(
            "{} orbit maxima, all below 1 (largest {largest}); {:.0?}",
            r.maxima.len(),
            r.elapsed
        ))
    })())
}

fn random_doubly_stochastic(rng: &mut ChaCha8Rng, n: usize) -> Assignment {
    let k = rng.gen_range(1..=n + 2);
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=12)).collect();
    let total: i64 = weights.iter().sum();
    let support = weights
        .into_iter()
        .map(|w| {
            let mut map: Vec<usize> = (0..n).collect();
            map.shuffle(rng);
            (q(w, total), Permutation::new(map).unwrap())
        })
        .collect();
    Lottery { support }.expected().unwrap()
}

fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> Profile {
    let prefs = (0..n)
        .map(|_| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            Preference::from_indices(&order).unwrap()
        })
        .collect();
    Profile::standard(prefs).unwrap()
}

fn c10_flow_decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in [3, 4, 5] {
        let bound = q(1, n as i64);
        for k in 0..100 {
            let p = random_doubly_stochastic(&mut rng, n);
            let profile = random_profile(&mut rng, n);
            let h = lib(decompose_to_transfers(&p, &profile))?;
            ensure(h.reconstruct() == p.cells(), || {
                format!("n={n} sample {k}: reconstruction differs")
            })?;
            ensure(h.max_abs() <= bound, || {
                format!("n={n} sample {k}: max |h| = {}", h.max_abs())
            })?;
        }
    }
    Ok("300 matrices at n=3,4,5 reconstructed exactly with |h| <= 1/n".into())
}

fn c11_birkhoff() -> Outcome {
    let space = lib(ProfileSpace::new(3))?;
    let mut largest = 0;
    for spec in catalog(3) {
        let mech = spec.build();
        for profile in space.iter() {
            let p = lib(mech.evaluate(&profile))?;
            let lottery = lib(birkhoff_decompose(&p))?;
            ensure(lib(lottery.expected())? == p, || {
                format!("{} on {}: mismatch", spec.label(), profile.code())
            })?;
            ensure(lottery.support.len() <= 5, || {
                format!(
                    "{} on {}: support {}",
                    spec.label(),
                    profile.code(),
                    lottery.support.len()
                )
            })?;
            largest = largest.max(lottery.support.len());
        }
    }
    for n in [3, 4] {
        let cert = lib(hull_membership(&Assignment::uniform(n), &Permutation::all(n)))?;
        ensure(!cert.is_infeasible(), || format!("ED at n={n} outside the hull"))?;
    }
    Ok(format!(
        "catalog outputs on 216 profiles reconstructed, largest support {largest}; ED in hull at n=3,4"
    ))
}

fn c12_determinism() -> Outcome {
    let specs = catalog(3);
    let (serial, serial_json, _) = lib(sweep_report(3, &specs, &SWEEP_PROPERTIES, Parallelism::Serial))?;
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).max(8);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    let (parallel, parallel_json, _) =
        lib(pool.install(|| sweep_report(3, &specs, &SWEEP_PROPERTIES, Parallelism::Parallel)))?;
    ensure(serial == parallel, || "text reports differ".into())?;
    ensure(serial_json == parallel_json, || "JSON reports differ".into())?;
    Ok(format!(
        "serial and {threads}-thread reports identical ({} bytes)",
        serial.len()
    ))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Box<dyn Fn() -> Option<Outcome>>)> = vec![
        ("impossibility certificate", Box::new(|| Some(c1_theorem1()))),
        ("profile C derivation", Box::new(|| Some(c2_profile_c()))),
        (
            "linear mechanisms satisfy the symmetric axioms",
            Box::new(|| Some(c3_linear_sufficiency())),
        ),
        (
            "linear transfer reconstruction",
            Box::new(|| Some(c4_linear_necessity())),
        ),
        ("SP iff EF for pairwise exchange", Box::new(|| Some(c5_sp_iff_ef()))),
        ("SP iff swap/upper/lower", Box::new(|| Some(c6_swap_decomposition()))),
        ("catalog verdicts", Box::new(|| Some(c7_catalog_verdicts()))),
        ("linear dominance", Box::new(|| Some(c8_dominance()))),
        ("strong hardness", Box::new(c9_strong_hardness)),
        ("flow decomposition", Box::new(|| Some(c10_flow_decomposition()))),
        ("Birkhoff and hull", Box::new(|| Some(c11_birkhoff()))),
        ("sweep determinism", Box::new(|| Some(c12_determinism()))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        match outcome {
            None => println!("SKIP {:>2} {name}", k + 1),
            Some(Ok(detail)) => println!("PASS {:>2} {name} [{t:.1?}]: {detail}", k + 1),
            Some(Err(why)) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{t:.1?}]: {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
