use num_rational::BigRational;
use proptest::prelude::*;

use randassign::certify::{fourier_motzkin, lp_solve, verify, FmOutcome, LinearSystem, Sense};
use randassign::lottery::{birkhoff_decompose, Lottery};
use randassign::mechanisms::{
    linear_mechanism, probabilistic_serial, random_serial_dictatorship, LinearVector, PairwiseExchange,
};
use randassign::model::{sd_dominates, Assignment, Permutation, Preference, Profile, ProfileSpace};
use randassign::properties::{check_ex_post_efficient, check_ordinal_efficient, Checker, Parallelism};
use randassign::rational::q;
use randassign::transfers::{decompose_to_transfers, f_from_v, pairwise_exchange, TransferFunction};
use randassign::Rational;

fn rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        (-50i64..50, 1i64..50).prop_map(|(a, b)| q(a, b)),
        (any::<i64>(), 1i64..i64::MAX).prop_map(|(a, b)| q(a, b)),
    ]
}

fn big(x: &Rational) -> BigRational {
    x.to_big()
}

fn preference(n: usize) -> impl Strategy<Value = Preference> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|order| Preference::from_indices(&order).unwrap())
}

fn profile(n: usize) -> impl Strategy<Value = Profile> {
    proptest::collection::vec(preference(n), n).prop_map(|prefs| Profile::standard(prefs).unwrap())
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|map| Permutation::new(map).unwrap())
}

/// Doubly stochastic matrix as the mean of a random lottery.
fn doubly_stochastic(n: usize) -> impl Strategy<Value = Assignment> {
    proptest::collection::vec((1i64..10, permutation(n)), 1..=n + 2).prop_map(|parts| {
        let total: i64 = parts.iter().map(|(w, _)| w).sum();
        let support = parts.into_iter().map(|(w, p)| (q(w, total), p)).collect();
        Lottery { support }.expected().unwrap()
    })
}

fn linear_vector(n: usize) -> impl Strategy<Value = LinearVector> {
    let top = (n * (n - 1)) as i64;
    proptest::collection::vec(0i64..=12, n - 1).prop_map(move |mut head| {
        head.sort_unstable_by(|a, b| b.cmp(a));
        let mut v: Vec<Rational> = head.into_iter().map(|k| q(k, 12 * top)).collect();
        v.push(Rational::ZERO);
        LinearVector::new(v).unwrap()
    })
}

/// Anti-symmetric balanced bounded transfers at n=3 with a small value range, so both
/// satisfying and violating functions are common.
fn transfer3() -> impl Strategy<Value = TransferFunction> {
    proptest::collection::vec((-1i64..=1, -1i64..=1), 15).prop_map(|pairs| {
        let prefs = Preference::all(3);
        let m = prefs.len();
        let mut table = vec![Rational::ZERO; m * m * 3];
        let mut it = pairs.into_iter();
        for p in 0..m {
            for r in p + 1..m {
                let (x, y) = it.next().unwrap();
                for (a, s) in [x, y, -(x + y)].into_iter().enumerate() {
                    table[(p * m + r) * 3 + a] = q(s, 12);
                    table[(r * m + p) * 3 + a] = q(-s, 12);
                }
            }
        }
        TransferFunction::from_dense(randassign::model::ObjectSet::standard(3), table).unwrap()
    })
}

fn small_system() -> impl Strategy<Value = LinearSystem> {
    let row = (proptest::collection::vec(-3i64..=3, 3), 0usize..3, -4i64..=4);
    proptest::collection::vec(row, 1..=5).prop_map(|rows| {
        let mut sys = LinearSystem::new();
        for j in 0..3 {
            sys.add_var(format!("x{j}"));
        }
        for (k, (coeffs, sense, rhs)) in rows.into_iter().enumerate() {
            let sense = [Sense::Le, Sense::Ge, Sense::Eq][sense];
            let terms = coeffs
                .into_iter()
                .enumerate()
                .map(|(j, c)| (j, Rational::from_integer(c)));
            sys.add_row(terms, sense, Rational::from_integer(rhs), format!("r{k}"));
        }
        sys
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rational_ops_match_bigrational(a in rational(), b in rational()) {
        prop_assert_eq!(big(&(&a + &b)), big(&a) + big(&b));
        prop_assert_eq!(big(&(&a - &b)), big(&a) - big(&b));
        prop_assert_eq!(big(&(&a * &b)), big(&a) * big(&b));
        if !b.is_zero() {
            prop_assert_eq!(big(&(&a / &b)), big(&a) / big(&b));
        }
        prop_assert_eq!(a.cmp(&b), big(&a).cmp(&big(&b)));
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn simplex_agrees_with_fourier_motzkin(sys in small_system()) {
        let cert = lp_solve(&sys).unwrap();
        verify(&sys, &cert).unwrap();
        match fourier_motzkin(&sys, 10_000).unwrap() {
            FmOutcome::Feasible => prop_assert!(!cert.is_infeasible()),
            FmOutcome::Infeasible(fm) => {
                prop_assert!(cert.is_infeasible());
                verify(&sys, &fm).unwrap();
            }
        }
    }

    #[test]
    fn profile_index_roundtrip(p in profile(4)) {
        let space = ProfileSpace::new(4).unwrap();
        let k = space.index_of(&p).unwrap();
        prop_assert_eq!(k, p.index());
        prop_assert_eq!(space.profile(k), p);
    }

    #[test]
    fn preference_index_roundtrip(p in preference(5)) {
        prop_assert_eq!(Preference::from_index(5, p.index()), p);
    }

    #[test]
    fn birkhoff_reconstructs(p in (3usize..=5).prop_flat_map(doubly_stochastic)) {
        let n = p.n();
        let lottery = birkhoff_decompose(&p).unwrap();
        prop_assert_eq!(lottery.expected().unwrap(), p);
        prop_assert!(lottery.support.len() <= (n - 1) * (n - 1) + 1);
        prop_assert!(lottery.support.iter().all(|(w, _)| w.is_positive()));
    }

    #[test]
    fn flow_decomposition_bounded((p, prof) in (3usize..=5).prop_flat_map(|n| (doubly_stochastic(n), profile(n)))) {
        let n = prof.n();
        let h = decompose_to_transfers(&p, &prof).unwrap();
        prop_assert_eq!(h.reconstruct(), p.cells().to_vec());
        prop_assert!(h.max_abs() <= q(1, n as i64));
    }

    #[test]
    fn ps_is_envy_free_per_profile(prof in (3usize..=5).prop_flat_map(profile)) {
        let p = probabilistic_serial(&prof);
        for i in 0..prof.n() {
            for j in 0..prof.n() {
                let (weak, _) = sd_dominates(p.row(i), p.row(j), prof.pref(i));
                prop_assert!(weak, "agent {} envies agent {}", i + 1, j + 1);
            }
        }
    }

    #[test]
    fn linear_equals_pairwise_exchange((v, prof) in (3usize..=5).prop_flat_map(|n| (linear_vector(n), profile(n)))) {
        prop_assert_eq!(linear_mechanism(&prof, &v).unwrap(), pairwise_exchange(&prof, &f_from_v(&v)).unwrap());
    }

    #[test]
    fn ordinal_efficiency_implies_ex_post(p in doubly_stochastic(3), prof in profile(3)) {
        let ordinal = check_ordinal_efficient(&p, &prof).unwrap();
        let expost = check_ex_post_efficient(&p, &prof).unwrap();
        prop_assert!(!ordinal.holds || expost.holds);
    }

    #[test]
    fn ps_ordinal_and_rsd_ex_post_efficient(prof in profile(3)) {
        let ps = probabilistic_serial(&prof);
        prop_assert!(check_ordinal_efficient(&ps, &prof).unwrap().holds);
        let rsd = random_serial_dictatorship(&prof).unwrap();
        prop_assert!(check_ex_post_efficient(&rsd, &prof).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pairwise_exchange_axiom_implications(f in transfer3()) {
        prop_assert!(f.is_valid().unwrap());
        let mech = PairwiseExchange::new(f);
        let checker = Checker::new(&mech, 3, Parallelism::Serial).unwrap();
        let sp = checker.strategy_proof().holds;
        let ef = checker.envy_free().holds;
        prop_assert!(!ef || checker.equal_treatment().holds);
        prop_assert_eq!(sp, checker.swap_upper_lower().all_hold());
        prop_assert_eq!(sp, ef);
        prop_assert!(checker.anonymous().holds);
    }
}
