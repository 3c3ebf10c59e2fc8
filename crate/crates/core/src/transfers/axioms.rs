use super::function::{Check, TransferFunction};
use crate::model::{ObjectId, Preference};
use crate::{Rational, Result};

/// Invariance and monotonicity properties of a transfer function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub sender_invariance: Check,
    pub receiver_invariance: Check,
    pub swap_monotonicity: Check,
}

/// Zero-transfer and non-negative-prefix conditions that envy-freeness forces on `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfLemmaReport {
    /// `f(≻, ≻′, a_t) = 0` whenever `≻′` agrees with `≻` on positions `1..=t` or `t..=n`.
    pub zero_transfers: Check,
    /// `Σ_{k≤t} f(≻, ≻′, a_k) ≥ 0` with `a_k = σ(≻, k)`.
    pub nonnegative_prefix: Check,
}

fn common_prefix(x: &Preference, y: &Preference) -> usize {
    x.order().iter().zip(y.order()).take_while(|(a, b)| a == b).count()
}

fn common_suffix(x: &Preference, y: &Preference) -> usize {
    x.order()
        .iter()
        .rev()
        .zip(y.order().iter().rev())
        .take_while(|(a, b)| a == b)
        .count()
}

fn pref(f: &TransferFunction, p: usize) -> String {
    format!("<{}>", f.prefs()[p].display_with(f.objects(), ","))
}

fn obj(f: &TransferFunction, a: ObjectId) -> &str {
    f.objects().token(a)
}

/// Sender invariance, receiver invariance and swap-monotonicity, each checked exhaustively
/// with the first violation in canonical order as witness.
///
/// - sender: if `≻′, ≻″` agree on positions `1..=t` (or `t..=n`) then
///   `f(≻, ≻′, a_t) = f(≻, ≻″, a_t)` with `a_t = σ(≻′, t)`;
/// - receiver: with `≻ = ⟨a_1..a_n⟩`, if `rank(≻′, a_k) = rank(≻″, a_k)` for all `k ≤ t`
///   (or all `k ≥ t`) then `f(≻, ≻′, a_t) = f(≻, ≻″, a_t)`;
/// - swap: if `≻″` swaps the adjacent pair `a ≻′ b` of `≻′` then `f(≻′, ≻, a) ≥ f(≻″, ≻, a)`.
pub fn check_f_axioms(f: &TransferFunction) -> Result<AxiomReport> {
    f.require_valid()?;
    let prefs = f.prefs();
    let m = prefs.len();
    let n = f.n();

    let sender = (|| {
        for r in 0..m {
            for s1 in 0..m {
                for s2 in 0..m {
                    if s1 == s2 {
                        continue;
                    }
                    let (x, y) = (&prefs[s1], &prefs[s2]);
                    let pre = common_prefix(x, y);
                    let suf = common_suffix(x, y);
                    for t in 1..=n {
                        if t <= pre || t > n - suf {
                            let a = x.sigma(t);
                            let (u, w) = (f.at(r, s1, a.0), f.at(r, s2, a.0));
                            if u != w {
                                return Some(format!(
                                    "f({}, {}, {a}) = {u} but f({}, {}, {a}) = {w} (senders agree at position {t})",
                                    pref(f, r),
                                    pref(f, s1),
                                    pref(f, r),
                                    pref(f, s2),
                                    a = obj(f, a)
                                ));
                            }
                        }
                    }
                }
            }
        }
        None
    })();

    let receiver = (|| {
        for r in 0..m {
            let recv = &prefs[r];
            for s1 in 0..m {
                for s2 in 0..m {
                    if s1 == s2 {
                        continue;
                    }
                    let same = |k: usize| prefs[s1].rank_of(recv.sigma(k)) == prefs[s2].rank_of(recv.sigma(k));
                    let pre = (1..=n).take_while(|&k| same(k)).count();
                    let suf = (1..=n).rev().take_while(|&k| same(k)).count();
                    for t in 1..=n {
                        if t <= pre || t > n - suf {
                            let a = recv.sigma(t);
                            let (u, w) = (f.at(r, s1, a.0), f.at(r, s2, a.0));
                            if u != w {
                                return Some(format!(
                                    "f({}, {}, {a}) = {u} but f({}, {}, {a}) = {w} (receiver ranks agree through position {t})",
                                    pref(f, r),
                                    pref(f, s1),
                                    pref(f, r),
                                    pref(f, s2),
                                    a = obj(f, a)
                                ));
                            }
                        }
                    }
                }
            }
        }
        None
    })();

    let swap = (|| {
        for s in 0..m {
            for r1 in 0..m {
                let x = &prefs[r1];
                for pos in 0..n - 1 {
                    let r2 = x.swap_adjacent(pos).index();
                    let a = x.order()[pos];
                    let (u, w) = (f.at(r1, s, a.0), f.at(r2, s, a.0));
                    if u < w {
                        return Some(format!(
                            "f({}, {}, {a}) = {u} < f({}, {}, {a}) = {w} after demoting {a}",
                            pref(f, r1),
                            pref(f, s),
                            pref(f, r2),
                            pref(f, s),
                            a = obj(f, a)
                        ));
                    }
                }
            }
        }
        None
    })();

    Ok(AxiomReport {
        sender_invariance: Check::from_first(sender),
        receiver_invariance: Check::from_first(receiver),
        swap_monotonicity: Check::from_first(swap),
    })
}

/// Conditions envy-freeness of `φ^f` imposes on `f`: zero transfers of shared prefix or
/// suffix objects, and non-negative prefix sums of received transfers along the
/// receiver's own ranking.
pub fn check_ef_transfer_lemmas(f: &TransferFunction) -> Result<EfLemmaReport> {
    f.require_valid()?;
    let prefs = f.prefs();
    let m = prefs.len();
    let n = f.n();

    let zero = (|| {
        for r in 0..m {
            for s in 0..m {
                let (x, y) = (&prefs[r], &prefs[s]);
                let pre = common_prefix(x, y);
                let suf = common_suffix(x, y);
                for t in 1..=n {
                    if t <= pre || t > n - suf {
                        let a = x.sigma(t);
                        let u = f.at(r, s, a.0);
                        if !u.is_zero() {
                            return Some(format!(
                                "f({}, {}, {}) = {u}, expected 0 (agreement at position {t})",
                                pref(f, r),
                                pref(f, s),
                                obj(f, a)
                            ));
                        }
                    }
                }
            }
        }
        None
    })();

    let prefix = (|| {
        for r in 0..m {
            for s in 0..m {
                let mut acc = Rational::ZERO;
                for t in 1..=n {
                    acc += f.at(r, s, prefs[r].sigma(t).0);
                    if acc.is_negative() {
                        return Some(format!(
                            "prefix sum over the top {t} of {} received from {} is {acc} < 0",
                            pref(f, r),
                            pref(f, s)
                        ));
                    }
                }
            }
        }
        None
    })();

    Ok(EfLemmaReport {
        zero_transfers: Check::from_first(zero),
        nonnegative_prefix: Check::from_first(prefix),
    })
}

/// Monotonicity strategy-proofness forces: for `≻ = ⟨a_1..a_n⟩` and all `≻′, ≻″, t`,
/// `Σ_{k≤t} f(≻, ≻″, a_k) ≥ Σ_{k≤t} f(≻′, ≻″, a_k)`.
pub fn check_sp_monotone(f: &TransferFunction) -> Result<Check> {
    f.require_valid()?;
    let prefs = f.prefs();
    let m = prefs.len();
    let n = f.n();
    for r in 0..m {
        for r2 in 0..m {
            for s in 0..m {
                let mut diff = Rational::ZERO;
                for t in 1..=n {
                    let a = prefs[r].sigma(t).0;
                    diff += f.at(r, s, a) - f.at(r2, s, a);
                    if diff.is_negative() {
                        return Ok(Check::fail(format!(
                            "top-{t} transfers to {} from {} fall short of those to {} by {}",
                            pref(f, r),
                            pref(f, s),
                            pref(f, r2),
                            -diff
                        )));
                    }
                }
            }
        }
    }
    Ok(Check::pass())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::LinearVector;
    use crate::model::ObjectSet;
    use crate::rational::q;
    use crate::transfers::f_from_v;

    #[test]
    fn linear_and_zero_pass_everything() {
        for f in [
            TransferFunction::zero(3),
            f_from_v(&"(1/6,0,0)".parse::<LinearVector>().unwrap()),
            f_from_v(&"(1/6,1/12,0)".parse::<LinearVector>().unwrap()),
            f_from_v(&"(1/12,1/24,1/48,0)".parse::<LinearVector>().unwrap()),
        ] {
            let r = check_f_axioms(&f).unwrap();
            assert!(r.sender_invariance.holds && r.receiver_invariance.holds && r.swap_monotonicity.holds);
            let e = check_ef_transfer_lemmas(&f).unwrap();
            assert!(e.zero_transfers.holds && e.nonnegative_prefix.holds);
            assert!(check_sp_monotone(&f).unwrap().holds);
        }
    }

    #[test]
    fn cycle_of_non_adjacent_pairs_breaks_sender_invariance() {
        // abc and cba are not adjacent; put +1/12 of a and -1/12 of c from cba to abc.
        let objs = ObjectSet::standard(3);
        let f = TransferFunction::from_fn(objs, |p, r, a| {
            let (abc, cba) = (0, 5);
            let sign = match (p.index(), r.index()) {
                (x, y) if x == abc && y == cba => 1,
                (x, y) if x == cba && y == abc => -1,
                _ => 0,
            };
            match a.0 {
                0 => q(sign, 12),
                2 => q(-sign, 12),
                _ => Rational::ZERO,
            }
        })
        .unwrap();
        assert!(f.is_valid().unwrap());
        let r = check_f_axioms(&f).unwrap();
        assert!(!r.sender_invariance.holds);
        assert!(r.sender_invariance.witness.is_some());
    }

    #[test]
    fn negative_first_prefix_fails() {
        let objs = ObjectSet::standard(3);
        // abc receives -1/12 of a and +1/12 of b from bac; bac the reverse
        let f = TransferFunction::from_fn(objs, |p, r, a| {
            let sign = match (p.index(), r.index()) {
                (0, 2) => 1,
                (2, 0) => -1,
                _ => 0,
            };
            match a.0 {
                0 => q(-sign, 12),
                1 => q(sign, 12),
                _ => Rational::ZERO,
            }
        })
        .unwrap();
        let e = check_ef_transfer_lemmas(&f).unwrap();
        assert!(!e.nonnegative_prefix.holds);
        assert!(e.nonnegative_prefix.witness.unwrap().contains("top 1 of <a,b,c>"));
    }
}
