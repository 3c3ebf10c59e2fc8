use crate::model::{factorial, Assignment, Permutation, Profile};
use crate::{Error, Rational, Result};

/// Largest `n` for which random serial dictatorship is computed by enumerating all orders.
pub const DEFAULT_RSD_CAP: usize = 8;

/// Object picked by each agent when agents choose in `order` (0-based agent indices,
/// `order(0)` picks first).
fn picks(profile: &Profile, order: &[usize]) -> Vec<usize> {
    let n = profile.n();
    let mut taken = vec![false; n];
    let mut got = vec![usize::MAX; n];
    for &i in order {
        let a = profile
            .pref(i)
            .order()
            .iter()
            .find(|a| !taken[a.0])
            .expect("an object remains for every agent");
        taken[a.0] = true;
        got[i] = a.0;
    }
    got
}

/// Agents pick in the given order, each taking her best remaining object.
pub fn serial_dictatorship(profile: &Profile, order: &Permutation) -> Result<Assignment> {
    if order.len() != profile.n() {
        return Err(Error::Invalid(format!(
            "agent order of size {} for n={}",
            order.len(),
            profile.n()
        )));
    }
    let got = picks(profile, order.as_slice());
    let perm = Permutation::new(got).expect("picks are distinct");
    Ok(Assignment::from_permutation(&perm))
}

/// Exact average of serial dictatorship over all `n!` agent orders (`n <= 8`).
pub fn random_serial_dictatorship(profile: &Profile) -> Result<Assignment> {
    random_serial_dictatorship_capped(profile, DEFAULT_RSD_CAP)
}

pub(crate) fn random_serial_dictatorship_capped(profile: &Profile, cap: usize) -> Result<Assignment> {
    let n = profile.n();
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "exact random serial dictatorship enumerates {n}! orders, above the cap n <= {cap}; \
             draw orders with lottery::sample_serial_order instead"
        )));
    }
    let mut counts = vec![0u64; n * n];
    for order in Permutation::all(n) {
        for (i, a) in picks(profile, order.as_slice()).into_iter().enumerate() {
            counts[i * n + a] += 1;
        }
    }
    let total = factorial(n) as i64;
    Assignment::from_cells(n, counts.into_iter().map(|c| Rational::new(c as i64, total)).collect())
}
