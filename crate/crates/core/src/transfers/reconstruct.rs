use rayon::prelude::*;

use super::function::{pairwise_cells, TransferFunction, DENSE_CAP};
use crate::mechanisms::Mechanism;
use crate::model::{ObjectSet, Preference, Profile, ProfileSpace};
use crate::{Error, Rational, Result};

/// Tabulates `f(≻, ≻′, a) = P[1][a] − 1/n` where `P` is the mechanism's output on the
/// profile in which agents `1..n-1` report `≻` and agent `n` reports `≻′`.
pub fn reconstruct_f(mech: &dyn Mechanism, n: usize) -> Result<TransferFunction> {
    if n > DENSE_CAP {
        return Err(Error::CapExceeded(format!(
            "transfer reconstruction needs n <= {DENSE_CAP}, got {n}"
        )));
    }
    let objects = ObjectSet::standard(n);
    let prefs = Preference::all(n);
    let base = Rational::new(1, n as i64);
    let pairs: Vec<(usize, usize)> = (0..prefs.len())
        .flat_map(|p| (0..prefs.len()).map(move |q| (p, q)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(p, q)| {
            let mut list = vec![prefs[p].clone(); n - 1];
            list.push(prefs[q].clone());
            let profile = Profile::new(objects.clone(), list)?;
            let out = mech.evaluate(&profile)?;
            if (1..n - 1).any(|i| out.row(i) != out.row(0)) {
                return Err(Error::NotAnonymous(profile.to_string()));
            }
            Ok(out.row(0).iter().map(|x| x - &base).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    TransferFunction::from_dense(objects, rows.into_iter().flatten().collect())
}

/// Outcome of comparing a mechanism with the pairwise exchange mechanism of its own
/// reconstructed transfer function.
#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub is_pairwise_exchange: bool,
    pub witness: Option<Profile>,
    pub f: TransferFunction,
}

/// Reconstructs `f` and checks `mech(≻) = 1/n + Σ f(≻i, ≻j, ·)` on every profile; the
/// witness is the first mismatching profile in canonical order.
pub fn roundtrip_check(mech: &dyn Mechanism, n: usize) -> Result<RoundTrip> {
    let f = reconstruct_f(mech, n)?;
    let space = ProfileSpace::new(n)?;
    let mismatch = (0..space.len())
        .into_par_iter()
        .map(|k| -> Result<bool> {
            let profile = space.profile(k);
            let out = mech.evaluate(&profile)?;
            Ok(out.cells() != pairwise_cells(&profile, &f)?.as_slice())
        })
        .position_first(|r| !matches!(r, Ok(false)));
    let witness = match mismatch {
        None => None,
        Some(k) => {
            let profile = space.profile(k);
            // surface evaluation errors rather than reporting them as mismatches
            let out = mech.evaluate(&profile)?;
            debug_assert!(out.cells() != pairwise_cells(&profile, &f)?.as_slice());
            Some(profile)
        }
    };
    Ok(RoundTrip {
        is_pairwise_exchange: witness.is_none(),
        witness,
        f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{EqualDivision, LinearMechanism, LinearVector, ProbabilisticSerial, SerialDictatorship};
    use crate::model::Permutation;
    use crate::transfers::f_from_v;

    #[test]
    fn equal_division_reconstructs_zero() {
        assert_eq!(reconstruct_f(&EqualDivision, 3).unwrap(), TransferFunction::zero(3));
        assert!(roundtrip_check(&EqualDivision, 3).unwrap().is_pairwise_exchange);
    }

    #[test]
    fn linear_reconstructs_its_vector() {
        let v: LinearVector = "(1/6,1/12,0)".parse().unwrap();
        let m = LinearMechanism::new(v.clone());
        assert_eq!(reconstruct_f(&m, 3).unwrap(), f_from_v(&v));
        assert!(roundtrip_check(&m, 3).unwrap().is_pairwise_exchange);
    }

    #[test]
    fn ps_is_not_pairwise_exchange() {
        let rt = roundtrip_check(&ProbabilisticSerial, 3).unwrap();
        assert!(!rt.is_pairwise_exchange);
        assert!(rt.witness.is_some());
    }

    #[test]
    fn fixed_dictatorship_is_not_anonymous() {
        let sd = SerialDictatorship {
            order: Permutation::identity(3),
        };
        assert!(matches!(reconstruct_f(&sd, 3), Err(Error::NotAnonymous(_))));
    }
}
