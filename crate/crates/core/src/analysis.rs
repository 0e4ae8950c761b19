//! What the eavesdropper can do with a code.
//!
//! Eve sees only the transmitted bin. Her squared-error-optimal estimate is
//! the posterior mean of the protected value given that bin, and her
//! distortion is the expected posterior variance. [`achievable_distortion`]
//! computes this by enumerating every (value, key) pair and is the reference
//! every other route is tested against. [`delta_general`] and
//! [`delta_uniform`] are the closed forms of the advantage
//! `D_max - D_ach` in terms of bin statistics.

use crate::alphabet::SourceAlphabet;
use crate::code::{bin_statistics, check_dims, KeyedCode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eve's view of each bin.
#[derive(Clone, Debug, PartialEq)]
pub struct EvePosterior<T> {
    /// `p(tau_j)`.
    pub tau_prob: Vec<T>,
    /// `E[Y | tau_j]`, `None` for bins that are never transmitted.
    pub tau_mean: Vec<Option<T>>,
    /// Bins with positive probability.
    pub support: Vec<usize>,
}

impl<T: Scalar> EvePosterior<T> {
    /// `var(E[Y | tau])`, which equals the advantage `D_max - D_ach`.
    pub fn explained_variance(&self, mean: &T) -> T {
        self.support.iter().fold(T::zero(), |acc, &j| {
            let dev = self.tau_mean[j].clone().expect("supported bin") - mean.clone();
            acc + self.tau_prob[j].clone() * dev.clone() * dev
        })
    }
}

/// `D_max`: variance of the protected value under its prior.
pub fn max_distortion<T: Scalar>(alphabet: &SourceAlphabet<T>) -> T {
    alphabet.variance_of(alphabet.values())
}

/// Posterior of the protected value given the bin.
pub fn eve_posterior<T: Scalar>(code: &KeyedCode, alphabet: &SourceAlphabet<T>) -> Result<EvePosterior<T>> {
    posterior_of(code, alphabet, alphabet.values())
}

/// Posterior mean of an arbitrary function of the value (a table in
/// canonical order) given the bin.
pub fn posterior_of<T: Scalar>(code: &KeyedCode, alphabet: &SourceAlphabet<T>, table: &[T]) -> Result<EvePosterior<T>> {
    check_dims(code, alphabet)?;
    if table.len() != alphabet.len() {
        return Err(Error::DimensionMismatch { code_m: table.len(), alphabet_m: alphabet.len() });
    }
    let keys = T::from_count(code.key_count());
    let n = code.multiplicities();
    let r = code.r();
    let mut tau_prob = Vec::with_capacity(r);
    let mut tau_mean = Vec::with_capacity(r);
    let mut support = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for j in 0..r {
        let weights: Vec<(usize, T)> = (0..alphabet.len())
            .filter(|&i| n[i][j] > 0 && !alphabet.prob(i).is_zero())
            .map(|i| (i, alphabet.prob(i).clone() * T::from_count(n[i][j]) / keys.clone()))
            .collect();
        let prob = weights.iter().fold(T::zero(), |a, (_, w)| a + w.clone());
        tau_mean.push(weighted_mean(&weights, table));
        if !prob.is_zero() {
            support.push(j);
        }
        tau_prob.push(prob);
    }
    Ok(EvePosterior { tau_prob, tau_mean, support })
}

/// Weighted mean; a single contributor is returned unchanged so that an
/// exact observation carries no rounding.
pub(crate) fn weighted_mean<T: Scalar>(weights: &[(usize, T)], table: &[T]) -> Option<T> {
    match weights {
        [] => None,
        [(i, _)] => Some(table[*i].clone()),
        _ => {
            let total = weights.iter().fold(T::zero(), |a, (_, w)| a + w.clone());
            let num = weights
                .iter()
                .fold(T::zero(), |a, (i, w)| a + w.clone() * table[*i].clone());
            Some(num / total)
        }
    }
}

/// `D_ach`: Eve's minimum mean squared error, by enumeration of every
/// (value, key) pair. Makes no use of bin statistics or uniformity.
pub fn achievable_distortion<T: Scalar>(code: &KeyedCode, alphabet: &SourceAlphabet<T>) -> Result<T> {
    check_dims(code, alphabet)?;
    Ok(achievable_distortion_with(alphabet, code.key_count(), code.r(), |key, v| {
        code.assignment()[key][v]
    }))
}

/// MMSE distortion of an arbitrary deterministic observation
/// `observe(key, value) -> symbol` with `symbol < symbols` and a uniform key.
pub fn achievable_distortion_with<T, F>(alphabet: &SourceAlphabet<T>, key_count: usize, symbols: usize, observe: F) -> T
where
    T: Scalar,
    F: Fn(usize, usize) -> usize,
{
    let keys = T::from_count(key_count);
    let mut contributors: Vec<Vec<(usize, T)>> = vec![Vec::new(); symbols];
    for key in 0..key_count {
        for v in 0..alphabet.len() {
            if alphabet.prob(v).is_zero() {
                continue;
            }
            let w = alphabet.prob(v).clone() / keys.clone();
            let slot = &mut contributors[observe(key, v)];
            match slot.iter_mut().find(|(i, _)| *i == v) {
                Some((_, acc)) => *acc = acc.clone() + w,
                None => slot.push((v, w)),
            }
        }
    }
    let values = alphabet.values();
    contributors.iter().fold(T::zero(), |acc, weights| {
        let Some(estimate) = weighted_mean(weights, values) else { return acc };
        weights.iter().fold(acc, |acc, (i, w)| {
            let err = values[*i].clone() - estimate.clone();
            acc + w.clone() * err.clone() * err
        })
    })
}

/// Advantage `D_max - D_ach` from bin statistics: the uniform shortcut when
/// the pmf is uniform, the general expression otherwise.
pub fn delta_closed_form<T: Scalar>(code: &KeyedCode, alphabet: &SourceAlphabet<T>) -> Result<T> {
    if alphabet.is_uniform() {
        delta_uniform(code, alphabet)
    } else {
        delta_general(code, alphabet)
    }
}

/// `sum_j (sum_i y_i p(tau_j|y_i) p(y_i))^2 / p(tau_j) - E[Y]^2`, summed over
/// bins in the support, with `p(tau_j | y_i) = n_ij / 2^k`.
pub fn delta_general<T: Scalar>(code: &KeyedCode, alphabet: &SourceAlphabet<T>) -> Result<T> {
    let stats = bin_statistics(code, alphabet)?;
    let keys = T::from_count(code.key_count());
    let mut total = T::zero();
    for j in 0..code.r() {
        let mut p_tau = T::zero();
        let mut first_moment = T::zero();
        for i in 0..alphabet.len() {
            let n = stats.multiplicity[i][j];
            if n == 0 {
                continue;
            }
            let joint = T::from_count(n) / keys.clone() * alphabet.prob(i).clone();
            p_tau = p_tau + joint.clone();
            first_moment = first_moment + alphabet.value(i).clone() * joint;
        }
        if !p_tau.is_zero() {
            total = total + first_moment.clone() * first_moment / p_tau;
        }
    }
    let mu = alphabet.mean();
    Ok(total - mu.clone() * mu)
}

/// `(1 / (2^k m)) sum_j S_j^2 / N_j - E[Y]^2` for uniform alphabets.
pub fn delta_uniform<T: Scalar>(code: &KeyedCode, alphabet: &SourceAlphabet<T>) -> Result<T> {
    if !alphabet.is_uniform() {
        return Err(Error::NonUniform);
    }
    let stats = bin_statistics(code, alphabet)?;
    let total = stats
        .sums
        .iter()
        .zip(&stats.counts)
        .filter(|(_, &n)| n > 0)
        .fold(T::zero(), |acc, (s, &n)| acc + s.clone() * s.clone() / T::from_count(n));
    let mu = alphabet.mean();
    Ok(total / T::from_count(code.key_count() * alphabet.len()) - mu.clone() * mu)
}

/// Perfect distortion security: every observable bin has posterior mean
/// equal to the prior mean. Exact on the rational path; within `tol`
/// otherwise.
pub fn is_perfectly_secure<T: Scalar>(code: &KeyedCode, alphabet: &SourceAlphabet<T>, tol: f64) -> Result<bool> {
    let posterior = eve_posterior(code, alphabet)?;
    Ok(all_means_equal(&posterior, &alphabet.mean(), tol))
}

pub(crate) fn all_means_equal<T: Scalar>(posterior: &EvePosterior<T>, mean: &T, tol: f64) -> bool {
    posterior
        .support
        .iter()
        .all(|&j| posterior.tau_mean[j].as_ref().expect("supported").approx_eq(mean, tol))
}

/// Distortions of one code together with the two key-size bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport<T> {
    pub m: usize,
    pub k: u32,
    pub r: usize,
    pub d_max: T,
    pub d_ach: T,
    /// `d_max - d_ach`.
    pub delta: T,
    /// Largest minus smallest value.
    pub spread: T,
    /// `d_max / 2^k`.
    pub bound1: T,
    /// `spread^2 / 2^(2k)`.
    pub bound2: T,
    /// `None` when the bounds do not apply (non-uniform pmf).
    pub bound1_ok: Option<bool>,
    pub bound2_ok: Option<bool>,
    pub perfectly_secure: bool,
}

/// Computes every distortion quantity for one code and checks both bounds.
///
/// Bounds are only claimed for uniform alphabets; for others the flags are
/// `None` and the distortions are still reported.
pub fn bound_report<T: Scalar>(code: &KeyedCode, alphabet: &SourceAlphabet<T>, tol: f64) -> Result<DistortionReport<T>> {
    let d_max = max_distortion(alphabet);
    let d_ach = achievable_distortion(code, alphabet)?;
    let delta = d_max.clone() - d_ach.clone();
    let spread = alphabet.spread();
    let keys = T::from_count(code.key_count());
    let bound1 = d_max.clone() / keys.clone();
    let spread_sq = spread.clone() * spread.clone();
    let bound2 = spread_sq.clone() / (keys.clone() * keys);
    let (bound1_ok, bound2_ok) = if alphabet.is_uniform() {
        (
            Some(delta <= bound1.clone() + T::slack(&d_max)),
            Some(delta <= bound2.clone() + T::slack(&spread_sq)),
        )
    } else {
        (None, None)
    };
    Ok(DistortionReport {
        m: alphabet.len(),
        k: code.k(),
        r: code.r(),
        perfectly_secure: is_perfectly_secure(code, alphabet, tol)?,
        d_max,
        d_ach,
        delta,
        spread,
        bound1,
        bound2,
        bound1_ok,
        bound2_ok,
    })
}
