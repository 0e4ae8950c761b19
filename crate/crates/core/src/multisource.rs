//! Several independent sources, each with its own key and code, and a
//! receiver computing a sum of products of per-source functions.
//!
//! [`joint_posterior`] enumerates the full product space of values and keys
//! and is the reference for everything else here. The factorized route
//! ([`factorized_conditional_mean`]) multiplies per-source posterior means
//! and is checked against it.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::alphabet::SourceAlphabet;
use crate::analysis::{posterior_of, DistortionReport, EvePosterior};
use crate::code::{check_dims, KeyedCode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default limit on joint (value, key) states enumerated exactly.
pub const DEFAULT_MAX_STATES: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctionForm {
    /// `sum_l prod_i f_i^(l)(x_i)`.
    SumOfProducts,
    /// `sum_i f_i(x_i)`.
    Sum,
    /// `prod_i f_i(x_i)`.
    Product,
}

/// `f(x) = sum_l prod_i f_i^(l)(x_i)` with every factor given as a table
/// over the source's canonical (descending) value order.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableFunction<T> {
    form: FunctionForm,
    sizes: Vec<usize>,
    /// terms[l][i][x]
    terms: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> SeparableFunction<T> {
    pub fn sum_of_products(terms: Vec<Vec<Vec<T>>>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidFunction("at least one term is required".into()))?;
        let sizes: Vec<usize> = first.iter().map(Vec::len).collect();
        if sizes.is_empty() {
            return Err(Error::InvalidFunction("at least one source is required".into()));
        }
        for (l, term) in terms.iter().enumerate() {
            let these: Vec<usize> = term.iter().map(Vec::len).collect();
            if these != sizes {
                return Err(Error::InvalidFunction(format!(
                    "term {l} has table sizes {these:?}, expected {sizes:?}"
                )));
            }
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidFunction("empty component table".into()));
        }
        Ok(Self { form: FunctionForm::SumOfProducts, sizes, terms })
    }

    /// `sum_i f_i(x_i)`, one table per source.
    pub fn sum(components: Vec<Vec<T>>) -> Result<Self> {
        let n = components.len();
        let terms = (0..n)
            .map(|l| {
                components
                    .iter()
                    .enumerate()
                    .map(|(i, table)| if i == l { table.clone() } else { vec![T::one(); table.len()] })
                    .collect()
            })
            .collect();
        let mut f = Self::sum_of_products(terms)?;
        f.form = FunctionForm::Sum;
        Ok(f)
    }

    /// `prod_i f_i(x_i)`, one table per source.
    pub fn product(components: Vec<Vec<T>>) -> Result<Self> {
        let mut f = Self::sum_of_products(vec![components])?;
        f.form = FunctionForm::Product;
        Ok(f)
    }

    /// Sum of the source values themselves.
    pub fn sum_of_values(sources: &[SourceAlphabet<T>]) -> Result<Self> {
        Self::sum(sources.iter().map(|s| s.values().to_vec()).collect())
    }

    /// Product of the source values themselves.
    pub fn product_of_values(sources: &[SourceAlphabet<T>]) -> Result<Self> {
        Self::product(sources.iter().map(|s| s.values().to_vec()).collect())
    }

    pub fn form(&self) -> FunctionForm {
        self.form
    }

    pub fn sources(&self) -> usize {
        self.sizes.len()
    }

    pub fn terms(&self) -> &[Vec<Vec<T>>] {
        &self.terms
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// The per-source function `f_i` of a pure sum or pure product.
    pub fn component(&self, source: usize) -> Option<&[T]> {
        match self.form {
            FunctionForm::Sum => self.terms.get(source).map(|t| t[source].as_slice()),
            FunctionForm::Product => self.terms[0].get(source).map(Vec::as_slice),
            FunctionForm::SumOfProducts => None,
        }
    }

    /// `f` at one joint value (canonical indices).
    pub fn evaluate(&self, joint: &[usize]) -> Result<T> {
        if joint.len() != self.sizes.len() {
            return Err(Error::InvalidFunction(format!(
                "expected {} indices, got {}",
                self.sizes.len(),
                joint.len()
            )));
        }
        for (&x, &m) in joint.iter().zip(&self.sizes) {
            if x >= m {
                return Err(Error::ValueOutOfRange { index: x, m });
            }
        }
        Ok(self.eval_unchecked(joint))
    }

    fn eval_unchecked(&self, joint: &[usize]) -> T {
        self.terms.iter().fold(T::zero(), |acc, term| {
            let product = term
                .iter()
                .zip(joint)
                .skip(1)
                .fold(term[0][joint[0]].clone(), |p, (table, &x)| p * table[x].clone());
            acc + product
        })
    }
}

/// Independent sources, their codes, and the function the receiver wants.
#[derive(Clone, Debug)]
pub struct JointSystem<T> {
    sources: Vec<SourceAlphabet<T>>,
    codes: Vec<KeyedCode>,
    function: SeparableFunction<T>,
}

impl<T: Scalar> JointSystem<T> {
    pub fn new(sources: Vec<SourceAlphabet<T>>, codes: Vec<KeyedCode>, function: SeparableFunction<T>) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::Config("a joint system needs at least one source".into()));
        }
        if sources.len() != codes.len() || sources.len() != function.sources() {
            return Err(Error::Config(format!(
                "{} sources, {} codes, function over {} sources",
                sources.len(),
                codes.len(),
                function.sources()
            )));
        }
        for ((s, c), &size) in sources.iter().zip(&codes).zip(function.sizes()) {
            check_dims(c, s)?;
            if size != s.len() {
                return Err(Error::DimensionMismatch { code_m: size, alphabet_m: s.len() });
            }
        }
        Ok(Self { sources, codes, function })
    }

    pub fn sources(&self) -> &[SourceAlphabet<T>] {
        &self.sources
    }

    pub fn codes(&self) -> &[KeyedCode] {
        &self.codes
    }

    pub fn function(&self) -> &SeparableFunction<T> {
        &self.function
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// `sum_i k_i`.
    pub fn total_key_bits(&self) -> u32 {
        self.codes.iter().map(KeyedCode::k).sum()
    }

    /// Number of joint (value, key) states, `prod_i m_i 2^k_i`.
    pub fn state_count(&self) -> u128 {
        self.sources
            .iter()
            .zip(&self.codes)
            .map(|(s, c)| s.len() as u128 * c.key_count() as u128)
            .product()
    }

    fn observation_count(&self) -> u128 {
        self.codes.iter().map(|c| c.r() as u128).product()
    }

    fn check_cap(&self, max_states: u128) -> Result<()> {
        let states = self.state_count().max(self.observation_count());
        if states > max_states {
            return Err(Error::CapExceeded { what: "joint state count", requested: states, limit: max_states });
        }
        Ok(())
    }

    /// Mixed-radix index of an observation tuple.
    pub fn observation_index(&self, bins: &[usize]) -> usize {
        bins.iter()
            .zip(&self.codes)
            .fold(0, |acc, (&b, c)| acc * c.r() + b)
    }

    fn observation_tuple(&self, mut index: usize) -> Vec<usize> {
        let mut bins = vec![0; self.codes.len()];
        for (i, c) in self.codes.iter().enumerate().rev() {
            bins[i] = index % c.r();
            index /= c.r();
        }
        bins
    }

    /// Mean of `f` under the product prior.
    pub fn mean(&self) -> T {
        self.function.terms.iter().fold(T::zero(), |acc, term| {
            let product = term
                .iter()
                .zip(&self.sources)
                .fold(T::one(), |p, (table, s)| p * s.expect(table));
            acc + product
        })
    }
}

/// Eve's posterior over joint observations, from full enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPosterior<T> {
    /// Observation tuples with positive probability, in index order.
    pub observations: Vec<Vec<usize>>,
    pub prob: Vec<T>,
    /// `E[f | observation]`.
    pub mean: Vec<T>,
    /// `D_ach`: expected squared error of the posterior-mean estimate.
    pub d_ach: T,
    index: HashMap<Vec<usize>, usize>,
}

impl<T: Scalar> JointPosterior<T> {
    /// `E[f | observation]`, `None` if the tuple is never observed.
    pub fn conditional_mean(&self, bins: &[usize]) -> Option<&T> {
        self.index.get(bins).map(|&i| &self.mean[i])
    }
}

/// Every joint value with its prior probability and `f` value, strata over
/// the first source's value.
fn joint_values<T: Scalar>(system: &JointSystem<T>) -> Vec<Vec<(Vec<usize>, T, T)>> {
    let sizes: Vec<usize> = system.sources.iter().map(SourceAlphabet::len).collect();
    (0..sizes[0])
        .into_par_iter()
        .map(|x0| {
            let mut out = Vec::new();
            let mut joint = vec![0; sizes.len()];
            joint[0] = x0;
            loop {
                let prob = joint
                    .iter()
                    .zip(&system.sources)
                    .fold(T::one(), |p, (&x, s)| p * s.prob(x).clone());
                if !prob.is_zero() {
                    out.push((joint.clone(), prob, system.function.eval_unchecked(&joint)));
                }
                if !advance(&mut joint[1..], &sizes[1..]) {
                    break;
                }
            }
            out
        })
        .collect()
}

/// Odometer increment; false when it wraps around.
fn advance(digits: &mut [usize], radix: &[usize]) -> bool {
    for pos in (0..digits.len()).rev() {
        digits[pos] += 1;
        if digits[pos] < radix[pos] {
            return true;
        }
        digits[pos] = 0;
    }
    false
}

/// Exact posterior over joint observations by enumerating every
/// (values, keys) combination.
pub fn joint_posterior<T: Scalar>(system: &JointSystem<T>, max_states: u128) -> Result<JointPosterior<T>> {
    system.check_cap(max_states)?;
    let strata = joint_values(system);
    let key_counts: Vec<usize> = system.codes.iter().map(KeyedCode::key_count).collect();
    let key_weight = T::one() / T::from_count(key_counts.iter().product());

    // per observation: (weight, value) contributions, merged in stratum order
    let partials: Vec<HashMap<usize, (T, T)>> = strata
        .par_iter()
        .map(|stratum| {
            let mut acc: HashMap<usize, (T, T)> = HashMap::new();
            let mut keys = vec![0; key_counts.len()];
            for (joint, prob, value) in stratum {
                let w = prob.clone() * key_weight.clone();
                keys.iter_mut().for_each(|k| *k = 0);
                loop {
                    let obs = keys
                        .iter()
                        .zip(joint)
                        .zip(&system.codes)
                        .fold(0, |a, ((&key, &x), c)| a * c.r() + c.assignment()[key][x]);
                    let e = acc.entry(obs).or_insert((T::zero(), T::zero()));
                    e.0 = e.0.clone() + w.clone();
                    e.1 = e.1.clone() + w.clone() * value.clone();
                    if !advance(&mut keys, &key_counts) {
                        break;
                    }
                }
            }
            acc
        })
        .collect();

    let mut merged: HashMap<usize, (T, T)> = HashMap::new();
    for part in partials {
        let mut entries: Vec<_> = part.into_iter().collect();
        entries.sort_by_key(|(o, _)| *o);
        for (obs, (w, s)) in entries {
            let e = merged.entry(obs).or_insert((T::zero(), T::zero()));
            e.0 = e.0.clone() + w;
            e.1 = e.1.clone() + s;
        }
    }
    let mut order: Vec<usize> = merged.keys().copied().collect();
    order.sort_unstable();

    let mut observations = Vec::with_capacity(order.len());
    let mut prob = Vec::with_capacity(order.len());
    let mut mean = Vec::with_capacity(order.len());
    let mut index = HashMap::with_capacity(order.len());
    let mut slot = HashMap::with_capacity(order.len());
    for (i, obs) in order.iter().enumerate() {
        let (w, s) = merged[obs].clone();
        let tuple = system.observation_tuple(*obs);
        index.insert(tuple.clone(), i);
        slot.insert(*obs, i);
        observations.push(tuple);
        mean.push(s / w.clone());
        prob.push(w);
    }

    // second pass: squared error of the posterior mean, per stratum
    let errors: Vec<T> = strata
        .par_iter()
        .map(|stratum| {
            let mut total = T::zero();
            let mut keys = vec![0; key_counts.len()];
            for (joint, p, value) in stratum {
                let w = p.clone() * key_weight.clone();
                keys.iter_mut().for_each(|k| *k = 0);
                loop {
                    let obs = keys
                        .iter()
                        .zip(joint)
                        .zip(&system.codes)
                        .fold(0, |a, ((&key, &x), c)| a * c.r() + c.assignment()[key][x]);
                    let err = value.clone() - mean[slot[&obs]].clone();
                    total = total + w.clone() * err.clone() * err;
                    if !advance(&mut keys, &key_counts) {
                        break;
                    }
                }
            }
            total
        })
        .collect();
    let d_ach = errors.into_iter().fold(T::zero(), |a, e| a + e);

    Ok(JointPosterior { observations, prob, mean, d_ach, index })
}

/// `D_max = var(f)` over the product prior.
pub fn joint_max_distortion<T: Scalar>(system: &JointSystem<T>, max_states: u128) -> Result<T> {
    system.check_cap(max_states)?;
    let mu = system.mean();
    let strata = joint_values(system);
    Ok(strata.iter().flatten().fold(T::zero(), |acc, (_, p, v)| {
        let dev = v.clone() - mu.clone();
        acc + p.clone() * dev.clone() * dev
    }))
}

/// Exact joint distortion report. Bound flags do not apply and are `None`;
/// `k` is the total key budget, `m` the joint value count and `r` the
/// joint observation count.
pub fn joint_distortion<T: Scalar>(system: &JointSystem<T>, max_states: u128, tol: f64) -> Result<DistortionReport<T>> {
    let posterior = joint_posterior(system, max_states)?;
    let d_max = joint_max_distortion(system, max_states)?;
    let mu = system.mean();
    let values: Vec<T> = joint_values(system).into_iter().flatten().map(|(_, _, v)| v).collect();
    let hi = values.iter().cloned().fold(None, |a: Option<T>, v| Some(match a { Some(a) if a >= v => a, _ => v }));
    let lo = values.iter().cloned().fold(None, |a: Option<T>, v| Some(match a { Some(a) if a <= v => a, _ => v }));
    let spread = match (hi, lo) {
        (Some(h), Some(l)) => h - l,
        _ => T::zero(),
    };
    let keys = T::from_count(1usize << system.total_key_bits().min(crate::code::MAX_KEY_BITS));
    let perfectly_secure = posterior.mean.iter().all(|m| m.approx_eq(&mu, tol));
    Ok(DistortionReport {
        m: system.sources.iter().map(SourceAlphabet::len).product(),
        k: system.total_key_bits(),
        r: system.codes.iter().map(KeyedCode::r).product(),
        delta: d_max.clone() - posterior.d_ach.clone(),
        d_ach: posterior.d_ach,
        bound1: d_max.clone() / keys.clone(),
        bound2: spread.clone() * spread.clone() / (keys.clone() * keys),
        d_max,
        spread,
        bound1_ok: None,
        bound2_ok: None,
        perfectly_secure,
    })
}

/// Per-source posteriors of every component table.
fn component_posteriors<T: Scalar>(system: &JointSystem<T>) -> Result<Vec<Vec<EvePosterior<T>>>> {
    system
        .function
        .terms
        .iter()
        .map(|term| {
            term.iter()
                .enumerate()
                .map(|(i, table)| posterior_of(&system.codes[i], &system.sources[i], table))
                .collect()
        })
        .collect()
}

/// `sum_l prod_i E[f_i^(l)(X_i) | tau_i]`, the factorized posterior mean.
/// `None` if some `tau_i` is never observed.
pub fn factorized_conditional_mean<T: Scalar>(system: &JointSystem<T>, bins: &[usize]) -> Result<Option<T>> {
    if bins.len() != system.len() {
        return Err(Error::Config(format!("expected {} bins, got {}", system.len(), bins.len())));
    }
    let posteriors = component_posteriors(system)?;
    let mut total = T::zero();
    for term in &posteriors {
        let mut product = T::one();
        for (post, &b) in term.iter().zip(bins) {
            match post.tau_mean.get(b).cloned().flatten() {
                Some(m) => product = product * m,
                None => return Ok(None),
            }
        }
        total = total + product;
    }
    Ok(Some(total))
}

/// Security status of one component `f_i^(l)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentStatus {
    pub term: usize,
    pub source: usize,
    pub secure: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SufficiencyCheck<T> {
    pub components: Vec<ComponentStatus>,
    /// Every component is perfectly secure under its source's code.
    pub all_components_secure: bool,
    pub joint_delta: T,
    pub joint_secure: bool,
}

impl<T> SufficiencyCheck<T> {
    /// True when the per-component condition holds.
    pub fn holds(&self) -> bool {
        self.all_components_secure
    }

    /// False only if every component is secure and yet the joint function
    /// is not, which would contradict the composition result.
    pub fn consistent(&self) -> bool {
        !self.all_components_secure || self.joint_secure
    }
}

/// Checks each component's security separately, then confirms the joint
/// advantage by exact enumeration.
pub fn check_sufficiency<T: Scalar>(system: &JointSystem<T>, max_states: u128, tol: f64) -> Result<SufficiencyCheck<T>> {
    let posteriors = component_posteriors(system)?;
    let mut components = Vec::new();
    for (l, term) in posteriors.iter().enumerate() {
        for (i, post) in term.iter().enumerate() {
            let mean = system.sources[i].expect(&system.function.terms[l][i]);
            components.push(ComponentStatus {
                term: l,
                source: i,
                secure: crate::analysis::all_means_equal(post, &mean, tol),
            });
        }
    }
    let report = joint_distortion(system, max_states, tol)?;
    let joint_secure = report.delta.approx_eq(&T::zero(), tol) && report.perfectly_secure;
    Ok(SufficiencyCheck {
        all_components_secure: components.iter().all(|c| c.secure),
        components,
        joint_delta: report.delta,
        joint_secure,
    })
}

/// An observation proving the joint function is not perfectly secure.
#[derive(Clone, Debug, PartialEq)]
pub struct NecessityWitness<T> {
    pub form: FunctionForm,
    /// One bin per source.
    pub observation: Vec<usize>,
    /// `E[f | observation]` from the full joint enumeration.
    pub conditional_mean: T,
    /// `E[f]`.
    pub mean: T,
    pub joint_delta: T,
    /// Sources whose component is not perfectly secure.
    pub unsecured: Vec<usize>,
}

impl<T: Scalar> NecessityWitness<T> {
    /// The observation moves Eve's estimate and her advantage is positive.
    pub fn is_valid(&self, tol: f64) -> bool {
        !self.conditional_mean.approx_eq(&self.mean, tol) && self.joint_delta.is_positive() && !self.joint_delta.approx_eq(&T::zero(), tol)
    }
}

/// Builds the observation that exposes an unsecured component of a pure sum
/// or pure product.
///
/// For each unsecured source the bin with the largest posterior mean of
/// `f_i` (sum) or largest absolute posterior mean (product) is chosen; secured
/// sources contribute their first observable bin. The conditional mean of
/// `f` at that tuple is then read from the exact joint posterior.
pub fn necessity_witness<T: Scalar>(
    system: &JointSystem<T>,
    unsecured_index: usize,
    max_states: u128,
    tol: f64,
) -> Result<NecessityWitness<T>> {
    let form = system.function.form();
    if form == FunctionForm::SumOfProducts {
        return Err(Error::NotApplicable("only pure sums and pure products are covered".into()));
    }
    if unsecured_index >= system.len() {
        return Err(Error::Config(format!("source {unsecured_index} does not exist")));
    }

    let mut posteriors = Vec::with_capacity(system.len());
    let mut means = Vec::with_capacity(system.len());
    for i in 0..system.len() {
        let table = system.function.component(i).expect("pure form");
        posteriors.push(posterior_of(&system.codes[i], &system.sources[i], table)?);
        means.push(system.sources[i].expect(table));
    }
    let secure: Vec<bool> = posteriors
        .iter()
        .zip(&means)
        .map(|(p, mu)| crate::analysis::all_means_equal(p, mu, tol))
        .collect();
    if secure[unsecured_index] {
        return Err(Error::NotApplicable(format!("component of source {unsecured_index} is perfectly secure")));
    }
    if form == FunctionForm::Product {
        for (i, (source, mean)) in system.sources.iter().zip(&means).enumerate() {
            let var = source.variance_of(system.function.component(i).expect("pure form"));
            if mean.approx_eq(&T::zero(), tol) || var.approx_eq(&T::zero(), tol) {
                return Err(Error::NotApplicable(format!(
                    "product condition fails at source {i}: mean and variance must be nonzero"
                )));
            }
        }
    }

    let observation: Vec<usize> = posteriors
        .iter()
        .zip(&secure)
        .map(|(post, &ok)| {
            let score = |j: usize| {
                let m = post.tau_mean[j].clone().expect("supported");
                if form == FunctionForm::Product { m.abs() } else { m }
            };
            if ok {
                post.support[0]
            } else {
                let mut best = post.support[0];
                for &j in &post.support[1..] {
                    if score(j) > score(best) {
                        best = j;
                    }
                }
                best
            }
        })
        .collect();

    let joint = joint_posterior(system, max_states)?;
    let conditional_mean = joint
        .conditional_mean(&observation)
        .cloned()
        .expect("chosen bins are each observable, so the tuple is");
    let d_max = joint_max_distortion(system, max_states)?;
    Ok(NecessityWitness {
        form,
        observation,
        conditional_mean,
        mean: system.mean(),
        joint_delta: d_max - joint.d_ach,
        unsecured: secure.iter().enumerate().filter(|(_, &s)| !s).map(|(i, _)| i).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::{greedy_code, identity_code};
    use num_rational::BigRational;

    type Exact = SourceAlphabet<BigRational>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn four() -> Exact {
        Exact::from_ints(&[1, 2, 3, 4]).unwrap()
    }

    fn perfect(a: &Exact) -> KeyedCode {
        greedy_code(a, 1).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let a = Exact::from_ints(&[1, 2, 3, 4, 5]).unwrap();
        // canonical index of value v is 5 - v
        let sum = SeparableFunction::sum_of_values(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(sum.evaluate(&[2, 1]).unwrap(), q(7, 1));
        let prod = SeparableFunction::product_of_values(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(prod.evaluate(&[3, 0]).unwrap(), q(10, 1));
        // X1 X2 + X1
        let v = a.values().to_vec();
        let general = SeparableFunction::sum_of_products(vec![
            vec![v.clone(), v.clone()],
            vec![v.clone(), vec![q(1, 1); 5]],
        ])
        .unwrap();
        assert_eq!(general.evaluate(&[3, 2]).unwrap(), q(8, 1));
        assert!(matches!(general.evaluate(&[5, 0]), Err(Error::ValueOutOfRange { .. })));
        assert!(general.evaluate(&[1]).is_err());
    }

    #[test]
    fn two_perfect_sources_sum_and_product() {
        let a = four();
        for f in [
            SeparableFunction::sum_of_values(&[a.clone(), a.clone()]).unwrap(),
            SeparableFunction::product_of_values(&[a.clone(), a.clone()]).unwrap(),
        ] {
            let sys = JointSystem::new(vec![a.clone(), a.clone()], vec![perfect(&a), perfect(&a)], f).unwrap();
            let r = joint_distortion(&sys, DEFAULT_MAX_STATES, 0.0).unwrap();
            assert_eq!(r.delta, q(0, 1));
            assert!(r.perfectly_secure);
            assert_eq!(sys.total_key_bits(), 2);
        }
        let sys = JointSystem::new(
            vec![a.clone(), a.clone()],
            vec![perfect(&a), perfect(&a)],
            SeparableFunction::sum_of_values(&[a.clone(), a.clone()]).unwrap(),
        )
        .unwrap();
        assert_eq!(joint_distortion(&sys, DEFAULT_MAX_STATES, 0.0).unwrap().d_max, q(5, 2));
    }

    #[test]
    fn one_unprotected_source_leaks_its_variance() {
        let a = four();
        let sys = JointSystem::new(
            vec![a.clone(), a.clone()],
            vec![identity_code(4), perfect(&a)],
            SeparableFunction::sum_of_values(&[a.clone(), a.clone()]).unwrap(),
        )
        .unwrap();
        let r = joint_distortion(&sys, DEFAULT_MAX_STATES, 0.0).unwrap();
        assert_eq!(r.d_ach, q(5, 4));
        assert_eq!(r.d_max, q(5, 2));
    }

    #[test]
    fn sufficiency_examples() {
        let a = four();
        let sum = SeparableFunction::sum_of_values(&[a.clone(), a.clone()]).unwrap();
        let sys = JointSystem::new(vec![a.clone(), a.clone()], vec![perfect(&a), perfect(&a)], sum.clone()).unwrap();
        let check = check_sufficiency(&sys, DEFAULT_MAX_STATES, 0.0).unwrap();
        assert!(check.holds() && check.joint_secure && check.consistent());
        assert_eq!(check.joint_delta, q(0, 1));

        let sys = JointSystem::new(vec![a.clone(), a.clone()], vec![identity_code(4), perfect(&a)], sum).unwrap();
        assert!(!check_sufficiency(&sys, DEFAULT_MAX_STATES, 0.0).unwrap().holds());
    }

    #[test]
    fn securing_a_value_does_not_secure_its_square() {
        let x = Exact::from_ints(&[-2, -1, 1, 2]).unwrap();
        let code = greedy_code(&x, 1).unwrap();
        let squares: Vec<BigRational> = x.values().iter().map(|v| v.clone() * v.clone()).collect();
        let as_value = SeparableFunction::sum(vec![x.values().to_vec()]).unwrap();
        let as_square = SeparableFunction::sum(vec![squares]).unwrap();
        let sys = JointSystem::new(vec![x.clone()], vec![code.clone()], as_value).unwrap();
        assert!(check_sufficiency(&sys, DEFAULT_MAX_STATES, 0.0).unwrap().holds());
        let sys = JointSystem::new(vec![x], vec![code], as_square).unwrap();
        let check = check_sufficiency(&sys, DEFAULT_MAX_STATES, 0.0).unwrap();
        assert!(!check.holds());
        assert!(check.joint_delta > q(0, 1));
    }

    #[test]
    fn sum_witness() {
        let a = four();
        let sys = JointSystem::new(
            vec![a.clone(), a.clone()],
            vec![identity_code(4), perfect(&a)],
            SeparableFunction::sum_of_values(&[a.clone(), a.clone()]).unwrap(),
        )
        .unwrap();
        let w = necessity_witness(&sys, 0, DEFAULT_MAX_STATES, 0.0).unwrap();
        // value 4 sits at canonical index 0, and the identity sends it to bin 0
        assert_eq!(w.observation[0], 0);
        assert_eq!(w.conditional_mean, q(13, 2));
        assert_eq!(w.mean, q(5, 1));
        assert_eq!(w.joint_delta, q(5, 4));
        assert!(w.is_valid(0.0));
        assert_eq!(w.unsecured, vec![0]);
        assert!(matches!(necessity_witness(&sys, 1, DEFAULT_MAX_STATES, 0.0), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn product_witness_and_condition() {
        let a = four();
        let sys = JointSystem::new(
            vec![a.clone(), a.clone()],
            vec![perfect(&a), identity_code(4)],
            SeparableFunction::product_of_values(&[a.clone(), a.clone()]).unwrap(),
        )
        .unwrap();
        let w = necessity_witness(&sys, 1, DEFAULT_MAX_STATES, 0.0).unwrap();
        assert!(w.is_valid(0.0));
        assert_eq!(w.conditional_mean, q(10, 1));

        let signs = Exact::from_ints(&[-1, 1]).unwrap();
        let sys = JointSystem::new(
            vec![signs.clone(), a.clone()],
            vec![identity_code(2), identity_code(4)],
            SeparableFunction::product_of_values(&[signs, a.clone()]).unwrap(),
        )
        .unwrap();
        assert!(matches!(necessity_witness(&sys, 0, DEFAULT_MAX_STATES, 0.0), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn factorization_matches_enumeration() {
        let a = Exact::from_ints(&[7, 3, 2]).unwrap();
        let b = Exact::new(vec![q(1, 1), q(4, 1)], Some(vec![q(1, 3), q(2, 3)])).unwrap();
        let f = SeparableFunction::sum_of_products(vec![
            vec![a.values().to_vec(), b.values().to_vec()],
            vec![vec![q(1, 1), q(-2, 1), q(5, 1)], vec![q(3, 1), q(3, 1)]],
        ])
        .unwrap();
        let code_a = greedy_code(&a, 1).unwrap();
        let code_b = KeyedCode::new(1, 3, vec![vec![0, 1], vec![2, 0]]).unwrap();
        let sys = JointSystem::new(vec![a, b], vec![code_a, code_b], f).unwrap();
        let post = joint_posterior(&sys, DEFAULT_MAX_STATES).unwrap();
        for (obs, mean) in post.observations.iter().zip(&post.mean) {
            assert_eq!(factorized_conditional_mean(&sys, obs).unwrap().as_ref(), Some(mean));
        }
        let total = post.prob.iter().fold(q(0, 1), |s, p| s + p.clone());
        assert_eq!(total, q(1, 1));
    }

    #[test]
    fn state_cap() {
        let a = four();
        let sys = JointSystem::new(
            vec![a.clone(), a.clone()],
            vec![perfect(&a), perfect(&a)],
            SeparableFunction::sum_of_values(&[a.clone(), a.clone()]).unwrap(),
        )
        .unwrap();
        assert_eq!(sys.state_count(), 64);
        assert!(matches!(joint_distortion(&sys, 63, 0.0), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn rejects_mismatched_systems() {
        let a = four();
        let f = SeparableFunction::sum_of_values(std::slice::from_ref(&a)).unwrap();
        assert!(JointSystem::new(vec![a.clone(), a.clone()], vec![identity_code(4)], f.clone()).is_err());
        assert!(JointSystem::new(vec![a.clone()], vec![identity_code(3)], f).is_err());
        assert!(SeparableFunction::<BigRational>::sum_of_products(vec![]).is_err());
        assert!(SeparableFunction::sum_of_products(vec![vec![vec![q(1, 1)]], vec![vec![q(1, 1), q(2, 1)]]]).is_err());
    }
}
