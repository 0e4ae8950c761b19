//! Monte Carlo estimate of the eavesdropper's distortion.
//!
//! Trials are split into fixed-size streams. Stream `s` draws from
//! `Pcg64::new(seed, s)`, so results do not depend on how many threads run
//! them, and stream sums are merged in stream order.

use rand::Rng;
use rand_pcg::Pcg64;
use rayon::prelude::*;

use crate::alphabet::SourceAlphabet;
use crate::analysis::{achievable_distortion, eve_posterior};
use crate::code::{check_dims, KeyedCode};
use crate::error::{Error, Result};
use crate::multisource::{joint_posterior, JointSystem, DEFAULT_MAX_STATES};

/// Trials per stream.
pub const STREAM_TRIALS: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
}

/// What to simulate.
pub enum SimTarget<'a> {
    Single { code: &'a KeyedCode, alphabet: &'a SourceAlphabet<f64> },
    Joint(&'a JointSystem<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    pub seed: u64,
    pub analytic_dach: f64,
    pub empirical_dach: f64,
    /// Standard error of the empirical mean squared error.
    pub stderr: f64,
}

impl SimReport {
    /// `|empirical - analytic|` in standard errors.
    pub fn z_score(&self) -> f64 {
        if self.stderr == 0.0 {
            if self.empirical_dach == self.analytic_dach { 0.0 } else { f64::INFINITY }
        } else {
            (self.empirical_dach - self.analytic_dach).abs() / self.stderr
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Inverse-CDF sampler over canonical indices.
struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    fn new(pmf: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cdf }
    }

    fn draw(&self, rng: &mut Pcg64) -> usize {
        let u: f64 = rng.random::<f64>() * self.cdf.last().copied().unwrap_or(1.0);
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// One source of a trial: sampler, key count and code.
struct Stage<'a> {
    sampler: Sampler,
    keys: usize,
    code: &'a KeyedCode,
}

fn run_streams<F>(cfg: &SimConfig, stages: &[Stage], estimate: F) -> (f64, f64)
where
    F: Fn(&[usize], &[usize]) -> f64 + Sync,
{
    let streams = cfg.trials.div_ceil(STREAM_TRIALS);
    let partial: Vec<(Compensated, Compensated)> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = Pcg64::new(cfg.seed as u128, s as u128);
            let n = STREAM_TRIALS.min(cfg.trials - s * STREAM_TRIALS);
            let mut values = vec![0; stages.len()];
            let mut bins = vec![0; stages.len()];
            let mut sq = Compensated::default();
            let mut quad = Compensated::default();
            for _ in 0..n {
                for (i, st) in stages.iter().enumerate() {
                    values[i] = st.sampler.draw(&mut rng);
                    let key = rng.random_range(0..st.keys);
                    bins[i] = st.code.assignment()[key][values[i]];
                }
                let e = estimate(&values, &bins);
                sq.add(e);
                quad.add(e * e);
            }
            (sq, quad)
        })
        .collect();
    let mut sq = Compensated::default();
    let mut quad = Compensated::default();
    for (a, b) in partial {
        sq.add(a.value());
        quad.add(b.value());
    }
    let n = cfg.trials as f64;
    let mean = sq.value() / n;
    let var = if cfg.trials > 1 { ((quad.value() / n - mean * mean) * n / (n - 1.0)).max(0.0) } else { 0.0 };
    (mean, (var / n).sqrt())
}

/// Draws `(Y, K)` pairs, encodes, forms the eavesdropper's posterior-mean
/// estimate from the bin and averages the squared error.
pub fn simulate(target: &SimTarget, cfg: &SimConfig) -> Result<SimReport> {
    simulate_with_cap(target, cfg, DEFAULT_MAX_STATES)
}

/// As [`simulate`], with an explicit cap on joint states for the analytic
/// posterior of a multi-source target.
pub fn simulate_with_cap(target: &SimTarget, cfg: &SimConfig, max_states: u128) -> Result<SimReport> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be positive".into()));
    }
    let (empirical, stderr, analytic) = match target {
        SimTarget::Single { code, alphabet } => {
            check_dims(code, alphabet)?;
            let posterior = eve_posterior(code, alphabet)?;
            let stages = [Stage { sampler: Sampler::new(alphabet.pmf()), keys: code.key_count(), code }];
            let (mean, se) = run_streams(cfg, &stages, |values, bins| {
                let guess = posterior.tau_mean[bins[0]].expect("observed bin has mass");
                let err = alphabet.value(values[0]) - guess;
                err * err
            });
            (mean, se, achievable_distortion(code, alphabet)?)
        }
        SimTarget::Joint(system) => {
            let posterior = joint_posterior(system, max_states)?;
            let stages: Vec<Stage> = system
                .sources()
                .iter()
                .zip(system.codes())
                .map(|(s, c)| Stage { sampler: Sampler::new(s.pmf()), keys: c.key_count(), code: c })
                .collect();
            let f = system.function();
            let (mean, se) = run_streams(cfg, &stages, |values, bins| {
                let guess = *posterior.conditional_mean(bins).expect("observed tuple has mass");
                let err = f.evaluate(values).expect("sampled indices are in range") - guess;
                err * err
            });
            (mean, se, posterior.d_ach)
        }
    };
    Ok(SimReport { trials: cfg.trials, seed: cfg.seed, analytic_dach: analytic, empirical_dach: empirical, stderr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::{greedy_code, identity_code};
    use crate::multisource::SeparableFunction;

    fn four() -> SourceAlphabet<f64> {
        SourceAlphabet::uniform(vec![1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn neumaier_keeps_small_terms() {
        let mut c = Compensated::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            c.add(x);
        }
        assert_eq!(c.value(), 2.0);
    }

    #[test]
    fn sampler_respects_zero_mass() {
        let s = Sampler::new(&[0.0, 0.5, 0.0, 0.5]);
        let mut rng = Pcg64::new(1, 0);
        for _ in 0..1000 {
            let i = s.draw(&mut rng);
            assert!(i == 1 || i == 3);
        }
    }

    #[test]
    fn identity_code_has_no_error() {
        let a = four();
        let code = identity_code(4);
        let r = simulate(&SimTarget::Single { code: &code, alphabet: &a }, &SimConfig { trials: 5000, seed: 3 }).unwrap();
        assert_eq!(r.empirical_dach, 0.0);
        assert_eq!(r.analytic_dach, 0.0);
        assert_eq!(r.z_score(), 0.0);
    }

    #[test]
    fn agrees_with_analysis() {
        let a = SourceAlphabet::uniform(vec![9.0, 5.0, 2.0, 1.0]).unwrap();
        let code = greedy_code(&a, 1).unwrap();
        let r = simulate(&SimTarget::Single { code: &code, alphabet: &a }, &SimConfig { trials: 100_000, seed: 42 }).unwrap();
        assert!((r.analytic_dach - 9.125).abs() < 1e-12);
        assert!(r.z_score() < 5.0, "{r:?}");
    }

    #[test]
    fn reproducible_and_stream_partitioned() {
        let a = four();
        let code = greedy_code(&a, 2).unwrap();
        let t = SimTarget::Single { code: &code, alphabet: &a };
        let cfg = SimConfig { trials: 3 * STREAM_TRIALS + 17, seed: 5 };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = one.install(|| simulate(&t, &cfg).unwrap());
        assert_eq!(serial, simulate(&t, &cfg).unwrap());
        assert_ne!(serial, simulate(&t, &SimConfig { seed: 6, ..cfg }).unwrap());
    }

    #[test]
    fn joint_target() {
        let a = four();
        let sys = JointSystem::new(
            vec![a.clone(), a.clone()],
            vec![identity_code(4), greedy_code(&a, 1).unwrap()],
            SeparableFunction::sum_of_values(&[a.clone(), a.clone()]).unwrap(),
        )
        .unwrap();
        let r = simulate(&SimTarget::Joint(&sys), &SimConfig { trials: 50_000, seed: 9 }).unwrap();
        assert!((r.analytic_dach - 1.25).abs() < 1e-12);
        assert!(r.z_score() < 5.0, "{r:?}");
    }

    #[test]
    fn zero_trials_rejected() {
        let a = four();
        let code = identity_code(4);
        assert!(simulate(&SimTarget::Single { code: &code, alphabet: &a }, &SimConfig { trials: 0, seed: 0 }).is_err());
    }
}
