//! Exhaustive search for the code with the smallest adversary advantage.
//!
//! Only small instances are feasible: the space grows factorially in `m`
//! and exponentially in `2^k`. Two symmetries are removed up front: key 0
//! is fixed to the identity (relabeling bins does not change the
//! distortion), and bins first used by keys after key 0 are numbered in
//! order of first use. With pruning enabled, any partial code that is
//! certain to end with two or more bins holding at most `2^(k-1)` elements
//! is abandoned; an optimal code never has two such bins, since merging
//! them (and recoloring) never helps the eavesdropper.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::alphabet::SourceAlphabet;
use crate::code::KeyedCode;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Smallest bin count considered; defaults to `m` and is never below it.
    pub r_min: Option<usize>,
    /// Exclusive upper end of the bin count; defaults to `2m`.
    pub r_max: Option<usize>,
    /// Apply the at-most-one-small-bin pruning rule.
    pub prune: bool,
    pub max_m: usize,
    pub max_k: u32,
    /// Lift `max_m` / `max_k`.
    pub allow_factorial: bool,
    /// Stop after evaluating this many complete codes (the result is then
    /// not exhaustive). Forces a sequential search.
    pub max_candidates: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            r_min: None,
            r_max: None,
            prune: true,
            max_m: 8,
            max_k: 2,
            allow_factorial: false,
            max_candidates: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult<T> {
    pub best_code: KeyedCode,
    pub best_delta: T,
    /// Complete codes whose advantage was evaluated.
    pub candidates_examined: u64,
    /// Subtrees cut by the pruning rule.
    pub pruned: u64,
    /// False when `max_candidates` stopped the search early.
    pub exhaustive: bool,
}

/// Finds a decodable code minimizing `D_max - D_ach` for a uniform alphabet.
///
/// Ties are resolved toward the lexicographically smallest assignment table.
pub fn brute_force_optimal<T: Scalar>(
    alphabet: &SourceAlphabet<T>,
    k: u32,
    options: &SearchOptions,
) -> Result<SearchResult<T>> {
    if !alphabet.is_uniform() {
        return Err(Error::NonUniform);
    }
    let m = alphabet.len();
    if !options.allow_factorial {
        if m > options.max_m {
            return Err(Error::CapExceeded {
                what: "alphabet size for exhaustive search",
                requested: m as u128,
                limit: options.max_m as u128,
            });
        }
        if k > options.max_k {
            return Err(Error::CapExceeded {
                what: "key bits for exhaustive search",
                requested: k as u128,
                limit: options.max_k as u128,
            });
        }
    }
    if k > crate::code::MAX_KEY_BITS {
        return Err(Error::MalformedCode(format!("k = {k} is too large")));
    }
    let r_min = options.r_min.unwrap_or(m).max(m);
    let r_max = options.r_max.unwrap_or(2 * m);
    if r_max <= r_min {
        return Err(Error::Config(format!("empty bin-count range [{r_min}, {r_max})")));
    }

    let key_count = 1usize << k;
    let mu = alphabet.mean();
    let ctx = Context {
        values: alphabet.values(),
        m,
        key_count,
        r_min,
        r_max,
        prune: options.prune,
        norm: T::from_count(key_count * m),
        mu_sq: mu.clone() * mu,
        budget: options.max_candidates,
        spent: AtomicU64::new(0),
    };

    if key_count == 1 {
        // only the identity survives the symmetry reduction
        if r_min > m {
            return Err(Error::Config(format!("no keyless code uses {r_min} bins")));
        }
        let mut s = Searcher::new(&ctx);
        s.leaf();
        return s.finish(k);
    }

    // one chunk per bin choice for (key 1, value 0)
    let first_choices: Vec<usize> = (0..=m).filter(|&b| b < m || m < r_max).collect();
    let run = |bin: usize| {
        let mut s = Searcher::new(&ctx);
        s.assign(1, 0, bin);
        s
    };
    let chunks: Vec<Searcher<T>> = if options.max_candidates.is_some() {
        first_choices.into_iter().map(run).collect()
    } else {
        first_choices.into_par_iter().map(run).collect()
    };

    let mut total = Searcher::new(&ctx);
    for c in chunks {
        total.examined += c.examined;
        total.pruned += c.pruned;
        total.truncated |= c.truncated;
        if let Some((delta, rows, r)) = c.best {
            let better = match &total.best {
                None => true,
                Some((best, _, _)) => delta < *best,
            };
            if better {
                total.best = Some((delta, rows, r));
            }
        }
    }
    total.finish(k)
}

struct Context<'a, T> {
    values: &'a [T],
    m: usize,
    key_count: usize,
    r_min: usize,
    r_max: usize,
    prune: bool,
    norm: T,
    mu_sq: T,
    budget: Option<u64>,
    spent: AtomicU64,
}

struct Searcher<'a, T> {
    ctx: &'a Context<'a, T>,
    /// rows[key][value]; row 0 is the identity
    rows: Vec<Vec<usize>>,
    counts: Vec<usize>,
    sums: Vec<T>,
    /// bins opened so far
    open: usize,
    /// bins already used by the key being filled
    used: Vec<bool>,
    best: Option<(T, Vec<Vec<usize>>, usize)>,
    examined: u64,
    pruned: u64,
    truncated: bool,
}

impl<'a, T: Scalar> Searcher<'a, T> {
    fn new(ctx: &'a Context<'a, T>) -> Self {
        let m = ctx.m;
        let mut rows = vec![vec![usize::MAX; m]; ctx.key_count];
        rows[0] = (0..m).collect();
        let mut counts = vec![0; ctx.r_max];
        let mut sums = vec![T::zero(); ctx.r_max];
        for v in 0..m {
            counts[v] = 1;
            sums[v] = ctx.values[v].clone();
        }
        Self {
            ctx,
            rows,
            counts,
            sums,
            open: m,
            used: vec![false; ctx.r_max],
            best: None,
            examined: 0,
            pruned: 0,
            truncated: false,
        }
    }

    /// Places `value` of `key` into `bin` and explores everything below.
    fn assign(&mut self, key: usize, value: usize, bin: usize) {
        let fresh = bin == self.open;
        if fresh {
            self.open += 1;
        }
        self.rows[key][value] = bin;
        self.used[bin] = true;
        self.counts[bin] += 1;
        let previous = self.sums[bin].clone();
        self.sums[bin] = previous.clone() + self.ctx.values[value].clone();

        self.visit(key, value + 1);

        self.sums[bin] = previous;
        self.counts[bin] -= 1;
        self.used[bin] = false;
        self.rows[key][value] = usize::MAX;
        if fresh {
            self.open -= 1;
        }
    }

    fn visit(&mut self, key: usize, value: usize) {
        if self.truncated {
            return;
        }
        if self.ctx.prune && self.doomed_small_bins(key, value) >= 2 {
            self.pruned += 1;
            return;
        }
        if value == self.ctx.m {
            if key + 1 == self.ctx.key_count {
                self.leaf();
            } else {
                let saved = std::mem::replace(&mut self.used, vec![false; self.ctx.r_max]);
                self.visit(key + 1, 0);
                self.used = saved;
            }
            return;
        }
        let limit = if self.open < self.ctx.r_max { self.open + 1 } else { self.open };
        for bin in 0..limit {
            if !self.used[bin] {
                self.assign(key, value, bin);
            }
        }
    }

    /// Opened bins whose final size is certain to be at most `2^(k-1)`.
    fn doomed_small_bins(&self, key: usize, value: usize) -> usize {
        let later_keys = self.ctx.key_count - 1 - key;
        let filling = value < self.ctx.m;
        (0..self.open)
            .filter(|&j| {
                let reachable = self.counts[j] + later_keys + usize::from(filling && !self.used[j]);
                2 * reachable <= self.ctx.key_count
            })
            .count()
    }

    fn leaf(&mut self) {
        if self.open < self.ctx.r_min {
            return;
        }
        if let Some(budget) = self.ctx.budget {
            if self.ctx.spent.fetch_add(1, Ordering::Relaxed) >= budget {
                self.truncated = true;
                return;
            }
        }
        self.examined += 1;
        let score = (0..self.open).fold(T::zero(), |acc, j| {
            acc + self.sums[j].clone() * self.sums[j].clone() / T::from_count(self.counts[j])
        });
        let delta = score / self.ctx.norm.clone() - self.ctx.mu_sq.clone();
        let better = match &self.best {
            None => true,
            Some((best, _, _)) => delta < *best,
        };
        if better {
            self.best = Some((delta, self.rows.clone(), self.open));
        }
    }

    fn finish(self, k: u32) -> Result<SearchResult<T>> {
        let (best_delta, rows, r) = self
            .best
            .ok_or_else(|| Error::Config("no code in the requested bin-count range".into()))?;
        Ok(SearchResult {
            best_code: KeyedCode::new(k, r, rows)?,
            best_delta,
            candidates_examined: self.examined,
            pruned: self.pruned,
            exhaustive: !self.truncated,
        })
    }
}

/// The four structural properties of codes, as booleans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructureReport {
    /// Every value has exactly `2^k` outgoing edges.
    pub value_degree: bool,
    /// Every bin has at most `2^k` incoming edges.
    pub bin_degree: bool,
    /// At most one bin holds `2^(k-1)` or fewer elements.
    pub at_most_one_small_bin: bool,
    /// `m <= r < 2m`.
    pub bin_count_in_range: bool,
}

impl StructureReport {
    pub fn all(&self) -> bool {
        self.value_degree && self.bin_degree && self.at_most_one_small_bin && self.bin_count_in_range
    }
}

/// Checks a code's bipartite graph against the degree and size properties.
/// The last two are necessary for optimality, not for decodability.
pub fn verify_structure(code: &KeyedCode) -> StructureReport {
    let keys = code.key_count();
    let n = code.multiplicities();
    let value_degree = n.iter().all(|row| row.iter().sum::<usize>() == keys);
    let counts: Vec<usize> = (0..code.r()).map(|j| n.iter().map(|row| row[j]).sum()).collect();
    let bin_degree = counts.iter().all(|&c| c <= keys);
    let small = counts.iter().filter(|&&c| 2 * c <= keys).count();
    StructureReport {
        value_degree,
        bin_degree,
        at_most_one_small_bin: small <= 1,
        bin_count_in_range: code.m() <= code.r() && code.r() < 2 * code.m(),
    }
}
