use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_pcg::Pcg64;

use crate::alphabet::SourceAlphabet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A partition of `2^k` copies of the alphabet into bins of at most `2^k`
/// elements. Bins hold canonical value indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binning {
    m: usize,
    k: u32,
    bins: Vec<Vec<usize>>,
    swaps: usize,
}

impl Binning {
    /// Validates multiplicity (each value exactly `2^k` times) and capacity
    /// (each bin at most `2^k` elements).
    pub fn new(m: usize, k: u32, bins: Vec<Vec<usize>>) -> Result<Self> {
        let copies = 1usize << k;
        let mut seen = vec![0usize; m];
        for (j, bin) in bins.iter().enumerate() {
            if bin.len() > copies {
                return Err(Error::MalformedBinning(format!(
                    "bin {j} holds {} elements, capacity is {copies}",
                    bin.len()
                )));
            }
            for &v in bin {
                if v >= m {
                    return Err(Error::ValueOutOfRange { index: v, m });
                }
                seen[v] += 1;
            }
        }
        if let Some((v, &count)) = seen.iter().enumerate().find(|(_, &c)| c != copies) {
            return Err(Error::MalformedBinning(format!(
                "value {v} appears {count} times, expected {copies}"
            )));
        }
        Ok(Self { m, k, bins, swaps: 0 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn r(&self) -> usize {
        self.bins.len()
    }

    pub fn bins(&self) -> &[Vec<usize>] {
        &self.bins
    }

    /// Exchanges performed by [`exchange_binning`]; zero otherwise.
    pub fn swaps(&self) -> usize {
        self.swaps
    }

    pub fn sums<T: Scalar>(&self, alphabet: &SourceAlphabet<T>) -> Vec<T> {
        self.bins.iter().map(|b| bin_sum(b, alphabet)).collect()
    }
}

fn bin_sum<T: Scalar>(bin: &[usize], alphabet: &SourceAlphabet<T>) -> T {
    bin.iter().fold(T::zero(), |acc, &v| acc + alphabet.value(v).clone())
}

/// Random balanced partition refined by exchanges.
///
/// `2^k` copies of the alphabet are shuffled with a PCG-64 generator seeded by
/// `seed` and cut into `r = m` bins of `2^k`. While the largest and smallest
/// bin sums differ by more than `y_1 - y_m`, the largest element of the
/// heaviest bin is swapped with the smallest element of the lightest bin
/// (lowest bin index wins ties).
pub fn exchange_binning<T: Scalar>(alphabet: &SourceAlphabet<T>, k: u32, r: usize, seed: u64) -> Result<Binning> {
    exchange_binning_traced(alphabet, k, r, seed, |_| {})
}

/// As [`exchange_binning`], calling `observe` with the bin sums before the
/// first exchange and after every exchange.
pub fn exchange_binning_traced<T, F>(
    alphabet: &SourceAlphabet<T>,
    k: u32,
    r: usize,
    seed: u64,
    mut observe: F,
) -> Result<Binning>
where
    T: Scalar,
    F: FnMut(&[T]),
{
    let m = alphabet.len();
    if r != m {
        return Err(Error::UnsupportedBinCount { r, m });
    }
    if !alphabet.is_uniform() {
        return Err(Error::NonUniform);
    }
    let copies = 1usize << k;

    let mut pool: Vec<usize> = (0..copies).flat_map(|_| 0..m).collect();
    let mut rng = Pcg64::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    let mut bins: Vec<Vec<usize>> = pool.chunks(copies).map(<[usize]>::to_vec).collect();

    let spread = alphabet.spread();
    let mut sums: Vec<T> = bins.iter().map(|b| bin_sum(b, alphabet)).collect();
    observe(&sums);
    let mut swaps = 0;
    loop {
        let (hi, lo) = extremes(&sums);
        let gap = sums[hi].clone() - sums[lo].clone();
        if !gap.exceeds(&spread) {
            break;
        }
        // values are descending, so the largest element has the smallest index
        let (hi_pos, _) = bins[hi].iter().enumerate().min_by_key(|(_, &v)| v).expect("non-empty bin");
        let (lo_pos, _) = bins[lo].iter().enumerate().max_by_key(|(_, &v)| v).expect("non-empty bin");
        let big = bins[hi][hi_pos];
        let small = bins[lo][lo_pos];
        bins[hi][hi_pos] = small;
        bins[lo][lo_pos] = big;
        sums[hi] = bin_sum(&bins[hi], alphabet);
        sums[lo] = bin_sum(&bins[lo], alphabet);
        swaps += 1;
        observe(&sums);
    }

    for b in &mut bins {
        b.sort_unstable();
    }
    let mut binning = Binning::new(m, k, bins)?;
    binning.swaps = swaps;
    Ok(binning)
}

/// Indices of the largest and smallest sums, lowest index on ties.
fn extremes<T: Scalar>(sums: &[T]) -> (usize, usize) {
    let mut hi = 0;
    let mut lo = 0;
    for (j, s) in sums.iter().enumerate().skip(1) {
        if *s > sums[hi] {
            hi = j;
        }
        if *s < sums[lo] {
            lo = j;
        }
    }
    (hi, lo)
}
