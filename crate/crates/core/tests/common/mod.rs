#![allow(dead_code)]

use distsec::{KeyedCode, SourceAlphabet};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_pcg::Pcg64;

pub type Exact = SourceAlphabet<BigRational>;

pub fn rng(stream: u64) -> Pcg64 {
    Pcg64::new(0x5eed_0fd1_57ed, stream as u128)
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Uniform alphabet of `m` integers in `[lo, hi]`, repeats allowed.
pub fn int_alphabet(rng: &mut Pcg64, m: usize, lo: i64, hi: i64) -> Exact {
    let values: Vec<i64> = (0..m).map(|_| rng.random_range(lo..=hi)).collect();
    Exact::from_ints(&values).unwrap()
}

/// Uniform alphabet of `m` distinct integers in `[lo, hi]`.
pub fn distinct_alphabet(rng: &mut Pcg64, m: usize, lo: i64, hi: i64) -> Exact {
    let mut pool: Vec<i64> = (lo..=hi).collect();
    pool.shuffle(rng);
    Exact::from_ints(&pool[..m]).unwrap()
}

/// `{start, start + step, ...}` with `m` values.
pub fn regular_alphabet(m: usize, start: i64, step: i64) -> Exact {
    Exact::from_ints(&(0..m as i64).map(|i| start + i * step).collect::<Vec<_>>()).unwrap()
}

/// Uniform alphabet of `m` reals in `[-100, 100]`.
pub fn real_alphabet(rng: &mut Pcg64, m: usize) -> SourceAlphabet<f64> {
    SourceAlphabet::uniform((0..m).map(|_| rng.random_range(-100.0..=100.0)).collect()).unwrap()
}

/// Rational pmf with integer weights in `[0, 9]`, at least one positive.
pub fn random_pmf(rng: &mut Pcg64, m: usize) -> Vec<BigRational> {
    let mut w: Vec<i64> = (0..m).map(|_| rng.random_range(0..10)).collect();
    if w.iter().all(|&x| x == 0) {
        w[0] = 1;
    }
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| q(x, total)).collect()
}

/// Any decodable code: each key maps the values injectively into `r` bins.
pub fn random_code(rng: &mut Pcg64, m: usize, k: u32, r: usize) -> KeyedCode {
    let rows = (0..1usize << k)
        .map(|_| {
            let mut bins: Vec<usize> = (0..r).collect();
            bins.shuffle(rng);
            bins.truncate(m);
            bins
        })
        .collect();
    KeyedCode::new(k, r, rows).unwrap()
}

/// Code alternating the reversal and the identity over all keys; perfectly
/// secure for a regularly spaced uniform alphabet.
pub fn paired_code(m: usize, k: u32) -> KeyedCode {
    let rows = (0..1usize << k)
        .map(|key| if key % 2 == 0 { (0..m).rev().collect() } else { (0..m).collect() })
        .collect();
    KeyedCode::new(k, m, rows).unwrap()
}
