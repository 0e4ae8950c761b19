use crate::alphabet::SourceAlphabet;
use crate::code::KeyedCode;
use crate::error::Result;
use crate::scalar::Scalar;

/// Greedy permutation selection with `r = m`.
///
/// The first permutation is the identity. Each later permutation sends the
/// j-th largest value to the bin with the j-th smallest running sum, ties
/// going to the lower bin index.
///
/// Keys are numbered `1..=2^k` during construction and stored at
/// `key mod 2^k`, so the identity sits at key 1 and the last permutation at
/// key 0 (for `k = 0` the single identity map is key 0).
pub fn greedy_code<T: Scalar>(alphabet: &SourceAlphabet<T>, k: u32) -> Result<KeyedCode> {
    greedy_code_traced(alphabet, k).map(|(code, _)| code)
}

/// As [`greedy_code`], also returning the running bin sums seen before each
/// permutation after the first (entry `i - 2` precedes permutation `i`).
pub fn greedy_code_traced<T: Scalar>(alphabet: &SourceAlphabet<T>, k: u32) -> Result<(KeyedCode, Vec<Vec<T>>)> {
    let m = alphabet.len();
    let key_count = 1usize << k;
    let values = alphabet.values();

    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(key_count);
    perms.push((0..m).collect());
    let mut running: Vec<T> = values.to_vec();
    let mut trace = Vec::with_capacity(key_count.saturating_sub(1));

    for _ in 2..=key_count {
        trace.push(running.clone());
        let mut kappa: Vec<usize> = (0..m).collect();
        kappa.sort_by(|&a, &b| running[a].partial_cmp(&running[b]).expect("comparable sums"));
        // value j goes to bin kappa[j]
        for (j, &bin) in kappa.iter().enumerate() {
            running[bin] = running[bin].clone() + values[j].clone();
        }
        perms.push(kappa);
    }

    let mut rows = vec![Vec::new(); key_count];
    for (i, perm) in perms.into_iter().enumerate() {
        rows[(i + 1) % key_count] = perm;
    }
    Ok((KeyedCode::from_permutations(k, rows)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::bin_statistics;
    use num_rational::BigRational;

    type Exact = SourceAlphabet<BigRational>;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn one_bit_on_four_values_pairs_extremes() {
        let a = Exact::from_ints(&[4, 3, 2, 1]).unwrap();
        let code = greedy_code(&a, 1).unwrap();
        assert_eq!(code.assignment(), &[vec![3, 2, 1, 0], vec![0, 1, 2, 3]]);
        let s = bin_statistics(&code, &a).unwrap();
        assert!(s.sums.iter().all(|x| *x == int(5)));
        assert_eq!(s.counts, vec![2; 4]);
    }

    #[test]
    fn keyless_is_identity() {
        let a = SourceAlphabet::<f64>::uniform(vec![0.3, -2.0, 7.5]).unwrap();
        assert_eq!(greedy_code(&a, 0).unwrap(), crate::encoders::identity_code(3));
    }

    #[test]
    fn irregular_four_values() {
        let a = Exact::from_ints(&[9, 5, 2, 1]).unwrap();
        let s = bin_statistics(&greedy_code(&a, 1).unwrap(), &a).unwrap();
        assert_eq!(s.sums, vec![int(10), int(7), int(7), int(10)]);
    }

    #[test]
    fn intro_alphabet_pairs_to_constant_sums() {
        let a = Exact::range(1, 20).unwrap();
        let s = bin_statistics(&greedy_code(&a, 1).unwrap(), &a).unwrap();
        assert!(s.sums.iter().all(|x| *x == int(21)));
    }

    #[test]
    fn ties_go_to_lower_bin() {
        // all running sums tie after two keys on a symmetric alphabet
        let a = Exact::from_ints(&[3, 2, 1]).unwrap();
        let (code, trace) = greedy_code_traced(&a, 2).unwrap();
        assert_eq!(trace[1], vec![int(4), int(4), int(4)]);
        // third permutation (key 3) is the identity because of tie breaking
        assert_eq!(code.assignment()[3], vec![0, 1, 2]);
    }

    #[test]
    fn every_bin_gets_one_value_per_key() {
        let a = SourceAlphabet::<f64>::uniform(vec![5.0, 1.5, -3.0, 8.0, 0.0]).unwrap();
        let code = greedy_code(&a, 3).unwrap();
        let s = bin_statistics(&code, &a).unwrap();
        assert_eq!(s.counts, vec![8; 5]);
    }
}
