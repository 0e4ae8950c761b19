//! Keyed codes and the bin statistics derived from them.
//!
//! A [`KeyedCode`] holds one value-to-bin map per key. The receiver knows the
//! key, so each map must be injective; the eavesdropper sees only the bin.
//!
//! # JSON format
//!
//! ```json
//! {"m": 4, "k": 1, "r": 4, "assignment": [[3, 2, 1, 0], [0, 1, 2, 3]]}
//! ```
//!
//! `assignment[key][value]` is the 0-based bin for 0-based `key` and
//! 0-based value index. Value indices refer to the alphabet sorted in
//! descending order. `assignment` has `2^k` rows of `m` entries.

use serde::{Deserialize, Serialize};

use crate::alphabet::SourceAlphabet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported key size; a code stores `2^k` rows.
pub const MAX_KEY_BITS: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCode", into = "RawCode")]
pub struct KeyedCode {
    m: usize,
    k: u32,
    r: usize,
    assignment: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    m: usize,
    k: u32,
    r: usize,
    assignment: Vec<Vec<usize>>,
}

impl TryFrom<RawCode> for KeyedCode {
    type Error = Error;

    fn try_from(raw: RawCode) -> Result<Self> {
        let code = KeyedCode::new(raw.k, raw.r, raw.assignment)?;
        if code.m != raw.m {
            return Err(Error::MalformedCode(format!(
                "declared m = {} but rows have {} entries",
                raw.m, code.m
            )));
        }
        Ok(code)
    }
}

impl From<KeyedCode> for RawCode {
    fn from(c: KeyedCode) -> Self {
        RawCode { m: c.m, k: c.k, r: c.r, assignment: c.assignment }
    }
}

impl KeyedCode {
    /// Validates and wraps an assignment table.
    ///
    /// Rejects tables with the wrong number of rows, ragged rows, bins out of
    /// range, or a key that sends two values to the same bin.
    pub fn new(k: u32, r: usize, assignment: Vec<Vec<usize>>) -> Result<Self> {
        if k > MAX_KEY_BITS {
            return Err(Error::MalformedCode(format!("k = {k} exceeds {MAX_KEY_BITS}")));
        }
        let key_count = 1usize << k;
        if assignment.len() != key_count {
            return Err(Error::MalformedCode(format!(
                "expected {key_count} rows for k = {k}, found {}",
                assignment.len()
            )));
        }
        let m = assignment[0].len();
        if m == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let mut seen = vec![usize::MAX; r];
        for (key, row) in assignment.iter().enumerate() {
            if row.len() != m {
                return Err(Error::MalformedCode(format!(
                    "row {key} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for &bin in row {
                if bin >= r {
                    return Err(Error::BinOutOfRange { bin, r });
                }
                if seen[bin] == key {
                    return Err(Error::NotInjective { key, bin });
                }
                seen[bin] = key;
            }
        }
        Ok(Self { m, k, r, assignment })
    }

    /// Builds a code from per-key permutations of `[m]` (so `r = m`).
    pub fn from_permutations(k: u32, perms: Vec<Vec<usize>>) -> Result<Self> {
        let m = perms.first().map_or(0, Vec::len);
        Self::new(k, m, perms)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn key_count(&self) -> usize {
        1 << self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn assignment(&self) -> &[Vec<usize>] {
        &self.assignment
    }

    pub fn encode(&self, key: usize, value: usize) -> Result<usize> {
        self.check_key(key)?;
        if value >= self.m {
            return Err(Error::ValueOutOfRange { index: value, m: self.m });
        }
        Ok(self.assignment[key][value])
    }

    pub fn decode(&self, key: usize, bin: usize) -> Result<usize> {
        self.check_key(key)?;
        if bin >= self.r {
            return Err(Error::BinOutOfRange { bin, r: self.r });
        }
        self.assignment[key]
            .iter()
            .position(|&b| b == bin)
            .ok_or(Error::NotInImage { key, bin })
    }

    /// Bin-to-value view of one key: `table[bin] = Some(value)`.
    pub fn decode_table(&self, key: usize) -> Result<Vec<Option<usize>>> {
        self.check_key(key)?;
        let mut table = vec![None; self.r];
        for (v, &b) in self.assignment[key].iter().enumerate() {
            table[b] = Some(v);
        }
        Ok(table)
    }

    /// `n[i][j]`: number of keys mapping value `i` to bin `j`.
    pub fn multiplicities(&self) -> Vec<Vec<usize>> {
        let mut n = vec![vec![0; self.r]; self.m];
        for row in &self.assignment {
            for (v, &b) in row.iter().enumerate() {
                n[v][b] += 1;
            }
        }
        n
    }

    /// Values landing in each bin across all keys, with multiplicity.
    pub fn bin_contents(&self) -> Vec<Vec<usize>> {
        let mut bins = vec![Vec::new(); self.r];
        for row in &self.assignment {
            for (v, &b) in row.iter().enumerate() {
                bins[b].push(v);
            }
        }
        for b in &mut bins {
            b.sort_unstable();
        }
        bins
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("code serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn check_key(&self, key: usize) -> Result<()> {
        if key >= self.key_count() {
            Err(Error::KeyOutOfRange { key, key_count: self.key_count() })
        } else {
            Ok(())
        }
    }
}

/// Per-bin counts and sums of a code applied to an alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct BinStatistics<T> {
    /// `N_j`: values mapped into bin `j`, over all keys.
    pub counts: Vec<usize>,
    /// `S_j`: sum of those values with multiplicity.
    pub sums: Vec<T>,
    /// `n[i][j]`: keys mapping value `i` into bin `j`.
    pub multiplicity: Vec<Vec<usize>>,
    /// Partial sums from an incomplete construction, when one is tracked.
    pub partial_sums: Option<Vec<T>>,
}

pub fn bin_statistics<T: Scalar>(code: &KeyedCode, alphabet: &SourceAlphabet<T>) -> Result<BinStatistics<T>> {
    check_dims(code, alphabet)?;
    let multiplicity = code.multiplicities();
    let mut counts = vec![0; code.r()];
    let mut sums = vec![T::zero(); code.r()];
    for (i, row) in multiplicity.iter().enumerate() {
        for (j, &n) in row.iter().enumerate() {
            if n > 0 {
                counts[j] += n;
                sums[j] = sums[j].clone() + alphabet.value(i).clone() * T::from_count(n);
            }
        }
    }
    Ok(BinStatistics { counts, sums, multiplicity, partial_sums: None })
}

pub(crate) fn check_dims<T>(code: &KeyedCode, alphabet: &SourceAlphabet<T>) -> Result<()>
where
    T: Scalar,
{
    if code.m() != alphabet.len() {
        Err(Error::DimensionMismatch { code_m: code.m(), alphabet_m: alphabet.len() })
    } else {
        Ok(())
    }
}
