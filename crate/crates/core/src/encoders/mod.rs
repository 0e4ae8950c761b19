//! Code constructions.
//!
//! * [`greedy_code`]: one permutation per key, each chosen to even out the
//!   running bin sums. Polynomial time; optimal for one key bit.
//! * [`exchange_binning`] + [`complete_key_assignment`]: a random balanced
//!   partition refined by exchanges until all bin sums lie within the
//!   alphabet spread of each other, then turned into a decodable code by
//!   edge coloring.
//! * [`identity_code`]: no key, the eavesdropper decodes exactly.

mod coloring;
mod exchange;
mod greedy;

pub use coloring::complete_key_assignment;
pub use exchange::{exchange_binning, exchange_binning_traced, Binning};
pub use greedy::{greedy_code, greedy_code_traced};

use crate::code::KeyedCode;

/// The keyless code `a[0][v] = v`.
///
/// # Panics
/// If `m == 0`.
pub fn identity_code(m: usize) -> KeyedCode {
    assert!(m >= 1, "identity code needs at least one value");
    KeyedCode::new(0, m, vec![(0..m).collect()]).expect("identity is decodable")
}

/// Which construction to run; used by the sweep and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Greedy,
    Exchange,
    Identity,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Exchange => "exchange",
            Algorithm::Identity => "identity",
        }
    }

    /// Whether the output depends on the seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Exchange)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim() {
            "greedy" => Ok(Algorithm::Greedy),
            "exchange" => Ok(Algorithm::Exchange),
            "identity" => Ok(Algorithm::Identity),
            other => Err(crate::Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Runs one construction with `r = m`.
pub fn build_code<T: crate::Scalar>(
    alg: Algorithm,
    alphabet: &crate::SourceAlphabet<T>,
    k: u32,
    seed: u64,
) -> crate::Result<KeyedCode> {
    match alg {
        Algorithm::Greedy => greedy_code(alphabet, k),
        Algorithm::Exchange => {
            let binning = exchange_binning(alphabet, k, alphabet.len(), seed)?;
            complete_key_assignment(&binning)
        }
        Algorithm::Identity => Ok(identity_code(alphabet.len())),
    }
}
