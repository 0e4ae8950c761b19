
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance on the pmf total for float alphabets.
pub const PMF_SUM_TOL: f64 = 1e-12;

/// A discrete source: the values a protected quantity can take, with their
/// probabilities.
///
/// Values are kept in descending order (`values()[0]` is the largest). The
/// position each value had in the caller's input is recorded in
/// [`original_index`](Self::original_index). Codes index values in this
/// canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceAlphabet<T> {
    values: Vec<T>,
    pmf: Vec<T>,
    original_index: Vec<usize>,
    input_descending: bool,
    uniform: bool,
}

impl<T: Scalar> SourceAlphabet<T> {
    /// Builds an alphabet; `pmf = None` means uniform.
    pub fn new(values: Vec<T>, pmf: Option<Vec<T>>) -> Result<Self> {
        let m = values.len();
        if m == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let pmf = match pmf {
            Some(p) => {
                if p.len() != m {
                    return Err(Error::PmfLengthMismatch { values: m, pmf: p.len() });
                }
                validate_pmf(&p)?;
                p
            }
            None => {
                let each = T::one() / T::from_count(m);
                vec![each; m]
            }
        };

        let mut order: Vec<usize> = (0..m).collect();
        // stable: equal values keep their input order
        order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("values are comparable"));
        let input_descending = order.iter().enumerate().all(|(i, &o)| i == o);
        let uniform = pmf.iter().all(|p| p.approx_eq(&pmf[0], PMF_SUM_TOL));

        Ok(Self {
            values: order.iter().map(|&i| values[i].clone()).collect(),
            pmf: order.iter().map(|&i| pmf[i].clone()).collect(),
            original_index: order,
            input_descending,
            uniform,
        })
    }

    pub fn uniform(values: Vec<T>) -> Result<Self> {
        Self::new(values, None)
    }

    /// Uniform alphabet over integer values.
    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::uniform(values.iter().map(|&v| T::from_i64(v).expect("integer")).collect())
    }

    /// Uniform alphabet `{lo, lo+1, ..., hi}`.
    pub fn range(lo: i64, hi: i64) -> Result<Self> {
        Self::from_ints(&(lo..=hi).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in descending order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn pmf(&self) -> &[T] {
        &self.pmf
    }

    pub fn value(&self, i: usize) -> &T {
        &self.values[i]
    }

    pub fn prob(&self, i: usize) -> &T {
        &self.pmf[i]
    }

    /// `original_index()[i]` is the input position of canonical value `i`.
    pub fn original_index(&self) -> &[usize] {
        &self.original_index
    }

    /// Canonical position of the value the caller supplied at `input_pos`.
    pub fn canonical_index(&self, input_pos: usize) -> Option<usize> {
        self.original_index.iter().position(|&o| o == input_pos)
    }

    /// Whether the values were already supplied in descending order.
    pub fn input_was_descending(&self) -> bool {
        self.input_descending
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn mean(&self) -> T {
        expectation(&self.pmf, &self.values)
    }

    /// Largest minus smallest value.
    pub fn spread(&self) -> T {
        self.values[0].clone() - self.values[self.len() - 1].clone()
    }

    /// The same alphabet evaluated in floating point.
    pub fn to_f64(&self) -> SourceAlphabet<f64> {
        SourceAlphabet {
            values: self.values.iter().map(Scalar::to_f64_lossy).collect(),
            pmf: self.pmf.iter().map(Scalar::to_f64_lossy).collect(),
            original_index: self.original_index.clone(),
            input_descending: self.input_descending,
            uniform: self.uniform,
        }
    }

    /// Expectation of an arbitrary function of the value, given as a table in
    /// canonical order.
    pub fn expect(&self, table: &[T]) -> T {
        expectation(&self.pmf, table)
    }

    /// Variance of a function of the value.
    pub fn variance_of(&self, table: &[T]) -> T {
        let mu = self.expect(table);
        self.pmf
            .iter()
            .zip(table)
            .fold(T::zero(), |acc, (p, y)| {
                let dev = y.clone() - mu.clone();
                acc + p.clone() * dev.clone() * dev
            })
    }
}

fn expectation<T: Scalar>(pmf: &[T], table: &[T]) -> T {
    pmf.iter()
        .zip(table)
        .fold(T::zero(), |acc, (p, y)| acc + p.clone() * y.clone())
}

fn validate_pmf<T: Scalar>(pmf: &[T]) -> Result<()> {
    for (index, p) in pmf.iter().enumerate() {
        if p.is_negative() || *p > T::one() {
            return Err(Error::InvalidProbability { index });
        }
    }
    let sum = pmf.iter().fold(T::zero(), |a, p| a + p.clone());
    let ok = if T::EXACT {
        sum == T::one()
    } else {
        (sum.to_f64_lossy() - 1.0).abs() <= PMF_SUM_TOL
    };
    if ok {
        Ok(())
    } else {
        Err(Error::PmfNotNormalized { sum: sum.to_f64_lossy() })
    }
}
