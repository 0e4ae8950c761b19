//! JSON inputs: alphabets and multi-source system descriptions.
//!
//! Numbers may be JSON numbers or strings (`"1/3"`, `"0.25"`). Everything
//! is kept as literal text until the numeric back end is chosen, so the
//! exact path sees `0.1` as one tenth rather than the nearest double.
//!
//! Alphabet file:
//! ```json
//! {"version": 1, "values": [1, 2, 3, 4], "pmf": ["1/2", "1/6", "1/6", "1/6"]}
//! ```
//!
//! System file (tables follow each source's input order):
//! ```json
//! {
//!   "version": 1,
//!   "sources": [{"values": [1, 2, 3, 4]}, {"values": [1, 2, 3, 4]}],
//!   "codes": ["code.json", {"encoder": "greedy", "k": 1}],
//!   "function": {"form": "sum", "components": "values"}
//! }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use crate::alphabet::SourceAlphabet;
use crate::code::KeyedCode;
use crate::encoders::{build_code, Algorithm};
use crate::error::{Error, Result};
use crate::multisource::{JointSystem, SeparableFunction};
use crate::scalar::{is_rational_literal, Scalar};

/// Schema version written and accepted.
pub const SCHEMA_VERSION: u64 = 1;

/// A number as written by the user.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "Value")]
pub struct Literal(pub String);

impl TryFrom<Value> for Literal {
    type Error = String;

    fn try_from(v: Value) -> std::result::Result<Self, String> {
        match v {
            Value::Number(n) => Ok(Literal(n.to_string())),
            Value::String(s) => Ok(Literal(s)),
            other => Err(format!("expected a number, got {other}")),
        }
    }
}

fn check_version(version: Option<u64>) -> Result<()> {
    match version {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(Error::Config(format!("unsupported schema version {v}, expected {SCHEMA_VERSION}"))),
    }
}

fn parse_all<T: Scalar>(literals: &[String]) -> Result<Vec<T>> {
    literals.iter().map(|s| T::parse_literal(s)).collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphabetFile {
    version: Option<u64>,
    values: Vec<Literal>,
    pmf: Option<Vec<Literal>>,
}

/// An alphabet before its numeric type is fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetSpec {
    pub values: Vec<String>,
    pub pmf: Option<Vec<String>>,
    /// Short name for tables.
    pub label: String,
}

impl AlphabetSpec {
    pub fn new(values: Vec<String>, pmf: Option<Vec<String>>) -> Self {
        let mut label = values.join(" ");
        if let Some(p) = &pmf {
            label = format!("{label} | {}", p.join(" "));
        }
        Self { values, pmf, label }
    }

    /// Comma-separated values, e.g. `9,5,2,1`.
    pub fn parse_list(s: &str) -> Result<Vec<String>> {
        let items: Vec<String> = s.split(',').map(|x| x.trim().to_string()).collect();
        if items.iter().any(String::is_empty) {
            return Err(Error::Parse(format!("empty entry in list {s:?}")));
        }
        Ok(items)
    }

    /// Integers `lo..hi`, both ends included.
    pub fn range(s: &str) -> Result<Self> {
        let (lo, hi) = parse_int_range(s)?;
        let mut spec = Self::new((lo..=hi).map(|v| v.to_string()).collect(), None);
        spec.label = format!("{lo}..{hi}");
        Ok(spec)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: AlphabetFile = serde_json::from_str(s)?;
        check_version(file.version)?;
        Ok(Self::new(
            file.values.into_iter().map(|l| l.0).collect(),
            file.pmf.map(|p| p.into_iter().map(|l| l.0).collect()),
        ))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut spec = Self::from_json(&fs::read_to_string(path)?)?;
        if let Some(stem) = path.file_stem() {
            spec.label = stem.to_string_lossy().into_owned();
        }
        Ok(spec)
    }

    /// All literals are integers or fractions.
    pub fn is_rational(&self) -> bool {
        self.literals().all(is_rational_literal)
    }

    fn literals(&self) -> impl Iterator<Item = &str> {
        self.values.iter().chain(self.pmf.iter().flatten()).map(String::as_str)
    }

    pub fn build<T: Scalar>(&self) -> Result<SourceAlphabet<T>> {
        let values = parse_all(&self.values)?;
        let pmf = self.pmf.as_deref().map(parse_all).transpose()?;
        SourceAlphabet::new(values, pmf)
    }
}

/// `a..b` with both ends included, or a single integer.
pub fn parse_int_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("expected an integer or a range lo..hi, got {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(Error::Parse(format!("empty range {s:?}")));
    }
    Ok((lo, hi))
}

/// A comma-separated list of integers and inclusive ranges: `0..3,7`.
pub fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let (lo, hi) = parse_int_range(part)?;
        if lo < 0 {
            return Err(Error::Parse(format!("negative entry in {s:?}")));
        }
        out.extend(lo as u64..=hi as u64);
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CodeRef {
    Path(PathBuf),
    Inline(KeyedCode),
    Encoder { encoder: String, k: u32, seed: Option<u64> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Components {
    /// `"values"`: each source's own values.
    Keyword(String),
    Tables(Vec<Vec<Literal>>),
    Terms(Vec<Vec<Vec<Literal>>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    form: String,
    components: Components,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceFile {
    values: Vec<Literal>,
    pmf: Option<Vec<Literal>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    version: Option<u64>,
    sources: Vec<SourceFile>,
    codes: Vec<CodeRef>,
    function: FunctionFile,
}

#[derive(Clone, Debug, PartialEq)]
enum CodeSpec {
    Fixed(KeyedCode),
    Build { alg: Algorithm, k: u32, seed: Option<u64> },
}

#[derive(Clone, Debug, PartialEq)]
enum FunctionSpec {
    SumOfValues,
    ProductOfValues,
    /// terms[l][i] in input order.
    Sum(Vec<Vec<String>>),
    Product(Vec<Vec<String>>),
    General(Vec<Vec<Vec<String>>>),
}

/// A parsed system file, numeric type still open.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    sources: Vec<AlphabetSpec>,
    codes: Vec<CodeSpec>,
    function: FunctionSpec,
}

fn strings(tables: Vec<Vec<Literal>>) -> Vec<Vec<String>> {
    tables.into_iter().map(|t| t.into_iter().map(|l| l.0).collect()).collect()
}

impl SystemSpec {
    /// Parses a system; relative code paths resolve against `base`.
    pub fn from_json(s: &str, base: &Path) -> Result<Self> {
        let file: SystemFile = serde_json::from_str(s)?;
        check_version(file.version)?;
        let sources = file
            .sources
            .into_iter()
            .map(|s| AlphabetSpec::new(s.values.into_iter().map(|l| l.0).collect(), s.pmf.map(|p| p.into_iter().map(|l| l.0).collect())))
            .collect();
        let codes = file
            .codes
            .into_iter()
            .map(|c| match c {
                CodeRef::Path(p) => {
                    let path = if p.is_relative() { base.join(p) } else { p };
                    Ok(CodeSpec::Fixed(KeyedCode::from_json(&fs::read_to_string(path)?)?))
                }
                CodeRef::Inline(code) => Ok(CodeSpec::Fixed(code)),
                CodeRef::Encoder { encoder, k, seed } => Ok(CodeSpec::Build { alg: encoder.parse()?, k, seed }),
            })
            .collect::<Result<_>>()?;
        let function = match (file.function.form.as_str(), file.function.components) {
            ("sum", Components::Keyword(w)) if w == "values" => FunctionSpec::SumOfValues,
            ("product", Components::Keyword(w)) if w == "values" => FunctionSpec::ProductOfValues,
            ("sum", Components::Tables(t)) => FunctionSpec::Sum(strings(t)),
            ("product", Components::Tables(t)) => FunctionSpec::Product(strings(t)),
            ("sum_of_products", Components::Terms(terms)) => {
                FunctionSpec::General(terms.into_iter().map(strings).collect())
            }
            (form, _) => {
                return Err(Error::Config(format!(
                    "function form {form:?} with these components is not understood; \
                     use sum or product with \"values\" or one table per source, \
                     or sum_of_products with a list of terms"
                )))
            }
        };
        Ok(Self { sources, codes, function })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&fs::read_to_string(path)?, base)
    }

    /// All literals, including function tables, are integers or fractions.
    pub fn is_rational(&self) -> bool {
        let tables_ok = match &self.function {
            FunctionSpec::SumOfValues | FunctionSpec::ProductOfValues => true,
            FunctionSpec::Sum(t) | FunctionSpec::Product(t) => t.iter().flatten().all(|s| is_rational_literal(s)),
            FunctionSpec::General(terms) => terms.iter().flatten().flatten().all(|s| is_rational_literal(s)),
        };
        tables_ok && self.sources.iter().all(AlphabetSpec::is_rational)
    }

    /// Builds the system; encoder entries without a seed use `seed`.
    pub fn build<T: Scalar>(&self, seed: u64) -> Result<JointSystem<T>> {
        let sources: Vec<SourceAlphabet<T>> = self.sources.iter().map(AlphabetSpec::build).collect::<Result<_>>()?;
        if self.codes.len() != sources.len() {
            return Err(Error::Config(format!("{} sources but {} codes", sources.len(), self.codes.len())));
        }
        let codes = self
            .codes
            .iter()
            .zip(&sources)
            .map(|(c, s)| match c {
                CodeSpec::Fixed(code) => Ok(code.clone()),
                CodeSpec::Build { alg, k, seed: own } => build_code(*alg, s, *k, own.unwrap_or(seed)),
            })
            .collect::<Result<_>>()?;
        let canonical = |i: usize, table: &[String]| -> Result<Vec<T>> {
            let s = sources.get(i).ok_or_else(|| Error::InvalidFunction(format!("no source {i}")))?;
            if table.len() != s.len() {
                return Err(Error::InvalidFunction(format!(
                    "table for source {i} has {} entries, the source has {} values",
                    table.len(),
                    s.len()
                )));
            }
            let parsed: Vec<T> = parse_all(table)?;
            Ok(s.original_index().iter().map(|&o| parsed[o].clone()).collect())
        };
        let per_source = |tables: &[Vec<String>]| -> Result<Vec<Vec<T>>> {
            if tables.len() != sources.len() {
                return Err(Error::InvalidFunction(format!(
                    "{} tables for {} sources",
                    tables.len(),
                    sources.len()
                )));
            }
            tables.iter().enumerate().map(|(i, t)| canonical(i, t)).collect()
        };
        let function = match &self.function {
            FunctionSpec::SumOfValues => SeparableFunction::sum_of_values(&sources)?,
            FunctionSpec::ProductOfValues => SeparableFunction::product_of_values(&sources)?,
            FunctionSpec::Sum(t) => SeparableFunction::sum(per_source(t)?)?,
            FunctionSpec::Product(t) => SeparableFunction::product(per_source(t)?)?,
            FunctionSpec::General(terms) => {
                SeparableFunction::sum_of_products(terms.iter().map(|t| per_source(t)).collect::<Result<_>>()?)?
            }
        };
        JointSystem::new(sources, codes, function)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn alphabet_literals_stay_exact() {
        let spec = AlphabetSpec::from_json(r#"{"version":1,"values":[0.1, "0.2", 3],"pmf":["1/2",0.25,"1/4"]}"#).unwrap();
        assert_eq!(spec.values, vec!["0.1", "0.2", "3"]);
        assert!(!spec.is_rational());
        let exact: SourceAlphabet<BigRational> = spec.build().unwrap();
        assert_eq!(exact.values(), &[q(3, 1), q(1, 5), q(1, 10)]);
        assert_eq!(exact.pmf(), &[q(1, 4), q(1, 4), q(1, 2)]);
    }

    #[test]
    fn alphabet_errors() {
        assert!(matches!(AlphabetSpec::from_json(r#"{"version":2,"values":[1]}"#), Err(Error::Config(_))));
        assert!(matches!(AlphabetSpec::from_json(r#"{"values":[true]}"#), Err(Error::Json(_))));
        assert!(matches!(AlphabetSpec::from_json(r#"{"values":[1],"extra":0}"#), Err(Error::Json(_))));
        assert!(AlphabetSpec::new(vec!["x".into()], None).build::<f64>().is_err());
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(AlphabetSpec::parse_list("9, 5,2,1").unwrap(), vec!["9", "5", "2", "1"]);
        assert!(AlphabetSpec::parse_list("1,,2").is_err());
        let r = AlphabetSpec::range("1..20").unwrap();
        assert_eq!(r.values.len(), 20);
        assert_eq!(r.label, "1..20");
        assert!(r.is_rational());
        assert_eq!(parse_int_range("-3..-1").unwrap(), (-3, -1));
        assert!(parse_int_range("4..1").is_err());
        assert_eq!(parse_u64_list("0..2,7").unwrap(), vec![0, 1, 2, 7]);
        assert!(parse_u64_list("-1").is_err());
    }

    #[test]
    fn system_with_all_code_kinds() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("id.json"), r#"{"m":2,"k":0,"r":2,"assignment":[[0,1]]}"#).unwrap();
        let text = r#"{
            "version": 1,
            "sources": [{"values": [1, 2]}, {"values": [1, 2, 3, 4]}, {"values": [5, 7], "pmf": ["1/3", "2/3"]}],
            "codes": ["id.json", {"encoder": "greedy", "k": 1}, {"m":2,"k":0,"r":2,"assignment":[[1,0]]}],
            "function": {"form": "sum", "components": "values"}
        }"#;
        let spec = SystemSpec::from_json(text, dir.path()).unwrap();
        assert!(spec.is_rational());
        let sys: JointSystem<BigRational> = spec.build(0).unwrap();
        assert_eq!(sys.total_key_bits(), 1);
        assert_eq!(sys.mean(), q(3, 2) + q(5, 2) + q(19, 3));
    }

    #[test]
    fn tables_are_reordered_to_canonical() {
        let text = r#"{
            "sources": [{"values": [1, 3, 2]}],
            "codes": [{"encoder": "identity", "k": 0}],
            "function": {"form": "product", "components": [[10, 30, 20]]}
        }"#;
        let sys: JointSystem<BigRational> = SystemSpec::from_json(text, Path::new(".")).unwrap().build(0).unwrap();
        // canonical order is 3, 2, 1
        assert_eq!(sys.function().component(0).unwrap(), &[q(30, 1), q(20, 1), q(10, 1)]);
    }

    #[test]
    fn general_form() {
        let text = r#"{
            "sources": [{"values": [1, 2]}, {"values": [0, 1]}],
            "codes": [{"encoder": "greedy", "k": 1}, {"encoder": "greedy", "k": 1}],
            "function": {"form": "sum_of_products", "components": [[[1, 2], [0, 1]], [[1, 2], [1, 1]]]}
        }"#;
        let spec = SystemSpec::from_json(text, Path::new(".")).unwrap();
        let sys: JointSystem<f64> = spec.build(3).unwrap();
        assert_eq!(sys.function().terms().len(), 2);
        // x1 = 2 (canonical 0), x2 = 1 (canonical 0): 2*1 + 2*1
        assert_eq!(sys.function().evaluate(&[0, 0]).unwrap(), 4.0);
    }

    #[test]
    fn system_errors() {
        let bad_form = r#"{"sources":[{"values":[1]}],"codes":[{"encoder":"identity","k":0}],"function":{"form":"max","components":"values"}}"#;
        assert!(matches!(SystemSpec::from_json(bad_form, Path::new(".")), Err(Error::Config(_))));
        let short_table = r#"{"sources":[{"values":[1,2]}],"codes":[{"encoder":"identity","k":0}],"function":{"form":"sum","components":[[1]]}}"#;
        let spec = SystemSpec::from_json(short_table, Path::new(".")).unwrap();
        assert!(matches!(spec.build::<f64>(0), Err(Error::InvalidFunction(_))));
        let missing = r#"{"sources":[{"values":[1]}],"codes":["nope.json"],"function":{"form":"sum","components":"values"}}"#;
        assert!(matches!(SystemSpec::from_json(missing, Path::new("/nonexistent")), Err(Error::Io(_))));
        let count = r#"{"sources":[{"values":[1]}],"codes":[],"function":{"form":"sum","components":"values"}}"#;
        assert!(SystemSpec::from_json(count, Path::new(".")).unwrap().build::<f64>(0).is_err());
    }
}
