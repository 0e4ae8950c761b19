//! The exchange construction step by step: a random balanced partition,
//! swaps until every bin sum is within the spread of the others, then an
//! edge coloring that turns bins into a decodable code.

use distsec::encoders::{complete_key_assignment, exchange_binning_traced};
use distsec::search::verify_structure;
use distsec::SourceAlphabet;

fn main() -> distsec::Result<()> {
    let alphabet = SourceAlphabet::<f64>::uniform(vec![40.0, 17.0, 16.0, 3.0, 2.0, 1.0, 0.0])?;
    let k = 2;
    let mut steps = 0;
    let binning = exchange_binning_traced(&alphabet, k, alphabet.len(), 3, |sums| {
        let spread = sums.iter().cloned().fold(f64::MIN, f64::max) - sums.iter().cloned().fold(f64::MAX, f64::min);
        println!("step {steps:>2}: max - min = {spread:>5}  sums = {sums:?}");
        steps += 1;
    })?;
    println!("{} swaps, alphabet spread {}", binning.swaps(), alphabet.spread());

    for (j, bin) in binning.bins().iter().enumerate() {
        let values: Vec<f64> = bin.iter().map(|&v| *alphabet.value(v)).collect();
        println!("bin {j}: {values:?}");
    }

    let code = complete_key_assignment(&binning)?;
    for (key, row) in code.assignment().iter().enumerate() {
        println!("key {key}: value -> bin {row:?}");
    }
    println!("{:?}", verify_structure(&code));
    Ok(())
}
