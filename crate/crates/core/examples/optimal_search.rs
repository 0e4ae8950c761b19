//! Exhaustive search on small alphabets, compared with the greedy code.
//! At one key bit the two agree; with two bits the search shows how much
//! the greedy code leaves on the table.

use distsec::analysis::delta_closed_form;
use distsec::encoders::greedy_code;
use distsec::search::{brute_force_optimal, verify_structure, SearchOptions};
use distsec::{Scalar, SourceAlphabet};
use num_rational::BigRational;

fn main() -> distsec::Result<()> {
    for (values, k) in [(vec![9, 5, 2, 1], 1), (vec![10, 6, 3, 0, -4], 1), (vec![9, 5, 2, 1], 2), (vec![7, 4, 0], 2)] {
        let alphabet = SourceAlphabet::<BigRational>::from_ints(&values)?;
        let result = brute_force_optimal(&alphabet, k, &SearchOptions::default())?;
        let greedy = delta_closed_form(&greedy_code(&alphabet, k)?, &alphabet)?;
        println!(
            "{values:?} k={k}: optimum {} (r = {}), greedy {}, {} codes examined, {} subtrees pruned",
            result.best_delta.render(),
            result.best_code.r(),
            greedy.render(),
            result.candidates_examined,
            result.pruned
        );
        println!("  best code {}", result.best_code.to_json());
        println!("  {:?}", verify_structure(&result.best_code));
    }
    Ok(())
}
