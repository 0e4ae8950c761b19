//! Eve's advantage against the number of key bits, for both constructions,
//! next to the two bounds D_max / 2^k and d^2 / 4^k.

use distsec::analysis::bound_report;
use distsec::encoders::{build_code, Algorithm};
use distsec::SourceAlphabet;

fn main() -> distsec::Result<()> {
    let alphabet = SourceAlphabet::<f64>::uniform(vec![0.0, 0.3, 1.1, 2.0, 4.7, 5.2, 8.8, 9.9])?;
    println!("{:>2} {:>9} {:>12} {:>12} {:>12} {:>12}", "k", "alg", "delta", "D_max/2^k", "d^2/4^k", "D_ach/D_max");
    for k in 0..=6 {
        for alg in [Algorithm::Greedy, Algorithm::Exchange] {
            let code = build_code(alg, &alphabet, k, 17)?;
            let r = bound_report(&code, &alphabet, 1e-9)?;
            println!(
                "{k:>2} {:>9} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.6}",
                alg.name(),
                r.delta,
                r.bound1,
                r.bound2,
                r.d_ach / r.d_max
            );
        }
    }
    Ok(())
}
