//! A setpoint drawn uniformly from 1..=20. Without a key the eavesdropper
//! reads it off the wire; one shared bit and the greedy code leave her with
//! nothing better than the prior mean.

use distsec::analysis::{bound_report, eve_posterior};
use distsec::encoders::{greedy_code, identity_code};
use distsec::{Scalar, SourceAlphabet};
use num_rational::BigRational;

fn main() -> distsec::Result<()> {
    let alphabet = SourceAlphabet::<BigRational>::range(1, 20)?;

    for (name, code) in [("no key", identity_code(20)), ("one bit", greedy_code(&alphabet, 1)?)] {
        let r = bound_report(&code, &alphabet, 0.0)?;
        println!(
            "{name:>8}: D_max = {}, D_ach = {}, delta = {}, perfectly secure: {}",
            r.d_max.render(),
            r.d_ach.render(),
            r.delta.render(),
            r.perfectly_secure
        );
    }

    let code = greedy_code(&alphabet, 1)?;
    let posterior = eve_posterior(&code, &alphabet)?;
    let means: Vec<String> = posterior.tau_mean.iter().flatten().map(Scalar::render).collect();
    println!("posterior mean per bin: {}", means.join(" "));
    Ok(())
}
