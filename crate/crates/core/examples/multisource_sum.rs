//! Several sources, each with its own key. A receiver wants their sum (or
//! product); securing every source secures the result, and leaving one open
//! hands Eve an observation that moves her estimate.

use distsec::encoders::{greedy_code, identity_code};
use distsec::multisource::{check_sufficiency, joint_distortion, necessity_witness, JointSystem, SeparableFunction, DEFAULT_MAX_STATES};
use distsec::{Scalar, SourceAlphabet};
use num_rational::BigRational;

fn main() -> distsec::Result<()> {
    let a = SourceAlphabet::<BigRational>::from_ints(&[1, 2, 3, 4])?;
    let secured = greedy_code(&a, 1)?;

    for n in 2..=3 {
        let system = JointSystem::new(
            vec![a.clone(); n],
            vec![secured.clone(); n],
            SeparableFunction::sum_of_values(&vec![a.clone(); n])?,
        )?;
        let r = joint_distortion(&system, DEFAULT_MAX_STATES, 0.0)?;
        println!("sum of {n}, {} key bits: D_max = {}, delta = {}", system.total_key_bits(), r.d_max.render(), r.delta.render());
    }

    for (name, f) in [
        ("sum", SeparableFunction::sum_of_values(&[a.clone(), a.clone()])?),
        ("product", SeparableFunction::product_of_values(&[a.clone(), a.clone()])?),
    ] {
        let system = JointSystem::new(vec![a.clone(), a.clone()], vec![identity_code(4), secured.clone()], f)?;
        let check = check_sufficiency(&system, DEFAULT_MAX_STATES, 0.0)?;
        let w = necessity_witness(&system, 0, DEFAULT_MAX_STATES, 0.0)?;
        println!(
            "{name} with source 0 open: components secure {}, joint delta {}; seeing bins {:?} moves E[f] from {} to {}",
            check.all_components_secure,
            check.joint_delta.render(),
            w.observation,
            w.mean.render(),
            w.conditional_mean.render()
        );
    }
    Ok(())
}
