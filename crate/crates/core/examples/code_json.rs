//! Encoding, decoding and the JSON form of a keyed code. Value indices
//! refer to the alphabet sorted in descending order.

use distsec::encoders::greedy_code;
use distsec::{KeyedCode, SourceAlphabet};

fn main() -> distsec::Result<()> {
    let alphabet = SourceAlphabet::<f64>::uniform(vec![1.0, 2.0, 3.0, 4.0])?;
    let code = greedy_code(&alphabet, 1)?;
    let json = code.to_json();
    println!("{json}");

    let back = KeyedCode::from_json(&json)?;
    assert_eq!(back, code);
    for key in 0..code.key_count() {
        for v in 0..alphabet.len() {
            let bin = code.encode(key, v)?;
            print!("{} -> bin {bin} (key {key})   ", alphabet.value(v));
            assert_eq!(code.decode(key, bin)?, v);
        }
        println!();
    }

    match KeyedCode::from_json(r#"{"m":2,"k":0,"r":1,"assignment":[[0,0]]}"#) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
