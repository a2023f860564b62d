//! Builtin potentials, their Fourier modes, and a JSON round trip.

use std::collections::BTreeMap;

use cylres::potential::{builtin, parseval_mass, PotentialDoc, BUILTINS};

fn main() -> cylres::Result<()> {
    for name in BUILTINS {
        let p = builtin(name, &BTreeMap::new())?;
        let (x0, x1) = p.support();
        println!(
            "{name:12} modes {:?}  support [{x0}, {x1}]  real {}  smooth {}",
            p.modes().keys().collect::<Vec<_>>(),
            p.is_real(),
            p.is_smooth(),
        );
        if !p.modes().is_empty() {
            println!("{:12} |V|^2 mass {:.4e}", "", parseval_mass(&p));
        }
    }

    let params = BTreeMap::from([("depth".to_string(), 4.0), ("bumpscale".to_string(), 0.5)]);
    let p = builtin("well_bump", &params)?;
    println!("well_bump(4, 0.5): V(0, 0) = {:.6}", p.value(0.0, 0.0));

    let doc = PotentialDoc::from_potential(&p);
    let json = serde_json::to_string(&doc)?;
    let back: PotentialDoc = serde_json::from_str(&json)?;
    assert_eq!(back, doc);
    println!("JSON document: {} bytes, round trip exact", json.len());
    Ok(())
}
