//! One-dimensional resonances of the angular average `V_0` and its residue state.

use cylres::potential::well_bump;
use cylres::scatter1d::{extrapolated_zero, newton_zero, Scatterer};
use cylres::zeros::ZeroOptions;
use num_complex::Complex64;

fn main() -> cylres::Result<()> {
    let v0 = well_bump(6.0, 1.0).average_v0();
    let s = Scatterer::from_profile(&v0, 256)?;
    let list = s.find_resonances(Complex64::new(-3.0, -3.0), Complex64::new(3.0, 3.0), &ZeroOptions::default())?;
    println!("zeros of W in [-3, 3]^2 (winding {}, complete {}):", list.total_winding, list.complete);
    for r in &list.hits {
        println!("  {:>30.10}  mult {}  bound {}", r.lambda, r.multiplicity, r.bound_state);
    }

    let top = list
        .hits
        .iter()
        .filter(|r| r.bound_state)
        .max_by(|a, b| a.lambda.im.total_cmp(&b.lambda.im))
        .expect("well has a bound state");
    let lambda0 = newton_zero(&s, top.lambda)?;
    let refined = extrapolated_zero(&v0, 256, lambda0)?;
    println!("top bound state {lambda0:.12}, Richardson {refined:.12}");

    let state = s.resonance_state(lambda0)?;
    let (xs, u) = state.samples(7);
    for (x, v) in xs.iter().zip(&u) {
        println!("  u({x:+.3}) = {v:.6}");
    }
    let square = Scatterer::square(-4.0, 1.0)?;
    println!("square well W(2i) = {:.6}", square.wronskian(Complex64::new(0.0, 2.0)));
    Ok(())
}
