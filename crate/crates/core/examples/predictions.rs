//! Asymptotic predictions next to the direct zeros.

use cylres::asymptotics::{example_logl, example_near_threshold, g_function, lambert_w, leading_correction, threshold_prediction, Branch};
use cylres::potential::well_bump;
use cylres::scatter1d::{newton_zero, Scatterer};
use num_complex::Complex64;

fn main() -> cylres::Result<()> {
    let p = well_bump(6.0, 1.0);
    let s = Scatterer::from_profile(&p.average_v0(), 256)?;
    let lambda0 = newton_zero(&s, Complex64::new(0.0, 2.065))?;
    let state = s.resonance_state(lambda0)?;
    for l in [16, 32, 64] {
        let zeroth = threshold_prediction(lambda0, l);
        let corrected = leading_correction(&state, &p, l)?;
        println!("l = {l:2}: 0th {:.10}  corrected {:.10}", zeroth.z_pred, corrected.z_pred);
    }

    for l in [8, 16, 32] {
        let pr = example_near_threshold(l)?;
        println!("example10 near threshold, l = {l}: {:.8} (error O(l^-{}))", pr.z_pred, pr.error_exponent);
    }
    for l in [32, 64] {
        for sign in [Branch::Plus, Branch::Minus] {
            let pr = example_logl(l, 1, sign)?;
            println!("l = {l}, {sign:?}: z = {:.8}  |g_l(z)| = {:.1e}", pr.z_pred, g_function(l, pr.z_pred).norm());
        }
    }
    let w = lambert_w(-1, Complex64::new(-0.2, 0.1))?;
    println!("W_-1(-0.2 + 0.1i) = {w:.12}");
    Ok(())
}
