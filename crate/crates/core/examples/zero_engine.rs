//! Argument-principle zero finding on a polynomial with a double root.

use cylres::zeros::{annulus_count, locate_zeros, winding_count, Contour, ZeroOptions};
use num_complex::Complex64;

fn main() -> cylres::Result<()> {
    let roots = [Complex64::new(0.5, 0.25), Complex64::new(-0.3, 0.7), Complex64::new(-0.3, 0.7), Complex64::new(1.4, -0.9)];
    let f = |z: Complex64| roots.iter().map(|r| z - r).product::<Complex64>();
    let opts = ZeroOptions::default();

    let rep = locate_zeros(&f, Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0), &opts)?;
    println!("winding {} over the box, {} evaluations, depth {}", rep.total_winding, rep.evaluations, rep.depth);
    for z in &rep.zeros {
        println!("  {:.12}  multiplicity {}  residual {:.1e}", z.location, z.multiplicity, z.residual);
    }

    let n = winding_count(&f, &Contour::circle(Complex64::new(0.0, 0.0), 2.0), &opts)?;
    let ring = annulus_count(&f, Complex64::new(0.0, 0.0), 0.6, 2.0, &opts)?;
    println!("zeros in |z| < 2: {n}, in 0.6 < |z| < 2: {ring}");
    Ok(())
}
