//! Coupled-channel matching determinant and direct resonance search near `l`.

use cylres::channels::{find_cylinder_resonances, truncation_study, ChannelSystem, ChannelWindow, Tower};
use cylres::potential::well_bump;
use cylres::zeros::ZeroOptions;
use num_complex::Complex64;

fn main() -> cylres::Result<()> {
    let p = well_bump(6.0, 1.0);
    let l = 16;
    let w = ChannelWindow::new(l, 4, 256)?;
    let sys = ChannelSystem::new(&p, &w, Tower::Plus)?;
    for z in [Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, -0.5)] {
        println!("D({z}) = {:.6e}", sys.determinant(z)?);
    }

    let opts = ZeroOptions::default();
    let (lo, hi) = (Complex64::new(-0.5, 1.5), Complex64::new(0.5, 2.5));
    let search = find_cylinder_resonances(&p, &w, lo, hi, &opts)?;
    for h in &search.hits {
        println!("resonance z = {:.10}  multiplicity {} x tower factor {}", h.z(), h.multiplicity, h.tower_factor);
    }

    let table = truncation_study(&p, l, lo, hi, &[2, 3, 4], &[128, 256], &opts)?;
    for row in table.k_sweep.iter().chain(&table.slab_sweep) {
        println!("K = {} slabs = {:4}  change {:?}", row.k, row.slabs, row.change);
    }
    Ok(())
}
