//! Local coordinates near a threshold: `τ_k(z)` across the channel window.

use cylres::channels::{window_taus, ChannelWindow, Sheet};
use cylres::surface::{chart_radius, tau, SurfacePoint};
use num_complex::Complex64;

fn main() -> cylres::Result<()> {
    let l = 16;
    let z = Complex64::new(0.3, -0.2);
    let p = SurfacePoint::new(l, z)?;
    println!("chart around l = {l}: |z| < {:.4}", chart_radius(l));
    for k in [l - 2, l - 1, l, l + 1, l + 2] {
        let t = tau(&p, k);
        let residual = t * t - (z * z + (l * l) as f64 - (k * k) as f64);
        println!("tau_{k:<3} = {t:>28.6}   |tau^2 - z^2 - l^2 + k^2| = {:.1e}", residual.norm());
    }

    let w = ChannelWindow::new(l, 2, 1)?;
    let chart = window_taus(&w, z, Sheet::Chart);
    let reflected = window_taus(&w, -z.conj(), Sheet::Reflected);
    println!("reflected sheet at -conj(z) mirrors the chart:");
    for (k, (a, b)) in w.channels().iter().zip(chart.iter().zip(&reflected)) {
        println!("  k = {k}: {a:.6} vs -conj {:.6}", -b.conj());
    }

    assert!(SurfacePoint::new(l, Complex64::new(6.0, 0.0)).is_err());
    Ok(())
}
