//! Independent oracles for the one-dimensional solver and the correction formula.

use cylres::asymptotics::leading_correction;
use cylres::potential::{smooth_bump, well_bump, WELL_BUMP_HALF_WIDTH};
use cylres::scatter1d::{newton_zero, Scatterer};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// RK4 for `u'' = (V - λ²) u` with constant `V` on `[a, b]`.
fn rk4(v: f64, lambda: Complex64, a: f64, b: f64, n: usize, mut y: [Complex64; 2]) -> [Complex64; 2] {
    let q = v - lambda * lambda;
    let h = (b - a) / n as f64;
    let rhs = |y: [Complex64; 2]| [y[1], q * y[0]];
    for _ in 0..n {
        let k1 = rhs(y);
        let k2 = rhs([y[0] + k1[0] * (h / 2.0), y[1] + k1[1] * (h / 2.0)]);
        let k3 = rhs([y[0] + k2[0] * (h / 2.0), y[1] + k2[1] * (h / 2.0)]);
        let k4 = rhs([y[0] + k3[0] * h, y[1] + k3[1] * h]);
        for i in 0..2 {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    y
}

/// Square well `V = v` on `[-1, 1]`: solution outgoing to the left, carried to `x`.
fn shoot_left(v: f64, lambda: Complex64, x: f64) -> [Complex64; 2] {
    let e = |x: f64| (-I * lambda * x).exp();
    if x <= -1.0 {
        return [e(x), -I * lambda * e(x)];
    }
    let start = [e(-1.0), -I * lambda * e(-1.0)];
    let xe = x.min(1.0);
    let mut y = rk4(v, lambda, -1.0, xe, ((xe + 1.0) * 4000.0).ceil() as usize, start);
    if x > 1.0 {
        y = rk4(0.0, lambda, 1.0, x, ((x - 1.0) * 4000.0).ceil() as usize, y);
    }
    y
}

fn shoot_right(v: f64, lambda: Complex64, x: f64) -> [Complex64; 2] {
    let e = |x: f64| (I * lambda * x).exp();
    if x >= 1.0 {
        return [e(x), I * lambda * e(x)];
    }
    let start = [e(1.0), I * lambda * e(1.0)];
    let xs = x.max(-1.0);
    let mut y = rk4(v, lambda, 1.0, xs, ((1.0 - xs) * 4000.0).ceil() as usize, start);
    if x < -1.0 {
        y = rk4(0.0, lambda, -1.0, x, ((-1.0 - x) * 4000.0).ceil() as usize, y);
    }
    y
}

#[test]
fn kernel_matches_shooting_oracle() {
    let v = -4.0;
    let s = Scatterer::square(v, 1.0).unwrap();
    let lambda = Complex64::new(0.0, 2.0);
    for (x, xp) in [(-0.3, 0.55), (0.9, -0.9), (-1.7, 0.2), (1.4, 2.1), (0.0, 0.0)] {
        let (lo, hi) = if x < xp { (x, xp) } else { (xp, x) };
        let um = shoot_left(v, lambda, lo);
        let up = shoot_right(v, lambda, hi);
        // Wronskian is constant; evaluate it at the left point
        let up_lo = shoot_right(v, lambda, lo);
        let w = um[0] * up_lo[1] - um[1] * up_lo[0];
        let oracle = -um[0] * up[0] / w;
        let k = s.resolvent_kernel(lambda, x, xp).unwrap();
        let err = (k - oracle).norm() / oracle.norm();
        assert!(err < 1e-8, "x = {x}, x' = {xp}: {k} vs {oracle} ({err:.2e})");
    }
}

#[test]
fn kernel_residue_at_bound_state() {
    let s = Scatterer::square(-4.0, 1.0).unwrap();
    let lambda0 = newton_zero(&s, Complex64::new(0.0, 1.0)).unwrap();
    let state = s.resonance_state(lambda0).unwrap();
    let pts = [-1.3, -0.4, 0.25, 0.8];
    for &x in &pts {
        for &xp in &pts {
            let residue = I * state.eval(x) * state.eval(xp);
            let mut prev = f64::INFINITY;
            for eps in [1e-3, 1e-4, 1e-5] {
                let d = Complex64::new(eps, eps);
                let approx = d * s.resolvent_kernel(lambda0 + d, x, xp).unwrap();
                let err = (approx - residue).norm();
                assert!(err < 10.0 * eps * residue.norm().max(1e-3), "eps {eps}: {approx} vs {residue}");
                assert!(err < prev);
                prev = err;
            }
        }
    }
}

#[test]
fn correction_matches_fine_quadrature() {
    let p = well_bump(6.0, 1.0);
    let s = Scatterer::from_profile(&p.average_v0(), 256).unwrap();
    let lambda0 = newton_zero(&s, Complex64::new(0.0, 2.065)).unwrap();
    let state = s.resonance_state(lambda0).unwrap();
    let l = 32u32;
    let z = leading_correction(&state, &p, l).unwrap().z_pred;

    // V_{±1} = φ(x/a), V_{±1}' = φ'(x/a)/a; both k = ±1 terms are equal.
    let a = WELL_BUMP_HALF_WIDTH;
    let n = 4 * 512;
    let h = 2.0 * a / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 1..n {
        let x = -a + i as f64 * h;
        let t = x / a;
        let phi = smooth_bump(t);
        let dphi = phi * (-2.0 * t / (1.0 - t * t).powi(2)) / a;
        let u = state.eval(x);
        sum += (phi * phi + dphi * dphi) * u * u * h;
    }
    let oracle = lambda0 - I * 2.0 * sum / (4.0 * (l as f64).powi(2));
    let shift = (lambda0 - oracle).norm();
    assert!((z - oracle).norm() < 1e-3 * shift, "{z} vs {oracle}");
    assert!((z - oracle).norm() < 1e-8);
}
