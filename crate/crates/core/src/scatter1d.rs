//! One-dimensional scattering for `-d²/dx² + V₀` with compactly supported step `V₀`.
//!
//! Solutions are propagated exactly across each slab. The Jost solutions are
//! `f_-(x) = e^{-iλx}` left of the support and `f_+(x) = e^{iλx}` right of it,
//! and the Wronskian `W = f_- f_+' - f_-' f_+` equals `2iλ` for the free problem.
//! The outgoing resolvent kernel is `-f_-(x_<) f_+(x_>) / W`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{to_steps, trapezoid, ModeProfile, ProfileKind};
use crate::zeros::{locate_zeros, winding_count_perturbed, Contour, ZeroOptions};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// 2×2 complex matrix acting on `(u, u')`.
pub type Mat2 = [[Complex64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn mat_vec(a: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

/// Propagator of `u'' = -s u` over a signed width `w`, where `s = λ² - v`.
///
/// Entries are even in `√s`, so no branch choice is involved.
pub fn slab_matrix(s: Complex64, w: f64) -> Mat2 {
    let t2 = s * w * w;
    let (c, sinc) = if t2.norm() < 1e-6 {
        let t4 = t2 * t2;
        let t6 = t4 * t2;
        (
            ONE - t2 / 2.0 + t4 / 24.0 - t6 / 720.0,
            (ONE - t2 / 6.0 + t4 / 120.0 - t6 / 5040.0) * w,
        )
    } else {
        let mu = s.sqrt();
        let th = mu * w;
        (th.cos(), th.sin() / mu)
    };
    [[c, sinc], [-s * sinc, c]]
}

/// Step potential on a finite support, ready for exact propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct Scatterer {
    breaks: Vec<f64>,
    values: Vec<Complex64>,
}

impl Scatterer {
    /// From a step profile.
    pub fn new(p: &ModeProfile) -> Result<Self> {
        match p.kind() {
            ProfileKind::Step(d) => Ok(Self {
                breaks: d.breaks.clone(),
                values: d.values.clone(),
            }),
            ProfileKind::Sampled => Err(Error::NotStep),
        }
    }

    /// Step profiles are used as they are; sampled ones are replaced by their
    /// midpoint step approximation on `n_steps` slabs.
    pub fn from_profile(p: &ModeProfile, n_steps: usize) -> Result<Self> {
        if p.is_step() {
            Self::new(p)
        } else {
            Self::new(&to_steps(p, n_steps)?)
        }
    }

    /// Zero potential on `[a, b]`.
    pub fn free(a: f64, b: f64) -> Result<Self> {
        Self::new(&ModeProfile::zero(a, b))
    }

    /// Constant `v` on `[-a, a]`.
    pub fn square(v: f64, a: f64) -> Result<Self> {
        Self::new(&ModeProfile::indicator(-a, a, Complex64::new(v, 0.0))?)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    pub fn n_slabs(&self) -> usize {
        self.values.len()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Potential value at `x` (right-continuous, zero outside the support).
    pub fn value(&self, x: f64) -> Complex64 {
        let (a, b) = self.support();
        if x < a || x >= b {
            return Complex64::new(0.0, 0.0);
        }
        let i = self.breaks.partition_point(|&t| t <= x) - 1;
        self.values[i.min(self.values.len() - 1)]
    }

    /// Exact propagator of `(u, u')` across the whole support.
    pub fn transfer_matrix(&self, lambda: Complex64) -> Mat2 {
        let l2 = lambda * lambda;
        let mut t = [[ONE, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), ONE]];
        for (i, v) in self.values.iter().enumerate() {
            let m = slab_matrix(l2 - v, self.breaks[i + 1] - self.breaks[i]);
            t = mat_mul(&m, &t);
        }
        t
    }

    /// Carries the state `(u, u')` at `xa` to `xb` (either direction), treating
    /// the exterior as free.
    pub fn propagate(&self, lambda: Complex64, xa: f64, state: [Complex64; 2], xb: f64) -> [Complex64; 2] {
        if xa == xb {
            return state;
        }
        let l2 = lambda * lambda;
        // cut points between xa and xb in travel order
        let (lo, hi) = if xa < xb { (xa, xb) } else { (xb, xa) };
        let mut cuts: Vec<f64> = self.breaks.iter().copied().filter(|&t| t > lo && t < hi).collect();
        if xa > xb {
            cuts.reverse();
        }
        cuts.push(xb);
        let mut x = xa;
        let mut s = state;
        for &next in &cuts {
            let mid = 0.5 * (x + next);
            let m = slab_matrix(l2 - self.value(mid), next - x);
            s = mat_vec(&m, s);
            x = next;
        }
        s
    }

    /// Jost data at `λ`.
    pub fn jost(&self, lambda: Complex64) -> JostData {
        let (x0, x1) = self.support();
        let t = self.transfer_matrix(lambda);
        let y = mat_vec(&t, [ONE, -I * lambda]);
        let em = (-I * lambda * x0).exp();
        let ep = (I * lambda * x1).exp();
        let w = (I * lambda * (x1 - x0)).exp() * (y[0] * I * lambda - y[1]);
        // f_+ back to x0: inverse transfer matrix (det T = 1)
        let fp1 = [ep, I * lambda * ep];
        let fp0 = [t[1][1] * fp1[0] - t[0][1] * fp1[1], -t[1][0] * fp1[0] + t[0][0] * fp1[1]];
        JostData {
            lambda,
            w,
            x0,
            x1,
            f_minus_right: [y[0] * em, y[1] * em],
            f_plus_left: fp0,
        }
    }

    /// `W(λ)`, entire in `λ`, with `W = 2iλ` for the free problem.
    pub fn wronskian(&self, lambda: Complex64) -> Complex64 {
        let (x0, x1) = self.support();
        let t = self.transfer_matrix(lambda);
        let y = mat_vec(&t, [ONE, -I * lambda]);
        (I * lambda * (x1 - x0)).exp() * (y[0] * I * lambda - y[1])
    }

    /// `W'(λ)` by a five-point central difference.
    pub fn wronskian_derivative(&self, lambda: Complex64) -> Complex64 {
        let h = 2e-4 * lambda.norm().max(1.0);
        let w = |d: f64| self.wronskian(lambda + d * h);
        (w(-2.0) - 8.0 * w(-1.0) + 8.0 * w(1.0) - w(2.0)) / (12.0 * h)
    }

    /// `(f_-, f_-')` at each of the increasing points `xs`.
    pub fn f_minus_on(&self, lambda: Complex64, xs: &[f64]) -> Vec<[Complex64; 2]> {
        let x0 = self.support().0;
        let start = (-I * lambda * x0).exp();
        let mut state = [start, -I * lambda * start];
        let mut x = x0;
        xs.iter()
            .map(|&xi| {
                if xi <= x0 {
                    let e = (-I * lambda * xi).exp();
                    [e, -I * lambda * e]
                } else {
                    state = self.propagate(lambda, x, state, xi);
                    x = xi;
                    state
                }
            })
            .collect()
    }

    /// `(f_+, f_+')` at each of the increasing points `xs`.
    pub fn f_plus_on(&self, lambda: Complex64, xs: &[f64]) -> Vec<[Complex64; 2]> {
        let x1 = self.support().1;
        let start = (I * lambda * x1).exp();
        let mut state = [start, I * lambda * start];
        let mut x = x1;
        let mut out: Vec<[Complex64; 2]> = xs
            .iter()
            .rev()
            .map(|&xi| {
                if xi >= x1 {
                    let e = (I * lambda * xi).exp();
                    [e, I * lambda * e]
                } else {
                    state = self.propagate(lambda, x, state, xi);
                    x = xi;
                    state
                }
            })
            .collect();
        out.reverse();
        out
    }

    fn checked_wronskian(&self, lambda: Complex64) -> Result<Complex64> {
        let w = self.wronskian(lambda);
        let scale = 2.0 * lambda.norm().max(1.0) * (lambda.im.abs() * (self.support().1 - self.support().0)).exp();
        if w.norm() < 1e-12 * scale {
            return Err(Error::NearPole(lambda, w.norm()));
        }
        Ok(w)
    }

    /// Outgoing resolvent kernel `R(λ)(x, x')`.
    pub fn resolvent_kernel(&self, lambda: Complex64, x: f64, xp: f64) -> Result<Complex64> {
        let w = self.checked_wronskian(lambda)?;
        let (lo, hi) = if x <= xp { (x, xp) } else { (xp, x) };
        let fm = self.f_minus_on(lambda, &[lo])[0][0];
        let fp = self.f_plus_on(lambda, &[hi])[0][0];
        Ok(-fm * fp / w)
    }

    /// Kernel matrix `R(λ)(x_i, x_j)` on increasing nodes.
    pub fn kernel_matrix(&self, lambda: Complex64, xs: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        let w = self.checked_wronskian(lambda)?;
        let fm = self.f_minus_on(lambda, xs);
        let fp = self.f_plus_on(lambda, xs);
        let n = xs.len();
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let (a, b) = if i <= j { (i, j) } else { (j, i) };
                        -fm[a][0] * fp[b][0] / w
                    })
                    .collect()
            })
            .collect())
    }

    /// Hilbert–Schmidt norm of `χ R(λ) χ` for `χ` the indicator of `[a, b]`,
    /// by the composite trapezoid rule on `n` intervals per axis.
    pub fn cutoff_resolvent_hs_norm(&self, lambda: Complex64, chi: (f64, f64), n: usize) -> Result<f64> {
        let (a, b) = chi;
        if !(a < b) || n < 2 {
            return Err(Error::InvalidRegion("cutoff interval must be nonempty".into()));
        }
        let h = (b - a) / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| if i == n { b } else { a + i as f64 * h }).collect();
        let k = self.kernel_matrix(lambda, &xs)?;
        let rows: Vec<f64> = k
            .iter()
            .map(|row| trapezoid(row.iter().map(|v| v.norm_sqr()), h))
            .collect();
        Ok(trapezoid(rows, h).sqrt())
    }

    /// Zeros of `W` in the rectangle `[lo, hi]`.
    pub fn find_resonances(&self, lo: Complex64, hi: Complex64, opts: &ZeroOptions) -> Result<ResonanceList> {
        let f = |l: Complex64| self.wronskian(l);
        let rep = locate_zeros(&f, lo, hi, opts)?;
        let real = self.is_real();
        let hits = rep
            .zeros
            .iter()
            .map(|z| Resonance1d {
                lambda: z.location,
                multiplicity: z.multiplicity,
                bound_state: real
                    && z.multiplicity == 1
                    && z.location.im > opts.tol
                    && z.location.re.abs() <= 1e3 * opts.tol.max(1e-12),
            })
            .collect();
        Ok(ResonanceList {
            hits,
            total_winding: rep.total_winding,
            complete: rep.complete,
        })
    }

    /// Vanishing order of `W` at `λ = 0`, by winding over `|λ| = r`.
    pub fn order_at_origin(&self, r: f64) -> Result<i64> {
        let f = |l: Complex64| self.wronskian(l);
        let (w, _) = winding_count_perturbed(&f, &Contour::circle(Complex64::new(0.0, 0.0), r), &ZeroOptions::default())?;
        Ok(w)
    }

    /// Resonance state at a simple zero `λ₀` of `W`.
    pub fn resonance_state(&self, lambda0: Complex64) -> Result<ResonanceState> {
        let wp = self.wronskian_derivative(lambda0);
        let w0 = self.wronskian(lambda0);
        let len = self.support().1 - self.support().0;
        let scale = lambda0.norm().max(1.0) * (lambda0.im.abs() * len).exp();
        if wp.norm() < 1e-8 * scale {
            return Err(Error::NotSimple(lambda0, format!("|W'| = {:e}", wp.norm())));
        }
        if w0.norm() > 1e-6 * wp.norm() * (1.0 + lambda0.norm()) {
            return Err(Error::NotSimple(lambda0, format!("not a zero of W (|W| = {:e})", w0.norm())));
        }
        let jd = self.jost(lambda0);
        let x0 = jd.x0;
        // f_+ = c f_- at a zero of W, and f_-(x0) = e^{-iλ₀x0} never vanishes
        let c = jd.f_plus_left[0] / (-I * lambda0 * x0).exp();
        let s = (I / (c * wp)).sqrt();
        Ok(ResonanceState {
            lambda0,
            scale: s,
            proportionality: c,
            w_prime: wp,
            scatterer: self.clone(),
        })
    }
}

/// Boundary data of the Jost solutions at the support edges `x0 < x1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JostData {
    pub lambda: Complex64,
    pub w: Complex64,
    pub x0: f64,
    pub x1: f64,
    /// `(f_-, f_-')` at `x1`.
    pub f_minus_right: [Complex64; 2],
    /// `(f_+, f_+')` at `x0`.
    pub f_plus_left: [Complex64; 2],
}

/// A zero of `W` with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance1d {
    pub lambda: Complex64,
    pub multiplicity: u32,
    /// Simple zero on the positive imaginary axis of a real potential.
    pub bound_state: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResonanceList {
    pub hits: Vec<Resonance1d>,
    pub total_winding: i64,
    pub complete: bool,
}

/// Normalized residue data `u = s f_+` at a simple zero `λ₀`, so that
/// `R(λ) - i/(λ - λ₀) u⊗u` is analytic near `λ₀`.
#[derive(Clone, Debug)]
pub struct ResonanceState {
    pub lambda0: Complex64,
    /// `s` with `s² = i / (c W'(λ₀))`.
    pub scale: Complex64,
    /// `c` with `f_+ = c f_-` at `λ₀`.
    pub proportionality: Complex64,
    pub w_prime: Complex64,
    scatterer: Scatterer,
}

impl ResonanceState {
    /// `u` at increasing points `xs`.
    pub fn values(&self, xs: &[f64]) -> Vec<Complex64> {
        self.scatterer
            .f_plus_on(self.lambda0, xs)
            .into_iter()
            .map(|v| self.scale * v[0])
            .collect()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.values(&[x])[0]
    }

    /// `u` on `n + 1` uniform nodes of the support, as a sampled profile.
    pub fn samples(&self, n: usize) -> (Vec<f64>, Vec<Complex64>) {
        let (a, b) = self.scatterer.support();
        let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let v = self.values(&xs);
        (xs, v)
    }

    /// Exterior coefficients `(c_-, c_+)` with `u = c_∓ e^{∓iλ₀x}` left/right of the support.
    pub fn exterior(&self) -> (Complex64, Complex64) {
        (self.scale * self.proportionality, self.scale)
    }
}

/// Richardson extrapolation of an `O(h²)` quantity from step sizes `h` and `h/2`.
pub fn richardson(coarse: Complex64, fine: Complex64) -> Complex64 {
    (4.0 * fine - coarse) / 3.0
}

/// Simple zero of `W` for a sampled `V₀`, extrapolated from `n` and `2n` slabs.
///
/// Each level is refined by Newton's method from `guess`.
pub fn extrapolated_zero(p: &ModeProfile, n: usize, guess: Complex64) -> Result<Complex64> {
    let coarse = newton_zero(&Scatterer::from_profile(p, n)?, guess)?;
    let fine = newton_zero(&Scatterer::from_profile(p, 2 * n)?, coarse)?;
    Ok(if p.is_step() { fine } else { richardson(coarse, fine) })
}

/// Newton's method on `W` from `guess`.
pub fn newton_zero(s: &Scatterer, guess: Complex64) -> Result<Complex64> {
    let mut z = guess;
    for _ in 0..60 {
        let dz = s.wronskian(z) / s.wronskian_derivative(z);
        if !(dz.re.is_finite() && dz.im.is_finite()) {
            break;
        }
        z -= dz;
        if dz.norm() < 1e-14 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence("newton", 60))
}
