//! Asymptotic predictions for resonances near the thresholds `l²`.
//!
//! Zeroth-order localization at the one-dimensional resonances of `V₀`, the
//! second-order correction for smooth potentials, the closed forms for the
//! example `V = 2χ_{[-1,1]}(x) cos θ`, and consistency identities.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{Method, ResonanceHit};
use crate::error::{Error, Result};
use crate::potential::{trapezoid_c, CylinderPotential, ModeProfile};
use crate::scatter1d::{Resonance1d, ResonanceState};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    ZerothOrder,
    Corrected,
    ExampleThreshold,
    ExampleLogl,
}

impl Order {
    pub fn method(self) -> Method {
        match self {
            Order::ZerothOrder => Method::Predicted0th,
            Order::Corrected => Method::PredictedCorrected,
            Order::ExampleThreshold | Order::ExampleLogl => Method::ExampleClosedForm,
        }
    }
}

/// A predicted resonance location `z` in the chart around threshold `l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub l: u32,
    pub z_pred: Complex64,
    pub order: Order,
    /// The prediction error is `O(l^{-error_exponent})`.
    pub error_exponent: f64,
    /// Centered at the threshold `z = 0`.
    pub threshold: bool,
    pub warning: Option<String>,
}

/// `z = λ₀`.
pub fn threshold_prediction(lambda0: Complex64, l: u32) -> Prediction {
    Prediction {
        l,
        z_pred: lambda0,
        order: Order::ZerothOrder,
        error_exponent: 2.0,
        threshold: lambda0.norm() < 1e-12,
        warning: None,
    }
}

/// `V_k` and `V_k'` on the nodes of `grid_of`, resampling when the grids differ.
fn samples_on(p: &ModeProfile, grid_of: &ModeProfile) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let same = p.x_min() == grid_of.x_min()
        && p.x_max() == grid_of.x_max()
        && p.samples().len() == grid_of.samples().len();
    if same && !p.is_step() {
        return Ok((p.samples().to_vec(), p.derivative_samples()));
    }
    let vals: Vec<Complex64> = grid_of.grid().iter().map(|&x| p.eval(x)).collect();
    let h = grid_of.spacing();
    let d = (0..vals.len())
        .map(|i| {
            if i == 0 || i == vals.len() - 1 {
                Complex64::new(0.0, 0.0)
            } else {
                (vals[i + 1] - vals[i - 1]) / (2.0 * h)
            }
        })
        .collect();
    Ok((vals, d))
}

/// `z = λ₀ - (i/4l²) Σ_{k≠0} k⁻² ∫ (k² V_{-k} V_k + V_{-k}' V_k') u² dx`.
///
/// Integrals use the composite trapezoid rule on each mode's grid and centered
/// differences for the derivatives. Step modes get a warning attached: the
/// formula presumes smooth coefficients.
pub fn leading_correction(state: &ResonanceState, p: &CylinderPotential, l: u32) -> Result<Prediction> {
    if l == 0 {
        return Err(Error::InvalidWindow("l must be positive".into()));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut step_modes = false;
    for (&k, vk) in p.modes() {
        if k == 0 {
            continue;
        }
        let Some(vmk) = p.mode(-k) else { continue };
        step_modes |= vk.is_step() || vmk.is_step();
        let xs = vk.grid();
        let (a, da) = samples_on(vk, vk)?;
        let (b, db) = samples_on(vmk, vk)?;
        let u = state.values(&xs);
        let k2 = (k as f64).powi(2);
        let integrand = (0..xs.len()).map(|i| (a[i] * b[i] * k2 + da[i] * db[i]) * u[i] * u[i]);
        sum += trapezoid_c(integrand, vk.spacing()) / k2;
    }
    let l2 = (l as f64).powi(2);
    Ok(Prediction {
        l,
        z_pred: state.lambda0 - I * sum / (4.0 * l2),
        order: Order::Corrected,
        error_exponent: 3.0,
        threshold: state.lambda0.norm() < 1e-12,
        warning: step_modes.then(|| "step modes: the correction presumes smooth coefficients".to_string()),
    })
}

/// Branch `ν` of the Lambert function: `W e^W = w`.
pub fn lambert_w(nu: i32, w: Complex64) -> Result<Complex64> {
    if w == Complex64::new(0.0, 0.0) {
        return if nu == 0 {
            Ok(w)
        } else {
            Err(Error::InvalidRegion("W_ν(0) is singular for ν ≠ 0".into()))
        };
    }
    let e = std::f64::consts::E;
    let near_branch = (e * w + 1.0).norm() < 0.3;
    let p = (2.0 * (e * w + 1.0)).sqrt();
    let mut x = if near_branch && nu == 0 {
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if near_branch && ((nu == -1 && w.im >= 0.0) || (nu == 1 && w.im < 0.0)) {
        -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p
    } else if nu == 0 && w.norm() < 3.0 {
        (1.0 + w).ln()
    } else {
        let l1 = w.ln() + 2.0 * PI * I * nu as f64;
        l1 - l1.ln()
    };
    let tol = 1e-13 * w.norm().max(1.0);
    for _ in 0..50 {
        let ex = x.exp();
        let f = x * ex - w;
        if f.norm() <= 1e-16 * w.norm() {
            break;
        }
        let x1 = x + 1.0;
        let denom = ex * x1 - (x + 2.0) * f / (2.0 * x1);
        let dx = f / denom;
        if !(dx.re.is_finite() && dx.im.is_finite()) {
            break;
        }
        x -= dx;
        if dx.norm() < 1e-16 * x.norm().max(1.0) {
            break;
        }
    }
    if (x * x.exp() - w).norm() < tol {
        Ok(x)
    } else {
        Err(Error::NoConvergence("lambert_w", 50))
    }
}

fn example_scale(l: u32) -> f64 {
    let lf = l as f64;
    1.0 / (4.0 * lf * (2.0 * lf).sqrt())
}

/// `z = (1/(4l√(2l))) (-1 - i + e^{2i√(2l)})`, error `O(l⁻²)`.
pub fn example_near_threshold(l: u32) -> Result<Prediction> {
    if l < 2 {
        return Err(Error::InvalidWindow("requires l ≥ 2".into()));
    }
    let s = (2.0 * l as f64).sqrt();
    let z = (Complex64::new(-1.0, -1.0) + (2.0 * I * s).exp()) * example_scale(l);
    Ok(Prediction {
        l,
        z_pred: z,
        order: Order::ExampleThreshold,
        error_exponent: 2.0,
        threshold: true,
        warning: None,
    })
}

/// Sign choice `±` in the example's logarithmic family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

/// Lambert argument `(1/(4l√(2l))) (-i e^{2i√(2l)} ∓ i ± 1)`.
pub fn example_logl_argument(l: u32, sign: Branch) -> Complex64 {
    let s = (2.0 * l as f64).sqrt();
    let pm = match sign {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    (-I * (2.0 * I * s).exp() - pm * I + pm) * example_scale(l)
}

/// `z_ν^± = (i/2) W_ν(argument)`; the `(ν = 1, +)` member sits near
/// `-(3i/4) log l`, with error `O(l^{-1/2+ε})`.
pub fn example_logl(l: u32, nu: i32, sign: Branch) -> Result<Prediction> {
    if l < 8 {
        return Err(Error::InvalidWindow("requires l ≥ 8".into()));
    }
    let w = lambert_w(nu, example_logl_argument(l, sign))?;
    Ok(Prediction {
        l,
        z_pred: 0.5 * I * w,
        order: Order::ExampleLogl,
        error_exponent: 0.5,
        threshold: false,
        warning: None,
    })
}

/// Leading behaviour `-(3/4) log l` of `Im z_1^+`.
pub fn logl_asymptote(l: u32) -> f64 {
    -0.75 * (l as f64).ln()
}

/// `g_l(z) = (1 - e^{2i(√(2l)+z)}/(8lz√(2l)))² - ((i e^{2iz} + e^{2iz})/(8lz√(2l)))²`.
pub fn g_function(l: u32, z: Complex64) -> Complex64 {
    let lf = l as f64;
    let s = (2.0 * lf).sqrt();
    let d = 8.0 * lf * z * s;
    let e2 = (2.0 * I * z).exp();
    let a = 1.0 - (2.0 * I * (s + z)).exp() / d;
    let b = (I * e2 + e2) / d;
    a * a - b * b
}

/// Both the sup of `|Σ V_m V_j V_{-m-j} / (j(j+m))|` and the same relative to
/// `Σ |term|`, over `x_samples`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub absolute: f64,
    pub relative: f64,
}

/// Residual of `Σ_{m,j≠0, m≠-j} V_m V_j V_{-m-j} / (j(j+m)) = 0`.
pub fn sumis0_residual(p: &CylinderPotential, x_samples: &[f64]) -> IdentityResidual {
    let m_max = p.max_mode() as i32;
    let mut out = IdentityResidual {
        absolute: 0.0,
        relative: 0.0,
    };
    for &x in x_samples {
        let v = |m: i32| p.mode(m).map_or(Complex64::new(0.0, 0.0), |prof| prof.eval(x));
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for m in -m_max..=m_max {
            for j in -m_max..=m_max {
                if m == 0 || j == 0 || m == -j || (m + j).abs() > m_max {
                    continue;
                }
                let t = v(m) * v(j) * v(-m - j) / (j as f64 * (j + m) as f64);
                sum += t;
                mass += t.norm();
            }
        }
        out.absolute = out.absolute.max(sum.norm());
        if mass > 0.0 {
            out.relative = out.relative.max(sum.norm() / mass);
        }
    }
    out
}

/// Constants for [`classify_hit`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandParams {
    /// Mode decay exponent `δ` (`+∞` for finitely many modes).
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledDistance {
    pub label: String,
    pub exponent: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub nearest: Option<Resonance1d>,
    pub distance: f64,
    /// `|z - λ_j| l^e` for each band exponent `e`.
    pub scaled: Vec<ScaledDistance>,
    /// `|z| l^δ` (annulus margin around the threshold); `None` when `δ = ∞`.
    pub annulus_margin: Option<f64>,
    /// `Re z · l³`.
    pub re_scaled: f64,
    pub note: Option<String>,
}

/// Distances of a direct hit to the nearest 1-D resonance, scaled by the band
/// exponents. Diagnostic only.
pub fn classify_hit(hit: &ResonanceHit, resonances: &[Resonance1d], params: &BandParams) -> Classification {
    let z = hit.z();
    let lf = hit.point.l as f64;
    let nearest = resonances
        .iter()
        .min_by(|a, b| (a.lambda - z).norm().total_cmp(&(b.lambda - z).norm()))
        .copied();
    let distance = nearest.map_or(f64::INFINITY, |r| (r.lambda - z).norm());
    let m = nearest.map_or(1.0, |r| r.multiplicity as f64);
    let mut scaled = vec![
        ScaledDistance {
            label: "smooth-band".into(),
            exponent: 2.0 / m,
            value: distance * lf.powf(2.0 / m),
        },
        ScaledDistance {
            label: "corrected".into(),
            exponent: 3.0,
            value: distance * lf.powi(3),
        },
    ];
    if params.delta.is_finite() {
        scaled.insert(
            0,
            ScaledDistance {
                label: "delta-band".into(),
                exponent: params.delta / m,
                value: distance * lf.powf(params.delta / m),
            },
        );
    }
    let (annulus_margin, note) = if params.delta.is_finite() {
        (Some(z.norm() * lf.powf(params.delta)), None)
    } else {
        (None, Some("finitely many modes: no decay exponent".to_string()))
    };
    Classification {
        nearest,
        distance,
        scaled,
        annulus_margin,
        re_scaled: z.re * lf.powi(3),
        note,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended::{Xc, Xf};
    use crate::potential::example10;
    use crate::scatter1d::Scatterer;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lambert_special_values() {
        assert_eq!(lambert_w(0, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((lambert_w(0, c(std::f64::consts::E, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        let w = lambert_w(-1, c(-(-1.0f64).exp(), 0.0)).unwrap();
        assert!((w + 1.0).norm() < 1e-7, "{w}");
        assert!(lambert_w(1, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn lambert_branches_match_reference() {
        // reference values from an independent implementation
        let cases = [
            (0, c(1.0, 0.0), c(0.5671432904097838, 0.0)),
            (1, c(1.0, 0.0), c(-1.5339133197935746, 4.375185153061898)),
            (-1, c(1.0, 0.0), c(-1.5339133197935746, -4.375185153061898)),
            (-1, c(-0.1, 0.0), c(-3.577152063957297, 0.0)),
            (1, c(-0.1, 0.0), c(-4.44909817870089, 7.3070607892176085)),
            (2, c(2.0, 3.0), c(-1.1972601078812846, 11.877910111617442)),
            (-2, c(-5.0, -1.0), c(-1.0031135410158354, -13.867561899882826)),
            (1, c(0.001, -0.002), c(-8.25101100375691, 2.3070942188532597)),
            (-1, c(-0.36687944117144233, 0.001), c(-1.0828608435111327, -0.0354674388823273)),
            (1, c(-0.36687944117144233, -0.001), c(-1.0828608435111327, 0.0354674388823273)),
        ];
        for (nu, w, expect) in cases {
            let got = lambert_w(nu, w).unwrap();
            assert!((got - expect).norm() < 1e-12 * expect.norm().max(1.0), "ν={nu} w={w}: {got} vs {expect}");
        }
    }

    #[test]
    fn lambert_residual_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for nu in -2..=2 {
            for _ in 0..100 {
                let w = c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
                let x = lambert_w(nu, w).unwrap();
                assert!((x * x.exp() - w).norm() < 1e-13 * w.norm().max(1.0));
            }
        }
    }

    #[test]
    fn near_threshold_bounds_and_scaling() {
        for l in [2, 5, 10, 37, 100] {
            let p = example_near_threshold(l).unwrap();
            assert!(p.z_pred.norm() <= 3.0 * example_scale(l));
        }
        // |z| ∝ l^{-3/2} up to the bounded oscillating factor
        let r: f64 = (8..200)
            .map(|l| example_near_threshold(l).unwrap().z_pred.norm() / example_scale(l))
            .fold(0.0, f64::max);
        assert!(r <= 1.0 + 2f64.sqrt());
    }

    #[test]
    fn near_threshold_extended_precision() {
        // re-evaluate at l = 10 with 57-digit arithmetic
        let l = 10.0;
        let s = Xf::from_f64(2.0 * l).sqrt();
        let two_i_s = Xc::new(Xf::zero(), s.add(&s));
        let scale = Xf::from_f64(1.0).div(&Xf::from_f64(4.0 * l).mul(&s));
        let z = two_i_s.exp().add(&Xc::from_c64(c(-1.0, -1.0))).scale(&scale);
        let got = example_near_threshold(10).unwrap().z_pred;
        assert!((got - z.to_c64()).norm() < 1e-15 * got.norm().max(1e-3));
    }

    #[test]
    fn logl_consistent_with_g() {
        for l in [8, 16, 32, 64, 128] {
            for (nu, sign) in [(1, Branch::Plus), (1, Branch::Minus), (0, Branch::Plus), (2, Branch::Minus)] {
                let p = example_logl(l, nu, sign).unwrap();
                let g = g_function(l, p.z_pred);
                assert!(g.norm() < 1e-9, "l={l} ν={nu} {sign:?} z={} g={g}", p.z_pred);
            }
        }
    }

    #[test]
    fn logl_approaches_asymptote() {
        let ratios: Vec<f64> = [32u32, 10_000, 100_000_000, 4_000_000_000]
            .iter()
            .map(|&l| example_logl(l, 1, Branch::Plus).unwrap().z_pred.im / logl_asymptote(l))
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
        assert!(ratios[3] > 1.0 && ratios[3] < 1.25);
    }

    #[test]
    fn logl_extended_precision() {
        // Newton on W e^W = w at 57 digits from the double-precision branch value
        let l = 64;
        let w = example_logl_argument(l, Branch::Plus);
        let x0 = lambert_w(1, w).unwrap();
        let wx = {
            let s = Xf::from_f64(128.0).sqrt();
            let e = Xc::new(Xf::zero(), s.add(&s)).exp();
            let scale = Xf::from_f64(1.0).div(&Xf::from_f64(256.0).mul(&s));
            Xc::i().mul(&e).neg().sub(&Xc::i()).add(&Xc::one()).scale(&scale)
        };
        let mut x = Xc::from_c64(x0);
        for _ in 0..4 {
            let ex = x.exp();
            let f = x.mul(&ex).sub(&wx);
            let df = ex.mul(&x.add(&Xc::one()));
            x = x.sub(&f.div(&df));
        }
        assert!((x.to_c64() - x0).norm() < 1e-13 * x0.norm());
        let z = example_logl(l, 1, Branch::Plus).unwrap().z_pred;
        assert!((z - x.mul(&Xc::i()).scale(&Xf::from_f64(0.5)).to_c64()).norm() < 1e-13 * z.norm());
    }

    #[test]
    fn g_lower_bound_near_logl_zero() {
        for l in [8, 32, 64, 128] {
            let z1 = example_logl(l, 1, Branch::Plus).unwrap().z_pred;
            for r in [0.01, 0.05, 0.1, 0.2] {
                let min = (0..256)
                    .map(|j| {
                        let t = 2.0 * PI * j as f64 / 256.0;
                        g_function(l, z1 + Complex64::from_polar(r, t)).norm()
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(min >= 2.0 * r / 3.0, "l={l} r={r} min={min}");
            }
        }
    }

    fn well_state(p: &CylinderPotential, n: usize) -> ResonanceState {
        let s = Scatterer::from_profile(&p.average_v0(), n).unwrap();
        let hits = s
            .find_resonances(c(-0.5, 0.2), c(0.5, 4.0), &crate::zeros::ZeroOptions::default())
            .unwrap();
        let top = hits.hits.iter().max_by(|a, b| a.lambda.im.total_cmp(&b.lambda.im)).unwrap();
        s.resonance_state(top.lambda).unwrap()
    }

    #[test]
    fn correction_vanishes_without_oscillation() {
        let p = crate::potential::square_well(4.0, 1.0);
        let s = Scatterer::square(-4.0, 1.0).unwrap();
        let lambda0 = crate::scatter1d::newton_zero(&s, c(0.0, 1.5)).unwrap();
        let st = s.resonance_state(lambda0).unwrap();
        let pr = leading_correction(&st, &p, 32).unwrap();
        assert_eq!(pr.z_pred, lambda0);
        assert_eq!(pr.error_exponent, 3.0);
    }

    #[test]
    fn single_pair_correction() {
        let p = crate::potential::well_bump(6.0, 1.0);
        let st = well_state(&p, 512);
        let phi = p.mode(1).unwrap();
        let xs = phi.grid();
        let (v, dv) = (phi.samples(), phi.derivative_samples());
        let u = st.values(&xs);
        let integral = trapezoid_c((0..xs.len()).map(|i| (v[i] * v[i] + dv[i] * dv[i]) * u[i] * u[i]), phi.spacing());
        for l in [16u32, 32] {
            let pr = leading_correction(&st, &p, l).unwrap();
            let expect = st.lambda0 - I * integral / (2.0 * (l * l) as f64);
            assert!((pr.z_pred - expect).norm() < 1e-14);
            assert!(pr.warning.is_none());
        }
        // real V and λ₀ ∈ iℝ₊: the shift is purely imaginary
        let d = leading_correction(&st, &p, 16).unwrap().z_pred - st.lambda0;
        assert!(d.re.abs() < 1e-10 * d.norm(), "{d}");
    }

    #[test]
    fn step_modes_warn() {
        let p = example10();
        let s = Scatterer::free(-1.0, 1.0).unwrap();
        let st = s.resonance_state(c(0.0, 0.0)).unwrap();
        let pr = leading_correction(&st, &p, 8).unwrap();
        assert!(pr.warning.is_some());
    }

    #[test]
    fn sum_identity_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut modes = std::collections::BTreeMap::new();
        for m in -8..=8 {
            if m == 0 {
                continue;
            }
            let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            modes.insert(m, ModeProfile::indicator(-1.0, 1.0, v).unwrap());
        }
        let p = CylinderPotential::new(modes, false).unwrap();
        let r = sumis0_residual(&p, &[0.0, 0.5]);
        assert!(r.relative < 1e-13, "{r:?}");
        let e = sumis0_residual(&example10(), &[0.0]);
        assert_eq!(e.absolute, 0.0);
    }

    #[test]
    fn zeroth_order_prediction() {
        let p = threshold_prediction(c(0.0, 2.0), 50);
        assert_eq!(p.z_pred, c(0.0, 2.0));
        assert!(!p.threshold);
        assert!(threshold_prediction(c(0.0, 0.0), 50).threshold);
    }
}
