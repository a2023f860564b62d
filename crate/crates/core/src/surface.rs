//! Bookkeeping on the Riemann surface of the branches `τ_j(ζ) = (ζ² - j²)^{1/2}`.
//!
//! Near the `l`-th threshold the surface is parametrized by `z = τ_l(ζ)` on the
//! disk `|z| < sqrt(2l - 1)`; every other branch is then an explicit analytic
//! function of `z`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Margin kept from the ramification circle `|z| = sqrt(2l - 1)`.
pub const CHART_MARGIN: f64 = 1e-9;

/// A point of the chart around threshold `l`, given by its coordinate `z = τ_l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub l: u32,
    pub z: Complex64,
}

impl SurfacePoint {
    pub fn new(l: u32, z: Complex64) -> Result<Self> {
        if l == 0 {
            return Err(Error::ChartViolation {
                l,
                modulus: z.norm(),
                limit: 0.0,
            });
        }
        let limit = chart_radius(l);
        if !(z.norm() < limit - CHART_MARGIN) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::ChartViolation {
                l,
                modulus: z.norm(),
                limit,
            });
        }
        Ok(Self { l, z })
    }
}

/// `sqrt(2l - 1)`, the radius of the single-threshold chart.
pub fn chart_radius(l: u32) -> f64 {
    (2.0 * l as f64 - 1.0).sqrt()
}

/// Branch `τ_k` at a chart point. `k < l`: right half-plane root; `k > l`:
/// upper half-plane root; `k = l`: the coordinate itself.
pub fn tau(p: &SurfacePoint, k: u32) -> Complex64 {
    tau_at(p.l, p.z, k)
}

/// Same as [`tau`] without the chart check; the caller guarantees `|z| < sqrt(2l-1)`.
pub(crate) fn tau_at(l: u32, z: Complex64, k: u32) -> Complex64 {
    use std::cmp::Ordering::*;
    let shift = (l as f64).powi(2) - (k as f64).powi(2);
    match k.cmp(&l) {
        Equal => z,
        Less => (z * z + shift).sqrt(),
        Greater => Complex64::i() * (-(z * z + shift)).sqrt(),
    }
}

/// Branches on the reflected sheet: the image of the chart under `ζ ↦ -ζ̄`
/// composed with the chart map, where the open channels `k < l` take the
/// left half-plane root. Used for conjugate-symmetry checks only.
pub(crate) fn tau_reflected(l: u32, z: Complex64, k: u32) -> Complex64 {
    if k < l {
        -tau_at(l, z, k)
    } else {
        tau_at(l, z, k)
    }
}

/// `d(p, q) = sup_j |τ_j(p) - τ_j(q)|` for two points of the same chart.
///
/// For `j > l` the differences satisfy
/// `τ_j(p) - τ_j(q) = (τ_l(p)² - τ_l(q)²) / (τ_j(p) + τ_j(q))`, and the denominators
/// grow like `j`, so the sweep stops once the tail bound falls below the running
/// maximum.
pub fn surface_distance(p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    if p.l != q.l {
        return Err(Error::ChartMismatch(p.l, q.l));
    }
    let l = p.l;
    let mut best = 0.0_f64;
    for j in 0..=l {
        best = best.max((tau(p, j) - tau(q, j)).norm());
    }
    let num = (p.z * p.z - q.z * q.z).norm();
    let mut j = l + 1;
    loop {
        let tp = tau(p, j);
        let tq = tau(q, j);
        best = best.max((tp - tq).norm());
        // |τ_j(p) + τ_j(q)| is increasing in j on the chart (both roots lie in the
        // upper half-plane with growing imaginary parts); bound the tail by the
        // current denominator.
        let tail = num / (tp + tq).norm();
        if tail <= best || j > l + 100_000 {
            break;
        }
        j += 1;
    }
    Ok(best)
}

/// The region variants used by the resonance-free predicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum RegionSpec {
    /// `B_l(ρ)`: `|z| < ρ`.
    Disk { rho: f64 },
    /// `D_l(λ₀, r)`: `|z - λ₀| < r` inside `B_l(rho)`.
    ShiftedDisk {
        lambda0: Complex64,
        r: f64,
        rho: f64,
    },
    /// `U_l^+`: `M_+ < Re z < γ sqrt(2l)`, `Im z > -c_+ log Re z`.
    UPlus { m_plus: f64, c_plus: f64, gamma: f64 },
    /// `U_l^-`: `M_- < Im z < γ sqrt(2l)`, `Re z > -α`.
    UMinus { m_minus: f64, gamma: f64, alpha: f64 },
}

impl RegionSpec {
    pub fn u_plus_default() -> Self {
        Self::UPlus {
            m_plus: 10.0,
            c_plus: 0.5,
            gamma: 0.9,
        }
    }

    pub fn u_minus_default() -> Self {
        Self::UMinus {
            m_minus: 10.0,
            gamma: 0.9,
            alpha: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidRegion(format!("{name} must be positive")))
            }
        };
        match self {
            Self::Disk { rho } => positive(*rho, "rho"),
            Self::ShiftedDisk { r, rho, .. } => {
                positive(*r, "r")?;
                positive(*rho, "rho")
            }
            Self::UPlus {
                m_plus,
                c_plus,
                gamma,
            } => {
                positive(*m_plus, "M_+")?;
                positive(*c_plus, "c_+")?;
                check_gamma(*gamma)
            }
            Self::UMinus {
                m_minus,
                gamma,
                alpha,
            } => {
                positive(*m_minus, "M_-")?;
                check_gamma(*gamma)?;
                positive(*alpha, "alpha")
            }
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRegion("gamma must lie in (0, 1)".into()))
    }
}

/// Literal membership test for the region variants.
pub fn contains(r: &RegionSpec, p: &SurfacePoint) -> bool {
    let z = p.z;
    let l = p.l as f64;
    match r {
        RegionSpec::Disk { rho } => z.norm() < *rho,
        RegionSpec::ShiftedDisk { lambda0, r, rho } => z.norm() < *rho && (z - lambda0).norm() < *r,
        RegionSpec::UPlus {
            m_plus,
            c_plus,
            gamma,
        } => z.re > *m_plus && z.re < gamma * (2.0 * l).sqrt() && z.im > -c_plus * z.re.ln(),
        RegionSpec::UMinus {
            m_minus,
            gamma,
            alpha,
        } => z.im > *m_minus && z.im < gamma * (2.0 * l).sqrt() && z.re > -alpha,
    }
}

/// Distance from `p` to the closure of the physical region within the chart,
/// `{Re z ≥ 0, Im z ≥ 0}`.
///
/// When the `l`-th coordinate dominates the sup in [`surface_distance`], this is the
/// planar distance to the first quadrant; otherwise the boundary of the quadrant
/// is searched on a refined grid.
pub fn distance_to_physical(p: &SurfacePoint) -> f64 {
    let z = p.z;
    if z.re >= 0.0 && z.im >= 0.0 {
        return 0.0;
    }
    let planar = Complex64::new(z.re.max(0.0), z.im.max(0.0));
    let radius = chart_radius(p.l) - 2.0 * CHART_MARGIN;
    let project = |w: Complex64| -> SurfacePoint {
        let w = if w.norm() >= radius { w * (radius / w.norm()) } else { w };
        SurfacePoint { l: p.l, z: w }
    };
    let dist = |w: Complex64| surface_distance(p, &project(w)).unwrap_or(f64::INFINITY);
    let at_planar = dist(planar);
    if (at_planar - (z - planar).norm()).abs() <= 1e-14 * at_planar.max(1.0) {
        return at_planar;
    }
    // The nearest point lies on one of the two boundary rays; refine on each.
    let mut best = at_planar;
    for dir in [Complex64::new(1.0, 0.0), Complex64::i()] {
        let (mut lo, mut hi) = (0.0, radius);
        for _ in 0..6 {
            let n = 64;
            let step = (hi - lo) / n as f64;
            let (mut arg, mut val) = (lo, f64::INFINITY);
            for i in 0..=n {
                let t = lo + i as f64 * step;
                let d = dist(dir * t);
                if d < val {
                    val = d;
                    arg = t;
                }
            }
            best = best.min(val);
            lo = (arg - step).max(0.0);
            hi = (arg + step).min(radius);
        }
    }
    best
}
