//! Cylinder potentials represented through their angular Fourier modes.
//!
//! A potential `V(x, θ)` on `ℝ × S¹` is stored as the finite family of
//! coefficients `V_m(x) = (1/2π) ∫ V(x, θ) e^{-imθ} dθ`. Each coefficient is a
//! [`ModeProfile`]: either a smooth profile sampled on a uniform grid, or a
//! piecewise-constant (step) profile. Propagators only ever see step data, see
//! [`CylinderPotential::slab_grid`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Piecewise-constant data of a step profile.
#[derive(Clone, Debug, PartialEq)]
pub struct StepData {
    pub breaks: Vec<f64>,
    pub values: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProfileKind {
    Sampled,
    Step(StepData),
}

/// One angular Fourier coefficient `V_m`, compactly supported in `[x_min, x_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeProfile {
    x_min: f64,
    x_max: f64,
    samples: Vec<Complex64>,
    kind: ProfileKind,
}

impl ModeProfile {
    /// Smooth profile from `n + 1` samples on a uniform grid. Must vanish at both ends.
    pub fn sampled(x_min: f64, x_max: f64, samples: Vec<Complex64>) -> Result<Self> {
        check_interval(x_min, x_max)?;
        if samples.len() < 2 {
            return Err(Error::InvalidProfile("need at least two samples".into()));
        }
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidProfile("non-finite sample".into()));
        }
        let scale = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let ends = samples[0].norm().max(samples[samples.len() - 1].norm());
        if ends > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidProfile(format!(
                "sampled profile must vanish at the support edges (found {ends:e})"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            samples,
            kind: ProfileKind::Sampled,
        })
    }

    /// Smooth profile from a function evaluated on `n + 1` uniform nodes.
    pub fn from_fn(x_min: f64, x_max: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let h = (x_max - x_min) / n as f64;
        let samples = (0..=n).map(|i| f(x_min + i as f64 * h)).collect();
        Self::sampled(x_min, x_max, samples)
    }

    /// Step profile: `values[i]` on `[breaks[i], breaks[i+1])`, zero outside.
    pub fn step(breaks: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if breaks.len() < 2 || breaks.len() != values.len() + 1 {
            return Err(Error::InvalidProfile(
                "step profile needs one more breakpoint than values".into(),
            ));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidProfile(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidProfile("non-finite step value".into()));
        }
        let x_min = breaks[0];
        let x_max = breaks[breaks.len() - 1];
        let data = StepData { breaks, values };
        let n = data.values.len();
        let h = (x_max - x_min) / n as f64;
        let samples = (0..=n)
            .map(|i| step_eval(&data, x_min + i as f64 * h))
            .collect();
        Ok(Self {
            x_min,
            x_max,
            samples,
            kind: ProfileKind::Step(data),
        })
    }

    /// Constant `value` on `[a, b]`.
    pub fn indicator(a: f64, b: f64, value: Complex64) -> Result<Self> {
        Self::step(vec![a, b], vec![value])
    }

    pub fn zero(x_min: f64, x_max: f64) -> Self {
        Self::indicator(x_min, x_max, ZERO).expect("valid interval")
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn is_step(&self) -> bool {
        matches!(self.kind, ProfileKind::Step(_))
    }

    pub fn step_data(&self) -> Option<&StepData> {
        match &self.kind {
            ProfileKind::Step(d) => Some(d),
            ProfileKind::Sampled => None,
        }
    }

    /// Grid spacing of the sample view.
    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.samples.len() - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.samples.len())
            .map(|i| self.x_min + i as f64 * h)
            .collect()
    }

    /// Point evaluation: linear interpolation for sampled profiles, cell value for
    /// steps (average of the two sides exactly at a breakpoint).
    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.kind {
            ProfileKind::Step(d) => step_eval(d, x),
            ProfileKind::Sampled => {
                if x <= self.x_min || x >= self.x_max {
                    return ZERO;
                }
                let h = self.spacing();
                let t = (x - self.x_min) / h;
                let i = (t.floor() as usize).min(self.samples.len() - 2);
                let frac = t - i as f64;
                self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac
            }
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match &self.kind {
            ProfileKind::Step(d) => d.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            ProfileKind::Sampled => self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// `∫ |V_m|² dx`: exact for steps, composite trapezoid for samples.
    pub fn l2_norm_sq(&self) -> f64 {
        match &self.kind {
            ProfileKind::Step(d) => d
                .values
                .iter()
                .zip(d.breaks.windows(2))
                .map(|(v, w)| v.norm_sqr() * (w[1] - w[0]))
                .sum(),
            ProfileKind::Sampled => {
                let h = self.spacing();
                trapezoid(self.samples.iter().map(|v| v.norm_sqr()), h)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sup_norm() == 0.0
    }

    /// Centered differences inside, second-order one-sided at the two edges.
    pub fn derivative_samples(&self) -> Vec<Complex64> {
        let s = &self.samples;
        let n = s.len();
        let h = self.spacing();
        if n < 3 {
            let d = (s[n - 1] - s[0]) / h;
            return vec![d; n];
        }
        (0..n)
            .map(|i| {
                if i == 0 {
                    (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h)
                } else if i == n - 1 {
                    (3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (2.0 * h)
                } else {
                    (s[i + 1] - s[i - 1]) / (2.0 * h)
                }
            })
            .collect()
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.samples.iter_mut().for_each(|v| *v = v.conj());
        if let ProfileKind::Step(d) = &mut out.kind {
            d.values.iter_mut().for_each(|v| *v = v.conj());
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.samples.iter_mut().for_each(|v| *v *= c);
        if let ProfileKind::Step(d) = &mut out.kind {
            d.values.iter_mut().for_each(|v| *v *= c);
        }
        out
    }
}

fn check_interval(x_min: f64, x_max: f64) -> Result<()> {
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
        return Err(Error::InvalidProfile(format!(
            "support [{x_min}, {x_max}] is not a proper interval"
        )));
    }
    Ok(())
}

fn step_eval(d: &StepData, x: f64) -> Complex64 {
    let b = &d.breaks;
    let last = b.len() - 1;
    if x < b[0] || x > b[last] {
        return ZERO;
    }
    // index of the first break strictly greater than x
    let j = b.partition_point(|&t| t <= x);
    let left = if j >= 1 && j - 1 < d.values.len() && x > b[j - 1] {
        Some(d.values[j - 1])
    } else {
        None
    };
    if j >= 1 && x == b[j - 1] {
        let before = if j >= 2 { d.values[j - 2] } else { ZERO };
        let after = if j - 1 < d.values.len() { d.values[j - 1] } else { ZERO };
        return (before + after) * 0.5;
    }
    left.unwrap_or(ZERO)
}

/// Composite trapezoid rule for uniformly spaced values.
pub fn trapezoid<I>(values: I, h: f64) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let v: Vec<f64> = values.into_iter().collect();
    if v.len() < 2 {
        return 0.0;
    }
    let inner: f64 = v[1..v.len() - 1].iter().sum();
    h * (inner + 0.5 * (v[0] + v[v.len() - 1]))
}

pub fn trapezoid_c<I>(values: I, h: f64) -> Complex64
where
    I: IntoIterator<Item = Complex64>,
{
    let v: Vec<Complex64> = values.into_iter().collect();
    if v.len() < 2 {
        return ZERO;
    }
    let inner: Complex64 = v[1..v.len() - 1].iter().sum();
    (inner + (v[0] + v[v.len() - 1]) * 0.5) * h
}

/// Values of `V(x, θ)` sampled on an x-layout times a uniform θ-grid on `[0, 2π)`.
///
/// `Nodes` rows are point samples on `n + 1` uniform nodes and produce sampled
/// profiles; `Cells` rows are cell values between `breaks` and produce steps.
#[derive(Clone, Debug)]
pub struct AngularSamples {
    pub layout: XLayout,
    pub rows: Vec<Vec<Complex64>>,
}

#[derive(Clone, Debug)]
pub enum XLayout {
    Nodes { x_min: f64, x_max: f64 },
    Cells { breaks: Vec<f64> },
}

impl AngularSamples {
    /// Samples a function `V(x, θ)` on uniform nodes.
    pub fn from_nodes(
        x_min: f64,
        x_max: f64,
        n: usize,
        n_theta: usize,
        v: impl Fn(f64, f64) -> Complex64,
    ) -> Self {
        let h = (x_max - x_min) / n as f64;
        let rows = (0..=n)
            .map(|i| {
                let x = x_min + i as f64 * h;
                theta_row(n_theta, |t| v(x, t))
            })
            .collect();
        Self {
            layout: XLayout::Nodes { x_min, x_max },
            rows,
        }
    }

    /// Samples a function of `(cell index, θ)` on step cells.
    pub fn from_cells(breaks: Vec<f64>, n_theta: usize, v: impl Fn(usize, f64) -> Complex64) -> Self {
        let rows = (0..breaks.len() - 1)
            .map(|c| theta_row(n_theta, |t| v(c, t)))
            .collect();
        Self {
            layout: XLayout::Cells { breaks },
            rows,
        }
    }

    pub fn n_theta(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

fn theta_row(n_theta: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    (0..n_theta)
        .map(|j| f(2.0 * PI * j as f64 / n_theta as f64))
        .collect()
}

/// Trapezoid-rule angular Fourier coefficient `V_m`.
pub fn fourier_mode(samples: &AngularSamples, m: i32) -> Result<ModeProfile> {
    let n_theta = samples.n_theta();
    let required = 4 * m.unsigned_abs() as usize + 4;
    if n_theta < required || samples.rows.iter().any(|r| r.len() != n_theta) {
        return Err(Error::GridTooCoarse {
            points: n_theta,
            mode: m,
            required,
        });
    }
    let twiddle: Vec<Complex64> = (0..n_theta)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * (m as f64) * j as f64 / n_theta as f64))
        .collect();
    let coeff = |row: &Vec<Complex64>| -> Complex64 {
        row.iter().zip(&twiddle).map(|(v, w)| v * w).sum::<Complex64>() / n_theta as f64
    };
    let values: Vec<Complex64> = samples.rows.iter().map(coeff).collect();
    match &samples.layout {
        XLayout::Nodes { x_min, x_max } => {
            // roundoff can leave ~1e-17 at the edges; the profile vanishes there
            let mut values = values;
            let last = values.len() - 1;
            for i in [0, last] {
                if values[i].norm() < 1e-13 {
                    values[i] = ZERO;
                }
            }
            ModeProfile::sampled(*x_min, *x_max, values)
        }
        XLayout::Cells { breaks } => ModeProfile::step(breaks.clone(), values),
    }
}

/// Piecewise-constant midpoint approximation on `n_steps` equal slabs.
pub fn to_steps(p: &ModeProfile, n_steps: usize) -> Result<ModeProfile> {
    if n_steps == 0 {
        return Err(Error::InvalidProfile("n_steps must be at least 1".into()));
    }
    let h = (p.x_max - p.x_min) / n_steps as f64;
    let breaks: Vec<f64> = (0..=n_steps).map(|i| p.x_min + i as f64 * h).collect();
    let values = (0..n_steps)
        .map(|i| p.eval(p.x_min + (i as f64 + 0.5) * h))
        .collect();
    ModeProfile::step(breaks, values)
}

/// Potential `V = Σ V_m e^{imθ}` with finitely many modes.
#[derive(Clone, Debug)]
pub struct CylinderPotential {
    modes: BTreeMap<i32, ModeProfile>,
    real: bool,
}

impl CylinderPotential {
    /// Builds a potential; zero profiles are dropped. When `real` is set, `V_{-m}`
    /// must equal `conj(V_m)`.
    pub fn new(modes: BTreeMap<i32, ModeProfile>, real: bool) -> Result<Self> {
        let modes: BTreeMap<i32, ModeProfile> =
            modes.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        if real {
            for (m, p) in &modes {
                let partner = modes.get(&-m);
                let scale = p.sup_norm().max(1.0);
                let ok = match partner {
                    None => false,
                    Some(q) => {
                        q.samples.len() == p.samples.len()
                            && q.kind_matches(p)
                            && q.samples
                                .iter()
                                .zip(&p.samples)
                                .all(|(a, b)| (a - b.conj()).norm() <= 1e-12 * scale)
                    }
                };
                if !ok {
                    return Err(Error::InvalidPotential(format!(
                        "real potential needs V_{{-{m}}} = conj(V_{m})"
                    )));
                }
            }
        }
        Ok(Self { modes, real })
    }

    /// The zero potential.
    pub fn zero() -> Self {
        Self {
            modes: BTreeMap::new(),
            real: true,
        }
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn modes(&self) -> &BTreeMap<i32, ModeProfile> {
        &self.modes
    }

    pub fn mode(&self, m: i32) -> Option<&ModeProfile> {
        self.modes.get(&m)
    }

    pub fn max_mode(&self) -> u32 {
        self.modes.keys().map(|m| m.unsigned_abs()).max().unwrap_or(0)
    }

    /// Smallest interval containing every mode support (`[-1, 1]` when empty).
    pub fn support(&self) -> (f64, f64) {
        if self.modes.is_empty() {
            return (-1.0, 1.0);
        }
        self.modes.values().fold((f64::MAX, f64::MIN), |(a, b), p| {
            (a.min(p.x_min), b.max(p.x_max))
        })
    }

    /// True when every mode is a sampled (smooth) profile.
    pub fn is_smooth(&self) -> bool {
        self.modes.values().all(|p| !p.is_step())
    }

    /// `V_0`, the θ-average. A zero step profile on the common support if absent.
    pub fn average_v0(&self) -> ModeProfile {
        match self.modes.get(&0) {
            Some(p) => p.clone(),
            None => {
                let (a, b) = self.support();
                ModeProfile::zero(a, b)
            }
        }
    }

    /// `V# = V - V_0`.
    pub fn oscillatory(&self) -> Self {
        let modes = self
            .modes
            .iter()
            .filter(|(m, _)| **m != 0)
            .map(|(m, p)| (*m, p.clone()))
            .collect();
        Self {
            modes,
            real: self.real,
        }
    }

    /// The conjugate potential `V̄`, with modes `(V̄)_m = conj(V_{-m})`.
    pub fn conjugate(&self) -> Self {
        let modes = self.modes.iter().map(|(m, p)| (-m, p.conj())).collect();
        Self {
            modes,
            real: self.real,
        }
    }

    /// `V(x, -θ)`, modes relabelled `m -> -m`.
    pub fn reflected(&self) -> Self {
        let modes = self.modes.iter().map(|(m, p)| (-m, p.clone())).collect();
        Self {
            modes,
            real: self.real,
        }
    }

    /// Pointwise value `V(x, θ)`.
    pub fn value(&self, x: f64, theta: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|(m, p)| p.eval(x) * Complex64::from_polar(1.0, *m as f64 * theta))
            .sum()
    }

    /// Common slab grid for the propagators.
    ///
    /// Potentials whose modes are all steps on identical breakpoints are used as
    /// they are; everything else is midpoint-sampled on `n_steps` equal slabs of
    /// the common support. Adjacent slabs with identical values are merged.
    pub fn slab_grid(&self, n_steps: usize) -> Result<SlabGrid> {
        let (a, b) = self.support();
        let shared_steps = self.modes.values().all(|p| p.is_step()) && {
            let mut it = self.modes.values().filter_map(|p| p.step_data());
            match it.next() {
                None => true,
                Some(first) => it.all(|d| d.breaks == first.breaks),
            }
        };
        let (breaks, values): (Vec<f64>, BTreeMap<i32, Vec<Complex64>>) =
            if shared_steps && !self.modes.is_empty() {
                let first = self.modes.values().next().and_then(|p| p.step_data()).unwrap();
                let values = self
                    .modes
                    .iter()
                    .map(|(m, p)| (*m, p.step_data().unwrap().values.clone()))
                    .collect();
                (first.breaks.clone(), values)
            } else if self.modes.is_empty() {
                (vec![a, b], BTreeMap::new())
            } else {
                if n_steps == 0 {
                    return Err(Error::InvalidProfile("n_steps must be at least 1".into()));
                }
                let h = (b - a) / n_steps as f64;
                let breaks: Vec<f64> = (0..=n_steps).map(|i| a + i as f64 * h).collect();
                let values = self
                    .modes
                    .iter()
                    .map(|(m, p)| {
                        let v = (0..n_steps)
                            .map(|i| p.eval(a + (i as f64 + 0.5) * h))
                            .collect();
                        (*m, v)
                    })
                    .collect();
                (breaks, values)
            };
        Ok(SlabGrid::merged(breaks, values))
    }
}

impl ModeProfile {
    fn kind_matches(&self, other: &ModeProfile) -> bool {
        match (&self.kind, &other.kind) {
            (ProfileKind::Sampled, ProfileKind::Sampled) => true,
            (ProfileKind::Step(a), ProfileKind::Step(b)) => a.breaks == b.breaks,
            _ => false,
        }
    }
}

/// All modes of a potential as constants on a shared set of slabs.
#[derive(Clone, Debug, PartialEq)]
pub struct SlabGrid {
    pub breaks: Vec<f64>,
    pub values: BTreeMap<i32, Vec<Complex64>>,
}

impl SlabGrid {
    fn merged(breaks: Vec<f64>, values: BTreeMap<i32, Vec<Complex64>>) -> Self {
        let n = breaks.len() - 1;
        let mut keep_breaks = vec![breaks[0]];
        let mut keep_idx: Vec<usize> = Vec::with_capacity(n);
        for i in 0..n {
            let same_as_prev = i > 0
                && values
                    .values()
                    .all(|v| v[i] == v[*keep_idx.last().unwrap()]);
            if same_as_prev {
                *keep_breaks.last_mut().unwrap() = breaks[i + 1];
            } else {
                keep_idx.push(i);
                keep_breaks.push(breaks[i + 1]);
            }
        }
        let values = values
            .into_iter()
            .map(|(m, v)| (m, keep_idx.iter().map(|&i| v[i]).collect()))
            .collect();
        Self {
            breaks: keep_breaks,
            values,
        }
    }

    pub fn n_slabs(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn width(&self, slab: usize) -> f64 {
        self.breaks[slab + 1] - self.breaks[slab]
    }

    /// `V_m` on a slab (zero for absent modes).
    pub fn value(&self, m: i32, slab: usize) -> Complex64 {
        self.values.get(&m).map_or(ZERO, |v| v[slab])
    }

    pub fn x_min(&self) -> f64 {
        self.breaks[0]
    }

    pub fn x_max(&self) -> f64 {
        self.breaks[self.breaks.len() - 1]
    }
}

/// Least-squares fit of `log ‖V_m‖_∞ ≈ log C - δ log |m|` over the nonzero modes.
///
/// Returns `(δ, C)`; `δ = +∞` when fewer than two distinct `|m|` carry mass.
pub fn mode_decay_exponent(p: &CylinderPotential) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = p
        .modes()
        .iter()
        .filter(|(m, prof)| **m != 0 && prof.sup_norm() > 0.0)
        .map(|(m, prof)| ((m.unsigned_abs() as f64).ln(), prof.sup_norm().ln()))
        .collect();
    let mut distinct: Vec<f64> = pts.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return (f64::INFINITY, 0.0);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    (-slope, intercept.exp())
}

/// `∫∫ |V|² dx dθ / 2π` by Parseval (`Σ_m ‖V_m‖²`).
pub fn parseval_mass(p: &CylinderPotential) -> f64 {
    p.modes().values().map(ModeProfile::l2_norm_sq).sum()
}

// ---------------------------------------------------------------------------
// Builtins

/// `C^∞` bump `exp(1 - 1/(1 - t²))` on `|t| < 1`, equal to 1 at the origin.
pub fn smooth_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Half-width of the `well_bump` support.
pub const WELL_BUMP_HALF_WIDTH: f64 = 1.5;
/// Grid size of the `well_bump` profiles.
pub const WELL_BUMP_GRID: usize = 512;

/// `V(x, θ) = 2 χ_{[-1,1]}(x) cos θ`: `V_{±1} = χ_{[-1,1]}`, `V_0 = 0`.
pub fn example10() -> CylinderPotential {
    let chi = ModeProfile::indicator(-1.0, 1.0, Complex64::new(1.0, 0.0)).expect("valid");
    let modes = BTreeMap::from([(-1, chi.clone()), (1, chi)]);
    CylinderPotential::new(modes, true).expect("valid builtin")
}

/// Smooth well `V_0 = -depth·b(x/a)` plus `V_{±1} = bumpscale·b(x/a)`, `a = 1.5`.
pub fn well_bump(depth: f64, bumpscale: f64) -> CylinderPotential {
    let a = WELL_BUMP_HALF_WIDTH;
    let mut modes = BTreeMap::new();
    let prof = |c: f64| {
        ModeProfile::from_fn(-a, a, WELL_BUMP_GRID, |x| {
            Complex64::new(c * smooth_bump(x / a), 0.0)
        })
        .expect("bump vanishes at the edges")
    };
    modes.insert(0, prof(-depth));
    modes.insert(-1, prof(bumpscale));
    modes.insert(1, prof(bumpscale));
    CylinderPotential::new(modes, true).expect("valid builtin")
}

/// θ-independent square well `V_0 = -depth` on `[-half_width, half_width]`.
pub fn square_well(depth: f64, half_width: f64) -> CylinderPotential {
    let p = ModeProfile::indicator(-half_width, half_width, Complex64::new(-depth, 0.0))
        .expect("valid interval");
    CylinderPotential::new(BTreeMap::from([(0, p)]), true).expect("valid builtin")
}

/// Builtin names accepted by [`builtin`].
pub const BUILTINS: &[&str] = &["example10", "well_bump", "zero", "square_well"];

/// Looks a builtin up by name; `params` supplies optional numeric parameters.
pub fn builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<CylinderPotential> {
    let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
    match name {
        "example10" => Ok(example10()),
        "well_bump" => Ok(well_bump(get("depth", 6.0), get("bumpscale", 1.0))),
        "zero" => Ok(CylinderPotential::zero()),
        "square_well" => Ok(square_well(get("depth", 4.0), get("half_width", 1.0))),
        other => Err(Error::Config(format!("unknown builtin potential `{other}`"))),
    }
}

// ---------------------------------------------------------------------------
// JSON document

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialDoc {
    pub support: [f64; 2],
    pub grid_n: usize,
    pub modes: Vec<ModeDoc>,
    pub real: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeDoc {
    pub m: i32,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Present for step modes: `re`/`im` then hold one value per cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breaks: Option<Vec<f64>>,
}

impl PotentialDoc {
    pub fn into_potential(self) -> Result<CylinderPotential> {
        let [a, b] = self.support;
        check_interval(a, b)?;
        let mut modes = BTreeMap::new();
        for md in self.modes {
            if md.re.len() != md.im.len() {
                return Err(Error::InvalidPotential(format!(
                    "mode {}: re and im lengths differ",
                    md.m
                )));
            }
            let vals: Vec<Complex64> = md
                .re
                .iter()
                .zip(&md.im)
                .map(|(r, i)| Complex64::new(*r, *i))
                .collect();
            let prof = match md.breaks {
                Some(br) => ModeProfile::step(br, vals)?,
                None => {
                    if vals.len() != self.grid_n + 1 {
                        return Err(Error::InvalidPotential(format!(
                            "mode {}: expected {} samples, got {}",
                            md.m,
                            self.grid_n + 1,
                            vals.len()
                        )));
                    }
                    ModeProfile::sampled(a, b, vals)?
                }
            };
            if prof.x_min < a - 1e-12 || prof.x_max > b + 1e-12 {
                return Err(Error::InvalidPotential(format!(
                    "mode {} leaves the declared support",
                    md.m
                )));
            }
            if modes.insert(md.m, prof).is_some() {
                return Err(Error::InvalidPotential(format!("duplicate mode {}", md.m)));
            }
        }
        CylinderPotential::new(modes, self.real)
    }

    pub fn from_potential(p: &CylinderPotential) -> Self {
        let (a, b) = p.support();
        let grid_n = p
            .modes()
            .values()
            .find(|m| !m.is_step())
            .map_or(0, |m| m.samples().len() - 1);
        let modes = p
            .modes()
            .iter()
            .map(|(m, prof)| match prof.step_data() {
                Some(d) => ModeDoc {
                    m: *m,
                    re: d.values.iter().map(|v| v.re).collect(),
                    im: d.values.iter().map(|v| v.im).collect(),
                    breaks: Some(d.breaks.clone()),
                },
                None => ModeDoc {
                    m: *m,
                    re: prof.samples().iter().map(|v| v.re).collect(),
                    im: prof.samples().iter().map(|v| v.im).collect(),
                    breaks: None,
                },
            })
            .collect();
        Self {
            support: [a, b],
            grid_n,
            modes,
            real: p.is_real(),
        }
    }
}

pub fn load_potential(path: &Path) -> Result<CylinderPotential> {
    let text = std::fs::read_to_string(path)?;
    let doc: PotentialDoc = serde_json::from_str(&text)?;
    doc.into_potential()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cosine_step_gives_indicator() {
        let s = AngularSamples::from_cells(vec![-1.0, 1.0], 16, |_, t| c(2.0 * t.cos()));
        let v1 = fourier_mode(&s, 1).unwrap();
        let d = v1.step_data().unwrap();
        assert_eq!(d.breaks, vec![-1.0, 1.0]);
        assert!((d.values[0] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn theta_independent_has_no_m1() {
        let s = AngularSamples::from_nodes(-1.0, 1.0, 32, 8, |x, _| c(1.0 - x * x));
        let v1 = fourier_mode(&s, 1).unwrap();
        assert!(v1.sup_norm() < 1e-15);
        let v0 = fourier_mode(&s, 0).unwrap();
        assert!((v0.eval(0.0) - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn coarse_theta_grid_rejected() {
        let s = AngularSamples::from_nodes(-1.0, 1.0, 4, 8, |_, _| c(0.0));
        assert!(matches!(
            fourier_mode(&s, 2),
            Err(Error::GridTooCoarse { required: 12, .. })
        ));
    }

    #[test]
    fn trig_polynomial_matches_dense_dft() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let coeffs: Vec<(i32, Complex64)> = (-3..=3)
            .map(|m| (m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let v = |x: f64, t: f64| -> Complex64 {
            let env = 1.0 - x * x;
            coeffs
                .iter()
                .map(|(m, a)| a * env * Complex64::from_polar(1.0, *m as f64 * t))
                .sum()
        };
        let coarse = AngularSamples::from_nodes(-1.0, 1.0, 8, 128, v);
        // reference: plain DFT on 256 points
        let reference = |x: f64, m: i32| -> Complex64 {
            (0..256)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / 256.0;
                    v(x, t) * Complex64::from_polar(1.0, -(m as f64) * t)
                })
                .sum::<Complex64>()
                / 256.0
        };
        for m in -3..=3 {
            let prof = fourier_mode(&coarse, m).unwrap();
            for (x, val) in prof.grid().iter().zip(prof.samples()) {
                assert!((val - reference(*x, m)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn average_matches_fourier_zero() {
        let s = AngularSamples::from_nodes(-1.0, 1.0, 64, 32, |x, t| {
            let env = smooth_bump(x);
            c(env * (3.0 + 2.0 * t.cos() + 0.5 * (2.0 * t).sin() - (3.0 * t).cos()))
        });
        let modes: BTreeMap<i32, ModeProfile> =
            (-3..=3).map(|m| (m, fourier_mode(&s, m).unwrap())).collect();
        let p = CylinderPotential::new(modes, true).unwrap();
        let direct = fourier_mode(&s, 0).unwrap();
        let v0 = p.average_v0();
        for (a, b) in v0.samples().iter().zip(direct.samples()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!((v0.eval(0.0) - c(3.0)).norm() < 1e-12);
    }

    #[test]
    fn average_of_example10_is_zero() {
        assert!(example10().average_v0().is_zero());
        let w = square_well(4.0, 1.0);
        assert_eq!(w.average_v0(), *w.mode(0).unwrap());
    }

    #[test]
    fn decay_exponent_single_pair_is_infinite() {
        let (d, _) = mode_decay_exponent(&example10());
        assert!(d.is_infinite());
    }

    #[test]
    fn decay_exponent_of_power_law() {
        let mut modes = BTreeMap::new();
        for m in 1..=6_i32 {
            let amp = (m as f64).powi(-2);
            let p = ModeProfile::indicator(-1.0, 1.0, c(amp)).unwrap();
            modes.insert(m, p.clone());
            modes.insert(-m, p);
        }
        let pot = CylinderPotential::new(modes, true).unwrap();
        let (d, cst) = mode_decay_exponent(&pot);
        assert!((d - 2.0).abs() < 1e-6, "{d}");
        assert!((cst - 1.0).abs() < 1e-6);
    }

    #[test]
    fn decay_exponent_of_smooth_potential_is_large() {
        // V(x, θ) = b(x) exp(cos θ / 2): modes decay like (1/4)^m / m!
        let s = AngularSamples::from_nodes(-1.0, 1.0, 32, 64, |x, t| {
            c(smooth_bump(x) * (0.5 * t.cos()).exp())
        });
        let modes = (-6..=6).map(|m| (m, fourier_mode(&s, m).unwrap())).collect();
        let pot = CylinderPotential::new(modes, true).unwrap();
        let (d, _) = mode_decay_exponent(&pot);
        assert!(d > 5.0, "{d}");
    }

    #[test]
    fn to_steps_of_indicator() {
        let chi = ModeProfile::indicator(-1.0, 1.0, c(1.0)).unwrap();
        let s = to_steps(&chi, 4).unwrap();
        let d = s.step_data().unwrap();
        assert_eq!(d.values.len(), 4);
        assert!(d.values.iter().all(|v| *v == c(1.0)));
    }

    #[test]
    fn to_steps_of_ramp_uses_midpoints() {
        // bypasses the vanishing-edge check: the ramp is only a midpoint-rule probe
        let lin = ModeProfile {
            x_min: 0.0,
            x_max: 2.0,
            samples: vec![c(0.0), c(1.0), c(2.0)],
            kind: ProfileKind::Sampled,
        };
        let s = to_steps(&lin, 2).unwrap();
        let d = s.step_data().unwrap();
        assert!((d.values[0] - c(0.5)).norm() < 1e-15);
        assert!((d.values[1] - c(1.5)).norm() < 1e-15);
    }

    #[test]
    fn to_steps_l1_error_halves() {
        // exact L¹ norm of the step error against a fine quadrature of the bump
        let p = ModeProfile::from_fn(-1.0, 1.0, 4096, |x| c(smooth_bump(x))).unwrap();
        let l1_err = |n: usize| {
            let s = to_steps(&p, n).unwrap();
            let fine = 200_000;
            let h = 2.0 / fine as f64;
            (0..fine)
                .map(|i| {
                    let x = -1.0 + (i as f64 + 0.5) * h;
                    (s.eval(x) - c(smooth_bump(x))).norm() * h
                })
                .sum::<f64>()
        };
        let e1 = l1_err(32);
        let e2 = l1_err(64);
        let ratio = e1 / e2;
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn sampled_profile_must_vanish_at_edges() {
        let err = ModeProfile::sampled(0.0, 1.0, vec![c(1.0), c(1.0)]);
        assert!(err.is_err());
        assert!(ModeProfile::step(vec![0.0, 0.0], vec![c(1.0)]).is_err());
    }

    #[test]
    fn realness_checked() {
        let p = ModeProfile::indicator(-1.0, 1.0, Complex64::new(1.0, 1.0)).unwrap();
        let bad = BTreeMap::from([(1, p.clone()), (-1, p.clone())]);
        assert!(CylinderPotential::new(bad, true).is_err());
        let good = BTreeMap::from([(1, p.clone()), (-1, p.conj())]);
        assert!(CylinderPotential::new(good, true).is_ok());
    }

    #[test]
    fn slab_grid_merges_and_keeps_shared_steps() {
        let g = example10().slab_grid(256).unwrap();
        assert_eq!(g.n_slabs(), 1);
        assert_eq!(g.value(1, 0), c(1.0));
        assert_eq!(g.value(0, 0), c(0.0));
        let w = well_bump(6.0, 1.0).slab_grid(256).unwrap();
        // the two central midpoints coincide by symmetry
        assert_eq!(w.n_slabs(), 255);
    }

    #[test]
    fn json_round_trip() {
        let p = well_bump(6.0, 1.0);
        let doc = PotentialDoc::from_potential(&p);
        let text = serde_json::to_string(&doc).unwrap();
        let back: PotentialDoc = serde_json::from_str(&text).unwrap();
        let q = back.into_potential().unwrap();
        assert_eq!(q.modes(), p.modes());
        let e = example10();
        let q = PotentialDoc::from_potential(&e).into_potential().unwrap();
        assert_eq!(q.modes(), e.modes());
    }
}
