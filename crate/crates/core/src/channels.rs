//! Direct cylinder solver: the coupled-channel matching determinant.
//!
//! Near threshold `l` the angular modes `k = l-K, …, l+K` obey
//! `-u_k'' + Σ_m V_m u_{k-m} = τ_k² u_k`. A matrix solution `Y` starting outgoing
//! to the left, `Y(x₀) = [I; diag(-iτ)]`, is carried across the support, and
//!
//! `D(z) = det(diag(iτ) Y(x₁) - Y'(x₁)) · Π_k e^{iτ_k (x₁ - x₀)}`
//!
//! vanishes exactly when a solution outgoing in every retained channel exists.
//! Without coupling, `D = Π_k W(τ_k)` with `W` the one-dimensional Wronskian.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{XMatrix, Xc, Xf};
use crate::potential::{CylinderPotential, SlabGrid};
use crate::scatter1d::slab_matrix;
use crate::surface::{chart_radius, tau_at, tau_reflected, SurfacePoint};
use crate::zeros::{locate_zeros, ZeroOptions};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Entries beyond this magnitude trip the overflow guard.
const OVERFLOW_LIMIT: f64 = 1e250;
/// Eigenvector bases worse conditioned than this use the matrix exponential.
const MAX_BASIS_COND: f64 = 1e8;

/// Environment variable selecting the determinant precision.
pub const PRECISION_ENV: &str = "CYLRES_PRECISION";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    Extended,
}

impl Precision {
    /// `Extended` when `CYLRES_PRECISION=extended`, else `Double`.
    pub fn from_env() -> Self {
        match std::env::var(PRECISION_ENV) {
            Ok(v) if v.eq_ignore_ascii_case("extended") => Self::Extended,
            _ => Self::Double,
        }
    }
}

/// Channels adjacent to `+l` or to `-l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tower {
    Plus,
    Minus,
}

/// Branch choice for the open channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    /// `Re τ_k > 0` for `k < l`.
    Chart,
    /// `Re τ_k < 0` for `k < l`: the chart image of `ζ ↦ -ζ̄`.
    Reflected,
}

/// Truncation `k = l-K, …, l+K` plus the slab count used for sampled profiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelWindow {
    pub l: u32,
    pub k: u32,
    pub slabs: usize,
}

impl ChannelWindow {
    pub fn new(l: u32, k: u32, slabs: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidWindow("K must be at least 1".into()));
        }
        if l < k {
            return Err(Error::InvalidWindow(format!("l = {l} must be at least K = {k}")));
        }
        if slabs == 0 {
            return Err(Error::InvalidWindow("slab count must be positive".into()));
        }
        Ok(Self { l, k, slabs })
    }

    pub fn n(&self) -> usize {
        2 * self.k as usize + 1
    }

    /// Channel indices `l-K, …, l+K`.
    pub fn channels(&self) -> Vec<u32> {
        (self.l - self.k..=self.l + self.k).collect()
    }
}

/// `C[i][j] = V_{k_i - k_j}` on one slab (`V_{k_j - k_i}` for the minus tower).
pub fn coupling_matrix(grid: &SlabGrid, window: &ChannelWindow, tower: Tower, slab: usize) -> Result<DMatrix<Complex64>> {
    if slab >= grid.n_slabs() {
        return Err(Error::SlabMismatch);
    }
    let ch = window.channels();
    let n = ch.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let d = ch[i] as i32 - ch[j] as i32;
        let m = match tower {
            Tower::Plus => d,
            Tower::Minus => -d,
        };
        grid.value(m, slab)
    }))
}

/// `τ_k(z)` for the window channels on the chosen sheet.
pub fn window_taus(window: &ChannelWindow, z: Complex64, sheet: Sheet) -> Vec<Complex64> {
    window
        .channels()
        .into_iter()
        .map(|k| match sheet {
            Sheet::Chart => tau_at(window.l, z, k),
            Sheet::Reflected => tau_reflected(window.l, z, k),
        })
        .collect()
}

#[derive(Clone, Debug)]
enum SlabKind {
    /// `B = S diag(μ) S⁻¹` with `B = C - diag(l² - k²)`, so `A = B - z²`.
    Eigen { mu: Vec<Complex64> },
    /// Propagated by the matrix exponential of the first-order generator.
    Exponential,
}

#[derive(Clone, Debug)]
struct PreparedSlab {
    width: f64,
    coupling: DMatrix<Complex64>,
    kind: SlabKind,
    /// Maps coordinates of the previous slab's basis into this slab's basis.
    enter: Option<DMatrix<Complex64>>,
}

/// Matching determinant of one tower with z-independent slab data precomputed.
#[derive(Clone, Debug)]
pub struct ChannelSystem {
    window: ChannelWindow,
    tower: Tower,
    x0: f64,
    x1: f64,
    shifts: Vec<f64>,
    slabs: Vec<PreparedSlab>,
    /// Basis of the last slab, to return to channel coordinates.
    exit: Option<DMatrix<Complex64>>,
    precision: Precision,
}

impl ChannelSystem {
    /// Precision is taken from the environment.
    pub fn new(p: &CylinderPotential, window: &ChannelWindow, tower: Tower) -> Result<Self> {
        Self::with_precision(p, window, tower, Precision::from_env())
    }

    pub fn with_precision(
        p: &CylinderPotential,
        window: &ChannelWindow,
        tower: Tower,
        precision: Precision,
    ) -> Result<Self> {
        Self::build(p, window, tower, precision, true)
    }

    fn build(
        p: &CylinderPotential,
        window: &ChannelWindow,
        tower: Tower,
        precision: Precision,
        allow_eigen: bool,
    ) -> Result<Self> {
        let grid = p.slab_grid(window.slabs)?;
        let l2 = (window.l as f64).powi(2);
        let shifts: Vec<f64> = window.channels().iter().map(|&k| l2 - (k as f64).powi(2)).collect();
        let hermitian = p.is_real();
        let mut slabs = Vec::with_capacity(grid.n_slabs());
        let mut prev_basis: Option<DMatrix<Complex64>> = None;
        for j in 0..grid.n_slabs() {
            let coupling = coupling_matrix(&grid, window, tower, j)?;
            let b = &coupling - DMatrix::from_diagonal(&DVector::from_iterator(
                shifts.len(),
                shifts.iter().map(|s| Complex64::new(*s, 0.0)),
            ));
            let (kind, basis) = match decompose(&b, hermitian).filter(|_| allow_eigen) {
                Some((mu, s, s_inv)) => (SlabKind::Eigen { mu }, Some((s, s_inv))),
                None => (SlabKind::Exponential, None),
            };
            let enter = match (&basis, &prev_basis) {
                (Some((_, s_inv)), Some(prev)) => Some(s_inv * prev),
                (Some((_, s_inv)), None) => Some(s_inv.clone()),
                (None, Some(prev)) => Some(prev.clone()),
                (None, None) => None,
            };
            prev_basis = basis.map(|(s, _)| s);
            slabs.push(PreparedSlab {
                width: grid.width(j),
                coupling,
                kind,
                enter,
            });
        }
        Ok(Self {
            window: *window,
            tower,
            x0: grid.x_min(),
            x1: grid.x_max(),
            shifts,
            slabs,
            exit: prev_basis,
            precision,
        })
    }

    pub fn window(&self) -> &ChannelWindow {
        &self.window
    }

    pub fn tower(&self) -> Tower {
        self.tower
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn set_precision(&mut self, precision: Precision) {
        self.precision = precision;
    }

    /// Number of slabs propagated through the exponential fallback.
    pub fn fallback_slabs(&self) -> usize {
        self.slabs
            .iter()
            .filter(|s| matches!(s.kind, SlabKind::Exponential))
            .count()
    }

    fn check_chart(&self, z: Complex64) -> Result<()> {
        SurfacePoint::new(self.window.l, z).map(|_| ())
    }

    /// `D(z)` on the chart sheet.
    pub fn determinant(&self, z: Complex64) -> Result<Complex64> {
        self.determinant_on(z, Sheet::Chart)
    }

    pub fn determinant_on(&self, z: Complex64, sheet: Sheet) -> Result<Complex64> {
        self.check_chart(z)?;
        match self.precision {
            Precision::Double => self.det_double(z, sheet),
            Precision::Extended => self.det_extended(z, sheet),
        }
    }

    /// `D(z)` with non-finite output on failure, for the zero engine.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.determinant(z)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }

    fn det_double(&self, z: Complex64, sheet: Sheet) -> Result<Complex64> {
        let n = self.window.n();
        let taus = window_taus(&self.window, z, sheet);
        let z2 = z * z;
        let mut u = DMatrix::<Complex64>::identity(n, n);
        let mut up = DMatrix::<Complex64>::from_diagonal(&DVector::from_iterator(n, taus.iter().map(|t| -I * t)));
        for slab in &self.slabs {
            if let Some(e) = &slab.enter {
                u = e * &u;
                up = e * &up;
            }
            match &slab.kind {
                SlabKind::Eigen { mu } => {
                    for (i, m) in mu.iter().enumerate() {
                        let t = slab_matrix(z2 - m, slab.width);
                        for j in 0..n {
                            let (a, b) = (u[(i, j)], up[(i, j)]);
                            u[(i, j)] = t[0][0] * a + t[0][1] * b;
                            up[(i, j)] = t[1][0] * a + t[1][1] * b;
                        }
                    }
                }
                SlabKind::Exponential => {
                    let mut a = slab.coupling.clone();
                    for i in 0..n {
                        a[(i, i)] -= z2 + self.shifts[i];
                    }
                    let mut g = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
                    for i in 0..n {
                        g[(i, n + i)] = Complex64::new(slab.width, 0.0);
                    }
                    g.view_mut((n, 0), (n, n)).copy_from(&(a * Complex64::new(slab.width, 0.0)));
                    let e = g.exp();
                    let mut y = DMatrix::<Complex64>::zeros(2 * n, n);
                    y.view_mut((0, 0), (n, n)).copy_from(&u);
                    y.view_mut((n, 0), (n, n)).copy_from(&up);
                    let y = e * y;
                    u = y.view((0, 0), (n, n)).into_owned();
                    up = y.view((n, 0), (n, n)).into_owned();
                }
            }
            let big = u.iter().chain(up.iter()).map(|v| v.norm()).fold(0.0, f64::max);
            if !big.is_finite() || big > OVERFLOW_LIMIT {
                return Err(Error::Overflow(z));
            }
        }
        if let Some(s) = &self.exit {
            u = s * &u;
            up = s * &up;
        }
        let len = self.x1 - self.x0;
        let mut x = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                x[(i, j)] = (I * taus[i] * u[(i, j)] - up[(i, j)]) * (I * taus[j] * len).exp();
            }
        }
        let d = x.determinant();
        if !(d.re.is_finite() && d.im.is_finite()) {
            return Err(Error::Overflow(z));
        }
        Ok(d)
    }

    fn det_extended(&self, z: Complex64, sheet: Sheet) -> Result<Complex64> {
        let n = self.window.n();
        let l = self.window.l;
        let zx = Xc::from_c64(z);
        let z2 = zx.mul(&zx);
        let taus: Vec<Xc> = self
            .window
            .channels()
            .into_iter()
            .zip(&self.shifts)
            .map(|(k, s)| {
                let w = z2.add(&Xc::real(*s));
                let t = if k < l {
                    w.sqrt()
                } else if k > l {
                    Xc::i().mul(&w.neg().sqrt())
                } else {
                    zx.clone()
                };
                if sheet == Sheet::Reflected && k < l {
                    t.neg()
                } else {
                    t
                }
            })
            .collect();
        let mut y = XMatrix::zeros(2 * n, n);
        for i in 0..n {
            y.set(i, i, Xc::one());
            y.set(n + i, i, Xc::i().mul(&taus[i]).neg());
        }
        for slab in &self.slabs {
            let w = Xf::from_f64(slab.width);
            let mut g = XMatrix::zeros(2 * n, 2 * n);
            for i in 0..n {
                g.set(i, n + i, Xc::new(w.clone(), Xf::zero()));
                for j in 0..n {
                    let mut a = Xc::from_c64(slab.coupling[(i, j)]);
                    if i == j {
                        a = a.sub(&z2).sub(&Xc::real(self.shifts[i]));
                    }
                    g.set(n + i, j, a.scale(&w));
                }
            }
            y = g.exp().mul(&y);
        }
        let len = Xf::from_f64(self.x1 - self.x0);
        let mut x = XMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let scale = Xc::i().mul(&taus[j]).scale(&len).exp();
                let v = Xc::i().mul(&taus[i]).mul(y.get(i, j)).sub(y.get(n + i, j)).mul(&scale);
                x.set(i, j, v);
            }
        }
        let d = x.det().to_c64();
        if !(d.re.is_finite() && d.im.is_finite()) {
            return Err(Error::Overflow(z));
        }
        Ok(d)
    }
}

/// Eigendecomposition `B = S diag(μ) S⁻¹`, or `None` when the basis is too
/// ill-conditioned to use.
fn decompose(b: &DMatrix<Complex64>, hermitian: bool) -> Option<(Vec<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = b.nrows();
    if is_diagonal(b) {
        let mu = (0..n).map(|i| b[(i, i)]).collect();
        let id = DMatrix::identity(n, n);
        return Some((mu, id.clone(), id));
    }
    if hermitian {
        if let Some(found) = hermitian_eigen(b) {
            return Some(found);
        }
    }
    let (q, t) = nalgebra::linalg::Schur::new(b.clone()).unpack();
    let scale = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let mut v = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let lam = t[(i, i)];
        v[(i, i)] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut acc = ZERO;
            for k in j + 1..=i {
                acc += t[(j, k)] * v[(k, i)];
            }
            let d = t[(j, j)] - lam;
            if d.norm() < 1e-10 * scale {
                return None;
            }
            v[(j, i)] = -acc / d;
        }
        let norm = v.column(i).norm();
        v.column_mut(i).unscale_mut(norm);
    }
    let s = q * v;
    let s_inv = s.clone().try_inverse()?;
    let cond = s.norm() * s_inv.norm();
    if !(cond < MAX_BASIS_COND) {
        return None;
    }
    let mu = (0..n).map(|i| t[(i, i)]).collect();
    Some((mu, s, s_inv))
}

/// Hermitian eigenpairs, checked. The solver's value order can disagree with
/// its vector order on nearly diagonal input, so each vector takes the value
/// closest to its Rayleigh quotient.
fn hermitian_eigen(b: &DMatrix<Complex64>) -> Option<(Vec<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = b.nrows();
    let eig = b.clone().symmetric_eigen();
    let s = eig.eigenvectors;
    let s_inv = s.adjoint();
    let d = &s_inv * b * &s;
    let scale = b.norm().max(1.0);
    let mut free: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut mu = Vec::with_capacity(n);
    for i in 0..n {
        let rq = d[(i, i)].re;
        let (at, val) = free
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| (a.1 - rq).abs().total_cmp(&(b.1 - rq).abs()))?;
        if (val - rq).abs() > 1e-12 * scale {
            return None;
        }
        free.swap_remove(at);
        mu.push(Complex64::new(val, 0.0));
    }
    let off = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| d[(i, j)].norm())
        .fold(0.0, f64::max);
    (off <= 1e-12 * scale).then_some((mu, s, s_inv))
}

fn is_diagonal(b: &DMatrix<Complex64>) -> bool {
    let n = b.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || b[(i, j)] == ZERO))
}

/// `D` at a single surface point (builds the plus-tower system each call).
pub fn matching_determinant(p: &CylinderPotential, point: &SurfacePoint, window: &ChannelWindow) -> Result<Complex64> {
    if point.l != window.l {
        return Err(Error::ChartMismatch(point.l, window.l));
    }
    ChannelSystem::new(p, window, Tower::Plus)?.determinant(point.z)
}

/// How a reported location was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    Predicted0th,
    PredictedCorrected,
    ExampleClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Predicted0th => "predicted-0th",
            Method::PredictedCorrected => "predicted-corrected",
            Method::ExampleClosedForm => "example-closed-form",
        })
    }
}

/// A resonance located in a threshold chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceHit {
    pub point: SurfacePoint,
    pub multiplicity: u32,
    /// 2 when one tower stands for both (real potentials), else 1.
    pub tower_factor: u32,
    pub tower: Tower,
    pub method: Method,
    /// `|D|` at the hit relative to the search cell scale.
    pub residual: f64,
    pub k: u32,
    pub slabs: usize,
    /// The hit sits at the threshold `z = 0`, where the winding of `D` is
    /// reported but not identified with the resolvent multiplicity.
    pub threshold: bool,
}

impl ResonanceHit {
    pub fn z(&self) -> Complex64 {
        self.point.z
    }

    /// Multiplicity counted over both towers.
    pub fn total_multiplicity(&self) -> u32 {
        self.multiplicity * self.tower_factor
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResonanceSearch {
    pub hits: Vec<ResonanceHit>,
    /// Winding per tower searched.
    pub windings: Vec<(Tower, i64)>,
    pub complete: bool,
    pub evaluations: usize,
}

impl ResonanceSearch {
    /// Resonances in the region counted with multiplicity over both towers.
    pub fn total_count(&self) -> u32 {
        self.hits.iter().map(ResonanceHit::total_multiplicity).sum()
    }
}

fn check_search_rect(l: u32, lo: Complex64, hi: Complex64) -> Result<()> {
    let r = chart_radius(l);
    for c in [lo, hi, Complex64::new(lo.re, hi.im), Complex64::new(hi.re, lo.im)] {
        SurfacePoint::new(l, c).map_err(|_| {
            Error::InvalidRegion(format!("search rectangle leaves the chart |z| < {r:.6}"))
        })?;
    }
    Ok(())
}

/// Zeros of `D` in the rectangle `[lo, hi]` of the chart around `window.l`.
///
/// Real potentials use the plus tower with tower factor 2; otherwise both
/// towers are searched.
pub fn find_cylinder_resonances(
    p: &CylinderPotential,
    window: &ChannelWindow,
    lo: Complex64,
    hi: Complex64,
    opts: &ZeroOptions,
) -> Result<ResonanceSearch> {
    check_search_rect(window.l, lo, hi)?;
    let towers: &[Tower] = if p.is_real() { &[Tower::Plus] } else { &[Tower::Plus, Tower::Minus] };
    let factor = if p.is_real() { 2 } else { 1 };
    let mut out = ResonanceSearch {
        hits: Vec::new(),
        windings: Vec::new(),
        complete: true,
        evaluations: 0,
    };
    for &tower in towers {
        let sys = ChannelSystem::new(p, window, tower)?;
        let f = |z: Complex64| sys.eval(z);
        let rep = locate_zeros(&f, lo, hi, opts).map_err(|e| match e {
            Error::NonFinite(z) => match sys.determinant(z) {
                Err(inner) => inner,
                Ok(_) => Error::NonFinite(z),
            },
            other => other,
        })?;
        out.windings.push((tower, rep.total_winding));
        out.complete &= rep.complete;
        out.evaluations += rep.evaluations;
        for zr in rep.zeros {
            out.hits.push(ResonanceHit {
                point: SurfacePoint::new(window.l, zr.location)?,
                multiplicity: zr.multiplicity,
                tower_factor: factor,
                tower,
                method: Method::Direct,
                residual: zr.residual,
                k: window.k,
                slabs: window.slabs,
                threshold: zr.location.norm() <= 10.0 * opts.tol,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncationRow {
    pub k: u32,
    pub slabs: usize,
    pub zeros: Vec<Complex64>,
    /// Largest distance to the nearest zero of the previous row in the same sweep.
    pub change: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncationTable {
    /// K sweep at the largest slab count, then slab sweep at the largest K.
    pub k_sweep: Vec<TruncationRow>,
    pub slab_sweep: Vec<TruncationRow>,
    /// Successive changes decrease along both sweeps.
    pub monotone: bool,
    /// `-log10` of the last change when monotone.
    pub converged_digits: Option<f64>,
}

fn sweep_changes(rows: &mut [TruncationRow]) {
    for i in 1..rows.len() {
        let (prev, cur) = rows.split_at_mut(i);
        let prev = &prev[i - 1];
        let row = &mut cur[0];
        row.change = if prev.zeros.len() != row.zeros.len() {
            Some(f64::INFINITY)
        } else {
            Some(
                row.zeros
                    .iter()
                    .map(|z| prev.zeros.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min))
                    .fold(0.0, f64::max),
            )
        };
    }
}

fn non_increasing(rows: &[TruncationRow]) -> bool {
    let ch: Vec<f64> = rows.iter().filter_map(|r| r.change).collect();
    ch.windows(2).all(|w| w[1] <= w[0])
}

/// Self-convergence of the zeros in `[lo, hi]` under `K` and slab refinement.
pub fn truncation_study(
    p: &CylinderPotential,
    l: u32,
    lo: Complex64,
    hi: Complex64,
    k_list: &[u32],
    slab_list: &[usize],
    opts: &ZeroOptions,
) -> Result<TruncationTable> {
    if k_list.len() < 2 || slab_list.len() < 2 {
        return Err(Error::InvalidWindow("need at least two K values and two slab counts".into()));
    }
    let k_max = *k_list.iter().max().unwrap();
    let s_max = *slab_list.iter().max().unwrap();
    let run = |k: u32, slabs: usize| -> Result<TruncationRow> {
        let w = ChannelWindow::new(l, k, slabs)?;
        let sys = ChannelSystem::new(p, &w, Tower::Plus)?;
        let f = |z: Complex64| sys.eval(z);
        let rep = locate_zeros(&f, lo, hi, opts)?;
        Ok(TruncationRow {
            k,
            slabs,
            zeros: rep.zeros.iter().map(|z| z.location).collect(),
            change: None,
        })
    };
    let mut k_sweep = k_list.iter().map(|&k| run(k, s_max)).collect::<Result<Vec<_>>>()?;
    let mut slab_sweep = slab_list.iter().map(|&s| run(k_max, s)).collect::<Result<Vec<_>>>()?;
    sweep_changes(&mut k_sweep);
    sweep_changes(&mut slab_sweep);
    let monotone = non_increasing(&k_sweep) && non_increasing(&slab_sweep);
    let last = k_sweep
        .last()
        .and_then(|r| r.change)
        .into_iter()
        .chain(slab_sweep.last().and_then(|r| r.change))
        .fold(0.0, f64::max);
    let converged_digits = (monotone && last > 0.0 && last.is_finite()).then(|| -last.log10());
    Ok(TruncationTable {
        k_sweep,
        slab_sweep,
        monotone,
        converged_digits,
    })
}
