//! Zeros of analytic functions by the argument principle.
//!
//! Winding numbers come from phase continuation along the contour with
//! adaptive bisection (no derivatives). Zeros are isolated by quadtree
//! subdivision of a rectangle and polished by Newton's method with a
//! central-difference derivative, falling back to Muller's method.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed contours understood by [`winding_count`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Contour {
    /// Axis-aligned rectangle with corners `lo` (bottom-left) and `hi` (top-right).
    Rect { lo: Complex64, hi: Complex64 },
    Circle { center: Complex64, radius: f64 },
}

impl Contour {
    pub fn rect(lo: Complex64, hi: Complex64) -> Self {
        Self::Rect { lo, hi }
    }

    pub fn circle(center: Complex64, radius: f64) -> Self {
        Self::Circle { center, radius }
    }

    /// Square of half-side `r` around `c`.
    pub fn square(c: Complex64, r: f64) -> Self {
        let d = Complex64::new(r, r);
        Self::Rect { lo: c - d, hi: c + d }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Self::Rect { lo, hi } => z.re > lo.re && z.re < hi.re && z.im > lo.im && z.im < hi.im,
            Self::Circle { center, radius } => (z - center).norm() < radius,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Rect { lo, hi } => lo.re < hi.re && lo.im < hi.im,
            Self::Circle { radius, .. } => radius > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRegion(format!("degenerate contour {self:?}")))
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroOptions {
    /// Initial samples per rectangle edge (four times this on a circle).
    pub min_points: usize,
    /// Maximum bisection depth on a single contour segment.
    pub max_depth: usize,
    /// Largest accepted phase increment between consecutive samples.
    pub max_phase_step: f64,
    /// Location tolerance for zeros.
    pub tol: f64,
    /// Quadtree cell budget.
    pub max_cells: usize,
    pub max_newton: usize,
    /// Contour perturbation attempts when a zero sits on the contour.
    pub perturb_attempts: usize,
    pub seed: u64,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        Self {
            min_points: 32,
            max_depth: 24,
            max_phase_step: FRAC_PI_2,
            tol: 1e-10,
            max_cells: 4096,
            max_newton: 60,
            perturb_attempts: 5,
            seed: 0x5eed,
        }
    }
}

impl ZeroOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// One located zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub location: Complex64,
    pub multiplicity: u32,
    /// `|f(z)|` relative to the largest `|f|` at the corners of the enclosing cell.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroReport {
    pub zeros: Vec<Zero>,
    /// Winding number of the outer contour.
    pub total_winding: i64,
    pub depth: usize,
    pub evaluations: usize,
    /// False when the budget ran out or multiplicities do not add up.
    pub complete: bool,
    /// The contour actually used (after perturbation, if any).
    pub contour: Contour,
}

impl ZeroReport {
    pub fn multiplicity_sum(&self) -> i64 {
        self.zeros.iter().map(|z| z.multiplicity as i64).sum()
    }
}

fn key(z: Complex64) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

/// Memoizing evaluator shared across contour segments and quadtree cells.
struct Evaluator<'a, F> {
    f: &'a F,
    cache: Mutex<HashMap<(u64, u64), Complex64>>,
    count: AtomicUsize,
}

impl<'a, F> Evaluator<'a, F>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn new(f: &'a F) -> Self {
        Self {
            f,
            cache: Mutex::new(HashMap::new()),
            count: AtomicUsize::new(0),
        }
    }

    fn eval(&self, z: Complex64) -> Result<Complex64> {
        if let Some(v) = self.cache.lock().unwrap().get(&key(z)) {
            return Ok(*v);
        }
        let v = (self.f)(z);
        self.count.fetch_add(1, Ordering::Relaxed);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(z));
        }
        self.cache.lock().unwrap().insert(key(z), v);
        Ok(v)
    }

    fn evals(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }

    /// Phase change of `f` along a path `t ↦ path(t)`, `t ∈ [t0, t1]`.
    fn path_phase(
        &self,
        path: &(dyn Fn(f64) -> Complex64 + Sync),
        t0: f64,
        t1: f64,
        opts: &ZeroOptions,
        n0: usize,
    ) -> Result<f64> {
        let ts: Vec<f64> = (0..=n0)
            .map(|i| if i == n0 { t1 } else { t0 + (t1 - t0) * i as f64 / n0 as f64 })
            .collect();
        let vals: Vec<Complex64> = ts
            .par_iter()
            .map(|t| self.eval(path(*t)))
            .collect::<Result<_>>()?;
        let parts: Vec<f64> = (0..n0)
            .into_par_iter()
            .map(|i| self.segment_phase(path, ts[i], ts[i + 1], vals[i], vals[i + 1], opts, 0))
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum())
    }

    #[allow(clippy::too_many_arguments)]
    fn segment_phase(
        &self,
        path: &(dyn Fn(f64) -> Complex64 + Sync),
        ta: f64,
        tb: f64,
        fa: Complex64,
        fb: Complex64,
        opts: &ZeroOptions,
        depth: usize,
    ) -> Result<f64> {
        if fa == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroOnContour(path(ta)));
        }
        let d = (fb / fa).arg();
        if d.abs() < opts.max_phase_step {
            return Ok(d);
        }
        let tm = 0.5 * (ta + tb);
        if depth >= opts.max_depth || tm == ta || tm == tb {
            return Err(Error::ZeroOnContour(path(tm)));
        }
        let fm = self.eval(path(tm))?;
        let left = self.segment_phase(path, ta, tm, fa, fm, opts, depth + 1)?;
        let right = self.segment_phase(path, tm, tb, fm, fb, opts, depth + 1)?;
        Ok(left + right)
    }

    /// Phase change along the straight segment `a → b`, computed in a canonical
    /// direction so that shared quadtree edges give identical results.
    fn edge_phase(&self, a: Complex64, b: Complex64, opts: &ZeroOptions) -> Result<f64> {
        let flip = (a.re, a.im) > (b.re, b.im);
        let (p, q) = if flip { (b, a) } else { (a, b) };
        let path = move |t: f64| {
            if t == 0.0 {
                p
            } else if t == 1.0 {
                q
            } else {
                p + (q - p) * t
            }
        };
        let phase = self.path_phase(&path, 0.0, 1.0, opts, opts.min_points)?;
        Ok(if flip { -phase } else { phase })
    }

    fn winding(&self, c: &Contour, opts: &ZeroOptions) -> Result<i64> {
        let total = match *c {
            Contour::Rect { lo, hi } => {
                let corners = [
                    lo,
                    Complex64::new(hi.re, lo.im),
                    hi,
                    Complex64::new(lo.re, hi.im),
                ];
                let mut sum = 0.0;
                for i in 0..4 {
                    sum += self.edge_phase(corners[i], corners[(i + 1) % 4], opts)?;
                }
                sum
            }
            Contour::Circle { center, radius } => {
                let path = move |t: f64| center + Complex64::from_polar(radius, 2.0 * PI * t);
                let n0 = 4 * opts.min_points;
                // close the loop on the exact starting point
                let phase = self.path_phase(&path, 0.0, 1.0 - 1.0 / n0 as f64, opts, n0 - 1)?;
                let last = path(1.0 - 1.0 / n0 as f64);
                let fl = self.eval(last)?;
                let f0 = self.eval(path(0.0))?;
                let closing = self.segment_phase(&path, 1.0 - 1.0 / n0 as f64, 1.0, fl, f0, opts, 0)?;
                phase + closing
            }
        };
        let w = total / (2.0 * PI);
        let rounded = w.round();
        if (w - rounded).abs() > 1e-6 {
            return Err(Error::ZeroOnContour(match *c {
                Contour::Rect { lo, .. } => lo,
                Contour::Circle { center, .. } => center,
            }));
        }
        Ok(rounded as i64)
    }
}

/// Winding number of `f` around `contour`, i.e. the number of zeros inside
/// counted with multiplicity (for analytic `f`).
pub fn winding_count<F>(f: &F, contour: &Contour, opts: &ZeroOptions) -> Result<i64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    contour.validate()?;
    Evaluator::new(f).winding(contour, opts)
}

/// Zero count in the annulus `r_in < |z - c| < r_out`.
pub fn annulus_count<F>(f: &F, c: Complex64, r_in: f64, r_out: f64, opts: &ZeroOptions) -> Result<i64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    if !(r_in < r_out) {
        return Err(Error::InvalidRegion("annulus radii out of order".into()));
    }
    let ev = Evaluator::new(f);
    let outer = ev.winding(&Contour::circle(c, r_out), opts)?;
    let inner = ev.winding(&Contour::circle(c, r_in), opts)?;
    Ok(outer - inner)
}

/// Winding with pseudo-random contour perturbations when the first attempt
/// runs into a zero on the contour. Returns the count and the contour used.
pub fn winding_count_perturbed<F>(f: &F, contour: &Contour, opts: &ZeroOptions) -> Result<(i64, Contour)>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    contour.validate()?;
    let ev = Evaluator::new(f);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut current = *contour;
    let mut last_err = None;
    for _ in 0..=opts.perturb_attempts {
        match ev.winding(&current, opts) {
            Ok(w) => return Ok((w, current)),
            Err(e @ Error::ZeroOnContour(_)) => {
                last_err = Some(e);
                current = perturb(contour, &mut rng);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

fn perturb(c: &Contour, rng: &mut ChaCha8Rng) -> Contour {
    let mut jitter = |scale: f64| scale * 1e-3 * rng.gen_range(-1.0..1.0);
    match *c {
        Contour::Rect { lo, hi } => {
            let s = (hi - lo).norm();
            Contour::Rect {
                lo: lo + Complex64::new(jitter(s), jitter(s)),
                hi: hi + Complex64::new(jitter(s), jitter(s)),
            }
        }
        Contour::Circle { center, radius } => Contour::Circle {
            center,
            radius: radius + jitter(radius),
        },
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    lo: Complex64,
    hi: Complex64,
    winding: i64,
    depth: usize,
}

impl Cell {
    fn center(&self) -> Complex64 {
        (self.lo + self.hi) * 0.5
    }

    fn diameter(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    /// Inside the closed cell up to an absolute slack `eps`.
    fn contains_within(&self, z: Complex64, eps: f64) -> bool {
        z.re >= self.lo.re - eps && z.re <= self.hi.re + eps && z.im >= self.lo.im - eps && z.im <= self.hi.im + eps
    }

    fn contains_with_margin(&self, z: Complex64, frac: f64) -> bool {
        let d = self.hi - self.lo;
        z.re >= self.lo.re - frac * d.re
            && z.re <= self.hi.re + frac * d.re
            && z.im >= self.lo.im - frac * d.im
            && z.im <= self.hi.im + frac * d.im
    }
}

enum CellOutcome {
    Done(Option<Zero>),
    Split(Vec<Cell>),
}

/// All zeros of `f` inside the rectangle `[lo, hi]`, with multiplicities.
pub fn locate_zeros<F>(f: &F, lo: Complex64, hi: Complex64, opts: &ZeroOptions) -> Result<ZeroReport>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let outer = Contour::rect(lo, hi);
    outer.validate()?;
    let ev = Evaluator::new(f);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut contour = outer;
    let mut total = None;
    let mut last_err = None;
    for _ in 0..=opts.perturb_attempts {
        match ev.winding(&contour, opts) {
            Ok(w) => {
                total = Some(w);
                break;
            }
            Err(e @ Error::ZeroOnContour(_)) => {
                last_err = Some(e);
                contour = perturb(&outer, &mut rng);
            }
            Err(e) => return Err(e),
        }
    }
    let total = match total {
        Some(w) => w,
        None => return Err(last_err.unwrap()),
    };
    let (lo, hi) = match contour {
        Contour::Rect { lo, hi } => (lo, hi),
        Contour::Circle { .. } => unreachable!(),
    };

    let mut zeros = Vec::new();
    let mut complete = true;
    let mut max_depth = 0;
    let mut cells_used = 1usize;
    let mut queue = vec![Cell {
        lo,
        hi,
        winding: total,
        depth: 0,
    }];
    while !queue.is_empty() {
        let mut next = Vec::new();
        for cell in queue {
            max_depth = max_depth.max(cell.depth);
            if cell.winding <= 0 {
                if cell.winding < 0 {
                    complete = false;
                }
                continue;
            }
            if cells_used >= opts.max_cells {
                complete = false;
                continue;
            }
            match process_cell(&ev, &cell, opts, &mut rng)? {
                CellOutcome::Done(Some(z)) => zeros.push(z),
                CellOutcome::Done(None) => complete = false,
                CellOutcome::Split(children) => {
                    cells_used += children.len();
                    next.extend(children);
                }
            }
        }
        queue = next;
    }
    zeros.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
    });
    let report = ZeroReport {
        total_winding: total,
        depth: max_depth,
        evaluations: ev.evals(),
        complete: false,
        contour,
        zeros,
    };
    let sum = report.multiplicity_sum();
    Ok(ZeroReport {
        complete: complete && sum == total,
        ..report
    })
}

fn process_cell<F>(ev: &Evaluator<'_, F>, cell: &Cell, opts: &ZeroOptions, rng: &mut ChaCha8Rng) -> Result<CellOutcome>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let corner_scale = [
        cell.lo,
        cell.hi,
        Complex64::new(cell.lo.re, cell.hi.im),
        Complex64::new(cell.hi.re, cell.lo.im),
    ]
    .iter()
    .map(|z| ev.eval(*z).map(|v| v.norm()))
    .collect::<Result<Vec<_>>>()?
    .into_iter()
    .fold(0.0, f64::max);

    if cell.winding == 1 {
        if let Some(z) = polish(ev, cell, opts) {
            let residual = ev.eval(z).map(|v| v.norm()).unwrap_or(f64::NAN) / corner_scale;
            return Ok(CellOutcome::Done(Some(Zero {
                location: z,
                multiplicity: 1,
                residual,
            })));
        }
    }
    if cell.diameter() < 10.0 * opts.tol {
        // cluster (or a simple zero Newton could not pin down): report the cell
        let z = cell.center();
        let residual = ev.eval(z).map(|v| v.norm()).unwrap_or(f64::NAN) / corner_scale;
        return Ok(CellOutcome::Done(Some(Zero {
            location: z,
            multiplicity: cell.winding as u32,
            residual,
        })));
    }
    if cell.depth >= 60 {
        return Ok(CellOutcome::Done(None));
    }
    for attempt in 0..=opts.perturb_attempts {
        let mut split = cell.center();
        if attempt > 0 {
            let d = cell.hi - cell.lo;
            split += Complex64::new(
                d.re * 1e-3 * rng.gen_range(-1.0..1.0) * attempt as f64,
                d.im * 1e-3 * rng.gen_range(-1.0..1.0) * attempt as f64,
            );
        }
        match split_cell(ev, cell, split, opts) {
            Ok(children) => return Ok(CellOutcome::Split(children)),
            Err(Error::ZeroOnContour(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(CellOutcome::Done(None))
}

fn split_cell<F>(ev: &Evaluator<'_, F>, cell: &Cell, s: Complex64, opts: &ZeroOptions) -> Result<Vec<Cell>>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let (lo, hi) = (cell.lo, cell.hi);
    let rects = [
        (lo, s),
        (Complex64::new(s.re, lo.im), Complex64::new(hi.re, s.im)),
        (Complex64::new(lo.re, s.im), Complex64::new(s.re, hi.im)),
        (s, hi),
    ];
    let mut children = Vec::with_capacity(4);
    let mut sum = 0;
    for (a, b) in rects {
        let w = ev.winding(&Contour::rect(a, b), opts)?;
        sum += w;
        children.push(Cell {
            lo: a,
            hi: b,
            winding: w,
            depth: cell.depth + 1,
        });
    }
    if sum != cell.winding {
        // inconsistent phase bookkeeping; let the caller move the split
        return Err(Error::ZeroOnContour(s));
    }
    Ok(children)
}

/// Newton with a central-difference derivative, then Muller; the result must
/// lie in the cell, so that a neighbour's zero is never reported twice.
fn polish<F>(ev: &Evaluator<'_, F>, cell: &Cell, opts: &ZeroOptions) -> Option<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let f = |z: Complex64| (ev.f)(z);
    let diam = cell.diameter();
    let h = (diam * 1e-4).max(1e-7 * (1.0 + cell.center().norm()));
    let step_tol = |z: Complex64| (opts.tol * 1e-2).max(8.0 * f64::EPSILON * (1.0 + z.norm()));

    let mut z = cell.center();
    for _ in 0..opts.max_newton {
        let fz = f(z);
        if fz == Complex64::new(0.0, 0.0) {
            return cell.contains_within(z, 10.0 * opts.tol).then_some(z);
        }
        let hh = h.min((diam * 1e-4).max(1e-9)).max(1e-12 * (1.0 + z.norm()));
        let dfz = (f(z + hh) - f(z - hh)) / (2.0 * hh);
        let dz = fz / dfz;
        if !(dz.re.is_finite() && dz.im.is_finite()) {
            break;
        }
        z -= dz;
        if !cell.contains_with_margin(z, 0.5) {
            break;
        }
        if dz.norm() < step_tol(z) {
            return cell.contains_within(z, 10.0 * opts.tol).then_some(z);
        }
    }
    muller(&f, cell, opts).filter(|z| cell.contains_within(*z, 10.0 * opts.tol))
}

fn muller(f: &impl Fn(Complex64) -> Complex64, cell: &Cell, opts: &ZeroOptions) -> Option<Complex64> {
    let c = cell.center();
    let d = cell.diameter() * 0.1;
    let (mut x0, mut x1, mut x2) = (c - d, c + d, c + Complex64::new(0.0, d));
    let (mut f0, mut f1, mut f2) = (f(x0), f(x1), f(x2));
    for _ in 0..opts.max_newton {
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        let d1 = (f1 - f0) / h1;
        let d2 = (f2 - f1) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * f2 * a).sqrt();
        let den = if (b + disc).norm() > (b - disc).norm() { b + disc } else { b - disc };
        if den.norm() == 0.0 {
            return None;
        }
        let dx = -2.0 * f2 / den;
        let x3 = x2 + dx;
        if !(x3.re.is_finite() && x3.im.is_finite()) {
            return None;
        }
        if dx.norm() < (opts.tol * 1e-2).max(8.0 * f64::EPSILON * (1.0 + x3.norm())) {
            return Some(x3);
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x3;
        f2 = f(x3);
        if f2 == Complex64::new(0.0, 0.0) {
            return Some(x2);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn neighbouring_zero_not_reported_twice() {
        let roots = [
            c(-0.8845226130511121, -0.4385001870907206),
            c(-0.29831989877321075, -0.8171457375007267),
            c(0.6178608484449422, 0.4376616160349647),
            c(0.030395725851737776, 0.6479915273755261),
            c(-0.983651434093801, 0.3316102823354954),
        ];
        let f = |z: Complex64| roots.iter().map(|r| z - r).product::<Complex64>();
        let rep = locate_zeros(&f, c(-1.2877, -1.3071), c(1.3123, 1.2929), &ZeroOptions::with_tol(1e-12)).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.zeros.len(), 5);
        for r in roots {
            assert!(rep.zeros.iter().any(|z| (z.location - r).norm() < 1e-9), "{r} missing");
        }
    }

    #[test]
    fn identity_winds_once() {
        let f = |z: Complex64| z;
        let w = winding_count(&f, &Contour::rect(c(-0.5, -0.5), c(0.5, 0.5)), &ZeroOptions::default());
        assert_eq!(w.unwrap(), 1);
        let w = winding_count(&f, &Contour::circle(c(0.0, 0.0), 1.0), &ZeroOptions::default());
        assert_eq!(w.unwrap(), 1);
        let w = winding_count(&f, &Contour::circle(c(3.0, 0.0), 1.0), &ZeroOptions::default());
        assert_eq!(w.unwrap(), 0);
    }

    #[test]
    fn triple_zero() {
        let z0 = c(1.0, 1.0);
        let f = move |z: Complex64| (z - z0).powi(3);
        let w = winding_count(&f, &Contour::square(z0, 0.3), &ZeroOptions::default()).unwrap();
        assert_eq!(w, 3);
    }

    #[test]
    fn zero_on_contour_is_reported() {
        let f = |z: Complex64| z - c(0.5, 0.0);
        let r = winding_count(&f, &Contour::rect(c(-0.5, -0.5), c(0.5, 0.5)), &ZeroOptions::default());
        assert!(matches!(r, Err(Error::ZeroOnContour(_))));
        let (w, used) =
            winding_count_perturbed(&f, &Contour::rect(c(-0.5, -0.5), c(0.5, 0.5)), &ZeroOptions::default())
                .unwrap();
        assert!(w == 0 || w == 1);
        assert_ne!(used, Contour::rect(c(-0.5, -0.5), c(0.5, 0.5)));
    }

    #[test]
    fn sine_zeros() {
        let f = |z: Complex64| z.sin();
        let rep = locate_zeros(&f, c(-4.0, -1.0), c(4.0, 1.0), &ZeroOptions::default()).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.total_winding, 3);
        let expect = [-PI, 0.0, PI];
        for (z, e) in rep.zeros.iter().zip(expect) {
            assert_eq!(z.multiplicity, 1);
            assert!((z.location - c(e, 0.0)).norm() < 1e-10, "{:?}", z);
        }
    }

    #[test]
    fn double_zero_is_clustered() {
        let z0 = c(0.3, -0.2);
        let f = move |z: Complex64| (z - z0).powi(2) * (z + 2.0);
        let rep = locate_zeros(&f, c(-1.0, -1.0), c(1.0, 1.0), &ZeroOptions::with_tol(1e-8)).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.zeros.len(), 1);
        assert_eq!(rep.zeros[0].multiplicity, 2);
        assert!((rep.zeros[0].location - z0).norm() < 1e-6);
    }

    #[test]
    fn translation_equivariance() {
        let g = |z: Complex64| z * z * z - c(0.2, 0.1) * z + c(0.05, 0.0);
        let shift = c(2.5, -1.25);
        let f = move |z: Complex64| g(z - shift);
        let opts = ZeroOptions::default();
        let a = locate_zeros(&g, c(-1.0, -1.0), c(1.0, 1.0), &opts).unwrap();
        let b = locate_zeros(&f, c(-1.0, -1.0) + shift, c(1.0, 1.0) + shift, &opts).unwrap();
        assert_eq!(a.zeros.len(), b.zeros.len());
        for (p, q) in a.zeros.iter().zip(&b.zeros) {
            assert!((p.location + shift - q.location).norm() < 1e-10);
        }
    }

    #[test]
    fn rouche_perturbation_keeps_count() {
        let f = |z: Complex64| (z - c(0.1, 0.2)) * (z + c(0.3, 0.0)) * (z - c(2.0, 0.0));
        let contour = Contour::circle(c(0.0, 0.0), 1.0);
        let opts = ZeroOptions::default();
        let min_on_contour = (0..4096)
            .map(|i| f(Complex64::from_polar(1.0, 2.0 * PI * i as f64 / 4096.0)).norm())
            .fold(f64::INFINITY, f64::min);
        let eps = 0.49 * min_on_contour;
        let g = move |z: Complex64| f(z) + eps * (3.0 * z).exp() / (3f64).exp();
        assert_eq!(winding_count(&f, &contour, &opts).unwrap(), 2);
        assert_eq!(winding_count(&g, &contour, &opts).unwrap(), 2);
    }
}
