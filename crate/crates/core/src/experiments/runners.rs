use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::output::{complex, num};
use super::{Criterion, Experiment, ExperimentConfig, Outcome, ResultRow};
use crate::asymptotics::{
    classify_hit, example_logl, example_near_threshold, lambert_w, leading_correction, sumis0_residual,
    threshold_prediction, BandParams, Branch,
};
use crate::channels::{ChannelSystem, ChannelWindow, Method, ResonanceHit, Sheet, Tower};
use crate::error::{Error, Result};
use crate::potential::{mode_decay_exponent, smooth_bump, CylinderPotential, ModeProfile};
use crate::scatter1d::{newton_zero, Resonance1d, Scatterer};
use crate::surface::{chart_radius, tau, SurfacePoint};
use crate::zeros::{locate_zeros, winding_count_perturbed, Contour, Zero, ZeroOptions};

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Hits closer than this to `z = 0` are threshold hits.
const THRESHOLD_RADIUS: f64 = 1e-6;

pub(super) fn dispatch(cfg: &ExperimentConfig) -> Result<Outcome> {
    let ctx = Ctx::new(cfg)?;
    let (rows, criteria, tables) = match cfg.experiment {
        Experiment::FreeBaseline => free_baseline(&ctx)?,
        Experiment::DecoupledCheck => decoupled_check(&ctx)?,
        Experiment::NearThreshold => near_threshold(&ctx)?,
        Experiment::ThresholdZero => threshold_zero(&ctx)?,
        Experiment::LeadingCorrection => leading(&ctx)?,
        Experiment::Polesequence => polesequence(&ctx)?,
        Experiment::ExampleThreshold => example_threshold(&ctx)?,
        Experiment::ExampleLogl => example_logl_run(&ctx)?,
        Experiment::ResonanceFreeScan => resonance_free_scan(&ctx)?,
        Experiment::IdentitySuite => identity_suite(&ctx)?,
    };
    Ok(Outcome {
        experiment: cfg.experiment,
        rows,
        criteria,
        tables,
    })
}

type RunResult = Result<(Vec<ResultRow>, Vec<Criterion>, Value)>;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    p: CylinderPotential,
    opts: ZeroOptions,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let mut opts = ZeroOptions::with_tol(cfg.tol);
        opts.seed = cfg.seed;
        Ok(Self {
            cfg,
            p: cfg.load_potential()?,
            opts,
        })
    }

    fn name(&self) -> &'static str {
        self.cfg.experiment.name()
    }

    fn window(&self, l: u32, k: u32) -> Result<ChannelWindow> {
        ChannelWindow::new(l, k, self.cfg.slabs)
    }

    fn row(&self, l: u32, method: impl ToString, z: Complex64, k: u32) -> ResultRow {
        ResultRow::new(self.name(), l, method, z, k, self.cfg.slabs)
    }

    fn elapsed(&self, t: Instant) -> Option<f64> {
        self.cfg.timing.then(|| t.elapsed().as_secs_f64())
    }

    /// Towers searched for this potential with the factor each one carries.
    fn towers(&self) -> (Vec<Tower>, u32) {
        if self.p.is_real() {
            (vec![Tower::Plus], 2)
        } else {
            (vec![Tower::Plus, Tower::Minus], 1)
        }
    }

    fn scatterer_v0(&self) -> Result<Scatterer> {
        Scatterer::from_profile(&self.p.average_v0(), self.cfg.slabs)
    }
}

/// Zeros of one determinant inside a disk, with the winding on its boundary.
struct DiskZeros {
    zeros: Vec<Zero>,
    winding: i64,
    evaluations: usize,
}

impl DiskZeros {
    fn count(&self) -> u32 {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }
}

fn det_fn<'s>(sys: &'s ChannelSystem, sheet: Sheet) -> impl Fn(Complex64) -> Complex64 + Sync + 's {
    move |z| {
        sys.determinant_on(z, sheet)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    }
}

fn lift_nonfinite(sys: &ChannelSystem, sheet: Sheet, e: Error) -> Error {
    match e {
        Error::NonFinite(z) => match sys.determinant_on(z, sheet) {
            Err(inner) => inner,
            Ok(_) => Error::NonFinite(z),
        },
        other => other,
    }
}

fn disk_zeros(sys: &ChannelSystem, sheet: Sheet, center: Complex64, radius: f64, opts: &ZeroOptions) -> Result<DiskZeros> {
    let l = sys.window().l;
    let half = Complex64::new(radius, radius);
    let (lo, hi) = (center - half, center + half);
    for c in [lo, hi, Complex64::new(lo.re, hi.im), Complex64::new(hi.re, lo.im)] {
        SurfacePoint::new(l, c).map_err(|_| {
            Error::InvalidRegion(format!(
                "disk |z - {center}| < {radius} does not fit in the chart |z| < {:.4}",
                chart_radius(l)
            ))
        })?;
    }
    let f = det_fn(sys, sheet);
    let rep = locate_zeros(&f, lo, hi, opts).map_err(|e| lift_nonfinite(sys, sheet, e))?;
    let (winding, _) =
        winding_count_perturbed(&f, &Contour::circle(center, radius), opts).map_err(|e| lift_nonfinite(sys, sheet, e))?;
    Ok(DiskZeros {
        zeros: rep
            .zeros
            .into_iter()
            .filter(|z| (z.location - center).norm() < radius)
            .collect(),
        winding,
        evaluations: rep.evaluations,
    })
}

fn hit_of(z: &Zero, window: &ChannelWindow, tower: Tower, factor: u32) -> Result<ResonanceHit> {
    Ok(ResonanceHit {
        point: SurfacePoint::new(window.l, z.location)?,
        multiplicity: z.multiplicity,
        tower_factor: factor,
        tower,
        method: Method::Direct,
        residual: z.residual,
        k: window.k,
        slabs: window.slabs,
        threshold: z.location.norm() < THRESHOLD_RADIUS,
    })
}

fn zero_list(zs: &[Zero]) -> Value {
    Value::Array(
        zs.iter()
            .map(|z| json!({"z": complex(z.location), "multiplicity": z.multiplicity}))
            .collect(),
    )
}

fn nearest(z: Complex64, others: impl IntoIterator<Item = Complex64>) -> f64 {
    others.into_iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min)
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// 1-D resonances of the step approximation of `V₀` with `|λ| < rho`.
fn resonances_1d(s: &Scatterer, rho: f64, opts: &ZeroOptions) -> Result<Vec<Resonance1d>> {
    // offset keeps the origin off the quadtree edges
    let off = Complex64::new(1.3e-3, 0.7e-3);
    let list = s.find_resonances(-Complex64::new(rho, rho) + off, Complex64::new(rho, rho) + off, opts)?;
    Ok(list
        .hits
        .into_iter()
        .filter(|r| r.lambda.norm() < rho && r.lambda.norm() > THRESHOLD_RADIUS)
        .collect())
}

// ---------------------------------------------------------------------------

fn free_baseline(ctx: &Ctx) -> RunResult {
    let rho = ctx.cfg.disk_radius(2.0);
    let k = ctx.cfg.first_k();
    let (towers, factor) = ctx.towers();
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    let mut off_total = 0;
    let mut consistent = true;
    for &l in &ctx.cfg.l {
        let t = Instant::now();
        let w = ctx.window(l, k)?;
        for &tower in &towers {
            let sys = ChannelSystem::new(&ctx.p, &w, tower)?;
            let dz = disk_zeros(&sys, Sheet::Chart, Complex64::new(0.0, 0.0), rho, &ctx.opts)?;
            let (thr, off): (Vec<Zero>, Vec<Zero>) = dz.zeros.iter().partition(|z| z.location.norm() < THRESHOLD_RADIUS);
            consistent &= dz.winding == dz.count() as i64;
            off_total += off.len();
            for z in &off {
                rows.push(
                    ctx.row(l, Method::Direct, z.location, k)
                        .multiplicity(z.multiplicity * factor)
                        .wall_time(ctx.elapsed(t)),
                );
            }
            tables.push(json!({
                "l": l, "tower": tower, "rho": rho, "winding": dz.winding,
                "threshold_order": thr.iter().map(|z| z.multiplicity).sum::<u32>(),
                "off_threshold": zero_list(&off), "evaluations": dz.evaluations,
            }));
        }
    }
    let criteria = vec![
        Criterion::new(
            "no-resonances",
            off_total == 0,
            format!("{off_total} zeros of D in B_l({rho}) away from the threshold"),
        ),
        Criterion::new("winding-consistent", consistent, "located zeros match the boundary winding"),
    ];
    Ok((rows, criteria, json!({"disks": tables})))
}

fn decoupled_check(ctx: &Ctx) -> RunResult {
    if ctx.p.oscillatory().modes().values().any(|m| !m.is_zero()) {
        return Err(Error::Config("decoupled-check needs a theta-independent potential".into()));
    }
    let rho = ctx.cfg.disk_radius(2.5);
    let k = ctx.cfg.first_k();
    let s = ctx.scatterer_v0()?;
    let res = resonances_1d(&s, rho, &ctx.opts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    let mut max_rel: f64 = 0.0;
    let mut sets_ok = true;
    let mut max_set_dist: f64 = 0.0;
    for &l in &ctx.cfg.l {
        let t = Instant::now();
        let w = ctx.window(l, k)?;
        let sys = ChannelSystem::new(&ctx.p, &w, Tower::Plus)?;
        let product = |z: Complex64| -> Complex64 {
            w.channels()
                .into_iter()
                .map(|kk| s.wronskian(tau(&SurfacePoint { l, z }, kk)))
                .product()
        };
        for _ in 0..64 {
            let z = Complex64::from_polar(rng.gen_range(0.1..0.95) * rho, rng.gen_range(0.0..std::f64::consts::TAU));
            let d = sys.determinant(z)?;
            let pz = product(z);
            max_rel = max_rel.max((d - pz).norm() / pz.norm());
        }
        let dz = disk_zeros(&sys, Sheet::Chart, Complex64::new(0.0, 0.0), rho, &ctx.opts)?;
        let half = Complex64::new(rho, rho);
        let pz = locate_zeros(&product, -half, half, &ctx.opts)?;
        let pz: Vec<Zero> = pz.zeros.into_iter().filter(|z| z.location.norm() < rho).collect();
        let direct: Vec<Complex64> = dz.zeros.iter().map(|z| z.location).collect();
        let same_count = pz.iter().map(|z| z.multiplicity).sum::<u32>() == dz.count();
        let dist = pz.iter().map(|z| nearest(z.location, direct.iter().copied())).fold(0.0, f64::max);
        sets_ok &= same_count && dist < 1e-8;
        max_set_dist = max_set_dist.max(dist);
        for z in &dz.zeros {
            rows.push(
                ctx.row(l, Method::Direct, z.location, k)
                    .multiplicity(z.multiplicity * 2)
                    .wall_time(ctx.elapsed(t)),
            );
        }
        for r in &res {
            let pr = threshold_prediction(r.lambda, l);
            rows.push(
                ctx.row(l, Method::Predicted0th, pr.z_pred, k)
                    .multiplicity(2 * r.multiplicity)
                    .error(nearest(pr.z_pred, direct.iter().copied()), pr.error_exponent),
            );
        }
        tables.push(json!({
            "l": l, "direct": zero_list(&dz.zeros), "product": zero_list(&pz),
            "max_set_distance": num(dist), "winding": dz.winding,
        }));
    }
    let criteria = vec![
        Criterion::new(
            "factorization",
            max_rel < 1e-9,
            format!("max |D - prod W(tau_k)| / |prod W| = {max_rel:.3e} (limit 1e-9)"),
        ),
        Criterion::new(
            "zero-sets",
            sets_ok,
            format!("zero sets agree, max distance {max_set_dist:.3e} (limit 1e-8)"),
        ),
    ];
    Ok((
        rows,
        criteria,
        json!({"max_relative_difference": num(max_rel), "resonances_1d": res.iter().map(|r| complex(r.lambda)).collect::<Vec<_>>(), "per_l": tables}),
    ))
}

fn near_threshold(ctx: &Ctx) -> RunResult {
    let rho = ctx.cfg.disk_radius(3.0);
    let r = ctx.cfg.pole_radius;
    let s = ctx.scatterer_v0()?;
    let res = resonances_1d(&s, rho, &ctx.opts)?;
    let (towers, factor) = ctx.towers();
    let delta = mode_decay_exponent(&ctx.p).0;
    let mut rows = Vec::new();
    let mut counts = Vec::new();
    let mut classes = Vec::new();
    let mut count_ok = true;
    let mut stable_ok = true;
    let mut bound_states = 0;
    for lam in &res {
        bound_states += lam.bound_state as usize;
        for &l in &ctx.cfg.l {
            if lam.lambda.norm() + r >= chart_radius(l) {
                continue;
            }
            let mut per_k = Vec::new();
            for &k in &ctx.cfg.k {
                let w = ctx.window(l, k)?;
                for tower in [Tower::Plus, Tower::Minus] {
                    let sys = ChannelSystem::new(&ctx.p, &w, tower)?;
                    let f = det_fn(&sys, Sheet::Chart);
                    let (wn, _) = winding_count_perturbed(&f, &Contour::circle(lam.lambda, r), &ctx.opts)
                        .map_err(|e| lift_nonfinite(&sys, Sheet::Chart, e))?;
                    per_k.push(wn);
                    counts.push(json!({"lambda": complex(lam.lambda), "l": l, "K": k, "tower": tower, "winding": wn}));
                    if lam.bound_state {
                        count_ok &= wn == lam.multiplicity as i64;
                    }
                }
            }
            if lam.bound_state {
                stable_ok &= per_k.windows(2).all(|p| p[0] == p[1]);
            }
            let k = ctx.cfg.first_k();
            let t = Instant::now();
            let w = ctx.window(l, k)?;
            let mut direct = Vec::new();
            for &tower in &towers {
                let sys = ChannelSystem::new(&ctx.p, &w, tower)?;
                let dz = disk_zeros(&sys, Sheet::Chart, lam.lambda, r, &ctx.opts)?;
                for z in &dz.zeros {
                    let hit = hit_of(z, &w, tower, factor)?;
                    let cl = classify_hit(&hit, &res, &BandParams { delta });
                    classes.push(json!({
                        "l": l, "z": complex(hit.z()), "distance": num(cl.distance),
                        "scaled": cl.scaled.iter().map(|s| json!({"label": s.label, "exponent": num(s.exponent), "value": num(s.value)})).collect::<Vec<_>>(),
                        "re_scaled": num(cl.re_scaled),
                    }));
                    rows.push(
                        ctx.row(l, Method::Direct, z.location, k)
                            .multiplicity(hit.total_multiplicity())
                            .wall_time(ctx.elapsed(t)),
                    );
                    direct.push(z.location);
                }
            }
            let pr = threshold_prediction(lam.lambda, l);
            rows.push(
                ctx.row(l, Method::Predicted0th, pr.z_pred, k)
                    .multiplicity(2 * lam.multiplicity)
                    .error(nearest(pr.z_pred, direct), 2.0 / lam.multiplicity as f64),
            );
        }
    }
    let criteria = vec![
        Criterion::new(
            "pole-count",
            count_ok && bound_states > 0,
            format!("{bound_states} bound states; winding over D_l(i beta, {r}) equals the 1-D multiplicity in each tower"),
        ),
        Criterion::new("stable-in-K", stable_ok, format!("windings identical for K in {:?}", ctx.cfg.k)),
    ];
    Ok((
        rows,
        criteria,
        json!({
            "resonances_1d": res.iter().map(|r| json!({"lambda": complex(r.lambda), "multiplicity": r.multiplicity, "bound_state": r.bound_state})).collect::<Vec<_>>(),
            "windings": counts, "classification": classes,
        }),
    ))
}

fn threshold_zero(ctx: &Ctx) -> RunResult {
    let rho = ctx.cfg.disk_radius(0.5);
    let growth = ctx.cfg.param("growth", 3.0);
    let k = ctx.cfg.first_k();
    let s = ctx.scatterer_v0()?;
    let order = s.order_at_origin(0.05)?;
    let (towers, factor) = ctx.towers();
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    let mut counts = Vec::new();
    let mut scaled = Vec::new();
    for &l in &ctx.cfg.l {
        let t = Instant::now();
        let w = ctx.window(l, k)?;
        let mut total = 0;
        let mut max_scaled: f64 = 0.0;
        for &tower in &towers {
            let sys = ChannelSystem::new(&ctx.p, &w, tower)?;
            let dz = disk_zeros(&sys, Sheet::Chart, Complex64::new(0.0, 0.0), rho, &ctx.opts)?;
            total += dz.count() * factor;
            for z in &dz.zeros {
                rows.push(
                    ctx.row(l, Method::Direct, z.location, k)
                        .multiplicity(z.multiplicity * factor)
                        .wall_time(ctx.elapsed(t)),
                );
                let pr = threshold_prediction(Complex64::new(0.0, 0.0), l);
                let row = ctx.row(l, Method::Predicted0th, pr.z_pred, k).error(z.location.norm(), pr.error_exponent);
                max_scaled = max_scaled.max(row.scaled_error);
                rows.push(row);
            }
            tables.push(json!({"l": l, "tower": tower, "zeros": zero_list(&dz.zeros), "winding": dz.winding}));
        }
        counts.push(total);
        scaled.push(max_scaled);
    }
    let expected = 2 * order.max(0) as u32;
    let count_ok = order > 0 && counts.iter().all(|&c| c == expected);
    let shrink_ok = scaled.iter().all(|&v| v.is_finite() && v <= growth * scaled[0]);
    let criteria = vec![
        Criterion::new(
            "count",
            count_ok,
            format!("zero resonance of order {order}; counts in B_l({rho}) {counts:?}, expected {expected}"),
        ),
        Criterion::new(
            "shrinking",
            shrink_ok,
            format!("max |z| l^2 = {} (bounded by {growth} x first)", fmt_list(&scaled)),
        ),
    ];
    Ok((rows, criteria, json!({"order_at_origin": order, "disks": tables, "scaled": scaled.iter().map(|v| num(*v)).collect::<Vec<_>>()})))
}

struct CorrectionRun {
    l: u32,
    direct: Vec<Complex64>,
    multiplicity: u32,
    zeroth: Complex64,
    corrected: Complex64,
    warning: Option<String>,
    wall: Option<f64>,
}

/// Direct zeros near the top bound state of `V₀` and both predictions.
///
/// `λ₀` and `u` come from the same step approximation of `V₀` that the direct
/// determinant uses, so the slab discretization error cancels to leading order.
fn correction_runs(ctx: &Ctx) -> Result<(Complex64, Vec<CorrectionRun>)> {
    let rho = ctx.cfg.disk_radius(3.0);
    let r = ctx.cfg.pole_radius;
    let k = ctx.cfg.first_k();
    let s = ctx.scatterer_v0()?;
    let res = resonances_1d(&s, rho, &ctx.opts)?;
    let top = res
        .iter()
        .filter(|r| r.bound_state)
        .max_by(|a, b| a.lambda.im.total_cmp(&b.lambda.im))
        .ok_or_else(|| Error::Config("V_0 has no bound state in the search disk".into()))?;
    let lambda0 = newton_zero(&s, top.lambda)?;
    let state = s.resonance_state(lambda0)?;
    let mut runs = Vec::new();
    for &l in &ctx.cfg.l {
        let t = Instant::now();
        let w = ctx.window(l, k)?;
        let sys = ChannelSystem::new(&ctx.p, &w, Tower::Plus)?;
        let dz = disk_zeros(&sys, Sheet::Chart, lambda0, r, &ctx.opts)?;
        let zc = leading_correction(&state, &ctx.p, l)?;
        runs.push(CorrectionRun {
            l,
            direct: dz.zeros.iter().map(|z| z.location).collect(),
            multiplicity: dz.count(),
            zeroth: threshold_prediction(lambda0, l).z_pred,
            corrected: zc.z_pred,
            warning: zc.warning,
            wall: ctx.elapsed(t),
        });
    }
    Ok((lambda0, runs))
}

fn leading(ctx: &Ctx) -> RunResult {
    let (lambda0, runs) = correction_runs(ctx)?;
    let k = ctx.cfg.first_k();
    let mut rows = Vec::new();
    let mut e0 = Vec::new();
    let mut ec = Vec::new();
    let mut single = true;
    for run in &runs {
        single &= run.direct.len() == 1 && run.multiplicity == 1;
        for z in &run.direct {
            rows.push(ctx.row(run.l, Method::Direct, *z, k).multiplicity(2).wall_time(run.wall));
        }
        let err0 = nearest(run.zeroth, run.direct.iter().copied());
        let errc = nearest(run.corrected, run.direct.iter().copied());
        let lf3 = (run.l as f64).powi(3);
        e0.push(err0 * lf3);
        ec.push(errc * lf3);
        rows.push(ctx.row(run.l, Method::Predicted0th, run.zeroth, k).multiplicity(2).error(err0, 2.0));
        rows.push(ctx.row(run.l, Method::PredictedCorrected, run.corrected, k).multiplicity(2).error(errc, 3.0));
    }
    let rate_ok = ec
        .windows(2)
        .all(|p| p[0].is_finite() && p[1].is_finite() && p[0].max(p[1]) < 2.5 * p[0].min(p[1]));
    let improve_ok = e0.iter().zip(&ec).all(|(a, b)| 5.0 * b <= *a);
    let criteria = vec![
        Criterion::new("single-pole", single, "one simple zero per tower near the bound state"),
        Criterion::new(
            "corrected-rate",
            single && rate_ok,
            format!("|z - z_corrected| l^3 = {} (consecutive ratio < 2.5)", fmt_list(&ec)),
        ),
        Criterion::new(
            "improves",
            single && improve_ok,
            format!("|z - lambda_0| l^3 = {} vs corrected {} (factor >= 5)", fmt_list(&e0), fmt_list(&ec)),
        ),
    ];
    let warnings: Vec<String> = runs.iter().filter_map(|r| r.warning.clone()).collect();
    Ok((
        rows,
        criteria,
        json!({"lambda0": complex(lambda0), "zeroth_scaled_l3": e0.iter().map(|v| num(*v)).collect::<Vec<_>>(),
               "corrected_scaled_l3": ec.iter().map(|v| num(*v)).collect::<Vec<_>>(), "warnings": warnings}),
    ))
}

fn polesequence(ctx: &Ctx) -> RunResult {
    if !ctx.p.is_real() || !ctx.p.is_smooth() {
        return Err(Error::Config("polesequence needs a real smooth potential".into()));
    }
    let (lambda0, runs) = correction_runs(ctx)?;
    let k = ctx.cfg.first_k();
    let mut rows = Vec::new();
    let mut re = Vec::new();
    let mut single = true;
    for run in &runs {
        single &= run.direct.len() == 1;
        let z = run.direct.first().copied().unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        let row = ctx
            .row(run.l, Method::Direct, z, k)
            .multiplicity(2 * run.multiplicity)
            .error(z.re.abs(), 3.0)
            .wall_time(run.wall);
        re.push(row.scaled_error);
        rows.push(row);
    }
    let decreasing = re.windows(2).all(|p| p[1] < p[0]);
    let criteria = vec![Criterion::new(
        "re-decay",
        single && decreasing,
        format!("|Re z| l^3 = {} (strictly decreasing)", fmt_list(&re)),
    )];
    Ok((rows, criteria, json!({"lambda0": complex(lambda0), "re_scaled_l3": re.iter().map(|v| num(*v)).collect::<Vec<_>>()})))
}

fn example_threshold(ctx: &Ctx) -> RunResult {
    let rho = ctx.cfg.disk_radius(1.0);
    let growth = ctx.cfg.param("growth", 3.0);
    let k = ctx.cfg.first_k();
    let conj = ctx.p.conjugate();
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    let mut per_tower_ok = true;
    let mut scaled = Vec::new();
    let mut mirror_ok = true;
    let mut mirror_dist: f64 = 0.0;
    let mut mirror_per_l = Vec::new();
    let origin = Complex64::new(0.0, 0.0);
    for &l in &ctx.cfg.l {
        let t = Instant::now();
        let w = ctx.window(l, k)?;
        let pred = example_near_threshold(l)?;
        let mut plus_zeros = Vec::new();
        for tower in [Tower::Plus, Tower::Minus] {
            let sys = ChannelSystem::new(&ctx.p, &w, tower)?;
            let dz = disk_zeros(&sys, Sheet::Chart, origin, rho, &ctx.opts)?;
            let f = det_fn(&sys, Sheet::Chart);
            let (inner, _) = winding_count_perturbed(&f, &Contour::circle(origin, THRESHOLD_RADIUS), &ctx.opts)?;
            let off: Vec<&Zero> = dz.zeros.iter().filter(|z| z.location.norm() >= THRESHOLD_RADIUS).collect();
            per_tower_ok &= dz.winding - inner == 1 && off.len() == 1 && off[0].multiplicity == 1;
            tables.push(json!({"l": l, "tower": tower, "zeros": zero_list(&dz.zeros), "winding": dz.winding, "threshold_winding": inner}));
            if tower == Tower::Plus {
                plus_zeros = dz.zeros.clone();
            }
        }
        let direct: Vec<Complex64> = plus_zeros.iter().map(|z| z.location).collect();
        for z in &plus_zeros {
            rows.push(
                ctx.row(l, Method::Direct, z.location, k)
                    .multiplicity(2 * z.multiplicity)
                    .wall_time(ctx.elapsed(t)),
            );
        }
        let row = ctx
            .row(l, Method::ExampleClosedForm, pred.z_pred, k)
            .error(nearest(pred.z_pred, direct.iter().copied()), pred.error_exponent);
        scaled.push(row.scaled_error);
        rows.push(row);
        // mirror check: minus tower of the conjugate potential on the reflected sheet
        let sys_m = ChannelSystem::new(&conj, &w, Tower::Minus)?;
        let mz = disk_zeros(&sys_m, Sheet::Reflected, origin, rho, &ctx.opts)?;
        let mirrored: Vec<Complex64> = mz.zeros.iter().map(|z| -z.location.conj()).collect();
        let d = direct.iter().map(|z| nearest(*z, mirrored.iter().copied())).fold(0.0, f64::max);
        mirror_ok &= mz.count() as usize == plus_zeros.iter().map(|z| z.multiplicity as usize).sum::<usize>() && d < 1e-8;
        mirror_dist = mirror_dist.max(d);
        mirror_per_l.push(json!({"l": l, "distance": num(d), "count": mz.count()}));
    }
    let bound_ok = scaled.iter().all(|&v| v.is_finite() && v <= growth * scaled[0]);
    let criteria = vec![
        Criterion::new(
            "count-per-tower",
            per_tower_ok,
            format!("exactly one zero per tower in B_l({rho}) minus the threshold disk"),
        ),
        Criterion::new(
            "error-scaling",
            per_tower_ok && bound_ok,
            format!("|z - z_pred| l^2 = {} (bounded by {growth} x first)", fmt_list(&scaled)),
        ),
        Criterion::new(
            "conjugate-symmetry",
            mirror_ok,
            format!("tower zero sets mirror under z -> -conj(z), max distance {mirror_dist:.3e} (limit 1e-8)"),
        ),
    ];
    Ok((rows, criteria, json!({"disks": tables, "scaled_l2": scaled.iter().map(|v| num(*v)).collect::<Vec<_>>(), "mirror_distance": num(mirror_dist), "mirror": mirror_per_l})))
}

fn example_logl_run(ctx: &Ctx) -> RunResult {
    let factor = ctx.cfg.param("log_factor", 0.9);
    let exponent = ctx.cfg.param("exponent", 0.4);
    let k = ctx.cfg.first_k();
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    let mut ok = true;
    let mut dists = Vec::new();
    for &l in &ctx.cfg.l {
        let t = Instant::now();
        let w = ctx.window(l, k)?;
        let radius = factor * (l as f64).ln();
        let sys = ChannelSystem::new(&ctx.p, &w, Tower::Plus)?;
        let dz = disk_zeros(&sys, Sheet::Chart, Complex64::new(0.0, 0.0), radius, &ctx.opts)?;
        let direct: Vec<Complex64> = dz.zeros.iter().map(|z| z.location).collect();
        for z in &dz.zeros {
            rows.push(
                ctx.row(l, Method::Direct, z.location, k)
                    .multiplicity(2 * z.multiplicity)
                    .wall_time(ctx.elapsed(t)),
            );
        }
        let pred = example_logl(l, 1, Branch::Plus)?;
        let d = nearest(pred.z_pred, direct.iter().copied());
        let limit = (l as f64).powf(-exponent);
        ok &= d < limit;
        dists.push(d);
        rows.push(ctx.row(l, Method::ExampleClosedForm, pred.z_pred, k).error(d, pred.error_exponent));
        let branches: Vec<Value> = [(0, Branch::Plus), (0, Branch::Minus), (1, Branch::Minus), (2, Branch::Plus), (2, Branch::Minus)]
            .iter()
            .filter_map(|&(nu, sg)| example_logl(l, nu, sg).ok().map(|p| (nu, sg, p)))
            .map(|(nu, sg, p)| json!({"nu": nu, "sign": sg, "z": complex(p.z_pred), "nearest": num(nearest(p.z_pred, direct.iter().copied()))}))
            .collect();
        tables.push(json!({
            "l": l, "radius": radius, "prediction": complex(pred.z_pred), "prediction_modulus": pred.z_pred.norm(),
            "prediction_inside": pred.z_pred.norm() < radius, "nearest": num(d), "limit": limit,
            "zeros": zero_list(&dz.zeros), "other_branches": branches, "evaluations": dz.evaluations,
        }));
    }
    let criteria = vec![Criterion::new(
        "logl-pole",
        ok,
        format!("distance from (i/2)W_1 prediction to the nearest zero in B_l({factor} log l): {} (limit l^-{exponent})", fmt_list(&dists)),
    )];
    Ok((rows, criteria, json!({"per_l": tables})))
}

fn resonance_free_scan(ctx: &Ctx) -> RunResult {
    let outer_factor = ctx.cfg.param("log_factor", 0.5);
    let inner_factor = ctx.cfg.param("inner_factor", 3.0);
    let k = ctx.cfg.first_k();
    let delta = mode_decay_exponent(&ctx.p).0;
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    let mut ok = true;
    for &l in &ctx.cfg.l {
        let t = Instant::now();
        let w = ctx.window(l, k)?;
        let pred = example_near_threshold(l)?;
        let r_in = inner_factor * pred.z_pred.norm();
        let r_out = outer_factor * (l as f64).ln();
        if r_out >= chart_radius(l) || r_in >= r_out {
            return Err(Error::InvalidRegion(format!("annulus ({r_in}, {r_out}) does not fit at l = {l}")));
        }
        for tower in [Tower::Plus, Tower::Minus] {
            let sys = ChannelSystem::new(&ctx.p, &w, tower)?;
            let f = det_fn(&sys, Sheet::Chart);
            let origin = Complex64::new(0.0, 0.0);
            let (outer, _) = winding_count_perturbed(&f, &Contour::circle(origin, r_out), &ctx.opts)?;
            let (inner, _) = winding_count_perturbed(&f, &Contour::circle(origin, r_in), &ctx.opts)?;
            let count = outer - inner;
            ok &= count == 0;
            tables.push(json!({
                "l": l, "tower": tower, "r_in": r_in, "r_out": r_out, "count": count, "inner": inner,
                "annulus_margin": if delta.is_finite() { num(r_in * (l as f64).powf(delta)) } else { Value::Null },
            }));
        }
        rows.push(
            ctx.row(l, Method::ExampleClosedForm, pred.z_pred, k)
                .wall_time(ctx.elapsed(t)),
        );
    }
    let criteria = vec![Criterion::new(
        "annulus-empty",
        ok,
        format!("no zeros of D in {inner_factor}|z_pred| < |z| < {outer_factor} log l"),
    )];
    Ok((rows, criteria, json!({"annuli": tables, "delta": num(delta)})))
}

// ---------------------------------------------------------------------------
// identity suite

fn random_mode_potential(rng: &mut ChaCha8Rng, m_max: i32) -> Result<CylinderPotential> {
    let mut modes = std::collections::BTreeMap::new();
    for m in -m_max..=m_max {
        if m == 0 {
            continue;
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let freq = rng.gen_range(-3.0..3.0);
        let prof = ModeProfile::from_fn(-1.0, 1.0, 64, |x| c * smooth_bump(x) * (I * freq * x).exp())?;
        modes.insert(m, prof);
    }
    CylinderPotential::new(modes, false)
}

fn sumis0_check(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = random_mode_potential(rng, 8)?;
        let xs: Vec<f64> = (0..5).map(|_| rng.gen_range(-0.9..0.9)).collect();
        worst = worst.max(sumis0_residual(&p, &xs).relative);
    }
    Ok(worst)
}

fn lambert_check(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for nu in -2..=2 {
        for _ in 0..100 {
            let w = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let x = lambert_w(nu, w)?;
            worst = worst.max((x * x.exp() - w).norm() / w.norm().max(1.0));
        }
    }
    Ok(worst)
}

fn surface_check(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let l = rng.gen_range(2..=64u32);
        let z = Complex64::from_polar(
            0.95 * chart_radius(l) * rng.gen_range(0.0f64..1.0).sqrt(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let p = SurfacePoint { l, z };
        let (j, k) = (rng.gen_range(0..=l + 8), rng.gen_range(0..=l + 8));
        let (tj, tk) = (tau(&p, j), tau(&p, k));
        let lhs = tk * tk - tj * tj;
        let rhs = (j as f64).powi(2) - (k as f64).powi(2);
        let scale = tk.norm_sqr().max(tj.norm_sqr()).max(1.0);
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    worst
}

fn free_1d_check(rng: &mut ChaCha8Rng) -> Result<f64> {
    let s = Scatterer::free(-1.0, 1.0)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let lam = Complex64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(-0.1..std::f64::consts::PI + 0.1));
        let w = s.wronskian(lam);
        worst = worst.max((w - 2.0 * I * lam).norm() / (2.0 * lam).norm());
        let (x, xp) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let kern = s.resolvent_kernel(lam, x, xp)?;
        let expect = I / (2.0 * lam) * (I * lam * (x - xp).abs()).exp();
        worst = worst.max((kern - expect).norm() / expect.norm());
    }
    Ok(worst)
}

/// Planted-root polynomials: worst location error and whether all counts match.
fn planted_check(rng: &mut ChaCha8Rng, tol: f64) -> Result<(f64, bool)> {
    let mut worst: f64 = 0.0;
    let mut counts = true;
    for _ in 0..20 {
        let deg = rng.gen_range(1..=6);
        let mut roots: Vec<Complex64> = Vec::new();
        while roots.len() < deg {
            let r = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if roots.iter().all(|q| (q - r).norm() > 0.05) {
                roots.push(r);
            }
        }
        let f = |z: Complex64| roots.iter().map(|r| z - r).product::<Complex64>();
        let lo = Complex64::new(-1.3 + 0.0123, -1.3 - 0.0071);
        let hi = Complex64::new(1.3 + 0.0123, 1.3 - 0.0071);
        let rep = locate_zeros(&f, lo, hi, &ZeroOptions::with_tol(tol))?;
        counts &= rep.multiplicity_sum() == deg as i64 && rep.zeros.len() == deg;
        for r in &roots {
            worst = worst.max(nearest(*r, rep.zeros.iter().map(|z| z.location)));
        }
    }
    Ok((worst, counts))
}

/// Zeros of `W` from local minima of `|W|` on a grid, polished by Newton.
fn grid_scan(s: &Scatterer, lo: Complex64, hi: Complex64, n: usize) -> Vec<Complex64> {
    let at = |i: usize, j: usize| {
        Complex64::new(
            lo.re + (hi.re - lo.re) * i as f64 / n as f64,
            lo.im + (hi.im - lo.im) * j as f64 / n as f64,
        )
    };
    let vals: Vec<Vec<f64>> = (0..=n).map(|i| (0..=n).map(|j| s.wronskian(at(i, j)).norm()).collect()).collect();
    let mut found: Vec<Complex64> = Vec::new();
    for i in 1..n {
        for j in 1..n {
            let v = vals[i][j];
            let is_min = (i - 1..=i + 1).all(|a| (j - 1..=j + 1).all(|b| (a, b) == (i, j) || vals[a][b] > v));
            if !is_min {
                continue;
            }
            if let Ok(z) = newton_zero(s, at(i, j)) {
                let inside = z.re > lo.re && z.re < hi.re && z.im > lo.im && z.im < hi.im;
                if inside && found.iter().all(|w| (w - z).norm() > 1e-8) {
                    found.push(z);
                }
            }
        }
    }
    found
}

/// Engine zeros vs grid-scan zeros for one well: worst distance and count match.
fn well_scan_check(s: &Scatterer, tol: f64) -> Result<(f64, bool, Vec<Complex64>, Vec<Complex64>)> {
    let lo = Complex64::new(-3.0 + 0.0137, -2.0 + 0.0093);
    let hi = Complex64::new(3.0 + 0.0137, 3.0 + 0.0093);
    let engine = s.find_resonances(lo, hi, &ZeroOptions::with_tol(tol))?;
    let engine: Vec<Complex64> = engine.hits.iter().map(|h| h.lambda).collect();
    let scanned = grid_scan(s, lo, hi, 240);
    let worst = scanned
        .iter()
        .map(|z| nearest(*z, engine.iter().copied()))
        .chain(engine.iter().map(|z| nearest(*z, scanned.iter().copied())))
        .fold(0.0, f64::max);
    Ok((worst, engine.len() == scanned.len(), engine, scanned))
}

fn resolvent_decay(s: &Scatterer, n: usize) -> Result<(f64, f64)> {
    let chi = s.support();
    let at = |lam: f64| -> Result<f64> { Ok(lam * s.cutoff_resolvent_hs_norm(Complex64::new(lam, 0.0), chi, n)?) };
    let v100 = at(100.0)?;
    let mut sup: f64 = 0.0;
    for i in 0..=190 {
        sup = sup.max(at(5.0 + 0.5 * i as f64)?);
    }
    Ok((sup, v100))
}

fn identity_suite(ctx: &Ctx) -> RunResult {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let sumis0 = sumis0_check(&mut rng)?;
    let lambert = lambert_check(&mut rng)?;
    let surface = surface_check(&mut rng);
    let free = free_1d_check(&mut rng)?;
    let (planted, planted_counts) = planted_check(&mut rng, 1e-12)?;
    let wells = [
        ("square_well", Scatterer::square(-4.0, 1.0)?),
        ("well_bump_v0", Scatterer::from_profile(&crate::potential::well_bump(6.0, 1.0).average_v0(), 128)?),
    ];
    let mut rows = Vec::new();
    let mut scan_worst: f64 = 0.0;
    let mut scan_counts = true;
    let mut scan_tables = Vec::new();
    for (name, s) in &wells {
        let (worst, counts, engine, scanned) = well_scan_check(s, 1e-12)?;
        scan_worst = scan_worst.max(worst);
        scan_counts &= counts;
        for z in &engine {
            rows.push(
                ResultRow::new(ctx.name(), 0, Method::Direct, *z, 0, s.n_slabs()).error(nearest(*z, scanned.iter().copied()), 0.0),
            );
        }
        scan_tables.push(json!({"well": name, "engine": engine.iter().map(|z| complex(*z)).collect::<Vec<_>>(), "scan": scanned.iter().map(|z| complex(*z)).collect::<Vec<_>>()}));
    }
    let (sup, v100) = resolvent_decay(&ctx.scatterer_v0()?, 200)?;
    let decay_ok = sup.is_finite() && (sup - v100).abs() <= 0.2 * v100;
    let criteria = vec![
        Criterion::new("sumis0", sumis0 < 1e-12, format!("relative residual {sumis0:.3e} (limit 1e-12)")),
        Criterion::new("lambert-w", lambert < 1e-13, format!("scaled residual {lambert:.3e} (limit 1e-13)")),
        Criterion::new("surface-algebra", surface < 1e-12, format!("tau_k^2 - tau_j^2 - (j^2 - k^2) relative {surface:.3e} (limit 1e-12)")),
        Criterion::new("free-1d", free < 1e-12, format!("free W and kernel relative error {free:.3e} (limit 1e-12)")),
        Criterion::new(
            "zero-engine",
            planted < 1e-9 && planted_counts && scan_worst < 1e-9 && scan_counts,
            format!("planted roots {planted:.3e}, grid scan {scan_worst:.3e} (limit 1e-9)"),
        ),
        Criterion::new(
            "resolvent-decay",
            decay_ok,
            format!("sup lambda |chi R chi|_HS = {sup:.6} vs {v100:.6} at lambda = 100 (within 20%)"),
        ),
    ];
    let tables = json!({
        "sumis0_relative": num(sumis0), "lambert_residual": num(lambert), "surface_relative": num(surface),
        "free_relative": num(free), "planted_max_error": num(planted), "planted_counts": planted_counts,
        "scan_max_error": num(scan_worst), "scan_counts": scan_counts, "wells": scan_tables,
        "resolvent_sup": num(sup), "resolvent_at_100": num(v100),
    });
    Ok((rows, criteria, tables))
}
