//! Acceptance criteria, each recomputed from the rows and tables of a run of
//! the default configuration.

use std::time::{Duration, Instant};

use cylres::experiments::{run_with_threads, Experiment, ExperimentConfig, Outcome, ResultRow};
use num_complex::Complex64;
use serde_json::Value;

fn run(e: Experiment) -> (Outcome, Duration) {
    let cfg = ExperimentConfig::default_for(e);
    let t = Instant::now();
    let out = run_with_threads(&cfg, 4).unwrap_or_else(|err| panic!("{e} failed to run: {err}"));
    (out, t.elapsed())
}

fn report(n: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {n:2} {:4} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn rows_of<'a>(out: &'a Outcome, l: u32, method: &str) -> Vec<&'a ResultRow> {
    out.rows.iter().filter(|r| r.l == l && r.method == method).collect()
}

fn nearest(z: Complex64, set: &[Complex64]) -> f64 {
    set.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min)
}

fn c(v: &Value) -> Complex64 {
    Complex64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

#[test]
fn c01_example_near_threshold() {
    let (out, dt) = run(Experiment::ExampleThreshold);
    let disks = out.tables["disks"].as_array().unwrap();
    let mut per_tower = true;
    let mut scaled = Vec::new();
    for &l in &[8u32, 16, 32, 64] {
        for tower in ["plus", "minus"] {
            let d = disks.iter().find(|d| d["l"] == l && d["tower"] == tower).expect("disk entry");
            let off: Vec<Complex64> = d["zeros"]
                .as_array()
                .unwrap()
                .iter()
                .map(|z| c(&z["z"]))
                .filter(|z| z.norm() >= 1e-6 && z.norm() < 1.0)
                .collect();
            per_tower &= off.len() == 1;
        }
        let direct: Vec<Complex64> = rows_of(&out, l, "direct").iter().map(|r| r.z()).collect();
        let pred = rows_of(&out, l, "example-closed-form")[0].z();
        scaled.push(nearest(pred, &direct) * (l as f64).powi(2));
    }
    let bounded = scaled.iter().all(|&v| v <= 3.0 * scaled[0]);
    let fast = dt < Duration::from_secs(120);
    report(
        1,
        "example near-threshold",
        per_tower && bounded && fast,
        format!("one zero per tower: {per_tower}; |z - z_pred| l^2 = {scaled:.4?}; {:.1}s", dt.as_secs_f64()),
    );
}

#[test]
fn c02_pole_count() {
    let (out, dt) = run(Experiment::NearThreshold);
    let bound: Vec<Complex64> = out.tables["resonances_1d"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["bound_state"] == true)
        .map(|r| c(&r["lambda"]))
        .collect();
    let beta = bound.iter().copied().max_by(|a, b| a.im.total_cmp(&b.im)).expect("a bound state");
    let windings: Vec<&Value> = out.tables["windings"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|w| (c(&w["lambda"]) - beta).norm() < 1e-9)
        .collect();
    let mut ok = true;
    for &l in &[16u32, 32, 64] {
        for &k in &[3u32, 4, 5] {
            for tower in ["plus", "minus"] {
                let w = windings.iter().find(|w| w["l"] == l && w["K"] == k && w["tower"] == tower);
                ok &= w.is_some_and(|w| w["winding"] == 1);
            }
        }
    }
    let fast = dt < Duration::from_secs(180);
    report(
        2,
        "pole count",
        ok && fast,
        format!("winding 1 per tower over D_l({beta:.6}, 0.2) for l in 16,32,64 and K in 3,4,5: {ok}; {:.1}s", dt.as_secs_f64()),
    );
}

#[test]
fn c03_leading_correction() {
    let (out, dt) = run(Experiment::LeadingCorrection);
    let mut corrected = Vec::new();
    let mut zeroth = Vec::new();
    for &l in &[16u32, 32, 64] {
        let direct: Vec<Complex64> = rows_of(&out, l, "direct").iter().map(|r| r.z()).collect();
        let l3 = (l as f64).powi(3);
        corrected.push(nearest(rows_of(&out, l, "predicted-corrected")[0].z(), &direct) * l3);
        zeroth.push(nearest(rows_of(&out, l, "predicted-0th")[0].z(), &direct) * l3);
    }
    let rate = corrected.windows(2).all(|p| p[0].max(p[1]) < 2.5 * p[0].min(p[1]));
    let improves = corrected.iter().zip(&zeroth).all(|(a, b)| 5.0 * a <= *b);
    let fast = dt < Duration::from_secs(300);
    report(
        3,
        "leading correction",
        rate && improves && fast,
        format!(
            "corrected err l^3 = {corrected:.4?} (ratio < 2.5: {rate}); 0th err l^3 = {zeroth:.4?} (5x: {improves}); {:.1}s",
            dt.as_secs_f64()
        ),
    );
}

#[test]
fn c04_re_decay() {
    let (out, _) = run(Experiment::Polesequence);
    let re: Vec<f64> = [16u32, 32, 64]
        .iter()
        .map(|&l| {
            let d = rows_of(&out, l, "direct");
            assert_eq!(d.len(), 1, "one direct zero at l = {l}");
            d[0].z_re.abs() * (l as f64).powi(3)
        })
        .collect();
    let decreasing = re.windows(2).all(|p| p[1] < p[0]);
    report(4, "Re decay", decreasing, format!("|Re z| l^3 = {re:.4?}"));
}

#[test]
fn c05_example_logl() {
    let (out, dt) = run(Experiment::ExampleLogl);
    let per_l = out.tables["per_l"].as_array().unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for &l in &[32u32, 64] {
        let e = per_l.iter().find(|e| e["l"] == l).expect("entry");
        let limit = (l as f64).powf(-0.4);
        let zeros: Vec<Complex64> = e["zeros"].as_array().unwrap().iter().map(|z| c(&z["z"])).collect();
        let radius = 0.9 * (l as f64).ln();
        assert!(zeros.iter().all(|z| z.norm() < radius));
        let d = nearest(c(&e["prediction"]), &zeros);
        ok &= d <= limit;
        detail.push(format!("l = {l}: distance {d:.4} vs {limit:.4}"));
    }
    let fast = dt < Duration::from_secs(300);
    report(5, "example log-l pole", ok && fast, detail.join("; "));
}

#[test]
fn c06_resonance_free_scan() {
    let (out, _) = run(Experiment::ResonanceFreeScan);
    let annuli = out.tables["annuli"].as_array().unwrap();
    let mut ok = true;
    for &l in &[16u32, 32] {
        let these: Vec<&Value> = annuli.iter().filter(|a| a["l"] == l).collect();
        ok &= !these.is_empty();
        for a in these {
            let r_out = f(&a["r_out"]);
            ok &= a["count"] == 0 && (r_out - 0.5 * (l as f64).ln()).abs() < 1e-12;
        }
    }
    report(6, "resonance-free annulus", ok, format!("annulus windings {:?}", annuli.iter().map(|a| &a["count"]).collect::<Vec<_>>()));
}

#[test]
fn c07_to_c09_identity_suite() {
    let (out, dt) = run(Experiment::IdentitySuite);
    let t = &out.tables;
    let sumis0 = f(&t["sumis0_relative"]);
    let lambert = f(&t["lambert_residual"]);
    let surface = f(&t["surface_relative"]);
    let free = f(&t["free_relative"]);
    report(
        7,
        "identity suite",
        sumis0 < 1e-12 && lambert < 1e-13 && surface < 1e-12 && free < 1e-12,
        format!("sum {sumis0:.2e}, Lambert {lambert:.2e}, surface {surface:.2e}, free {free:.2e}"),
    );
    let planted = f(&t["planted_max_error"]);
    let scan = f(&t["scan_max_error"]);
    let counts = t["planted_counts"] == true && t["scan_counts"] == true;
    report(
        8,
        "zero-engine oracle",
        planted < 1e-9 && scan < 1e-9 && counts,
        format!("planted {planted:.2e}, grid scan {scan:.2e}, counts exact: {counts}"),
    );
    let sup = f(&t["resolvent_sup"]);
    let at100 = f(&t["resolvent_at_100"]);
    report(
        9,
        "resolvent decay",
        sup.is_finite() && (sup - at100).abs() <= 0.2 * at100 && dt < Duration::from_secs(60),
        format!("sup lambda |chi R chi|_HS = {sup:.6}, at 100: {at100:.6}"),
    );
}

#[test]
fn c10_conjugate_symmetry() {
    let (out, _) = run(Experiment::ExampleThreshold);
    let e = out.tables["mirror"].as_array().unwrap().iter().find(|e| e["l"] == 16).expect("l = 16 entry").clone();
    let d = f(&e["distance"]);
    let plus = out.tables["disks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["l"] == 16 && x["tower"] == "plus")
        .map(|x| x["zeros"].as_array().unwrap().len())
        .unwrap();
    let same_count = e["count"].as_u64() == Some(plus as u64);
    report(10, "conjugate symmetry", d < 1e-8 && same_count, format!("l = 16 mirror distance {d:.3e}, counts match: {same_count}"));
}
