use cylres::asymptotics::lambert_w;
use cylres::experiments::{csv_string, ResultRow};
use cylres::surface::{chart_radius, tau, SurfacePoint};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn tau_squares_differ_by_integers(l in 2u32..200, r in 0.0f64..0.95, arg in 0.0f64..std::f64::consts::TAU, j in 0u32..210, k in 0u32..210) {
        let z = Complex64::from_polar(r * chart_radius(l), arg);
        let p = SurfacePoint::new(l, z).unwrap();
        let (tj, tk) = (tau(&p, j), tau(&p, k));
        let lhs = tk * tk - tj * tj;
        let rhs = (j as f64).powi(2) - (k as f64).powi(2);
        let scale = tj.norm_sqr().max(tk.norm_sqr()).max(1.0);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        prop_assert_eq!(tau(&p, l), z);
    }

    #[test]
    fn lambert_inverts_w_exp_w(nu in -3i32..=3, re in -50.0f64..50.0, im in -50.0f64..50.0) {
        let w = Complex64::new(re, im);
        prop_assume!(w.norm() > 1e-8);
        let x = lambert_w(nu, w).unwrap();
        prop_assert!((x * x.exp() - w).norm() < 1e-13 * w.norm().max(1.0));
    }

    #[test]
    fn csv_floats_round_trip(l in 1u32..1000, re in any::<f64>(), im in -1e300f64..1e300) {
        prop_assume!(re.is_finite());
        let row = ResultRow::new("prop", l, "direct", Complex64::new(re, im), 4, 256);
        let text = csv_string(&[row]).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rec = rd.records().next().unwrap().unwrap();
        prop_assert_eq!(rec[3].parse::<f64>().unwrap(), re);
        prop_assert_eq!(rec[4].parse::<f64>().unwrap(), im);
    }
}
