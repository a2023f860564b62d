//! Extended-precision complex arithmetic on top of `astro-float`.
//!
//! Numbers carry [`PREC`] mantissa bits (about 57 decimal digits). Used for
//! the extended-precision determinant and to re-evaluate closed forms as an
//! independent check on double-precision results.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_complex::Complex64;

/// Mantissa bits of extended numbers.
pub const PREC: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Real extended number.
#[derive(Clone, Debug)]
pub struct Xf(pub BigFloat);

impl Xf {
    pub fn from_f64(x: f64) -> Self {
        Self(BigFloat::from_f64(x, PREC))
    }

    pub fn zero() -> Self {
        Self::from_f64(0.0)
    }

    /// Parses a decimal literal at full precision.
    pub fn parse(s: &str) -> Self {
        Self(with_cc(|cc| BigFloat::parse(s, astro_float::Radix::Dec, PREC, RM, cc)))
    }

    pub fn pi() -> Self {
        Self(with_cc(|cc| cc.pi(PREC, RM)))
    }

    pub fn add(&self, o: &Xf) -> Xf {
        Xf(self.0.add(&o.0, PREC, RM))
    }

    pub fn sub(&self, o: &Xf) -> Xf {
        Xf(self.0.sub(&o.0, PREC, RM))
    }

    pub fn mul(&self, o: &Xf) -> Xf {
        Xf(self.0.mul(&o.0, PREC, RM))
    }

    pub fn div(&self, o: &Xf) -> Xf {
        Xf(self.0.div(&o.0, PREC, RM))
    }

    pub fn neg(&self) -> Xf {
        Xf(self.0.neg())
    }

    pub fn sqrt(&self) -> Xf {
        Xf(self.0.sqrt(PREC, RM))
    }

    pub fn exp(&self) -> Xf {
        Xf(with_cc(|cc| self.0.exp(PREC, RM, cc)))
    }

    pub fn sin(&self) -> Xf {
        Xf(with_cc(|cc| self.0.sin(PREC, RM, cc)))
    }

    pub fn cos(&self) -> Xf {
        Xf(with_cc(|cc| self.0.cos(PREC, RM, cc)))
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Nearest-ish `f64` (within one ulp).
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, sign, exp, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        if words.iter().all(|w| *w == 0) {
            return 0.0;
        }
        // value = 0.m × 2^exp with the most significant word last
        let bits = Word::BITS as i32;
        let mut v = 0.0;
        for (k, w) in words.iter().rev().take(3).enumerate() {
            v += (*w as f64) * 2f64.powi(-bits * (k as i32 + 1));
        }
        v = ldexp(v, exp);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }
}

/// `x · 2^e` without intermediate overflow or underflow of the scale factor.
fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

/// Complex extended number.
#[derive(Clone, Debug)]
pub struct Xc {
    pub re: Xf,
    pub im: Xf,
}

impl Xc {
    pub fn new(re: Xf, im: Xf) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Xf::zero(), Xf::zero())
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn i() -> Self {
        Self::new(Xf::zero(), Xf::from_f64(1.0))
    }

    pub fn real(x: f64) -> Self {
        Self::new(Xf::from_f64(x), Xf::zero())
    }

    pub fn from_c64(z: Complex64) -> Self {
        Self::new(Xf::from_f64(z.re), Xf::from_f64(z.im))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(&self, o: &Xc) -> Xc {
        Xc::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Xc) -> Xc {
        Xc::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &Xc) -> Xc {
        Xc::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn div(&self, o: &Xc) -> Xc {
        let d = o.norm_sqr();
        let n = self.mul(&o.conj());
        Xc::new(n.re.div(&d), n.im.div(&d))
    }

    pub fn neg(&self) -> Xc {
        Xc::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Xc {
        Xc::new(self.re.clone(), self.im.neg())
    }

    pub fn scale(&self, s: &Xf) -> Xc {
        Xc::new(self.re.mul(s), self.im.mul(s))
    }

    pub fn norm_sqr(&self) -> Xf {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    /// Modulus rounded to `f64`.
    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn exp(&self) -> Xc {
        let r = self.re.exp();
        Xc::new(r.mul(&self.im.cos()), r.mul(&self.im.sin()))
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> Xc {
        if self.is_zero() {
            return Xc::zero();
        }
        let half = Xf::from_f64(0.5);
        let modulus = self.norm_sqr().sqrt();
        let t = modulus.add(&Xf(self.re.0.abs())).mul(&half).sqrt();
        let two_t = t.add(&t);
        if !self.re.is_negative() {
            Xc::new(t, self.im.div(&two_t))
        } else {
            let r = Xf(self.im.0.abs()).div(&two_t);
            let neg_im = self.im.is_negative();
            Xc::new(r, if neg_im { t.neg() } else { t })
        }
    }

    pub fn powi(&self, n: u32) -> Xc {
        let mut out = Xc::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }
}

/// Dense row-major matrix of [`Xc`].
#[derive(Clone, Debug)]
pub struct XMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Xc>,
}

impl XMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Xc::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Xc::one());
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Xc {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Xc) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &XMatrix) -> XMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = XMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn add(&self, o: &XMatrix) -> XMatrix {
        XMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, s: &Xf) -> XMatrix {
        XMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.scale(s)).collect(),
        }
    }

    /// Largest row sum of moduli.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `exp(self)` by scaling and squaring with a Taylor kernel.
    pub fn exp(&self) -> XMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let norm = self.norm_inf();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let a = self.scale(&Xf::from_f64(0.5f64.powi(squarings as i32)));
        let mut term = XMatrix::identity(n);
        let mut sum = XMatrix::identity(n);
        // 0.5^k / k! < 2^-200 by k = 45
        for k in 1..=45 {
            let inv_k = Xf::from_f64(1.0).div(&Xf::from_f64(k as f64));
            term = term.mul(&a).scale(&inv_k);
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Xc {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Xc::one();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a.get(i, k).abs().total_cmp(&a.get(j, k).abs()))
                .unwrap();
            if a.get(p, k).is_zero() {
                return Xc::zero();
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                det = det.neg();
            }
            let piv = a.get(k, k).clone();
            det = det.mul(&piv);
            for i in k + 1..n {
                let f = a.get(i, k).div(&piv);
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = a.get(i, j).sub(&f.mul(a.get(k, j)));
                    a.set(i, j, v);
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_decimal_reference() {
        // e^{0.7} and sin(2.3) to 50 digits, from an independent multiprecision library
        let e = Xf::from_f64(0.7).exp();
        let e_ref = Xf::parse("2.013752707470476432195964519184246838532090514047");
        let d = e.sub(&e_ref).to_f64().abs();
        assert!(d < 1e-48, "{d:e}");
        let s = Xf::from_f64(2.3).sin();
        let s_ref = Xf::parse("0.74570521217672029573980294452374033766965031051549");
        assert!(s.sub(&s_ref).to_f64().abs() < 1e-48);
    }

    #[test]
    fn to_f64_round_trip() {
        for x in [1.0, -3.25, 1e-300, 6.02e23, std::f64::consts::PI] {
            assert_eq!(Xf::from_f64(x).to_f64(), x);
        }
        assert_eq!(Xf::zero().to_f64(), 0.0);
    }

    #[test]
    fn complex_sqrt_branch() {
        for z in [
            Complex64::new(2.0, 0.0),
            Complex64::new(-3.0, 1e-3),
            Complex64::new(-3.0, -1e-3),
            Complex64::new(0.1, -7.0),
        ] {
            let s = Xc::from_c64(z).sqrt();
            let back = s.mul(&s).sub(&Xc::from_c64(z));
            assert!(back.abs() < 1e-50 * z.norm().max(1.0));
            assert!((s.to_c64() - z.sqrt()).norm() < 1e-15 * z.norm().sqrt());
        }
    }

    #[test]
    fn euler_identity() {
        let v = Xc::new(Xf::zero(), Xf::pi()).exp().add(&Xc::one());
        assert!(v.abs() < 1e-55);
    }

    #[test]
    fn vandermonde_determinant() {
        let mut m = XMatrix::zeros(3, 3);
        for (i, x) in [1.0, 2.0, 3.0].into_iter().enumerate() {
            for j in 0..3 {
                m.set(i, j, Xc::real(f64::powi(x, j as i32)));
            }
        }
        assert!(m.det().sub(&Xc::real(2.0)).abs() < 1e-50);
    }

    #[test]
    fn matrix_exp_of_rotation_generator() {
        // exp([[0, t], [-t, 0]]) = [[cos t, sin t], [-sin t, cos t]]
        let t = 7.5;
        let mut g = XMatrix::zeros(2, 2);
        g.set(0, 1, Xc::real(t));
        g.set(1, 0, Xc::real(-t));
        let e = g.exp();
        assert!(e.get(0, 0).sub(&Xc::new(Xf::from_f64(t).cos(), Xf::zero())).abs() < 1e-45);
        assert!(e.get(0, 1).sub(&Xc::new(Xf::from_f64(t).sin(), Xf::zero())).abs() < 1e-45);
    }
}
