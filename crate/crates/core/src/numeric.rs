//! Small numerical kernels shared across modules: adaptive Gauss–Kronrod
//! quadrature, bracketing bisection, golden-section minimisation and a
//! monotone cubic Hermite interpolant.

use crate::error::{Error, Result};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * GK_WEIGHTS_K[7];
    let mut gauss = fc * GK_WEIGHTS_G[3];
    for j in 0..7 {
        let dx = half * GK_NODES[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += GK_WEIGHTS_K[j] * pair;
        if j % 2 == 1 {
            gauss += GK_WEIGHTS_G[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive G7/K15 quadrature of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (value, err) = gauss_kronrod(&f, a, b);
    refine(&f, a, b, value, err, abs_tol, 0)
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    err: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    if err <= tol || depth >= 50 || (b - a).abs() < 1e-15 * a.abs().max(b.abs()).max(1.0) {
        return whole;
    }
    let mid = 0.5 * (a + b);
    let (left, el) = gauss_kronrod(f, a, mid);
    let (right, er) = gauss_kronrod(f, mid, b);
    refine(f, a, mid, left, el, 0.5 * tol, depth + 1)
        + refine(f, mid, b, right, er, 0.5 * tol, depth + 1)
}

/// Bisection for a sign change of `f` on `[lo, hi]` down to `abs_tol`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (a zero endpoint is returned
/// directly).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, abs_tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::BracketFailure(format!(
            "f({lo}) = {f_lo} and f({hi}) = {f_hi} do not bracket a root"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= abs_tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`; returns
/// `(argmin, min)`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// Piecewise cubic Hermite interpolant through increasing data with the
/// Fritsch–Carlson limiter applied to the supplied slopes, so the result is
/// monotone whenever the data are.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, mut slopes: Vec<f64>) -> Self {
        assert!(xs.len() >= 2 && xs.len() == ys.len() && ys.len() == slopes.len());
        for i in 0..xs.len() - 1 {
            let h = xs[i + 1] - xs[i];
            let secant = (ys[i + 1] - ys[i]) / h;
            if secant == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let a = slopes[i] / secant;
            let b = slopes[i + 1] / secant;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                slopes[i] = tau * a * secant;
                slopes[i + 1] = tau * b * secant;
            }
        }
        Self { xs, ys, slopes }
    }

    pub fn first_x(&self) -> f64 {
        self.xs[0]
    }

    pub fn last_x(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn first_y(&self) -> f64 {
        self.ys[0]
    }

    pub fn last_y(&self) -> f64 {
        self.ys[self.ys.len() - 1]
    }

    /// Evaluates inside `[first_x, last_x]`; clamps outside.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.first_x() {
            return self.first_y();
        }
        if x >= self.last_x() {
            return self.last_y();
        }
        let i = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}
