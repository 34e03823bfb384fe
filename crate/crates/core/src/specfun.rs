//! Special functions shared by the deterministic solvers.
//!
//! The centrepiece is the log-kernel moment
//!
//! ```text
//! G(x, y) = (1/pi) * int_0^1 sqrt(t (1 - t)) * log(t + x) / (t + y) dt
//! ```
//!
//! which, after an affine map of the support onto `[0, 1]`, gives every
//! logarithmic moment of the constrained eigenvalue densities in closed form.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Arguments of [`g_fn`].
///
/// `x >= 0` (the value at `x = 0` is the continuous `x -> 0+` limit) and
/// `y > 0` or `y < -1`. The two edge values `y = 0` and `y = -1` are
/// accepted as continuity limits: the square-root term of the closed form
/// vanishes there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GArgs {
    pub x: f64,
    pub y: f64,
}

impl GArgs {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("G(x, y) requires x >= 0, got x = {x}")));
        }
        if !y.is_finite() || (y > -1.0 && y < 0.0) {
            return Err(Error::Domain(format!(
                "G(x, y) requires y >= 0 or y <= -1, got y = {y}"
            )));
        }
        Ok(Self { x, y })
    }
}

/// Closed form of `G(x, y)`.
pub fn g_fn(args: GArgs) -> f64 {
    g_fn_split(args.x, args.y, 1.0 + args.y)
}

/// [`g_fn`] with `y1 = 1 + y` supplied by the caller, for `y` next to -1.
pub(crate) fn g_fn_split(x: f64, y: f64, y1: f64) -> f64 {
    let sx = x.sqrt();
    let sx1 = (1.0 + x).sqrt();
    // (sqrt(1+x) - sqrt(x))^2 without cancellation for large x
    let gap = 1.0 / (sx1 + sx).powi(2);
    let mut value = (y + y1) * ((sx1 + sx) / 2.0).ln() - 0.5 * gap;
    if y != 0.0 && y1 != 0.0 {
        let ay = y.abs();
        let ay1 = y1.abs();
        let num = (x * ay1).sqrt() + (ay * (1.0 + x)).sqrt();
        let den = ay1.sqrt() + ay.sqrt();
        value -= 2.0 * y.signum() * (ay * ay1).sqrt() * (num / den).ln();
    }
    value
}

/// Checked variant of [`g_fn`].
pub fn g(x: f64, y: f64) -> Result<f64> {
    GArgs::new(x, y).map(g_fn)
}

/// `I3(x) = -G(x, -1)`.
pub fn i3_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("I3(x) requires x > 0, got x = {x}")));
    }
    Ok(-g_fn(GArgs { x, y: -1.0 }))
}

/// `(1/pi) * int_0^1 sqrt(t (1 - t)) / (t + y) dt` for `y` outside `(-1, 0)`.
///
/// The zeroth moment companion of [`g_fn`].
pub fn g_mass(y: f64) -> f64 {
    g_mass_split(y, 1.0 + y)
}

/// [`g_mass`] with `y1 = 1 + y` supplied by the caller.
pub(crate) fn g_mass_split(y: f64, y1: f64) -> f64 {
    // y + 1/2 - sgn(y) sqrt|y (1 + y)|, rationalized so large |y| does not cancel
    if y >= 0.0 {
        0.25 / (y + 0.5 + (y * y1).sqrt())
    } else {
        let m = -y;
        -0.25 / (m - 0.5 + (m * -y1).sqrt())
    }
}

/// Gaussian upper tail `Q(x) = P(Z > x)`.
pub fn q_fn(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `log Q(x)`, accurate where `Q(x)` itself underflows.
pub fn log_q_fn(x: f64) -> f64 {
    if x < 35.0 {
        return q_fn(x).ln();
    }
    let u = 1.0 / (x * x);
    -0.5 * x * x - (x * (2.0 * PI).sqrt()).ln() + (1.0 - u + 3.0 * u * u - 15.0 * u * u * u).ln()
}

/// `log Gamma(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// All elementary symmetric polynomials `e_0 ..= e_n` of `values`.
///
/// One-value-at-a-time update `e_d <- e_d + v * e_{d-1}`, descending in `d`.
pub fn elementary_symmetric_all(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (count, &v) in values.iter().enumerate() {
        for d in (1..=count + 1).rev() {
            e[d] += v * e[d - 1];
        }
    }
    e
}

/// Elementary symmetric polynomial of the given degree.
pub fn elementary_symmetric(values: &[f64], degree: usize) -> Result<f64> {
    if degree > values.len() {
        return Err(Error::Domain(format!(
            "degree {degree} exceeds the number of values {}",
            values.len()
        )));
    }
    Ok(elementary_symmetric_all(values)[degree])
}

/// Weight function for [`quadrature_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// Plain integral of `f`.
    Unit,
    /// `sqrt((x - a)(b - x)) * f(x)`.
    SqrtEndpoints,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

const QUAD_TOL: f64 = 1e-11;
const QUAD_MAX_PANELS: usize = 20_000;
const GL_ORDER: usize = 15;

fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn panel(h: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (nodes, weights) = gauss_legendre();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    nodes
        .iter()
        .zip(weights)
        .map(|(&t, &w)| w * h(mid + half * t))
        .sum::<f64>()
        * half
}

/// Adaptive Gauss-Legendre integration of `f` over `[a, b]`.
///
/// The interval is mapped through `x = a + (b - a) sin^2(theta)`, which
/// absorbs inverse-square-root endpoint singularities as well as the
/// square-root weight. Panels are bisected until the two-half estimate
/// agrees with the whole-panel estimate.
pub fn quadrature_oracle(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    weight: Weight,
) -> Result<Quadrature> {
    if !(b > a) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    let span = b - a;
    let h = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let x = a + span * s * s;
        let jac = span * 2.0 * s * c;
        let w = match weight {
            Weight::Unit => 1.0,
            Weight::SqrtEndpoints => span * s * c,
        };
        if jac == 0.0 || w == 0.0 {
            0.0
        } else {
            f(x) * jac * w
        }
    };

    let mut stack = vec![(0.0, FRAC_PI_2, panel(&h, 0.0, FRAC_PI_2), 0u32)];
    let mut total = 0.0;
    let mut error = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&h, lo, mid);
        let right = panel(&h, mid, hi);
        let diff = (left + right - whole).abs();
        let local_tol = QUAD_TOL * ((hi - lo) / FRAC_PI_2).max(1e-3);
        panels += 1;
        if diff <= local_tol || depth >= 60 || panels > QUAD_MAX_PANELS {
            total += left + right;
            error += diff;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    if !total.is_finite() || error > 100.0 * QUAD_TOL * total.abs().max(1.0) {
        return Err(Error::Quadrature { estimate: total, error });
    }
    Ok(Quadrature { value: total, error })
}
