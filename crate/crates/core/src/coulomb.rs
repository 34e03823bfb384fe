//! Large-`Nt` Coulomb-gas solver for the rate-constrained eigenvalue density
//! and the rate function `dE(r) = E(r) - E0`.
//!
//! With the rate constraint enforced by a multiplier `k`, the eigenvalues
//! feel an external force with three simple poles:
//!
//! ```text
//! x = 1   charge -n0        (repulsion from the upper hard wall)
//! x = 0   charge -(beta-1)  (repulsion from the lower hard wall)
//! x = -z  charge -k         (the rate constraint, z = 1/rho)
//! ```
//!
//! On a single-interval support `[a, b]` the equilibrium density is
//!
//! ```text
//! p(x) = sqrt((x - a)(b - x)) / (2 pi) * sum_i w_i / (x - x_i)
//! ```
//!
//! where the sum runs over the poles and over any endpoint pinned to a hard
//! wall. A soft endpoint `e` requires `N(e) = 0`, with
//!
//! ```text
//! N(x) = -sum_j c_j sigma_j / (x - x_j) + 2 - sum_j c_j,
//! sigma_j = +sqrt((x_j - a)(x_j - b)) for x_j >= b, -sqrt((a - x_j)(b - x_j)) for x_j <= a.
//! ```
//!
//! The four regimes differ only in which endpoints are soft:
//! `S01` (both hard), `S0b` (soft `b`), `Sa1` (soft `a`) and `Sab` (both soft).
//! Mass, rate and energy are sums of [`g_mass`] and [`g_fn`] terms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ensemble::{ChannelDims, SnrParam};
use crate::error::{Error, Result};
use crate::montecarlo::{Method, OutageEstimate};
use crate::specfun::{g_fn_split, g_mass_split, log_q_fn, q_fn};

/// Tolerance on the soft-edge residuals `N(a)`, `N(b)`, relative to the
/// scale of the charges.
const EDGE_TOL: f64 = 1e-12;

/// Continuous parameters of the gas in the normalized frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    /// `N0 / Nt`.
    pub n0: f64,
    /// `Nr / Nt`.
    pub beta: f64,
    pub snr: SnrParam,
    /// Deterministic rate contributed by eigenvalues pinned at 1.
    pub offset: f64,
}

impl GasParams {
    pub fn new(n0: f64, beta: f64, snr: SnrParam) -> Result<Self> {
        if !(n0 >= 0.0) || !n0.is_finite() {
            return Err(Error::Domain(format!("n0 must be finite and nonnegative, got {n0}")));
        }
        if !(beta >= 1.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta must be finite and at least 1, got {beta}")));
        }
        Ok(Self { n0, beta, snr, offset: 0.0 })
    }

    pub fn from_dims(dims: &ChannelDims, snr: SnrParam) -> Self {
        Self { n0: dims.n0_ratio(), beta: dims.beta(), snr, offset: dims.rate_offset(snr) }
    }

    /// Open interval of achievable rates.
    pub fn rate_range(&self) -> (f64, f64) {
        (self.offset, self.offset + self.snr.capacity())
    }

    fn check_rate(&self, r: f64) -> Result<()> {
        let (low, high) = self.rate_range();
        if !(r > low && r < high) {
            return Err(Error::RateOutOfRange { rate: r, low, high });
        }
        Ok(())
    }

    fn charge_scale(&self, k: f64) -> f64 {
        2.0 + self.n0 + self.beta + k.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    S01,
    S0b,
    Sa1,
    Sab,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::S01 => "S01",
            Regime::S0b => "S0b",
            Regime::Sa1 => "Sa1",
            Regime::Sab => "Sab",
        };
        f.write_str(s)
    }
}

impl Regime {
    fn hard_edges(self) -> (bool, bool) {
        match self {
            Regime::S01 => (true, true),
            Regime::S0b => (true, false),
            Regime::Sa1 => (false, true),
            Regime::Sab => (false, false),
        }
    }
}

/// `c * log(v)` with `0 * log(0) = 0`.
fn xlog(c: f64, v: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * v.ln()
    }
}

/// The force field at a fixed multiplier `k`.
#[derive(Debug, Clone, Copy)]
struct Field {
    poles: [(f64, f64); 3],
    len: usize,
    constant: f64,
}

impl Field {
    fn new(gas: &GasParams, k: f64) -> Self {
        let mut poles = [(0.0, 0.0); 3];
        let mut len = 0;
        for (x, c) in [(1.0, -gas.n0), (0.0, -(gas.beta - 1.0)), (-gas.snr.z, -k)] {
            if c != 0.0 {
                poles[len] = (x, c);
                len += 1;
            }
        }
        let constant = 2.0 - poles[..len].iter().map(|p| p.1).sum::<f64>();
        Self { poles, len, constant }
    }

    fn poles(&self) -> &[(f64, f64)] {
        &self.poles[..self.len]
    }

    /// `sigma(x_j)` for the support `[a, 1 - w]`, with `b - x_j` computed
    /// exactly for the pole at 1.
    fn sigma_gap(xj: f64, a: f64, w: f64) -> (f64, f64) {
        let db = if xj == 1.0 { -w } else { (1.0 - xj) - w };
        let sigma = if db <= 0.0 { ((xj - a) * -db).sqrt() } else { -((a - xj) * db).sqrt() };
        (sigma, db)
    }

    /// Edge function `N` at `a` (`lower`) or at `b` for the support `[a, 1 - w]`.
    fn n_edge(&self, lower: bool, a: f64, w: f64) -> f64 {
        let sum: f64 = self
            .poles()
            .iter()
            .map(|&(xj, c)| {
                let (sigma, db) = Self::sigma_gap(xj, a, w);
                c * sigma / if lower { a - xj } else { db }
            })
            .sum();
        self.constant - sum
    }

    /// `(N(a), N(b))` and its Jacobian in `(a, w)`, where `w = 1 - b`.
    ///
    /// Working with the gap `w` keeps full relative precision when the upper
    /// edge is within a few ulps of the wall at 1.
    fn soft_system(&self, a: f64, w: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let mut f = [self.constant; 2];
        let mut jac = [[0.0; 2]; 2];
        for &(xj, c) in self.poles() {
            let da = a - xj;
            let (sigma, db) = Self::sigma_gap(xj, a, w);
            let cs = c * sigma;
            f[0] -= cs / da;
            f[1] -= cs / db;
            jac[0][0] += cs / (2.0 * da * da);
            jac[1][1] -= cs / (2.0 * db * db);
            jac[0][1] += cs / (2.0 * da * db);
            jac[1][0] -= cs / (2.0 * da * db);
        }
        (f, jac)
    }
}

/// Support and pole weights of a density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub a: f64,
    pub b: f64,
    /// `1 - b`, kept separately so edges next to the wall at 1 stay resolved.
    pub gap: f64,
    /// `(x_i, w_i)` such that `p(x) = sqrt((x-a)(b-x))/(2 pi) sum w_i/(x - x_i)`.
    pub weights: Vec<(f64, f64)>,
}

impl Profile {
    fn new(field: &Field, regime: Regime, a: f64, gap: f64) -> Self {
        let (hard_a, hard_b) = regime.hard_edges();
        let b = 1.0 - gap;
        let delta = b - a;
        let mut weights: Vec<(f64, f64)> =
            field.poles().iter().map(|&(xj, c)| (xj, c / Field::sigma_gap(xj, a, gap).0)).collect();
        if hard_a {
            weights.push((a, field.n_edge(true, a, gap) / delta));
        }
        if hard_b {
            weights.push((b, -field.n_edge(false, a, gap) / delta));
        }
        Self { a, b, gap, weights }
    }

    pub fn density(&self, x: f64) -> f64 {
        if !(x > self.a && x < self.b) {
            return 0.0;
        }
        let root = ((x - self.a) * (self.b - x)).sqrt();
        let sum: f64 = self.weights.iter().map(|&(xi, w)| w / (x - xi)).sum();
        (root * sum / (2.0 * std::f64::consts::PI)).max(0.0)
    }

    /// `(w_i, y_i, 1 + y_i)` with `y_i = (a - x_i) / (b - a)`.
    fn terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let delta = self.b - self.a;
        self.weights.iter().map(move |&(xi, w)| {
            let y1 = if xi == 1.0 { -self.gap } else { self.b - xi };
            (w, (self.a - xi) / delta, y1 / delta)
        })
    }

    pub fn mass(&self) -> f64 {
        0.5 * (self.b - self.a) * self.terms().map(|(w, y, y1)| w * g_mass_split(y, y1)).sum::<f64>()
    }

    /// `int p(x) log|x - u| dx` for `u` outside `(a, b)`.
    pub fn log_moment(&self, u: f64) -> f64 {
        let delta = self.b - self.a;
        let ld = delta.ln();
        let total: f64 = if u <= self.a {
            let x = (self.a - u) / delta;
            self.terms().map(|(w, y, y1)| w * (ld * g_mass_split(y, y1) + g_fn_split(x, y, y1))).sum()
        } else {
            debug_assert!(u >= self.b);
            let x = if u == 1.0 { self.gap } else { u - self.b } / delta;
            self.terms().map(|(w, y, y1)| w * (ld * g_mass_split(y, y1) - g_fn_split(x, -y1, -y))).sum()
        };
        0.5 * delta * total
    }
}

/// Solution of the constrained problem at one multiplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSolution {
    pub regime: Regime,
    pub a: f64,
    pub b: f64,
    /// Multiplier, equal to `dE/dr`: negative below `r_erg`, positive above.
    pub k: f64,
    pub r: f64,
    pub energy: f64,
    /// `E(r) - E0`.
    pub exponent: f64,
    pub mass: f64,
    pub profile: Profile,
}

/// Constrained density; zero outside the support.
pub fn density_at(sol: &RegimeSolution, x: f64) -> f64 {
    sol.profile.density(x)
}

/// Solution on the support `[a, 1 - gap]`.
fn assemble(gas: &GasParams, k: f64, regime: Regime, a: f64, gap: f64) -> RegimeSolution {
    let field = Field::new(gas, k);
    let profile = Profile::new(&field, regime, a, gap);
    let b = profile.b;
    let mass = profile.mass();
    let rate = gas.snr.rho.ln() * mass + profile.log_moment(-gas.snr.z);
    let (n0, bm1) = (gas.n0, gas.beta - 1.0);
    let upper = if n0 != 0.0 { profile.log_moment(1.0) } else { 0.0 };
    let lower = if bm1 != 0.0 { profile.log_moment(0.0) } else { 0.0 };
    let energy = 0.5 * k * (rate - (gas.snr.rho * b).ln_1p())
        - xlog(0.5 * n0, gap)
        - xlog(0.5 * bm1, b)
        - profile.log_moment(b)
        - 0.5 * n0 * upper
        - 0.5 * bm1 * lower;
    RegimeSolution {
        regime,
        a,
        b,
        k,
        r: rate + gas.offset,
        energy,
        exponent: energy - ergodic_energy(gas),
        mass,
        profile,
    }
}

fn ergodic_energy(gas: &GasParams) -> f64 {
    let f = |v: f64| if v == 0.0 { 0.0 } else { 0.5 * v * v * v.ln() };
    let (n, b) = (gas.n0, gas.beta);
    f(b + n + 1.0) - f(b + n) - f(b) + f(b - 1.0) - f(1.0 + n) + f(n)
}

/// Ergodic (unconstrained) quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicSummary {
    pub a0: f64,
    pub b0: f64,
    pub r_erg: f64,
    /// Limit of `Nt^2 Var(I)`.
    pub v_erg: f64,
    pub e0: f64,
    n0: f64,
    beta: f64,
}

impl ErgodicSummary {
    /// Unconstrained eigenvalue density `p0`.
    pub fn density(&self, x: f64) -> f64 {
        if !(x > self.a0 && x < self.b0) {
            return 0.0;
        }
        let num = (self.n0 + 1.0 + self.beta) * ((x - self.a0) * (self.b0 - x)).sqrt();
        num / (2.0 * std::f64::consts::PI * x * (1.0 - x))
    }
}

/// Endpoints of the unconstrained support.
pub fn ergodic_support(n0: f64, beta: f64) -> (f64, f64) {
    let s = n0 + 1.0 + beta;
    let (u, v) = ((1.0 + n0).sqrt(), (beta * (n0 + beta)).sqrt());
    // a0 = (u - v)^2 / s^2 = (u^2 - v^2)^2 / (s^2 (u + v)^2) avoids cancellation.
    let diff = (1.0 + n0 - beta * (n0 + beta)) / (u + v);
    ((diff / s).powi(2), ((u + v) / s).powi(2))
}

/// `1 - b0` without cancellation: `s^2 - (u + v)^2 = n0^2 s^2 / (P + 2uv)`
/// with `P = n0 (n0 + 1) + beta (n0 + 2)`.
fn ergodic_upper_gap(n0: f64, beta: f64) -> f64 {
    let uv = ((1.0 + n0) * beta * (n0 + beta)).sqrt();
    n0 * n0 / (n0 * (n0 + 1.0) + beta * (n0 + 2.0) + 2.0 * uv)
}

pub fn ergodic_summary(gas: &GasParams) -> Result<ErgodicSummary> {
    let (a0, b0) = ergodic_support(gas.n0, gas.beta);
    let mut solver = Solver::new(gas)?;
    let sol = solver.at_multiplier(0.0)?;
    let rho = gas.snr.rho;
    let (sb, sa) = ((1.0 + rho * b0).sqrt(), (1.0 + rho * a0).sqrt());
    let v_erg = ((sb + sa).powi(2) / (4.0 * sb * sa)).ln();
    Ok(ErgodicSummary { a0, b0, r_erg: sol.r, v_erg, e0: ergodic_energy(gas), n0: gas.n0, beta: gas.beta })
}

/// A regime change along the multiplier axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub k: f64,
    pub r: f64,
    /// Regime for multipliers just below `k`.
    pub below: Regime,
    /// Regime for multipliers just above `k`.
    pub above: Regime,
    /// Support at the threshold.
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Corner {
    /// `n0 = 0, beta = 1`.
    Free,
    /// `n0 > 0, beta = 1`: `S0b` then `Sab`.
    LowerWall,
    /// `n0 = 0, beta > 1`: `Sab` then `Sa1`.
    UpperWall,
    /// `n0 > 0, beta > 1`: always `Sab`.
    Detached,
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, what: &str) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Bracket(format!(
            "{what}: no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    let lo_positive = flo > 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const OPEN_LOW: f64 = 1e-300;
const OPEN_HIGH: f64 = 1.0 - 1e-16;

/// Per-call solver state: regime thresholds and the last soft-soft solution
/// used as a continuation seed.
struct Solver {
    gas: GasParams,
    corner: Corner,
    threshold: Option<Threshold>,
    /// `(k, a, 1 - b)` of solved `Sab` states, the first being the anchor.
    seeds: Vec<(f64, f64, f64)>,
}

impl Solver {
    fn new(gas: &GasParams) -> Result<Self> {
        let corner = match (gas.n0 > 0.0, gas.beta > 1.0) {
            (false, false) => Corner::Free,
            (true, false) => Corner::LowerWall,
            (false, true) => Corner::UpperWall,
            (true, true) => Corner::Detached,
        };
        let mut solver = Self { gas: *gas, corner, threshold: None, seeds: Vec::new() };
        match corner {
            Corner::Free => {}
            Corner::Detached => {
                let (a0, _) = ergodic_support(gas.n0, gas.beta);
                solver.seeds.push((0.0, a0, ergodic_upper_gap(gas.n0, gas.beta)));
            }
            Corner::LowerWall => {
                let k = solver.wall_threshold(true)?;
                let w = solver.soft_upper_gap(k)?;
                let b = 1.0 - w;
                solver.seeds.push((k, 0.0, w));
                solver.threshold = Some(Threshold { k, r: f64::NAN, below: Regime::S0b, above: Regime::Sab, a: 0.0, b });
            }
            Corner::UpperWall => {
                let k = solver.wall_threshold(false)?;
                let a = solver.soft_lower(k)?;
                solver.seeds.push((k, a, 0.0));
                solver.threshold = Some(Threshold { k, r: f64::NAN, below: Regime::Sab, above: Regime::Sa1, a, b: 1.0 });
            }
        }
        Ok(solver)
    }

    /// `1 - b` of the `S0b` solution: `N(b) = 0` with `a = 0`.
    fn soft_upper_gap(&self, k: f64) -> Result<f64> {
        let field = Field::new(&self.gas, k);
        bisect(|w| field.soft_system(0.0, w).0[1], OPEN_LOW, OPEN_HIGH, "S0b upper edge")
    }

    /// `a` of the `Sa1` solution: `N(a) = 0` with `b = 1`.
    fn soft_lower(&self, k: f64) -> Result<f64> {
        let field = Field::new(&self.gas, k);
        bisect(|a| field.n_edge(true, a, 0.0), OPEN_LOW, OPEN_HIGH, "Sa1 lower edge")
    }

    /// Multiplier at which the hard-edge solution stops being admissible:
    /// `N(0) = 0` on the `S0b` branch (`lower`) or `N(1) = 0` on `Sa1`.
    fn wall_threshold(&self, lower: bool) -> Result<f64> {
        let wall_force = |k: f64| -> Result<f64> {
            let field = Field::new(&self.gas, k);
            Ok(if lower {
                field.n_edge(true, 0.0, self.soft_upper_gap(k)?)
            } else {
                field.n_edge(false, self.soft_lower(k)?, 0.0)
            })
        };
        // The threshold lies on the positive side for the lower wall and on
        // the negative side for the upper wall.
        let dir = if lower { 1.0 } else { -1.0 };
        let mut near = 0.0;
        let mut far = dir;
        let mut tries = 0;
        while wall_force(far)? >= 0.0 {
            near = far;
            far *= 2.0;
            tries += 1;
            if tries > 60 {
                return Err(Error::Bracket(format!("wall threshold not found up to k = {far}")));
            }
        }
        let mut err = None;
        let k = bisect(
            |k| match wall_force(k) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    f64::NAN
                }
            },
            near.min(far),
            near.max(far),
            "wall threshold",
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(k),
        }
    }

    fn free_thresholds(&self) -> (f64, f64) {
        let z = self.gas.snr.z;
        let (s1, s0) = ((z + 1.0).sqrt(), z.sqrt());
        (-2.0 * s1 / (s1 - s0), 2.0 * s0 / (s1 - s0))
    }

    fn regime_at(&self, k: f64) -> Regime {
        match self.corner {
            Corner::Free => {
                let (k1, k2) = self.free_thresholds();
                if k < k1 {
                    Regime::S0b
                } else if k > k2 {
                    Regime::Sa1
                } else {
                    Regime::S01
                }
            }
            Corner::LowerWall => {
                if k <= self.threshold.expect("set in new").k {
                    Regime::S0b
                } else {
                    Regime::Sab
                }
            }
            Corner::UpperWall => {
                if k >= self.threshold.expect("set in new").k {
                    Regime::Sa1
                } else {
                    Regime::Sab
                }
            }
            Corner::Detached => Regime::Sab,
        }
    }

    /// Newton on the soft-edge system in `(a, w = 1 - b)`.
    fn newton(&self, k: f64, mut a: f64, mut w: f64) -> Option<(f64, f64)> {
        let field = Field::new(&self.gas, k);
        let tol = EDGE_TOL * self.gas.charge_scale(k);
        let norm = |f: [f64; 2]| f[0].abs().max(f[1].abs());
        let (mut f, mut jac) = field.soft_system(a, w);
        for _ in 0..100 {
            if norm(f) <= tol {
                return Some((a, w));
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let da = -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det;
            let dw = -(jac[0][0] * f[1] - jac[1][0] * f[0]) / det;
            let mut t = 1.0;
            loop {
                let (na, nw) = (a + t * da, w + t * dw);
                if na > 0.0 && nw > 0.0 && na + nw < 1.0 {
                    let (nf, njac) = field.soft_system(na, nw);
                    if norm(nf) < norm(f) {
                        a = na;
                        w = nw;
                        f = nf;
                        jac = njac;
                        break;
                    }
                }
                t *= 0.5;
                if t < 1e-10 {
                    return None;
                }
            }
        }
        (norm(f) <= tol).then_some((a, w))
    }

    /// Soft-soft `(a, 1 - b)` at `k`, continued from the nearest solved state.
    fn soft_soft(&mut self, k: f64) -> Result<(f64, f64)> {
        let &(mut k0, mut a, mut w) = self
            .seeds
            .iter()
            .min_by(|x, y| (x.0 - k).abs().total_cmp(&(y.0 - k).abs()))
            .expect("anchor present");
        let mut step = k - k0;
        let min_step = 1e-12 * (1.0 + k.abs());
        while k0 != k {
            let target = if (k - k0).abs() <= step.abs() { k } else { k0 + step };
            match self.newton(target, a, w) {
                Some((na, nw)) => {
                    k0 = target;
                    a = na;
                    w = nw;
                    step *= 2.0;
                }
                None => {
                    step *= 0.5;
                    if step.abs() < min_step {
                        return Err(Error::Convergence {
                            message: format!("soft-edge system at k = {k} (stalled at k = {k0})"),
                            a,
                            b: 1.0 - w,
                        });
                    }
                }
            }
        }
        if self.seeds.len() > 1 {
            self.seeds[1] = (k, a, w);
        } else {
            self.seeds.push((k, a, w));
        }
        Ok((a, w))
    }

    fn at_multiplier(&mut self, k: f64) -> Result<RegimeSolution> {
        let regime = self.regime_at(k);
        let (a, gap) = match regime {
            Regime::S01 => (0.0, 0.0),
            Regime::S0b => (0.0, self.soft_upper_gap(k)?),
            Regime::Sa1 => (self.soft_lower(k)?, 0.0),
            Regime::Sab => self.soft_soft(k)?,
        };
        Ok(assemble(&self.gas, k, regime, a, gap))
    }

    /// Multiplier reproducing rate `r`; `r(k)` is increasing.
    fn solve_rate(&mut self, r: f64) -> Result<RegimeSolution> {
        self.gas.check_rate(r)?;
        if self.corner == Corner::Free {
            // S01 is linear in k: r = r_erg + k v_erg.
            let erg = assemble(&self.gas, 0.0, Regime::S01, 0.0, 0.0);
            let v = ergodic_summary_free_variance(&self.gas);
            let (k1, k2) = self.free_thresholds();
            let k = (r - erg.r) / v;
            if (k1..=k2).contains(&k) {
                return Ok(assemble(&self.gas, k, Regime::S01, 0.0, 0.0));
            }
        }
        let rate_at = |s: &mut Self, k: f64| s.at_multiplier(k);
        let mut lo = -1.0;
        let mut hi = 1.0;
        let mut tries = 0;
        while rate_at(self, lo)?.r >= r {
            hi = lo;
            lo *= 2.0;
            tries += 1;
            if tries > 80 {
                return Err(Error::Bracket(format!("rate {r} below every multiplier down to {lo}")));
            }
        }
        while rate_at(self, hi)?.r <= r {
            lo = hi;
            hi *= 2.0;
            tries += 1;
            if tries > 160 {
                return Err(Error::Bracket(format!("rate {r} above every multiplier up to {hi}")));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if rate_at(self, mid)?.r < r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (slo, shi) = (rate_at(self, lo)?, rate_at(self, hi)?);
        Ok(if (slo.r - r).abs() <= (shi.r - r).abs() { slo } else { shi })
    }
}

/// `v_erg` in the free corner, `log((1 + sqrt(1+rho))^2 / (4 sqrt(1+rho)))`.
fn ergodic_summary_free_variance(gas: &GasParams) -> f64 {
    let s = (1.0 + gas.snr.rho).sqrt();
    ((1.0 + s).powi(2) / (4.0 * s)).ln()
}

/// Solve the constrained problem at a given multiplier.
pub fn solve_at_multiplier(gas: &GasParams, k: f64) -> Result<RegimeSolution> {
    if !k.is_finite() {
        return Err(Error::Domain(format!("multiplier must be finite, got {k}")));
    }
    Solver::new(gas)?.at_multiplier(k)
}

/// Solve the constrained problem at rate `r`.
pub fn solve_regime(gas: &GasParams, r: f64) -> Result<RegimeSolution> {
    Solver::new(gas)?.solve_rate(r)
}

/// Regime changes along the multiplier axis, in increasing `k`.
pub fn critical_thresholds(gas: &GasParams) -> Result<Vec<Threshold>> {
    let mut solver = Solver::new(gas)?;
    let mut out = Vec::new();
    match solver.corner {
        Corner::Free => {
            let (k1, k2) = solver.free_thresholds();
            for (k, below, above) in [(k1, Regime::S0b, Regime::S01), (k2, Regime::S01, Regime::Sa1)] {
                let r = assemble(gas, k, Regime::S01, 0.0, 0.0).r;
                out.push(Threshold { k, r, below, above, a: 0.0, b: 1.0 });
            }
        }
        Corner::LowerWall | Corner::UpperWall => {
            let mut t = solver.threshold.expect("set in new");
            t.r = solver.at_multiplier(t.k)?.r;
            out.push(t);
        }
        Corner::Detached => {}
    }
    Ok(out)
}

/// `dE(r) = E(r) - E0`.
pub fn rate_exponent(gas: &GasParams, r: f64) -> Result<f64> {
    Ok(solve_regime(gas, r)?.exponent)
}

/// Leading-order density of the rate, `Nt exp(-Nt^2 dE) / sqrt(2 pi v_erg)`.
pub fn density_asymptotic(gas: &GasParams, nt: usize, r: f64) -> Result<f64> {
    let erg = ergodic_summary(gas)?;
    let de = rate_exponent(gas, r)?;
    let n = nt as f64;
    Ok(n * (-n * n * de).exp() / (2.0 * std::f64::consts::PI * erg.v_erg).sqrt())
}

/// Large-deviation outage probability with the Gaussian crossover near the
/// ergodic rate.
///
/// With `k = dE/dr` and `k' = dk/dr` (central difference),
///
/// ```text
/// T = exp(-Nt^2 (dE - k^2 / (2 k'))) Q(Nt |k| / sqrt(k')) / sqrt(k' v_erg)
/// ```
///
/// is the outage probability below `r_erg` and one minus it above.
pub fn outage_asymptotic(gas: &GasParams, nt: usize, r: f64) -> Result<OutageEstimate> {
    gas.check_rate(r)?;
    let erg = ergodic_summary(gas)?;
    let mut solver = Solver::new(gas)?;
    let sol = solver.solve_rate(r)?;
    let (low, high) = gas.rate_range();
    let h = 1e-5f64.max(1e-4 * erg.r_erg.abs()).min(0.25 * (r - low)).min(0.25 * (high - r));
    let k_plus = solver.solve_rate(r + h)?.k;
    let k_minus = solver.solve_rate(r - h)?.k;
    let kp = (k_plus - k_minus) / (2.0 * h);
    if !(kp > 0.0) {
        return Err(Error::Convergence {
            message: format!("non-increasing multiplier near r = {r} (dk/dr = {kp})"),
            a: sol.a,
            b: sol.b,
        });
    }
    let n = nt as f64;
    let k = sol.k;
    let log_tail = -n * n * (sol.exponent - k * k / (2.0 * kp)) + log_q_fn(n * k.abs() / kp.sqrt())
        - 0.5 * (kp * erg.v_erg).ln();
    let tail = log_tail.exp();
    let p = if r < erg.r_erg { tail } else { 1.0 - tail };
    Ok(OutageEstimate::deterministic(p.clamp(0.0, 1.0), Method::Ld, h * h))
}

/// Gaussian approximation `Q((r_erg - r) Nt / sqrt(v_erg))`.
pub fn gaussian_outage(erg: &ErgodicSummary, nt: usize, r: f64) -> OutageEstimate {
    let p = q_fn((erg.r_erg - r) * nt as f64 / erg.v_erg.sqrt());
    OutageEstimate::deterministic(p, Method::Gauss, 0.0)
}
