//! Finite-size closed form for the outage probability.
//!
//! Expanding `lambda^K (1 - lambda)^N0` binomially turns `1 - P_out(r)` into
//! a finite signed sum over multi-indices `(k, n)`, permutations `sigma` and
//! a shell index `l`:
//!
//! ```text
//! 1 - P_out = A * sum_{k,n} prod_j c[k_j, n_j] * sum_sigma sgn(sigma)
//!               * sum_{l : Nt r < l log(1+rho)} (-1)^(l+Nt) e_l((1+rho)^s) F(Nt r - l log(1+rho), s)
//! ```
//!
//! with `s_j = j + sigma_j - 1 + k_j + N0 - n_j` and
//! `A = Nt! / (Z * rho^(Nt^2 + (K+N0) Nt))`. The residue function is
//!
//! ```text
//! F(z, s) = prod_j 1/s_j + (-1)^Nt h[s_1, ..., s_Nt],   h(x) = exp(x z) / x,
//! ```
//!
//! where `h[...]` is a divided difference (Hermite form when nodes repeat).
//! Equivalently, `F(z, s)` is the integral of `exp(-s.x)` over the simplex
//! `x >= 0, sum x <= -z`, and it vanishes for `z >= 0`.
//!
//! The sum alternates violently, so everything is carried in `rug` floats.

use std::collections::HashMap;

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::ensemble::{ChannelDims, SnrParam};
use crate::error::{Error, Result};
use crate::montecarlo::{Method, OutageEstimate};
use crate::specfun::log_gamma;

pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const DEFAULT_MAX_NT: usize = 5;
pub const DEFAULT_TERM_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactConfig {
    pub dims: ChannelDims,
    pub snr: SnrParam,
    pub precision_bits: u32,
    pub max_nt: usize,
    pub term_budget: u64,
}

impl ExactConfig {
    pub fn new(dims: ChannelDims, snr: SnrParam) -> Self {
        Self {
            dims,
            snr,
            precision_bits: DEFAULT_PRECISION_BITS,
            max_nt: DEFAULT_MAX_NT,
            term_budget: DEFAULT_TERM_BUDGET,
        }
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }

    /// Number of `(k, n, sigma)` terms, or a refusal if a cap is exceeded.
    pub fn term_count(&self) -> Result<u64> {
        let d = &self.dims;
        if self.precision_bits < 128 {
            return Err(Error::Domain(format!(
                "precision_bits must be at least 128, got {}",
                self.precision_bits
            )));
        }
        if d.nt > self.max_nt {
            return Err(Error::Budget(format!("Nt = {} exceeds the cap of {}", d.nt, self.max_nt)));
        }
        let per = ((d.excess() + 1) * (d.n0 + 1)) as f64;
        let perms: f64 = (1..=d.nt).map(|i| i as f64).product();
        let terms = per.powi(d.nt as i32) * perms;
        if terms > self.term_budget as f64 {
            return Err(Error::Budget(format!(
                "{terms:.3e} terms exceed the budget of {:.3e}",
                self.term_budget as f64
            )));
        }
        Ok(terms as u64)
    }
}

/// `log Z` for the normalization of the joint eigenvalue law.
pub fn log_selberg_z(dims: &ChannelDims) -> f64 {
    let (k, n0, nt) = (dims.excess() as f64, dims.n0 as f64, dims.nt as f64);
    (0..dims.nt)
        .map(|j| {
            let j = j as f64;
            let lg = |x: f64| log_gamma(x).expect("positive argument");
            lg(k + 1.0 + j) + lg(n0 + 1.0 + j) + lg(j + 2.0) - lg(k + n0 + nt + j + 1.0)
        })
        .sum()
}

fn factorial(prec: u32, n: usize) -> Float {
    Float::with_val(prec, Integer::from(Integer::factorial(n as u32)))
}

fn binomial(n: usize, k: usize) -> Integer {
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

/// `Z` in extended precision, as a ratio of factorials.
fn selberg_z(dims: &ChannelDims, prec: u32) -> Float {
    let (k, n0, nt) = (dims.excess(), dims.n0, dims.nt);
    let mut z = Float::with_val(prec, 1);
    for j in 0..nt {
        z *= factorial(prec, k + j);
        z *= factorial(prec, n0 + j);
        z *= factorial(prec, j + 1);
        z /= factorial(prec, k + n0 + nt + j);
    }
    z
}

/// `c[k, n] = C(K, k) C(N0, n) (-1)^(K-k+N0-n) (1+rho)^n`.
pub fn c_coefficient(k: usize, n: usize, dims: &ChannelDims, snr: SnrParam, prec: u32) -> Result<Float> {
    let big_k = dims.excess();
    if k > big_k || n > dims.n0 {
        return Err(Error::Domain(format!(
            "index (k, n) = ({k}, {n}) outside [0, {big_k}] x [0, {}]",
            dims.n0
        )));
    }
    let b = binomial(big_k, k) * binomial(dims.n0, n);
    let mut c = Float::with_val(prec, b);
    if (big_k - k + dims.n0 - n) % 2 == 1 {
        c = -c;
    }
    let base = Float::with_val(prec, 1) + Float::with_val(prec, snr.rho);
    Ok(c * base.pow(n as u32))
}

/// Pole vector `s` of one residue term; every entry is at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SVector(Vec<u32>);

impl SVector {
    pub fn new(s: Vec<u32>) -> Result<Self> {
        if s.is_empty() || s.contains(&0) {
            return Err(Error::Domain(format!("pole vector must be nonempty and positive: {s:?}")));
        }
        Ok(Self(s))
    }

    /// `s_j = j + sigma_j - 1 + k_j + N0 - n_j` with one-based `j` and `sigma`.
    pub fn from_indices(sigma: &[usize], k: &[usize], n: &[usize], n0: usize) -> Result<Self> {
        let s = (0..sigma.len())
            .map(|j| (j + 1 + sigma[j] - 1 + k[j] + n0 - n[j]) as u32)
            .collect();
        Self::new(s)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

/// Newton divided difference `f[x_0, ..., x_m]` on ascending nodes.
/// `taylor(x, m)` must return `f^(m)(x) / m!` so that repeated nodes work.
fn divided_difference(nodes: &[Float], taylor: impl Fn(&Float, usize) -> Float) -> Float {
    let n = nodes.len();
    let mut col: Vec<Float> = nodes.iter().map(|x| taylor(x, 0)).collect();
    for w in 1..n {
        for i in 0..n - w {
            let j = i + w;
            col[i] = if nodes[j] == nodes[i] {
                taylor(&nodes[i], w)
            } else {
                let num = Float::with_val(col[i].prec(), &col[i + 1] - &col[i]);
                num / Float::with_val(col[i].prec(), &nodes[j] - &nodes[i])
            };
        }
    }
    col.swap_remove(0)
}

/// `d^m/dx^m (exp(x z) / x) / m!`.
fn h_taylor(x: &Float, z: &Float, m: usize) -> Float {
    let prec = x.prec();
    let mut sum = Float::with_val(prec, 0);
    let mut xpow = x.clone();
    for q in 0..=m {
        let zp = z.clone().pow((m - q) as u32);
        let mut t = zp / factorial(prec, m - q) / &xpow;
        if q % 2 == 1 {
            t = -t;
        }
        sum += t;
        xpow *= x;
    }
    sum * Float::with_val(prec, x * z).exp()
}

/// `d^m/dx^m exp(x z) / m!`.
fn e_taylor(x: &Float, z: &Float, m: usize) -> Float {
    let prec = x.prec();
    z.clone().pow(m as u32) / factorial(prec, m) * Float::with_val(prec, x * z).exp()
}

fn sorted_nodes(s: &[Float]) -> Vec<Float> {
    let mut nodes = s.to_vec();
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    nodes
}

fn f_residue_nodes(z: &Float, s: &[Float]) -> Float {
    let prec = z.prec();
    if *z >= 0 {
        return Float::with_val(prec, 0);
    }
    let nodes = sorted_nodes(s);
    let mut inv = Float::with_val(prec, 1);
    for x in &nodes {
        inv /= x;
    }
    let dd = divided_difference(&nodes, |x, m| h_taylor(x, z, m));
    if nodes.len() % 2 == 1 {
        inv - dd
    } else {
        inv + dd
    }
}

/// `dF/dz = (-1)^Nt exp(. z)[s]` for `z < 0`, zero above.
fn f_residue_dz_nodes(z: &Float, s: &[Float]) -> Float {
    let prec = z.prec();
    if *z >= 0 {
        return Float::with_val(prec, 0);
    }
    let dd = divided_difference(&sorted_nodes(s), |x, m| e_taylor(x, z, m));
    if s.len() % 2 == 1 {
        -dd
    } else {
        dd
    }
}

/// Residue function `F(z, s)` rounded to binary64; zero for `z >= 0`.
pub fn f_residue(z: f64, s: &SVector, prec: u32) -> f64 {
    let zf = Float::with_val(prec, z);
    let nodes: Vec<Float> = s.0.iter().map(|&x| Float::with_val(prec, x)).collect();
    f_residue_nodes(&zf, &nodes).to_f64()
}

/// All elementary symmetric polynomials `e_0..e_n` of `values`.
fn elementary_symmetric_mp(values: &[Float], prec: u32) -> Vec<Float> {
    let mut e = vec![Float::with_val(prec, 0); values.len() + 1];
    e[0] = Float::with_val(prec, 1);
    for v in values {
        for d in (1..e.len()).rev() {
            let t = Float::with_val(prec, &e[d - 1] * v);
            e[d] += t;
        }
    }
    e
}

struct Prepared {
    prec: u32,
    /// `Nt r - pinned log(1+rho)`.
    scaled_rate: Float,
    log_base: Float,
    base: Float,
    prefactor: Float,
    coeffs: Vec<Vec<Float>>,
}

impl Prepared {
    fn new(cfg: &ExactConfig, r: f64, prec: u32) -> Result<Self> {
        let d = &cfg.dims;
        let base = Float::with_val(prec, 1) + Float::with_val(prec, cfg.snr.rho);
        let log_base = Float::with_val(prec, base.ln_ref());
        let scaled_rate =
            Float::with_val(prec, r) * d.nt as u32 - Float::with_val(prec, &log_base * d.pinned as u32);
        let exponent = (d.nt * d.nt + (d.excess() + d.n0) * d.nt) as u32;
        let rho_pow = Float::with_val(prec, cfg.snr.rho).pow(exponent);
        let prefactor = factorial(prec, d.nt) / selberg_z(d, prec) / rho_pow;
        let coeffs = (0..=d.excess())
            .map(|k| (0..=d.n0).map(|n| c_coefficient(k, n, d, cfg.snr, prec)).collect())
            .collect::<Result<Vec<Vec<Float>>>>()?;
        Ok(Self { prec, scaled_rate, log_base, base, prefactor, coeffs })
    }

    /// Shell sum for one sorted pole multiset; `derivative` selects `dF/dz`.
    fn shell_sum(&self, s: &[u32], derivative: bool) -> Float {
        let prec = self.prec;
        let nt = s.len();
        let nodes: Vec<Float> = s.iter().map(|&x| Float::with_val(prec, x)).collect();
        let powers: Vec<Float> = s.iter().map(|&x| self.base.clone().pow(x)).collect();
        let e = elementary_symmetric_mp(&powers, prec);
        let mut total = Float::with_val(prec, 0);
        for (l, e_l) in e.iter().enumerate() {
            let z = Float::with_val(prec, &self.scaled_rate - Float::with_val(prec, &self.log_base * l as u32));
            if z >= 0 {
                continue;
            }
            let f = if derivative { f_residue_dz_nodes(&z, &nodes) } else { f_residue_nodes(&z, &nodes) };
            let t = Float::with_val(prec, e_l * &f);
            if (l + nt) % 2 == 1 {
                total -= t;
            } else {
                total += t;
            }
        }
        total
    }

    /// `(sum, sum of magnitudes)` over all `(k, n, sigma)` terms.
    fn assemble(&self, dims: &ChannelDims, derivative: bool) -> (Float, Float) {
        let prec = self.prec;
        let nt = dims.nt;
        let mut cache: HashMap<Vec<u32>, Float> = HashMap::new();
        let mut total = Float::with_val(prec, 0);
        let mut magnitude = Float::with_val(prec, 0);
        let mut ks = vec![0usize; nt];
        let mut ns = vec![0usize; nt];
        loop {
            let mut c = self.prefactor.clone();
            for j in 0..nt {
                c *= &self.coeffs[ks[j]][ns[j]];
            }
            let mut sigma: Vec<usize> = (1..=nt).collect();
            loop {
                let s = SVector::from_indices(&sigma, &ks, &ns, dims.n0)
                    .expect("pole indices are positive by construction");
                let mut key = s.0;
                key.sort_unstable();
                let v = cache.entry(key).or_insert_with_key(|k| self.shell_sum(k, derivative));
                let term = Float::with_val(prec, &c * &*v);
                magnitude += Float::with_val(prec, term.abs_ref());
                if permutation_is_odd(&sigma) {
                    total -= term;
                } else {
                    total += term;
                }
                if !next_permutation(&mut sigma) {
                    break;
                }
            }
            if !odometer(&mut ks, &mut ns, dims.excess(), dims.n0) {
                break;
            }
        }
        (total, magnitude)
    }
}

fn permutation_is_odd(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Advance to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Advance the `(k, n)` multi-index; digits run over `[0, kmax]` then `[0, nmax]`.
fn odometer(ks: &mut [usize], ns: &mut [usize], kmax: usize, nmax: usize) -> bool {
    for j in (0..ns.len()).rev() {
        if ns[j] < nmax {
            ns[j] += 1;
            return true;
        }
        ns[j] = 0;
    }
    for j in (0..ks.len()).rev() {
        if ks[j] < kmax {
            ks[j] += 1;
            return true;
        }
        ks[j] = 0;
    }
    false
}

fn survival(cfg: &ExactConfig, r: f64, prec: u32) -> Result<(f64, f64)> {
    let prep = Prepared::new(cfg, r, prec)?;
    let (sum, magnitude) = prep.assemble(&cfg.dims, false);
    let p = 1.0 - sum.to_f64();
    let tol = (magnitude.to_f64() * 2f64.powi(8 - prec as i32)).max(f64::EPSILON);
    Ok((p, tol))
}

/// `P(I < r)` in the normalized frame from the closed-form sum.
pub fn outage_exact(cfg: &ExactConfig, r: f64) -> Result<OutageEstimate> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("rate must be finite and nonnegative, got {r}")));
    }
    cfg.term_count()?;
    let (low, high) = cfg.dims.achievable_rates(cfg.snr);
    if r <= low {
        return Ok(OutageEstimate::deterministic(0.0, Method::Exact, 0.0));
    }
    if r >= high {
        return Ok(OutageEstimate::deterministic(1.0, Method::Exact, 0.0));
    }
    let mut prec = cfg.precision_bits;
    let mut result = survival(cfg, r, prec)?;
    if !(-1e-6..=1.0 + 1e-6).contains(&result.0) {
        prec *= 2;
        result = survival(cfg, r, prec)?;
        if !(-1e-6..=1.0 + 1e-6).contains(&result.0) {
            return Err(Error::Cancellation { value: result.0, precision_bits: prec });
        }
    }
    let (p, tol) = result;
    Ok(OutageEstimate::deterministic(p.clamp(0.0, 1.0), Method::Exact, tol))
}

/// Value and rounding-error estimate of a density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub value: f64,
    pub error: f64,
}

/// Density of the normalized rate, `dP_out/dr`.
///
/// Differentiates the closed form term by term, using `dF/dz` as a divided
/// difference of `exp(x z)`, so no finite-difference step is involved.
pub fn outage_density_exact(cfg: &ExactConfig, r: f64) -> Result<DensityValue> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("rate must be finite and nonnegative, got {r}")));
    }
    cfg.term_count()?;
    let (low, high) = cfg.dims.achievable_rates(cfg.snr);
    if r <= low || r >= high {
        return Ok(DensityValue { value: 0.0, error: 0.0 });
    }
    let prec = cfg.precision_bits;
    let prep = Prepared::new(cfg, r, prec)?;
    let (sum, magnitude) = prep.assemble(&cfg.dims, true);
    let nt = cfg.dims.nt as f64;
    let value = -nt * sum.to_f64();
    let error = (nt * magnitude.to_f64() * 2f64.powi(8 - prec as i32)).max(f64::EPSILON);
    Ok(DensityValue { value: value.max(0.0), error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::normalize_dims;
    use crate::specfun::{quadrature_oracle, Weight};

    fn cfg(n: usize, nt: usize, nr: usize, rho: f64) -> ExactConfig {
        ExactConfig::new(normalize_dims(n, nt, nr).unwrap(), SnrParam::new(rho).unwrap())
    }

    fn p(c: &ExactConfig, r: f64) -> f64 {
        outage_exact(c, r).unwrap().p
    }

    #[test]
    fn selberg_small_cases() {
        assert!(log_selberg_z(&normalize_dims(2, 1, 1).unwrap()).abs() < 1e-15);
        assert!((log_selberg_z(&normalize_dims(3, 1, 1).unwrap()) - 0.5f64.ln()).abs() < 1e-15);
        let d = normalize_dims(4, 2, 2).unwrap();
        assert!((log_selberg_z(&d) - (1.0f64 / 6.0).ln()).abs() < 1e-14);
        assert!((selberg_z(&d, 128).to_f64() - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn selberg_matches_2d_quadrature() {
        // K = 1, N0 = 1: integrand (x - y)^2 x y (1 - x)(1 - y).
        let d = normalize_dims(6, 2, 3).unwrap();
        assert_eq!((d.excess(), d.n0), (1, 1));
        let inner = |x: f64| {
            quadrature_oracle(|y| (x - y).powi(2) * x * y * (1.0 - x) * (1.0 - y), 0.0, 1.0, Weight::Unit)
                .unwrap()
                .value
        };
        let z = quadrature_oracle(inner, 0.0, 1.0, Weight::Unit).unwrap().value;
        assert!((log_selberg_z(&d) - z.ln()).abs() < 1e-10);
    }

    #[test]
    fn coefficient_examples() {
        let snr = SnrParam::new(3.0).unwrap();
        let d = normalize_dims(2, 1, 1).unwrap();
        assert_eq!(c_coefficient(0, 0, &d, snr, 128).unwrap().to_f64(), 1.0);
        let d = normalize_dims(3, 1, 1).unwrap();
        assert_eq!(c_coefficient(0, 0, &d, snr, 128).unwrap().to_f64(), -1.0);
        assert_eq!(c_coefficient(0, 1, &d, snr, 128).unwrap().to_f64(), 4.0);
        assert!(c_coefficient(1, 0, &d, snr, 128).is_err());
        let d = normalize_dims(4, 1, 3).unwrap();
        assert_eq!(d.excess(), 2);
        assert_eq!(c_coefficient(1, 0, &d, snr, 128).unwrap().to_f64(), -2.0);
        assert_eq!(c_coefficient(2, 0, &d, snr, 128).unwrap().to_f64(), 1.0);
    }

    #[test]
    fn s_vector_layout() {
        let s = SVector::from_indices(&[2, 1], &[0, 1], &[1, 0], 1).unwrap();
        assert_eq!(s.as_slice(), &[2, 4]);
        assert!(SVector::new(vec![1, 0]).is_err());
    }

    #[test]
    fn residue_single_pole_matches_integral() {
        // Nt = 1: F(z, s) = int_0^{-z} exp(-s x) dx.
        for (z, s) in [(-0.5, 2u32), (-3.0, 1), (-1e-6, 4)] {
            let q = quadrature_oracle(|x| (-(s as f64) * x).exp(), 0.0, -z, Weight::Unit).unwrap().value;
            let f = f_residue(z, &SVector::new(vec![s]).unwrap(), 256);
            assert!((f - q).abs() < 1e-12 * q.max(1e-300) + 1e-15, "z = {z}, s = {s}: {f} vs {q}");
        }
        assert_eq!(f_residue(0.3, &SVector::new(vec![2]).unwrap(), 256), 0.0);
    }

    fn simplex_oracle(z: f64, s: [f64; 2]) -> f64 {
        let w = -z;
        let inner = |x: f64| {
            quadrature_oracle(|y| (-s[0] * x - s[1] * y).exp(), 0.0, w - x, Weight::Unit).unwrap().value
        };
        quadrature_oracle(inner, 0.0, w, Weight::Unit).unwrap().value
    }

    #[test]
    fn residue_pairs_match_simplex_integral() {
        for (z, s) in [(-0.4, [3u32, 3]), (-0.4, [1, 3]), (-2.5, [2, 5]), (-1.0, [4, 4])] {
            let f = f_residue(z, &SVector::new(s.to_vec()).unwrap(), 256);
            let q = simplex_oracle(z, [s[0] as f64, s[1] as f64]);
            assert!((f - q).abs() < 1e-11, "{s:?}: {f} vs {q}");
        }
    }

    #[test]
    fn confluent_limit() {
        // Distinct nodes 3 and 3 + eps, Richardson-extrapolated to eps = 0.
        let prec = 256;
        let z = Float::with_val(prec, -0.4);
        let at = |eps: f64| {
            let nodes = [Float::with_val(prec, 3), Float::with_val(prec, 3.0 + eps)];
            f_residue_nodes(&z, &nodes).to_f64()
        };
        let (a, b) = (at(1e-3), at(5e-4));
        let limit = 2.0 * b - a;
        let confluent = f_residue(-0.4, &SVector::new(vec![3, 3]).unwrap(), prec);
        assert!((limit - confluent).abs() < 1e-9, "{limit} vs {confluent}");
        // Triple node against a nearby distinct triple.
        let zz = Float::with_val(prec, -0.7);
        let nodes = |e: f64| [Float::with_val(prec, 2), Float::with_val(prec, 2.0 + e), Float::with_val(prec, 2.0 + 2.0 * e)];
        let near = f_residue_nodes(&zz, &nodes(1e-12)).to_f64();
        let exact = f_residue(-0.7, &SVector::new(vec![2, 2, 2]).unwrap(), prec);
        assert!((near - exact).abs() < 1e-9);
    }

    #[test]
    fn residue_continuous_at_zero() {
        let s = SVector::new(vec![1, 2, 4]).unwrap();
        assert!(f_residue(-1e-9, &s, 256).abs() < 1e-20);
    }

    #[test]
    fn flat_law_goldens() {
        let c = cfg(2, 1, 1, 3.0);
        assert!((p(&c, 2f64.ln()) - 1.0 / 3.0).abs() < 1e-12);
        let c = cfg(3, 1, 1, 3.0);
        assert!((p(&c, 2f64.ln()) - 5.0 / 9.0).abs() < 1e-12);
        // lambda^1 law: P = t^2 with t = 1/3.
        let c = cfg(3, 1, 2, 3.0);
        assert!((p(&c, 2f64.ln()) - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn boundaries_and_monotonicity() {
        let c = cfg(6, 2, 3, 2.0);
        let top = 3f64.ln();
        assert_eq!(p(&c, 0.0), 0.0);
        assert_eq!(p(&c, top), 1.0);
        assert!(p(&c, 1e-9) < 1e-9);
        assert!((p(&c, top - 1e-9) - 1.0).abs() < 1e-6);
        let mut last = 0.0;
        for i in 1..40 {
            let v = p(&c, top * i as f64 / 40.0);
            assert!(v >= last - 1e-12, "i = {i}");
            last = v;
        }
    }

    #[test]
    fn pinned_channels_shift_the_rate() {
        // N = 4, Nt = Nr = 3 reduces to one random eigenvalue with N0 = 2.
        let c = cfg(4, 3, 3, 3.0);
        let flat = cfg(4, 1, 1, 3.0);
        let off = 2.0 * 4f64.ln();
        assert!((p(&c, off + 2f64.ln()) - p(&flat, 2f64.ln())).abs() < 1e-14);
        assert_eq!(p(&c, off), 0.0);
    }

    #[test]
    fn precision_escalation_is_stable() {
        let c = cfg(9, 3, 4, 10.0);
        for r in [0.5, 1.2, 1.9] {
            let lo = p(&c, r);
            let hi = p(&c.with_precision(512), r);
            assert!((lo - hi).abs() < 1e-9);
        }
    }

    #[test]
    fn refusals() {
        let c = cfg(12, 6, 6, 1.0);
        assert!(matches!(outage_exact(&c, 0.5), Err(Error::Budget(_))));
        let mut c = cfg(20, 4, 4, 1.0);
        c.term_budget = 1000;
        assert!(matches!(outage_exact(&c, 0.5), Err(Error::Budget(_))));
        assert!(outage_exact(&cfg(2, 1, 1, 1.0).with_precision(64), 0.5).is_err());
        assert!(outage_exact(&cfg(2, 1, 1, 1.0), -0.1).is_err());
    }

    #[test]
    fn density_flat_law() {
        let c = cfg(2, 1, 1, 3.0);
        let d = outage_density_exact(&c, 2f64.ln()).unwrap();
        assert!((d.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn density_matches_difference_quotient_and_normalizes() {
        let c = cfg(7, 2, 3, 4.0);
        let top = 5f64.ln();
        for r in [0.4, 0.9, 1.3] {
            let h = 1e-4;
            let fd = (p(&c, r + h) - p(&c, r - h)) / (2.0 * h);
            let d = outage_density_exact(&c, r).unwrap().value;
            assert!((fd - d).abs() < 1e-6, "r = {r}: {fd} vs {d}");
            assert!(d >= 0.0);
        }
        // The density is smooth between the shell boundaries l log(1+rho) / Nt.
        let mut mass = 0.0;
        for piece in 0..2 {
            let (a, b) = (piece as f64 * top / 2.0, (piece + 1) as f64 * top / 2.0);
            mass += quadrature_oracle(|r| outage_density_exact(&c, r).unwrap().value, a, b, Weight::Unit)
                .unwrap()
                .value;
        }
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
    }
}
