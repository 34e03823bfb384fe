//! Channel model: dimension bookkeeping, Haar sampling, truncation and the
//! eigenvalue statistics of `U^H U`.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Channel counts in normal form (`nt <= nr`, `n0 >= 0`).
///
/// When the requested configuration has `Nt + Nr > N`, the complementary
/// block is used instead: `nt = N - Nr`, `nr = N - Nt`, `n0 = Nt + Nr - N`,
/// and `pinned` eigenvalues of the original `U^H U` sit exactly at 1. Rates
/// in the normalized frame are per *normalized* transmit channel:
///
/// ```text
/// I_norm = (1/nt) sum_k log(1 + rho lambda_k) + (pinned/nt) log(1 + rho)
/// I_orig = rate_scale() * I_norm
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelDims {
    pub n: usize,
    pub nt: usize,
    pub nr: usize,
    pub n0: usize,
    pub pinned: usize,
    pub original_nt: usize,
}

impl ChannelDims {
    /// `beta = nr / nt`.
    pub fn beta(&self) -> f64 {
        self.nr as f64 / self.nt as f64
    }

    /// `n0 / nt`.
    pub fn n0_ratio(&self) -> f64 {
        self.n0 as f64 / self.nt as f64
    }

    /// `|nt - nr|`, the exponent of `lambda` in the joint law.
    pub fn excess(&self) -> usize {
        self.nr - self.nt
    }

    /// Coefficient of `log(1 + rho)` added to the normalized rate.
    pub fn offset_coefficient(&self) -> f64 {
        self.pinned as f64 / self.nt as f64
    }

    pub fn rate_offset(&self, snr: SnrParam) -> f64 {
        self.offset_coefficient() * snr.rho.ln_1p()
    }

    /// Ratio converting a normalized-frame rate into the caller's frame.
    pub fn rate_scale(&self) -> f64 {
        self.nt as f64 / self.original_nt as f64
    }

    /// Open interval of normalized rates the channel can take.
    pub fn achievable_rates(&self, snr: SnrParam) -> (f64, f64) {
        let cap = snr.rho.ln_1p();
        let off = self.rate_offset(snr);
        (off, cap + off)
    }
}

/// Bring `(N, Nt, Nr)` into normal form.
pub fn normalize_dims(n: usize, nt: usize, nr: usize) -> Result<ChannelDims> {
    if nt == 0 || nr == 0 || nt > n || nr > n {
        return Err(Error::Dimensions(format!(
            "need 1 <= Nt <= N and 1 <= Nr <= N, got N = {n}, Nt = {nt}, Nr = {nr}"
        )));
    }
    let original_nt = nt;
    let (nt, nr) = if nt > nr { (nr, nt) } else { (nt, nr) };
    if nt + nr <= n {
        return Ok(ChannelDims { n, nt, nr, n0: n - nt - nr, pinned: 0, original_nt });
    }
    let pinned = nt + nr - n;
    let (nt_red, nr_red) = (n - nr, n - nt);
    if nt_red == 0 {
        return Err(Error::Deterministic { pinned_modes: pinned, nt: original_nt });
    }
    Ok(ChannelDims { n, nt: nt_red, nr: nr_red, n0: pinned, pinned, original_nt })
}

/// Signal-to-noise ratio `rho` (linear) and `z = 1/rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrParam {
    pub rho: f64,
    pub z: f64,
}

impl SnrParam {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("SNR must be positive and finite, got {rho}")));
        }
        Ok(Self { rho, z: 1.0 / rho })
    }

    /// `log(1 + rho)`, the single-channel capacity.
    pub fn capacity(&self) -> f64 {
        self.rho.ln_1p()
    }
}

/// Ascending eigenvalues of `H^H H`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub eigenvalues: Vec<f64>,
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// First `cols` columns of an `n x n` Haar unitary.
///
/// Thin QR of an `n x cols` complex Ginibre matrix; column `j` of `Q` is
/// multiplied by the phase of `R_jj` so that `R` has a positive diagonal,
/// which makes the factorization unique and the law of `Q` Haar.
pub fn sample_haar_columns<R: Rng + ?Sized>(n: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    assert!(cols >= 1 && cols <= n, "need 1 <= cols <= n");
    loop {
        let qr = ginibre(n, cols, rng).qr();
        let r = qr.r();
        if (0..cols).any(|j| r[(j, j)].norm() == 0.0) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..cols {
            let d = r[(j, j)];
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        return q;
    }
}

/// Haar-distributed `n x n` unitary.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C64> {
    sample_haar_columns(n, n, rng)
}

/// Upper-left `nr x nt` block of `u`.
///
/// `u` must have `dims.n` rows; only its first `nt` columns are read, so a
/// partial Haar sample from [`sample_haar_columns`] is accepted.
pub fn truncate(u: &DMatrix<C64>, dims: &ChannelDims) -> Result<DMatrix<C64>> {
    if u.nrows() != dims.n || u.ncols() < dims.nt {
        return Err(Error::Shape {
            expected: format!("{} x (>= {})", dims.n, dims.nt),
            actual: format!("{} x {}", u.nrows(), u.ncols()),
        });
    }
    Ok(u.view((0, 0), (dims.nr, dims.nt)).into_owned())
}

const CLAMP_WINDOW: f64 = 1e-9;

/// Eigenvalues of `H^H H` for an `nr x nt` block with `nr >= nt`.
pub fn spectrum(h: &DMatrix<C64>) -> Result<SpectrumSample> {
    if h.nrows() < h.ncols() {
        return Err(Error::Shape {
            expected: "nr >= nt".into(),
            actual: format!("{} x {}", h.nrows(), h.ncols()),
        });
    }
    let gram = h.adjoint() * h;
    let mut eigenvalues: Vec<f64> = gram.symmetric_eigenvalues().iter().copied().collect();
    for v in eigenvalues.iter_mut() {
        if !(*v >= -CLAMP_WINDOW && *v <= 1.0 + CLAMP_WINDOW) {
            return Err(Error::NonUnitary { value: *v });
        }
        *v = v.clamp(0.0, 1.0);
    }
    eigenvalues.sort_by(|a, b| a.total_cmp(b));
    Ok(SpectrumSample { eigenvalues })
}

/// Normalized-frame mutual information in nats.
pub fn mutual_information(s: &SpectrumSample, snr: SnrParam, dims: &ChannelDims) -> f64 {
    let sum: f64 = s.eigenvalues.iter().map(|&l| (snr.rho * l).ln_1p()).sum();
    sum / dims.nt as f64 + dims.rate_offset(snr)
}

/// Logarithm of the unnormalized joint eigenvalue density.
///
/// Returns `-inf` when an eigenvalue touches 0 or 1 or two coincide.
pub fn log_joint_density_unnormalized(s: &SpectrumSample, dims: &ChannelDims) -> f64 {
    let l = &s.eigenvalues;
    if l.iter().any(|&x| x <= 0.0 || x >= 1.0) {
        return f64::NEG_INFINITY;
    }
    let mut total = 0.0;
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            total += 2.0 * (l[i] - l[j]).abs().ln();
        }
    }
    let k = dims.excess() as f64;
    let n0 = dims.n0 as f64;
    total + l.iter().map(|&x| k * x.ln() + n0 * (-x).ln_1p()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dims(n: usize, nt: usize, nr: usize) -> ChannelDims {
        normalize_dims(n, nt, nr).unwrap()
    }

    #[test]
    fn normal_form_is_kept() {
        let d = dims(4, 1, 2);
        assert_eq!((d.nt, d.nr, d.n0, d.pinned), (1, 2, 1, 0));
        assert_eq!(d.beta(), 2.0);
        assert_eq!(d.n0_ratio(), 1.0);
        assert_eq!(d.offset_coefficient(), 0.0);
    }

    #[test]
    fn negative_n0_is_reduced() {
        let d = dims(4, 3, 3);
        assert_eq!((d.nt, d.nr, d.n0, d.pinned), (1, 1, 2, 2));
        assert_eq!(d.n0_ratio(), 2.0);
        assert_eq!(d.offset_coefficient(), 2.0);
        assert!((d.rate_scale() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn swap_then_reduce() {
        let d = dims(5, 3, 2);
        assert_eq!((d.nt, d.nr, d.n0, d.original_nt), (2, 3, 0, 3));
        let d = dims(5, 4, 3);
        assert_eq!((d.nt, d.nr, d.n0, d.pinned), (1, 2, 2, 2));
    }

    #[test]
    fn fully_pinned_channel_is_reported() {
        assert_eq!(
            normalize_dims(2, 2, 1),
            Err(Error::Deterministic { pinned_modes: 1, nt: 2 })
        );
        assert!(normalize_dims(3, 4, 1).is_err());
        assert!(normalize_dims(3, 0, 1).is_err());
    }

    #[test]
    fn unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 12] {
            let u = sample_haar_unitary(n, &mut rng);
            let err = (u.adjoint() * &u - DMatrix::<C64>::identity(n, n)).norm();
            assert!(err <= 1e-12, "n = {n}: {err}");
        }
        let u = sample_haar_unitary(1, &mut rng);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn truncation_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = sample_haar_unitary(3, &mut rng);
        let full = ChannelDims { n: 3, nt: 3, nr: 3, n0: 0, pinned: 0, original_nt: 3 };
        assert_eq!(truncate(&u, &full).unwrap(), u);
        let u2 = sample_haar_unitary(2, &mut rng);
        let h = truncate(&u2, &dims(2, 1, 1)).unwrap();
        assert_eq!(h.shape(), (1, 1));
        assert_eq!(h[(0, 0)], u2[(0, 0)]);
        assert!(truncate(&u2, &dims(3, 1, 1)).is_err());

        let d = dims(7, 2, 4);
        let u = sample_haar_unitary(7, &mut rng);
        let h = truncate(&u, &d).unwrap();
        let sv = h.clone().svd(false, false).singular_values;
        assert!(sv.iter().all(|&s| s <= 1.0 + 1e-12));
    }

    #[test]
    fn spectrum_edge_cases() {
        let id = DMatrix::<C64>::identity(3, 2);
        assert_eq!(spectrum(&id).unwrap().eigenvalues, vec![1.0, 1.0]);
        let zero = DMatrix::<C64>::zeros(3, 2);
        assert_eq!(spectrum(&zero).unwrap().eigenvalues, vec![0.0, 0.0]);
        let big = DMatrix::<C64>::identity(2, 2) * C64::new(1.1, 0.0);
        assert!(matches!(spectrum(&big), Err(Error::NonUnitary { .. })));
        assert!(spectrum(&DMatrix::<C64>::zeros(1, 2)).is_err());
    }

    #[test]
    fn spectrum_matches_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = dims(9, 3, 4);
        for _ in 0..20 {
            let h = truncate(&sample_haar_unitary(9, &mut rng), &d).unwrap();
            let s = spectrum(&h).unwrap();
            let mut sv: Vec<f64> =
                h.svd(false, false).singular_values.iter().map(|x| x * x).collect();
            sv.sort_by(|a, b| a.total_cmp(b));
            for (a, b) in s.eigenvalues.iter().zip(&sv) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mutual_information_examples() {
        let snr = SnrParam::new(3.0).unwrap();
        let d = dims(6, 3, 3);
        let ones = SpectrumSample { eigenvalues: vec![1.0; 3] };
        assert!((mutual_information(&ones, snr, &d) - 4f64.ln()).abs() < 1e-15);
        let zeros = SpectrumSample { eigenvalues: vec![0.0; 3] };
        assert_eq!(mutual_information(&zeros, snr, &d), 0.0);
        let d1 = dims(2, 1, 1);
        let third = SpectrumSample { eigenvalues: vec![1.0 / 3.0] };
        assert!((mutual_information(&third, snr, &d1) - 2f64.ln()).abs() < 1e-15);
        let reduced = dims(4, 3, 3);
        assert!((mutual_information(&zeros_of(1), snr, &reduced) - 2.0 * 4f64.ln()).abs() < 1e-14);
    }

    fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(|a, b| a.total_cmp(b));
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn scalar_marginals_pass_ks() {
        // |u_11|^2 of an N x N Haar unitary is Beta(1, N - 1).
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in [2usize, 3, 5] {
            let d = dims(n, 1, 1);
            let xs: Vec<f64> = (0..4000)
                .map(|_| {
                    let u = sample_haar_columns(n, 1, &mut rng);
                    spectrum(&truncate(&u, &d).unwrap()).unwrap().eigenvalues[0]
                })
                .collect();
            let m = (n - 1) as i32;
            let ks = ks_statistic(xs, |x| 1.0 - (1.0 - x).powi(m));
            // 1.63 / sqrt(4000) is the 1% critical value.
            assert!(ks < 1.63 / 4000f64.sqrt(), "n = {n}: KS = {ks}");
        }
    }

    #[test]
    fn column_phases_are_uniform() {
        // The diagonal phase fix leaves arg(u_11) uniform on the circle.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..4000)
            .map(|_| {
                let u = sample_haar_unitary(3, &mut rng);
                (u[(0, 0)].arg() + std::f64::consts::PI) / std::f64::consts::TAU
            })
            .collect();
        let ks = ks_statistic(xs, |x| x);
        assert!(ks < 1.63 / 4000f64.sqrt(), "KS = {ks}");
    }

    fn zeros_of(n: usize) -> SpectrumSample {
        SpectrumSample { eigenvalues: vec![0.0; n] }
    }

    #[test]
    fn joint_density_examples() {
        let flat = dims(2, 1, 1);
        let s = SpectrumSample { eigenvalues: vec![0.37] };
        assert_eq!(log_joint_density_unnormalized(&s, &flat), 0.0);
        let d = dims(3, 1, 1);
        assert!((log_joint_density_unnormalized(&s, &d) - (0.63f64).ln()).abs() < 1e-15);
        let d2 = dims(4, 2, 2);
        let tied = SpectrumSample { eigenvalues: vec![0.4, 0.4] };
        assert_eq!(log_joint_density_unnormalized(&tied, &d2), f64::NEG_INFINITY);
        let edge = SpectrumSample { eigenvalues: vec![0.0] };
        assert_eq!(log_joint_density_unnormalized(&edge, &flat), f64::NEG_INFINITY);
    }
}
