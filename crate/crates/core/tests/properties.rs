use std::f64::consts::PI;

use jacobi_outage::coulomb::{
    ergodic_summary, rate_exponent, solve_at_multiplier, solve_regime, GasParams,
};
use jacobi_outage::ensemble::{normalize_dims, SnrParam};
use jacobi_outage::exact::{outage_exact, ExactConfig};
use jacobi_outage::specfun::{g, quadrature_oracle, Weight};
use proptest::prelude::*;

fn gas(n0: f64, beta: f64, rho: f64) -> GasParams {
    GasParams::new(n0, beta, SnrParam::new(rho).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn normal_form_invariants((n, nt, nr) in (1usize..40).prop_flat_map(|n| (Just(n), 1..=n, 1..=n))) {
        match normalize_dims(n, nt, nr) {
            Ok(d) => {
                prop_assert!(d.nt <= d.nr);
                prop_assert!(d.nt >= 1);
                prop_assert_eq!(d.nt + d.nr + d.n0, n);
                prop_assert_eq!(d.original_nt, nt);
                prop_assert_eq!(d.pinned, (nt + nr).saturating_sub(n));
                // Already-normal dimensions are a fixed point.
                let again = normalize_dims(n, d.nt, d.nr).unwrap();
                prop_assert_eq!((again.nt, again.nr, again.n0, again.pinned), (d.nt, d.nr, d.n0, 0));
                // Swapping transmit and receive only changes the caller frame.
                let swapped = normalize_dims(n, nr, nt).unwrap();
                prop_assert_eq!((swapped.nt, swapped.nr, swapped.n0), (d.nt, d.nr, d.n0));
            }
            Err(jacobi_outage::Error::Deterministic { .. }) => prop_assert_eq!(nt.max(nr), n),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn g_matches_quadrature(x in 1e-3f64..50.0, y in prop_oneof![0.0f64..20.0, -20.0f64..-1.0]) {
        let closed = g(x, y).unwrap();
        let q = quadrature_oracle(|t| (t + x).ln() / (t + y), 0.0, 1.0, Weight::SqrtEndpoints).unwrap().value / PI;
        prop_assert!((closed - q).abs() < 1e-8 * (1.0 + q.abs()), "G({x}, {y}) = {closed}, quadrature {q}");
    }

    #[test]
    fn ergodic_density_has_unit_mass(n0 in 0.0f64..3.0, beta in 1.0f64..4.0, rho in 0.1f64..100.0) {
        let erg = ergodic_summary(&gas(n0, beta, rho)).unwrap();
        prop_assert!(0.0 <= erg.a0 && erg.a0 < erg.b0 && erg.b0 <= 1.0);
        let mass = quadrature_oracle(|x| erg.density(x), erg.a0, erg.b0, Weight::Unit).unwrap().value;
        prop_assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
        // r_erg is the mean rate under p0.
        let mean = quadrature_oracle(|x| erg.density(x) * (rho * x).ln_1p(), erg.a0, erg.b0, Weight::Unit).unwrap().value;
        prop_assert!((mean - erg.r_erg).abs() < 1e-8, "{mean} vs {}", erg.r_erg);
    }

    #[test]
    fn constrained_density_is_a_probability(
        n0 in 0.0f64..3.0, beta in 1.0f64..4.0, rho in 0.5f64..30.0, k in -15.0f64..15.0,
    ) {
        let sol = solve_at_multiplier(&gas(n0, beta, rho), k).unwrap();
        prop_assert!(0.0 <= sol.a && sol.a < sol.b && sol.b <= 1.0);
        prop_assert!((sol.mass - 1.0).abs() < 1e-8, "mass {}", sol.mass);
        let p = &sol.profile;
        let mass = quadrature_oracle(|x| p.density(x), p.a, p.b, Weight::Unit).unwrap().value;
        prop_assert!((mass - 1.0).abs() < 1e-6, "quadrature mass {mass}");
        for i in 1..50 {
            let x = p.a + (p.b - p.a) * i as f64 / 50.0;
            prop_assert!(p.density(x) >= 0.0);
        }
        // The multiplier constraint holds: the rate is the mean of log(1 + rho x).
        let r = quadrature_oracle(|x| p.density(x) * (rho * x).ln_1p(), p.a, p.b, Weight::Unit).unwrap().value;
        prop_assert!((r - sol.r).abs() < 1e-6, "{r} vs {}", sol.r);
        prop_assert!(sol.exponent >= -1e-10);
    }

    #[test]
    fn exponent_slope_is_the_multiplier(
        n0 in 0.0f64..3.0, beta in 1.0f64..4.0, rho in 0.5f64..30.0, k in -10.0f64..10.0,
    ) {
        let gp = gas(n0, beta, rho);
        let sol = solve_at_multiplier(&gp, k).unwrap();
        let (low, high) = gp.rate_range();
        let h = 1e-5 * (high - low);
        prop_assume!(sol.r - h > low && sol.r + h < high);
        let slope = (rate_exponent(&gp, sol.r + h).unwrap() - rate_exponent(&gp, sol.r - h).unwrap()) / (2.0 * h);
        prop_assert!((slope - k).abs() < 1e-4 * (1.0 + k.abs()), "slope {slope} vs k {k}");
        // Round trip through the rate solver.
        let back = solve_regime(&gp, sol.r).unwrap();
        prop_assert!((back.k - k).abs() < 1e-6 * (1.0 + k.abs()));
    }

    #[test]
    fn solver_survives_near_the_free_corner(
        n0 in prop_oneof![Just(0.0f64), 1e-9f64..1e-2], beta in prop_oneof![Just(1.0f64), 1.0f64..1.01],
        rho in 0.1f64..100.0, t in 0.01f64..0.99,
    ) {
        let gp = gas(n0, beta, rho);
        let (low, high) = gp.rate_range();
        let r = low + t * (high - low);
        let sol = solve_regime(&gp, r).unwrap();
        prop_assert!((sol.r - r).abs() < 1e-8, "{} vs {r}", sol.r);
        prop_assert!((sol.mass - 1.0).abs() < 1e-8, "mass {}", sol.mass);
        prop_assert!(sol.exponent >= -1e-10);
    }

    #[test]
    fn exponent_is_convex_and_vanishes_at_ergodic_rate(
        n0 in 0.0f64..3.0, beta in 1.0f64..4.0, rho in 0.5f64..30.0, t in 0.05f64..0.95, s in 0.05f64..0.95,
    ) {
        let gp = gas(n0, beta, rho);
        let (low, high) = gp.rate_range();
        let (r1, r2) = (low + t * (high - low), low + s * (high - low));
        let mid = 0.5 * (r1 + r2);
        let e = |r| rate_exponent(&gp, r).unwrap();
        prop_assert!(e(mid) <= 0.5 * (e(r1) + e(r2)) + 1e-9);
        let erg = ergodic_summary(&gp).unwrap();
        prop_assert!(e(erg.r_erg).abs() < 1e-9);
        prop_assert!(e(r1) >= -1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn exact_outage_is_a_monotone_cdf(
        nt in 1usize..=2, extra in 0usize..=1, n0 in 0usize..=2, rho in prop_oneof![Just(1.0f64), Just(10.0)],
        u in 0.02f64..0.98, v in 0.02f64..0.98,
    ) {
        let nr = nt + extra;
        let dims = normalize_dims(nt + nr + n0, nt, nr).unwrap();
        let snr = SnrParam::new(rho).unwrap();
        let cfg = ExactConfig::new(dims, snr);
        let cap = snr.capacity();
        let (r1, r2) = (u.min(v) * cap, u.max(v) * cap);
        let p1 = outage_exact(&cfg, r1).unwrap().p;
        let p2 = outage_exact(&cfg, r2).unwrap().p;
        prop_assert!((0.0..=1.0).contains(&p1) && (0.0..=1.0).contains(&p2));
        prop_assert!(p1 <= p2 + 1e-12, "P({r1}) = {p1} > P({r2}) = {p2}");
    }
}
