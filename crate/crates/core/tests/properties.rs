use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;

use quarkonium_core::action_angle::{
    action_1d_closed, action_1d_quadrature, energy_of_action, fourier_at_energy, omega0_exact, period, ActionAngleChart,
};
use quarkonium_core::chirikov::{scan_critical_field, width_from_amplitude, ScanSettings};
use quarkonium_core::dynamics::{step_with, Scheme};
use quarkonium_core::elliptic::{carlson_rf, ellip_e, ellip_k};
use quarkonium_core::potential::{potential_1d, turning_points_1d};
use quarkonium_core::{
    ChirikovConfig, DriveParams, EllipticModulus, PhaseState, RegularizedState, Resonance, ScanMode, SystemParams,
};

fn params() -> impl Strategy<Value = SystemParams> {
    (0.05f64..2.0, 0.01f64..2.0).prop_map(|(z, l)| SystemParams::new(z, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legendre_relation(k in 0.01f64..0.99) {
        let m = EllipticModulus::new(k).unwrap();
        let c = m.complement();
        let (kk, ek) = (ellip_k(m).unwrap(), ellip_e(m));
        let (kc, ec) = (ellip_k(c).unwrap(), ellip_e(c));
        prop_assert!((ek * kc + ec * kk - kk * kc - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn carlson_rf_is_homogeneous(x in 0.0f64..5.0, y in 0.1f64..5.0, z in 0.1f64..5.0, s in 0.1f64..10.0) {
        let lhs = carlson_rf(s * x, s * y, s * z);
        let rhs = carlson_rf(x, y, z) / s.sqrt();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-13);
    }

    #[test]
    fn outer_turning_point_is_on_the_energy_shell(p in params(), e in -3.0f64..5.0) {
        let a = turning_points_1d(e, &p).unwrap().a;
        prop_assert!((potential_1d(a, &p).unwrap() - e).abs() <= 1e-12 * (1.0 + e.abs() + p.z / a));
    }

    #[test]
    fn closed_form_action_matches_quadrature(p in params(), e in -2.0f64..5.0) {
        prop_assume!(turning_points_1d(e, &p).is_ok());
        let q = action_1d_quadrature(e, &p).unwrap();
        let c = action_1d_closed(e, &p).unwrap();
        prop_assert!((c / q - 1.0).abs() < 1e-8, "{c} vs {q}");
    }

    #[test]
    fn energy_action_round_trip(p in params(), n in 0.05f64..20.0) {
        let e = energy_of_action(n, &p).unwrap();
        let back = action_1d_quadrature(e, &p).unwrap();
        prop_assert!((back / n - 1.0).abs() < 1e-9);
    }

    #[test]
    fn frequency_is_positive_and_matches_period(p in params(), e in -1.0f64..5.0) {
        let w = omega0_exact(e, &p).unwrap();
        prop_assert!(w > 0.0);
        prop_assert!((w * period(e, &p).unwrap() / std::f64::consts::TAU - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fourier_amplitudes_are_real(p in params(), e in -1.0f64..5.0) {
        let amps = fourier_at_energy(e, 8, &p, 1024).unwrap();
        prop_assert!(amps.imag_residue < 1e-9 * amps.a);
        prop_assert!(amps.mean > 0.0 && amps.mean < amps.a);
    }

    #[test]
    fn regularized_round_trip(p in params(), x in 1e-3f64..10.0, mom in -5.0f64..5.0, t in 0.0f64..10.0) {
        let d = DriveParams::new(0.3, 1.7).unwrap();
        let s = PhaseState { x, p: mom, t };
        let back = RegularizedState::from_phase(&s, &p, &d).unwrap().to_phase().unwrap();
        prop_assert!((back.x / x - 1.0).abs() < 1e-12);
        prop_assert!((back.p - mom).abs() < 1e-12 * (1.0 + mom.abs()));
        prop_assert_eq!(back.t, t);
    }

    #[test]
    fn steps_are_reversible(p in params(), x in 0.05f64..3.0, mom in -2.0f64..2.0, eps in 0.0f64..1.0) {
        let d = DriveParams::new(eps, 1.3).unwrap();
        let s0 = RegularizedState::from_phase(&PhaseState { x, p: mom, t: 0.0 }, &p, &d).unwrap();
        let h = 1e-3;
        let mut s = s0;
        for _ in 0..200 {
            s = step_with(&s, h, Scheme::Yoshida4, &p, &d).unwrap();
        }
        for _ in 0..200 {
            s = step_with(&s, -h, Scheme::Yoshida4, &p, &d).unwrap();
        }
        prop_assert!((s.u - s0.u).abs() < 1e-10 * (1.0 + s0.u.abs()));
        prop_assert!((s.pu - s0.pu).abs() < 1e-10 * (1.0 + s0.pu.abs()));
        prop_assert!((s.t - s0.t).abs() < 1e-10);
    }

    #[test]
    fn width_scales_as_square_root_of_field(eps in 1e-6f64..1e3, xk in -1.0f64..1.0, wp in 0.01f64..10.0) {
        prop_assume!(xk != 0.0);
        let res = Resonance { k: 1, n_k: 1.0, omega0: 1.0, omega0_prime: -wp };
        let cfg = ChirikovConfig::default();
        let w1 = width_from_amplitude(eps, xk, &res, &cfg).unwrap();
        let w4 = width_from_amplitude(4.0 * eps, xk, &res, &cfg).unwrap();
        prop_assert!((w4 / w1 - 2.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scan_emits_one_row_per_point_and_mode(ns in proptest::collection::vec(0.5f64..20.0, 1..8)) {
        let p = SystemParams::new(0.15, 0.4).unwrap();
        let chart = ActionAngleChart::from_action_range(&p, 0.1, 400.0, 128).unwrap();
        let settings = ScanSettings {
            k: 1,
            gates: Default::default(),
            chirikov: ChirikovConfig::default(),
            chart: Some(&chart),
        };
        let modes = [ScanMode::Hydrogen, ScanMode::SmallA, ScanMode::LargeA, ScanMode::Numeric];
        let rows = scan_critical_field(&ns, 1.0, &modes, &p, &settings).unwrap();
        prop_assert_eq!(rows.len(), ns.len() * modes.len());
        for (i, r) in rows.iter().enumerate() {
            prop_assert_eq!(r.n, ns[i / modes.len()]);
            prop_assert_eq!(r.mode, modes[i % modes.len()]);
            prop_assert_eq!(r.epsilon_cr.is_some(), r.error.is_none());
        }
    }
}
