use std::f64::consts::PI;

use dkho::params::*;
use proptest::prelude::*;

fn strontium_like() -> PhysicalParams {
    PhysicalParams {
        rabi: 1e7,
        detuning: 2e8,
        pulse_width: 1e-6,
        mass: 40.0 * 1.660_539_066_60e-27,
        trap_freq: 2.0 * PI * 1e6,
        wavenumber: 2.0 * PI / 397e-9,
    }
}

#[test]
#[allow(clippy::excessive_precision)]
fn conversion_matches_high_precision_evaluation() {
    // reference values evaluated independently with 40-digit arithmetic
    let k = kappa_from_physical(&strontium_like(), &AdiabaticBounds::default()).unwrap();
    assert!((k.eta / 0.177_896_730_162_668_104_7 - 1.0).abs() < 1e-12);
    assert!((k.kappa / 0.004_957_992_696_763_730_968_6 - 1.0).abs() < 1e-12);
    assert!((k.big_k / 1.168_237_423_811_298_207_6e-35 - 1.0).abs() < 1e-12);
    assert!((k.rabi_ratio - 0.05).abs() < 1e-15);
    assert!((k.width_detuning - 200.0).abs() < 1e-9);
}

#[test]
fn adiabatic_bounds_are_enforced() {
    let bounds = AdiabaticBounds::default();
    let mut p = strontium_like();
    p.rabi = 0.0;
    let k = kappa_from_physical(&p, &bounds).unwrap();
    assert_eq!(k.kappa, 0.0);
    assert_eq!(k.big_k, 0.0);

    p.rabi = 1e8;
    assert!(matches!(
        kappa_from_physical(&p, &bounds),
        Err(dkho::Error::AdiabaticValidity { .. })
    ));

    let mut p = strontium_like();
    p.pulse_width = 1e-8;
    assert!(matches!(
        kappa_from_physical(&p, &bounds),
        Err(dkho::Error::AdiabaticValidity { .. })
    ));
}

#[test]
fn resonances_are_reduced() {
    assert_eq!(reduce_resonance(2, 12).unwrap(), (1, 6));
    assert!((nu_tau(1, 6).unwrap() - PI / 3.0).abs() < 1e-15);
    let m = ModelParams::new(2, 12, 0.5, 0.2, 0.225, 400, 1000).unwrap();
    assert_eq!((m.r, m.q), (1, 6));
    assert!((m.delta_kappa() - 0.025).abs() < 1e-15);
    assert!(ModelParams::new(0, 6, 0.5, 0.2, 0.2, 400, 10).is_err());
    assert!(ModelParams::new(1, 1, 0.5, 0.2, 0.2, 400, 10).is_err());
    assert!(ModelParams::new(1, 6, -0.5, 0.2, 0.2, 400, 10).is_err());
}

proptest! {
    #[test]
    fn phase_point_roundtrip(x in -20.0..20.0f64, p in -20.0..20.0f64, eta in 0.01..2.0f64) {
        let back = phasepoint_from_alpha(alpha_from_phasepoint(PhasePoint::new(x, p), eta), eta);
        prop_assert!((back.x - x).abs() <= 1e-13 * (1.0 + x.abs()));
        prop_assert!((back.p - p).abs() <= 1e-13 * (1.0 + p.abs()));
    }

    #[test]
    fn kappa_consistent_with_big_k(
        rabi in 1e5..1e7f64,
        detuning in prop_oneof![2e8..1e9f64, -1e9..-2e8f64],
        width in 1e-7..1e-5f64,
        trap in 1e5..1e7f64,
    ) {
        let mut p = strontium_like();
        p.rabi = rabi;
        p.detuning = detuning;
        p.pulse_width = width;
        p.trap_freq = trap;
        let k = kappa_from_physical(&p, &AdiabaticBounds::default()).unwrap();
        prop_assert!((k.kappa_from_big_k() - k.kappa).abs() <= 1e-12 * k.kappa.abs());
        prop_assert_eq!(k.kappa.signum(), detuning.signum());
    }

    #[test]
    fn kappa_linear_in_width_and_quadratic_in_rabi(s in 1.1..3.0f64) {
        let bounds = AdiabaticBounds::default();
        let base = strontium_like();
        let k0 = kappa_from_physical(&base, &bounds).unwrap().kappa;
        let mut wide = base;
        wide.pulse_width *= s;
        let kw = kappa_from_physical(&wide, &bounds).unwrap().kappa;
        prop_assert!((kw / k0 - s).abs() < 1e-12 * s);
        let mut strong = base;
        strong.rabi /= s;
        let kr = kappa_from_physical(&strong, &bounds).unwrap().kappa;
        prop_assert!((kr / k0 - 1.0 / (s * s)).abs() < 1e-12);
    }
}
