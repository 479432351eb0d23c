use std::f64::consts::PI;

use approx::assert_relative_eq;
use fluctoptics::ambient::{e2_casimir, e2_thermal, CasimirPlate, ThermalSource};
use fluctoptics::media::{
    chi3_cyclic_symmetrized, delta_n_classical, delta_n_quantum, probe_n_squared, quantum_coefficient, Axis,
    FieldStrength, Material, Polarization, SusceptibilityTensors, UnitSystem,
};
use fluctoptics::qstates::{
    coherent_photon_number, e2_mode_sum, e2_single_mode_squeezed, mode_amplitude, CoherentMode, Mode, ModeSet,
    SingleModeState, SqueezedBeam, SqueezedMode,
};
use fluctoptics::units::{
    convert_chi3_si_to_natural, kelvin_to_natural, ConversionConstants, Quantity, Unit,
};
use proptest::prelude::*;

const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

fn axis() -> impl Strategy<Value = Axis> {
    (0usize..3).prop_map(|i| AXES[i])
}

/// Periodic trapezoid rule, spectrally accurate for smooth periodic data.
fn periodic_mean(f: impl Fn(f64) -> f64, period: f64, samples: usize) -> f64 {
    let h = period / samples as f64;
    (0..samples).map(|i| f(i as f64 * h)).sum::<f64>() / samples as f64
}

fn random_tensor(values: &[f64], system: UnitSystem) -> SusceptibilityTensors {
    let mut t = SusceptibilityTensors::zeros(system);
    let mut it = values.iter().cycle();
    for i in AXES {
        for j in AXES {
            for k in AXES {
                for l in AXES {
                    t.set_chi3(i, j, k, l, *it.next().unwrap()).unwrap();
                }
            }
        }
    }
    for a in AXES {
        t.set_chi1(a, a, 11.25).unwrap();
    }
    t
}

proptest! {
    #[test]
    fn chi3_round_trip_si_natural(v in -1e-16f64..1e-16) {
        let c = ConversionConstants::default();
        let si = Quantity::new(v, Unit::SquareMetrePerSquareVolt);
        let nat = c.to_natural(si).unwrap();
        let back = c.to_si(nat, Unit::SquareMetrePerSquareVolt).unwrap();
        prop_assert!((back.value() - v).abs() <= 1e-12 * v.abs());
    }

    #[test]
    fn field_round_trip_si_natural(v in -1e9f64..1e9) {
        let c = ConversionConstants::default();
        let nat = c.to_natural(Quantity::new(v, Unit::VoltPerMetre)).unwrap();
        let back = c.to_si(nat, Unit::VoltPerMetre).unwrap();
        prop_assert!((back.value() - v).abs() <= 1e-12 * v.abs());
    }

    #[test]
    fn chi3_conversion_is_linear(v in -1e-16f64..1e-16, a in prop::sample::select(vec![2.0, 0.5, -4.0, 8.0])) {
        let f = |x: f64| convert_chi3_si_to_natural(Quantity::new(x, Unit::SquareMetrePerSquareVolt)).unwrap().value();
        prop_assert_eq!(f(a * v), a * f(v));
    }

    #[test]
    fn kelvin_doubling(t in 0.0f64..1e5) {
        let f = |x: f64| kelvin_to_natural(Quantity::kelvin(x)).unwrap().value();
        prop_assert_eq!(f(2.0 * t), 2.0 * f(t));
    }

    #[test]
    fn wrong_unit_tags_are_rejected(v in -10.0f64..10.0) {
        prop_assert!(convert_chi3_si_to_natural(Quantity::kelvin(v)).is_err());
        prop_assert!(kelvin_to_natural(Quantity::microns(v, -1)).is_err());
        prop_assert!(FieldStrength::new(Quantity::microns(v, 4)).is_err());
        let m = Material::cdgeas2();
        prop_assert!(delta_n_quantum(&m, Quantity::microns(v, -2)).is_err());
    }

    #[test]
    fn cyclic_symmetrization_is_idempotent(values in prop::collection::vec(-1.0f64..1.0, 81)) {
        let once = random_tensor(&values, UnitSystem::Natural).cyclic_symmetrized();
        let twice = once.cyclic_symmetrized();
        for i in AXES { for j in AXES { for k in AXES { for l in AXES {
            let a = once.chi3(i, j, k, l);
            let b = twice.chi3(i, j, k, l);
            prop_assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }}}}
    }

    #[test]
    fn cyclic_symmetrized_value_is_rotation_invariant(
        values in prop::collection::vec(-1.0f64..1.0, 81), i in axis(), j in axis(), k in axis(), l in axis()
    ) {
        let t = random_tensor(&values, UnitSystem::Natural);
        let a = chi3_cyclic_symmetrized(&t, i, j, k, l);
        let b = chi3_cyclic_symmetrized(&t, i, k, l, j);
        prop_assert!((a - b).abs() <= 1e-15);
    }

    #[test]
    fn index_difference_matches_birefringence(
        chi2 in prop::collection::vec(-1e-4f64..1e-4, 2),
        chi3 in prop::collection::vec(-1e-4f64..1e-4, 2),
        e in -0.5f64..0.5,
    ) {
        let mut t = SusceptibilityTensors::zeros(UnitSystem::Natural);
        for a in AXES { t.set_chi1(a, a, 11.25).unwrap(); }
        t.set_chi2(Axis::X, Axis::X, Axis::X, chi2[0]).unwrap();
        t.set_chi2(Axis::Y, Axis::Y, Axis::X, chi2[1]).unwrap();
        t.set_chi3(Axis::X, Axis::X, Axis::X, Axis::X, chi3[0]).unwrap();
        t.set_chi3(Axis::Y, Axis::Y, Axis::X, Axis::X, chi3[1]).unwrap();
        let m = Material::new("random", t).unwrap();
        let e0 = FieldStrength::natural(e).unwrap();
        let r = delta_n_classical(&m, e0);
        prop_assume!(r.total.abs() < 1e-4 && r.total != 0.0);
        let lhs = probe_n_squared(&m, Polarization::X, e0) - probe_n_squared(&m, Polarization::Y, e0);
        let rhs = 2.0 * m.n0() * m.n0() * r.total;
        prop_assert!((lhs - rhs).abs() <= 1e-6 * rhs.abs());
    }

    #[test]
    fn quantum_coefficient_ignores_unit_tag(values in prop::collection::vec(-1e5f64..1e5, 81)) {
        let si_values: Vec<f64> = values.iter().map(|v| v * 1e-22).collect();
        let si = Material::new("si", random_tensor(&si_values, UnitSystem::Si)).unwrap();
        let nat = Material::new("nat", si.tensors().to_natural(&ConversionConstants::default())).unwrap();
        let a = quantum_coefficient(&si).value();
        let b = quantum_coefficient(&nat).value();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
    }

    #[test]
    fn quantum_shift_is_linear(e2 in -1.0f64..1.0, a in prop::sample::select(vec![2.0, -1.0, 0.25, 16.0])) {
        let m = Material::cdgeas2();
        let one = delta_n_quantum(&m, Quantity::microns(e2, -4)).unwrap();
        let scaled = delta_n_quantum(&m, Quantity::microns(a * e2, -4)).unwrap();
        prop_assert_eq!(scaled, a * one);
    }

    #[test]
    fn quantum_shift_sign(e2 in -1.0f64..1.0) {
        let m = Material::cdgeas2();
        let dn = delta_n_quantum(&m, Quantity::microns(e2, -4)).unwrap();
        let c = quantum_coefficient(&m).value();
        prop_assert_eq!(dn.signum() * (e2 != 0.0) as i32 as f64, c.signum() * e2.signum() * (e2 != 0.0) as i32 as f64);
    }

    #[test]
    fn vacuum_reads_zero(omega in 0.1f64..10.0, t in -10.0f64..10.0, y in -10.0f64..10.0, eta in -PI..PI) {
        let modes = ModeSet::new(3.0, vec![Mode { k: [0.0, omega, 0.0], omega, q: 0.0, eta }]).unwrap();
        prop_assert_eq!(e2_mode_sum(&modes, t, [0.0, y, 0.0]).value(), 0.0);
        prop_assert_eq!(e2_single_mode_squeezed(0.0, eta, 1.0, t, y, omega, omega).value(), 0.0);
        let c = CoherentMode { z: 0.0, e0: 1.0, omega, k: omega };
        prop_assert_eq!(c.e2(t, y).value(), 0.0);
        let b = SqueezedBeam::new(omega, omega, 0.0, eta, 0.01, 0.01, 1.0).unwrap();
        prop_assert_eq!(b.e2(t, y).value(), 0.0);
    }

    #[test]
    fn coherent_is_never_negative(z in -5.0f64..5.0, t in -10.0f64..10.0, y in -10.0f64..10.0) {
        let c = CoherentMode { z, e0: 0.7, omega: 1.3, k: 1.3 };
        prop_assert!(c.e2(t, y).value() >= 0.0);
    }

    #[test]
    fn squeezed_goes_negative_somewhere(q in 1e-3f64..4.0, eta in -PI..PI) {
        let s = SqueezedMode { q, eta, e0: 0.5, omega: 2.0, k: 2.0 };
        // Minimum of the phase oscillation at 2φ + η = π with φ = −Ωt.
        let t = -(PI - eta) / (2.0 * s.omega);
        prop_assert!(s.e2(t, 0.0).value() < 0.0);
    }

    #[test]
    fn coherent_time_average_matches_quadrature(z in -3.0f64..3.0, omega in 0.1f64..10.0, y in -2.0f64..2.0) {
        let c = CoherentMode { z, e0: mode_amplitude(omega, 2.5), omega, k: omega };
        let analytic = c.time_averaged_e2().value();
        let numeric = periodic_mean(|t| c.e2(t, y).value(), c.period(), 64);
        prop_assert!((numeric - analytic).abs() <= 1e-9 * analytic.abs().max(1e-300), "{numeric} vs {analytic}");
    }

    #[test]
    fn squeezed_instantaneous_average_is_twice_the_stated_average(
        q in 0.0f64..3.0, eta in -PI..PI, omega in 0.1f64..10.0, y in -2.0f64..2.0
    ) {
        // The (2E⁰)² prefactor of the instantaneous form averages to 4(E⁰)²⟨n̂⟩.
        let s = SqueezedMode::in_volume(q, eta, omega, omega, 2.5);
        let numeric = periodic_mean(|t| s.e2(t, y).value(), s.period(), 64);
        let expected = (2.0 * s.e0).powi(2) * s.mean_photon_number();
        prop_assert!((numeric - expected).abs() <= 1e-9 * expected.abs().max(1e-300), "{numeric} vs {expected}");
        prop_assert!((s.time_averaged_e2().value() - 0.5 * expected).abs() <= 1e-15 * expected.max(1e-300));
    }

    #[test]
    fn average_per_photon_is_state_independent(q in 0.01f64..3.0, z in 0.01f64..5.0, omega in 0.1f64..10.0) {
        let e0 = mode_amplitude(omega, 1.7);
        let s = SqueezedMode { q, eta: 0.0, e0, omega, k: omega };
        let c = CoherentMode { z, e0, omega, k: omega };
        let rs = s.time_averaged_e2().value() / s.mean_photon_number();
        let rc = c.time_averaged_e2().value() / coherent_photon_number(z);
        prop_assert!((rs - 2.0 * e0 * e0).abs() <= 1e-12 * rs);
        prop_assert!((rc - 2.0 * e0 * e0).abs() <= 1e-12 * rc);
    }

    #[test]
    fn single_mode_sum_equals_single_mode_formula(
        q in 0.0f64..3.0, eta in -PI..PI, omega in 0.1f64..10.0, volume in 0.1f64..100.0,
        t in -5.0f64..5.0, y in -5.0f64..5.0,
    ) {
        let modes = ModeSet::new(volume, vec![Mode { k: [0.0, omega, 0.0], omega, q, eta }]).unwrap();
        let sum = e2_mode_sum(&modes, t, [0.0, y, 0.0]).value();
        // The mode sum carries cos(2ωt − 2ky − η) = cos(2φ + η) with φ = ky − ωt.
        let single = SqueezedMode::in_volume(q, eta, omega, omega, volume).e2(t, y).value();
        let scale = (omega / volume) * q.sinh() * q.cosh().max(1.0);
        prop_assert!((sum - single).abs() <= 1e-12 * scale.max(1e-300), "{sum} vs {single}");
    }

    #[test]
    fn beam_extrema_bound_the_oscillation(q in 0.01f64..3.0, t in 0.0f64..10.0) {
        let b = SqueezedBeam::in_medium(10.6, 3.5, q, 0.0, 0.01, 0.01).unwrap();
        let (lo, hi) = b.e2_extrema();
        let v = b.e2(t, 0.0).value();
        let slack = 1e-12 * hi.value();
        prop_assert!(v >= lo.value() - slack && v <= hi.value() + slack);
    }

    #[test]
    fn thermal_scales_as_fourth_power(t in 1.0f64..1e4) {
        let base = e2_thermal(&ThermalSource::kelvin(t).unwrap()).value();
        let tn = kelvin_to_natural(Quantity::kelvin(t)).unwrap().value();
        let ratio = base / tn.powi(4);
        prop_assert!((ratio - PI * PI / 15.0).abs() <= 4.0 * f64::EPSILON * ratio);
    }
}

#[test]
fn single_mode_trough_oracle() {
    // Independent evaluation of (1/V)·ω sinh q (sinh q − cosh q) at the trough.
    let (q, omega, volume) = (1.5_f64, 2.0, 4.0);
    let modes = ModeSet::new(volume, vec![Mode { k: [0.0, omega, 0.0], omega, q, eta: 0.0 }]).unwrap();
    let t = PI / (2.0 * omega);
    let expected = -omega / volume * q.sinh() * (-q).exp();
    assert_relative_eq!(e2_mode_sum(&modes, t, [0.0; 3]).value(), expected, max_relative = 1e-12);
}

#[test]
fn two_modes_superpose() {
    let a = Mode { k: [1.0, 0.0, 0.0], omega: 1.0, q: 0.5, eta: 0.1 };
    let b = Mode { k: [0.0, 0.0, 2.0], omega: 2.0, q: 0.8, eta: -0.4 };
    let both = ModeSet::new(2.0, vec![a, b]).unwrap();
    let only_a = ModeSet::new(2.0, vec![a]).unwrap();
    let only_b = ModeSet::new(2.0, vec![b]).unwrap();
    let x = [0.3, -0.2, 0.9];
    let sum = e2_mode_sum(&only_a, 0.7, x).value() + e2_mode_sum(&only_b, 0.7, x).value();
    assert_relative_eq!(e2_mode_sum(&both, 0.7, x).value(), sum, max_relative = 1e-14);
}

#[test]
fn casimir_log_slopes() {
    let slope = |f: &dyn Fn(f64) -> f64, z: f64| {
        let h = 1e-4;
        (f(z * (1.0 + h)).ln() - f(z * (1.0 - h)).ln()) / ((1.0 + h).ln() - (1.0 - h).ln())
    };
    let perfect = |z: f64| e2_casimir(&CasimirPlate::new(z, None).unwrap()).e2_total.value();
    let plasma = |z: f64| e2_casimir(&CasimirPlate::new(z, Some(10.0)).unwrap()).e2_total.value();
    for z in [0.05, 0.3, 1.0, 4.0] {
        assert!((slope(&perfect, z) + 4.0).abs() < 1e-6, "perfect slope at {z}");
        assert!((slope(&plasma, z) + 3.0).abs() < 1e-6, "plasma slope at {z}");
    }
}

#[test]
fn casimir_components_and_magnetic_field() {
    for z in [0.1, 0.5, 1.0, 7.0] {
        let f = e2_casimir(&CasimirPlate::new(z, None).unwrap());
        let per = f.e2_per_axis.value();
        assert_relative_eq!(per + per + per, f.e2_total.value(), max_relative = 4.0 * f64::EPSILON);
        assert_eq!(f.b2_total.value(), -f.e2_total.value());
        assert_eq!(f.e2_total.unit(), Unit::Micron(-4));
    }
}

#[test]
fn room_temperature_is_negligible_next_to_squeezing() {
    let room = e2_thermal(&ThermalSource::kelvin(300.0).unwrap()).value();
    // Squeezed-vacuum levels of order 1 µm⁻⁴.
    assert!(room < 1e-3 * 1.0, "{room}");
    // CdGeAs2 beam peak before the (Δk/k)Δθ suppression.
    let b = SqueezedBeam::in_medium(10.6, 3.5, 1.5, 0.0, 0.01, 0.01).unwrap();
    let peak = b.prefactor().value() * b.q.sinh() * b.q.exp();
    assert!(room < 0.1 * peak, "{room} vs {peak}");
}
