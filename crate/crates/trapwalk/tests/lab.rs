use std::f64::consts::FRAC_1_SQRT_2;

use approx::assert_abs_diff_eq;
use trapwalk::lab::thermal::mean_quanta_of;
use trapwalk::lab::{
    boltzmann_weights, decoherence_budget, interior_minimum, mean_quanta, search_experiment, shaking_sweep,
    temperature_mapping, thermal_average, CellReducer, ShakeSweep, Species, ThermalSpec, WalkPulses,
};
use trapwalk::trap::line::row_bounds;
use trapwalk::trap::{run_walk_line, CellSpec, LineSpec};
use trapwalk::walk::{l1_distance, Distribution, SearchSetup, TrapRow};
use trapwalk::C64;

#[test]
fn ground_population_maps_to_temperature() {
    let t1 = temperature_mapping(0.5, 1e5, Species::Rb87).unwrap();
    let t2 = temperature_mapping(0.25, 1e5, Species::Rb87).unwrap();
    assert_abs_diff_eq!(t1 * 1e6, 1.1, epsilon = 0.022);
    assert_abs_diff_eq!(t2 * 1e6, 2.7, epsilon = 0.054);
    assert_eq!(temperature_mapping(0.5, 1e5, Species::Cs133).unwrap(), t1);
    assert_abs_diff_eq!(mean_quanta(0.5).unwrap(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(mean_quanta(0.25).unwrap(), 3.0, epsilon = 1e-15);
    assert!(temperature_mapping(1.0, 1e5, Species::Rb87).is_err());
}

#[test]
fn harmonic_ladder_weights() {
    let energies: Vec<f64> = (0..40).map(|j| j as f64 + 0.5).collect();
    let spec = ThermalSpec::from_ground_population(0.5).unwrap();
    let w = boltzmann_weights(&energies, &spec).unwrap();
    assert_abs_diff_eq!(w.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(w[0], 0.5, epsilon = 1e-3);
    assert_abs_diff_eq!(mean_quanta_of(&w), 1.0, epsilon = 0.02);
    assert!(boltzmann_weights(&energies[..3], &ThermalSpec::from_ground_population(0.01).unwrap()).is_err());
    let mix = thermal_average(&[Distribution::point(0), Distribution::point(2)], &[0.25, 0.75]).unwrap();
    assert_abs_diff_eq!(mix.prob(2), 0.75, epsilon = 1e-15);
}

#[test]
fn budget_arithmetic() {
    let b = decoherence_budget(1e5, 500.0, 1.0, 17).unwrap();
    assert_abs_diff_eq!(b.step_duration, 5e-3, epsilon = 1e-18);
    assert_abs_diff_eq!(b.p, 5e-3, epsilon = 1e-18);
    assert_abs_diff_eq!(b.tp, 8.5e-2, epsilon = 1e-17);
    assert!(decoherence_budget(1e5, 500.0, -1.0, 17).is_err());
}

#[test]
fn search_regression() {
    let r = search_experiment(&SearchSetup::new(8, Some((3, 4))).unwrap(), 200).unwrap();
    assert_eq!(r.max.0, 77);
    assert_abs_diff_eq!(r.max.1, 0.3604, epsilon = 1e-4);
    assert!(r.max.1 >= 10.0 / 64.0);
    let (t, p) = r.first_peak.unwrap();
    assert_eq!(t, 6);
    assert_abs_diff_eq!(p, 0.191, epsilon = 1e-3);
    assert_abs_diff_eq!(r.series[0], 1.0 / 64.0, epsilon = 1e-15);
}

#[test]
fn interior_minimum_rules() {
    assert_eq!(interior_minimum(&[3.0, 1.0, 2.0]), Some(1));
    assert_eq!(interior_minimum(&[1.0, 2.0, 3.0]), None);
    assert_eq!(interior_minimum(&[3.0, 2.0, 1.0]), None);
    assert_eq!(interior_minimum(&[]), None);
}

fn small_sweep(seed: u64) -> ShakeSweep {
    ShakeSweep {
        amplitudes: vec![0.05],
        steps: 3,
        realizations: 4,
        bins: 3,
        seed,
        ..ShakeSweep::default()
    }
}

#[test]
fn shaking_is_seeded() {
    let a = shaking_sweep(&small_sweep(5)).unwrap();
    let b = shaking_sweep(&small_sweep(5)).unwrap();
    assert_eq!(a, b);
    let p = &a.points[0];
    assert_eq!(p.metrics.len(), 4);
    for (_, d) in &p.distributions {
        assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn engines_agree_on_a_short_row() {
    let cell = CellSpec::default();
    let pulses = WalkPulses::standard();
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let initial = [(0, 0, h), (1, 0, h)];
    let spec = LineSpec {
        cell,
        n_traps: 4,
        coin: pulses.coin,
        shift: pulses.shift,
        levels: 1,
    };
    let full = run_walk_line(&spec, &initial, 2, None).unwrap();
    let bounds = row_bounds(4);
    let mut red = CellReducer::new(cell, pulses, 1, Some(bounds)).unwrap();
    let reduced = red.walk(&TrapRow::from_traps(&initial, 1, Some(bounds)).unwrap(), 2, 0).unwrap();
    for (f, r) in full.iter().zip(&reduced) {
        let d = l1_distance(&f.spatial.normalized(), &r.traps.normalized());
        assert!(d <= 0.05, "step {}: {d}", f.step);
    }
}
