use approx::assert_abs_diff_eq;
use trapwalk::trap::study::{dt_refinement, free_spreading, level_spacing};
use trapwalk::trap::{
    calibrate_hold_time, fidelity, CellSpec, HoldScan, PulseSchedule, PulseTarget, RampShape, HOLD_PI,
    HOLD_PI_OVER_2,
};

#[test]
fn split_step_is_second_order() {
    let r = dt_refinement(200.0, &[0.04, 0.02, 0.01, 0.005], 5.0).unwrap();
    assert!((r.order - 2.0).abs() <= 0.2, "{}", r.order);
    assert!(r.errors.windows(2).all(|w| w[1].1 < w[0].1));
}

#[test]
fn free_packet_spreads_analytically() {
    let (measured, analytic) = free_spreading(1.0, 5.0, 0.01).unwrap();
    assert_abs_diff_eq!(measured, analytic, epsilon = 1e-4);
    assert_abs_diff_eq!(analytic, (1.0f64 + 2.5 * 2.5).sqrt(), epsilon = 1e-12);
}

#[test]
fn deep_trap_is_nearly_harmonic() {
    let s = level_spacing(200.0, 0.1).unwrap();
    assert!((s - 1.0).abs() < 0.02, "{s}");
}

#[test]
fn ramp_out_mirrors_ramp_in() {
    for ramp in [RampShape::default(), RampShape::Smoothstep, RampShape::Linear] {
        let s = PulseSchedule::new(60.0, 28.8, 100.0, 17.0, ramp).unwrap();
        let d = s.duration();
        for i in 0..=50 {
            let t = d * i as f64 / 50.0;
            assert_abs_diff_eq!(s.separation(t), s.separation(d - t), epsilon = 1e-9);
        }
        assert_abs_diff_eq!(s.separation(0.0), 60.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.separation(d / 2.0), 28.8, epsilon = 1e-12);
    }
}

#[test]
fn calibration_reproduces_frozen_holds() {
    let cell = CellSpec::default();
    for target in [PulseTarget::PiOver2, PulseTarget::Pi] {
        let cal = calibrate_hold_time(&cell, &PulseSchedule::standard(0.0), target, 0, 200.0).unwrap();
        assert_abs_diff_eq!(cal.t_i, target.default_hold(), epsilon = 1e-3);
        assert!(cal.fidelity >= 0.99);
    }
    assert!(HOLD_PI_OVER_2 < HOLD_PI);
}

#[test]
fn ramps_alone_transfer_population() {
    let scan = HoldScan::new(&CellSpec::default(), &PulseSchedule::standard(0.0), 0).unwrap();
    let b = scan.block(0.0);
    assert!(b[(0, 1)].norm_sqr() > 0.01);
    let f = fidelity(&PulseTarget::PiOver2.matrix(), &scan.block(HOLD_PI_OVER_2));
    assert!(f >= 0.99, "{f}");
}
