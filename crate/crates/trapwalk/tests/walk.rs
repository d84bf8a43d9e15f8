use std::f64::consts::FRAC_1_SQRT_2;

use approx::assert_abs_diff_eq;
use trapwalk::walk::coin::{coin_entangled_2d, hadamard_coin, pauli_x, tunneling_coin};
use trapwalk::walk::{
    decohere_evolve, evolve_1d, position_distribution, scaling_exponent, search_step, variance, DecoherenceModel,
    GeneralShiftParams, SearchSetup, Shift1D, Target, WalkState1D, WalkState2D,
};
use trapwalk::C64;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Site probabilities of the Hadamard walk from |0,+⟩, sites −t..=t.
fn oracle(t: usize) -> Vec<f64> {
    let w = 2 * t + 1;
    let (mut p, mut m) = (vec![c(0.0); w], vec![c(0.0); w]);
    p[t] = c(1.0);
    for _ in 0..t {
        let (mut np, mut nm) = (vec![c(0.0); w], vec![c(0.0); w]);
        for i in 0..w {
            if i + 1 < w {
                np[i + 1] += (p[i] + m[i]) * FRAC_1_SQRT_2;
            }
            if i > 0 {
                nm[i - 1] += (p[i] - m[i]) * FRAC_1_SQRT_2;
            }
        }
        p = np;
        m = nm;
    }
    (0..w).map(|i| p[i].norm_sqr() + m[i].norm_sqr()).collect()
}

#[test]
fn hadamard_matches_oracle_to_t20() {
    let dists = evolve_1d(&WalkState1D::plus(0), &hadamard_coin(), Shift1D::Standard, 20).unwrap();
    for (i, d) in dists.iter().enumerate() {
        let t = i + 1;
        for (j, p) in oracle(t).into_iter().enumerate() {
            assert_abs_diff_eq!(d.prob(j as i64 - t as i64), p, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn unitary_spreading_is_ballistic() {
    let dists = evolve_1d(&WalkState1D::plus(0), &hadamard_coin(), Shift1D::Standard, 100).unwrap();
    let s: Vec<(f64, f64)> = (10..=100).map(|t| (t as f64, variance(&dists[t - 1], 0.0))).collect();
    let e = scaling_exponent(&s).unwrap();
    assert!((1.9..=2.0).contains(&e), "{e}");
}

#[test]
fn flipflop_is_standard_with_flipped_coin() {
    let h = hadamard_coin();
    let x = pauli_x();
    let mut ff = WalkState1D::plus(0);
    let mut st = WalkState1D::minus(0);
    let hx = h.mul(&x);
    for _ in 0..15 {
        ff.step(&h, Shift1D::FlipFlop).unwrap();
        st.step(&hx, Shift1D::Standard).unwrap();
        let a = position_distribution(&ff);
        let b = position_distribution(&st);
        for k in a.sites() {
            assert_abs_diff_eq!(a.prob(k), b.prob(k), epsilon = 1e-14);
        }
    }
}

#[test]
fn general_shift_limits() {
    let full = GeneralShiftParams::new(1.0, 0.3).unwrap();
    let mut a = WalkState1D::plus(0);
    let mut b = WalkState1D::plus(0);
    for _ in 0..8 {
        a.step(&hadamard_coin(), Shift1D::General(full)).unwrap();
        b.step(&hadamard_coin(), Shift1D::FlipFlop).unwrap();
    }
    let (pa, pb) = (position_distribution(&a), position_distribution(&b));
    for k in pb.sites() {
        assert_abs_diff_eq!(pa.prob(k), pb.prob(k), epsilon = 1e-14);
    }
    let part = GeneralShiftParams::new(0.9, 0.1).unwrap();
    let mut s = WalkState1D::plus(0);
    for _ in 0..30 {
        s.step(&tunneling_coin(1.0), Shift1D::General(part)).unwrap();
    }
    assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
    assert!(GeneralShiftParams::new(1.1, 0.0).is_err());
}

#[test]
fn zero_phase_walk_is_plain_hadamard() {
    let mut a = WalkState1D::plus(0);
    let mut b = WalkState1D::plus(0);
    for _ in 0..10 {
        a.phase_walk_step(0.0, &hadamard_coin(), Shift1D::Standard).unwrap();
        b.step(&hadamard_coin(), Shift1D::Standard).unwrap();
    }
    assert_eq!(a, b);
}

#[test]
fn entangled_lattice_walk_keeps_norm() {
    let mut s = WalkState2D::localized(0, 0, [c(0.5), c(0.5), c(0.5), c(0.5)]).unwrap();
    for _ in 0..12 {
        s.apply_coin(&coin_entangled_2d(), None).unwrap();
        s.shift_2d();
    }
    assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
}

#[test]
fn unmarked_search_state_is_stationary() {
    let setup = SearchSetup::new(6, None).unwrap();
    let start = WalkState2D::search_initial(&setup);
    let mut s = start.clone();
    for _ in 0..40 {
        search_step(&mut s, &setup).unwrap();
        for (_, _, p) in s.site_distribution() {
            assert_abs_diff_eq!(p, 1.0 / 36.0, epsilon = 1e-12);
        }
    }
    assert_abs_diff_eq!(s.inner(&start).norm(), 1.0, epsilon = 1e-12);
}

#[test]
fn decoherence_without_events_is_unitary() {
    let model = DecoherenceModel::new(0.0, Target::Both, 64, 3).unwrap();
    let snaps = decohere_evolve(&WalkState1D::plus(0), &model, &hadamard_coin(), Shift1D::Standard, 10, 0.0).unwrap();
    let exact = evolve_1d(&WalkState1D::plus(0), &hadamard_coin(), Shift1D::Standard, 10).unwrap();
    for (s, d) in snaps.iter().zip(&exact) {
        for k in d.sites() {
            assert_abs_diff_eq!(s.mean.prob(k), d.prob(k), epsilon = 1e-12);
        }
    }
}

#[test]
fn decoherence_is_seeded() {
    let run = |seed| {
        let model = DecoherenceModel::new(0.3, Target::Coin, 300, seed).unwrap();
        decohere_evolve(&WalkState1D::plus(0), &model, &hadamard_coin(), Shift1D::Standard, 12, 0.0).unwrap()
    };
    assert_eq!(run(9), run(9));
    assert_ne!(run(9), run(10));
}
