use nalgebra::DMatrix;

use crate::{Error, Result, C64};

const FIT_TOL: f64 = 1e-6;

fn check_unitary(u: &DMatrix<C64>) -> Result<()> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: u.nrows(),
        });
    }
    let d = u.adjoint() * u - DMatrix::<C64>::identity(2, 2);
    let e = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if e > FIT_TOL {
        return Err(Error::NotUnitary(e));
    }
    Ok(())
}

/// Unitary polar factor W V† of U = W Σ V†.
pub fn nearest_unitary(u: &DMatrix<C64>) -> DMatrix<C64> {
    let svd = u.clone().svd(true, true);
    svd.u.expect("requested U") * svd.v_t.expect("requested V†")
}

/// Coin parameters (p, Δ_C) of a 2×2 block in (+, −) order, with the global
/// phase chosen so that U₊₊ is real and nonnegative.
pub fn fit_coin_params(u: &DMatrix<C64>) -> Result<(f64, f64)> {
    check_unitary(u)?;
    let a = u[(0, 0)];
    let b = u[(1, 0)];
    let p = a.norm_sqr();
    let delta = if b.norm() < 1e-12 {
        0.0
    } else if a.norm() < 1e-12 {
        b.arg()
    } else {
        (b * a.conj()).arg()
    };
    Ok((p, delta))
}

/// Shift parameters (c, Δ_O) of a 2×2 shift-pulse block. Index 0 is the
/// right trap |k+1,−⟩ and index 1 the left trap |k,+⟩; the global phase makes
/// the transfer amplitude ⟨k+1,−|U|k,+⟩ real and nonnegative.
pub fn fit_shift_params(u: &DMatrix<C64>) -> Result<(f64, f64)> {
    check_unitary(u)?;
    let transfer = u[(0, 1)];
    let stay = u[(1, 1)];
    let c = transfer.norm_sqr();
    let delta = if stay.norm() < 1e-12 {
        0.0
    } else if transfer.norm() < 1e-12 {
        stay.arg()
    } else {
        (stay * transfer.conj()).arg()
    };
    Ok((c, delta))
}

/// |tr(T†U)| / 2 for 2×2 blocks: overlap up to a global phase.
pub fn fidelity(target: &DMatrix<C64>, u: &DMatrix<C64>) -> f64 {
    let n = target.nrows() as f64;
    (target.adjoint() * u).trace().norm() / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn m(e: [C64; 4]) -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &e)
    }

    #[test]
    fn hadamard_fit() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let (p, d) = fit_coin_params(&m([h, h, h, -h])).unwrap();
        assert!((p - 0.5).abs() < 1e-15 && d.abs() < 1e-15);
    }

    #[test]
    fn tunneling_fit() {
        let c = C64::new(FRAC_1_SQRT_2, 0.0);
        let s = C64::new(0.0, FRAC_1_SQRT_2);
        let g = C64::from_polar(1.0, 0.7);
        let (p, d) = fit_coin_params(&m([c * g, s * g, s * g, c * g])).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((d - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn pi_pulse_shift_fit() {
        let z = C64::new(0.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let (c, _) = fit_shift_params(&m([z, i, i, z])).unwrap();
        assert!((c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_unitary_rejected() {
        let o = C64::new(1.0, 0.0);
        assert!(fit_coin_params(&m([o, o, o, o])).is_err());
    }

    #[test]
    fn polar_factor_of_scaled_unitary() {
        let c = C64::new(0.6, 0.0);
        let s = C64::new(0.0, 0.8);
        let u = m([c, s, s, c]);
        let w = nearest_unitary(&(u.clone() * C64::new(0.97, 0.0)));
        assert!((w - u).iter().all(|z| z.norm() < 1e-12));
    }
}
