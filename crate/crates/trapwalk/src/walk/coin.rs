use std::f64::consts::FRAC_1_SQRT_2;

use crate::{Error, Result, C64};

const UNITARY_TOL: f64 = 1e-12;

/// Dense unitary acting on the coin space.
///
/// Entries are stored row-major. Two-dimensional coins use the basis (+, −);
/// four-dimensional coins use (++, +−, −+, −−) with the first sign the
/// spatially delocalized qubit and the second the hyperfine qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinOp {
    dim: usize,
    m: Vec<C64>,
}

impl CoinOp {
    /// Builds a coin from row-major entries, rejecting non-unitary input.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let c = Self { dim, m: entries };
        let dev = c.unitarity_error();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(c)
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    fn raw(dim: usize, m: Vec<C64>) -> Self {
        Self { dim, m }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            m[i * dim + i] = C64::new(1.0, 0.0);
        }
        Self::raw(dim, m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.m[row * self.dim + col]
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &CoinOp) -> CoinOp {
        assert_eq!(self.dim, rhs.dim, "coin dimensions differ");
        let d = self.dim;
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.m[i * d + k];
                for j in 0..d {
                    m[i * d + j] += a * rhs.m[k * d + j];
                }
            }
        }
        Self::raw(d, m)
    }

    pub fn adjoint(&self) -> CoinOp {
        let d = self.dim;
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                m[j * d + i] = self.m[i * d + j].conj();
            }
        }
        Self::raw(d, m)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &CoinOp) -> CoinOp {
        let (a, b) = (self.dim, rhs.dim);
        let d = a * b;
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..a {
            for j in 0..a {
                let s = self.m[i * a + j];
                for k in 0..b {
                    for l in 0..b {
                        m[(i * b + k) * d + j * b + l] = s * rhs.m[k * b + l];
                    }
                }
            }
        }
        Self::raw(d, m)
    }

    pub fn scale(&self, s: C64) -> CoinOp {
        Self::raw(self.dim, self.m.iter().map(|&z| z * s).collect())
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &CoinOp) -> f64 {
        assert_eq!(self.dim, other.dim, "coin dimensions differ");
        self.m
            .iter()
            .zip(&other.m)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn unitarity_error(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    /// Applies the coin in place to one coin vector.
    pub fn apply(&self, v: &mut [C64]) {
        let d = self.dim;
        debug_assert_eq!(v.len(), d);
        let mut buf = [C64::new(0.0, 0.0); 16];
        let mut heap;
        let out: &mut [C64] = if d <= 16 {
            &mut buf[..d]
        } else {
            heap = vec![C64::new(0.0, 0.0); d];
            &mut heap
        };
        for i in 0..d {
            let row = &self.m[i * d..(i + 1) * d];
            out[i] = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        v.copy_from_slice(out);
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn hadamard_coin() -> CoinOp {
    let h = re(FRAC_1_SQRT_2);
    CoinOp::raw(2, vec![h, h, h, -h])
}

/// Coin realized by a tunneling pulse of area `theta`.
pub fn tunneling_coin(theta: f64) -> CoinOp {
    let c = re((theta / 2.0).cos());
    let s = C64::new(0.0, (theta / 2.0).sin());
    CoinOp::raw(2, vec![c, s, s, c])
}

/// Biased coin with |+⟩ ↦ √p|+⟩ + √(1−p) e^{iΔ}|−⟩ and the orthogonal
/// |−⟩ ↦ √(1−p)|+⟩ − √p e^{iΔ}|−⟩. At p = ½, Δ = 0 this is the Hadamard coin.
pub fn biased_coin(p: f64, delta: f64) -> Result<CoinOp> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            constraint: "0 <= p <= 1",
        });
    }
    let e = C64::from_polar(1.0, delta);
    let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
    Ok(CoinOp::raw(2, vec![re(a), re(b), e * b, -e * a]))
}

pub fn pauli_x() -> CoinOp {
    CoinOp::raw(2, vec![re(0.0), re(1.0), re(1.0), re(0.0)])
}

/// diag(1, e^{iφ}) on the coin.
pub fn phase_gate(phi: f64) -> CoinOp {
    CoinOp::raw(
        2,
        vec![re(1.0), re(0.0), re(0.0), C64::from_polar(1.0, phi)],
    )
}

pub fn x_not() -> CoinOp {
    pauli_x()
}

pub fn x_phase() -> CoinOp {
    phase_gate(std::f64::consts::PI)
}

/// π pulse on the hyperfine qubit conditioned on the delocalized qubit being |+⟩.
pub fn x_prime_not() -> CoinOp {
    let plus = CoinOp::raw(2, vec![re(1.0), re(0.0), re(0.0), re(0.0)]);
    let minus = CoinOp::raw(2, vec![re(0.0), re(0.0), re(0.0), re(1.0)]);
    let a = plus.kron(&pauli_x());
    let b = minus.kron(&CoinOp::identity(2));
    CoinOp::raw(4, a.m.iter().zip(&b.m).map(|(x, y)| x + y).collect())
}

/// H ⊗ H on (delocalized, hyperfine).
pub fn coin_separable_2d() -> CoinOp {
    hadamard_coin().kron(&hadamard_coin())
}

pub fn coin_entangled_2d() -> CoinOp {
    #[rustfmt::skip]
    let m = [
        1.0,  1.0,  1.0, -1.0,
        1.0, -1.0,  1.0,  1.0,
        1.0,  1.0, -1.0,  1.0,
        1.0, -1.0, -1.0, -1.0,
    ];
    CoinOp::raw(4, m.iter().map(|&x| re(x / 2.0)).collect())
}

/// Search coin for unmarked sites: ½(J − 2I).
pub fn coin_c0() -> CoinOp {
    let mut m = vec![re(0.5); 16];
    for i in 0..4 {
        m[i * 4 + i] = re(-0.5);
    }
    CoinOp::raw(4, m)
}

/// Search coin for the marked site: −I.
pub fn coin_c1() -> CoinOp {
    CoinOp::identity(4).scale(re(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_spectrum() {
        let h = hadamard_coin();
        // trace 0 and determinant −1 fix the eigenvalues to ±1
        let tr = h.get(0, 0) + h.get(1, 1);
        let det = h.get(0, 0) * h.get(1, 1) - h.get(0, 1) * h.get(1, 0);
        assert!(tr.norm() < 1e-15);
        assert!((det - re(-1.0)).norm() < 1e-15);
        assert!(h.mul(&h).max_abs_diff(&CoinOp::identity(2)) < 1e-15);
    }

    #[test]
    fn tunneling_half_pulses_compose() {
        let q = tunneling_coin(std::f64::consts::FRAC_PI_2);
        let p = tunneling_coin(std::f64::consts::PI);
        assert!(q.mul(&q).max_abs_diff(&p) < 1e-15);
        assert!(tunneling_coin(0.0).max_abs_diff(&CoinOp::identity(2)) < 1e-15);
        assert!((p.get(1, 0) - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(p.get(0, 0).norm() < 1e-15);
    }

    #[test]
    fn biased_coin_range_and_limit() {
        assert!(biased_coin(1.2, 0.0).is_err());
        assert!(biased_coin(-0.1, 0.0).is_err());
        let c = biased_coin(0.5, 0.0).unwrap();
        assert!(c.max_abs_diff(&hadamard_coin()) < 1e-15);
        assert!(biased_coin(0.8, 0.3).unwrap().unitarity_error() < 1e-12);
    }

    #[test]
    fn construction_rejects_non_unitary() {
        assert!(matches!(
            CoinOp::from_real(2, &[1.0, 1.0, 0.0, 1.0]),
            Err(Error::NotUnitary(_))
        ));
        assert!(matches!(
            CoinOp::from_real(2, &[1.0, 0.0, 0.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn kron_ordering() {
        let z = x_phase();
        let k = CoinOp::identity(2).kron(&z);
        let diag: Vec<f64> = (0..4).map(|i| k.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn separable_column() {
        let c = coin_separable_2d();
        for i in 0..4 {
            assert!((c.get(i, 0) - re(0.5)).norm() < 1e-15);
        }
        assert!(c.mul(&c).max_abs_diff(&CoinOp::identity(4)) < 1e-15);
    }

    #[test]
    fn search_coins_are_unitary_involutions() {
        let c0 = coin_c0();
        assert!(c0.unitarity_error() < 1e-12);
        assert!(c0.max_abs_diff(&c0.adjoint()) < 1e-15);
        assert!(c0.mul(&c0).max_abs_diff(&CoinOp::identity(4)) < 1e-12);
        assert!(coin_c1().unitarity_error() < 1e-12);
        assert!(x_prime_not().unitarity_error() < 1e-12);
        assert!(coin_entangled_2d().unitarity_error() < 1e-12);
    }
}
