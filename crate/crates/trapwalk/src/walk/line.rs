use std::collections::HashMap;

use crate::walk::coin::{phase_gate, CoinOp};
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Walker on the integer line with a two-dimensional coin (+, −).
///
/// The stored window starts at site `offset` and grows on every shift, so it
/// always holds every nonzero amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState1D {
    offset: i64,
    amps: Vec<[C64; 2]>,
}

/// Coin-conditioned displacement rules on the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shift1D {
    /// |k,±⟩ → |k±1,±⟩
    Standard,
    /// |k,±⟩ → |k±1,∓⟩
    FlipFlop,
    /// |k,+⟩ → √c|k+1,−⟩ + √(1−c) e^{iΔ}|k,+⟩,
    /// |k,−⟩ → √c|k−1,+⟩ − √(1−c) e^{−iΔ}|k,−⟩
    General(GeneralShiftParams),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralShiftParams {
    c: f64,
    delta_o: f64,
}

impl GeneralShiftParams {
    pub fn new(c: f64, delta_o: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::OutOfRange {
                name: "c",
                value: c,
                constraint: "0 <= c <= 1",
            });
        }
        Ok(Self { c, delta_o })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn delta_o(&self) -> f64 {
        self.delta_o
    }
}

impl WalkState1D {
    /// Walker localized at `site` with coin vector `coin` (normalized here).
    pub fn localized(site: i64, coin: [C64; 2]) -> Result<Self> {
        let n = (coin[0].norm_sqr() + coin[1].norm_sqr()).sqrt();
        if n == 0.0 {
            return Err(Error::Invalid("zero coin vector".into()));
        }
        Ok(Self {
            offset: site,
            amps: vec![[coin[0] / n, coin[1] / n]],
        })
    }

    pub fn plus(site: i64) -> Self {
        Self {
            offset: site,
            amps: vec![[C64::new(1.0, 0.0), ZERO]],
        }
    }

    pub fn minus(site: i64) -> Self {
        Self {
            offset: site,
            amps: vec![[ZERO, C64::new(1.0, 0.0)]],
        }
    }

    /// Builds a state from raw amplitudes; the norm must be 1 within 1e-10.
    pub fn from_amplitudes(offset: i64, amps: Vec<[C64; 2]>) -> Result<Self> {
        let s = Self { offset, amps };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::Invalid(format!("state norm {n} is not 1")));
        }
        Ok(s)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn amplitudes(&self) -> &[[C64; 2]] {
        &self.amps
    }

    pub fn amplitude(&self, site: i64, coin: usize) -> C64 {
        let i = site - self.offset;
        if i < 0 || i as usize >= self.amps.len() {
            ZERO
        } else {
            self.amps[i as usize][coin]
        }
    }

    pub fn sites(&self) -> std::ops::Range<i64> {
        self.offset..self.offset + self.amps.len() as i64
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    /// Applies `coin` at every site, or the override coin where one is given.
    pub fn apply_coin(
        &mut self,
        coin: &CoinOp,
        overrides: Option<&HashMap<i64, CoinOp>>,
    ) -> Result<()> {
        check_dim(coin)?;
        if let Some(map) = overrides {
            for c in map.values() {
                check_dim(c)?;
            }
        }
        for (i, a) in self.amps.iter_mut().enumerate() {
            let site = self.offset + i as i64;
            let c = overrides.and_then(|m| m.get(&site)).unwrap_or(coin);
            c.apply(a);
        }
        Ok(())
    }

    pub fn shift(&mut self, rule: Shift1D) {
        match rule {
            Shift1D::Standard => self.shift_standard(),
            Shift1D::FlipFlop => self.shift_flipflop(),
            Shift1D::General(p) => self.shift_general(p),
        }
    }

    pub fn shift_standard(&mut self) {
        let n = self.amps.len();
        let mut out = vec![[ZERO; 2]; n + 2];
        for (i, a) in self.amps.iter().enumerate() {
            out[i + 2][0] = a[0];
            out[i][1] = a[1];
        }
        self.amps = out;
        self.offset -= 1;
    }

    pub fn shift_flipflop(&mut self) {
        let n = self.amps.len();
        let mut out = vec![[ZERO; 2]; n + 2];
        for (i, a) in self.amps.iter().enumerate() {
            out[i + 2][1] = a[0];
            out[i][0] = a[1];
        }
        self.amps = out;
        self.offset -= 1;
    }

    pub fn shift_general(&mut self, p: GeneralShiftParams) {
        let n = self.amps.len();
        let sc = p.c.sqrt();
        let stay = C64::from_polar((1.0 - p.c).sqrt(), p.delta_o);
        let mut out = vec![[ZERO; 2]; n + 2];
        for (i, a) in self.amps.iter().enumerate() {
            out[i + 2][1] += a[0] * sc;
            out[i][0] += a[1] * sc;
            out[i + 1][0] += a[0] * stay;
            out[i + 1][1] -= a[1] * stay.conj();
        }
        self.amps = out;
        self.offset -= 1;
    }

    /// One walk step: coin everywhere, then the shift.
    pub fn step(&mut self, coin: &CoinOp, rule: Shift1D) -> Result<()> {
        self.apply_coin(coin, None)?;
        self.shift(rule);
        Ok(())
    }

    /// Step of the phase walk: diag(1, e^{iφ}) on the coin, then a plain step.
    pub fn phase_walk_step(&mut self, phi: f64, coin: &CoinOp, rule: Shift1D) -> Result<()> {
        if phi != 0.0 {
            self.apply_coin(&phase_gate(phi), None)?;
        }
        self.step(coin, rule)
    }

    /// Drops zero sites at both ends of the window.
    pub fn trim(&mut self) {
        let nz = |a: &[C64; 2]| a[0] != ZERO || a[1] != ZERO;
        let first = self.amps.iter().position(nz);
        let Some(first) = first else { return };
        let last = self.amps.iter().rposition(nz).unwrap();
        self.amps = self.amps[first..=last].to_vec();
        self.offset += first as i64;
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [[C64; 2]] {
        &mut self.amps
    }
}

fn check_dim(c: &CoinOp) -> Result<()> {
    if c.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: c.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::coin::{hadamard_coin, pauli_x};
    use crate::walk::metrics::position_distribution;

    #[test]
    fn flipflop_moves_and_flips() {
        let mut s = WalkState1D::plus(0);
        s.shift_flipflop();
        assert_eq!(s.amplitude(1, 1), C64::new(1.0, 0.0));
        s.shift_flipflop();
        assert_eq!(s.amplitude(0, 0), C64::new(1.0, 0.0));
    }

    #[test]
    fn general_shift_reduces_to_flipflop() {
        let p = GeneralShiftParams::new(1.0, 0.0).unwrap();
        let mut a = WalkState1D::plus(0);
        let mut b = a.clone();
        for _ in 0..6 {
            a.step(&hadamard_coin(), Shift1D::General(p)).unwrap();
            b.step(&hadamard_coin(), Shift1D::FlipFlop).unwrap();
        }
        for k in a.sites() {
            for c in 0..2 {
                assert!((a.amplitude(k, c) - b.amplitude(k, c)).norm() < 1e-15);
            }
        }
        assert!(GeneralShiftParams::new(1.5, 0.0).is_err());
    }

    #[test]
    fn general_shift_c_zero_stays() {
        let p = GeneralShiftParams::new(0.0, 0.4).unwrap();
        let mut s = WalkState1D::plus(3);
        s.apply_coin(&hadamard_coin(), None).unwrap();
        s.shift_general(p);
        let d = position_distribution(&s);
        assert!((d.prob(3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn override_is_local() {
        let mut a = WalkState1D::plus(0);
        for _ in 0..4 {
            a.step(&hadamard_coin(), Shift1D::Standard).unwrap();
        }
        let mut b = a.clone();
        let mut map = HashMap::new();
        map.insert(2, pauli_x());
        a.apply_coin(&CoinOp::identity(2), Some(&map)).unwrap();
        for k in a.sites() {
            for c in 0..2 {
                let same = a.amplitude(k, c) == b.amplitude(k, c);
                if k != 2 {
                    assert!(same);
                }
            }
        }
        b.apply_coin(&pauli_x(), None).unwrap();
        assert_eq!(a.amplitude(2, 0), b.amplitude(2, 0));
    }

    #[test]
    fn identity_coin_is_bit_identical() {
        let mut a = WalkState1D::plus(0);
        a.step(&hadamard_coin(), Shift1D::Standard).unwrap();
        let b = a.clone();
        a.apply_coin(&CoinOp::identity(2), None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coin_dimension_checked() {
        let mut a = WalkState1D::plus(0);
        assert!(a.apply_coin(&CoinOp::identity(4), None).is_err());
    }
}
