//! Walk on a row of traps with `levels` vibrational states per trap.
//!
//! Pulses act on disjoint neighboring pairs. A coin pulse couples traps
//! (2k, 2k+1), a shift pulse couples (2k+1, 2k+2). Qubit k owns traps 2k
//! (coin −) and 2k+1 (coin +), so with one level and a π shift pulse this is
//! the flip-flop walk with a 2N-dimensional coin.

use nalgebra::DMatrix;

use crate::walk::line::WalkState1D;
use crate::walk::metrics::Distribution;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Which trap pairs a pulse couples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PulseKind {
    Coin,
    Shift,
}

impl PulseKind {
    /// Parity of the left trap of every coupled pair.
    pub fn first_parity(self) -> i64 {
        match self {
            PulseKind::Coin => 0,
            PulseKind::Shift => 1,
        }
    }
}

/// One operator slot of a pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Pair (left, left + 1).
    Pair { left: i64 },
    /// Trap at the end of a finite row whose partner is missing.
    Lone { trap: i64 },
}

/// Local operator for one slot. Pair matrices use index `2·level + side`
/// with side 0 the right trap and side 1 the left trap; lone matrices use
/// the level index.
pub type Block = DMatrix<C64>;

#[derive(Clone, Debug, PartialEq)]
pub struct TrapRow {
    levels: usize,
    offset: i64,
    amps: Vec<C64>,
    bounds: Option<(i64, i64)>,
}

impl TrapRow {
    /// Atom in `level` of trap `trap` on an unbounded row.
    pub fn localized(trap: i64, level: usize, levels: usize) -> Result<Self> {
        Self::from_traps(&[(trap, level, C64::new(1.0, 0.0))], levels, None)
    }

    /// Superposition Σ c |trap, level⟩ (normalized here). `bounds` restricts
    /// the row to traps `lo..=hi`.
    pub fn from_traps(
        terms: &[(i64, usize, C64)],
        levels: usize,
        bounds: Option<(i64, i64)>,
    ) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Invalid("need at least one level".into()));
        }
        if terms.is_empty() {
            return Err(Error::Invalid("empty initial state".into()));
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let (lo, hi) = match bounds {
            Some((a, b)) => {
                if lo < a || hi > b || a > b {
                    return Err(Error::Invalid("initial trap outside the row".into()));
                }
                (a, b)
            }
            None => (lo, hi),
        };
        let mut amps = vec![ZERO; (hi - lo + 1) as usize * levels];
        for &(j, v, c) in terms {
            if v >= levels {
                return Err(Error::Invalid(format!("level {v} not retained")));
            }
            amps[(j - lo) as usize * levels + v] += c;
        }
        let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::Invalid("zero initial state".into()));
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Ok(Self {
            levels,
            offset: lo,
            amps,
            bounds,
        })
    }

    /// Embeds a two-level coined state: |k,+⟩ → trap 2k+1, |k,−⟩ → trap 2k, level 0.
    pub fn from_walk_state(
        s: &WalkState1D,
        levels: usize,
        bounds: Option<(i64, i64)>,
    ) -> Result<Self> {
        let mut terms = Vec::new();
        for k in s.sites() {
            terms.push((2 * k + 1, 0, s.amplitude(k, 0)));
            terms.push((2 * k, 0, s.amplitude(k, 1)));
        }
        Self::from_traps(&terms, levels, bounds)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn bounds(&self) -> Option<(i64, i64)> {
        self.bounds
    }

    pub fn traps(&self) -> std::ops::Range<i64> {
        let n = (self.amps.len() / self.levels) as i64;
        self.offset..self.offset + n
    }

    pub fn amplitude(&self, trap: i64, level: usize) -> C64 {
        let i = trap - self.offset;
        let n = (self.amps.len() / self.levels) as i64;
        if i < 0 || i >= n {
            ZERO
        } else {
            self.amps[i as usize * self.levels + level]
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    fn grow_to(&mut self, lo: i64, hi: i64) {
        let cur = self.traps();
        if lo >= cur.start && hi < cur.end {
            return;
        }
        let lo = lo.min(cur.start);
        let hi = hi.max(cur.end - 1);
        let mut amps = vec![ZERO; (hi - lo + 1) as usize * self.levels];
        let shift = (cur.start - lo) as usize * self.levels;
        amps[shift..shift + self.amps.len()].copy_from_slice(&self.amps);
        self.amps = amps;
        self.offset = lo;
    }

    /// Applies one pulse, asking `op` for the operator of every slot.
    pub fn apply_pulse<'a, F>(&mut self, kind: PulseKind, op: F) -> Result<()>
    where
        F: Fn(Slot) -> &'a Block,
    {
        let par = kind.first_parity();
        let (lo, hi) = match self.bounds {
            Some(b) => b,
            None => {
                let r = self.traps();
                let lo = r.start - (r.start - par).rem_euclid(2);
                let hi = r.end - 1 + (1 - (r.end - 1 - par).rem_euclid(2));
                self.grow_to(lo, hi);
                (lo, hi)
            }
        };
        let nl = self.levels;
        let mut j = lo;
        while j <= hi {
            let paired = (j - par).rem_euclid(2) == 0 && j < hi;
            if paired {
                let m = op(Slot::Pair { left: j });
                check(m, 2 * nl)?;
                let base = (j - self.offset) as usize * nl;
                let mut v = vec![ZERO; 2 * nl];
                for l in 0..nl {
                    v[2 * l] = self.amps[base + nl + l];
                    v[2 * l + 1] = self.amps[base + l];
                }
                let w = m * nalgebra::DVector::from_vec(v);
                for l in 0..nl {
                    self.amps[base + nl + l] = w[2 * l];
                    self.amps[base + l] = w[2 * l + 1];
                }
                j += 2;
            } else {
                let m = op(Slot::Lone { trap: j });
                check(m, nl)?;
                let base = (j - self.offset) as usize * nl;
                let v = nalgebra::DVector::from_column_slice(&self.amps[base..base + nl]);
                let w = m * v;
                self.amps[base..base + nl].copy_from_slice(w.as_slice());
                j += 1;
            }
        }
        Ok(())
    }

    /// Population per trap summed over retained levels.
    pub fn trap_distribution(&self) -> Distribution {
        let p = self
            .amps
            .chunks(self.levels)
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        Distribution::new(self.offset, p)
    }

    /// Population per trap in one level.
    pub fn level_distribution(&self, level: usize) -> Distribution {
        let p = self
            .amps
            .chunks(self.levels)
            .map(|c| c[level].norm_sqr())
            .collect();
        Distribution::new(self.offset, p)
    }
}

fn check(m: &Block, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension {
            expected: d,
            got: m.nrows(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::coin::tunneling_coin;
    use crate::walk::line::Shift1D;
    use crate::walk::metrics::{position_distribution, qubit_distribution};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn to_block(c: &crate::walk::coin::CoinOp) -> Block {
        DMatrix::from_fn(c.dim(), c.dim(), |i, j| c.get(i, j))
    }

    #[test]
    fn single_level_row_is_flipflop_walk() {
        let coin = to_block(&tunneling_coin(FRAC_PI_2));
        let shift = to_block(&tunneling_coin(PI));
        let s0 = WalkState1D::localized(0, [C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let mut row = TrapRow::from_walk_state(&s0, 1, None).unwrap();
        let mut w = s0.clone();
        for _ in 0..12 {
            row.apply_pulse(PulseKind::Coin, |_| &coin).unwrap();
            row.apply_pulse(PulseKind::Shift, |_| &shift).unwrap();
            w.step(&tunneling_coin(FRAC_PI_2), Shift1D::FlipFlop)
                .unwrap();
        }
        let a = qubit_distribution(&row.trap_distribution());
        let b = position_distribution(&w);
        for k in -14..14 {
            assert!((a.prob(k) - b.prob(k)).abs() < 1e-12, "site {k}");
        }
    }

    #[test]
    fn bounded_row_uses_lone_slots() {
        let id1 = DMatrix::<C64>::identity(1, 1);
        let swap = to_block(&tunneling_coin(PI));
        let mut row = TrapRow::from_traps(&[(0, 0, C64::new(1.0, 0.0))], 1, Some((0, 3))).unwrap();
        let mut lone = Vec::new();
        let seen = std::cell::RefCell::new(&mut lone);
        row.apply_pulse(PulseKind::Shift, |s| {
            if let Slot::Lone { trap } = s {
                seen.borrow_mut().push(trap);
                &id1
            } else {
                &swap
            }
        })
        .unwrap();
        assert_eq!(lone, vec![0, 3]);
        assert!((row.trap_distribution().prob(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wrong_block_size_rejected() {
        let mut row = TrapRow::localized(0, 0, 2).unwrap();
        let m = DMatrix::<C64>::identity(2, 2);
        assert!(row.apply_pulse(PulseKind::Coin, |_| &m).is_err());
    }
}
