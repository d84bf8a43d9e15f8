//! Cell reduction: effective unitaries of single pulses, extracted on small
//! grids and replayed on a row of traps.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::trap::calibrate::{HOLD_PI, HOLD_PI_OVER_2};
use crate::trap::cell::{propagate_window, CellSpec, Window};
use crate::trap::pulse::{PulseSchedule, ShakingSpec};
use crate::walk::{Block, Distribution, PulseKind, Slot, TrapRow};
use crate::{Error, Result};

/// Leakage bound for replaying extracted unitaries as a walk.
pub const REDUCTION_LEAKAGE: f64 = 0.05;
/// Default number of shaking-phase bins.
pub const DEFAULT_PHASE_BINS: usize = 24;

/// Coin and shift pulse of one walk step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkPulses {
    pub coin: PulseSchedule,
    pub shift: PulseSchedule,
}

impl WalkPulses {
    /// Calibrated π/2 coin pulse and π shift pulse.
    pub fn standard() -> Self {
        Self {
            coin: PulseSchedule::standard(HOLD_PI_OVER_2),
            shift: PulseSchedule::standard(HOLD_PI),
        }
    }

    pub fn schedule(&self, kind: PulseKind) -> &PulseSchedule {
        match kind {
            PulseKind::Coin => &self.coin,
            PulseKind::Shift => &self.shift,
        }
    }
}

impl Default for WalkPulses {
    fn default() -> Self {
        Self::standard()
    }
}

/// Slot environment: how many neighbors (up to two) exist on each side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct SlotKey {
    kind: PulseKind,
    /// `None` for a pair, otherwise the lone trap's parity relative to the
    /// pulse.
    lone: Option<u8>,
    left: u8,
    right: u8,
    bin: Option<u32>,
}

/// Per-step populations of a reduced walk.
#[derive(Clone, Debug, PartialEq)]
pub struct RowRecord {
    pub step: usize,
    /// Population per trap summed over retained levels.
    pub traps: Distribution,
    /// Population per trap for every retained level.
    pub levels: Vec<Distribution>,
    /// Population left in the retained band.
    pub norm: f64,
}

impl RowRecord {
    fn of(step: usize, row: &TrapRow) -> Self {
        Self {
            step,
            traps: row.trap_distribution(),
            levels: (0..row.levels()).map(|v| row.level_distribution(v)).collect(),
            norm: row.norm_sqr(),
        }
    }

    pub fn ground_population(&self) -> f64 {
        self.levels[0].total()
    }
}

/// Caches effective unitaries per slot environment and replays them.
pub struct CellReducer {
    spec: CellSpec,
    pulses: WalkPulses,
    levels: usize,
    bounds: Option<(i64, i64)>,
    max_leakage: f64,
    shaking: Option<(ShakingSpec, usize)>,
    cache: HashMap<SlotKey, Block>,
    leakage: f64,
}

impl CellReducer {
    /// `bounds` restricts the row to traps `lo..=hi`; `None` is an
    /// unbounded row.
    pub fn new(spec: CellSpec, pulses: WalkPulses, levels: usize, bounds: Option<(i64, i64)>) -> Result<Self> {
        spec.validate()?;
        if levels == 0 {
            return Err(Error::Invalid("need at least one level".into()));
        }
        if let Some((lo, hi)) = bounds {
            if lo > hi {
                return Err(Error::Invalid("empty row".into()));
            }
        }
        Ok(Self {
            spec,
            pulses,
            levels,
            bounds,
            max_leakage: REDUCTION_LEAKAGE,
            shaking: None,
            cache: HashMap::new(),
            leakage: 0.0,
        })
    }

    pub fn with_max_leakage(mut self, bound: f64) -> Self {
        self.max_leakage = bound;
        self
    }

    /// Shaken pulses: the phase of every pulse is rounded to the center of
    /// one of `bins` equal bins.
    pub fn with_shaking(mut self, shaking: ShakingSpec, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Invalid("need at least one phase bin".into()));
        }
        self.cache.clear();
        self.shaking = (shaking.amplitude > 0.0).then_some((shaking, bins));
        Ok(self)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn bounds(&self) -> Option<(i64, i64)> {
        self.bounds
    }

    /// Largest leakage among the extracted unitaries so far.
    pub fn max_leakage_seen(&self) -> f64 {
        self.leakage
    }

    /// Number of distinct extractions done so far.
    pub fn extractions(&self) -> usize {
        self.cache.len()
    }

    fn key(&self, kind: PulseKind, slot: Slot, bin: Option<u32>) -> SlotKey {
        let par = kind.first_parity();
        let (lone, first, last) = match slot {
            Slot::Pair { left } => (None, left, left + 1),
            Slot::Lone { trap } => (Some((trap - par).rem_euclid(2) as u8), trap, trap),
        };
        let (left, right) = match self.bounds {
            None => (2, 2),
            Some((lo, hi)) => ((first - lo).min(2) as u8, (hi - last).min(2) as u8),
        };
        SlotKey {
            kind,
            lone,
            left,
            right,
            bin,
        }
    }

    fn slots(&self, kind: PulseKind) -> Vec<Slot> {
        let par = kind.first_parity();
        match self.bounds {
            None => vec![Slot::Pair { left: par }],
            Some((lo, hi)) => {
                let mut out = Vec::new();
                let mut j = lo;
                while j <= hi {
                    if (j - par).rem_euclid(2) == 0 && j < hi {
                        out.push(Slot::Pair { left: j });
                        j += 2;
                    } else {
                        out.push(Slot::Lone { trap: j });
                        j += 1;
                    }
                }
                out
            }
        }
    }

    fn bins(&self) -> Vec<Option<u32>> {
        match self.shaking {
            None => vec![None],
            Some((_, b)) => (0..b as u32).map(Some).collect(),
        }
    }

    fn bin_of(&self, phase: f64) -> Option<u32> {
        self.shaking.map(|(_, b)| {
            let i = (phase.rem_euclid(2.0 * PI) / (2.0 * PI) * b as f64).floor() as u32;
            i.min(b as u32 - 1)
        })
    }

    fn extract(&self, key: SlotKey) -> Result<(SlotKey, Block, f64)> {
        let schedule = self.pulses.schedule(key.kind);
        let par = key.kind.first_parity();
        let (j0, width) = match key.lone {
            None => (par, 2),
            Some(side) => (par + side as i64, 1),
        };
        let left = key.left as usize;
        let first = j0 - left as i64;
        let n = left + width + key.right as usize;
        let active = (left..left + width).collect();
        let (shake, amp) = match (self.shaking, key.bin) {
            (Some((s, bins)), Some(b)) => {
                let phase = (b as f64 + 0.5) * 2.0 * PI / bins as f64;
                (Some(s.realize(phase)), s.amplitude)
            }
            _ => (None, 0.0),
        };
        let window = Window::in_row(&self.spec, schedule, key.kind, first, n, active, amp)?;
        let u = propagate_window(&window, schedule, self.levels, shake.as_ref())?;
        if u.leakage > self.max_leakage {
            return Err(Error::Leakage {
                leakage: u.leakage,
                bound: self.max_leakage,
            });
        }
        Ok((key, u.matrix, u.leakage))
    }

    /// Extracts every unitary a walk can need, in parallel.
    pub fn prefill(&mut self) -> Result<()> {
        let mut keys = Vec::new();
        for kind in [PulseKind::Coin, PulseKind::Shift] {
            for bin in self.bins() {
                for slot in self.slots(kind) {
                    let k = self.key(kind, slot, bin);
                    if !self.cache.contains_key(&k) && !keys.contains(&k) {
                        keys.push(k);
                    }
                }
            }
        }
        let done: Vec<(SlotKey, Block, f64)> = keys
            .into_par_iter()
            .map(|k| self.extract(k))
            .collect::<Result<_>>()?;
        for (k, m, leak) in done {
            self.leakage = self.leakage.max(leak);
            self.cache.insert(k, m);
        }
        Ok(())
    }

    /// Effective unitary of `slot` in an unshaken `kind` pulse.
    pub fn block(&mut self, kind: PulseKind, slot: Slot) -> Result<&Block> {
        self.prefill()?;
        let k = self.key(kind, slot, None);
        self.cache
            .get(&k)
            .ok_or_else(|| Error::Invalid("slot outside the row".into()))
    }

    /// Replays `steps` walk steps from `initial`. Shaken walks draw their
    /// pulse phases from stream `realization`. The result includes step 0.
    pub fn walk(&mut self, initial: &TrapRow, steps: usize, realization: u64) -> Result<Vec<RowRecord>> {
        self.prefill()?;
        self.replay(initial, steps, realization)
    }

    /// [`Self::walk`] on a reducer whose cache is already filled.
    pub fn replay(&self, initial: &TrapRow, steps: usize, realization: u64) -> Result<Vec<RowRecord>> {
        if initial.levels() != self.levels {
            return Err(Error::Dimension {
                expected: self.levels,
                got: initial.levels(),
            });
        }
        if initial.bounds() != self.bounds {
            return Err(Error::Invalid("initial row and reducer have different bounds".into()));
        }
        let mut phases = self.shaking.map(|(s, _)| s.stream_phases(realization));
        let mut row = initial.clone();
        let mut out = Vec::with_capacity(steps + 1);
        out.push(RowRecord::of(0, &row));
        for step in 1..=steps {
            for kind in [PulseKind::Coin, PulseKind::Shift] {
                let bin = phases
                    .as_mut()
                    .and_then(|p| self.bin_of(p.next().expect("endless stream")));
                for slot in self.slots(kind) {
                    if !self.cache.contains_key(&self.key(kind, slot, bin)) {
                        return Err(Error::Invalid("reducer cache not filled".into()));
                    }
                }
                row.apply_pulse(kind, |slot| &self.cache[&self.key(kind, slot, bin)])?;
            }
            out.push(RowRecord::of(step, &row));
        }
        Ok(out)
    }
}

/// Extracts the coin and shift pulse unitaries with `levels` levels per trap
/// and replays them from `initial` (leakage at most [`REDUCTION_LEAKAGE`]).
pub fn cell_reduce_and_walk(
    spec: &CellSpec,
    pulses: &WalkPulses,
    levels: usize,
    initial: &TrapRow,
    bounds: Option<(i64, i64)>,
    steps: usize,
) -> Result<Vec<RowRecord>> {
    let mut r = CellReducer::new(*spec, *pulses, levels, bounds)?;
    r.walk(initial, steps, 0)
}
