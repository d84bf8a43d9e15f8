use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::trap::grid::SimGrid;
use crate::C64;

/// Strang split-step propagator on a periodic grid.
///
/// Works on a batch buffer holding several wavefunctions back to back; every
/// chunk of `grid.len()` values is one state and all share the potential.
pub struct SplitStep {
    grid: SimGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kin_half: Vec<C64>,
    kin_full: Vec<C64>,
    scratch: Vec<C64>,
    phase: Vec<C64>,
    v: Vec<f64>,
}

impl SplitStep {
    pub fn new(grid: &SimGrid) -> Self {
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        let ks = grid.ks();
        let dt = grid.dt();
        let norm = 1.0 / n as f64;
        let kin = |tau: f64| -> Vec<C64> {
            ks.iter()
                .map(|k| C64::from_polar(norm, -0.5 * k * k * tau))
                .collect()
        };
        Self {
            grid: grid.clone(),
            kin_half: kin(0.5 * dt),
            kin_full: kin(dt),
            fwd,
            inv,
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
            phase: vec![C64::new(0.0, 0.0); n],
            v: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &SimGrid {
        &self.grid
    }

    fn kinetic(&mut self, buf: &mut [C64], half: bool) {
        self.fwd.process_with_scratch(buf, &mut self.scratch);
        let k = if half { &self.kin_half } else { &self.kin_full };
        for chunk in buf.chunks_exact_mut(k.len()) {
            for (z, f) in chunk.iter_mut().zip(k) {
                *z *= f;
            }
        }
        self.inv.process_with_scratch(buf, &mut self.scratch);
    }

    fn potential(&mut self, buf: &mut [C64]) {
        let dt = self.grid.dt();
        for (p, &v) in self.phase.iter_mut().zip(&self.v) {
            let (s, c) = (-v * dt).sin_cos();
            *p = C64::new(c, s);
        }
        for chunk in buf.chunks_exact_mut(self.phase.len()) {
            for (z, p) in chunk.iter_mut().zip(&self.phase) {
                *z *= p;
            }
        }
    }

    /// One Strang step with the potential `v` (taken at mid-step).
    pub fn step(&mut self, buf: &mut [C64], v: &[f64]) {
        self.v.copy_from_slice(v);
        self.kinetic(buf, true);
        self.potential(buf);
        self.kinetic(buf, true);
    }

    /// `n_steps` Strang steps starting at time `t0`. `fill` writes the
    /// potential at the given mid-step time. Adjacent kinetic half steps are
    /// merged, so the result equals `n_steps` calls of [`Self::step`].
    pub fn evolve<F>(&mut self, buf: &mut [C64], t0: f64, n_steps: usize, mut fill: F)
    where
        F: FnMut(f64, &mut [f64]),
    {
        if n_steps == 0 {
            return;
        }
        let dt = self.grid.dt();
        self.kinetic(buf, true);
        for s in 0..n_steps {
            let mut v = std::mem::take(&mut self.v);
            fill(t0 + (s as f64 + 0.5) * dt, &mut v);
            self.v = v;
            self.potential(buf);
            self.kinetic(buf, s + 1 == n_steps);
        }
    }

    /// ⟨ψ|−½∂ₓ² + V|ψ⟩ for one normalized state.
    pub fn energy(&mut self, psi: &[C64], v: &[f64]) -> f64 {
        let n = psi.len();
        let mut f = psi.to_vec();
        self.fwd.process_with_scratch(&mut f, &mut self.scratch);
        let ks = self.grid.ks();
        let dx = self.grid.dx();
        let kin: f64 = f
            .iter()
            .zip(&ks)
            .map(|(z, k)| 0.5 * k * k * z.norm_sqr())
            .sum::<f64>()
            * dx
            / n as f64;
        let pot: f64 = psi
            .iter()
            .zip(v)
            .map(|(z, v)| v * z.norm_sqr())
            .sum::<f64>()
            * dx;
        kin + pot
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trap::grid::norm_sqr;

    fn packet(g: &SimGrid, x0: f64, k0: f64, s: f64) -> Vec<C64> {
        let mut p: Vec<C64> = g
            .xs()
            .iter()
            .map(|&x| C64::from_polar((-(x - x0).powi(2) / (4.0 * s * s)).exp(), k0 * x))
            .collect();
        let n = norm_sqr(&p, g.dx()).sqrt();
        p.iter_mut().for_each(|z| *z /= n);
        p
    }

    #[test]
    fn merged_evolution_equals_single_steps() {
        let g = SimGrid::new(-20.0, 20.0, 256, 0.01).unwrap();
        let mut a = packet(&g, -2.0, 1.0, 1.0);
        let mut b = a.clone();
        let mut ss = SplitStep::new(&g);
        let fill = |t: f64, v: &mut [f64]| {
            for (i, x) in v.iter_mut().enumerate() {
                let y = g.x(i) - 0.3 * t;
                *x = 0.5 * y * y;
            }
        };
        ss.evolve(&mut a, 0.0, 50, fill);
        let mut v = vec![0.0; g.len()];
        for s in 0..50 {
            fill((s as f64 + 0.5) * 0.01, &mut v);
            ss.step(&mut b, &v);
        }
        let err = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert!((norm_sqr(&a, g.dx()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn batch_columns_are_independent() {
        let g = SimGrid::new(-20.0, 20.0, 256, 0.01).unwrap();
        let p1 = packet(&g, -2.0, 1.0, 1.0);
        let p2 = packet(&g, 3.0, -0.5, 0.7);
        let mut batch = [p1.clone(), p2.clone()].concat();
        let mut ss = SplitStep::new(&g);
        let v: Vec<f64> = g.xs().iter().map(|x| 0.5 * x * x).collect();
        ss.evolve(&mut batch, 0.0, 40, |_, w| w.copy_from_slice(&v));
        let mut single = p2;
        ss.evolve(&mut single, 0.0, 40, |_, w| w.copy_from_slice(&v));
        assert_eq!(&batch[256..], &single[..]);
    }
}
