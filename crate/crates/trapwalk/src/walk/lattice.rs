use std::collections::HashMap;

use crate::walk::coin::CoinOp;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Square-lattice walker with a four-dimensional coin.
///
/// Coin index is `2·sd + hf` with `+ = 0`, `− = 1`, giving the order
/// (++, +−, −+, −−). The first sign drives `k`, the second drives `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState2D {
    k0: i64,
    l0: i64,
    nk: usize,
    nl: usize,
    amps: Vec<[C64; 4]>,
    grid: Option<usize>,
}

/// Finite `side × side` grid with sites `0 ≤ k, l < side`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchSetup {
    pub side: usize,
    pub marked: Option<(i64, i64)>,
}

impl SearchSetup {
    pub fn new(side: usize, marked: Option<(i64, i64)>) -> Result<Self> {
        if side == 0 {
            return Err(Error::Invalid("grid side must be positive".into()));
        }
        if let Some((k, l)) = marked {
            let s = side as i64;
            if !(0..s).contains(&k) || !(0..s).contains(&l) {
                return Err(Error::OutsideGrid { k, l });
            }
        }
        Ok(Self { side, marked })
    }

    pub fn n_sites(&self) -> usize {
        self.side * self.side
    }
}

impl WalkState2D {
    /// Walker at (k, l) on the unbounded lattice.
    pub fn localized(k: i64, l: i64, coin: [C64; 4]) -> Result<Self> {
        let n: f64 = coin.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::Invalid("zero coin vector".into()));
        }
        Ok(Self {
            k0: k,
            l0: l,
            nk: 1,
            nl: 1,
            amps: vec![coin.map(|z| z / n)],
            grid: None,
        })
    }

    /// Uniform superposition over every site and coin state of the grid.
    pub fn search_initial(setup: &SearchSetup) -> Self {
        let side = setup.side;
        let a = C64::new(1.0 / (2.0 * (setup.n_sites() as f64).sqrt()), 0.0);
        Self {
            k0: 0,
            l0: 0,
            nk: side,
            nl: side,
            amps: vec![[a; 4]; side * side],
            grid: Some(side),
        }
    }

    pub fn k_range(&self) -> std::ops::Range<i64> {
        self.k0..self.k0 + self.nk as i64
    }

    pub fn l_range(&self) -> std::ops::Range<i64> {
        self.l0..self.l0 + self.nl as i64
    }

    pub fn is_finite(&self) -> bool {
        self.grid.is_some()
    }

    fn index(&self, k: i64, l: i64) -> Option<usize> {
        let (i, j) = (k - self.k0, l - self.l0);
        if i < 0 || j < 0 || i as usize >= self.nk || j as usize >= self.nl {
            None
        } else {
            Some(i as usize * self.nl + j as usize)
        }
    }

    pub fn amplitudes_at(&self, k: i64, l: i64) -> [C64; 4] {
        self.index(k, l).map_or([ZERO; 4], |i| self.amps[i])
    }

    pub fn site_probability(&self, k: i64, l: i64) -> f64 {
        self.amplitudes_at(k, l).iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .flat_map(|a| a.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// ⟨self|other⟩ over the union of both windows.
    pub fn inner(&self, other: &WalkState2D) -> C64 {
        let mut s = ZERO;
        for k in self.k_range() {
            for l in self.l_range() {
                let a = self.amplitudes_at(k, l);
                let b = other.amplitudes_at(k, l);
                s += a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum::<C64>();
            }
        }
        s
    }

    pub fn apply_coin(
        &mut self,
        coin: &CoinOp,
        overrides: Option<&HashMap<(i64, i64), CoinOp>>,
    ) -> Result<()> {
        check_dim(coin)?;
        if let Some(map) = overrides {
            for c in map.values() {
                check_dim(c)?;
            }
        }
        for i in 0..self.nk {
            for j in 0..self.nl {
                let site = (self.k0 + i as i64, self.l0 + j as i64);
                let c = overrides.and_then(|m| m.get(&site)).unwrap_or(coin);
                c.apply(&mut self.amps[i * self.nl + j]);
            }
        }
        Ok(())
    }

    /// |(k,l),±±⟩ → |(k±1,l±1),∓±⟩
    pub fn shift_2d(&mut self) {
        self.displace(true, false);
    }

    /// |(k,l),±±⟩ → |(k±1,l±1),∓∓⟩.
    ///
    /// On a finite grid a component whose move would leave the grid stays
    /// put and keeps its coin sign; the other component moves normally.
    pub fn shift_flipflop_2d(&mut self) {
        self.displace(true, true);
    }

    fn displace(&mut self, flip_k: bool, flip_l: bool) {
        let grow = if self.grid.is_some() { 0 } else { 1 };
        let (nk, nl) = (self.nk + 2 * grow, self.nl + 2 * grow);
        let mut out = vec![[ZERO; 4]; nk * nl];
        let side = self.grid.map(|s| s as i64);
        for i in 0..self.nk {
            for j in 0..self.nl {
                let a = &self.amps[i * self.nl + j];
                for (c, &z) in a.iter().enumerate() {
                    if z == ZERO {
                        continue;
                    }
                    let (sd, hf) = (c >> 1, c & 1);
                    let mut ii = (i + grow) as i64 + if sd == 0 { 1 } else { -1 };
                    let mut jj = (j + grow) as i64 + if hf == 0 { 1 } else { -1 };
                    let mut nsd = if flip_k { 1 - sd } else { sd };
                    let mut nhf = if flip_l { 1 - hf } else { hf };
                    if let Some(s) = side {
                        if !(0..s).contains(&ii) {
                            ii = i as i64;
                            nsd = sd;
                        }
                        if !(0..s).contains(&jj) {
                            jj = j as i64;
                            nhf = hf;
                        }
                    }
                    out[ii as usize * nl + jj as usize][2 * nsd + nhf] += z;
                }
            }
        }
        self.amps = out;
        self.nk = nk;
        self.nl = nl;
        self.k0 -= grow as i64;
        self.l0 -= grow as i64;
    }

    /// Marginal distribution over `k` as (first index, probabilities).
    pub fn marginal_k(&self) -> (i64, Vec<f64>) {
        let mut p = vec![0.0; self.nk];
        for i in 0..self.nk {
            for j in 0..self.nl {
                p[i] += self.amps[i * self.nl + j]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>();
            }
        }
        (self.k0, p)
    }

    /// Marginal distribution over `l` as (first index, probabilities).
    pub fn marginal_l(&self) -> (i64, Vec<f64>) {
        let mut p = vec![0.0; self.nl];
        for i in 0..self.nk {
            for j in 0..self.nl {
                p[j] += self.amps[i * self.nl + j]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>();
            }
        }
        (self.l0, p)
    }

    /// Site probabilities as (k, l, P) for every stored site.
    pub fn site_distribution(&self) -> Vec<(i64, i64, f64)> {
        let mut v = Vec::with_capacity(self.nk * self.nl);
        for i in 0..self.nk {
            for j in 0..self.nl {
                let p = self.amps[i * self.nl + j]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum();
                v.push((self.k0 + i as i64, self.l0 + j as i64, p));
            }
        }
        v
    }
}

fn check_dim(c: &CoinOp) -> Result<()> {
    if c.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: c.dim(),
        });
    }
    Ok(())
}

/// One search step: C0 everywhere (C1 at the marked site), then the flip-flop shift.
pub fn search_step(state: &mut WalkState2D, setup: &SearchSetup) -> Result<()> {
    use crate::walk::coin::{coin_c0, coin_c1};
    let mut map = HashMap::new();
    if let Some(m) = setup.marked {
        map.insert(m, coin_c1());
    }
    state.apply_coin(&coin_c0(), Some(&map))?;
    state.shift_flipflop_2d();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::coin::coin_c0;

    fn basis(c: usize) -> [C64; 4] {
        let mut a = [ZERO; 4];
        a[c] = C64::new(1.0, 0.0);
        a
    }

    #[test]
    fn shift_2d_moves_and_flips_first_sign() {
        let mut s = WalkState2D::localized(0, 0, basis(0)).unwrap();
        s.shift_2d();
        assert_eq!(s.amplitudes_at(1, 1)[2], C64::new(1.0, 0.0));
    }

    #[test]
    fn shift_2d_two_steps() {
        // ++ → (1,1) −+ → (0,2) ++ ; −− → (−1,−1) +− → (0,−2) −−
        let expect = [(0, 2, 0), (0, -2, 1), (0, 2, 2), (0, -2, 3)];
        for (c, &(k, l, cc)) in expect.iter().enumerate() {
            let mut s = WalkState2D::localized(0, 0, basis(c)).unwrap();
            s.shift_2d();
            s.shift_2d();
            assert_eq!(s.amplitudes_at(k, l)[cc], C64::new(1.0, 0.0), "coin {c}");
        }
    }

    #[test]
    fn flipflop_is_involution_on_open_lattice() {
        for c in 0..4 {
            let mut s = WalkState2D::localized(0, 0, basis(c)).unwrap();
            s.shift_flipflop_2d();
            s.shift_flipflop_2d();
            assert_eq!(s.amplitudes_at(0, 0)[c], C64::new(1.0, 0.0));
        }
        let mut s = WalkState2D::localized(0, 0, basis(0)).unwrap();
        s.shift_flipflop_2d();
        assert_eq!(s.amplitudes_at(1, 1)[3], C64::new(1.0, 0.0));
    }

    #[test]
    fn corner_blocks_both_components() {
        let setup = SearchSetup::new(4, None).unwrap();
        let mut s = WalkState2D::search_initial(&setup);
        s.amps.iter_mut().for_each(|a| *a = [ZERO; 4]);
        let i = s.index(3, 3).unwrap();
        s.amps[i] = basis(0);
        s.shift_flipflop_2d();
        assert_eq!(s.amplitudes_at(3, 3)[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn marked_outside_rejected() {
        assert!(SearchSetup::new(4, Some((4, 0))).is_err());
        assert!(SearchSetup::new(4, Some((3, 3))).is_ok());
    }

    #[test]
    fn unmarked_search_is_stationary() {
        let setup = SearchSetup::new(4, None).unwrap();
        let s0 = WalkState2D::search_initial(&setup);
        let mut s = s0.clone();
        s.apply_coin(&coin_c0(), None).unwrap();
        s.shift_flipflop_2d();
        let lambda = s0.inner(&s);
        assert!((lambda.norm() - 1.0).abs() < 1e-12);
    }
}
