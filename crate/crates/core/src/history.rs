//! Evolved nonlinear-sector histories.

use serde::{Deserialize, Serialize};

use crate::fields::{covariant_derivative, potential_value, FieldSample, PotentialSpec};
use crate::geometry::BackgroundParams;
use crate::grid::{d_dv, d_dw, line_derivative, GridSpec, NodeArray, RadialCache};
use crate::initial::GaugeSpec;
use crate::residual::{covariant_residual, gauss_residual};
use crate::scalar::{Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvolutionStats {
    /// Nodes with lapse below the exclusion threshold.
    pub near_horizon_nodes: usize,
    /// Toda derivative evaluations within the flagged radius of `phi = 0`.
    pub toda_flags: usize,
    pub max_gauss_residual: f64,
    pub max_covariant_residual: f64,
}

/// Node values of the nonlinear sector on a double-null grid.
///
/// `dw_phi`, `dv_phi` are covariant derivatives reconstructed by second-order differences.
#[derive(Debug, Clone)]
pub struct FieldHistory<T> {
    pub grid: GridSpec<T>,
    pub bg: BackgroundParams<T>,
    pub potential: PotentialSpec<T>,
    pub gauge: GaugeSpec<T>,
    pub min_lapse: T,
    pub cache: RadialCache<T>,
    pub phi: NodeArray<C<T>>,
    pub q: NodeArray<T>,
    pub a_v: NodeArray<T>,
    pub dw_phi: NodeArray<C<T>>,
    pub dv_phi: NodeArray<C<T>>,
    /// Potential density per node when it is not `P(phi)` (commuted histories).
    pub potential_override: Option<NodeArray<T>>,
    pub stats: EvolutionStats,
}

impl<T: Real> FieldHistory<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        grid: GridSpec<T>,
        bg: BackgroundParams<T>,
        potential: PotentialSpec<T>,
        gauge: GaugeSpec<T>,
        min_lapse: T,
        cache: RadialCache<T>,
        psi: NodeArray<C<T>>,
        q: NodeArray<T>,
        a_v: NodeArray<T>,
        stats: EvolutionStats,
    ) -> Self {
        let phi = NodeArray::from_fn(psi.nw(), psi.nv(), |i, j| psi.get(i, j) / cache.r(i, j));
        let mut h = Self {
            grid,
            bg,
            potential,
            gauge,
            min_lapse,
            cache,
            dw_phi: phi.clone(),
            dv_phi: phi.clone(),
            phi,
            q,
            a_v,
            potential_override: None,
            stats,
        };
        h.rebuild_derivatives();
        h
    }

    fn rebuild_derivatives(&mut self) {
        let d = self.grid.delta;
        let pw = d_dw(&self.phi, d);
        let pv = d_dv(&self.phi, d);
        let (nw, nv) = (self.nw(), self.nv());
        self.dw_phi =
            NodeArray::from_fn(nw, nv, |i, j| covariant_derivative(pw.get(i, j), self.a_w(i, j), self.phi.get(i, j)));
        self.dv_phi = NodeArray::from_fn(nw, nv, |i, j| {
            covariant_derivative(pv.get(i, j), self.a_v.get(i, j), self.phi.get(i, j))
        });
    }

    pub(crate) fn record_residuals(&mut self) {
        self.stats.max_gauss_residual = gauss_residual(self).max.to_f64_lossy();
        self.stats.max_covariant_residual = covariant_residual(self).max().to_f64_lossy();
    }

    pub fn nw(&self) -> usize {
        self.phi.nw()
    }

    pub fn nv(&self) -> usize {
        self.phi.nv()
    }

    pub fn w(&self, i: usize) -> T {
        self.grid.w(i)
    }

    pub fn v(&self, j: usize) -> T {
        self.grid.v(j)
    }

    pub fn r(&self, i: usize, j: usize) -> T {
        self.cache.r(i, j)
    }

    pub fn omega(&self, i: usize, j: usize) -> T {
        self.cache.omega(i, j)
    }

    pub fn a_w(&self, i: usize, j: usize) -> T {
        self.gauge.chi_w(self.w(i), self.v(j))
    }

    pub fn f_vw(&self, i: usize, j: usize) -> T {
        let r = self.r(i, j);
        self.omega(i, j) * self.q.get(i, j) / (T::lit(2.0) * r * r)
    }

    /// True for nodes excluded from diagnostics (lapse below threshold).
    pub fn excluded(&self, i: usize, j: usize) -> bool {
        self.omega(i, j) < self.min_lapse
    }

    pub fn sample(&self, i: usize, j: usize) -> FieldSample<T> {
        FieldSample {
            phi: self.phi.get(i, j),
            a_w: self.a_w(i, j),
            a_v: self.a_v.get(i, j),
            f_vw: self.f_vw(i, j),
            dw_phi: self.dw_phi.get(i, j),
            dv_phi: self.dv_phi.get(i, j),
        }
    }

    /// Potential density entering the stress tensor at a node.
    pub fn potential_density(&self, i: usize, j: usize) -> T {
        match &self.potential_override {
            Some(p) => p.get(i, j),
            None => potential_value(&self.potential, self.phi.get(i, j)),
        }
    }

    /// Derivative along `t = (w + v)/2` at fixed `r*`, i.e. along the node diagonal.
    fn d_dt<X: crate::grid::Differentiable<T>>(&self, a: &NodeArray<X>, i: usize, j: usize) -> X {
        // diagonal through (i, j): (i + s, j + s)
        let back = i.min(j);
        let fwd = (self.nw() - 1 - i).min(self.nv() - 1 - j);
        let n = back + fwd + 1;
        if n == 1 {
            // grid corner: d_t = d_w + d_v
            return line_derivative(self.nw(), |k| a.get(k, j), i, self.grid.delta)
                + line_derivative(self.nv(), |k| a.get(i, k), j, self.grid.delta);
        }
        let (i0, j0) = (i - back, j - back);
        line_derivative(n, |k| a.get(i0 + k, j0 + k), back, self.grid.delta)
    }

    /// History of the time-commuted field `(D_t phi, d_t Q)`.
    ///
    /// Time derivatives use centred differences along `t` (one-sided at the run edges);
    /// the potential density of the commuted field is `|d_t P|`.
    pub fn time_commuted(&self) -> Self {
        let (nw, nv) = (self.nw(), self.nv());
        let pot = NodeArray::from_fn(nw, nv, |i, j| potential_value(&self.potential, self.phi.get(i, j)));
        let phi = NodeArray::from_fn(nw, nv, |i, j| {
            let a_t = self.a_w(i, j) + self.a_v.get(i, j);
            covariant_derivative(self.d_dt(&self.phi, i, j), a_t, self.phi.get(i, j))
        });
        let q = NodeArray::from_fn(nw, nv, |i, j| self.d_dt(&self.q, i, j));
        let base_pot = match &self.potential_override {
            Some(p) => p.clone(),
            None => pot,
        };
        let p_t = NodeArray::from_fn(nw, nv, |i, j| self.d_dt(&base_pot, i, j).abs());
        let mut h = Self {
            grid: self.grid,
            bg: self.bg,
            potential: self.potential,
            gauge: self.gauge,
            min_lapse: self.min_lapse,
            cache: self.cache.clone(),
            dw_phi: phi.clone(),
            dv_phi: phi.clone(),
            phi,
            q,
            a_v: self.a_v.clone(),
            potential_override: Some(p_t),
            stats: self.stats,
        };
        h.rebuild_derivatives();
        h
    }
}
