//! Uniform double-null grid, node arrays and finite-difference stencils.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lapse_from_tortoise, BackgroundParams};
use crate::scalar::{Real, C};

/// Lapse below which nodes are excluded from diagnostics.
pub const DEFAULT_MIN_LAPSE: f64 = 1e-6;

/// Rectangle `[w0, w1] x [v0, v1]` with equal null step `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub w0: T,
    pub w1: T,
    pub v0: T,
    pub v1: T,
    pub delta: T,
}

fn steps<T: Real>(span: T, delta: T, axis: &str) -> Result<usize> {
    let n = span / delta;
    let rounded = n.round();
    if (n - rounded).abs() > T::lit(1e-6) * T::one().max(rounded) {
        return Err(Error::Grid(format!("{axis} span {span} is not a multiple of delta {delta}")));
    }
    rounded.to_usize().ok_or_else(|| Error::Grid(format!("{axis} node count not representable")))
}

impl<T: Real> GridSpec<T> {
    pub fn new(w0: T, w1: T, v0: T, v1: T, delta: T) -> Result<Self> {
        let g = Self { w0, w1, v0, v1, delta };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > T::zero()) {
            return Err(Error::Grid(format!("delta must be > 0, got {}", self.delta)));
        }
        if !(self.w1 > self.w0) || !(self.v1 > self.v0) {
            return Err(Error::Grid("bounds must satisfy w1 > w0 and v1 > v0".into()));
        }
        steps(self.w1 - self.w0, self.delta, "w")?;
        steps(self.v1 - self.v0, self.delta, "v")?;
        Ok(())
    }

    pub fn nw(&self) -> usize {
        steps(self.w1 - self.w0, self.delta, "w").expect("validated grid") + 1
    }

    pub fn nv(&self) -> usize {
        steps(self.v1 - self.v0, self.delta, "v").expect("validated grid") + 1
    }

    pub fn w(&self, i: usize) -> T {
        self.w0 + T::from_usize_lossy(i) * self.delta
    }

    pub fn v(&self, j: usize) -> T {
        self.v0 + T::from_usize_lossy(j) * self.delta
    }

    /// Tortoise coordinate of node `(i, j)`.
    pub fn rstar(&self, i: usize, j: usize) -> T {
        (self.v(j) - self.w(i)) * T::lit(0.5)
    }

    /// Same rectangle with the step divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self { delta: self.delta / T::from_usize_lossy(factor), ..*self }
    }

    /// Index of the node at `w`, if `w` lies on the grid.
    pub fn index_w(&self, w: T) -> Option<usize> {
        index_of(w - self.w0, self.delta, self.nw())
    }

    pub fn index_v(&self, v: T) -> Option<usize> {
        index_of(v - self.v0, self.delta, self.nv())
    }
}

fn index_of<T: Real>(offset: T, delta: T, n: usize) -> Option<usize> {
    let x = offset / delta;
    let k = x.round();
    if (x - k).abs() > T::lit(1e-6) || k < T::zero() {
        return None;
    }
    let k = k.to_usize()?;
    (k < n).then_some(k)
}

/// Row-major `nw x nv` array of node values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeArray<X> {
    nw: usize,
    nv: usize,
    data: Vec<X>,
}

impl<X: Copy> NodeArray<X> {
    pub fn filled(nw: usize, nv: usize, x: X) -> Self {
        Self { nw, nv, data: vec![x; nw * nv] }
    }

    pub fn from_fn(nw: usize, nv: usize, mut f: impl FnMut(usize, usize) -> X) -> Self {
        let mut data = Vec::with_capacity(nw * nv);
        for i in 0..nw {
            for j in 0..nv {
                data.push(f(i, j));
            }
        }
        Self { nw, nv, data }
    }

    pub fn nw(&self) -> usize {
        self.nw
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> X {
        self.data[i * self.nv + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: X) {
        self.data[i * self.nv + j] = x;
    }

    pub fn as_slice(&self) -> &[X] {
        &self.data
    }

    pub fn map<Y: Copy>(&self, f: impl Fn(X) -> Y) -> NodeArray<Y> {
        NodeArray { nw: self.nw, nv: self.nv, data: self.data.iter().map(|&x| f(x)).collect() }
    }
}

/// Values that centred differences can act on.
pub trait Differentiable<T>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> {}
impl<T: Real> Differentiable<T> for T {}
impl<T: Real> Differentiable<T> for C<T> {}

/// Second-order derivative of a uniformly sampled line at index `k`.
pub fn line_derivative<T: Real, X: Differentiable<T>>(n: usize, at: impl Fn(usize) -> X, k: usize, h: T) -> X {
    let inv2h = T::one() / (h + h);
    if n == 2 {
        return (at(1) - at(0)) * (T::one() / h);
    }
    if k == 0 {
        (at(1) * T::lit(4.0) - at(0) * T::lit(3.0) - at(2)) * inv2h
    } else if k == n - 1 {
        (at(n - 1) * T::lit(3.0) - at(n - 2) * T::lit(4.0) + at(n - 3)) * inv2h
    } else {
        (at(k + 1) - at(k - 1)) * inv2h
    }
}

/// Second-order `d/dw` of a node array.
pub fn d_dw<T: Real, X: Differentiable<T>>(a: &NodeArray<X>, delta: T) -> NodeArray<X> {
    NodeArray::from_fn(a.nw, a.nv, |i, j| line_derivative(a.nw, |k| a.get(k, j), i, delta))
}

/// Second-order `d/dv` of a node array.
pub fn d_dv<T: Real, X: Differentiable<T>>(a: &NodeArray<X>, delta: T) -> NodeArray<X> {
    NodeArray::from_fn(a.nw, a.nv, |i, j| line_derivative(a.nv, |k| a.get(i, k), j, delta))
}

/// `r` and lapse cached on quarter steps of `r*`.
///
/// Index `q` corresponds to `r* = rs_min + q delta / 4`; node `(i, j)` sits at
/// `q = 2 (j + nw - 1 - i)`.
#[derive(Debug, Clone)]
pub struct RadialCache<T> {
    rs_min: T,
    quarter: T,
    nw: usize,
    r: Vec<T>,
    omega: Vec<T>,
}

impl<T: Real> RadialCache<T> {
    pub fn new(bg: &BackgroundParams<T>, grid: &GridSpec<T>) -> Result<Self> {
        grid.validate()?;
        let nw = grid.nw();
        let nv = grid.nv();
        let rs_min = grid.rstar(nw - 1, 0);
        let quarter = grid.delta / T::lit(4.0);
        let nq = 2 * (nw + nv - 2) + 1;
        let mut r = Vec::with_capacity(nq);
        let mut omega = Vec::with_capacity(nq);
        for q in 0..nq {
            let rs = rs_min + T::from_usize_lossy(q) * quarter;
            let (rr, om) = lapse_from_tortoise(bg, rs).map_err(|e| Error::Grid(format!("r* = {rs}: {e}")))?;
            if !(om > T::zero()) || !rr.is_finite() {
                return Err(Error::Grid(format!("lapse underflows at r* = {rs}; shrink w1")));
            }
            r.push(rr);
            omega.push(om);
        }
        Ok(Self { rs_min, quarter, nw, r, omega })
    }

    #[inline]
    pub fn node_q(&self, i: usize, j: usize) -> usize {
        2 * (j + self.nw - 1 - i)
    }

    #[inline]
    pub fn r_q(&self, q: usize) -> T {
        self.r[q]
    }

    #[inline]
    pub fn omega_q(&self, q: usize) -> T {
        self.omega[q]
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize) -> T {
        self.r[self.node_q(i, j)]
    }

    #[inline]
    pub fn omega(&self, i: usize, j: usize) -> T {
        self.omega[self.node_q(i, j)]
    }

    pub fn rstar_q(&self, q: usize) -> T {
        self.rs_min + T::from_usize_lossy(q) * self.quarter
    }

    /// Number of grid nodes whose lapse is below `min_lapse`.
    pub fn count_below(&self, grid: &GridSpec<T>, min_lapse: T) -> usize {
        let (nw, nv) = (grid.nw(), grid.nv());
        let mut count = 0;
        for d in 0..(nw + nv - 1) {
            if self.omega[2 * d] < min_lapse {
                // nodes on diagonal d: j - i = d - (nw - 1)
                let off = d as isize - (nw as isize - 1);
                let lo_i = 0.max(-off) as usize;
                let hi_i = (nw - 1).min((nv as isize - 1 - off) as usize);
                count += hi_i + 1 - lo_i;
            }
        }
        count
    }
}
