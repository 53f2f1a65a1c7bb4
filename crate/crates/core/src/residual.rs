//! Constraint and field-equation residuals of evolved histories.
//!
//! The covariant residual is written from the field equations in `(w, v)` components,
//! independently of the reduced equations the scheme integrates:
//! `g^{ab} D_a D_b phi - dP/d(conj phi)` and `nabla_a F^{ab} + 2 Im(conj(phi) D^b phi)`.

use crate::fields::{field_strength, potential_derivative};
use crate::grid::{line_derivative, NodeArray};
use crate::history::FieldHistory;
use crate::scalar::{Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussResidual<T> {
    pub max: T,
    /// Maximum over each outgoing ray `w = w_i`.
    pub per_row: Vec<T>,
}

/// Violation of `d_v Q = -2 r^2 Im(conj(phi) D_v phi)` and `d_w Q = 2 r^2 Im(conj(phi) D_w phi)`.
pub fn gauss_residual<T: Real>(h: &FieldHistory<T>) -> GaussResidual<T> {
    let (nw, nv) = (h.nw(), h.nv());
    let d = h.grid.delta;
    let two = T::lit(2.0);
    let mut per_row = vec![T::zero(); nw];
    if nw < 3 || nv < 3 {
        return GaussResidual { max: T::zero(), per_row };
    }
    for (i, row) in per_row.iter_mut().enumerate() {
        for j in 0..nv {
            if h.excluded(i, j) {
                continue;
            }
            let r = h.r(i, j);
            let phi = h.phi.get(i, j);
            let qv = line_derivative(nv, |k| h.q.get(i, k), j, d);
            let qw = line_derivative(nw, |k| h.q.get(k, j), i, d);
            let rv = (qv + two * r * r * (phi.conj() * h.dv_phi.get(i, j)).im).abs();
            let rw = (qw - two * r * r * (phi.conj() * h.dw_phi.get(i, j)).im).abs();
            *row = row.max(rv).max(rw);
        }
    }
    let max = per_row.iter().fold(T::zero(), |a, &b| a.max(b));
    GaussResidual { max, per_row }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantResidual<T> {
    pub scalar: T,
    pub maxwell: T,
}

impl<T: Real> CovariantResidual<T> {
    pub fn max(&self) -> T {
        self.scalar.max(self.maxwell)
    }
}

/// Maximum residuals of the covariant field equations over interior nodes.
pub fn covariant_residual<T: Real>(h: &FieldHistory<T>) -> CovariantResidual<T> {
    let (nw, nv) = (h.nw(), h.nv());
    let zero = CovariantResidual { scalar: T::zero(), maxwell: T::zero() };
    if nw < 3 || nv < 3 {
        return zero;
    }
    let d = h.grid.delta;
    let inv2d = T::one() / (d + d);
    let two = T::lit(2.0);
    let i_unit = C::new(T::zero(), T::one());
    let a_w = NodeArray::from_fn(nw, nv, |i, j| h.a_w(i, j));
    let f = match field_strength(&a_w, &h.a_v, d) {
        Ok(f) => f,
        Err(_) => return zero,
    };
    let phi = &h.phi;
    // D_v phi and D_w phi from centred differences where defined.
    let dv =
        |i: usize, j: usize| (phi.get(i, j + 1) - phi.get(i, j - 1)) * inv2d - i_unit * phi.get(i, j) * h.a_v.get(i, j);
    let dw =
        |i: usize, j: usize| (phi.get(i + 1, j) - phi.get(i - 1, j)) * inv2d - i_unit * phi.get(i, j) * a_w.get(i, j);
    let r2 = |i: usize, j: usize| h.r(i, j) * h.r(i, j);
    // sqrt(-g) F^{wv} per unit solid angle: (Omega r^2/2)(4/Omega^2) F_vw
    let flux = |i: usize, j: usize| two * r2(i, j) * f.get(i, j) / h.omega(i, j);
    let mut out = zero;
    for i in 1..nw - 1 {
        for j in 1..nv - 1 {
            if h.excluded(i, j) {
                continue;
            }
            let om = h.omega(i, j);
            let vol = om * r2(i, j) / two;
            let g_wv = -two / om;
            let p = phi.get(i, j);
            let xv = |ii: usize| dv(ii, j) * r2(ii, j);
            let xw = |jj: usize| dw(i, jj) * r2(i, jj);
            let dw_xv = (xv(i + 1) - xv(i - 1)) * inv2d - i_unit * xv(i) * a_w.get(i, j);
            let dv_xw = (xw(j + 1) - xw(j - 1)) * inv2d - i_unit * xw(j) * h.a_v.get(i, j);
            let box_phi = (dw_xv + dv_xw) * (g_wv / r2(i, j));
            let res = box_phi - potential_derivative(&h.potential, p);
            out.scalar = out.scalar.max(res.norm());
            // b = v: (1/sqrt(-g)) d_w(sqrt(-g) F^{wv}) + 2 Im(conj(phi) g^{vw} D_w phi)
            let div_v = (flux(i + 1, j) - flux(i - 1, j)) * inv2d / vol;
            let res_v = div_v + two * (p.conj() * dw(i, j) * g_wv).im;
            // b = w: F^{vw} = -F^{wv}
            let div_w = -(flux(i, j + 1) - flux(i, j - 1)) * inv2d / vol;
            let res_w = div_w + two * (p.conj() * dv(i, j) * g_wv).im;
            out.maxwell = out.maxwell.max(res_v.abs()).max(res_w.abs());
        }
    }
    out
}
