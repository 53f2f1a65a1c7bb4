//! Stress-energy tensor in the null frame and multiplier currents.
//!
//! `T_ab = F_ac F_b^c - (1/4) g_ab F^2 + 2 Re(D_a phi conj(D_b phi)) - g_ab (|D phi|^2 + P)`,
//! the Noether tensor of `L = -(1/4) F^2 - |D phi|^2 - P`. For spherically symmetric
//! fields on `-(1 - mu) dw dv + r^2 dsigma^2`:
//!
//! - `T_ww = 2 |D_w phi|^2`, `T_vv = 2 |D_v phi|^2`
//! - `T_vw = F_vw^2/(1 - mu) + (1 - mu) P/2`
//! - `g^{AB} T_AB = 4 F_vw^2/(1 - mu)^2 + 8 Re(D_w phi conj(D_v phi))/(1 - mu) - 2P`

use serde::{Deserialize, Serialize};

use crate::fields::FieldSample;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StressEnergy<T> {
    pub t_ww: T,
    pub t_vv: T,
    pub t_vw: T,
    /// Trace over the sphere, `g^{AB} T_AB`.
    pub t_angular: T,
    /// `P` at the sample.
    pub potential: T,
}

/// Null-frame components at a point with lapse `omega`.
pub fn stress_energy<T: Real>(sample: &FieldSample<T>, potential: T, omega: T) -> StressEnergy<T> {
    let two = T::lit(2.0);
    let f2 = sample.f_vw * sample.f_vw;
    let cross = (sample.dw_phi * sample.dv_phi.conj()).re;
    StressEnergy {
        t_ww: two * sample.dw_phi.norm_sqr(),
        t_vv: two * sample.dv_phi.norm_sqr(),
        t_vw: f2 / omega + omega * potential / two,
        t_angular: T::lit(4.0) * f2 / (omega * omega) + T::lit(8.0) * cross / omega - two * potential,
        potential,
    }
}

/// Vector field `a d_w + b d_v` and its first partials.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NullVector<T> {
    pub a: T,
    pub b: T,
    pub a_w: T,
    pub a_v: T,
    pub b_w: T,
    pub b_v: T,
}

impl<T: Real> NullVector<T> {
    pub fn scaled(&self, s: T) -> Self {
        Self {
            a: self.a * s,
            b: self.b * s,
            a_w: self.a_w * s,
            a_v: self.a_v * s,
            b_w: self.b_w * s,
            b_v: self.b_v * s,
        }
    }
}

/// Covector `J_a = V^b T_ab` in null components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Current<T> {
    pub j_w: T,
    pub j_v: T,
}

pub fn current<T: Real>(t: &StressEnergy<T>, v: &NullVector<T>) -> Current<T> {
    Current { j_w: v.a * t.t_ww + v.b * t.t_vw, j_v: v.a * t.t_vw + v.b * t.t_vv }
}

/// `T^{ab} nabla_a V_b` for `V = a d_w + b d_v` at radius `r`.
pub fn deformation_contraction<T: Real>(t: &StressEnergy<T>, v: &NullVector<T>, m: T, r: T, omega: T) -> T {
    let two = T::lit(2.0);
    -(two / omega) * (t.t_vv * v.b_w + t.t_ww * v.a_v)
        - (two / omega) * t.t_vw * (m / (r * r) * (v.b - v.a) + v.a_w + v.b_v)
        + omega * (v.b - v.a) * t.t_angular / (two * r)
}
