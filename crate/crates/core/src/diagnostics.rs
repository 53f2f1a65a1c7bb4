//! Slice energies, null fluxes, bulk integrals and the divergence identity.
//!
//! Fluxes are generated from `J_a = V^b T_ab`. With `sqrt(-g) = (1 - mu) r^2 / 2` per unit
//! solid angle, for the rectangle `[wa, wb] x [va, vb]`:
//! `bulk = Phi_w(wa) + Phi_v(va) - Phi_w(wb) - Phi_v(vb)`, where
//! `Phi_w(w = c) = 4 pi int r^2 J_v dv`, `Phi_v(v = c) = 4 pi int r^2 J_w dw` and
//! `bulk = 4 pi int int ((1 - mu) r^2 / 2) T^{ab} nabla_a V_b dw dv`.
//! On `t`-slices the flux is `4 pi int r^2 (J_w + J_v) dr*`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::FieldHistory;
use crate::modes::ModeHistory;
use crate::multiplier::MultiplierSpec;
use crate::scalar::Real;
use crate::stress::{current, deformation_contraction, stress_energy, StressEnergy};

/// A one-dimensional set of grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Slice {
    /// Nodes with `i + j = k`.
    Time { k: usize },
    /// `w = w_i`, `j` in `[j_lo, j_hi]`.
    WConst { i: usize, j_lo: usize, j_hi: usize },
    /// `v = v_j`, `i` in `[i_lo, i_hi]`.
    VConst { j: usize, i_lo: usize, i_hi: usize },
}

/// Index rectangle `[i_lo, i_hi] x [j_lo, j_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub i_lo: usize,
    pub i_hi: usize,
    pub j_lo: usize,
    pub j_hi: usize,
}

/// Value of a slice quadrature with its coverage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceValue<T> {
    pub value: T,
    /// `r*` range actually integrated.
    pub rstar_lo: T,
    pub rstar_hi: T,
    /// The slice or requested domain was truncated by the grid, or nodes were excluded.
    pub clipped: bool,
    pub nodes: usize,
}

/// Nodes of a slice ordered by increasing `r*`, and whether the grid cut the slice.
fn slice_nodes(nw: usize, nv: usize, slice: &Slice) -> Result<(Vec<(usize, usize)>, bool)> {
    match *slice {
        Slice::Time { k } => {
            if k > nw + nv - 2 {
                return Err(Error::EmptyIntersection(format!("t-slice k = {k}")));
            }
            let i_lo = k.saturating_sub(nv - 1);
            let i_hi = k.min(nw - 1);
            let nodes: Vec<_> = (i_lo..=i_hi).rev().map(|i| (i, k - i)).collect();
            Ok((nodes, k >= nw || k >= nv))
        }
        Slice::WConst { i, j_lo, j_hi } => {
            if i >= nw || j_lo > j_hi || j_hi >= nv {
                return Err(Error::EmptyIntersection(format!("w-segment i = {i}, j in [{j_lo}, {j_hi}]")));
            }
            Ok(((j_lo..=j_hi).map(|j| (i, j)).collect(), false))
        }
        Slice::VConst { j, i_lo, i_hi } => {
            if j >= nv || i_lo > i_hi || i_hi >= nw {
                return Err(Error::EmptyIntersection(format!("v-segment j = {j}, i in [{i_lo}, {i_hi}]")));
            }
            Ok(((i_lo..=i_hi).rev().map(|i| (i, j)).collect(), false))
        }
    }
}

/// Composite trapezoid of `f` over slice nodes whose `r*` lies in `domain`.
#[allow(clippy::too_many_arguments)]
fn slice_quadrature<T: Real>(
    nw: usize,
    nv: usize,
    delta: T,
    rstar: impl Fn(usize, usize) -> T,
    excluded: impl Fn(usize, usize) -> bool,
    slice: &Slice,
    domain: Option<(T, T)>,
    f: impl Fn(usize, usize) -> T,
) -> Result<SliceValue<T>> {
    let (nodes, mut clipped) = slice_nodes(nw, nv, slice)?;
    let inside: Vec<_> = nodes
        .into_iter()
        .filter(|&(i, j)| domain.is_none_or(|(lo, hi)| rstar(i, j) >= lo && rstar(i, j) <= hi))
        .collect();
    if inside.is_empty() {
        return Err(Error::EmptyIntersection(format!("{slice:?} within {domain:?}")));
    }
    let first = inside[0];
    let last = inside[inside.len() - 1];
    let (lo, hi) = (rstar(first.0, first.1), rstar(last.0, last.1));
    if let Some((dlo, dhi)) = domain {
        let tol = delta;
        if lo - dlo > tol || dhi - hi > tol {
            clipped = true;
        }
    }
    let n = inside.len();
    let mut sum = T::zero();
    for (k, &(i, j)) in inside.iter().enumerate() {
        if excluded(i, j) {
            clipped = true;
            continue;
        }
        let wgt = if n > 1 && (k == 0 || k == n - 1) { T::lit(0.5) } else { T::one() };
        sum = sum + wgt * f(i, j);
    }
    // node spacing along every slice kind: delta in r* (t-slice) or in w, v (null)
    let value = if n > 1 { sum * delta } else { T::zero() };
    Ok(SliceValue { value, rstar_lo: lo, rstar_hi: hi, clipped, nodes: n })
}

fn four_pi<T: Real>() -> T {
    T::lit(4.0) * T::PI()
}

impl<T: Real> FieldHistory<T> {
    pub fn stress(&self, i: usize, j: usize) -> StressEnergy<T> {
        stress_energy(&self.sample(i, j), self.potential_density(i, j), self.omega(i, j))
    }

    fn quadrature(
        &self,
        slice: &Slice,
        domain: Option<(T, T)>,
        f: impl Fn(usize, usize) -> T,
    ) -> Result<SliceValue<T>> {
        slice_quadrature(
            self.nw(),
            self.nv(),
            self.grid.delta,
            |i, j| self.grid.rstar(i, j),
            |i, j| self.excluded(i, j),
            slice,
            domain,
            f,
        )
    }
}

/// Raw flux of `J = V . T` through a slice (no sign convention applied).
pub fn slice_flux<T: Real>(
    h: &FieldHistory<T>,
    mult: &MultiplierSpec<T>,
    slice: &Slice,
    domain: Option<(T, T)>,
) -> Result<SliceValue<T>> {
    let fp = four_pi::<T>();
    let density = |i: usize, j: usize| {
        let r = h.r(i, j);
        let vf = mult.at(&h.bg, h.w(i), h.v(j), r, h.omega(i, j));
        let jc = current(&h.stress(i, j), &vf);
        let jj = match slice {
            Slice::Time { .. } => jc.j_w + jc.j_v,
            Slice::WConst { .. } => jc.j_v,
            Slice::VConst { .. } => jc.j_w,
        };
        fp * r * r * jj
    };
    h.quadrature(slice, domain, density)
}

/// Sign applied to the raw flux when reporting the energy of a multiplier:
/// `+1` for `T` and `G`, `-1` for the past-directed `K` and `H`.
pub fn report_sign<T: Real>(mult: &MultiplierSpec<T>) -> T {
    match mult {
        MultiplierSpec::TimeT | MultiplierSpec::RadialG { .. } => T::one(),
        MultiplierSpec::MorawetzK | MultiplierSpec::RedshiftH { .. } => -T::one(),
    }
}

/// Energy of a multiplier on a slice with the reporting sign applied.
pub fn slice_energy<T: Real>(
    h: &FieldHistory<T>,
    mult: &MultiplierSpec<T>,
    slice: &Slice,
    domain: Option<(T, T)>,
) -> Result<SliceValue<T>> {
    let mut v = slice_flux(h, mult, slice, domain)?;
    v.value = v.value * report_sign(mult);
    Ok(v)
}

/// Energy of `d/dt` written in hatted components:
/// `4 pi int (1 - mu) r^2 {(|D_t phi|^2 + |D_r* phi|^2)/(1 - mu) + |P| + 2 F_vw^2/(1 - mu)^2} dr*`.
/// With `include_maxwell = false` the field-strength term is dropped (reduced energy).
pub fn time_energy_hatted<T: Real>(
    h: &FieldHistory<T>,
    k: usize,
    domain: Option<(T, T)>,
    include_maxwell: bool,
) -> Result<SliceValue<T>> {
    let fp = four_pi::<T>();
    h.quadrature(&Slice::Time { k }, domain, |i, j| {
        let s = h.sample(i, j);
        let om = h.omega(i, j);
        let r = h.r(i, j);
        let dt = s.dw_phi + s.dv_phi;
        let dr = s.dv_phi - s.dw_phi;
        let mut e = (dt.norm_sqr() + dr.norm_sqr()) / om + h.potential_density(i, j).abs();
        if include_maxwell {
            e = e + T::lit(2.0) * s.f_vw * s.f_vw / (om * om);
        }
        fp * om * r * r * e
    })
}

/// `4 pi int r^2 {F_vw^2/(1 - mu)^2 + |D_v phi|^2 + |D_w phi|^2 + (1 - mu) P/2} dr*`.
pub fn sharp_energy<T: Real>(h: &FieldHistory<T>, k: usize, domain: Option<(T, T)>) -> Result<SliceValue<T>> {
    let fp = four_pi::<T>();
    h.quadrature(&Slice::Time { k }, domain, |i, j| {
        let s = h.sample(i, j);
        let om = h.omega(i, j);
        let r = h.r(i, j);
        let e = s.f_vw * s.f_vw / (om * om)
            + s.dv_phi.norm_sqr()
            + s.dw_phi.norm_sqr()
            + om * h.potential_density(i, j) / T::lit(2.0);
        fp * r * r * e
    })
}

impl Rect {
    pub fn check<T: Real>(&self, h: &FieldHistory<T>) -> Result<()> {
        if self.i_lo >= self.i_hi || self.j_lo >= self.j_hi || self.i_hi >= h.nw() || self.j_hi >= h.nv() {
            return Err(Error::RegionOutsideGrid(format!("{self:?} on {}x{} nodes", h.nw(), h.nv())));
        }
        Ok(())
    }

    /// Rectangle with corners at the given null coordinates, which must be grid nodes.
    pub fn from_coords<T: Real>(grid: &crate::grid::GridSpec<T>, wa: T, wb: T, va: T, vb: T) -> Result<Self> {
        let idx = |x: Option<usize>, name: &str| {
            x.ok_or_else(|| Error::RegionOutsideGrid(format!("{name} is not a grid node")))
        };
        Ok(Self {
            i_lo: idx(grid.index_w(wa), "wa")?,
            i_hi: idx(grid.index_w(wb), "wb")?,
            j_lo: idx(grid.index_v(va), "va")?,
            j_hi: idx(grid.index_v(vb), "vb")?,
        })
    }
}

/// `4 pi int int ((1 - mu) r^2/2) T^{ab} nabla_a V_b dw dv` over a rectangle, restricted to
/// nodes with `r*` in `domain`.
pub fn bulk_integral<T: Real>(
    h: &FieldHistory<T>,
    mult: &MultiplierSpec<T>,
    rect: &Rect,
    domain: Option<(T, T)>,
) -> Result<T> {
    rect.check(h)?;
    let half = T::lit(0.5);
    let mut sum = T::zero();
    for i in rect.i_lo..=rect.i_hi {
        let wi = if i == rect.i_lo || i == rect.i_hi { half } else { T::one() };
        for j in rect.j_lo..=rect.j_hi {
            if h.excluded(i, j) {
                continue;
            }
            if let Some((lo, hi)) = domain {
                let rs = h.grid.rstar(i, j);
                if rs < lo || rs > hi {
                    continue;
                }
            }
            let wj = if j == rect.j_lo || j == rect.j_hi { half } else { T::one() };
            let r = h.r(i, j);
            let om = h.omega(i, j);
            let vf = mult.at(&h.bg, h.w(i), h.v(j), r, om);
            let tp = deformation_contraction(&h.stress(i, j), &vf, h.bg.m, r, om);
            sum = sum + wi * wj * half * om * r * r * tp;
        }
    }
    Ok(four_pi::<T>() * sum * h.grid.delta * h.grid.delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceCheck<T> {
    pub bulk: T,
    /// `Phi_w(wa) + Phi_v(va) - Phi_w(wb) - Phi_v(vb)`.
    pub boundary: T,
    pub residual: T,
}

/// Compares the bulk integral with the boundary fluxes of the rectangle.
pub fn divergence_residual<T: Real>(
    h: &FieldHistory<T>,
    mult: &MultiplierSpec<T>,
    rect: &Rect,
) -> Result<DivergenceCheck<T>> {
    rect.check(h)?;
    let bulk = bulk_integral(h, mult, rect, None)?;
    let fw = |i| slice_flux(h, mult, &Slice::WConst { i, j_lo: rect.j_lo, j_hi: rect.j_hi }, None).map(|x| x.value);
    let fv = |j| slice_flux(h, mult, &Slice::VConst { j, i_lo: rect.i_lo, i_hi: rect.i_hi }, None).map(|x| x.value);
    let boundary = fw(rect.i_lo)? + fv(rect.j_lo)? - fw(rect.i_hi)? - fv(rect.j_hi)?;
    Ok(DivergenceCheck { bulk, boundary, residual: (bulk - boundary).abs() })
}

/// Which quadratic functional of a mode history to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFunctional {
    /// `int 2|psi_w|^2 + 2|psi_v|^2 + (1 - mu)(V + k)|psi|^2 dr*`
    Time,
    /// `2 int w^2 |psi_w|^2 + v^2 |psi_v|^2 + (w^2 + v^2)(1 - mu)(V + k)|psi|^2/4 dr*`
    Morawetz,
    /// `int |psi_w|^2 + |psi_v|^2 + (1 - mu)(V + k)|psi|^2/2 dr*`
    Sharp,
}

/// Mode-sector energy on the `t`-slice `k` with density weight `r^{2j} (l(l+1))^j` for
/// `angular = j` angular commutations.
pub fn mode_energy<T: Real>(
    h: &ModeHistory<T>,
    functional: ModeFunctional,
    k: usize,
    angular: u32,
    domain: Option<(T, T)>,
) -> Result<SliceValue<T>> {
    let lw = h.spec.angular_weight();
    let two = T::lit(2.0);
    slice_quadrature(
        h.nw(),
        h.nv(),
        h.grid.delta,
        |i, j| h.grid.rstar(i, j),
        |i, j| h.excluded(i, j),
        &Slice::Time { k },
        domain,
        |i, j| {
            let pw = h.psi_w(i, j).norm_sqr();
            let pv = h.psi_v(i, j).norm_sqr();
            let u = h.effective_potential(i, j) * h.psi.get(i, j).norm_sqr();
            let e = match functional {
                ModeFunctional::Time => two * pw + two * pv + u,
                ModeFunctional::Morawetz => {
                    let (w, v) = (h.grid.w(i), h.grid.v(j));
                    two * (w * w * pw + v * v * pv + (w * w + v * v) * u / T::lit(4.0))
                }
                ModeFunctional::Sharp => pw + pv + u / two,
            };
            let r2 = h.cache.r(i, j) * h.cache.r(i, j);
            e * (r2 * lw).powi(angular as i32)
        },
    )
}

/// `E(t2) - E(t1)` against the flux entering through the grid edges between the two slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBalance<T> {
    pub e_start: T,
    pub e_end: T,
    /// Net flux through the four edge segments cut off by the two slices.
    pub inflow: T,
    /// `|e_end - e_start - inflow| / |e_start|`
    pub drift: T,
}

/// Energy balance of a multiplier between the `t`-slices `k1 < k2`.
pub fn energy_balance<T: Real>(
    h: &FieldHistory<T>,
    mult: &MultiplierSpec<T>,
    k1: usize,
    k2: usize,
) -> Result<EnergyBalance<T>> {
    if k1 >= k2 {
        return Err(Error::EmptyIntersection(format!("slices k1 = {k1}, k2 = {k2}")));
    }
    let (iw, jv) = (h.nw() - 1, h.nv() - 1);
    let e_start = slice_flux(h, mult, &Slice::Time { k: k1 }, None)?.value;
    let e_end = slice_flux(h, mult, &Slice::Time { k: k2 }, None)?.value;
    let seg = |lo: usize, hi: usize, s: Slice| -> Result<T> {
        if hi > lo {
            slice_flux(h, mult, &s, None).map(|x| x.value)
        } else {
            Ok(T::zero())
        }
    };
    let (a, b) = (k1.min(jv), k2.min(jv));
    let past_w = seg(a, b, Slice::WConst { i: 0, j_lo: a, j_hi: b })?;
    let (a, b) = (k1.min(iw), k2.min(iw));
    let past_v = seg(a, b, Slice::VConst { j: 0, i_lo: a, i_hi: b })?;
    let (a, b) = (k1.saturating_sub(iw), k2.saturating_sub(iw));
    let fut_w = seg(a, b, Slice::WConst { i: iw, j_lo: a, j_hi: b })?;
    let (a, b) = (k1.saturating_sub(jv), k2.saturating_sub(jv));
    let fut_v = seg(a, b, Slice::VConst { j: jv, i_lo: a, i_hi: b })?;
    let inflow = past_w + past_v - fut_w - fut_v;
    let miss = (e_end - e_start - inflow).abs();
    let drift = if miss == T::zero() { miss } else { miss / e_start.abs() };
    Ok(EnergyBalance { e_start, e_end, inflow, drift })
}
