//! Second-order diamond scheme for the spherically symmetric Maxwell-Higgs sector.
//!
//! Unknowns are `psi = r phi`, the charge `Q` (with `F_vw = (1 - mu) Q / (2 r^2)`) and
//! `A_v`; `A_w = d_w chi` is prescribed by the gauge. Cell corners are named
//! `SW = (w, v)`, `SE = (w, v + delta)`, `NW = (w + delta, v)`, `NE = (w + delta, v + delta)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{potential_derivative, toda_flagged, PotentialSpec};
use crate::geometry::{lapse_from_tortoise, BackgroundParams};
use crate::grid::{GridSpec, NodeArray, RadialCache, DEFAULT_MIN_LAPSE};
use crate::history::{EvolutionStats, FieldHistory};
use crate::initial::{initialize, GaugeSpec, InitialData, InitialRays};
use crate::scalar::{Real, C};

/// Deliberate scheme defects used to check that convergence studies detect them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    #[default]
    None,
    /// Evaluates the cell-centre source at the NW corner radius.
    FirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOptions<T> {
    pub gauge: GaugeSpec<T>,
    pub corrector_passes: usize,
    pub fault: Fault,
    pub min_lapse: T,
}

impl<T: Real> Default for SchemeOptions<T> {
    fn default() -> Self {
        Self {
            gauge: GaugeSpec::trivial(),
            corrector_passes: 2,
            fault: Fault::None,
            min_lapse: T::lit(DEFAULT_MIN_LAPSE),
        }
    }
}

/// Extra source terms added to each evolution equation (manufactured solutions).
pub trait Forcing<T>: Sync {
    /// Added to `d_w d_v psi`.
    fn wave(&self, w: T, v: T) -> C<T>;
    /// Added to `d_v Q`.
    fn gauss_v(&self, w: T, v: T) -> T;
    /// Added to `d_w Q`.
    fn gauss_w(&self, w: T, v: T) -> T;
    /// Added to `d_w A_v`.
    fn gauge(&self, w: T, v: T) -> T;
}

/// State carried by each corner.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Corner<T> {
    pub psi: C<T>,
    pub q: T,
    pub a_v: T,
}

/// Radii and lapses used by one cell update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry<T> {
    /// `(w, v)` of the SW corner.
    pub w: T,
    pub v: T,
    pub r_c: T,
    pub omega_c: T,
    pub r_se: T,
    pub omega_se: T,
    pub r_ne: T,
    pub omega_ne: T,
    /// Midpoint of the NW-NE edge.
    pub r_n: T,
    pub omega_n: T,
    /// Midpoint of the SE-NE edge.
    pub r_e: T,
    pub omega_e: T,
}

impl<T: Real> CellGeometry<T> {
    /// Geometry of the cell with SW corner `(i, j)`.
    pub fn from_cache(cache: &RadialCache<T>, grid: &GridSpec<T>, i: usize, j: usize, fault: Fault) -> Self {
        let q = cache.node_q(i, j);
        let qc = match fault {
            Fault::None => q,
            Fault::FirstOrder => q - 2,
        };
        Self {
            w: grid.w(i),
            v: grid.v(j),
            r_c: cache.r_q(qc),
            omega_c: cache.omega_q(qc),
            r_se: cache.r_q(q + 2),
            omega_se: cache.omega_q(q + 2),
            r_ne: cache.r_q(q),
            omega_ne: cache.omega_q(q),
            r_n: cache.r_q(q - 1),
            omega_n: cache.omega_q(q - 1),
            r_e: cache.r_q(q + 1),
            omega_e: cache.omega_q(q + 1),
        }
    }

    /// Geometry computed directly from the background for a standalone cell.
    pub fn at(bg: &BackgroundParams<T>, w: T, v: T, delta: T) -> Result<Self> {
        let rs = (v - w) * T::lit(0.5);
        let quarter = delta / T::lit(4.0);
        let (r_c, omega_c) = lapse_from_tortoise(bg, rs)?;
        let (r_se, omega_se) = lapse_from_tortoise(bg, rs + delta * T::lit(0.5))?;
        let (r_n, omega_n) = lapse_from_tortoise(bg, rs - quarter)?;
        let (r_e, omega_e) = lapse_from_tortoise(bg, rs + quarter)?;
        Ok(Self { w, v, r_c, omega_c, r_se, omega_se, r_ne: r_c, omega_ne: omega_c, r_n, omega_n, r_e, omega_e })
    }
}

/// Everything a cell update needs besides the corners.
pub struct Scheme<'a, T> {
    pub bg: BackgroundParams<T>,
    pub potential: PotentialSpec<T>,
    pub delta: T,
    pub options: SchemeOptions<T>,
    pub forcing: Option<&'a dyn Forcing<T>>,
}

/// Right-hand side of `d_w d_v psi` in a general gauge.
///
/// `D_w D_v psi = -(Omega r/4) dP/d(conj phi) - Omega m psi/(2 r^3) + (i/2) F_vw psi`,
/// expanded with `d_w A_v = d_v A_w - F_vw`.
#[allow(clippy::too_many_arguments)]
pub fn wave_rhs<T: Real>(
    potential: &PotentialSpec<T>,
    m: T,
    r: T,
    omega: T,
    psi: C<T>,
    psi_w: C<T>,
    psi_v: C<T>,
    q: T,
    a_w: T,
    a_v: T,
    dv_aw: T,
) -> C<T> {
    let i = C::new(T::zero(), T::one());
    let f = omega * q / (T::lit(2.0) * r * r);
    let s = potential_derivative(potential, psi / r);
    s * (-omega * r / T::lit(4.0)) - psi * (omega * m / (T::lit(2.0) * r * r * r)) - i * psi * (f / T::lit(2.0))
        + i * psi * dv_aw
        + i * psi_w * a_v
        + i * psi_v * a_w
        + psi * (a_w * a_v)
}

/// `d_v Q = -2 Im(conj(psi) D_v psi)`.
pub fn gauss_v_rhs<T: Real>(psi: C<T>, psi_v: C<T>, a_v: T) -> T {
    let dv = psi_v - C::new(T::zero(), a_v) * psi;
    -T::lit(2.0) * (psi.conj() * dv).im
}

/// `d_w Q = 2 Im(conj(psi) D_w psi)`.
pub fn gauss_w_rhs<T: Real>(psi: C<T>, psi_w: C<T>, a_w: T) -> T {
    let dw = psi_w - C::new(T::zero(), a_w) * psi;
    T::lit(2.0) * (psi.conj() * dw).im
}

/// Computes the NE corner from SW, SE and NW.
///
/// Predictor plus `corrector_passes` fixed-point passes; the wave source is evaluated at
/// the cell centre from corner averages and centred differences, `Q` averages the
/// midpoint-rule estimates along the north and east edges, and `A_v` uses the trapezoid
/// rule along the east edge. Returns `None` on a non-finite result.
pub fn step_diamond<T: Real>(
    sw: &Corner<T>,
    se: &Corner<T>,
    nw: &Corner<T>,
    geo: &CellGeometry<T>,
    scheme: &Scheme<'_, T>,
) -> Option<Corner<T>> {
    let d = scheme.delta;
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let two = T::lit(2.0);
    let gauge = &scheme.options.gauge;
    let (wc, vc) = (geo.w + d * half, geo.v + d * half);
    let (wn, vn) = (geo.w + d, geo.v + d * half);
    let (we, ve) = (geo.w + d * half, geo.v + d);
    let (wne, vne) = (geo.w + d, geo.v + d);
    let aw_c = gauge.chi_w(wc, vc);
    let dvaw_c = gauge.chi_wv(wc, vc);
    let aw_e = gauge.chi_w(we, ve);
    let src_se = gauge.chi_wv(geo.w, geo.v + d) - geo.omega_se * se.q / (two * geo.r_se * geo.r_se);
    let dvaw_ne = gauge.chi_wv(wne, vne);
    let forcing = scheme.forcing;
    let (f_wave, f_qv, f_qw, f_a) = match forcing {
        Some(f) => (
            f.wave(wc, vc),
            f.gauss_v(wn, vn),
            f.gauss_w(we, ve),
            (f.gauge(geo.w, geo.v + d) + f.gauge(wne, vne)) * half,
        ),
        None => (C::new(T::zero(), T::zero()), T::zero(), T::zero(), T::zero()),
    };

    let mut ne = Corner { psi: nw.psi + se.psi - sw.psi, q: nw.q + se.q - sw.q, a_v: se.a_v + d * (src_se + f_a) };
    for _ in 0..=scheme.options.corrector_passes {
        let psi_c = (sw.psi + se.psi + nw.psi + ne.psi) * quarter;
        let psi_w = (ne.psi + nw.psi - se.psi - sw.psi) * (half / d);
        let psi_v = (ne.psi + se.psi - nw.psi - sw.psi) * (half / d);
        let q_c = (sw.q + se.q + nw.q + ne.q) * quarter;
        let av_c = (sw.a_v + se.a_v + nw.a_v + ne.a_v) * quarter;
        let g = wave_rhs(
            &scheme.potential,
            scheme.bg.m,
            geo.r_c,
            geo.omega_c,
            psi_c,
            psi_w,
            psi_v,
            q_c,
            aw_c,
            av_c,
            dvaw_c,
        ) + f_wave;
        let psi_ne = nw.psi + se.psi - sw.psi + g * (d * d);

        let psi_n = (nw.psi + psi_ne) * half;
        let av_n = (nw.a_v + ne.a_v) * half;
        let q_a = nw.q + d * (gauss_v_rhs(psi_n, (psi_ne - nw.psi) / d, av_n) + f_qv);
        let psi_e = (se.psi + psi_ne) * half;
        let q_b = se.q + d * (gauss_w_rhs(psi_e, (psi_ne - se.psi) / d, aw_e) + f_qw);
        let q_ne = (q_a + q_b) * half;
        let src_ne = dvaw_ne - geo.omega_ne * q_ne / (two * geo.r_ne * geo.r_ne);
        let av_ne = se.a_v + d * half * (src_se + src_ne) + d * f_a;
        ne = Corner { psi: psi_ne, q: q_ne, a_v: av_ne };
    }
    let finite = ne.psi.re.is_finite() && ne.psi.im.is_finite() && ne.q.is_finite() && ne.a_v.is_finite();
    finite.then_some(ne)
}

/// Runs the scheme over the whole rectangle with the default options.
pub fn evolve<T: Real>(
    grid: &GridSpec<T>,
    data: &InitialData<T>,
    bg: &BackgroundParams<T>,
    potential: &PotentialSpec<T>,
) -> Result<FieldHistory<T>> {
    evolve_with(grid, data, bg, potential, &SchemeOptions::default())
}

pub fn evolve_with<T: Real>(
    grid: &GridSpec<T>,
    data: &InitialData<T>,
    bg: &BackgroundParams<T>,
    potential: &PotentialSpec<T>,
    options: &SchemeOptions<T>,
) -> Result<FieldHistory<T>> {
    let cache = RadialCache::new(bg, grid)?;
    let rays = initialize(grid, data, &cache, &options.gauge)?;
    evolve_from_rays(grid, &rays, bg, potential, options, None, cache)
}

/// Sweeps [`step_diamond`] over the grid starting from explicit ray data.
pub fn evolve_from_rays<T: Real>(
    grid: &GridSpec<T>,
    rays: &InitialRays<T>,
    bg: &BackgroundParams<T>,
    potential: &PotentialSpec<T>,
    options: &SchemeOptions<T>,
    forcing: Option<&dyn Forcing<T>>,
    cache: RadialCache<T>,
) -> Result<FieldHistory<T>> {
    potential.validate()?;
    let (nw, nv) = (grid.nw(), grid.nv());
    if rays.psi_w0.len() != nv || rays.psi_v0.len() != nw {
        return Err(Error::Grid("ray lengths do not match the grid".into()));
    }
    let zero = C::new(T::zero(), T::zero());
    let mut psi = NodeArray::filled(nw, nv, zero);
    let mut q = NodeArray::filled(nw, nv, T::zero());
    let mut a_v = NodeArray::filled(nw, nv, T::zero());
    for j in 0..nv {
        psi.set(0, j, rays.psi_w0[j]);
        q.set(0, j, rays.q_w0[j]);
        a_v.set(0, j, rays.av_w0[j]);
    }
    for i in 0..nw {
        psi.set(i, 0, rays.psi_v0[i]);
        q.set(i, 0, rays.q_v0[i]);
        a_v.set(i, 0, rays.av_v0[i]);
    }
    let scheme = Scheme { bg: *bg, potential: *potential, delta: grid.delta, options: *options, forcing };
    let corner = |psi: &NodeArray<C<T>>, q: &NodeArray<T>, a: &NodeArray<T>, i: usize, j: usize| Corner {
        psi: psi.get(i, j),
        q: q.get(i, j),
        a_v: a.get(i, j),
    };
    let mut toda_flags = 0usize;
    for i in 0..nw - 1 {
        for j in 0..nv - 1 {
            let sw = corner(&psi, &q, &a_v, i, j);
            let se = corner(&psi, &q, &a_v, i, j + 1);
            let nwc = corner(&psi, &q, &a_v, i + 1, j);
            let geo = CellGeometry::from_cache(&cache, grid, i, j, options.fault);
            let ne = step_diamond(&sw, &se, &nwc, &geo, &scheme).ok_or(Error::NonFinite { i: i + 1, j: j + 1 })?;
            if toda_flagged(potential, ne.psi / geo.r_ne) {
                toda_flags += 1;
            }
            psi.set(i + 1, j + 1, ne.psi);
            q.set(i + 1, j + 1, ne.q);
            a_v.set(i + 1, j + 1, ne.a_v);
        }
    }
    let near_horizon_nodes = cache.count_below(grid, options.min_lapse);
    let stats = EvolutionStats { near_horizon_nodes, toda_flags, ..Default::default() };
    let mut history =
        FieldHistory::assemble(*grid, *bg, *potential, options.gauge, options.min_lapse, cache, psi, q, a_v, stats);
    history.record_residuals();
    Ok(history)
}
