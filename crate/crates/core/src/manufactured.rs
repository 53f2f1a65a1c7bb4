//! Manufactured solution for the full coupled scheme: prescribed smooth fields plus the
//! forcing that makes them exact solutions of the forced system.

use crate::error::Result;
use crate::evolution::{evolve_from_rays, gauss_v_rhs, gauss_w_rhs, wave_rhs, Forcing, SchemeOptions};
use crate::fields::PotentialSpec;
use crate::geometry::{lapse_from_tortoise, BackgroundParams};
use crate::grid::{GridSpec, RadialCache};
use crate::initial::{GaugeSpec, InitialRays};
use crate::scalar::C;

/// Exact fields with their first and mixed derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Exact {
    pub psi: C<f64>,
    pub psi_w: C<f64>,
    pub psi_v: C<f64>,
    pub psi_wv: C<f64>,
    pub q: f64,
    pub q_w: f64,
    pub q_v: f64,
    pub a_v: f64,
    pub a_v_w: f64,
}

/// `psi = eps (sin(w/2) cos(0.7 v) + i cos(w/2 + 0.3 v))`, `Q = 0.3 + eps sin(0.4 w + 0.2 v)`,
/// `A_v = 0.2 cos(0.3 w - 0.5 v)`.
#[derive(Debug, Clone, Copy)]
pub struct Manufactured {
    pub eps: f64,
    pub bg: BackgroundParams<f64>,
    pub potential: PotentialSpec<f64>,
    pub gauge: GaugeSpec<f64>,
}

impl Manufactured {
    pub fn standard() -> Self {
        Self {
            eps: 0.3,
            bg: BackgroundParams { m: 1.0 },
            potential: PotentialSpec::Quartic { c2: 1.0 },
            gauge: GaugeSpec { amplitude: 0.2, kw: 0.3, kv: 0.4 },
        }
    }

    pub fn exact(&self, w: f64, v: f64) -> Exact {
        let e = self.eps;
        let (s1, c1) = (0.5 * w).sin_cos();
        let (s2, c2) = (0.7 * v).sin_cos();
        let (s3, c3) = (0.5 * w + 0.3 * v).sin_cos();
        let psi = C::new(e * s1 * c2, e * c3);
        let psi_w = C::new(e * 0.5 * c1 * c2, -e * 0.5 * s3);
        let psi_v = C::new(-e * 0.7 * s1 * s2, -e * 0.3 * s3);
        let psi_wv = C::new(-e * 0.35 * c1 * s2, -e * 0.15 * c3);
        let (s4, c4) = (0.4 * w + 0.2 * v).sin_cos();
        let (s5, c5) = (0.3 * w - 0.5 * v).sin_cos();
        Exact {
            psi,
            psi_w,
            psi_v,
            psi_wv,
            q: 0.3 + e * s4,
            q_w: 0.4 * e * c4,
            q_v: 0.2 * e * c4,
            a_v: 0.2 * c5,
            a_v_w: -0.06 * s5,
        }
    }

    fn radius(&self, w: f64, v: f64) -> (f64, f64) {
        lapse_from_tortoise(&self.bg, 0.5 * (v - w)).expect("manufactured domain lies outside the horizon")
    }

    pub fn rays(&self, grid: &GridSpec<f64>) -> InitialRays<f64> {
        let along_w0: Vec<Exact> = (0..grid.nv()).map(|j| self.exact(grid.w0, grid.v(j))).collect();
        let along_v0: Vec<Exact> = (0..grid.nw()).map(|i| self.exact(grid.w(i), grid.v0)).collect();
        InitialRays {
            psi_w0: along_w0.iter().map(|e| e.psi).collect(),
            q_w0: along_w0.iter().map(|e| e.q).collect(),
            av_w0: along_w0.iter().map(|e| e.a_v).collect(),
            psi_v0: along_v0.iter().map(|e| e.psi).collect(),
            q_v0: along_v0.iter().map(|e| e.q).collect(),
            av_v0: along_v0.iter().map(|e| e.a_v).collect(),
        }
    }

    /// Max nodal errors of `(psi, Q, A_v)` after evolving on `grid`.
    pub fn errors(&self, grid: &GridSpec<f64>) -> Result<[f64; 3]> {
        let cache = RadialCache::new(&self.bg, grid)?;
        let options = SchemeOptions { gauge: self.gauge, ..SchemeOptions::default() };
        let h = evolve_from_rays(grid, &self.rays(grid), &self.bg, &self.potential, &options, Some(self), cache)?;
        let mut err = [0.0f64; 3];
        for i in 0..h.nw() {
            for j in 0..h.nv() {
                let ex = self.exact(grid.w(i), grid.v(j));
                let psi = h.phi.get(i, j) * h.r(i, j);
                err[0] = err[0].max((psi - ex.psi).norm());
                err[1] = err[1].max((h.q.get(i, j) - ex.q).abs());
                err[2] = err[2].max((h.a_v.get(i, j) - ex.a_v).abs());
            }
        }
        Ok(err)
    }
}

impl Forcing<f64> for Manufactured {
    fn wave(&self, w: f64, v: f64) -> C<f64> {
        let e = self.exact(w, v);
        let (r, om) = self.radius(w, v);
        let rhs = wave_rhs(
            &self.potential,
            self.bg.m,
            r,
            om,
            e.psi,
            e.psi_w,
            e.psi_v,
            e.q,
            self.gauge.chi_w(w, v),
            e.a_v,
            self.gauge.chi_wv(w, v),
        );
        e.psi_wv - rhs
    }

    fn gauss_v(&self, w: f64, v: f64) -> f64 {
        let e = self.exact(w, v);
        e.q_v - gauss_v_rhs(e.psi, e.psi_v, e.a_v)
    }

    fn gauss_w(&self, w: f64, v: f64) -> f64 {
        let e = self.exact(w, v);
        e.q_w - gauss_w_rhs(e.psi, e.psi_w, self.gauge.chi_w(w, v))
    }

    fn gauge(&self, w: f64, v: f64) -> f64 {
        let e = self.exact(w, v);
        let (r, om) = self.radius(w, v);
        e.a_v_w - (self.gauge.chi_wv(w, v) - om * e.q / (2.0 * r * r))
    }
}
