//! Initial data on the two generating null rays and the prescribed gauge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::current_density;
use crate::grid::{GridSpec, RadialCache};
use crate::scalar::{Real, C};

/// Pulse shape on the outgoing ray `w = w0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `exp(-x^2/2)`, truncated at `|x| = 7`.
    Gaussian,
    /// `exp(1 - 1/(1 - x^2))` on `|x| < 1`.
    CompactBump,
    Zero,
}

/// Gaussian truncation radius in units of the width.
pub const GAUSSIAN_CUT: f64 = 7.0;

/// `phi(w0, v) = amplitude * shape((v - center)/width) * exp(i frequency v)`, `phi(w, v0) = 0`,
/// and `Q(w, v0) = charge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData<T> {
    pub profile: ProfileKind,
    pub amplitude: T,
    pub center: T,
    pub width: T,
    pub frequency: T,
    pub charge: T,
}

impl<T: Real> InitialData<T> {
    pub fn zero() -> Self {
        Self {
            profile: ProfileKind::Zero,
            amplitude: T::zero(),
            center: T::zero(),
            width: T::one(),
            frequency: T::zero(),
            charge: T::zero(),
        }
    }

    pub fn coulomb(charge: T) -> Self {
        Self { charge, ..Self::zero() }
    }

    /// Interval outside which the profile vanishes, `None` for the zero profile.
    pub fn support(&self) -> Option<(T, T)> {
        let half = match self.profile {
            ProfileKind::Zero => return None,
            ProfileKind::Gaussian => self.width * T::lit(GAUSSIAN_CUT),
            ProfileKind::CompactBump => self.width,
        };
        Some((self.center - half, self.center + half))
    }

    /// Real envelope and its derivative at `v`.
    pub fn shape(&self, v: T) -> (T, T) {
        let x = (v - self.center) / self.width;
        match self.profile {
            ProfileKind::Zero => (T::zero(), T::zero()),
            ProfileKind::Gaussian => {
                if x.abs() >= T::lit(GAUSSIAN_CUT) {
                    return (T::zero(), T::zero());
                }
                let g = (-x * x / T::lit(2.0)).exp();
                (self.amplitude * g, -self.amplitude * g * x / self.width)
            }
            ProfileKind::CompactBump => {
                let s = T::one() - x * x;
                if s <= T::zero() {
                    return (T::zero(), T::zero());
                }
                let g = (T::one() - T::one() / s).exp();
                let dg = g * (-T::lit(2.0) * x / (s * s)) / self.width;
                (self.amplitude * g, self.amplitude * dg)
            }
        }
    }

    /// `phi` and `d phi/dv` on the outgoing ray, before any gauge phase.
    pub fn phi_on_ray(&self, v: T) -> (C<T>, C<T>) {
        let (g, dg) = self.shape(v);
        let ph = C::new((self.frequency * v).cos(), (self.frequency * v).sin());
        let phi = ph * g;
        let dphi = ph * dg + C::new(T::zero(), self.frequency) * phi;
        (phi, dphi)
    }

    pub fn validate(&self, grid: &GridSpec<T>) -> Result<()> {
        if !(self.width > T::zero()) && self.profile != ProfileKind::Zero {
            return Err(Error::Parameter(format!("profile width must be > 0, got {}", self.width)));
        }
        if let Some((lo, hi)) = self.support() {
            if !(lo > grid.v0) || !(hi <= grid.v1) {
                return Err(Error::Support {
                    lo: lo.to_f64_lossy(),
                    hi: hi.to_f64_lossy(),
                    ray_lo: grid.v0.to_f64_lossy(),
                    ray_hi: grid.v1.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}

/// Gauge function `chi = amplitude * sin(kw w + kv v)`; `A_w = d_w chi` everywhere and
/// `A_v = d_v chi` on the initial outgoing ray.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GaugeSpec<T> {
    pub amplitude: T,
    pub kw: T,
    pub kv: T,
}

impl<T: Real> GaugeSpec<T> {
    pub fn trivial() -> Self {
        Self { amplitude: T::zero(), kw: T::zero(), kv: T::zero() }
    }

    pub fn chi(&self, w: T, v: T) -> T {
        self.amplitude * (self.kw * w + self.kv * v).sin()
    }

    pub fn chi_w(&self, w: T, v: T) -> T {
        self.amplitude * self.kw * (self.kw * w + self.kv * v).cos()
    }

    pub fn chi_v(&self, w: T, v: T) -> T {
        self.amplitude * self.kv * (self.kw * w + self.kv * v).cos()
    }

    /// `d_v A_w = d_v d_w chi`.
    pub fn chi_wv(&self, w: T, v: T) -> T {
        -self.amplitude * self.kw * self.kv * (self.kw * w + self.kv * v).sin()
    }

    pub fn phase(&self, w: T, v: T) -> C<T> {
        let c = self.chi(w, v);
        C::new(c.cos(), c.sin())
    }
}

/// Values of `psi = r phi`, `Q` and `A_v` on the rays `w = w0` (indexed by `j`) and
/// `v = v0` (indexed by `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct InitialRays<T> {
    pub psi_w0: Vec<C<T>>,
    pub q_w0: Vec<T>,
    pub av_w0: Vec<T>,
    pub psi_v0: Vec<C<T>>,
    pub q_v0: Vec<T>,
    pub av_v0: Vec<T>,
}

/// Builds constraint-consistent rays.
///
/// `Q` follows `d_v Q = -r^2 j(phi, D_v phi)` along `w = w0` by the midpoint rule on the
/// analytic profile; along `v = v0` the scalar vanishes so `Q` is constant and `A_v` is
/// integrated exactly.
pub fn initialize<T: Real>(
    grid: &GridSpec<T>,
    data: &InitialData<T>,
    cache: &RadialCache<T>,
    gauge: &GaugeSpec<T>,
) -> Result<InitialRays<T>> {
    data.validate(grid)?;
    let (nw, nv) = (grid.nw(), grid.nv());
    let w0 = grid.w0;
    let half = T::lit(0.5);
    let mut psi_w0 = Vec::with_capacity(nv);
    let mut q_w0 = Vec::with_capacity(nv);
    let mut av_w0 = Vec::with_capacity(nv);
    let mut q = data.charge;
    for j in 0..nv {
        let v = grid.v(j);
        if j > 0 {
            let vm = v - grid.delta * half;
            let qm = cache.node_q(0, j) - 1;
            let r = cache.r_q(qm);
            let (phi, dphi) = data.phi_on_ray(vm);
            let dq = -r * r * current_density(phi, dphi);
            q = q + grid.delta * dq;
            if !q.is_finite() {
                return Err(Error::NonFinite { i: 0, j });
            }
        }
        let (phi, _) = data.phi_on_ray(v);
        psi_w0.push(phi * gauge.phase(w0, v) * cache.r(0, j));
        q_w0.push(q);
        av_w0.push(gauge.chi_v(w0, v));
    }
    let zero = C::new(T::zero(), T::zero());
    let v0 = grid.v0;
    let r00 = cache.r(0, 0);
    let psi_v0 = vec![zero; nw];
    let q_v0 = vec![data.charge; nw];
    let av_v0 = (0..nw)
        .map(|i| gauge.chi_v(grid.w(i), v0) - data.charge * (T::one() / cache.r(i, 0) - T::one() / r00))
        .collect();
    Ok(InitialRays { psi_w0, q_w0, av_w0, psi_v0, q_v0, av_v0 })
}
