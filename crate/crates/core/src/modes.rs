//! Linear fixed-multipole sector: `d_w d_v psi = -((1 - mu)/4) (V_{s,l}(r) + k) psi`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Fault;
use crate::fields::PotentialSpec;
use crate::geometry::BackgroundParams;
use crate::grid::{line_derivative, GridSpec, NodeArray, RadialCache, DEFAULT_MIN_LAPSE};
use crate::initial::InitialData;
use crate::scalar::{Real, C};

/// Spin `s` in {0, 1}, multipole `l >= s`, optional scalar potential (spin 0 only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec<T> {
    pub s: u32,
    pub l: u32,
    pub potential: Option<PotentialSpec<T>>,
}

impl<T: Real> ModeSpec<T> {
    pub fn new(s: u32, l: u32, potential: Option<PotentialSpec<T>>) -> Result<Self> {
        let spec = Self { s, l, potential };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s > 1 {
            return Err(Error::Parameter(format!("spin must be 0 or 1, got {}", self.s)));
        }
        if self.l < self.s {
            return Err(Error::Parameter(format!("multipole l = {} must be >= s = {}", self.l, self.s)));
        }
        if self.s == 1 && self.potential.is_some() {
            return Err(Error::Parameter("the spin-1 mode carries no scalar potential".into()));
        }
        self.mass_coefficient().map(|_| ())
    }

    /// Angular eigenweight `l(l + 1)`.
    pub fn angular_weight(&self) -> T {
        T::from_u32(self.l * (self.l + 1)).expect("small integer")
    }

    /// Coefficient `k` of the linearised potential term.
    pub fn mass_coefficient(&self) -> Result<T> {
        match self.potential {
            None => Ok(T::zero()),
            Some(p) => {
                p.validate()?;
                match p {
                    PotentialSpec::Mass { c1 } => Ok(c1),
                    PotentialSpec::Quartic { .. } => Ok(T::zero()),
                    PotentialSpec::SineGordon { c3, eta } => Ok(c3 * eta * eta / T::lit(2.0)),
                    PotentialSpec::Toda { .. } => Err(Error::Parameter(
                        "the Toda potential has no linearisation about phi = 0 (P'(0) != 0)".into(),
                    )),
                }
            }
        }
    }
}

/// `V_{s,l}(r) = l(l+1)/r^2 + (1 - s^2) 2m/r^3`.
pub fn mode_potential<T: Real>(spec: &ModeSpec<T>, bg: &BackgroundParams<T>, r: T) -> T {
    let s2 = T::from_u32(spec.s * spec.s).expect("small integer");
    spec.angular_weight() / (r * r) + (T::one() - s2) * T::lit(2.0) * bg.m / (r * r * r)
}

/// Mode amplitude on the grid.
#[derive(Debug, Clone)]
pub struct ModeHistory<T> {
    pub grid: GridSpec<T>,
    pub bg: BackgroundParams<T>,
    pub spec: ModeSpec<T>,
    pub k: T,
    pub min_lapse: T,
    pub cache: RadialCache<T>,
    pub psi: NodeArray<C<T>>,
    pub near_horizon_nodes: usize,
}

/// Evolves the mode from `psi(w0, v) = profile(v)`, `psi(w, v0) = 0`.
pub fn evolve_mode<T: Real>(
    mode: &ModeSpec<T>,
    grid: &GridSpec<T>,
    data: &InitialData<T>,
    bg: &BackgroundParams<T>,
) -> Result<ModeHistory<T>> {
    evolve_mode_with(mode, grid, data, bg, Fault::None)
}

pub fn evolve_mode_with<T: Real>(
    mode: &ModeSpec<T>,
    grid: &GridSpec<T>,
    data: &InitialData<T>,
    bg: &BackgroundParams<T>,
    fault: Fault,
) -> Result<ModeHistory<T>> {
    data.validate(grid)?;
    let w0: Vec<C<T>> = (0..grid.nv()).map(|j| data.phi_on_ray(grid.v(j)).0).collect();
    let v0 = vec![C::new(T::zero(), T::zero()); grid.nw()];
    evolve_mode_from_rays(mode, grid, &w0, &v0, bg, fault)
}

/// Evolves the mode from explicit ray values (`psi_w0` indexed by `j`, `psi_v0` by `i`).
pub fn evolve_mode_from_rays<T: Real>(
    mode: &ModeSpec<T>,
    grid: &GridSpec<T>,
    psi_w0: &[C<T>],
    psi_v0: &[C<T>],
    bg: &BackgroundParams<T>,
    fault: Fault,
) -> Result<ModeHistory<T>> {
    mode.validate()?;
    let k = mode.mass_coefficient()?;
    let cache = RadialCache::new(bg, grid)?;
    let (nw, nv) = (grid.nw(), grid.nv());
    if psi_w0.len() != nv || psi_v0.len() != nw {
        return Err(Error::Grid("ray lengths do not match the grid".into()));
    }
    // cell coefficient (delta^2/8) Omega (V + k) per quarter-step index
    let d2 = grid.delta * grid.delta / T::lit(8.0);
    let coef: Vec<T> = (0..(2 * (nw + nv - 2) + 1))
        .map(|q| d2 * cache.omega_q(q) * (mode_potential(mode, bg, cache.r_q(q)) + k))
        .collect();
    let mut psi = NodeArray::filled(nw, nv, C::new(T::zero(), T::zero()));
    for (j, &x) in psi_w0.iter().enumerate() {
        psi.set(0, j, x);
    }
    for (i, &x) in psi_v0.iter().enumerate() {
        psi.set(i, 0, x);
    }
    for i in 0..nw - 1 {
        for j in 0..nv - 1 {
            let q = cache.node_q(i, j);
            let c = match fault {
                Fault::None => coef[q],
                Fault::FirstOrder => coef[q - 2],
            };
            let e = psi.get(i, j + 1);
            let w = psi.get(i + 1, j);
            let ne = e + w - psi.get(i, j) - (e + w) * c;
            if !(ne.re.is_finite() && ne.im.is_finite()) {
                return Err(Error::NonFinite { i: i + 1, j: j + 1 });
            }
            psi.set(i + 1, j + 1, ne);
        }
    }
    let min_lapse = T::lit(DEFAULT_MIN_LAPSE);
    let near_horizon_nodes = cache.count_below(grid, min_lapse);
    Ok(ModeHistory { grid: *grid, bg: *bg, spec: *mode, k, min_lapse, cache, psi, near_horizon_nodes })
}

impl<T: Real> ModeHistory<T> {
    pub fn nw(&self) -> usize {
        self.psi.nw()
    }

    pub fn nv(&self) -> usize {
        self.psi.nv()
    }

    pub fn excluded(&self, i: usize, j: usize) -> bool {
        self.cache.omega(i, j) < self.min_lapse
    }

    /// `Omega (V + k)` at a node.
    pub fn effective_potential(&self, i: usize, j: usize) -> T {
        let r = self.cache.r(i, j);
        self.cache.omega(i, j) * (mode_potential(&self.spec, &self.bg, r) + self.k)
    }

    pub fn psi_w(&self, i: usize, j: usize) -> C<T> {
        line_derivative(self.nw(), |k| self.psi.get(k, j), i, self.grid.delta)
    }

    pub fn psi_v(&self, i: usize, j: usize) -> C<T> {
        line_derivative(self.nv(), |k| self.psi.get(i, k), j, self.grid.delta)
    }

    /// History of `d_t psi` from centred differences along the node diagonals.
    pub fn time_commuted(&self) -> Self {
        let (nw, nv) = (self.nw(), self.nv());
        let psi = NodeArray::from_fn(nw, nv, |i, j| {
            let back = i.min(j);
            let fwd = (nw - 1 - i).min(nv - 1 - j);
            if back + fwd == 0 {
                return self.psi_w(i, j) + self.psi_v(i, j);
            }
            let (i0, j0) = (i - back, j - back);
            line_derivative(back + fwd + 1, |k| self.psi.get(i0 + k, j0 + k), back, self.grid.delta)
        });
        Self { psi, cache: self.cache.clone(), ..*self }
    }
}
