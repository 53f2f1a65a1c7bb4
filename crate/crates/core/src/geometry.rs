//! Schwarzschild exterior: lapse, tortoise coordinate, and null-coordinate charts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const NEWTON_CAP: usize = 100;

/// Background mass. `m = 0` is the flat verification mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackgroundParams<T> {
    pub m: T,
}

impl<T: Real> BackgroundParams<T> {
    pub fn new(m: T) -> Result<Self> {
        if !(m >= T::zero()) || !m.is_finite() {
            return Err(Error::Parameter(format!("mass must be finite and >= 0, got {m}")));
        }
        Ok(Self { m })
    }

    pub fn flat() -> Self {
        Self { m: T::zero() }
    }

    pub fn horizon(&self) -> T {
        T::lit(2.0) * self.m
    }

    pub fn photon_sphere(&self) -> T {
        T::lit(3.0) * self.m
    }

    pub fn is_flat(&self) -> bool {
        self.m == T::zero()
    }

    fn check_exterior(&self, r: T) -> Result<()> {
        let ok = if self.is_flat() { r > T::zero() } else { r > self.horizon() };
        if ok {
            Ok(())
        } else {
            Err(Error::NotExterior { r: r.to_f64_lossy(), horizon: self.horizon().to_f64_lossy() })
        }
    }
}

/// Which coordinates a [`ChartPoint`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// (t, r)
    Schwarzschild,
    /// (t, r*)
    Tortoise,
    /// (w, v)
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint<T> {
    pub chart: Chart,
    pub coord1: T,
    pub coord2: T,
}

impl<T: Real> ChartPoint<T> {
    pub fn new(bg: &BackgroundParams<T>, chart: Chart, coord1: T, coord2: T) -> Result<Self> {
        if chart == Chart::Schwarzschild {
            bg.check_exterior(coord2)?;
        }
        Ok(Self { chart, coord1, coord2 })
    }

    /// Re-expresses the point in another chart.
    pub fn to_chart(&self, bg: &BackgroundParams<T>, target: Chart) -> Result<Self> {
        let (t, rs) = match self.chart {
            Chart::Schwarzschild => (self.coord1, tortoise(bg, self.coord2)?),
            Chart::Tortoise => (self.coord1, self.coord2),
            Chart::Null => from_null(self.coord1, self.coord2),
        };
        let (c1, c2) = match target {
            Chart::Schwarzschild => (t, radius_from_tortoise(bg, rs)?),
            Chart::Tortoise => (t, rs),
            Chart::Null => to_null(t, rs),
        };
        Ok(Self { chart: target, coord1: c1, coord2: c2 })
    }
}

/// `1 - 2m/r`.
pub fn lapse<T: Real>(bg: &BackgroundParams<T>, r: T) -> Result<T> {
    bg.check_exterior(r)?;
    Ok(T::one() - T::lit(2.0) * bg.m / r)
}

/// `r + 2m log(r - 2m)`; reduces to `r` when `m = 0`.
pub fn tortoise<T: Real>(bg: &BackgroundParams<T>, r: T) -> Result<T> {
    bg.check_exterior(r)?;
    if bg.is_flat() {
        return Ok(r);
    }
    Ok(r + T::lit(2.0) * bg.m * (r - bg.horizon()).ln())
}

/// Inverts [`tortoise`].
///
/// Solves for `y = ln(r - 2m)` in `2m + e^y + 2m y = r*` by Newton iteration
/// kept inside a shrinking bracket. Working in `y` keeps `r - 2m` accurate
/// close to the horizon where the lapse is tiny.
pub fn radius_from_tortoise<T: Real>(bg: &BackgroundParams<T>, rstar: T) -> Result<T> {
    Ok(bg.horizon() + horizon_offset_from_tortoise(bg, rstar)?)
}

/// Returns `r - 2m` for the given `r*` without cancellation.
pub fn horizon_offset_from_tortoise<T: Real>(bg: &BackgroundParams<T>, rstar: T) -> Result<T> {
    if bg.is_flat() {
        return if rstar > T::zero() {
            Ok(rstar)
        } else {
            Err(Error::NotExterior { r: rstar.to_f64_lossy(), horizon: 0.0 })
        };
    }
    if !rstar.is_finite() {
        return Err(Error::InverseTortoise { rstar: rstar.to_f64_lossy(), iterations: 0 });
    }
    let two_m = bg.horizon();
    let g = |y: T| two_m + y.exp() + two_m * y - rstar;
    // g is increasing in y with g' = e^y + 2m.
    let mut y = if rstar < two_m {
        (rstar - two_m) / two_m
    } else if rstar > T::lit(10.0) * bg.m {
        (rstar - two_m).ln()
    } else {
        T::zero()
    };
    let mut lo = y;
    let mut step = T::one();
    while g(lo) > T::zero() {
        lo = lo - step;
        step = step + step;
    }
    let mut hi = y.max(lo);
    step = T::one();
    while g(hi) < T::zero() {
        hi = hi + step;
        step = step + step;
    }
    let tol = T::lit(1e-13) * T::one().max(rstar.abs());
    for _ in 0..NEWTON_CAP {
        let gy = g(y);
        if gy.abs() <= tol {
            return Ok(y.exp());
        }
        if gy < T::zero() {
            lo = y;
        } else {
            hi = y;
        }
        let mut next = y - gy / (y.exp() + two_m);
        if !(next > lo && next < hi) {
            next = (lo + hi) / T::lit(2.0);
        }
        if next == y || hi - lo <= T::epsilon() * T::one().max(y.abs()) {
            return Ok(next.exp());
        }
        y = next;
    }
    let gy = g(y);
    if gy.abs() <= T::lit(1e3) * tol {
        return Ok(y.exp());
    }
    Err(Error::InverseTortoise { rstar: rstar.to_f64_lossy(), iterations: NEWTON_CAP })
}

/// Lapse evaluated from `r*` directly, accurate near the horizon.
pub fn lapse_from_tortoise<T: Real>(bg: &BackgroundParams<T>, rstar: T) -> Result<(T, T)> {
    if bg.is_flat() {
        return Ok((radius_from_tortoise(bg, rstar)?, T::one()));
    }
    let off = horizon_offset_from_tortoise(bg, rstar)?;
    let r = bg.horizon() + off;
    Ok((r, off / r))
}

/// `(t, r*) -> (w, v)` with `w = t - r*`, `v = t + r*`.
pub fn to_null<T: Real>(t: T, rstar: T) -> (T, T) {
    (t - rstar, t + rstar)
}

/// `(w, v) -> (t, r*)`.
pub fn from_null<T: Real>(w: T, v: T) -> (T, T) {
    let half = T::lit(0.5);
    ((v + w) * half, (v - w) * half)
}
