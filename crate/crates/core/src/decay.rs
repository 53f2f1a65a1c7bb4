//! Field traces along curves, power-law fits and envelope checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::tortoise;
use crate::grid::{GridSpec, RadialCache};
use crate::history::FieldHistory;
use crate::modes::ModeHistory;
use crate::scalar::Real;

/// Minimum number of samples a curve must contribute.
pub const MIN_CURVE_SAMPLES: usize = 16;
/// Samples dropped from the end of the default fit window.
pub const DEFAULT_TAIL_EXCLUDE: usize = 5;
/// Relative tolerance of the envelope stabilisation rule.
pub const DEFAULT_STABILISATION_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    /// `r = const`, sampled against `v`.
    RConst { r: f64 },
    /// `w = const`, sampled against `v`.
    WConst { w: f64 },
    /// `v = const`, sampled against `w`.
    VConst { v: f64 },
    /// The last outgoing ray `w = w1`, sampled against `v`.
    HorizonProxy,
}

impl CurveSpec {
    pub fn label(&self) -> String {
        match self {
            CurveSpec::RConst { r } => format!("r={r}"),
            CurveSpec::WConst { w } => format!("w={w}"),
            CurveSpec::VConst { v } => format!("v={v}"),
            CurveSpec::HorizonProxy => "horizon".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `|phi|`
    Phi,
    /// `sqrt(|D_w phi|^2 + |D_v phi|^2)`
    DPhi,
    /// `|F_vw|`
    Fvw,
    /// `sqrt(A_w^2 + A_v^2)`
    A,
    /// `|psi|` in the mode sector
    Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    V,
    W,
}

/// Nonnegative samples along a curve with the null coordinates of each sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<T> {
    pub abscissa: Abscissa,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub w: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    /// Series against `v` with `w = v - 2 rstar`.
    pub fn along_v(v: Vec<T>, y: Vec<T>, rstar: T) -> Self {
        let w = v.iter().map(|&x| x - rstar - rstar).collect();
        Self { abscissa: Abscissa::V, x: v.clone(), y, w, v }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { y: self.y.iter().map(|&y| y * s).collect(), ..self.clone() }
    }
}

/// Histories that can be traced along curves.
pub trait Traceable<T: Real> {
    fn grid(&self) -> &GridSpec<T>;
    fn cache(&self) -> &RadialCache<T>;
    fn background_m(&self) -> T;
    fn quantity(&self, q: Quantity, i: usize, j: usize) -> Result<T>;
}

impl<T: Real> Traceable<T> for FieldHistory<T> {
    fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }
    fn cache(&self) -> &RadialCache<T> {
        &self.cache
    }
    fn background_m(&self) -> T {
        self.bg.m
    }
    fn quantity(&self, q: Quantity, i: usize, j: usize) -> Result<T> {
        Ok(match q {
            Quantity::Phi => self.phi.get(i, j).norm(),
            Quantity::DPhi => (self.dw_phi.get(i, j).norm_sqr() + self.dv_phi.get(i, j).norm_sqr()).sqrt(),
            Quantity::Fvw => self.f_vw(i, j).abs(),
            Quantity::A => self.a_w(i, j).hypot(self.a_v.get(i, j)),
            Quantity::Mode => return Err(Error::Parameter("mode amplitude requires a mode history".into())),
        })
    }
}

impl<T: Real> Traceable<T> for ModeHistory<T> {
    fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }
    fn cache(&self) -> &RadialCache<T> {
        &self.cache
    }
    fn background_m(&self) -> T {
        self.bg.m
    }
    fn quantity(&self, q: Quantity, i: usize, j: usize) -> Result<T> {
        match q {
            Quantity::Mode | Quantity::Phi => Ok(self.psi.get(i, j).norm()),
            _ => Err(Error::Parameter(format!("{q:?} is not defined in the mode sector"))),
        }
    }
}

/// Samples `quantity` along `curve`.
///
/// `r = const` curves interpolate linearly in `r*` between the two node diagonals one
/// step `delta` apart that bracket the target, on common `t`-slices.
pub fn extract_series<T: Real, H: Traceable<T>>(h: &H, curve: &CurveSpec, quantity: Quantity) -> Result<TimeSeries<T>> {
    let g = h.grid();
    let (nw, nv) = (g.nw(), g.nv());
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut ws = Vec::new();
    let mut vs = Vec::new();
    let abscissa;
    match *curve {
        CurveSpec::RConst { r } => {
            abscissa = Abscissa::V;
            let bg = crate::geometry::BackgroundParams { m: h.background_m() };
            let target = tortoise(&bg, T::lit(r))?;
            let rs_min = g.rstar(nw - 1, 0);
            let half = g.delta * T::lit(0.5);
            let pos = (target - rs_min) / half;
            let dmax = nw + nv - 2;
            if pos < T::zero() || pos > T::from_usize_lossy(dmax) {
                return Err(Error::InsufficientSamples { found: 0, needed: MIN_CURVE_SAMPLES });
            }
            let mut d0 = pos.floor().to_usize().unwrap_or(0);
            if d0 + 2 > dmax {
                d0 = dmax.saturating_sub(2);
            }
            let theta = (target - (rs_min + T::from_usize_lossy(d0) * half)) / g.delta;
            // diagonal d: j - i = d - (nw - 1); nodes (i, j) and (i - 1, j + 1)
            let off = d0 as isize - (nw as isize - 1);
            for i in 1..nw {
                let j = i as isize + off;
                if j < 0 || j as usize + 1 >= nv {
                    continue;
                }
                let j = j as usize;
                let a = h.quantity(quantity, i, j)?;
                let b = h.quantity(quantity, i - 1, j + 1)?;
                let t = (g.w(i) + g.v(j)) * T::lit(0.5);
                let val = a * (T::one() - theta) + b * theta;
                x.push(t + target);
                y.push(val.abs());
                ws.push(t - target);
                vs.push(t + target);
            }
        }
        CurveSpec::WConst { w } => {
            abscissa = Abscissa::V;
            let i = g.index_w(T::lit(w)).ok_or(Error::InsufficientSamples { found: 0, needed: MIN_CURVE_SAMPLES })?;
            for j in 0..nv {
                x.push(g.v(j));
                y.push(h.quantity(quantity, i, j)?);
                ws.push(g.w(i));
                vs.push(g.v(j));
            }
        }
        CurveSpec::HorizonProxy => {
            abscissa = Abscissa::V;
            let i = nw - 1;
            for j in 0..nv {
                x.push(g.v(j));
                y.push(h.quantity(quantity, i, j)?);
                ws.push(g.w(i));
                vs.push(g.v(j));
            }
        }
        CurveSpec::VConst { v } => {
            abscissa = Abscissa::W;
            let j = g.index_v(T::lit(v)).ok_or(Error::InsufficientSamples { found: 0, needed: MIN_CURVE_SAMPLES })?;
            for i in 0..nw {
                x.push(g.w(i));
                y.push(h.quantity(quantity, i, j)?);
                ws.push(g.w(i));
                vs.push(g.v(j));
            }
        }
    }
    if x.len() < MIN_CURVE_SAMPLES {
        return Err(Error::InsufficientSamples { found: x.len(), needed: MIN_CURVE_SAMPLES });
    }
    Ok(TimeSeries { abscissa, x, y, w: ws, v: vs })
}

/// Power law `f ~ C x^{-p}` fitted on a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub p: f64,
    /// `sup f x^p` over the window.
    pub c: f64,
    pub window: [f64; 2],
    pub residual_rms: f64,
    pub samples: usize,
}

/// Default window: the later half by `log x` of the abscissa range with positive `x` from
/// the first nonzero sample on, dropping the final `exclude` samples.
pub fn default_window<T: Real>(series: &TimeSeries<T>, exclude: usize) -> Option<(f64, f64)> {
    let start = series.y.iter().position(|y| *y > T::zero())?;
    let xs: Vec<f64> = series.x[start..].iter().map(|x| x.to_f64_lossy()).filter(|&x| x > 0.0).collect();
    if xs.len() <= exclude + 2 {
        return None;
    }
    let last = xs[xs.len() - 1 - exclude];
    let first = xs[0];
    let mid = ((first.ln() + last.ln()) / 2.0).exp();
    Some((mid, last))
}

fn window_indices<T: Real>(series: &TimeSeries<T>, window: (f64, f64)) -> Vec<usize> {
    (0..series.len())
        .filter(|&k| {
            let x = series.x[k].to_f64_lossy();
            x >= window.0 && x <= window.1
        })
        .collect()
}

fn fit_points(pts: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    if pts.len() < 2 {
        return Err(Error::InsufficientSamples { found: pts.len(), needed: 2 });
    }
    for &(x, y) in pts {
        if !(y > 0.0) || !(x > 0.0) {
            return Err(Error::NonPositive { x, value: y });
        }
    }
    let n = pts.len() as f64;
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientSamples { found: 1, needed: 2 });
    }
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rms = (lx.iter().zip(&ly).map(|(a, b)| (b - (icept + slope * a)).powi(2)).sum::<f64>() / n).sqrt();
    let p = -slope;
    let c = pts.iter().map(|&(x, y)| y * x.powf(p)).fold(0.0, f64::max);
    Ok(DecayFit { p, c, window: [window.0, window.1], residual_rms: rms, samples: pts.len() })
}

/// Least squares of `log f` against `log x` on the window (default window when `None`).
pub fn fit_exponent<T: Real>(series: &TimeSeries<T>, window: Option<(f64, f64)>) -> Result<DecayFit> {
    let window = match window {
        Some(w) => w,
        None => default_window(series, DEFAULT_TAIL_EXCLUDE)
            .ok_or(Error::InsufficientSamples { found: series.len(), needed: DEFAULT_TAIL_EXCLUDE + 3 })?,
    };
    let pts: Vec<(f64, f64)> = window_indices(series, window)
        .into_iter()
        .map(|k| (series.x[k].to_f64_lossy(), series.y[k].to_f64_lossy()))
        .collect();
    fit_points(&pts, window)
}

/// Fit on the local maxima of the series inside the window (oscillating tails).
pub fn fit_exponent_envelope<T: Real>(series: &TimeSeries<T>, window: Option<(f64, f64)>) -> Result<DecayFit> {
    let window = match window {
        Some(w) => w,
        None => default_window(series, DEFAULT_TAIL_EXCLUDE)
            .ok_or(Error::InsufficientSamples { found: series.len(), needed: DEFAULT_TAIL_EXCLUDE + 3 })?,
    };
    let idx = window_indices(series, window);
    let y = |k: usize| series.y[k].to_f64_lossy();
    let pts: Vec<(f64, f64)> = idx
        .iter()
        .copied()
        .filter(|&k| k > 0 && k + 1 < series.len() && y(k) >= y(k - 1) && y(k) > y(k + 1))
        .map(|k| (series.x[k].to_f64_lossy(), y(k)))
        .collect();
    fit_points(&pts, window)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeBound {
    /// `|f| (1 + |v|)`
    OneOverV,
    /// `|f| (1 + |w|)`
    OneOverW,
    /// `|f|^2 (v+/w)^2`, samples with `w = 0` skipped
    NearHorizonWOverVplusSq,
    /// `|f|^2 / (1 + (w/v+)^2)`
    NearHorizonOffset,
}

impl EnvelopeBound {
    pub fn weight(&self, f: f64, w: f64, v: f64) -> Option<f64> {
        let vp = v.max(1.0);
        match self {
            EnvelopeBound::OneOverV => Some(f.abs() * (1.0 + v.abs())),
            EnvelopeBound::OneOverW => Some(f.abs() * (1.0 + w.abs())),
            EnvelopeBound::NearHorizonWOverVplusSq => (w != 0.0).then(|| f * f * (vp / w).powi(2)),
            EnvelopeBound::NearHorizonOffset => Some(f * f / (1.0 + (w / vp).powi(2))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub bound: EnvelopeBound,
    /// Supremum of the weighted series over the window.
    pub c_min: f64,
    /// Supremum over the first two thirds of the window.
    pub c_two_thirds: f64,
    pub stabilized: bool,
    pub window: [f64; 2],
}

/// Envelope constant over the whole series.
pub fn check_envelope<T: Real>(series: &TimeSeries<T>, bound: EnvelopeBound) -> EnvelopeCheck {
    let lo = series.x.first().map(|x| x.to_f64_lossy()).unwrap_or(0.0);
    let hi = series.x.last().map(|x| x.to_f64_lossy()).unwrap_or(0.0);
    check_envelope_in(series, bound, (lo, hi), DEFAULT_STABILISATION_TOL)
}

/// Envelope constant on a window of the abscissa.
///
/// Stabilised when the supremum over the whole window exceeds the supremum over its first
/// two thirds by at most the relative tolerance.
pub fn check_envelope_in<T: Real>(
    series: &TimeSeries<T>,
    bound: EnvelopeBound,
    window: (f64, f64),
    tol: f64,
) -> EnvelopeCheck {
    let split = window.0 + (window.1 - window.0) * 2.0 / 3.0;
    let mut all = 0.0f64;
    let mut early = 0.0f64;
    for k in 0..series.len() {
        let x = series.x[k].to_f64_lossy();
        if x < window.0 || x > window.1 {
            continue;
        }
        let f = series.y[k].to_f64_lossy();
        if let Some(g) = bound.weight(f, series.w[k].to_f64_lossy(), series.v[k].to_f64_lossy()) {
            all = all.max(g);
            if x <= split {
                early = early.max(g);
            }
        }
    }
    let stabilized = all <= early * (1.0 + tol) || all == 0.0;
    EnvelopeCheck { bound, c_min: all, c_two_thirds: early, stabilized, window: [window.0, window.1] }
}
