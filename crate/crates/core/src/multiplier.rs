//! Multiplier vector fields, their radial profiles, cut-offs and the admissibility
//! conditions on the red-shift profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lapse, radius_from_tortoise, tortoise, BackgroundParams};
use crate::scalar::Real;
use crate::stress::NullVector;

/// `S(u) = 35u^4 - 84u^5 + 70u^6 - 20u^7`, a C^3 step from 0 to 1 on `[0, 1]`.
pub fn smooth_step<T: Real>(u: T) -> T {
    if u <= T::zero() {
        return T::zero();
    }
    if u >= T::one() {
        return T::one();
    }
    let u4 = u * u * u * u;
    u4 * (T::lit(35.0) + u * (T::lit(-84.0) + u * (T::lit(70.0) + u * T::lit(-20.0))))
}

/// `S'(u)`.
pub fn smooth_step_derivative<T: Real>(u: T) -> T {
    if u <= T::zero() || u >= T::one() {
        return T::zero();
    }
    let u3 = u * u * u;
    u3 * (T::lit(140.0) + u * (T::lit(-420.0) + u * (T::lit(420.0) + u * T::lit(-140.0))))
}

/// `int_0^u S`.
fn smooth_step_integral<T: Real>(u: T) -> T {
    if u <= T::zero() {
        return T::zero();
    }
    if u >= T::one() {
        return T::lit(0.5) + (u - T::one());
    }
    let u5 = u * u * u * u * u;
    u5 * (T::lit(7.0) + u * (T::lit(-14.0) + u * (T::lit(10.0) + u * T::lit(-2.5))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    Sharp,
    Smooth,
}

/// Indicator of `[lo, hi]` in `r*`; the smooth kind ramps over `width` on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec<T> {
    pub kind: CutoffKind,
    pub lo: T,
    pub hi: T,
    pub width: T,
}

impl<T: Real> CutoffSpec<T> {
    /// One on `[-1, 1]`, zero outside `[-3/2, 3/2]`.
    pub fn unit_smooth() -> Self {
        Self { kind: CutoffKind::Smooth, lo: -T::one(), hi: T::one(), width: T::lit(0.5) }
    }

    fn ramp(&self) -> T {
        match self.kind {
            CutoffKind::Sharp => T::zero(),
            CutoffKind::Smooth => self.width,
        }
    }

    pub fn value(&self, x: T) -> T {
        let d = self.ramp();
        if x >= self.lo && x <= self.hi {
            return T::one();
        }
        if d == T::zero() {
            return T::zero();
        }
        if x < self.lo {
            smooth_step((x - (self.lo - d)) / d)
        } else {
            smooth_step(((self.hi + d) - x) / d)
        }
    }

    pub fn derivative(&self, x: T) -> T {
        let d = self.ramp();
        if d == T::zero() || (x >= self.lo && x <= self.hi) {
            return T::zero();
        }
        if x < self.lo {
            smooth_step_derivative((x - (self.lo - d)) / d) / d
        } else {
            -smooth_step_derivative(((self.hi + d) - x) / d) / d
        }
    }

    /// `int_{-inf}^x chi`.
    pub fn integral(&self, x: T) -> T {
        let d = self.ramp();
        let left = if d == T::zero() { T::zero() } else { d * smooth_step_integral(T::one()) };
        if d == T::zero() {
            return (x.min(self.hi) - self.lo).max(T::zero());
        }
        if x <= self.lo {
            return d * smooth_step_integral((x - (self.lo - d)) / d);
        }
        if x <= self.hi {
            return left + (x - self.lo);
        }
        let core = self.hi - self.lo;
        let u = ((x - self.hi) / d).min(T::one());
        // int_0^u S(1 - s) ds = u - int_0^u S(s)... by symmetry S(1 - s) = 1 - S(s)
        left + core + d * (u - smooth_step_integral(u))
    }
}

/// Scalar profile `f(r*)` or `h(r*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile<T> {
    Zero,
    Constant {
        value: T,
    },
    /// `slope r* + offset`
    Linear {
        slope: T,
        offset: T,
    },
    /// The cut-off itself.
    Cutoff {
        cutoff: CutoffSpec<T>,
    },
    /// `int chi dr*`.
    CutoffIntegral {
        cutoff: CutoffSpec<T>,
    },
    /// `amplitude r / r1` for `r <= r1`, tapered to zero at `r = 1.2 r1` by a C^3 step.
    Redshift {
        amplitude: T,
        r1: T,
    },
}

impl<T: Real> Profile<T> {
    /// Default red-shift profile for the support window of `r1`.
    pub fn redshift(amplitude: T, r1: T) -> Self {
        Profile::Redshift { amplitude, r1 }
    }

    /// Value and `d/dr*` at a point with tortoise coordinate `rstar` and radius `r`.
    pub fn eval(&self, bg: &BackgroundParams<T>, rstar: T, r: T) -> (T, T) {
        match *self {
            Profile::Zero => (T::zero(), T::zero()),
            Profile::Constant { value } => (value, T::zero()),
            Profile::Linear { slope, offset } => (slope * rstar + offset, slope),
            Profile::Cutoff { cutoff } => (cutoff.value(rstar), cutoff.derivative(rstar)),
            Profile::CutoffIntegral { cutoff } => (cutoff.integral(rstar), cutoff.value(rstar)),
            Profile::Redshift { amplitude, r1 } => {
                let r2 = T::lit(1.2) * r1;
                if r >= r2 {
                    return (T::zero(), T::zero());
                }
                let omega = if bg.is_flat() { T::one() } else { T::one() - T::lit(2.0) * bg.m / r };
                let base = amplitude * r / r1;
                let dbase = amplitude * omega / r1;
                if r <= r1 {
                    return (base, dbase);
                }
                let s1 = tortoise(bg, r1).unwrap_or(r1);
                let s2 = tortoise(bg, r2).unwrap_or(r2);
                let span = s2 - s1;
                let u = (rstar - s1) / span;
                let keep = T::one() - smooth_step(u);
                (base * keep, dbase * keep - base * smooth_step_derivative(u) / span)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSpec<T> {
    /// `d_w + d_v`
    TimeT,
    /// `-w^2 d_w - v^2 d_v`
    MorawetzK,
    /// `-f d_w + f d_v`
    RadialG { profile: Profile<T> },
    /// `-(h/(1 - mu)) d_w - h d_v`
    RedshiftH { profile: Profile<T> },
}

impl<T: Real> MultiplierSpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            MultiplierSpec::TimeT => "T",
            MultiplierSpec::MorawetzK => "K",
            MultiplierSpec::RadialG { .. } => "G",
            MultiplierSpec::RedshiftH { .. } => "H",
        }
    }

    /// Components and partials at `(w, v)` with radius `r` and lapse `omega`.
    pub fn at(&self, bg: &BackgroundParams<T>, w: T, v: T, r: T, omega: T) -> NullVector<T> {
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let rstar = (v - w) * half;
        match self {
            MultiplierSpec::TimeT => NullVector { a: T::one(), b: T::one(), ..Default::default() },
            MultiplierSpec::MorawetzK => {
                NullVector { a: -w * w, b: -v * v, a_w: -two * w, b_v: -two * v, ..Default::default() }
            }
            MultiplierSpec::RadialG { profile } => {
                let (f, df) = profile.eval(bg, rstar, r);
                let g = df * half;
                NullVector { a: -f, b: f, a_w: g, a_v: -g, b_w: -g, b_v: g }
            }
            MultiplierSpec::RedshiftH { profile } => {
                let (h, dh) = profile.eval(bg, rstar, r);
                let g = dh * half;
                let c = h * bg.m / (r * r * omega);
                NullVector { a: -h / omega, b: -h, a_w: g / omega - c, a_v: -g / omega + c, b_w: g, b_v: -g }
            }
        }
    }
}

/// `t`-coefficient of the `F_vw^2/(1 - mu)^2` term of the K deformation contraction,
/// divided by `2t`: `4 + 2 (3 mu - 2) r*/r`.
pub fn morawetz_maxwell_factor<T: Real>(bg: &BackgroundParams<T>, r: T) -> Result<T> {
    let mu = T::lit(2.0) * bg.m / r;
    Ok(T::lit(4.0) + T::lit(2.0) * (T::lit(3.0) * mu - T::lit(2.0)) * tortoise(bg, r)? / r)
}

/// Variant with coefficient 1 on the `r*` term:
/// `4 + (3 mu - 2) r*/r`.
pub fn morawetz_maxwell_factor_unit<T: Real>(bg: &BackgroundParams<T>, r: T) -> Result<T> {
    let mu = T::lit(2.0) * bg.m / r;
    Ok(T::lit(4.0) + (T::lit(3.0) * mu - T::lit(2.0)) * tortoise(bg, r)? / r)
}

/// Sign structure of a radial factor sampled on `(2m, r_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignStructure {
    /// Maximal intervals in `r` where the factor is positive, with bisected end points.
    pub positive_intervals: Vec<(f64, f64)>,
    /// Whether the factor is negative at both ends of the sampled range.
    pub negative_at_ends: bool,
    pub samples: usize,
}

impl SignStructure {
    /// Exactly one positive interval, bounded away from the sampled ends.
    pub fn is_bounded_positive_interval(&self) -> bool {
        self.positive_intervals.len() == 1 && self.negative_at_ends
    }
}

/// Samples `factor` on `r` in `(2m, r_max]` uniformly in `r*` and bisects sign changes.
pub fn sign_structure(
    bg: &BackgroundParams<f64>,
    factor: impl Fn(f64) -> f64,
    rstar_min: f64,
    r_max: f64,
    samples: usize,
) -> Result<SignStructure> {
    let s_hi = tortoise(bg, r_max)?;
    let r_of = |s: f64| radius_from_tortoise(bg, s);
    let mut intervals = Vec::new();
    let mut prev_s = rstar_min;
    let mut prev = factor(r_of(prev_s)?);
    let first = prev;
    let mut open: Option<f64> = if prev > 0.0 { Some(r_of(prev_s)?) } else { None };
    let bisect = |mut a: f64, mut b: f64| -> Result<f64> {
        let fa = factor(r_of(a)?);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if (factor(r_of(mid)?) > 0.0) == (fa > 0.0) {
                a = mid;
            } else {
                b = mid;
            }
        }
        r_of(0.5 * (a + b))
    };
    for k in 1..=samples {
        let s = rstar_min + (s_hi - rstar_min) * k as f64 / samples as f64;
        let val = factor(r_of(s)?);
        if (val > 0.0) != (prev > 0.0) {
            let root = bisect(prev_s, s)?;
            if val > 0.0 {
                open = Some(root);
            } else if let Some(lo) = open.take() {
                intervals.push((lo, root));
            }
        }
        prev = val;
        prev_s = s;
    }
    if let Some(lo) = open {
        intervals.push((lo, r_max));
    }
    Ok(SignStructure { positive_intervals: intervals, negative_at_ends: first < 0.0 && prev < 0.0, samples })
}

/// Per-condition outcome of [`check_h_admissible`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub holds: bool,
    /// Minimum of the condition's left-hand side over the samples.
    pub worst_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HAdmissibility {
    /// `h >= 0`
    pub h1: Condition,
    /// `h' >= 0`
    pub h2: Condition,
    /// `mu h / r - h' >= 0`
    pub h3: Condition,
    /// `3h/r - h'/(1 - mu) >= 0`
    pub h4: Condition,
    /// `h` vanishes for `r > 1.2 r1`.
    pub support: bool,
    pub samples: usize,
}

impl HAdmissibility {
    pub fn all_hold(&self) -> bool {
        self.h1.holds && self.h2.holds && self.h3.holds && self.h4.holds && self.support
    }

    pub fn strictly_positive(&self) -> bool {
        self.all_hold()
            && self.h1.worst_margin > 0.0
            && self.h2.worst_margin > 0.0
            && self.h3.worst_margin > 0.0
            && self.h4.worst_margin > 0.0
    }
}

/// Checks that `r1` satisfies `2m < r1` and `1.2 r1 < 3m`.
pub fn check_r1_window<T: Real>(bg: &BackgroundParams<T>, r1: T) -> Result<()> {
    if r1 > bg.horizon() && T::lit(1.2) * r1 < bg.photon_sphere() {
        Ok(())
    } else {
        Err(Error::SupportWindow { r1: r1.to_f64_lossy(), m: bg.m.to_f64_lossy() })
    }
}

/// Evaluates the four conditions on `r <= r1` and the support condition beyond `r1`.
///
/// Samples are uniform in `r*` on `[r*(r1) - 40m, r*(r1)]` and on `(r*(r1), r*(3m)]`.
pub fn check_h_admissible(profile: &Profile<f64>, bg: &BackgroundParams<f64>, r1: f64) -> Result<HAdmissibility> {
    check_r1_window(bg, r1)?;
    let n = 4000;
    let s1 = tortoise(bg, r1)?;
    let s0 = s1 - 40.0 * bg.m;
    let mut m = [f64::INFINITY; 4];
    for k in 0..=n {
        let s = s0 + (s1 - s0) * k as f64 / n as f64;
        let r = radius_from_tortoise(bg, s)?.min(r1);
        let om = lapse(bg, r)?;
        let mu = 1.0 - om;
        let (h, dh) = profile.eval(bg, s, r);
        let vals = [h, dh, mu * h / r - dh, 3.0 * h / r - dh / om];
        for (slot, v) in m.iter_mut().zip(vals) {
            *slot = slot.min(v);
        }
    }
    let s3 = tortoise(bg, 3.0 * bg.m)?;
    let mut support = true;
    for k in 1..=n {
        let s = s1 + (s3 - s1) * k as f64 / n as f64;
        let r = radius_from_tortoise(bg, s)?;
        if r > 1.2 * r1 && profile.eval(bg, s, r).0 != 0.0 {
            support = false;
        }
    }
    let cond = |x: f64| Condition { holds: x >= 0.0, worst_margin: x };
    Ok(HAdmissibility { h1: cond(m[0]), h2: cond(m[1]), h3: cond(m[2]), h4: cond(m[3]), support, samples: 2 * n + 1 })
}
