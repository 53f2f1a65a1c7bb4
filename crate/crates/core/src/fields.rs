//! Matter content: complex scalar, U(1) gauge field, covariant derivative,
//! charge current and the admissible scalar potentials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{d_dv, d_dw, NodeArray};
use crate::scalar::{Real, C};

/// `|phi|` below which a Toda derivative evaluation is flagged.
pub const TODA_FLAG_RADIUS: f64 = 1e-12;

/// Scalar self-interaction `P(|phi|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec<T> {
    /// `c1 |phi|^2`
    Mass { c1: T },
    /// `c2 |phi|^4`
    Quartic { c2: T },
    /// `c3 (1 - cos(eta |phi|))`
    SineGordon { c3: T, eta: T },
    /// `c4 exp(-lambda |phi|)`
    Toda { c4: T, lambda: T },
}

impl<T: Real> PotentialSpec<T> {
    pub fn massless() -> Self {
        PotentialSpec::Mass { c1: T::zero() }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, c: T| {
            if c >= T::zero() && c.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("potential coefficient {name} must be >= 0, got {c}")))
            }
        };
        match *self {
            PotentialSpec::Mass { c1 } => nonneg("c1", c1),
            PotentialSpec::Quartic { c2 } => nonneg("c2", c2),
            PotentialSpec::SineGordon { c3, eta } => {
                nonneg("c3", c3)?;
                if eta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Parameter("eta must be finite".into()))
                }
            }
            PotentialSpec::Toda { c4, lambda } => {
                nonneg("c4", c4)?;
                if lambda > T::zero() && lambda.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")))
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::Mass { .. } => "mass",
            PotentialSpec::Quartic { .. } => "quartic",
            PotentialSpec::SineGordon { .. } => "sine_gordon",
            PotentialSpec::Toda { .. } => "toda",
        }
    }

    /// True when `P(0) = 0`, so that the zero field is a solution.
    pub fn vanishes_at_origin(&self) -> bool {
        !matches!(self, PotentialSpec::Toda { c4, .. } if *c4 != T::zero())
    }

    /// True when all tails are expected to oscillate (massive fields).
    pub fn is_massive(&self) -> bool {
        match *self {
            PotentialSpec::Mass { c1 } => c1 > T::zero(),
            PotentialSpec::SineGordon { c3, eta } => c3 * eta * eta > T::zero(),
            _ => false,
        }
    }
}

/// `P(|phi|)`.
pub fn potential_value<T: Real>(spec: &PotentialSpec<T>, phi: C<T>) -> T {
    let a = phi.norm();
    match *spec {
        PotentialSpec::Mass { c1 } => c1 * a * a,
        PotentialSpec::Quartic { c2 } => {
            let a2 = a * a;
            c2 * a2 * a2
        }
        PotentialSpec::SineGordon { c3, eta } => c3 * (T::one() - (eta * a).cos()),
        PotentialSpec::Toda { c4, lambda } => c4 * (-lambda * a).exp(),
    }
}

/// Derivative of `P` along `|phi|`.
pub fn potential_radial_derivative<T: Real>(spec: &PotentialSpec<T>, modulus: T) -> T {
    let a = modulus;
    let two = T::lit(2.0);
    match *spec {
        PotentialSpec::Mass { c1 } => two * c1 * a,
        PotentialSpec::Quartic { c2 } => T::lit(4.0) * c2 * a * a * a,
        PotentialSpec::SineGordon { c3, eta } => c3 * eta * (eta * a).sin(),
        PotentialSpec::Toda { c4, lambda } => -lambda * c4 * (-lambda * a).exp(),
    }
}

/// `dP/d(conj phi) = P'(|phi|) phi / (2|phi|)`.
///
/// The Toda branch is discontinuous at the origin and returns 0 there.
pub fn potential_derivative<T: Real>(spec: &PotentialSpec<T>, phi: C<T>) -> C<T> {
    match *spec {
        PotentialSpec::Mass { c1 } => phi * c1,
        PotentialSpec::Quartic { c2 } => phi * (T::lit(2.0) * c2 * phi.norm_sqr()),
        PotentialSpec::SineGordon { c3, eta } => {
            let x = eta * phi.norm();
            let sinc = if x.abs() < T::lit(1e-4) { T::one() - x * x / T::lit(6.0) } else { x.sin() / x };
            phi * (c3 * eta * eta * sinc / T::lit(2.0))
        }
        PotentialSpec::Toda { c4, lambda } => {
            let a = phi.norm();
            if a == T::zero() {
                C::new(T::zero(), T::zero())
            } else {
                phi * (-(lambda * c4 / T::lit(2.0)) * (-lambda * a).exp() / a)
            }
        }
    }
}

/// True when a Toda derivative evaluation at `phi` falls in the flagged neighbourhood of 0.
pub fn toda_flagged<T: Real>(spec: &PotentialSpec<T>, phi: C<T>) -> bool {
    matches!(spec, PotentialSpec::Toda { .. }) && phi.norm() < T::lit(TODA_FLAG_RADIUS)
}

/// `d_phi - i A phi`.
pub fn covariant_derivative<T: Real>(d_phi: C<T>, a: T, phi: C<T>) -> C<T> {
    d_phi - C::new(T::zero(), a) * phi
}

/// `-i (D phi conj(phi) - phi conj(D phi)) = 2 Im(conj(phi) D phi)`.
///
/// With this orientation the Gauss law reads `d_w Q = r^2 j_w`, `d_v Q = -r^2 j_v`,
/// and positive `Q` means positive `F_vw`.
pub fn current_density<T: Real>(phi: C<T>, d_phi: C<T>) -> T {
    T::lit(2.0) * (phi.conj() * d_phi).im
}

/// Field content at one node, in the null frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldSample<T> {
    pub phi: C<T>,
    pub a_w: T,
    pub a_v: T,
    pub f_vw: T,
    pub dw_phi: C<T>,
    pub dv_phi: C<T>,
}

impl<T: Real> FieldSample<T> {
    pub fn vacuum() -> Self {
        Self {
            phi: C::new(T::zero(), T::zero()),
            a_w: T::zero(),
            a_v: T::zero(),
            f_vw: T::zero(),
            dw_phi: C::new(T::zero(), T::zero()),
            dv_phi: C::new(T::zero(), T::zero()),
        }
    }

    /// Gauge transform by `chi` with partials `(chi_w, chi_v)`: `phi -> e^{i chi} phi`, `A -> A + d chi`.
    pub fn gauge_transform(&self, chi: T, chi_w: T, chi_v: T) -> Self {
        let u = C::new(chi.cos(), chi.sin());
        Self {
            phi: self.phi * u,
            a_w: self.a_w + chi_w,
            a_v: self.a_v + chi_v,
            f_vw: self.f_vw,
            dw_phi: self.dw_phi * u,
            dv_phi: self.dv_phi * u,
        }
    }
}

/// Second-order discrete `F_vw = d_v A_w - d_w A_v` on a node array.
pub fn field_strength<T: Real>(a_w: &NodeArray<T>, a_v: &NodeArray<T>, delta: T) -> Result<NodeArray<T>> {
    if a_w.nw() < 2 || a_w.nv() < 2 {
        return Err(Error::GridTooSmall(format!("{}x{} nodes", a_w.nw(), a_w.nv())));
    }
    if a_w.nw() != a_v.nw() || a_w.nv() != a_v.nv() {
        return Err(Error::GridTooSmall("A_w and A_v shapes differ".into()));
    }
    let dv_aw = d_dv(a_w, delta);
    let dw_av = d_dw(a_v, delta);
    Ok(NodeArray::from_fn(a_w.nw(), a_w.nv(), |i, j| dv_aw.get(i, j) - dw_av.get(i, j)))
}
