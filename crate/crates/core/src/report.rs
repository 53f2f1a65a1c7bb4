//! Energy reports and the composite energies built from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Functional {
    #[serde(rename = "E_t")]
    ETime,
    #[serde(rename = "E_t_reduced")]
    ETimeReduced,
    #[serde(rename = "E_K")]
    EK,
    #[serde(rename = "E_G")]
    EG,
    #[serde(rename = "E_H")]
    EH,
    #[serde(rename = "E_sharp")]
    ESharp,
    #[serde(rename = "J_K")]
    JK,
    #[serde(rename = "J_G")]
    JG,
    #[serde(rename = "I_H")]
    IH,
    #[serde(rename = "E_MH")]
    EMH,
    #[serde(rename = "E_MH_hat")]
    EMHHat,
    E1,
    E2,
    E3,
    E4,
}

impl Functional {
    pub fn as_str(&self) -> &'static str {
        match self {
            Functional::ETime => "E_t",
            Functional::ETimeReduced => "E_t_reduced",
            Functional::EK => "E_K",
            Functional::EG => "E_G",
            Functional::EH => "E_H",
            Functional::ESharp => "E_sharp",
            Functional::JK => "J_K",
            Functional::JG => "J_G",
            Functional::IH => "I_H",
            Functional::EMH => "E_MH",
            Functional::EMHHat => "E_MH_hat",
            Functional::E1 => "E1",
            Functional::E2 => "E2",
            Functional::E3 => "E3",
            Functional::E4 => "E4",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a reported value was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    TimeSlice {
        t: f64,
    },
    WSegment {
        w: f64,
        v_lo: f64,
        v_hi: f64,
    },
    VSegment {
        v: f64,
        w_lo: f64,
        w_hi: f64,
    },
    Region {
        w_lo: f64,
        w_hi: f64,
        v_lo: f64,
        v_hi: f64,
    },
    /// Composite evaluated at the point `(w, v)` from constituents at `t0`.
    Point {
        w: f64,
        v: f64,
        t0: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEntry {
    pub functional: Functional,
    pub location: Location,
    /// `[time commutations, angular commutations]`.
    pub commutation: [u32; 2],
    /// Integrated `r*` range.
    pub domain: [f64; 2],
    pub value: f64,
    pub clipped: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyReport {
    pub entries: Vec<EnergyEntry>,
}

impl EnergyReport {
    pub fn push(&mut self, e: EnergyEntry) {
        self.entries.push(e);
    }

    pub fn find(&self, functional: Functional, commutation: [u32; 2]) -> impl Iterator<Item = &EnergyEntry> {
        self.entries.iter().filter(move |e| e.functional == functional && e.commutation == commutation)
    }

    pub fn values(&self, functional: Functional) -> Vec<f64> {
        self.entries.iter().filter(|e| e.functional == functional && e.commutation == [0, 0]).map(|e| e.value).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompositeKind {
    #[serde(rename = "E_MH")]
    EMH,
    #[serde(rename = "E_MH_hat")]
    EMHHat,
    E1,
    E2,
    E3,
    E4,
}

impl CompositeKind {
    pub fn functional(&self) -> Functional {
        match self {
            CompositeKind::EMH => Functional::EMH,
            CompositeKind::EMHHat => Functional::EMHHat,
            CompositeKind::E1 => Functional::E1,
            CompositeKind::E2 => Functional::E2,
            CompositeKind::E3 => Functional::E3,
            CompositeKind::E4 => Functional::E4,
        }
    }

    pub const ALL: [CompositeKind; 6] = [
        CompositeKind::EMH,
        CompositeKind::EMHHat,
        CompositeKind::E1,
        CompositeKind::E2,
        CompositeKind::E3,
        CompositeKind::E4,
    ];
}

/// Context a composite needs besides the constituents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeContext {
    /// Angular eigenweight `l(l + 1)` (0 in the spherically symmetric sector).
    pub angular_weight: f64,
    /// Whether the angular-commuted constituents vanish identically.
    pub spherical: bool,
    pub quartic: bool,
    /// Evaluation point of the `(w/v+)^2` weight in `E4`.
    pub w: f64,
    pub v: f64,
}

/// Looks up `functional` with commutation `[i, j]` among the `t0` constituents.
fn constituent(entries: &[EnergyEntry], ctx: &CompositeContext, functional: Functional, i: u32, j: u32) -> Result<f64> {
    if ctx.spherical && j > 0 {
        return Ok(0.0);
    }
    entries
        .iter()
        .find(|e| e.functional == functional && e.commutation == [i, j])
        .map(|e| e.value)
        .ok_or_else(|| Error::MissingConstituent(format!("{functional}[{i},{j}]")))
}

/// Evaluates a composite from constituent energies taken at `t0`.
///
/// Angular commutations `r^j (L)^j` are constituents with `commutation = [i, j]`; sums of
/// `L_{Omega_j}` commutators over the three rotation fields contribute powers of the
/// eigenweight `L = l(l + 1)`.
pub fn composite_energy(entries: &[EnergyEntry], kind: CompositeKind, ctx: &CompositeContext) -> Result<f64> {
    let c = |f, i, j| constituent(entries, ctx, f, i, j);
    let l = ctx.angular_weight;
    let e_mh = || -> Result<f64> {
        let et = c(Functional::ETime, 0, 0)?;
        let ek = c(Functional::EK, 0, 0)?;
        Ok(et * (27.0 + 9.0 * l + 3.0 * l * l + l * l * l) + ek * (9.0 + 3.0 * l + l * l))
    };
    let e1 = || -> Result<f64> {
        let mut s = 0.0;
        for j in 0..=6 {
            s += c(Functional::ETime, 0, j)?;
        }
        for j in 0..=5 {
            s += c(Functional::EK, 0, j)?;
        }
        for j in 1..=3 {
            s += c(Functional::ESharp, 0, j)?;
        }
        Ok(s.max(0.0).sqrt())
    };
    let e3 = || -> Result<f64> {
        let poly = 1.0 + l + l * l;
        let et = c(Functional::ETime, 0, 0)?;
        let es = c(Functional::ESharp, 0, 0)?;
        Ok((et.abs() * poly + es * poly + e_mh()?).max(0.0).sqrt())
    };
    match kind {
        CompositeKind::EMH => e_mh(),
        CompositeKind::EMHHat => {
            let mut s = 0.0;
            for i in 0..=1 {
                for j in 0..=5 {
                    s += c(Functional::ETime, i, j)?;
                }
                for j in 0..=4 {
                    s += c(Functional::EK, i, j)?;
                }
            }
            Ok(s + c(Functional::ETime, 0, 6)? + c(Functional::EK, 0, 5)?)
        }
        CompositeKind::E1 => e1(),
        CompositeKind::E2 => {
            let ef = e1()?;
            let mut s = ef * ef;
            for i in 0..=1 {
                for j in 1..=2 {
                    s += c(Functional::ESharp, i, j)?;
                }
            }
            s += c(Functional::ESharp, 0, 3)?;
            Ok(s.max(0.0).sqrt())
        }
        CompositeKind::E3 => e3(),
        CompositeKind::E4 => {
            let e = e3()?;
            let vp = ctx.v.max(1.0);
            let wt = (ctx.w / vp).powi(2) * e;
            Ok(if ctx.quartic { wt + e.powi(7) + e.powi(4) + e.powi(3) + e } else { wt + e + 1.0 })
        }
    }
}
