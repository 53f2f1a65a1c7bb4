//! Flat dotted-key run configuration.
//!
//! One `key = value` per line, `#` starts a comment. Every key has a default; unknown and
//! duplicate keys are errors reported with their line number.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decay::CurveSpec;
use crate::error::{Error, Result};
use crate::evolution::{Fault, SchemeOptions};
use crate::fields::PotentialSpec;
use crate::geometry::{tortoise, BackgroundParams};
use crate::grid::GridSpec;
use crate::initial::{GaugeSpec, InitialData, ProfileKind};
use crate::modes::ModeSpec;
use crate::multiplier::{check_r1_window, CutoffKind, CutoffSpec, MultiplierSpec, Profile};

/// Keys in canonical order with their defaults.
const KEYS: &[(&str, &str)] = &[
    ("run.id", "run"),
    ("background.m", "1"),
    ("grid.w0", "0"),
    ("grid.w1", "20"),
    ("grid.v0", "0"),
    ("grid.v1", "30"),
    ("grid.delta", "0.125"),
    ("grid.min_lapse", "0.000001"),
    ("sector", "nonlinear"),
    ("mode.s", "0"),
    ("mode.l", "0"),
    ("data.profile", "bump"),
    ("data.amplitude", "0.05"),
    ("data.center", "6"),
    ("data.width", "3"),
    ("data.frequency", "0"),
    ("data.charge", "0"),
    ("gauge.amplitude", "0"),
    ("gauge.kw", "0"),
    ("gauge.kv", "0"),
    ("potential.kind", "mass"),
    ("potential.c", "0"),
    ("potential.eta", "1"),
    ("potential.lambda", "1"),
    ("multiplier.h.enabled", "true"),
    ("multiplier.h.r1", "2.4"),
    ("multiplier.h.amplitude", "1"),
    ("multiplier.g.cutoff", "smooth"),
    ("multiplier.g.lo", "auto"),
    ("multiplier.g.hi", "auto"),
    ("multiplier.g.width", "0.5"),
    ("ladder.t0", "auto"),
    ("ladder.ratio", "1.1"),
    ("diagnostics.rstar_lo", "auto"),
    ("diagnostics.rstar_hi", "auto"),
    ("curves", "r:4, r:2.5, horizon"),
    ("fit.exclude_tail", "5"),
    ("fit.envelope_maxima", "auto"),
    ("envelope.tolerance", "0.1"),
    ("invariants.drift_tol", "0.01"),
    ("scheme.fault", "none"),
    ("scheme.corrector_passes", "2"),
    ("output.dir", "out"),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sector {
    Nonlinear,
    Mode { s: u32, l: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Toggle {
    Auto,
    On,
    Off,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub run_id: String,
    pub background: BackgroundParams<f64>,
    pub grid: GridSpec<f64>,
    pub min_lapse: f64,
    pub sector: Sector,
    pub data: InitialData<f64>,
    pub gauge: GaugeSpec<f64>,
    /// `None` means no potential in the mode sector and a massless field otherwise.
    pub potential: Option<PotentialSpec<f64>>,
    pub h_enabled: bool,
    pub h_r1: f64,
    pub h_amplitude: f64,
    pub g_cutoff: CutoffSpec<f64>,
    pub ladder_t0: Option<f64>,
    pub ladder_ratio: f64,
    pub rstar_domain: (Option<f64>, Option<f64>),
    pub curves: Vec<CurveSpec>,
    pub fit_exclude_tail: usize,
    pub fit_envelope_maxima: Toggle,
    pub envelope_tolerance: f64,
    pub drift_tol: f64,
    pub fault: Fault,
    pub corrector_passes: usize,
    pub output_dir: String,
    /// Resolved key-value pairs in canonical order.
    canonical: Vec<(String, String)>,
}

fn parse_lines(text: &str) -> Result<BTreeMap<String, (String, usize)>> {
    let known: BTreeMap<&str, ()> = KEYS.iter().map(|(k, _)| (*k, ())).collect();
    let mut out: BTreeMap<String, (String, usize)> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| Error::ConfigParse { line, message: format!("expected `key = value`, found `{body}`") })?;
        let key = k.trim().to_string();
        let mut value = v.trim();
        if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value = &value[1..value.len() - 1];
        }
        if key.is_empty() {
            return Err(Error::ConfigParse { line, message: "empty key".into() });
        }
        if !known.contains_key(key.as_str()) {
            return Err(Error::ConfigParse { line, message: format!("unknown key `{key}`") });
        }
        if let Some((_, first)) = out.get(&key) {
            return Err(Error::ConfigParse {
                line,
                message: format!("duplicate key `{key}` (first set on line {first})"),
            });
        }
        out.insert(key, (value.to_string(), line));
    }
    Ok(out)
}

struct Reader {
    values: BTreeMap<String, String>,
}

impl Reader {
    fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).expect("all keys have defaults")
    }

    fn err(key: &str, message: impl Into<String>) -> Error {
        Error::ConfigValue { key: key.into(), message: message.into() }
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let s = self.raw(key);
        let x: f64 = s.parse().map_err(|_| Self::err(key, format!("expected a number, found `{s}`")))?;
        if !x.is_finite() {
            return Err(Self::err(key, "must be finite"));
        }
        Ok(x)
    }

    fn auto_f64(&self, key: &str) -> Result<Option<f64>> {
        if self.raw(key) == "auto" {
            Ok(None)
        } else {
            self.f64(key).map(Some)
        }
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let s = self.raw(key);
        s.parse().map_err(|_| Self::err(key, format!("expected a nonnegative integer, found `{s}`")))
    }

    fn bool(&self, key: &str) -> Result<bool> {
        match self.raw(key) {
            "true" | "yes" | "on" => Ok(true),
            "false" | "no" | "off" => Ok(false),
            s => Err(Self::err(key, format!("expected true/false, found `{s}`"))),
        }
    }
}

fn parse_curves(s: &str) -> Result<Vec<CurveSpec>> {
    let bad = |item: &str| Reader::err("curves", format!("cannot parse `{item}` (use r:<r>, w:<w>, v:<v> or horizon)"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        if item == "horizon" {
            out.push(CurveSpec::HorizonProxy);
            continue;
        }
        let (k, v) = item.split_once(':').ok_or_else(|| bad(item))?;
        let x: f64 = v.trim().parse().map_err(|_| bad(item))?;
        out.push(match k.trim() {
            "r" => CurveSpec::RConst { r: x },
            "w" => CurveSpec::WConst { w: x },
            "v" => CurveSpec::VConst { v: x },
            _ => return Err(bad(item)),
        });
    }
    Ok(out)
}

fn canonical_number(s: &str) -> String {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => format!("{x}"),
        _ => s.to_string(),
    }
}

/// Parses and validates a configuration text.
pub fn load_config(text: &str) -> Result<RunConfig> {
    let given = parse_lines(text)?;
    let mut values = BTreeMap::new();
    for (k, d) in KEYS {
        let v = given.get(*k).map(|(v, _)| v.clone()).unwrap_or_else(|| d.to_string());
        values.insert(k.to_string(), v);
    }
    let rd = Reader { values };

    let m = rd.f64("background.m")?;
    let background = BackgroundParams::new(m).map_err(|e| Reader::err("background.m", e.to_string()))?;
    let grid = GridSpec::new(
        rd.f64("grid.w0")?,
        rd.f64("grid.w1")?,
        rd.f64("grid.v0")?,
        rd.f64("grid.v1")?,
        rd.f64("grid.delta")?,
    )
    .map_err(|e| Reader::err("grid", e.to_string()))?;
    let min_lapse = rd.f64("grid.min_lapse")?;

    let sector = match rd.raw("sector") {
        "nonlinear" => Sector::Nonlinear,
        "mode" => Sector::Mode { s: rd.usize("mode.s")? as u32, l: rd.usize("mode.l")? as u32 },
        s => return Err(Reader::err("sector", format!("expected nonlinear or mode, found `{s}`"))),
    };

    let profile = match rd.raw("data.profile") {
        "bump" | "compact_bump" => ProfileKind::CompactBump,
        "gaussian" => ProfileKind::Gaussian,
        "zero" => ProfileKind::Zero,
        s => return Err(Reader::err("data.profile", format!("expected bump, gaussian or zero, found `{s}`"))),
    };
    let data = InitialData {
        profile,
        amplitude: rd.f64("data.amplitude")?,
        center: rd.f64("data.center")?,
        width: rd.f64("data.width")?,
        frequency: rd.f64("data.frequency")?,
        charge: rd.f64("data.charge")?,
    };
    data.validate(&grid).map_err(|e| Reader::err("data", e.to_string()))?;
    let gauge = GaugeSpec { amplitude: rd.f64("gauge.amplitude")?, kw: rd.f64("gauge.kw")?, kv: rd.f64("gauge.kv")? };

    let c = rd.f64("potential.c")?;
    let potential = match rd.raw("potential.kind") {
        "none" => None,
        "mass" => Some(PotentialSpec::Mass { c1: c }),
        "quartic" => Some(PotentialSpec::Quartic { c2: c }),
        "sine_gordon" => Some(PotentialSpec::SineGordon { c3: c, eta: rd.f64("potential.eta")? }),
        "toda" => Some(PotentialSpec::Toda { c4: c, lambda: rd.f64("potential.lambda")? }),
        s => {
            return Err(Reader::err(
                "potential.kind",
                format!("expected none, mass, quartic, sine_gordon or toda, found `{s}`"),
            ))
        }
    };
    if let Some(p) = &potential {
        p.validate().map_err(|e| Reader::err("potential", e.to_string()))?;
    }
    if let Sector::Mode { s, l } = sector {
        let pot = if s == 1 { None } else { potential };
        if s == 1 && potential.is_some_and(|p| p != PotentialSpec::massless()) {
            return Err(Reader::err("potential.kind", "the spin-1 mode carries no scalar potential"));
        }
        ModeSpec::new(s, l, pot).map_err(|e| Reader::err("mode", e.to_string()))?;
    }

    let h_enabled = rd.bool("multiplier.h.enabled")?;
    let h_r1 = rd.f64("multiplier.h.r1")?;
    if h_enabled {
        check_r1_window(&background, h_r1).map_err(|e| Reader::err("multiplier.h.r1", e.to_string()))?;
    }
    let g_kind = match rd.raw("multiplier.g.cutoff") {
        "smooth" => CutoffKind::Smooth,
        "sharp" => CutoffKind::Sharp,
        s => return Err(Reader::err("multiplier.g.cutoff", format!("expected smooth or sharp, found `{s}`"))),
    };
    let default_lo = if background.is_flat() { h_r1 } else { tortoise(&background, h_r1).unwrap_or(h_r1) };
    let default_hi =
        if background.is_flat() { 1.2 * h_r1 } else { tortoise(&background, 1.2 * h_r1).unwrap_or(1.2 * h_r1) };
    let g_cutoff = CutoffSpec {
        kind: g_kind,
        lo: rd.auto_f64("multiplier.g.lo")?.unwrap_or(default_lo),
        hi: rd.auto_f64("multiplier.g.hi")?.unwrap_or(default_hi),
        width: rd.f64("multiplier.g.width")?,
    };
    if !(g_cutoff.hi > g_cutoff.lo) || g_cutoff.width < 0.0 {
        return Err(Reader::err("multiplier.g", "cut-off needs hi > lo and width >= 0"));
    }

    let ladder_t0 = rd.auto_f64("ladder.t0")?;
    let ladder_ratio = rd.f64("ladder.ratio")?;
    if ladder_ratio <= 1.0 {
        return Err(Reader::err("ladder.ratio", "must exceed 1"));
    }
    if let Some(t0) = ladder_t0 {
        if t0 <= 0.0 {
            return Err(Reader::err("ladder.t0", "must be positive"));
        }
    }
    let fault = match rd.raw("scheme.fault") {
        "none" => Fault::None,
        "first_order" => Fault::FirstOrder,
        s => return Err(Reader::err("scheme.fault", format!("expected none or first_order, found `{s}`"))),
    };
    let fit_envelope_maxima = match rd.raw("fit.envelope_maxima") {
        "auto" => Toggle::Auto,
        "true" | "on" => Toggle::On,
        "false" | "off" => Toggle::Off,
        s => return Err(Reader::err("fit.envelope_maxima", format!("expected auto, on or off, found `{s}`"))),
    };

    let canonical = KEYS
        .iter()
        .map(|(k, _)| {
            let v = rd.raw(k);
            (k.to_string(), canonical_number(v))
        })
        .collect();

    Ok(RunConfig {
        run_id: rd.raw("run.id").to_string(),
        background,
        grid,
        min_lapse,
        sector,
        data,
        gauge,
        potential,
        h_enabled,
        h_r1,
        h_amplitude: rd.f64("multiplier.h.amplitude")?,
        g_cutoff,
        ladder_t0,
        ladder_ratio,
        rstar_domain: (rd.auto_f64("diagnostics.rstar_lo")?, rd.auto_f64("diagnostics.rstar_hi")?),
        curves: parse_curves(rd.raw("curves"))?,
        fit_exclude_tail: rd.usize("fit.exclude_tail")?,
        fit_envelope_maxima,
        envelope_tolerance: rd.f64("envelope.tolerance")?,
        drift_tol: rd.f64("invariants.drift_tol")?,
        fault,
        corrector_passes: rd.usize("scheme.corrector_passes")?,
        output_dir: rd.raw("output.dir").to_string(),
        canonical,
    })
}

impl RunConfig {
    /// Canonical text: every key in fixed order, numbers in shortest round-trip form.
    pub fn canonical(&self) -> String {
        self.canonical.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// SHA-256 over `"config <len>\0<canonical>"`, hex encoded.
    pub fn hash(&self) -> String {
        let body = self.canonical();
        let mut hasher = Sha256::new();
        hasher.update(format!("config {}\0", body.len()).as_bytes());
        hasher.update(body.as_bytes());
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Returns a copy with `key` overridden (validated again).
    pub fn with(&self, key: &str, value: &str) -> Result<Self> {
        let mut text = String::new();
        for (k, v) in &self.canonical {
            if k != key {
                text.push_str(&format!("{k} = {v}\n"));
            }
        }
        text.push_str(&format!("{key} = {value}\n"));
        load_config(&text)
    }

    pub fn scheme_options(&self) -> SchemeOptions<f64> {
        SchemeOptions {
            gauge: self.gauge,
            corrector_passes: self.corrector_passes,
            fault: self.fault,
            min_lapse: self.min_lapse,
        }
    }

    pub fn nonlinear_potential(&self) -> PotentialSpec<f64> {
        self.potential.unwrap_or(PotentialSpec::massless())
    }

    pub fn mode_spec(&self) -> Option<ModeSpec<f64>> {
        match self.sector {
            Sector::Mode { s, l } => {
                let pot = if s == 1 { None } else { self.potential };
                Some(ModeSpec { s, l, potential: pot })
            }
            Sector::Nonlinear => None,
        }
    }

    pub fn h_multiplier(&self) -> MultiplierSpec<f64> {
        MultiplierSpec::RedshiftH { profile: Profile::redshift(self.h_amplitude, self.h_r1) }
    }

    pub fn g_multiplier(&self) -> MultiplierSpec<f64> {
        MultiplierSpec::RadialG { profile: Profile::CutoffIntegral { cutoff: self.g_cutoff } }
    }
}
