//! Run orchestration: evolve, diagnose, fit, invariant suite and convergence studies.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::RunConfig;
use crate::decay::{
    check_envelope_in, default_window, extract_series, fit_exponent, fit_exponent_envelope, CurveSpec, DecayFit,
    EnvelopeBound, EnvelopeCheck, Quantity, TimeSeries,
};
use crate::diagnostics::{
    bulk_integral, divergence_residual, energy_balance, mode_energy, sharp_energy, slice_energy, time_energy_hatted,
    ModeFunctional, Rect, Slice, SliceValue,
};
use crate::error::{Error, Result};
use crate::evolution::evolve_with;
use crate::fields::PotentialSpec;
use crate::grid::GridSpec;
use crate::history::FieldHistory;
use crate::io::{write_history, write_mode_history, write_ndjson, write_series, RunTag};
use crate::modes::{evolve_mode_with, ModeHistory};
use crate::multiplier::MultiplierSpec;
use crate::report::{
    composite_energy, CompositeContext, CompositeKind, EnergyEntry, EnergyReport, Functional, Location,
};
use crate::residual::{covariant_residual, gauss_residual};

/// Output of the evolution stage.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Evolved {
    Nonlinear(FieldHistory<f64>),
    Mode(ModeHistory<f64>),
}

impl Evolved {
    pub fn grid(&self) -> &GridSpec<f64> {
        match self {
            Evolved::Nonlinear(h) => &h.grid,
            Evolved::Mode(h) => &h.grid,
        }
    }
}

pub fn evolve_config(cfg: &RunConfig) -> Result<Evolved> {
    match cfg.mode_spec() {
        None => {
            let h =
                evolve_with(&cfg.grid, &cfg.data, &cfg.background, &cfg.nonlinear_potential(), &cfg.scheme_options())?;
            Ok(Evolved::Nonlinear(h))
        }
        Some(spec) => Ok(Evolved::Mode(evolve_mode_with(&spec, &cfg.grid, &cfg.data, &cfg.background, cfg.fault)?)),
    }
}

/// Diagonal index of the `t`-slice nearest to `t`.
pub fn slice_index(grid: &GridSpec<f64>, t: f64) -> Option<usize> {
    let k = ((2.0 * t - grid.w0 - grid.v0) / grid.delta).round();
    let kmax = (grid.nw() + grid.nv() - 2) as f64;
    (k >= 0.0 && k <= kmax).then_some(k as usize)
}

pub fn slice_time(grid: &GridSpec<f64>, k: usize) -> f64 {
    0.5 * (grid.w0 + grid.v0 + k as f64 * grid.delta)
}

/// First ladder time: the slice on which the whole outgoing profile has entered the grid.
pub fn ladder_start(cfg: &RunConfig) -> f64 {
    if let Some(t0) = cfg.ladder_t0 {
        return t0;
    }
    let g = &cfg.grid;
    let t_min = 0.5 * (g.w0 + g.v0) + g.delta;
    let t_data = cfg.data.support().map(|(_, hi)| 0.5 * (g.w0 + hi)).unwrap_or(t_min);
    t_data.max(t_min).max(g.delta)
}

/// Slices `t_i = t0 ratio^i` inside the grid, as `(t, k)` with `t` snapped to the slice.
pub fn ladder(cfg: &RunConfig) -> Vec<(f64, usize)> {
    let g = &cfg.grid;
    let t_max = 0.5 * (g.w1 + g.v1);
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut t = ladder_start(cfg);
    while t <= t_max {
        if let Some(k) = slice_index(g, t) {
            if out.last().is_none_or(|&(_, kl)| kl != k) {
                out.push((slice_time(g, k), k));
            }
        }
        t *= cfg.ladder_ratio;
    }
    out
}

fn domain(cfg: &RunConfig) -> Option<(f64, f64)> {
    match cfg.rstar_domain {
        (None, None) => None,
        (lo, hi) => Some((lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))),
    }
}

fn entry(functional: Functional, location: Location, commutation: [u32; 2], v: &SliceValue<f64>) -> EnergyEntry {
    EnergyEntry {
        functional,
        location,
        commutation,
        domain: [v.rstar_lo, v.rstar_hi],
        value: v.value,
        clipped: v.clipped,
    }
}

fn slice_entries(
    h: &FieldHistory<f64>,
    cfg: &RunConfig,
    t: f64,
    k: usize,
    i: u32,
    out: &mut EnergyReport,
) -> Result<()> {
    let loc = Location::TimeSlice { t };
    let dom = domain(cfg);
    let time = Slice::Time { k };
    out.push(entry(Functional::ETime, loc, [i, 0], &slice_energy(h, &MultiplierSpec::TimeT, &time, dom)?));
    out.push(entry(Functional::ETimeReduced, loc, [i, 0], &time_energy_hatted(h, k, dom, false)?));
    out.push(entry(Functional::EK, loc, [i, 0], &slice_energy(h, &MultiplierSpec::MorawetzK, &time, dom)?));
    out.push(entry(Functional::ESharp, loc, [i, 0], &sharp_energy(h, k, dom)?));
    if i == 0 {
        out.push(entry(Functional::EG, loc, [0, 0], &slice_energy(h, &cfg.g_multiplier(), &time, dom)?));
        if cfg.h_enabled {
            out.push(entry(Functional::EH, loc, [0, 0], &slice_energy(h, &cfg.h_multiplier(), &time, dom)?));
        }
    }
    Ok(())
}

fn composite_context(cfg: &RunConfig, angular_weight: f64, spherical: bool) -> CompositeContext {
    let g = &cfg.grid;
    CompositeContext {
        angular_weight,
        spherical,
        quartic: matches!(cfg.potential, Some(PotentialSpec::Quartic { .. })),
        w: g.w1,
        v: g.v1,
    }
}

fn push_composites(
    report: &mut EnergyReport,
    cfg: &RunConfig,
    t0: f64,
    angular_weight: f64,
    spherical: bool,
) -> Result<()> {
    let ctx = composite_context(cfg, angular_weight, spherical);
    let at_t0: Vec<EnergyEntry> =
        report.entries.iter().filter(|e| e.location == Location::TimeSlice { t: t0 }).cloned().collect();
    for kind in CompositeKind::ALL {
        let value = composite_energy(&at_t0, kind, &ctx)?;
        report.push(EnergyEntry {
            functional: kind.functional(),
            location: Location::Point { w: ctx.w, v: ctx.v, t0 },
            commutation: [0, 0],
            domain: at_t0.first().map(|e| e.domain).unwrap_or([0.0, 0.0]),
            value,
            clipped: at_t0.iter().any(|e| e.clipped),
        });
    }
    Ok(())
}

/// Energies on the ladder, bulk integrals over the grid and composites at `t0`.
pub fn diagnose(cfg: &RunConfig, ev: &Evolved) -> Result<EnergyReport> {
    let lad = ladder(cfg);
    let &(t0, _) = lad.first().ok_or_else(|| Error::EmptyIntersection("ladder has no slice inside the grid".into()))?;
    let mut report = EnergyReport::default();
    match ev {
        Evolved::Nonlinear(h) => {
            let ht = h.time_commuted();
            for &(t, k) in &lad {
                slice_entries(h, cfg, t, k, 0, &mut report)?;
                slice_entries(&ht, cfg, t, k, 1, &mut report)?;
            }
            let g = &h.grid;
            let rect = Rect { i_lo: 0, i_hi: h.nw() - 1, j_lo: 0, j_hi: h.nv() - 1 };
            let region = Location::Region { w_lo: g.w0, w_hi: g.w1, v_lo: g.v0, v_hi: g.v1 };
            let dom = domain(cfg);
            let span = [g.rstar(h.nw() - 1, 0), g.rstar(0, h.nv() - 1)];
            let mut bulk = |f: Functional, m: &MultiplierSpec<f64>| -> Result<()> {
                let value = bulk_integral(h, m, &rect, dom)?;
                report.push(EnergyEntry {
                    functional: f,
                    location: region,
                    commutation: [0, 0],
                    domain: span,
                    value,
                    clipped: false,
                });
                Ok(())
            };
            bulk(Functional::JK, &MultiplierSpec::MorawetzK)?;
            bulk(Functional::JG, &cfg.g_multiplier())?;
            if cfg.h_enabled {
                bulk(Functional::IH, &cfg.h_multiplier())?;
            }
            push_composites(&mut report, cfg, t0, 0.0, true)?;
        }
        Evolved::Mode(h) => {
            let ht = h.time_commuted();
            let dom = domain(cfg);
            for (n, &(t, k)) in lad.iter().enumerate() {
                let loc = Location::TimeSlice { t };
                // the full angular tower is only needed for the composites at t0
                let jmax = if n == 0 { 6 } else { 0 };
                for (i, hist) in [(0u32, h), (1u32, &ht)] {
                    for j in 0..=jmax {
                        for (f, mf) in [
                            (Functional::ETime, ModeFunctional::Time),
                            (Functional::EK, ModeFunctional::Morawetz),
                            (Functional::ESharp, ModeFunctional::Sharp),
                        ] {
                            let v = mode_energy(hist, mf, k, j, dom)?;
                            report.push(entry(f, loc, [i, j], &v));
                        }
                    }
                }
            }
            push_composites(&mut report, cfg, t0, h.spec.angular_weight(), false)?;
        }
    }
    Ok(report)
}

/// Fit and envelope of one quantity along one curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveFit {
    pub curve: String,
    pub quantity: Quantity,
    pub samples: usize,
    pub fit: Option<DecayFit>,
    pub fit_error: Option<String>,
    pub envelope: Option<EnvelopeCheck>,
    #[serde(skip)]
    pub series: Option<TimeSeries<f64>>,
}

fn quantities(ev: &Evolved) -> &'static [Quantity] {
    match ev {
        Evolved::Nonlinear(_) => &[Quantity::Phi, Quantity::DPhi, Quantity::Fvw],
        Evolved::Mode(_) => &[Quantity::Mode],
    }
}

/// Late-time window used for envelopes: the last half of the series abscissa.
pub fn late_window(series: &TimeSeries<f64>) -> (f64, f64) {
    let lo = series.x.first().copied().unwrap_or(0.0);
    let hi = series.x.last().copied().unwrap_or(0.0);
    (0.5 * (lo + hi), hi)
}

fn use_maxima(cfg: &RunConfig) -> bool {
    match cfg.fit_envelope_maxima {
        crate::config::Toggle::On => true,
        crate::config::Toggle::Off => false,
        crate::config::Toggle::Auto => cfg.potential.is_some_and(|p| p.is_massive()),
    }
}

pub fn fit_curve(cfg: &RunConfig, ev: &Evolved, curve: &CurveSpec, q: Quantity) -> CurveFit {
    let series = match ev {
        Evolved::Nonlinear(h) => extract_series(h, curve, q),
        Evolved::Mode(h) => extract_series(h, curve, q),
    };
    let mut out = CurveFit {
        curve: curve.label(),
        quantity: q,
        samples: 0,
        fit: None,
        fit_error: None,
        envelope: None,
        series: None,
    };
    let series = match series {
        Ok(s) => s,
        Err(e) => {
            out.fit_error = Some(e.to_string());
            return out;
        }
    };
    out.samples = series.len();
    let window = default_window(&series, cfg.fit_exclude_tail);
    let fit = if use_maxima(cfg) { fit_exponent_envelope(&series, window) } else { fit_exponent(&series, window) };
    match fit {
        Ok(f) => out.fit = Some(f),
        Err(e) => out.fit_error = Some(e.to_string()),
    }
    let bound = match series.abscissa {
        crate::decay::Abscissa::V => EnvelopeBound::OneOverV,
        crate::decay::Abscissa::W => EnvelopeBound::OneOverW,
    };
    out.envelope = Some(check_envelope_in(&series, bound, late_window(&series), cfg.envelope_tolerance));
    out.series = Some(series);
    out
}

pub fn fit_all(cfg: &RunConfig, ev: &Evolved) -> Vec<CurveFit> {
    let mut out = Vec::new();
    for c in &cfg.curves {
        for &q in quantities(ev) {
            out.push(fit_curve(cfg, ev, c, q));
        }
    }
    out
}

/// One check of the per-run invariant suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InvariantSuite {
    pub checks: Vec<InvariantCheck>,
}

impl InvariantSuite {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn invariants(cfg: &RunConfig, ev: &Evolved, report: &EnergyReport) -> Result<InvariantSuite> {
    let mut s = InvariantSuite::default();
    let et = report.values(Functional::ETime);
    let ek = report.values(Functional::EK);
    let scale = et.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    let min_et = et.iter().copied().fold(f64::INFINITY, f64::min);
    let min_ek = ek.iter().copied().fold(f64::INFINITY, f64::min);
    s.checks.push(InvariantCheck {
        name: "E_t >= 0".into(),
        passed: min_et >= -1e-12 * scale,
        value: min_et,
        limit: 0.0,
    });
    let kscale = ek.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    s.checks.push(InvariantCheck {
        name: "E_K >= 0".into(),
        passed: min_ek >= -1e-12 * kscale,
        value: min_ek,
        limit: 0.0,
    });
    if let Evolved::Nonlinear(h) = ev {
        let lad = ladder(cfg);
        let mut worst = 0.0f64;
        if let Some(&(_, k0)) = lad.first() {
            for &(_, k) in lad.iter().skip(1) {
                worst = worst.max(energy_balance(h, &MultiplierSpec::TimeT, k0, k)?.drift);
            }
        }
        s.checks.push(InvariantCheck {
            name: "E_t balance drift".into(),
            passed: worst <= cfg.drift_tol,
            value: worst,
            limit: cfg.drift_tol,
        });
        let r = h.stats.max_gauss_residual.max(h.stats.max_covariant_residual);
        s.checks.push(InvariantCheck {
            name: "residuals finite".into(),
            passed: r.is_finite(),
            value: r,
            limit: f64::INFINITY,
        });
    }
    let all_finite = report.entries.iter().all(|e| e.value.is_finite());
    s.checks.push(InvariantCheck {
        name: "report finite".into(),
        passed: all_finite,
        value: if all_finite { 0.0 } else { 1.0 },
        limit: 0.0,
    });
    Ok(s)
}

/// Files written by [`run`].
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub report: EnergyReport,
    pub fits: Vec<CurveFit>,
    pub suite: InvariantSuite,
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

pub fn write_evolved(cfg: &RunConfig, ev: &Evolved, path: &Path) -> Result<()> {
    let hash = cfg.hash();
    let tag = RunTag { run_id: &cfg.run_id, config_hash: &hash };
    let mut f = create(path)?;
    match ev {
        Evolved::Nonlinear(h) => write_history(h, &tag, &mut f)?,
        Evolved::Mode(h) => write_mode_history(h, &tag, &mut f)?,
    }
    use std::io::Write;
    f.flush()?;
    Ok(())
}

fn series_file_name(fit: &CurveFit) -> String {
    let q = serde_json::to_value(fit.quantity).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    let c: String =
        fit.curve.chars().map(|ch| if ch.is_ascii_alphanumeric() || ch == '.' { ch } else { '_' }).collect();
    format!("series_{c}_{q}.csv")
}

/// Writes the report, fits and invariant suite as one NDJSON stream.
pub fn write_diagnostics(
    cfg: &RunConfig,
    report: &EnergyReport,
    fits: &[CurveFit],
    suite: &InvariantSuite,
    path: &Path,
) -> Result<()> {
    let mut f = create(path)?;
    let mut lines = vec![json!({"record": "run", "run_id": cfg.run_id, "config_hash": cfg.hash()})];
    for e in &report.entries {
        let mut v = serde_json::to_value(e).map_err(|e| Error::Io(e.to_string()))?;
        v["record"] = json!("energy");
        lines.push(v);
    }
    for fit in fits {
        let mut v = serde_json::to_value(fit).map_err(|e| Error::Io(e.to_string()))?;
        v["record"] = json!("fit");
        lines.push(v);
    }
    for c in &suite.checks {
        let mut v = serde_json::to_value(c).map_err(|e| Error::Io(e.to_string()))?;
        v["record"] = json!("invariant");
        lines.push(v);
    }
    write_ndjson(lines, &mut f)?;
    use std::io::Write;
    f.flush()?;
    Ok(())
}

/// Evolve, diagnose and fit; every artifact lands in `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunArtifacts> {
    fs::create_dir_all(out)?;
    let ev = evolve_config(cfg)?;
    let mut files = Vec::new();
    let hist = out.join("history.csv");
    write_evolved(cfg, &ev, &hist)?;
    files.push(hist);
    let report = diagnose(cfg, &ev)?;
    let fits = fit_all(cfg, &ev);
    for fit in &fits {
        if let Some(s) = &fit.series {
            let p = out.join(series_file_name(fit));
            let mut f = create(&p)?;
            write_series(s, &mut f)?;
            use std::io::Write;
            f.flush()?;
            files.push(p);
        }
    }
    let suite = invariants(cfg, &ev, &report)?;
    let diag = out.join("diagnostics.ndjson");
    write_diagnostics(cfg, &report, &fits, &suite, &diag)?;
    files.push(diag);
    Ok(RunArtifacts { dir: out.to_path_buf(), files, report, fits, suite })
}

/// How a diagnostic's order is read from its values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceKind {
    /// Tends to zero: order from successive ratios.
    Residual,
    /// Tends to a limit: order from Richardson differences (three levels).
    Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEntry {
    pub name: String,
    pub kind: ConvergenceKind,
    pub values: Vec<f64>,
    /// `None` when the diagnostic vanishes identically or too few levels were run.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub deltas: Vec<f64>,
    pub entries: Vec<ConvergenceEntry>,
}

impl ConvergenceReport {
    pub fn get(&self, name: &str) -> Option<&ConvergenceEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Values below this are treated as vanishing in order estimates.
pub const ORDER_FLOOR: f64 = 1e-13;

pub fn convergence_order(kind: ConvergenceKind, values: &[f64]) -> Option<f64> {
    let n = values.len();
    if values.iter().all(|v| v.abs() <= ORDER_FLOOR) {
        return None;
    }
    let ratio = match kind {
        ConvergenceKind::Residual if n >= 2 => values[n - 2].abs() / values[n - 1].abs(),
        ConvergenceKind::Value if n >= 3 => {
            (values[n - 3] - values[n - 2]).abs() / (values[n - 2] - values[n - 1]).abs()
        }
        _ => return None,
    };
    let p = ratio.log2();
    p.is_finite().then_some(p)
}

/// Diagnostics of one level, evaluated on slices and regions fixed by the coarsest grid.
fn level_diagnostics(
    cfg: &RunConfig,
    coarse: &GridSpec<f64>,
    t_pair: (f64, f64),
) -> Result<Vec<(String, ConvergenceKind, f64)>> {
    use ConvergenceKind::*;
    let ev = evolve_config(cfg)?;
    let g = *ev.grid();
    let k0 = slice_index(&g, t_pair.0).ok_or_else(|| Error::EmptyIntersection("t0 slice".into()))?;
    let k1 = slice_index(&g, t_pair.1).ok_or_else(|| Error::EmptyIntersection("t1 slice".into()))?;
    let probe_w = coarse.w(coarse.nw() / 2);
    let probe_v = coarse.v(coarse.nv() / 2);
    let (pi, pj) = (
        g.index_w(probe_w).ok_or_else(|| Error::Grid("probe".into()))?,
        g.index_v(probe_v).ok_or_else(|| Error::Grid("probe".into()))?,
    );
    let mut out = Vec::new();
    match &ev {
        Evolved::Nonlinear(h) => {
            out.push(("gauss_residual".into(), Residual, gauss_residual(h).max));
            out.push(("covariant_residual".into(), Residual, covariant_residual(h).max()));
            out.push((
                "energy_balance_drift".into(),
                Residual,
                energy_balance(h, &MultiplierSpec::TimeT, k0, k1)?.drift,
            ));
            let rect = Rect { i_lo: 0, i_hi: h.nw() - 1, j_lo: 0, j_hi: h.nv() - 1 };
            let mut mults =
                vec![("T", MultiplierSpec::TimeT), ("K", MultiplierSpec::MorawetzK), ("G", cfg.g_multiplier())];
            if cfg.h_enabled {
                mults.push(("H", cfg.h_multiplier()));
            }
            for (name, m) in &mults {
                let d = divergence_residual(h, m, &rect)?;
                out.push((format!("divergence_residual_{name}"), Residual, d.residual));
            }
            out.push((
                "killing_boundary_sum".into(),
                Residual,
                divergence_residual(h, &MultiplierSpec::TimeT, &rect)?.boundary.abs(),
            ));
            out.push((
                "E_t(t0)".into(),
                Value,
                slice_energy(h, &MultiplierSpec::TimeT, &Slice::Time { k: k0 }, None)?.value,
            ));
            out.push(("|phi|(probe)".into(), Value, h.phi.get(pi, pj).norm()));
        }
        Evolved::Mode(h) => {
            out.push(("E_t(t0)".into(), Value, mode_energy(h, ModeFunctional::Time, k0, 0, None)?.value));
            out.push(("E_t(t1)".into(), Value, mode_energy(h, ModeFunctional::Time, k1, 0, None)?.value));
            out.push(("|psi|(probe)".into(), Value, h.psi.get(pi, pj).norm()));
        }
    }
    Ok(out)
}

/// Runs `cfg` at `delta / 2^l` for `l < levels` concurrently and fits orders.
pub fn convergence(cfg: &RunConfig, levels: usize) -> Result<ConvergenceReport> {
    if levels < 2 {
        return Err(Error::Parameter("convergence needs at least two levels".into()));
    }
    let coarse = cfg.grid;
    let lad = ladder(cfg);
    let t_pair = match (lad.first(), lad.last()) {
        (Some(&(a, _)), Some(&(b, _))) if b > a => (a, b),
        _ => {
            let t = slice_time(&coarse, 1);
            (t, slice_time(&coarse, coarse.nw() + coarse.nv() - 3))
        }
    };
    let cfgs: Vec<RunConfig> = (0..levels)
        .map(|l| cfg.with("grid.delta", &format!("{}", coarse.delta / f64::powi(2.0, l as i32))))
        .collect::<Result<_>>()?;
    let per_level: Vec<Vec<(String, ConvergenceKind, f64)>> =
        cfgs.par_iter().map(|c| level_diagnostics(c, &coarse, t_pair)).collect::<Result<_>>()?;
    let entries = per_level[0]
        .iter()
        .enumerate()
        .map(|(n, (name, kind, _))| {
            let values: Vec<f64> = per_level.iter().map(|l| l[n].2).collect();
            ConvergenceEntry { name: name.clone(), kind: *kind, order: convergence_order(*kind, &values), values }
        })
        .collect();
    Ok(ConvergenceReport { deltas: cfgs.iter().map(|c| c.grid.delta).collect(), entries })
}
