use mhdecay_core::diagnostics::*;
use mhdecay_core::evolution::evolve;
use mhdecay_core::fields::FieldSample;
use mhdecay_core::geometry::{tortoise, BackgroundParams};
use mhdecay_core::grid::GridSpec;
use mhdecay_core::initial::{InitialData, ProfileKind};
use mhdecay_core::multiplier::*;
use mhdecay_core::report::*;
use mhdecay_core::stress::*;
use mhdecay_core::suite::coulomb_energy;
use mhdecay_core::{Background, History, Multiplier, Potential, C};
use proptest::prelude::*;

fn bg() -> Background {
    BackgroundParams::new(1.0).unwrap()
}

fn pulse_history(delta: f64, charge: f64) -> History {
    let g = GridSpec::new(0.0, 12.0, 6.0, 18.0, delta).unwrap();
    let d = InitialData {
        profile: ProfileKind::CompactBump,
        amplitude: 0.3,
        center: 10.0,
        width: 2.0,
        frequency: 1.0,
        charge,
    };
    evolve(&g, &d, &bg(), &Potential::Quartic { c2: 1.0 }).unwrap()
}

fn multipliers() -> Vec<Multiplier> {
    let cutoff = CutoffSpec { kind: CutoffKind::Smooth, lo: -2.0, hi: 6.0, width: 1.0 };
    vec![
        MultiplierSpec::TimeT,
        MultiplierSpec::MorawetzK,
        MultiplierSpec::RadialG { profile: Profile::CutoffIntegral { cutoff } },
        MultiplierSpec::RedshiftH { profile: Profile::redshift(1.0, 2.4) },
    ]
}

/// Stress tensor from the covariant expression with an explicit `(w, v)` metric block.
fn reference_stress(s: &FieldSample<f64>, p: f64, om: f64) -> [f64; 4] {
    // g_ab and g^ab on (w, v); the sphere block is r^2 times the unit metric
    let g = [[0.0, -om / 2.0], [-om / 2.0, 0.0]];
    let gi = [[0.0, -2.0 / om], [-2.0 / om, 0.0]];
    let d = [s.dw_phi, s.dv_phi];
    let f = [[0.0, -s.f_vw], [s.f_vw, 0.0]]; // F_ab with F_wv = -F_vw
    let mut kin = 0.0;
    let mut ff = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            kin += gi[a][b] * (d[a] * d[b].conj()).re;
            for c in 0..2 {
                for e in 0..2 {
                    ff += gi[a][c] * gi[b][e] * f[a][b] * f[c][e];
                }
            }
        }
    }
    let lag = kin + p;
    let t = |a: usize, b: usize| {
        let mut fm = 0.0;
        for c in 0..2 {
            for e in 0..2 {
                fm += f[a][c] * gi[c][e] * f[b][e];
            }
        }
        2.0 * (d[a] * d[b].conj()).re - g[a][b] * lag + fm - 0.25 * g[a][b] * ff
    };
    // g^AB g_AB = 2 on the sphere; F has no angular components
    let angular = -2.0 * lag - 0.5 * ff;
    [t(0, 0), t(1, 1), t(1, 0), angular]
}

proptest! {
    #[test]
    fn stress_matches_covariant_reference(
        pr in -1.0f64..1.0, pi in -1.0f64..1.0,
        a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0,
        f in -1.0f64..1.0, p in 0.0f64..2.0, om in 0.05f64..1.0,
    ) {
        let s = FieldSample { phi: C::new(pr, pi), a_w: 0.0, a_v: 0.0, f_vw: f, dw_phi: C::new(a, b), dv_phi: C::new(c, d) };
        let t = stress_energy(&s, p, om);
        let r = reference_stress(&s, p, om);
        let got = [t.t_ww, t.t_vv, t.t_vw, t.t_angular];
        for k in 0..4 {
            prop_assert!((got[k] - r[k]).abs() <= 1e-12 * (1.0 + r[k].abs()), "component {}: {} vs {}", k, got[k], r[k]);
        }
    }

    #[test]
    fn current_is_linear_in_the_multiplier(a in -3.0f64..3.0, b in -3.0f64..3.0, s in -4.0f64..4.0) {
        let t = StressEnergy { t_ww: 0.3, t_vv: 1.1, t_vw: 0.2, t_angular: 0.0, potential: 0.1 };
        let v = NullVector { a, b, ..Default::default() };
        let j1 = current(&t, &v);
        let j2 = current(&t, &v.scaled(s));
        prop_assert!((j2.j_w - s * j1.j_w).abs() < 1e-12);
        prop_assert!((j2.j_v - s * j1.j_v).abs() < 1e-12);
    }
}

#[test]
fn vacuum_stress_and_current_vanish() {
    let t = stress_energy(&FieldSample::vacuum(), 0.0, 0.5);
    assert_eq!(t, StressEnergy::default());
    let v = MultiplierSpec::<f64>::TimeT.at(&bg(), 1.0, 9.0, 5.0, 0.6);
    let j = current(&t, &v);
    assert_eq!((j.j_w, j.j_v), (0.0, 0.0));
    let j = current(&StressEnergy::default(), &NullVector { a: 2.0, b: -1.0, ..Default::default() });
    assert_eq!((j.j_w, j.j_v), (0.0, 0.0));
}

#[test]
fn pure_potential_sample_carries_only_potential() {
    let s: FieldSample<f64> = FieldSample { phi: C::new(0.7, 0.0), ..FieldSample::vacuum() };
    let t = stress_energy(&s, 0.49, 0.8);
    assert_eq!((t.t_ww, t.t_vv), (0.0, 0.0));
    assert!((t.t_vw - 0.8 * 0.49 / 2.0).abs() < 1e-15);
    assert!((t.t_angular + 2.0 * 0.49).abs() < 1e-15);
}

#[test]
fn morawetz_density_symmetric_on_w_equals_v() {
    let v = MultiplierSpec::<f64>::MorawetzK.at(&bg(), 3.0, 3.0, 3.5, 1.0 - 2.0 / 3.5);
    let s = FieldSample {
        phi: C::new(0.2, 0.1),
        a_w: 0.0,
        a_v: 0.0,
        f_vw: 0.1,
        dw_phi: C::new(0.4, -0.1),
        dv_phi: C::new(-0.3, 0.5),
    };
    let swapped = FieldSample { dw_phi: s.dv_phi, dv_phi: s.dw_phi, ..s };
    let flux = |s: &FieldSample<f64>| {
        let j = current(&stress_energy(s, 0.01, 0.4), &v);
        j.j_w + j.j_v
    };
    assert!((flux(&s) - flux(&swapped)).abs() < 1e-15);
}

#[test]
fn zero_history_gives_zero_diagnostics() {
    let g = GridSpec::new(0.0, 10.0, 4.0, 14.0, 0.25).unwrap();
    let h = evolve(&g, &InitialData::zero(), &bg(), &Potential::Mass { c1: 1.0 }).unwrap();
    let rect = Rect { i_lo: 2, i_hi: 30, j_lo: 1, j_hi: 35 };
    for m in multipliers() {
        assert_eq!(slice_energy(&h, &m, &Slice::Time { k: 40 }, None).unwrap().value, 0.0);
        assert_eq!(bulk_integral(&h, &m, &rect, None).unwrap(), 0.0);
        assert_eq!(divergence_residual(&h, &m, &rect).unwrap().residual, 0.0);
    }
}

#[test]
fn coulomb_energy_closed_form() {
    let (e, closed, r_lo) = coulomb_energy(1.0, 1.0, 4.0, 100.0, 1.0 / 32.0).unwrap();
    let exact = 2.0 * std::f64::consts::PI * (1.0 / r_lo - 1.0 / 100.0);
    assert!((closed - exact).abs() < 1e-2 * exact);
    assert!((e - closed).abs() <= 1e-4 * closed, "{e} vs {closed}");
    assert!((r_lo - 4.0).abs() < 0.05);
}

#[test]
fn coulomb_history_divergence_is_exact() {
    let g = GridSpec::new(0.0, 10.0, 8.0, 18.0, 0.125).unwrap();
    let h = evolve(&g, &InitialData::coulomb(1.0), &bg(), &Potential::massless()).unwrap();
    let rect = Rect { i_lo: 0, i_hi: h.nw() - 1, j_lo: 0, j_hi: h.nv() - 1 };
    let d = divergence_residual(&h, &MultiplierSpec::TimeT, &rect).unwrap();
    assert!(d.residual <= 1e-8, "{d:?}");
    // static: E_t on two slices agrees up to quadrature over the covered r* range
    let e = |k| slice_energy(&h, &MultiplierSpec::TimeT, &Slice::Time { k }, None).unwrap().value;
    assert!(e(40) > 0.0 && e(120) > 0.0);
}

#[test]
fn killing_bulk_vanishes_pointwise() {
    let h = pulse_history(1.0 / 16.0, 0.2);
    let rect = Rect { i_lo: 0, i_hi: h.nw() - 1, j_lo: 0, j_hi: h.nv() - 1 };
    let b = bulk_integral(&h, &MultiplierSpec::TimeT, &rect, None).unwrap();
    assert!(b.abs() < 1e-12, "{b}");
}

#[test]
fn divergence_residuals_converge_for_every_multiplier() {
    let (h1, h2) = (pulse_history(1.0 / 32.0, 0.2), pulse_history(1.0 / 64.0, 0.2));
    let full = |h: &History| Rect { i_lo: 0, i_hi: h.nw() - 1, j_lo: 0, j_hi: h.nv() - 1 };
    for m in multipliers() {
        let a = divergence_residual(&h1, &m, &full(&h1)).unwrap().residual;
        let b = divergence_residual(&h2, &m, &full(&h2)).unwrap().residual;
        let ratio = a / b;
        assert!((3.4..4.6).contains(&ratio), "{}: {a} -> {b}", m.name());
    }
}

#[test]
fn energy_balance_converges() {
    let drift = |d: f64| {
        let h = pulse_history(d, 0.2);
        let k = |t: f64| ((2.0 * t - 6.0) / d).round() as usize;
        energy_balance(&h, &MultiplierSpec::TimeT, k(7.0), k(11.0)).unwrap().drift
    };
    let (a, b) = (drift(1.0 / 16.0), drift(1.0 / 32.0));
    assert!(a < 1e-2 && (3.4..4.6).contains(&(a / b)), "{a} {b}");
}

#[test]
fn energies_are_nonnegative_on_a_pulse() {
    let h = pulse_history(1.0 / 16.0, 0.2);
    for k in (20..h.nw() + h.nv() - 2).step_by(17) {
        let et = slice_energy(&h, &MultiplierSpec::TimeT, &Slice::Time { k }, None).unwrap().value;
        let ek = slice_energy(&h, &MultiplierSpec::MorawetzK, &Slice::Time { k }, None).unwrap().value;
        let hat = time_energy_hatted(&h, k, None, true).unwrap().value;
        assert!(et >= 0.0 && ek >= 0.0 && hat >= 0.0, "k={k}: {et} {ek} {hat}");
    }
}

#[test]
fn slice_domain_is_recorded() {
    let h = pulse_history(1.0 / 8.0, 0.0);
    let v = slice_energy(&h, &MultiplierSpec::TimeT, &Slice::Time { k: 100 }, Some((-1.0, 2.0))).unwrap();
    assert!(v.rstar_lo >= -1.0 && v.rstar_hi <= 2.0 && v.clipped);
    assert!(slice_energy(&h, &MultiplierSpec::TimeT, &Slice::Time { k: 10_000 }, None).is_err());
}

#[test]
fn region_outside_grid_is_rejected() {
    let h = pulse_history(0.25, 0.0);
    let r = Rect { i_lo: 0, i_hi: h.nw(), j_lo: 0, j_hi: 3 };
    assert!(matches!(
        bulk_integral(&h, &MultiplierSpec::TimeT, &r, None),
        Err(mhdecay_core::Error::RegionOutsideGrid(_))
    ));
}

#[test]
fn morawetz_factor_sign_structure() {
    let b = bg();
    let derived = sign_structure(&b, |r| morawetz_maxwell_factor(&b, r).unwrap(), -30.0, 1e4, 20_000).unwrap();
    assert!(derived.is_bounded_positive_interval(), "{derived:?}");
    let (lo, hi) = derived.positive_intervals[0];
    assert!(lo > 2.0 && hi < 50.0);
    // sampling inside and outside the interval
    let mid = 0.5 * (lo + hi);
    assert!(morawetz_maxwell_factor(&b, mid).unwrap() > 0.0);
    assert!(morawetz_maxwell_factor(&b, hi * 2.0).unwrap() < 0.0);
    assert!(morawetz_maxwell_factor(&b, 2.0 + 0.5 * (lo - 2.0)).unwrap() < 0.0);
}

#[test]
fn h_admissibility_examples() {
    let b = bg();
    let rep = check_h_admissible(&Profile::redshift(1.0, 2.4), &b, 2.4).unwrap();
    assert!(rep.h1.holds && rep.h2.holds && rep.support, "{rep:?}");
    let lin = check_h_admissible(&Profile::Linear { slope: 1.0, offset: 0.0 }, &b, 2.4).unwrap();
    assert!(!lin.h1.holds);
    let zero = check_h_admissible(&Profile::Zero, &b, 2.4).unwrap();
    assert!(zero.all_hold());
    for c in [zero.h1, zero.h2, zero.h3, zero.h4] {
        assert_eq!(c.worst_margin, 0.0);
    }
}

#[test]
fn r1_window_is_enforced() {
    let b = bg();
    assert!(matches!(check_r1_window(&b, 2.9), Err(mhdecay_core::Error::SupportWindow { .. })));
    assert!(check_r1_window(&b, 1.9).is_err());
    assert!(check_r1_window(&b, 2.4).is_ok());
}

#[test]
fn cutoff_shape() {
    let c = CutoffSpec::<f64>::unit_smooth();
    assert_eq!(c.value(0.0), 1.0);
    assert_eq!(c.value(1.0), 1.0);
    assert_eq!(c.value(1.6), 0.0);
    assert_eq!(c.value(-1.6), 0.0);
    let mut prev = 0.0;
    for k in 0..=100 {
        let x = -1.5 + 0.5 * k as f64 / 100.0;
        let y = c.value(x);
        assert!(y >= prev - 1e-15);
        prev = y;
    }
    // integral matches the trapezoid rule
    let n = 40_000;
    let (a, b) = (-2.0, 2.0);
    let h = (b - a) / n as f64;
    let num: f64 =
        (0..=n).map(|k| c.value(a + k as f64 * h) * if k == 0 || k == n { 0.5 } else { 1.0 }).sum::<f64>() * h;
    assert!((c.integral(b) - num).abs() < 1e-6, "{} vs {num}", c.integral(b));
}

fn entry(functional: Functional, i: u32, j: u32, value: f64) -> EnergyEntry {
    EnergyEntry {
        functional,
        location: Location::TimeSlice { t: 1.0 },
        commutation: [i, j],
        domain: [0.0, 1.0],
        value,
        clipped: false,
    }
}

#[test]
fn spherical_composite_sums_time_and_morawetz() {
    let es = vec![
        entry(Functional::ETime, 0, 0, 1.5),
        entry(Functional::ETime, 1, 0, 0.25),
        entry(Functional::EK, 0, 0, 3.0),
        entry(Functional::EK, 1, 0, 0.5),
        entry(Functional::ESharp, 0, 0, 0.7),
    ];
    let ctx = CompositeContext { angular_weight: 0.0, spherical: true, quartic: false, w: 0.0, v: 0.0 };
    let v = composite_energy(&es, CompositeKind::EMHHat, &ctx).unwrap();
    assert!((v - (1.5 + 0.25 + 3.0 + 0.5)).abs() < 1e-15);
    let zeros: Vec<EnergyEntry> = es.iter().map(|e| EnergyEntry { value: 0.0, ..e.clone() }).collect();
    for k in CompositeKind::ALL {
        let v = composite_energy(&zeros, k, &ctx).unwrap();
        let expect = if k == CompositeKind::E4 { 1.0 } else { 0.0 };
        assert_eq!(v, expect, "{k:?}");
    }
}

#[test]
fn quartic_e4_formula() {
    let es = vec![
        entry(Functional::ETime, 0, 0, 0.4),
        entry(Functional::EK, 0, 0, 0.9),
        entry(Functional::ESharp, 0, 0, 0.3),
    ];
    let ctx = CompositeContext { angular_weight: 0.0, spherical: true, quartic: true, w: 3.0, v: 6.0 };
    let e3 = composite_energy(&es, CompositeKind::E3, &ctx).unwrap();
    let e4 = composite_energy(&es, CompositeKind::E4, &ctx).unwrap();
    let expect = 0.25 * e3 + e3.powi(7) + e3.powi(4) + e3.powi(3) + e3;
    assert!((e4 - expect).abs() < 1e-14);
}

#[test]
fn missing_constituent_is_an_error() {
    let ctx = CompositeContext { angular_weight: 2.0, spherical: false, quartic: false, w: 0.0, v: 0.0 };
    let err = composite_energy(&[entry(Functional::ETime, 0, 0, 1.0)], CompositeKind::EMH, &ctx).unwrap_err();
    assert!(matches!(err, mhdecay_core::Error::MissingConstituent(_)));
}

#[test]
fn redshift_profile_support() {
    let b = bg();
    let p = Profile::redshift(1.0, 2.4);
    let r = 2.4 * 1.2 + 1e-9;
    assert_eq!(p.eval(&b, tortoise(&b, r).unwrap(), r), (0.0, 0.0));
    let (h, dh) = p.eval(&b, tortoise(&b, 2.2).unwrap(), 2.2);
    assert!(h > 0.0 && dh > 0.0);
}
