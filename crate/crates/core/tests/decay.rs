use mhdecay_core::decay::*;
use mhdecay_core::evolution::evolve;
use mhdecay_core::geometry::BackgroundParams;
use mhdecay_core::grid::GridSpec;
use mhdecay_core::initial::{InitialData, ProfileKind};
use mhdecay_core::{Error, Potential, Series};
use proptest::prelude::*;

fn series(f: impl Fn(f64) -> f64, x0: f64, x1: f64, n: usize) -> Series {
    let v: Vec<f64> = (0..n).map(|k| x0 + (x1 - x0) * k as f64 / (n - 1) as f64).collect();
    let y = v.iter().map(|&x| f(x)).collect();
    TimeSeries::along_v(v, y, 3.0)
}

#[test]
fn exact_power_laws_are_recovered() {
    let s = series(|v| 10.0 / v, 1.0, 100.0, 400);
    let fit = fit_exponent(&s, None).unwrap();
    assert!((fit.p - 1.0).abs() < 1e-10);
    assert!((fit.c - 10.0).abs() < 1e-9);
    assert!(fit.residual_rms < 1e-12);
    let s = series(|v| v.powi(-3), 2.0, 50.0, 300);
    let fit = fit_exponent(&s, Some((5.0, 40.0))).unwrap();
    assert!((fit.p - 3.0).abs() < 1e-10);
    assert_eq!(fit.window, [5.0, 40.0]);
}

#[test]
fn default_window_is_late_half_by_log() {
    let s = series(|v| 1.0 / v, 1.0, 100.0, 100);
    let (lo, hi) = default_window(&s, 5).unwrap();
    let last = s.x[s.len() - 6];
    assert_eq!(hi, last);
    assert!((lo - last.sqrt()).abs() < 1e-12);
}

#[test]
fn fit_errors() {
    let s = series(|v| (v - 20.0).max(0.0), 1.0, 40.0, 100);
    assert!(matches!(fit_exponent(&s, Some((5.0, 30.0))), Err(Error::NonPositive { .. })));
    let short = series(|v| 1.0 / v, 1.0, 2.0, 4);
    assert!(matches!(fit_exponent(&short, None), Err(Error::InsufficientSamples { .. })));
}

#[test]
fn oscillating_tail_uses_local_maxima() {
    let s = series(|v| v.powi(-2) * (1.2 + (3.0 * v).cos()), 1.0, 200.0, 20_000);
    let raw = fit_exponent(&s, Some((20.0, 190.0))).unwrap();
    let env = fit_exponent_envelope(&s, Some((20.0, 190.0))).unwrap();
    assert!((env.p - 2.0).abs() < 0.02, "{}", env.p);
    assert!(env.residual_rms < raw.residual_rms);
}

#[test]
fn envelope_examples() {
    let s = series(|v| 10.0 / (1.0 + v), 0.0, 50.0, 200);
    let e = check_envelope(&s, EnvelopeBound::OneOverV);
    assert!((e.c_min - 10.0).abs() < 1e-12 && e.stabilized);
    let z = series(|_| 0.0, 0.0, 50.0, 200);
    for b in [
        EnvelopeBound::OneOverV,
        EnvelopeBound::OneOverW,
        EnvelopeBound::NearHorizonWOverVplusSq,
        EnvelopeBound::NearHorizonOffset,
    ] {
        let e = check_envelope(&z, b);
        assert_eq!(e.c_min, 0.0);
        assert!(e.stabilized);
    }
    let growing = series(|v| v, 1.0, 50.0, 200);
    assert!(!check_envelope(&growing, EnvelopeBound::OneOverV).stabilized);
}

#[test]
fn envelope_weights() {
    assert_eq!(EnvelopeBound::OneOverW.weight(-2.0, -3.0, 0.0), Some(8.0));
    assert_eq!(EnvelopeBound::NearHorizonWOverVplusSq.weight(1.0, 0.0, 5.0), None);
    assert_eq!(EnvelopeBound::NearHorizonWOverVplusSq.weight(2.0, 4.0, 0.5), Some(4.0 / 16.0));
    assert_eq!(EnvelopeBound::NearHorizonOffset.weight(2.0, 2.0, 2.0), Some(2.0));
}

proptest! {
    #[test]
    fn fit_is_scale_equivariant(s in 1e-3f64..1e3, p in 0.5f64..5.0) {
        let base = series(|v| v.powf(-p) * (1.0 + 0.1 * v.sin()), 1.0, 80.0, 300);
        let a = fit_exponent(&base, None).unwrap();
        let b = fit_exponent(&base.scaled(s), None).unwrap();
        prop_assert!((a.p - b.p).abs() < 1e-9);
        prop_assert!((b.c - s * a.c).abs() <= 1e-9 * b.c);
    }

    #[test]
    fn envelope_monotone_in_window(a in 0.0f64..20.0, b in 20.0f64..40.0, extra in 0.0f64..10.0) {
        let s = series(|v| (1.0 + (0.7 * v).sin().abs()) / (1.0 + v), 0.0, 50.0, 300);
        let small = check_envelope_in(&s, EnvelopeBound::OneOverV, (a, b), 0.1);
        let big = check_envelope_in(&s, EnvelopeBound::OneOverV, ((a - extra).max(0.0), b + extra), 0.1);
        prop_assert!(big.c_min >= small.c_min);
    }

    #[test]
    fn exact_power_law_any_exponent(p in 0.1f64..6.0, c in 0.01f64..100.0) {
        let s = series(|v| c * v.powf(-p), 1.0, 300.0, 500);
        let fit = fit_exponent(&s, None).unwrap();
        prop_assert!((fit.p - p).abs() < 1e-10);
        prop_assert!(fit.residual_rms < 1e-10);
    }
}

fn grid(delta: f64) -> GridSpec<f64> {
    GridSpec::new(0.0, 20.0, 0.0, 30.0, delta).unwrap()
}

#[test]
fn zero_history_series_is_zero() {
    let h = evolve(&grid(0.25), &InitialData::zero(), &BackgroundParams::new(1.0).unwrap(), &Potential::massless())
        .unwrap();
    for c in [CurveSpec::RConst { r: 4.0 }, CurveSpec::VConst { v: 25.0 }, CurveSpec::HorizonProxy] {
        let s: Series = extract_series(&h, &c, Quantity::Phi).unwrap();
        assert!(s.len() >= 16);
        assert!(s.y.iter().all(|y| *y == 0.0));
    }
}

#[test]
fn coulomb_field_strength_is_constant_on_r_const() {
    let h =
        evolve(&grid(0.125), &InitialData::coulomb(0.5), &BackgroundParams::new(1.0).unwrap(), &Potential::massless())
            .unwrap();
    let s: Series = extract_series(&h, &CurveSpec::RConst { r: 4.0 }, Quantity::Fvw).unwrap();
    let expect = 0.5 * 0.5 / (2.0 * 16.0);
    for y in &s.y {
        assert!((y - expect).abs() < 1e-4 * expect, "{y} vs {expect}");
    }
    assert!(s.x.windows(2).all(|p| p[1] > p[0]));
}

#[test]
fn series_refines_at_second_order() {
    let data = InitialData {
        profile: ProfileKind::CompactBump,
        amplitude: 0.1,
        center: 8.0,
        width: 3.0,
        frequency: 0.5,
        charge: 0.05,
    };
    let bg = BackgroundParams::new(1.0).unwrap();
    let at = |d: f64| {
        let h = evolve(&grid(d), &data, &bg, &Potential::Quartic { c2: 1.0 }).unwrap();
        let s: Series = extract_series(&h, &CurveSpec::WConst { w: 5.0 }, Quantity::Phi).unwrap();
        let j = s.x.iter().position(|&v| (v - 20.0).abs() < 1e-9).unwrap();
        s.y[j]
    };
    let (a, b, c) = (at(0.25), at(0.125), at(0.0625));
    let p = ((a - b) / (b - c)).abs().log2();
    assert!((1.7..2.3).contains(&p), "{a} {b} {c} order {p}");
}

#[test]
fn curve_outside_grid_is_rejected() {
    let h =
        evolve(&grid(0.5), &InitialData::zero(), &BackgroundParams::new(1.0).unwrap(), &Potential::massless()).unwrap();
    assert!(extract_series::<f64, _>(&h, &CurveSpec::WConst { w: 19.9 }, Quantity::Phi).is_err());
    assert!(extract_series::<f64, _>(&h, &CurveSpec::VConst { v: 99.0 }, Quantity::Phi).is_err());
}
