use approx::assert_relative_eq;
use mhdecay_core::fields::*;
use mhdecay_core::geometry::*;
use mhdecay_core::grid::NodeArray;
use mhdecay_core::{Background, Potential, C};
use proptest::prelude::*;

fn bg(m: f64) -> Background {
    BackgroundParams::new(m).unwrap()
}

#[test]
fn lapse_examples() {
    assert_relative_eq!(lapse(&bg(1.0), 4.0).unwrap(), 0.5);
    assert_relative_eq!(lapse(&bg(1.0), 3.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    assert_eq!(lapse(&bg(0.0), 7.0).unwrap(), 1.0);
}

#[test]
fn lapse_rejects_interior() {
    assert!(matches!(lapse(&bg(1.0), 1.5), Err(mhdecay_core::Error::NotExterior { .. })));
    assert!(lapse(&bg(1.0), 2.0).is_err());
}

#[test]
fn tortoise_examples() {
    let e = std::f64::consts::E;
    assert_relative_eq!(tortoise(&bg(0.5), 2.0).unwrap(), 2.0, epsilon = 1e-14);
    assert_relative_eq!(tortoise(&bg(0.5), 1.0 + e).unwrap(), 2.0 + e, epsilon = 1e-14);
    assert_relative_eq!(tortoise(&bg(1.0), 4.0).unwrap(), 4.0 + 2.0 * 2f64.ln(), epsilon = 1e-14);
    assert_eq!(tortoise(&bg(0.0), 3.5).unwrap(), 3.5);
}

#[test]
fn inverse_tortoise_examples() {
    assert_relative_eq!(radius_from_tortoise(&bg(0.5), 2.0).unwrap(), 2.0, epsilon = 1e-12);
    assert_relative_eq!(radius_from_tortoise(&bg(1.0), 4.0 + 2.0 * 2f64.ln()).unwrap(), 4.0, epsilon = 1e-12);
}

#[test]
fn inverse_tortoise_sweep() {
    for &m in &[0.5, 1.0, 3.0] {
        let b = bg(m);
        let n = 2000;
        for k in 0..=n {
            // log-spaced from 2m + 1e-3 to 1e3
            let r = 2.0 * m + 1e-3 * (1e3 / 1e-3f64).powf(k as f64 / n as f64);
            if r > 1e3 {
                continue;
            }
            let back = radius_from_tortoise(&b, tortoise(&b, r).unwrap()).unwrap();
            assert!((back - r).abs() <= 1e-10 * r.max(1.0), "m={m} r={r} back={back}");
        }
    }
}

#[test]
fn tortoise_derivative_is_inverse_lapse() {
    let b = bg(1.0);
    let h = 1e-5;
    for &r in &[2.1, 2.5, 3.0, 5.0, 20.0, 300.0] {
        let fd = (tortoise(&b, r + h).unwrap() - tortoise(&b, r - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(fd, 1.0 / lapse(&b, r).unwrap(), max_relative = 1e-6);
    }
}

#[test]
fn null_coordinate_examples() {
    assert_eq!(to_null(5.0, 3.0), (2.0, 8.0));
    assert_eq!(from_null(2.0, 8.0), (5.0, 3.0));
    assert_eq!(to_null(0.0, 0.0), (0.0, 0.0));
}

#[test]
fn deep_horizon_lapse_stays_positive() {
    let b = bg(1.0);
    let (r, om) = lapse_from_tortoise(&b, -60.0).unwrap();
    assert!(r > 2.0 && om > 0.0 && om < 1e-12);
}

proptest! {
    #[test]
    fn tortoise_monotone(a in 2.0001f64..500.0, d in 1e-6f64..10.0) {
        let b = bg(1.0);
        prop_assert!(tortoise(&b, a + d).unwrap() > tortoise(&b, a).unwrap());
    }

    #[test]
    fn null_round_trip(t in -1e3f64..1e3, s in -1e3f64..1e3) {
        let (w, v) = to_null(t, s);
        let (t2, s2) = from_null(w, v);
        prop_assert!((t2 - t).abs() <= 4.0 * f64::EPSILON * (t.abs() + s.abs()).max(1.0));
        prop_assert!((s2 - s).abs() <= 4.0 * f64::EPSILON * (t.abs() + s.abs()).max(1.0));
    }

    #[test]
    fn inverse_tortoise_round_trip(rs in -11.0f64..400.0) {
        let b = bg(1.0);
        let r = radius_from_tortoise(&b, rs).unwrap();
        prop_assert!(r > 2.0);
        prop_assert!((tortoise(&b, r).unwrap() - rs).abs() <= 1e-9 * rs.abs().max(1.0));
    }
}

#[test]
fn potential_value_examples() {
    let c = |re: f64, im: f64| C::new(re, im);
    assert_relative_eq!(potential_value(&Potential::Mass { c1: 2.0 }, c(3.0, 0.0)), 18.0);
    let sg = Potential::SineGordon { c3: 1.0, eta: std::f64::consts::PI };
    assert_relative_eq!(potential_value(&sg, c(0.0, 1.0)), 2.0);
    assert_relative_eq!(potential_value(&Potential::Toda { c4: 3.0, lambda: 1.0 }, c(0.0, 0.0)), 3.0);
}

#[test]
fn potential_derivative_examples() {
    let d = potential_derivative(&Potential::Mass { c1: 2.0 }, C::new(1.0, 1.0));
    assert_relative_eq!(d.re, 2.0);
    assert_relative_eq!(d.im, 2.0);
    let q = potential_derivative(&Potential::Quartic { c2: 1.0 }, C::new(1.0, 0.0));
    assert_relative_eq!(q.re, 2.0);
    assert_eq!(q.im, 0.0);
    let zero = C::new(0.0, 0.0);
    for p in [
        Potential::Mass { c1: 2.0 },
        Potential::Quartic { c2: 1.5 },
        Potential::SineGordon { c3: 1.0, eta: 2.0 },
        Potential::Toda { c4: 1.0, lambda: 2.0 },
    ] {
        let d = potential_derivative(&p, zero);
        assert!(d.re == 0.0 && d.im == 0.0, "{p:?}");
    }
    assert!(toda_flagged(&Potential::Toda { c4: 1.0, lambda: 2.0 }, C::new(1e-13, 0.0)));
    assert!(!toda_flagged(&Potential::Toda { c4: 1.0, lambda: 2.0 }, C::new(1e-3, 0.0)));
}

#[test]
fn potential_derivative_matches_finite_difference() {
    // dP/d(phi bar) = (d_re + i d_im) P / 2
    let h = 1e-6;
    let phi = C::new(0.4, -0.3);
    for p in [
        Potential::Mass { c1: 1.3 },
        Potential::Quartic { c2: 0.7 },
        Potential::SineGordon { c3: 1.1, eta: 2.0 },
        Potential::Toda { c4: 0.9, lambda: 1.5 },
    ] {
        let dre = (potential_value(&p, phi + C::new(h, 0.0)) - potential_value(&p, phi - C::new(h, 0.0))) / (2.0 * h);
        let dim = (potential_value(&p, phi + C::new(0.0, h)) - potential_value(&p, phi - C::new(0.0, h))) / (2.0 * h);
        let d = potential_derivative(&p, phi);
        assert!((d.re - 0.5 * dre).abs() < 1e-8, "{p:?}");
        assert!((d.im - 0.5 * dim).abs() < 1e-8, "{p:?}");
    }
}

#[test]
fn potential_validation() {
    assert!(Potential::Mass { c1: -1.0 }.validate().is_err());
    assert!(Potential::Toda { c4: 1.0, lambda: 0.0 }.validate().is_err());
    assert!(Potential::SineGordon { c3: 1.0, eta: 1.0 }.validate().is_ok());
}

#[test]
fn covariant_derivative_examples() {
    let x = C::new(0.3, -0.8);
    let y = C::new(1.2, 0.5);
    assert_eq!(covariant_derivative(x, 0.0, y), x);
    assert_eq!(covariant_derivative(C::new(0.0, 0.0), 1.0, C::new(0.0, 1.0)), C::new(1.0, 0.0));
    assert_eq!(covariant_derivative(C::new(1.0, 0.0), 2.0, C::new(1.0, 0.0)), C::new(1.0, -2.0));
}

#[test]
fn current_density_examples() {
    assert_eq!(current_density(C::new(0.7, 0.0), C::new(-0.2, 0.0)), 0.0);
    assert_eq!(current_density(C::new(0.0, 0.0), C::new(1.0, 2.0)), 0.0);
    let phi = C::new(0.6, -0.4);
    let omega = 1.7;
    let j = current_density(phi, C::new(0.0, omega) * phi);
    assert_relative_eq!(j, 2.0 * omega * phi.norm_sqr(), epsilon = 1e-14);
}

#[test]
fn field_strength_examples() {
    let (nw, nv, d) = (6, 7, 0.25);
    let c = NodeArray::filled(nw, nv, 0.8f64);
    let f = field_strength(&c, &c, d).unwrap();
    assert!(f.as_slice().iter().all(|x| x.abs() < 1e-14));
    let a_w = NodeArray::from_fn(nw, nv, |_, j| j as f64 * d);
    let a_v = NodeArray::filled(nw, nv, 0.0);
    let f = field_strength(&a_w, &a_v, d).unwrap();
    assert!(f.as_slice().iter().all(|x| (x - 1.0).abs() < 1e-13));
    let tiny = NodeArray::filled(1, 3, 0.0);
    assert!(field_strength(&tiny, &tiny, d).is_err());
}

#[test]
fn field_strength_gauge_invariance_converges() {
    let err = |n: usize| {
        let d = 2.0 / (n - 1) as f64;
        let chi = |w: f64, v: f64| (1.3 * w).sin() * (0.7 * v).cos();
        let a_w = NodeArray::from_fn(n, n, |i, j| (i as f64 * d * 0.5).cos() * (j as f64 * d));
        let a_v = NodeArray::from_fn(n, n, |i, j| (j as f64 * d).sin() + i as f64 * d);
        let f0 = field_strength(&a_w, &a_v, d).unwrap();
        // numerical gradient of chi added to A
        let h = 1e-6;
        let a_w2 = NodeArray::from_fn(n, n, |i, j| {
            let (w, v) = (i as f64 * d, j as f64 * d);
            a_w.get(i, j) + (chi(w + h, v) - chi(w - h, v)) / (2.0 * h)
        });
        let a_v2 = NodeArray::from_fn(n, n, |i, j| {
            let (w, v) = (i as f64 * d, j as f64 * d);
            a_v.get(i, j) + (chi(w, v + h) - chi(w, v - h)) / (2.0 * h)
        });
        let f1 = field_strength(&a_w2, &a_v2, d).unwrap();
        f0.as_slice().iter().zip(f1.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(33), err(65));
    let ratio = e1 / e2;
    assert!((3.0..5.0).contains(&ratio), "ratio {ratio} ({e1}, {e2})");
}

#[test]
fn gauge_transform_keeps_invariants() {
    let s: FieldSample<f64> = FieldSample {
        phi: C::new(0.3, 0.1),
        a_w: 0.2,
        a_v: -0.4,
        f_vw: 0.05,
        dw_phi: C::new(0.1, 0.2),
        dv_phi: C::new(-0.3, 0.0),
    };
    let p = Potential::Quartic { c2: 2.0 };
    let g = s.gauge_transform(1.1, 0.3, -0.7);
    assert!((g.phi.norm() - s.phi.norm()).abs() < 1e-14);
    assert!((g.dw_phi.norm() - s.dw_phi.norm()).abs() < 1e-14);
    assert!((g.dv_phi.norm() - s.dv_phi.norm()).abs() < 1e-14);
    assert_eq!(g.f_vw, s.f_vw);
    assert!((potential_value(&p, g.phi) - potential_value(&p, s.phi)).abs() < 1e-14);
}
