use mhdecay_core::evolution::*;
use mhdecay_core::geometry::BackgroundParams;
use mhdecay_core::grid::{GridSpec, RadialCache};
use mhdecay_core::initial::*;
use mhdecay_core::manufactured::Manufactured;
use mhdecay_core::modes::*;
use mhdecay_core::residual::{covariant_residual, gauss_residual};
use mhdecay_core::{Background, Data, Grid, Potential, C};

fn bg(m: f64) -> Background {
    BackgroundParams::new(m).unwrap()
}

fn pulse(charge: f64) -> Data {
    InitialData { profile: ProfileKind::CompactBump, amplitude: 0.3, center: 10.0, width: 2.0, frequency: 1.0, charge }
}

fn grid(delta: f64) -> Grid {
    GridSpec::new(0.0, 12.0, 6.0, 18.0, delta).unwrap()
}

#[test]
fn grid_validation() {
    assert!(GridSpec::new(1.0, 0.0, 0.0, 1.0, 0.1).is_err());
    assert!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 0.0).is_err());
    let g = GridSpec::new(0.0, 2.0, 5.0, 6.0, 0.25).unwrap();
    assert_eq!((g.nw(), g.nv()), (9, 5));
    assert_eq!(g.index_v(5.5), Some(2));
    assert_eq!(g.refined(2).nw(), 17);
}

#[test]
fn zero_data_gives_zero_history() {
    let h = evolve(&grid(0.25), &InitialData::zero(), &bg(1.0), &Potential::Quartic { c2: 1.0 }).unwrap();
    assert!(h.phi.as_slice().iter().all(|z| *z == C::new(0.0, 0.0)));
    assert!(h.q.as_slice().iter().all(|q| *q == 0.0));
    assert_eq!(gauss_residual(&h).max, 0.0);
    assert_eq!(covariant_residual(&h).max(), 0.0);
}

#[test]
fn coulomb_data_is_static() {
    let h = evolve(&grid(0.25), &InitialData::coulomb(0.7), &bg(1.0), &Potential::Mass { c1: 0.5 }).unwrap();
    assert!(h.phi.as_slice().iter().all(|z| z.norm() == 0.0));
    assert!(h.q.as_slice().iter().all(|q| (q - 0.7).abs() < 1e-15));
    assert!(gauss_residual(&h).max < 1e-14);
    // F_vw = Omega Q / (2 r^2)
    for &(i, j) in &[(3, 5), (20, 40), (47, 10)] {
        let expect = h.omega(i, j) * 0.7 / (2.0 * h.r(i, j).powi(2));
        assert!((h.f_vw(i, j) - expect).abs() < 1e-12);
    }
}

#[test]
fn initial_rays_for_zero_profile() {
    let g = grid(0.5);
    let cache = RadialCache::new(&bg(1.0), &g).unwrap();
    let r = initialize(&g, &InitialData::zero(), &cache, &GaugeSpec::trivial()).unwrap();
    assert!(r.psi_w0.iter().chain(&r.psi_v0).all(|z| z.norm() == 0.0));
    assert!(r.q_w0.iter().chain(&r.q_v0).all(|q| *q == 0.0));
    let r = initialize(&g, &InitialData::coulomb(1.0), &cache, &GaugeSpec::trivial()).unwrap();
    assert!(r.q_w0.iter().chain(&r.q_v0).all(|q| *q == 1.0));
}

#[test]
fn support_outside_ray_is_rejected() {
    let mut d = pulse(0.0);
    d.center = 30.0;
    let err = evolve(&grid(0.5), &d, &bg(1.0), &Potential::massless()).unwrap_err();
    assert!(matches!(err, mhdecay_core::Error::Support { .. }));
}

#[test]
fn gaussian_gauss_residual_converges() {
    let d = InitialData {
        profile: ProfileKind::Gaussian,
        amplitude: 1e-3,
        center: 12.0,
        width: 0.6,
        frequency: 1.0,
        charge: 0.1,
    };
    let g0 = GridSpec::new(0.0, 6.0, 6.0, 18.0, 1.0 / 16.0).unwrap();
    let res = |g: &Grid| gauss_residual(&evolve(g, &d, &bg(1.0), &Potential::massless()).unwrap()).max;
    let (a, b) = (res(&g0), res(&g0.refined(2)));
    let ratio = a / b;
    assert!((3.5..4.5).contains(&ratio), "{a} {b} ratio {ratio}");
}

#[test]
fn charged_pulse_residuals_converge() {
    let run = |d: f64| evolve(&grid(d), &pulse(0.2), &bg(1.0), &Potential::Quartic { c2: 1.0 }).unwrap();
    let (h1, h2) = (run(1.0 / 16.0), run(1.0 / 32.0));
    let g = gauss_residual(&h1).max / gauss_residual(&h2).max;
    let c = covariant_residual(&h1).max() / covariant_residual(&h2).max();
    assert!((3.4..4.6).contains(&g), "gauss ratio {g}");
    assert!((3.4..4.6).contains(&c), "covariant ratio {c}");
}

#[test]
fn all_zero_corners_stay_zero() {
    let b = bg(1.0);
    let geo = CellGeometry::at(&b, 1.0, 9.0, 0.1).unwrap();
    let z = Corner::default();
    for p in [Potential::Mass { c1: 1.0 }, Potential::Quartic { c2: 2.0 }, Potential::SineGordon { c3: 1.0, eta: 3.0 }]
    {
        let scheme = Scheme { bg: b, potential: p, delta: 0.1, options: SchemeOptions::default(), forcing: None };
        let ne = step_diamond(&z, &z, &z, &geo, &scheme).unwrap();
        assert_eq!(ne, Corner::default());
    }
}

#[test]
fn flat_free_wave_is_transported() {
    // m = 0, l = 0: psi(w, v) = g(v)
    let g = GridSpec::new(0.0, 4.0, 10.0, 20.0, 0.05).unwrap();
    let data = InitialData {
        profile: ProfileKind::CompactBump,
        amplitude: 1.0,
        center: 15.0,
        width: 3.0,
        frequency: 0.0,
        charge: 0.0,
    };
    let spec = ModeSpec::new(0, 0, None).unwrap();
    let h = evolve_mode(&spec, &g, &data, &BackgroundParams::flat()).unwrap();
    let mut err = 0.0f64;
    for i in 0..h.nw() {
        for j in 0..h.nv() {
            err = err.max((h.psi.get(i, j) - h.psi.get(0, j)).norm());
        }
    }
    assert!(err < 1e-13, "max deviation {err}");
    // nonlinear sector, uncharged and massless: r phi is transported the same way
    let nl = evolve(&g, &data, &BackgroundParams::flat(), &Potential::massless()).unwrap();
    let mut err = 0.0f64;
    for i in 0..nl.nw() {
        for j in 0..nl.nv() {
            let psi = |i: usize| nl.phi.get(i, j) * nl.r(i, j);
            err = err.max((psi(i) - psi(0)).norm());
        }
    }
    assert!(err < 1e-12, "nonlinear max deviation {err}");
}

#[test]
fn mode_potential_examples() {
    let s1 = ModeSpec::new(1, 1, None).unwrap();
    assert!((mode_potential(&s1, &bg(1.0), 3.0) - 2.0 / 9.0).abs() < 1e-15);
    let s0 = ModeSpec::new(0, 0, None).unwrap();
    assert_eq!(mode_potential(&s0, &BackgroundParams::flat(), 5.0), 0.0);
    assert!((mode_potential(&s0, &bg(1.0), 4.0) - 2.0 / 64.0).abs() < 1e-15);
}

#[test]
fn mode_spec_validation() {
    assert!(ModeSpec::<f64>::new(1, 0, None).is_err());
    assert!(ModeSpec::<f64>::new(2, 3, None).is_err());
    assert!(ModeSpec::new(1, 1, Some(Potential::Mass { c1: 1.0 })).is_err());
    assert!(ModeSpec::new(0, 1, Some(Potential::Toda { c4: 1.0, lambda: 1.0 })).is_err());
    let sg = ModeSpec::new(0, 0, Some(Potential::SineGordon { c3: 2.0, eta: 3.0 })).unwrap();
    assert_eq!(sg.mass_coefficient().unwrap(), 9.0);
}

#[test]
fn mode_evolution_is_linear() {
    let g = GridSpec::new(0.0, 20.0, 0.0, 30.0, 0.125).unwrap();
    let spec = ModeSpec::new(0, 1, Some(Potential::Mass { c1: 0.3 })).unwrap();
    let d1 = InitialData {
        profile: ProfileKind::CompactBump,
        amplitude: 1.0,
        center: 8.0,
        width: 3.0,
        frequency: 0.0,
        charge: 0.0,
    };
    let d2 = InitialData {
        profile: ProfileKind::Gaussian,
        amplitude: 1.0,
        center: 12.0,
        width: 1.0,
        frequency: 0.5,
        charge: 0.0,
    };
    let run = |w0: Vec<C<f64>>| {
        let v0 = vec![C::new(0.0, 0.0); g.nw()];
        evolve_mode_from_rays(&spec, &g, &w0, &v0, &bg(1.0), Fault::None).unwrap()
    };
    let ray = |d: &Data| (0..g.nv()).map(|j| d.phi_on_ray(g.v(j)).0).collect::<Vec<_>>();
    let (r1, r2) = (ray(&d1), ray(&d2));
    let (a, b) = (2.5, -0.75);
    let combo: Vec<C<f64>> = r1.iter().zip(&r2).map(|(x, y)| x * a + y * b).collect();
    let (h1, h2, h) = (run(r1), run(r2), run(combo));
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for (k, z) in h.psi.as_slice().iter().enumerate() {
        let lin = h1.psi.as_slice()[k] * a + h2.psi.as_slice()[k] * b;
        err = err.max((z - lin).norm());
        scale = scale.max(z.norm());
    }
    assert!(err <= 1e-12 * scale.max(1.0), "{err}");
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    let m = Manufactured::standard();
    let g = GridSpec::new(0.0, 4.0, 6.0, 10.0, 1.0 / 16.0).unwrap();
    let (e1, e2) = (m.errors(&g).unwrap(), m.errors(&g.refined(2)).unwrap());
    for k in 0..3 {
        let p = (e1[k] / e2[k]).log2();
        assert!((1.8..=2.2).contains(&p), "component {k}: order {p}");
    }
}

#[test]
fn first_order_fault_is_detected() {
    let g = GridSpec::new(0.0, 4.0, 6.0, 10.0, 1.0 / 16.0).unwrap();
    let data = InitialData {
        profile: ProfileKind::CompactBump,
        amplitude: 1.0,
        center: 8.0,
        width: 1.5,
        frequency: 0.0,
        charge: 0.0,
    };
    let spec = ModeSpec::new(0, 1, None).unwrap();
    let probe = |g: &Grid, f: Fault| {
        let h = evolve_mode_with(&spec, g, &data, &bg(1.0), f).unwrap();
        h.psi.get(h.nw() - 1, h.nv() - 1)
    };
    let order = |f: Fault| {
        let vals: Vec<C<f64>> = [1, 2, 4].iter().map(|&k| probe(&g.refined(k), f)).collect();
        ((vals[0] - vals[1]).norm() / (vals[1] - vals[2]).norm()).log2()
    };
    let (good, bad) = (order(Fault::None), order(Fault::FirstOrder));
    assert!((1.7..2.3).contains(&good), "clean order {good}");
    assert!((0.7..1.3).contains(&bad), "faulty order {bad}");
}

#[test]
fn perturbation_outside_past_cone_leaves_probe_unchanged() {
    let g = grid(0.125);
    let b = bg(1.0);
    let cache = RadialCache::new(&b, &g).unwrap();
    let rays = initialize(&g, &pulse(0.2), &cache, &GaugeSpec::trivial()).unwrap();
    let p = Potential::Quartic { c2: 1.0 };
    let base = evolve_from_rays(&g, &rays, &b, &p, &SchemeOptions::default(), None, cache.clone()).unwrap();
    let (pi, pj) = (40, 50);
    let mut moved = rays.clone();
    for j in pj + 1..g.nv() {
        moved.psi_w0[j] += C::new(0.01, -0.02);
    }
    let h = evolve_from_rays(&g, &moved, &b, &p, &SchemeOptions::default(), None, cache).unwrap();
    for i in 0..=pi {
        for j in 0..=pj {
            assert_eq!(h.phi.get(i, j), base.phi.get(i, j));
            assert_eq!(h.q.get(i, j), base.q.get(i, j));
            assert_eq!(h.a_v.get(i, j), base.a_v.get(i, j));
        }
    }
    assert_ne!(h.phi.get(pi, pj + 1), base.phi.get(pi, pj + 1));
}

#[test]
fn mode_time_commutation_matches_reevolution() {
    // d_t psi solves the same equation; re-evolve from its values on the rays
    let spec = ModeSpec::new(0, 1, None).unwrap();
    let data = InitialData {
        profile: ProfileKind::CompactBump,
        amplitude: 1.0,
        center: 12.0,
        width: 3.0,
        frequency: 0.0,
        charge: 0.0,
    };
    let gap = |d: f64| {
        let g = GridSpec::new(0.0, 20.0, 6.0, 26.0, d).unwrap();
        let h = evolve_mode(&spec, &g, &data, &bg(1.0)).unwrap();
        let dt = h.time_commuted();
        let w0: Vec<C<f64>> = (0..g.nv()).map(|j| dt.psi.get(0, j)).collect();
        let v0: Vec<C<f64>> = (0..g.nw()).map(|i| dt.psi.get(i, 0)).collect();
        let re = evolve_mode_from_rays(&spec, &g, &w0, &v0, &bg(1.0), Fault::None).unwrap();
        let (i, j) = (g.index_w(10.0).unwrap(), g.index_v(20.0).unwrap());
        (re.psi.get(i, j) - dt.psi.get(i, j)).norm()
    };
    let (a, b) = (gap(0.125), gap(0.0625));
    assert!(a < 1e-2 && a / b > 3.0, "{a} {b}");
}

#[test]
fn near_horizon_nodes_are_excluded() {
    let g = GridSpec::new(0.0, 70.0, 0.0, 10.0, 0.25).unwrap();
    let h = evolve(&g, &InitialData::coulomb(0.1), &bg(1.0), &Potential::massless()).unwrap();
    assert!(h.stats.near_horizon_nodes > 0);
    assert!(h.excluded(h.nw() - 1, 0));
    assert!(!h.excluded(0, h.nv() - 1));
}
