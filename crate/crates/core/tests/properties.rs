use jrs_core::{
    audit_properties, integrate_rq, jacobian_determinant, junction_bounds, junction_root_function,
    phi_residual_scaled, s_integral, smooth_section_psi, solve_classical, solve_junction,
    sonic_bounds, transmit, AuditConfig, CouplingKind, Family, GasLaw64, Junction, RiemannProblem,
    Side, State, WaveKind,
};
use proptest::prelude::*;

fn law() -> GasLaw64 {
    GasLaw64::default()
}

/// Subsonic state with density in `[0.3, 4]` and `|Mach| ≤ mach`.
fn subsonic(mach: f64) -> impl Strategy<Value = State<f64>> {
    (0.3f64..4.0, -mach..mach).prop_map(|(rho, m)| State {
        rho,
        q: m * rho * law().sound_speed(rho).unwrap(),
    })
}

fn any_kind() -> impl Strategy<Value = CouplingKind> {
    prop_oneof![
        Just(CouplingKind::LinearMomentum),
        Just(CouplingKind::EqualPressure),
        Just(CouplingKind::DynamicPressure),
        Just(CouplingKind::SmoothSection),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn pressure_is_increasing_and_convex(rho in 0.01f64..10.0, gamma in 1.0f64..3.0) {
        let law = GasLaw64::new(gamma, 1.0, 1.0).unwrap();
        let h = 1e-3 * rho;
        let (a, b, c) = (law.pressure(rho - h).unwrap(), law.pressure(rho).unwrap(), law.pressure(rho + h).unwrap());
        prop_assert!(a < b && b < c);
        prop_assert!(a - 2.0 * b + c >= -1e-9);
    }

    #[test]
    fn eigenvalue_gap_and_even_flux(u in subsonic(3.0)) {
        let law = law();
        let gap = law.lambda2(&u).unwrap() - law.lambda1(&u).unwrap();
        let c = law.sound_speed(u.rho).unwrap();
        prop_assert!((gap - 2.0 * c).abs() <= 1e-12 * c);
        prop_assert_eq!(law.momentum_flux(&u).unwrap(), law.momentum_flux(&u.reflected()).unwrap());
        let rest = State { rho: u.rho, q: 0.0 };
        prop_assert!(law.is_subsonic(&rest).unwrap());
    }

    #[test]
    fn sonic_bounds_are_ordered_and_sonic(u in subsonic(0.95)) {
        let law = law();
        let b = sonic_bounds(&law, &u, Side::Left).unwrap();
        prop_assert!(b.fu <= u.rho && u.rho <= b.fd);
        let r = sonic_bounds(&law, &u, Side::Right).unwrap();
        prop_assert!(r.fd <= u.rho && u.rho <= r.fu);
    }

    #[test]
    fn ode_path_invariants(u in subsonic(0.9), a_l in 0.5f64..2.0, stretch in 1.05f64..3.0) {
        let law = law();
        let a_target = a_l * stretch;
        let path = integrate_rq(&law, a_l, &u, a_target, 1e-8).unwrap();
        let m = a_l * u.q;
        for w in path.samples.windows(2) {
            if u.q != 0.0 {
                prop_assert!(w[1].r > w[0].r);
            } else {
                prop_assert_eq!(w[1].r, u.rho);
            }
        }
        for s in &path.samples {
            prop_assert!((s.a * s.q - m).abs() <= 2.0 * f64::EPSILON * m.abs());
            let on_path = State { rho: s.r, q: s.q };
            prop_assert!(law.is_subsonic(&on_path).unwrap());
        }
        let end = path.end();
        let identity = a_target * law.momentum_flux(&State { rho: end.r, q: end.q }).unwrap()
            - a_l * law.momentum_flux(&u).unwrap();
        prop_assert!((identity - path.pressure_integral).abs() < 1e-6);
        let mirrored = integrate_rq(&law, a_l, &u.reflected(), a_target, 1e-8).unwrap();
        prop_assert!((mirrored.end().r - end.r).abs() <= 1e-12 * end.r);
        let direct = s_integral(&law, a_l, &u, a_target, 1e-8).unwrap();
        prop_assert!((direct - path.pressure_integral).abs() < 1e-6);
    }

    #[test]
    fn transmit_solves_the_coupling(kind in any_kind(), u in subsonic(0.4), a_l in 0.7f64..1.4, a_r in 0.7f64..1.4) {
        let law = law();
        let j = Junction::new(a_l, a_r, kind).unwrap();
        if let Ok(u_r) = transmit(&law, &j, &u) {
            let r = phi_residual_scaled(&law, &j, &u, &u_r, 1e-10).unwrap();
            prop_assert!(r[0].abs() < 1e-8 && r[1].abs() < 1e-8, "{:?}", r);
        }
    }

    #[test]
    fn junction_fans_are_admissible(kind in any_kind(), l in subsonic(0.7), r in subsonic(0.7), a_l in 0.5f64..2.0, a_r in 0.5f64..2.0) {
        let law = law();
        let p = RiemannProblem::new(&law, Junction::new(a_l, a_r, kind).unwrap(), l, r).unwrap();
        let report = solve_junction(&law, &p).unwrap();
        let Some(fan) = report.fan else { return Ok(()); };
        let res = phi_residual_scaled(&law, &p.junction, &fan.trace_minus, &fan.trace_plus, 1e-10).unwrap();
        prop_assert!(res[1].abs() < 1e-8, "{:?}", res);
        prop_assert!((a_l * fan.trace_minus.q - a_r * fan.trace_plus.q).abs() < 1e-10);
        prop_assert!(law.is_subsonic(&fan.trace_minus).unwrap() || report.certificate.boundary);
        prop_assert!(law.is_subsonic(&fan.trace_plus).unwrap() || report.certificate.boundary);
        if let Some(w) = fan.left_wave {
            prop_assert!(w.speed_right <= 1e-12);
        }
        if let Some(w) = fan.right_wave {
            prop_assert!(w.speed_left >= -1e-12);
        }
        for w in fan.waves() {
            let lambda = |u: &State<f64>| match w.family {
                Family::One => law.lambda1(u).unwrap(),
                Family::Two => law.lambda2(u).unwrap(),
            };
            match w.kind {
                WaveKind::Shock => {
                    prop_assert!(lambda(&w.u_left) > w.speed_left && w.speed_left > lambda(&w.u_right));
                    let s = jrs_core::shock_speed(&law, &w.u_left, &w.u_right).unwrap();
                    prop_assert!(s.mismatch < 1e-8 * s.speed.abs().max(1.0));
                }
                WaveKind::Rarefaction => prop_assert!(w.speed_left <= w.speed_right),
            }
        }
    }

    #[test]
    fn equal_sections_match_classical(kind in any_kind(), l in subsonic(0.4), r in subsonic(0.4), a in 0.5f64..2.0) {
        let law = law();
        let classical = solve_classical(&law, &l, &r).unwrap();
        let p = RiemannProblem::new(&law, Junction::new(a, a, kind).unwrap(), l, r).unwrap();
        if let Some(fan) = solve_junction(&law, &p).unwrap().fan {
            prop_assert!((fan.trace_minus.rho - classical.trace_minus.rho).abs() < 1e-8);
            prop_assert!((fan.trace_minus.q - classical.trace_minus.q).abs() < 1e-8);
        } else {
            // Only a supersonic classical middle state can be refused.
            prop_assert!(!law.is_subsonic(&classical.trace_minus).unwrap());
        }
    }

    #[test]
    fn rarefaction_interior_matches_characteristic_speed(l in subsonic(0.5), r in subsonic(0.5), frac in 0.05f64..0.95) {
        let law = law();
        let fan = solve_classical(&law, &l, &r).unwrap();
        for w in fan.waves().filter(|w| w.kind == WaveKind::Rarefaction) {
            let xi = w.speed_left + frac * (w.speed_right - w.speed_left);
            let u = fan.sample(1.0, xi).unwrap();
            let lambda = match w.family {
                Family::One => law.lambda1(&u).unwrap(),
                Family::Two => law.lambda2(&u).unwrap(),
            };
            prop_assert!((lambda - xi).abs() < 1e-8);
        }
    }
}

#[test]
fn jacobian_is_positive_on_subsonic_samples() {
    use rand::{Rng, SeedableRng};
    let law = law();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let rho: f64 = rng.gen_range(0.1..5.0);
        let m: f64 = rng.gen_range(-0.999..0.999);
        let u = State {
            rho,
            q: m * rho * law.sound_speed(rho).unwrap(),
        };
        let a_r = rng.gen_range(0.2..5.0);
        for kind in CouplingKind::ALL {
            let j = Junction::new(1.0, a_r, kind).unwrap();
            assert!(jacobian_determinant(&law, &j, &u).unwrap() > 0.0);
        }
    }
}

#[test]
fn root_functions_are_monotone_on_the_window() {
    let law = law();
    let st = |rho, q| State { rho, q };
    for kind in CouplingKind::ALL {
        for (a_l, a_r, l, r) in [
            (1.0, 2.0, st(1.0, 0.0), st(1.0, 0.0)),
            (1.0, 2.0, st(2.2, 1.387882), st(1.5, 0.5)),
        ] {
            let p =
                RiemannProblem::new(&law, Junction::new(a_l, a_r, kind).unwrap(), l, r).unwrap();
            let b = junction_bounds(&law, &p).unwrap();
            let (lo, hi) = match kind {
                CouplingKind::SmoothSection => (b.left.fu, b.left.fd),
                _ => (b.l_prime.unwrap(), b.l_double_prime.unwrap()),
            };
            let values: Vec<f64> = (0..100)
                .map(|i| lo + (hi - lo) * i as f64 / 99.0)
                .map(|x| junction_root_function(&law, &p, x).unwrap())
                .collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]), "{kind}: {values:?}");
            if kind == CouplingKind::SmoothSection {
                let psi: Vec<f64> = (0..100)
                    .map(|i| {
                        smooth_section_psi(&law, &p, lo + (hi - lo) * i as f64 / 99.0).unwrap()
                    })
                    .collect();
                assert!(psi.windows(2).all(|w| w[1] > w[0]));
            }
        }
    }
}

#[test]
fn property_audit_per_kind() {
    let law = law();
    let config = AuditConfig {
        samples: 1000,
        ..AuditConfig::default()
    };
    for kind in CouplingKind::ALL {
        let report = audit_properties(&law, kind, &config).unwrap();
        assert_eq!(report.no_junction.checked, 1000, "{kind}: {report:?}");
        assert!(report.no_junction.holds(1e-8), "{kind}: {report:?}");
        assert!(report.symmetry.holds(1e-6), "{kind}: {report:?}");
        assert!(report.consistency.holds(1e-6), "{kind}: {report:?}");
        assert!(report.min_determinant > 0.0);
        match kind {
            CouplingKind::LinearMomentum => assert!(report.hydrostatic.min_violation > 0.0),
            _ => assert!(report.hydrostatic.holds(1e-8), "{kind}: {report:?}"),
        }
    }
}
