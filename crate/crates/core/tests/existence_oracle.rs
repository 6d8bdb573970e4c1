#[path = "support/oracle.rs"]
mod oracle;

use jrs_core::{
    check_existence, sonic_bounds, CouplingKind, GasLaw64, Junction, RiemannProblem, Side, State,
};
use oracle::{brute_force, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem(law: &GasLaw64, kind: CouplingKind, rng: &mut ChaCha8Rng) -> RiemannProblem<f64> {
    let state = |rng: &mut ChaCha8Rng| {
        let rho: f64 = rng.gen_range(0.3..4.0);
        let mach: f64 = rng.gen_range(-0.9..0.9);
        State {
            rho,
            q: mach * rho * law.sound_speed(rho).unwrap(),
        }
    };
    let junction = Junction::new(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), kind).unwrap();
    let (l, r) = (state(rng), state(rng));
    RiemannProblem::new(law, junction, l, r).unwrap()
}

/// Sonic-ordering hypotheses under which no solution can exist, evaluated
/// independently of the solver.
fn sonic_ordering_forbids(law: &GasLaw64, p: &RiemannProblem<f64>) -> bool {
    let l = sonic_bounds(law, &p.u_bar_l, Side::Left).unwrap();
    let r = sonic_bounds(law, &p.u_bar_r, Side::Right).unwrap();
    let (a_l, a_r) = (p.junction.a_l, p.junction.a_r);
    let (upper, lower) = (l.fu > r.fu, l.fd < r.fd);
    match p.junction.kind {
        CouplingKind::EqualPressure | CouplingKind::DynamicPressure => upper || lower,
        CouplingKind::LinearMomentum => (a_l < a_r && lower) || (a_l > a_r && upper),
        CouplingKind::SmoothSection => (a_l < a_r && upper) || (a_l > a_r && lower),
    }
}

#[test]
fn certificates_agree_with_brute_force() {
    let law = GasLaw64::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for kind in CouplingKind::ALL {
        let (mut checked, mut exists, mut ambiguous, mut ordering_hits) = (0, 0, 0, 0);
        while checked < 50 {
            let p = random_problem(&law, kind, &mut rng);
            let verdict = brute_force(&law, &p, 400);
            if verdict == Verdict::Ambiguous {
                ambiguous += 1;
                continue;
            }
            let cert = check_existence(&law, &p).unwrap();
            assert_eq!(
                cert.exists,
                verdict == Verdict::Exists,
                "{kind}: {p:?} {cert:?}"
            );
            if sonic_ordering_forbids(&law, &p) {
                assert_eq!(
                    verdict,
                    Verdict::Absent,
                    "{kind}: sonic-ordering hypotheses hold on a solvable problem {p:?}"
                );
                ordering_hits += 1;
            }
            checked += 1;
            exists += cert.exists as usize;
        }
        eprintln!("{kind}: {exists}/50 solvable, {ordering_hits} refused by sonic ordering, {ambiguous} ambiguous draws skipped");
        assert!(
            exists > 0 && exists < 50,
            "{kind}: battery should mix outcomes"
        );
    }
}

#[test]
fn engineered_refusals_have_no_trace_pair() {
    use jrs_core::Refusal;
    let law = GasLaw64::default();
    let st = |rho, q| State { rho, q };
    let cases = [
        (
            CouplingKind::EqualPressure,
            (1.0, 2.0),
            st(8.0, 0.0),
            st(1.0, 0.0),
            Refusal::SonicUpper,
        ),
        (
            CouplingKind::EqualPressure,
            (1.0, 2.0),
            st(1.0, 0.0),
            st(8.0, 0.0),
            Refusal::SonicLower,
        ),
        (
            CouplingKind::DynamicPressure,
            (1.0, 2.0),
            st(8.0, 0.0),
            st(1.0, 0.0),
            Refusal::SonicUpper,
        ),
        (
            CouplingKind::DynamicPressure,
            (1.0, 2.0),
            st(1.0, 0.0),
            st(8.0, 0.0),
            Refusal::SonicLower,
        ),
        (
            CouplingKind::LinearMomentum,
            (1.0, 2.0),
            st(1.0, 0.0),
            st(8.0, 0.0),
            Refusal::ExpansionSonicLower,
        ),
        (
            CouplingKind::LinearMomentum,
            (2.0, 1.0),
            st(8.0, 0.0),
            st(1.0, 0.0),
            Refusal::ContractionSonicUpper,
        ),
        (
            CouplingKind::SmoothSection,
            (1.0, 2.0),
            st(8.0, 0.0),
            st(1.0, 0.0),
            Refusal::ExpansionSonicUpper,
        ),
        (
            CouplingKind::SmoothSection,
            (2.0, 1.0),
            st(1.0, 0.0),
            st(8.0, 0.0),
            Refusal::ContractionSonicLower,
        ),
    ];
    for (kind, (a_l, a_r), l, r, reason) in cases {
        let p = RiemannProblem::new(&law, Junction::new(a_l, a_r, kind).unwrap(), l, r).unwrap();
        let cert = check_existence(&law, &p).unwrap();
        assert_eq!((cert.exists, cert.reason), (false, Some(reason)), "{kind}");
        assert_eq!(
            brute_force(&law, &p, 400),
            Verdict::Absent,
            "{kind} {reason:?}"
        );
    }
}
