//! Brute-force existence oracle: scans a grid of candidate trace pairs
//! `(ρ₋, L₁(ρ₋; ū_l))`, `(ρ₊, L₂⁻(ρ₊; ū_r))` over the subsonic windows and
//! looks for cells where both junction residuals change sign.

use jrs_core::{
    lax_curve, s_integral, sonic_bounds, CouplingKind, Direction, Family, GasLaw64, RiemannProblem,
    Side, State,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Exists,
    Absent,
    /// Sign changes only in cells touching the edge of the windows, or the
    /// first residual vanishes next to nodes where the second is undefined.
    Ambiguous,
}

fn flux(law: &GasLaw64, u: &State<f64>) -> f64 {
    law.momentum_flux(u).unwrap()
}

fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn spans_zero(values: [f64; 4]) -> bool {
    if values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

/// Pressure integral along the section ODE, always taken towards the larger
/// section. Backwards from the narrow side the path can turn sonic; at matched
/// mass flux, integrating from the other trace yields a residual with the same
/// sign and zero set, because the stationary map is increasing in density.
fn integral(law: &GasLaw64, a_from: f64, u: &State<f64>, a_to: f64) -> f64 {
    s_integral(law, a_from, u, a_to, 1e-10).unwrap_or(f64::NAN)
}

pub fn brute_force(law: &GasLaw64, problem: &RiemannProblem<f64>, n: usize) -> Verdict {
    let j = problem.junction;
    let (a_l, a_r) = (j.a_l, j.a_r);
    let left = sonic_bounds(law, &problem.u_bar_l, Side::Left).unwrap();
    let right = sonic_bounds(law, &problem.u_bar_r, Side::Right).unwrap();
    // Row data depend on the left trace only, column data on the right one.
    let rows: Vec<(f64, f64)> = nodes(left.fu, left.fd, n)
        .into_iter()
        .map(|rho| {
            let q = lax_curve(law, Family::One, Direction::Forward, rho, &problem.u_bar_l).unwrap();
            let u = State { rho, q };
            let second = match j.kind {
                CouplingKind::LinearMomentum => a_l * flux(law, &u),
                CouplingKind::EqualPressure => law.pressure(rho).unwrap(),
                CouplingKind::DynamicPressure => flux(law, &u),
                CouplingKind::SmoothSection if a_l <= a_r => {
                    a_l * flux(law, &u) + integral(law, a_l, &u, a_r)
                }
                CouplingKind::SmoothSection => a_l * flux(law, &u),
            };
            (a_l * q, second)
        })
        .collect();
    let cols: Vec<(f64, f64)> = nodes(right.fd, right.fu, n)
        .into_iter()
        .map(|rho| {
            let q =
                lax_curve(law, Family::Two, Direction::Reversed, rho, &problem.u_bar_r).unwrap();
            let u = State { rho, q };
            let second = match j.kind {
                CouplingKind::SmoothSection if a_l > a_r => {
                    a_r * flux(law, &u) + integral(law, a_r, &u, a_l)
                }
                CouplingKind::LinearMomentum | CouplingKind::SmoothSection => a_r * flux(law, &u),
                CouplingKind::EqualPressure => law.pressure(rho).unwrap(),
                CouplingKind::DynamicPressure => flux(law, &u),
            };
            (a_r * q, second)
        })
        .collect();
    let mut boundary_hit = false;
    for i in 0..n - 1 {
        for k in 0..n - 1 {
            let corners = [(i, k), (i + 1, k), (i, k + 1), (i + 1, k + 1)];
            let phi1 = corners.map(|(r, c)| rows[r].0 - cols[c].0);
            if !spans_zero(phi1) {
                continue;
            }
            let phi2 = corners.map(|(r, c)| cols[c].1 - rows[r].1);
            if phi2.iter().any(|v| !v.is_finite()) {
                // The pressure integral failed at a corner (sonic window edge).
                boundary_hit = true;
                continue;
            }
            if !spans_zero(phi2) {
                continue;
            }
            if i == 0 || k == 0 || i == n - 2 || k == n - 2 {
                boundary_hit = true;
            } else {
                return Verdict::Exists;
            }
        }
    }
    if boundary_hit {
        Verdict::Ambiguous
    } else {
        Verdict::Absent
    }
}
