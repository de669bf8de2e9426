//! End-to-end verification suite: every closed form against its independent
//! numerical oracle, at pinned tolerances.
//!
//! Each check returns a [`CheckResult`] with the worst measured number in its
//! detail string; `sqtrap verify` runs them all and the acceptance test
//! target asserts them one by one. All sampling is deterministic.

use std::time::Instant;

use crate::floquet::{floquet_data, transfer_data, transfer_matrix, ClassicalSolution, Stability};
use crate::interference::{
    destructive_search, estimate_si, fringe_intensity, phase_difference, DestructiveStrategy,
    SearchConstraints,
};
use crate::invariant::InvariantSpec;
use crate::numeric::{integrate_profile_to_times, monodromy_half_trace, OdeState};
use crate::params::{Axis, DriveProfile};
use crate::phase::{
    cis_search, invariant_independence_check, theta, theta_routes, wrap_angle, CisRule, SplitMix64,
};
use crate::tol;
use crate::wavefunction::{inner_product, schrodinger_residual, EigenstateSlice};
use num_complex::Complex64;

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Self {
            name,
            passed: false,
            detail,
        }
    }
}

macro_rules! try_check {
    ($name:expr, $expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return CheckResult::fail($name, format!("error: {e}")),
        }
    };
}

/// The four reference cyclic configurations: (l, N′, tabulated ωτ, exact λ).
/// The six-digit roots are reference data, not approximations of π.
#[allow(clippy::approx_constant)]
pub const REFERENCE_ROWS: [(u32, u32, f64, f64); 4] = [
    (1, 4, 3.14159, 0.0),
    (1, 8, 2.30517, std::f64::consts::FRAC_1_SQRT_2),
    (1, 3, 2.63690, 0.5),
    (2, 3, 3.48328, -0.5),
];

/// Cyclic roots: values, λ at the roots (against the RK monodromy oracle),
/// and the sub-second runtime budget.
pub fn table1_roots() -> CheckResult {
    const NAME: &str = "table1-roots";
    let start = Instant::now();
    let mut worst_root: f64 = 0.0;
    let mut worst_lambda: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for (l, np, root, lam) in REFERENCE_ROWS {
        let cfg = try_check!(NAME, cis_search(l, np, 0.25, CisRule::B));
        worst_root = worst_root.max((cfg.omega_tau - root).abs());
        worst_lambda = worst_lambda.max((cfg.lambda - lam).abs());
        let profile = try_check!(NAME, DriveProfile::symmetric(cfg.omega_tau, 0.25, Axis::X));
        let lam_rk = monodromy_half_trace(&profile, tol::ORACLE_STEP_FRACTION);
        worst_oracle = worst_oracle.max((lam_rk - lam).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let detail = format!(
        "max |root err| = {worst_root:.2e}, max |lambda err| = {worst_lambda:.2e}, \
         max |rk oracle err| = {worst_oracle:.2e}, elapsed {elapsed:.3} s"
    );
    if worst_root < tol::CIS_ROOT
        && worst_lambda < tol::LAMBDA_AT_ROOT
        && worst_oracle < tol::LAMBDA_AT_ROOT
        && elapsed < 1.0
    {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

/// g₋ periodicity of the four reference rows (2τ, 4τ, 3τ, 3τ), the Nτ-period
/// set {2, 3, 4}, and the Hamiltonian-matched instant in every period.
pub fn g_minus_periodicity() -> CheckResult {
    const NAME: &str = "g-minus-periodicity";
    let expected_periods = [2.0, 4.0, 3.0, 3.0];
    let mut worst_per: f64 = 0.0;
    let mut worst_match: f64 = 0.0;
    let mut n_set: Vec<i64> = Vec::new();
    for ((l, np, _, _), period) in REFERENCE_ROWS.into_iter().zip(expected_periods) {
        let cfg = try_check!(NAME, cis_search(l, np, 0.25, CisRule::B));
        if (cfg.tau_prime - period).abs() > 1e-12 {
            return CheckResult::fail(
                NAME,
                format!("row ({l},{np}): tau' = {} not {period}", cfg.tau_prime),
            );
        }
        if !n_set.contains(&(period as i64)) {
            n_set.push(period as i64);
        }
        let profile = try_check!(NAME, cfg.profile(0.25, Axis::X));
        let sol = try_check!(NAME, ClassicalSolution::stable(profile));
        let (spec, _) = try_check!(NAME, InvariantSpec::hamiltonian_matching(&sol, 1.0));
        // relative deviation across four periods
        for k in 0..=200 {
            let t = 4.0 * period * k as f64 / 200.0;
            let a = spec.g_triple(t).g_minus;
            let b = spec.g_triple(t + period).g_minus;
            worst_per = worst_per.max((a - b).abs() / a.abs());
        }
        // a matched instant inside every period window
        for w in 0..4 {
            let (lo, hi) = (w as f64 * period, (w + 1) as f64 * period);
            let mut best = f64::INFINITY;
            let mut best_t = lo;
            for k in 0..=4000 {
                let t = lo + (hi - lo) * k as f64 / 4000.0;
                let v = (spec.mass * spec.g_triple(t).g_minus - 1.0).abs();
                if v < best {
                    best = v;
                    best_t = t;
                }
            }
            let (mut a, mut b) = (best_t - (hi - lo) / 4000.0, best_t + (hi - lo) / 4000.0);
            for _ in 0..100 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                let f1 = (spec.mass * spec.g_triple(m1).g_minus - 1.0).abs();
                let f2 = (spec.mass * spec.g_triple(m2).g_minus - 1.0).abs();
                if f1 < f2 {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            let t_star = 0.5 * (a + b);
            worst_match = worst_match.max((spec.mass * spec.g_triple(t_star).g_minus - 1.0).abs());
        }
    }
    n_set.sort();
    let detail = format!(
        "max periodicity dev = {worst_per:.2e}, max |m g-(t*) - 1| = {worst_match:.2e}, \
         N values {n_set:?}"
    );
    if worst_per < tol::G_PERIODICITY_REL && worst_match < tol::H_MATCH && n_set == vec![2, 3, 4] {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

fn random_profile(rng: &mut SplitMix64, axis: Axis) -> DriveProfile {
    loop {
        let duty = rng.uniform(0.02, 0.48);
        let w1 = rng.uniform(0.2, 6.0);
        let w2 = rng.uniform(0.2, 6.0);
        if let Ok(p) = DriveProfile::new(1.0, duty, w1, w2, axis) {
            return p;
        }
    }
}

/// Scalar transfer identities and det P = 1 on both axes for 10⁴ random
/// profiles drawn from the stability-chart box (ωτ ≤ 2π, duty ≤ 0.3).
/// The identities are exact in real arithmetic; the absolute 1e-10 bar is
/// a float-cancellation budget and pins the operating domain, since the
/// hyperbolic factors square into the rounding error.
pub fn transfer_identities() -> CheckResult {
    const NAME: &str = "transfer-identities";
    let mut rng = SplitMix64::new(0x7261_6e64_0001);
    let mut worst_id: f64 = 0.0;
    let mut worst_det: f64 = 0.0;
    for k in 0..10_000u32 {
        let axis = if k.is_multiple_of(2) {
            Axis::X
        } else {
            Axis::Y
        };
        let p = DriveProfile::new(
            1.0,
            rng.uniform(0.05, 0.30),
            rng.uniform(0.2, 2.0 * std::f64::consts::PI),
            rng.uniform(0.2, 2.0 * std::f64::consts::PI),
            axis,
        )
        .expect("sampler ranges satisfy the profile invariants");
        let td = try_check!(NAME, transfer_data(&p));
        let id = match axis {
            Axis::X => td.alpha1 * td.alpha1 + td.beta1 * td.beta1 - td.beta2 * td.beta2,
            Axis::Y => td.alpha1 * td.alpha1 - td.beta1 * td.beta1 + td.beta2 * td.beta2,
        };
        worst_id = worst_id.max((id - 1.0).abs());
        let m = transfer_matrix(&p);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        worst_det = worst_det.max((det - Complex64::new(1.0, 0.0)).norm());
    }
    let detail = format!("max |identity - 1| = {worst_id:.2e}, max |det P - 1| = {worst_det:.2e}");
    if worst_id < tol::TRANSFER_IDENTITY && worst_det < tol::TRANSFER_IDENTITY {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

fn random_stable_solution(rng: &mut SplitMix64, k: usize) -> ClassicalSolution {
    loop {
        let axis = if k.is_multiple_of(2) {
            Axis::X
        } else {
            Axis::Y
        };
        let p = random_profile(rng, axis);
        let Ok(td) = transfer_data(&p) else { continue };
        let Ok(fd) = floquet_data(&td, &p) else {
            continue;
        };
        if fd.stability != Stability::Stable || fd.lambda.abs() > 0.99 {
            continue;
        }
        if let Ok(sol) = ClassicalSolution::stable(p) {
            if let Ok(n) = sol.normalized() {
                return n;
            }
        }
    }
}

/// Analytic piecewise solutions against the RK4 oracle over ten periods for
/// 100 random stable profiles.
pub fn rk_agreement() -> CheckResult {
    const NAME: &str = "rk-agreement";
    let mut rng = SplitMix64::new(0x7261_6e64_0002);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let sol = random_stable_solution(&mut rng, k);
        let p = sol.profile;
        let t0 = 0.05 * p.tau;
        let (f0, fd0) = sol.evaluate(t0);
        let times: Vec<f64> = (1..=40).map(|j| t0 + 0.25 * j as f64 * p.tau).collect();
        let states = integrate_profile_to_times(
            &p,
            OdeState::new(t0, f0, fd0),
            &times,
            tol::ORACLE_STEP_FRACTION * p.tau,
        );
        for st in states {
            let (fa, _) = sol.evaluate(st.t);
            worst = worst.max((st.f - fa).norm());
        }
    }
    let detail = format!("max |analytic - rk4| over 10 periods = {worst:.2e}");
    if worst < tol::RK_AGREEMENT_ABS {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

/// ω_I constancy over four periods and the coefficient ODEs by central
/// differences, for random positive-definite invariants.
pub fn invariant_constancy() -> CheckResult {
    const NAME: &str = "invariant-constancy";
    let mut rng = SplitMix64::new(0x7261_6e64_0003);
    let mut worst_drift: f64 = 0.0;
    let mut worst_ode: f64 = 0.0;
    for k in 0..25 {
        let sol = random_stable_solution(&mut rng, k);
        let p = sol.profile;
        let (d1, d2, d3) = loop {
            let d1 = rng.uniform(-2.0, 2.0);
            let d2 = rng.uniform(-2.0, 2.0);
            let d3 = rng.uniform(-2.0, 2.0);
            if d1.abs() > 0.1 && d3.abs() > 0.1 {
                break (d1, d2, d3);
            }
        };
        let spec = try_check!(
            NAME,
            InvariantSpec::from_complex_solution((d1, d2, d3), 1.0, &sol)
        );
        let w0 = spec.omega_inv();
        for j in 0..=200 {
            let t = 4.0 * p.tau * j as f64 / 200.0;
            worst_drift = worst_drift.max((spec.omega_inv_at(t) - w0).abs() / w0);
        }
        // central differences at mid-segment times of four periods
        let h = tol::COEFF_ODE_STEP * p.tau;
        let m = spec.mass;
        for r in 0..4 {
            for t in [r as f64 * p.tau - 0.5 * (p.tau - p.tau2), r as f64 * p.tau] {
                if p.tau2 == 0.0 && t == r as f64 * p.tau {
                    continue;
                }
                let w2 = p.omega_sq(t);
                let ga = spec.g_triple(t - h);
                let gb = spec.g_triple(t + h);
                let g = spec.g_triple(t);
                let fd = |a: f64, b: f64| (b - a) / (2.0 * h);
                let scale = p.omega1 * (g.g_minus.abs() + g.g_zero.abs() + g.g_plus.abs());
                let r1 = (fd(ga.g_minus, gb.g_minus) + 2.0 * g.g_zero / m).abs() / scale;
                let r2 =
                    (fd(ga.g_zero, gb.g_zero) - (m * w2 * g.g_minus - g.g_plus / m)).abs() / scale;
                let r3 =
                    (fd(ga.g_plus, gb.g_plus) - 2.0 * m * w2 * g.g_zero).abs() / (p.omega1 * scale);
                worst_ode = worst_ode.max(r1).max(r2).max(r3);
            }
        }
    }
    let detail = format!(
        "max omega_I drift = {worst_drift:.2e}, max coefficient-ode residual = {worst_ode:.2e}"
    );
    if worst_drift < tol::OMEGA_INV_DRIFT && worst_ode < tol::COEFF_ODE_REL {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

/// θ(τ′) must agree modulo 2π across 100 random invariant choices on every
/// reference row.
pub fn invariant_independence() -> CheckResult {
    const NAME: &str = "invariant-independence";
    let mut worst: f64 = 0.0;
    for (l, np, _, _) in REFERENCE_ROWS {
        let cfg = try_check!(NAME, cis_search(l, np, 0.25, CisRule::B));
        let profile = try_check!(NAME, cfg.profile(0.25, Axis::X));
        let sol = try_check!(NAME, ClassicalSolution::stable(profile));
        let rep = try_check!(
            NAME,
            invariant_independence_check(&sol, cfg.tau_prime, 100, 0x5eed_0000 + np as u64)
        );
        worst = worst.max(rep.max_deviation);
    }
    let detail = format!("max theta deviation mod 2pi = {worst:.2e} over 4 x 100 trials");
    if worst < tol::THETA_INDEPENDENCE {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

/// Quadrature θ against the unwrapped-argument θ at 100 sample times.
pub fn theta_dual_oracle() -> CheckResult {
    const NAME: &str = "theta-dual-oracle";
    let cfg = try_check!(NAME, cis_search(1, 4, 0.25, CisRule::B));
    let profile = try_check!(NAME, cfg.profile(0.25, Axis::X));
    let sol = try_check!(NAME, ClassicalSolution::stable(profile));
    let spec = try_check!(
        NAME,
        InvariantSpec::from_complex_solution((1.3, -0.2, 0.9), 1.0, &sol)
    );
    let mut worst: f64 = 0.0;
    for k in 1..=100 {
        let t = 0.08 * k as f64;
        let (quad, arg) = try_check!(NAME, theta_routes(&spec, t));
        worst = worst.max((quad - arg).abs());
    }
    let detail = format!("max |quadrature - arg unwrap| = {worst:.2e} at 100 times");
    if worst < tol::THETA_DUAL {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

/// Normalization, orthogonality (n, m ≤ 10), Schrödinger residual, and the
/// cyclic eigenstate recurrence.
pub fn wavefunction_checks() -> CheckResult {
    const NAME: &str = "wavefunction";
    let cfg = try_check!(NAME, cis_search(1, 4, 0.25, CisRule::B));
    let profile = try_check!(NAME, cfg.profile(0.25, Axis::X));
    let sol = try_check!(NAME, ClassicalSolution::stable(profile));
    let (spec, _) = try_check!(NAME, InvariantSpec::hamiltonian_matching(&sol, 1.0));

    let mut worst_ortho: f64 = 0.0;
    for t in [0.1, 0.62] {
        for m in 0..=10u32 {
            for n in m..=10u32 {
                let ip = try_check!(NAME, inner_product(&spec, m, n, t));
                let target = if m == n { 1.0 } else { 0.0 };
                worst_ortho = worst_ortho.max((ip - Complex64::new(target, 0.0)).norm());
            }
        }
    }

    let qs: Vec<f64> = (-8..=8).map(|k| 0.1 * k as f64).collect();
    let residual = try_check!(
        NAME,
        schrodinger_residual(&spec, 0, &[0.05, 0.4, 1.1], &qs, 1e-6, 1e-4)
    );

    let theta_cycle = try_check!(NAME, theta(&spec, cfg.tau_prime));
    let mut worst_rec: f64 = 0.0;
    for n in [0u32, 2, 5] {
        let factor = Complex64::from_polar(1.0, -(n as f64 + 0.5) * theta_cycle);
        let a = try_check!(NAME, EigenstateSlice::new(&spec, n, 0.3));
        let b = try_check!(NAME, EigenstateSlice::new(&spec, n, 0.3 + cfg.tau_prime));
        for k in -10..=10 {
            let q = 0.13 * k as f64;
            worst_rec = worst_rec.max((b.eval(q) - factor * a.eval(q)).norm());
        }
    }
    let detail = format!(
        "max |<m|n> - delta| = {worst_ortho:.2e}, residual = {residual:.2e}, \
         max recurrence dev = {worst_rec:.2e}"
    );
    if worst_ortho < tol::WAVEFUNCTION_ORTHO
        && residual < tol::SCHRODINGER_RESIDUAL
        && worst_rec < tol::CIS_RECURRENCE
    {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

/// Both destructive strategies reach |Θ₂ − Θ₁| = π and the idealized fringe
/// floor.
pub fn interference_checks() -> CheckResult {
    const NAME: &str = "interference";
    let mut worst_pi: f64 = 0.0;
    let mut worst_fringe: f64 = 0.0;
    for strategy in [
        DestructiveStrategy::PeriodDoubling { base_n_prime: 4 },
        DestructiveStrategy::WindingStep { n_prime: 3 },
    ] {
        let c = SearchConstraints {
            trap_length: 0.06,
            tau: 6e-9,
            v_min: 1e4,
            v_max: 1e8,
        };
        let setup = try_check!(NAME, destructive_search(strategy, &c));
        let d = try_check!(NAME, phase_difference(&setup));
        worst_pi = worst_pi.max((d.abs() - std::f64::consts::PI).abs());
        worst_fringe = worst_fringe.max(fringe_intensity(d));
    }
    let detail = format!(
        "max ||difference| - pi| = {worst_pi:.2e}, max destructive fringe = {worst_fringe:.2e}"
    );
    if worst_pi < tol::PHASE_DIFFERENCE && worst_fringe < tol::FRINGE_FLOOR {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

/// Laboratory-scale estimate at the reference point (D = 6 cm, d = 1 mm,
/// v = 5×10⁶ m/s, l = 1, N′ = 4).
pub fn si_estimates() -> CheckResult {
    const NAME: &str = "si-estimator";
    let e = try_check!(NAME, estimate_si(0.06, 1e-3, 5e6, 1, 4));
    let tau_err = (e.tau - 6.0e-9).abs() / 6.0e-9;
    let omega_err = (e.omega - 5e8).abs() / 5e8;
    let phi_ok = [e.phi_abs_halved, e.phi_abs_plain]
        .iter()
        .all(|&phi| (0.2..=5.0).contains(&phi));
    let detail = format!(
        "tau = {:.6e} s (rel err {tau_err:.1e}), omega = {:.4e} rad/s (rel dev {omega_err:.3}), \
         |phi| = {:.3} / {:.3} V",
        e.tau, e.omega, e.phi_abs_halved, e.phi_abs_plain
    );
    if tau_err < 1e-12 && omega_err < 0.05 && phi_ok {
        CheckResult::pass(NAME, detail)
    } else {
        CheckResult::fail(NAME, detail)
    }
}

/// Winding-number bookkeeping: θ(τ) accrues φ modulo 2π and the integer
/// winding of θ(τ′) is reported per reference row.
pub fn winding_report() -> CheckResult {
    const NAME: &str = "theta-winding";
    let mut lines = Vec::new();
    for (l, np, _, _) in REFERENCE_ROWS {
        let cfg = try_check!(NAME, cis_search(l, np, 0.25, CisRule::B));
        let profile = try_check!(NAME, cfg.profile(0.25, Axis::X));
        let sol = try_check!(NAME, ClassicalSolution::stable(profile));
        let spec = try_check!(
            NAME,
            InvariantSpec::from_complex_solution((1.0, 0.0, 1.0), 1.0, &sol)
        );
        let th_tau = try_check!(NAME, theta(&spec, 1.0));
        let phi = sol.floquet_phase().unwrap_or(0.0);
        let dev = wrap_angle(th_tau - phi).abs();
        if dev > 1e-8 {
            return CheckResult::fail(
                NAME,
                format!("row ({l},{np}): theta(tau) = {th_tau} not phi mod 2pi"),
            );
        }
        lines.push(format!(
            "({l},{np}): theta' = {:.9} (rule a {:.9}, rule b {:.9}), winding {}",
            cfg.theta_cycle, cfg.theta_rule_a, cfg.theta_rule_b, cfg.winding
        ));
    }
    CheckResult::pass(NAME, lines.join("; "))
}

/// Run every check in a stable order.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        table1_roots(),
        g_minus_periodicity(),
        transfer_identities(),
        rk_agreement(),
        invariant_constancy(),
        invariant_independence(),
        theta_dual_oracle(),
        wavefunction_checks(),
        interference_checks(),
        si_estimates(),
        winding_report(),
    ]
}
