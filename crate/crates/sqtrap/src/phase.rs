//! Accumulated polar phase θ(t) of the complex classical solution, cyclic
//! drive configurations, and the per-cycle quantum phase.
//!
//! θ(t) = ∫₀ᵗ ω_I / (m·g₋) dt′ is computed by adaptive quadrature split at
//! the drive's segment boundaries, and every call is cross-checked against an
//! independent route: continuous unwrapping of arg f_c along the trajectory.
//! When the Floquet phase satisfies φ = 2πl/N′ the classical solution is
//! N′τ-periodic, g₋ is τ′-periodic with τ′ = N′τ/ε (ε = 2 for even N′, else
//! 1), and every invariant eigenstate returns to itself over τ′ up to the
//! phase χₙ = −(n+½)·θ(τ′).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::floquet::{floquet_data, transfer_data, ClassicalSolution};
use crate::invariant::InvariantSpec;
use crate::numeric::{find_root_bracketed, quad_adaptive};
use crate::params::{Axis, DriveProfile};
use crate::tol;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Reduce an angle to (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let w = x - TWO_PI * (x / TWO_PI).round();
    if w <= -std::f64::consts::PI {
        w + TWO_PI
    } else {
        w
    }
}

fn fc_evaluator(spec: &InvariantSpec) -> impl Fn(f64) -> Complex64 + '_ {
    let (d1, d2, d3) = spec.complex_params();
    move |t: f64| {
        let (f, _) = spec.solution().evaluate(t);
        Complex64::new(d1 * f.re + d2 * f.im, d3 * f.im)
    }
}

/// Continuous advance of arg f_c from `t0` to `t1`, by recursive bisection of
/// principal-value steps. Steps are forced below `max_span` (a fraction of
/// the drive period, so the phase cannot alias by a full turn) and split
/// further until each resolves less than half a turn; the sum of principal
/// values is then exact up to f64 rounding.
fn arg_advance<F: Fn(f64) -> Complex64>(fc: &F, t0: f64, t1: f64, max_span: f64) -> f64 {
    fn walk<F: Fn(f64) -> Complex64>(
        fc: &F,
        a: f64,
        b: f64,
        fa: Complex64,
        fb: Complex64,
        depth: u32,
        max_span: f64,
    ) -> f64 {
        let d = (fb / fa).arg();
        if (d.abs() <= 0.8 && (b - a).abs() <= max_span) || depth >= 48 {
            return d;
        }
        let m = 0.5 * (a + b);
        let fm = fc(m);
        walk(fc, a, m, fa, fm, depth + 1, max_span) + walk(fc, m, b, fm, fb, depth + 1, max_span)
    }
    if t0 == t1 {
        return 0.0;
    }
    walk(fc, t0, t1, fc(t0), fc(t1), 0, max_span)
}

fn theta_quad_segmentwise(spec: &InvariantSpec, t0: f64, t1: f64) -> Result<f64> {
    let sol = spec.solution();
    let (lo, hi, sign) = if t1 >= t0 {
        (t0, t1, 1.0)
    } else {
        (t1, t0, -1.0)
    };
    let mut pts = vec![lo];
    pts.extend(sol.profile.boundaries_between(lo, hi));
    pts.push(hi);
    let m = spec.mass;
    let w_i = spec.omega_inv();
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += quad_adaptive(
            |t| {
                let g = spec.g_triple(t).g_minus;
                w_i / (m * g)
            },
            w[0],
            w[1],
            tol::THETA_QUAD_REL,
        )?;
    }
    Ok(sign * total)
}

/// Both independent routes to θ(t): (adaptive quadrature, unwrapped
/// argument of f_c). Exposed so the verification suite can report their
/// spread; [`theta`] enforces their agreement.
pub fn theta_routes(spec: &InvariantSpec, t: f64) -> Result<(f64, f64)> {
    let value = theta_quad_segmentwise(spec, 0.0, t)?;
    let fc = fc_evaluator(spec);
    // d1, d3 > 0 by construction, so the winding sign is the sign of W
    let sign = spec.solution().wronskian().signum();
    let max_span = 0.25 * spec.solution().profile.tau;
    let oracle = sign * arg_advance(&fc, 0.0, t, max_span);
    Ok((value, oracle))
}

/// θ(t) by adaptive quadrature, cross-checked against the unwrapped argument
/// of f_c. The two routes must agree within [`tol::THETA_DUAL`].
pub fn theta(spec: &InvariantSpec, t: f64) -> Result<f64> {
    let (value, oracle) = theta_routes(spec, t)?;
    let allowed = tol::THETA_DUAL * (1.0 + 1e-4 * value.abs());
    if (value - oracle).abs() > allowed {
        return Err(Error::OracleMismatch(format!(
            "theta({t}): quadrature {value} vs unwrapped argument {oracle}"
        )));
    }
    Ok(value)
}

/// Monotone unwrapped trace of θ over ascending sample times.
#[derive(Debug, Clone)]
pub struct PhaseTrace {
    pub times: Vec<f64>,
    pub theta: Vec<f64>,
}

/// θ at each of the (ascending, nonnegative) times, computed incrementally;
/// the final value carries the dual-oracle cross-check.
pub fn phase_trace(spec: &InvariantSpec, times: &[f64]) -> Result<PhaseTrace> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &t in times {
        if t < prev {
            return Err(Error::InvalidParameter(
                "trace times must be ascending from 0".into(),
            ));
        }
        acc += theta_quad_segmentwise(spec, prev, t)?;
        out.push(acc);
        prev = t;
    }
    if let Some((&t_last, &th_last)) = times.last().zip(out.last()) {
        let fc = fc_evaluator(spec);
        let sign = spec.solution().wronskian().signum();
        let max_span = 0.25 * spec.solution().profile.tau;
        let oracle = sign * arg_advance(&fc, 0.0, t_last, max_span);
        if (th_last - oracle).abs() > tol::THETA_DUAL * (1.0 + 1e-4 * th_last.abs()) {
            return Err(Error::OracleMismatch(format!(
                "phase trace end {th_last} vs unwrapped argument {oracle}"
            )));
        }
    }
    Ok(PhaseTrace {
        times: times.to_vec(),
        theta: out,
    })
}

/// Cyclic phase of the n-th eigenstate over one cycle: χₙ = −(n+½)·θ(τ′).
pub fn berry_phase(n: u32, theta_cycle: f64) -> f64 {
    -(n as f64 + 0.5) * theta_cycle
}

/// Which condition picks the Floquet phase target of a cyclic configuration.
///
/// Rule A: φ = 2πl/N′. Rule B: φ·N′/ε = lπ, i.e. the phase advance over the
/// minimal period τ′ = N′τ/ε is lπ. The two coincide for even N′ and differ
/// by a factor of two in φ for odd N′; rule B is the default because it
/// reproduces the tabulated roots for both parities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CisRule {
    A,
    #[default]
    B,
}

impl CisRule {
    pub fn label(self) -> &'static str {
        match self {
            CisRule::A => "a",
            CisRule::B => "b",
        }
    }

    fn phi_target(self, l: u32, n_prime: u32, epsilon: u32) -> f64 {
        match self {
            CisRule::A => TWO_PI * l as f64 / n_prime as f64,
            CisRule::B => std::f64::consts::PI * l as f64 * epsilon as f64 / n_prime as f64,
        }
    }
}

/// One cyclic drive configuration in the equal-frequency regime.
#[derive(Debug, Clone, PartialEq)]
pub struct CisConfig {
    pub l: u32,
    pub n_prime: u32,
    /// 2 for even N′, 1 for odd N′.
    pub epsilon: u32,
    /// Smallest positive root ωτ of λ(ωτ) = cos φ_target.
    pub omega_tau: f64,
    /// Minimal period of g₋ in units of τ: N′/ε.
    pub tau_prime: f64,
    /// Measured θ(τ′), unwrapped.
    pub theta_cycle: f64,
    pub lambda: f64,
    pub rule: CisRule,
    /// Integer k in θ(τ′) = φ·N′/ε + 2πk, reported rather than assumed zero.
    pub winding: i64,
    /// θ(τ′) predicted by rule A with zero winding: 2πl/ε.
    pub theta_rule_a: f64,
    /// θ(τ′) predicted by rule B with zero winding: lπ.
    pub theta_rule_b: f64,
}

impl CisConfig {
    /// Drive profile of this configuration in natural units (τ = 1).
    pub fn profile(&self, duty: f64, axis: Axis) -> Result<DriveProfile> {
        DriveProfile::new(1.0, duty, self.omega_tau, self.omega_tau, axis)
    }
}

/// Stability parameter of the equal-frequency drive at dimensionless ωτ = u.
fn lambda_symmetric(u: f64, duty: f64) -> Result<f64> {
    let p = DriveProfile::symmetric(u, duty, Axis::X)?;
    let td = transfer_data(&p)?;
    Ok(floquet_data(&td, &p)?.lambda)
}

/// Scan range and grid pitch of the cyclic root search.
const CIS_SCAN_MAX: f64 = 4.0 * std::f64::consts::PI;
const CIS_SCAN_STEP: f64 = 1e-3;

/// Find the smallest ωτ ∈ (0, 4π] at which the equal-frequency drive admits
/// an (l, N′) cyclic state under the given rule, and measure θ(τ′) there.
///
/// Sign-change bracketing on the pitch-1e-3 grid followed by root polishing
/// to 1e-12. Duty is τ₂/τ (default regime: 0.25).
pub fn cis_search(l: u32, n_prime: u32, duty: f64, rule: CisRule) -> Result<CisConfig> {
    if l == 0 || n_prime == 0 {
        return Err(Error::InvalidParameter(
            "l and N' must be positive integers".into(),
        ));
    }
    if !(duty > 0.0 && duty < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "duty must be in (0, 0.5), got {duty}"
        )));
    }
    let epsilon = if n_prime.is_multiple_of(2) { 2 } else { 1 };
    let phi_t = rule.phi_target(l, n_prime, epsilon);
    let lambda_target = phi_t.cos();
    if 1.0 - lambda_target.abs() < 1e-9 {
        return Err(Error::ResonanceBoundary {
            lambda: lambda_target,
        });
    }

    let g = |u: f64| lambda_symmetric(u, duty).unwrap_or(f64::NAN) - lambda_target;
    let steps = (CIS_SCAN_MAX / CIS_SCAN_STEP) as usize;
    let mut root = None;
    let mut prev_u = CIS_SCAN_STEP;
    let mut prev_v = g(prev_u);
    for k in 2..=steps {
        let u = k as f64 * CIS_SCAN_STEP;
        let v = g(u);
        if prev_v == 0.0 {
            root = Some(prev_u);
            break;
        }
        if prev_v * v < 0.0 {
            root = Some(find_root_bracketed(g, prev_u, u, tol::ROOT_POLISH)?);
            break;
        }
        prev_u = u;
        prev_v = v;
    }
    let omega_tau = root.ok_or(Error::RootNotFound {
        what: format!("lambda(omega*tau) = {lambda_target}"),
        lo: 0.0,
        hi: CIS_SCAN_MAX,
        steps,
    })?;

    let profile = DriveProfile::symmetric(omega_tau, duty, Axis::X)?;
    let sol = ClassicalSolution::stable(profile)?;
    let lambda = sol.floquet.lambda;
    let phi = sol.floquet_phase().expect("stable solution has a phase");
    let spec = InvariantSpec::from_complex_solution((1.0, 0.0, 1.0), 1.0, &sol)?;
    let tau_prime = n_prime as f64 / epsilon as f64;
    let theta_cycle = theta(&spec, tau_prime)?;

    // g- must return to itself over tau'
    for k in 0..24 {
        let t = 0.13 + 0.21 * k as f64;
        let a = spec.g_triple(t).g_minus;
        let b = spec.g_triple(t + tau_prime).g_minus;
        if (a - b).abs() > tol::G_PERIODICITY_REL * a.abs() {
            return Err(Error::OracleMismatch(format!(
                "g- not tau'-periodic at the root (t = {t}: {a} vs {b})"
            )));
        }
    }

    let base = phi * n_prime as f64 / epsilon as f64;
    let winding = ((theta_cycle - base) / TWO_PI).round() as i64;
    Ok(CisConfig {
        l,
        n_prime,
        epsilon,
        omega_tau,
        tau_prime,
        theta_cycle,
        lambda,
        rule,
        winding,
        theta_rule_a: TWO_PI * l as f64 / epsilon as f64,
        theta_rule_b: std::f64::consts::PI * l as f64,
    })
}

/// Result of the invariant-independence trial run.
#[derive(Debug, Clone)]
pub struct IndependenceReport {
    pub trials: u32,
    /// Reference θ(τ′) from the canonical (1, 0, 1) choice.
    pub theta_reference: f64,
    /// Max |θ(τ′) − reference| modulo 2π across the trials.
    pub max_deviation: f64,
}

/// θ(τ′) must not depend on the invariant choice: run `trials` random
/// (d₁, d₂, d₃) with d₁d₃ ≠ 0 and report the worst deviation modulo 2π.
pub fn invariant_independence_check(
    sol: &ClassicalSolution,
    tau_prime: f64,
    trials: u32,
    seed: u64,
) -> Result<IndependenceReport> {
    let base_spec = InvariantSpec::from_complex_solution((1.0, 0.0, 1.0), 1.0, sol)?;
    let theta_reference = theta(&base_spec, tau_prime)?;
    let mut rng = SplitMix64::new(seed);
    let mut max_deviation: f64 = 0.0;
    let mut done = 0;
    while done < trials {
        let d1 = rng.uniform(-2.0, 2.0);
        let d2 = rng.uniform(-2.0, 2.0);
        let d3 = rng.uniform(-2.0, 2.0);
        if d1.abs() < 0.05 || d3.abs() < 0.05 {
            continue;
        }
        let spec = InvariantSpec::from_complex_solution((d1, d2, d3), 1.0, sol)?;
        let th = theta(&spec, tau_prime)?;
        max_deviation = max_deviation.max(wrap_angle(th - theta_reference).abs());
        done += 1;
    }
    Ok(IndependenceReport {
        trials,
        theta_reference,
        max_deviation,
    })
}

/// Outcome of the plane-wave refactorization check.
#[derive(Debug, Clone)]
pub struct CoherenceReport {
    /// Overall factor e^{−iθ/2} that every term must share.
    pub overall: Complex64,
    /// Max |e^{−i(2n+½)θ} − e^{−iθ/2}| over n = 0..=n_max.
    pub max_mismatch: f64,
    /// Quantum numbers n whose phase fails to collapse onto the overall one.
    pub offending: Vec<u32>,
}

impl CoherenceReport {
    pub fn factorizes(&self) -> bool {
        self.offending.is_empty()
    }
}

/// Check that exp(−i(2n+½)θ) equals exp(−iθ/2) for n = 0..=n_max, i.e. that
/// a plane wave expanded over even eigenstates re-factorizes into a single
/// overall phase after the cycle. Fails exactly when 2nθ is not a multiple
/// of 2π for some n, which signals a non-cyclic θ.
pub fn coherence_factorization(theta_cycle: f64, n_max: u32) -> CoherenceReport {
    let overall = Complex64::from_polar(1.0, -0.5 * theta_cycle);
    let mut max_mismatch: f64 = 0.0;
    let mut offending = Vec::new();
    for n in 0..=n_max {
        let term = Complex64::from_polar(1.0, -(2.0 * n as f64 + 0.5) * theta_cycle);
        let miss = (term - overall).norm();
        max_mismatch = max_mismatch.max(miss);
        if miss > tol::THETA_DUAL {
            offending.push(n);
        }
    }
    CoherenceReport {
        overall,
        max_mismatch,
        offending,
    }
}

/// Deterministic 64-bit generator for trial sampling (splitmix64).
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform sample in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}
