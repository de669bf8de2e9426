//! The quadratic dynamical invariant I(t) = g₋·p²/2 + g₀·(pq+qp)/2 + g₊·q²/2.
//!
//! Its coefficient functions are quadratic forms in the two real classical
//! solutions,
//!
//! ```text
//! g₋ =  c₁f₁² + c₂f₁f₂ + c₃f₂²
//! g₀ = −m·[c₁f₁ḟ₁ + (c₂/2)(ḟ₁f₂ + f₁ḟ₂) + c₃f₂ḟ₂]
//! g₊ =  m²·[c₁ḟ₁² + c₂ḟ₁ḟ₂ + c₃ḟ₂²]
//! ```
//!
//! with arbitrary constants (c₁, c₂, c₃). The determinant g₋g₊ − g₀² is a
//! constant of motion; its square root ω_I is the invariant's frequency and
//! equals m·|W|·√(4c₁c₃ − c₂²)/2 in closed form (W the Wronskian of f₁, f₂).
//! Positive-definite invariants (4c₁c₃ > c₂²) have normalizable eigenstates.

use crate::error::{Error, Result};
use crate::floquet::ClassicalSolution;
use crate::params::Axis;

/// The invariant coefficient functions sampled at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GTriple {
    pub t: f64,
    pub g_minus: f64,
    pub g_zero: f64,
    pub g_plus: f64,
}

impl GTriple {
    /// g₋g₊ − g₀², constant in t for an exact solution pair.
    pub fn determinant(&self) -> f64 {
        self.g_minus * self.g_plus - self.g_zero * self.g_zero
    }
}

/// Raw coefficient-function evaluation for arbitrary (c₁, c₂, c₃), with no
/// positivity requirement. Degenerate choices (4c₁c₃ − c₂² ≤ 0) are legal
/// here and simply give a vanishing or negative determinant.
pub fn g_triple_raw(c: (f64, f64, f64), mass: f64, sol: &ClassicalSolution, t: f64) -> GTriple {
    let (f, fd) = sol.evaluate(t);
    let (f1, f2, d1, d2) = (f.re, f.im, fd.re, fd.im);
    let (c1, c2, c3) = c;
    GTriple {
        t,
        g_minus: c1 * f1 * f1 + c2 * f1 * f2 + c3 * f2 * f2,
        g_zero: -mass * (c1 * f1 * d1 + 0.5 * c2 * (d1 * f2 + f1 * d2) + c3 * f2 * d2),
        g_plus: mass * mass * (c1 * d1 * d1 + c2 * d1 * d2 + c3 * d2 * d2),
    }
}

/// A positive-definite invariant tied to one classical solution.
#[derive(Debug, Clone)]
pub struct InvariantSpec {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub mass: f64,
    /// ω_I = √(g₋g₊ − g₀²), fixed at construction; any later drift is a bug
    /// signal, not something to re-fit.
    omega_inv: f64,
    solution: ClassicalSolution,
}

impl InvariantSpec {
    /// Build from explicit coefficients. Requires 4c₁c₃ − c₂² > 0.
    pub fn new(c: (f64, f64, f64), mass: f64, sol: &ClassicalSolution) -> Result<Self> {
        let (c1, c2, c3) = c;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mass must be > 0, got {mass}"
            )));
        }
        let disc = 4.0 * c1 * c3 - c2 * c2;
        if !(disc > 0.0) {
            return Err(Error::DegenerateInvariant(format!(
                "4c1c3 - c2^2 = {disc} must be > 0 for a positive-definite invariant"
            )));
        }
        sol.real_pair()?;
        // single source of truth: the determinant at a sample time
        let probe = g_triple_raw(c, mass, sol, -0.5 * sol.profile.tau);
        let det = probe.determinant();
        if !(det > 0.0) {
            return Err(Error::DegenerateInvariant(format!(
                "determinant {det} not positive at the probe time"
            )));
        }
        let omega_inv = det.sqrt();
        // closed form m|W|sqrt(disc)/2 must agree with the determinant route
        let closed = 0.5 * mass * sol.wronskian().abs() * disc.sqrt();
        if (closed - omega_inv).abs() > 1e-9 * omega_inv.max(closed) {
            return Err(Error::OracleMismatch(format!(
                "omega_I determinant route {omega_inv} vs closed form {closed}"
            )));
        }
        Ok(Self {
            c1,
            c2,
            c3,
            mass,
            omega_inv,
            solution: sol.clone(),
        })
    }

    /// Build from a complex solution f_c = d₁f₁ + (d₂ + i·d₃)f₂:
    /// c₁ = d₁², c₂ = 2d₁d₂, c₃ = d₂² + d₃², so that g₋(t) = |f_c(t)|².
    pub fn from_complex_solution(
        d: (f64, f64, f64),
        mass: f64,
        sol: &ClassicalSolution,
    ) -> Result<Self> {
        let (d1, d2, d3) = d;
        if d1 * d3 == 0.0 {
            return Err(Error::DegenerateInvariant(format!(
                "d1*d3 must be nonzero, got d1 = {d1}, d3 = {d3}"
            )));
        }
        Self::new((d1 * d1, 2.0 * d1 * d2, d2 * d2 + d3 * d3), mass, sol)
    }

    /// The coefficient choice that matches I(t) to the instantaneous
    /// Hamiltonian of the focusing segment, for the x axis:
    ///
    /// ```text
    /// c₁ = (β₂² + B₀² − 2β₂B₀cos ω₁τ) / (m(β₂² − B₀²)²)
    /// c₂ = −4β₂B₀ sin ω₁τ            / (m(β₂² − B₀²)²)
    /// c₃ = (β₂² + B₀² + 2β₂B₀cos ω₁τ) / (m(β₂² − B₀²)²)
    /// ```
    ///
    /// The resulting invariant has ω_I = ω₁ and satisfies
    /// (g₋, g₀, g₊)(t*) = (1/m, 0, m·ω₁²) at the returned instant t*, located
    /// by scanning the fundamental period window [τ₂ − τ, τ₂).
    pub fn hamiltonian_matching(sol: &ClassicalSolution, mass: f64) -> Result<(Self, f64)> {
        if sol.profile.axis != Axis::X {
            return Err(Error::InvalidParameter(
                "closed-form Hamiltonian matching is defined for the x axis; \
                 use hamiltonian_matching_at for the y axis"
                    .into(),
            ));
        }
        sol.real_pair()?;
        let b2 = sol.transfer.beta2;
        let b0c = sol.floquet.b0;
        if b0c.im.abs() > 1e-12 * b0c.norm().max(1.0) {
            return Err(Error::InvalidParameter(
                "stable x mode coefficient b0 must be real".into(),
            ));
        }
        let b0 = b0c.re;
        let den_core = b2 * b2 - b0 * b0;
        if den_core.abs() <= 1e-12 * (b2 * b2 + b0 * b0) {
            return Err(Error::DegenerateInvariant(format!(
                "matching denominator (beta2^2 - b0^2)^2 vanishes (beta2 = {b2}, b0 = {b0})"
            )));
        }
        let den = mass * den_core * den_core;
        let w1tau = sol.profile.omega1 * sol.profile.tau;
        let c_canonical = (
            (b2 * b2 + b0 * b0 - 2.0 * b2 * b0 * w1tau.cos()) / den,
            -4.0 * b2 * b0 * w1tau.sin() / den,
            (b2 * b2 + b0 * b0 + 2.0 * b2 * b0 * w1tau.cos()) / den,
        );
        // the closed form targets the canonical (unscaled) mode coefficients
        let k = sol.amplitude_scale();
        let c = (
            c_canonical.0 / (k * k),
            c_canonical.1 / (k * k),
            c_canonical.2 / (k * k),
        );
        let spec = Self::new(c, mass, sol)?;
        let t_star = spec.locate_matched_instant()?;
        Ok((spec, t_star))
    }

    /// Numeric Hamiltonian matching at a chosen instant t₀ (any axis):
    /// solves the 3×3 linear system for (c₁, c₂, c₃) such that
    /// (g₋, g₀, g₊)(t₀) = (1/m, 0, m·ω²(t₀)). Requires ω²(t₀) > 0, i.e. t₀
    /// inside the axis's focusing segment.
    pub fn hamiltonian_matching_at(sol: &ClassicalSolution, mass: f64, t0: f64) -> Result<Self> {
        let w2 = sol.profile.omega_sq(t0);
        if !(w2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t0 = {t0} lies in a defocusing segment (omega^2 = {w2}); \
                 the instantaneous Hamiltonian is not positive definite there"
            )));
        }
        let pair = sol.real_pair()?;
        let (f1, f2, d1, d2) = pair.eval(t0);
        // rows: g-/1, -g0/m, g+/m^2 as quadratic forms in (c1, c2, c3)
        let m = [
            [f1 * f1, f1 * f2, f2 * f2],
            [f1 * d1, 0.5 * (d1 * f2 + f1 * d2), f2 * d2],
            [d1 * d1, d1 * d2, d2 * d2],
        ];
        let rhs = [1.0 / mass, 0.0, w2];
        let c = solve3(m, rhs).ok_or_else(|| {
            Error::DegenerateInvariant("matching system is singular (W = 0?)".into())
        })?;
        Self::new((c[0], c[1], c[2]), mass, sol)
    }

    /// Scan the fundamental period window for the instant where the g-triple
    /// equals (1/m, 0, m·ω₁²).
    fn locate_matched_instant(&self) -> Result<f64> {
        let p = &self.solution.profile;
        let w1 = p.omega1;
        let mis = |t: f64| {
            let g = self.g_triple(t);
            let a = self.mass * g.g_minus - 1.0;
            let b = g.g_zero / (self.mass * w1);
            let c = g.g_plus / (self.mass * w1 * w1) - 1.0;
            a * a + b * b + c * c
        };
        let (lo, hi) = (p.tau2 - p.tau, p.tau2);
        let n = 4096;
        let mut best = (f64::INFINITY, lo);
        for k in 0..=n {
            let t = lo + (hi - lo) * k as f64 / n as f64;
            let v = mis(t);
            if v < best.0 {
                best = (v, t);
            }
        }
        let h = (hi - lo) / n as f64;
        let (mut a, mut b) = ((best.1 - h).max(lo), (best.1 + h).min(hi));
        for _ in 0..120 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if mis(m1) < mis(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        let t_star = 0.5 * (a + b);
        if mis(t_star).sqrt() > 1e-8 {
            return Err(Error::OracleMismatch(format!(
                "no instant in the fundamental window matches the Hamiltonian \
                 (residual {:.3e} at t = {t_star})",
                mis(t_star).sqrt()
            )));
        }
        Ok(t_star)
    }

    pub fn g_triple(&self, t: f64) -> GTriple {
        g_triple_raw((self.c1, self.c2, self.c3), self.mass, &self.solution, t)
    }

    /// ω_I fixed at construction time.
    pub fn omega_inv(&self) -> f64 {
        self.omega_inv
    }

    /// √(g₋g₊ − g₀²) recomputed at t — a drift probe against [`omega_inv`].
    ///
    /// [`omega_inv`]: Self::omega_inv
    pub fn omega_inv_at(&self, t: f64) -> f64 {
        self.g_triple(t).determinant().max(0.0).sqrt()
    }

    pub fn solution(&self) -> &ClassicalSolution {
        &self.solution
    }

    /// Positive canonical (d₁, d₂, d₃) reconstructed from the coefficients:
    /// d₁ = √c₁, d₂ = c₂/2d₁, d₃ = √(c₃ − d₂²). Exists for every
    /// positive-definite spec.
    pub fn complex_params(&self) -> (f64, f64, f64) {
        let d1 = self.c1.sqrt();
        let d2 = 0.5 * self.c2 / d1;
        let d3 = (self.c3 - d2 * d2).sqrt();
        (d1, d2, d3)
    }
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    // Cramer's rule; adequate for a well-scaled 3x3 system
    let det = |a: [[f64; 3]; 3]| -> f64 {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for j in 0..3 {
        let mut mj = m;
        for i in 0..3 {
            mj[i][j] = b[i];
        }
        out[j] = det(mj) / d;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{Axis, DriveProfile};
    use crate::tol;
    use proptest::prelude::*;

    fn row_a_solution() -> ClassicalSolution {
        let p = DriveProfile::symmetric(std::f64::consts::PI, 0.25, Axis::X).unwrap();
        ClassicalSolution::stable(p).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // the module's central conservation law, over random drives and
        // random positive-definite coefficient triples
        #[test]
        fn omega_inv_is_conserved(
            w1 in 0.4f64..5.5,
            w2 in 0.4f64..5.5,
            duty in 0.05f64..0.45,
            d1 in 0.2f64..2.0,
            d2 in -2.0f64..2.0,
            d3 in 0.2f64..2.0,
        ) {
            let p = DriveProfile::new(1.0, duty, w1, w2, Axis::X).unwrap();
            let Ok(sol) = ClassicalSolution::stable(p) else {
                return Ok(()); // unstable or marginal sample
            };
            prop_assume!(sol.floquet.lambda.abs() < 0.99);
            let spec =
                InvariantSpec::from_complex_solution((d1, d2, d3), 1.0, &sol).unwrap();
            let w0 = spec.omega_inv();
            for k in 0..=80 {
                let t = -1.0 + 5.0 * k as f64 / 80.0;
                let g = spec.g_triple(t);
                prop_assert!(g.g_minus > 0.0, "g- <= 0 at t = {t}");
                prop_assert!(
                    (spec.omega_inv_at(t) - w0).abs() <= tol::OMEGA_INV_DRIFT * w0,
                    "omega_I drift at t = {t}"
                );
            }
        }
    }

    #[test]
    fn single_solution_square_is_degenerate_but_evaluable() {
        let sol = row_a_solution();
        assert!(matches!(
            InvariantSpec::new((1.0, 0.0, 0.0), 1.0, &sol),
            Err(Error::DegenerateInvariant(_))
        ));
        // the raw triple is still the advertised quadratic form
        let t = 0.3;
        let g = g_triple_raw((1.0, 0.0, 0.0), 1.0, &sol, t);
        let (f, fd) = sol.evaluate(t);
        assert!((g.g_minus - f.re * f.re).abs() < 1e-14);
        assert!((g.g_zero + f.re * fd.re).abs() < 1e-14);
        assert!((g.g_plus - fd.re * fd.re).abs() < 1e-14);
        assert!(g.determinant().abs() < 1e-12);
    }

    #[test]
    fn positive_definite_gives_positive_g_minus() {
        let sol = row_a_solution();
        let spec = InvariantSpec::new((2.0, 1.0, 3.0), 1.0, &sol).unwrap();
        for k in 0..1000 {
            let t = -2.0 + 0.007 * k as f64;
            assert!(spec.g_triple(t).g_minus > 0.0, "g- <= 0 at t = {t}");
        }
    }

    #[test]
    fn coefficient_odes_by_central_differences() {
        let sol = row_a_solution();
        let spec = InvariantSpec::new((1.3, -0.4, 0.9), 1.0, &sol).unwrap();
        let m = spec.mass;
        let h = tol::COEFF_ODE_STEP * sol.profile.tau;
        let w1 = sol.profile.omega1;
        // off-boundary sample times in both segment types
        for t in [-0.6, -0.45, 0.11, 0.62, 1.37, 2.05] {
            let w2 = sol.profile.omega_sq(t);
            let gm = spec.g_triple(t - h);
            let gp = spec.g_triple(t + h);
            let g = spec.g_triple(t);
            let fd = |a: f64, b: f64| (b - a) / (2.0 * h);
            let scale = w1 * (g.g_minus.abs() + g.g_zero.abs() + g.g_plus.abs());
            let r1 = fd(gm.g_minus, gp.g_minus) - (-2.0 * g.g_zero / m);
            let r2 = fd(gm.g_zero, gp.g_zero) - (m * w2 * g.g_minus - g.g_plus / m);
            let r3 = fd(gm.g_plus, gp.g_plus) - 2.0 * m * w2 * g.g_zero;
            assert!(r1.abs() / scale < tol::COEFF_ODE_REL, "g- ode at {t}: {r1}");
            assert!(r2.abs() / scale < tol::COEFF_ODE_REL, "g0 ode at {t}: {r2}");
            assert!(
                r3.abs() / (w1 * scale) < tol::COEFF_ODE_REL,
                "g+ ode at {t}: {r3}"
            );
        }
    }

    #[test]
    fn omega_inv_constant_over_four_periods() {
        let sol = row_a_solution();
        let spec = InvariantSpec::new((0.8, 0.3, 1.7), 1.0, &sol).unwrap();
        let w0 = spec.omega_inv();
        for k in 0..=400 {
            let t = 4.0 * k as f64 / 400.0;
            let drift = (spec.omega_inv_at(t) - w0).abs() / w0;
            assert!(drift < tol::OMEGA_INV_DRIFT, "drift {drift} at t = {t}");
        }
    }

    #[test]
    fn matching_reaches_hamiltonian_and_omega1() {
        let sol = row_a_solution();
        let (spec, t_star) = InvariantSpec::hamiltonian_matching(&sol, 1.0).unwrap();
        let g = spec.g_triple(t_star);
        let w1 = sol.profile.omega1;
        assert!((spec.mass * g.g_minus - 1.0).abs() < tol::H_MATCH);
        assert!((g.g_zero / w1).abs() < tol::H_MATCH);
        assert!((g.g_plus / (w1 * w1) - 1.0).abs() < tol::H_MATCH);
        assert!((spec.omega_inv() / w1 - 1.0).abs() < 1e-8);
        // matching survives amplitude rescaling of the solution
        let (spec_n, ts_n) =
            InvariantSpec::hamiltonian_matching(&sol.normalized().unwrap(), 1.0).unwrap();
        let gn = spec_n.g_triple(ts_n);
        assert!((spec_n.mass * gn.g_minus - 1.0).abs() < tol::H_MATCH);
    }

    #[test]
    fn matching_on_generic_stable_profile() {
        let p = DriveProfile::new(1.0, 0.33, 3.0, 1.64, Axis::X).unwrap();
        let sol = ClassicalSolution::stable(p).unwrap();
        let (spec, t_star) = InvariantSpec::hamiltonian_matching(&sol, 1.0).unwrap();
        let g = spec.g_triple(t_star);
        assert!((spec.mass * g.g_minus - 1.0).abs() < tol::H_MATCH);
        assert!((spec.omega_inv() / p.omega1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matching_degenerate_denominator() {
        // tau2 = 0, x axis, sin(w1 tau) > 0: mode is (1, 0), so beta2 = b0 = 0
        let p = DriveProfile::new(1.0, 0.0, 1.0, 0.5, Axis::X).unwrap();
        let sol = ClassicalSolution::stable(p).unwrap();
        assert!(matches!(
            InvariantSpec::hamiltonian_matching(&sol, 1.0),
            Err(Error::DegenerateInvariant(_))
        ));
    }

    #[test]
    fn numeric_matching_agrees_with_closed_form() {
        let sol = row_a_solution();
        let (spec, t_star) = InvariantSpec::hamiltonian_matching(&sol, 1.0).unwrap();
        let spec_n = InvariantSpec::hamiltonian_matching_at(&sol, 1.0, t_star).unwrap();
        assert!((spec.c1 - spec_n.c1).abs() < 1e-7 * spec.c1.abs());
        assert!((spec.c2 - spec_n.c2).abs() < 1e-7 * (spec.c1.abs() + spec.c3.abs()));
        assert!((spec.c3 - spec_n.c3).abs() < 1e-7 * spec.c3.abs());
    }

    #[test]
    fn numeric_matching_rejects_defocusing_instant() {
        let sol = row_a_solution();
        // t = 0 sits mid defocusing segment for the x axis
        assert!(InvariantSpec::hamiltonian_matching_at(&sol, 1.0, 0.0).is_err());
    }

    #[test]
    fn complex_construction_identities() {
        let sol = row_a_solution();
        let spec = InvariantSpec::from_complex_solution((1.0, 0.0, 1.0), 1.0, &sol).unwrap();
        assert_eq!((spec.c1, spec.c2, spec.c3), (1.0, 0.0, 1.0));
        // g- = f1^2 + f2^2 = |f|^2
        for k in 0..100 {
            let t = -1.0 + 0.05 * k as f64;
            let (f, _) = sol.evaluate(t);
            let g = spec.g_triple(t);
            assert!((g.g_minus - f.norm_sqr()).abs() <= 1e-10 * f.norm_sqr());
        }
        assert!(matches!(
            InvariantSpec::from_complex_solution((0.0, 1.0, 1.0), 1.0, &sol),
            Err(Error::DegenerateInvariant(_))
        ));
    }

    #[test]
    fn complex_construction_g_minus_is_mod_squared_random() {
        let sol = row_a_solution();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            // splitmix64
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            (z ^ (z >> 31)) as f64 / u64::MAX as f64 * 4.0 - 2.0
        };
        for _ in 0..20 {
            let (d1, d2, d3) = (next(), next(), next());
            if d1.abs() < 0.1 || d3.abs() < 0.1 {
                continue;
            }
            let spec = InvariantSpec::from_complex_solution((d1, d2, d3), 1.0, &sol).unwrap();
            assert!(4.0 * spec.c1 * spec.c3 - spec.c2 * spec.c2 > 0.0);
            for k in 0..10 {
                let t = 0.1 + 0.37 * k as f64;
                let (f, _) = sol.evaluate(t);
                let fc_re = d1 * f.re + d2 * f.im;
                let fc_im = d3 * f.im;
                let g = spec.g_triple(t);
                let m2 = fc_re * fc_re + fc_im * fc_im;
                assert!((g.g_minus - m2).abs() <= 1e-10 * m2.max(1e-30));
            }
        }
    }

    #[test]
    fn closed_form_omega_inv_matches_determinant() {
        let p = DriveProfile::new(1.0, 0.2, 2.9, 1.7, Axis::X).unwrap();
        let sol = ClassicalSolution::stable(p).unwrap();
        for c in [(1.0, 0.0, 1.0), (2.0, 1.0, 3.0), (0.5, -0.2, 0.4)] {
            let spec = InvariantSpec::new(c, 1.0, &sol).unwrap();
            let closed =
                0.5 * spec.mass * sol.wronskian().abs() * (4.0 * c.0 * c.2 - c.1 * c.1).sqrt();
            assert!((spec.omega_inv() - closed).abs() <= 1e-9 * closed);
        }
    }

    #[test]
    fn complex_params_round_trip() {
        let sol = row_a_solution();
        let spec = InvariantSpec::from_complex_solution((1.2, -0.7, 0.9), 1.0, &sol).unwrap();
        let (d1, d2, d3) = spec.complex_params();
        assert!((d1 * d1 - spec.c1).abs() < 1e-12);
        assert!((2.0 * d1 * d2 - spec.c2).abs() < 1e-12);
        assert!((d2 * d2 + d3 * d3 - spec.c3).abs() < 1e-12);
    }
}
