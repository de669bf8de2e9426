//! Independent numerical engines: RK4 integration of f̈ + ω²(t)f = 0 with
//! boundary-aligned steps, adaptive Gauss–Kronrod quadrature, bracketed root
//! finding, and Gauss–Legendre nodes.
//!
//! These serve double duty as production machinery and as brute-force oracles
//! for the closed forms, so they deliberately share no code with the
//! analytic paths they check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::DriveProfile;

/// State of the second-order oscillator equation at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub t: f64,
    pub f: Complex64,
    pub fdot: Complex64,
}

impl OdeState {
    pub fn new(t: f64, f: Complex64, fdot: Complex64) -> Self {
        Self { t, f, fdot }
    }

    pub fn real(t: f64, f: f64, fdot: f64) -> Self {
        Self {
            t,
            f: Complex64::new(f, 0.0),
            fdot: Complex64::new(fdot, 0.0),
        }
    }

    /// Euclidean norm of the 4-vector (Re f, Im f, Re ḟ, Im ḟ).
    pub fn norm(&self) -> f64 {
        (self.f.norm_sqr() + self.fdot.norm_sqr()).sqrt()
    }
}

fn rk4_const_coeff(
    mut f: Complex64,
    mut fd: Complex64,
    w2: f64,
    dt: f64,
    n: usize,
) -> (Complex64, Complex64) {
    // classical RK4 for f'' = -w2 * f with the coefficient frozen over the span
    for _ in 0..n {
        let k1f = fd;
        let k1d = -w2 * f;
        let k2f = fd + 0.5 * dt * k1d;
        let k2d = -w2 * (f + 0.5 * dt * k1f);
        let k3f = fd + 0.5 * dt * k2d;
        let k3d = -w2 * (f + 0.5 * dt * k2f);
        let k4f = fd + dt * k3d;
        let k4d = -w2 * (f + dt * k3f);
        f += dt / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        fd += dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    (f, fd)
}

/// Integrate f̈ + ω²(t)f = 0 forward from `state.t` to `t_end`.
///
/// `breakpoints` lists the interior times where ω² jumps; steps are aligned
/// so no step straddles one, and ω² is sampled once per span midpoint (exact
/// for piecewise-constant schedules). Global error is O(max_step⁴).
pub fn integrate_eom<F: Fn(f64) -> f64>(
    omega_sq: F,
    breakpoints: &[f64],
    state: OdeState,
    t_end: f64,
    max_step: f64,
) -> OdeState {
    assert!(max_step > 0.0, "max_step must be positive");
    if t_end <= state.t {
        return OdeState { t: t_end, ..state };
    }
    let mut pts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    pts.push(state.t);
    pts.extend(
        breakpoints
            .iter()
            .copied()
            .filter(|&b| b > state.t && b < t_end),
    );
    pts.push(t_end);
    let (mut f, mut fd) = (state.f, state.fdot);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        let n = ((b - a) / max_step).ceil().max(1.0) as usize;
        let dt = (b - a) / n as f64;
        let w2 = omega_sq(0.5 * (a + b));
        (f, fd) = rk4_const_coeff(f, fd, w2, dt, n);
    }
    OdeState {
        t: t_end,
        f,
        fdot: fd,
    }
}

/// Integrate the drive's equation of motion, sampling at each requested time.
///
/// `times` must be ascending and start at or after `state.t`.
pub fn integrate_profile_to_times(
    profile: &DriveProfile,
    state: OdeState,
    times: &[f64],
    max_step: f64,
) -> Vec<OdeState> {
    let mut out = Vec::with_capacity(times.len());
    let mut cur = state;
    for &t in times {
        assert!(t >= cur.t, "times must be ascending from the initial state");
        let breaks = profile.boundaries_between(cur.t, t);
        cur = integrate_eom(|u| profile.omega_sq(u), &breaks, cur, t, max_step);
        out.push(cur);
    }
    out
}

/// One-period transfer (monodromy) matrix of the drive on (f, ḟ), computed by
/// RK4 from two unit initial conditions over the period window starting at
/// τ₂ − τ. This is the oracle behind every closed-form stability quantity.
pub fn monodromy(profile: &DriveProfile, max_step: f64) -> [[f64; 2]; 2] {
    let t0 = profile.tau2 - profile.tau;
    let t1 = t0 + profile.tau;
    let breaks = profile.boundaries_between(t0, t1);
    let col = |f0: f64, fd0: f64| {
        let s = integrate_eom(
            |u| profile.omega_sq(u),
            &breaks,
            OdeState::real(t0, f0, fd0),
            t1,
            max_step,
        );
        (s.f.re, s.fdot.re)
    };
    let (m00, m10) = col(1.0, 0.0);
    let (m01, m11) = col(0.0, 1.0);
    [[m00, m01], [m10, m11]]
}

/// Half-trace of the one-period transfer matrix: the stability parameter λ.
pub fn monodromy_half_trace(profile: &DriveProfile, max_step: f64) -> f64 {
    let m = monodromy(profile, max_step);
    0.5 * (m[0][0] + m[1][1])
}

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae on [0,1],
// symmetric about the center).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, (kron - gauss).abs() * h.abs())
}

/// Adaptive Gauss–Kronrod integral of a smooth function on [a, b].
///
/// Bisects until each panel's Kronrod-vs-Gauss discrepancy is below its share
/// of `rel_tol` times the running estimate. Errors out instead of silently
/// returning a bad value when the subdivision budget is exhausted.
pub fn quad_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };
    let (i0, _) = gk15(&f, lo, hi);
    let scale = i0.abs().max(1e-300);
    let mut total = 0.0;
    let mut stack = vec![(lo, hi, 0u32)];
    let mut panels = 0usize;
    while let Some((x0, x1, depth)) = stack.pop() {
        let (v, e) = gk15(&f, x0, x1);
        let width_share = (x1 - x0) / (hi - lo);
        if e <= rel_tol * scale * width_share.max(1e-6) || e <= rel_tol * v.abs() {
            total += v;
            continue;
        }
        if depth >= 60 {
            return Err(Error::QuadratureFailed(format!(
                "panel [{x0}, {x1}] still has error {e:.3e} at depth {depth}"
            )));
        }
        panels += 1;
        if panels > 1_000_000 {
            return Err(Error::QuadratureFailed("panel budget exhausted".into()));
        }
        let mid = 0.5 * (x0 + x1);
        stack.push((x0, mid, depth + 1));
        stack.push((mid, x1, depth + 1));
    }
    Ok(sign * total)
}

/// Bracketed root finding by Brent's method (inverse quadratic / secant with
/// a bisection fallback). Requires a sign change on [a, b].
pub fn find_root_bracketed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::NoSignChange { a, b });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = b - a;
    for _ in 0..200 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation (secant when a == c)
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Ok(b)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let m = n.div_ceil(2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            let dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let z1 = z;
            z -= p0 / dp;
            if (z - z1).abs() < 1e-15 {
                let dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
                x[i] = -z;
                x[n - 1 - i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                w[n - 1 - i] = w[i];
                break;
            }
        }
    }
    (x, w)
}

/// Composite Gauss–Legendre integral: `panels` equal panels of `nodes` points.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, nodes: usize) -> f64 {
    let (x, w) = gauss_legendre(nodes);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let c = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            total += wi * f(c + 0.5 * h * xi);
        }
    }
    total * 0.5 * h
}
