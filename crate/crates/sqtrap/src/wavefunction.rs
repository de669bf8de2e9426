//! Exact eigenfunctions of the quadratic invariant and their numerical
//! verification.
//!
//! The n-th eigenstate at time t is
//!
//! ```text
//! ψₙ(q, t) = (2ⁿn!)^{-1/2} (ω_I/(π g₋))^{1/4}
//!            · exp(−i g₀ q²/(2g₋)) · exp(−i(n+½)θ(t))
//!            · exp(−ω_I q²/(2g₋)) · Hₙ(√(ω_I/g₋)·q)
//! ```
//!
//! in natural units (ħ = 1). With θ from the phase module these solve the
//! time-dependent Schrödinger equation for the driven oscillator exactly;
//! the checks here probe that claim with finite differences and quadrature.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::invariant::InvariantSpec;
use crate::numeric::integrate_gl;
use crate::phase;

/// Physicists' Hermite polynomial by the three-term recurrence
/// H_{k+1} = 2x·H_k − 2k·H_{k−1}.
pub fn hermite(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0 * x,
        _ => {
            let (mut hm, mut h) = (1.0, 2.0 * x);
            for k in 1..n {
                let next = 2.0 * x * h - 2.0 * k as f64 * hm;
                hm = h;
                h = next;
            }
            h
        }
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Frozen time slice of the n-th eigenstate: everything q-independent is
/// evaluated once, so dense position grids are cheap.
#[derive(Debug, Clone, Copy)]
pub struct EigenstateSlice {
    pub n: u32,
    pub t: f64,
    pub mass: f64,
    pub g_minus: f64,
    pub g_zero: f64,
    pub omega_inv: f64,
    /// Accumulated phase θ(t) of the underlying complex solution.
    pub theta: f64,
}

impl EigenstateSlice {
    pub fn new(spec: &InvariantSpec, n: u32, t: f64) -> Result<Self> {
        let g = spec.g_triple(t);
        if !(g.g_minus > 0.0) {
            return Err(Error::DegenerateInvariant(format!(
                "g- = {} not positive at t = {t}",
                g.g_minus
            )));
        }
        Ok(Self {
            n,
            t,
            mass: spec.mass,
            g_minus: g.g_minus,
            g_zero: g.g_zero,
            omega_inv: spec.omega_inv(),
            theta: phase::theta(spec, t)?,
        })
    }

    /// Gaussian width: the n = 0 probability density has variance g₋/(2ω_I).
    pub fn sigma(&self) -> f64 {
        (self.g_minus / (2.0 * self.omega_inv)).sqrt()
    }

    /// Complex amplitude ψₙ(q) at this time slice. The factorial part of the
    /// normalization is carried in log space, so large n cannot overflow the
    /// prefactor.
    pub fn eval(&self, q: f64) -> Complex64 {
        let ratio = self.omega_inv / self.g_minus;
        let ln_norm = 0.25 * (ratio / std::f64::consts::PI).ln()
            - 0.5 * (self.n as f64 * std::f64::consts::LN_2 + ln_factorial(self.n));
        let gauss = -0.5 * ratio * q * q;
        let h = hermite(self.n, ratio.sqrt() * q);
        let phase =
            -self.g_zero * q * q / (2.0 * self.g_minus) - (self.n as f64 + 0.5) * self.theta;
        h * (ln_norm + gauss).exp() * Complex64::from_polar(1.0, phase)
    }
}

/// One sampled amplitude, as emitted by the density-slice interface.
#[derive(Debug, Clone, Copy)]
pub struct EigenstateSample {
    pub n: u32,
    pub q: f64,
    pub t: f64,
    pub amplitude: Complex64,
}

/// ψₙ(q, t) for a single point; build an [`EigenstateSlice`] for grids.
pub fn psi(spec: &InvariantSpec, n: u32, q: f64, t: f64) -> Result<Complex64> {
    Ok(EigenstateSlice::new(spec, n, t)?.eval(q))
}

/// Amplitudes over a position grid at fixed time.
pub fn density_slice(
    spec: &InvariantSpec,
    n: u32,
    t: f64,
    qs: &[f64],
) -> Result<Vec<EigenstateSample>> {
    let slice = EigenstateSlice::new(spec, n, t)?;
    Ok(qs
        .iter()
        .map(|&q| EigenstateSample {
            n,
            q,
            t,
            amplitude: slice.eval(q),
        })
        .collect())
}

/// Number of quadrature panels and nodes per panel for the inner products.
const NORM_PANELS: usize = 4;
const NORM_NODES: usize = 100;
/// Integration half-width in units of the Gaussian width: the discarded tail
/// is below 1e-30.
const NORM_HALF_WIDTH: f64 = 12.0;

/// Complex inner product ⟨ψ_m, ψ_n⟩ at time t by composite Gauss–Legendre
/// quadrature over |q| ≤ 12·σ(t).
pub fn inner_product(spec: &InvariantSpec, m: u32, n: u32, t: f64) -> Result<Complex64> {
    let sm = EigenstateSlice::new(spec, m, t)?;
    let sn = if m == n {
        sm
    } else {
        EigenstateSlice::new(spec, n, t)?
    };
    let w = NORM_HALF_WIDTH * sm.sigma();
    let re = integrate_gl(
        |q| (sm.eval(q).conj() * sn.eval(q)).re,
        -w,
        w,
        NORM_PANELS,
        NORM_NODES,
    );
    let im = integrate_gl(
        |q| (sm.eval(q).conj() * sn.eval(q)).im,
        -w,
        w,
        NORM_PANELS,
        NORM_NODES,
    );
    Ok(Complex64::new(re, im))
}

/// Max Schrödinger residual |iψ̇ + ψ″/2m − mω²(t)q²ψ/2| over the grid,
/// normalized by the largest |ψ| on the grid at each time.
///
/// ψ̇ and ψ″ are central differences with steps `dt` and `dq`; each time
/// window [t − dt, t + dt] must stay inside one drive segment.
pub fn schrodinger_residual(
    spec: &InvariantSpec,
    n: u32,
    times: &[f64],
    qs: &[f64],
    dt: f64,
    dq: f64,
) -> Result<f64> {
    let profile = &spec.solution().profile;
    let mut worst: f64 = 0.0;
    for &t in times {
        if !profile.boundaries_between(t - dt, t + dt).is_empty() {
            return Err(Error::GridTouchesBoundary(format!(
                "time window [{} , {}] crosses a segment boundary",
                t - dt,
                t + dt
            )));
        }
        let here = EigenstateSlice::new(spec, n, t)?;
        let fwd = EigenstateSlice::new(spec, n, t + dt)?;
        let bwd = EigenstateSlice::new(spec, n, t - dt)?;
        let w2 = profile.omega_sq(t);
        let m = spec.mass;
        let scale = qs
            .iter()
            .map(|&q| here.eval(q).norm())
            .fold(1e-300, f64::max);
        for &q in qs {
            let psi = here.eval(q);
            let dpsi_dt = (fwd.eval(q) - bwd.eval(q)) / (2.0 * dt);
            let d2psi = (here.eval(q + dq) - 2.0 * psi + here.eval(q - dq)) / (dq * dq);
            let residual =
                Complex64::i() * dpsi_dt + d2psi / (2.0 * m) - 0.5 * m * w2 * q * q * psi;
            worst = worst.max(residual.norm() / scale);
        }
    }
    Ok(worst)
}
