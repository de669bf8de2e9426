//! Stability classification of the (ω₁τ, ω₂τ) plane and divergence
//! measurement in the unstable regime.
//!
//! A point is x-stable when |λ_x| ≤ 1 and y-stable when |λ_y| ≤ 1 (the
//! boundary counts as stable and is flagged marginal). Cells along the
//! ω = 0 edges, where the closed-form transfer coefficients are singular,
//! are classified through an exact product of segment propagators instead.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::floquet::{floquet_data, transfer_data, ClassicalSolution};
use crate::numeric::{integrate_profile_to_times, OdeState};
use crate::params::{Axis, DriveProfile};

/// One classified grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityCell {
    pub omega1_tau: f64,
    pub omega2_tau: f64,
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub x_stable: bool,
    pub y_stable: bool,
    /// |1 − |λ|| < 1e-9: the cell sits on a stability boundary.
    pub x_marginal: bool,
    pub y_marginal: bool,
}

/// Uniform closed grid over one dimensionless frequency axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridRange {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if !(min >= 0.0) || !(max > min) || n < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs 0 <= min < max and n >= 2, got [{min}, {max}] x {n}"
            )));
        }
        Ok(Self { min, max, n })
    }

    /// Closed range with the given pitch; includes the right endpoint when it
    /// lands on the grid.
    pub fn from_step(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid step must be > 0, got {step}"
            )));
        }
        let n = ((max - min) / step + 1.0 + 1e-9).floor() as usize;
        Self::new(min, min + step * (n - 1) as f64, n)
    }

    pub fn at(&self, k: usize) -> f64 {
        self.min + (self.max - self.min) * k as f64 / (self.n - 1) as f64
    }
}

/// Row-major stability map; ω₁ varies fastest within a row.
#[derive(Debug, Clone)]
pub struct StabilityGrid {
    pub omega1: GridRange,
    pub omega2: GridRange,
    pub duty: f64,
    pub cells: Vec<StabilityCell>,
}

const MARGINAL_CELL: f64 = 1e-9;

/// 2×2 propagator of f̈ = −ω²f over a span of length `len` on (f, ḟ).
fn segment_propagator(omega_sq: f64, len: f64) -> [[f64; 2]; 2] {
    if omega_sq > 0.0 {
        let w = omega_sq.sqrt();
        let (s, c) = (w * len).sin_cos();
        [[c, s / w], [-w * s, c]]
    } else if omega_sq < 0.0 {
        let k = (-omega_sq).sqrt();
        let (s, c) = ((k * len).sinh(), (k * len).cosh());
        [[c, s / k], [k * s, c]]
    } else {
        [[1.0, len], [0.0, 1.0]]
    }
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// λ for one axis from the exact propagator product (valid for any ω ≥ 0).
fn lambda_propagator(omega1_tau: f64, omega2_tau: f64, duty: f64, axis: Axis) -> f64 {
    let (w1sq, w2sq) = match axis {
        Axis::X => (omega1_tau * omega1_tau, -omega2_tau * omega2_tau),
        Axis::Y => (-omega1_tau * omega1_tau, omega2_tau * omega2_tau),
    };
    let m = mat_mul(
        segment_propagator(w2sq, 2.0 * duty),
        segment_propagator(w1sq, 1.0 - 2.0 * duty),
    );
    0.5 * (m[0][0] + m[1][1])
}

/// (λ_x, λ_y) at one dimensionless grid point.
pub fn lambda_pair(omega1_tau: f64, omega2_tau: f64, duty: f64) -> Result<(f64, f64)> {
    if !(0.0..0.5).contains(&duty) {
        return Err(Error::InvalidParameter(format!(
            "duty must be in [0, 0.5), got {duty}"
        )));
    }
    if omega1_tau > 0.0 && (omega2_tau > 0.0 || duty == 0.0) {
        // production closed forms
        let px = DriveProfile::new(1.0, duty, omega1_tau, omega2_tau, Axis::X)?;
        let lx = floquet_data(&transfer_data(&px)?, &px)?.lambda;
        let py = px.with_axis(Axis::Y);
        let ly = floquet_data(&transfer_data(&py)?, &py)?.lambda;
        Ok((lx, ly))
    } else {
        // edge cells (either frequency zero): exact propagator product
        Ok((
            lambda_propagator(omega1_tau, omega2_tau, duty, Axis::X),
            lambda_propagator(omega1_tau, omega2_tau, duty, Axis::Y),
        ))
    }
}

fn classify(omega1_tau: f64, omega2_tau: f64, duty: f64) -> Result<StabilityCell> {
    let (lx, ly) = lambda_pair(omega1_tau, omega2_tau, duty)?;
    Ok(StabilityCell {
        omega1_tau,
        omega2_tau,
        lambda_x: lx,
        lambda_y: ly,
        x_stable: lx.abs() <= 1.0,
        y_stable: ly.abs() <= 1.0,
        x_marginal: (1.0 - lx.abs()).abs() < MARGINAL_CELL,
        y_marginal: (1.0 - ly.abs()).abs() < MARGINAL_CELL,
    })
}

/// Dense stability map. Cells are independent and computed in parallel; the
/// output ordering is row-major with ω₁ fastest regardless of scheduling.
pub fn stability_scan(omega1: GridRange, omega2: GridRange, duty: f64) -> Result<StabilityGrid> {
    if !(0.0..0.5).contains(&duty) {
        return Err(Error::InvalidParameter(format!(
            "duty must be in [0, 0.5), got {duty}"
        )));
    }
    let rows: Result<Vec<Vec<StabilityCell>>> = (0..omega2.n)
        .into_par_iter()
        .map(|j| {
            let w2 = omega2.at(j);
            (0..omega1.n)
                .map(|i| classify(omega1.at(i), w2, duty))
                .collect()
        })
        .collect();
    let cells = rows?.into_iter().flatten().collect();
    Ok(StabilityGrid {
        omega1,
        omega2,
        duty,
        cells,
    })
}

/// Measured vs expected norm growth of the unstable solution.
#[derive(Debug, Clone, Copy)]
pub struct DivergenceReport {
    pub periods: u32,
    /// ‖(f, ḟ)‖ growth factor over the given number of periods.
    pub growth: f64,
    /// |p₊|^periods for the growing multiplier p₊.
    pub expected: f64,
}

/// Growth of the unstable branch over whole periods.
///
/// Errors with the stability contract violation when |λ| ≤ 1.
pub fn divergence_check(profile: &DriveProfile, periods: u32) -> Result<DivergenceReport> {
    if periods == 0 {
        return Err(Error::InvalidParameter("periods must be >= 1".into()));
    }
    let sol = ClassicalSolution::unstable(*profile)?;
    let t0 = 0.4 * profile.tau;
    let n0 = {
        let (f, fd) = sol.evaluate(t0);
        (f.norm_sqr() + fd.norm_sqr()).sqrt()
    };
    let n1 = {
        let (f, fd) = sol.evaluate(t0 + periods as f64 * profile.tau);
        (f.norm_sqr() + fd.norm_sqr()).sqrt()
    };
    Ok(DivergenceReport {
        periods,
        growth: n1 / n0,
        expected: sol.floquet.growing_multiplier().norm().powi(periods as i32),
    })
}

/// RK-propagated growth of the same eigen-state, for oracle comparison.
pub fn divergence_check_rk(profile: &DriveProfile, periods: u32, max_step: f64) -> Result<f64> {
    let sol = ClassicalSolution::unstable(*profile)?;
    let t0 = 0.4 * profile.tau;
    let (f0, fd0) = sol.evaluate(t0);
    let t1 = t0 + periods as f64 * profile.tau;
    let states = integrate_profile_to_times(profile, OdeState::new(t0, f0, fd0), &[t1], max_step);
    let s = states[0];
    Ok(s.norm() / OdeState::new(t0, f0, fd0).norm())
}

#[cfg(test)]
#[allow(clippy::approx_constant)] // six-digit tabulated roots appear as literals
mod tests {
    use super::*;
    use crate::tol;
    use std::f64::consts::PI;

    #[test]
    fn symmetric_point_is_doubly_stable() {
        let c = classify(PI, PI, 0.25).unwrap();
        assert!(c.x_stable && c.y_stable);
        assert!(c.lambda_x.abs() < 1e-6 && c.lambda_y.abs() < 1e-6);
    }

    #[test]
    fn zero_duty_row_is_y_unstable() {
        for u in [0.5, 1.0, 2.0, 5.0] {
            let c = classify(u, 0.0, 0.0).unwrap();
            assert!(!c.y_stable, "y stable at omega1*tau = {u}");
            assert!((c.lambda_y - u.cosh()).abs() < 1e-10);
            assert!((c.lambda_x - u.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn tabulated_points_sit_in_doubly_stable_cells() {
        for u in [3.14159, 2.30517, 2.63690, 3.48328] {
            let c = classify(u, u, 0.25).unwrap();
            assert!(c.x_stable && c.y_stable, "point {u}");
            assert!(!c.x_marginal && !c.y_marginal);
        }
    }

    #[test]
    fn propagator_and_closed_form_agree() {
        for (u1, u2) in [(1.3, 2.2), (3.1, 0.7), (5.9, 4.4)] {
            let (lx, ly) = lambda_pair(u1, u2, 0.25).unwrap();
            let px = lambda_propagator(u1, u2, 0.25, Axis::X);
            let py = lambda_propagator(u1, u2, 0.25, Axis::Y);
            assert!((lx - px).abs() < 1e-10);
            assert!((ly - py).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_frequency_edges_classify() {
        // omega1 = 0 column and omega2 = 0 row must not error
        let (lx, ly) = lambda_pair(0.0, 1.5, 0.25).unwrap();
        assert!(lx.is_finite() && ly.is_finite());
        // x: free segment (length 1/2) then inverted segment (rate 3/2 over 1/2):
        // half-trace of the shear-times-hyperbolic product
        let expect = (0.75f64).cosh() + 0.375 * (0.75f64).sinh();
        assert!((lx - expect).abs() < 1e-12);
        let c = classify(0.0, 0.0, 0.25).unwrap();
        assert!((c.lambda_x - 1.0).abs() < 1e-12 && c.x_marginal);
    }

    #[test]
    fn scan_is_row_major_omega1_fastest() {
        let g = stability_scan(
            GridRange::new(0.0, 2.0, 3).unwrap(),
            GridRange::new(0.0, 1.0, 2).unwrap(),
            0.25,
        )
        .unwrap();
        assert_eq!(g.cells.len(), 6);
        let pts: Vec<(f64, f64)> = g
            .cells
            .iter()
            .map(|c| (c.omega1_tau, c.omega2_tau))
            .collect();
        assert_eq!(
            pts,
            vec![
                (0.0, 0.0),
                (1.0, 0.0),
                (2.0, 0.0),
                (0.0, 1.0),
                (1.0, 1.0),
                (2.0, 1.0)
            ]
        );
    }

    #[test]
    fn grid_symmetric_under_axis_swap() {
        // swapping frequencies and mirroring the duty swaps the axes
        let duty = 0.18;
        let mirrored = (1.0 - 2.0 * duty) / 2.0;
        for (u1, u2) in [(1.1, 2.7), (4.2, 3.3), (0.9, 5.1)] {
            let (lx, ly) = lambda_pair(u1, u2, duty).unwrap();
            let (sx, sy) = lambda_pair(u2, u1, mirrored).unwrap();
            assert!((ly - sx).abs() < 1e-9);
            assert!((lx - sy).abs() < 1e-9);
        }
    }

    #[test]
    fn refinement_moves_boundaries_less_than_one_coarse_cell() {
        // in each row, every x-classification flip of the fine grid must lie
        // within one coarse pitch of a coarse-grid flip
        let coarse = stability_scan(
            GridRange::new(0.0, 2.0 * PI, 65).unwrap(),
            GridRange::new(0.0, 2.0 * PI, 9).unwrap(),
            0.25,
        )
        .unwrap();
        let fine = stability_scan(
            GridRange::new(0.0, 2.0 * PI, 129).unwrap(),
            GridRange::new(0.0, 2.0 * PI, 9).unwrap(),
            0.25,
        )
        .unwrap();
        let pitch = 2.0 * PI / 64.0;
        let flips = |cells: &[StabilityCell], n: usize, row: usize| -> Vec<f64> {
            (0..n - 1)
                .filter(|&i| cells[row * n + i].x_stable != cells[row * n + i + 1].x_stable)
                .map(|i| 0.5 * (cells[row * n + i].omega1_tau + cells[row * n + i + 1].omega1_tau))
                .collect()
        };
        for row in 0..9 {
            let cf = flips(&coarse.cells, 65, row);
            let ff = flips(&fine.cells, 129, row);
            for f in &ff {
                let nearest = cf
                    .iter()
                    .map(|c| (c - f).abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    nearest <= pitch,
                    "fine boundary at {f} drifted {nearest} (row {row})"
                );
            }
            assert_eq!(cf.len(), ff.len(), "boundary count changed in row {row}");
        }
    }

    #[test]
    fn divergence_pure_inverted_oscillator() {
        let p = DriveProfile::new(1.0, 0.0, 1.0, 0.0, Axis::Y).unwrap();
        let rep = divergence_check(&p, 6).unwrap();
        // growth per period is exactly e^{omega1 tau}
        assert!((rep.growth / rep.expected - 1.0).abs() < 1e-9);
        assert!((rep.expected - (6.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn divergence_matches_rk_oracle() {
        let p = DriveProfile::new(1.0, 0.35, 1.2, 4.5, Axis::X).unwrap();
        let rep = divergence_check(&p, 8).unwrap();
        assert!(rep.growth >= rep.expected * (1.0 - tol::DIVERGENCE_SLACK));
        let rk = divergence_check_rk(&p, 8, 1e-4).unwrap();
        assert!(
            (rk / rep.expected - 1.0).abs() < tol::DIVERGENCE_MATCH_REL,
            "rk growth {rk} vs expected {}",
            rep.expected
        );
    }

    #[test]
    fn divergence_rejects_stable_profile() {
        let p = DriveProfile::new(1.0, 0.25, 3.14159, 3.14159, Axis::X).unwrap();
        assert!(matches!(
            divergence_check(&p, 4),
            Err(Error::NotUnstable { .. })
        ));
    }
}
