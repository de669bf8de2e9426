//! Two-path interference of an electron beam passing through a pair of
//! square-wave-driven traps.
//!
//! A plane wave enters each trap along z; over a transit time T that is an
//! integer multiple of a path's minimal cyclic period, every populated
//! eigenstate of that path acquires one overall factor e^{−iθ(T)/2} per
//! transverse axis (the plane-wave refactorization checked in [`phase`]),
//! the common z phase cancels between the paths, and the fringe contrast is
//! governed solely by Θ₂ − Θ₁ = θ₂(T) − θ₁(T). Destructive interference
//! requires |Θ₂ − Θ₁| = π, reachable by doubling one path's cycle count or
//! by stepping the phase winding number l at fixed N′.

use crate::error::{Error, Result};
use crate::floquet::ClassicalSolution;
use crate::invariant::InvariantSpec;
use crate::params::{
    self, Axis, DriveProfile, FreqConvention, ELECTRON_MASS, ELEMENTARY_CHARGE, REDUCED_PLANCK,
};
use crate::phase::{self, CisRule};
use crate::tol;

/// Duty cycle of the cyclic-drive regime (τ₂ = τ/4).
pub const CIS_DUTY: f64 = 0.25;

/// How the transit time relates to the drive for a given N′.
///
/// `MinimalPeriod` (default) makes T one minimal period τ′ = N′τ/ε of the
/// slower path, which is what yields a π phase difference for the standard
/// configurations. `FullPeriodCount` uses T = N′τ literally; for even N′
/// this doubles the transit and turns the difference into a multiple of 2π,
/// so it is reported but not used for destructive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransitConvention {
    #[default]
    MinimalPeriod,
    FullPeriodCount,
}

/// Transit time over one cycle of an (l, N′) path with drive period `tau`.
pub fn transit_time(n_prime: u32, tau: f64, conv: TransitConvention) -> f64 {
    let epsilon = if n_prime.is_multiple_of(2) { 2.0 } else { 1.0 };
    match conv {
        TransitConvention::MinimalPeriod => n_prime as f64 * tau / epsilon,
        TransitConvention::FullPeriodCount => n_prime as f64 * tau,
    }
}

/// One interferometer arm: the drive pair for both transverse axes plus the
/// cyclic parameters it was tuned to.
#[derive(Debug, Clone)]
pub struct PathConfig {
    /// Arm label (1 or 2).
    pub label: u8,
    pub x_profile: DriveProfile,
    pub y_profile: DriveProfile,
    pub l: u32,
    pub n_prime: u32,
}

impl PathConfig {
    /// Tune an arm to the (l, N′) cyclic configuration at drive period `tau`
    /// (seconds or any consistent unit).
    pub fn from_cis(label: u8, l: u32, n_prime: u32, tau: f64) -> Result<Self> {
        let cfg = phase::cis_search(l, n_prime, CIS_DUTY, CisRule::B)?;
        let omega = cfg.omega_tau / tau;
        let x_profile = DriveProfile::new(tau, CIS_DUTY * tau, omega, omega, Axis::X)?;
        Ok(Self {
            label,
            x_profile,
            y_profile: x_profile.with_axis(Axis::Y),
            l,
            n_prime,
        })
    }

    /// Minimal period τ′ = N′τ/ε of this arm.
    pub fn minimal_period(&self) -> f64 {
        transit_time(
            self.n_prime,
            self.x_profile.tau,
            TransitConvention::MinimalPeriod,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.x_profile.axis != Axis::X || self.y_profile.axis != Axis::Y {
            return Err(Error::InvalidParameter(format!(
                "path {}: profiles must carry their own axes",
                self.label
            )));
        }
        let (x, y) = (&self.x_profile, &self.y_profile);
        if x.tau != y.tau || x.tau2 != y.tau2 || x.omega1 != y.omega1 || x.omega2 != y.omega2 {
            return Err(Error::InvalidParameter(format!(
                "path {}: x and y drives must share period, duty and frequencies",
                self.label
            )));
        }
        Ok(())
    }

    /// Accumulated θ(T) for one axis of this arm, canonical invariant choice.
    fn theta_axis(&self, axis: Axis, t: f64) -> Result<f64> {
        let profile = match axis {
            Axis::X => self.x_profile,
            Axis::Y => self.y_profile,
        };
        let sol = ClassicalSolution::stable(profile)?;
        let spec = InvariantSpec::from_complex_solution((1.0, 0.0, 1.0), 1.0, &sol)?;
        phase::theta(&spec, t)
    }

    /// Total arm phase Θ(t) = ½(θ_x + θ_y). The x and y phases are equal
    /// for the shared drive; this is verified, not assumed.
    pub fn total_phase(&self, t: f64) -> Result<f64> {
        self.validate()?;
        let tx = self.theta_axis(Axis::X, t)?;
        let ty = self.theta_axis(Axis::Y, t)?;
        if (tx - ty).abs() > tol::THETA_DUAL * (1.0 + tx.abs()) {
            return Err(Error::OracleMismatch(format!(
                "path {}: theta_x({t}) = {tx} differs from theta_y({t}) = {ty}",
                self.label
            )));
        }
        Ok(0.5 * (tx + ty))
    }
}

/// The full two-arm arrangement.
#[derive(Debug, Clone)]
pub struct ExperimentSetup {
    pub path1: PathConfig,
    pub path2: PathConfig,
    /// Trap length D along the beam, m.
    pub trap_length: f64,
    /// Beam speed v, m/s.
    pub speed: f64,
    /// Transit time T = D/v; must be an integer multiple of each arm's
    /// minimal period.
    pub transit_time: f64,
    /// Plane-wave number along z, 1/m (k = m·v/ħ).
    pub k_z: f64,
    /// Kinetic energy of the z motion, J; its phase is common to both arms
    /// and cancels from the difference.
    pub energy_z: f64,
}

impl ExperimentSetup {
    /// Build a two-arm setup from cyclic parameters; the drive period is set
    /// so the transit equals one minimal period of arm 1.
    pub fn from_cis_pair(
        (l1, n1): (u32, u32),
        (l2, n2): (u32, u32),
        trap_length: f64,
        speed: f64,
    ) -> Result<Self> {
        if !(trap_length > 0.0) || !(speed > 0.0) {
            return Err(Error::InvalidParameter(
                "trap length and speed must be positive".into(),
            ));
        }
        let transit = trap_length / speed;
        let eps1 = if n1.is_multiple_of(2) { 2.0 } else { 1.0 };
        let tau = transit * eps1 / n1 as f64;
        let path1 = PathConfig::from_cis(1, l1, n1, tau)?;
        let path2 = PathConfig::from_cis(2, l2, n2, tau)?;
        Self::new(path1, path2, trap_length, speed)
    }

    pub fn new(path1: PathConfig, path2: PathConfig, trap_length: f64, speed: f64) -> Result<Self> {
        let transit_time = trap_length / speed;
        let setup = Self {
            path1,
            path2,
            trap_length,
            speed,
            transit_time,
            k_z: ELECTRON_MASS * speed / REDUCED_PLANCK,
            energy_z: 0.5 * ELECTRON_MASS * speed * speed,
        };
        setup.path1.validate()?;
        setup.path2.validate()?;
        for p in [&setup.path1, &setup.path2] {
            let ratio = setup.transit_time / p.minimal_period();
            if (ratio - ratio.round()).abs() > tol::COMMENSURATE_REL * ratio.max(1.0)
                || ratio.round() < 1.0
            {
                return Err(Error::Incommensurate(format!(
                    "path {}: T/tau' = {ratio} is not a positive integer",
                    p.label
                )));
            }
        }
        Ok(setup)
    }
}

/// Phase difference Θ₂ − Θ₁ = θ₂(T) − θ₁(T) between the arms (unwrapped).
///
/// Each arm's phase is ½(θ_x + θ_y); the x and y cycle phases are equal for
/// the shared drive and this is verified, not assumed. Arms whose cycle
/// phase fails the plane-wave refactorization are refused.
pub fn phase_difference(setup: &ExperimentSetup) -> Result<f64> {
    let mut totals = [0.0; 2];
    for (slot, p) in [&setup.path1, &setup.path2].into_iter().enumerate() {
        let cycle = p.theta_axis(Axis::X, p.minimal_period())?;
        let coherence = phase::coherence_factorization(cycle, 10);
        if !coherence.factorizes() {
            return Err(Error::InvalidParameter(format!(
                "path {}: cycle phase {cycle} does not refactorize (offending n = {:?})",
                p.label, coherence.offending
            )));
        }
        totals[slot] = p.total_phase(setup.transit_time)?;
    }
    Ok(totals[1] - totals[0])
}

/// Idealized two-beam fringe intensity relative to its maximum:
/// (1 + cos Δ)/2 = cos²(Δ/2).
pub fn fringe_intensity(delta: f64) -> f64 {
    let c = (0.5 * delta).cos();
    c * c
}

/// Interference classification at the detection point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Constructive,
    Destructive,
    Intermediate,
}

impl Classification {
    pub fn of(delta: f64) -> Self {
        let w = phase::wrap_angle(delta).abs();
        if w < tol::PHASE_DIFFERENCE {
            Classification::Constructive
        } else if (w - std::f64::consts::PI).abs() < tol::PHASE_DIFFERENCE {
            Classification::Destructive
        } else {
            Classification::Intermediate
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Classification::Constructive => "constructive",
            Classification::Destructive => "destructive",
            Classification::Intermediate => "intermediate",
        }
    }
}

/// Strategy for reaching |Θ₂ − Θ₁| = π.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DestructiveStrategy {
    /// l = 1 on both arms, N′₁ = 2·N′₂ with N′₂ even: the slower arm
    /// completes one cycle (θ = π) while the faster completes two (2π).
    PeriodDoubling { base_n_prime: u32 },
    /// Same odd N′ on both arms, l = 1 vs l = 2: cycle phases π vs 2π.
    WindingStep { n_prime: u32 },
}

/// Admissible ranges for the destructive search.
#[derive(Debug, Clone, Copy)]
pub struct SearchConstraints {
    /// Trap length D, m.
    pub trap_length: f64,
    /// Drive period τ, s.
    pub tau: f64,
    pub v_min: f64,
    pub v_max: f64,
}

/// Find a destructive setup under the strategy, with the transit equal to
/// one minimal period of the slower arm (v = D/T).
pub fn destructive_search(
    strategy: DestructiveStrategy,
    c: &SearchConstraints,
) -> Result<ExperimentSetup> {
    if !(c.trap_length > 0.0) || !(c.tau > 0.0) || !(0.0 < c.v_min && c.v_min <= c.v_max) {
        return Err(Error::InvalidParameter("invalid search constraints".into()));
    }
    let ((l1, n1), (l2, n2)) = match strategy {
        DestructiveStrategy::PeriodDoubling { base_n_prime } => {
            if !base_n_prime.is_multiple_of(2) || base_n_prime == 0 {
                return Err(Error::InvalidParameter(
                    "period doubling needs an even base N' (both arms keep even N')".into(),
                ));
            }
            ((1, 2 * base_n_prime), (1, base_n_prime))
        }
        DestructiveStrategy::WindingStep { n_prime } => {
            if n_prime.is_multiple_of(2) || n_prime < 3 {
                return Err(Error::InvalidParameter(
                    "winding step needs an odd N' >= 3".into(),
                ));
            }
            ((1, n_prime), (2, n_prime))
        }
    };
    let transit = transit_time(n1, c.tau, TransitConvention::MinimalPeriod);
    let v = c.trap_length / transit;
    if v < c.v_min || v > c.v_max {
        return Err(Error::NoAdmissibleVelocity(format!(
            "required v = {v:.6e} m/s lies outside [{:.6e}, {:.6e}]",
            c.v_min, c.v_max
        )));
    }
    let path1 = PathConfig::from_cis(1, l1, n1, c.tau)?;
    let path2 = PathConfig::from_cis(2, l2, n2, c.tau)?;
    let setup = ExperimentSetup::new(path1, path2, c.trap_length, v)?;
    let delta = phase_difference(&setup)?;
    if (delta.abs() - std::f64::consts::PI).abs() > tol::PHASE_DIFFERENCE {
        return Err(Error::OracleMismatch(format!(
            "search produced |difference| = {} instead of pi",
            delta.abs()
        )));
    }
    Ok(setup)
}

/// SI-scale estimate for one arm tuned to (l, N′).
#[derive(Debug, Clone)]
pub struct SiEstimate {
    pub l: u32,
    pub n_prime: u32,
    /// Transit time T = D/v, s.
    pub transit_time: f64,
    /// Drive period with the minimal-period transit convention, s.
    pub tau: f64,
    /// Drive period under the literal full-period-count convention, s
    /// (differs by ε; reported for comparison).
    pub tau_full_count: f64,
    /// Dimensionless root ωτ of the cyclic condition.
    pub omega_tau: f64,
    /// Segment frequency ω, rad/s.
    pub omega: f64,
    /// Voltage magnitude under ω² = e|Φ|/(2md²), V.
    pub phi_abs_halved: f64,
    /// Voltage magnitude under ω² = e|Φ|/(md²), V.
    pub phi_abs_plain: f64,
    pub notes: Vec<String>,
}

/// Work an (l, N′) arm back to laboratory numbers for an electron: drive
/// period, frequency, and the voltage magnitude under both conventions.
pub fn estimate_si(
    trap_length: f64,
    gap: f64,
    speed: f64,
    l: u32,
    n_prime: u32,
) -> Result<SiEstimate> {
    if !(trap_length > 0.0) || !(gap > 0.0) || !(speed > 0.0) {
        return Err(Error::InvalidParameter(
            "trap length, gap and speed must be positive".into(),
        ));
    }
    let cfg = phase::cis_search(l, n_prime, CIS_DUTY, CisRule::B)?;
    let transit = trap_length / speed;
    let epsilon = if n_prime.is_multiple_of(2) { 2.0 } else { 1.0 };
    let tau = transit * epsilon / n_prime as f64;
    let tau_full_count = transit / n_prime as f64;
    let omega = cfg.omega_tau / tau;
    let phi_abs_halved = params::voltage_from_omega(
        omega,
        ELECTRON_MASS,
        ELEMENTARY_CHARGE,
        gap,
        FreqConvention::Halved,
    )?;
    let phi_abs_plain = params::voltage_from_omega(
        omega,
        ELECTRON_MASS,
        ELEMENTARY_CHARGE,
        gap,
        FreqConvention::Plain,
    )?;
    let mut notes = Vec::new();
    notes.push(format!(
        "transit {transit:.3e} s equals one minimal period N'tau/epsilon = {}tau/{}",
        n_prime, epsilon as u32
    ));
    notes.push(if (1e8..1e9).contains(&omega) {
        format!("segment frequency {omega:.3e} rad/s sits in the sub-GHz range")
    } else {
        format!("segment frequency {omega:.3e} rad/s")
    });
    notes.push(format!(
        "voltage magnitude {phi_abs_halved:.2} V (halved convention) or {phi_abs_plain:.2} V (plain)"
    ));
    if gap <= 1e-3 {
        notes.push(format!("gap {gap:.1e} m is submillimeter"));
    }
    notes.push(format!(
        "full-period-count convention would need tau = {tau_full_count:.3e} s instead"
    ));
    Ok(SiEstimate {
        l,
        n_prime,
        transit_time: transit,
        tau,
        tau_full_count,
        omega_tau: cfg.omega_tau,
        omega,
        phi_abs_halved,
        phi_abs_plain,
        notes,
    })
}
