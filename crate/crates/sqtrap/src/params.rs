//! Physical parameters, voltage-to-frequency conversion, and the square-wave
//! drive profile used by every other module.
//!
//! The drive has period τ. Within the period indexed by the integer r the
//! voltage is positive on `(rτ + τ₂ − τ, rτ − τ₂)` and negative on
//! `(rτ − τ₂, rτ + τ₂)`, so `2τ₂` is the width of the negative segment.
//! The squared frequency of the x motion is `+ω₁²` on the positive segment
//! and `−ω₂²` on the negative one; the y motion sees the opposite signs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Electron mass in kg (CODATA 2018).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Elementary charge in C (CODATA 2018, exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant in J·s (CODATA 2018).
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;

/// Transverse axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// Voltage-to-frequency convention.
///
/// Both conventions are in circulation for quadrupole traps; they differ by
/// exactly √2 in ω. `Halved` (ω² = e|Φ|/2md²) is the default used for the
/// SI estimates; `Plain` (ω² = e|Φ|/md²) is exposed for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FreqConvention {
    #[default]
    #[serde(rename = "halved")]
    Halved,
    #[serde(rename = "plain")]
    Plain,
}

impl FreqConvention {
    fn denominator_factor(self) -> f64 {
        match self {
            FreqConvention::Halved => 2.0,
            FreqConvention::Plain => 1.0,
        }
    }
}

/// Trap and particle parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Particle mass in kg.
    pub mass: f64,
    /// Charge magnitude in C.
    pub charge: f64,
    /// Gap of the trap walls in m.
    pub gap: f64,
    /// Voltage on the positive segment, V. Must be > 0.
    pub phi1: f64,
    /// Voltage on the negative segment, V. Must be < 0.
    pub phi2: f64,
}

impl PhysicalParams {
    pub fn new(mass: f64, charge: f64, gap: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mass must be > 0, got {mass}"
            )));
        }
        if !(charge > 0.0) || !charge.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "charge magnitude must be > 0, got {charge}"
            )));
        }
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gap must be > 0, got {gap}"
            )));
        }
        if !(phi1 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "phi1 must be > 0 (sign convention of the square wave), got {phi1}"
            )));
        }
        if !(phi2 < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "phi2 must be < 0 (sign convention of the square wave), got {phi2}"
            )));
        }
        Ok(Self {
            mass,
            charge,
            gap,
            phi1,
            phi2,
        })
    }

    /// Electron parameters with the given gap and voltages.
    pub fn electron(gap: f64, phi1: f64, phi2: f64) -> Result<Self> {
        Self::new(ELECTRON_MASS, ELEMENTARY_CHARGE, gap, phi1, phi2)
    }
}

/// Segment frequencies (ω₁, ω₂) in rad/s from the voltages.
///
/// ωᵢ = sqrt(e·|Φᵢ| / (k·m·d²)) with k = 2 (`Halved`) or k = 1 (`Plain`).
pub fn omega_from_voltage(p: &PhysicalParams, conv: FreqConvention) -> (f64, f64) {
    let k = conv.denominator_factor();
    let denom = k * p.mass * p.gap * p.gap;
    (
        (p.charge * p.phi1.abs() / denom).sqrt(),
        (p.charge * p.phi2.abs() / denom).sqrt(),
    )
}

/// Wall gap d that pairs the voltage magnitude |Φ| with the frequency ω
/// under the given convention: d = √(e·|Φ| / (k·m·ω²)).
pub fn gap_from_voltage_omega(
    phi_abs: f64,
    omega: f64,
    mass: f64,
    charge: f64,
    conv: FreqConvention,
) -> Result<f64> {
    if !(phi_abs > 0.0) || !(omega > 0.0) || !(mass > 0.0) || !(charge > 0.0) {
        return Err(Error::InvalidParameter(
            "gap_from_voltage_omega requires positive voltage, omega, mass, charge".into(),
        ));
    }
    Ok((charge * phi_abs / (conv.denominator_factor() * mass * omega * omega)).sqrt())
}

/// Voltage magnitude |Φ| that produces the frequency ω: the inverse of
/// [`omega_from_voltage`] for one segment.
pub fn voltage_from_omega(
    omega: f64,
    mass: f64,
    charge: f64,
    gap: f64,
    conv: FreqConvention,
) -> Result<f64> {
    if !(omega >= 0.0) || !(mass > 0.0) || !(charge > 0.0) || !(gap > 0.0) {
        return Err(Error::InvalidParameter(
            "voltage_from_omega requires omega >= 0 and positive mass, charge, gap".into(),
        ));
    }
    Ok(conv.denominator_factor() * mass * gap * gap * omega * omega / charge)
}

/// Dimensionless description of a drive: (ω₁τ, ω₂τ, τ₂/τ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensionless {
    pub omega1_tau: f64,
    pub omega2_tau: f64,
    pub duty: f64,
}

/// One square-wave drive for one transverse axis.
///
/// Serialized form (the on-disk profile document):
/// `{"tau": .., "tau2": .., "omega1": .., "omega2": .., "axis": "x"|"y"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveProfile {
    /// Drive period (time units).
    pub tau: f64,
    /// Half-width of the negative segment; `0 <= 2·tau2 < tau`.
    pub tau2: f64,
    /// Focusing frequency on the positive segment (x axis); > 0.
    pub omega1: f64,
    /// Defocusing rate on the negative segment (x axis); >= 0, zero only
    /// together with `tau2 = 0`.
    pub omega2: f64,
    pub axis: Axis,
}

impl DriveProfile {
    pub fn new(tau: f64, tau2: f64, omega1: f64, omega2: f64, axis: Axis) -> Result<Self> {
        let p = Self {
            tau,
            tau2,
            omega1,
            omega2,
            axis,
        };
        p.validated()
    }

    /// Check the profile invariants, returning the profile unchanged.
    pub fn validated(self) -> Result<Self> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tau must be > 0, got {}",
                self.tau
            )));
        }
        if !(self.tau2 >= 0.0) || !(2.0 * self.tau2 < self.tau) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= 2*tau2 < tau, got tau2 = {}, tau = {}",
                self.tau2, self.tau
            )));
        }
        if !(self.omega1 > 0.0) || !self.omega1.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega1 must be > 0, got {}",
                self.omega1
            )));
        }
        if !(self.omega2 >= 0.0) || !self.omega2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega2 must be >= 0, got {}",
                self.omega2
            )));
        }
        if self.omega2 == 0.0 && self.tau2 > 0.0 {
            return Err(Error::InvalidParameter(
                "omega2 = 0 is only allowed together with tau2 = 0".into(),
            ));
        }
        Ok(self)
    }

    /// Equal-frequency drive in natural units: τ = 1, ω₁ = ω₂ = `omega_tau`,
    /// τ₂ = `duty`·τ. This is the regime of the cyclic-state searches.
    pub fn symmetric(omega_tau: f64, duty: f64, axis: Axis) -> Result<Self> {
        Self::new(1.0, duty, omega_tau, omega_tau, axis)
    }

    pub fn dimensionless(&self) -> Dimensionless {
        Dimensionless {
            omega1_tau: self.omega1 * self.tau,
            omega2_tau: self.omega2 * self.tau,
            duty: self.tau2 / self.tau,
        }
    }

    /// Reconstruct a profile from its dimensionless form and a period.
    pub fn from_dimensionless(d: &Dimensionless, tau: f64, axis: Axis) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be > 0, got {tau}"
            )));
        }
        Self::new(
            tau,
            d.duty * tau,
            d.omega1_tau / tau,
            d.omega2_tau / tau,
            axis,
        )
    }

    /// Index r of the period containing `t`: the period-r window is
    /// `[rτ + τ₂ − τ, rτ + τ₂)`; boundary points belong to the later segment.
    pub fn period_index(&self, t: f64) -> i64 {
        ((t - self.tau2) / self.tau).floor() as i64 + 1
    }

    /// `(r, s, in_second)` where `s = t − rτ` is the local time and
    /// `in_second` marks the negative segment `s ∈ [−τ₂, τ₂)`.
    pub fn locate(&self, t: f64) -> (i64, f64, bool) {
        let r = self.period_index(t);
        let s = t - r as f64 * self.tau;
        (r, s, s >= -self.tau2)
    }

    /// Squared frequency seen by this axis at time `t`.
    pub fn omega_sq(&self, t: f64) -> f64 {
        let (_, _, in_second) = self.locate(t);
        match (self.axis, in_second) {
            (Axis::X, false) => self.omega1 * self.omega1,
            (Axis::X, true) => -self.omega2 * self.omega2,
            (Axis::Y, false) => -self.omega1 * self.omega1,
            (Axis::Y, true) => self.omega2 * self.omega2,
        }
    }

    /// All segment boundaries rτ ± τ₂ strictly inside `(t0, t1)`, sorted.
    pub fn boundaries_between(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if t1 <= t0 {
            return out;
        }
        let r0 = (t0 / self.tau).floor() as i64 - 1;
        let r1 = (t1 / self.tau).ceil() as i64 + 1;
        for r in r0..=r1 {
            let base = r as f64 * self.tau;
            if self.tau2 > 0.0 {
                for b in [base - self.tau2, base + self.tau2] {
                    if b > t0 && b < t1 {
                        out.push(b);
                    }
                }
            } else if base > t0 && base < t1 {
                out.push(base);
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    /// Same profile relabelled to the other axis.
    pub fn with_axis(&self, axis: Axis) -> Self {
        Self { axis, ..*self }
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)] // six-digit tabulated roots appear as literals
mod tests {
    use super::*;

    #[test]
    fn electron_voltages_give_high_frequencies() {
        // |phi| ~ 1 V across a 1 mm gap puts omega in the 1e8..1e9 1/s decade
        let p = PhysicalParams::electron(1e-3, 1.0, -1.0).unwrap();
        let (w1, w2) = omega_from_voltage(&p, FreqConvention::Halved);
        assert!((1e8..1e9).contains(&w1), "w1 = {w1}");
        assert_eq!(w1, w2);
    }

    #[test]
    fn zero_voltage_maps_to_zero_frequency() {
        let p = PhysicalParams::electron(1e-3, 1.0, -1.0).unwrap();
        let fake = PhysicalParams {
            phi1: f64::MIN_POSITIVE,
            ..p
        };
        let (w1, _) = omega_from_voltage(&fake, FreqConvention::Halved);
        assert!(w1 < 1e-3);
        // the inversion at omega = 0 is exactly zero volts
        assert_eq!(
            voltage_from_omega(0.0, p.mass, p.charge, p.gap, FreqConvention::Halved).unwrap(),
            0.0
        );
    }

    #[test]
    fn voltage_for_target_frequency_both_conventions() {
        // omega = 5.24e8 1/s across d = 1 mm: ~3.1 V halved, ~1.6 V plain
        let w = 5.24e8;
        let v_half = voltage_from_omega(
            w,
            ELECTRON_MASS,
            ELEMENTARY_CHARGE,
            1e-3,
            FreqConvention::Halved,
        )
        .unwrap();
        let v_plain = voltage_from_omega(
            w,
            ELECTRON_MASS,
            ELEMENTARY_CHARGE,
            1e-3,
            FreqConvention::Plain,
        )
        .unwrap();
        assert!((v_half - 3.1).abs() < 0.1, "v_half = {v_half}");
        assert!((v_plain - 1.56).abs() < 0.06, "v_plain = {v_plain}");
        assert!((v_half / v_plain - 2.0).abs() < 1e-12);
    }

    #[test]
    fn omega_monotone_in_voltage_and_scales_inverse_gap() {
        let mk = |phi: f64, gap: f64| {
            let p = PhysicalParams::electron(gap, phi, -1.0).unwrap();
            omega_from_voltage(&p, FreqConvention::Halved).0
        };
        let mut prev = 0.0;
        for v in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let w = mk(v, 1e-3);
            assert!(w > prev);
            prev = w;
        }
        // omega * gap constant for fixed voltage
        let a = mk(1.0, 1e-3) * 1e-3;
        let b = mk(1.0, 2.5e-3) * 2.5e-3;
        assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convention_ratio_is_sqrt_two() {
        let p = PhysicalParams::electron(1e-3, 2.0, -3.0).unwrap();
        let (h1, h2) = omega_from_voltage(&p, FreqConvention::Halved);
        let (p1, p2) = omega_from_voltage(&p, FreqConvention::Plain);
        assert!((p1 / h1 - std::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((p2 / h2 - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn sign_conventions_enforced() {
        assert!(PhysicalParams::electron(1e-3, -1.0, -1.0).is_err());
        assert!(PhysicalParams::electron(1e-3, 1.0, 1.0).is_err());
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn dimensionless_round_trip() {
        let p = DriveProfile::new(2.0, 0.5, std::f64::consts::PI, 1.2, Axis::X).unwrap();
        let d = p.dimensionless();
        assert!((d.omega1_tau - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert!((d.duty - 0.25).abs() < 1e-15);
        let q = DriveProfile::from_dimensionless(&d, p.tau, p.axis).unwrap();
        assert!((q.tau - p.tau).abs() < 1e-15);
        assert!((q.tau2 - p.tau2).abs() < 1e-15);
        assert!((q.omega1 - p.omega1).abs() < 1e-15);
        assert!((q.omega2 - p.omega2).abs() < 1e-15);
    }

    #[test]
    fn dimensionless_row_reconstruction_si() {
        // omega1*tau = 3.14159 at tau = 6 ns puts omega1 near 5.24e8 1/s
        let d = Dimensionless {
            omega1_tau: 3.14159,
            omega2_tau: 3.14159,
            duty: 0.25,
        };
        let p = DriveProfile::from_dimensionless(&d, 6e-9, Axis::X).unwrap();
        assert!(
            (p.omega1 - 5.24e8).abs() / 5.24e8 < 1e-3,
            "omega1 = {}",
            p.omega1
        );
    }

    #[test]
    fn profile_invariants() {
        assert!(DriveProfile::new(1.0, 0.5, 1.0, 1.0, Axis::X).is_err()); // 2*tau2 == tau
        assert!(DriveProfile::new(1.0, -0.1, 1.0, 1.0, Axis::X).is_err());
        assert!(DriveProfile::new(1.0, 0.25, 0.0, 1.0, Axis::X).is_err());
        assert!(DriveProfile::new(1.0, 0.25, 1.0, 0.0, Axis::X).is_err()); // omega2=0 with tau2>0
        assert!(DriveProfile::new(1.0, 0.0, 1.0, 0.0, Axis::X).is_ok());
    }

    #[test]
    fn segment_layout_and_boundary_ownership() {
        let p = DriveProfile::new(1.0, 0.25, 2.0, 3.0, Axis::X).unwrap();
        // mid positive segment
        assert_eq!(p.omega_sq(-0.5), 4.0);
        // mid negative segment (t = 0)
        assert_eq!(p.omega_sq(0.0), -9.0);
        // boundary t = -tau2 belongs to the (later) negative segment
        assert_eq!(p.omega_sq(-0.25), -9.0);
        // boundary t = +tau2 belongs to the next period's positive segment
        assert_eq!(p.omega_sq(0.25), 4.0);
        // y axis sees the opposite signs
        let py = p.with_axis(Axis::Y);
        assert_eq!(py.omega_sq(-0.5), -4.0);
        assert_eq!(py.omega_sq(0.0), 9.0);
    }

    #[test]
    fn boundaries_between_dedups_degenerate_duty() {
        let p = DriveProfile::new(1.0, 0.0, 2.0, 0.0, Axis::X).unwrap();
        let bs = p.boundaries_between(-0.5, 2.5);
        assert_eq!(bs, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn profile_json_document_shape() {
        let p = DriveProfile::new(1.0, 0.25, 3.1, 2.9, Axis::Y).unwrap();
        let j = serde_json::to_value(p).unwrap();
        assert_eq!(j["axis"], "y");
        for key in ["tau", "tau2", "omega1", "omega2"] {
            assert!(j[key].is_number(), "missing key {key}");
        }
        let q: DriveProfile = serde_json::from_value(j).unwrap();
        assert_eq!(q.validated().unwrap(), p);
    }
}
