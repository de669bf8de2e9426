//! `sqtrap`: command-line front end for the square-wave trap analysis
//! library. Emits CSV/JSON artifacts (stability maps, cyclic-drive tables,
//! invariant traces, interference reports) with deterministic bytes for
//! fixed inputs.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use sqtrap::floquet::{floquet_data, transfer_data, ClassicalSolution};
use sqtrap::interference::{
    fringe_intensity, phase_difference, Classification, ExperimentSetup, PathConfig, CIS_DUTY,
};
use sqtrap::invariant::InvariantSpec;
use sqtrap::params::{
    gap_from_voltage_omega, Axis, DriveProfile, FreqConvention, ELECTRON_MASS, ELEMENTARY_CHARGE,
};
use sqtrap::phase::{berry_phase, cis_search, CisConfig, CisRule};
use sqtrap::selftest;
use sqtrap::stability::{stability_scan, GridRange};
use sqtrap::wavefunction::{density_slice, EigenstateSlice};
use sqtrap::Error;

#[derive(Parser)]
#[command(
    name = "sqtrap",
    about = "Floquet stability, quadratic invariants, and cyclic-state phases \
             of a square-wave-driven trap",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
struct RangeSpec {
    min: f64,
    max: f64,
    step: f64,
}

fn parse_range(s: &str) -> Result<RangeSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected MIN:MAX:STEP".into());
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.parse::<f64>()).collect();
    let nums = nums.map_err(|e| format!("bad number in range: {e}"))?;
    Ok(RangeSpec {
        min: nums[0],
        max: nums[1],
        step: nums[2],
    })
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    A,
    B,
}

impl From<RuleArg> for CisRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::A => CisRule::A,
            RuleArg::B => CisRule::B,
        }
    }
}

#[derive(Args)]
struct CisArgs {
    /// Phase winding target l.
    #[arg(long)]
    l: u32,
    /// Period multiple N'.
    #[arg(long)]
    nprime: u32,
    /// Root-selection rule (b reproduces the built-in table for both
    /// parities of N').
    #[arg(long, value_enum, default_value = "b")]
    rule: RuleArg,
}

#[derive(Subcommand)]
enum Command {
    /// Stability map over the (omega1*tau, omega2*tau) plane, as CSV.
    Stability {
        /// omega1*tau range as MIN:MAX:STEP.
        #[arg(long, value_parser = parse_range)]
        omega1: RangeSpec,
        /// omega2*tau range as MIN:MAX:STEP.
        #[arg(long, value_parser = parse_range)]
        omega2: RangeSpec,
        /// Duty cycle tau2/tau.
        #[arg(long, default_value_t = 0.25)]
        duty: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// One cyclic drive configuration, as JSON.
    Cis {
        #[command(flatten)]
        cis: CisArgs,
    },
    /// The four built-in cyclic configurations, as a JSON array.
    Table1,
    /// Invariant coefficient trace (t, g-, g0, g+) for a cyclic drive, CSV.
    Gminus {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        nprime: u32,
        /// Number of drive periods to trace.
        #[arg(long)]
        periods: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cyclic phase of the n-th eigenstate, as JSON.
    Berry {
        /// Quantum number n.
        #[arg(long)]
        n: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        nprime: u32,
    },
    /// Two-path interference report from an experiment config, as JSON.
    Interfere {
        /// JSON config {D_m, v_mps, path1: {l, nprime, phi1_V, phi2_V}, path2: {...}}.
        #[arg(long)]
        config: PathBuf,
    },
    /// Laboratory-scale parameter estimate for an electron, as JSON.
    Estimate {
        /// Trap length D, m.
        #[arg(long = "D")]
        trap_length: f64,
        /// Wall gap d, m.
        #[arg(long = "d")]
        gap: f64,
        /// Beam speed v, m/s.
        #[arg(long = "v")]
        speed: f64,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        nprime: u32,
    },
    /// One-period transfer analysis of a drive profile document, as JSON.
    Floquet {
        /// JSON profile {tau, tau2, omega1, omega2, axis}.
        #[arg(long)]
        profile: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Eigenstate amplitude slice (q, re, im, abs2) at fixed time, CSV.
    Density {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        nprime: u32,
        /// Quantum number n.
        #[arg(long)]
        n: u32,
        /// Sample time in units of tau.
        #[arg(long)]
        time: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the full verification suite; nonzero exit on any failure.
    Verify,
}

/// Nine significant digits: covers the six-digit table values with margin
/// and keeps emitted bytes identical across runs.
fn f9(x: f64) -> String {
    format!("{x:.8e}")
}

fn round9(x: f64) -> f64 {
    if x.is_finite() && x != 0.0 {
        f9(x).parse().unwrap_or(x)
    } else {
        x
    }
}

fn emit(output: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, content).map_err(CliError::Io),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(CliError::Io),
    }
}

#[derive(Debug)]
enum CliError {
    Numeric(Error),
    Io(std::io::Error),
    Config(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Config(m) => write!(f, "config: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

fn cis_json(c: &CisConfig) -> Value {
    json!({
        "l": c.l,
        "nprime": c.n_prime,
        "epsilon": c.epsilon,
        "omega_tau": round9(c.omega_tau),
        "tau_prime_over_tau": round9(c.tau_prime),
        "theta_cycle": round9(c.theta_cycle),
        "lambda": round9(c.lambda),
        "rule": c.rule.label(),
        "winding": c.winding,
        "theta_rule_a": round9(c.theta_rule_a),
        "theta_rule_b": round9(c.theta_rule_b),
    })
}

fn matched_spec(l: u32, nprime: u32) -> Result<(InvariantSpec, CisConfig), CliError> {
    let cfg = cis_search(l, nprime, CIS_DUTY, CisRule::B)?;
    let profile = cfg.profile(CIS_DUTY, Axis::X)?;
    let sol = ClassicalSolution::stable(profile)?;
    let (spec, _) = InvariantSpec::hamiltonian_matching(&sol, 1.0)?;
    Ok((spec, cfg))
}

#[derive(Deserialize)]
struct PathDoc {
    l: u32,
    nprime: u32,
    #[serde(rename = "phi1_V")]
    phi1_v: f64,
    #[serde(rename = "phi2_V")]
    phi2_v: f64,
}

#[derive(Deserialize)]
struct ExperimentDoc {
    #[serde(rename = "D_m")]
    d_m: f64,
    #[serde(rename = "v_mps")]
    v_mps: f64,
    path1: PathDoc,
    path2: PathDoc,
}

fn path_voltage_checks(label: u8, p: &PathDoc) -> Result<f64, CliError> {
    if p.phi1_v <= 0.0 || p.phi2_v >= 0.0 {
        return Err(CliError::Config(format!(
            "path {label}: need phi1_V > 0 and phi2_V < 0 (square-wave sign convention)"
        )));
    }
    let (a, b) = (p.phi1_v.abs(), p.phi2_v.abs());
    if (a - b).abs() > 1e-9 * a.max(b) {
        return Err(CliError::Config(format!(
            "path {label}: the cyclic regime needs |phi1_V| = |phi2_V|, got {a} and {b}"
        )));
    }
    Ok(a)
}

fn path_si_json(path: &PathConfig, phi_abs: f64) -> Result<Value, CliError> {
    let omega = path.x_profile.omega1;
    let gap_halved = gap_from_voltage_omega(
        phi_abs,
        omega,
        ELECTRON_MASS,
        ELEMENTARY_CHARGE,
        FreqConvention::Halved,
    )?;
    let gap_plain = gap_from_voltage_omega(
        phi_abs,
        omega,
        ELECTRON_MASS,
        ELEMENTARY_CHARGE,
        FreqConvention::Plain,
    )?;
    Ok(json!({
        "l": path.l,
        "nprime": path.n_prime,
        "omega_rad_per_s": round9(omega),
        "tau_s": round9(path.x_profile.tau),
        "tau_prime_s": round9(path.minimal_period()),
        "phi_abs_V": round9(phi_abs),
        "implied_gap_m": {
            "halved": round9(gap_halved),
            "plain": round9(gap_plain),
        },
    }))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stability {
            omega1,
            omega2,
            duty,
            output,
        } => {
            let r1 = GridRange::from_step(omega1.min, omega1.max, omega1.step)?;
            let r2 = GridRange::from_step(omega2.min, omega2.max, omega2.step)?;
            let grid = stability_scan(r1, r2, duty)?;
            let mut out =
                String::from("omega1_tau,omega2_tau,lambda_x,lambda_y,x_stable,y_stable\n");
            for c in &grid.cells {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    f9(c.omega1_tau),
                    f9(c.omega2_tau),
                    f9(c.lambda_x),
                    f9(c.lambda_y),
                    c.x_stable,
                    c.y_stable
                ));
            }
            emit(output.as_ref(), &out)
        }
        Command::Cis { cis } => {
            let cfg = cis_search(cis.l, cis.nprime, CIS_DUTY, cis.rule.into())?;
            emit(None, &format!("{}\n", cis_json(&cfg)))
        }
        Command::Table1 => {
            let rows: Result<Vec<Value>, Error> = selftest::REFERENCE_ROWS
                .iter()
                .map(|&(l, np, _, _)| cis_search(l, np, CIS_DUTY, CisRule::B).map(|c| cis_json(&c)))
                .collect();
            emit(None, &format!("{}\n", Value::Array(rows?)))
        }
        Command::Gminus {
            l,
            nprime,
            periods,
            output,
        } => {
            let (spec, _) = matched_spec(l, nprime)?;
            let samples_per_period = 256u32;
            let mut out = String::from("t,g_minus,g_zero,g_plus\n");
            for k in 0..=(periods * samples_per_period) {
                let t = k as f64 / samples_per_period as f64;
                let g = spec.g_triple(t);
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    f9(t),
                    f9(g.g_minus),
                    f9(g.g_zero),
                    f9(g.g_plus)
                ));
            }
            emit(output.as_ref(), &out)
        }
        Command::Berry { n, l, nprime } => {
            let cfg = cis_search(l, nprime, CIS_DUTY, CisRule::B)?;
            let chi = berry_phase(n, cfg.theta_cycle);
            let doc = json!({
                "n": n,
                "l": l,
                "nprime": nprime,
                "theta_cycle": round9(cfg.theta_cycle),
                "chi": round9(chi),
                "chi_over_pi": round9(chi / std::f64::consts::PI),
                "winding": cfg.winding,
            });
            emit(None, &format!("{doc}\n"))
        }
        Command::Interfere { config } => {
            let raw = fs::read_to_string(&config).map_err(CliError::Io)?;
            let doc: ExperimentDoc =
                serde_json::from_str(&raw).map_err(|e| CliError::Config(e.to_string()))?;
            let phi1 = path_voltage_checks(1, &doc.path1)?;
            let phi2 = path_voltage_checks(2, &doc.path2)?;
            let setup = ExperimentSetup::from_cis_pair(
                (doc.path1.l, doc.path1.nprime),
                (doc.path2.l, doc.path2.nprime),
                doc.d_m,
                doc.v_mps,
            )?;
            let theta1 = setup.path1.total_phase(setup.transit_time)?;
            let theta2 = setup.path2.total_phase(setup.transit_time)?;
            let delta = phase_difference(&setup)?;
            let report = json!({
                "theta1": round9(theta1),
                "theta2": round9(theta2),
                "difference": round9(delta),
                "classification": Classification::of(delta).label(),
                "fringe_intensity": round9(fringe_intensity(delta)),
                "si": {
                    "transit_s": round9(setup.transit_time),
                    "k_z_per_m": round9(setup.k_z),
                    "E_z_J": round9(setup.energy_z),
                    "path1": path_si_json(&setup.path1, phi1)?,
                    "path2": path_si_json(&setup.path2, phi2)?,
                },
            });
            emit(None, &format!("{report}\n"))
        }
        Command::Estimate {
            trap_length,
            gap,
            speed,
            l,
            nprime,
        } => {
            let e = sqtrap::interference::estimate_si(trap_length, gap, speed, l, nprime)?;
            let doc = json!({
                "l": e.l,
                "nprime": e.n_prime,
                "transit_s": round9(e.transit_time),
                "tau_s": round9(e.tau),
                "tau_s_full_period_rule": round9(e.tau_full_count),
                "omega_tau": round9(e.omega_tau),
                "omega_rad_per_s": round9(e.omega),
                "phi_abs_V": {
                    "halved": round9(e.phi_abs_halved),
                    "plain": round9(e.phi_abs_plain),
                },
                "notes": e.notes,
            });
            emit(None, &format!("{doc}\n"))
        }
        Command::Floquet { profile, output } => {
            let raw = fs::read_to_string(&profile).map_err(CliError::Io)?;
            let p: DriveProfile =
                serde_json::from_str(&raw).map_err(|e| CliError::Config(e.to_string()))?;
            let p = p.validated()?;
            let td = transfer_data(&p)?;
            let fd = floquet_data(&td, &p)?;
            let doc = json!({
                "lambda": round9(fd.lambda),
                "phi": fd.phi.map(round9),
                "stable": fd.lambda.abs() <= 1.0,
                "alpha1": round9(td.alpha1),
                "beta1": round9(td.beta1),
                "beta2": round9(td.beta2),
            });
            emit(output.as_ref(), &format!("{doc}\n"))
        }
        Command::Density {
            l,
            nprime,
            n,
            time,
            output,
        } => {
            let (spec, _) = matched_spec(l, nprime)?;
            let slice = EigenstateSlice::new(&spec, n, time)?;
            let w = 6.0 * (2.0 * n as f64 + 1.0).sqrt() * slice.sigma();
            let qs: Vec<f64> = (0..=256).map(|k| -w + 2.0 * w * k as f64 / 256.0).collect();
            let samples = density_slice(&spec, n, time, &qs)?;
            let mut out = String::from("q,re,im,abs2\n");
            for s in samples {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    f9(s.q),
                    f9(s.amplitude.re),
                    f9(s.amplitude.im),
                    f9(s.amplitude.norm_sqr())
                ));
            }
            emit(output.as_ref(), &out)
        }
        Command::Verify => {
            let results = selftest::run_all();
            let mut all_ok = true;
            let mut out = String::new();
            for r in &results {
                all_ok &= r.passed;
                out.push_str(&format!(
                    "verify {:<24} {}  [{}]\n",
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.detail
                ));
            }
            emit(None, &out)?;
            if !all_ok {
                return Err(CliError::Config("verification suite failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
