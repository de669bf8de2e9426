//! Numerical tolerances used by the verification suite and by runtime
//! degeneracy guards. Centralized so no check carries an ad-hoc magic number.

/// Scalar transfer identities (α₁² + β₁² − β₂² = 1 and the hyperbolic
/// analogue) and det P = 1: pure closed-form arithmetic, near machine
/// precision even for growing hyperbolic factors.
pub const TRANSFER_IDENTITY: f64 = 1e-10;

/// p₊·p₋ = 1 and |p±| = 1 in the stable regime.
pub const MULTIPLIER_PRODUCT: f64 = 1e-10;

/// |1 − |λ|| below this flags the resonance boundary: φ and the eigenvector
/// are numerically meaningless closer to |λ| = 1 than this.
pub const MARGINAL_LAMBDA: f64 = 1e-12;

/// Relative jump allowed in f at a segment boundary (the matching conditions
/// make it zero in exact arithmetic).
pub const CONTINUITY_REL: f64 = 1e-9;

/// Floquet ratio f(t+τ)/f(t) against e^{iφ}.
pub const FLOQUET_RATIO: f64 = 1e-9;

/// Relative variation of the Wronskian of the real solution pair.
pub const WRONSKIAN_REL: f64 = 1e-9;

/// Max |analytic − RK4| over ten periods at step τ/10⁴, for W-normalized
/// solutions (RK4 global error is far below this; the margin absorbs
/// near-boundary stability-parameter amplification).
pub const RK_AGREEMENT_ABS: f64 = 1e-6;

/// Default RK oracle step as a fraction of the period.
pub const ORACLE_STEP_FRACTION: f64 = 1e-4;

/// Amplitude growth allowed over 50 periods of a stable solution.
pub const BOUNDED_GROWTH_50: f64 = 1e-6;

/// Unstable growth must reach |p₊|^r times this slack.
pub const DIVERGENCE_SLACK: f64 = 1e-6;

/// Measured unstable growth vs |p₊|^r, relative.
pub const DIVERGENCE_MATCH_REL: f64 = 1e-4;

/// Relative drift of ω_I = √(g₋g₊ − g₀²) over four periods.
pub const OMEGA_INV_DRIFT: f64 = 1e-9;

/// Coefficient ODEs (ġ₋ = −2g₀/m etc.) by central differences at step 1e-6·τ.
pub const COEFF_ODE_REL: f64 = 1e-6;

/// Finite-difference step for the coefficient-ODE check, in units of τ.
pub const COEFF_ODE_STEP: f64 = 1e-6;

/// g₋ periodicity over the minimal cyclic period, relative.
pub const G_PERIODICITY_REL: f64 = 1e-8;

/// Hamiltonian matching: |m·g₋(t*) − 1| plus the companion g₀, g₊ targets.
pub const H_MATCH: f64 = 1e-8;

/// Quadrature θ vs unwrapped-argument θ.
pub const THETA_DUAL: f64 = 1e-8;

/// Relative tolerance for the θ quadrature itself.
pub const THETA_QUAD_REL: f64 = 1e-10;

/// θ(τ′) spread across invariant choices, modulo 2π.
pub const THETA_INDEPENDENCE: f64 = 1e-8;

/// Cyclic-drive root ωτ against the tabulated six-digit values.
pub const CIS_ROOT: f64 = 1e-4;

/// λ at the cyclic roots against the exact targets (0, 1/√2, ±1/2).
pub const LAMBDA_AT_ROOT: f64 = 1e-5;

/// Interval tolerance for root polishing in the cyclic search.
pub const ROOT_POLISH: f64 = 1e-12;

/// Wavefunction normalization and orthogonality by quadrature.
pub const WAVEFUNCTION_ORTHO: f64 = 1e-8;

/// Max normalized Schrödinger residual at steps (Δt = 1e-6·τ, Δq = 1e-4).
pub const SCHRODINGER_RESIDUAL: f64 = 1e-5;

/// Pointwise cyclic recurrence ψₙ(t+τ′) = e^{−i(n+½)θ(τ′)}·ψₙ(t).
pub const CIS_RECURRENCE: f64 = 1e-7;

/// Two-path phase difference against π for destructive setups.
pub const PHASE_DIFFERENCE: f64 = 1e-6;

/// Idealized fringe floor: destructive intensity as a fraction of maximum.
pub const FRINGE_FLOOR: f64 = 1e-10;

/// Commensurability of the transit time with a path's minimal period,
/// relative to the period.
pub const COMMENSURATE_REL: f64 = 1e-9;
