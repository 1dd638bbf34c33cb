//! Four-stroke Otto cycle with a qubit working medium and two single-qubit
//! baths, evaluated in the weak-coupling limit, in closed form at strong
//! coupling, or by direct integration of the joint dynamics.
//!
//! Stroke order: `A → B` quench `ω_c → ω_h`, connect to the hot bath, hot
//! contact for `τ_h`, disconnect, `C → D` quench `ω_h → ω_c`, connect to the
//! cold bath, cold contact for `τ_c`, disconnect. Both baths are freshly
//! prepared in their Gibbs states at every connection.

use std::fmt;

use crate::dynamics::{
    interaction_hamiltonian, joint_state_closed_form, total_hamiltonian, QubitState,
};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace_bath, pauli, DensityOperator, OperatorMatrix};
use crate::oracle::{oracle_trajectory, OracleOptions, ORACLE_T_START};
use crate::profile::{CouplingProfile, ProfileShape};
use crate::thermo::{
    connect_disconnect_work, entropy_production, heat_into_system, heat_into_system_integral,
    internal_energy, von_neumann_entropy, work_on_total, CouplingSwitch, EnergyLedger, JointSample,
};
use crate::tolerances::TOL;

/// Number of samples per contact stroke for the integral-form heat audit.
pub const HEAT_AUDIT_POINTS: usize = 201;

/// Scalar cycle parameters plus the shapes of the two coupling profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleParams {
    pub omega_c: f64,
    pub omega_h: f64,
    pub beta_c: f64,
    pub beta_h: f64,
    pub tau_u1: f64,
    pub tau_h: f64,
    pub tau_u2: f64,
    pub tau_c: f64,
    pub shape_h: ProfileShape,
    pub shape_c: ProfileShape,
}

impl Default for CycleParams {
    fn default() -> Self {
        Self {
            omega_c: 1.0,
            omega_h: 2.0,
            beta_c: 1.0,
            beta_h: 0.2,
            tau_u1: 0.0,
            tau_h: 20.0,
            tau_u2: 0.0,
            tau_c: 20.0,
            shape_h: ProfileShape::MarkovianSemigroup,
            shape_c: ProfileShape::MarkovianSemigroup,
        }
    }
}

/// A validated cycle: parameters together with profiles whose bath
/// parameters are `g = tanh(βω)` of the corresponding bath.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleConfig {
    pub omega_c: f64,
    pub omega_h: f64,
    pub beta_c: f64,
    pub beta_h: f64,
    pub tau_u1: f64,
    pub tau_h: f64,
    pub tau_u2: f64,
    pub tau_c: f64,
    pub profile_h: CouplingProfile,
    pub profile_c: CouplingProfile,
}

fn check_scalars(p: &CycleParams, problems: &mut Vec<String>) {
    let finite = |name: &str, v: f64, problems: &mut Vec<String>| {
        if !v.is_finite() {
            problems.push(format!("{name} must be finite, got {v}"));
            false
        } else {
            true
        }
    };
    if finite("omega_c", p.omega_c, problems) && p.omega_c <= 0.0 {
        problems.push(format!("omega_c must be > 0, got {}", p.omega_c));
    }
    if finite("omega_h", p.omega_h, problems) && p.omega_h <= p.omega_c {
        problems.push(format!(
            "omega_h must exceed omega_c = {}, got {}",
            p.omega_c, p.omega_h
        ));
    }
    if finite("beta_h", p.beta_h, problems) && p.beta_h < 0.0 {
        problems.push(format!("beta_h must be >= 0, got {}", p.beta_h));
    }
    if finite("beta_c", p.beta_c, problems) && p.beta_c <= p.beta_h {
        problems.push(format!(
            "beta_c must exceed beta_h = {}, got {}",
            p.beta_h, p.beta_c
        ));
    }
    for (name, v) in [
        ("tau_u1", p.tau_u1),
        ("tau_h", p.tau_h),
        ("tau_u2", p.tau_u2),
        ("tau_c", p.tau_c),
    ] {
        if finite(name, v, problems) && v < 0.0 {
            problems.push(format!("{name} must be >= 0, got {v}"));
        }
    }
}

impl CycleConfig {
    /// Builds the profiles with `g = tanh(βω)` and validates everything,
    /// reporting every offending field at once.
    pub fn new(params: CycleParams) -> Result<Self> {
        let mut problems = Vec::new();
        check_scalars(&params, &mut problems);
        let profile = |field: &str,
                       shape: ProfileShape,
                       beta: f64,
                       omega: f64,
                       problems: &mut Vec<String>| {
            CouplingProfile::new(shape, (beta * omega).tanh())
                .map_err(|e| problems.push(format!("{field}: {e}")))
                .ok()
        };
        let profile_h = profile(
            "beta_h",
            params.shape_h.clone(),
            params.beta_h,
            params.omega_h,
            &mut problems,
        );
        let profile_c = profile(
            "beta_c",
            params.shape_c.clone(),
            params.beta_c,
            params.omega_c,
            &mut problems,
        );
        match (profile_h, profile_c) {
            (Some(profile_h), Some(profile_c)) if problems.is_empty() => {
                let config = Self {
                    omega_c: params.omega_c,
                    omega_h: params.omega_h,
                    beta_c: params.beta_c,
                    beta_h: params.beta_h,
                    tau_u1: params.tau_u1,
                    tau_h: params.tau_h,
                    tau_u2: params.tau_u2,
                    tau_c: params.tau_c,
                    profile_h,
                    profile_c,
                };
                config.validate()?;
                Ok(config)
            }
            _ => Err(Error::InvalidConfig(problems)),
        }
    }

    pub fn params(&self) -> CycleParams {
        CycleParams {
            omega_c: self.omega_c,
            omega_h: self.omega_h,
            beta_c: self.beta_c,
            beta_h: self.beta_h,
            tau_u1: self.tau_u1,
            tau_h: self.tau_h,
            tau_u2: self.tau_u2,
            tau_c: self.tau_c,
            shape_h: self.profile_h.shape().clone(),
            shape_c: self.profile_c.shape().clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        check_scalars(&self.params(), &mut problems);
        for (field, profile, beta, omega, tau) in [
            (
                "profile_h",
                &self.profile_h,
                self.beta_h,
                self.omega_h,
                self.tau_h,
            ),
            (
                "profile_c",
                &self.profile_c,
                self.beta_c,
                self.omega_c,
                self.tau_c,
            ),
        ] {
            let want = (beta * omega).tanh();
            if (profile.g() - want).abs() > TOL.g_match {
                problems.push(format!(
                    "{field}: g = {} does not match tanh(beta*omega) = {want}",
                    profile.g()
                ));
            }
            if tau > profile.latest_time() {
                problems.push(format!(
                    "{field}: contact time {tau} exceeds the tabulated range ending at {}",
                    profile.latest_time()
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }

    pub fn g_h(&self) -> f64 {
        self.profile_h.g()
    }

    pub fn g_c(&self) -> f64 {
        self.profile_c.g()
    }

    /// `τ = τ_u1 + τ_h + τ_u2 + τ_c`.
    pub fn total_time(&self) -> f64 {
        self.tau_u1 + self.tau_h + self.tau_u2 + self.tau_c
    }
}

/// The eight steps of one cycle, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stroke {
    QuenchUp,
    ConnectHot,
    HotContact,
    DisconnectHot,
    QuenchDown,
    ConnectCold,
    ColdContact,
    DisconnectCold,
}

impl Stroke {
    pub const ALL: [Stroke; 8] = [
        Stroke::QuenchUp,
        Stroke::ConnectHot,
        Stroke::HotContact,
        Stroke::DisconnectHot,
        Stroke::QuenchDown,
        Stroke::ConnectCold,
        Stroke::ColdContact,
        Stroke::DisconnectCold,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stroke::QuenchUp => "AB",
            Stroke::ConnectHot => "B_con",
            Stroke::HotContact => "BC",
            Stroke::DisconnectHot => "C_discon",
            Stroke::QuenchDown => "CD",
            Stroke::ConnectCold => "D_con",
            Stroke::ColdContact => "DA",
            Stroke::DisconnectCold => "A_discon",
        }
    }

    pub fn is_coupling_switch(self) -> bool {
        matches!(
            self,
            Stroke::ConnectHot
                | Stroke::DisconnectHot
                | Stroke::ConnectCold
                | Stroke::DisconnectCold
        )
    }
}

impl fmt::Display for Stroke {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Engine,
    Refrigerator,
    Other,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Engine => "engine",
            Regime::Refrigerator => "refrigerator",
            Regime::Other => "other",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Weak,
    ClosedForm,
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Weak => "weak",
            Method::ClosedForm => "closed_form",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeEntry {
    pub stroke: Stroke,
    pub ledger: EnergyLedger,
}

/// Net energy flows of one cycle, positive when entering the working medium.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CycleFlows {
    pub w_ab: f64,
    pub w_b_con: f64,
    pub w_bc: f64,
    pub q_h: f64,
    pub w_c_discon: f64,
    pub w_cd: f64,
    pub w_d_con: f64,
    pub w_da: f64,
    pub q_c: f64,
    pub w_a_discon: f64,
    /// Sum of every work term.
    pub work: f64,
}

impl CycleFlows {
    pub fn coupling_works(&self) -> [f64; 4] {
        [self.w_b_con, self.w_c_discon, self.w_d_con, self.w_a_discon]
    }

    fn energy_terms(&self) -> [f64; 11] {
        [
            self.w_ab,
            self.w_b_con,
            self.w_bc,
            self.q_h,
            self.w_c_discon,
            self.w_cd,
            self.w_d_con,
            self.w_da,
            self.q_c,
            self.w_a_discon,
            self.work,
        ]
    }
}

/// Performance figures; `None` where the denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    /// `-W/Q_h`.
    pub eta: Option<f64>,
    /// `-W/τ`.
    pub power: Option<f64>,
    /// `Q_c/τ`.
    pub kappa: Option<f64>,
    /// `Q_c/W`.
    pub cop: Option<f64>,
}

/// Weak-coupling reference figures for the same parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baselines {
    pub w_ab0: f64,
    pub q_h0: f64,
    pub w_cd0: f64,
    pub q_c0: f64,
    pub w0: f64,
    pub eta0: f64,
    pub p0: Option<f64>,
    pub kappa0: Option<f64>,
    pub k0: f64,
    pub carnot_eta: f64,
    pub carnot_cop: f64,
}

impl Baselines {
    pub fn new(config: &CycleConfig) -> Self {
        let (g_c, g_h) = (
            (config.beta_c * config.omega_c).tanh(),
            (config.beta_h * config.omega_h).tanh(),
        );
        let (w_c, w_h) = (config.omega_c, config.omega_h);
        let w_ab0 = (w_c - w_h) * g_c;
        let q_h0 = w_h * (g_c - g_h);
        let w_cd0 = (w_h - w_c) * g_h;
        let q_c0 = w_c * (g_h - g_c);
        let w0 = w_ab0 + w_cd0;
        let tau = config.total_time();
        Self {
            w_ab0,
            q_h0,
            w_cd0,
            q_c0,
            w0,
            eta0: 1.0 - w_c / w_h,
            p0: (tau > 0.0).then(|| -w0 / tau),
            kappa0: (tau > 0.0).then(|| q_c0 / tau),
            k0: w_c / (w_h - w_c),
            carnot_eta: 1.0 - config.beta_h / config.beta_c,
            carnot_cop: config.beta_h / (config.beta_c - config.beta_h),
        }
    }
}

/// Consistency checks attached to every report.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Audits {
    /// Largest `|ΔE_S - (W + Q)|` over the eight strokes.
    pub first_law_max_residual: f64,
    /// `ΔE_S(cycle) - (W + Q_h + Q_c)`.
    pub first_law_cycle_residual: f64,
    /// `W + Q_h + Q_c`: energy left in the working medium after one pass.
    pub stored_energy_mismatch: f64,
    pub min_entropy_production: f64,
    /// Largest `|W|` among the four connect/disconnect steps.
    pub max_coupling_cost: f64,
    /// Largest gap between reported heats and heats read off the joint states.
    pub heat_state_deviation: f64,
    /// Quadrature versus endpoint heat on the sampled contact strokes.
    pub heat_integral_deviation: Option<f64>,
    /// Largest gap to the closed-form report (oracle runs only).
    pub oracle_max_deviation: Option<f64>,
    pub carnot_satisfied: bool,
}

impl Audits {
    /// Reasons the audits fail; empty when every check passes.
    pub fn failures(&self, method: Method) -> Vec<String> {
        let mut out = Vec::new();
        let law_tol = if method == Method::Oracle {
            TOL.oracle_energy
        } else {
            TOL.first_law
        };
        if !(self.first_law_max_residual <= law_tol) {
            out.push(format!(
                "first law per stroke: residual {:e}",
                self.first_law_max_residual
            ));
        }
        if !(self.first_law_cycle_residual.abs() <= law_tol) {
            out.push(format!(
                "first law per cycle: residual {:e}",
                self.first_law_cycle_residual
            ));
        }
        if !(self.min_entropy_production >= TOL.entropy_floor) {
            out.push(format!(
                "entropy production: minimum {:e}",
                self.min_entropy_production
            ));
        }
        let cost_tol = if method == Method::Oracle {
            TOL.oracle_energy
        } else {
            TOL.coupling_cost
        };
        if !(self.max_coupling_cost <= cost_tol) {
            out.push(format!("coupling cost: {:e}", self.max_coupling_cost));
        }
        if !(self.heat_state_deviation <= law_tol) {
            out.push(format!(
                "heat versus joint states: deviation {:e}",
                self.heat_state_deviation
            ));
        }
        if let Some(d) = self.oracle_max_deviation {
            if !(d <= TOL.oracle_energy) {
                out.push(format!("oracle versus closed form: deviation {d:e}"));
            }
        }
        if !self.carnot_satisfied {
            out.push("Carnot bound violated".into());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub method: Method,
    pub entries: Vec<StrokeEntry>,
    pub flows: CycleFlows,
    pub tau: f64,
    pub metrics: Metrics,
    pub regime: Regime,
    /// Label from the frequency-ratio rule `ω_h/ω_c > β_c/β_h ⇒ engine`.
    pub ratio_rule_regime: Regime,
    pub baselines: Baselines,
    pub sin2_h: f64,
    pub sin2_c: f64,
    /// Trace distance `‖ρ_S(end) - ρ_S(start)‖₁` of the working medium.
    pub cyclicity_residual: f64,
    pub audits: Audits,
    pub warnings: Vec<String>,
}

impl CycleReport {
    pub fn entry(&self, stroke: Stroke) -> &EnergyLedger {
        &self
            .entries
            .iter()
            .find(|e| e.stroke == stroke)
            .expect("every stroke is present")
            .ledger
    }

    pub fn audit_failures(&self) -> Vec<String> {
        self.audits.failures(self.method)
    }

    pub fn audits_pass(&self) -> bool {
        self.audit_failures().is_empty()
    }
}

/// Engine iff `Q_h > 0, Q_c < 0, W < 0`; refrigerator iff all three reversed.
pub fn classify_regime(report: &CycleReport) -> Regime {
    classify_flows(report.flows.q_h, report.flows.q_c, report.flows.work)
}

fn classify_flows(q_h: f64, q_c: f64, w: f64) -> Regime {
    let eps = TOL.flow_zero;
    if q_h > eps && q_c < -eps && w < -eps {
        Regime::Engine
    } else if q_h < -eps && q_c > eps && w > eps {
        Regime::Refrigerator
    } else {
        Regime::Other
    }
}

fn ratio_rule(config: &CycleConfig) -> Regime {
    let lhs = config.omega_h / config.omega_c;
    let rhs = config.beta_c / config.beta_h;
    if lhs > rhs {
        Regime::Engine
    } else if lhs < rhs {
        Regime::Refrigerator
    } else {
        Regime::Other
    }
}

fn carnot_satisfied(regime: Regime, metrics: &Metrics, baselines: &Baselines) -> bool {
    match regime {
        Regime::Engine => metrics
            .eta
            .is_some_and(|eta| eta <= baselines.carnot_eta + TOL.carnot),
        Regime::Refrigerator => metrics
            .cop
            .is_some_and(|k| k <= baselines.carnot_cop + TOL.carnot),
        Regime::Other => true,
    }
}

fn metrics_from(q_h: f64, q_c: f64, work: f64, tau: f64) -> Metrics {
    Metrics {
        eta: (q_h != 0.0).then(|| -work / q_h),
        power: (tau > 0.0).then(|| -work / tau),
        kappa: (tau > 0.0).then(|| q_c / tau),
        cop: (work != 0.0).then(|| q_c / work),
    }
}

fn trace_distance(a: &QubitState, b: &QubitState) -> f64 {
    2.0 * ((a.p - b.p).powi(2) + (a.x - b.x).norm_sqr()).sqrt()
}

fn h_sys(omega: f64) -> OperatorMatrix {
    pauli::sigma_z().scale_real(omega)
}

/// Coupling used for operators at a boundary instant `t`, where the
/// analytic profiles diverge at `t = 0`.
pub fn boundary_coupling(profile: &CouplingProfile, t: f64) -> Result<f64> {
    profile.coupling(t.max(ORACLE_T_START).max(profile.earliest_time()))
}

fn ledger(work: f64, heat: f64, e0: f64, e1: f64, entropy_production: f64) -> EnergyLedger {
    EnergyLedger {
        work,
        heat,
        internal_energy_initial: e0,
        internal_energy_final: e1,
        entropy_production,
    }
}

/// Weak-coupling cycle: full thermalization with infinite baths, no
/// interaction energy.
pub fn weak_cycle(config: &CycleConfig) -> Result<CycleReport> {
    config.validate()?;
    let tau = config.total_time();
    if tau <= 0.0 {
        return Err(Error::UndefinedPower);
    }
    let b = Baselines::new(config);
    let (g_c, g_h) = (
        (config.beta_c * config.omega_c).tanh(),
        (config.beta_h * config.omega_h).tanh(),
    );
    let (e_a, e_b) = (-config.omega_c * g_c, -config.omega_h * g_c);
    let (e_c, e_d) = (-config.omega_h * g_h, -config.omega_c * g_h);
    let rho_cold = QubitState::thermal(config.omega_c, config.beta_c).to_density();
    let rho_hot = QubitState::thermal(config.omega_h, config.beta_h).to_density();
    let ds_hot = von_neumann_entropy(&rho_hot) - von_neumann_entropy(&rho_cold);
    let sigma_h = ds_hot - config.beta_h * b.q_h0;
    let sigma_c = -ds_hot - config.beta_c * b.q_c0;

    let ledgers = [
        ledger(b.w_ab0, 0.0, e_a, e_b, 0.0),
        ledger(0.0, 0.0, e_b, e_b, 0.0),
        ledger(0.0, b.q_h0, e_b, e_c, sigma_h),
        ledger(0.0, 0.0, e_c, e_c, 0.0),
        ledger(b.w_cd0, 0.0, e_c, e_d, 0.0),
        ledger(0.0, 0.0, e_d, e_d, 0.0),
        ledger(0.0, b.q_c0, e_d, e_a, sigma_c),
        ledger(0.0, 0.0, e_a, e_a, 0.0),
    ];
    let flows = CycleFlows {
        w_ab: b.w_ab0,
        q_h: b.q_h0,
        w_cd: b.w_cd0,
        q_c: b.q_c0,
        work: b.w0,
        ..CycleFlows::default()
    };
    let entries = Stroke::ALL
        .iter()
        .zip(ledgers)
        .map(|(&stroke, ledger)| StrokeEntry { stroke, ledger })
        .collect();
    Ok(finish(
        config,
        Method::Weak,
        entries,
        flows,
        1.0,
        1.0,
        0.0,
        0.0,
        None,
        Vec::new(),
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    config: &CycleConfig,
    method: Method,
    entries: Vec<StrokeEntry>,
    flows: CycleFlows,
    sin2_h: f64,
    sin2_c: f64,
    cyclicity_residual: f64,
    heat_state_deviation: f64,
    heat_integral_deviation: Option<f64>,
    warnings: Vec<String>,
) -> CycleReport {
    let tau = config.total_time();
    let baselines = Baselines::new(config);
    let metrics = metrics_from(flows.q_h, flows.q_c, flows.work, tau);
    let regime = classify_flows(flows.q_h, flows.q_c, flows.work);
    let first_law_max_residual = entries
        .iter()
        .map(|e| e.ledger.first_law_residual().abs())
        .fold(0.0, f64::max);
    let cycle_de = entries
        .last()
        .map_or(0.0, |e| e.ledger.internal_energy_final)
        - entries
            .first()
            .map_or(0.0, |e| e.ledger.internal_energy_initial);
    let stored = flows.work + flows.q_h + flows.q_c;
    let min_entropy_production = entries
        .iter()
        .map(|e| e.ledger.entropy_production)
        .fold(f64::INFINITY, f64::min);
    let max_coupling_cost = flows
        .coupling_works()
        .iter()
        .map(|w| w.abs())
        .fold(0.0, f64::max);
    let audits = Audits {
        first_law_max_residual,
        first_law_cycle_residual: cycle_de - stored,
        stored_energy_mismatch: stored,
        min_entropy_production,
        max_coupling_cost,
        heat_state_deviation,
        heat_integral_deviation,
        oracle_max_deviation: None,
        carnot_satisfied: carnot_satisfied(regime, &metrics, &baselines),
    };
    CycleReport {
        method,
        entries,
        flows,
        tau,
        metrics,
        regime,
        ratio_rule_regime: ratio_rule(config),
        baselines,
        sin2_h,
        sin2_c,
        cyclicity_residual,
        audits,
        warnings,
    }
}

/// Joint states at the two ends of one contact stroke.
struct ContactRun {
    sys_in: QubitState,
    rho_in: DensityOperator,
    rho_out: DensityOperator,
    f_in: f64,
    f_out: f64,
    work: f64,
    heat: f64,
    entropy_production: f64,
    heat_integral_deviation: Option<f64>,
}

impl ContactRun {
    fn sys_out(&self) -> Result<QubitState> {
        QubitState::from_density(&partial_trace_bath(&self.rho_out)?)
    }
}

struct Contact<'a> {
    profile: &'a CouplingProfile,
    omega: f64,
    beta: f64,
    tau: f64,
}

impl Contact<'_> {
    fn h_tot(&self, t: f64) -> Result<OperatorMatrix> {
        Ok(total_hamiltonian(
            self.omega,
            boundary_coupling(self.profile, t)?,
        ))
    }

    fn h_sb(&self, t: f64) -> Result<OperatorMatrix> {
        Ok(interaction_hamiltonian(boundary_coupling(self.profile, t)?))
    }

    fn closed_state(&self, sys: &QubitState, t: f64) -> Result<DensityOperator> {
        joint_state_closed_form(sys, self.profile.g(), self.omega, self.profile.phase(t)?, t)
    }

    fn start(&self) -> f64 {
        ORACLE_T_START.max(self.profile.earliest_time())
    }

    /// `t_s + (τ - t_s)(k/(n-1))²`, denser near the singular origin.
    fn audit_grid(&self, n: usize) -> Option<Vec<f64>> {
        let t_s = self.start();
        (self.tau > t_s).then(|| {
            (0..n)
                .map(|k| t_s + (self.tau - t_s) * (k as f64 / (n - 1) as f64).powi(2))
                .collect()
        })
    }

    /// `|∫ Tr[(H_S + H_SB) dρ] - (Q(τ) - Q(t_s))|` over a sampled trajectory.
    fn integral_deviation(&self, samples: &[JointSample]) -> Result<f64> {
        let h_s = h_sys(self.omega);
        let quad = heat_into_system_integral(samples, &h_s, |t| self.h_sb(t), |t| self.h_tot(t))?;
        let endpoint = heat_into_system(samples, &h_s)?;
        Ok((quad - endpoint).abs())
    }

    fn closed_run(&self, sys: &QubitState, audit_points: usize) -> Result<ContactRun> {
        let h_b = h_sys(self.omega);
        let rho_in = self.closed_state(sys, 0.0)?;
        let rho_out = self.closed_state(sys, self.tau)?;
        let samples = [
            JointSample {
                t: 0.0,
                rho: rho_in.clone(),
            },
            JointSample {
                t: self.tau,
                rho: rho_out.clone(),
            },
        ];
        let heat = heat_into_system(&samples, &h_b)?;
        let work = work_on_total(&samples, |t| self.h_tot(t))?;
        let heat_integral_deviation = match self.audit_grid(audit_points) {
            Some(grid) => {
                let traj = grid
                    .iter()
                    .map(|&t| {
                        Ok(JointSample {
                            t,
                            rho: self.closed_state(sys, t)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(self.integral_deviation(&traj)?)
            }
            None => None,
        };
        Ok(ContactRun {
            sys_in: *sys,
            entropy_production: entropy_production(&rho_out, self.beta, &h_b)?,
            f_in: boundary_coupling(self.profile, 0.0)?,
            f_out: boundary_coupling(self.profile, self.tau)?,
            rho_in,
            rho_out,
            work,
            heat,
            heat_integral_deviation,
        })
    }

    fn oracle_run(
        &self,
        sys: &QubitState,
        steps: usize,
        opts: &OracleOptions,
    ) -> Result<ContactRun> {
        let h_b = h_sys(self.omega);
        let mut times = vec![0.0];
        if let Some(grid) = self.audit_grid(steps) {
            times.extend(grid);
        } else if self.tau > 0.0 {
            times.push(self.tau);
        }
        let states = oracle_trajectory(
            sys,
            self.profile.g(),
            self.omega,
            self.profile,
            &times,
            opts,
        )?;
        let traj: Vec<JointSample> = times
            .iter()
            .zip(states)
            .map(|(&t, rho)| JointSample { t, rho })
            .collect();
        let heat = heat_into_system(&traj, &h_b)?;
        let work = work_on_total(&traj, |t| self.h_tot(t))?;
        let heat_integral_deviation = if traj.len() > 2 {
            Some(self.integral_deviation(&traj[1..])?)
        } else {
            None
        };
        let rho_in = traj[0].rho.clone();
        let rho_out = traj[traj.len() - 1].rho.clone();
        Ok(ContactRun {
            sys_in: *sys,
            entropy_production: entropy_production(&rho_out, self.beta, &h_b)?,
            f_in: boundary_coupling(self.profile, 0.0)?,
            f_out: boundary_coupling(self.profile, self.tau)?,
            rho_in,
            rho_out,
            work,
            heat,
            heat_integral_deviation,
        })
    }
}

fn contacts(config: &CycleConfig) -> (Contact<'_>, Contact<'_>) {
    (
        Contact {
            profile: &config.profile_h,
            omega: config.omega_h,
            beta: config.beta_h,
            tau: config.tau_h,
        },
        Contact {
            profile: &config.profile_c,
            omega: config.omega_c,
            beta: config.beta_c,
            tau: config.tau_c,
        },
    )
}

/// Per-stroke ledgers from the two contact runs. Reported heats are passed
/// separately from those read off the joint states.
fn stroke_ledgers(
    config: &CycleConfig,
    hot: &ContactRun,
    cold: &ContactRun,
    q_h: f64,
    q_c: f64,
) -> Result<(Vec<StrokeEntry>, CycleFlows, QubitState)> {
    let (w_c, w_h) = (config.omega_c, config.omega_h);
    let sys_a = hot.sys_in;
    let sys_c = cold.sys_in;
    let sys_d = cold.sys_out()?;

    let e_a = w_c * sys_a.sigma_z();
    let e_b = w_h * sys_a.sigma_z();
    let hot_start = internal_energy(&hot.rho_in, &h_sys(w_h), &interaction_hamiltonian(hot.f_in))?;
    let hot_end = internal_energy(
        &hot.rho_out,
        &h_sys(w_h),
        &interaction_hamiltonian(hot.f_out),
    )?;
    let e_c = w_h * hot.sys_out()?.sigma_z();
    let e_c_start = w_h * sys_c.sigma_z();
    let e_d = w_c * sys_c.sigma_z();
    let cold_start = internal_energy(
        &cold.rho_in,
        &h_sys(w_c),
        &interaction_hamiltonian(cold.f_in),
    )?;
    let cold_end = internal_energy(
        &cold.rho_out,
        &h_sys(w_c),
        &interaction_hamiltonian(cold.f_out),
    )?;
    let e_a_end = w_c * sys_d.sigma_z();

    let switch = |f: f64, rho: &DensityOperator, s: CouplingSwitch| {
        connect_disconnect_work(&interaction_hamiltonian(f), rho, s)
    };
    let w_b_con = switch(hot.f_in, &hot.rho_in, CouplingSwitch::Connect);
    let w_c_discon = switch(hot.f_out, &hot.rho_out, CouplingSwitch::Disconnect);
    let w_d_con = switch(cold.f_in, &cold.rho_in, CouplingSwitch::Connect);
    let w_a_discon = switch(cold.f_out, &cold.rho_out, CouplingSwitch::Disconnect);
    let w_ab = e_b - e_a;
    let w_cd = e_d - e_c_start;

    let ledgers = [
        ledger(w_ab, 0.0, e_a, e_b, 0.0),
        ledger(w_b_con, 0.0, e_b, hot_start, 0.0),
        ledger(hot.work, q_h, hot_start, hot_end, hot.entropy_production),
        ledger(w_c_discon, 0.0, hot_end, e_c, 0.0),
        ledger(w_cd, 0.0, e_c_start, e_d, 0.0),
        ledger(w_d_con, 0.0, e_d, cold_start, 0.0),
        ledger(
            cold.work,
            q_c,
            cold_start,
            cold_end,
            cold.entropy_production,
        ),
        ledger(w_a_discon, 0.0, cold_end, e_a_end, 0.0),
    ];
    let entries = Stroke::ALL
        .iter()
        .zip(ledgers)
        .map(|(&stroke, ledger)| StrokeEntry { stroke, ledger })
        .collect();
    let flows = CycleFlows {
        w_ab,
        w_b_con,
        w_bc: hot.work,
        q_h,
        w_c_discon,
        w_cd,
        w_d_con,
        w_da: cold.work,
        q_c,
        w_a_discon,
        work: w_ab + w_b_con + hot.work + w_c_discon + w_cd + w_d_con + cold.work + w_a_discon,
    };
    Ok((entries, flows, sys_d))
}

fn tabulated_warnings(config: &CycleConfig) -> Vec<String> {
    [("hot", &config.profile_h), ("cold", &config.profile_c)]
        .into_iter()
        .filter(|(_, p)| p.phase_is_approximate())
        .map(|(side, p)| {
            format!(
                "{side} profile is tabulated: F on [0, {}] is approximated by f(t0)*t0 and trapezoid sums beyond",
                p.earliest_time()
            )
        })
        .collect()
}

fn max_option(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Strong-coupling cycle from the closed-form joint states.
///
/// Reported heats are `Q_h = Q_h⁰ sin²F^h(τ_h)` and
/// `Q_c = Q_c⁰ sin²F^h(τ_h) sin²F^c(τ_c)`; the joint states supply the
/// internal energies, so the per-stroke first law cross-checks the two.
pub fn strong_cycle(config: &CycleConfig) -> Result<CycleReport> {
    strong_cycle_with(config, HEAT_AUDIT_POINTS)
}

/// [`strong_cycle`] with a chosen number of samples for the heat-integral
/// audit (odd, at least 3).
pub fn strong_cycle_with(config: &CycleConfig, audit_points: usize) -> Result<CycleReport> {
    config.validate()?;
    check_points(audit_points)?;
    let (g_c, g_h) = (config.g_c(), config.g_h());
    let b = Baselines::new(config);
    let sin2_h = config.profile_h.thermalization_weight(config.tau_h)?;
    let sin2_c = config.profile_c.thermalization_weight(config.tau_c)?;
    let q_h = b.q_h0 * sin2_h;
    let q_c = b.q_c0 * sin2_h * sin2_c;

    let (hot_contact, cold_contact) = contacts(config);
    let sys_a = QubitState::diagonal(0.5 * (1.0 - g_c))?;
    let hot = hot_contact.closed_run(&sys_a, audit_points)?;
    let cos2_h = 1.0 - sin2_h;
    let p_c = 0.5 * (1.0 - g_h) + 0.5 * cos2_h * (g_h - g_c);
    let sys_c = QubitState::diagonal(p_c)?;
    let cold = cold_contact.closed_run(&sys_c, audit_points)?;

    let heat_state_deviation = [
        (hot.heat - q_h).abs(),
        (cold.heat - q_c).abs(),
        (hot.sys_out()?.p - p_c).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let (entries, flows, sys_d) = stroke_ledgers(config, &hot, &cold, q_h, q_c)?;
    Ok(finish(
        config,
        Method::ClosedForm,
        entries,
        flows,
        sin2_h,
        sin2_c,
        trace_distance(&sys_d, &sys_a),
        heat_state_deviation,
        max_option(hot.heat_integral_deviation, cold.heat_integral_deviation),
        tabulated_warnings(config),
    ))
}

fn check_points(points: usize) -> Result<()> {
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "stroke sampling needs an odd number >= 3 of points, got {points}"
        )));
    }
    Ok(())
}

/// Strong-coupling cycle with every contact stroke integrated numerically.
/// Heats and works come from the integrated joint states; the result is
/// compared entry by entry with [`strong_cycle`].
pub fn strong_cycle_via_oracle(config: &CycleConfig, steps: usize) -> Result<CycleReport> {
    strong_cycle_via_oracle_with(config, steps, &OracleOptions::default())
}

pub fn strong_cycle_via_oracle_with(
    config: &CycleConfig,
    steps: usize,
    opts: &OracleOptions,
) -> Result<CycleReport> {
    config.validate()?;
    check_points(steps)?;
    let closed = strong_cycle_with(config, steps)?;
    let (hot_contact, cold_contact) = contacts(config);
    let sys_a = QubitState::diagonal(0.5 * (1.0 - config.g_c()))?;
    let hot = hot_contact.oracle_run(&sys_a, steps, opts)?;
    let sys_c = hot.sys_out()?;
    let cold = cold_contact.oracle_run(&sys_c, steps, opts)?;
    let (entries, flows, sys_d) = stroke_ledgers(config, &hot, &cold, hot.heat, cold.heat)?;
    let mut report = finish(
        config,
        Method::Oracle,
        entries,
        flows,
        closed.sin2_h,
        closed.sin2_c,
        trace_distance(&sys_d, &sys_a),
        0.0,
        max_option(hot.heat_integral_deviation, cold.heat_integral_deviation),
        tabulated_warnings(config),
    );
    let deviation = report
        .flows
        .energy_terms()
        .iter()
        .zip(closed.flows.energy_terms())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    report.audits.oracle_max_deviation = Some(deviation);
    Ok(report)
}

/// Joint states along one contact stroke of the closed-form cycle at the
/// given times, starting from the working-medium state that stroke sees.
pub fn contact_trajectory(
    config: &CycleConfig,
    hot_side: bool,
    times: &[f64],
) -> Result<Vec<JointSample>> {
    config.validate()?;
    let (g_c, g_h) = (config.g_c(), config.g_h());
    let (hot_contact, cold_contact) = contacts(config);
    let (contact, sys) = if hot_side {
        (hot_contact, QubitState::diagonal(0.5 * (1.0 - g_c))?)
    } else {
        let cos2_h = 1.0 - config.profile_h.thermalization_weight(config.tau_h)?;
        (
            cold_contact,
            QubitState::diagonal(0.5 * (1.0 - g_h) + 0.5 * cos2_h * (g_h - g_c))?,
        )
    };
    times
        .iter()
        .map(|&t| {
            Ok(JointSample {
                t,
                rho: contact.closed_state(&sys, t)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine(tau_h: f64, tau_c: f64) -> CycleConfig {
        CycleConfig::new(CycleParams {
            tau_h,
            tau_c,
            ..CycleParams::default()
        })
        .unwrap()
    }

    fn refrigerator(tau_h: f64, tau_c: f64) -> CycleConfig {
        CycleConfig::new(CycleParams {
            beta_h: 0.6,
            tau_h,
            tau_c,
            ..CycleParams::default()
        })
        .unwrap()
    }

    #[test]
    fn weak_engine_example() {
        let r = weak_cycle(&engine(1.0, 1.0)).unwrap();
        assert!((r.flows.q_h - 0.76329039).abs() < 1e-8);
        assert!((r.flows.q_c + 0.38164519).abs() < 1e-8);
        assert!((r.flows.work + 0.38164519).abs() < 1e-8);
        assert!((r.metrics.eta.unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(r.regime, Regime::Engine);
        assert_eq!(r.ratio_rule_regime, Regime::Refrigerator);
        assert!(r.audits_pass(), "{:?}", r.audit_failures());
    }

    #[test]
    fn weak_refrigerator_example() {
        let r = weak_cycle(&refrigerator(1.0, 1.0)).unwrap();
        assert!((r.flows.q_c - 0.07206045).abs() < 1e-8);
        assert!((r.flows.work - 0.07206045).abs() < 1e-8);
        assert!((r.baselines.k0 - 1.0).abs() < 1e-15);
        assert_eq!(r.regime, Regime::Refrigerator);
        assert!(r.audits_pass(), "{:?}", r.audit_failures());
    }

    #[test]
    fn weak_degenerate_boundary() {
        let c = CycleConfig::new(CycleParams {
            beta_h: 0.5,
            ..CycleParams::default()
        })
        .unwrap();
        let r = weak_cycle(&c).unwrap();
        assert_eq!(r.flows.q_h, 0.0);
        assert_eq!(r.flows.q_c, 0.0);
        assert_eq!(r.flows.work, 0.0);
        assert_eq!(r.regime, Regime::Other);
    }

    #[test]
    fn weak_zero_duration() {
        let c = CycleConfig::new(CycleParams {
            tau_h: 0.0,
            tau_c: 0.0,
            ..CycleParams::default()
        })
        .unwrap();
        assert_eq!(weak_cycle(&c), Err(Error::UndefinedPower));
    }

    #[test]
    fn validation_lists_every_field() {
        let err = CycleConfig::new(CycleParams {
            omega_c: -1.0,
            beta_c: 0.1,
            tau_h: -2.0,
            tau_c: f64::NAN,
            ..CycleParams::default()
        })
        .unwrap_err();
        let Error::InvalidConfig(list) = err else {
            panic!("expected config error")
        };
        for field in ["omega_c", "beta_c", "tau_h", "tau_c"] {
            assert!(
                list.iter().any(|m| m.starts_with(field)),
                "{field} missing from {list:?}"
            );
        }
    }

    #[test]
    fn mismatched_g_rejected() {
        let mut c = engine(1.0, 1.0);
        c.profile_h = CouplingProfile::markovian(0.5).unwrap();
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        assert!(strong_cycle(&c).is_err());
    }

    #[test]
    fn long_strokes_reduce_to_weak() {
        let c = engine(200.0, 200.0);
        let (s, w) = (strong_cycle(&c).unwrap(), weak_cycle(&c).unwrap());
        assert!((s.flows.q_h - w.flows.q_h).abs() < 1e-12);
        assert!((s.flows.q_c - w.flows.q_c).abs() < 1e-12);
        assert!((s.flows.work - w.flows.work).abs() < 1e-12);
        assert!((s.metrics.eta.unwrap() - w.metrics.eta.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn half_thermalized_hot_stroke() {
        let c0 = engine(1.0, 5.0);
        let g = c0.g_h();
        let c = engine(g * std::f64::consts::LN_2, 5.0);
        let r = strong_cycle(&c).unwrap();
        assert!((r.sin2_h - 0.5).abs() < 1e-15);
        assert!((r.flows.q_h - 0.38164519).abs() < 1e-8);
        assert!((r.metrics.eta.unwrap() - 0.5).abs() < 1e-12);
        assert!(r.audits_pass(), "{:?}", r.audit_failures());
    }

    #[test]
    fn refrigerator_cop_half() {
        let g_c = 1.0_f64.tanh();
        let r = strong_cycle(&refrigerator(3.0, g_c * std::f64::consts::LN_2)).unwrap();
        assert!((r.metrics.cop.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(r.regime, Regime::Refrigerator);
        for e in &r.entries {
            if e.stroke.is_coupling_switch() {
                assert!(e.ledger.work.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn zero_duration_contacts_move_no_heat() {
        let c = CycleConfig::new(CycleParams {
            tau_h: 0.0,
            tau_c: 0.0,
            tau_u1: 1.0,
            ..CycleParams::default()
        })
        .unwrap();
        let r = strong_cycle(&c).unwrap();
        assert_eq!(r.flows.q_h, 0.0);
        assert_eq!(r.flows.q_c, 0.0);
        assert!(r.flows.work.abs() < 1e-15);
        assert!(r.audits.heat_integral_deviation.is_none());
        let o = strong_cycle_via_oracle(&c, 5).unwrap();
        assert!(o.flows.q_h.abs() < 1e-15 && o.flows.q_c.abs() < 1e-15);
    }

    #[test]
    fn first_law_and_partial_cyclicity() {
        let r = strong_cycle(&engine(0.3, 0.2)).unwrap();
        assert!(r.audits.first_law_max_residual < 1e-12);
        assert!(r.audits.first_law_cycle_residual.abs() < 1e-12);
        let c = engine(0.3, 0.2);
        let want = (c.g_c() - c.g_h()) * r.sin2_h * c.omega_c * (1.0 - r.sin2_c);
        assert!((r.audits.stored_energy_mismatch - want).abs() < 1e-12);
        assert!(r.cyclicity_residual > 0.0);
        assert!(r.audits.heat_integral_deviation.unwrap() < 1e-6);
    }

    #[test]
    fn strong_cycle_carries_tabulated_warning() {
        let table =
            crate::profile::TabulatedCoupling::new(vec![0.01, 5.0], vec![0.3, 0.3]).unwrap();
        let c = CycleConfig::new(CycleParams {
            tau_h: 2.0,
            tau_c: 2.0,
            shape_h: ProfileShape::Tabulated(table),
            ..CycleParams::default()
        })
        .unwrap();
        let r = strong_cycle(&c).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!((r.sin2_h - (0.6_f64).sin().powi(2)).abs() < 1e-12);
        let long = CycleConfig::new(CycleParams {
            tau_h: 6.0,
            ..c.params()
        });
        assert!(long.is_err());
    }

    #[test]
    fn oracle_cycle_matches() {
        let c = engine(2.0, 2.0);
        let r = strong_cycle_via_oracle(&c, 201).unwrap();
        assert!(r.audits.oracle_max_deviation.unwrap() < 1e-5);
        assert!(r.audits_pass(), "{:?}", r.audit_failures());
    }
}
