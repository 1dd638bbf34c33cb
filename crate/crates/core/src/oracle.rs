//! Direct numerical integration of `dρ/dt = -i[H_tot(t), ρ]` for the joint
//! state, used to cross-check the closed forms.
//!
//! The integrator is an adaptive Dormand-Prince 5(4) scheme. It only ever
//! sees `H_tot(t)` through `f(t)`; it does not use the fact that the
//! Hamiltonian commutes with itself at different times, except on the short
//! interval `[0, t_start]` where `f` is singular.

use crate::dynamics::{product_state, propagator, total_hamiltonian, QubitState};
use crate::error::{Error, Result};
use crate::linalg::{DensityOperator, OperatorMatrix, C64};
use crate::profile::CouplingProfile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Relative local error tolerance.
    pub rtol: f64,
    /// Absolute local error tolerance.
    pub atol: f64,
    /// Integration starts here; `[0, t_start]` uses the propagator shortcut.
    pub t_start: f64,
    pub max_steps: usize,
    pub min_step: f64,
}

pub const ORACLE_T_START: f64 = 1e-6;

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            t_start: ORACLE_T_START,
            max_steps: 2_000_000,
            min_step: 1e-15,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn von_neumann_rhs(h: &OperatorMatrix, rho: &OperatorMatrix) -> OperatorMatrix {
    h.commutator(rho).scale(C64::new(0.0, -1.0))
}

fn combine(base: &OperatorMatrix, terms: &[(f64, &OperatorMatrix)]) -> OperatorMatrix {
    let mut out = base.clone();
    for &(w, k) in terms {
        if w != 0.0 {
            out = &out + &k.scale_real(w);
        }
    }
    out
}

/// Integrates `dρ/dt = -i[H(t), ρ]` from `(t0, rho0)` and returns the state
/// at each of `outputs` (ascending, all `≥ t0`).
pub fn integrate_von_neumann<H>(
    hamiltonian: H,
    rho0: &OperatorMatrix,
    t0: f64,
    outputs: &[f64],
    opts: &OracleOptions,
) -> Result<Vec<OperatorMatrix>>
where
    H: Fn(f64) -> Result<OperatorMatrix>,
{
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
        return Err(Error::InvalidArgument(
            "output times must be ascending and not before t0".into(),
        ));
    }
    let mut results = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut rho = rho0.clone();
    let mut h_step = 0.1 * t0.max(1e-6);
    let mut steps = 0usize;
    let mut k1 = von_neumann_rhs(&hamiltonian(t)?, &rho);

    for &target in outputs {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::IntegrationFailure {
                    t,
                    reason: "step budget exhausted".into(),
                });
            }
            let mut h = h_step.min(target - t);
            let last = h >= target - t;
            if last {
                h = target - t;
            }
            let mut k: Vec<OperatorMatrix> = Vec::with_capacity(7);
            k.push(k1.clone());
            for stage in 1..7 {
                let terms: Vec<(f64, &OperatorMatrix)> =
                    (0..stage).map(|j| (h * A[stage][j], &k[j])).collect();
                let y = combine(&rho, &terms);
                let ts = if stage == 6 { t + h } else { t + C[stage] * h };
                k.push(von_neumann_rhs(&hamiltonian(ts)?, &y));
            }
            let y5 = combine(
                &rho,
                &(0..7).map(|j| (h * B5[j], &k[j])).collect::<Vec<_>>(),
            );
            let err = combine(
                &OperatorMatrix::zeros(rho.dim()),
                &(0..7)
                    .map(|j| (h * (B5[j] - B4[j]), &k[j]))
                    .collect::<Vec<_>>(),
            );
            let scale = opts.atol + opts.rtol * rho.max_abs().max(y5.max_abs());
            let err_norm = err.max_abs() / scale;
            steps += 1;

            if err_norm <= 1.0 {
                t = if last { target } else { t + h };
                rho = y5;
                k1 = k.pop().expect("seven stages");
                let factor = if err_norm == 0.0 {
                    5.0
                } else {
                    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last || factor < 1.0 {
                    h_step = h * factor;
                }
            } else {
                let factor = if err_norm.is_finite() {
                    (0.9 * err_norm.powf(-0.25)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h_step = h * factor;
                if h_step < opts.min_step {
                    return Err(Error::IntegrationFailure {
                        t,
                        reason: format!("step size underflow ({h_step:e})"),
                    });
                }
            }
        }
        results.push(rho.clone());
    }
    Ok(results)
}

fn oracle_start(profile: &CouplingProfile, opts: &OracleOptions) -> f64 {
    opts.t_start.max(profile.earliest_time())
}

/// Joint states at each of `times` (ascending), starting from
/// `ρ_S ⊗ ρ_B(g)` at `t = 0`.
pub fn oracle_trajectory(
    sys: &QubitState,
    g: f64,
    omega: f64,
    profile: &CouplingProfile,
    times: &[f64],
    opts: &OracleOptions,
) -> Result<Vec<DensityOperator>> {
    let rho0 = product_state(sys, g);
    let t_start = oracle_start(profile, opts);
    if let Some(&t_last) = times.last() {
        if t_last > profile.latest_time() {
            return Err(Error::Domain(format!(
                "time {t_last} beyond the coupling profile"
            )));
        }
    }
    let short = |t: f64| -> Result<OperatorMatrix> {
        let u = propagator(omega, profile.phase(t)?, t)?;
        Ok(&(&u * rho0.matrix()) * &u.dagger())
    };
    let rho_start = short(t_start)?;
    let split = times.partition_point(|&t| t <= t_start);
    let mut states: Vec<OperatorMatrix> = times[..split]
        .iter()
        .map(|&t| short(t))
        .collect::<Result<_>>()?;
    let h = |t: f64| Ok(total_hamiltonian(omega, profile.coupling(t)?));
    states.extend(integrate_von_neumann(
        h,
        &rho_start,
        t_start,
        &times[split..],
        opts,
    )?);
    states
        .into_iter()
        .map(|m| DensityOperator::with_tolerance(m, 1e-8, 1e-8, 1e-8))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::IntegrationFailure {
            t: times.last().copied().unwrap_or(0.0),
            reason: e.to_string(),
        })
}

/// Joint state at `t` by direct integration.
pub fn oracle_propagate(
    sys: &QubitState,
    g: f64,
    omega: f64,
    profile: &CouplingProfile,
    t: f64,
    opts: &OracleOptions,
) -> Result<DensityOperator> {
    if t < 0.0 {
        return Err(Error::Domain(format!(
            "cannot propagate to negative time {t}"
        )));
    }
    Ok(oracle_trajectory(sys, g, omega, profile, &[t], opts)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::joint_state;

    #[test]
    fn free_evolution_keeps_diagonal() {
        let rho0 = product_state(&QubitState::new(0.3, C64::new(0.1, 0.2)).unwrap(), 0.4);
        let out = integrate_von_neumann(
            |_| Ok(total_hamiltonian(1.0, 0.0)),
            rho0.matrix(),
            0.0,
            &[0.5, 2.0],
            &OracleOptions::default(),
        )
        .unwrap();
        for rho in &out {
            for k in 0..4 {
                assert!((rho.get(k, k) - rho0.get(k, k)).norm() < 1e-12);
            }
        }
        // Coherence rotates by e^{-2iωt} on the system factor.
        let want = rho0.get(0, 2) * C64::from_polar(1.0, -4.0);
        assert!((out[1].get(0, 2) - want).norm() < 1e-9);
    }

    #[test]
    fn markovian_oracle_matches_closed_form() {
        let profile = CouplingProfile::markovian(0.8).unwrap();
        let sys = QubitState::new(0.3, C64::new(0.2, -0.1)).unwrap();
        let oracle =
            oracle_propagate(&sys, 0.8, 1.0, &profile, 2.0, &OracleOptions::default()).unwrap();
        let exact = joint_state(&sys, &profile, 1.0, 2.0).unwrap();
        assert!(oracle.matrix().max_abs_diff(exact.matrix()) < 1e-6);
        assert!((oracle.matrix().trace().re - 1.0).abs() < 1e-9);
        assert!(oracle.matrix().is_hermitian(1e-9));
    }

    #[test]
    fn times_before_start_use_short_propagator() {
        let profile = CouplingProfile::markovian(0.5).unwrap();
        let sys = QubitState::diagonal(0.2).unwrap();
        let out = oracle_trajectory(
            &sys,
            0.5,
            1.0,
            &profile,
            &[0.0, 1e-7],
            &OracleOptions::default(),
        )
        .unwrap();
        assert!(
            out[0]
                .matrix()
                .max_abs_diff(product_state(&sys, 0.5).matrix())
                < 1e-15
        );
    }

    #[test]
    fn step_budget_failure() {
        let profile = CouplingProfile::markovian(0.5).unwrap();
        let sys = QubitState::diagonal(0.2).unwrap();
        let opts = OracleOptions {
            max_steps: 3,
            ..OracleOptions::default()
        };
        assert!(matches!(
            oracle_propagate(&sys, 0.5, 1.0, &profile, 2.0, &opts),
            Err(Error::IntegrationFailure { .. })
        ));
    }
}
