//! Time scans of the coupling profiles: decay rate and CP-divisibility
//! witness, and the finite-time power ratio `P/P₀ = sin²F(t)`.

use crate::dynamics::{cp_divisibility_witness, vectorized_reps};
use crate::error::{Error, Result};
use crate::par;
use crate::profile::CouplingProfile;
use crate::tolerances::TOL;

/// CP-divisibility status of a scan sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkovianFlag {
    Markovian,
    NonMarkovian,
    /// `cos F(t) = 0`: the map is not invertible, so no generator exists.
    Singular,
}

impl MarkovianFlag {
    /// `1`, `0` and `-1` respectively.
    pub fn code(self) -> i8 {
        match self {
            MarkovianFlag::Markovian => 1,
            MarkovianFlag::NonMarkovian => 0,
            MarkovianFlag::Singular => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessRow {
    pub t: f64,
    pub f: f64,
    pub phase: f64,
    /// `NaN` at singular instants.
    pub gamma: f64,
    pub flag: MarkovianFlag,
    /// Smallest eigenvalue of `Π Ω(L̂_t) Π`; `NaN` at singular instants.
    pub witness_min_eigenvalue: f64,
}

fn check_grid(t_max: f64, points: usize) -> Result<()> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "scan range (0, {t_max}] is empty"
        )));
    }
    if points < 2 {
        return Err(Error::InvalidArgument(format!(
            "scan needs at least 2 points, got {points}"
        )));
    }
    Ok(())
}

pub fn witness_row(profile: &CouplingProfile, omega: f64, t: f64) -> Result<WitnessRow> {
    let f = profile.coupling(t)?;
    let phase = profile.phase(t)?;
    let singular = |_| WitnessRow {
        t,
        f,
        phase,
        gamma: f64::NAN,
        flag: MarkovianFlag::Singular,
        witness_min_eigenvalue: f64::NAN,
    };
    let gamma = match profile.rate(t) {
        Ok(g) => g,
        Err(e @ Error::SingularGenerator { .. }) => return Ok(singular(e)),
        Err(e) => return Err(e),
    };
    let rep = match vectorized_reps(profile.g(), omega, profile, t) {
        Ok(rep) => rep,
        Err(e @ Error::SingularGenerator { .. }) => return Ok(singular(e)),
        Err(e) => return Err(e),
    };
    let witness = cp_divisibility_witness(&rep);
    let flag = if gamma >= -TOL.markovian_rate {
        MarkovianFlag::Markovian
    } else {
        MarkovianFlag::NonMarkovian
    };
    Ok(WitnessRow {
        t,
        f,
        phase,
        gamma,
        flag,
        witness_min_eigenvalue: witness.min_eigenvalue(),
    })
}

/// Samples `t_k = t_max·k/N` for `k = 1..=N`.
pub fn witness_scan(
    profile: &CouplingProfile,
    omega: f64,
    t_max: f64,
    points: usize,
) -> Result<Vec<WitnessRow>> {
    check_grid(t_max, points)?;
    let times: Vec<f64> = (1..=points)
        .map(|k| t_max * k as f64 / points as f64)
        .collect();
    par::map_indexed(&times, |_, &t| witness_row(profile, omega, t))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub t: f64,
    /// `sin²F(t)` for each requested profile, in order.
    pub ratios: Vec<f64>,
}

/// Samples `t_k = t_max·k/(N-1)` for `k = 0..N`, including `t = 0`.
pub fn power_trace(
    profiles: &[CouplingProfile],
    t_max: f64,
    points: usize,
) -> Result<Vec<PowerRow>> {
    check_grid(t_max, points)?;
    let times: Vec<f64> = (0..points)
        .map(|k| t_max * k as f64 / (points - 1) as f64)
        .collect();
    par::map_indexed(&times, |_, &t| {
        let ratios = profiles
            .iter()
            .map(|p| p.thermalization_weight(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(PowerRow { t, ratios })
    })
    .into_iter()
    .collect()
}
