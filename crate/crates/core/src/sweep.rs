//! One-dimensional parameter sweeps over cycle configurations.

use std::fmt;
use std::str::FromStr;

use crate::cycle::{strong_cycle, strong_cycle_via_oracle, CycleConfig, CycleParams, CycleReport};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    TauH,
    TauC,
    GH,
    GC,
    OmegaH,
    OmegaC,
    BetaH,
    BetaC,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 8] = [
        SweepAxis::TauH,
        SweepAxis::TauC,
        SweepAxis::GH,
        SweepAxis::GC,
        SweepAxis::OmegaH,
        SweepAxis::OmegaC,
        SweepAxis::BetaH,
        SweepAxis::BetaC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::TauH => "tau_h",
            SweepAxis::TauC => "tau_c",
            SweepAxis::GH => "g_h",
            SweepAxis::GC => "g_c",
            SweepAxis::OmegaH => "omega_h",
            SweepAxis::OmegaC => "omega_c",
            SweepAxis::BetaH => "beta_h",
            SweepAxis::BetaC => "beta_c",
        }
    }

    /// Sets this axis to `value`. The `g` axes fix the bath temperature via
    /// `β = atanh(g)/ω` at the current frequency.
    pub fn apply(self, params: &CycleParams, value: f64) -> CycleParams {
        let mut p = params.clone();
        match self {
            SweepAxis::TauH => p.tau_h = value,
            SweepAxis::TauC => p.tau_c = value,
            SweepAxis::GH => p.beta_h = value.atanh() / p.omega_h,
            SweepAxis::GC => p.beta_c = value.atanh() / p.omega_c,
            SweepAxis::OmegaH => p.omega_h = value,
            SweepAxis::OmegaC => p.omega_c = value,
            SweepAxis::BetaH => p.beta_h = value,
            SweepAxis::BetaC => p.beta_c = value,
        }
        p
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|a| a.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown sweep axis '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// `AXIS:LO:HI:N`, with `N` evenly spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sweep bounds must be finite, got {lo}..{hi}"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidArgument(
                "sweep needs at least one point".into(),
            ));
        }
        if count > 1 && hi <= lo {
            return Err(Error::InvalidArgument(format!(
                "sweep range {lo}..{hi} is empty"
            )));
        }
        Ok(Self {
            axis,
            lo,
            hi,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.hi
                } else {
                    self.lo + step * k as f64
                }
            })
            .collect()
    }
}

impl FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [axis, lo, hi, n] = parts[..] else {
            return Err(Error::InvalidArgument(format!(
                "sweep '{s}' is not of the form AXIS:LO:HI:N"
            )));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("sweep bound '{v}' is not a number")))
        };
        let count = n
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("sweep count '{n}' is not a count")))?;
        Self::new(axis.trim().parse()?, num(lo)?, num(hi)?, count)
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.axis, self.lo, self.hi, self.count)
    }
}

/// How each grid point is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMethod {
    ClosedForm,
    Oracle { steps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub value: f64,
    /// Either the cycle report or why the point was skipped.
    pub outcome: Result<CycleReport>,
}

impl SweepPoint {
    pub fn is_valid(&self) -> bool {
        self.outcome.is_ok()
    }
}

fn evaluate(
    base: &CycleParams,
    axis: SweepAxis,
    method: SweepMethod,
    index: usize,
    value: f64,
) -> SweepPoint {
    let outcome = CycleConfig::new(axis.apply(base, value)).and_then(|config| match method {
        SweepMethod::ClosedForm => strong_cycle(&config),
        SweepMethod::Oracle { steps } => strong_cycle_via_oracle(&config, steps),
    });
    SweepPoint {
        index,
        value,
        outcome,
    }
}

/// Evaluates every grid point, in parallel when the `parallel` feature is
/// enabled. Rows come back in grid order either way.
pub fn run_sweep(base: &CycleParams, spec: &SweepSpec, method: SweepMethod) -> Vec<SweepPoint> {
    let values = spec.values();
    par::map_indexed(&values, |i, &v| evaluate(base, spec.axis, method, i, v))
}

/// [`run_sweep`] on the calling thread only.
pub fn run_sweep_sequential(
    base: &CycleParams,
    spec: &SweepSpec,
    method: SweepMethod,
) -> Vec<SweepPoint> {
    let values = spec.values();
    par::map_sequential(&values, |i, &v| evaluate(base, spec.axis, method, i, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_values() {
        let s: SweepSpec = "tau_c:0.1:5:50".parse().unwrap();
        assert_eq!(s.axis, SweepAxis::TauC);
        let v = s.values();
        assert_eq!(v.len(), 50);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[49], 5.0);
        assert!("tau_x:0:1:3".parse::<SweepSpec>().is_err());
        assert!("tau_h:1:0:3".parse::<SweepSpec>().is_err());
        assert!("tau_h:0:1".parse::<SweepSpec>().is_err());
        assert!("tau_h:0:1:0".parse::<SweepSpec>().is_err());
        assert_eq!(
            "g_h:0.3:0.3:1".parse::<SweepSpec>().unwrap().values(),
            vec![0.3]
        );
        assert_eq!(s.to_string().parse::<SweepSpec>().unwrap(), s);
    }

    #[test]
    fn g_axis_sets_temperature() {
        let base = CycleParams::default();
        let p = SweepAxis::GH.apply(&base, 0.5);
        assert!(((p.beta_h * p.omega_h).tanh() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_points_are_flagged_not_fatal() {
        let base = CycleParams::default();
        let spec = SweepSpec::new(SweepAxis::BetaH, 0.1, 2.0, 5).unwrap();
        let rows = run_sweep(&base, &spec, SweepMethod::ClosedForm);
        assert_eq!(rows.len(), 5);
        assert!(rows[0].is_valid());
        assert!(!rows[4].is_valid());
        assert!(rows.iter().enumerate().all(|(i, r)| r.index == i));
    }

    #[test]
    fn parallel_matches_sequential() {
        let base = CycleParams {
            beta_h: 0.6,
            ..CycleParams::default()
        };
        let spec = SweepSpec::new(SweepAxis::TauC, 0.1, 5.0, 16).unwrap();
        assert_eq!(
            run_sweep(&base, &spec, SweepMethod::ClosedForm),
            run_sweep_sequential(&base, &spec, SweepMethod::ClosedForm)
        );
    }
}
