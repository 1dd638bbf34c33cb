//! Time-dependent exchange coupling `f(t)`, its accumulated phase
//! `F(t) = ∫₀ᵗ f`, and the decay rate `γ(t) = f(t)·tan F(t)`.
//!
//! Both analytic profiles diverge like `t^{-1/2}` at the origin, so `F` is
//! always taken from its closed form rather than integrated.

use std::path::Path;

use crate::error::{Error, Result};
use crate::tolerances::TOL;

/// Sampled `(t, f)` pairs with linear interpolation between them.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCoupling {
    times: Vec<f64>,
    values: Vec<f64>,
    /// `F` at each sample time.
    cumulative: Vec<f64>,
}

impl TabulatedCoupling {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(
                "table columns have different lengths".into(),
            ));
        }
        if times.len() < 2 {
            return Err(Error::InvalidArgument(
                "coupling table needs at least two samples".into(),
            ));
        }
        if times.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "coupling table contains non-finite values".into(),
            ));
        }
        if times[0] <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "first table time must be positive, got {}",
                times[0]
            )));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(format!(
                "table times must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        // The segment [0, t0] is approximated by f(t0)·t0.
        let mut cumulative = Vec::with_capacity(times.len());
        cumulative.push(values[0] * times[0]);
        for k in 1..times.len() {
            let step = 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
            cumulative.push(cumulative[k - 1] + step);
        }
        Ok(Self {
            times,
            values,
            cumulative,
        })
    }

    /// Two whitespace-separated columns `t f`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "line {}: expected 2 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("line {}: {e}: {s:?}", lineno + 1)))
            };
            times.push(parse(cols[0])?);
            values.push(parse(cols[1])?);
        }
        Self::new(times, values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    fn segment(&self, t: f64) -> usize {
        // Index k with times[k] <= t <= times[k+1].
        match self.times.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(k) => k.min(self.times.len() - 2),
            Err(k) => k - 1,
        }
    }

    fn in_range(&self, t: f64) -> Result<()> {
        if t < self.start() || t > self.end() {
            return Err(Error::Domain(format!(
                "t = {t} outside tabulated range [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        Ok(())
    }

    fn value(&self, t: f64) -> Result<f64> {
        self.in_range(t)?;
        let k = self.segment(t);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.values[k] + w * (self.values[k + 1] - self.values[k]))
    }

    fn phase(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!(
                "phase requested at negative time {t}"
            )));
        }
        if t <= self.start() {
            return Ok(self.values[0] * t);
        }
        let f_t = self.value(t)?;
        let k = self.segment(t);
        Ok(self.cumulative[k] + 0.5 * (self.values[k] + f_t) * (t - self.times[k]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    /// `f(t) = e^{-t/2g} / (2g √(1 - e^{-t/g}))`, giving a constant rate `1/2g`.
    MarkovianSemigroup,
    /// The semigroup profile plus `d/dt [sin(20t)/(10t+1)]`.
    NonMarkovianCorrected,
    Tabulated(TabulatedCoupling),
}

/// A coupling profile together with the bath parameter `g = tanh(βω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    shape: ProfileShape,
    g: f64,
}

/// `γ_- = (1+g)γ` (emission towards `|1⟩`), `γ_+ = (1-g)γ` (absorption).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

impl RatePair {
    pub fn from_gamma(gamma: f64, g: f64) -> Self {
        Self {
            gamma_minus: (1.0 + g) * gamma,
            gamma_plus: (1.0 - g) * gamma,
        }
    }
}

/// Result of sampling `γ(t) ≥ 0` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovianityCheck {
    pub markovian: bool,
    pub first_violation: Option<f64>,
    pub min_rate: f64,
}

pub const DEFAULT_MARKOVIAN_GRID: usize = 2000;

fn nm_correction(t: f64) -> f64 {
    (20.0 * t).sin() / (10.0 * t + 1.0)
}

fn nm_correction_derivative(t: f64) -> f64 {
    let d = 10.0 * t + 1.0;
    -10.0 * (20.0 * t).sin() / (d * d) + 20.0 * (20.0 * t).cos() / d
}

impl CouplingProfile {
    pub fn new(shape: ProfileShape, g: f64) -> Result<Self> {
        if !(g > 0.0 && g <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "bath parameter g must lie in (0, 1], got {g}"
            )));
        }
        Ok(Self { shape, g })
    }

    pub fn markovian(g: f64) -> Result<Self> {
        Self::new(ProfileShape::MarkovianSemigroup, g)
    }

    pub fn non_markovian(g: f64) -> Result<Self> {
        Self::new(ProfileShape::NonMarkovianCorrected, g)
    }

    pub fn tabulated(table: TabulatedCoupling, g: f64) -> Result<Self> {
        Self::new(ProfileShape::Tabulated(table), g)
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Same shape, different bath parameter.
    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.shape.clone(), g)
    }

    pub fn name(&self) -> &'static str {
        match self.shape {
            ProfileShape::MarkovianSemigroup => "markovian",
            ProfileShape::NonMarkovianCorrected => "non_markovian",
            ProfileShape::Tabulated(_) => "tabulated",
        }
    }

    /// True when `F` on `[0, t₀]` is the one-point estimate `f(t₀)·t₀`.
    pub fn phase_is_approximate(&self) -> bool {
        matches!(self.shape, ProfileShape::Tabulated(_))
    }

    /// Earliest time at which `f` can be evaluated.
    pub fn earliest_time(&self) -> f64 {
        match &self.shape {
            ProfileShape::Tabulated(t) => t.start(),
            _ => 0.0,
        }
    }

    pub fn latest_time(&self) -> f64 {
        match &self.shape {
            ProfileShape::Tabulated(t) => t.end(),
            _ => f64::INFINITY,
        }
    }

    fn markovian_f(&self, t: f64) -> f64 {
        let u = (-t / (2.0 * self.g)).exp();
        let s = (-(-t / self.g).exp_m1()).sqrt();
        u / (2.0 * self.g * s)
    }

    /// `(sin F, cos F)` of the semigroup profile: `cos F = e^{-t/2g}`.
    fn markovian_trig(&self, t: f64) -> (f64, f64) {
        (
            (-(-t / self.g).exp_m1()).sqrt(),
            (-t / (2.0 * self.g)).exp(),
        )
    }

    /// Coupling strength `f(t)`, defined for `t > 0`.
    pub fn coupling(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!(
                "coupling undefined at t = {t} (requires t > 0)"
            )));
        }
        match &self.shape {
            ProfileShape::MarkovianSemigroup => Ok(self.markovian_f(t)),
            ProfileShape::NonMarkovianCorrected => {
                Ok(self.markovian_f(t) + nm_correction_derivative(t))
            }
            ProfileShape::Tabulated(table) => table.value(t),
        }
    }

    /// Accumulated phase `F(t)`, defined for `t ≥ 0`.
    pub fn phase(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!(
                "phase requested at negative time {t}"
            )));
        }
        match &self.shape {
            ProfileShape::MarkovianSemigroup => {
                let (s, c) = self.markovian_trig(t);
                Ok(s.atan2(c))
            }
            ProfileShape::NonMarkovianCorrected => {
                let (s, c) = self.markovian_trig(t);
                Ok(s.atan2(c) + nm_correction(t))
            }
            ProfileShape::Tabulated(table) => table.phase(t),
        }
    }

    /// `(sin F(t), cos F(t))`.
    pub fn phase_trig(&self, t: f64) -> Result<(f64, f64)> {
        match self.shape {
            ProfileShape::MarkovianSemigroup if t >= 0.0 => Ok(self.markovian_trig(t)),
            _ => {
                let f = self.phase(t)?;
                Ok(f.sin_cos())
            }
        }
    }

    /// `sin² F(t)`; equals `1 - e^{-t/g}` for the semigroup profile.
    pub fn thermalization_weight(&self, t: f64) -> Result<f64> {
        match self.shape {
            ProfileShape::MarkovianSemigroup if t >= 0.0 => Ok(-(-t / self.g).exp_m1()),
            _ => {
                let (s, _) = self.phase_trig(t)?;
                Ok(s * s)
            }
        }
    }

    /// `γ(t) = f(t)·tan F(t)`.
    pub fn rate(&self, t: f64) -> Result<f64> {
        let f = self.coupling(t)?;
        let (s, c) = self.phase_trig(t)?;
        if c.abs() < TOL.singular_cos {
            return match self.shape {
                ProfileShape::MarkovianSemigroup => Ok(1.0 / (2.0 * self.g)),
                _ => Err(Error::SingularGenerator { t, cos_f: c.abs() }),
            };
        }
        Ok(f * s / c)
    }

    pub fn rate_pair(&self, t: f64) -> Result<RatePair> {
        Ok(RatePair::from_gamma(self.rate(t)?, self.g))
    }

    /// Sampling grid used by [`is_markovian`](Self::is_markovian).
    pub fn markovianity_grid(&self, horizon: f64, grid: usize) -> Result<Vec<f64>> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if grid == 0 {
            return Err(Error::InvalidArgument(
                "grid must have at least one point".into(),
            ));
        }
        match &self.shape {
            ProfileShape::Tabulated(table) => {
                let lo = table.start();
                let hi = horizon.min(table.end());
                if hi < lo {
                    return Err(Error::Domain(format!(
                        "horizon {horizon} ends before table start {lo}"
                    )));
                }
                if grid == 1 {
                    return Ok(vec![hi]);
                }
                Ok((0..grid)
                    .map(|k| lo + (hi - lo) * k as f64 / (grid - 1) as f64)
                    .collect())
            }
            _ => Ok((1..=grid)
                .map(|k| horizon * k as f64 / grid as f64)
                .collect()),
        }
    }

    /// CP-divisibility on `(0, horizon]`: `γ(t) ≥ -1e-10` at every grid time.
    pub fn is_markovian(&self, horizon: f64, grid: usize) -> Result<MarkovianityCheck> {
        let mut first_violation = None;
        let mut min_rate = f64::INFINITY;
        for t in self.markovianity_grid(horizon, grid)? {
            let gamma = self.rate(t)?;
            min_rate = min_rate.min(gamma);
            if gamma < -TOL.markovian_rate && first_violation.is_none() {
                first_violation = Some(t);
            }
        }
        Ok(MarkovianityCheck {
            markovian: first_violation.is_none(),
            first_violation,
            min_rate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2};

    #[test]
    fn markovian_coupling_at_ln2() {
        let p = CouplingProfile::markovian(0.8).unwrap();
        assert!((p.coupling(0.8 * LN_2).unwrap() - 0.625).abs() < 1e-14);
    }

    #[test]
    fn markovian_coupling_decays() {
        let p = CouplingProfile::markovian(0.3).unwrap();
        assert!(p.coupling(400.0).unwrap() < 1e-200);
    }

    #[test]
    fn non_markovian_coupling_at_ln2() {
        // Reference evaluated term by term in plain arithmetic.
        let t: f64 = 0.8 * LN_2;
        let d = 10.0 * t + 1.0;
        let want = 0.625 - 10.0 * (20.0 * t).sin() / (d * d) + 20.0 * (20.0 * t).cos() / d;
        let p = CouplingProfile::non_markovian(0.8).unwrap();
        assert!((p.coupling(t).unwrap() - want).abs() < 1e-13);
        assert!((p.coupling(t).unwrap() - 1.146_568_770_775_536).abs() < 1e-12);
    }

    #[test]
    fn coupling_domain_errors() {
        let p = CouplingProfile::markovian(0.5).unwrap();
        assert!(matches!(p.coupling(0.0), Err(Error::Domain(_))));
        assert!(matches!(p.coupling(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn phase_limits() {
        for g in [0.1, 0.5, 0.99] {
            let p = CouplingProfile::markovian(g).unwrap();
            assert_eq!(p.phase(0.0).unwrap(), 0.0);
            assert!((p.phase(1e4).unwrap() - FRAC_PI_2).abs() < 1e-15);
        }
        let p = CouplingProfile::markovian(0.8).unwrap();
        assert!((p.phase(0.8 * LN_2).unwrap() - FRAC_PI_4).abs() < 1e-14);
        assert!((p.thermalization_weight(0.8 * LN_2).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(p.thermalization_weight(0.0).unwrap(), 0.0);
    }

    #[test]
    fn phase_closed_form_matches_arcsin_expression() {
        let g = 0.35;
        let p = CouplingProfile::markovian(g).unwrap();
        for t in [0.01, 0.2, 1.0, 3.0] {
            let textbook = FRAC_PI_2 - (-t / (2.0 * g)).exp().asin();
            assert!((p.phase(t).unwrap() - textbook).abs() < 1e-12);
        }
    }

    #[test]
    fn semigroup_rate_and_pair() {
        let p = CouplingProfile::markovian(0.8).unwrap();
        for t in [1e-3, 0.3, 5.0, 16.0] {
            assert!((p.rate(t).unwrap() - 0.625).abs() < 1e-12);
        }
        let pair = CouplingProfile::markovian(0.5)
            .unwrap()
            .rate_pair(2.0)
            .unwrap();
        assert!((pair.gamma_minus - 1.5).abs() < 1e-12);
        assert!((pair.gamma_plus - 0.5).abs() < 1e-12);
        // Far past the point where cos F underflows.
        assert_eq!(p.rate(2000.0).unwrap(), 0.625);
    }

    #[test]
    fn non_markovian_rate_goes_negative() {
        let p = CouplingProfile::non_markovian(0.8).unwrap();
        let check = p.is_markovian(2.0, DEFAULT_MARKOVIAN_GRID).unwrap();
        assert!(!check.markovian);
        assert!(check.min_rate < 0.0);
        let t = check.first_violation.unwrap();
        assert!(p.rate(t).unwrap() < 0.0);
    }

    #[test]
    fn markovian_profile_passes_check() {
        for g in [0.1, 0.5, 0.8] {
            let p = CouplingProfile::markovian(g).unwrap();
            assert!(
                p.is_markovian(20.0 * g, DEFAULT_MARKOVIAN_GRID)
                    .unwrap()
                    .markovian
            );
        }
    }

    #[test]
    fn non_markovian_singular_generator() {
        // F first crosses π/2 near t ≈ 1.93 for g = 0.3; bisect for cos F = 0.
        let p = CouplingProfile::non_markovian(0.3).unwrap();
        let (mut lo, mut hi) = (1.9, 1.95);
        assert!(p.phase(lo).unwrap() < FRAC_PI_2 && p.phase(hi).unwrap() > FRAC_PI_2);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p.phase(mid).unwrap() < FRAC_PI_2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(matches!(p.rate(lo), Err(Error::SingularGenerator { .. })));
    }

    #[test]
    fn tabulated_constant_profile() {
        let times: Vec<f64> = (0..=99).map(|k| 0.01 + 0.01 * k as f64).collect();
        let table = TabulatedCoupling::new(times.clone(), vec![1.0; times.len()]).unwrap();
        let p = CouplingProfile::tabulated(table, 0.5).unwrap();
        assert!(p.phase_is_approximate());
        assert!((p.phase(0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!((p.phase(0.005).unwrap() - 0.005).abs() < 1e-15);
        assert!((p.coupling(0.555).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(p.coupling(0.001), Err(Error::Domain(_))));
        assert!(matches!(p.coupling(1.5), Err(Error::Domain(_))));
        assert!(p.is_markovian(1.0, 500).unwrap().markovian);
    }

    #[test]
    fn tabulated_linear_interpolation_and_trapezoid() {
        let table = TabulatedCoupling::new(vec![0.5, 1.0, 2.0], vec![2.0, 4.0, 0.0]).unwrap();
        let p = CouplingProfile::tabulated(table, 0.5).unwrap();
        assert!((p.coupling(0.75).unwrap() - 3.0).abs() < 1e-15);
        // 2·0.5 + (2+4)/2·0.5 + (4+2)/2·0.5
        assert!((p.phase(1.5).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn table_parsing() {
        let text = "# t f\n0.1 1.0\n0.2   2.0 # trailing\n\n0.3\t3.0\n";
        let t = TabulatedCoupling::parse(text).unwrap();
        assert_eq!(t.samples().count(), 3);
        assert!(TabulatedCoupling::parse("0.0 1\n0.1 1\n").is_err());
        assert!(TabulatedCoupling::parse("0.2 1\n0.1 1\n").is_err());
        assert!(TabulatedCoupling::parse("0.1 1 3\n0.2 1\n").is_err());
        assert!(TabulatedCoupling::parse("0.1 x\n0.2 1\n").is_err());
        assert!(TabulatedCoupling::parse("0.1 1\n").is_err());
    }

    #[test]
    fn g_validation() {
        assert!(CouplingProfile::markovian(0.0).is_err());
        assert!(CouplingProfile::markovian(1.2).is_err());
        assert!(CouplingProfile::markovian(f64::NAN).is_err());
        assert!(CouplingProfile::markovian(1.0).is_ok());
    }
}
