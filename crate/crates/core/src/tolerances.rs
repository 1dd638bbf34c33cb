//! Numerical thresholds shared by the library, the property tests and the
//! acceptance suite.

/// One record holding every threshold used for validation and audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise `|A - A†|` bound for matrices treated as Hermitian.
    pub hermitian: f64,
    /// `|Tr ρ - 1|` bound for density operators.
    pub trace: f64,
    /// Smallest admissible eigenvalue of a positive semidefinite matrix.
    pub psd: f64,
    /// `‖V D V† - A‖_max` bound for eigendecompositions.
    pub eig_reconstruction: f64,
    /// `‖U U† - 1‖_max` bound for unitaries.
    pub unitarity: f64,
    /// Eigenvalues below this are exact zeros in entropy sums.
    pub zero_eigenvalue: f64,
    /// `|cos F|` below this makes the generator singular.
    pub singular_cos: f64,
    /// Rate threshold for CP-divisibility (`γ ≥ -markovian_rate`).
    pub markovian_rate: f64,
    /// First-law residual per stroke and per cycle.
    pub first_law: f64,
    /// Smallest admissible entropy production.
    pub entropy_floor: f64,
    /// Bound on connect/disconnect work in the closed-form cycle.
    pub coupling_cost: f64,
    /// Slack on Carnot and Clausius bounds.
    pub carnot: f64,
    /// `|g - tanh(βω)|` bound for bath parameters.
    pub g_match: f64,
    /// Energy flows with magnitude below this count as zero when classifying.
    pub flow_zero: f64,
    /// Bound on oracle-versus-closed-form energy deviations.
    pub oracle_energy: f64,
}

pub const TOL: Tolerances = Tolerances {
    hermitian: 1e-12,
    trace: 1e-10,
    psd: 1e-10,
    eig_reconstruction: 1e-10,
    unitarity: 1e-10,
    zero_eigenvalue: 1e-14,
    singular_cos: 1e-8,
    markovian_rate: 1e-10,
    first_law: 1e-8,
    entropy_floor: -1e-8,
    coupling_cost: 1e-12,
    carnot: 1e-12,
    g_match: 1e-12,
    flow_zero: 1e-12,
    oracle_energy: 1e-5,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOL
    }
}
