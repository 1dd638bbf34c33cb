//! Exact dynamics of the two-qubit model: system qubit `ωσ_z`, bath qubit
//! `ωσ_z`, exchange coupling `f(t)(σ_x⊗σ_x + σ_y⊗σ_y)/2`.
//!
//! The total Hamiltonian commutes with itself at different times, so the
//! propagator is `exp(-i[ωt(σ_z⊗𝟙 + 𝟙⊗σ_z) + F(t)(σ_x⊗σ_x + σ_y⊗σ_y)/2])`.

use crate::error::{Error, Result};
use crate::linalg::{
    matrix_exp_skewhermitian, pauli, tensor_product, DensityOperator, OperatorMatrix, C64, I, ONE,
    ZERO,
};
use crate::profile::{CouplingProfile, RatePair};
use crate::tolerances::TOL;

/// Qubit state `[[p, x], [x*, 1-p]]` with `p` the population of `|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub p: f64,
    pub x: C64,
}

impl QubitState {
    pub fn new(p: f64, x: C64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "population p = {p} outside [0, 1]"
            )));
        }
        if x.norm_sqr() > p * (1.0 - p) + TOL.psd {
            return Err(Error::InvalidArgument(format!(
                "|x|^2 = {} exceeds p(1-p) = {}",
                x.norm_sqr(),
                p * (1.0 - p)
            )));
        }
        Ok(Self { p, x })
    }

    pub fn diagonal(p: f64) -> Result<Self> {
        Self::new(p, ZERO)
    }

    /// Gibbs state of `ωσ_z` at inverse temperature `β`: `p = (1 - tanh βω)/2`.
    pub fn thermal(omega: f64, beta: f64) -> Self {
        Self {
            p: 0.5 * (1.0 - (beta * omega).tanh()),
            x: ZERO,
        }
    }

    pub fn from_density(rho: &DensityOperator) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::InvalidArgument(
                "qubit state needs a 2x2 density operator".into(),
            ));
        }
        Self::new(rho.get(0, 0).re.clamp(0.0, 1.0), rho.get(0, 1))
    }

    pub fn to_matrix(&self) -> OperatorMatrix {
        OperatorMatrix::from_rows(
            2,
            &[
                C64::new(self.p, 0.0),
                self.x,
                self.x.conj(),
                C64::new(1.0 - self.p, 0.0),
            ],
        )
        .expect("2x2")
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_trusted(self.to_matrix())
    }

    /// `⟨σ_z⟩ = 2p - 1`.
    pub fn sigma_z(&self) -> f64 {
        2.0 * self.p - 1.0
    }
}

/// A single-qubit bath `ωσ_z` prepared at inverse temperature `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub omega: f64,
    pub beta: f64,
    pub g: f64,
}

impl BathSpec {
    pub fn new(omega: f64, beta: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bath splitting must be positive, got {omega}"
            )));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "inverse temperature must be finite and >= 0, got {beta}"
            )));
        }
        Ok(Self {
            omega,
            beta,
            g: (beta * omega).tanh(),
        })
    }

    pub fn hamiltonian(&self) -> OperatorMatrix {
        pauli::sigma_z().scale_real(self.omega)
    }

    /// `diag((1-g)/2, (1+g)/2)`.
    pub fn thermal_state(&self) -> DensityOperator {
        bath_state(self.g)
    }
}

/// `diag((1-g)/2, (1+g)/2)`.
pub fn bath_state(g: f64) -> DensityOperator {
    DensityOperator::from_trusted(
        OperatorMatrix::from_real_diagonal(&[0.5 * (1.0 - g), 0.5 * (1.0 + g)]).expect("2x2"),
    )
}

/// `(σ_x⊗σ_x + σ_y⊗σ_y)/2`: ones at `(1,2)` and `(2,1)`.
pub fn exchange_operator() -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(4);
    m.set(1, 2, ONE);
    m.set(2, 1, ONE);
    m
}

/// `σ_z⊗𝟙 + 𝟙⊗σ_z = diag(2, 0, 0, -2)`.
pub fn total_sigma_z() -> OperatorMatrix {
    OperatorMatrix::from_real_diagonal(&[2.0, 0.0, 0.0, -2.0]).expect("4x4")
}

/// `H_S ⊗ 𝟙` for `H_S = ωσ_z`.
pub fn system_hamiltonian_embedded(omega: f64) -> OperatorMatrix {
    tensor_product(&pauli::sigma_z().scale_real(omega), &pauli::identity()).expect("2x2 factors")
}

/// `𝟙 ⊗ H_B` for `H_B = ωσ_z`.
pub fn bath_hamiltonian_embedded(omega: f64) -> OperatorMatrix {
    tensor_product(&pauli::identity(), &pauli::sigma_z().scale_real(omega)).expect("2x2 factors")
}

/// `H_SB = f·(σ_x⊗σ_x + σ_y⊗σ_y)/2`.
pub fn interaction_hamiltonian(f_value: f64) -> OperatorMatrix {
    exchange_operator().scale_real(f_value)
}

/// `ω(σ_z⊗𝟙 + 𝟙⊗σ_z) + f·(σ_x⊗σ_x + σ_y⊗σ_y)/2`.
pub fn total_hamiltonian(omega: f64, f_value: f64) -> OperatorMatrix {
    &total_sigma_z().scale_real(omega) + &interaction_hamiltonian(f_value)
}

/// `ρ_S ⊗ diag((1-g)/2, (1+g)/2)`.
pub fn product_state(sys: &QubitState, g: f64) -> DensityOperator {
    sys.to_density()
        .tensor(&bath_state(g))
        .expect("2x2 factors")
}

fn check_g(g: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidArgument(format!(
            "bath parameter g = {g} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Closed-form joint state at time `t` with accumulated phase `phase = F(t)`.
pub fn joint_state_closed_form(
    sys: &QubitState,
    g: f64,
    omega: f64,
    phase: f64,
    t: f64,
) -> Result<DensityOperator> {
    check_g(g)?;
    let (p, x) = (sys.p, sys.x);
    let xc = x.conj();
    let a = 0.5 * (1.0 - g);
    let b = 0.5 * (1.0 + g);
    let (s, c) = phase.sin_cos();
    let (s2f, c2f) = (2.0 * phase).sin_cos();
    let e = C64::from_polar(1.0, -2.0 * omega * t);
    let ec = e.conj();
    let r = |v: f64| C64::new(v, 0.0);
    let mix = 0.25 * (g + 2.0 * p - 1.0) * s2f;

    #[rustfmt::skip]
    let entries = [
        r(a * p),              I * a * x * e * s,                   r(a * c) * x * e,                    ZERO,
        -I * a * xc * ec * s,  r(a * s * s + 0.5 * p * (g + c2f)),  I * mix,                             r(b * c) * x * e,
        r(a * c) * xc * ec,    -I * mix,                            r(a * c * c + 0.5 * p * (g - c2f)),  -I * b * x * e * s,
        ZERO,                  r(b * c) * xc * ec,                  I * b * xc * ec * s,                 r(b * (1.0 - p)),
    ];
    let m = OperatorMatrix::from_rows(4, &entries)?;
    DensityOperator::new(m)
        .map_err(|e| Error::InternalConsistency(format!("closed-form joint state: {e}")))
}

/// Propagator `exp(-i[ωt(σ_z⊗𝟙 + 𝟙⊗σ_z) + F·X])` from the eigendecomposition.
pub fn propagator(omega: f64, phase: f64, t: f64) -> Result<OperatorMatrix> {
    let h_eff = &total_sigma_z().scale_real(omega * t) + &exchange_operator().scale_real(phase);
    matrix_exp_skewhermitian(&h_eff, 1.0)
}

/// `U ρ(0) U†` with the propagator of [`propagator`].
pub fn joint_state_unitary(
    sys: &QubitState,
    g: f64,
    omega: f64,
    phase: f64,
    t: f64,
) -> Result<DensityOperator> {
    check_g(g)?;
    let u = propagator(omega, phase, t)?;
    let rho0 = product_state(sys, g);
    let evolved = &(&u * rho0.matrix()) * &u.dagger();
    DensityOperator::new(evolved)
        .map_err(|e| Error::InternalConsistency(format!("unitary joint state: {e}")))
}

/// Joint state at `t` for a given profile.
pub fn joint_state(
    sys: &QubitState,
    profile: &CouplingProfile,
    omega: f64,
    t: f64,
) -> Result<DensityOperator> {
    joint_state_closed_form(sys, profile.g(), omega, profile.phase(t)?, t)
}

/// Reduced system state together with the phase `F(t)` that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub state: QubitState,
    pub phase: f64,
}

/// `p(t) = p cos²F + (1-g)/2 sin²F`, `x(t) = x e^{-2iωt} cos F`.
pub fn reduced_state_at_phase(
    sys: &QubitState,
    g: f64,
    omega: f64,
    phase: f64,
    t: f64,
) -> QubitState {
    let (s, c) = phase.sin_cos();
    QubitState {
        p: sys.p * c * c + 0.5 * (1.0 - g) * s * s,
        x: sys.x * C64::from_polar(c, -2.0 * omega * t),
    }
}

pub fn reduced_state(
    sys: &QubitState,
    g: f64,
    omega: f64,
    profile: &CouplingProfile,
    t: f64,
) -> Result<ReducedState> {
    if t < 0.0 {
        return Err(Error::Domain(format!(
            "reduced state requested at negative time {t}"
        )));
    }
    let phase = profile.phase(t)?;
    Ok(ReducedState {
        state: reduced_state_at_phase(sys, g, omega, phase, t),
        phase,
    })
}

/// Time-local master equation right-hand side:
/// `-iω[σ_z, ρ] + γ_-·D[σ_-](ρ) + γ_+·D[σ_+](ρ)` with `D[A](ρ) = AρA† - ½{A†A, ρ}`.
pub fn master_equation_rhs(
    rho: &OperatorMatrix,
    omega: f64,
    rates: RatePair,
) -> Result<OperatorMatrix> {
    if rho.dim() != 2 {
        return Err(Error::InvalidArgument(
            "master equation acts on a 2x2 state".into(),
        ));
    }
    let sz = pauli::sigma_z();
    let sp = pauli::sigma_plus();
    let sm = pauli::sigma_minus();
    let dissipator = |jump: &OperatorMatrix, jump_dag: &OperatorMatrix| {
        let sandwich = &(jump * rho) * jump_dag;
        let number = jump_dag * jump;
        &sandwich - &number.anticommutator(rho).scale_real(0.5)
    };
    let unitary = sz.commutator(rho).scale(C64::new(0.0, -omega));
    let emission = dissipator(&sm, &sp).scale_real(rates.gamma_minus);
    let absorption = dissipator(&sp, &sm).scale_real(rates.gamma_plus);
    Ok(&(&unitary + &emission) + &absorption)
}

/// Dynamical map `Λ̂_t`, generator `L̂_t = Λ̂̇_t Λ̂_t⁻¹` and its reshuffle `Ω(L̂_t)`,
/// all in the row-major vectorized representation.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedRep {
    pub map_hat: OperatorMatrix,
    pub gen_hat: OperatorMatrix,
    pub omega_of_gen: OperatorMatrix,
}

fn map_hat_from(g: f64, sin2: f64, coherence: C64) -> OperatorMatrix {
    let a = 0.5 * (1.0 + g);
    let b = 0.5 * (1.0 - g);
    let mut m = OperatorMatrix::zeros(4);
    m.set(0, 0, C64::new(1.0 - a * sin2, 0.0));
    m.set(0, 3, C64::new(b * sin2, 0.0));
    m.set(3, 0, C64::new(a * sin2, 0.0));
    m.set(3, 3, C64::new(1.0 - b * sin2, 0.0));
    m.set(1, 1, coherence);
    m.set(2, 2, coherence.conj());
    m
}

/// `Λ̂_t`; defined at `t = 0` where it is the identity.
pub fn dynamical_map_hat(
    g: f64,
    omega: f64,
    profile: &CouplingProfile,
    t: f64,
) -> Result<OperatorMatrix> {
    check_g(g)?;
    let (s, c) = profile.phase_trig(t)?;
    Ok(map_hat_from(g, s * s, C64::from_polar(c, -2.0 * omega * t)))
}

/// The index involution `Ω(A)[(i,k),(j,l)] = A[(l,k),(j,i)]` with `(a,b) ↦ 2a+b`.
pub fn reshuffle(a: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.dim() != 4 {
        return Err(Error::InvalidArgument(
            "reshuffle expects a 4x4 operator".into(),
        ));
    }
    let mut out = OperatorMatrix::zeros(4);
    for i in 0..2 {
        for k in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    out.set(2 * i + k, 2 * j + l, a.get(2 * l + k, 2 * j + i));
                }
            }
        }
    }
    Ok(out)
}

pub fn vectorized_reps(
    g: f64,
    omega: f64,
    profile: &CouplingProfile,
    t: f64,
) -> Result<VectorizedRep> {
    check_g(g)?;
    let f = profile.coupling(t)?;
    let (s, c) = profile.phase_trig(t)?;
    if c.abs() < TOL.singular_cos {
        return Err(Error::SingularGenerator { t, cos_f: c.abs() });
    }
    let phase = C64::from_polar(1.0, -2.0 * omega * t);
    let map_hat = map_hat_from(g, s * s, phase * c);

    // d/dt sin²F = f sin 2F;  d/dt (e^{-2iωt} cos F) = e^{-2iωt}(-2iω cos F - f sin F)
    let a = 0.5 * (1.0 + g);
    let b = 0.5 * (1.0 - g);
    let dsin2 = 2.0 * f * s * c;
    let dcoh = phase * C64::new(-f * s, -2.0 * omega * c);
    let mut dmap = OperatorMatrix::zeros(4);
    dmap.set(0, 0, C64::new(-a * dsin2, 0.0));
    dmap.set(0, 3, C64::new(b * dsin2, 0.0));
    dmap.set(3, 0, C64::new(a * dsin2, 0.0));
    dmap.set(3, 3, C64::new(-b * dsin2, 0.0));
    dmap.set(1, 1, dcoh);
    dmap.set(2, 2, dcoh.conj());

    let inverse = map_hat
        .try_inverse()
        .ok_or(Error::SingularGenerator { t, cos_f: c.abs() })?;
    let gen_hat = &dmap * &inverse;
    let omega_of_gen = reshuffle(&gen_hat)?;
    Ok(VectorizedRep {
        map_hat,
        gen_hat,
        omega_of_gen,
    })
}

/// Spectrum of `Π Ω(L̂_t) Π` with `Π = 𝟙 - |φ₊⟩⟨φ₊|`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessResult {
    pub psd: bool,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
}

impl WitnessResult {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

pub fn bell_projector_complement() -> OperatorMatrix {
    let mut pi = OperatorMatrix::identity(4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        pi.set(i, j, pi.get(i, j) - C64::new(0.5, 0.0));
    }
    pi
}

pub fn cp_divisibility_witness(rep: &VectorizedRep) -> WitnessResult {
    let pi = bell_projector_complement();
    let projected = &(&pi * &rep.omega_of_gen) * &pi;
    // Hermitian by construction; symmetrize away rounding from the inverse.
    let eig = crate::linalg::hermitian_eig(&projected.hermitian_part())
        .expect("hermitian part is Hermitian");
    let psd = eig.values.iter().all(|&v| v >= -TOL.psd);
    WitnessResult {
        psd,
        eigenvalues: eig.values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn free_hamiltonian() {
        let h = total_hamiltonian(1.0, 0.0);
        assert!(
            h.max_abs_diff(&OperatorMatrix::from_real_diagonal(&[2.0, 0.0, 0.0, -2.0]).unwrap())
                == 0.0
        );
    }

    #[test]
    fn interaction_only_hamiltonian() {
        let h = total_hamiltonian(0.0, 1.0);
        let xx = tensor_product(&pauli::sigma_x(), &pauli::sigma_x()).unwrap();
        let yy = tensor_product(&pauli::sigma_y(), &pauli::sigma_y()).unwrap();
        assert!(h.max_abs_diff(&(&xx + &yy).scale_real(0.5)) < 1e-15);
        assert!(total_hamiltonian(0.7, -3.2).is_hermitian(1e-15));
    }

    #[test]
    fn zero_phase_is_free_evolution_of_product() {
        let sys = QubitState::new(0.4, c(0.2, 0.0)).unwrap();
        let (g, omega, t) = (0.6, 1.3, 0.7);
        let rho = joint_state_closed_form(&sys, g, omega, 0.0, t).unwrap();
        let rotated = QubitState {
            p: sys.p,
            x: sys.x * C64::from_polar(1.0, -2.0 * omega * t),
        };
        let want = product_state(&rotated, g);
        assert!(rho.matrix().max_abs_diff(want.matrix()) < 1e-15);
    }

    #[test]
    fn x_zero_block_form() {
        let sys = QubitState::diagonal(0.3).unwrap();
        let rho = joint_state_closed_form(&sys, 0.5, 1.0, FRAC_PI_2, 2.0).unwrap();
        // (1-g)/2·p, (1-g)/2 + p(g-1)/2, (1-g)/2·0 + p(g+1)/2, (1+g)/2(1-p)
        let want = [0.075, 0.25 - 0.075, 0.225, 0.525];
        for (k, w) in want.iter().enumerate() {
            assert!((rho.get(k, k).re - w).abs() < 1e-15, "diag {k}");
        }
        assert!(rho.get(1, 2).norm() < 1e-15);
        let red = crate::linalg::partial_trace_bath(&rho).unwrap();
        assert!((red.get(0, 0).re - 0.25).abs() < 1e-15);
        assert!((red.get(1, 1).re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn closed_form_is_normalized() {
        for (p, x, ph) in [
            (0.1, c(0.1, 0.2), 0.3),
            (0.9, c(-0.2, 0.1), 2.0),
            (0.5, c(0.0, 0.5), 1.1),
        ] {
            let rho = joint_state_closed_form(&QubitState::new(p, x).unwrap(), 0.7, 2.0, ph, 1.5)
                .unwrap();
            assert!((rho.matrix().trace() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_propagator() {
        let sys = QubitState::new(0.35, c(0.1, -0.3)).unwrap();
        for (g, omega, ph, t) in [
            (0.3, 0.5, 0.4, 1.0),
            (0.8, 2.0, 1.3, 3.0),
            (0.99, 1.0, 2.9, 0.2),
        ] {
            let a = joint_state_closed_form(&sys, g, omega, ph, t).unwrap();
            let b = joint_state_unitary(&sys, g, omega, ph, t).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-13);
        }
    }

    #[test]
    fn reduced_state_examples() {
        let p = CouplingProfile::markovian(0.5).unwrap();
        let sys = QubitState::new(0.3, c(0.2, 0.1)).unwrap();
        let r0 = reduced_state(&sys, 0.5, 1.0, &p, 0.0).unwrap();
        assert_eq!(r0.state, sys);
        let s = reduced_state_at_phase(
            &QubitState::diagonal(0.3).unwrap(),
            0.5,
            1.0,
            FRAC_PI_4,
            1.0,
        );
        assert!((s.p - 0.275).abs() < 1e-15);
        let late = reduced_state(&sys, 0.5, 1.0, &p, 60.0).unwrap();
        assert!((late.state.p - 0.25).abs() < 1e-12);
        assert!(late.state.x.norm() < 1e-12);
    }

    #[test]
    fn thermal_state_is_stationary() {
        for g in [0.1, 0.5, 0.9] {
            let rho = bath_state(g);
            let rates = RatePair {
                gamma_minus: (1.0 + g) / (2.0 * g),
                gamma_plus: (1.0 - g) / (2.0 * g),
            };
            assert!(
                master_equation_rhs(rho.matrix(), 1.3, rates)
                    .unwrap()
                    .max_abs()
                    < 1e-15
            );
        }
        let mixed = OperatorMatrix::identity(2).scale_real(0.5);
        let rates = RatePair::from_gamma(0.7, 0.0);
        assert!(master_equation_rhs(&mixed, 2.0, rates).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn central_difference_matches_rhs() {
        let (g, omega, t, h) = (0.5, 1.0, 1.0, 1e-5);
        let prof = CouplingProfile::markovian(g).unwrap();
        let sys = QubitState::new(0.3, c(0.2, 0.0)).unwrap();
        let at = |t| {
            reduced_state(&sys, g, omega, &prof, t)
                .unwrap()
                .state
                .to_matrix()
        };
        let fd = (&at(t + h) - &at(t - h)).scale_real(0.5 / h);
        let rhs = master_equation_rhs(&at(t), omega, prof.rate_pair(t).unwrap()).unwrap();
        assert!(fd.max_abs_diff(&rhs) < 1e-6 * rhs.max_abs());
    }

    #[test]
    fn map_hat_identity_at_zero() {
        let prof = CouplingProfile::markovian(0.4).unwrap();
        let m = dynamical_map_hat(0.4, 1.0, &prof, 0.0).unwrap();
        assert!(m.max_abs_diff(&OperatorMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn generator_matches_semigroup_form() {
        let (g, omega) = (0.8, 1.5);
        let prof = CouplingProfile::markovian(g).unwrap();
        let rep = vectorized_reps(g, omega, &prof, 0.9).unwrap();
        let gamma = 0.625;
        let l = &rep.gen_hat;
        assert!((l.get(0, 0) - c(-1.125, 0.0)).norm() < 1e-12);
        assert!((l.get(0, 3) - c(0.125, 0.0)).norm() < 1e-12);
        assert!((l.get(3, 0) - c(1.125, 0.0)).norm() < 1e-12);
        assert!((l.get(3, 3) - c(-0.125, 0.0)).norm() < 1e-12);
        assert!((l.get(1, 1) - c(-gamma, -2.0 * omega)).norm() < 1e-12);
        assert!((l.get(2, 2) - c(-gamma, 2.0 * omega)).norm() < 1e-12);
        let o = &rep.omega_of_gen;
        let want_diag = [
            -(1.0 + g) * gamma,
            (1.0 + g) * gamma,
            (1.0 - g) * gamma,
            -(1.0 - g) * gamma,
        ];
        for (k, w) in want_diag.iter().enumerate() {
            assert!((o.get(k, k) - c(*w, 0.0)).norm() < 1e-12);
        }
        assert!((o.get(0, 3) - c(-gamma, 2.0 * omega)).norm() < 1e-12);
        assert!((o.get(3, 0) - c(-gamma, -2.0 * omega)).norm() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                if i != j && !matches!((i, j), (0, 3) | (3, 0)) {
                    assert!(o.get(i, j).norm() < 1e-12, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn witness_spectrum_semigroup() {
        let prof = CouplingProfile::markovian(0.8).unwrap();
        let w = cp_divisibility_witness(&vectorized_reps(0.8, 1.0, &prof, 1.2).unwrap());
        assert!(w.psd);
        let want = [0.0, 0.0, 0.125, 1.125];
        for (v, e) in w.eigenvalues.iter().zip(want) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn witness_fails_when_rate_negative() {
        let prof = CouplingProfile::non_markovian(0.8).unwrap();
        let t = prof
            .is_markovian(2.0, 2000)
            .unwrap()
            .first_violation
            .unwrap();
        let w = cp_divisibility_witness(&vectorized_reps(0.8, 1.0, &prof, t).unwrap());
        assert!(!w.psd);
    }

    #[test]
    fn witness_of_zero_generator() {
        let zero = OperatorMatrix::zeros(4);
        let rep = VectorizedRep {
            map_hat: OperatorMatrix::identity(4),
            gen_hat: zero.clone(),
            omega_of_gen: zero,
        };
        let w = cp_divisibility_witness(&rep);
        assert!(w.psd && w.eigenvalues.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn reshuffle_is_involution() {
        let entries: Vec<C64> = (0..16).map(|k| c(k as f64, (k * k) as f64 * 0.1)).collect();
        let a = OperatorMatrix::from_rows(4, &entries).unwrap();
        assert_eq!(reshuffle(&reshuffle(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn qubit_state_validation() {
        assert!(QubitState::new(0.5, c(0.5, 0.0)).is_ok());
        assert!(QubitState::new(0.5, c(0.6, 0.0)).is_err());
        assert!(QubitState::new(1.1, ZERO).is_err());
        let t = QubitState::thermal(1.0, 1.0);
        assert!((t.p - 0.5 * (1.0 - 1.0_f64.tanh())).abs() < 1e-15);
    }

    #[test]
    fn bath_spec_g() {
        let b = BathSpec::new(2.0, 0.2).unwrap();
        assert!((b.g - 0.4_f64.tanh()).abs() < 1e-15);
        assert!(BathSpec::new(0.0, 1.0).is_err());
        assert!(BathSpec::new(1.0, -1.0).is_err());
        assert!(BathSpec::new(1.0, f64::INFINITY).is_err());
    }
}
