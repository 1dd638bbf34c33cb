//! Energy and entropy bookkeeping for a system coupled to a finite bath.
//!
//! Work is the change of the total joint energy, heat is the energy that
//! leaves the bath, and the system's internal energy includes the
//! interaction term: `E_S = Tr[(H_S⊗𝟙 + H_SB) ρ_SB]`. With these choices
//! `ΔE_S = W + Q` holds stroke by stroke. Entropies are in nats.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, partial_trace_bath, partial_trace_system, pauli, tensor_product,
    DensityOperator, OperatorMatrix, C64,
};
use crate::tolerances::TOL;

/// Energy flows of one stroke, signed positive when entering the system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyLedger {
    pub work: f64,
    pub heat: f64,
    pub internal_energy_initial: f64,
    pub internal_energy_final: f64,
    pub entropy_production: f64,
}

impl EnergyLedger {
    /// `ΔE_S - (W + Q)`.
    pub fn first_law_residual(&self) -> f64 {
        (self.internal_energy_final - self.internal_energy_initial) - (self.work + self.heat)
    }
}

/// A joint state sampled at time `t` along one contact interval.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSample {
    pub t: f64,
    pub rho: DensityOperator,
}

fn embed_system(h_s: &OperatorMatrix) -> Result<OperatorMatrix> {
    match h_s.dim() {
        2 => tensor_product(h_s, &pauli::identity()),
        4 => Ok(h_s.clone()),
        _ => unreachable!("operators are 2x2 or 4x4"),
    }
}

/// `Tr[(H_S⊗𝟙 + H_SB) ρ_SB]`. `h_s` may be given as 2×2 or already embedded.
pub fn internal_energy(
    rho_sb: &DensityOperator,
    h_s: &OperatorMatrix,
    h_sb: &OperatorMatrix,
) -> Result<f64> {
    if rho_sb.dim() != 4 || h_sb.dim() != 4 {
        return Err(Error::InvalidArgument(
            "internal energy needs a 4x4 state and interaction".into(),
        ));
    }
    let h = &embed_system(h_s)? + h_sb;
    Ok(rho_sb.expectation(&h))
}

/// `Tr[H_B ρ_B]` with `ρ_B = Tr_S ρ_SB`.
pub fn bath_energy(rho_sb: &DensityOperator, h_b: &OperatorMatrix) -> Result<f64> {
    match h_b.dim() {
        2 => Ok(partial_trace_system(rho_sb)?.expectation(h_b)),
        _ => Ok(rho_sb.expectation(h_b)),
    }
}

fn endpoints(trajectory: &[JointSample]) -> Result<(&JointSample, &JointSample)> {
    match (trajectory.first(), trajectory.last()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::InvalidArgument("empty trajectory".into())),
    }
}

/// Heat into the system over one contact: `-(Tr[H_B ρ_B(end)] - Tr[H_B ρ_B(start)])`.
pub fn heat_into_system(trajectory: &[JointSample], h_b: &OperatorMatrix) -> Result<f64> {
    let (first, last) = endpoints(trajectory)?;
    Ok(-(bath_energy(&last.rho, h_b)? - bath_energy(&first.rho, h_b)?))
}

/// Work on the joint system, `ΔTr[H_tot(t) ρ_SB(t)]`, which accumulates both
/// `Tr[dH ρ]` and `Tr[H dρ]`.
pub fn work_on_total<H>(trajectory: &[JointSample], h_tot_of_t: H) -> Result<f64>
where
    H: Fn(f64) -> Result<OperatorMatrix>,
{
    let mut total = 0.0;
    for pair in trajectory.windows(2) {
        let e1 = pair[1].rho.expectation(&h_tot_of_t(pair[1].t)?);
        let e0 = pair[0].rho.expectation(&h_tot_of_t(pair[0].t)?);
        total += e1 - e0;
    }
    Ok(total)
}

/// Instantaneous heat current `Tr[(H_S⊗𝟙 + H_SB) dρ/dt]` with `dρ/dt = -i[H_tot, ρ]`.
pub fn heat_current(
    rho_sb: &DensityOperator,
    h_s: &OperatorMatrix,
    h_sb: &OperatorMatrix,
    h_tot: &OperatorMatrix,
) -> Result<f64> {
    let h = &embed_system(h_s)? + h_sb;
    let drho = h_tot.commutator(rho_sb.matrix()).scale(C64::new(0.0, -1.0));
    Ok(h.trace_product(&drho).re)
}

/// Composite Simpson rule on an arbitrary ascending grid with an odd number
/// of points.
pub fn simpson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 3 || xs.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "simpson needs an odd number (>= 3) of paired samples".into(),
        ));
    }
    let mut total = 0.0;
    for k in (0..xs.len() - 2).step_by(2) {
        let (h0, h1) = (xs[k + 1] - xs[k], xs[k + 2] - xs[k + 1]);
        let sum = h0 + h1;
        total += sum / 6.0
            * (ys[k] * (2.0 - h1 / h0)
                + ys[k + 1] * sum * sum / (h0 * h1)
                + ys[k + 2] * (2.0 - h0 / h1));
    }
    Ok(total)
}

/// `∫ Tr[(H_S + H_SB(t)) dρ_SB]` along a sampled trajectory.
pub fn heat_into_system_integral<S, T>(
    trajectory: &[JointSample],
    h_s: &OperatorMatrix,
    h_sb_of_t: S,
    h_tot_of_t: T,
) -> Result<f64>
where
    S: Fn(f64) -> Result<OperatorMatrix>,
    T: Fn(f64) -> Result<OperatorMatrix>,
{
    let xs: Vec<f64> = trajectory.iter().map(|s| s.t).collect();
    let ys = trajectory
        .iter()
        .map(|s| heat_current(&s.rho, h_s, &h_sb_of_t(s.t)?, &h_tot_of_t(s.t)?))
        .collect::<Result<Vec<_>>>()?;
    simpson(&xs, &ys)
}

/// Whether `connect_disconnect_work` switches the interaction on or off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingSwitch {
    Connect,
    Disconnect,
}

/// Work for an instantaneous switch of `H_SB` at fixed state: `±Tr[H_SB ρ]`.
pub fn connect_disconnect_work(
    h_sb_at_boundary: &OperatorMatrix,
    rho: &DensityOperator,
    switch: CouplingSwitch,
) -> f64 {
    let e = rho.expectation(h_sb_at_boundary);
    match switch {
        CouplingSwitch::Connect => e,
        CouplingSwitch::Disconnect => -e,
    }
}

fn xlogx(v: f64) -> f64 {
    if v <= TOL.zero_eigenvalue {
        0.0
    } else {
        v * v.ln()
    }
}

/// `-Tr[ρ ln ρ]`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    -rho.eigenvalues().into_iter().map(xlogx).sum::<f64>()
}

/// `Tr[ρ ln ρ] - Tr[ρ ln σ]`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::InvalidArgument(
            "relative entropy of operators with different dimensions".into(),
        ));
    }
    let er = hermitian_eig(rho.matrix())?;
    let es = hermitian_eig(sigma.matrix())?;
    let vr = er.vectors.as_matrix();
    let vs = es.vectors.as_matrix();
    let n = rho.dim();
    let mut cross = 0.0;
    for (i, &r) in er.values.iter().enumerate() {
        if r <= TOL.zero_eigenvalue {
            continue;
        }
        for (j, &s) in es.values.iter().enumerate() {
            let overlap: C64 = (0..n).map(|k| vr[(k, i)].conj() * vs[(k, j)]).sum();
            let w = r * overlap.norm_sqr();
            if s <= TOL.zero_eigenvalue {
                if w > TOL.zero_eigenvalue {
                    return Err(Error::InfiniteRelativeEntropy);
                }
                continue;
            }
            cross += w * s.ln();
        }
    }
    let own: f64 = er.values.iter().map(|&v| xlogx(v)).sum();
    Ok(own - cross)
}

/// `e^{-βH}/Z`.
pub fn gibbs_state(h: &OperatorMatrix, beta: f64) -> Result<DensityOperator> {
    let eig = hermitian_eig(h)?;
    let e_min = eig.values[0];
    let z: f64 = eig
        .values
        .iter()
        .map(|&e| (-beta * (e - e_min)).exp())
        .sum();
    let rho = eig.map_spectrum(|e| C64::new((-beta * (e - e_min)).exp() / z, 0.0));
    Ok(DensityOperator::from_trusted(rho.hermitian_part()))
}

/// `S(ρ_SB ∥ ρ_S ⊗ ρ_B^β)` with `ρ_B^β` the Gibbs state of the 2×2 `h_b`.
pub fn entropy_production(
    rho_sb: &DensityOperator,
    beta: f64,
    h_b: &OperatorMatrix,
) -> Result<f64> {
    if h_b.dim() != 2 {
        return Err(Error::InvalidArgument(
            "entropy production expects a 2x2 bath Hamiltonian".into(),
        ));
    }
    let rho_s = partial_trace_bath(rho_sb)?;
    let reference = rho_s.tensor(&gibbs_state(h_b, beta)?)?;
    relative_entropy(rho_sb, &reference)
}

/// `ΔS_S - βQ` between two joint states of one contact, `Q` from the bath energy.
pub fn entropy_production_clausius(
    rho_initial: &DensityOperator,
    rho_final: &DensityOperator,
    beta: f64,
    h_b: &OperatorMatrix,
) -> Result<f64> {
    let ds = von_neumann_entropy(&partial_trace_bath(rho_final)?)
        - von_neumann_entropy(&partial_trace_bath(rho_initial)?);
    let q = -(bath_energy(rho_final, h_b)? - bath_energy(rho_initial, h_b)?);
    Ok(ds - beta * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{
        bath_hamiltonian_embedded, interaction_hamiltonian, joint_state_closed_form, product_state,
        total_hamiltonian, QubitState,
    };
    use crate::linalg::pauli::sigma_z;

    #[test]
    fn internal_energy_product_state() {
        let sys = QubitState::thermal(1.5, 0.7);
        let rho = product_state(&sys, 0.3);
        let h_s = sigma_z().scale_real(1.5);
        let e = internal_energy(&rho, &h_s, &interaction_hamiltonian(0.0)).unwrap();
        assert!((e - sys.to_density().expectation(&h_s)).abs() < 1e-15);
    }

    #[test]
    fn internal_energy_of_maximally_mixed() {
        let rho = DensityOperator::maximally_mixed(4);
        let e = internal_energy(
            &rho,
            &sigma_z().scale_real(2.0),
            &interaction_hamiltonian(3.0),
        )
        .unwrap();
        assert!(e.abs() < 1e-15);
    }

    #[test]
    fn internal_energy_after_full_exchange() {
        let (beta_c, omega_c, beta_h, omega_h) = (1.0_f64, 1.0_f64, 0.2_f64, 2.0_f64);
        let (g_c, g_h) = ((beta_c * omega_c).tanh(), (beta_h * omega_h).tanh());
        let sys = QubitState::diagonal(0.5 * (1.0 - g_c)).unwrap();
        let rho =
            joint_state_closed_form(&sys, g_h, omega_h, std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        let e = internal_energy(
            &rho,
            &sigma_z().scale_real(omega_h),
            &interaction_hamiltonian(0.0),
        )
        .unwrap();
        assert!((e + omega_h * g_h).abs() < 1e-14);
    }

    #[test]
    fn static_trajectory_has_no_heat_or_work() {
        let rho = product_state(&QubitState::diagonal(0.3).unwrap(), 0.5);
        let traj = vec![
            JointSample {
                t: 0.1,
                rho: rho.clone(),
            },
            JointSample { t: 0.9, rho },
        ];
        assert_eq!(heat_into_system(&traj, &sigma_z()).unwrap(), 0.0);
        assert_eq!(
            work_on_total(&traj, |_| Ok(total_hamiltonian(1.0, 0.4))).unwrap(),
            0.0
        );
    }

    #[test]
    fn coupling_work_sanity() {
        let h_sb = interaction_hamiltonian(0.8);
        let rho = product_state(&QubitState::thermal(1.0, 1.0), 0.5);
        assert_eq!(
            connect_disconnect_work(&h_sb, &rho, CouplingSwitch::Connect),
            0.0
        );

        // Mix in |01⟩⟨10| + h.c. so the exchange expectation is nonzero.
        let mut m = OperatorMatrix::identity(4).scale_real(0.25);
        m.set(1, 2, C64::new(0.1, 0.0));
        m.set(2, 1, C64::new(0.1, 0.0));
        let rho = DensityOperator::new(m).unwrap();
        assert!(
            (connect_disconnect_work(&h_sb, &rho, CouplingSwitch::Connect) - 0.16).abs() < 1e-15
        );
        assert!(
            (connect_disconnect_work(&h_sb, &rho, CouplingSwitch::Disconnect) + 0.16).abs() < 1e-15
        );
    }

    #[test]
    fn entropies() {
        let mixed = DensityOperator::maximally_mixed(2);
        assert!((von_neumann_entropy(&mixed) - std::f64::consts::LN_2).abs() < 1e-15);
        let rho = DensityOperator::from_diagonal(&[0.25, 0.75]).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-15);
        let want = 0.25 * (0.5_f64).ln() + 0.75 * (1.5_f64).ln();
        let got = relative_entropy(&rho, &mixed).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.130812035941).abs() < 1e-11);
    }

    #[test]
    fn pure_state_entropy_is_zero() {
        let pure = DensityOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(von_neumann_entropy(&pure), 0.0);
    }

    #[test]
    fn relative_entropy_support_violation() {
        let rho = DensityOperator::from_diagonal(&[0.5, 0.5]).unwrap();
        let sigma = DensityOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(
            relative_entropy(&rho, &sigma),
            Err(Error::InfiniteRelativeEntropy)
        );
        assert!(relative_entropy(&sigma, &rho).is_ok());
    }

    #[test]
    fn gibbs_state_of_sigma_z() {
        let rho = gibbs_state(&sigma_z().scale_real(2.0), 0.3).unwrap();
        let g = 0.6_f64.tanh();
        assert!((rho.get(0, 0).re - 0.5 * (1.0 - g)).abs() < 1e-15);
        assert!((rho.get(1, 1).re - 0.5 * (1.0 + g)).abs() < 1e-15);
    }

    #[test]
    fn entropy_production_zero_at_start_and_matches_clausius() {
        let (omega, beta): (f64, f64) = (2.0, 0.2);
        let g = (omega * beta).tanh();
        let sys = QubitState::thermal(1.0, 1.0);
        let h_b = sigma_z().scale_real(omega);
        let rho0 = product_state(&sys, g);
        assert!(entropy_production(&rho0, beta, &h_b).unwrap().abs() < 1e-14);
        let rho_t = joint_state_closed_form(&sys, g, omega, 0.9, 1.0).unwrap();
        let direct = entropy_production(&rho_t, beta, &h_b).unwrap();
        let clausius = entropy_production_clausius(&rho0, &rho_t, beta, &h_b).unwrap();
        assert!(direct > 0.0);
        assert!((direct - clausius).abs() < 1e-12);
    }

    #[test]
    fn simpson_exact_on_quadratics() {
        let xs: Vec<f64> = (0..=10).map(|k| (k as f64 / 10.0).powi(2) * 3.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x - 2.0 * x + 1.0).collect();
        let want = 27.0 - 9.0 + 3.0;
        assert!((simpson(&xs, &ys).unwrap() - want).abs() < 1e-12);
        assert!(simpson(&xs[..4], &ys[..4]).is_err());
    }

    #[test]
    fn bath_energy_embedded_and_local_agree() {
        let rho = joint_state_closed_form(
            &QubitState::new(0.4, C64::new(0.1, 0.1)).unwrap(),
            0.5,
            1.0,
            0.7,
            0.3,
        )
        .unwrap();
        let a = bath_energy(&rho, &sigma_z().scale_real(1.0)).unwrap();
        let b = bath_energy(&rho, &bath_hamiltonian_embedded(1.0)).unwrap();
        assert!((a - b).abs() < 1e-15);
    }
}
