//! Dense complex operators on one qubit (dim 2) and two qubits (dim 4).
//!
//! Two-qubit operators use the basis `|00⟩, |01⟩, |10⟩, |11⟩` with the
//! system as the first tensor factor and the bath as the second. `|0⟩` is
//! the `σ_z = +1` eigenstate.
//!
//! Vectorization is row-major: `vec(ρ)[2i + j] = ρ(i, j)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::TOL;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// A square complex matrix of dimension 2 or 4.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix(DMatrix<C64>);

impl OperatorMatrix {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() || !matches!(m.nrows(), 2 | 4) {
            return Err(Error::InvalidArgument(format!(
                "operator must be 2x2 or 4x4, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(matches!(dim, 2 | 4), "operator dim must be 2 or 4");
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(matches!(dim, 2 | 4), "operator dim must be 2 or 4");
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&v| C64::new(v, 0.0)));
        Self::from_matrix(DMatrix::from_diagonal(&d))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// Entrywise Hermiticity test, with the tolerance scaled by the matrix
    /// magnitude when that exceeds one.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        let n = self.dim();
        (0..n)
            .all(|i| (i..n).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol * scale))
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 + &other.0 * &self.0)
    }

    /// `Tr[A B]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let n = self.dim();
        assert_eq!(n, other.dim(), "dimension mismatch");
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    pub fn try_inverse(&self) -> Option<Self> {
        self.0.clone().try_inverse().map(Self)
    }

    /// Row-major vectorization.
    pub fn vectorize(&self) -> DVector<C64> {
        let n = self.dim();
        DVector::from_iterator(
            n * n,
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| self.0[(i, j)]),
        )
    }

    pub fn unvectorize(v: &DVector<C64>) -> Result<Self> {
        let dim = match v.len() {
            4 => 2,
            16 => 4,
            n => {
                return Err(Error::InvalidArgument(format!(
                    "cannot unvectorize length {n}"
                )))
            }
        };
        Self::from_rows(dim, v.as_slice())
    }

    /// Applies this 4×4 operator, read as a superoperator in the row-major
    /// vectorized representation, to a 2×2 operator.
    pub fn apply_superoperator(&self, rho: &Self) -> Result<Self> {
        if self.dim() != 4 || rho.dim() != 2 {
            return Err(Error::InvalidArgument(
                "superoperator must be 4x4 acting on a 2x2 operator".into(),
            ));
        }
        Self::unvectorize(&(&self.0 * rho.vectorize()))
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorMatrix {}x{} [", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            write!(f, "  ")?;
            for j in 0..self.dim() {
                let z = self.0[(i, j)];
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix(-&self.0)
    }
}

/// Single-qubit operators.
pub mod pauli {
    use super::{OperatorMatrix, C64, I, ONE, ZERO};

    fn m2(a: C64, b: C64, c: C64, d: C64) -> OperatorMatrix {
        OperatorMatrix::from_rows(2, &[a, b, c, d]).expect("2x2")
    }

    pub fn identity() -> OperatorMatrix {
        OperatorMatrix::identity(2)
    }

    pub fn sigma_x() -> OperatorMatrix {
        m2(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> OperatorMatrix {
        m2(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> OperatorMatrix {
        m2(ONE, ZERO, ZERO, -ONE)
    }

    /// `|0⟩⟨1|`, raising towards the `σ_z = +1` level.
    pub fn sigma_plus() -> OperatorMatrix {
        m2(ZERO, ONE, ZERO, ZERO)
    }

    /// `|1⟩⟨0|`.
    pub fn sigma_minus() -> OperatorMatrix {
        m2(ZERO, ZERO, ONE, ZERO)
    }
}

/// Kronecker product of two 2×2 operators: entry `(2i+k, 2j+l) = a(i,j)·b(k,l)`.
pub fn tensor_product(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "tensor_product expects two 2x2 operators, got {}x{} and {}x{}",
            a.dim(),
            a.dim(),
            b.dim(),
            b.dim()
        )));
    }
    let mut out = DMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a.get(i, j) * b.get(k, l);
                }
            }
        }
    }
    Ok(OperatorMatrix(out))
}

/// A validated density operator: unit trace, Hermitian, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: OperatorMatrix,
}

impl DensityOperator {
    pub fn new(matrix: OperatorMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, TOL.trace, TOL.hermitian, TOL.psd)
    }

    pub fn with_tolerance(
        matrix: OperatorMatrix,
        trace_tol: f64,
        herm_tol: f64,
        psd_tol: f64,
    ) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - ONE).norm() > trace_tol {
            return Err(Error::InvalidArgument(format!("trace {tr} differs from 1")));
        }
        if !matrix.is_hermitian(herm_tol) {
            return Err(Error::InvalidArgument(
                "density operator is not Hermitian".into(),
            ));
        }
        let eig = hermitian_eig_unchecked(&matrix);
        if let Some(&min) = eig.values.first() {
            if min < -psd_tol {
                return Err(Error::InvalidArgument(format!(
                    "density operator has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_trusted(matrix: OperatorMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(OperatorMatrix::from_real_diagonal(populations)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(OperatorMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> OperatorMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig_unchecked(&self.matrix).values
    }

    /// `Tr[A ρ]`, real part.
    pub fn expectation(&self, observable: &OperatorMatrix) -> f64 {
        observable.trace_product(&self.matrix).re
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(Self::from_trusted(tensor_product(
            &self.matrix,
            &other.matrix,
        )?))
    }
}

fn require_two_qubit(rho: &DensityOperator) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::InvalidArgument(format!(
            "partial trace expects a 4x4 state, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    Ok(())
}

/// Traces out the bath (second factor): `(Tr_B ρ)(i,j) = Σ_k ρ(2i+k, 2j+k)`.
pub fn partial_trace_bath(rho: &DensityOperator) -> Result<DensityOperator> {
    require_two_qubit(rho)?;
    let mut out = OperatorMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out.set(i, j, (0..2).map(|k| rho.get(2 * i + k, 2 * j + k)).sum());
        }
    }
    Ok(DensityOperator::from_trusted(out))
}

/// Traces out the system (first factor): `(Tr_S ρ)(k,l) = Σ_i ρ(2i+k, 2i+l)`.
pub fn partial_trace_system(rho: &DensityOperator) -> Result<DensityOperator> {
    require_two_qubit(rho)?;
    let mut out = OperatorMatrix::zeros(2);
    for k in 0..2 {
        for l in 0..2 {
            out.set(k, l, (0..2).map(|i| rho.get(2 * i + k, 2 * i + l)).sum());
        }
    }
    Ok(DensityOperator::from_trusted(out))
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: OperatorMatrix,
}

impl HermitianEig {
    /// `V f(D) V†` for a complex-valued spectral function.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> OperatorMatrix {
        let v = self.vectors.as_matrix();
        let n = self.values.len();
        let mut scaled = v.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for r in 0..n {
                scaled[(r, k)] *= w;
            }
        }
        OperatorMatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> OperatorMatrix {
        self.map_spectrum(|l| C64::new(l, 0.0))
    }
}

fn hermitian_eig_unchecked(a: &OperatorMatrix) -> HermitianEig {
    let sym = a.hermitian_part().into_matrix();
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(src));
    }
    HermitianEig {
        values,
        vectors: OperatorMatrix(vectors),
    }
}

/// Eigenvalues ascending, eigenvectors unitary.
pub fn hermitian_eig(a: &OperatorMatrix) -> Result<HermitianEig> {
    if !a.is_hermitian(TOL.hermitian) {
        return Err(Error::InvalidArgument(
            "hermitian_eig: input is not Hermitian".into(),
        ));
    }
    Ok(hermitian_eig_unchecked(a))
}

/// `exp(-i·s·h)` for Hermitian `h`.
pub fn matrix_exp_skewhermitian(h: &OperatorMatrix, s: f64) -> Result<OperatorMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.map_spectrum(|lambda| C64::from_polar(1.0, -s * lambda)))
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        let id4 = tensor_product(&identity(), &identity()).unwrap();
        assert_eq!(id4, OperatorMatrix::identity(4));
    }

    #[test]
    fn total_sigma_z_is_diagonal() {
        let zz = &tensor_product(&sigma_z(), &identity()).unwrap()
            + &tensor_product(&identity(), &sigma_z()).unwrap();
        let expected = OperatorMatrix::from_real_diagonal(&[2.0, 0.0, 0.0, -2.0]).unwrap();
        assert!(zz.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn exchange_coupling_matrix() {
        let xx = tensor_product(&sigma_x(), &sigma_x()).unwrap();
        let yy = tensor_product(&sigma_y(), &sigma_y()).unwrap();
        let h = (&xx + &yy).scale_real(0.5);
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (1, 2) || (i, j) == (2, 1) {
                    1.0
                } else {
                    0.0
                };
                assert!((h.get(i, j) - c(want, 0.0)).norm() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn tensor_rejects_wrong_dims() {
        let id4 = OperatorMatrix::identity(4);
        assert!(matches!(
            tensor_product(&id4, &identity()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn from_matrix_rejects_dim3() {
        assert!(OperatorMatrix::from_matrix(DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn partial_trace_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [s, 0.0, 0.0, s];
        let mut m = OperatorMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                m.set(i, j, c(v[i] * v[j], 0.0));
            }
        }
        let rho = DensityOperator::new(m).unwrap();
        let red = partial_trace_bath(&rho).unwrap();
        assert!(red.matrix().max_abs_diff(&identity().scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = DensityOperator::new(
            OperatorMatrix::from_rows(2, &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.7, 0.0)])
                .unwrap(),
        )
        .unwrap();
        let b = DensityOperator::from_diagonal(&[0.1, 0.9]).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert!(
            partial_trace_bath(&ab)
                .unwrap()
                .matrix()
                .max_abs_diff(a.matrix())
                < 1e-15
        );
        assert!(
            partial_trace_system(&ab)
                .unwrap()
                .matrix()
                .max_abs_diff(b.matrix())
                < 1e-15
        );
    }

    #[test]
    fn eig_of_paulis() {
        for op in [sigma_z(), sigma_x(), sigma_y()] {
            let e = hermitian_eig(&op).unwrap();
            assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
            assert!(e.reconstruct().max_abs_diff(&op) < 1e-12);
        }
    }

    #[test]
    fn eig_of_diagonal_sorted() {
        let d = OperatorMatrix::from_real_diagonal(&[0.0, 1.125, 0.125, 0.0]).unwrap();
        let e = hermitian_eig(&d).unwrap();
        let want = [0.0, 0.0, 0.125, 1.125];
        for (g, w) in e.values.iter().zip(want) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        assert!(hermitian_eig(&sigma_plus()).is_err());
    }

    #[test]
    fn exp_zero_and_pi() {
        let u0 = matrix_exp_skewhermitian(&sigma_z(), 0.0).unwrap();
        assert!(u0.max_abs_diff(&identity()) < 1e-15);
        let u = matrix_exp_skewhermitian(&sigma_z(), std::f64::consts::PI).unwrap();
        assert!(u.max_abs_diff(&identity().scale_real(-1.0)) < 1e-14);
    }

    #[test]
    fn exp_rejects_non_hermitian() {
        assert!(matrix_exp_skewhermitian(&sigma_minus(), 1.0).is_err());
    }

    #[test]
    fn density_operator_validation() {
        assert!(DensityOperator::from_diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityOperator::from_diagonal(&[1.2, -0.2]).is_err());
        assert!(DensityOperator::new(sigma_plus()).is_err());
        assert!(DensityOperator::from_diagonal(&[0.25, 0.75]).is_ok());
    }

    #[test]
    fn vectorize_is_row_major() {
        let m = OperatorMatrix::from_rows(2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)])
            .unwrap();
        let v = m.vectorize();
        assert_eq!(v[1], c(2.0, 0.0));
        assert_eq!(v[2], c(3.0, 0.0));
        assert_eq!(OperatorMatrix::unvectorize(&v).unwrap(), m);
    }
}
