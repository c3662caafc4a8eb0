//! Spin-j states: density matrices and pure amplitude vectors in the
//! |j,m⟩ basis ordered m = j, j-1, ..., -j.

use crate::error::{Error, Result};
use crate::half::SpinQuantumNumber;
use crate::{real, Scalar, DEFAULT_TOL};
use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Density matrix of a spin-j system.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState<T: Scalar> {
    j: SpinQuantumNumber,
    matrix: DMatrix<Complex<T>>,
}

/// Pure state of a spin-j system.
#[derive(Clone, Debug, PartialEq)]
pub struct PureSpinState<T: Scalar> {
    j: SpinQuantumNumber,
    amplitudes: DVector<Complex<T>>,
}

impl<T: Scalar> SpinState<T> {
    /// Validate and wrap a density matrix: Hermitian, unit trace, and
    /// positive semidefinite within `tol`.
    pub fn new(j: SpinQuantumNumber, matrix: DMatrix<Complex<T>>, tol: T) -> Result<Self> {
        if matrix.nrows() != j.dim() || matrix.ncols() != j.dim() {
            return Err(Error::Dimension(format!(
                "expected {0}x{0} matrix for 2j = {1}, got {2}x{3}",
                j.dim(),
                j.two_j(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm_dev = (&matrix - matrix.adjoint()).norm();
        if herm_dev > tol {
            return Err(Error::Validation(format!(
                "matrix is not Hermitian (deviation {:e})",
                crate::to_f64(herm_dev)
            )));
        }
        let trace_dev = (matrix.trace() - Complex::from(T::one())).modulus();
        if trace_dev > tol {
            return Err(Error::Validation(format!(
                "trace differs from 1 by {:e}",
                crate::to_f64(trace_dev)
            )));
        }
        let state = Self { j, matrix };
        let min_eig = state.min_eigenvalue();
        if min_eig < -tol {
            return Err(Error::Validation(format!(
                "matrix is not positive semidefinite (min eigenvalue {:e})",
                crate::to_f64(min_eig)
            )));
        }
        Ok(state)
    }

    /// Wrap a matrix without validation (trusted construction paths).
    pub fn from_matrix_unchecked(j: SpinQuantumNumber, matrix: DMatrix<Complex<T>>) -> Self {
        Self { j, matrix }
    }

    /// Maximally mixed state 1/(2j+1).
    pub fn maximally_mixed(j: SpinQuantumNumber) -> Self {
        let d = j.dim();
        let w = Complex::from(T::one() / real::<T>(d as f64));
        Self { j, matrix: DMatrix::from_diagonal_element(d, d, w) }
    }

    pub fn j(&self) -> SpinQuantumNumber {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    pub fn purity(&self) -> T {
        let m = &self.matrix;
        // Tr ρ² = Σ |ρ_ab|² for Hermitian ρ.
        m.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    /// Eigenvalues in descending order (real, since ρ is Hermitian).
    pub fn eigenvalues(&self) -> Vec<T> {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        vals
    }

    pub fn min_eigenvalue(&self) -> T {
        *self
            .eigenvalues()
            .last()
            .expect("nonempty spectrum")
    }

    /// Spectral decomposition restricted to eigenvalues above `rank_tol`:
    /// returns (weights descending, matrix of eigenvector columns).
    pub fn support_decomposition(&self, rank_tol: T) -> (Vec<T>, DMatrix<Complex<T>>) {
        let eig = self.matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let kept: Vec<usize> = order
            .into_iter()
            .filter(|&k| eig.eigenvalues[k] > rank_tol)
            .collect();
        let weights: Vec<T> = kept.iter().map(|&k| eig.eigenvalues[k]).collect();
        let d = self.dim();
        let mut vecs = DMatrix::zeros(d, kept.len());
        for (col, &k) in kept.iter().enumerate() {
            vecs.set_column(col, &eig.eigenvectors.column(k));
        }
        (weights, vecs)
    }

    /// Numerical rank at tolerance `rank_tol`.
    pub fn rank(&self, rank_tol: T) -> usize {
        self.eigenvalues().iter().filter(|&&v| v > rank_tol).count()
    }

    /// Replace the matrix by its Hermitian part (guards eigensolvers after
    /// floating-point assembly).
    pub fn hermitize(&mut self) {
        let h = (&self.matrix + self.matrix.adjoint()).scale(real::<T>(0.5));
        self.matrix = h;
    }

    /// Convex mixture Σ pᵢ ρᵢ.
    pub fn mixture(parts: &[(T, SpinState<T>)]) -> Result<Self> {
        let j = parts
            .first()
            .ok_or_else(|| Error::Domain("empty mixture".into()))?
            .1
            .j;
        let mut acc = DMatrix::zeros(j.dim(), j.dim());
        for (p, state) in parts {
            if state.j != j {
                return Err(Error::Dimension("mixture of different spins".into()));
            }
            acc += state.matrix.scale(*p);
        }
        Ok(Self { j, matrix: acc })
    }

    /// Validation report used by the file parsers and the `validate` command.
    pub fn check_report(&self) -> StateReport<T> {
        let herm_dev = (&self.matrix - self.matrix.adjoint()).norm();
        let trace_dev = (self.matrix.trace() - Complex::from(T::one())).modulus();
        let min_eig = self.min_eigenvalue();
        StateReport { herm_dev, trace_dev, min_eig }
    }
}

/// Deviations of a matrix from the density-matrix constraints.
#[derive(Clone, Copy, Debug)]
pub struct StateReport<T> {
    pub herm_dev: T,
    pub trace_dev: T,
    pub min_eig: T,
}

impl<T: Scalar> StateReport<T> {
    pub fn is_valid(&self, tol: T) -> bool {
        self.herm_dev <= tol && self.trace_dev <= tol && self.min_eig >= -tol
    }
}

impl<T: Scalar> PureSpinState<T> {
    pub fn new(j: SpinQuantumNumber, amplitudes: DVector<Complex<T>>, tol: T) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes for 2j = {}, got {}",
                j.dim(),
                j.two_j(),
                amplitudes.len()
            )));
        }
        let norm_dev = (amplitudes.norm() - T::one()).abs();
        if norm_dev > tol {
            return Err(Error::Validation(format!(
                "norm differs from 1 by {:e}",
                crate::to_f64(norm_dev)
            )));
        }
        Ok(Self { j, amplitudes })
    }

    /// Normalize a raw amplitude vector.
    pub fn normalized(j: SpinQuantumNumber, amplitudes: DVector<Complex<T>>) -> Result<Self> {
        let n = amplitudes.norm();
        if n <= T::default_epsilon() {
            return Err(Error::Validation("zero amplitude vector".into()));
        }
        Ok(Self { j, amplitudes: amplitudes.unscale(n) })
    }

    /// Basis state |j, m⟩ given the doubled projection 2m.
    pub fn basis_state(j: SpinQuantumNumber, two_m: i32) -> Result<Self> {
        let idx = j.index_of_two_m(two_m)?;
        let mut amplitudes = DVector::zeros(j.dim());
        amplitudes[idx] = Complex::from(T::one());
        Ok(Self { j, amplitudes })
    }

    pub fn j(&self) -> SpinQuantumNumber {
        self.j
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amplitudes
    }

    /// Projector |ψ⟩⟨ψ| as a density matrix.
    pub fn projector(&self) -> SpinState<T> {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        SpinState { j: self.j, matrix: m }
    }

    pub fn overlap(&self, other: &Self) -> Complex<T> {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Haar-random pure state (complex Gaussian amplitudes, normalized).
pub fn random_pure<T: Scalar, R: Rng + ?Sized>(j: SpinQuantumNumber, rng: &mut R) -> PureSpinState<T> {
    let amplitudes = DVector::from_fn(j.dim(), |_, _| random_complex_normal::<T, R>(rng));
    PureSpinState::normalized(j, amplitudes).expect("gaussian vector is nonzero")
}

/// Random density matrix of the given rank (Ginibre construction:
/// ρ = GG†/Tr(GG†) with G a (2j+1)×rank complex Gaussian matrix).
pub fn random_mixed<T: Scalar, R: Rng + ?Sized>(
    j: SpinQuantumNumber,
    rank: usize,
    rng: &mut R,
) -> SpinState<T> {
    let d = j.dim();
    let rank = rank.clamp(1, d);
    let g = DMatrix::from_fn(d, rank, |_, _| random_complex_normal::<T, R>(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    SpinState { j, matrix: m.unscale(tr) }
}

fn random_complex_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(real(re), real(im))
}

/// Random Hermitian matrix with unit trace (not necessarily PSD); used by
/// reconstruction property tests.
pub fn random_hermitian_unit_trace<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> DMatrix<Complex<T>> {
    let g = DMatrix::from_fn(dim, dim, |_, _| random_complex_normal::<T, R>(rng));
    let mut h = (&g + g.adjoint()).scale(real::<T>(0.5));
    let shift = (Complex::from(T::one()) - h.trace()) / Complex::from(real::<T>(dim as f64));
    for k in 0..dim {
        h[(k, k)] += shift;
    }
    h
}

/// Default tolerance as the scalar type.
pub fn default_tol<T: Scalar>() -> T {
    real(DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mms_is_valid_and_minimally_pure() {
        let j = SpinQuantumNumber::from_two_j(4);
        let mms = SpinState::<f64>::maximally_mixed(j);
        assert!(mms.check_report().is_valid(1e-12));
        assert_abs_diff_eq!(mms.purity(), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_matrices() {
        let j = SpinQuantumNumber::from_two_j(1);
        // Non-Hermitian
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex::new(0.5, 0.0), Complex::new(0.1, 0.0),
            Complex::new(0.3, 0.0), Complex::new(0.5, 0.0),
        ]);
        assert!(matches!(SpinState::new(j, m, 1e-8), Err(Error::Validation(_))));
        // Wrong trace
        let m = DMatrix::from_diagonal_element(2, 2, Complex::new(0.7, 0.0));
        assert!(SpinState::new(j, m, 1e-8).is_err());
        // Not PSD
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex::new(1.2, 0.0), Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0), Complex::new(-0.2, 0.0),
        ]);
        assert!(SpinState::new(j, m, 1e-8).is_err());
        // Wrong dimension
        let m = DMatrix::from_diagonal_element(3, 3, Complex::new(1.0 / 3.0, 0.0));
        assert!(matches!(SpinState::new(j, m, 1e-8), Err(Error::Dimension(_))));
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let j = SpinQuantumNumber::from_two_j(5);
        for rank in 1..=6 {
            let rho = random_mixed::<f64, _>(j, rank, &mut rng);
            assert!(rho.check_report().is_valid(1e-10));
            assert_eq!(rho.rank(1e-10), rank);
        }
        let psi = random_pure::<f64, _>(j, &mut rng);
        assert_abs_diff_eq!(psi.amplitudes().norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(psi.projector().purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn support_decomposition_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let j = SpinQuantumNumber::from_two_j(4);
        let rho = random_mixed::<f64, _>(j, 3, &mut rng);
        let (w, v) = rho.support_decomposition(1e-12);
        assert_eq!(w.len(), 3);
        let mut acc = DMatrix::zeros(5, 5);
        for (k, &wk) in w.iter().enumerate() {
            let col = v.column(k);
            acc += (col * col.adjoint()).scale(wk);
        }
        assert!((acc - rho.matrix()).norm() < 1e-10);
    }

    #[test]
    fn f32_smoke() {
        let j = SpinQuantumNumber::from_two_j(2);
        let mms = SpinState::<f32>::maximally_mixed(j);
        assert!((mms.purity() - 1.0 / 3.0).abs() < 1e-6);
    }
}
