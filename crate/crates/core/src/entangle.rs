//! Schmidt decompositions and negativity across the t | N-t split of the
//! symmetric qubit embedding.

use crate::error::{Error, Result};
use crate::reduce::{embed_bipartite, embed_pure, partial_transpose};
use crate::spin::{PureSpinState, SpinState};
use crate::{real, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex;

/// Nonincreasing Schmidt coefficients α_i with Σ α_i² = 1.
#[derive(Clone, Debug)]
pub struct SchmidtSpectrum<T> {
    pub coefficients: Vec<T>,
}

impl<T: Scalar> SchmidtSpectrum<T> {
    /// Squared coefficients (the reduced-state spectrum).
    pub fn squared(&self) -> Vec<T> {
        self.coefficients.iter().map(|&a| a * a).collect()
    }

    /// Negativity Σ_{i<k} α_i α_k = ((Σ α)² − 1)/2.
    pub fn negativity(&self) -> T {
        let s: T = self.coefficients.iter().fold(T::zero(), |a, &b| a + b);
        (s * s - T::one()) / real::<T>(2.0)
    }

    /// Majorization check: does `self.squared()` majorize-precede `other`
    /// (all partial sums of the descending spectra ≤)?
    pub fn majorized_by(&self, other: &Self) -> bool {
        let a = self.squared();
        let b = other.squared();
        let n = a.len().max(b.len());
        let mut pa = T::zero();
        let mut pb = T::zero();
        let tol = real::<T>(1e-10);
        for k in 0..n {
            pa += a.get(k).copied().unwrap_or_else(T::zero);
            pb += b.get(k).copied().unwrap_or_else(T::zero);
            if pa > pb + tol {
                return false;
            }
        }
        true
    }
}

fn check_split(n: u32, t: u32) -> Result<()> {
    if t < 1 || t >= n {
        return Err(Error::Domain(format!(
            "bipartition needs 1 ≤ t ≤ N-1, got t = {t} (N = {n})"
        )));
    }
    Ok(())
}

/// Schmidt spectrum of a pure state across t | N-t.
pub fn schmidt<T: Scalar>(psi: &PureSpinState<T>, t: u32) -> Result<SchmidtSpectrum<T>> {
    let n = psi.j().two_j();
    check_split(n, t)?;
    let v = embed_pure(psi, t)?;
    let (da, db) = (t as usize + 1, (n - t) as usize + 1);
    let mut m = DMatrix::<Complex<T>>::zeros(da, db);
    for a in 0..da {
        for b in 0..db {
            m[(a, b)] = v[a * db + b];
        }
    }
    let svd = m.svd(false, false);
    let mut coefficients: Vec<T> = svd.singular_values.iter().copied().collect();
    coefficients.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(SchmidtSpectrum { coefficients })
}

/// Negativity of a pure state from its Schmidt coefficients.
pub fn negativity_pure<T: Scalar>(psi: &PureSpinState<T>, t: u32) -> Result<T> {
    Ok(schmidt(psi, t)?.negativity())
}

/// Negativity of a mixed state, (‖ρ^{T_A}‖₁ − 1)/2 on the embedded state.
pub fn negativity_mixed<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<T> {
    let n = rho.j().two_j();
    check_split(n, t)?;
    let x = embed_bipartite(rho, t)?;
    let dims = (t as usize + 1, (n - t) as usize + 1);
    negativity_of_bipartite(&x, dims)
}

/// Negativity of an explicit bipartite density matrix.
pub fn negativity_of_bipartite<T: Scalar>(
    x: &DMatrix<Complex<T>>,
    dims: (usize, usize),
) -> Result<T> {
    let pt = partial_transpose(x, dims)?;
    // PT preserves Hermiticity, so the trace norm is the absolute eigenvalue sum.
    let eig = pt.symmetric_eigen();
    let norm1: T = eig.eigenvalues.iter().map(|v| v.abs()).fold(T::zero(), |a, b| a + b);
    Ok((norm1 - T::one()) / real::<T>(2.0))
}

/// Both sides of the pure-state fidelity-negativity identity
/// F(ρ_t, 1/(t+1)) = (1 + 2 N_t)/(t+1); they agree to machine precision.
pub fn fidelity_negativity_check<T: Scalar>(psi: &PureSpinState<T>, t: u32) -> Result<(T, T)> {
    let spectrum = schmidt(psi, t)?;
    // F(ρ_t, MMS) = (Tr √ρ_t)²/(t+1) with √eigenvalues = Schmidt coefficients.
    let s: T = spectrum.coefficients.iter().fold(T::zero(), |a, &b| a + b);
    let d = real::<T>(t as f64 + 1.0);
    let lhs = s * s / d;
    let rhs = (T::one() + real::<T>(2.0) * spectrum.negativity()) / d;
    Ok((lhs, rhs))
}

/// Do the partial-transpose images of two projectors have orthogonal
/// supports? Tested as ‖X^{T_A} Y^{T_A}‖_F < tol.
pub fn pt_images_orthogonal<T: Scalar>(
    x: &DMatrix<Complex<T>>,
    y: &DMatrix<Complex<T>>,
    dims: (usize, usize),
    tol: T,
) -> Result<bool> {
    let xp = partial_transpose(x, dims)?;
    let yp = partial_transpose(y, dims)?;
    Ok((xp * yp).norm() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::half::SpinQuantumNumber;
    use crate::rotation::{coherent_state, random_euler, rotate, rotate_pure};
    use crate::spin::random_pure;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coherent_states_are_unentangled() {
        let j = SpinQuantumNumber::from_two_j(6);
        let psi = coherent_state::<f64>(j, 0.7, 1.9);
        for t in 1..6u32 {
            let s = schmidt(&psi, t).unwrap();
            assert_abs_diff_eq!(s.coefficients[0], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(negativity_pure(&psi, t).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn schmidt_squares_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let j = SpinQuantumNumber::from_two_j(5);
        for _ in 0..10 {
            let psi = random_pure::<f64, _>(j, &mut rng);
            for t in 1..5u32 {
                let s = schmidt(&psi, t).unwrap();
                let total: f64 = s.squared().iter().sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-11);
                assert!(s.coefficients.len() <= (t as usize + 1).min((5 - t) as usize + 1));
            }
        }
    }

    #[test]
    fn schmidt_negativity_matches_partial_transpose_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for two_j in [2u32, 4, 6] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            for _ in 0..6 {
                let psi = random_pure::<f64, _>(j, &mut rng);
                for t in 1..two_j {
                    let via_schmidt = negativity_pure(&psi, t).unwrap();
                    let via_pt = negativity_mixed(&psi.projector(), t).unwrap();
                    assert_abs_diff_eq!(via_schmidt, via_pt, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn negativity_is_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let j = SpinQuantumNumber::from_two_j(4);
        for _ in 0..5 {
            let psi = random_pure::<f64, _>(j, &mut rng);
            let angles = random_euler::<f64, _>(&mut rng);
            let rotated = rotate_pure(&psi, angles);
            for t in 1..4u32 {
                assert_abs_diff_eq!(
                    negativity_pure(&psi, t).unwrap(),
                    negativity_pure(&rotated, t).unwrap(),
                    epsilon = 1e-10
                );
            }
            let rho = crate::spin::random_mixed::<f64, _>(j, 2, &mut rng);
            let rho_rot = rotate(&rho, angles);
            for t in 1..4u32 {
                assert_abs_diff_eq!(
                    negativity_mixed(&rho, t).unwrap(),
                    negativity_mixed(&rho_rot, t).unwrap(),
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn mms_is_ppt() {
        let j = SpinQuantumNumber::from_two_j(5);
        let mms = SpinState::<f64>::maximally_mixed(j);
        for t in 1..5u32 {
            assert_abs_diff_eq!(negativity_mixed(&mms, t).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn separable_coherent_mixtures_are_ppt() {
        let j = SpinQuantumNumber::from_two_j(4);
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        use rand::Rng;
        let mut parts = Vec::new();
        for _ in 0..6 {
            let th = rng.gen::<f64>() * 3.0;
            let ph = rng.gen::<f64>() * 6.0;
            parts.push((1.0 / 6.0, coherent_state::<f64>(j, th, ph).projector()));
        }
        let rho = SpinState::mixture(&parts).unwrap();
        for t in 1..4u32 {
            let n = negativity_mixed(&rho, t).unwrap();
            assert!(n.abs() < 1e-10, "separable state has negativity {n}");
        }
    }

    #[test]
    fn fidelity_negativity_identity_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for two_j in [2u32, 3, 5, 6] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            for _ in 0..10 {
                let psi = random_pure::<f64, _>(j, &mut rng);
                for t in 1..two_j {
                    let (lhs, rhs) = fidelity_negativity_check(&psi, t).unwrap();
                    assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn coherent_state_fidelity_identity_values() {
        let j = SpinQuantumNumber::from_two_j(6);
        let psi = coherent_state::<f64>(j, 1.3, 0.2);
        for t in 1..6u32 {
            let (lhs, rhs) = fidelity_negativity_check(&psi, t).unwrap();
            let expected = 1.0 / (t as f64 + 1.0);
            assert_abs_diff_eq!(lhs, expected, epsilon = 1e-11);
            assert_abs_diff_eq!(rhs, expected, epsilon = 1e-11);
        }
    }

    #[test]
    fn split_domain_errors() {
        let j = SpinQuantumNumber::from_two_j(4);
        let psi = coherent_state::<f64>(j, 0.1, 0.1);
        assert!(schmidt(&psi, 0).is_err());
        assert!(schmidt(&psi, 4).is_err());
        assert!(negativity_mixed(&psi.projector(), 4).is_err());
    }
}
