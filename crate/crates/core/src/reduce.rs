//! Symmetric-sector partial traces and the bipartite Clebsch-Gordan
//! embedding.
//!
//! A spin-j state is identified with a permutation-symmetric state of
//! N = 2j qubits; its reduced state on t qubits is again symmetric and is
//! assembled directly in the irreducible tensor basis:
//!
//!   ρ_t = 1/(t+1) + Σ_{L=1}^{t} Σ_M c_{N,t,L} ρ_LM T_LM^{(t)},
//!   c_{N,t,L} = (t!/N!) √((N-L)!(N+L+1)!/((t-L)!(t+L+1)!)).
//!
//! The embedding W: H_j → H_{t/2} ⊗ H_{(N-t)/2} built from Clebsch-Gordan
//! coefficients realizes the t | N-t bipartition at polynomial size; the
//! exponential 2^N qubit space is never used here (see [`crate::oracle`]
//! for the brute-force cross-check).

use crate::cg::clebsch_gordan;
use crate::error::{Error, Result};
use crate::exact::{rat_to_f64, Rat};
use crate::half::SpinQuantumNumber;
use crate::spin::SpinState;
use crate::tensor::{multipoles, tensor_basis_f64};
use crate::{real, Scalar};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex;

/// The partial-trace damping coefficient c_{N,t,L}, with its exact square.
#[derive(Clone, Debug)]
pub struct ReductionCoefficient {
    pub n: u32,
    pub t: u32,
    pub rank: u32,
    /// Exact value of c².
    pub square: Rat,
    /// Floating-point value, rounded once from the exact square.
    pub value: f64,
}

/// Exact square of c_{N,t,L}.
pub fn reduction_coefficient_sq(n: u32, t: u32, rank: u32) -> Result<Rat> {
    if rank > t || t > n {
        return Err(Error::Domain(format!(
            "reduction coefficient needs L ≤ t ≤ N, got L={rank}, t={t}, N={n}"
        )));
    }
    let f = |x: u32| crate::exact::factorial(x as u64);
    // c² = (t!/N!)² (N-L)!(N+L+1)! / ((t-L)!(t+L+1)!)
    let num = f(t) * f(t) * f(n - rank) * f(n + rank + 1);
    let den = f(n) * f(n) * f(t - rank) * f(t + rank + 1);
    Ok(Rat::new(num, den))
}

/// The coefficient c_{N,t,L} ∈ (0, 1].
pub fn reduction_coefficient(n: u32, t: u32, rank: u32) -> Result<ReductionCoefficient> {
    let square = reduction_coefficient_sq(n, t, rank)?;
    let value = rat_to_f64(&square).sqrt();
    Ok(ReductionCoefficient { n, t, rank, square, value })
}

/// Reduced symmetric t-qubit state, a spin-t/2 density matrix.
#[derive(Clone, Debug)]
pub struct ReducedState<T: Scalar> {
    pub t: u32,
    state: SpinState<T>,
}

impl<T: Scalar> ReducedState<T> {
    /// View the reduced state as an ordinary spin-(t/2) state so that all
    /// measures compose.
    pub fn as_state(&self) -> &SpinState<T> {
        &self.state
    }

    pub fn into_state(self) -> SpinState<T> {
        self.state
    }

    pub fn dim(&self) -> usize {
        self.t as usize + 1
    }
}

fn check_t(n: u32, t: u32) -> Result<()> {
    if t < 1 || t > n {
        return Err(Error::Domain(format!("t = {t} outside 1..=N (N = {n})")));
    }
    Ok(())
}

/// Partial trace of the symmetric embedding onto t qubits.
pub fn reduce<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<ReducedState<T>> {
    let n = rho.j().two_j();
    check_t(n, t)?;
    let jt = SpinQuantumNumber::from_two_j(t);
    let d = jt.dim();
    let moments = multipoles(rho);
    let mut acc: DMatrix<Complex<T>> = DMatrix::from_diagonal_element(
        d,
        d,
        Complex::from(T::one() / real::<T>(d as f64)),
    );
    let basis = tensor_basis_f64(jt);
    for op in basis.iter().filter(|op| op.rank >= 1) {
        let c = reduction_coefficient(n, t, op.rank)?.value;
        let coeff = moments.get(op.rank, op.component) * Complex::from(real::<T>(c));
        for r in 0..d {
            for col in 0..d {
                let tv = op.matrix[(r, col)];
                if tv.re != 0.0 || tv.im != 0.0 {
                    acc[(r, col)] += coeff * Complex::new(real::<T>(tv.re), real::<T>(tv.im));
                }
            }
        }
    }
    // Re-symmetrize after floating-point assembly.
    let acc = (&acc + acc.adjoint()).scale(real::<T>(0.5));
    Ok(ReducedState { t, state: SpinState::from_matrix_unchecked(jt, acc) })
}

/// Exact reduced purity Tr(ρ_t²) = 1/(t+1) + Σ_L c²_{N,t,L} a_L where the
/// rank weights a_L = Σ_M |ρ_LM|² are exact rationals for exact states.
pub fn reduced_purity_exact(n: u32, t: u32, rank_weights: &[(u32, Rat)]) -> Result<Rat> {
    check_t(n, t)?;
    let mut acc = Rat::new(BigInt::from(1), BigInt::from(t + 1));
    for (rank, a) in rank_weights {
        if *rank >= 1 && *rank <= t {
            acc += reduction_coefficient_sq(n, t, *rank)? * a;
        }
    }
    Ok(acc)
}

/// The Clebsch-Gordan isometry W: H_j → H_{t/2} ⊗ H_{(N-t)/2} whose rows
/// are indexed by product-basis pairs (m1, m2), columns by m.
pub fn embedding_isometry<T: Scalar>(j: SpinQuantumNumber, t: u32) -> Result<DMatrix<Complex<T>>> {
    let n = j.two_j();
    if t < 1 || t >= n {
        return Err(Error::Domain(format!(
            "bipartition needs 1 ≤ t ≤ N-1, got t = {t} (N = {n})"
        )));
    }
    let ja = SpinQuantumNumber::from_two_j(t);
    let jb = SpinQuantumNumber::from_two_j(n - t);
    let (_, db) = (ja.dim(), jb.dim());
    let mut w = DMatrix::zeros(ja.dim() * db, j.dim());
    for (a, two_m1) in ja.two_m_values().enumerate() {
        for (b, two_m2) in jb.two_m_values().enumerate() {
            let two_m = two_m1 + two_m2;
            if two_m.unsigned_abs() > n {
                continue;
            }
            let col = j.index_of_two_m(two_m)?;
            let c = clebsch_gordan(t, two_m1, n - t, two_m2, n, two_m)?;
            if c != 0.0 {
                w[(a * db + b, col)] = Complex::from(real::<T>(c));
            }
        }
    }
    Ok(w)
}

/// Embed a spin-j state across the t | N-t split: W ρ W†.
pub fn embed_bipartite<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<DMatrix<Complex<T>>> {
    let w = embedding_isometry::<T>(rho.j(), t)?;
    Ok(&w * rho.matrix() * w.adjoint())
}

/// Embed a pure state: W ψ.
pub fn embed_pure<T: Scalar>(
    psi: &crate::spin::PureSpinState<T>,
    t: u32,
) -> Result<nalgebra::DVector<Complex<T>>> {
    let w = embedding_isometry::<T>(psi.j(), t)?;
    Ok(&w * psi.amplitudes())
}

/// Partial trace over the second factor of a dA·dB bipartite matrix.
pub fn partial_trace_second<T: Scalar>(
    x: &DMatrix<Complex<T>>,
    dims: (usize, usize),
) -> Result<DMatrix<Complex<T>>> {
    let (da, db) = dims;
    if x.nrows() != da * db || x.ncols() != da * db {
        return Err(Error::Dimension(format!(
            "expected {0}x{0} bipartite matrix, got {1}x{2}",
            da * db,
            x.nrows(),
            x.ncols()
        )));
    }
    let mut out = DMatrix::zeros(da, da);
    for a in 0..da {
        for ap in 0..da {
            let mut acc = Complex::from(T::zero());
            for b in 0..db {
                acc += x[(a * db + b, ap * db + b)];
            }
            out[(a, ap)] = acc;
        }
    }
    Ok(out)
}

/// Transpose the first tensor factor of a dA·dB bipartite matrix.
pub fn partial_transpose<T: Scalar>(
    x: &DMatrix<Complex<T>>,
    dims: (usize, usize),
) -> Result<DMatrix<Complex<T>>> {
    let (da, db) = dims;
    if x.nrows() != da * db || x.ncols() != da * db {
        return Err(Error::Dimension(format!(
            "expected {0}x{0} bipartite matrix, got {1}x{2}",
            da * db,
            x.nrows(),
            x.ncols()
        )));
    }
    let mut out = DMatrix::zeros(da * db, da * db);
    for a in 0..da {
        for ap in 0..da {
            for b in 0..db {
                for bp in 0..db {
                    out[(ap * db + b, a * db + bp)] = x[(a * db + b, ap * db + bp)];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::rotation::coherent_state;
    use crate::spin::{random_mixed, PureSpinState};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coefficient_identity_reduction() {
        // t = N leaves every rank untouched.
        for rank in 0..=4u32 {
            let c = reduction_coefficient(4, 4, rank).unwrap();
            assert_abs_diff_eq!(c.value, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn coefficient_l0_matches_trace_normalization() {
        // c_{N,t,0} = √((N+1)/(t+1)) makes the identity term carry trace 1.
        for (n, t) in [(4u32, 2u32), (5, 1), (7, 3)] {
            let c = reduction_coefficient(n, t, 0).unwrap();
            assert_abs_diff_eq!(
                c.value,
                ((n as f64 + 1.0) / (t as f64 + 1.0)).sqrt(),
                epsilon = 1e-14
            );
            assert_eq!(c.square, rat((n as i64) + 1, (t as i64) + 1));
        }
    }

    #[test]
    fn coefficient_range_and_domain() {
        // c is strictly positive but not bounded by 1: already c_{3,1,1} =
        // √(10)/3 > 1 (it converts between tensor components normalized in
        // different-dimensional spaces).
        for n in 1..=8u32 {
            for t in 1..=n {
                for rank in 1..=t {
                    let c = reduction_coefficient(n, t, rank).unwrap();
                    assert!(c.value > 0.0);
                }
            }
        }
        let c311 = reduction_coefficient(3, 1, 1).unwrap();
        assert_abs_diff_eq!(c311.value, (10.0f64).sqrt() / 3.0, epsilon = 1e-14);
        assert!(reduction_coefficient(4, 5, 0).is_err());
        assert!(reduction_coefficient(4, 2, 3).is_err());
    }

    #[test]
    fn coherent_states_reduce_to_coherent_projectors() {
        let j = SpinQuantumNumber::from_two_j(5);
        let psi = coherent_state::<f64>(j, 1.2, 0.7);
        for t in 1..=4u32 {
            let reduced = reduce(&psi.projector(), t).unwrap();
            let jt = SpinQuantumNumber::from_two_j(t);
            let small = coherent_state::<f64>(jt, 1.2, 0.7).projector();
            assert!((reduced.as_state().matrix() - small.matrix()).norm() < 1e-11);
        }
    }

    #[test]
    fn reduction_nests() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let j = SpinQuantumNumber::from_two_j(6);
        let rho = random_mixed::<f64, _>(j, 3, &mut rng);
        let q = 4u32;
        let t = 2u32;
        let via_q = reduce(&reduce(&rho, q).unwrap().into_state(), t).unwrap();
        let direct = reduce(&rho, t).unwrap();
        assert!((via_q.as_state().matrix() - direct.as_state().matrix()).norm() < 1e-11);
    }

    #[test]
    fn embedding_is_isometry() {
        for two_j in [2u32, 4, 5, 7] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            for t in 1..two_j {
                let w = embedding_isometry::<f64>(j, t).unwrap();
                let gram = w.adjoint() * &w;
                let id = DMatrix::<Complex<f64>>::identity(j.dim(), j.dim());
                assert!((gram - id).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn embedding_marginal_matches_reduce() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for two_j in [3u32, 4, 6] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            let rho = random_mixed::<f64, _>(j, 2, &mut rng);
            for t in 1..two_j {
                let emb = embed_bipartite(&rho, t).unwrap();
                let marginal =
                    partial_trace_second(&emb, (t as usize + 1, (two_j - t) as usize + 1)).unwrap();
                let direct = reduce(&rho, t).unwrap();
                assert!((marginal - direct.as_state().matrix()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn partial_transpose_involution_and_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let j = SpinQuantumNumber::from_two_j(4);
        let rho = random_mixed::<f64, _>(j, 3, &mut rng);
        let x = embed_bipartite(&rho, 1).unwrap();
        let dims = (2usize, 4usize);
        let pt = partial_transpose(&x, dims).unwrap();
        let back = partial_transpose(&pt, dims).unwrap();
        assert!((back - &x).norm() < 1e-14);
        // Hermiticity preserved
        assert!((&pt - pt.adjoint()).norm() < 1e-12);

        // Product state: PT keeps it PSD.
        let a = random_mixed::<f64, _>(SpinQuantumNumber::from_two_j(1), 2, &mut rng);
        let b = random_mixed::<f64, _>(SpinQuantumNumber::from_two_j(2), 2, &mut rng);
        let prod = a.matrix().kronecker(b.matrix());
        let ptp = partial_transpose(&prod, (2, 3)).unwrap();
        let min_eig = ptp
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        assert!(min_eig > -1e-12);
        // And equals ρAᵀ ⊗ ρB.
        let expect = a.matrix().transpose().kronecker(b.matrix());
        assert!((ptp - expect).norm() < 1e-13);
    }

    #[test]
    fn purity_identity_from_rank_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for two_j in [3u32, 5] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            let rho = random_mixed::<f64, _>(j, 2, &mut rng);
            let moments = multipoles(&rho);
            for t in 1..=two_j {
                let reduced = reduce(&rho, t).unwrap();
                let direct = reduced.as_state().purity();
                let mut acc = 1.0 / (t as f64 + 1.0);
                for rank in 1..=t {
                    let c = reduction_coefficient(two_j, t, rank).unwrap();
                    acc += c.value * c.value * moments.rank_weight(rank);
                }
                assert_abs_diff_eq!(direct, acc, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn reduce_rejects_bad_t() {
        let j = SpinQuantumNumber::from_two_j(4);
        let rho = SpinState::<f64>::maximally_mixed(j);
        assert!(reduce(&rho, 0).is_err());
        assert!(reduce(&rho, 5).is_err());
        assert!(embed_bipartite(&rho, 4).is_err());
    }

    #[test]
    fn basis_state_reduction_sanity() {
        // |j, j⟩ is the N-fold product of up spins: every marginal is pure up.
        let j = SpinQuantumNumber::from_two_j(6);
        let top = PureSpinState::<f64>::basis_state(j, 6).unwrap();
        let r = reduce(&top.projector(), 3).unwrap();
        assert_abs_diff_eq!(r.as_state().matrix()[(0, 0)].re, 1.0, epsilon = 1e-12);
    }
}
