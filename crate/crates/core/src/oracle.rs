//! Brute-force reference implementations on the full 2^N qubit space.
//!
//! These are deliberately independent of the Clebsch-Gordan machinery:
//! Dicke states are constructed combinatorially from bitstrings, partial
//! traces from index arithmetic. They serve as anti-drift oracles for the
//! polynomial-size reduction and embedding code and are only intended for
//! N ≤ 10.

use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::half::SpinQuantumNumber;
use crate::spin::SpinState;
use crate::Scalar;
use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Dicke embedding V: H_j → (C²)^⊗N with N = 2j. Column m-index k
/// (k = j - m zeros... bit convention: a set bit is a down spin), row is a
/// bitstring; entries 1/√C(N,k) on strings of weight k.
pub fn dicke_embedding<T: Scalar>(j: SpinQuantumNumber) -> Result<DMatrix<Complex<T>>> {
    let n = j.two_j() as usize;
    if n > 16 {
        return Err(Error::Domain(format!("brute-force embedding limited to small N, got {n}")));
    }
    let dim_full = 1usize << n;
    let mut v = DMatrix::zeros(dim_full, n + 1);
    for s in 0..dim_full {
        let k = (s as u32).count_ones() as usize;
        let w = binomial(n as u64, k as u64).to_f64().unwrap();
        v[(s, k)] = Complex::from(crate::real::<T>(1.0 / w.sqrt()));
    }
    Ok(v)
}

/// Full symmetric N-qubit density matrix of a spin-j state.
pub fn symmetric_qubit_state<T: Scalar>(rho: &SpinState<T>) -> Result<DMatrix<Complex<T>>> {
    let v = dicke_embedding::<T>(rho.j())?;
    Ok(&v * rho.matrix() * v.adjoint())
}

/// Trace out the last N - t qubits of an N-qubit matrix.
pub fn qubit_marginal<T: Scalar>(
    full: &DMatrix<Complex<T>>,
    n: usize,
    t: usize,
) -> Result<DMatrix<Complex<T>>> {
    if full.nrows() != 1 << n {
        return Err(Error::Dimension("full matrix is not 2^N".into()));
    }
    if t < 1 || t > n {
        return Err(Error::Domain(format!("t = {t} outside 1..=N")));
    }
    let keep = 1usize << t;
    let rest = 1usize << (n - t);
    let mut out = DMatrix::zeros(keep, keep);
    for x in 0..keep {
        for y in 0..keep {
            let mut acc = Complex::from(T::zero());
            for z in 0..rest {
                acc += full[(x * rest + z, y * rest + z)];
            }
            out[(x, y)] = acc;
        }
    }
    Ok(out)
}

/// Project a t-qubit matrix supported on the symmetric sector down to the
/// (t+1)-dimensional Dicke basis.
pub fn to_dicke_basis<T: Scalar>(
    x: &DMatrix<Complex<T>>,
    t: usize,
) -> Result<DMatrix<Complex<T>>> {
    let jt = SpinQuantumNumber::from_two_j(t as u32);
    let v = dicke_embedding::<T>(jt)?;
    Ok(v.adjoint() * x * v)
}

/// Brute-force reduced state: embed into 2^N, trace out, re-express in the
/// Dicke basis. Matches `reduce` on symmetric states.
pub fn brute_force_reduce<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<DMatrix<Complex<T>>> {
    let n = rho.j().two_j() as usize;
    let full = symmetric_qubit_state(rho)?;
    let marginal = qubit_marginal(&full, n, t as usize)?;
    to_dicke_basis(&marginal, t as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::reduce;
    use crate::spin::random_mixed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dicke_embedding_is_isometry() {
        for two_j in [2u32, 5, 8] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            let v = dicke_embedding::<f64>(j).unwrap();
            let gram = v.adjoint() * &v;
            let id = DMatrix::<Complex<f64>>::identity(j.dim(), j.dim());
            assert!((gram - id).norm() < 1e-12);
        }
    }

    #[test]
    fn reduction_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for two_j in [2u32, 3, 4, 5] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            for _ in 0..4 {
                let rho = random_mixed::<f64, _>(j, 2, &mut rng);
                for t in 1..=two_j {
                    let fast = reduce(&rho, t).unwrap();
                    let slow = brute_force_reduce(&rho, t).unwrap();
                    assert!(
                        (fast.as_state().matrix() - &slow).norm() < 1e-10,
                        "mismatch at 2j={two_j}, t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn one_qubit_marginal_of_random_symmetric_states() {
        // Freezes the (5,1,1) reduction-coefficient behaviour against the
        // explicit 2^5 embedding.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let j = SpinQuantumNumber::from_two_j(5);
        let rho = random_mixed::<f64, _>(j, 3, &mut rng);
        let fast = reduce(&rho, 1).unwrap();
        let slow = brute_force_reduce(&rho, 1).unwrap();
        assert!((fast.as_state().matrix() - &slow).norm() < 1e-12);
    }
}
