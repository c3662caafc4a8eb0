//! Irreducible tensor operators T_LM and the multipole expansion.
//!
//! With the Hilbert-Schmidt normalization Tr(T_LM† T_L'M') = δ_LL' δ_MM',
//! any spin-j matrix expands as X = Tr(X)·1/(2j+1) + Σ_{L≥1,M} x_LM T_LM
//! with x_LM = Tr(T_LM† X). Matrix elements are built from Clebsch-Gordan
//! coefficients:
//!
//!   ⟨j m | T_LM | j m'⟩ = √((2L+1)/(2j+1)) ⟨j m'; L M | j m⟩.

use crate::cg::{clebsch_gordan, clebsch_gordan_exact};
use crate::error::{Error, Result};
use crate::exact::{rat, Exact, ExactMatrix};
use crate::half::SpinQuantumNumber;
use crate::spin::SpinState;
use crate::{real, Scalar};
use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// A single irreducible tensor operator of rank L, component M.
#[derive(Clone, Debug)]
pub struct TensorOperator<T: Scalar> {
    pub two_j: u32,
    pub rank: u32,
    pub component: i32,
    pub matrix: DMatrix<Complex<T>>,
}

fn check_rank(j: SpinQuantumNumber, rank: u32, component: i32) -> Result<()> {
    if rank > j.two_j() {
        return Err(Error::Domain(format!(
            "tensor rank L = {rank} exceeds 2j = {}",
            j.two_j()
        )));
    }
    if component.unsigned_abs() > rank {
        return Err(Error::Domain(format!("|M| = {} exceeds L = {rank}", component.abs())));
    }
    Ok(())
}

/// Build T_LM for a spin-j system. Rank L is an integer 0 ≤ L ≤ 2j and
/// M an integer with |M| ≤ L.
pub fn tensor_operator<T: Scalar>(
    j: SpinQuantumNumber,
    rank: u32,
    component: i32,
) -> Result<TensorOperator<T>> {
    check_rank(j, rank, component)?;
    let d = j.dim();
    let tj = j.two_j();
    let scale = real::<T>(((2 * rank + 1) as f64 / d as f64).sqrt());
    let mut matrix = DMatrix::zeros(d, d);
    for (row, two_m) in j.two_m_values().enumerate() {
        let two_mp = two_m - 2 * component;
        if two_mp.unsigned_abs() > tj {
            continue;
        }
        let col = j.index_of_two_m(two_mp)?;
        let c = clebsch_gordan(tj, two_mp, 2 * rank, 2 * component, tj, two_m)?;
        matrix[(row, col)] = Complex::from(scale * real::<T>(c));
    }
    Ok(TensorOperator { two_j: j.two_j(), rank, component, matrix })
}

/// Exact-arithmetic T_LM used by the rational computation paths.
pub fn tensor_operator_exact(j: SpinQuantumNumber, rank: u32, component: i32) -> Result<ExactMatrix> {
    check_rank(j, rank, component)?;
    let d = j.dim();
    let tj = j.two_j();
    let scale = Exact::sqrt_rat(&rat((2 * rank + 1) as i64, d as i64));
    let mut matrix = ExactMatrix::zeros(d, d);
    for (row, two_m) in j.two_m_values().enumerate() {
        let two_mp = two_m - 2 * component;
        if two_mp.unsigned_abs() > tj {
            continue;
        }
        let col = j.index_of_two_m(two_mp)?;
        let c = clebsch_gordan_exact(tj, two_mp, 2 * rank, 2 * component, tj, two_m)?;
        *matrix.get_mut(row, col) = scale.mul_ref(&c);
    }
    Ok(matrix)
}

/// Cached f64 tensor basis per (2j); shared by hot paths.
fn basis_cache() -> &'static Mutex<HashMap<u32, std::sync::Arc<Vec<TensorOperator<f64>>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, std::sync::Arc<Vec<TensorOperator<f64>>>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Full tensor basis {T_LM : 0 ≤ L ≤ 2j, |M| ≤ L} in (L, M) order, f64,
/// cached per spin.
pub fn tensor_basis_f64(j: SpinQuantumNumber) -> std::sync::Arc<Vec<TensorOperator<f64>>> {
    if let Some(b) = basis_cache().lock().unwrap().get(&j.two_j()) {
        return b.clone();
    }
    let mut ops = Vec::new();
    for rank in 0..=j.two_j() {
        for component in -(rank as i32)..=rank as i32 {
            ops.push(tensor_operator::<f64>(j, rank, component).expect("valid rank"));
        }
    }
    let arc = std::sync::Arc::new(ops);
    basis_cache().lock().unwrap().insert(j.two_j(), arc.clone());
    arc
}

/// Multipole moments ρ_LM = Tr(T_LM† ρ) for 1 ≤ L ≤ 2j.
#[derive(Clone, Debug)]
pub struct MultipoleVector<T: Scalar> {
    pub two_j: u32,
    /// Entries (L, M, ρ_LM) in ascending (L, M) order, L ≥ 1.
    entries: Vec<(u32, i32, Complex<T>)>,
}

impl<T: Scalar> MultipoleVector<T> {
    pub fn entries(&self) -> &[(u32, i32, Complex<T>)] {
        &self.entries
    }

    pub fn get(&self, rank: u32, component: i32) -> Complex<T> {
        self.entries
            .iter()
            .find(|(l, m, _)| *l == rank && *m == component)
            .map(|(_, _, v)| *v)
            .unwrap_or_else(Complex::zero)
    }

    /// Σ_M |ρ_LM|² for one rank.
    pub fn rank_weight(&self, rank: u32) -> T {
        self.entries
            .iter()
            .filter(|(l, _, _)| *l == rank)
            .map(|(_, _, v)| v.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
    }

    /// Largest |ρ_LM| over 1 ≤ L ≤ t.
    pub fn max_abs_up_to(&self, t: u32) -> T {
        self.entries
            .iter()
            .filter(|(l, _, _)| *l <= t)
            .map(|(_, _, v)| v.modulus())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

use num_traits::Zero;

/// Multipole moments of a density matrix.
pub fn multipoles<T: Scalar>(rho: &SpinState<T>) -> MultipoleVector<T> {
    multipoles_of_matrix(rho.j(), rho.matrix())
}

/// Multipole moments of an arbitrary matrix (no state checks).
pub fn multipoles_of_matrix<T: Scalar>(
    j: SpinQuantumNumber,
    x: &DMatrix<Complex<T>>,
) -> MultipoleVector<T> {
    let basis = tensor_basis_f64(j);
    let mut entries = Vec::new();
    for op in basis.iter().filter(|op| op.rank >= 1) {
        let mut acc = Complex::zero();
        for r in 0..x.nrows() {
            for c in 0..x.ncols() {
                let t = op.matrix[(r, c)];
                if t.re != 0.0 || t.im != 0.0 {
                    let tc = Complex::new(real::<T>(t.re), real::<T>(t.im));
                    acc += tc.conj() * x[(r, c)];
                }
            }
        }
        entries.push((op.rank, op.component, acc));
    }
    MultipoleVector { two_j: j.two_j(), entries }
}

/// Exact multipole moments from an exact matrix.
pub fn multipoles_exact(j: SpinQuantumNumber, x: &ExactMatrix) -> Result<Vec<(u32, i32, Exact)>> {
    let mut entries = Vec::new();
    for rank in 1..=j.two_j() {
        for component in -(rank as i32)..=rank as i32 {
            let t = tensor_operator_exact(j, rank, component)?;
            entries.push((rank, component, t.hs_inner(x)));
        }
    }
    Ok(entries)
}

/// Rebuild the matrix 1/(2j+1) + Σ ρ_LM T_LM from its multipoles.
pub fn reconstruct<T: Scalar>(
    j: SpinQuantumNumber,
    moments: &MultipoleVector<T>,
) -> DMatrix<Complex<T>> {
    let d = j.dim();
    let mut acc = DMatrix::from_diagonal_element(
        d,
        d,
        Complex::from(T::one() / real::<T>(d as f64)),
    );
    let basis = tensor_basis_f64(j);
    for op in basis.iter().filter(|op| op.rank >= 1) {
        let coeff = moments.get(op.rank, op.component);
        if coeff.is_zero() {
            continue;
        }
        for r in 0..d {
            for c in 0..d {
                let t = op.matrix[(r, c)];
                if t.re != 0.0 || t.im != 0.0 {
                    acc[(r, c)] += coeff * Complex::new(real::<T>(t.re), real::<T>(t.im));
                }
            }
        }
    }
    acc
}

/// Angular momentum operator J_z in the |j,m⟩ basis.
pub fn op_jz<T: Scalar>(j: SpinQuantumNumber) -> DMatrix<Complex<T>> {
    let d = j.dim();
    let mut m = DMatrix::zeros(d, d);
    for (k, two_m) in j.two_m_values().enumerate() {
        m[(k, k)] = Complex::from(real::<T>(two_m as f64 / 2.0));
    }
    m
}

/// Raising operator J₊ with ⟨m+1|J₊|m⟩ = √(j(j+1) − m(m+1)).
pub fn op_jplus<T: Scalar>(j: SpinQuantumNumber) -> DMatrix<Complex<T>> {
    let d = j.dim();
    let jj = j.j();
    let mut m = DMatrix::zeros(d, d);
    for (k, two_m) in j.two_m_values().enumerate() {
        if k == 0 {
            continue;
        }
        let mv = two_m as f64 / 2.0;
        m[(k - 1, k)] = Complex::from(real::<T>((jj * (jj + 1.0) - mv * (mv + 1.0)).sqrt()));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use approx::assert_abs_diff_eq;

    fn hs_inner_f64(a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>) -> Complex<f64> {
        (a.adjoint() * b).trace()
    }

    #[test]
    fn t00_is_normalized_identity() {
        for two_j in [1u32, 2, 3, 4, 7] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            let t = tensor_operator::<f64>(j, 0, 0).unwrap();
            let expected = DMatrix::from_diagonal_element(
                j.dim(),
                j.dim(),
                Complex::from(1.0 / (j.dim() as f64).sqrt()),
            );
            assert!((t.matrix - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn t10_is_normalized_jz() {
        for two_j in [1u32, 3, 4] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            let t = tensor_operator::<f64>(j, 1, 0).unwrap();
            let jz = op_jz::<f64>(j);
            let norm = hs_inner_f64(&jz, &jz).re.sqrt();
            assert!((t.matrix - jz.unscale(norm)).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_is_orthonormal_up_to_j4() {
        for two_j in 1..=8u32 {
            let j = SpinQuantumNumber::from_two_j(two_j);
            let basis = tensor_basis_f64(j);
            assert_eq!(basis.len(), j.dim() * j.dim());
            for (a, ta) in basis.iter().enumerate() {
                for (b, tb) in basis.iter().enumerate() {
                    let g = hs_inner_f64(&ta.matrix, &tb.matrix);
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(g.re, expected, epsilon = 1e-12);
                    assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn adjoint_symmetry() {
        // T_LM† = (−1)^M T_{L,−M}
        let j = SpinQuantumNumber::from_two_j(3);
        for rank in 1..=3u32 {
            for component in -(rank as i32)..=rank as i32 {
                let t = tensor_operator::<f64>(j, rank, component).unwrap();
                let tneg = tensor_operator::<f64>(j, rank, -component).unwrap();
                let sign = if component % 2 == 0 { 1.0 } else { -1.0 };
                assert!((t.matrix.adjoint() - tneg.matrix.scale(sign)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_domain_errors() {
        let j = SpinQuantumNumber::from_two_j(2);
        assert!(tensor_operator::<f64>(j, 3, 0).is_err());
        assert!(tensor_operator::<f64>(j, 2, 3).is_err());
    }

    #[test]
    fn mms_has_no_multipoles() {
        let j = SpinQuantumNumber::from_two_j(5);
        let mms = SpinState::<f64>::maximally_mixed(j);
        let m = multipoles(&mms);
        assert!(m.max_abs_up_to(5) < 1e-15);
    }

    #[test]
    fn roundtrip_on_random_hermitian() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for two_j in [2u32, 3, 5] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            for _ in 0..5 {
                let x = crate::spin::random_hermitian_unit_trace::<f64, _>(j.dim(), &mut rng);
                let m = multipoles_of_matrix(j, &x);
                let back = reconstruct(j, &m);
                assert!((back - x).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn exact_basis_matches_float() {
        let j = SpinQuantumNumber::from_two_j(4);
        for rank in 0..=4u32 {
            for component in -(rank as i32)..=rank as i32 {
                let ex = tensor_operator_exact(j, rank, component).unwrap();
                let fl = tensor_operator::<f64>(j, rank, component).unwrap();
                assert!((ex.to_complex::<f64>() - fl.matrix).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn exact_hs_norm_is_one() {
        let j = SpinQuantumNumber::from_two_j(3);
        let t = tensor_operator_exact(j, 2, 1).unwrap();
        assert_eq!(t.hs_inner(&t).as_rat().unwrap(), rat_int(1));
    }
}
