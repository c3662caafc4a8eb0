//! Catalogue of exactly constructed reference states.
//!
//! Every state is assembled in exact arithmetic (amplitudes are square
//! roots of rationals, possibly times i), so purities, multipole weights,
//! and anticoherence orders come out as exact rationals. Floating-point
//! copies are produced once at the boundary.

use crate::error::{Error, Result};
use crate::exact::{rat, Exact, ExactMatrix, Rat};
use crate::half::SpinQuantumNumber;
use crate::spin::SpinState;
use crate::tensor::multipoles_exact;
use crate::Scalar;
use num_traits::{One, Zero};

/// An exactly constructed spin state with its certified properties.
#[derive(Clone, Debug)]
pub struct CatalogueState {
    pub name: String,
    pub description: String,
    pub j: SpinQuantumNumber,
    pub rank: usize,
    /// Exact global purity Tr ρ².
    pub purity: Rat,
    /// Largest t with all multipoles of rank ≤ t exactly zero.
    pub ac_order: u32,
    pub matrix: ExactMatrix,
}

impl CatalogueState {
    pub fn to_state<T: Scalar>(&self) -> SpinState<T> {
        SpinState::from_matrix_unchecked(self.j, self.matrix.to_complex::<T>())
    }

    /// Exact weights of a mixture-defined entry, if any (used to hand the
    /// defining decomposition to roof optimizers).
    pub fn purity_f64(&self) -> f64 {
        crate::exact::rat_to_f64(&self.purity)
    }
}

/// Amplitude vector in the |j,m⟩ basis from (2m, Exact) pairs.
fn amplitudes(j: SpinQuantumNumber, entries: &[(i32, Exact)]) -> Result<Vec<Exact>> {
    let mut v = vec![Exact::zero(); j.dim()];
    for (two_m, a) in entries {
        let idx = j.index_of_two_m(*two_m)?;
        v[idx] = a.clone();
    }
    Ok(v)
}

fn sq(p: i64, q: i64) -> Exact {
    Exact::sqrt_rat(&rat(p, q))
}

/// Exact mixture Σ w_i |ψ_i⟩⟨ψ_i|.
fn mixture(j: SpinQuantumNumber, parts: &[(Rat, Vec<Exact>)]) -> ExactMatrix {
    let d = j.dim();
    let mut acc = ExactMatrix::zeros(d, d);
    for (w, amps) in parts {
        let proj = ExactMatrix::projector(amps).scaled(&Exact::from_rat(w.clone()));
        acc = acc.add(&proj);
    }
    acc
}

/// Largest t ≤ 2j with all multipoles of rank ≤ t exactly zero.
pub fn exact_ac_order(j: SpinQuantumNumber, m: &ExactMatrix) -> Result<u32> {
    let moments = multipoles_exact(j, m)?;
    let mut order = 0;
    for t in 1..=j.two_j() {
        let vanishes = moments
            .iter()
            .filter(|(l, _, _)| *l == t)
            .all(|(_, _, v)| v.is_zero());
        if vanishes {
            order = t;
        } else {
            break;
        }
    }
    Ok(order)
}

fn finish(
    name: &str,
    description: &str,
    j: SpinQuantumNumber,
    rank: usize,
    matrix: ExactMatrix,
) -> Result<CatalogueState> {
    let purity = matrix
        .matmul(&matrix)
        .trace()
        .as_rat()
        .ok_or_else(|| Error::Validation(format!("{name}: purity is not rational")))?;
    let ac_order = exact_ac_order(j, &matrix)?;
    Ok(CatalogueState {
        name: name.into(),
        description: description.into(),
        j,
        rank,
        purity,
        ac_order,
        matrix,
    })
}

/// Defining pure components of the rank-2 spin-2 family: the two
/// orthonormal vectors (|2,2⟩ ± i√2 |2,0⟩ + |2,-2⟩)/2.
pub fn j2_defining_pair() -> Result<(Vec<Exact>, Vec<Exact>)> {
    let j = SpinQuantumNumber::from_int(2);
    let half = Exact::sqrt_rat(&rat(1, 4));
    let i_sqrt_half = Exact::i() * sq(1, 2);
    let plus = amplitudes(
        j,
        &[(4, half.clone()), (0, i_sqrt_half.clone()), (-4, half.clone())],
    )?;
    let minus = amplitudes(j, &[(4, half.clone()), (0, -i_sqrt_half), (-4, half)])?;
    Ok((plus, minus))
}

/// The rank-2 spin-2 mixture λ|ψ₊⟩⟨ψ₊| + (1-λ)|ψ₋⟩⟨ψ₋|: 1-AC-supported
/// for every λ, exactly 2-AC everywhere, 3-AC at λ = 1/2.
pub fn j2_rank2(lambda: Rat) -> Result<CatalogueState> {
    if lambda < Rat::zero() || lambda > Rat::one() {
        return Err(Error::Domain("mixing weight must lie in [0, 1]".into()));
    }
    let j = SpinQuantumNumber::from_int(2);
    let (plus, minus) = j2_defining_pair()?;
    let matrix = mixture(j, &[(lambda.clone(), plus), (Rat::one() - lambda.clone(), minus)]);
    let rank = if lambda.is_zero() || lambda == Rat::one() { 1 } else { 2 };
    finish(
        "j2_rank2",
        "rank-2 spin-2 mixture on a 1-AC support; 3-AC at equal weights",
        j,
        rank,
        matrix,
    )
}

/// Spin-3/2 equal mixture of (|3/2,3/2⟩+|3/2,-1/2⟩)/√2 and
/// (-|3/2,1/2⟩+|3/2,-3/2⟩)/√2: purity 1/2, exactly 2-AC.
pub fn j3o2_2ac() -> Result<CatalogueState> {
    let j = SpinQuantumNumber::from_two_j(3);
    let a = amplitudes(j, &[(3, sq(1, 2)), (-1, sq(1, 2))])?;
    let b = amplitudes(j, &[(1, -sq(1, 2)), (-3, sq(1, 2))])?;
    let matrix = mixture(j, &[(rat(1, 2), a), (rat(1, 2), b)]);
    finish(
        "j3o2_2AC",
        "spin-3/2 rank-2 equal mixture, purity 1/2, exactly 2-AC",
        j,
        2,
        matrix,
    )
}

/// Spin-5/2 mixture (1/6)|ψ₁⟩⟨ψ₁| + (5/6)|ψ₂⟩⟨ψ₂| of the two "GHZ-like"
/// vectors: purity 13/18, exactly 2-AC.
pub fn j5o2_2ac() -> Result<CatalogueState> {
    let j = SpinQuantumNumber::from_two_j(5);
    let a = amplitudes(j, &[(5, sq(1, 2)), (-5, sq(1, 2))])?;
    let b = amplitudes(j, &[(3, sq(1, 2)), (-3, sq(1, 2))])?;
    let matrix = mixture(j, &[(rat(1, 6), a), (rat(5, 6), b)]);
    finish(
        "j5o2_2AC",
        "spin-5/2 rank-2 unequal mixture, purity 13/18, exactly 2-AC",
        j,
        2,
        matrix,
    )
}

/// The spin-5/2 pair whose partially transposed projectors live on
/// orthogonal subspaces across the 1 | 4 split.
pub fn j5o2_pt_pair() -> Result<(Vec<Exact>, Vec<Exact>)> {
    let j = SpinQuantumNumber::from_two_j(5);
    let a = amplitudes(j, &[(-5, sq(1, 6)), (3, sq(5, 6))])?;
    let b = amplitudes(j, &[(-3, -sq(5, 6)), (5, sq(1, 6))])?;
    Ok((a, b))
}

/// Mixture λψ₁ + (1-λ)ψ₂ of the orthogonal-PT spin-5/2 pair; the equal
/// mixture has purity 1/2 and is exactly 3-AC.
pub fn j5o2_pt_mix(lambda: Rat) -> Result<CatalogueState> {
    if lambda < Rat::zero() || lambda > Rat::one() {
        return Err(Error::Domain("mixing weight must lie in [0, 1]".into()));
    }
    let j = SpinQuantumNumber::from_two_j(5);
    let (a, b) = j5o2_pt_pair()?;
    let matrix = mixture(j, &[(lambda.clone(), a), (Rat::one() - lambda.clone(), b)]);
    let rank = if lambda.is_zero() || lambda == Rat::one() { 1 } else { 2 };
    let name = if lambda == rat(1, 2) { "j5o2_3AC" } else { "j5o2_pt_mix" };
    finish(
        name,
        "spin-5/2 mixture of the orthogonal-PT pair; equal weights give purity 1/2, exactly 3-AC",
        j,
        rank,
        matrix,
    )
}

/// Spin-5/2 rank-4 mixture reaching fourth-order anticoherence at purity
/// 7/24: the m = 1/2 level is empty, the ±5/2 coherence only feeds the
/// rank-5 multipole, and the diagonal weights cancel every spin moment up
/// to fourth order.
pub fn j5o2_rank4() -> Result<CatalogueState> {
    let j = SpinQuantumNumber::from_two_j(5);
    let p1 = amplitudes(j, &[(-3, Exact::one())])?;
    let p2 = amplitudes(j, &[(3, Exact::one())])?;
    let p3 = amplitudes(j, &[(5, sq(9, 20)), (-5, sq(11, 20))])?;
    let p4 = amplitudes(j, &[(-1, Exact::one())])?;
    let matrix = mixture(
        j,
        &[
            (rat(1, 12), p1),
            (rat(1, 4), p2),
            (rat(1, 3), p3),
            (rat(1, 3), p4),
        ],
    );
    finish(
        "j5o2_rank4",
        "spin-5/2 rank-4 mixture, purity 7/24, exactly 4-AC",
        j,
        4,
        matrix,
    )
}

/// The two symmetric 7-qubit vectors spanning a 2-AC subspace.
pub fn j7o2_2ac_pair() -> Result<(Vec<Exact>, Vec<Exact>)> {
    let j = SpinQuantumNumber::from_two_j(7);
    let a = amplitudes(j, &[(7, sq(3, 10)), (-3, sq(7, 10))])?;
    let b = amplitudes(j, &[(3, sq(7, 10)), (-7, -sq(3, 10))])?;
    Ok((a, b))
}

/// Mixture on the 2-AC subspace of N = 7 qubits; 2-AC for every weight.
pub fn j7o2_2ac_mix(lambda: Rat) -> Result<CatalogueState> {
    if lambda < Rat::zero() || lambda > Rat::one() {
        return Err(Error::Domain("mixing weight must lie in [0, 1]".into()));
    }
    let j = SpinQuantumNumber::from_two_j(7);
    let (a, b) = j7o2_2ac_pair()?;
    let matrix = mixture(j, &[(lambda.clone(), a), (Rat::one() - lambda.clone(), b)]);
    let rank = if lambda.is_zero() || lambda == Rat::one() { 1 } else { 2 };
    finish(
        "j7o2_2AC_mix",
        "mixture on the spin-7/2 2-AC subspace; 2-AC for every mixing weight",
        j,
        rank,
        matrix,
    )
}

/// Spin-2 equal superposition (|2,2⟩+|2,0⟩+|2,-2⟩)/√3 (pure).
pub fn j2_triple_sym() -> Result<CatalogueState> {
    let j = SpinQuantumNumber::from_int(2);
    let a = amplitudes(j, &[(4, sq(1, 3)), (0, sq(1, 3)), (-4, sq(1, 3))])?;
    let matrix = ExactMatrix::projector(&a);
    finish(
        "j2_triple_sym",
        "pure spin-2 equal three-level superposition",
        j,
        1,
        matrix,
    )
}

/// Spin-2 superposition (-2|2,2⟩-|2,0⟩+|2,-2⟩)/√6 (pure).
pub fn j2_triple_asym() -> Result<CatalogueState> {
    let j = SpinQuantumNumber::from_int(2);
    let a = amplitudes(j, &[(4, -sq(4, 6)), (0, -sq(1, 6)), (-4, sq(1, 6))])?;
    let matrix = ExactMatrix::projector(&a);
    finish(
        "j2_triple_asym",
        "pure spin-2 unbalanced three-level superposition",
        j,
        1,
        matrix,
    )
}

/// Pure spin-2 tetrahedron state (|2,2⟩ + √2|2,-1⟩)/√3: 2-AC at purity 1.
pub fn j2_tetrahedron() -> Result<CatalogueState> {
    let j = SpinQuantumNumber::from_int(2);
    let a = amplitudes(j, &[(4, sq(1, 3)), (-2, sq(2, 3))])?;
    let matrix = ExactMatrix::projector(&a);
    finish(
        "j2_tetra",
        "pure spin-2 tetrahedron state, exactly 2-AC",
        j,
        1,
        matrix,
    )
}

/// GHZ state (|j,j⟩+|j,-j⟩)/√2 for N = 2j qubits (1-AC, purity 1).
pub fn ghz(j: SpinQuantumNumber) -> Result<CatalogueState> {
    if j.two_j() == 0 {
        return Err(Error::Domain("GHZ needs j ≥ 1/2".into()));
    }
    let tj = j.two_j() as i32;
    let a = amplitudes(j, &[(tj, sq(1, 2)), (-tj, sq(1, 2))])?;
    let matrix = ExactMatrix::projector(&a);
    finish("ghz", "GHZ state (|j,j⟩+|j,-j⟩)/√2", j, 1, matrix)
}

/// Single-excitation Dicke (W) state |j, j-1⟩.
pub fn w_state(j: SpinQuantumNumber) -> Result<CatalogueState> {
    if j.two_j() < 2 {
        return Err(Error::Domain("W state needs N ≥ 2 qubits".into()));
    }
    let tj = j.two_j() as i32;
    let a = amplitudes(j, &[(tj - 2, Exact::one())])?;
    let matrix = ExactMatrix::projector(&a);
    finish("w", "single-excitation Dicke (W) state |j, j-1⟩", j, 1, matrix)
}

/// Maximally mixed state as an exact catalogue entry.
pub fn mms(j: SpinQuantumNumber) -> Result<CatalogueState> {
    let d = j.dim();
    let mut matrix = ExactMatrix::zeros(d, d);
    for k in 0..d {
        *matrix.get_mut(k, k) = Exact::from_rat(rat(1, d as i64));
    }
    finish("mms", "maximally mixed state 1/(2j+1)", j, d, matrix)
}

/// All fixed catalogue entries (parametrized families at their default
/// parameters, GHZ/W/MMS at the spins used by the trade-off study).
pub fn catalogue() -> Result<Vec<CatalogueState>> {
    Ok(vec![
        j3o2_2ac()?,
        j2_rank2(rat(1, 2))?,
        j5o2_2ac()?,
        j5o2_pt_mix(rat(1, 2))?,
        j5o2_rank4()?,
        j7o2_2ac_mix(rat(1, 2))?,
        j2_triple_sym()?,
        j2_triple_asym()?,
        j2_tetrahedron()?,
        ghz(SpinQuantumNumber::from_two_j(3))?,
        ghz(SpinQuantumNumber::from_two_j(4))?,
        ghz(SpinQuantumNumber::from_two_j(5))?,
        w_state(SpinQuantumNumber::from_two_j(4))?,
        mms(SpinQuantumNumber::from_two_j(3))?,
        mms(SpinQuantumNumber::from_two_j(4))?,
        mms(SpinQuantumNumber::from_two_j(5))?,
    ])
}

/// Look up a catalogue entry by name; `two_j` selects the spin for the
/// GHZ/W/MMS families and `lambda` the weight of parametrized mixtures.
pub fn build(name: &str, two_j: Option<u32>, lambda: Option<Rat>) -> Result<CatalogueState> {
    let lam = lambda.unwrap_or_else(|| rat(1, 2));
    match name {
        "j3o2_2AC" => j3o2_2ac(),
        "j2_rank2" => j2_rank2(lam),
        "j5o2_2AC" => j5o2_2ac(),
        "j5o2_3AC" => j5o2_pt_mix(rat(1, 2)),
        "j5o2_pt_mix" => j5o2_pt_mix(lam),
        "j5o2_rank4" => j5o2_rank4(),
        "j7o2_2AC_mix" => j7o2_2ac_mix(lam),
        "j2_triple_sym" => j2_triple_sym(),
        "j2_triple_asym" => j2_triple_asym(),
        "j2_tetra" => j2_tetrahedron(),
        "ghz" => ghz(SpinQuantumNumber::from_two_j(two_j.ok_or_else(|| {
            Error::Domain("ghz needs --two-j".into())
        })?)),
        "w" => w_state(SpinQuantumNumber::from_two_j(two_j.ok_or_else(|| {
            Error::Domain("w needs --two-j".into())
        })?)),
        "mms" => mms(SpinQuantumNumber::from_two_j(two_j.ok_or_else(|| {
            Error::Domain("mms needs --two-j".into())
        })?)),
        other => Err(Error::Unsupported(format!("no catalogue entry named '{other}'"))),
    }
}
