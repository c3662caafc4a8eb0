//! Total t-anticoherence measures and their exact-rational variants.
//!
//! All totals are normalized to [0, 1], equal 1 exactly on t-AC states and
//! 0 exactly on pure spin-coherent states:
//!
//! - purity:    (t+1)/t (1 - Tr ρ_t²)
//! - distance:  1 - d_p(ρ_t, 1/(t+1)) / K_t with the Schatten-p distance
//!              and K_t the pure-state maximum
//! - fidelity:  ((Tr √ρ_t)² - 1)/t
//! - cumulative multipoles: 1 - C_{≤t}(ρ)/C_{≤t}(ρ_coh)
//!
//! Monotonicity under SU(2)-covariant channels is a theorem for the purity
//! and Schatten-2 totals; for the fidelity and Schatten-1 totals it is
//! supported by numerical evidence only and results carry a
//! `conjectural_t4` flag.

use crate::error::{Error, Result};
use crate::exact::{factorial, rat_to_f64, Exact, ExactMatrix, Rat};
use crate::half::SpinQuantumNumber;
use crate::reduce::{reduce, reduced_purity_exact};
use crate::spin::SpinState;
use crate::tensor::{multipoles, multipoles_exact};
use crate::{real, Scalar};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Family of total measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureKind {
    /// Reduced-purity measure.
    PurityP,
    /// Normalized Schatten-p distance to the maximally mixed reduced state.
    SchattenDistance(u32),
    /// Fidelity-based measure.
    Fidelity,
    /// Cumulative-multipole measure.
    CumulativeMultipole,
}

impl MeasureKind {
    /// Whether the T4 monotonicity of this total is only conjectural
    /// (numerical evidence, no proof).
    pub fn conjectural_t4(self) -> bool {
        match self {
            MeasureKind::PurityP | MeasureKind::CumulativeMultipole => false,
            MeasureKind::SchattenDistance(p) => p != 2,
            MeasureKind::Fidelity => true,
        }
    }

    /// CLI spelling.
    pub fn name(self) -> String {
        match self {
            MeasureKind::PurityP => "purity".into(),
            MeasureKind::SchattenDistance(2) => "hs".into(),
            MeasureKind::SchattenDistance(1) => "trace".into(),
            MeasureKind::SchattenDistance(p) => format!("schatten{p}"),
            MeasureKind::Fidelity => "fidelity".into(),
            MeasureKind::CumulativeMultipole => "cm".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "purity" => Ok(MeasureKind::PurityP),
            "hs" => Ok(MeasureKind::SchattenDistance(2)),
            "trace" => Ok(MeasureKind::SchattenDistance(1)),
            "fidelity" => Ok(MeasureKind::Fidelity),
            "cm" => Ok(MeasureKind::CumulativeMultipole),
            other => Err(Error::Unsupported(format!("unknown measure kind '{other}'"))),
        }
    }
}

/// Outcome of a measure evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureResult {
    pub kind: String,
    pub t: u32,
    pub total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_fraction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<f64>,
    pub conjectural_t4: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<RoofDiagnostics>,
}

/// Optimizer diagnostics attached when a convex roof was computed.
#[derive(Clone, Debug, Serialize)]
pub struct RoofDiagnostics {
    pub certified: String,
    pub restarts_used: usize,
    pub best_gap: f64,
}

fn check_t(n: u32, t: u32) -> Result<()> {
    if t < 1 || t > n {
        return Err(Error::Domain(format!("t = {t} outside 1..=N (N = {n})")));
    }
    Ok(())
}

/// Purity-based total measure (t+1)/t (1 - Tr ρ_t²).
pub fn total_purity<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<T> {
    check_t(rho.j().two_j(), t)?;
    let rt = reduce(rho, t)?;
    let tt = real::<T>(t as f64);
    Ok((tt + T::one()) / tt * (T::one() - rt.as_state().purity()))
}

/// Exact purity-based total for an exact state, when the rank weights are
/// rational.
pub fn total_purity_exact(j: SpinQuantumNumber, rho: &ExactMatrix, t: u32) -> Result<Option<Rat>> {
    check_t(j.two_j(), t)?;
    let weights = exact_rank_weights(j, rho)?;
    let mut rational = Vec::new();
    for (rank, w) in weights {
        match w.as_rat() {
            Some(r) => rational.push((rank, r)),
            None => return Ok(None),
        }
    }
    let pur = reduced_purity_exact(j.two_j(), t, &rational)?;
    let tt = Rat::from(BigInt::from(t));
    let one = Rat::one();
    Ok(Some((&tt + &one) / &tt * (one - pur)))
}

/// Rank weights a_L = Σ_M |ρ_LM|² of an exact matrix, L = 1..2j.
pub fn exact_rank_weights(j: SpinQuantumNumber, rho: &ExactMatrix) -> Result<Vec<(u32, Exact)>> {
    let moments = multipoles_exact(j, rho)?;
    let mut out: Vec<(u32, Exact)> = (1..=j.two_j()).map(|l| (l, Exact::zero())).collect();
    for (rank, _, v) in moments {
        out[(rank - 1) as usize].1 += v.abs2();
    }
    Ok(out)
}

/// Schatten-p norm of a Hermitian matrix from its eigenvalues.
fn schatten_p_hermitian<T: Scalar>(x: &DMatrix<Complex<T>>, p: u32) -> T {
    let eig = x.clone().symmetric_eigen();
    if p == 1 {
        return eig.eigenvalues.iter().map(|v| v.abs()).fold(T::zero(), |a, b| a + b);
    }
    if p == 2 {
        return eig
            .eigenvalues
            .iter()
            .map(|v| *v * *v)
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
    }
    let pf = real::<T>(p as f64);
    eig.eigenvalues
        .iter()
        .map(|v| v.abs().powf(pf))
        .fold(T::zero(), |a, b| a + b)
        .powf(T::one() / pf)
}

/// Normalizer K_t: the largest Schatten-p distance from the maximally
/// mixed spin-t/2 state, attained on pure states.
pub fn distance_normalizer<T: Scalar>(t: u32, p: u32) -> T {
    let tf = t as f64;
    let big = (tf / (tf + 1.0)).powi(p as i32);
    let small = tf * (1.0 / (tf + 1.0)).powi(p as i32);
    real((big + small).powf(1.0 / p as f64))
}

/// Distance-based total measure 1 - d_p(ρ_t, MMS)/K_t.
pub fn total_distance<T: Scalar>(rho: &SpinState<T>, t: u32, p: u32) -> Result<T> {
    if p < 1 {
        return Err(Error::Domain("Schatten index p must be ≥ 1".into()));
    }
    check_t(rho.j().two_j(), t)?;
    let rt = reduce(rho, t)?;
    let d = rt.dim();
    let mut diff = rt.as_state().matrix().clone();
    let w = Complex::from(T::one() / real::<T>(d as f64));
    for k in 0..d {
        diff[(k, k)] -= w;
    }
    let dist = schatten_p_hermitian(&diff, p);
    Ok(T::one() - dist / distance_normalizer::<T>(t, p))
}

/// Tr √ρ with eigenvalues clamped at zero.
fn trace_sqrt<T: Scalar>(x: &DMatrix<Complex<T>>) -> T {
    x.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&v| if v > T::zero() { v.sqrt() } else { T::zero() })
        .fold(T::zero(), |a, b| a + b)
}

/// Fidelity-based total measure ((Tr √ρ_t)² - 1)/t.
pub fn total_fidelity<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<T> {
    check_t(rho.j().two_j(), t)?;
    let rt = reduce(rho, t)?;
    let ts = trace_sqrt(rt.as_state().matrix());
    Ok((ts * ts - T::one()) / real::<T>(t as f64))
}

/// Uhlmann-Jozsa fidelity F(σ, τ) = (Tr √(√σ τ √σ))².
pub fn fidelity<T: Scalar>(sigma: &SpinState<T>, tau: &SpinState<T>) -> Result<T> {
    if sigma.dim() != tau.dim() {
        return Err(Error::Dimension("fidelity of states of different dimension".into()));
    }
    let eig = sigma.matrix().clone().symmetric_eigen();
    let d = sigma.dim();
    let mut sqrt_sigma = DMatrix::zeros(d, d);
    for k in 0..d {
        let v = eig.eigenvalues[k];
        let lam = if v > T::zero() { v.sqrt() } else { T::zero() };
        let col = eig.eigenvectors.column(k);
        sqrt_sigma += (col * col.adjoint()).scale(lam);
    }
    let inner = &sqrt_sigma * tau.matrix() * &sqrt_sigma;
    let ts = trace_sqrt(&inner);
    Ok(ts * ts)
}

/// Bures distance √(2(1 - √F)).
pub fn bures_distance<T: Scalar>(sigma: &SpinState<T>, tau: &SpinState<T>) -> Result<T> {
    let f = fidelity(sigma, tau)?.max(T::zero()).min(T::one());
    Ok((real::<T>(2.0) * (T::one() - f.sqrt())).sqrt())
}

/// Fidelity total recomputed through the Bures distance,
/// ((t+1)[1 - D_B²/2]² - 1)/t; agrees with [`total_fidelity`].
pub fn total_fidelity_via_bures<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<T> {
    check_t(rho.j().two_j(), t)?;
    let rt = reduce(rho, t)?;
    let mms = SpinState::maximally_mixed(rt.as_state().j());
    let db = bures_distance(rt.as_state(), &mms)?;
    let half = real::<T>(0.5);
    let base = T::one() - half * db * db;
    let tp1 = real::<T>(t as f64 + 1.0);
    Ok((tp1 * base * base - T::one()) / real::<T>(t as f64))
}

/// Cumulative multipole weight C_{≤t}(ρ) = Σ_{L=1}^t Σ_M |ρ_LM|².
pub fn cumulative_multipole<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<T> {
    check_t(rho.j().two_j(), t)?;
    let m = multipoles(rho);
    let mut acc = T::zero();
    for rank in 1..=t {
        acc += m.rank_weight(rank);
    }
    Ok(acc)
}

/// Exact C_{≤t} of an exact state.
pub fn cumulative_multipole_exact(
    j: SpinQuantumNumber,
    rho: &ExactMatrix,
    t: u32,
) -> Result<Exact> {
    check_t(j.two_j(), t)?;
    let weights = exact_rank_weights(j, rho)?;
    let mut acc = Exact::zero();
    for (rank, w) in weights {
        if rank <= t {
            acc += w;
        }
    }
    Ok(acc)
}

/// Exact coherent-state normalizer
/// C_{≤t}(ρ_coh) = 2j/(2j+1) - ((2j)!)²/((2j-t-1)!(2j+t+1)!), independent
/// of the coherent direction. Requires t ≤ 2j - 1.
pub fn coherent_cumulative_exact(j: SpinQuantumNumber, t: u32) -> Result<Rat> {
    let n = j.two_j();
    if t < 1 || t + 1 > n {
        return Err(Error::Domain(format!(
            "cumulative-multipole normalizer needs 1 ≤ t ≤ 2j-1, got t = {t}, 2j = {n}"
        )));
    }
    let nf = factorial(n as u64);
    let first = Rat::new(BigInt::from(n), BigInt::from(n + 1));
    let second = Rat::new(
        &nf * &nf,
        factorial((n - t - 1) as u64) * factorial((n + t + 1) as u64),
    );
    Ok(first - second)
}

/// Cumulative-multipole total measure 1 - C_{≤t}(ρ)/C_{≤t}(ρ_coh),
/// defined for 1 ≤ t ≤ 2j-1.
pub fn total_cm<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<T> {
    let norm = coherent_cumulative_exact(rho.j(), t)?;
    let c = cumulative_multipole(rho, t)?;
    Ok(T::one() - c / real::<T>(rat_to_f64(&norm)))
}

/// Exact cumulative-multipole total for an exact state; `None` when the
/// multipole weights do not collapse to rationals.
pub fn total_cm_exact(j: SpinQuantumNumber, rho: &ExactMatrix, t: u32) -> Result<Option<Rat>> {
    let norm = coherent_cumulative_exact(j, t)?;
    let c = cumulative_multipole_exact(j, rho, t)?;
    Ok(c.as_rat().map(|r| Rat::one() - r / norm))
}

/// Evaluate any total measure.
pub fn total_measure<T: Scalar>(rho: &SpinState<T>, t: u32, kind: MeasureKind) -> Result<T> {
    match kind {
        MeasureKind::PurityP => total_purity(rho, t),
        MeasureKind::SchattenDistance(p) => total_distance(rho, t, p),
        MeasureKind::Fidelity => total_fidelity(rho, t),
        MeasureKind::CumulativeMultipole => total_cm(rho, t),
    }
}
