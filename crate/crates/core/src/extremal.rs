//! The purity-vs-anticoherence-order trade-off.
//!
//! t-anticoherence is the linear constraint set ρ_LM = 0 for 1 ≤ L ≤ t
//! (t(t+2) real constraints). Minimizing purity over it is a convex
//! program whose optimum is always the maximally mixed state; maximizing
//! purity is a convex maximization, attacked heuristically: fix a support,
//! solve the linear t-AC system restricted to it, then push toward
//! extreme points of the feasible slice by shooting rays from an interior
//! point to the boundary of the positive-semidefinite cone. Catalogued
//! explicit states are consulted first and override weaker search results.

use crate::catalogue::{self, CatalogueState};
use crate::error::{Error, Result};
use crate::half::SpinQuantumNumber;
use crate::spin::SpinState;
use crate::tensor::{multipoles, tensor_basis_f64, TensorOperator};
use crate::{real, Scalar};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

/// The linear constraint set "all multipoles up to rank t vanish".
#[derive(Clone, Copy, Debug)]
pub struct AcConstraintSet {
    pub two_j: u32,
    pub t: u32,
}

impl AcConstraintSet {
    pub fn new(j: SpinQuantumNumber, t: u32) -> Result<Self> {
        if t < 1 || t > j.two_j() {
            return Err(Error::Domain(format!(
                "t = {t} outside 1..=2j (2j = {})",
                j.two_j()
            )));
        }
        Ok(Self { two_j: j.two_j(), t })
    }

    /// Number of real constraints, Σ_{L=1}^t (2L+1) = t(t+2).
    pub fn constraint_count(&self) -> usize {
        (self.t * (self.t + 2)) as usize
    }

    pub fn satisfied<T: Scalar>(&self, rho: &SpinState<T>, tol: T) -> bool {
        is_t_anticoherent(rho, self.t, tol)
    }
}

/// True iff max_{L≤t,M} |ρ_LM| < tol.
pub fn is_t_anticoherent<T: Scalar>(rho: &SpinState<T>, t: u32, tol: T) -> bool {
    multipoles(rho).max_abs_up_to(t) < tol
}

/// Output of the convex minimum-purity solve.
#[derive(Clone, Debug)]
pub struct MinPurityResult<T: Scalar> {
    pub purity: T,
    pub witness: SpinState<T>,
    pub kkt_residual: T,
    pub iterations: usize,
}

fn project_affine<T: Scalar>(
    x: &DMatrix<Complex<T>>,
    basis: &[TensorOperator<f64>],
    t: u32,
) -> DMatrix<Complex<T>> {
    let d = x.nrows();
    let mut out = (x + x.adjoint()).scale(real::<T>(0.5));
    // Remove the rank-(≤ t) tensor components.
    for op in basis.iter().filter(|op| op.rank >= 1 && op.rank <= t) {
        let mut coeff = Complex::from(T::zero());
        for r in 0..d {
            for c in 0..d {
                let v = op.matrix[(r, c)];
                if v.re != 0.0 {
                    coeff += out[(r, c)] * Complex::from(real::<T>(v.re));
                }
            }
        }
        // coeff = Tr(T† out) for real T entries
        for r in 0..d {
            for c in 0..d {
                let v = op.matrix[(r, c)];
                if v.re != 0.0 {
                    out[(r, c)] -= coeff * Complex::from(real::<T>(v.re));
                }
            }
        }
    }
    // Fix the trace.
    let shift = (Complex::from(T::one()) - out.trace()) / Complex::from(real::<T>(d as f64));
    for k in 0..d {
        out[(k, k)] += shift;
    }
    out
}

fn project_psd<T: Scalar>(x: &DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let eig = x.clone().symmetric_eigen();
    let d = x.nrows();
    let mut out = DMatrix::zeros(d, d);
    for k in 0..d {
        let lam = eig.eigenvalues[k];
        if lam > T::zero() {
            let col = eig.eigenvectors.column(k);
            out += (col * col.adjoint()).scale(lam);
        }
    }
    out
}

/// Minimize Tr ρ² over t-AC states: a convex program whose global optimum
/// is the maximally mixed state (feasible for every t). Solved by
/// projected gradient descent; the KKT residual is the norm of the
/// objective gradient projected onto the feasible tangent space.
pub fn min_purity_tac<T: Scalar>(j: SpinQuantumNumber, t: u32) -> Result<MinPurityResult<T>> {
    AcConstraintSet::new(j, t)?;
    let d = j.dim();
    let basis = tensor_basis_f64(j);
    // Random feasible-ish start, pushed into the constraint set.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = crate::spin::random_mixed::<T, _>(j, d, &mut rng);
    let mut x = project_affine(start.matrix(), &basis, t);
    let mut iterations = 0;
    let step = real::<T>(0.3);
    for _ in 0..400 {
        iterations += 1;
        // gradient of Tr ρ² is 2ρ
        let candidate = &x - (&x).scale(real::<T>(2.0) * step);
        let mut y = project_affine(&candidate, &basis, t);
        for _ in 0..8 {
            y = project_psd(&y);
            y = project_affine(&y, &basis, t);
        }
        let moved = (&y - &x).norm();
        x = y;
        if moved < real::<T>(1e-13) {
            break;
        }
    }
    let witness = SpinState::from_matrix_unchecked(j, x);
    let purity = witness.purity();
    // KKT: project 2ρ onto {traceless Hermitian with vanishing rank ≤ t
    // components}; at an interior optimum this vanishes.
    let grad = witness.matrix().scale(real::<T>(2.0));
    let projected = project_affine(&grad, &basis, t);
    let mean = projected.trace().re / real::<T>(d as f64);
    let mut tangent = projected;
    for k in 0..d {
        tangent[(k, k)] -= Complex::from(mean);
    }
    let kkt_residual = tangent.norm();
    Ok(MinPurityResult { purity, witness, kkt_residual, iterations })
}

/// How a staircase witness was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessCertification {
    ExplicitState,
    HeuristicSearch,
}

/// A point of the purity-order trade-off.
#[derive(Clone, Debug)]
pub struct StaircasePoint<T: Scalar> {
    pub purity: f64,
    pub max_order: u32,
    pub witness: SpinState<T>,
    pub witness_name: String,
    pub witness_purity: f64,
    pub certified: WitnessCertification,
    /// Set when the heuristic search beat every catalogued state.
    pub note: Option<String>,
}

/// Search configuration for the max-purity heuristic.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub random_supports_per_rank: usize,
    pub rays: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { random_supports_per_rank: 24, rays: 48, seed: 0 }
    }
}

/// Orthonormal Hermitian basis of r×r matrices (real coordinates).
fn hermitian_basis<T: Scalar>(r: usize) -> Vec<DMatrix<Complex<T>>> {
    let mut out = Vec::with_capacity(r * r);
    for k in 0..r {
        let mut m = DMatrix::zeros(r, r);
        m[(k, k)] = Complex::from(T::one());
        out.push(m);
    }
    let inv_sqrt2 = real::<T>(std::f64::consts::FRAC_1_SQRT_2);
    for a in 0..r {
        for b in (a + 1)..r {
            let mut m = DMatrix::zeros(r, r);
            m[(a, b)] = Complex::from(inv_sqrt2);
            m[(b, a)] = Complex::from(inv_sqrt2);
            out.push(m);
            let mut m = DMatrix::zeros(r, r);
            m[(a, b)] = Complex::new(T::zero(), inv_sqrt2);
            m[(b, a)] = Complex::new(T::zero(), -inv_sqrt2);
            out.push(m);
        }
    }
    out
}

fn from_coords<T: Scalar>(coords: &DVector<T>, basis: &[DMatrix<Complex<T>>]) -> DMatrix<Complex<T>> {
    let r = basis[0].nrows();
    let mut out = DMatrix::zeros(r, r);
    for (k, b) in basis.iter().enumerate() {
        out += b.scale(coords[k]);
    }
    out
}

fn to_coords<T: Scalar>(m: &DMatrix<Complex<T>>, basis: &[DMatrix<Complex<T>>]) -> DVector<T> {
    DVector::from_fn(basis.len(), |k, _| (basis[k].adjoint() * m).trace().re)
}

struct SupportProblem<T: Scalar> {
    support: DMatrix<Complex<T>>, // d×r orthonormal columns
    herm: Vec<DMatrix<Complex<T>>>,
    /// Null-space basis of the constraint system (columns).
    null_dirs: DMatrix<T>,
    /// Particular solution coordinates.
    particular: DVector<T>,
}

/// Build the affine t-AC problem on a support; None when the constraints
/// have no solution on that support.
fn support_problem<T: Scalar>(
    j: SpinQuantumNumber,
    t: u32,
    support: DMatrix<Complex<T>>,
) -> Option<SupportProblem<T>> {
    let r = support.ncols();
    let herm = hermitian_basis::<T>(r);
    let basis = tensor_basis_f64(j);
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    for op in basis.iter().filter(|op| op.rank >= 1 && op.rank <= t && op.component >= 0) {
        // G = U† T† U; constraint Tr(G σ) = 0 (real and imaginary parts).
        let tm = DMatrix::from_fn(j.dim(), j.dim(), |a, b| {
            let v = op.matrix[(a, b)];
            Complex::new(real::<T>(v.re), real::<T>(v.im))
        });
        let g = support.adjoint() * tm.adjoint() * &support;
        let mut re_row = Vec::with_capacity(herm.len());
        let mut im_row = Vec::with_capacity(herm.len());
        for h in &herm {
            let val = (&g * h).trace();
            re_row.push(val.re);
            im_row.push(val.im);
        }
        rows.push(re_row);
        rhs.push(T::zero());
        rows.push(im_row);
        rhs.push(T::zero());
    }
    // Unit trace.
    let mut trace_row = vec![T::zero(); herm.len()];
    for (k, h) in herm.iter().enumerate() {
        trace_row[k] = h.trace().re;
    }
    rows.push(trace_row);
    rhs.push(T::one());

    let neq = rows.len();
    let n = herm.len();
    let a = DMatrix::from_fn(neq, n, |i, k| rows[i][k]);
    let b = DVector::from_fn(neq, |i, _| rhs[i]);
    let svd = a.clone().svd(true, true);
    let tol = real::<T>(1e-10);
    let particular = svd.solve(&b, tol).ok()?;
    // Check feasibility of the linear system.
    if ((&a * &particular) - &b).norm() > real::<T>(1e-9) {
        return None;
    }
    // Full null space of A from the Gram matrix AᵀA (the thin SVD does not
    // expose null directions when neq < n).
    let gram = a.transpose() * &a;
    let eig = gram.symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().fold(T::zero(), |m, &v| if v > m { v } else { m });
    let null_tol = (max_eig * real::<T>(1e-12)).max(real::<T>(1e-20));
    let mut null_cols = Vec::new();
    for k in 0..n {
        if eig.eigenvalues[k].abs() < null_tol {
            null_cols.push(eig.eigenvectors.column(k).clone_owned());
        }
    }
    let mut null_dirs = DMatrix::zeros(n, null_cols.len());
    for (c, col) in null_cols.iter().enumerate() {
        null_dirs.set_column(c, col);
    }
    Some(SupportProblem { support, herm, null_dirs, particular })
}

fn min_eig<T: Scalar>(m: &DMatrix<Complex<T>>) -> T {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(real::<T>(f64::INFINITY), |acc, &v| if v < acc { v } else { acc })
}

/// Find a PSD point on the affine slice by alternating projections.
fn feasible_point<T: Scalar>(problem: &SupportProblem<T>) -> Option<DVector<T>> {
    let mut x = problem.particular.clone();
    for _ in 0..300 {
        let sigma = from_coords(&x, &problem.herm);
        if min_eig(&sigma) > real::<T>(-1e-11) {
            return Some(x);
        }
        let psd = project_psd(&sigma);
        let y = to_coords(&psd, &problem.herm);
        // Project back onto the affine solution set.
        let delta = &y - &problem.particular;
        let proj = &problem.null_dirs * (problem.null_dirs.transpose() * delta);
        x = &problem.particular + proj;
    }
    None
}

/// Max purity of a t-AC state found on one support by ray-shooting.
fn search_support<T: Scalar, R: Rng + ?Sized>(
    j: SpinQuantumNumber,
    t: u32,
    support: DMatrix<Complex<T>>,
    rays: usize,
    rng: &mut R,
) -> Option<(T, SpinState<T>)> {
    let problem = support_problem(j, t, support)?;
    let x0 = feasible_point(&problem)?;
    let ndim = problem.null_dirs.ncols();
    let build = |x: &DVector<T>| {
        let sigma = from_coords(x, &problem.herm);
        &problem.support * sigma * problem.support.adjoint()
    };
    let purity_of = |x: &DVector<T>| {
        let m = build(x);
        m.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
    };
    let mut best_x = x0.clone();
    let mut best_purity = purity_of(&best_x);
    if ndim == 0 {
        let rho = SpinState::from_matrix_unchecked(j, build(&best_x));
        return Some((best_purity, rho));
    }
    let mut base = x0.clone();
    for _ in 0..rays {
        let g = DVector::from_fn(ndim, |_, _| real::<T>(StandardNormal.sample(rng)));
        let dir = &problem.null_dirs * g;
        let norm = dir.norm();
        if norm < real::<T>(1e-12) {
            continue;
        }
        let dir = dir.unscale(norm);
        for sign in [T::one(), -T::one()] {
            let d = dir.scale(sign);
            // Bracket the PSD boundary along base + s d.
            let mut lo = T::zero();
            let mut hi = real::<T>(0.5);
            let mut grew = 0;
            while min_eig(&from_coords(&(&base + d.scale(hi)), &problem.herm)) > T::zero() {
                lo = hi;
                hi *= real::<T>(2.0);
                grew += 1;
                if grew > 40 {
                    break;
                }
            }
            for _ in 0..60 {
                let mid = (lo + hi) * real::<T>(0.5);
                if min_eig(&from_coords(&(&base + d.scale(mid)), &problem.herm))
                    > real::<T>(-1e-13)
                {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let candidate = &base + d.scale(lo);
            let p = purity_of(&candidate);
            if p > best_purity {
                best_purity = p;
                best_x = candidate;
            }
        }
        // Hill-climb: continue shooting from near the best point.
        base = best_x.scale(real::<T>(0.95)) + x0.scale(real::<T>(0.05));
    }
    let rho = SpinState::from_matrix_unchecked(j, build(&best_x));
    Some((best_purity, rho))
}

/// Result of the heuristic max-purity search for one (j, t).
#[derive(Clone, Debug)]
pub struct MaxPurityResult<T: Scalar> {
    pub purity: f64,
    pub witness: SpinState<T>,
    pub witness_name: String,
    pub certified: WitnessCertification,
    pub note: Option<String>,
}

fn catalogue_candidates(j: SpinQuantumNumber, t: u32) -> Result<Vec<CatalogueState>> {
    Ok(catalogue::catalogue()?
        .into_iter()
        .filter(|e| e.j == j && e.ac_order >= t)
        .collect())
}

/// Heuristic maximum purity over t-AC states, with the catalogue of
/// explicit states consulted first.
pub fn max_purity_tac<T: Scalar>(
    j: SpinQuantumNumber,
    t: u32,
    opts: &SearchOptions,
) -> Result<MaxPurityResult<T>> {
    AcConstraintSet::new(j, t)?;
    let d = j.dim();
    let mut best: Option<MaxPurityResult<T>> = None;

    for entry in catalogue_candidates(j, t)? {
        let state = entry.to_state::<T>();
        let p = entry.purity_f64();
        if best.as_ref().map_or(true, |b| p > b.purity + 1e-12) {
            best = Some(MaxPurityResult {
                purity: p,
                witness: state,
                witness_name: entry.name.clone(),
                certified: WitnessCertification::ExplicitState,
                note: None,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((t as u64) << 32) ^ j.two_j() as u64);
    let verify_tol = real::<T>(1e-9);
    let consider = |purity: T, rho: SpinState<T>, best: &mut Option<MaxPurityResult<T>>| {
        if !is_t_anticoherent(&rho, t, verify_tol) {
            return;
        }
        let p = crate::to_f64(purity);
        if best.as_ref().map_or(true, |b| p > b.purity + 1e-9) {
            let exceeds = best
                .as_ref()
                .map(|b| b.certified == WitnessCertification::ExplicitState)
                .unwrap_or(false);
            *best = Some(MaxPurityResult {
                purity: p,
                witness: rho,
                witness_name: "search".into(),
                certified: WitnessCertification::HeuristicSearch,
                note: exceeds.then(|| {
                    "heuristic search exceeded the best catalogued state; not a proof of optimality"
                        .to_string()
                }),
            });
        }
    };

    // Structured Dicke-subset supports first.
    for r in 2..=d {
        let subsets = dicke_subsets(d, r, 64);
        for subset in subsets {
            let mut u = DMatrix::zeros(d, r);
            for (col, &row) in subset.iter().enumerate() {
                u[(row, col)] = Complex::from(T::one());
            }
            if let Some((p, rho)) = search_support(j, t, u, opts.rays, &mut rng) {
                consider(p, rho, &mut best);
            }
        }
        // Haar-random supports.
        for _ in 0..opts.random_supports_per_rank {
            let g = DMatrix::from_fn(d, r, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex::new(real::<T>(re), real::<T>(im))
            });
            let u = g.qr().q();
            if let Some((p, rho)) = search_support(j, t, u, opts.rays, &mut rng) {
                consider(p, rho, &mut best);
            }
        }
    }

    best.ok_or_else(|| Error::Domain(format!("no t-AC state found for 2j = {}, t = {t}", j.two_j())))
}

fn dicke_subsets(d: usize, r: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        if out.len() >= cap {
            break;
        }
        // next combination
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + d - r {
                break;
            }
        }
        if idx[i] == i + d - r {
            return out;
        }
        idx[i] += 1;
        for k in (i + 1)..r {
            idx[k] = idx[k - 1] + 1;
        }
    }
    out
}

/// Maximal achievable anticoherence order at each purity on the grid.
pub fn staircase<T: Scalar>(
    j: SpinQuantumNumber,
    purity_grid: &[f64],
    opts: &SearchOptions,
) -> Result<Vec<StaircasePoint<T>>> {
    let d = j.dim() as f64;
    let mut per_t: Vec<MaxPurityResult<T>> = Vec::new();
    for t in 1..=j.two_j() {
        per_t.push(max_purity_tac(j, t, opts)?);
    }
    let mut points = Vec::new();
    for &g in purity_grid {
        if g < 1.0 / d - 1e-9 || g > 1.0 + 1e-9 {
            return Err(Error::Domain(format!(
                "grid purity {g} outside [1/(2j+1), 1]"
            )));
        }
        let mut chosen: Option<(u32, &MaxPurityResult<T>)> = None;
        for (idx, res) in per_t.iter().enumerate() {
            let t = idx as u32 + 1;
            if res.purity >= g - 1e-12 {
                chosen = Some((t, res));
            }
        }
        let (max_order, res) = chosen.ok_or_else(|| {
            Error::Domain(format!("no anticoherent state at purity {g}"))
        })?;
        points.push(StaircasePoint {
            purity: g,
            max_order,
            witness: res.witness.clone(),
            witness_name: res.witness_name.clone(),
            witness_purity: res.purity,
            certified: res.certified,
            note: res.note.clone(),
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constraint_count_formula() {
        let j = SpinQuantumNumber::from_two_j(5);
        for t in 1..=5u32 {
            let c = AcConstraintSet::new(j, t).unwrap();
            assert_eq!(c.constraint_count(), (t * (t + 2)) as usize);
        }
        assert!(AcConstraintSet::new(j, 0).is_err());
        assert!(AcConstraintSet::new(j, 6).is_err());
    }

    #[test]
    fn anticoherence_detection() {
        let j = SpinQuantumNumber::from_two_j(3);
        let mms = SpinState::<f64>::maximally_mixed(j);
        assert!(is_t_anticoherent(&mms, 3, 1e-12));
        let coh = crate::rotation::coherent_state::<f64>(j, 0.3, 0.7).projector();
        assert!(!is_t_anticoherent(&coh, 1, 1e-8));
        let entry = catalogue::j3o2_2ac().unwrap().to_state::<f64>();
        assert!(is_t_anticoherent(&entry, 2, 1e-10));
        assert!(!is_t_anticoherent(&entry, 3, 1e-10));
    }

    #[test]
    fn min_purity_reaches_mms() {
        for two_j in [3u32, 4] {
            let j = SpinQuantumNumber::from_two_j(two_j);
            for t in [1, two_j] {
                let res = min_purity_tac::<f64>(j, t).unwrap();
                assert_abs_diff_eq!(res.purity, 1.0 / j.dim() as f64, epsilon = 1e-9);
                assert!(res.kkt_residual < 1e-8, "KKT residual {}", res.kkt_residual);
                let mms = SpinState::<f64>::maximally_mixed(j);
                assert!((res.witness.matrix() - mms.matrix()).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn max_purity_honors_catalogue() {
        let opts = SearchOptions { random_supports_per_rank: 4, rays: 16, seed: 1 };
        let j32 = SpinQuantumNumber::from_two_j(3);
        let res = max_purity_tac::<f64>(j32, 2, &opts).unwrap();
        assert!(res.purity >= 0.5 - 1e-9);
        // Pure 1-AC states exist at every spin here: GHZ.
        let res1 = max_purity_tac::<f64>(j32, 1, &opts).unwrap();
        assert_abs_diff_eq!(res1.purity, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn staircase_is_monotone() {
        let opts = SearchOptions { random_supports_per_rank: 4, rays: 16, seed: 5 };
        let j = SpinQuantumNumber::from_two_j(3);
        let grid: Vec<f64> = vec![0.25, 0.3, 0.5, 0.7, 1.0];
        let pts = staircase::<f64>(j, &grid, &opts).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].max_order <= w[0].max_order, "staircase must not increase with purity");
        }
        // MMS floor: order 2j at purity 1/(2j+1).
        assert_eq!(pts[0].max_order, 3);
        // Pure ceiling at purity 1: order 1 for spin 3/2.
        assert_eq!(pts.last().unwrap().max_order, 1);
        for p in &pts {
            assert!(is_t_anticoherent(&p.witness, p.max_order, 1e-8));
            assert!(p.witness_purity >= p.purity - 1e-9);
        }
    }

    #[test]
    fn search_finds_nontrivial_states() {
        // Without any catalogue help (j = 1 has no catalogued entries):
        // 1-AC states of spin 1 at purity 1 exist (e.g. |1,0⟩).
        let opts = SearchOptions { random_supports_per_rank: 8, rays: 24, seed: 9 };
        let j = SpinQuantumNumber::from_two_j(2);
        let res = max_purity_tac::<f64>(j, 1, &opts).unwrap();
        assert!(res.purity > 0.99, "found only purity {}", res.purity);
        assert!(is_t_anticoherent(&res.witness, 1, 1e-9));
    }
}
