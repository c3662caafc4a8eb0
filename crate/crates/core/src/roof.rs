//! Convex-roof extensions of pure-state functionals.
//!
//! For ρ = Σ_k λ_k |e_k⟩⟨e_k| of rank r, every size-m pure-state
//! decomposition {p_i, ψ_i} corresponds to an m×r isometry V through
//! ψ̃_i = Σ_k V_ik √λ_k |e_k⟩ (p_i = ‖ψ̃_i‖²), so the roof
//!
//!   min Σ_i p_i f(ψ_i)
//!
//! is minimized over the Stiefel manifold of isometries. The heuristic
//! optimizer runs multi-start descent in the exponential chart
//! V ← exp(iH)V with Hermitian generators, finite-difference gradients
//! (each Givens generator touches two ensemble members, so gradients cost
//! two member re-evaluations per parameter), and a backtracking line
//! search that is invariant under rescaling of the objective.
//!
//! Two analytic fast paths bypass the optimizer: states supported on a
//! verified t-AC subspace (every decomposition member is then t-AC, the
//! negativity roof is exactly t/2), and decompositions whose
//! partially-transposed projectors have pairwise orthogonal images (the
//! negativity is then additive and the candidate decomposition is optimal).

use crate::entangle::{negativity_mixed, negativity_pure, pt_images_orthogonal};
use crate::error::{Error, Result};
use crate::half::SpinQuantumNumber;
use crate::measures::distance_normalizer;
use crate::reduce::{embedding_isometry, reduction_coefficient};
use crate::spin::{PureSpinState, SpinState};
use crate::tensor::tensor_basis_f64;
use crate::{real, Scalar};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// A pure-state decomposition {(p_i, ψ_i)} of a mixed state.
#[derive(Clone, Debug)]
pub struct Ensemble<T: Scalar> {
    pub members: Vec<(T, PureSpinState<T>)>,
}

impl<T: Scalar> Ensemble<T> {
    /// The state Σ p_i |ψ_i⟩⟨ψ_i| this ensemble decomposes.
    pub fn reconstruct(&self) -> Result<SpinState<T>> {
        let parts: Vec<(T, SpinState<T>)> = self
            .members
            .iter()
            .map(|(p, psi)| (*p, psi.projector()))
            .collect();
        SpinState::mixture(&parts)
    }

    /// Check Σ p_i = 1, p_i > 0, and reconstruction of `rho` within `tol`.
    pub fn validate_against(&self, rho: &SpinState<T>, tol: T) -> Result<()> {
        let total: T = self.members.iter().map(|(p, _)| *p).fold(T::zero(), |a, b| a + b);
        if (total - T::one()).abs() > tol {
            return Err(Error::Validation(format!(
                "ensemble weights sum to {} instead of 1",
                crate::to_f64(total)
            )));
        }
        if self.members.iter().any(|(p, _)| *p <= T::zero()) {
            return Err(Error::Validation("ensemble has nonpositive weight".into()));
        }
        let back = self.reconstruct()?;
        let dev = (back.matrix() - rho.matrix()).norm();
        if dev > tol {
            return Err(Error::Validation(format!(
                "ensemble reconstructs the state only to {:e}",
                crate::to_f64(dev)
            )));
        }
        Ok(())
    }
}

/// How a roof value was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Exact by an analytic argument (fast path or unique decomposition).
    Analytic,
    /// Best value found by the multi-start optimizer.
    Heuristic,
}

impl Certification {
    pub fn as_str(self) -> &'static str {
        match self {
            Certification::Analytic => "analytic",
            Certification::Heuristic => "heuristic",
        }
    }
}

/// Roof value together with the minimizing ensemble found.
#[derive(Clone, Debug)]
pub struct RoofResult<T: Scalar> {
    pub value: T,
    pub ensemble: Ensemble<T>,
    pub certified: Certification,
    pub restarts_used: usize,
    /// Spread between the two best restart values (0 for analytic paths).
    pub best_gap: T,
}

/// Optimizer configuration.
#[derive(Clone, Debug)]
pub struct RoofOptions {
    /// Ensemble size m; default min(r², 16) clamped to at least r.
    pub ensemble_size: Option<usize>,
    /// Restart cap.
    pub restarts: usize,
    /// Minimum restarts before the agreement rule may stop early.
    pub min_restarts: usize,
    /// Stop once the two best restarts agree this closely.
    pub agree_tol: f64,
    pub seed: u64,
    pub max_iters: usize,
    /// Eigenvalues below this are treated as outside the support.
    pub rank_tol: f64,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 64,
            min_restarts: 6,
            agree_tol: 1e-6,
            seed: 0,
            max_iters: 300,
            rank_tol: 1e-10,
        }
    }
}

struct SupportData<T: Scalar> {
    j: SpinQuantumNumber,
    weights: Vec<T>,
    vectors: DMatrix<Complex<T>>, // d×r eigenvector columns
}

struct Objective<'a, T: Scalar, F: Fn(&PureSpinState<T>) -> T + Sync> {
    support: &'a SupportData<T>,
    functional: &'a F,
    m: usize,
    r: usize,
}

impl<'a, T: Scalar, F: Fn(&PureSpinState<T>) -> T + Sync> Objective<'a, T, F> {
    /// Weight and functional value of the member encoded in row `row` of V.
    fn member(&self, row: &[Complex<T>]) -> (T, T) {
        let r = self.r;
        let mut c = DVector::zeros(r);
        for k in 0..r {
            c[k] = row[k] * Complex::from(self.support.weights[k].sqrt());
        }
        let p = c.norm_squared();
        if p < real::<T>(1e-14) {
            return (p, T::zero());
        }
        let amps = &self.support.vectors * c.unscale(p.sqrt());
        let psi = PureSpinState::normalized(self.support.j, amps).expect("member is normalized");
        (p, (self.functional)(&psi))
    }

    fn member_values(&self, v: &DMatrix<Complex<T>>) -> Vec<(T, T)> {
        (0..self.m)
            .map(|i| {
                let row: Vec<Complex<T>> = v.row(i).iter().copied().collect();
                self.member(&row)
            })
            .collect()
    }

    fn total_of(values: &[(T, T)]) -> T {
        values.iter().map(|(p, f)| *p * *f).fold(T::zero(), |a, b| a + b)
    }
}

/// The m(m-1) Hermitian Givens generators; diagonal phase generators are
/// omitted (member functionals are phase invariant).
fn generator_rows(q: usize, m: usize) -> (usize, usize, bool) {
    // q indexes pairs (a, b), a < b, twice: once for the real rotation,
    // once for the imaginary one.
    let pair = q / 2;
    let imag = q % 2 == 1;
    let mut count = 0;
    for a in 0..m {
        for b in (a + 1)..m {
            if count == pair {
                return (a, b, imag);
            }
            count += 1;
        }
    }
    unreachable!("generator index out of range")
}

/// Apply exp(i h G) for the Givens generator to rows (a, b) of V.
fn apply_givens<T: Scalar>(
    v: &mut DMatrix<Complex<T>>,
    a: usize,
    b: usize,
    imag: bool,
    h: T,
) {
    let (c, s) = (h.cos(), h.sin());
    let r = v.ncols();
    for k in 0..r {
        let va = v[(a, k)];
        let vb = v[(b, k)];
        if imag {
            // generator X = E_ab + E_ba: exp(ihX) = [[cos, i sin],[i sin, cos]]
            let i_s = Complex::new(T::zero(), s);
            v[(a, k)] = va * Complex::from(c) + vb * i_s;
            v[(b, k)] = va * i_s + vb * Complex::from(c);
        } else {
            // generator Y = -i E_ab + i E_ba: exp(ihY) = real rotation
            v[(a, k)] = va * Complex::from(c) + vb * Complex::from(s);
            v[(b, k)] = vb * Complex::from(c) - va * Complex::from(s);
        }
    }
}

fn haar_isometry<T: Scalar, R: Rng + ?Sized>(m: usize, r: usize, rng: &mut R) -> DMatrix<Complex<T>> {
    let g = DMatrix::from_fn(m, r, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(real::<T>(re), real::<T>(im))
    });
    g.qr().q()
}

fn eigen_start<T: Scalar>(m: usize, r: usize) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(m, r, |i, k| {
        if i == k {
            Complex::from(T::one())
        } else {
            Complex::from(T::zero())
        }
    })
}

/// Kink-tolerant refinement: cyclic one-dimensional minimization over each
/// Givens angle (coarse grid, then golden-section). Pure-state functionals
/// like the negativity are only piecewise smooth (kinks where a Schmidt
/// coefficient vanishes, which is exactly where optima often sit), so the
/// gradient phase stalls there and this phase finishes the job.
fn coordinate_polish<T: Scalar, F: Fn(&PureSpinState<T>) -> T + Sync>(
    objective: &Objective<'_, T, F>,
    v: &mut DMatrix<Complex<T>>,
    values: &mut Vec<(T, T)>,
    total: &mut T,
    sweeps: usize,
) {
    let m = objective.m;
    let nparams = m * (m - 1);
    let eval_at = |v: &DMatrix<Complex<T>>, values: &[(T, T)], total: T, a: usize, b: usize, imag: bool, h: T| {
        let mut vv = v.clone();
        apply_givens(&mut vv, a, b, imag, h);
        let ra: Vec<Complex<T>> = vv.row(a).iter().copied().collect();
        let rb: Vec<Complex<T>> = vv.row(b).iter().copied().collect();
        let (pa, fa) = objective.member(&ra);
        let (pb, fb) = objective.member(&rb);
        total - values[a].0 * values[a].1 - values[b].0 * values[b].1 + pa * fa + pb * fb
    };
    for _ in 0..sweeps {
        let mut improved = false;
        for q in 0..nparams {
            let (a, b, imag) = generator_rows(q, m);
            // Coarse scan.
            let mut best_h = T::zero();
            let mut best_val = *total;
            let width = real::<T>(0.6);
            for step in -6..=6i32 {
                if step == 0 {
                    continue;
                }
                let h = width * real::<T>(step as f64 / 6.0);
                let val = eval_at(v, values, *total, a, b, imag, h);
                if val < best_val {
                    best_val = val;
                    best_h = h;
                }
            }
            // Golden-section refinement around the best grid point.
            let gr = real::<T>(0.618_033_988_749_894_9);
            let mut lo = best_h - width * real::<T>(1.0 / 6.0);
            let mut hi = best_h + width * real::<T>(1.0 / 6.0);
            for _ in 0..36 {
                let m1 = hi - (hi - lo) * gr;
                let m2 = lo + (hi - lo) * gr;
                let f1 = eval_at(v, values, *total, a, b, imag, m1);
                let f2 = eval_at(v, values, *total, a, b, imag, m2);
                if f1 < f2 {
                    hi = m2;
                    if f1 < best_val {
                        best_val = f1;
                        best_h = m1;
                    }
                } else {
                    lo = m1;
                    if f2 < best_val {
                        best_val = f2;
                        best_h = m2;
                    }
                }
            }
            if best_val < *total - real::<T>(1e-15) && best_h != T::zero() {
                apply_givens(v, a, b, imag, best_h);
                let ra: Vec<Complex<T>> = v.row(a).iter().copied().collect();
                let rb: Vec<Complex<T>> = v.row(b).iter().copied().collect();
                values[a] = objective.member(&ra);
                values[b] = objective.member(&rb);
                *total = Objective::<T, F>::total_of(values);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}

fn descend<T: Scalar, F: Fn(&PureSpinState<T>) -> T + Sync>(
    objective: &Objective<'_, T, F>,
    mut v: DMatrix<Complex<T>>,
    max_iters: usize,
) -> (T, DMatrix<Complex<T>>) {
    let m = objective.m;
    let nparams = m * (m - 1);
    let fd = real::<T>(1e-4);
    let mut values = objective.member_values(&v);
    let mut total = Objective::<T, F>::total_of(&values);
    let mut step = real::<T>(0.25);
    let gtol = real::<T>(1e-9);
    let mut stalled = false;

    for _ in 0..max_iters {
        // Finite-difference gradient; each generator touches two rows only.
        let mut grad = vec![T::zero(); nparams];
        let mut gnorm_sq = T::zero();
        for q in 0..nparams {
            let (a, b, imag) = generator_rows(q, m);
            let probe = |h: T, v: &DMatrix<Complex<T>>| {
                let mut vv = v.clone();
                apply_givens(&mut vv, a, b, imag, h);
                let ra: Vec<Complex<T>> = vv.row(a).iter().copied().collect();
                let rb: Vec<Complex<T>> = vv.row(b).iter().copied().collect();
                let (pa, fa) = objective.member(&ra);
                let (pb, fb) = objective.member(&rb);
                total - values[a].0 * values[a].1 - values[b].0 * values[b].1
                    + pa * fa
                    + pb * fb
            };
            let plus = probe(fd, &v);
            let minus = probe(-fd, &v);
            let g = (plus - minus) / (real::<T>(2.0) * fd);
            gnorm_sq += g * g;
            grad[q] = g;
        }
        let gnorm = gnorm_sq.sqrt();
        if gnorm < gtol {
            break;
        }

        // Backtracking line search along -grad (normalized), Armijo with a
        // scale-invariant right-hand side.
        let dir: Vec<T> = grad.iter().map(|&g| -g / gnorm).collect();
        let mut alpha = step;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = v.clone();
            for q in 0..nparams {
                let (a, b, imag) = generator_rows(q, m);
                let h = dir[q] * alpha;
                if h != T::zero() {
                    apply_givens(&mut trial, a, b, imag, h);
                }
            }
            let trial_values = objective.member_values(&trial);
            let trial_total = Objective::<T, F>::total_of(&trial_values);
            if trial_total <= total - real::<T>(1e-4) * alpha * gnorm {
                v = trial;
                values = trial_values;
                let improvement = total - trial_total;
                total = trial_total;
                step = (alpha * real::<T>(2.0)).min(real::<T>(0.5));
                accepted = true;
                if improvement < real::<T>(1e-14) {
                    return (total, v);
                }
                break;
            }
            alpha *= real::<T>(0.5);
            if alpha < real::<T>(1e-12) {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    (total, v)
}

/// Convert a known decomposition of ρ into a starting isometry
/// (m×r, padded with zero-weight members when m exceeds the ensemble size).
pub fn ensemble_to_isometry<T: Scalar>(
    rho: &SpinState<T>,
    ensemble: &Ensemble<T>,
    m: usize,
    rank_tol: T,
) -> Result<DMatrix<Complex<T>>> {
    let (weights, vectors) = rho.support_decomposition(rank_tol);
    let r = weights.len();
    if ensemble.members.len() > m {
        return Err(Error::Domain(format!(
            "ensemble of {} members exceeds ensemble size {m}",
            ensemble.members.len()
        )));
    }
    let mut v = DMatrix::zeros(m, r);
    for (i, (p, psi)) in ensemble.members.iter().enumerate() {
        for k in 0..r {
            let ek = vectors.column(k);
            let overlap = ek.dotc(psi.amplitudes());
            v[(i, k)] = overlap * Complex::from(p.sqrt() / weights[k].sqrt());
        }
    }
    // Kill floating-point drift with the polar factor V(V†V)^{-1/2};
    // unlike QR this cannot introduce column phases, so the encoded
    // ensemble is preserved.
    let gram = v.adjoint() * &v;
    let eig = gram.symmetric_eigen();
    let mut inv_sqrt = DMatrix::zeros(r, r);
    for k in 0..r {
        let lam = eig.eigenvalues[k].max(real::<T>(1e-14));
        let col = eig.eigenvectors.column(k);
        inv_sqrt += (col * col.adjoint()).scale(T::one() / lam.sqrt());
    }
    Ok(v * inv_sqrt)
}

/// Heuristic convex roof of an arbitrary pure-state functional.
pub fn convex_roof<T, F>(rho: &SpinState<T>, functional: F, opts: &RoofOptions) -> Result<RoofResult<T>>
where
    T: Scalar,
    F: Fn(&PureSpinState<T>) -> T + Sync,
{
    convex_roof_with_starts(rho, functional, opts, &[])
}

/// Convex roof with additional caller-supplied starting isometries
/// (known decompositions to polish; the result can only improve on them).
pub fn convex_roof_with_starts<T, F>(
    rho: &SpinState<T>,
    functional: F,
    opts: &RoofOptions,
    starts: &[DMatrix<Complex<T>>],
) -> Result<RoofResult<T>>
where
    T: Scalar,
    F: Fn(&PureSpinState<T>) -> T + Sync,
{
    let rank_tol = real::<T>(opts.rank_tol);
    let min_eig = rho.min_eigenvalue();
    if min_eig < -rank_tol {
        return Err(Error::Validation(format!(
            "state is not positive semidefinite (min eigenvalue {:e})",
            crate::to_f64(min_eig)
        )));
    }
    let (weights, vectors) = rho.support_decomposition(rank_tol);
    let r = weights.len();
    let support = SupportData { j: rho.j(), weights, vectors };

    if r == 1 {
        let amps = support.vectors.column(0).clone_owned();
        let psi = PureSpinState::normalized(rho.j(), amps)?;
        let value = functional(&psi);
        return Ok(RoofResult {
            value,
            ensemble: Ensemble { members: vec![(T::one(), psi)] },
            certified: Certification::Analytic,
            restarts_used: 1,
            best_gap: T::zero(),
        });
    }

    let m = opts.ensemble_size.unwrap_or_else(|| (r * r).min(16).max(r));
    if m < r {
        return Err(Error::Domain(format!("ensemble size {m} below rank {r}")));
    }
    let objective = Objective { support: &support, functional: &functional, m, r };

    let mut all: Vec<(T, DMatrix<Complex<T>>)> = Vec::new();
    let mut done = 0usize;
    let batch = 8usize;
    while done < opts.restarts {
        let upper = (done + batch).min(opts.restarts);
        let mut results: Vec<(T, DMatrix<Complex<T>>)> = (done..upper)
            .into_par_iter()
            .map(|k| {
                let v0 = if k == 0 {
                    eigen_start::<T>(m, r)
                } else if k <= starts.len() {
                    starts[k - 1].clone()
                } else {
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(opts.seed ^ (k as u64).wrapping_mul(0x9E37_79B9));
                    haar_isometry::<T, _>(m, r, &mut rng)
                };
                descend(&objective, v0, opts.max_iters)
            })
            .collect();
        all.append(&mut results);
        done = upper;
        if done >= opts.min_restarts.max(2) {
            let mut vals: Vec<T> = all.iter().map(|(v, _)| *v).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if crate::to_f64(vals[1] - vals[0]) < opts.agree_tol {
                break;
            }
        }
    }

    let best_idx = all
        .iter()
        .enumerate()
        .min_by(|(ia, (va, _)), (ib, (vb, _))| {
            va.partial_cmp(vb).unwrap().then(ia.cmp(ib))
        })
        .map(|(i, _)| i)
        .unwrap();
    let (best_value, best_v) = all[best_idx].clone();
    let mut sorted: Vec<T> = all.iter().map(|(v, _)| *v).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let best_gap = if sorted.len() > 1 { sorted[1] - sorted[0] } else { T::zero() };

    // Assemble the minimizing ensemble from the best isometry.
    let mut members = Vec::new();
    for i in 0..m {
        let row: Vec<Complex<T>> = best_v.row(i).iter().copied().collect();
        let mut c = DVector::zeros(r);
        for k in 0..r {
            c[k] = row[k] * Complex::from(support.weights[k].sqrt());
        }
        let p = c.norm_squared();
        if p > real::<T>(1e-12) {
            let amps = &support.vectors * c.unscale(p.sqrt());
            members.push((p, PureSpinState::normalized(rho.j(), amps)?));
        }
    }

    Ok(RoofResult {
        value: best_value,
        ensemble: Ensemble { members },
        certified: Certification::Heuristic,
        restarts_used: done,
        best_gap,
    })
}

/// Sparse stripes of T_LM (L ≤ t) with the squared reduction coefficients,
/// for fast evaluation of reduced purity on pure states.
struct RankStripes {
    /// (c²_{N,t,L}, entries (row, col, value)) per (L, M).
    stripes: Vec<(f64, Vec<(usize, usize, f64)>)>,
}

fn rank_stripes(j: SpinQuantumNumber, t: u32) -> Result<RankStripes> {
    let basis = tensor_basis_f64(j);
    let n = j.two_j();
    let mut stripes = Vec::new();
    for op in basis.iter().filter(|op| op.rank >= 1 && op.rank <= t) {
        let c = reduction_coefficient(n, t, op.rank)?.value;
        let mut entries = Vec::new();
        for row in 0..op.matrix.nrows() {
            for col in 0..op.matrix.ncols() {
                let v = op.matrix[(row, col)];
                if v.re != 0.0 {
                    entries.push((row, col, v.re));
                }
            }
        }
        stripes.push((c * c, entries));
    }
    Ok(RankStripes { stripes })
}

/// Tr(ρ_t²) − 1/(t+1) of a pure state from precomputed stripes.
fn reduced_purity_excess<T: Scalar>(stripes: &RankStripes, amps: &DVector<Complex<T>>) -> T {
    let mut acc = T::zero();
    for (c2, entries) in &stripes.stripes {
        let mut moment = Complex::from(T::zero());
        for &(row, col, v) in entries {
            moment += amps[row].conj() * amps[col] * Complex::from(real::<T>(v));
        }
        acc += real::<T>(*c2) * moment.norm_sqr();
    }
    acc
}

fn check_t(n: u32, t: u32) -> Result<()> {
    if t < 1 || t > n {
        return Err(Error::Domain(format!("t = {t} outside 1..=N (N = {n})")));
    }
    Ok(())
}

/// Does the image (support) of ρ lie in a t-AC subspace? Verified on every
/// eigenvector plus `samples` Haar-random support combinations.
pub fn support_is_t_anticoherent<T: Scalar>(
    rho: &SpinState<T>,
    t: u32,
    tol: T,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    check_t(rho.j().two_j(), t)?;
    let stripes = rank_stripes(rho.j(), t)?;
    let (weights, vectors) = rho.support_decomposition(real(1e-10));
    let r = weights.len();
    // Moments are quadratic forms; checking ψ† T ψ < tol for rank ≤ t.
    let check = |amps: &DVector<Complex<T>>| -> bool {
        for (_, entries) in &stripes.stripes {
            let mut moment = Complex::from(T::zero());
            for &(row, col, v) in entries {
                moment += amps[row].conj() * amps[col] * Complex::from(real::<T>(v));
            }
            if moment.norm_sqr().sqrt() > tol {
                return false;
            }
        }
        true
    };
    for k in 0..r {
        if !check(&vectors.column(k).clone_owned()) {
            return Ok(false);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut c = DVector::zeros(r);
        for k in 0..r {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            c[k] = Complex::new(real::<T>(re), real::<T>(im));
        }
        let amps = &vectors * c;
        let norm = amps.norm();
        if !check(&amps.unscale(norm)) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn eigen_ensemble<T: Scalar>(rho: &SpinState<T>, rank_tol: T) -> Result<Ensemble<T>> {
    let (weights, vectors) = rho.support_decomposition(rank_tol);
    let mut members = Vec::new();
    for (k, &w) in weights.iter().enumerate() {
        members.push((w, PureSpinState::normalized(rho.j(), vectors.column(k).clone_owned())?));
    }
    Ok(Ensemble { members })
}

/// Fast path: if the image of ρ is a t-AC subspace, the convex-roof
/// negativity equals t/2 exactly (every decomposition member is t-AC and
/// has maximal negativity).
pub fn roof_shortcut_ac_subspace<T: Scalar>(
    rho: &SpinState<T>,
    t: u32,
) -> Result<Option<RoofResult<T>>> {
    let tol = real::<T>(1e-9);
    if !support_is_t_anticoherent(rho, t, tol, 50, 0xAC)? {
        return Ok(None);
    }
    let ensemble = eigen_ensemble(rho, real(1e-10))?;
    Ok(Some(RoofResult {
        value: real::<T>(t as f64 / 2.0),
        ensemble,
        certified: Certification::Analytic,
        restarts_used: 0,
        best_gap: T::zero(),
    }))
}

/// Fast path: if the partial-transpose images of the candidate members are
/// pairwise orthogonal, the negativity is additive over the decomposition
/// and the candidate is an optimal roof decomposition:
/// N_t(ρ) ≤ N^CR ≤ Σ p_i N_t(ψ_i) = N_t(ρ).
pub fn roof_shortcut_orthogonal_pt<T: Scalar>(
    rho: &SpinState<T>,
    t: u32,
    candidate: &Ensemble<T>,
) -> Result<Option<RoofResult<T>>> {
    let n = rho.j().two_j();
    if t < 1 || t >= n {
        return Err(Error::Domain(format!("bipartition needs 1 ≤ t ≤ N-1, got t = {t}")));
    }
    candidate.validate_against(rho, real(1e-9))?;
    let dims = (t as usize + 1, (n - t) as usize + 1);
    let tol = real::<T>(1e-10);
    let embedded: Vec<DMatrix<Complex<T>>> = candidate
        .members
        .iter()
        .map(|(_, psi)| {
            let w = embedding_isometry::<T>(rho.j(), t)?;
            let v = &w * psi.amplitudes();
            Ok(&v * v.adjoint())
        })
        .collect::<Result<_>>()?;
    for a in 0..embedded.len() {
        for b in (a + 1)..embedded.len() {
            if !pt_images_orthogonal(&embedded[a], &embedded[b], dims, tol)? {
                return Ok(None);
            }
        }
    }
    let mut value = T::zero();
    for (p, psi) in &candidate.members {
        value += *p * negativity_pure(psi, t)?;
    }
    Ok(Some(RoofResult {
        value,
        ensemble: candidate.clone(),
        certified: Certification::Analytic,
        restarts_used: 0,
        best_gap: T::zero(),
    }))
}

/// Convex-roof negativity N_t^CR. Tries the t-AC-subspace and
/// orthogonal-PT fast paths before falling back to the optimizer.
pub fn negativity_roof<T: Scalar>(
    rho: &SpinState<T>,
    t: u32,
    opts: &RoofOptions,
) -> Result<RoofResult<T>> {
    let n = rho.j().two_j();
    if t < 1 || t >= n {
        return Err(Error::Domain(format!(
            "bipartition needs 1 ≤ t ≤ N-1, got t = {t} (N = {n})"
        )));
    }
    if let Some(hit) = roof_shortcut_ac_subspace(rho, t)? {
        return Ok(hit);
    }
    let eigen = eigen_ensemble(rho, real(opts.rank_tol))?;
    if let Some(hit) = roof_shortcut_orthogonal_pt(rho, t, &eigen)? {
        return Ok(hit);
    }
    let w = embedding_isometry::<T>(rho.j(), t)?;
    let dims = (t as usize + 1, (n - t) as usize + 1);
    let functional = move |psi: &PureSpinState<T>| -> T {
        let v = &w * psi.amplitudes();
        let mut m = DMatrix::<Complex<T>>::zeros(dims.0, dims.1);
        for a in 0..dims.0 {
            for b in 0..dims.1 {
                m[(a, b)] = v[a * dims.1 + b];
            }
        }
        let svd = m.svd(false, false);
        let s: T = svd.singular_values.iter().copied().fold(T::zero(), |x, y| x + y);
        (s * s - T::one()) / real::<T>(2.0)
    };
    convex_roof(rho, functional, opts)
}

/// Quantum purity-based measure: roof of (t+1)/t (1 − Tr σ_t²).
pub fn quantum_purity<T: Scalar>(
    rho: &SpinState<T>,
    t: u32,
    opts: &RoofOptions,
) -> Result<RoofResult<T>> {
    check_t(rho.j().two_j(), t)?;
    if let Some(mut hit) = roof_shortcut_ac_subspace(rho, t)? {
        hit.value = T::one();
        return Ok(hit);
    }
    let stripes = rank_stripes(rho.j(), t)?;
    let scale = real::<T>((t as f64 + 1.0) / t as f64);
    let max_excess = real::<T>(t as f64 / (t as f64 + 1.0));
    let functional = move |psi: &PureSpinState<T>| -> T {
        // 1 − Tr σ_t² = t/(t+1) − Σ c² a_L
        scale * (max_excess - reduced_purity_excess(&stripes, psi.amplitudes()))
    };
    convex_roof(rho, functional, opts)
}

/// Quantum Hilbert-Schmidt measure: roof of 1 − d₂(σ_t, MMS)/K_t.
pub fn quantum_hs<T: Scalar>(
    rho: &SpinState<T>,
    t: u32,
    opts: &RoofOptions,
) -> Result<RoofResult<T>> {
    check_t(rho.j().two_j(), t)?;
    if let Some(mut hit) = roof_shortcut_ac_subspace(rho, t)? {
        hit.value = T::one();
        return Ok(hit);
    }
    let stripes = rank_stripes(rho.j(), t)?;
    let k_t = distance_normalizer::<T>(t, 2);
    let functional = move |psi: &PureSpinState<T>| -> T {
        let d2 = reduced_purity_excess(&stripes, psi.amplitudes()).max(T::zero()).sqrt();
        T::one() - d2 / k_t
    };
    convex_roof(rho, functional, opts)
}

/// Quantum fidelity-based measure (2/t)·N_t^CR.
pub fn quantum_fidelity<T: Scalar>(
    rho: &SpinState<T>,
    t: u32,
    opts: &RoofOptions,
) -> Result<RoofResult<T>> {
    let mut roof = negativity_roof(rho, t, opts)?;
    let scale = real::<T>(2.0 / t as f64);
    roof.value *= scale;
    roof.best_gap *= scale;
    Ok(roof)
}

/// Lower bound check value for the negativity roof.
pub fn negativity_lower_bound<T: Scalar>(rho: &SpinState<T>, t: u32) -> Result<T> {
    negativity_mixed(rho, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::coherent_state;
    use crate::spin::random_mixed;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pure_state_roof_is_direct_evaluation() {
        let j = SpinQuantumNumber::from_two_j(4);
        let psi = coherent_state::<f64>(j, 1.0, 0.5);
        let opts = RoofOptions::default();
        let res = quantum_purity(&psi.projector(), 2, &opts).unwrap();
        assert_eq!(res.certified, Certification::Analytic);
        assert_abs_diff_eq!(res.value, 0.0, epsilon = 1e-10);
        assert_eq!(res.ensemble.members.len(), 1);
    }

    #[test]
    fn roof_never_exceeds_eigen_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let j = SpinQuantumNumber::from_two_j(3);
        let opts = RoofOptions { restarts: 8, ..Default::default() };
        for _ in 0..3 {
            let rho = random_mixed::<f64, _>(j, 2, &mut rng);
            let eigen = eigen_ensemble(&rho, 1e-10).unwrap();
            let mut avg = 0.0;
            for (p, psi) in &eigen.members {
                avg += p * (2.0) * (1.0 - crate::reduce::reduce(&psi.projector(), 1).unwrap().as_state().purity());
            }
            let res = quantum_purity(&rho, 1, &opts).unwrap();
            assert!(res.value <= avg + 1e-9);
            res.ensemble.validate_against(&rho, 1e-8).unwrap();
        }
    }

    #[test]
    fn roof_bounded_below_by_negativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let j = SpinQuantumNumber::from_two_j(4);
        let opts = RoofOptions { restarts: 12, ..Default::default() };
        for _ in 0..3 {
            let rho = random_mixed::<f64, _>(j, 2, &mut rng);
            for t in [1u32, 2] {
                let lower = negativity_mixed(&rho, t).unwrap();
                let roof = negativity_roof(&rho, t, &opts).unwrap();
                assert!(
                    roof.value >= lower - 1e-7,
                    "roof {} below negativity {lower}",
                    roof.value
                );
            }
        }
    }

    #[test]
    fn ensemble_isometry_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let j = SpinQuantumNumber::from_two_j(2);
        let rho = random_mixed::<f64, _>(j, 2, &mut rng);
        let eigen = eigen_ensemble(&rho, 1e-10).unwrap();
        let v = ensemble_to_isometry(&rho, &eigen, 4, 1e-10).unwrap();
        let gram = v.adjoint() * &v;
        let id = DMatrix::<Complex<f64>>::identity(2, 2);
        assert!((gram - id).norm() < 1e-10);
    }

    #[test]
    fn rejects_small_ensembles_and_bad_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let j = SpinQuantumNumber::from_two_j(2);
        let rho = random_mixed::<f64, _>(j, 3, &mut rng);
        let opts = RoofOptions { ensemble_size: Some(2), ..Default::default() };
        assert!(quantum_purity(&rho, 1, &opts).is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let j = SpinQuantumNumber::from_two_j(3);
        let rho = random_mixed::<f64, _>(j, 2, &mut rng);
        let opts = RoofOptions { restarts: 8, seed: 42, ..Default::default() };
        let a = quantum_purity(&rho, 1, &opts).unwrap();
        let b = quantum_purity(&rho, 1, &opts).unwrap();
        assert_eq!(a.value, b.value);
    }
}
