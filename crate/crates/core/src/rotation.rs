//! Wigner rotation matrices and SU(2) coherent states.
//!
//! Conventions: U(α, β, γ) = e^{-iα J_z} e^{-iβ J_y} e^{-iγ J_z} with the
//! small-d matrix
//!
//!   d^j_{m',m}(β) = Σ_s (-1)^{m'-m+s} √((j+m')!(j-m')!(j+m)!(j-m)!)
//!                   / [(j+m-s)! s! (m'-m+s)! (j-m'-s)!]
//!                   cos(β/2)^{2j+m-m'-2s} sin(β/2)^{m'-m+2s}.

use crate::half::SpinQuantumNumber;
use crate::spin::{PureSpinState, SpinState};
use crate::{real, Scalar};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

fn ln_factorial(n: i64) -> f64 {
    debug_assert!(n >= 0);
    let mut acc = 0.0;
    for k in 2..=n {
        acc += (k as f64).ln();
    }
    acc
}

/// Wigner small-d matrix element d^j_{m',m}(β); doubled quantum numbers.
pub fn wigner_d_element(two_j: u32, two_mp: i32, two_m: i32, beta: f64) -> f64 {
    let j2 = two_j as i64;
    let mp2 = two_mp as i64;
    let m2 = two_m as i64;
    let half = beta / 2.0;
    let (c, s) = (half.cos(), half.sin());
    let prefactor_ln = 0.5
        * (ln_factorial((j2 + mp2) / 2)
            + ln_factorial((j2 - mp2) / 2)
            + ln_factorial((j2 + m2) / 2)
            + ln_factorial((j2 - m2) / 2));
    let s_min = 0.max((m2 - mp2) / 2);
    let s_max = ((j2 + m2) / 2).min((j2 - mp2) / 2);
    let mut acc = 0.0;
    let mut k = s_min;
    while k <= s_max {
        let a = (j2 + m2) / 2 - k;
        let b = k;
        let c_idx = (mp2 - m2) / 2 + k;
        let d_idx = (j2 - mp2) / 2 - k;
        if a >= 0 && c_idx >= 0 && d_idx >= 0 {
            let denom_ln =
                ln_factorial(a) + ln_factorial(b) + ln_factorial(c_idx) + ln_factorial(d_idx);
            let cos_pow = j2 + (m2 - mp2) / 2 - 2 * k; // exponent on cos(β/2)
            let sin_pow = (mp2 - m2) / 2 + 2 * k;
            let sign = if c_idx % 2 == 0 { 1.0 } else { -1.0 };
            let mag = (prefactor_ln - denom_ln).exp()
                * c.powi(cos_pow as i32)
                * s.powi(sin_pow as i32);
            acc += sign * mag;
        }
        k += 1;
    }
    acc
}

/// Full spin-j Wigner-D matrix U(α, β, γ) in the |j,m⟩ basis.
pub fn wigner_d_matrix<T: Scalar>(
    j: SpinQuantumNumber,
    alpha: T,
    beta: T,
    gamma: T,
) -> DMatrix<Complex<T>> {
    let d = j.dim();
    let (a, b, g) = (crate::to_f64(alpha), crate::to_f64(beta), crate::to_f64(gamma));
    let mut u = DMatrix::zeros(d, d);
    for (row, two_mp) in j.two_m_values().enumerate() {
        for (col, two_m) in j.two_m_values().enumerate() {
            let small = wigner_d_element(j.two_j(), two_mp, two_m, b);
            let phase = -(two_mp as f64 / 2.0) * a - (two_m as f64 / 2.0) * g;
            let z = Complex::new(phase.cos(), phase.sin()) * small;
            u[(row, col)] = Complex::new(real(z.re), real(z.im));
        }
    }
    u
}

/// Rotate a state: ρ ↦ U ρ U†.
pub fn rotate<T: Scalar>(rho: &SpinState<T>, euler: (T, T, T)) -> SpinState<T> {
    let u = wigner_d_matrix(rho.j(), euler.0, euler.1, euler.2);
    let m = &u * rho.matrix() * u.adjoint();
    SpinState::from_matrix_unchecked(rho.j(), m)
}

/// Rotate a pure state: ψ ↦ U ψ.
pub fn rotate_pure<T: Scalar>(psi: &PureSpinState<T>, euler: (T, T, T)) -> PureSpinState<T> {
    let u = wigner_d_matrix(psi.j(), euler.0, euler.1, euler.2);
    let amps = &u * psi.amplitudes();
    PureSpinState::normalized(psi.j(), amps).expect("rotation preserves the norm")
}

/// SU(2) coherent state |θ, φ⟩ = R(θ, φ)|j, j⟩ with amplitudes
/// c_m = √C(2j, j+m) cos(θ/2)^{j+m} sin(θ/2)^{j-m} e^{i(j-m)φ}.
pub fn coherent_state<T: Scalar>(j: SpinQuantumNumber, theta: T, phi: T) -> PureSpinState<T> {
    let (th, ph) = (crate::to_f64(theta), crate::to_f64(phi));
    let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
    let j2 = j.two_j() as i64;
    let mut amps = DVector::zeros(j.dim());
    for (k, two_m) in j.two_m_values().enumerate() {
        let up = (j2 + two_m as i64) / 2; // j + m
        let down = (j2 - two_m as i64) / 2; // j - m
        let ln_binom = ln_factorial(j2) - ln_factorial(up) - ln_factorial(down);
        let mag = (0.5 * ln_binom).exp() * c.powi(up as i32) * s.powi(down as i32);
        let phase = down as f64 * ph;
        amps[k] = Complex::new(real(mag * phase.cos()), real(mag * phase.sin()));
    }
    PureSpinState::normalized(j, amps).expect("coherent amplitudes are normalized")
}

/// Sample uniform Euler angles for a Haar-random rotation.
pub fn random_euler<T: Scalar, R: rand::Rng + ?Sized>(rng: &mut R) -> (T, T, T) {
    use rand::distributions::Uniform;
    let two_pi = std::f64::consts::TAU;
    let alpha = rng.sample(Uniform::new(0.0, two_pi));
    let gamma = rng.sample(Uniform::new(0.0, two_pi));
    // β with density sin(β)/2 on [0, π]
    let u: f64 = rng.gen();
    let beta = (1.0 - 2.0 * u).acos();
    (real(alpha), real(beta), real(gamma))
}

/// Consistency check used by several property tests.
pub fn is_unitary<T: Scalar>(u: &DMatrix<Complex<T>>, tol: T) -> bool {
    let n = u.nrows();
    let id = DMatrix::<Complex<T>>::identity(n, n);
    (u.adjoint() * u - id).norm() < tol
}
