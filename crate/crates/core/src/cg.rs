//! Clebsch-Gordan coefficients in the Condon-Shortley convention.
//!
//! Coefficients are computed from the Racah factorial sum in exact rational
//! arithmetic: every coefficient is (rational) · √(rational), and the two
//! parts are produced exactly before a single conversion to floating point.
//! Results are memoized behind a mutex; the cache is shared and safe for
//! concurrent use.

use crate::error::{Error, Result};
use crate::exact::{factorial, rat_to_f64, Exact, Rat};
use crate::half::valid_projection;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Key {
    two_j1: u32,
    two_m1: i32,
    two_j2: u32,
    two_m2: i32,
    two_big_j: u32,
    two_big_m: i32,
}

fn cache() -> &'static Mutex<HashMap<Key, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn check_args(two_j1: u32, two_m1: i32, two_j2: u32, two_m2: i32, two_big_j: u32, two_big_m: i32) -> Result<()> {
    for (tj, tm) in [(two_j1, two_m1), (two_j2, two_m2), (two_big_j, two_big_m)] {
        if !valid_projection(tj, tm) {
            return Err(Error::QuantumNumber(format!(
                "projection 2m = {tm} invalid for 2j = {tj}"
            )));
        }
    }
    Ok(())
}

fn triangle_ok(two_j1: u32, two_j2: u32, two_big_j: u32) -> bool {
    let lo = two_j1.abs_diff(two_j2);
    let hi = two_j1 + two_j2;
    // J must lie in the triangle range and j1 + j2 + J must be an integer.
    two_big_j >= lo && two_big_j <= hi && (two_j1 + two_j2 + two_big_j) % 2 == 0
}

fn fact2(x: i32) -> BigInt {
    debug_assert!(x >= 0 && x % 2 == 0, "factorial of half-integer");
    factorial((x / 2) as u64)
}

/// Exact Clebsch-Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩ as the pair
/// (S, A) with value = S·√A, both exact rationals (A ≥ 0).
pub fn clebsch_gordan_exact_parts(
    two_j1: u32,
    two_m1: i32,
    two_j2: u32,
    two_m2: i32,
    two_big_j: u32,
    two_big_m: i32,
) -> Result<(Rat, Rat)> {
    check_args(two_j1, two_m1, two_j2, two_m2, two_big_j, two_big_m)?;
    if two_m1 + two_m2 != two_big_m || !triangle_ok(two_j1, two_j2, two_big_j) {
        return Ok((Rat::zero(), Rat::zero()));
    }

    let j1 = two_j1 as i32;
    let j2 = two_j2 as i32;
    let jj = two_big_j as i32;
    let (m1, m2, mm) = (two_m1, two_m2, two_big_m);

    // Radicand: (2J+1) Δ(j1 j2 J) (J+M)!(J-M)!(j1+m1)!(j1-m1)!(j2+m2)!(j2-m2)!
    let mut radicand = BigRational::from(BigInt::from(jj + 1));
    radicand *= Rat::new(
        fact2(j1 + j2 - jj) * fact2(j1 - j2 + jj) * fact2(-j1 + j2 + jj),
        fact2(j1 + j2 + jj + 2),
    );
    radicand *= Rat::from(
        fact2(jj + mm) * fact2(jj - mm) * fact2(j1 + m1) * fact2(j1 - m1) * fact2(j2 + m2) * fact2(j2 - m2),
    );

    // Alternating factorial sum over k (doubled indices step by 2).
    let k_min = 0.max(-(jj - j2 + m1)).max(-(jj - j1 - m2));
    let k_max = (j1 + j2 - jj).min(j1 - m1).min(j2 + m2);
    let mut series = Rat::zero();
    let mut two_k = k_min;
    while two_k <= k_max {
        let denom = fact2(two_k)
            * fact2(j1 + j2 - jj - two_k)
            * fact2(j1 - m1 - two_k)
            * fact2(j2 + m2 - two_k)
            * fact2(jj - j2 + m1 + two_k)
            * fact2(jj - j1 - m2 + two_k);
        let term = Rat::new(BigInt::one(), denom);
        if (two_k / 2) % 2 == 0 {
            series += term;
        } else {
            series -= term;
        }
        two_k += 2;
    }

    Ok((series, radicand))
}

/// Clebsch-Gordan coefficient as a floating-point number (cached).
///
/// Arguments are doubled quantum numbers. Returns 0 when the selection
/// rules (M = m1 + m2, triangle inequality) fail; errors only on malformed
/// quantum numbers.
pub fn clebsch_gordan(
    two_j1: u32,
    two_m1: i32,
    two_j2: u32,
    two_m2: i32,
    two_big_j: u32,
    two_big_m: i32,
) -> Result<f64> {
    let key = Key { two_j1, two_m1, two_j2, two_m2, two_big_j, two_big_m };
    if let Some(&v) = cache().lock().unwrap().get(&key) {
        return Ok(v);
    }
    let (series, radicand) = clebsch_gordan_exact_parts(two_j1, two_m1, two_j2, two_m2, two_big_j, two_big_m)?;
    let value = rat_to_f64(&series) * rat_to_f64(&radicand).sqrt();
    cache().lock().unwrap().insert(key, value);
    Ok(value)
}

/// Clebsch-Gordan coefficient as an exact algebraic number.
pub fn clebsch_gordan_exact(
    two_j1: u32,
    two_m1: i32,
    two_j2: u32,
    two_m2: i32,
    two_big_j: u32,
    two_big_m: i32,
) -> Result<Exact> {
    let (series, radicand) = clebsch_gordan_exact_parts(two_j1, two_m1, two_j2, two_m2, two_big_j, two_big_m)?;
    Ok(Exact::sqrt_rat(&radicand).scaled_rat(&series))
}

/// Precomputed table of coefficients for a fixed (j1, j2, J) block,
/// indexed by (2m1, 2m2).
pub struct CgTable {
    two_j1: u32,
    two_j2: u32,
    two_big_j: u32,
    table: HashMap<(i32, i32), f64>,
}

impl CgTable {
    pub fn new(two_j1: u32, two_j2: u32, two_big_j: u32) -> Result<Self> {
        let mut table = HashMap::new();
        let mut two_m1 = -(two_j1 as i32);
        while two_m1 <= two_j1 as i32 {
            let mut two_m2 = -(two_j2 as i32);
            while two_m2 <= two_j2 as i32 {
                let two_big_m = two_m1 + two_m2;
                if two_big_m.unsigned_abs() <= two_big_j {
                    let c = clebsch_gordan(two_j1, two_m1, two_j2, two_m2, two_big_j, two_big_m)?;
                    if c != 0.0 {
                        table.insert((two_m1, two_m2), c);
                    }
                }
                two_m2 += 2;
            }
            two_m1 += 2;
        }
        Ok(Self { two_j1, two_j2, two_big_j, table })
    }

    pub fn get(&self, two_m1: i32, two_m2: i32) -> f64 {
        self.table.get(&(two_m1, two_m2)).copied().unwrap_or(0.0)
    }

    pub fn block(&self) -> (u32, u32, u32) {
        (self.two_j1, self.two_j2, self.two_big_j)
    }
}
