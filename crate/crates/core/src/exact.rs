//! Exact arithmetic over ℚ and over the real quadratic extensions
//! ℚ(i, √d₁, √d₂, ...).
//!
//! Clebsch-Gordan coefficients and the catalogue states are all of the form
//! (rational) · √(rational), so sums and products of them live in a number
//! field generated by finitely many square roots of squarefree integers.
//! [`Exact`] represents such numbers as Σ (a_d + i b_d) √d with rational
//! a_d, b_d and squarefree d ≥ 1, which is closed under +, ·, and
//! conjugation. Quantities that are rational in the end (purities,
//! cumulative multipole weights, ...) come out with a single d = 1 term and
//! can be read back as exact fractions.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Exact rational number with arbitrary precision.
pub type Rat = BigRational;

/// Rational p/q from machine integers.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Exact factorial.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Convert a big rational to f64, safe against numerator/denominator
/// overflowing f64 range individually.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let numer = r.numer();
    let denom = r.denom();
    let nb = numer.bits();
    let db = denom.bits();
    let max_bits = nb.max(db);
    if max_bits <= 1000 {
        let n = numer.to_f64().unwrap_or(f64::NAN);
        let d = denom.to_f64().unwrap_or(f64::NAN);
        return n / d;
    }
    // Shift both down; relative truncation error is 2^-(1000-1).
    let shift = max_bits - 1000;
    let n = (numer >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (denom >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Decompose n = s² · d with d squarefree. Returns (s, d).
///
/// Inputs here are products of small factorials, so trial division by small
/// primes always completes; any unfactored remainder is treated as part of
/// the squarefree tail after a perfect-square check.
fn squarefree_split(n: &BigUint) -> (BigUint, BigUint) {
    let mut s = BigUint::one();
    let mut d = BigUint::one();
    let mut m = n.clone();
    let two = BigUint::from(2u32);
    let mut p = BigUint::from(2u32);
    let limit = BigUint::from(100_000u32);
    while &p * &p <= m && p <= limit {
        let mut count = 0u64;
        while (&m % &p).is_zero() {
            m /= &p;
            count += 1;
        }
        if count > 0 {
            for _ in 0..count / 2 {
                s *= &p;
            }
            if count % 2 == 1 {
                d *= &p;
            }
        }
        p = if p == two { BigUint::from(3u32) } else { p + &two };
    }
    if !m.is_one() {
        let r = m.sqrt();
        if &r * &r == m {
            s *= r;
        } else {
            d *= m;
        }
    }
    (s, d)
}

/// A complex rational a + i b.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatC {
    pub re: Rat,
    pub im: Rat,
}

impl RatC {
    pub fn zero() -> Self {
        Self { re: Rat::zero(), im: Rat::zero() }
    }
    pub fn from_re(re: Rat) -> Self {
        Self { re, im: Rat::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }
    fn mul(&self, other: &Self) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }
    fn scaled(&self, k: &Rat) -> Self {
        Self { re: &self.re * k, im: &self.im * k }
    }
}

/// Element of ℚ(i, √d₁, √d₂, ...): a finite sum Σ (a_d + i b_d) √d over
/// squarefree positive integers d.
#[derive(Clone, PartialEq, Debug)]
pub struct Exact {
    terms: BTreeMap<BigUint, RatC>,
}

impl Exact {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(BigUint::one(), RatC::from_re(r));
        }
        Self { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(BigUint::one(), RatC { re: Rat::zero(), im: Rat::one() });
        Self { terms }
    }

    /// √(p/q) for a nonnegative rational, as an exact element.
    pub fn sqrt_rat(r: &Rat) -> Self {
        assert!(!r.is_negative(), "sqrt of negative rational");
        if r.is_zero() {
            return Self::zero();
        }
        // √(p/q) = √(pq) / q
        let p = r.numer().magnitude().clone();
        let q = r.denom().magnitude().clone();
        let (s, d) = squarefree_split(&(&p * &q));
        let coeff = Rat::new(BigInt::from(s), BigInt::from(q));
        let mut terms = BTreeMap::new();
        terms.insert(d, RatC::from_re(coeff));
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(RatC::is_zero)
    }

    /// If the value is purely rational (single √1 term, no imaginary part),
    /// return it.
    pub fn as_rat(&self) -> Option<Rat> {
        let mut out = Rat::zero();
        for (d, c) in &self.terms {
            if c.is_zero() {
                continue;
            }
            if !d.is_one() || !c.im.is_zero() {
                return None;
            }
            out = c.re.clone();
        }
        Some(out)
    }

    pub fn conj(&self) -> Self {
        let terms = self.terms.iter().map(|(d, c)| (d.clone(), c.conj())).collect();
        Self { terms }
    }

    /// |self|² = self · conj(self).
    pub fn abs2(&self) -> Self {
        self.mul_ref(&self.conj())
    }

    pub fn scaled_rat(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        let terms = self.terms.iter().map(|(d, c)| (d.clone(), c.scaled(k))).collect();
        Self { terms }
    }

    fn insert_term(terms: &mut BTreeMap<BigUint, RatC>, d: BigUint, c: RatC) {
        if c.is_zero() {
            return;
        }
        match terms.get_mut(&d) {
            Some(existing) => {
                existing.re += &c.re;
                existing.im += &c.im;
                if existing.is_zero() {
                    terms.remove(&d);
                }
            }
            None => {
                terms.insert(d, c);
            }
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                // √d1 √d2 = s √d with d1 d2 = s² d
                let (s, d) = squarefree_split(&(d1 * d2));
                let k = Rat::from(BigInt::from(s));
                let c = c1.mul(c2).scaled(&k);
                Self::insert_term(&mut terms, d, c);
            }
        }
        Self { terms }
    }

    pub fn to_c64(&self) -> num_complex::Complex<f64> {
        let mut re = 0.0;
        let mut im = 0.0;
        for (d, c) in &self.terms {
            let root = d.to_f64().unwrap_or(f64::NAN).sqrt();
            re += rat_to_f64(&c.re) * root;
            im += rat_to_f64(&c.im) * root;
        }
        num_complex::Complex::new(re, im)
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, rhs: Exact) -> Exact {
        let mut terms = self.terms;
        for (d, c) in rhs.terms {
            Exact::insert_term(&mut terms, d, c);
        }
        Exact { terms }
    }
}

impl AddAssign for Exact {
    fn add_assign(&mut self, rhs: Exact) {
        for (d, c) in rhs.terms {
            Exact::insert_term(&mut self.terms, d, c);
        }
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, rhs: Exact) -> Exact {
        self + (-rhs)
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        let terms = self
            .terms
            .into_iter()
            .map(|(d, c)| (d, RatC { re: -c.re, im: -c.im }))
            .collect();
        Exact { terms }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, rhs: Exact) -> Exact {
        self.mul_ref(&rhs)
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({} + {}i)", c.re, c.im)?;
            if !d.is_one() {
                write!(f, "·√{}", d)?;
            }
        }
        Ok(())
    }
}

/// Dense matrix over [`Exact`], used for the exact state catalogue and the
/// exact multipole path.
#[derive(Clone, Debug)]
pub struct ExactMatrix {
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<Exact>,
}

impl ExactMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![Exact::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            *m.get_mut(k, k) = Exact::one();
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &Exact {
        &self.data[r * self.ncols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Exact {
        &mut self.data[r * self.ncols + c]
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                *out.get_mut(c, r) = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "exact matmul dims");
        let mut out = Self::zeros(self.nrows, other.ncols);
        for r in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.ncols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    *out.get_mut(r, c) += a.mul_ref(b);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b.clone();
        }
        out
    }

    pub fn scaled(&self, k: &Exact) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.mul_ref(k);
        }
        out
    }

    pub fn trace(&self) -> Exact {
        let mut t = Exact::zero();
        for k in 0..self.nrows.min(self.ncols) {
            t += self.get(k, k).clone();
        }
        t
    }

    /// Tr(A† B), the Hilbert-Schmidt inner product.
    pub fn hs_inner(&self, other: &Self) -> Exact {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = Exact::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            t += a.conj().mul_ref(b);
        }
        t
    }

    /// Outer product ψψ† from an amplitude column.
    pub fn projector(amplitudes: &[Exact]) -> Self {
        let n = amplitudes.len();
        let mut out = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                *out.get_mut(r, c) = amplitudes[r].mul_ref(&amplitudes[c].conj());
            }
        }
        out
    }

    pub fn to_complex<T: crate::Scalar>(&self) -> nalgebra::DMatrix<num_complex::Complex<T>> {
        nalgebra::DMatrix::from_fn(self.nrows, self.ncols, |r, c| {
            let z = self.get(r, c).to_c64();
            num_complex::Complex::new(crate::real(z.re), crate::real(z.im))
        })
    }
}
