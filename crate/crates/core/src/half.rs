//! Half-integer spin quantum numbers, stored as doubled integers so that
//! j = 1/2, 3/2, ... stay exact.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The spin quantum number j of a spin-j system, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpinQuantumNumber {
    two_j: u32,
}

impl SpinQuantumNumber {
    /// Build from the doubled value `2j`.
    pub const fn from_two_j(two_j: u32) -> Self {
        Self { two_j }
    }

    /// Spin from an integer j.
    pub const fn from_int(j: u32) -> Self {
        Self { two_j: 2 * j }
    }

    pub const fn two_j(self) -> u32 {
        self.two_j
    }

    /// Hilbert-space dimension 2j + 1.
    pub const fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// Number of qubits N = 2j in the symmetric embedding.
    pub const fn num_qubits(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Doubled magnetic quantum numbers `2m` in basis order m = j, j-1, ..., -j.
    pub fn two_m_values(self) -> impl Iterator<Item = i32> {
        let tj = self.two_j as i32;
        (0..=tj).map(move |k| tj - 2 * k)
    }

    /// Basis index of the doubled magnetic number `2m` (0 = highest weight).
    pub fn index_of_two_m(self, two_m: i32) -> Result<usize> {
        let tj = self.two_j as i32;
        if two_m.abs() > tj || (two_m - tj) % 2 != 0 {
            return Err(Error::QuantumNumber(format!(
                "2m = {two_m} invalid for 2j = {tj}"
            )));
        }
        Ok(((tj - two_m) / 2) as usize)
    }
}

impl fmt::Display for SpinQuantumNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j % 2 == 0 {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

/// Check that a doubled m is a valid projection for a doubled j.
pub fn valid_projection(two_j: u32, two_m: i32) -> bool {
    two_m.unsigned_abs() <= two_j && (two_j as i32 - two_m) % 2 == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_order_is_descending_m() {
        let j = SpinQuantumNumber::from_two_j(3); // j = 3/2
        let ms: Vec<i32> = j.two_m_values().collect();
        assert_eq!(ms, vec![3, 1, -1, -3]);
        assert_eq!(j.dim(), 4);
        assert_eq!(j.index_of_two_m(3).unwrap(), 0);
        assert_eq!(j.index_of_two_m(-3).unwrap(), 3);
        assert!(j.index_of_two_m(2).is_err());
        assert!(j.index_of_two_m(5).is_err());
    }

    #[test]
    fn display_half_integers() {
        assert_eq!(SpinQuantumNumber::from_two_j(5).to_string(), "5/2");
        assert_eq!(SpinQuantumNumber::from_int(2).to_string(), "2");
    }
}
