//! Polycyclic model of `N^S_2`: the class-2 group with generator exponents
//! dividing `p^2` and central commutators of exponent `p`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupOps;

/// Normal form `x1^e1 .. xn^en * prod_{i<j} [x_i, x_j]^f_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PcElementNS2 {
    /// Exponents mod `p^2`.
    pub e: Vec<u8>,
    /// Commutator exponents mod `p`, pairs `(i, j)` with `i < j` in lex order.
    pub f: Vec<u8>,
}

/// Collection arithmetic for [`PcElementNS2`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ns2Group {
    p: u32,
    n: usize,
}

impl Ns2Group {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if !crate::is_prime(p) || p > 13 {
            return Err(Error::InvalidArgument(format!("p = {p} must be a prime below 16")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("rank must be positive".into()));
        }
        Ok(Ns2Group { p, n })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rank(&self) -> usize {
        self.n
    }

    /// `p^(2n + C(n,2))`.
    pub fn order(&self) -> u128 {
        (self.p as u128).pow((2 * self.n + self.n * (self.n - 1) / 2) as u32)
    }

    /// Slot of `[x_i, x_j]`, 0-based `i < j`.
    pub fn pair(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// `x_i`, 0-based.
    pub fn generator(&self, i: usize) -> PcElementNS2 {
        let mut x = self.identity();
        x.e[i] = 1;
        x
    }

    /// `[x_i, x_j]` for `i < j`, 0-based.
    pub fn basic_commutator(&self, i: usize, j: usize) -> PcElementNS2 {
        let mut x = self.identity();
        x.f[self.pair(i, j)] = 1;
        x
    }

    /// Weight in the Stallings filtration: 1 outside the Frattini subgroup,
    /// 2 on the nontrivial part of the last layer.
    pub fn weight(&self, x: &PcElementNS2) -> u8 {
        if x.e.iter().any(|&v| !(v as u32).is_multiple_of(self.p)) {
            1
        } else if x.e.iter().chain(&x.f).any(|&v| v != 0) {
            2
        } else {
            super::INFINITE_WEIGHT
        }
    }
}

impl GroupOps for Ns2Group {
    type Elem = PcElementNS2;

    fn identity(&self) -> PcElementNS2 {
        PcElementNS2 {
            e: vec![0; self.n],
            f: vec![0; self.n * (self.n - 1) / 2],
        }
    }

    /// Moving `x_i^b` left past `x_j^a` (`i < j`) contributes
    /// `[x_j, x_i]^(ab) = [x_i, x_j]^(-ab)`.
    fn mul(&self, a: &PcElementNS2, b: &PcElementNS2) -> PcElementNS2 {
        let (p, q) = (self.p as i64, (self.p * self.p) as i64);
        let mut f: Vec<i64> = a.f.iter().zip(&b.f).map(|(&x, &y)| x as i64 + y as i64).collect();
        for i in 0..self.n {
            for j in i + 1..self.n {
                f[self.pair(i, j)] -= a.e[j] as i64 * b.e[i] as i64;
            }
        }
        PcElementNS2 {
            e: a.e.iter().zip(&b.e).map(|(&x, &y)| ((x as i64 + y as i64) % q) as u8).collect(),
            f: f.into_iter().map(|v| v.rem_euclid(p) as u8).collect(),
        }
    }

    /// Solves `a * b = 1` in normal form.
    fn inv(&self, a: &PcElementNS2) -> PcElementNS2 {
        let (p, q) = (self.p as i64, (self.p * self.p) as i64);
        let e: Vec<u8> = a.e.iter().map(|&x| ((q - x as i64) % q) as u8).collect();
        let mut f = vec![0i64; a.f.len()];
        for i in 0..self.n {
            for j in i + 1..self.n {
                let k = self.pair(i, j);
                f[k] = -(a.f[k] as i64) + a.e[j] as i64 * e[i] as i64;
            }
        }
        PcElementNS2 {
            e,
            f: f.into_iter().map(|v| v.rem_euclid(p) as u8).collect(),
        }
    }
}
