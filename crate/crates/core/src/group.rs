//! Minimal group interface shared by the enumerated quotients, matrix groups
//! and automorphism groups.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};

/// A group given by its operations. Elements are plain values.
///
/// Commutators follow the left convention `[a, b] = a b a^-1 b^-1` and
/// conjugation is `a^b = b a b^-1`.
pub trait GroupOps {
    type Elem: Clone + Eq + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    fn pow(&self, a: &Self::Elem, e: i64) -> Self::Elem {
        let base = if e < 0 { self.inv(a) } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ab = self.mul(a, b);
        let ai = self.inv(a);
        let bi = self.inv(b);
        self.mul(&self.mul(&ab, &ai), &bi)
    }

    /// `b a b^-1`.
    fn conjugate(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(b, a), &self.inv(b))
    }

    /// Order of `a`, giving up after `limit` steps.
    fn element_order(&self, a: &Self::Elem, limit: usize) -> Option<usize> {
        let id = self.identity();
        let mut x = a.clone();
        for k in 1..=limit {
            if x == id {
                return Some(k);
            }
            x = self.mul(&x, a);
        }
        None
    }

    /// Evaluates a word given as `(generator index, exponent)` pairs.
    fn eval_syllables(&self, gens: &[Self::Elem], word: &[(usize, i64)]) -> Self::Elem {
        word.iter().fold(self.identity(), |acc, &(g, e)| {
            self.mul(&acc, &self.pow(&gens[g], e))
        })
    }
}

/// Closure of `gens` under multiplication. Fails once more than `limit`
/// elements have been produced. The first element is the identity.
pub fn generate<G: GroupOps>(group: &G, gens: &[G::Elem], limit: usize) -> Result<Vec<G::Elem>> {
    let id = group.identity();
    let mut seen: HashSet<G::Elem> = HashSet::new();
    seen.insert(id.clone());
    let mut elems = vec![id];
    let mut head = 0;
    while head < elems.len() {
        let x = elems[head].clone();
        head += 1;
        for g in gens {
            let y = group.mul(&x, g);
            if seen.insert(y.clone()) {
                if elems.len() >= limit {
                    return Err(Error::budget("subgroup closure", limit as u128 + 1, limit as u128));
                }
                elems.push(y);
            }
        }
    }
    Ok(elems)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Z/m under addition.
    struct Cyclic(i64);

    impl GroupOps for Cyclic {
        type Elem = i64;
        fn identity(&self) -> i64 {
            0
        }
        fn mul(&self, a: &i64, b: &i64) -> i64 {
            (a + b).rem_euclid(self.0)
        }
        fn inv(&self, a: &i64) -> i64 {
            (-a).rem_euclid(self.0)
        }
    }

    #[test]
    fn pow_and_order() {
        let g = Cyclic(12);
        assert_eq!(g.pow(&5, 3), 3);
        assert_eq!(g.pow(&5, -1), 7);
        assert_eq!(g.element_order(&4, 100), Some(3));
        assert_eq!(g.element_order(&0, 100), Some(1));
    }

    #[test]
    fn generate_respects_limit() {
        let g = Cyclic(12);
        assert_eq!(generate(&g, &[8], 100).unwrap().len(), 3);
        assert!(generate(&g, &[1], 5).unwrap_err().is_budget());
    }
}
