//! Truncated free associative algebra `F_p<X_1..X_n> / (degree > M)`.
//!
//! Units of this algebra carry the images of free-group words under
//! `x_i -> 1 + X_i`. The lowest degree of `u - 1` is the weight of `u` in the
//! mod-p dimension series, which realizes the Zassenhaus filtration.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupOps;
use crate::words::Word;

/// Default cap on `n^(M+1)`; admits `n = 2, M <= 8` and `n = 3, M <= 4`.
pub const DEFAULT_COEFF_BUDGET: u128 = 512;

/// `(p, n, M)` together with the dense layout of coefficients by degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    p: u32,
    n: usize,
    m: usize,
}

impl Shape {
    pub fn new(p: u32, n: usize, m: usize) -> Result<Self> {
        Self::with_budget(p, n, m, DEFAULT_COEFF_BUDGET)
    }

    pub fn with_budget(p: u32, n: usize, m: usize, budget: u128) -> Result<Self> {
        if !crate::is_prime(p) || p > 251 {
            return Err(Error::InvalidArgument(format!("p = {p} must be a prime below 256")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("rank must be positive".into()));
        }
        let needed = (n as u128).checked_pow(m as u32 + 1).unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::budget(format!("truncated algebra n={n} M={m}"), needed, budget));
        }
        Ok(Shape { p, n, m })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rank(&self) -> usize {
        self.n
    }
    pub fn degree(&self) -> usize {
        self.m
    }

    /// Number of monomials of degree `d`.
    pub fn count(&self, d: usize) -> usize {
        self.n.pow(d as u32)
    }

    /// Start of the degree-`d` block.
    pub fn offset(&self, d: usize) -> usize {
        (0..d).map(|e| self.count(e)).sum()
    }

    pub fn len(&self) -> usize {
        self.offset(self.m + 1)
    }

    /// Same `p, n` with a smaller truncation degree.
    pub fn truncated(&self, m: usize) -> Shape {
        Shape { m: m.min(self.m), ..*self }
    }

    fn monomial(&self, d: usize, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; d];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.n + 1;
            idx /= self.n;
        }
        out
    }
}

/// Element of the truncated algebra with dense coefficients in `0..p`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruncSeries {
    shape: Shape,
    coeffs: Vec<u8>,
}

impl TruncSeries {
    pub fn zero(shape: Shape) -> Self {
        TruncSeries {
            shape,
            coeffs: vec![0; shape.len()],
        }
    }

    pub fn one(shape: Shape) -> Self {
        let mut s = Self::zero(shape);
        s.coeffs[0] = 1;
        s
    }

    /// The variable `X_i`, 1-based.
    pub fn var(shape: Shape, i: usize) -> Result<Self> {
        if i == 0 || i > shape.n {
            return Err(Error::IndexOutOfRange { index: i, rank: shape.n });
        }
        let mut s = Self::zero(shape);
        if shape.m >= 1 {
            s.coeffs[i] = 1;
        }
        Ok(s)
    }

    /// Builds a series from `(monomial, coefficient)` terms; monomials use
    /// 1-based generator indices and terms beyond degree `M` are dropped.
    pub fn from_terms(shape: Shape, terms: &[(&[usize], i64)]) -> Result<Self> {
        let mut s = Self::zero(shape);
        for (mono, c) in terms {
            if mono.len() > shape.m {
                continue;
            }
            let mut idx = 0;
            for &g in mono.iter() {
                if g == 0 || g > shape.n {
                    return Err(Error::IndexOutOfRange { index: g, rank: shape.n });
                }
                idx = idx * shape.n + (g - 1);
            }
            let slot = shape.offset(mono.len()) + idx;
            s.coeffs[slot] = ((s.coeffs[slot] as i64 + c).rem_euclid(shape.p as i64)) as u8;
        }
        Ok(s)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    /// Coefficients of the homogeneous degree-`d` part, in lex order.
    pub fn homogeneous(&self, d: usize) -> &[u8] {
        let off = self.shape.offset(d);
        &self.coeffs[off..off + self.shape.count(d)]
    }

    pub fn constant(&self) -> u8 {
        self.coeffs[0]
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ParamMismatch(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.shape.p as u16;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u16 + b as u16) % p) as u8)
            .collect();
        Ok(TruncSeries { shape: self.shape, coeffs })
    }

    pub fn neg(&self) -> Self {
        let p = self.shape.p as u16;
        let coeffs = self.coeffs.iter().map(|&a| ((p - a as u16) % p) as u8).collect();
        TruncSeries { shape: self.shape, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product with all terms above degree `M` discarded.
    pub fn smul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let sh = self.shape;
        let p = sh.p;
        let mut acc = vec![0u32; sh.len()];
        let offs: Vec<usize> = (0..=sh.m + 1).map(|d| sh.offset(d)).collect();
        for d1 in 0..=sh.m {
            let a = &self.coeffs[offs[d1]..offs[d1 + 1]];
            if a.iter().all(|&c| c == 0) {
                continue;
            }
            for d2 in 0..=sh.m - d1 {
                let b = &other.coeffs[offs[d2]..offs[d2 + 1]];
                let width = b.len();
                let base = offs[d1 + d2];
                for (i, &ca) in a.iter().enumerate() {
                    if ca == 0 {
                        continue;
                    }
                    let row = base + i * width;
                    for (j, &cb) in b.iter().enumerate() {
                        if cb != 0 {
                            acc[row + j] += ca as u32 * cb as u32;
                        }
                    }
                }
                // keep the accumulators small
                if p > 16 {
                    for v in acc.iter_mut() {
                        *v %= p;
                    }
                }
            }
        }
        TruncSeries {
            shape: sh,
            coeffs: acc.into_iter().map(|v| (v % p) as u8).collect(),
        }
    }

    /// Lowest degree carrying a nonzero coefficient, `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        (0..=self.shape.m).find(|&d| self.homogeneous(d).iter().any(|&c| c != 0))
    }

    /// Nonzero terms in graded-lex order.
    pub fn terms(&self) -> Vec<(Vec<usize>, u8)> {
        let mut out = Vec::new();
        for d in 0..=self.shape.m {
            for (i, &c) in self.homogeneous(d).iter().enumerate() {
                if c != 0 {
                    out.push((self.shape.monomial(d, i), c));
                }
            }
        }
        out
    }

    /// Drops every term above degree `m`.
    pub fn truncate(&self, m: usize) -> Self {
        let shape = self.shape.truncated(m);
        TruncSeries {
            shape,
            coeffs: self.coeffs[..shape.len()].to_vec(),
        }
    }
}

impl fmt::Display for TruncSeries {
    /// Graded-lex printer: `1 + X1 X2 + 2 X2 X1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (mono, c)) in terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = mono.iter().map(|g| format!("X{g}")).collect();
            match (mono.is_empty(), *c) {
                (true, c) => write!(f, "{c}")?,
                (false, 1) => write!(f, "{}", vars.join(" "))?,
                (false, c) => write!(f, "{c} {}", vars.join(" "))?,
            }
        }
        Ok(())
    }
}

impl Serialize for TruncSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A series with constant term 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct UnitElement(TruncSeries);

impl UnitElement {
    pub fn new(s: TruncSeries) -> Result<Self> {
        if s.constant() != 1 {
            return Err(Error::InvalidArgument("unit must have constant term 1".into()));
        }
        Ok(UnitElement(s))
    }

    pub fn one(shape: Shape) -> Self {
        UnitElement(TruncSeries::one(shape))
    }

    /// `1 + X_i`.
    pub fn generator(shape: Shape, i: usize) -> Result<Self> {
        Ok(UnitElement(TruncSeries::one(shape).add(&TruncSeries::var(shape, i)?)?))
    }

    pub fn series(&self) -> &TruncSeries {
        &self.0
    }

    pub fn into_series(self) -> TruncSeries {
        self.0
    }

    pub fn shape(&self) -> Shape {
        self.0.shape
    }

    pub fn is_one(&self) -> bool {
        self.0.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(UnitElement(self.0.smul(&other.0)?))
    }

    /// `sum_{i=0..M} (1 - u)^i`.
    pub fn inv(&self) -> Self {
        let sh = self.shape();
        let one = TruncSeries::one(sh);
        let t = one.sub(&self.0).expect("same shape");
        let mut acc = one.clone();
        let mut pw = one;
        for _ in 0..sh.m {
            pw = pw.mul_unchecked(&t);
            acc = acc.add(&pw).expect("same shape");
        }
        UnitElement(acc)
    }

    /// `u^e` by square-and-multiply; negative exponents go through `inv`.
    pub fn power(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = UnitElement::one(self.shape());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = UnitElement(acc.0.mul_unchecked(&sq.0));
            }
            e >>= 1;
            if e > 0 {
                sq = UnitElement(sq.0.mul_unchecked(&sq.0));
            }
        }
        acc
    }

    /// Group commutator `u v u^-1 v^-1`.
    pub fn commutator(&self, v: &Self) -> Result<Self> {
        self.mul(v)?.mul(&self.inv())?.mul(&v.inv())
    }

    /// Minimal degree of a nonzero term of `u - 1`; `None` means `u = 1`.
    pub fn zweight(&self) -> Option<usize> {
        (1..=self.shape().m).find(|&d| self.0.homogeneous(d).iter().any(|&c| c != 0))
    }

    pub fn truncate(&self, m: usize) -> Self {
        UnitElement(self.0.truncate(m))
    }
}

impl fmt::Display for UnitElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Image of a word under `x_i -> 1 + X_i`.
pub fn eval_word(w: &Word, shape: Shape) -> Result<UnitElement> {
    if w.rank() != shape.n {
        return Err(Error::RankMismatch { left: w.rank(), right: shape.n });
    }
    let gens: Vec<UnitElement> = (1..=shape.n).map(|i| UnitElement::generator(shape, i)).collect::<Result<_>>()?;
    let invs: Vec<UnitElement> = gens.iter().map(UnitElement::inv).collect();
    let mut acc = UnitElement::one(shape);
    for &a in w.letters() {
        let g = a.unsigned_abs() as usize - 1;
        let f = if a > 0 { &gens[g] } else { &invs[g] };
        acc = UnitElement(acc.0.mul_unchecked(&f.0));
    }
    Ok(acc)
}

/// The unit group of a truncated algebra as a [`GroupOps`] instance.
#[derive(Clone, Copy, Debug)]
pub struct UnitGroup(pub Shape);

impl GroupOps for UnitGroup {
    type Elem = UnitElement;
    fn identity(&self) -> UnitElement {
        UnitElement::one(self.0)
    }
    fn mul(&self, a: &UnitElement, b: &UnitElement) -> UnitElement {
        UnitElement(a.0.mul_unchecked(&b.0))
    }
    fn inv(&self, a: &UnitElement) -> UnitElement {
        a.inv()
    }
}

/// Layer dimensions of the Zassenhaus series of a free group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JenningsDims {
    pub p: u32,
    pub n: usize,
    /// Witt numbers `l_1..l_kmax`.
    pub witt: Vec<u128>,
    /// `d_1..d_kmax`.
    pub dims: Vec<u128>,
    /// `log_p |N_k|` for `k = 1..kmax`.
    pub log_orders: Vec<u128>,
}

fn mobius(mut m: usize) -> i128 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if m > 1 {
        result = -result;
    }
    result
}

/// Number of degree-`i` basic commutators on `n` generators.
pub fn witt_number(n: usize, i: usize) -> u128 {
    let total: i128 = (1..=i)
        .filter(|d| i.is_multiple_of(*d))
        .map(|d| mobius(d) * (n as i128).pow((i / d) as u32))
        .sum();
    (total / i as i128) as u128
}

/// `d_k = sum_{i p^j = k} l_i` for `k = 1..kmax`.
pub fn jennings_dims(p: u32, n: usize, kmax: usize) -> Result<JenningsDims> {
    if kmax == 0 {
        return Err(Error::InvalidArgument("kmax must be at least 1".into()));
    }
    let witt: Vec<u128> = (1..=kmax).map(|i| witt_number(n, i)).collect();
    let mut dims = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut d = 0;
        let mut q = 1usize;
        while q <= k {
            if k % q == 0 {
                d += witt[k / q - 1];
            }
            q *= p as usize;
        }
        dims.push(d);
    }
    let log_orders = dims
        .iter()
        .scan(0u128, |acc, &d| {
            *acc += d;
            Some(*acc)
        })
        .collect();
    Ok(JenningsDims { p, n, witt, dims, log_orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sh(p: u32, n: usize, m: usize) -> Shape {
        Shape::new(p, n, m).unwrap()
    }

    fn random_unit(rng: &mut ChaCha8Rng, shape: Shape, min_deg: usize) -> UnitElement {
        let mut s = TruncSeries::one(shape);
        for d in min_deg.max(1)..=shape.degree() {
            let off = shape.offset(d);
            for i in 0..shape.count(d) {
                s.coeffs[off + i] = rng.gen_range(0..shape.p()) as u8;
            }
        }
        UnitElement::new(s).unwrap()
    }

    #[test]
    fn smul_examples() {
        let s = sh(2, 2, 2);
        let a = TruncSeries::from_terms(s, &[(&[], 1), (&[1], 1)]).unwrap();
        let b = TruncSeries::from_terms(s, &[(&[], 1), (&[2], 1)]).unwrap();
        assert_eq!(a.smul(&b).unwrap().to_string(), "1 + X1 + X2 + X1 X2");
        assert_eq!(a.smul(&TruncSeries::one(s)).unwrap(), a);
        let s1 = sh(2, 2, 1);
        let x1 = TruncSeries::var(s1, 1).unwrap();
        let x2 = TruncSeries::var(s1, 2).unwrap();
        assert_eq!(x1.smul(&x2).unwrap(), TruncSeries::zero(s1));
        assert!(x1.smul(&TruncSeries::one(s)).is_err());
    }

    #[test]
    fn unit_inverse_examples() {
        let s = sh(2, 2, 2);
        assert!(UnitElement::one(s).inv().is_one());
        let u = UnitElement::generator(s, 1).unwrap();
        assert_eq!(u.inv().to_string(), "1 + X1 + X1 X1");
    }

    #[test]
    fn eval_word_examples() {
        let s = sh(2, 2, 2);
        assert!(eval_word(&Word::empty(2), s).unwrap().is_one());
        assert_eq!(eval_word(&Word::parse(2, "x1").unwrap(), s).unwrap().to_string(), "1 + X1");
        let c = eval_word(&Word::parse(2, "[x1,x2]").unwrap(), s).unwrap();
        assert_eq!(c.to_string(), "1 + X1 X2 + X2 X1");
        assert_eq!(c.zweight(), Some(2));
        assert!(eval_word(&Word::empty(3), s).is_err());
    }

    #[test]
    fn zweight_of_p_power() {
        for p in [2u32, 3] {
            let s = sh(p, 2, p as usize + 1);
            let w = Word::parse(2, &format!("x1^{p}")).unwrap();
            let u = eval_word(&w, s).unwrap();
            assert_eq!(u.zweight(), Some(p as usize));
            assert_eq!(UnitElement::generator(s, 1).unwrap().power(p as i64), u);
        }
        assert_eq!(UnitElement::one(sh(2, 2, 3)).zweight(), None);
    }

    #[test]
    fn power_examples() {
        let s = sh(3, 2, 3);
        let u = eval_word(&Word::parse(2, "x1*x2^-1").unwrap(), s).unwrap();
        assert!(u.power(0).is_one());
        assert_eq!(u.power(1), u);
        assert_eq!(u.power(-2).mul(&u.power(2)).unwrap(), UnitElement::one(s));
    }

    #[test]
    fn witt_and_jennings() {
        let witt: Vec<u128> = (1..=5).map(|i| witt_number(2, i)).collect();
        assert_eq!(witt, vec![2, 1, 2, 3, 6]);
        assert_eq!(jennings_dims(2, 2, 4).unwrap().dims, vec![2, 3, 2, 6]);
        assert_eq!(jennings_dims(3, 2, 3).unwrap().dims, vec![2, 1, 4]);
        let j = jennings_dims(2, 3, 3).unwrap();
        assert_eq!(j.dims, vec![3, 6, 8]);
        assert_eq!(j.log_orders, vec![3, 9, 17]);
        assert!(jennings_dims(2, 2, 0).is_err());
    }

    #[test]
    fn budget_enforced() {
        assert!(Shape::new(2, 2, 8).is_ok());
        assert!(Shape::new(2, 2, 9).unwrap_err().is_budget());
        assert!(Shape::new(2, 3, 4).is_ok());
        assert!(Shape::new(2, 3, 5).unwrap_err().is_budget());
        assert!(Shape::new(4, 2, 2).is_err());
    }

    #[test]
    fn dimension_series_contains_products_of_powers() {
        // words in Gamma_i raised to p^j land at weight >= i p^j
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [2u32, 3] {
            let s = sh(p, 2, 6);
            for _ in 0..40 {
                let i = rng.gen_range(1..=3usize);
                let mut w = crate::words::random_word(&mut rng, 2, 6);
                for _ in 1..i {
                    let v = crate::words::random_word(&mut rng, 2, 6);
                    w = v.commutator(&w).unwrap();
                }
                for j in 0..2u32 {
                    let k = i * (p as usize).pow(j);
                    if k > 6 {
                        continue;
                    }
                    let u = eval_word(&w.pow((p as i64).pow(j)), s).unwrap();
                    assert!(u.zweight().is_none_or(|z| z >= k));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_both_sides(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = sh(p, 2, 4);
            let u = random_unit(&mut rng, s, 1);
            let one = UnitElement::one(s);
            prop_assert_eq!(u.mul(&u.inv()).unwrap(), one.clone());
            prop_assert_eq!(u.inv().mul(&u).unwrap(), one);
        }

        #[test]
        fn smul_distributes(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = sh(3, 2, 3);
            let a = random_unit(&mut rng, s, 0).into_series();
            let b = random_unit(&mut rng, s, 1).into_series();
            let c = random_unit(&mut rng, s, 2).into_series();
            prop_assert_eq!(a.smul(&b.add(&c).unwrap()).unwrap(), a.smul(&b).unwrap().add(&a.smul(&c).unwrap()).unwrap());
        }

        #[test]
        fn eval_is_multiplicative(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = sh(2, 3, 3);
            let u = crate::words::random_word(&mut rng, 3, 12);
            let v = crate::words::random_word(&mut rng, 3, 12);
            let lhs = eval_word(&u.mul(&v).unwrap(), s).unwrap();
            let rhs = eval_word(&u, s).unwrap().mul(&eval_word(&v, s).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn weight_is_superadditive_on_commutators(seed in any::<u64>(), a in 1usize..3, b in 1usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = sh(2, 2, 6);
            let u = random_unit(&mut rng, s, a);
            let v = random_unit(&mut rng, s, b);
            let c = u.commutator(&v).unwrap();
            let bound = u.zweight().unwrap_or(7) + v.zweight().unwrap_or(7);
            prop_assert!(c.zweight().is_none_or(|z| z >= bound));
        }

        #[test]
        fn p_power_multiplies_weight(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = sh(p, 2, 6);
            let u = random_unit(&mut rng, s, 1);
            let w = u.zweight().unwrap_or(7);
            prop_assert!(u.power(p as i64).zweight().is_none_or(|z| z >= p as usize * w));
        }
    }
}
