//! Reduced words in the free group of rank `n` and the commutator calculus
//! built on them.
//!
//! Conventions: `[x, y] = x y x^-1 y^-1` and `x^y = y x y^-1`. Every other
//! module inherits these.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// A freely reduced word. Letters are stored as signed 1-based generator
/// indices: `+i` is `x_i`, `-i` is `x_i^-1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    rank: usize,
    letters: Vec<i32>,
}

fn push_reduced(buf: &mut Vec<i32>, a: i32) {
    if buf.last() == Some(&-a) {
        buf.pop();
    } else {
        buf.push(a);
    }
}

impl Word {
    pub fn empty(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// The generator `x_i`, 1-based.
    pub fn generator(rank: usize, i: usize) -> Result<Self> {
        Self::from_letters(rank, &[i as i32])
    }

    /// Reduces a raw sequence of `(generator, sign)` pairs.
    pub fn reduce(rank: usize, raw: &[(usize, i8)]) -> Result<Self> {
        let signed: Vec<i32> = raw
            .iter()
            .map(|&(g, s)| if s < 0 { -(g as i32) } else { g as i32 })
            .collect();
        Self::from_letters(rank, &signed)
    }

    /// Reduces a sequence of signed 1-based letters.
    pub fn from_letters(rank: usize, letters: &[i32]) -> Result<Self> {
        let mut buf = Vec::with_capacity(letters.len());
        for &a in letters {
            let g = a.unsigned_abs() as usize;
            if a == 0 || g > rank {
                return Err(Error::IndexOutOfRange { index: g, rank });
            }
            push_reduced(&mut buf, a);
        }
        Ok(Word { rank, letters: buf })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn check_rank(&self, other: &Word) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Word) -> Result<Word> {
        self.check_rank(other)?;
        let mut buf = self.letters.clone();
        for &a in &other.letters {
            push_reduced(&mut buf, a);
        }
        Ok(Word {
            rank: self.rank,
            letters: buf,
        })
    }

    pub fn inv(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|a| -a).collect(),
        }
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut buf = Vec::new();
        for _ in 0..e.unsigned_abs() {
            for &a in &base.letters {
                push_reduced(&mut buf, a);
            }
        }
        Word {
            rank: self.rank,
            letters: buf,
        }
    }

    /// `[u, v] = u v u^-1 v^-1`.
    pub fn commutator(&self, v: &Word) -> Result<Word> {
        self.mul(v)?.mul(&self.inv())?.mul(&v.inv())
    }

    /// `u^v = v u v^-1`.
    pub fn conjugate(&self, v: &Word) -> Result<Word> {
        v.mul(self)?.mul(&v.inv())
    }

    /// Exponent sum of each generator; the image in the abelianization.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for &a in &self.letters {
            sums[a.unsigned_abs() as usize - 1] += a.signum() as i64;
        }
        sums
    }

    /// Replaces each `x_i` by `images[i]` and reduces.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        if images.len() != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: images.len(),
            });
        }
        let out_rank = images.first().map_or(self.rank, Word::rank);
        let mut acc = Word::empty(out_rank);
        for &a in &self.letters {
            let img = &images[a.unsigned_abs() as usize - 1];
            acc = if a > 0 { acc.mul(img)? } else { acc.mul(&img.inv())? };
        }
        Ok(acc)
    }

    /// Parses `x1*x2^-1`, `[x1,x2]`, `(x1*x2)^3` or `1`.
    pub fn parse(rank: usize, s: &str) -> Result<Word> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            rank,
        };
        let w = p.product()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(w)
    }
}

impl fmt::Display for Word {
    /// Prints runs of equal letters as powers: `x1^2*x2^-1`. The empty word
    /// prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let a = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == a {
                run += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let e = a.signum() as i64 * run as i64;
            write!(f, "x{}", a.unsigned_abs())?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
            i += run;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    rank: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn product(&mut self) -> Result<Word> {
        let mut w = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            w = w.mul(&self.power()?)?;
        }
        Ok(w)
    }

    fn power(&mut self) -> Result<Word> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("expected integer"))
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let idx: usize = std::str::from_utf8(&self.src[start..self.pos])
                    .ok()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| self.err("expected generator index"))?;
                Word::generator(self.rank, idx)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::empty(self.rank))
            }
            Some(b'[') => {
                self.pos += 1;
                let u = self.product()?;
                self.expect(b',')?;
                let v = self.product()?;
                self.expect(b']')?;
                u.commutator(&v)
            }
            Some(b'(') => {
                self.pos += 1;
                let u = self.product()?;
                self.expect(b')')?;
                Ok(u)
            }
            _ => Err(self.err("expected x<i>, 1, '[' or '('")),
        }
    }
}

/// Right-nested commutator `[x_a, [x_b, [x_a, ...]]]` of the given length,
/// alternating the two generators with `first` outermost.
pub fn alternating_commutator(rank: usize, first: usize, second: usize, length: usize) -> Result<Word> {
    if first == second {
        return Err(Error::InvalidArgument(
            "alternating commutator needs two distinct generators".into(),
        ));
    }
    if length == 0 {
        return Err(Error::InvalidArgument("commutator length must be positive".into()));
    }
    // innermost letter sits at position length-1
    let letter = |pos: usize| if pos.is_multiple_of(2) { first } else { second };
    let mut w = Word::generator(rank, letter(length - 1))?;
    for pos in (0..length - 1).rev() {
        w = Word::generator(rank, letter(pos))?.commutator(&w)?;
    }
    Ok(w)
}

/// Uniform length in `[0, max_len]`, uniform letters, then reduced.
pub fn random_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let letters: Vec<i32> = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..=rank) as i32;
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    Word::from_letters(rank, &letters).expect("letters in range")
}

/// Outcome of one identity on one triple.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityFailure {
    pub identity: String,
    pub x: Word,
    pub y: Word,
    pub z: Word,
    pub residue: Word,
}

#[derive(Clone, Debug, Serialize)]
pub struct HallReport {
    pub rank: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: usize,
    pub failures: Vec<IdentityFailure>,
}

impl HallReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The commutator identities as pairs `(lhs, rhs)` of words.
pub fn hall_identities(x: &Word, y: &Word, z: &Word) -> Result<Vec<(&'static str, Word, Word)>> {
    let c = |a: &Word, b: &Word| a.commutator(b);
    let cj = |a: &Word, b: &Word| a.conjugate(b);
    let one = Word::empty(x.rank());
    Ok(vec![
        ("1", cj(x, y)?, c(y, x)?.mul(x)?),
        ("2", c(y, x)?, c(x, y)?.inv()),
        ("3a", c(x, &y.inv())?, cj(&c(y, x)?, &y.inv())?),
        ("3b", c(&x.inv(), y)?, cj(&c(y, x)?, &x.inv())?),
        ("4a", c(&x.mul(y)?, z)?, cj(&c(y, z)?, x)?.mul(&c(x, z)?)?),
        ("4b", c(x, &y.mul(z)?)?, c(x, y)?.mul(&cj(&c(x, z)?, y)?)?),
        ("5", hall_witt(x, y, z)?, one),
    ])
}

/// `[x^y,[z,y]] [y^z,[x,z]] [z^x,[y,x]]`, which is trivial in every group
/// under the conventions of this module.
pub fn hall_witt(x: &Word, y: &Word, z: &Word) -> Result<Word> {
    let t = |a: &Word, b: &Word, c: &Word| -> Result<Word> { a.conjugate(b)?.commutator(&c.commutator(b)?) };
    t(x, y, z)?.mul(&t(y, z, x)?)?.mul(&t(z, x, y)?)
}

/// Checks every identity on `samples` pseudorandom triples.
pub fn hall_identity_suite(rank: usize, samples: usize, seed: u64) -> Result<HallReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut checks = 0;
    for _ in 0..samples {
        let x = random_word(&mut rng, rank, 12);
        let y = random_word(&mut rng, rank, 12);
        let z = random_word(&mut rng, rank, 12);
        for (name, lhs, rhs) in hall_identities(&x, &y, &z)? {
            checks += 1;
            if lhs != rhs {
                failures.push(IdentityFailure {
                    identity: name.to_string(),
                    residue: lhs.mul(&rhs.inv())?,
                    x: x.clone(),
                    y: y.clone(),
                    z: z.clone(),
                });
            }
        }
    }
    Ok(HallReport {
        rank,
        samples,
        seed,
        checks,
        failures,
    })
}
