//! Small shared utilities: exact rationals as "p/q" strings, stable seeded
//! RNG derivation, and combinatorial helpers.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Parse an exact rational from "p/q" or "p" (integer) form.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parameter(format!("bad rational numerator in '{s}'")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parameter(format!("bad rational denominator in '{s}'")))?;
    if d.is_zero() {
        return Err(Error::Parameter(format!("zero denominator in '{s}'")));
    }
    Ok(BigRational::new(n, d))
}

/// Format an exact rational as "p/q" ("p" when the denominator is 1).
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rational from an integer pair.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Rational from a usize.
pub fn ratio_int(p: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// True iff `value >= threshold` exactly.
pub fn ratio_ge(value: &BigRational, threshold: &BigRational) -> bool {
    value >= threshold
}

/// Checks that a rational lies strictly between 0 and 1.
pub fn check_unit_interval(name: &str, r: &BigRational) -> Result<()> {
    if r.is_positive() && *r < BigRational::one() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must lie strictly in (0,1), got {}", format_ratio(r))))
    }
}

/// FNV-1a over the label bytes mixed with the root seed. Stable across
/// platforms and releases, unlike the std hasher; every randomized operation
/// derives its own stream from (label, seed) so results replay from one seed.
pub fn sub_seed(label: &str, seed: u64) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in seed.to_le_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    for b in label.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Deterministic RNG for the given operation label and root seed.
pub fn seeded_rng(label: &str, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(label, seed))
}

/// Binomial coefficient as u128, saturating at u128::MAX.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Binomial coefficient as an exact big integer.
pub fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Factorial as an exact big integer.
pub fn factorial_big(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Calls `f` on every k-subset of `0..n`, in lexicographic order, until `f`
/// returns false; returns false iff some call returned false.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[u32]) -> bool) -> bool {
    if k > n {
        return true;
    }
    let mut cur: Vec<u32> = (0..k as u32).collect();
    loop {
        if !f(&cur) {
            return false;
        }
        // Advance to the next k-subset in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if cur[i] < (n - k + i) as u32 {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Fixed-capacity bit set over vertex ids.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_iter(len: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut b = BitSet::new(len);
        for i in it {
            b.insert(i);
        }
        b
    }

    pub fn capacity(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect_count(&self, other: &BitSet) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}
