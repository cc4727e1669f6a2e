//! Arithmetic in F_p, vectors over F_p^N, additive characters and
//! Lucas-theorem combinatorics.
//!
//! Vectors over F_2 are bit-packed into 64-bit words so that pointwise
//! products are word ANDs and coordinate sums are population counts. For odd
//! primes each coordinate takes one byte.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// An element of F_p, always kept in `[0, p)`.
pub type FieldElement = u32;

/// The prime field F_p. Moduli are restricted to primes below 256 so every
/// element fits the one-byte-per-value table formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub const BINARY: PrimeField = PrimeField { p: 2 };

    pub fn new(p: u32) -> Result<Self> {
        if !(2..256).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn is_binary(self) -> bool {
        self.p == 2
    }

    #[inline]
    pub fn add(self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: FieldElement) -> FieldElement {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: FieldElement, b: FieldElement) -> FieldElement {
        (a * b) % self.p
    }

    pub fn pow(self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: FieldElement) -> Option<FieldElement> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, u64::from(self.p) - 2))
        }
    }

    /// Reduce an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, v: i64) -> FieldElement {
        v.rem_euclid(i64::from(self.p)) as FieldElement
    }

    /// `(-1)^e` as a field element.
    #[inline]
    pub fn sign(self, e: usize) -> FieldElement {
        if e.is_multiple_of(2) {
            1
        } else {
            self.neg(1)
        }
    }

    /// `n! mod p`; zero as soon as `n >= p`.
    pub fn factorial(self, n: usize) -> FieldElement {
        if n >= self.p as usize {
            return 0;
        }
        (1..=n as u32).fold(1, |acc, i| self.mul(acc, i))
    }

    /// The additive character `e(v) = exp(2 pi i v / p)`.
    pub fn character(self, v: FieldElement) -> Complex64 {
        Complex64::from_polar(1.0, TAU * f64::from(v % self.p) / f64::from(self.p))
    }

    /// All `p` character values, indexed by field element.
    pub fn character_table(self) -> Vec<Complex64> {
        (0..self.p).map(|v| self.character(v)).collect()
    }

    pub fn random_element<R: Rng + ?Sized>(self, rng: &mut R) -> FieldElement {
        rng.random_range(0..self.p)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Bits(Vec<u64>),
    Bytes(Vec<u8>),
}

/// A vector in F_p^N.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldVector {
    field: PrimeField,
    len: usize,
    repr: Repr,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl FieldVector {
    pub fn zeros(field: PrimeField, len: usize) -> Self {
        let repr = if field.is_binary() {
            Repr::Bits(vec![0; words_for(len)])
        } else {
            Repr::Bytes(vec![0; len])
        };
        FieldVector { field, len, repr }
    }

    pub fn ones(field: PrimeField, len: usize) -> Self {
        let mut v = Self::zeros(field, len);
        for j in 0..len {
            v.set(j, 1);
        }
        v
    }

    /// Unit vector `e_j`.
    pub fn unit(field: PrimeField, len: usize, j: usize) -> Self {
        let mut v = Self::zeros(field, len);
        v.set(j, 1);
        v
    }

    pub fn from_values(field: PrimeField, values: &[u32]) -> Result<Self> {
        let mut v = Self::zeros(field, values.len());
        for (j, &x) in values.iter().enumerate() {
            if x >= field.p() {
                return Err(Error::ValueOutOfRange { value: x, p: field.p() });
            }
            v.set(j, x);
        }
        Ok(v)
    }

    /// Binary vector whose coordinate `j` is bit `j` of `mask`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "mask vectors hold at most 64 coordinates");
        let mut words = vec![0u64; words_for(len)];
        if len > 0 {
            let keep = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            words[0] = mask & keep;
        }
        FieldVector {
            field: PrimeField::BINARY,
            len,
            repr: Repr::Bits(words),
        }
    }

    /// Inverse of [`FieldVector::point_index`]: the point whose base-p digits
    /// (coordinate 1 least significant) spell `index`.
    pub fn from_index(field: PrimeField, len: usize, mut index: usize) -> Self {
        let mut v = Self::zeros(field, len);
        let p = field.p() as usize;
        for j in 0..len {
            v.set(j, (index % p) as u32);
            index /= p;
        }
        v
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, len: usize, rng: &mut R) -> Self {
        match field.is_binary() {
            true => {
                let mut words: Vec<u64> = (0..words_for(len)).map(|_| rng.random()).collect();
                if !len.is_multiple_of(64) {
                    if let Some(last) = words.last_mut() {
                        *last &= (1u64 << (len % 64)) - 1;
                    }
                }
                FieldVector {
                    field,
                    len,
                    repr: Repr::Bits(words),
                }
            }
            false => FieldVector {
                field,
                len,
                repr: Repr::Bytes((0..len).map(|_| field.random_element(rng) as u8).collect()),
            },
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> FieldElement {
        debug_assert!(j < self.len);
        match &self.repr {
            Repr::Bits(w) => ((w[j / 64] >> (j % 64)) & 1) as u32,
            Repr::Bytes(b) => u32::from(b[j]),
        }
    }

    #[inline]
    pub fn set(&mut self, j: usize, value: FieldElement) {
        debug_assert!(j < self.len && value < self.field.p());
        match &mut self.repr {
            Repr::Bits(w) => {
                let bit = 1u64 << (j % 64);
                if value & 1 == 1 {
                    w[j / 64] |= bit;
                } else {
                    w[j / 64] &= !bit;
                }
            }
            Repr::Bytes(b) => b[j] = value as u8,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.len).map(move |j| self.get(j))
    }

    pub fn to_values(&self) -> Vec<FieldElement> {
        self.iter().collect()
    }

    /// Packed words of a binary vector.
    pub fn words(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Bits(w) => Some(w),
            Repr::Bytes(_) => None,
        }
    }

    /// The vector as a bit mask; binary vectors of length at most 64 only.
    pub fn mask(&self) -> Option<u64> {
        match &self.repr {
            Repr::Bits(w) if self.len <= 64 => Some(w.first().copied().unwrap_or(0)),
            _ => None,
        }
    }

    /// Position of this point in a dense table: `sum_j x(j) p^j`.
    pub fn point_index(&self) -> usize {
        if let Some(m) = self.mask() {
            return m as usize;
        }
        let p = self.field.p() as usize;
        (0..self.len)
            .rev()
            .fold(0usize, |acc, j| acc * p + self.get(j) as usize)
    }

    fn check_compatible(&self, other: &FieldVector) -> Result<()> {
        if self.field != other.field || self.len != other.len {
            return Err(Error::DimensionMismatch(format!(
                "vectors over {} of length {} and over {} of length {}",
                self.field, self.len, other.field, other.len
            )));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &FieldVector,
        words: impl Fn(u64, u64) -> u64,
        elems: impl Fn(u32, u32) -> u32,
    ) -> Result<FieldVector> {
        self.check_compatible(other)?;
        let repr = match (&self.repr, &other.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => Repr::Bits(a.iter().zip(b).map(|(&x, &y)| words(x, y)).collect()),
            (Repr::Bytes(a), Repr::Bytes(b)) => Repr::Bytes(
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| elems(u32::from(x), u32::from(y)) as u8)
                    .collect(),
            ),
            _ => unreachable!("representation follows the field"),
        };
        Ok(FieldVector {
            field: self.field,
            len: self.len,
            repr,
        })
    }

    pub fn add(&self, other: &FieldVector) -> Result<FieldVector> {
        let f = self.field;
        self.zip_with(other, |a, b| a ^ b, move |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &FieldVector) -> Result<FieldVector> {
        let f = self.field;
        self.zip_with(other, |a, b| a ^ b, move |a, b| f.sub(a, b))
    }

    /// Pointwise product `(yz)(j) = y(j) z(j)`.
    pub fn pointwise_mul(&self, other: &FieldVector) -> Result<FieldVector> {
        let f = self.field;
        self.zip_with(other, |a, b| a & b, move |a, b| f.mul(a, b))
    }

    pub fn scale(&self, c: FieldElement) -> FieldVector {
        let f = self.field;
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Bits(w) => {
                if c.is_multiple_of(2) {
                    w.iter_mut().for_each(|x| *x = 0);
                }
            }
            Repr::Bytes(b) => b.iter_mut().for_each(|x| *x = f.mul(u32::from(*x), c) as u8),
        }
        out
    }

    /// Coordinate sum `<x, 1>` in F_p.
    pub fn sum(&self) -> FieldElement {
        match &self.repr {
            Repr::Bits(w) => w.iter().map(|x| x.count_ones()).sum::<u32>() & 1,
            Repr::Bytes(b) => (b.iter().map(|&x| u64::from(x)).sum::<u64>() % u64::from(self.field.p())) as u32,
        }
    }

    /// Inner product `<x, y>` in F_p.
    pub fn dot(&self, other: &FieldVector) -> Result<FieldElement> {
        Ok(self.pointwise_mul(other)?.sum())
    }

    /// Number of nonzero coordinates.
    pub fn weight(&self) -> usize {
        match &self.repr {
            Repr::Bits(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
            Repr::Bytes(b) => b.iter().filter(|&&x| x != 0).count(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Bits(w) => w.iter().all(|&x| x == 0),
            Repr::Bytes(b) => b.iter().all(|&x| x == 0),
        }
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, v) in self.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Entrywise power `x^i`, `0 <= i < p`. `x^0` is the all-ones vector.
pub fn power_vector(x: &FieldVector, i: u32) -> Result<FieldVector> {
    let field = x.field();
    if i >= field.p() {
        return Err(Error::ExponentOutOfRange {
            exponent: i,
            p: field.p(),
        });
    }
    match i {
        0 => Ok(FieldVector::ones(field, x.len())),
        1 => Ok(x.clone()),
        _ => {
            let mut out = FieldVector::zeros(field, x.len());
            for j in 0..x.len() {
                out.set(j, field.pow(x.get(j), u64::from(i)));
            }
            Ok(out)
        }
    }
}

/// The pointwise product `r_tau` of the rows indexed by `tau` together with
/// its coordinate sum `<r_tau, 1>`. The empty product is the all-ones vector.
pub fn product_functional(rows: &[FieldVector], tau: &[usize]) -> Result<(FieldVector, FieldElement)> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Precondition("product_functional needs at least one row to fix N".into()))?;
    for r in rows {
        first.check_compatible(r)?;
    }
    let mut acc = FieldVector::ones(first.field(), first.len());
    for &i in tau {
        let row = rows.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            limit: rows.len(),
        })?;
        acc = acc.pointwise_mul(row)?;
    }
    let s = acc.sum();
    Ok((acc, s))
}

/// Base-p digits of `w`, least significant first. Digit index 0 is the units
/// digit, so the coefficient of p^2 sits at index 2.
pub fn base_p_digits(mut w: u64, p: u32, count: usize) -> Vec<u32> {
    let p = u64::from(p);
    (0..count)
        .map(|_| {
            let d = (w % p) as u32;
            w /= p;
            d
        })
        .collect()
}

/// `C(n, k) mod p`, digit by digit (Lucas).
pub fn lucas_binomial(mut n: u64, mut k: u64, field: PrimeField) -> FieldElement {
    let p = u64::from(field.p());
    let mut acc = 1u32;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        acc = field.mul(acc, small_binomial_mod(nd as u32, kd as u32, field));
        n /= p;
        k /= p;
    }
    acc
}

fn small_binomial_mod(n: u32, k: u32, field: PrimeField) -> FieldElement {
    // n < p here, so every factorial below is invertible.
    let num = field.factorial(n as usize);
    let den = field.mul(field.factorial(k as usize), field.factorial((n - k) as usize));
    field.mul(num, field.inv(den).expect("factorials below p are units"))
}
