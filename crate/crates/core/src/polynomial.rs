//! Sparse polynomials over F_p in the ring of functions, i.e. modulo
//! `x_j^p - x_j`: every exponent is kept below `p`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitTable;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldVector, PrimeField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndexPolynomial {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<Vec<u8>, FieldElement>,
}

/// On-disk polynomial: variables are 1-based, a repeated variable raises
/// its exponent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolynomialFile {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub terms: Vec<TermFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermFile {
    pub vars: Vec<usize>,
    pub coeff: u32,
}

/// Reduce an exponent using `x^p = x`.
fn reduce_exponent(e: u32, p: u32) -> u8 {
    if e == 0 {
        0
    } else {
        (((e - 1) % (p - 1)) + 1) as u8
    }
}

impl MultiIndexPolynomial {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        MultiIndexPolynomial {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: FieldElement) -> Self {
        let mut p = Self::zero(field, nvars);
        p.add_term(vec![0; nvars], c).expect("constant term is well formed");
        p
    }

    /// The monomial `prod_{j in vars} x_j` (0-based variables, repeats raise
    /// exponents) with coefficient 1.
    pub fn monomial(field: PrimeField, nvars: usize, vars: &[usize]) -> Result<Self> {
        let mut p = Self::zero(field, nvars);
        p.add_term(Self::exponents_of(field, nvars, vars)?, 1)?;
        Ok(p)
    }

    fn exponents_of(field: PrimeField, nvars: usize, vars: &[usize]) -> Result<Vec<u8>> {
        let mut raw = vec![0u32; nvars];
        for &v in vars {
            if v >= nvars {
                return Err(Error::IndexOutOfRange { index: v, limit: nvars });
            }
            raw[v] += 1;
        }
        Ok(raw.into_iter().map(|e| reduce_exponent(e, field.p())).collect())
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], FieldElement)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exponents: &[u8]) -> FieldElement {
        self.terms.get(exponents).copied().unwrap_or(0)
    }

    /// Adds `coeff * x^exponents`; exponents are reduced modulo `x^p = x`.
    pub fn add_term(&mut self, exponents: Vec<u8>, coeff: FieldElement) -> Result<()> {
        if exponents.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "exponent vector of length {} for {} variables",
                exponents.len(),
                self.nvars
            )));
        }
        let p = self.field.p();
        let exps: Vec<u8> = exponents
            .into_iter()
            .map(|e| reduce_exponent(u32::from(e), p))
            .collect();
        let c = coeff % p;
        if c == 0 {
            return Ok(());
        }
        let entry = self.terms.entry(exps).or_insert(0);
        *entry = self.field.add(*entry, c);
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiIndexPolynomial) -> Result<MultiIndexPolynomial> {
        if self.field != other.field || self.nvars != other.nvars {
            return Err(Error::DimensionMismatch("polynomials over different rings".into()));
        }
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.to_vec(), c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiIndexPolynomial) -> Result<MultiIndexPolynomial> {
        let mut neg = other.clone();
        for c in neg.terms.values_mut() {
            *c = self.field.neg(*c);
        }
        self.add(&neg)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.iter().map(|&x| usize::from(x)).sum()).max()
    }

    pub fn eval(&self, x: &FieldVector) -> Result<FieldElement> {
        if x.len() != self.nvars || x.field() != self.field {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for {} variables",
                x.len(),
                self.nvars
            )));
        }
        let f = self.field;
        let mut acc = 0;
        for (exps, &c) in &self.terms {
            let mut t = c;
            for (j, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t = f.mul(t, f.pow(x.get(j), u64::from(e)));
                    if t == 0 {
                        break;
                    }
                }
            }
            acc = f.add(acc, t);
        }
        Ok(acc)
    }

    /// Truth table of a polynomial over F_2, via the Moebius transform.
    pub fn bit_table(&self) -> Result<BitTable> {
        if !self.field.is_binary() {
            return Err(Error::Unsupported("bit tables exist only for p = 2".into()));
        }
        let mut t = BitTable::zeros(self.nvars);
        for exps in self.terms.keys() {
            let m = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .fold(0usize, |acc, (j, _)| acc | (1 << j));
            t.set(m, !t.get(m));
        }
        t.moebius();
        Ok(t)
    }

    /// Algebraic normal form of a binary truth table.
    pub fn from_bit_table(t: &BitTable) -> Self {
        let mut anf = t.clone();
        anf.moebius();
        let n = t.nvars();
        let mut p = Self::zero(PrimeField::BINARY, n);
        for m in 0..t.len() {
            if anf.get(m) {
                let exps = (0..n).map(|j| ((m >> j) & 1) as u8).collect();
                p.terms.insert(exps, 1);
            }
        }
        p
    }

    /// All exponent vectors with entries below `p` and total degree at most
    /// `degree`, ordered by degree and then lexicographically by variable.
    pub fn monomials_up_to(field: PrimeField, nvars: usize, degree: usize) -> Vec<Vec<u8>> {
        let maxe = (field.p() - 1) as u8;
        let mut by_degree: Vec<Vec<Vec<u8>>> = vec![Vec::new(); degree + 1];
        fn rec(j: usize, left: usize, maxe: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<Vec<u8>>>, total: usize) {
            if j == cur.len() {
                out[total].push(cur.clone());
                return;
            }
            for e in 0..=(maxe as usize).min(left) as u8 {
                cur[j] = e;
                rec(j + 1, left - e as usize, maxe, cur, out, total + e as usize);
            }
            cur[j] = 0;
        }
        let mut cur = vec![0u8; nvars];
        rec(0, degree, maxe, &mut cur, &mut by_degree, 0);
        let mut all = Vec::new();
        for mut group in by_degree {
            group.sort_by(|a, b| b.cmp(a));
            all.extend(group);
        }
        all
    }

    /// A polynomial of degree at most `degree` with i.i.d. uniform
    /// coefficients on every admissible monomial.
    pub fn random<R: Rng + ?Sized>(field: PrimeField, nvars: usize, degree: usize, rng: &mut R) -> Self {
        let mut p = Self::zero(field, nvars);
        for exps in Self::monomials_up_to(field, nvars, degree) {
            let c = field.random_element(rng);
            if c != 0 {
                p.terms.insert(exps, c);
            }
        }
        p
    }

    pub fn to_file(&self) -> PolynomialFile {
        let terms = self
            .terms
            .iter()
            .map(|(exps, &c)| TermFile {
                vars: exps
                    .iter()
                    .enumerate()
                    .flat_map(|(j, &e)| std::iter::repeat_n(j + 1, usize::from(e)))
                    .collect(),
                coeff: c,
            })
            .collect();
        PolynomialFile {
            p: self.field.p(),
            n: self.nvars,
            terms,
        }
    }

    pub fn from_file(file: &PolynomialFile) -> Result<Self> {
        let field = PrimeField::new(file.p)?;
        let mut p = Self::zero(field, file.n);
        for t in &file.terms {
            if t.vars.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Parse(format!("variable list {:?} is not sorted", t.vars)));
            }
            if t.coeff >= field.p() {
                return Err(Error::ValueOutOfRange {
                    value: t.coeff,
                    p: field.p(),
                });
            }
            let zero_based = t
                .vars
                .iter()
                .map(|&v| {
                    v.checked_sub(1)
                        .ok_or_else(|| Error::Parse("variables are 1-based".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            p.add_term(Self::exponents_of(field, file.n, &zero_based)?, t.coeff)?;
        }
        Ok(p)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: PolynomialFile = serde_json::from_str(&text)?;
        Self::from_file(&file)
    }
}
