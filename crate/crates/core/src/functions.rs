//! Functions F_p^N -> F_p: dense tables and lazy evaluators, directional
//! derivatives, correlations and the character transform.
//!
//! Dense tables list values in lexicographic order with coordinate 1 least
//! significant, so the value at `x` sits at index `sum_j x(j) p^j`.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::bits::BitTable;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldVector, PrimeField};
use crate::polynomial::MultiIndexPolynomial;
use crate::symmetric::{eval_symmetric, SymmetricSpec};

/// Default limit on the number of points of a materialized dense table.
pub const DEFAULT_DENSE_CAP: usize = 1 << 26;

/// Points enumerated by exhaustive evaluation of lazy functions.
const EXHAUSTIVE_LAZY_LIMIT: usize = 1 << 32;

const UFN1_MAGIC: &[u8; 4] = b"UFN1";

type Evaluator = Arc<dyn Fn(&FieldVector) -> FieldElement + Send + Sync>;

#[derive(Clone)]
enum Body {
    Dense(Arc<[u8]>),
    Lazy(Evaluator),
}

/// A function F_p^N -> F_p. Cloning is cheap; the table or evaluator is
/// shared.
#[derive(Clone)]
pub struct FiniteFunction {
    field: PrimeField,
    dim: usize,
    body: Body,
}

impl fmt::Debug for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.body {
            Body::Dense(_) => "dense",
            Body::Lazy(_) => "lazy",
        };
        write!(f, "FiniteFunction({kind}, {}, N = {})", self.field, self.dim)
    }
}

/// `p^dim`, or `None` on overflow.
pub fn point_count(field: PrimeField, dim: usize) -> Option<usize> {
    (field.p() as usize).checked_pow(u32::try_from(dim).ok()?)
}

impl FiniteFunction {
    pub fn dense(field: PrimeField, dim: usize, values: Vec<u8>) -> Result<Self> {
        let n = point_count(field, dim).ok_or_else(|| Error::too_large("p^N", "usize"))?;
        if values.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "table of {} values for {n} points",
                values.len()
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| u32::from(v) >= field.p()) {
            return Err(Error::ValueOutOfRange {
                value: u32::from(bad),
                p: field.p(),
            });
        }
        Ok(FiniteFunction {
            field,
            dim,
            body: Body::Dense(values.into()),
        })
    }

    /// Dense table built by evaluating `f` at every point.
    pub fn tabulate(field: PrimeField, dim: usize, f: impl Fn(&FieldVector) -> FieldElement) -> Result<Self> {
        let n = point_count(field, dim).ok_or_else(|| Error::too_large("p^N", "usize"))?;
        let values = (0..n)
            .map(|i| f(&FieldVector::from_index(field, dim, i)) as u8)
            .collect();
        Self::dense(field, dim, values)
    }

    pub fn lazy(
        field: PrimeField,
        dim: usize,
        f: impl Fn(&FieldVector) -> FieldElement + Send + Sync + 'static,
    ) -> Self {
        FiniteFunction {
            field,
            dim,
            body: Body::Lazy(Arc::new(f)),
        }
    }

    pub fn from_bit_table(t: &BitTable) -> Self {
        let values = (0..t.len()).map(|x| u8::from(t.get(x))).collect();
        Self::dense(PrimeField::BINARY, t.nvars(), values).expect("bit tables are well formed")
    }

    pub fn zero(field: PrimeField, dim: usize) -> Result<Self> {
        let n = point_count(field, dim).ok_or_else(|| Error::too_large("p^N", "usize"))?;
        Self::dense(field, dim, vec![0; n])
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.body, Body::Dense(_))
    }

    pub fn table(&self) -> Option<&[u8]> {
        match &self.body {
            Body::Dense(t) => Some(t),
            Body::Lazy(_) => None,
        }
    }

    fn require_table(&self, what: &str) -> Result<&[u8]> {
        self.table()
            .ok_or_else(|| Error::Unsupported(format!("{what} needs a dense function")))
    }

    pub fn num_points(&self) -> Option<usize> {
        point_count(self.field, self.dim)
    }

    pub fn eval(&self, x: &FieldVector) -> FieldElement {
        debug_assert_eq!(x.len(), self.dim);
        match &self.body {
            Body::Dense(t) => u32::from(t[x.point_index()]),
            Body::Lazy(f) => f(x),
        }
    }

    /// Value at the point with table index `i`.
    pub fn eval_index(&self, i: usize) -> FieldElement {
        match &self.body {
            Body::Dense(t) => u32::from(t[i]),
            Body::Lazy(f) => f(&FieldVector::from_index(self.field, self.dim, i)),
        }
    }

    /// Value of a binary function at the point whose coordinate `j` is bit
    /// `j` of `mask`. Requires `p = 2` and `N <= 64`.
    #[inline]
    pub fn eval_mask(&self, mask: u64) -> FieldElement {
        debug_assert!(self.field.is_binary() && self.dim <= 64);
        match &self.body {
            Body::Dense(t) => u32::from(t[mask as usize]),
            Body::Lazy(f) => f(&FieldVector::from_mask(self.dim, mask)),
        }
    }

    pub fn to_dense(&self, cap: usize) -> Result<FiniteFunction> {
        if self.is_dense() {
            return Ok(self.clone());
        }
        match self.num_points() {
            Some(n) if n <= cap => {
                let values = (0..n).map(|i| self.eval_index(i) as u8).collect();
                Self::dense(self.field, self.dim, values)
            }
            _ => Err(Error::too_large(
                format!("{}^{} points", self.field.p(), self.dim),
                format!("dense cap of {cap} points"),
            )),
        }
    }

    /// Packed truth table of a dense binary function.
    pub fn bit_table(&self) -> Result<BitTable> {
        if !self.field.is_binary() {
            return Err(Error::Unsupported("bit tables exist only for p = 2".into()));
        }
        let t = self.require_table("bit table")?;
        Ok(BitTable::from_fn(self.dim, |x| t[x] == 1))
    }

    fn check_same_space(&self, other: &FiniteFunction) -> Result<()> {
        if self.field != other.field || self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "functions on {}^{} and {}^{}",
                self.field, self.dim, other.field, other.dim
            )));
        }
        Ok(())
    }

    fn check_direction(&self, y: &FieldVector) -> Result<()> {
        if y.field() != self.field || y.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "direction of length {} over {} for a function on {}^{}",
                y.len(),
                y.field(),
                self.field,
                self.dim
            )));
        }
        Ok(())
    }

    /// `f_y(x) = f(x + y) - f(x)`. Dense in, dense out; lazy in, lazy out.
    pub fn derivative(&self, y: &FieldVector) -> Result<FiniteFunction> {
        self.check_direction(y)?;
        let field = self.field;
        match &self.body {
            Body::Dense(t) => {
                let shifted = shifted_indices(field, self.dim, y);
                let values = shifted
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| field.sub(u32::from(t[j]), u32::from(t[i])) as u8)
                    .collect();
                Self::dense(field, self.dim, values)
            }
            Body::Lazy(f) => {
                let f = Arc::clone(f);
                let y = y.clone();
                Ok(Self::lazy(field, self.dim, move |x| {
                    let xy = x.add(&y).expect("dimensions checked at construction");
                    field.sub(f(&xy), f(x))
                }))
            }
        }
    }

    /// Coefficient of the multilinear monomial `prod_{j in vars} x_j` in the
    /// reduced polynomial representing a dense function, extracted from the
    /// table by Lagrange interpolation on the points supported in `vars`.
    pub fn multilinear_coefficient(&self, vars: &[usize]) -> Result<FieldElement> {
        let t = self.require_table("coefficient extraction")?;
        if vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(
                "monomial indices must be strictly increasing".into(),
            ));
        }
        if let Some(&v) = vars.iter().find(|&&v| v >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: v,
                limit: self.dim,
            });
        }
        let field = self.field;
        let p = field.p() as usize;
        // Coefficient of t in the indicator 1 - (t - a)^{p-1} is
        // -(p-1)(-a)^{p-2}, which is 1 for p = 2.
        let lin: Vec<FieldElement> = (0..field.p())
            .map(|a| {
                let base = field.pow(field.neg(a), u64::from(field.p() - 2));
                field.neg(field.mul(field.p() - 1, base))
            })
            .collect();
        let strides: Vec<usize> = vars.iter().map(|&v| p.pow(v as u32)).collect();
        let m = vars.len();
        let mut acc = 0;
        let total = p.pow(m as u32);
        for local in 0..total {
            let mut idx = 0;
            let mut weight = 1;
            let mut rest = local;
            for s in &strides {
                let a = rest % p;
                rest /= p;
                idx += a * s;
                weight = field.mul(weight, lin[a]);
            }
            acc = field.add(acc, field.mul(weight, u32::from(t[idx])));
        }
        Ok(acc)
    }

    pub fn write_ufn1(&self, mut w: impl Write) -> Result<()> {
        let t = self.require_table("UFN1 serialization")?;
        w.write_all(UFN1_MAGIC)?;
        w.write_all(&[self.field.p() as u8])?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(t)?;
        Ok(())
    }

    pub fn read_ufn1(mut r: impl Read) -> Result<Self> {
        let mut header = [0u8; 9];
        r.read_exact(&mut header)?;
        if &header[..4] != UFN1_MAGIC {
            return Err(Error::Parse("missing UFN1 magic".into()));
        }
        let field = PrimeField::new(u32::from(header[4]))?;
        let dim = u32::from_le_bytes(header[5..9].try_into().expect("four bytes")) as usize;
        let n = point_count(field, dim).ok_or_else(|| Error::too_large("p^N", "usize"))?;
        let mut values = vec![0u8; n];
        r.read_exact(&mut values)?;
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::Parse("trailing bytes after UFN1 table".into()));
        }
        Self::dense(field, dim, values)
    }

    pub fn load_ufn1(path: &Path) -> Result<Self> {
        Self::read_ufn1(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// For every point index `i`, the index of `x_i + y`.
pub(crate) fn shifted_indices(field: PrimeField, dim: usize, y: &FieldVector) -> Vec<usize> {
    let n = point_count(field, dim).expect("dense tables fit in memory");
    if field.is_binary() {
        let m = y.point_index();
        return (0..n).map(|i| i ^ m).collect();
    }
    let p = field.p() as usize;
    let ys: Vec<usize> = y.iter().map(|v| v as usize).collect();
    let strides: Vec<usize> = (0..dim).map(|j| p.pow(j as u32)).collect();
    let mut digits = vec![0usize; dim];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let idx = digits
            .iter()
            .zip(&ys)
            .zip(&strides)
            .map(|((&d, &yv), &s)| ((d + yv) % p) * s)
            .sum();
        out.push(idx);
        for d in digits.iter_mut() {
            *d += 1;
            if *d < p {
                break;
            }
            *d = 0;
        }
    }
    out
}

/// `f_{y_1 ... y_k}`, applying the directions in order.
pub fn iterated_derivative(f: &FiniteFunction, directions: &[FieldVector]) -> Result<FiniteFunction> {
    directions.iter().try_fold(f.clone(), |acc, y| acc.derivative(y))
}

/// `<f, g> = E_x e(f(x) - g(x))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Correlation {
    /// Over F_2: `signed_sum / 2^log2_denominator`.
    Exact {
        signed_sum: i64,
        log2_denominator: u32,
    },
    Complex(Complex64),
}

impl Correlation {
    pub fn value(&self) -> Complex64 {
        match *self {
            Correlation::Exact {
                signed_sum,
                log2_denominator,
            } => Complex64::new(signed_sum as f64 / 2f64.powi(log2_denominator as i32), 0.0),
            Correlation::Complex(c) => c,
        }
    }

    pub fn abs(&self) -> f64 {
        self.value().norm()
    }
}

/// Exact for p = 2 (a signed count); a complex average for odd p.
pub fn correlation(f: &FiniteFunction, g: &FiniteFunction) -> Result<Correlation> {
    f.check_same_space(g)?;
    let n = f
        .num_points()
        .filter(|&n| n <= EXHAUSTIVE_LAZY_LIMIT)
        .ok_or_else(|| Error::too_large("exhaustive correlation", EXHAUSTIVE_LAZY_LIMIT))?;
    let field = f.field;
    if field.is_binary() {
        let disagree = match (f.table(), g.table()) {
            (Some(a), Some(b)) => a.iter().zip(b).filter(|(x, y)| x != y).count(),
            _ => (0..n).filter(|&i| f.eval_index(i) != g.eval_index(i)).count(),
        } as i64;
        return Ok(Correlation::Exact {
            signed_sum: n as i64 - 2 * disagree,
            log2_denominator: f.dim as u32,
        });
    }
    let chars = field.character_table();
    let mut counts = vec![0u64; field.p() as usize];
    for i in 0..n {
        counts[field.sub(f.eval_index(i), g.eval_index(i)) as usize] += 1;
    }
    let sum: Complex64 = counts.iter().zip(&chars).map(|(&c, &ch)| ch * c as f64).sum();
    Ok(Correlation::Complex(sum / n as f64))
}

/// Coefficients of `e(f)` against the characters `xi^{<alpha, x>}`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    field: PrimeField,
    dim: usize,
    coefficients: Vec<Complex64>,
    walsh: Option<Vec<i64>>,
}

impl Spectrum {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient at the frequency with table index `alpha`.
    pub fn coefficient(&self, alpha: usize) -> Complex64 {
        self.coefficients[alpha]
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Over F_2 the unnormalized integer Walsh coefficients
    /// `sum_x (-1)^{f(x) + <alpha, x>}`.
    pub fn walsh(&self) -> Option<&[i64]> {
        self.walsh.as_deref()
    }

    /// `sum_alpha |c_alpha|^2`, which is 1 by Parseval.
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// In-place Walsh-Hadamard butterfly over a table of length `2^n`.
pub fn walsh_hadamard<T>(data: &mut [T])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Character transform of a dense function: size-p butterflies applied once
/// per coordinate.
pub fn character_spectrum(f: &FiniteFunction) -> Result<Spectrum> {
    let t = f.require_table("character spectrum")?;
    let field = f.field;
    let n = t.len();
    if field.is_binary() {
        let mut w: Vec<i64> = t.iter().map(|&v| 1 - 2 * i64::from(v)).collect();
        walsh_hadamard(&mut w);
        let scale = n as f64;
        let coefficients = w.iter().map(|&c| Complex64::new(c as f64 / scale, 0.0)).collect();
        return Ok(Spectrum {
            field,
            dim: f.dim,
            coefficients,
            walsh: Some(w),
        });
    }
    let p = field.p() as usize;
    let chars = field.character_table();
    let mut data: Vec<Complex64> = t.iter().map(|&v| chars[v as usize]).collect();
    let mut scratch = vec![Complex64::new(0.0, 0.0); p];
    let mut stride = 1;
    for _ in 0..f.dim {
        for base in (0..n).step_by(stride * p) {
            for off in 0..stride {
                let start = base + off;
                for (a, s) in scratch.iter_mut().enumerate() {
                    *s = (0..p)
                        .map(|x| data[start + x * stride] * chars[(p - (a * x) % p) % p])
                        .sum();
                }
                for (a, s) in scratch.iter().enumerate() {
                    data[start + a * stride] = *s;
                }
            }
        }
        stride *= p;
    }
    let scale = n as f64;
    data.iter_mut().for_each(|c| *c /= scale);
    Ok(Spectrum {
        field,
        dim: f.dim,
        coefficients: data,
        walsh: None,
    })
}

/// What to materialize.
#[derive(Clone, Debug)]
pub enum FunctionDescriptor {
    /// The elementary symmetric polynomial `S_n`.
    Symmetric(usize),
    Polynomial(MultiIndexPolynomial),
    Table(FiniteFunction),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MaterializeMode {
    /// Dense when `p^N` fits the cap, lazy otherwise.
    #[default]
    Auto,
    Dense,
    Lazy,
}

pub fn materialize(
    desc: &FunctionDescriptor,
    field: PrimeField,
    dim: usize,
    mode: MaterializeMode,
    cap: usize,
) -> Result<FiniteFunction> {
    let fits = point_count(field, dim).is_some_and(|n| n <= cap);
    let dense = match mode {
        MaterializeMode::Auto => fits,
        MaterializeMode::Dense if !fits => {
            return Err(Error::too_large(
                format!("{}^{dim} points", field.p()),
                format!("dense cap of {cap} points"),
            ))
        }
        MaterializeMode::Dense => true,
        MaterializeMode::Lazy => false,
    };
    match desc {
        FunctionDescriptor::Symmetric(n) => {
            let spec = SymmetricSpec::new(*n, field, dim);
            if dense && field.is_binary() {
                // On the boolean cube S_n depends only on the weight.
                let by_weight: Vec<u8> = (0..=dim)
                    .map(|w| {
                        let x = FieldVector::from_index(field, dim, (1usize << w) - 1);
                        eval_symmetric(&spec, &x) as u8
                    })
                    .collect();
                let n_points = 1usize << dim;
                let values = (0..n_points).map(|i| by_weight[i.count_ones() as usize]).collect();
                FiniteFunction::dense(field, dim, values)
            } else if dense {
                FiniteFunction::tabulate(field, dim, |x| eval_symmetric(&spec, x))
            } else {
                Ok(FiniteFunction::lazy(field, dim, move |x| eval_symmetric(&spec, x)))
            }
        }
        FunctionDescriptor::Polynomial(poly) => {
            if poly.field() != field || poly.nvars() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "polynomial over {}^{} requested as a function on {field}^{dim}",
                    poly.field(),
                    poly.nvars()
                )));
            }
            if dense && field.is_binary() {
                Ok(FiniteFunction::from_bit_table(&poly.bit_table()?))
            } else if dense {
                FiniteFunction::tabulate(field, dim, |x| poly.eval(x).expect("dimensions checked"))
            } else {
                let poly = poly.clone();
                Ok(FiniteFunction::lazy(field, dim, move |x| {
                    poly.eval(x).expect("dimensions checked")
                }))
            }
        }
        FunctionDescriptor::Table(f) => {
            if f.field != field || f.dim != dim {
                return Err(Error::DimensionMismatch(format!(
                    "table on {}^{} requested as a function on {field}^{dim}",
                    f.field, f.dim
                )));
            }
            Ok(f.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    fn random_dense(field: PrimeField, dim: usize, rng: &mut ChaCha8Rng) -> FiniteFunction {
        let n = point_count(field, dim).unwrap();
        let values = (0..n).map(|_| field.random_element(rng) as u8).collect();
        FiniteFunction::dense(field, dim, values).unwrap()
    }

    fn x1x2() -> FiniteFunction {
        FiniteFunction::dense(PrimeField::BINARY, 2, vec![0, 0, 0, 1]).unwrap()
    }

    #[test]
    fn materialize_examples() {
        let b = PrimeField::BINARY;
        let s4 = materialize(
            &FunctionDescriptor::Symmetric(4),
            b,
            4,
            MaterializeMode::Auto,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        let t = s4.table().unwrap();
        assert_eq!(t.len(), 16);
        assert_eq!(t.iter().filter(|&&v| v == 1).count(), 1);
        assert_eq!(t[15], 1);

        let poly = MultiIndexPolynomial::monomial(b, 2, &[0, 1]).unwrap();
        let g = materialize(
            &FunctionDescriptor::Polynomial(poly),
            b,
            2,
            MaterializeMode::Auto,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        assert_eq!(g.table().unwrap(), &[0, 0, 0, 1]);

        let s5 = materialize(
            &FunctionDescriptor::Symmetric(5),
            b,
            4,
            MaterializeMode::Auto,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        assert!(s5.table().unwrap().iter().all(|&v| v == 0));

        assert!(matches!(
            materialize(
                &FunctionDescriptor::Symmetric(4),
                b,
                30,
                MaterializeMode::Dense,
                DEFAULT_DENSE_CAP
            ),
            Err(Error::TooLarge { .. })
        ));
        let lazy = materialize(
            &FunctionDescriptor::Symmetric(4),
            b,
            40,
            MaterializeMode::Auto,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        assert!(!lazy.is_dense());
    }

    #[test]
    fn dense_and_lazy_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, dim, n) in [(2, 10, 4), (3, 6, 4), (5, 4, 3)] {
            let field = PrimeField::new(p).unwrap();
            let desc = FunctionDescriptor::Symmetric(n);
            let d = materialize(&desc, field, dim, MaterializeMode::Dense, DEFAULT_DENSE_CAP).unwrap();
            let l = materialize(&desc, field, dim, MaterializeMode::Lazy, DEFAULT_DENSE_CAP).unwrap();
            let poly = MultiIndexPolynomial::random(field, dim, 2, &mut rng);
            let pd = materialize(
                &FunctionDescriptor::Polynomial(poly.clone()),
                field,
                dim,
                MaterializeMode::Dense,
                DEFAULT_DENSE_CAP,
            )
            .unwrap();
            let pl = materialize(
                &FunctionDescriptor::Polynomial(poly),
                field,
                dim,
                MaterializeMode::Lazy,
                DEFAULT_DENSE_CAP,
            )
            .unwrap();
            for _ in 0..1000 {
                let x = FieldVector::random(field, dim, &mut rng);
                assert_eq!(d.eval(&x), l.eval(&x));
                assert_eq!(pd.eval(&x), pl.eval(&x));
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let b = PrimeField::BINARY;
        let f = x1x2();
        let e1 = FieldVector::from_values(b, &[1, 0]).unwrap();
        let e2 = FieldVector::from_values(b, &[0, 1]).unwrap();
        // (x1 + 1) x2 - x1 x2 = x2.
        assert_eq!(f.derivative(&e1).unwrap().table().unwrap(), &[0, 0, 1, 1]);
        let second = iterated_derivative(&f, &[e1.clone(), e2]).unwrap();
        assert!(second.table().unwrap().iter().all(|&v| v == 1));
        let wrong = FieldVector::zeros(b, 3);
        assert!(matches!(f.derivative(&wrong), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn derivatives_commute_and_collapse_in_char_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (field, dim) in [(PrimeField::BINARY, 6), (f3(), 4)] {
            for _ in 0..20 {
                let f = random_dense(field, dim, &mut rng);
                let y = FieldVector::random(field, dim, &mut rng);
                let z = FieldVector::random(field, dim, &mut rng);
                let yz = iterated_derivative(&f, &[y.clone(), z.clone()]).unwrap();
                let zy = iterated_derivative(&f, &[z, y.clone()]).unwrap();
                assert_eq!(yz.table(), zy.table());
                if field.is_binary() {
                    let yy = iterated_derivative(&f, &[y.clone(), y]).unwrap();
                    assert!(yy.table().unwrap().iter().all(|&v| v == 0));
                }
            }
        }
    }

    #[test]
    fn lazy_derivative_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let field = f3();
        let f = random_dense(field, 4, &mut rng);
        let t = f.table().unwrap().to_vec();
        let lazy = FiniteFunction::lazy(field, 4, move |x| u32::from(t[x.point_index()]));
        let y = FieldVector::random(field, 4, &mut rng);
        let d = f.derivative(&y).unwrap();
        let l = lazy.derivative(&y).unwrap();
        assert!(!l.is_dense());
        for i in 0..81 {
            assert_eq!(d.eval_index(i), l.eval_index(i));
        }
    }

    #[test]
    fn correlation_examples() {
        let b = PrimeField::BINARY;
        let x1 = FiniteFunction::dense(b, 1, vec![0, 1]).unwrap();
        let zero1 = FiniteFunction::zero(b, 1).unwrap();
        assert_eq!(correlation(&x1, &zero1).unwrap().abs(), 0.0);
        assert_eq!(correlation(&x1, &x1).unwrap().abs(), 1.0);
        let s4 = materialize(
            &FunctionDescriptor::Symmetric(4),
            b,
            4,
            MaterializeMode::Auto,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        let c = correlation(&s4, &FiniteFunction::zero(b, 4).unwrap()).unwrap();
        assert_eq!(
            c,
            Correlation::Exact {
                signed_sum: 14,
                log2_denominator: 4
            }
        );
        assert_eq!(c.abs(), 0.875);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_dense(f3(), 3, &mut rng);
        assert!((correlation(&g, &g).unwrap().value() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn spectrum_examples() {
        let s = character_spectrum(&x1x2()).unwrap();
        assert_eq!(s.walsh().unwrap(), &[2, 2, 2, -2]);
        assert!(s.coefficients().iter().all(|c| (c.norm() - 0.5).abs() < 1e-12));
        let z = character_spectrum(&FiniteFunction::zero(f3(), 3).unwrap()).unwrap();
        assert!((z.coefficient(0).re - 1.0).abs() < 1e-12);
        assert!(z.coefficients()[1..].iter().all(|c| c.norm() < 1e-12));
    }

    /// Brute-force inner products against every character.
    fn naive_spectrum(f: &FiniteFunction) -> Vec<Complex64> {
        let field = f.field();
        let n = f.num_points().unwrap();
        (0..n)
            .map(|a| {
                let alpha = FieldVector::from_index(field, f.dim(), a);
                let s: Complex64 = (0..n)
                    .map(|i| {
                        let x = FieldVector::from_index(field, f.dim(), i);
                        let phase = field.sub(f.eval_index(i), alpha.dot(&x).unwrap());
                        field.character(phase)
                    })
                    .sum();
                s / n as f64
            })
            .collect()
    }

    #[test]
    fn parseval_and_naive_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..100 {
            let (field, dim) = if trial % 2 == 0 {
                (PrimeField::BINARY, 1 + trial % 8)
            } else {
                (f3(), 1 + trial % 5)
            };
            let f = random_dense(field, dim, &mut rng);
            let s = character_spectrum(&f).unwrap();
            assert!((s.energy() - 1.0).abs() < 1e-9);
            if field.is_binary() {
                let total: i64 = s.walsh().unwrap().iter().map(|w| w * w).sum();
                assert_eq!(total, 1i64 << (2 * dim));
            }
            if dim <= 4 {
                for (a, b) in s.coefficients().iter().zip(naive_spectrum(&f)) {
                    assert!((a - b).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn multilinear_coefficients_match_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in [2u32, 3, 5] {
            let field = PrimeField::new(p).unwrap();
            let poly = MultiIndexPolynomial::random(field, 3, 3, &mut rng);
            let f = materialize(
                &FunctionDescriptor::Polynomial(poly.clone()),
                field,
                3,
                MaterializeMode::Dense,
                DEFAULT_DENSE_CAP,
            )
            .unwrap();
            for vars in [vec![], vec![0], vec![1, 2], vec![0, 1, 2]] {
                let mut exps = vec![0u8; 3];
                vars.iter().for_each(|&v| exps[v] = 1);
                assert_eq!(
                    f.multilinear_coefficient(&vars).unwrap(),
                    poly.coefficient(&exps),
                    "p={p} {vars:?}"
                );
            }
        }
    }

    #[test]
    fn ufn1_round_trip_and_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_dense(f3(), 3, &mut rng);
        let mut buf = Vec::new();
        f.write_ufn1(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"UFN1");
        assert_eq!(buf[4], 3);
        assert_eq!(&buf[5..9], &3u32.to_le_bytes());
        assert_eq!(buf.len(), 9 + 27);
        let g = FiniteFunction::read_ufn1(buf.as_slice()).unwrap();
        assert_eq!(g.table(), f.table());

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(FiniteFunction::read_ufn1(bad.as_slice()).is_err());
        let mut out_of_range = buf.clone();
        out_of_range[9] = 7;
        assert!(FiniteFunction::read_ufn1(out_of_range.as_slice()).is_err());
        assert!(FiniteFunction::read_ufn1(&buf[..20]).is_err());
    }
}
