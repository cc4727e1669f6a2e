//! Gowers uniformity norms, exact and Monte Carlo, together with the
//! fixed-set lower bound, power-product statistics and the vanishing check
//! for second derivatives of `S_{2p}`.
//!
//! `||f||_{U^k}^{2^k} = E_{x, y_1 ... y_k} e(f_{y_1 ... y_k}(x))`. The exact
//! evaluator uses `||f||_{U^k}^{2^k} = E_{y_1 ... y_{k-2}} ||f_{y_1 ... y_{k-2}}||_{U^2}^4`
//! with `||g||_{U^2}^4 = sum_alpha |ghat(alpha)|^4`.

use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{power_vector, FieldElement, FieldVector, PrimeField};
use crate::functions::{character_spectrum, walsh_hadamard, FiniteFunction};
use crate::matrix_funcs::{eval_matrix_function, ColumnExclusion, MatrixFunction, RowMatrix};
use crate::mc;
use crate::symmetric::{eval_symmetric, SymmetricSpec};

/// Default limit on `p^{(k-2)N} * N * p^N` for exact evaluation.
pub const DEFAULT_EXACT_BUDGET: u128 = 1 << 35;

/// `numerator / 2^log2_denominator`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    pub numerator: u128,
    pub log2_denominator: u32,
}

impl DyadicRational {
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.log2_denominator as i32)
    }

    fn to_biguint_pair(self) -> (BigUint, u32) {
        (BigUint::from(self.numerator), self.log2_denominator)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.log2_denominator)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GowersEstimate {
    pub order: usize,
    /// Estimate of `||f||^{2^k}`.
    pub raw_power: f64,
    /// The exact raw power over F_2.
    pub exact_raw: Option<DyadicRational>,
    /// `max(raw_power, 0)^{1/2^k}`.
    pub value: f64,
    pub std_error: f64,
    /// Mean imaginary part of the sampled characters (zero when exact).
    pub imag_part: f64,
    /// Sample count; `None` for exact evaluation.
    pub samples: Option<u64>,
}

impl GowersEstimate {
    pub fn is_exact(&self) -> bool {
        self.samples.is_none()
    }

    fn exact(order: usize, raw_power: f64, exact_raw: Option<DyadicRational>) -> Self {
        GowersEstimate {
            order,
            raw_power,
            exact_raw,
            value: root(raw_power, order),
            std_error: 0.0,
            imag_part: 0.0,
            samples: None,
        }
    }
}

pub(crate) fn root(raw: f64, order: usize) -> f64 {
    raw.max(0.0).powf(1.0 / (1u64 << order) as f64).min(1.0)
}

/// `p^{(k-2)N} * N * p^N` for `k >= 2`, `p^N` otherwise; `None` on overflow.
pub fn exact_cost(field: PrimeField, dim: usize, order: usize) -> Option<u128> {
    let points = u128::from(field.p()).checked_pow(u32::try_from(dim).ok()?)?;
    if order < 2 {
        return Some(points);
    }
    points
        .checked_pow(u32::try_from(order - 2).ok()?)?
        .checked_mul(dim.max(1) as u128)?
        .checked_mul(points)
}

pub fn gowers_norm_exact(f: &FiniteFunction, order: usize) -> Result<GowersEstimate> {
    gowers_norm_exact_with_budget(f, order, DEFAULT_EXACT_BUDGET)
}

pub fn gowers_norm_exact_with_budget(f: &FiniteFunction, order: usize, budget: u128) -> Result<GowersEstimate> {
    if order < 1 {
        return Err(Error::Precondition("Gowers norm order must be at least 1".into()));
    }
    let table = f
        .table()
        .ok_or_else(|| Error::Unsupported("exact Gowers norms need a dense function".into()))?;
    match exact_cost(f.field(), f.dim(), order) {
        Some(c) if c <= budget => {}
        _ => {
            return Err(Error::too_large(
                format!("exact U^{order} norm over {}^{}", f.field().p(), f.dim()),
                format!("budget of {budget} operations"),
            ))
        }
    }
    if f.field().is_binary() {
        let exact = binary_exact(table, f.dim(), order)?;
        Ok(GowersEstimate::exact(order, exact.to_f64(), Some(exact)))
    } else {
        Ok(GowersEstimate::exact(order, exact_via_spectrum(f, order)?, None))
    }
}

/// `sum_alpha W(alpha)^4 / 2^N` for a table of signs `s`, where `W` is its
/// Walsh transform; `W` is clobbered into `scratch`.
fn fourth_moment(s: &[i32], scratch: &mut Vec<i32>, dim: usize) -> u128 {
    scratch.clear();
    scratch.extend_from_slice(s);
    walsh_hadamard(scratch);
    let total: u128 = scratch
        .iter()
        .map(|&w| {
            let sq = (i64::from(w) * i64::from(w)) as u128;
            sq * sq
        })
        .sum();
    debug_assert_eq!(total % (1u128 << dim), 0);
    total >> dim
}

/// Over F_2 the derivative along independent `y_1 ... y_m` is
/// `x -> sum_{v in span} f(x + v)`, so it depends only on the span, and it is
/// identically zero along dependent directions. Each `m`-dimensional
/// subspace is visited once through its greedy basis: `y_i` is the least
/// element of its coset of `span(y_1 ... y_{i-1})` and the `y_i` increase.
fn binary_exact(table: &[u8], dim: usize, order: usize) -> Result<DyadicRational> {
    let n = table.len();
    let signs: Vec<i32> = table.iter().map(|&v| 1 - 2 * i32::from(v)).collect();
    if order == 1 {
        let s: i64 = signs.iter().map(|&v| i64::from(v)).sum();
        return Ok(DyadicRational {
            numerator: (s * s) as u128,
            log2_denominator: 2 * dim as u32,
        });
    }
    let m = order - 2;
    let log2_den = (m + 3) * dim;
    if log2_den > 126 {
        return Err(Error::too_large(
            format!("exact U^{order} over 2^{dim} points"),
            "2^126 denominator",
        ));
    }
    let mut levels: Vec<Vec<i32>> = vec![signs];
    levels.resize(m + 1, vec![0; n]);
    let mut span = vec![0usize];
    let mut scratch = Vec::with_capacity(n);
    let mut acc = 0u128;
    visit_subspaces(0, m, 1, n, &mut span, &mut levels, &mut scratch, dim, &mut acc);

    let two_n = 1u128 << dim;
    let gl: u128 = (0..m).map(|i| (1u128 << m) - (1u128 << i)).product();
    let independent: u128 = (0..m).map(|i| two_n - (1u128 << i)).product();
    let all = 1u128 << (m * dim);
    let dependent = all - independent;
    Ok(DyadicRational {
        numerator: dependent * (1u128 << (3 * dim)) + gl * acc,
        log2_denominator: log2_den as u32,
    })
}

#[allow(clippy::too_many_arguments)]
fn visit_subspaces(
    depth: usize,
    m: usize,
    start: usize,
    n: usize,
    span: &mut Vec<usize>,
    levels: &mut [Vec<i32>],
    scratch: &mut Vec<i32>,
    dim: usize,
    acc: &mut u128,
) {
    if depth == m {
        *acc += fourth_moment(&levels[depth], scratch, dim);
        return;
    }
    for y in start..n {
        if !span[1..].iter().all(|&w| y < y ^ w) {
            continue;
        }
        {
            let (lo, hi) = levels.split_at_mut(depth + 1);
            let (cur, next) = (&lo[depth], &mut hi[0]);
            for (x, out) in next.iter_mut().enumerate() {
                *out = cur[x] * cur[x ^ y];
            }
        }
        let len = span.len();
        for i in 0..len {
            span.push(span[i] ^ y);
        }
        visit_subspaces(depth + 1, m, y + 1, n, span, levels, scratch, dim, acc);
        span.truncate(len);
    }
}

/// Exact evaluation over any prime through the character transform of every
/// iterated derivative.
fn exact_via_spectrum(f: &FiniteFunction, order: usize) -> Result<f64> {
    let field = f.field();
    if order == 1 {
        let chars = field.character_table();
        let t = f.table().expect("dense");
        let s: num_complex::Complex64 = t.iter().map(|&v| chars[v as usize]).sum();
        let mean = s / t.len() as f64;
        return Ok(mean.norm_sqr());
    }
    let n = f.num_points().expect("dense");
    let m = order - 2;
    fn rec(g: &FiniteFunction, left: usize, n: usize) -> Result<f64> {
        if left == 0 {
            let s = character_spectrum(g)?;
            return Ok(s.coefficients().iter().map(|c| c.norm_sqr() * c.norm_sqr()).sum());
        }
        let mut total = 0.0;
        for i in 0..n {
            let y = FieldVector::from_index(g.field(), g.dim(), i);
            total += rec(&g.derivative(&y)?, left - 1, n)?;
        }
        Ok(total)
    }
    Ok(rec(f, m, n)? / (n as f64).powi(m as i32))
}

/// Sampled estimate of `||f||_{U^k}^{2^k}` from `samples` independent uniform
/// `(x, y_1 ... y_k)`.
pub fn gowers_norm_mc(f: &FiniteFunction, order: usize, samples: u64, seed: u64) -> Result<GowersEstimate> {
    if order < 1 {
        return Err(Error::Precondition("Gowers norm order must be at least 1".into()));
    }
    if order > 20 {
        return Err(Error::too_large(format!("U^{order} sampling"), "order 20"));
    }
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    let field = f.field();
    let p = field.p() as usize;
    let corners = 1usize << order;
    let counts: Vec<Vec<u64>> = if field.is_binary() && f.dim() <= 64 {
        let full = if f.dim() == 64 { u64::MAX } else { (1u64 << f.dim()) - 1 };
        mc::run_sharded(samples, seed, |rng, count| {
            let mut pts = vec![0u64; corners];
            let mut ys = vec![0u64; order];
            let mut ones = 0u64;
            for _ in 0..count {
                pts[0] = rng.random::<u64>() & full;
                ys.iter_mut().for_each(|y| *y = rng.random::<u64>() & full);
                let mut parity = f.eval_mask(pts[0]);
                for s in 1..corners {
                    pts[s] = pts[s & (s - 1)] ^ ys[s.trailing_zeros() as usize];
                    parity ^= f.eval_mask(pts[s]);
                }
                ones += u64::from(parity);
            }
            vec![count - ones, ones]
        })
    } else {
        mc::run_sharded(samples, seed, |rng, count| {
            let mut hist = vec![0u64; p];
            for _ in 0..count {
                let x = FieldVector::random(field, f.dim(), rng);
                let ys: Vec<FieldVector> = (0..order).map(|_| FieldVector::random(field, f.dim(), rng)).collect();
                let mut pts = Vec::with_capacity(corners);
                pts.push(x);
                let mut d = f.eval(&pts[0]);
                if order % 2 == 1 {
                    d = field.neg(d);
                }
                for s in 1..corners {
                    let pt = pts[s & (s - 1)]
                        .add(&ys[s.trailing_zeros() as usize])
                        .expect("same shape");
                    let v = f.eval(&pt);
                    d = if (order - s.count_ones() as usize).is_multiple_of(2) {
                        field.add(d, v)
                    } else {
                        field.sub(d, v)
                    };
                    pts.push(pt);
                }
                hist[d as usize] += 1;
            }
            hist
        })
    };
    let mut hist = vec![0u64; p];
    for shard in &counts {
        hist.iter_mut().zip(shard).for_each(|(h, c)| *h += c);
    }
    let n = samples as f64;
    let (mut re, mut im, mut sq) = (0.0, 0.0, 0.0);
    for (r, &c) in hist.iter().enumerate() {
        let (s, co) = (TAU * r as f64 / p as f64).sin_cos();
        re += c as f64 * co;
        im += c as f64 * s;
        sq += c as f64 * co * co;
    }
    let mean = re / n;
    let var = if samples > 1 {
        ((sq / n - mean * mean) * n / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(GowersEstimate {
        order,
        raw_power: mean,
        exact_raw: None,
        value: root(mean, order),
        std_error: (var / n).sqrt(),
        imag_part: im / n,
        samples: Some(samples),
    })
}

/// One constraint `<x^exponent, vector> = value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub exponent: u32,
    pub vector: FieldVector,
    pub value: FieldElement,
}

/// The set `{x : <x^i, y> = b}` cut out by a list of power constraints.
/// Constraints with exponent 0 do not involve `x`; they are folded into a
/// single flag that empties the set when any of them fails.
#[derive(Clone, Debug)]
pub struct ConstraintSet {
    field: PrimeField,
    dim: usize,
    constraints: Vec<Constraint>,
    constant_part_holds: bool,
}

impl ConstraintSet {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        ConstraintSet {
            field,
            dim,
            constraints: Vec::new(),
            constant_part_holds: true,
        }
    }

    pub fn push(&mut self, exponent: u32, vector: FieldVector, value: FieldElement) -> Result<()> {
        if exponent >= self.field.p() {
            return Err(Error::ExponentOutOfRange {
                exponent,
                p: self.field.p(),
            });
        }
        if value >= self.field.p() {
            return Err(Error::ValueOutOfRange {
                value,
                p: self.field.p(),
            });
        }
        if vector.field() != self.field || vector.len() != self.dim {
            return Err(Error::DimensionMismatch("constraint vector shape".into()));
        }
        if exponent == 0 {
            self.constant_part_holds &= vector.sum() == value;
        } else {
            self.constraints.push(Constraint {
                exponent,
                vector,
                value,
            });
        }
        Ok(())
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constant_part_holds(&self) -> bool {
        self.constant_part_holds
    }

    pub fn contains(&self, x: &FieldVector) -> bool {
        self.constant_part_holds
            && self.constraints.iter().all(|c| {
                let xi = power_vector(x, c.exponent).expect("exponent checked");
                xi.dot(&c.vector).expect("shape checked") == c.value
            })
    }
}

/// Whether `<y^a, z^b> = 0` for all `0 <= a, b < p`.
pub fn event_a_holds(y: &FieldVector, z: &FieldVector) -> bool {
    let p = y.field().p();
    (0..p).all(|a| {
        let ya = power_vector(y, a).expect("a < p");
        (0..p).all(|b| ya.dot(&power_vector(z, b).expect("b < p")).expect("same shape") == 0)
    })
}

/// `M(y, z) = {x : <x^i, y^a z^b> = 0 for 1 <= i < p, 0 <= a, b < p}`.
pub fn fixed_set_constraints(y: &FieldVector, z: &FieldVector) -> Result<ConstraintSet> {
    let field = y.field();
    let mut set = ConstraintSet::new(field, y.len());
    for a in 0..field.p() {
        let ya = power_vector(y, a)?;
        for b in 0..field.p() {
            let yz = ya.pointwise_mul(&power_vector(z, b)?)?;
            for i in 1..field.p() {
                set.push(i, yz.clone(), 0)?;
            }
        }
    }
    Ok(set)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedSetBound {
    pub members: u64,
    /// `|M| / p^N`.
    pub prob: f64,
    /// `||f||_{U^p}`.
    pub norm: f64,
    /// The value `f` takes on `M`.
    pub constant: FieldElement,
    /// `norm > prob^2`; decided exactly over F_2.
    pub holds: bool,
}

/// Checks `||f||_{U^p} > (|M| / p^N)^2` for a dense `f` constant on `M`.
pub fn fixed_set_bound_check(f: &FiniteFunction, constraints: &ConstraintSet) -> Result<FixedSetBound> {
    let field = f.field();
    if constraints.field != field || constraints.dim != f.dim() {
        return Err(Error::DimensionMismatch(
            "constraint set and function differ in shape".into(),
        ));
    }
    let n = f
        .table()
        .ok_or_else(|| Error::Unsupported("fixed-set check needs a dense function".into()))?
        .len();
    let mut members = 0u64;
    let mut constant = None;
    for i in 0..n {
        let x = FieldVector::from_index(field, f.dim(), i);
        if !constraints.contains(&x) {
            continue;
        }
        members += 1;
        let v = f.eval_index(i);
        if *constant.get_or_insert(v) != v {
            return Err(Error::Precondition(
                "function is not constant on the constraint set".into(),
            ));
        }
    }
    let Some(constant) = constant else {
        return Err(Error::Precondition("constraint set is empty".into()));
    };
    let order = field.p() as usize;
    let est = gowers_norm_exact(f, order)?;
    let prob = members as f64 / n as f64;
    let holds = match est.exact_raw {
        Some(raw) => {
            // raw / 2^d > (members / 2^N)^8  <=>  raw * 2^{8N} > members^8 * 2^d
            let (num, d) = raw.to_biguint_pair();
            let lhs = num << (8 * f.dim());
            let rhs = BigUint::from(members).pow(8) << d;
            lhs > rhs
        }
        None => est.value > prob * prob,
    };
    Ok(FixedSetBound {
        members,
        prob,
        norm: est.value,
        constant,
        holds,
    })
}

/// Largest table of joint outcomes accepted by [`power_product_distribution`].
pub const MAX_POWER_PRODUCT_CELLS: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct PowerProductStat {
    pub rows: usize,
    pub p: u32,
    pub dim: usize,
    /// Nonzero exponent sequences `kappa`, in order of the base-p number
    /// `sum_i k_i p^i`.
    pub kappas: Vec<Vec<u32>>,
    /// Outcome counts indexed by `sum_t X_{kappa_t} p^t`.
    pub counts: Vec<u64>,
    pub samples: u64,
    /// `sum_v |P(v) - p^{-K}|`.
    pub l1_distance: f64,
}

/// Empirical joint law of `X_kappa(r) = sum_j prod_i r_i(j)^{k_i}` over all
/// nonzero `kappa`, for independent uniform `r_1 ... r_n`.
pub fn power_product_distribution(
    rows: usize,
    field: PrimeField,
    dim: usize,
    samples: u64,
    seed: u64,
) -> Result<PowerProductStat> {
    let p = field.p() as usize;
    let too_large = || {
        Error::too_large(
            format!("joint law of power products for n = {rows}, p = {p}"),
            MAX_POWER_PRODUCT_CELLS,
        )
    };
    if rows as f64 * (p as f64).log2() > 12.0 {
        return Err(too_large());
    }
    let k = p.pow(rows as u32) - 1;
    let cells = p
        .checked_pow(k as u32)
        .filter(|&c| c <= MAX_POWER_PRODUCT_CELLS)
        .ok_or_else(too_large)?;
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    let kappas: Vec<Vec<u32>> = (1..=k)
        .map(|c| crate::field::base_p_digits(c as u64, p as u32, rows))
        .collect();
    let shards: Vec<Vec<u64>> = if field.is_binary() && dim <= 64 {
        let full = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
        mc::run_sharded(samples, seed, |rng, count| {
            let mut hist = vec![0u64; cells];
            let mut r = vec![0u64; rows];
            for _ in 0..count {
                r.iter_mut().for_each(|v| *v = rng.random::<u64>() & full);
                let mut idx = 0usize;
                for (t, kappa) in kappas.iter().enumerate() {
                    let prod = kappa
                        .iter()
                        .zip(&r)
                        .filter(|(&e, _)| e == 1)
                        .fold(full, |acc, (_, &v)| acc & v);
                    idx |= (prod.count_ones() as usize & 1) << t;
                }
                hist[idx] += 1;
            }
            hist
        })
    } else {
        mc::run_sharded(samples, seed, |rng, count| {
            let mut hist = vec![0u64; cells];
            for _ in 0..count {
                let r: Vec<FieldVector> = (0..rows).map(|_| FieldVector::random(field, dim, rng)).collect();
                let mut idx = 0usize;
                let mut place = 1usize;
                for kappa in &kappas {
                    let x = (0..dim).fold(0, |acc, j| {
                        let prod = kappa
                            .iter()
                            .zip(&r)
                            .fold(1, |pr, (&e, v)| field.mul(pr, field.pow(v.get(j), u64::from(e))));
                        field.add(acc, prod)
                    });
                    idx += x as usize * place;
                    place *= p;
                }
                hist[idx] += 1;
            }
            hist
        })
    };
    let mut counts = vec![0u64; cells];
    for shard in &shards {
        counts.iter_mut().zip(shard).for_each(|(c, s)| *c += s);
    }
    let uniform = 1.0 / cells as f64;
    let l1_distance = counts
        .iter()
        .map(|&c| (c as f64 / samples as f64 - uniform).abs())
        .sum();
    Ok(PowerProductStat {
        rows,
        p: field.p(),
        dim,
        kappas,
        counts,
        samples,
        l1_distance,
    })
}

/// Attempt cap for rejection sampling of constrained triples.
pub const REJECTION_CAP: u64 = 10_000_000;

/// How constrained triples `(x, y, z)` are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleSampler {
    /// Uniform triples, kept when every constraint holds.
    Rejection,
    /// A uniform triple on `N / p` coordinates repeated `p` times; every
    /// `<x^i y^a z^b>` is then a multiple of `p`.
    Replicated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingReport {
    pub p: u32,
    pub dim: usize,
    pub sampler: TripleSampler,
    pub requested: u64,
    pub achieved: u64,
    pub attempts: u64,
    pub failures: u64,
    pub cap_exhausted: bool,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.achieved == self.requested
    }
}

/// Whether `<x^i y^a z^b, 1> = 0` for all `0 <= i, a, b < p`.
pub fn triple_constraints_hold(x: &FieldVector, y: &FieldVector, z: &FieldVector) -> bool {
    let field = x.field();
    let p = field.p();
    let powers = |v: &FieldVector| -> Vec<FieldVector> { (0..p).map(|e| power_vector(v, e).expect("e < p")).collect() };
    let (xs, ys, zs) = (powers(x), powers(y), powers(z));
    xs.iter().all(|xi| {
        ys.iter().all(|ya| {
            let xy = xi.pointwise_mul(ya).expect("same shape");
            zs.iter().all(|zb| xy.dot(zb).expect("same shape") == 0)
        })
    })
}

/// Both sides of `(S_{2p})_{y,z}(x) = H(y^(p), z^(p))`, the left from four
/// evaluations of `S_{2p}`, the right from the hybrid functional.
pub fn vanishing_sides(x: &FieldVector, y: &FieldVector, z: &FieldVector) -> Result<(FieldElement, FieldElement)> {
    let field = x.field();
    let p = field.p() as usize;
    let spec = SymmetricSpec::new(2 * p, field, x.len());
    let s = |v: &FieldVector| eval_symmetric(&spec, v);
    let xy = x.add(y)?;
    let xz = x.add(z)?;
    let xyz = xy.add(z)?;
    let lhs = field.add(field.sub(s(&xyz), field.add(s(&xy), s(&xz))), s(x));
    let m = RowMatrix::new(field, x.len(), vec![(y.clone(), p), (z.clone(), p)])?;
    let rhs = eval_matrix_function(MatrixFunction::H, &m, &ColumnExclusion::none())?;
    Ok((lhs, rhs))
}

pub fn vanishing_lemma_check(
    field: PrimeField,
    dim: usize,
    trials: u64,
    seed: u64,
    sampler: TripleSampler,
) -> Result<VanishingReport> {
    let p = field.p();
    if p > 3 {
        return Err(Error::Unsupported(format!(
            "vanishing check for p = {p}; only p = 2, 3"
        )));
    }
    if !dim.is_multiple_of(p as usize) {
        return Err(Error::Precondition(format!("N = {dim} must be divisible by p = {p}")));
    }
    let mut rng = mc::stream_rng(seed, 0);
    let mut report = VanishingReport {
        p,
        dim,
        sampler,
        requested: trials,
        achieved: 0,
        attempts: 0,
        failures: 0,
        cap_exhausted: false,
    };
    while report.achieved < trials {
        if report.attempts >= REJECTION_CAP {
            report.cap_exhausted = true;
            break;
        }
        report.attempts += 1;
        let (x, y, z) = match sampler {
            TripleSampler::Rejection => {
                let t = (
                    FieldVector::random(field, dim, &mut rng),
                    FieldVector::random(field, dim, &mut rng),
                    FieldVector::random(field, dim, &mut rng),
                );
                if !triple_constraints_hold(&t.0, &t.1, &t.2) {
                    continue;
                }
                t
            }
            TripleSampler::Replicated => {
                let block = dim / p as usize;
                let mut rep = || {
                    let v = FieldVector::random(field, block, &mut rng).to_values();
                    let full: Vec<u32> = (0..p).flat_map(|_| v.iter().copied()).collect();
                    FieldVector::from_values(field, &full)
                };
                (rep()?, rep()?, rep()?)
            }
        };
        debug_assert!(triple_constraints_hold(&x, &y, &z));
        let (lhs, rhs) = vanishing_sides(&x, &y, &z)?;
        report.achieved += 1;
        if lhs != rhs {
            report.failures += 1;
        }
    }
    Ok(report)
}
