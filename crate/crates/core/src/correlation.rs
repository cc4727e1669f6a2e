//! Largest correlation `|<f, g>|` of a function with polynomials of degree at
//! most `d`.

use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;

use crate::bits::BitTable;
use crate::error::{Error, Result};
use crate::field::{FieldVector, PrimeField};
use crate::functions::{
    character_spectrum, correlation, materialize, FiniteFunction, FunctionDescriptor, MaterializeMode,
    DEFAULT_DENSE_CAP,
};
use crate::mc;
use crate::polynomial::MultiIndexPolynomial;

/// Largest number of Reed–Muller coefficients searched exhaustively.
pub const MAX_EXHAUSTIVE_COEFFICIENTS: usize = 28;
/// Limit on Gray steps times table words for the exhaustive search.
pub const MAX_EXHAUSTIVE_WORK: u128 = 1 << 34;
/// Points sampled per trial when the function is lazy.
pub const DEFAULT_POINT_SAMPLES: u64 = 1 << 16;
/// Limit on `p^{(order + 1) N}` for the mixed-derivative check.
pub const MAX_DERIVATIVE_WORK: u128 = 1 << 24;

const SEARCH_SHARD_BITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    Spectral,
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationResult {
    pub max_abs: f64,
    /// `(signed_sum, log2_denominator)` with `max_abs = |signed_sum| / 2^log2_denominator`.
    pub exact: Option<(i64, u32)>,
    pub witness: Option<MultiIndexPolynomial>,
    pub method: Method,
    /// Number of polynomials searched.
    pub space_size: u128,
}

fn require_binary_table(f: &FiniteFunction, what: &str) -> Result<BitTable> {
    if !f.field().is_binary() {
        return Err(Error::Unsupported(format!("{what} is implemented only for p = 2")));
    }
    f.bit_table()
}

fn monomial_table(dim: usize, vars: u64) -> BitTable {
    BitTable::from_fn(dim, |x| x as u64 & vars == vars)
}

fn var_mask(exponents: &[u8]) -> u64 {
    exponents
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .fold(0, |m, (j, _)| m | 1 << j)
}

fn polynomial_from_bits(dim: usize, monomials: &[Vec<u8>], coeffs: u64) -> MultiIndexPolynomial {
    let mut g = MultiIndexPolynomial::zero(PrimeField::BINARY, dim);
    for (i, m) in monomials.iter().enumerate() {
        if coeffs >> i & 1 == 1 {
            g.add_term(m.clone(), 1).expect("valid monomial");
        }
    }
    g
}

/// Exact maximum of `|<f, g>|` over every `g` of degree at most `d`, found
/// by a Gray-code walk over the coefficient vectors. The coefficient space
/// is split into 64 shards by its top bits; the witness is the first
/// maximizer of the lowest shard attaining the maximum.
pub fn max_correlation_exhaustive(f: &FiniteFunction, d: usize) -> Result<CorrelationResult> {
    let ft = require_binary_table(f, "exhaustive correlation search")?;
    let dim = f.dim();
    let monomials = MultiIndexPolynomial::monomials_up_to(PrimeField::BINARY, dim, d);
    let count = monomials.len();
    if count > MAX_EXHAUSTIVE_COEFFICIENTS {
        return Err(Error::too_large(
            format!("Reed-Muller space RM({d}, {dim}) with 2^{count} words"),
            format!("2^{MAX_EXHAUSTIVE_COEFFICIENTS}"),
        ));
    }
    let words = ft.words().len() as u128;
    if (1u128 << count) * words > MAX_EXHAUSTIVE_WORK {
        return Err(Error::too_large(
            format!("exhaustive search over RM({d}, {dim})"),
            MAX_EXHAUSTIVE_WORK,
        ));
    }
    let tables: Vec<BitTable> = monomials.iter().map(|m| monomial_table(dim, var_mask(m))).collect();
    let shard_bits = SEARCH_SHARD_BITS.min(count);
    let low = count - shard_bits;
    let total_points = 1i64 << dim;

    let shard_best: Vec<(i64, u64)> = (0..1u64 << shard_bits)
        .into_par_iter()
        .map(|shard| {
            let mut cur = ft.clone();
            for (i, t) in tables[low..].iter().enumerate() {
                if shard >> i & 1 == 1 {
                    cur.xor_assign(t);
                }
            }
            let score = |c: &BitTable| total_points - 2 * c.count_ones() as i64;
            let mut best = (score(&cur), 0u64);
            for step in 1..1u64 << low {
                let bit = step.trailing_zeros() as usize;
                cur.xor_assign(&tables[bit]);
                let s = score(&cur);
                if s.abs() > best.0.abs() {
                    best = (s, step ^ (step >> 1));
                }
            }
            (best.0, best.1 | shard << low)
        })
        .collect();
    let (signed, coeffs) = shard_best
        .iter()
        .copied()
        .reduce(|a, b| if b.0.abs() > a.0.abs() { b } else { a })
        .expect("at least one shard");
    Ok(CorrelationResult {
        max_abs: signed.unsigned_abs() as f64 / total_points as f64,
        exact: Some((signed, dim as u32)),
        witness: Some(polynomial_from_bits(dim, &monomials, coeffs)),
        method: Method::Exhaustive,
        space_size: 1u128 << count,
    })
}

/// Best affine correlation, read off the Walsh spectrum.
pub fn max_correlation_spectral(f: &FiniteFunction) -> Result<CorrelationResult> {
    if !f.field().is_binary() {
        return Err(Error::Unsupported(
            "spectral correlation is implemented only for p = 2".into(),
        ));
    }
    let spectrum = character_spectrum(f)?;
    let walsh = spectrum.walsh().expect("binary spectrum");
    let (alpha, &w) = walsh
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
        .expect("nonempty spectrum");
    let dim = f.dim();
    let mut g = MultiIndexPolynomial::zero(PrimeField::BINARY, dim);
    for j in 0..dim {
        if alpha >> j & 1 == 1 {
            g = g.add(&MultiIndexPolynomial::monomial(PrimeField::BINARY, dim, &[j])?)?;
        }
    }
    Ok(CorrelationResult {
        max_abs: w.unsigned_abs() as f64 / (1u64 << dim) as f64,
        exact: Some((w, dim as u32)),
        witness: Some(g),
        method: Method::Spectral,
        space_size: 1u128 << (dim + 1),
    })
}

/// Quantiles of `|<f, g>|` over random `g` of degree at most `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationProfile {
    pub degree: usize,
    pub dim: usize,
    pub trials: u64,
    /// Whether each correlation was computed exactly or from sampled points.
    pub exact_per_trial: bool,
    /// All trial values, ascending.
    pub values: Vec<f64>,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    pub max: f64,
    /// Order-statistic standard error of `q99`.
    pub q99_std_error: f64,
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// Trial `t` draws its polynomial (and, for lazy `f`, its points) from
/// stream `t` of `seed`.
pub fn sampled_correlation_profile(
    f: &FiniteFunction,
    d: usize,
    trials: u64,
    seed: u64,
    point_samples: u64,
) -> Result<CorrelationProfile> {
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let field = f.field();
    let dim = f.dim();
    let exact = f.is_dense();
    let values: Vec<f64> = if field.is_binary() && exact {
        let ft = f.bit_table()?;
        let monomials: Vec<u64> = MultiIndexPolynomial::monomials_up_to(field, dim, d)
            .iter()
            .map(|m| var_mask(m))
            .collect();
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = mc::stream_rng(seed, t);
                let mut g = BitTable::zeros(dim);
                for &m in &monomials {
                    if rng.random::<bool>() {
                        g.set(m as usize, true);
                    }
                }
                g.moebius();
                let diff = ft.distance(&g) as i64;
                ((1i64 << dim) - 2 * diff).unsigned_abs() as f64 / (1u64 << dim) as f64
            })
            .collect()
    } else {
        (0..trials)
            .into_par_iter()
            .map(|t| -> Result<f64> {
                let mut rng = mc::stream_rng(seed, t);
                let g = MultiIndexPolynomial::random(field, dim, d, &mut rng);
                if exact {
                    let gt = materialize(
                        &FunctionDescriptor::Polynomial(g),
                        field,
                        dim,
                        MaterializeMode::Dense,
                        DEFAULT_DENSE_CAP,
                    )?;
                    return Ok(correlation(f, &gt)?.abs());
                }
                let chars = field.character_table();
                let mut sum = num_complex::Complex64::new(0.0, 0.0);
                for _ in 0..point_samples {
                    let x = FieldVector::random(field, dim, &mut rng);
                    sum += chars[field.sub(f.eval(&x), g.eval(&x)?) as usize];
                }
                Ok(sum.norm() / point_samples as f64)
            })
            .collect::<Result<_>>()?
    };
    let mut values = values;
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let spread = (n * 0.99 * 0.01).sqrt();
    let lo = nearest_rank(&values, ((n * 0.99 - spread) / n).max(0.0));
    let hi = nearest_rank(&values, ((n * 0.99 + spread) / n).min(1.0));
    Ok(CorrelationProfile {
        degree: d,
        dim,
        trials,
        exact_per_trial: exact,
        q50: nearest_rank(&values, 0.5),
        q90: nearest_rank(&values, 0.9),
        q99: nearest_rank(&values, 0.99),
        max: *values.last().expect("trials > 0"),
        q99_std_error: (hi - lo) / 2.0,
        values,
    })
}

/// Both sides of `|<f,g>|^{2^{k+1}} <= E_{y_1 ... y_k} |<f_{y..}, g_{y..}>|^2`
/// for `k = order` (1 or 2).
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeInequality {
    pub order: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Decided in exact integer arithmetic over F_2.
    pub holds: bool,
}

pub fn derivative_inequality_check(
    f: &FiniteFunction,
    g: &FiniteFunction,
    order: usize,
) -> Result<DerivativeInequality> {
    if !(1..=2).contains(&order) {
        return Err(Error::Unsupported(format!(
            "mixed-derivative inequality of order {order}"
        )));
    }
    if f.field() != g.field() || f.dim() != g.dim() {
        return Err(Error::DimensionMismatch("functions on different spaces".into()));
    }
    let field = f.field();
    let dim = f.dim();
    let work = u128::from(field.p()).checked_pow(((order + 1) * dim) as u32);
    if work.is_none_or(|w| w > MAX_DERIVATIVE_WORK) {
        return Err(Error::too_large(
            format!("order-{order} derivative inequality on {}^{dim}", field.p()),
            MAX_DERIVATIVE_WORK,
        ));
    }
    let (ft, gt) = match (f.table(), g.table()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Unsupported("derivative inequality needs dense functions".into())),
    };
    let h: Vec<u32> = ft
        .iter()
        .zip(gt)
        .map(|(&a, &b)| field.sub(u32::from(a), u32::from(b)))
        .collect();
    let n = h.len();
    if field.is_binary() {
        let s: Vec<i64> = h.iter().map(|&v| 1 - 2 * i64::from(v)).collect();
        let base: i64 = s.iter().sum();
        let dirs: Vec<Vec<usize>> = if order == 1 {
            (0..n).map(|y| vec![y]).collect()
        } else {
            (0..n).flat_map(|y| (0..n).map(move |z| vec![y, z])).collect()
        };
        let mut sum_sq = BigUint::from(0u32);
        for dir in &dirs {
            let mut inner = 0i64;
            for x in 0..n {
                let mut v = 1i64;
                for sub in 0..1usize << dir.len() {
                    let shift = dir
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| sub >> i & 1 == 1)
                        .fold(0, |a, (_, &y)| a ^ y);
                    v *= s[x ^ shift];
                }
                inner += v;
            }
            sum_sq += BigUint::from(inner.unsigned_abs()).pow(2);
        }
        // lhs = base^{2^{k+1}} / 2^{2^{k+1} N}, rhs = sum_sq / 2^{(k+2) N}
        let e = 1u32 << (order + 1);
        let lhs_num = BigUint::from(base.unsigned_abs()).pow(e);
        let holds = lhs_num.clone() << ((order + 2) * dim) <= sum_sq.clone() << (e as usize * dim);
        let to_f64 = |v: &BigUint, shift: usize| -> f64 {
            let bits = v.bits() as i64;
            let keep = bits.min(60);
            let top = (v >> (bits - keep) as usize).iter_u64_digits().next().unwrap_or(0);
            top as f64 * 2f64.powi((bits - keep) as i32 - shift as i32)
        };
        return Ok(DerivativeInequality {
            order,
            lhs: to_f64(&lhs_num, e as usize * dim),
            rhs: to_f64(&sum_sq, (order + 2) * dim),
            holds,
        });
    }
    let chars = field.character_table();
    let hf = FiniteFunction::dense(field, dim, h.iter().map(|&v| v as u8).collect())?;
    let zero = FiniteFunction::zero(field, dim)?;
    let base = correlation(&hf, &zero)?.abs();
    let mut total = 0.0;
    let mut count = 0u64;
    let mut rec = |hd: &FiniteFunction| -> Result<()> {
        let t = hd.table().expect("dense");
        let s: num_complex::Complex64 = t.iter().map(|&v| chars[v as usize]).sum();
        total += (s / n as f64).norm_sqr();
        count += 1;
        Ok(())
    };
    for y in 0..n {
        let hy = hf.derivative(&FieldVector::from_index(field, dim, y))?;
        if order == 1 {
            rec(&hy)?;
        } else {
            for z in 0..n {
                rec(&hy.derivative(&FieldVector::from_index(field, dim, z))?)?;
            }
        }
    }
    let lhs = base.powi(1 << (order + 1));
    let rhs = total / count as f64;
    Ok(DerivativeInequality {
        order,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gowers::gowers_norm_exact;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym(n: usize, dim: usize) -> FiniteFunction {
        materialize(
            &FunctionDescriptor::Symmetric(n),
            PrimeField::BINARY,
            dim,
            MaterializeMode::Dense,
            DEFAULT_DENSE_CAP,
        )
        .unwrap()
    }

    fn poly_fn(g: &MultiIndexPolynomial) -> FiniteFunction {
        materialize(
            &FunctionDescriptor::Polynomial(g.clone()),
            g.field(),
            g.nvars(),
            MaterializeMode::Dense,
            DEFAULT_DENSE_CAP,
        )
        .unwrap()
    }

    fn random_binary(dim: usize, rng: &mut ChaCha8Rng) -> FiniteFunction {
        FiniteFunction::dense(
            PrimeField::BINARY,
            dim,
            (0..1usize << dim).map(|_| rng.random_range(0..2u8)).collect(),
        )
        .unwrap()
    }

    /// Re-evaluates every candidate from scratch.
    fn naive_max(f: &FiniteFunction, d: usize) -> f64 {
        let monomials = MultiIndexPolynomial::monomials_up_to(PrimeField::BINARY, f.dim(), d);
        (0..1u64 << monomials.len())
            .map(|c| {
                correlation(f, &poly_fn(&polynomial_from_bits(f.dim(), &monomials, c)))
                    .unwrap()
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn exhaustive_examples() {
        let r = max_correlation_exhaustive(&sym(4, 4), 3).unwrap();
        assert_eq!(r.max_abs, 0.875);
        assert_eq!(r.space_size, 1 << 15);
        let w = r.witness.unwrap();
        assert!(w.degree().unwrap_or(0) <= 3);
        assert_eq!(correlation(&sym(4, 4), &poly_fn(&w)).unwrap().abs(), 0.875);

        let x1x2 = FiniteFunction::dense(PrimeField::BINARY, 2, vec![0, 0, 0, 1]).unwrap();
        assert_eq!(max_correlation_exhaustive(&x1x2, 1).unwrap().max_abs, 0.5);
        assert_eq!(max_correlation_spectral(&x1x2).unwrap().max_abs, 0.5);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 0..=3 {
            let g = MultiIndexPolynomial::random(PrimeField::BINARY, 5, d, &mut rng);
            let r = max_correlation_exhaustive(&poly_fn(&g), d).unwrap();
            assert_eq!(r.max_abs, 1.0);
            let w = r.witness.unwrap();
            let one = MultiIndexPolynomial::constant(PrimeField::BINARY, 5, 1);
            assert!(w == g || w == g.add(&one).unwrap());
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(
            max_correlation_exhaustive(&sym(4, 6), 3),
            Err(Error::TooLarge { .. })
        ));
        assert!(max_correlation_exhaustive(&sym(4, 6), 2).is_ok());
        let f3 = PrimeField::new(3).unwrap();
        let t = materialize(
            &FunctionDescriptor::Symmetric(4),
            f3,
            4,
            MaterializeMode::Dense,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        assert!(matches!(max_correlation_exhaustive(&t, 3), Err(Error::Unsupported(_))));
        assert!(matches!(max_correlation_spectral(&t), Err(Error::Unsupported(_))));
    }

    #[test]
    fn spectral_matches_exhaustive_degree_one() {
        for dim in 1..=3usize {
            for code in 0..1u64 << (1 << dim) {
                let f = FiniteFunction::dense(
                    PrimeField::BINARY,
                    dim,
                    (0..1 << dim).map(|x| (code >> x & 1) as u8).collect(),
                )
                .unwrap();
                assert_eq!(
                    max_correlation_exhaustive(&f, 1).unwrap().max_abs,
                    max_correlation_spectral(&f).unwrap().max_abs
                );
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let f = random_binary(4, &mut rng);
            let s = max_correlation_spectral(&f).unwrap();
            assert_eq!(max_correlation_exhaustive(&f, 1).unwrap().max_abs, s.max_abs);
            assert_eq!(
                correlation(&f, &poly_fn(s.witness.as_ref().unwrap())).unwrap().abs(),
                s.max_abs
            );
        }
        let lin = poly_fn(&MultiIndexPolynomial::random(PrimeField::BINARY, 6, 1, &mut rng));
        assert_eq!(max_correlation_spectral(&lin).unwrap().max_abs, 1.0);
    }

    #[test]
    fn gray_walk_matches_naive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (dim, d) in [(2, 1), (3, 2), (4, 1), (4, 2), (3, 3)] {
            for _ in 0..3 {
                let f = random_binary(dim, &mut rng);
                assert_eq!(max_correlation_exhaustive(&f, d).unwrap().max_abs, naive_max(&f, d));
            }
        }
    }

    #[test]
    fn bounded_by_gowers_and_monotone_in_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let dim = rng.random_range(1..=4);
            let f = random_binary(dim, &mut rng);
            let mut prev = 0.0;
            for d in 0..=2 {
                let c = max_correlation_exhaustive(&f, d).unwrap().max_abs;
                assert!(c >= prev);
                assert!(c <= gowers_norm_exact(&f, d + 1).unwrap().value + 1e-9);
                prev = c;
            }
        }
    }

    #[test]
    fn profile_examples() {
        let zero = FiniteFunction::zero(PrimeField::BINARY, 1).unwrap();
        let p = sampled_correlation_profile(&zero, 0, 50, 1, DEFAULT_POINT_SAMPLES).unwrap();
        assert_eq!(p.q50, 1.0);
        assert!(p.values.iter().all(|&v| v == 1.0));

        let f = sym(4, 10);
        let a = sampled_correlation_profile(&f, 3, 200, 9, DEFAULT_POINT_SAMPLES).unwrap();
        assert_eq!(
            a,
            sampled_correlation_profile(&f, 3, 200, 9, DEFAULT_POINT_SAMPLES).unwrap()
        );
        assert!(a.q50 <= a.q90 && a.q90 <= a.q99 && a.q99 <= a.max);
        assert!(a.exact_per_trial);
    }

    #[test]
    fn profile_packed_agrees_with_generic_draw() {
        // The packed path draws one bit per monomial in enumeration order,
        // which is the law of MultiIndexPolynomial::random over F_2.
        let f = sym(4, 6);
        let packed = sampled_correlation_profile(&f, 2, 20, 5, DEFAULT_POINT_SAMPLES).unwrap();
        let monomials = MultiIndexPolynomial::monomials_up_to(PrimeField::BINARY, 6, 2);
        let mut expected: Vec<f64> = (0..20)
            .map(|t| {
                let mut rng = mc::stream_rng(5, t);
                let coeffs = monomials
                    .iter()
                    .enumerate()
                    .fold(0u64, |c, (i, _)| c | u64::from(rng.random::<bool>()) << i);
                correlation(&f, &poly_fn(&polynomial_from_bits(6, &monomials, coeffs)))
                    .unwrap()
                    .abs()
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        assert_eq!(packed.values, expected);
    }

    #[test]
    fn lazy_profile_is_close_to_exact() {
        let lazy = materialize(
            &FunctionDescriptor::Symmetric(4),
            PrimeField::BINARY,
            8,
            MaterializeMode::Lazy,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        let p = sampled_correlation_profile(&lazy, 1, 20, 3, 1 << 14).unwrap();
        assert!(!p.exact_per_trial);
        assert!(p.max <= 1.0);
        let f3 = PrimeField::new(3).unwrap();
        let t = materialize(
            &FunctionDescriptor::Symmetric(2),
            f3,
            3,
            MaterializeMode::Dense,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        let q = sampled_correlation_profile(&t, 1, 30, 4, DEFAULT_POINT_SAMPLES).unwrap();
        assert!(q.values.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn mixed_derivative_inequality() {
        let b = PrimeField::BINARY;
        let zero = FiniteFunction::zero(b, 3).unwrap();
        for order in 1..=2 {
            let r = derivative_inequality_check(&zero, &zero, order).unwrap();
            assert_eq!((r.lhs, r.rhs, r.holds), (1.0, 1.0, true));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s4 = sym(4, 6);
        let g = poly_fn(&MultiIndexPolynomial::random(b, 6, 3, &mut rng));
        assert!(derivative_inequality_check(&s4, &g, 1).unwrap().holds);
        assert!(derivative_inequality_check(&s4, &g, 2).unwrap().holds);
        for _ in 0..100 {
            let dim = rng.random_range(1..=5);
            let f = random_binary(dim, &mut rng);
            let g = random_binary(dim, &mut rng);
            for order in 1..=2 {
                let r = derivative_inequality_check(&f, &g, order).unwrap();
                assert!(r.holds && r.lhs <= r.rhs, "{r:?}");
            }
        }
        let f3 = PrimeField::new(3).unwrap();
        let a = materialize(
            &FunctionDescriptor::Symmetric(2),
            f3,
            3,
            MaterializeMode::Dense,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        let z = FiniteFunction::zero(f3, 3).unwrap();
        assert!(derivative_inequality_check(&a, &z, 2).unwrap().holds);
        assert!(derivative_inequality_check(&sym(4, 9), &sym(4, 9), 2).is_err());
    }
}
