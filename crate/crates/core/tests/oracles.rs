use gowers_core::correlation::{derivative_inequality_check, max_correlation_exhaustive, max_correlation_spectral};
use gowers_core::functions::iterated_derivative;
use gowers_core::gowers::gowers_norm_exact;
use gowers_core::quadratic::s4_u4_rank_route;
use gowers_core::symmetric::eval_symmetric;
use gowers_core::{FieldVector, FiniteFunction, PrimeField, SymmetricSpec};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn add_index(p: usize, dim: usize, mut a: usize, mut b: usize) -> usize {
    let (mut out, mut place) = (0, 1);
    for _ in 0..dim {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

/// `E_{x, y_1..y_k} e(sum_S (-1)^{k-|S|} f(x + y_S))`, summed term by term.
fn direct_gowers_raw(table: &[u8], p: usize, dim: usize, k: usize) -> Complex64 {
    let n = table.len();
    let total = n.pow(k as u32 + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut ys = vec![0usize; k];
    for t in 0..total {
        let x = t % n;
        let mut rest = t / n;
        for y in ys.iter_mut() {
            *y = rest % n;
            rest /= n;
        }
        let mut phase = 0i64;
        for s in 0..1usize << k {
            let point = (0..k)
                .filter(|&i| s >> i & 1 == 1)
                .fold(x, |acc, i| add_index(p, dim, acc, ys[i]));
            let sign = if (k - s.count_ones() as usize).is_multiple_of(2) {
                1
            } else {
                -1
            };
            phase += sign * i64::from(table[point]);
        }
        let angle = 2.0 * std::f64::consts::PI * phase.rem_euclid(p as i64) as f64 / p as f64;
        acc += Complex64::from_polar(1.0, angle);
    }
    acc / total as f64
}

/// Same as [`direct_gowers_raw`] over F_2, as an exact signed count.
fn direct_gowers_count_binary(table: &[u8], dim: usize, k: usize) -> i128 {
    let n = 1usize << dim;
    let mut acc = 0i128;
    for t in 0..n.pow(k as u32 + 1) {
        let x = t % n;
        let ys: Vec<usize> = (0..k).map(|i| (t >> (dim * (i + 1))) % n).collect();
        let parity = (0..1usize << k).fold(0u8, |par, s| {
            let point = (0..k).filter(|&i| s >> i & 1 == 1).fold(x, |a, i| a ^ ys[i]);
            par ^ table[point]
        });
        acc += if parity == 0 { 1 } else { -1 };
    }
    acc
}

fn binary(dim: usize, table: Vec<u8>) -> FiniteFunction {
    FiniteFunction::dense(PrimeField::BINARY, dim, table).unwrap()
}

fn assert_exact_matches_direct(table: &[u8], dim: usize, k: usize) {
    let est = gowers_norm_exact(&binary(dim, table.to_vec()), k).unwrap();
    let exact = est.exact_raw.expect("binary norms are exact");
    let count = direct_gowers_count_binary(table, dim, k);
    let log_total = (dim * (k + 1)) as u32;
    assert!(count >= 0);
    assert_eq!(
        (count as u128) << exact.log2_denominator,
        exact.numerator << log_total,
        "table {table:?}, k = {k}"
    );
}

#[test]
fn binary_exact_norm_matches_definition_on_every_small_function() {
    for dim in 1..=3 {
        for code in 0..1u32 << (1 << dim) {
            let table: Vec<u8> = (0..1 << dim).map(|x| (code >> x & 1) as u8).collect();
            for k in 1..=4 {
                assert_exact_matches_direct(&table, dim, k);
            }
        }
    }
}

#[test]
fn binary_exact_norm_matches_definition_at_dim_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..6 {
        let table: Vec<u8> = (0..16).map(|_| rng.random_range(0..2)).collect();
        for k in 1..=4 {
            assert_exact_matches_direct(&table, 4, k);
        }
    }
}

#[test]
fn odd_characteristic_norm_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (p, dim, max_k) in [(3usize, 2usize, 3usize), (5, 1, 3), (3, 1, 4)] {
        let field = PrimeField::new(p as u32).unwrap();
        for _ in 0..4 {
            let table: Vec<u8> = (0..p.pow(dim as u32)).map(|_| rng.random_range(0..p as u8)).collect();
            let f = FiniteFunction::dense(field, dim, table.clone()).unwrap();
            for k in 1..=max_k {
                let direct = direct_gowers_raw(&table, p, dim, k);
                let est = gowers_norm_exact(&f, k).unwrap();
                assert!(direct.im.abs() < 1e-9);
                assert!((est.raw_power - direct.re).abs() < 1e-9, "p = {p}, k = {k}");
            }
        }
    }
}

/// Largest `|sum_x (-1)^{f(x) + g(x)}|` over degree-`d` polynomials `g`,
/// pairing every low-half coefficient vector with every high-half one.
fn split_enumeration_max(f: &[u8], dim: usize, d: usize) -> u32 {
    let monomials: Vec<u32> = (0..1u32 << dim).filter(|m| m.count_ones() as usize <= d).collect();
    let tables: Vec<u64> = monomials
        .iter()
        .map(|&m| (0..1u32 << dim).filter(|&x| x & m == m).fold(0u64, |t, x| t | 1 << x))
        .collect();
    let half = tables.len() / 2;
    let span = |ts: &[u64]| -> Vec<u64> {
        (0..1usize << ts.len())
            .map(|c| (0..ts.len()).filter(|&i| c >> i & 1 == 1).fold(0, |t, i| t ^ ts[i]))
            .collect()
    };
    let (low, high) = (span(&tables[..half]), span(&tables[half..]));
    let fmask = f.iter().enumerate().fold(0u64, |t, (x, &v)| t | u64::from(v) << x);
    let points = 1i64 << dim;
    let mut best = 0;
    for &h in &high {
        let fh = fmask ^ h;
        for &l in &low {
            let dist = i64::from((fh ^ l).count_ones());
            best = best.max((points - 2 * dist).unsigned_abs() as u32);
        }
    }
    best
}

fn s4_table(dim: usize) -> Vec<u8> {
    (0..1u32 << dim)
        .map(|x| u8::from(matches!(x.count_ones() % 8, 4..=7)))
        .collect()
}

#[test]
fn exhaustive_correlation_of_s4_matches_split_enumeration() {
    for (dim, expected) in [(4usize, 14u32), (5, 28)] {
        let table = s4_table(dim);
        let oracle = split_enumeration_max(&table, dim, 3);
        assert_eq!(oracle, expected);
        let got = max_correlation_exhaustive(&binary(dim, table), 3).unwrap();
        assert_eq!(
            got.exact.map(|(num, den)| (num.unsigned_abs(), den)),
            Some((u64::from(oracle), dim as u32))
        );
        assert_eq!(got.max_abs, f64::from(oracle) / f64::from(1u32 << dim));
    }
}

#[test]
fn s4_u4_rank_route_matches_exact_norm() {
    for dim in 4..=9 {
        let spec = SymmetricSpec::new(4, PrimeField::BINARY, dim);
        let f = FiniteFunction::tabulate(PrimeField::BINARY, dim, |x| eval_symmetric(&spec, x)).unwrap();
        let exact = gowers_norm_exact(&f, 4).unwrap().exact_raw.unwrap();
        let route = s4_u4_rank_route(dim).unwrap().exact_raw.unwrap();
        assert_eq!(
            exact.numerator << route.log2_denominator,
            route.numerator << exact.log2_denominator,
            "N = {dim}"
        );
    }
}

fn subset_sum_symmetric(values: &[u32], n: usize, p: u32) -> u32 {
    let len = values.len();
    (0..1u32 << len)
        .filter(|s| s.count_ones() as usize == n)
        .map(|s| {
            (0..len)
                .filter(|&j| s >> j & 1 == 1)
                .fold(1u64, |acc, j| acc * u64::from(values[j]) % u64::from(p))
        })
        .fold(0u64, |acc, v| (acc + v) % u64::from(p)) as u32
}

fn table_strategy(max_dim: usize) -> impl Strategy<Value = (usize, Vec<u8>)> {
    (1..=max_dim).prop_flat_map(|dim| (Just(dim), prop::collection::vec(0u8..2, 1 << dim)))
}

proptest! {
    #[test]
    fn symmetric_polynomial_matches_subset_sum(
        p in prop::sample::select(vec![2u32, 3, 5]),
        raw in prop::collection::vec(0u32..5, 0..=9),
        n in 0usize..=9,
    ) {
        let field = PrimeField::new(p).unwrap();
        let values: Vec<u32> = raw.iter().map(|v| v % p).collect();
        let x = FieldVector::from_values(field, &values).unwrap();
        let spec = SymmetricSpec::new(n, field, values.len());
        prop_assert_eq!(eval_symmetric(&spec, &x), subset_sum_symmetric(&values, n, p));
    }

    #[test]
    fn iterated_derivative_matches_definition(
        (dim, table) in table_strategy(6),
        seeds in prop::collection::vec(any::<u64>(), 1..=3),
    ) {
        let f = binary(dim, table.clone());
        let dirs: Vec<usize> = seeds.iter().map(|s| (*s as usize) % (1 << dim)).collect();
        let vectors: Vec<FieldVector> = dirs.iter().map(|&y| FieldVector::from_index(PrimeField::BINARY, dim, y)).collect();
        let d = iterated_derivative(&f, &vectors).unwrap();
        for x in 0..1usize << dim {
            let expected = (0..1usize << dirs.len()).fold(0u8, |acc, s| {
                let point = (0..dirs.len()).filter(|&i| s >> i & 1 == 1).fold(x, |a, i| a ^ dirs[i]);
                acc ^ table[point]
            });
            prop_assert_eq!(d.eval_index(x), u32::from(expected));
        }
    }

    #[test]
    fn spectral_method_matches_affine_brute_force((dim, table) in table_strategy(6)) {
        let got = max_correlation_spectral(&binary(dim, table.clone())).unwrap();
        let best = (0..1usize << dim)
            .map(|a| {
                (0..1usize << dim)
                    .map(|x| if (table[x] as u32 + (a & x).count_ones()).is_multiple_of(2) { 1i64 } else { -1 })
                    .sum::<i64>()
                    .unsigned_abs()
            })
            .max()
            .unwrap();
        prop_assert_eq!(got.max_abs, best as f64 / (1u64 << dim) as f64);
    }

    #[test]
    fn mixed_derivative_inequality_holds(
        (dim, f) in table_strategy(4),
        g_seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(g_seed);
        let g: Vec<u8> = (0..f.len()).map(|_| rng.random_range(0..2)).collect();
        let corr = f.iter().zip(&g).map(|(a, b)| if a == b { 1.0 } else { -1.0 }).sum::<f64>() / f.len() as f64;
        for order in 1..=2 {
            let r = derivative_inequality_check(&binary(dim, f.clone()), &binary(dim, g.clone()), order).unwrap();
            prop_assert!(r.holds);
            prop_assert!((r.lhs - corr.abs().powi(1 << (order + 1))).abs() < 1e-12);
        }
    }
}
