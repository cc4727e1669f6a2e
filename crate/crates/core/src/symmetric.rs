//! Elementary symmetric polynomials `S_n(x) = sum_{|A| = n} prod_{i in A} x_i`
//! and their directional derivatives.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::{lucas_binomial, FieldElement, FieldVector, PrimeField};
use crate::matrix_funcs::{eval_matrix_function, ColumnExclusion, MatrixFunction, RowMatrix};

/// `S_n` on `F_p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymmetricSpec {
    pub n: usize,
    pub field: PrimeField,
    pub dim: usize,
}

impl SymmetricSpec {
    pub fn new(n: usize, field: PrimeField, dim: usize) -> Self {
        SymmetricSpec { n, field, dim }
    }
}

/// Coefficient of `t^n` in `prod_j (1 + x_j t)`.
pub fn eval_symmetric(spec: &SymmetricSpec, x: &FieldVector) -> FieldElement {
    let n = spec.n;
    if n > x.len() {
        return 0;
    }
    let field = x.field();
    if field.is_binary() {
        return lucas_binomial(x.weight() as u64, n as u64, field);
    }
    let mut e = vec![0; n + 1];
    e[0] = 1;
    for (j, v) in x.iter().enumerate() {
        if v == 0 {
            continue;
        }
        for i in (1..=n.min(j + 1)).rev() {
            e[i] = field.add(e[i], field.mul(v, e[i - 1]));
        }
    }
    e[n]
}

/// `S_n` at a 0/1 vector of Hamming weight `w`, which is `C(w, n) mod p`.
pub fn cube_value_lucas(spec: &SymmetricSpec, w: usize) -> FieldElement {
    lucas_binomial(w as u64, spec.n as u64, spec.field)
}

/// Compositions of `total` into `parts` positive parts, in colexicographic
/// order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// One term `H(x^(m), y_1^(l_1) ... y_k^(l_k))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionTerm {
    pub m: usize,
    pub ells: Vec<usize>,
}

/// `(S_n)_{y_1 ... y_k}(x)` as a sum of hybrid functionals, ordered by `m`
/// and then by the composition `l` in colexicographic order.
#[derive(Debug)]
pub struct DerivativeExpansion {
    spec: SymmetricSpec,
    directions: Vec<FieldVector>,
    terms: Vec<ExpansionTerm>,
    constant: OnceLock<FieldElement>,
}

impl DerivativeExpansion {
    pub fn terms(&self) -> &[ExpansionTerm] {
        &self.terms
    }

    pub fn spec(&self) -> &SymmetricSpec {
        &self.spec
    }

    pub fn directions(&self) -> &[FieldVector] {
        &self.directions
    }

    fn term_matrix(&self, term: &ExpansionTerm, x: Option<&FieldVector>) -> Result<RowMatrix> {
        let mut groups = Vec::with_capacity(self.directions.len() + 1);
        if let Some(x) = x {
            groups.push((x.clone(), term.m));
        }
        groups.extend(self.directions.iter().cloned().zip(term.ells.iter().copied()));
        RowMatrix::new(self.spec.field, self.spec.dim, groups)
    }

    /// Sum of the terms that do not involve `x`, computed once.
    fn constant(&self) -> Result<FieldElement> {
        if let Some(&c) = self.constant.get() {
            return Ok(c);
        }
        let field = self.spec.field;
        let mut c = 0;
        for term in self.terms.iter().filter(|t| t.m == 0) {
            let m = self.term_matrix(term, None)?;
            c = field.add(
                c,
                eval_matrix_function(MatrixFunction::H, &m, &ColumnExclusion::none())?,
            );
        }
        Ok(*self.constant.get_or_init(|| c))
    }

    pub fn eval(&self, x: &FieldVector) -> Result<FieldElement> {
        if x.field() != self.spec.field || x.len() != self.spec.dim {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for S_n on {}^{}",
                x.len(),
                self.spec.field,
                self.spec.dim
            )));
        }
        let field = self.spec.field;
        let mut total = self.constant()?;
        for term in self.terms.iter().filter(|t| t.m > 0) {
            let m = self.term_matrix(term, Some(x))?;
            total = field.add(
                total,
                eval_matrix_function(MatrixFunction::H, &m, &ColumnExclusion::none())?,
            );
        }
        Ok(total)
    }
}

fn check_directions(spec: &SymmetricSpec, directions: &[FieldVector]) -> Result<()> {
    for y in directions {
        if y.field() != spec.field || y.len() != spec.dim {
            return Err(Error::DimensionMismatch(format!(
                "direction of length {} over {} for S_n on {}^{}",
                y.len(),
                y.field(),
                spec.field,
                spec.dim
            )));
        }
    }
    Ok(())
}

/// The expansion of `(S_n)_{y_1 ... y_k}`. Empty, hence identically zero,
/// when `k > n`.
pub fn derivative_expansion(spec: &SymmetricSpec, directions: &[FieldVector]) -> Result<DerivativeExpansion> {
    check_directions(spec, directions)?;
    let k = directions.len();
    let mut terms = Vec::new();
    if k <= spec.n {
        for m in 0..=spec.n - k {
            for ells in compositions(spec.n - m, k) {
                terms.push(ExpansionTerm { m, ells });
            }
        }
    }
    Ok(DerivativeExpansion {
        spec: *spec,
        directions: directions.to_vec(),
        terms,
        constant: OnceLock::new(),
    })
}

/// The coefficient of a multilinear monomial in `(S_n)_{y_1 ... y_k}`, in
/// both available forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonomialCoefficient {
    /// `sum_l H^T(y_1^(l_1) ... y_k^(l_k))`.
    pub h_form: FieldElement,
    /// `sum_l (prod_i l_i!)^{-1} S^T(y_1^(l_1) ... y_k^(l_k))`, available when
    /// `k + m + p > n + 1`.
    pub s_form: Option<FieldElement>,
}

impl MonomialCoefficient {
    pub fn value(&self) -> FieldElement {
        self.h_form
    }

    pub fn forms_agree(&self) -> bool {
        self.s_form.is_none_or(|s| s == self.h_form)
    }
}

/// Coefficient of `x_{j_1} ... x_{j_m}` (0-based, strictly increasing
/// indices) in `(S_n)_{y_1 ... y_k}`.
pub fn monomial_coefficient(
    spec: &SymmetricSpec,
    directions: &[FieldVector],
    monomial: &[usize],
) -> Result<MonomialCoefficient> {
    check_directions(spec, directions)?;
    if monomial.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "monomial indices must be strictly increasing".into(),
        ));
    }
    let excluded = ColumnExclusion::new(monomial.to_vec())?;
    let field = spec.field;
    let (n, k, m) = (spec.n, directions.len(), monomial.len());
    if k + m > n {
        if let Some(&j) = monomial.iter().find(|&&j| j >= spec.dim) {
            return Err(Error::IndexOutOfRange {
                index: j,
                limit: spec.dim,
            });
        }
        return Ok(MonomialCoefficient {
            h_form: 0,
            s_form: Some(0),
        });
    }
    let use_s = k + m + field.p() as usize > n + 1;
    let mut h_form = 0;
    let mut s_form = 0;
    for ells in compositions(n - m, k) {
        let groups = directions.iter().cloned().zip(ells.iter().copied()).collect();
        let mat = RowMatrix::new(field, spec.dim, groups)?;
        h_form = field.add(h_form, eval_matrix_function(MatrixFunction::H, &mat, &excluded)?);
        if use_s {
            let fact = ells.iter().fold(1, |acc, &l| field.mul(acc, field.factorial(l)));
            let inv = field
                .inv(fact)
                .ok_or_else(|| Error::Precondition("multiplicity factorial not invertible".into()))?;
            let s = eval_matrix_function(MatrixFunction::S, &mat, &excluded)?;
            s_form = field.add(s_form, field.mul(inv, s));
        }
    }
    Ok(MonomialCoefficient {
        h_form,
        s_form: use_s.then_some(s_form),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{iterated_derivative, materialize, FunctionDescriptor, MaterializeMode, DEFAULT_DENSE_CAP};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn subset_sum_oracle(n: usize, x: &FieldVector) -> FieldElement {
        let field = x.field();
        let vals = x.to_values();
        fn rec(field: PrimeField, vals: &[u32], start: usize, left: usize, acc: u32) -> u32 {
            if left == 0 {
                return acc;
            }
            (start..vals.len()).fold(0, |s, i| {
                field.add(s, rec(field, vals, i + 1, left - 1, field.mul(acc, vals[i])))
            })
        }
        rec(field, &vals, 0, n, 1)
    }

    #[test]
    fn eval_examples() {
        let b = PrimeField::BINARY;
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(
            eval_symmetric(&SymmetricSpec::new(2, b, 3), &FieldVector::ones(b, 3)),
            1
        );
        let x = FieldVector::from_values(f3, &[1, 2]).unwrap();
        assert_eq!(eval_symmetric(&SymmetricSpec::new(2, f3, 2), &x), 2);
        let x6 = FieldVector::from_mask(8, 0b0011_1111);
        assert_eq!(eval_symmetric(&SymmetricSpec::new(4, b, 8), &x6), 1);
        assert_eq!(eval_symmetric(&SymmetricSpec::new(9, b, 8), &x6), 0);
        assert_eq!(eval_symmetric(&SymmetricSpec::new(0, f3, 2), &x), 1);
    }

    #[test]
    fn sweep_matches_subset_sum_on_cube() {
        for p in [2u32, 3] {
            let field = PrimeField::new(p).unwrap();
            for dim in [1usize, 5, 9, 12] {
                for mask in 0..(1u64 << dim) {
                    let x = if p == 2 {
                        FieldVector::from_mask(dim, mask)
                    } else {
                        let v: Vec<u32> = (0..dim).map(|j| (mask >> j & 1) as u32).collect();
                        FieldVector::from_values(field, &v).unwrap()
                    };
                    if dim == 12 && mask % 17 != 0 {
                        continue;
                    }
                    for n in [0usize, 1, 2, 4, 5] {
                        assert_eq!(
                            eval_symmetric(&SymmetricSpec::new(n, field, dim), &x),
                            subset_sum_oracle(n, &x)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sweep_matches_subset_sum_off_cube() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..1000 {
            let field = PrimeField::new(if trial % 2 == 0 { 3 } else { 5 }).unwrap();
            let dim = rng.random_range(1..=10);
            let n = rng.random_range(0..=5);
            let x = FieldVector::random(field, dim, &mut rng);
            assert_eq!(
                eval_symmetric(&SymmetricSpec::new(n, field, dim), &x),
                subset_sum_oracle(n, &x)
            );
        }
    }

    #[test]
    fn lucas_examples_and_cube_agreement() {
        let b = PrimeField::BINARY;
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(cube_value_lucas(&SymmetricSpec::new(4, b, 8), 5), 1);
        assert_eq!(cube_value_lucas(&SymmetricSpec::new(9, f3, 13), 13), 1);
        assert_eq!(cube_value_lucas(&SymmetricSpec::new(4, b, 8), 3), 0);
        for field in [b, f3] {
            let dim = 14;
            for n in 0..=dim {
                let spec = SymmetricSpec::new(n, field, dim);
                for w in 0..=dim {
                    let v: Vec<u32> = (0..dim).map(|j| u32::from(j < w)).collect();
                    let x = FieldVector::from_values(field, &v).unwrap();
                    assert_eq!(cube_value_lucas(&spec, w), eval_symmetric(&spec, &x));
                }
            }
        }
    }

    #[test]
    fn square_degree_depends_only_on_third_digit() {
        for p in [2usize, 3] {
            let field = PrimeField::new(p as u32).unwrap();
            let p2 = p * p;
            let spec = SymmetricSpec::new(p2, field, p2 * p);
            let mut by_digit = vec![None; p];
            for w in 0..p2 * p {
                let digit = w / p2;
                let v = cube_value_lucas(&spec, w);
                assert_eq!(*by_digit[digit].get_or_insert(v), v, "p={p} w={w}");
            }
            let distinct: std::collections::HashSet<_> = by_digit.iter().flatten().collect();
            assert_eq!(distinct.len(), p);
            for m in 0..p2 {
                let low = SymmetricSpec::new(m, field, p2 * p);
                for w in 0..p2 * (p - 1) {
                    assert_eq!(cube_value_lucas(&low, w), cube_value_lucas(&low, w + p2));
                }
            }
        }
    }

    #[test]
    fn composition_order() {
        assert_eq!(compositions(4, 2), vec![vec![3, 1], vec![2, 2], vec![1, 3]]);
        assert_eq!(compositions(4, 3), vec![vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]);
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
        assert!(compositions(2, 3).is_empty());
        assert_eq!(compositions(7, 3).len(), 15);
    }

    #[test]
    fn expansion_shape() {
        let b = PrimeField::BINARY;
        let y = FieldVector::from_mask(5, 0b10110);
        let z = FieldVector::from_mask(5, 0b01101);
        let e = derivative_expansion(&SymmetricSpec::new(2, b, 5), &[y.clone(), z.clone()]).unwrap();
        assert_eq!(e.terms(), &[ExpansionTerm { m: 0, ells: vec![1, 1] }]);
        let s = eval_matrix_function(
            MatrixFunction::S,
            &RowMatrix::from_rows(b, 5, &[y.clone(), z.clone()]).unwrap(),
            &ColumnExclusion::none(),
        )
        .unwrap();
        for mask in 0..32 {
            assert_eq!(e.eval(&FieldVector::from_mask(5, mask)).unwrap(), s);
        }
        let e3 = derivative_expansion(&SymmetricSpec::new(2, b, 5), &[y.clone(), z.clone(), y]).unwrap();
        assert!(e3.terms().is_empty());
        assert_eq!(e3.eval(&FieldVector::ones(b, 5)).unwrap(), 0);
    }

    #[test]
    fn expansion_matches_table_derivatives() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (p, dim, n, k, points) in [
            (2u32, 6, 4, 2, 200),
            (2, 7, 5, 3, 100),
            (3, 4, 4, 2, 100),
            (5, 3, 3, 1, 50),
            (3, 4, 2, 3, 20),
        ] {
            let field = PrimeField::new(p).unwrap();
            let spec = SymmetricSpec::new(n, field, dim);
            let table = materialize(
                &FunctionDescriptor::Symmetric(n),
                field,
                dim,
                MaterializeMode::Dense,
                DEFAULT_DENSE_CAP,
            )
            .unwrap();
            for _ in 0..points / 10 {
                let dirs: Vec<FieldVector> = (0..k).map(|_| FieldVector::random(field, dim, &mut rng)).collect();
                let deriv = iterated_derivative(&table, &dirs).unwrap();
                let exp = derivative_expansion(&spec, &dirs).unwrap();
                for _ in 0..10 {
                    let x = FieldVector::random(field, dim, &mut rng);
                    assert_eq!(exp.eval(&x).unwrap(), deriv.eval(&x));
                }
            }
        }
    }

    #[test]
    fn toy_coefficient_example() {
        let b = PrimeField::BINARY;
        let spec = SymmetricSpec::new(4, b, 4);
        let y = FieldVector::from_values(b, &[1, 1, 0, 0]).unwrap();
        let z = FieldVector::from_values(b, &[1, 0, 1, 0]).unwrap();
        let coef = monomial_coefficient(&spec, &[y.clone(), z.clone()], &[0, 1]).unwrap();
        let s_excl = eval_matrix_function(
            MatrixFunction::S,
            &RowMatrix::from_rows(b, 4, &[y.clone(), z.clone()]).unwrap(),
            &ColumnExclusion::new(vec![0, 1]).unwrap(),
        )
        .unwrap();
        let table = materialize(
            &FunctionDescriptor::Symmetric(4),
            b,
            4,
            MaterializeMode::Dense,
            DEFAULT_DENSE_CAP,
        )
        .unwrap();
        let deriv = iterated_derivative(&table, &[y, z]).unwrap();
        assert_eq!(coef.value(), s_excl);
        assert_eq!(coef.s_form, Some(s_excl));
        assert_eq!(deriv.multilinear_coefficient(&[0, 1]).unwrap(), s_excl);
    }

    #[test]
    fn coefficients_match_extraction_and_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for (p, dim, n, k) in [
            (2u32, 7, 4, 2),
            (2, 7, 5, 2),
            (3, 5, 4, 2),
            (3, 5, 5, 1),
            (5, 4, 4, 2),
            (2, 8, 6, 3),
        ] {
            let field = PrimeField::new(p).unwrap();
            let spec = SymmetricSpec::new(n, field, dim);
            let table = materialize(
                &FunctionDescriptor::Symmetric(n),
                field,
                dim,
                MaterializeMode::Dense,
                DEFAULT_DENSE_CAP,
            )
            .unwrap();
            for _ in 0..4 {
                let dirs: Vec<FieldVector> = (0..k).map(|_| FieldVector::random(field, dim, &mut rng)).collect();
                let deriv = iterated_derivative(&table, &dirs).unwrap();
                for m in 0..=n - k {
                    let mut mono: Vec<usize> = (0..dim).collect();
                    for i in 0..m {
                        let j = rng.random_range(i..dim);
                        mono.swap(i, j);
                    }
                    mono.truncate(m);
                    mono.sort_unstable();
                    let c = monomial_coefficient(&spec, &dirs, &mono).unwrap();
                    assert!(c.forms_agree(), "p={p} n={n} k={k} m={m}");
                    assert_eq!(c.s_form.is_some(), k + m + p as usize > n + 1);
                    assert_eq!(c.value(), deriv.multilinear_coefficient(&mono).unwrap());
                    if m == n - k {
                        let mat = RowMatrix::from_rows(field, dim, &dirs).unwrap();
                        let direct =
                            eval_matrix_function(MatrixFunction::S, &mat, &ColumnExclusion::new(mono.clone()).unwrap())
                                .unwrap();
                        assert_eq!(c.value(), direct);
                    }
                }
            }
        }
    }

    #[test]
    fn coefficient_rejects_bad_monomials() {
        let b = PrimeField::BINARY;
        let spec = SymmetricSpec::new(4, b, 4);
        let y = FieldVector::ones(b, 4);
        assert!(monomial_coefficient(&spec, std::slice::from_ref(&y), &[1, 0]).is_err());
        assert!(monomial_coefficient(&spec, &[y], &[1, 1]).is_err());
    }

    proptest! {
        #[test]
        fn zero_direction_kills_derivative(mask in 0u64..256, xmask in 0u64..256, n in 1usize..6) {
            let b = PrimeField::BINARY;
            let spec = SymmetricSpec::new(n, b, 8);
            let y = FieldVector::from_mask(8, mask);
            let e = derivative_expansion(&spec, &[y, FieldVector::zeros(b, 8)]).unwrap();
            prop_assert_eq!(e.eval(&FieldVector::from_mask(8, xmask)).unwrap(), 0);
        }
    }
}
