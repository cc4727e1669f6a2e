//! Randomized checks of the exact identities, each against an independent
//! evaluator.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::{FieldVector, PrimeField};
use crate::functions::{iterated_derivative, materialize, FunctionDescriptor, MaterializeMode, DEFAULT_DENSE_CAP};
use crate::gowers::{vanishing_lemma_check, TripleSampler};
use crate::matrix_funcs::{
    eval_matrix_function, incomplete_expansion, partition_expansion_sym, ColumnExclusion, MatrixFunction, RowMatrix,
};
use crate::mc::stream_rng;
use crate::symmetric::{derivative_expansion, monomial_coefficient, SymmetricSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    /// Derivative expansion of `S_n` against tabulated derivatives.
    HighDerivative,
    /// H-form and S-form of derivative coefficients against the table.
    CoefficientForms,
    /// `S(M) = (prod_t l_t!) H(M)`.
    HybridVsSymmetric,
    /// One deleted column.
    IncompleteSymmetric,
    /// Partition expansion of `S`.
    PartitionExpansion,
    /// Ordered set systems for several deleted columns.
    SetSystemExpansion,
    /// `(S_4)_{y,z}(x) = H(y^(2), z^(2))` on constrained triples, `p = 2`, `N = 8`.
    Vanishing,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::HighDerivative,
        Identity::CoefficientForms,
        Identity::HybridVsSymmetric,
        Identity::IncompleteSymmetric,
        Identity::PartitionExpansion,
        Identity::SetSystemExpansion,
        Identity::Vanishing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::HighDerivative => "high_derivative",
            Identity::CoefficientForms => "coefficient_forms",
            Identity::HybridVsSymmetric => "hybrid_vs_symmetric",
            Identity::IncompleteSymmetric => "incomplete_symmetric",
            Identity::PartitionExpansion => "partition_expansion",
            Identity::SetSystemExpansion => "set_system_expansion",
            Identity::Vanishing => "vanishing",
        }
    }

    pub fn default_instances(self) -> u64 {
        match self {
            Identity::HighDerivative | Identity::CoefficientForms => 200,
            Identity::Vanishing => 100,
            _ => 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityOutcome {
    pub identity: Identity,
    pub instances: u64,
    pub failures: u64,
}

const PRIMES: [u32; 3] = [2, 3, 5];

fn field_for(i: u64) -> PrimeField {
    PrimeField::new(PRIMES[(i % 3) as usize]).expect("prime")
}

fn rand_rows(field: PrimeField, dim: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<FieldVector> {
    (0..n).map(|_| FieldVector::random(field, dim, rng)).collect()
}

fn table_dim(field: PrimeField, rng: &mut ChaCha8Rng) -> usize {
    match field.p() {
        2 => rng.random_range(2..=8),
        3 => rng.random_range(2..=5),
        _ => rng.random_range(2..=3),
    }
}

fn sorted_subset(dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut v = sample(rng, dim, k).into_vec();
    v.sort_unstable();
    v
}

fn s_value(rows: &[FieldVector], field: PrimeField, dim: usize, excl: &ColumnExclusion) -> Result<u32> {
    eval_matrix_function(MatrixFunction::S, &RowMatrix::from_rows(field, dim, rows)?, excl)
}

fn high_derivative(i: u64, rng: &mut ChaCha8Rng) -> Result<bool> {
    let field = field_for(i);
    let dim = table_dim(field, rng);
    let n = rng.random_range(1..=5);
    let k = rng.random_range(1..=3);
    let spec = SymmetricSpec::new(n, field, dim);
    let dirs = rand_rows(field, dim, k, rng);
    let f = materialize(
        &FunctionDescriptor::Symmetric(n),
        field,
        dim,
        MaterializeMode::Dense,
        DEFAULT_DENSE_CAP,
    )?;
    let table = iterated_derivative(&f, &dirs)?;
    let exp = derivative_expansion(&spec, &dirs)?;
    for _ in 0..8 {
        let x = FieldVector::random(field, dim, rng);
        if exp.eval(&x)? != table.eval(&x) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn coefficient_forms(i: u64, rng: &mut ChaCha8Rng) -> Result<bool> {
    let field = field_for(i);
    let p = field.p() as usize;
    loop {
        let dim = table_dim(field, rng);
        let n = rng.random_range(2..=6);
        let k = rng.random_range(1..=3.min(n));
        let m = rng.random_range(0..=(n - k).min(dim));
        if k + m + p <= n + 1 {
            continue;
        }
        let spec = SymmetricSpec::new(n, field, dim);
        let dirs = rand_rows(field, dim, k, rng);
        let mono = sorted_subset(dim, m, rng);
        let c = monomial_coefficient(&spec, &dirs, &mono)?;
        let f = materialize(
            &FunctionDescriptor::Symmetric(n),
            field,
            dim,
            MaterializeMode::Dense,
            DEFAULT_DENSE_CAP,
        )?;
        let oracle = iterated_derivative(&f, &dirs)?.multilinear_coefficient(&mono)?;
        return Ok(c.s_form.is_some() && c.forms_agree() && c.value() == oracle);
    }
}

fn hybrid_vs_symmetric(i: u64, rng: &mut ChaCha8Rng) -> Result<bool> {
    let field = field_for(i);
    let dim = rng.random_range(1..=10);
    let groups: Vec<(FieldVector, usize)> = (0..rng.random_range(1..=3))
        .map(|_| (FieldVector::random(field, dim, rng), rng.random_range(1..=3)))
        .collect();
    let factor = groups.iter().fold(1, |acc, g| field.mul(acc, field.factorial(g.1)));
    let m = RowMatrix::new(field, dim, groups)?;
    let none = ColumnExclusion::none();
    let s = eval_matrix_function(MatrixFunction::S, &m, &none)?;
    let h = eval_matrix_function(MatrixFunction::H, &m, &none)?;
    Ok(s == field.mul(factor, h))
}

fn incomplete_symmetric(i: u64, rng: &mut ChaCha8Rng) -> Result<bool> {
    let field = field_for(i);
    let dim = rng.random_range(1..=8);
    let rows = rand_rows(field, dim, rng.random_range(1..=5), rng);
    let j = rng.random_range(0..dim);
    Ok(incomplete_expansion(&rows, &[j])? == s_value(&rows, field, dim, &ColumnExclusion::new(vec![j])?)?)
}

fn partition_expansion(i: u64, rng: &mut ChaCha8Rng) -> Result<bool> {
    let field = field_for(i);
    let dim = rng.random_range(1..=8);
    let rows = rand_rows(field, dim, rng.random_range(1..=6), rng);
    Ok(partition_expansion_sym(&rows)? == s_value(&rows, field, dim, &ColumnExclusion::none())?)
}

fn set_system_expansion(i: u64, rng: &mut ChaCha8Rng) -> Result<bool> {
    let field = field_for(i);
    let dim = rng.random_range(3..=8);
    let rows = rand_rows(field, dim, rng.random_range(1..=5), rng);
    let missing = sorted_subset(dim, rng.random_range(1..=3), rng);
    Ok(incomplete_expansion(&rows, &missing)? == s_value(&rows, field, dim, &ColumnExclusion::new(missing)?)?)
}

/// Runs `instances` checks of `identity`; instance `i` of identity `t`
/// draws from stream `t * 2^32 + i` of `seed`.
pub fn run_identity(identity: Identity, instances: u64, seed: u64) -> Result<IdentityOutcome> {
    use rayon::prelude::*;
    let tag = Identity::ALL.iter().position(|&t| t == identity).expect("listed") as u64;
    if identity == Identity::Vanishing {
        let r = vanishing_lemma_check(
            PrimeField::BINARY,
            8,
            instances,
            seed ^ tag << 32,
            TripleSampler::Rejection,
        )?;
        return Ok(IdentityOutcome {
            identity,
            instances: r.achieved,
            failures: r.failures + (r.requested - r.achieved),
        });
    }
    let check = match identity {
        Identity::HighDerivative => high_derivative,
        Identity::CoefficientForms => coefficient_forms,
        Identity::HybridVsSymmetric => hybrid_vs_symmetric,
        Identity::IncompleteSymmetric => incomplete_symmetric,
        Identity::PartitionExpansion => partition_expansion,
        Identity::SetSystemExpansion => set_system_expansion,
        Identity::Vanishing => unreachable!("handled above"),
    };
    let results: Vec<bool> = (0..instances)
        .into_par_iter()
        .map(|i| check(i, &mut stream_rng(seed, tag << 32 | i)))
        .collect::<Result<_>>()?;
    Ok(IdentityOutcome {
        identity,
        instances,
        failures: results.iter().filter(|&&ok| !ok).count() as u64,
    })
}
