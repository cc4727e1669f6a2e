//! Second derivatives of a fixed cubic, the matrices `G_i` and `A_i`, and
//! the rank and common-zero bounds behind the affine-support event.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use super::{mask_of, parity, AffineSupport, SymmetricBitMatrix};
use crate::bits::BitTable;
use crate::error::{Error, Result};
use crate::field::{FieldVector, PrimeField};
use crate::functions::iterated_derivative;
use crate::mc;
use crate::polynomial::MultiIndexPolynomial;

/// Largest `2^{2N}` for the exhaustive `(y, z)` sweep.
pub const MAX_PAIR_SWEEP: u64 = 1 << 24;
/// Largest `2^N` for exhaustive `z` sweeps and common-zero counts.
pub const MAX_POINT_SWEEP: u64 = 1 << 22;
/// Limit on the work of the minor-determinant chain.
pub const MAX_CHAIN_WORK: u128 = 1 << 32;
/// Table path of [`af_membership`] is used up to this dimension.
pub const MEMBERSHIP_TABLE_DIM: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// `g(x) = sum_{i<j<k} a_{ijk} x_i x_j x_k`, held as the matrices
/// `(G_i)_{jk} = a_{ijk}` with zero diagonals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicTensor {
    g: Vec<SymmetricBitMatrix>,
}

impl CubicTensor {
    pub fn zero(dim: usize) -> Result<Self> {
        super::check_dim(dim)?;
        Ok(CubicTensor {
            g: vec![SymmetricBitMatrix::zeros(dim); dim],
        })
    }

    fn toggle(&mut self, i: usize, j: usize, k: usize) {
        for (a, b, c) in [(i, j, k), (j, i, k), (k, i, j)] {
            let v = !self.g[a].get(b, c);
            self.g[a].set(b, c, v);
        }
    }

    /// Sum of the monomials `x_i x_j x_k` for the given distinct triples.
    pub fn from_triples(dim: usize, triples: &[(usize, usize, usize)]) -> Result<Self> {
        let mut t = Self::zero(dim)?;
        for &(i, j, k) in triples {
            if i == j || j == k || i == k || i.max(j).max(k) >= dim {
                return Err(Error::Precondition(format!(
                    "({i}, {j}, {k}) is not a triple of distinct indices below {dim}"
                )));
            }
            t.toggle(i, j, k);
        }
        Ok(t)
    }

    /// Each coefficient uniform and independent.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let mut t = Self::zero(dim)?;
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    if rng.random::<bool>() {
                        t.toggle(i, j, k);
                    }
                }
            }
        }
        Ok(t)
    }

    /// The cubic part of a binary polynomial of degree at most 3.
    pub fn from_polynomial(p: &MultiIndexPolynomial) -> Result<Self> {
        if !p.field().is_binary() || p.degree().unwrap_or(0) > 3 {
            return Err(Error::Precondition(
                "a binary polynomial of degree at most 3 is required".into(),
            ));
        }
        let mut t = Self::zero(p.nvars())?;
        for (exps, _) in p.terms() {
            let vars: Vec<usize> = (0..exps.len()).filter(|&j| exps[j] > 0).collect();
            if let [i, j, k] = vars[..] {
                t.toggle(i, j, k);
            }
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn a(&self, i: usize, j: usize, k: usize) -> bool {
        i != j && self.g[i].get(j, k)
    }

    pub fn g_matrix(&self, i: usize) -> &SymmetricBitMatrix {
        &self.g[i]
    }

    pub fn to_polynomial(&self) -> MultiIndexPolynomial {
        let n = self.dim();
        let mut p = MultiIndexPolynomial::zero(PrimeField::BINARY, n);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if self.a(i, j, k) {
                        p = p
                            .add(&MultiIndexPolynomial::monomial(PrimeField::BINARY, n, &[i, j, k]).expect("valid"))
                            .expect("same space");
                    }
                }
            }
        }
        p
    }

    /// Rows of `G(z) = sum_i z_i G_i` as bitmasks.
    pub fn g_of_z(&self, z: u64) -> Vec<u64> {
        let n = self.dim();
        let mut rows = vec![0u64; n];
        for i in (0..n).filter(|&i| z >> i & 1 == 1) {
            for (r, row) in rows.iter_mut().enumerate() {
                *row ^= self.g[i].row_mask(r);
            }
        }
        rows
    }

    /// `A_i = G_i + e_i ⊗ e_i`.
    pub fn a_family(&self) -> MatrixFamily {
        let a = self
            .g
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut m = g.clone();
                m.set(i, i, true);
                m
            })
            .collect();
        MatrixFamily { a }
    }
}

/// Symmetric matrices `A_1 .. A_N` with `A_i(k, k) = δ_{ik}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFamily {
    a: Vec<SymmetricBitMatrix>,
}

impl MatrixFamily {
    pub fn new(a: Vec<SymmetricBitMatrix>) -> Result<Self> {
        let n = a.len();
        super::check_dim(n)?;
        for (i, m) in a.iter().enumerate() {
            if m.n() != n || (0..n).any(|k| m.get(k, k) != (i == k)) {
                return Err(Error::Precondition(format!(
                    "A_{i} must be {n}x{n} with diagonal e_{i}"
                )));
            }
        }
        Ok(MatrixFamily { a })
    }

    /// Off-diagonal entries uniform and independent.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        super::check_dim(dim)?;
        let a = (0..dim)
            .map(|i| {
                let mut m = SymmetricBitMatrix::zeros(dim);
                m.set(i, i, true);
                for r in 0..dim {
                    for c in r + 1..dim {
                        m.set(r, c, rng.random());
                    }
                }
                m
            })
            .collect();
        Ok(MatrixFamily { a })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self, i: usize) -> &SymmetricBitMatrix {
        &self.a[i]
    }

    fn row_masks(&self, i: usize) -> Vec<u64> {
        (0..self.dim()).map(|r| self.a[i].row_mask(r)).collect()
    }

    /// Rows of `A(z) = sum_i z_i A_i`.
    pub fn a_of_z(&self, z: u64) -> Vec<u64> {
        let mut rows = vec![0u64; self.dim()];
        for i in (0..self.dim()).filter(|&i| z >> i & 1 == 1) {
            for (r, row) in rows.iter_mut().enumerate() {
                *row ^= self.a[i].row_mask(r);
            }
        }
        rows
    }
}

fn rank_of_rows(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for r in 0..rows.len() {
        let v = rows[r];
        if v == 0 {
            continue;
        }
        rank += 1;
        let low = v & v.wrapping_neg();
        for row in &mut rows[r + 1..] {
            if *row & low != 0 {
                *row ^= v;
            }
        }
    }
    rank
}

fn mat_vec(rows: &[u64], y: u64) -> u64 {
    rows.iter()
        .enumerate()
        .fold(0, |acc, (r, &row)| acc | u64::from(parity(row & y)) << r)
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AfMembership {
    /// `v_{y,z} = G(z) y`.
    pub v: FieldVector,
    /// Linear coefficients of the tabulated second derivative, for small `N`.
    pub v_from_table: Option<FieldVector>,
    pub agree: bool,
    /// Whether `v` lies in `yz + span(y, z, 1)`.
    pub member: bool,
}

pub fn af_membership(g: &CubicTensor, y: &FieldVector, z: &FieldVector) -> Result<AfMembership> {
    let n = g.dim();
    if y.len() != n || z.len() != n {
        return Err(Error::DimensionMismatch(
            "directions must match the tensor dimension".into(),
        ));
    }
    let (ym, zm) = (mask_of(y)?, mask_of(z)?);
    let v = FieldVector::from_mask(n, mat_vec(&g.g_of_z(zm), ym));
    let v_from_table = if n <= MEMBERSHIP_TABLE_DIM {
        let f = crate::functions::FiniteFunction::from_bit_table(&g.to_polynomial().bit_table()?);
        let d = iterated_derivative(&f, &[y.clone(), z.clone()])?;
        let mut m = 0u64;
        for i in 0..n {
            m |= u64::from(d.multilinear_coefficient(&[i])?) << i;
        }
        Some(FieldVector::from_mask(n, m))
    } else {
        None
    };
    let agree = v_from_table.as_ref().is_none_or(|t| *t == v);
    let member = AffineSupport::new(y, z)?.contains(&v)?;
    Ok(AfMembership {
        v,
        v_from_table,
        agree,
        member,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AfEventReport {
    pub dim: usize,
    pub pairs: u64,
    /// Count of `A(z) y = a y + b z + c 1`, indexed by the bits `(a, b, c)`.
    pub counts: [u64; 8],
    pub max_frequency: f64,
    pub worst_offset: usize,
    /// Standard error of the worst frequency; zero when exhaustive.
    pub std_error: f64,
    /// `(3/4)^N`.
    pub bound: f64,
    /// Exhaustive: `max count <= 3^N` exactly. Sampled: within three
    /// standard errors of the bound.
    pub holds: bool,
    pub exhaustive: bool,
}

fn offsets(y: u64, z: u64, ones: u64) -> [u64; 8] {
    std::array::from_fn(
        |c| if c & 1 == 1 { y } else { 0 } ^ if c & 2 == 2 { z } else { 0 } ^ if c & 4 == 4 { ones } else { 0 },
    )
}

fn tally(counts: &mut [u64; 8], r: u64, y: u64, z: u64, ones: u64) {
    for (c, u) in offsets(y, z, ones).iter().enumerate() {
        counts[c] += u64::from(r == *u);
    }
}

/// Frequency of `A(z) y = u` over uniform `(y, z)` for each of the eight
/// `u ∈ span(y, z, 1)`, against `(3/4)^N`.
pub fn af_event_estimate(g: &CubicTensor, mode: SweepMode) -> Result<AfEventReport> {
    let n = g.dim();
    let fam = g.a_family();
    let ones = full_mask(n);
    let (counts, pairs) = match mode {
        SweepMode::Exhaustive => {
            if 2 * n > 24 {
                return Err(Error::too_large(
                    format!("exhaustive sweep over 2^{} pairs", 2 * n),
                    MAX_PAIR_SWEEP,
                ));
            }
            let per_z: Vec<[u64; 8]> = (0..1u64 << n)
                .into_par_iter()
                .map(|z| {
                    let rows = fam.a_of_z(z);
                    let mut counts = [0u64; 8];
                    let (mut y, mut r) = (0u64, 0u64);
                    tally(&mut counts, r, y, z, ones);
                    for step in 1..1u64 << n {
                        let k = step.trailing_zeros() as usize;
                        y ^= 1 << k;
                        r ^= rows[k];
                        tally(&mut counts, r, y, z, ones);
                    }
                    counts
                })
                .collect();
            (sum_counts(&per_z), 1u64 << (2 * n))
        }
        SweepMode::Sampled { samples, seed } => {
            let shards = mc::run_sharded(samples, seed, |rng, count| {
                let mut counts = [0u64; 8];
                for _ in 0..count {
                    let y = rng.random::<u64>() & ones;
                    let z = rng.random::<u64>() & ones;
                    tally(&mut counts, mat_vec(&fam.a_of_z(z), y), y, z, ones);
                }
                counts
            });
            (sum_counts(&shards), samples)
        }
    };
    let exhaustive = mode == SweepMode::Exhaustive;
    let (worst_offset, &worst) = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("eight offsets");
    let max_frequency = worst as f64 / pairs.max(1) as f64;
    let bound = 0.75f64.powi(n as i32);
    let std_error = if exhaustive {
        0.0
    } else {
        (max_frequency * (1.0 - max_frequency) / pairs.max(1) as f64).sqrt()
    };
    let holds = if exhaustive {
        u128::from(worst) <= 3u128.pow(n as u32)
    } else {
        max_frequency <= bound + 3.0 * std_error
    };
    Ok(AfEventReport {
        dim: n,
        pairs,
        counts,
        max_frequency,
        worst_offset,
        std_error,
        bound,
        holds,
        exhaustive,
    })
}

fn sum_counts(parts: &[[u64; 8]]) -> [u64; 8] {
    parts.iter().fold([0; 8], |mut acc, c| {
        for (a, b) in acc.iter_mut().zip(c) {
            *a += b;
        }
        acc
    })
}

fn binomial_tail(n: usize, k: usize) -> u128 {
    (0..k.min(n + 1)).map(|i| super::binomial(n, i)).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankTailReport {
    pub dim: usize,
    pub k: usize,
    pub points: u64,
    /// Points with `rank(A(z) + C) <= k - 1`.
    pub low_rank: u64,
    pub frequency: f64,
    /// `2^{-N} sum_{i<k} C(N, i)`.
    pub bound: f64,
    pub std_error: f64,
    /// Mean of `2^{-rank(A(z) + C)}`.
    pub mean_two_pow_neg_rank: f64,
    pub holds: bool,
    pub exhaustive: bool,
}

/// Rank of `A(z) + C` for every `z` in a Gray-code sweep, sharded by the top
/// bits of `z`; the callback sees `(z, rank)`.
fn sweep_ranks<T: Send>(
    fam: &MatrixFamily,
    c: &[u64],
    fold: impl Fn(&mut T, u64, &[u64]) + Sync,
    init: impl Fn() -> T + Sync,
) -> Vec<T> {
    let n = fam.dim();
    let high = n.min(6);
    let low = n - high;
    let family: Vec<Vec<u64>> = (0..n).map(|i| fam.row_masks(i)).collect();
    (0..1u64 << high)
        .into_par_iter()
        .map(|shard| {
            let mut acc = init();
            let mut z = shard << low;
            let mut rows: Vec<u64> = c.to_vec();
            for i in (0..n).filter(|&i| z >> i & 1 == 1) {
                for (r, row) in rows.iter_mut().enumerate() {
                    *row ^= family[i][r];
                }
            }
            fold(&mut acc, z, &rows);
            for step in 1..1u64 << low {
                let i = step.trailing_zeros() as usize;
                z ^= 1 << i;
                for (r, row) in rows.iter_mut().enumerate() {
                    *row ^= family[i][r];
                }
                fold(&mut acc, z, &rows);
            }
            acc
        })
        .collect()
}

pub fn rank_tail_check(
    fam: &MatrixFamily,
    c: &SymmetricBitMatrix,
    k: usize,
    mode: SweepMode,
) -> Result<RankTailReport> {
    let n = fam.dim();
    if c.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{}, family has N = {n}",
            c.n(),
            c.n()
        )));
    }
    let c_rows: Vec<u64> = (0..n).map(|r| c.row_mask(r)).collect();
    let (points, low_rank, weight) = match mode {
        SweepMode::Exhaustive => {
            if n > 22 {
                return Err(Error::too_large(
                    format!("exhaustive sweep over 2^{n} points"),
                    MAX_POINT_SWEEP,
                ));
            }
            let parts = sweep_ranks(
                fam,
                &c_rows,
                |acc: &mut (u64, f64), _, rows| {
                    let r = rank_of_rows(rows.to_vec());
                    acc.0 += u64::from(r < k);
                    acc.1 += 2f64.powi(-(r as i32));
                },
                || (0u64, 0.0f64),
            );
            let (low, w) = parts.iter().fold((0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
            (1u64 << n, low, w)
        }
        SweepMode::Sampled { samples, seed } => {
            let ones = full_mask(n);
            let parts = mc::run_sharded(samples, seed, |rng, count| {
                let mut acc = (0u64, 0.0f64);
                for _ in 0..count {
                    let z = rng.random::<u64>() & ones;
                    let rows: Vec<u64> = fam.a_of_z(z).iter().zip(&c_rows).map(|(a, b)| a ^ b).collect();
                    let r = rank_of_rows(rows);
                    acc.0 += u64::from(r < k);
                    acc.1 += 2f64.powi(-(r as i32));
                }
                acc
            });
            let (low, w) = parts.iter().fold((0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
            (samples, low, w)
        }
    };
    let exhaustive = mode == SweepMode::Exhaustive;
    let tail = binomial_tail(n, k);
    let bound = tail as f64 / 2f64.powi(n as i32);
    let frequency = low_rank as f64 / points.max(1) as f64;
    let std_error = if exhaustive {
        0.0
    } else {
        (frequency * (1.0 - frequency) / points.max(1) as f64).sqrt()
    };
    let holds = if exhaustive {
        u128::from(low_rank) <= tail
    } else {
        frequency <= bound + 3.0 * std_error
    };
    Ok(RankTailReport {
        dim: n,
        k,
        points,
        low_rank,
        frequency,
        bound,
        std_error,
        mean_two_pow_neg_rank: weight / points.max(1) as f64,
        holds,
        exhaustive,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonZeroReport {
    pub dim: usize,
    pub k: usize,
    pub family_size: u128,
    pub common_zeros: u64,
    /// `sum_{j<k} C(N, j)`.
    pub bound: u128,
    pub holds: bool,
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Counts the common zeros of `f_I = prod_{i in I} x_i + p_I` over all
/// `k`-subsets `I` (absent subsets have `p_I = 0`) and compares with
/// `sum_{j<k} C(N, j)`.
pub fn common_zero_bound_check(
    perturbations: &BTreeMap<Vec<usize>, MultiIndexPolynomial>,
    dim: usize,
    k: usize,
) -> Result<CommonZeroReport> {
    if dim > 22 {
        return Err(Error::too_large(
            format!("common zeros over 2^{dim} points"),
            MAX_POINT_SWEEP,
        ));
    }
    let family_size = super::binomial(dim, k);
    let words = ((1u128 << dim) / 64).max(1);
    if family_size * words > MAX_CHAIN_WORK {
        return Err(Error::too_large(
            format!("common zeros of C({dim}, {k}) polynomials"),
            MAX_CHAIN_WORK,
        ));
    }
    for (set, p) in perturbations {
        if set.len() != k || set.windows(2).any(|w| w[0] >= w[1]) || set.iter().any(|&i| i >= dim) {
            return Err(Error::Precondition(format!(
                "{set:?} is not a sorted {k}-subset of 0..{dim}"
            )));
        }
        if !p.field().is_binary() || p.nvars() != dim {
            return Err(Error::DimensionMismatch(
                "perturbations must be binary polynomials in N variables".into(),
            ));
        }
        if p.degree().is_some_and(|d| d + 1 > k) {
            return Err(Error::Precondition(format!(
                "perturbation of {set:?} has degree above {}",
                k.saturating_sub(1)
            )));
        }
    }
    let perturbation_tables: BTreeMap<&Vec<usize>, BitTable> = perturbations
        .iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(s, p)| Ok((s, p.bit_table()?)))
        .collect::<Result<_>>()?;
    let nonzero = k_subsets(dim, k)
        .into_par_iter()
        .map(|set| {
            let vars = set.iter().fold(0usize, |m, &i| m | 1 << i);
            let mut t = BitTable::from_fn(dim, |x| x & vars == vars);
            if let Some(p) = perturbation_tables.get(&set) {
                t.xor_assign(p);
            }
            t.words().to_vec()
        })
        .reduce(
            || vec![0u64; words as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x |= y;
                }
                a
            },
        );
    let points = 1u64 << dim;
    let nonzero_count: u64 = nonzero
        .iter()
        .map(|w| u64::from(w.count_ones()))
        .sum::<u64>()
        .min(points);
    let common_zeros = points - nonzero_count;
    let bound = binomial_tail(dim, k);
    Ok(CommonZeroReport {
        dim,
        k,
        family_size,
        common_zeros,
        bound,
        holds: u128::from(common_zeros) <= bound,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantChainReport {
    pub dim: usize,
    pub k: usize,
    /// Every minor determinant `f_I(z)` equals `prod_{i in I} z_i` plus terms
    /// of degree below `k`.
    pub leading_terms_ok: bool,
    /// Common-zero count of the determinant family, when the degree condition holds.
    pub common: Option<CommonZeroReport>,
    /// Points with `rank(A(z) + C) < k`, counted directly.
    pub low_rank: u64,
    /// Every low-rank point is a common zero of the family. The converse
    /// can fail: an alternating block has vanishing odd principal minors.
    pub low_rank_within_zeros: bool,
}

/// Builds `f_I(z) = det (A(z) + C)_{I×I}` for every `k`-subset `I`, checks
/// its leading term, and feeds the family to [`common_zero_bound_check`].
pub fn minor_determinant_chain(fam: &MatrixFamily, c: &SymmetricBitMatrix, k: usize) -> Result<DeterminantChainReport> {
    let n = fam.dim();
    if c.n() != n {
        return Err(Error::DimensionMismatch("C must match the family dimension".into()));
    }
    let subsets = k_subsets(n, k);
    if n > 22 || (subsets.len() as u128) << n > MAX_CHAIN_WORK {
        return Err(Error::too_large(
            format!("determinant chain with N = {n}, k = {k}"),
            MAX_CHAIN_WORK,
        ));
    }
    let c_rows: Vec<u64> = (0..n).map(|r| c.row_mask(r)).collect();
    let masks: Vec<u64> = subsets
        .iter()
        .map(|s| s.iter().fold(0u64, |m, &i| m | 1 << i))
        .collect();
    let parts = sweep_ranks(
        fam,
        &c_rows,
        |acc: &mut (Vec<(u64, Vec<u64>)>, u64, bool), z, rows| {
            let dets: Vec<u64> = masks
                .iter()
                .map(|&m| {
                    let minor: Vec<u64> = (0..n)
                        .filter(|&r| m >> r & 1 == 1)
                        .map(|r| compress(rows[r], m))
                        .collect();
                    u64::from(rank_of_rows(minor) == k)
                })
                .collect();
            let low = rank_of_rows(rows.to_vec()) < k;
            acc.1 += u64::from(low);
            acc.2 &= !low || dets.iter().all(|&d| d == 0);
            acc.0.push((z, dets));
        },
        || (Vec::new(), 0u64, true),
    );
    let mut tables: Vec<BitTable> = vec![BitTable::zeros(n); subsets.len()];
    let mut low_rank = 0;
    let mut within = true;
    for (values, low, inside) in parts {
        low_rank += low;
        within &= inside;
        for (z, dets) in values {
            for (t, &d) in tables.iter_mut().zip(&dets) {
                if d == 1 {
                    t.set(z as usize, true);
                }
            }
        }
    }
    let mut perturbations = BTreeMap::new();
    let mut leading_terms_ok = true;
    for (set, t) in subsets.iter().zip(&tables) {
        let f = MultiIndexPolynomial::from_bit_table(t);
        let lead = MultiIndexPolynomial::monomial(PrimeField::BINARY, n, set)?;
        let rest = f.sub(&lead)?;
        if rest.degree().is_some_and(|d| d + 1 > k) {
            leading_terms_ok = false;
        }
        perturbations.insert(set.clone(), rest);
    }
    let common = if leading_terms_ok {
        Some(common_zero_bound_check(&perturbations, n, k)?)
    } else {
        None
    };
    let low_rank_within_zeros = within && common.as_ref().is_some_and(|r| r.common_zeros >= low_rank);
    Ok(DeterminantChainReport {
        dim: n,
        k,
        leading_terms_ok,
        common,
        low_rank,
        low_rank_within_zeros,
    })
}

/// Keeps the bits of `row` selected by `mask`, packed to the bottom.
fn compress(row: u64, mask: u64) -> u64 {
    let (mut out, mut bit, mut m) = (0u64, 0, mask);
    while m != 0 {
        let i = m.trailing_zeros();
        out |= (row >> i & 1) << bit;
        bit += 1;
        m &= m - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::BitMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(n: usize, i: usize) -> FieldVector {
        FieldVector::unit(PrimeField::BINARY, n, i)
    }

    #[test]
    fn tensor_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let n = rng.random_range(3..=12);
            let t = CubicTensor::random(n, &mut rng).unwrap();
            for i in 0..n {
                assert!(t.g_matrix(i).has_zero_diagonal());
                for j in 0..n {
                    for k in 0..n {
                        if i != j && j != k && i != k {
                            let v = t.g_matrix(i).get(j, k);
                            assert_eq!(v, t.g_matrix(j).get(i, k));
                            assert_eq!(v, t.g_matrix(k).get(i, j));
                            assert_eq!(v, t.g_matrix(i).get(k, j));
                        }
                    }
                }
            }
            assert_eq!(CubicTensor::from_polynomial(&t.to_polynomial()).unwrap(), t);
        }
    }

    #[test]
    fn membership_examples() {
        let zero = CubicTensor::zero(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let y = FieldVector::random(PrimeField::BINARY, 5, &mut rng);
            let z = FieldVector::random(PrimeField::BINARY, 5, &mut rng);
            let m = af_membership(&zero, &y, &z).unwrap();
            assert!(m.v.is_zero() && m.agree);
            let af = AffineSupport::new(&y, &z).unwrap();
            assert_eq!(m.member, af.points().contains(&0));
        }
        let t = CubicTensor::from_triples(4, &[(0, 1, 2)]).unwrap();
        let m = af_membership(&t, &e(4, 0), &e(4, 1)).unwrap();
        assert_eq!(m.v, e(4, 2));
        assert!(m.agree);

        for _ in 0..50 {
            let g = CubicTensor::random(8, &mut rng).unwrap();
            let y = FieldVector::random(PrimeField::BINARY, 8, &mut rng);
            let z = FieldVector::random(PrimeField::BINARY, 8, &mut rng);
            let m = af_membership(&g, &y, &z).unwrap();
            assert!(m.agree && m.v_from_table.is_some());
            for i in 0..8 {
                let gi = g.g_matrix(i).matrix().mul_vec(&z).unwrap();
                assert_eq!(m.v.get(i), y.dot(&gi).unwrap());
            }
        }
    }

    #[test]
    fn af_event_bounds() {
        let zero = CubicTensor::zero(6).unwrap();
        let r = af_event_estimate(&zero, SweepMode::Exhaustive).unwrap();
        assert_eq!(r.counts[0b111], 3u64.pow(6));
        assert_eq!(r.counts[0b100], 1);
        assert_eq!(r.counts[0b011], 1);
        assert!(r.holds);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = CubicTensor::random(8, &mut rng).unwrap();
        let r = af_event_estimate(&g, SweepMode::Exhaustive).unwrap();
        assert_eq!(r.pairs, 1 << 16);
        assert!(r.holds && r.max_frequency <= 0.75f64.powi(8));
        assert!(matches!(
            af_event_estimate(&CubicTensor::zero(13).unwrap(), SweepMode::Exhaustive),
            Err(Error::TooLarge { .. })
        ));

        let g16 = CubicTensor::random(16, &mut rng).unwrap();
        let mode = SweepMode::Sampled {
            samples: 200_000,
            seed: 4,
        };
        let s = af_event_estimate(&g16, mode).unwrap();
        assert!(s.holds);
        assert_eq!(s, af_event_estimate(&g16, mode).unwrap());
    }

    #[test]
    fn rank_tail_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam = CubicTensor::random(10, &mut rng).unwrap().a_family();
        let id = SymmetricBitMatrix::identity(10);
        let r = rank_tail_check(&fam, &id, 5, SweepMode::Exhaustive).unwrap();
        assert!(r.holds);
        assert_eq!(r.bound, (1 + 10 + 45 + 120 + 210) as f64 / 1024.0);
        assert!(r.mean_two_pow_neg_rank <= 0.75f64.powi(10));

        let all = rank_tail_check(&fam, &id, 11, SweepMode::Exhaustive).unwrap();
        assert_eq!((all.frequency, all.bound), (1.0, 1.0));
        let one = rank_tail_check(&fam, &id, 1, SweepMode::Exhaustive).unwrap();
        assert!(one.low_rank <= 1 && one.holds);

        let zero = SymmetricBitMatrix::zeros(10);
        let r0 = rank_tail_check(&fam, &zero, 1, SweepMode::Exhaustive).unwrap();
        assert_eq!(r0.low_rank, 1);

        let random = MatrixFamily::random(12, &mut rng).unwrap();
        for k in 0..=13 {
            assert!(
                rank_tail_check(&random, &SymmetricBitMatrix::identity(12), k, SweepMode::Exhaustive)
                    .unwrap()
                    .holds
            );
        }
        let s = rank_tail_check(
            &random,
            &zero_of(12),
            6,
            SweepMode::Sampled {
                samples: 20_000,
                seed: 1,
            },
        )
        .unwrap();
        assert!(s.holds);
    }

    fn zero_of(n: usize) -> SymmetricBitMatrix {
        SymmetricBitMatrix::zeros(n)
    }

    #[test]
    fn sweep_matches_direct_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let fam = MatrixFamily::random(8, &mut rng).unwrap();
        let c = SymmetricBitMatrix::identity(8);
        let r = rank_tail_check(&fam, &c, 4, SweepMode::Exhaustive).unwrap();
        let direct = (0..256u64)
            .filter(|&z| {
                let mut m = BitMatrix::zeros(8, 8);
                for i in 0..8 {
                    if z >> i & 1 == 1 {
                        m.xor_assign(fam.matrix(i).matrix());
                    }
                }
                m.xor_assign(c.matrix());
                m.rank() < 4
            })
            .count() as u64;
        assert_eq!(r.low_rank, direct);
    }

    #[test]
    fn family_validation() {
        let bad = vec![SymmetricBitMatrix::zeros(2), SymmetricBitMatrix::zeros(2)];
        assert!(MatrixFamily::new(bad).is_err());
        let fam = CubicTensor::zero(3).unwrap().a_family();
        assert_eq!(
            MatrixFamily::new((0..3).map(|i| fam.matrix(i).clone()).collect()).unwrap(),
            fam
        );
    }

    #[test]
    fn common_zero_examples() {
        let none = BTreeMap::new();
        let r = common_zero_bound_check(&none, 5, 1).unwrap();
        assert_eq!((r.common_zeros, r.bound), (1, 1));
        let r = common_zero_bound_check(&none, 10, 3).unwrap();
        assert_eq!((r.common_zeros, r.bound, r.holds), (56, 56, true));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut pert = BTreeMap::new();
            for s in k_subsets(6, 2) {
                pert.insert(s, MultiIndexPolynomial::random(PrimeField::BINARY, 6, 1, &mut rng));
            }
            let r = common_zero_bound_check(&pert, 6, 2).unwrap();
            assert!(r.holds && r.common_zeros <= 7);
        }
        let mut bad = BTreeMap::new();
        bad.insert(
            vec![0, 1],
            MultiIndexPolynomial::monomial(PrimeField::BINARY, 4, &[2, 3]).unwrap(),
        );
        assert!(matches!(
            common_zero_bound_check(&bad, 4, 2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn determinant_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (n, k) in [(6, 2), (6, 3), (8, 4), (10, 5)] {
            let fam = CubicTensor::random(n, &mut rng).unwrap().a_family();
            for c in [SymmetricBitMatrix::identity(n), SymmetricBitMatrix::zeros(n)] {
                let r = minor_determinant_chain(&fam, &c, k).unwrap();
                assert!(r.leading_terms_ok && r.low_rank_within_zeros, "{r:?}");
                assert!(r.common.unwrap().holds);
                let tail = rank_tail_check(&fam, &c, k, SweepMode::Exhaustive).unwrap();
                assert_eq!(tail.low_rank, r.low_rank);
            }
        }
        // rank 2 with every diagonal entry zero
        let mut j = SymmetricBitMatrix::zeros(2);
        j.set(0, 1, true);
        let fam = MatrixFamily::new(vec![
            {
                let mut m = SymmetricBitMatrix::identity(2);
                m.set(1, 1, false);
                m
            },
            {
                let mut m = SymmetricBitMatrix::identity(2);
                m.set(0, 0, false);
                m
            },
        ])
        .unwrap();
        let r = minor_determinant_chain(&fam, &j, 1).unwrap();
        assert_eq!((r.low_rank, r.common.unwrap().common_zeros), (0, 1));
        assert!(r.low_rank_within_zeros);
    }

    #[test]
    fn subsets_enumerate_in_order() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(k_subsets(2, 3).is_empty());
        assert_eq!(k_subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }
}
