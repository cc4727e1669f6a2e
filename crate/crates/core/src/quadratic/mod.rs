//! Quadratic forms over F_2: the second derivatives of `S_4`, their Fourier
//! structure, and the rank arguments for cubic polynomials.

mod bitmatrix;
mod cubic;

pub use bitmatrix::{gf2_rank, BitMatrix, SymmetricBitMatrix};
pub use cubic::{
    af_event_estimate, af_membership, common_zero_bound_check, minor_determinant_chain, rank_tail_check, AfEventReport,
    AfMembership, CommonZeroReport, CubicTensor, DeterminantChainReport, MatrixFamily, RankTailReport, SweepMode,
};

use rand::Rng;

use crate::bits::BitTable;
use crate::error::{Error, Result};
use crate::field::{lucas_binomial, FieldVector, PrimeField};
use crate::functions::{walsh_hadamard, FiniteFunction};
use crate::gowers::{root, DyadicRational, GowersEstimate};

/// Largest dimension handled by the dense spectrum check.
pub const DIXON_MAX_DIM: usize = 24;

/// `Q(x) = sum_{i<j} q_{ij} x_i x_j + sum_i l_i x_i + c` over F_2, `N <= 64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    q: SymmetricBitMatrix,
    linear: u64,
    constant: bool,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > 64 {
        return Err(Error::too_large(format!("quadratic form in {dim} variables"), 64));
    }
    Ok(())
}

fn mask_of(v: &FieldVector) -> Result<u64> {
    v.mask()
        .ok_or_else(|| Error::Unsupported("binary vectors of length at most 64 are required".into()))
}

fn parity(v: u64) -> bool {
    v.count_ones() & 1 == 1
}

impl QuadraticForm {
    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(QuadraticForm {
            q: SymmetricBitMatrix::zeros(dim),
            linear: 0,
            constant: false,
        })
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let mut f = Self::zero(dim)?;
        for i in 0..dim {
            for j in i + 1..dim {
                f.q.set(i, j, rng.random());
            }
        }
        f.linear = if dim == 64 {
            rng.random()
        } else {
            rng.random::<u64>() & ((1 << dim) - 1)
        };
        f.constant = rng.random();
        Ok(f)
    }

    /// Reads the form off the algebraic normal form of `f`.
    pub fn from_function(f: &FiniteFunction) -> Result<Self> {
        let mut anf = f.bit_table()?;
        anf.moebius();
        let mut out = Self::zero(f.dim())?;
        for m in 0..anf.len() {
            if !anf.get(m) {
                continue;
            }
            let vars: Vec<usize> = (0..f.dim()).filter(|&j| m >> j & 1 == 1).collect();
            match vars[..] {
                [] => out.constant = true,
                [i] => out.linear |= 1 << i,
                [i, j] => out.q.set(i, j, true),
                _ => return Err(Error::Precondition("function has degree above 2".into())),
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.q.n()
    }

    /// `q_{ij}`; requires `i != j`.
    pub fn q(&self, i: usize, j: usize) -> bool {
        assert_ne!(i, j, "quadratic coefficients have distinct indices");
        self.q.get(i, j)
    }

    pub fn set_q(&mut self, i: usize, j: usize, v: bool) {
        assert_ne!(i, j, "quadratic coefficients have distinct indices");
        self.q.set(i, j, v);
    }

    pub fn linear(&self, i: usize) -> bool {
        self.linear >> i & 1 == 1
    }

    pub fn linear_mask(&self) -> u64 {
        self.linear
    }

    pub fn set_linear(&mut self, i: usize, v: bool) {
        self.linear = self.linear & !(1 << i) | u64::from(v) << i;
    }

    pub fn constant(&self) -> bool {
        self.constant
    }

    pub fn set_constant(&mut self, v: bool) {
        self.constant = v;
    }

    pub fn is_linear(&self) -> bool {
        (0..self.dim()).all(|i| self.q.row_mask(i) == 0)
    }

    pub fn eval_mask(&self, x: u64) -> bool {
        let mut v = self.constant ^ parity(self.linear & x);
        let mut rest = x;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            v ^= parity(self.q.row_mask(i) & rest);
        }
        v
    }

    pub fn bit_table(&self) -> Result<BitTable> {
        if self.dim() > DIXON_MAX_DIM {
            return Err(Error::too_large(
                format!("truth table in {} variables", self.dim()),
                DIXON_MAX_DIM,
            ));
        }
        Ok(BitTable::from_fn(self.dim(), |x| self.eval_mask(x as u64)))
    }

    pub fn to_function(&self) -> Result<FiniteFunction> {
        Ok(FiniteFunction::from_bit_table(&self.bit_table()?))
    }
}

/// The symmetric zero-diagonal matrix of the quadratic part.
pub fn b_matrix(q: &QuadraticForm) -> SymmetricBitMatrix {
    q.q.clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct PairData {
    y: u64,
    z: u64,
    wy: bool,
    wz: bool,
    s2y: bool,
    s2z: bool,
    yz: bool,
    /// `S(y,z) = <y,1><z,1> + <y,z>`.
    syz: bool,
}

fn pair_data(y: &FieldVector, z: &FieldVector) -> Result<PairData> {
    if y.len() != z.len() {
        return Err(Error::DimensionMismatch("directions of different lengths".into()));
    }
    if !y.field().is_binary() || !z.field().is_binary() {
        return Err(Error::Unsupported(
            "second derivatives of S_4 are implemented only for p = 2".into(),
        ));
    }
    let (ym, zm) = (mask_of(y)?, mask_of(z)?);
    let s2 = |m: u64| lucas_binomial(u64::from(m.count_ones()), 2, PrimeField::BINARY) == 1;
    let (wy, wz, yz) = (parity(ym), parity(zm), parity(ym & zm));
    Ok(PairData {
        y: ym,
        z: zm,
        wy,
        wz,
        s2y: s2(ym),
        s2z: s2(zm),
        yz,
        syz: (wy & wz) ^ yz,
    })
}

/// `S(y,z) = <y,1><z,1> + <y,z>`, the polarization of `S_2`.
pub fn s_bilinear(y: &FieldVector, z: &FieldVector) -> Result<bool> {
    Ok(pair_data(y, z)?.syz)
}

/// The second derivative `(S_4)_{y,z}` in closed form.
pub fn second_derivative_s4(y: &FieldVector, z: &FieldVector) -> Result<QuadraticForm> {
    let d = pair_data(y, z)?;
    let n = y.len();
    let mut out = QuadraticForm::zero(n)?;
    let bit = |m: u64, i: usize| m >> i & 1 == 1;
    for i in 0..n {
        for j in i + 1..n {
            let v = d.syz
                ^ (d.wy & (bit(d.z, i) ^ bit(d.z, j)))
                ^ (d.wz & (bit(d.y, i) ^ bit(d.y, j)))
                ^ (bit(d.y, i) & bit(d.z, j))
                ^ (bit(d.y, j) & bit(d.z, i));
            out.q.set(i, j, v);
        }
    }
    let cy = d.syz ^ d.s2z ^ d.wz;
    let cz = d.syz ^ d.s2y ^ d.wy;
    let c1 = (d.s2y & d.wz) ^ (d.s2z & d.wy) ^ (d.yz & (d.wy ^ d.wz));
    out.linear = linear_combination(n, d.y, d.z, cy, cz, c1);
    let s4 = |m: u64| lucas_binomial(u64::from(m.count_ones()), 4, PrimeField::BINARY) == 1;
    out.constant = s4(d.y ^ d.z) ^ s4(d.y) ^ s4(d.z);
    Ok(out)
}

fn linear_combination(n: usize, y: u64, z: u64, cy: bool, cz: bool, c1: bool) -> u64 {
    let ones = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (if cy { y } else { 0 }) ^ (if cz { z } else { 0 }) ^ (if c1 { ones } else { 0 })
}

/// Linear coefficients of `(S_4)_{y,z}` in the reduced form valid when
/// `S(y,z) = 0`, as a bitmask.
pub fn s4_linear_part_reduced(y: &FieldVector, z: &FieldVector) -> Result<u64> {
    let d = pair_data(y, z)?;
    if d.syz {
        return Err(Error::Precondition("reduced linear part requires S(y,z) = 0".into()));
    }
    Ok(linear_combination(
        y.len(),
        d.y,
        d.z,
        d.s2z ^ d.wz,
        d.s2y ^ d.wy,
        (d.s2y & d.wz) ^ (d.s2z & d.wy),
    ))
}

/// `B = S(y,z) J + <y,1>(z⊗1 + 1⊗z) + <z,1>(y⊗1 + 1⊗y) + (y⊗z + z⊗y)`.
pub fn b_matrix_structural(y: &FieldVector, z: &FieldVector) -> Result<SymmetricBitMatrix> {
    let d = pair_data(y, z)?;
    let n = y.len();
    let ones = FieldVector::ones(PrimeField::BINARY, n);
    let mut b = SymmetricBitMatrix::zeros(n);
    if d.syz {
        b.xor_assign(&SymmetricBitMatrix::all_ones_off_diagonal(n));
    }
    if d.wy {
        b.xor_assign(&SymmetricBitMatrix::symmetric_outer(z, &ones)?);
    }
    if d.wz {
        b.xor_assign(&SymmetricBitMatrix::symmetric_outer(y, &ones)?);
    }
    b.xor_assign(&SymmetricBitMatrix::symmetric_outer(y, z)?);
    Ok(b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DixonReport {
    pub rank: usize,
    pub h: usize,
    /// Frequencies with nonzero Fourier coefficient, ascending, as bitmasks.
    pub support: Vec<u64>,
    /// Common modulus of the nonzero coefficients, or `None` if they differ.
    pub magnitude: Option<f64>,
    /// Dimension of the affine hull of the support.
    pub affine_dim: usize,
    pub pass: bool,
}

/// Checks that `(-1)^Q` has exactly `2^{2h}` nonzero Fourier coefficients,
/// all of modulus `2^{-h}`, filling an affine subspace of dimension `2h`,
/// where `2h` is the rank of the quadratic part.
pub fn dixon_spectrum_check(q: &QuadraticForm) -> Result<DixonReport> {
    let n = q.dim();
    let table = q.bit_table()?;
    let mut w: Vec<i64> = (0..table.len()).map(|x| if table.get(x) { -1 } else { 1 }).collect();
    walsh_hadamard(&mut w);
    let rank = b_matrix(q).rank();
    let h = rank / 2;
    let support: Vec<u64> = (0..w.len()).filter(|&a| w[a] != 0).map(|a| a as u64).collect();
    let first = w[support[0] as usize].unsigned_abs();
    let uniform = support.iter().all(|&a| w[a as usize].unsigned_abs() == first);
    let magnitude = uniform.then(|| first as f64 / (1u64 << n) as f64);
    let affine_dim = span_dim(support.iter().map(|&a| a ^ support[0]));
    let pass = rank.is_multiple_of(2)
        && support.len() as u64 == 1 << rank
        && uniform
        && first == 1 << (n - h)
        && affine_dim == rank;
    Ok(DixonReport {
        rank,
        h,
        support,
        magnitude,
        affine_dim,
        pass,
    })
}

fn span_dim(vectors: impl Iterator<Item = u64>) -> usize {
    let mut basis = [0u64; 64];
    let mut dim = 0;
    for mut v in vectors {
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                dim += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    dim
}

/// `yz + span(y, z, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSupport {
    pub offset: FieldVector,
    pub basis: [FieldVector; 3],
}

impl AffineSupport {
    pub fn new(y: &FieldVector, z: &FieldVector) -> Result<Self> {
        let d = pair_data(y, z)?;
        let n = y.len();
        Ok(AffineSupport {
            offset: FieldVector::from_mask(n, d.y & d.z),
            basis: [y.clone(), z.clone(), FieldVector::ones(PrimeField::BINARY, n)],
        })
    }

    /// The eight combinations `offset + a y + b z + c 1`, indexed by the
    /// bits `(a, b, c)` of the position.
    pub fn points(&self) -> [u64; 8] {
        let [y, z, one] = self.basis.each_ref().map(|v| v.mask().expect("binary"));
        let offset = self.offset.mask().expect("binary");
        std::array::from_fn(|c| {
            offset ^ if c & 1 == 1 { y } else { 0 } ^ if c & 2 == 2 { z } else { 0 } ^ if c & 4 == 4 { one } else { 0 }
        })
    }

    pub fn contains(&self, v: &FieldVector) -> Result<bool> {
        let m = mask_of(v)?;
        Ok(v.len() == self.offset.len() && self.points().contains(&m))
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exact `||S_4||_{U^4}` over F_2^N from `||S_4||^16 = E_{y,z} 2^{-rank B(y,z)}`.
/// The rank depends only on how many coordinates carry each pattern of
/// `(y_i, z_i)`, so the expectation is a sum over those weight types.
pub fn s4_u4_rank_route(dim: usize) -> Result<GowersEstimate> {
    if !(1..=40).contains(&dim) {
        return Err(Error::too_large(format!("rank route at N = {dim}"), "1 <= N <= 40"));
    }
    let mut numerator = 0u128;
    for a in 0..=dim {
        for b in 0..=dim - a {
            for c in 0..=dim - a - b {
                let y = ((1u64 << a) - 1) | ((1u64 << c) - 1) << (a + b);
                let z = ((1u64 << b) - 1) << a | ((1u64 << c) - 1) << (a + b);
                let rank =
                    b_matrix_structural(&FieldVector::from_mask(dim, y), &FieldVector::from_mask(dim, z))?.rank();
                let count = binomial(dim, a) * binomial(dim - a, b) * binomial(dim - a - b, c);
                numerator += count << (dim - rank);
            }
        }
    }
    let exact = DyadicRational {
        numerator,
        log2_denominator: 3 * dim as u32,
    };
    let raw = exact.to_f64();
    Ok(GowersEstimate {
        order: 4,
        raw_power: raw,
        exact_raw: Some(exact),
        value: root(raw, 4),
        std_error: 0.0,
        imag_part: 0.0,
        samples: None,
    })
}
