//! The matrix functionals S, F and H.
//!
//! For an `n x N` matrix with rows `r_1 ... r_n`, each functional sums
//! `prod_i r_i(rho(i))` over one-to-one maps `rho: [n] -> [N]` ("paths"):
//!
//! * `S` over all paths (the sum of all permanental `n x n` minors),
//! * `F` over paths increasing in the row index,
//! * `H` over paths increasing within each row group.
//!
//! All three are evaluated by column sweeps; [`brute_path_oracle`] enumerates
//! paths directly and exists for testing.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldVector, PrimeField};

/// Largest row count accepted by the subset DP for `S`.
pub const MAX_S_ROWS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixFunction {
    S,
    F,
    H,
}

/// Rows grouped by multiplicity: `M[r_1^(l_1) ... r_k^(l_k)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowMatrix {
    field: PrimeField,
    dim: usize,
    groups: Vec<(FieldVector, usize)>,
}

impl RowMatrix {
    pub fn new(field: PrimeField, dim: usize, groups: Vec<(FieldVector, usize)>) -> Result<Self> {
        for (r, _) in &groups {
            if r.field() != field || r.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} over {} in a matrix over {field} with {dim} columns",
                    r.len(),
                    r.field()
                )));
            }
        }
        Ok(RowMatrix { field, dim, groups })
    }

    /// One group per row.
    pub fn from_rows(field: PrimeField, dim: usize, rows: &[FieldVector]) -> Result<Self> {
        Self::new(field, dim, rows.iter().map(|r| (r.clone(), 1)).collect())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Number of columns.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn groups(&self) -> &[(FieldVector, usize)] {
        &self.groups
    }

    /// Total number of rows.
    pub fn num_rows(&self) -> usize {
        self.groups.iter().map(|g| g.1).sum()
    }

    /// Rows with groups expanded, in order.
    pub fn flattened(&self) -> Vec<&FieldVector> {
        self.groups
            .iter()
            .flat_map(|(r, l)| std::iter::repeat_n(r, *l))
            .collect()
    }

    /// The matrix with the given columns physically removed.
    pub fn delete_columns(&self, excluded: &ColumnExclusion) -> Result<RowMatrix> {
        excluded.check(self.dim)?;
        let keep: Vec<usize> = excluded.allowed(self.dim).collect();
        let groups = self
            .groups
            .iter()
            .map(|(r, l)| {
                let vals: Vec<u32> = keep.iter().map(|&j| r.get(j)).collect();
                FieldVector::from_values(self.field, &vals).map(|v| (v, *l))
            })
            .collect::<Result<_>>()?;
        RowMatrix::new(self.field, keep.len(), groups)
    }
}

/// Excluded column indices, sorted and distinct.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ColumnExclusion {
    cols: Vec<usize>,
}

impl ColumnExclusion {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(mut cols: Vec<usize>) -> Result<Self> {
        cols.sort_unstable();
        if cols.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Precondition("duplicate excluded column".into()));
        }
        Ok(ColumnExclusion { cols })
    }

    pub fn columns(&self) -> &[usize] {
        &self.cols
    }

    pub fn contains(&self, j: usize) -> bool {
        self.cols.binary_search(&j).is_ok()
    }

    fn check(&self, dim: usize) -> Result<()> {
        match self.cols.last() {
            Some(&j) if j >= dim => Err(Error::IndexOutOfRange { index: j, limit: dim }),
            _ => Ok(()),
        }
    }

    fn allowed(&self, dim: usize) -> impl Iterator<Item = usize> + '_ {
        (0..dim).filter(move |&j| !self.contains(j))
    }
}

/// Evaluate `S`, `F` or `H` on `m` with the columns in `excluded` deleted.
pub fn eval_matrix_function(kind: MatrixFunction, m: &RowMatrix, excluded: &ColumnExclusion) -> Result<FieldElement> {
    excluded.check(m.dim)?;
    let n = m.num_rows();
    if kind == MatrixFunction::S && n > MAX_S_ROWS {
        return Err(Error::too_large(format!("S on {n} rows"), MAX_S_ROWS));
    }
    let cols: Vec<usize> = excluded.allowed(m.dim).collect();
    if n > cols.len() {
        return Ok(0);
    }
    Ok(match kind {
        MatrixFunction::S => eval_s(m, &cols),
        MatrixFunction::F => eval_f(m, &cols),
        MatrixFunction::H => eval_h(m, &cols),
    })
}

fn eval_f(m: &RowMatrix, cols: &[usize]) -> FieldElement {
    let p = u64::from(m.field.p());
    let rows = m.flattened();
    let n = rows.len();
    let mut dp = vec![0u64; n + 1];
    dp[0] = 1;
    for &j in cols {
        for i in (1..=n).rev() {
            let v = u64::from(rows[i - 1].get(j));
            if v != 0 {
                dp[i] = (dp[i] + dp[i - 1] * v) % p;
            }
        }
    }
    dp[n] as FieldElement
}

fn eval_h(m: &RowMatrix, cols: &[usize]) -> FieldElement {
    let p = u64::from(m.field.p());
    let groups: Vec<(&FieldVector, usize)> = m.groups.iter().filter(|g| g.1 > 0).map(|(r, l)| (r, *l)).collect();
    let mut strides = Vec::with_capacity(groups.len());
    let mut size = 1usize;
    for (_, l) in &groups {
        strides.push(size);
        size *= l + 1;
    }
    let mut dp = vec![0u64; size];
    dp[0] = 1;
    let mut vals = vec![0u64; groups.len()];
    for &j in cols {
        for (v, (r, _)) in vals.iter_mut().zip(&groups) {
            *v = u64::from(r.get(j));
        }
        for s in (1..size).rev() {
            let mut acc = dp[s];
            for (t, (_, l)) in groups.iter().enumerate() {
                let count = (s / strides[t]) % (l + 1);
                if count > 0 && vals[t] != 0 {
                    acc += dp[s - strides[t]] * vals[t];
                }
            }
            dp[s] = acc % p;
        }
    }
    dp[size - 1] as FieldElement
}

fn eval_s(m: &RowMatrix, cols: &[usize]) -> FieldElement {
    let p = u64::from(m.field.p());
    let rows = m.flattened();
    let n = rows.len();
    let mut dp = vec![0u64; 1 << n];
    dp[0] = 1;
    let mut nonzero: Vec<(usize, u64)> = Vec::with_capacity(n);
    for (used, &j) in cols.iter().enumerate() {
        nonzero.clear();
        nonzero.extend(
            rows.iter()
                .enumerate()
                .map(|(i, r)| (i, u64::from(r.get(j))))
                .filter(|&(_, v)| v != 0),
        );
        if nonzero.is_empty() {
            continue;
        }
        for mask in (1..dp.len()).rev() {
            // After `used` columns at most `used + 1` rows can be placed.
            if mask.count_ones() as usize > used + 1 {
                continue;
            }
            let mut acc = dp[mask];
            for &(i, v) in &nonzero {
                if mask >> i & 1 == 1 {
                    acc += dp[mask ^ (1 << i)] * v;
                }
            }
            dp[mask] = acc % p;
        }
    }
    dp[(1 << n) - 1] as FieldElement
}

/// Direct enumeration of paths. Test oracle only.
pub fn brute_path_oracle(kind: MatrixFunction, m: &RowMatrix, excluded: &ColumnExclusion) -> Result<FieldElement> {
    excluded.check(m.dim)?;
    let n = m.num_rows();
    if n > 8 || m.dim > 12 {
        return Err(Error::too_large(
            format!("path enumeration with {n} rows and {} columns", m.dim),
            "8 rows and 12 columns",
        ));
    }
    let rows = m.flattened();
    let mut group_of = Vec::with_capacity(n);
    for (g, (_, l)) in m.groups.iter().enumerate() {
        group_of.extend(std::iter::repeat_n(g, *l));
    }
    let cols: Vec<usize> = excluded.allowed(m.dim).collect();
    let mut used = vec![false; m.dim];
    let mut path = Vec::with_capacity(n);
    let mut total = 0u64;
    enumerate_paths(kind, &rows, &group_of, &cols, &mut used, &mut path, &mut |path| {
        let prod = path.iter().enumerate().fold(1u64, |acc, (i, &j)| {
            acc * u64::from(rows[i].get(j)) % u64::from(m.field.p())
        });
        total = (total + prod) % u64::from(m.field.p());
    });
    Ok(total as FieldElement)
}

fn enumerate_paths(
    kind: MatrixFunction,
    rows: &[&FieldVector],
    group_of: &[usize],
    cols: &[usize],
    used: &mut [bool],
    path: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    let i = path.len();
    if i == rows.len() {
        visit(path);
        return;
    }
    for &j in cols {
        if used[j] {
            continue;
        }
        let ok = match kind {
            MatrixFunction::S => true,
            MatrixFunction::F => path.last().is_none_or(|&prev| prev < j),
            MatrixFunction::H => (0..i)
                .rev()
                .find(|&a| group_of[a] == group_of[i])
                .is_none_or(|a| path[a] < j),
        };
        if !ok {
            continue;
        }
        used[j] = true;
        path.push(j);
        enumerate_paths(kind, rows, group_of, cols, used, path, visit);
        path.pop();
        used[j] = false;
    }
}

/// All unordered set partitions of `{0, ..., n-1}` into nonempty blocks, in
/// restricted-growth-string order. Blocks are listed by first element.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max: usize, rgs: &mut [usize], out: &mut Vec<Vec<Vec<usize>>>) {
        if i == rgs.len() {
            let nblocks = if rgs.is_empty() { 0 } else { max + 1 };
            let mut blocks = vec![Vec::new(); nblocks];
            for (e, &b) in rgs.iter().enumerate() {
                blocks[b].push(e);
            }
            out.push(blocks);
            return;
        }
        let limit = if i == 0 { 0 } else { max + 1 };
        for b in 0..=limit {
            rgs[i] = b;
            rec(i + 1, max.max(b), rgs, out);
        }
    }
    rec(0, 0, &mut rgs, &mut out);
    out
}

/// `r_tau`: the pointwise product of the rows indexed by `tau`; all ones for
/// an empty `tau`.
pub fn row_product(field: PrimeField, dim: usize, rows: &[FieldVector], tau: &[usize]) -> Result<FieldVector> {
    tau.iter()
        .try_fold(FieldVector::ones(field, dim), |acc, &i| acc.pointwise_mul(&rows[i]))
}

fn common_shape(rows: &[FieldVector]) -> Result<Option<(PrimeField, usize)>> {
    let Some(first) = rows.first() else {
        return Ok(None);
    };
    if rows
        .iter()
        .any(|r| r.field() != first.field() || r.len() != first.len())
    {
        return Err(Error::DimensionMismatch("rows differ in length or field".into()));
    }
    Ok(Some((first.field(), first.len())))
}

/// `S(r_1 ... r_n)` as a sum over unordered partitions of the rows of
/// `prod_t (-1)^{|b_t|-1} (|b_t|-1)! <r_{b_t}, 1>`.
pub fn partition_expansion_sym(rows: &[FieldVector]) -> Result<FieldElement> {
    let Some((field, dim)) = common_shape(rows)? else {
        return Ok(1);
    };
    if rows.len() > 8 {
        return Err(Error::too_large(
            format!("partition expansion over {} rows", rows.len()),
            8,
        ));
    }
    let mut total = 0;
    for blocks in set_partitions(rows.len()) {
        let mut term = 1;
        for b in &blocks {
            let s = b.len() - 1;
            let weight = field.mul(field.sign(s), field.factorial(s));
            term = field.mul(term, field.mul(weight, row_product(field, dim, rows, b)?.sum()));
        }
        total = field.add(total, term);
    }
    Ok(total)
}

/// An ordered list of pairwise disjoint, possibly empty subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    blocks: Vec<Vec<usize>>,
}

impl SetSystem {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        if blocks.iter().flatten().any(|&e| !seen.insert(e)) {
            return Err(Error::Precondition("set system blocks overlap".into()));
        }
        Ok(SetSystem { blocks })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Elements of `[n]` in no block.
    pub fn uncovered(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|e| !self.blocks.iter().any(|b| b.contains(e))).collect()
    }

    /// Every system of `k` blocks over `[n]`, in lexicographic order of the
    /// block assignment `(a_0, ..., a_{n-1})`, where `a_e = 0` leaves `e`
    /// uncovered and `a_e = t + 1` puts it in block `t`.
    pub fn enumerate(n: usize, k: usize) -> impl Iterator<Item = SetSystem> {
        let total = (k + 1).checked_pow(n as u32).expect("set system count overflows");
        (0..total).map(move |code| {
            let mut blocks = vec![Vec::new(); k];
            let mut rest = code;
            let mut assign = vec![0; n];
            for a in assign.iter_mut().rev() {
                *a = rest % (k + 1);
                rest /= k + 1;
            }
            for (e, &a) in assign.iter().enumerate() {
                if a > 0 {
                    blocks[a - 1].push(e);
                }
            }
            SetSystem { blocks }
        })
    }
}

/// `S^{j_1 ... j_k}(r_1 ... r_n)` as a sum over ordered set systems
/// `tau_1 ... tau_k` of
/// `prod_t (-1)^{|tau_t|} |tau_t|! r_{tau_t}(j_t) * S(rows outside all tau_t)`.
pub fn incomplete_expansion(rows: &[FieldVector], missing: &[usize]) -> Result<FieldElement> {
    let n = rows.len();
    let k = missing.len();
    if n > 6 || k > 6 {
        return Err(Error::too_large(
            format!("incomplete expansion with n = {n}, k = {k}"),
            6,
        ));
    }
    ColumnExclusion::new(missing.to_vec())?;
    let Some((field, dim)) = common_shape(rows)? else {
        return Ok(1);
    };
    if let Some(&j) = missing.iter().find(|&&j| j >= dim) {
        return Err(Error::IndexOutOfRange { index: j, limit: dim });
    }
    let mut total = 0;
    for sys in SetSystem::enumerate(n, k) {
        let mut term = 1;
        for (b, &j) in sys.blocks().iter().zip(missing) {
            let weight = field.mul(field.sign(b.len()), field.factorial(b.len()));
            let coord = b.iter().fold(1, |acc, &i| field.mul(acc, rows[i].get(j)));
            term = field.mul(term, field.mul(weight, coord));
            if term == 0 {
                break;
            }
        }
        if term == 0 {
            continue;
        }
        let rest: Vec<FieldVector> = sys.uncovered(n).into_iter().map(|i| rows[i].clone()).collect();
        let m = RowMatrix::from_rows(field, dim, &rest)?;
        let s = eval_matrix_function(MatrixFunction::S, &m, &ColumnExclusion::none())?;
        total = field.add(total, field.mul(term, s));
    }
    Ok(total)
}
