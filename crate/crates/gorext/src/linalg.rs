//! Sparse exact linear algebra: column reduction, kernels, images, linear
//! solves and homology of cochain complexes.
//!
//! Matrices are stored column-wise as sorted sparse vectors. All reductions
//! eliminate on the leading (smallest) row index, so results depend only on
//! the input order and are deterministic.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::field::{FieldSpec, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not a complex: d∘d ≠ 0 at degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("not a chain map at degree {degree}")]
    NotAChainMap { degree: i64 },
    #[error("missing block for degree {degree}")]
    MissingBlock { degree: i64 },
}

/// A sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    /// Builds from arbitrary (index, value) pairs, summing duplicates.
    pub fn from_entries(mut entries: Vec<(usize, Scalar)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, Scalar)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, w)) if *j == i => *w += &v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|e| !e.1.is_zero());
        SparseVec { entries: out }
    }

    pub fn unit(i: usize, field: FieldSpec) -> Self {
        SparseVec { entries: vec![(i, field.one())] }
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize, field: FieldSpec) -> Vec<Scalar> {
        let mut out = vec![field.zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn lead(&self) -> Option<&(usize, Scalar)> {
        self.entries.first()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries.binary_search_by_key(&i, |e| e.0).ok().map(|k| &self.entries[k].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.entries.iter()
    }

    pub fn into_entries(self) -> Vec<(usize, Scalar)> {
        self.entries
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Scalar, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, _)), Some((j, _))) if i < j => out.push(a.next().unwrap()),
                (Some((i, _)), Some((j, _))) if i > j => {
                    let (j, w) = b.next().unwrap();
                    out.push((*j, c * w));
                }
                (Some(_), Some(_)) => {
                    let (i, mut v) = a.next().unwrap();
                    let (_, w) = b.next().unwrap();
                    v += &(c * w);
                    if !v.is_zero() {
                        out.push((i, v));
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (j, w) = b.next().unwrap();
                    out.push((*j, c * w));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn scale(&mut self, c: &Scalar) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for e in &mut self.entries {
            e.1 *= c;
        }
    }

    pub fn scaled(&self, c: &Scalar) -> SparseVec {
        let mut v = self.clone();
        v.scale(c);
        v
    }

    /// Renumbers indices through `map`, dropping those it sends to `None`.
    pub fn remap(&self, mut map: impl FnMut(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_entries(
            self.entries.iter().filter_map(|(i, v)| map(*i).map(|j| (j, v.clone()))).collect(),
        )
    }
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub field: FieldSpec,
    pub rows: usize,
    pub cols: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Self {
        SparseMatrix { field, rows, cols, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        SparseMatrix {
            field,
            rows: n,
            cols: n,
            columns: (0..n).map(|i| SparseVec::unit(i, field)).collect(),
        }
    }

    pub fn from_columns(field: FieldSpec, rows: usize, columns: Vec<SparseVec>) -> Self {
        debug_assert!(columns.iter().all(|c| c.max_index().map_or(true, |m| m < rows)));
        SparseMatrix { field, rows, cols: columns.len(), columns }
    }

    /// Triplets `(row, col, value)`; duplicates are summed.
    pub fn from_triplets(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet out of range");
            per_col[c].push((r, v));
        }
        SparseMatrix {
            field,
            rows,
            cols,
            columns: per_col.into_iter().map(SparseVec::from_entries).collect(),
        }
    }

    pub fn from_dense(field: FieldSpec, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let trip = rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, v)| (i, j, field.from_i64(*v)))
        });
        SparseMatrix::from_triplets(field, r, c, trip)
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVec::is_zero)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v.iter() {
            out.axpy(c, &self.columns[*j]);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let cols = other.columns.iter().map(|c| self.apply(c)).collect();
        Ok(SparseMatrix { field: self.field, rows: self.rows, cols: other.cols, columns: cols })
    }

    pub fn rank(&self) -> usize {
        let mut r = Reducer::new(self.field, false);
        self.columns.iter().filter(|c| r.insert((*c).clone(), None).is_none()).count()
    }
}

/// Incremental column reducer. Every inserted vector that is independent of
/// the previous ones becomes a pivot keyed by its leading index. When
/// tracking is on, each pivot remembers the combination of inserted inputs
/// that produced it.
#[derive(Clone, Debug)]
pub struct Reducer {
    field: FieldSpec,
    by_lead: HashMap<usize, usize>,
    reduced: Vec<SparseVec>,
    combos: Vec<SparseVec>,
    tags: Vec<Option<usize>>,
    inserted: usize,
    track: bool,
}

/// Result of reducing a vector against the current pivots:
/// `v = residual + Σ coeff·pivot`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub residual: SparseVec,
    pub coeffs: Vec<(usize, Scalar)>,
}

impl Reducer {
    pub fn new(field: FieldSpec, track: bool) -> Self {
        Reducer {
            field,
            by_lead: HashMap::new(),
            reduced: Vec::new(),
            combos: Vec::new(),
            tags: Vec::new(),
            inserted: 0,
            track,
        }
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn pivot(&self, slot: usize) -> &SparseVec {
        &self.reduced[slot]
    }

    pub fn tag(&self, slot: usize) -> Option<usize> {
        self.tags[slot]
    }

    pub fn reduce(&self, mut v: SparseVec) -> Reduction {
        let mut coeffs = Vec::new();
        let mut start = 0usize;
        loop {
            // Entries before `start` are known to have no pivot.
            let next = v.entries[start.min(v.entries.len())..]
                .iter()
                .position(|(i, _)| self.by_lead.contains_key(i))
                .map(|k| k + start.min(v.entries.len()));
            let Some(pos) = next else { break };
            let (lead, val) = v.entries[pos].clone();
            let slot = self.by_lead[&lead];
            let p = &self.reduced[slot];
            let c = &val / &p.lead().unwrap().1;
            v.axpy(&-&c, p);
            coeffs.push((slot, c));
            start = pos;
        }
        Reduction { residual: v, coeffs }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone()).residual.is_zero()
    }

    /// Inserts `v`. Returns `Some(combination)` when `v` was dependent
    /// (the combination of inputs summing to zero, including `v` itself when
    /// tracking), otherwise `None` and a new pivot is created.
    pub fn insert(&mut self, v: SparseVec, tag: Option<usize>) -> Option<SparseVec> {
        let input = self.inserted;
        self.inserted += 1;
        let red = self.reduce(v);
        let combo = if self.track {
            let mut combo = SparseVec::unit(input, self.field);
            for (slot, c) in &red.coeffs {
                combo.axpy(&-c, &self.combos[*slot]);
            }
            combo
        } else {
            SparseVec::new()
        };
        if red.residual.is_zero() {
            return Some(combo);
        }
        let lead = red.residual.lead().unwrap().0;
        self.by_lead.insert(lead, self.reduced.len());
        self.reduced.push(red.residual);
        self.combos.push(combo);
        self.tags.push(tag);
        None
    }

    /// Fully reduced residual of `v`: every entry with a pivot is eliminated.
    pub fn residual(&self, v: &SparseVec) -> SparseVec {
        self.reduce(v.clone()).residual
    }
}

/// Output of [`row_reduce`].
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rank: usize,
    pub kernel: Vec<SparseVec>,
    pub image: Vec<SparseVec>,
}

pub fn row_reduce(m: &SparseMatrix) -> RowReduction {
    let mut r = Reducer::new(m.field, true);
    let mut kernel = Vec::new();
    for c in &m.columns {
        if let Some(k) = r.insert(c.clone(), None) {
            kernel.push(k);
        }
    }
    RowReduction { rank: r.rank(), kernel, image: r.reduced }
}

/// Kernel basis only.
pub fn kernel(m: &SparseMatrix) -> Vec<SparseVec> {
    row_reduce(m).kernel
}

/// Reusable solver for `A x = b` with fixed `A`.
#[derive(Clone, Debug)]
pub struct Solver {
    reducer: Reducer,
    rows: usize,
    cols: usize,
}

impl Solver {
    pub fn new(a: &SparseMatrix) -> Self {
        let mut reducer = Reducer::new(a.field, true);
        for c in &a.columns {
            reducer.insert(c.clone(), None);
        }
        Solver { reducer, rows: a.rows, cols: a.cols }
    }

    pub fn solve(&self, b: &SparseVec) -> Result<Option<SparseVec>, LinalgError> {
        if let Some(m) = b.max_index() {
            if m >= self.rows {
                return Err(LinalgError::DimensionMismatch { expected: self.rows, got: m + 1 });
            }
        }
        let red = self.reducer.reduce(b.clone());
        if !red.residual.is_zero() {
            return Ok(None);
        }
        let mut x = SparseVec::new();
        for (slot, c) in &red.coeffs {
            x.axpy(c, &self.reducer.combos[*slot]);
        }
        debug_assert!(x.max_index().map_or(true, |m| m < self.cols));
        Ok(Some(x))
    }
}

pub fn solve_linear(a: &SparseMatrix, b: &SparseVec) -> Result<Option<SparseVec>, LinalgError> {
    Solver::new(a).solve(b)
}

/// Homology of `C^{n-1} --d_in--> C^n --d_out--> C^{n+1}` at `C^n`.
///
/// Representatives are the reduced residuals of kernel vectors against the
/// boundaries, so each has a leading index no boundary reaches.
#[derive(Clone, Debug)]
pub struct Homology {
    pub dim: usize,
    pub ambient: usize,
    pub reps: Vec<SparseVec>,
    reducer: Reducer,
    boundaries: usize,
}

impl Homology {
    pub fn compute(field: FieldSpec, d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<Self, LinalgError> {
        if d_in.rows != d_out.cols {
            return Err(LinalgError::DimensionMismatch { expected: d_out.cols, got: d_in.rows });
        }
        Self::from_parts(field, d_in.rows, d_in.columns(), &kernel(d_out), Some((d_in, d_out)))
    }

    /// Homology from boundary generators and a cocycle basis of an ambient
    /// space of dimension `ambient`.
    pub fn from_parts(
        field: FieldSpec,
        ambient: usize,
        boundaries: &[SparseVec],
        cocycles: &[SparseVec],
        check: Option<(&SparseMatrix, &SparseMatrix)>,
    ) -> Result<Self, LinalgError> {
        if let Some((d_in, d_out)) = check {
            for c in d_in.columns() {
                if !d_out.apply(c).is_zero() {
                    return Err(LinalgError::NotAComplex { degree: 0 });
                }
            }
        }
        let mut reducer = Reducer::new(field, false);
        for b in boundaries {
            reducer.insert(b.clone(), None);
        }
        let nb = reducer.rank();
        let mut reps = Vec::new();
        for z in cocycles {
            let res = reducer.residual(z);
            if !res.is_zero() {
                let i = reps.len();
                reps.push(res.clone());
                reducer.insert(res, Some(i));
            }
        }
        Ok(Homology { dim: reps.len(), ambient, reps, reducer, boundaries: nb })
    }

    pub fn boundary_rank(&self) -> usize {
        self.boundaries
    }

    /// Coordinates of the class of `z` in the representative basis, or
    /// `None` when `z` is not in the span of cocycles known here.
    pub fn coordinates(&self, z: &SparseVec) -> Option<SparseVec> {
        let red = self.reducer.reduce(z.clone());
        if !red.residual.is_zero() {
            return None;
        }
        let mut coords = Vec::new();
        for (slot, c) in red.coeffs {
            if let Some(i) = self.reducer.tag(slot) {
                coords.push((i, c));
            }
        }
        Some(SparseVec::from_entries(coords))
    }

    pub fn is_boundary(&self, z: &SparseVec) -> bool {
        self.coordinates(z).is_some_and(|c| c.is_zero())
    }
}

/// A graded vector space: opaque labels per degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedSpace {
    pub basis: BTreeMap<i64, Vec<String>>,
}

impl GradedSpace {
    pub fn dim(&self, n: i64) -> usize {
        self.basis.get(&n).map_or(0, Vec::len)
    }
}

/// Degree direction of a complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `d: C^n → C^{n+1}`.
    Cohomological,
    /// `d: C_n → C_{n-1}`; stored internally with degrees negated.
    Homological,
}

/// A linear map of graded spaces of fixed degree `shift`.
#[derive(Clone, Debug)]
pub struct DegreeMap {
    pub shift: i64,
    pub blocks: BTreeMap<i64, SparseMatrix>,
}

/// A bounded complex of finite-dimensional spaces with `diffs[n]: C^n → C^{n+1}`
/// in internal (cohomological) degrees.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub field: FieldSpec,
    pub direction: Direction,
    dims: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, SparseMatrix>,
}

impl ChainComplex {
    pub fn new(field: FieldSpec, direction: Direction) -> Self {
        ChainComplex { field, direction, dims: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    fn internal(&self, n: i64) -> i64 {
        match self.direction {
            Direction::Cohomological => n,
            Direction::Homological => -n,
        }
    }

    /// Sets the space in (natural) degree `n`.
    pub fn set_dim(&mut self, n: i64, dim: usize) {
        let k = self.internal(n);
        self.dims.insert(k, dim);
    }

    /// Sets the differential leaving (natural) degree `n`.
    pub fn set_differential(&mut self, n: i64, d: SparseMatrix) {
        let k = self.internal(n);
        self.dims.insert(k, d.cols);
        self.dims.insert(k + 1, d.rows);
        self.diffs.insert(k, d);
    }

    pub fn dim(&self, n: i64) -> usize {
        self.dims.get(&self.internal(n)).copied().unwrap_or(0)
    }

    /// Differential out of internal degree `k`, zero when unset.
    fn diff_internal(&self, k: i64) -> SparseMatrix {
        let src = self.dims.get(&k).copied().unwrap_or(0);
        let tgt = self.dims.get(&(k + 1)).copied().unwrap_or(0);
        self.diffs.get(&k).cloned().unwrap_or_else(|| SparseMatrix::zero(self.field, tgt, src))
    }

    pub fn homology_at(&self, n: i64) -> Result<Homology, LinalgError> {
        let k = self.internal(n);
        let d_in = self.diff_internal(k - 1);
        let d_out = self.diff_internal(k);
        Homology::compute(self.field, &d_in, &d_out).map_err(|e| match e {
            LinalgError::NotAComplex { .. } => LinalgError::NotAComplex { degree: n },
            other => other,
        })
    }

    /// Internal degrees where a space is set.
    fn internal_degrees(&self) -> Vec<i64> {
        self.dims.keys().copied().collect()
    }
}

/// Per-degree injectivity of the map induced on homology by `f`.
pub fn induced_map_injective(
    f: &DegreeMap,
    source: &ChainComplex,
    target: &ChainComplex,
    degrees: &[i64],
) -> Result<BTreeMap<i64, bool>, LinalgError> {
    if f.shift != 0 {
        return Err(LinalgError::NotAChainMap { degree: 0 });
    }
    // Chain map check on every internal degree where the source lives.
    for k in source.internal_degrees() {
        let n = match source.direction {
            Direction::Cohomological => k,
            Direction::Homological => -k,
        };
        let fk = block(f, n, source, target)?;
        let n1 = match source.direction {
            Direction::Cohomological => k + 1,
            Direction::Homological => -(k + 1),
        };
        let fk1 = block(f, n1, source, target)?;
        let lhs = target.diff_internal(k).compose(&fk)?;
        let rhs = fk1.compose(&source.diff_internal(k))?;
        if lhs != rhs && !(lhs.is_zero() && rhs.is_zero()) {
            return Err(LinalgError::NotAChainMap { degree: n });
        }
    }
    let mut out = BTreeMap::new();
    for &n in degrees {
        let hs = source.homology_at(n)?;
        let fk = block(f, n, source, target)?;
        let mut r = Reducer::new(source.field, false);
        let k = target.internal(n);
        let d_in = target.diff_internal(k - 1);
        for c in d_in.columns() {
            r.insert(c.clone(), None);
        }
        let injective = hs.reps.iter().all(|z| r.insert(fk.apply(z), None).is_none());
        out.insert(n, injective);
    }
    Ok(out)
}

fn block(
    f: &DegreeMap,
    n: i64,
    source: &ChainComplex,
    target: &ChainComplex,
) -> Result<SparseMatrix, LinalgError> {
    let (s, t) = (source.dim(n), target.dim(n));
    match f.blocks.get(&n) {
        Some(m) if m.cols == s && m.rows == t => Ok(m.clone()),
        Some(m) => Err(LinalgError::DimensionMismatch { expected: s, got: m.cols }),
        None if s == 0 || t == 0 => Ok(SparseMatrix::zero(source.field, t, s)),
        None => Err(LinalgError::MissingBlock { degree: n }),
    }
}
