//! Points of the extended building of GL(r) over Q, modelled as weighted
//! flags `F1 ⊊ ... ⊊ Fk = Q^r` with weights `t1 > ... > tk`.
//!
//! Subspaces are stored by the reduced row echelon form of a spanning set,
//! so equality of flags is equality of data.

use num_traits::Zero;
use thiserror::Error;

use crate::exactlin::{kernel_basis, rat, Rat, RationalMatrix};
use crate::onepar::OneParamSubgroup;
use crate::weyl::CoordinateFlag;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildingError {
    #[error("expected vectors of length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("flag step {step} is the zero subspace")]
    ZeroStep { step: usize },
    #[error("flag step {step} does not strictly contain the previous step")]
    NotStrictlyIncreasing { step: usize },
    #[error("the last flag step must be the whole space")]
    LastStepNotFull,
    #[error("{steps} flag steps but {weights} weights")]
    WeightCountMismatch { steps: usize, weights: usize },
    #[error("weights must be strictly decreasing")]
    WeightsNotDecreasing,
    #[error("weight {weight} is not an integer")]
    NonIntegralWeight { weight: String },
    #[error("filtration level {index} is not contained in the previous level")]
    NotDecreasing { index: i64 },
    #[error("frame matrix is not invertible")]
    SingularFrame,
}

/// A linear subspace of `Q^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rat>>,
}

impl Subspace {
    pub fn span(vectors: &[Vec<Rat>], ambient: usize) -> Result<Self, BuildingError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(BuildingError::DimensionMismatch {
                expected: ambient,
                found: v.len(),
            });
        }
        let (m, pivots) = RationalMatrix::from_rows(vectors.to_vec(), ambient).rref();
        Ok(Self {
            ambient,
            basis: (0..pivots.len()).map(|i| m.row(i).to_vec()).collect(),
        })
    }

    fn span_unchecked(vectors: &[Vec<Rat>], ambient: usize) -> Self {
        Self::span(vectors, ambient).expect("vectors have ambient length")
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span_unchecked(&RationalMatrix::identity(ambient).row_vecs(), ambient)
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let id = RationalMatrix::identity(ambient);
        let vs: Vec<Vec<Rat>> = indices.iter().map(|&i| id.row(i).to_vec()).collect();
        Self::span_unchecked(&vs, ambient)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Rows of the reduced echelon basis.
    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        RationalMatrix::from_rows(rows, self.ambient).rank() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::span_unchecked(&rows, self.ambient)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ambient);
        }
        // Coefficient pairs (a, b) with a·B_self + b·B_other = 0.
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        let stacked = RationalMatrix::from_rows(rows, self.ambient).transpose();
        let vs: Vec<Vec<Rat>> = kernel_basis(&stacked)
            .iter()
            .map(|c| {
                (0..self.ambient)
                    .map(|j| (0..self.dim()).map(|i| &c[i] * &self.basis[i][j]).sum())
                    .collect()
            })
            .collect();
        Self::span_unchecked(&vs, self.ambient)
    }

    /// The image under the `r × r` matrix `g`.
    pub fn image(&self, g: &RationalMatrix) -> Subspace {
        let vs: Vec<Vec<Rat>> = self.basis.iter().map(|v| g.mul_vec(v)).collect();
        Self::span_unchecked(&vs, self.ambient)
    }
}

/// A flag `F1 ⊊ ... ⊊ Fk = Q^r` with `F1 ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flag {
    rank: usize,
    steps: Vec<Subspace>,
}

impl Flag {
    pub fn new(rank: usize, steps: Vec<Subspace>) -> Result<Self, BuildingError> {
        for (i, s) in steps.iter().enumerate() {
            if s.ambient != rank {
                return Err(BuildingError::DimensionMismatch {
                    expected: rank,
                    found: s.ambient,
                });
            }
            if s.is_zero() {
                return Err(BuildingError::ZeroStep { step: i });
            }
            if i > 0 && (s.dim() <= steps[i - 1].dim() || !steps[i - 1].is_subspace_of(s)) {
                return Err(BuildingError::NotStrictlyIncreasing { step: i });
            }
        }
        if !steps.last().is_some_and(Subspace::is_full) {
            return Err(BuildingError::LastStepNotFull);
        }
        Ok(Self { rank, steps })
    }

    /// Builds a flag from spanning sets of its steps.
    pub fn from_spans(rank: usize, spans: &[Vec<Vec<Rat>>]) -> Result<Self, BuildingError> {
        let steps = spans
            .iter()
            .map(|s| Subspace::span(s, rank))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rank, steps)
    }

    pub fn trivial(rank: usize) -> Self {
        Self {
            rank,
            steps: vec![Subspace::full(rank)],
        }
    }

    pub fn from_coordinate(c: &CoordinateFlag) -> Self {
        let r = c.rank();
        let mut acc = Vec::new();
        let steps = c
            .blocks()
            .iter()
            .map(|b| {
                acc.extend_from_slice(b);
                Subspace::coordinate(r, &acc)
            })
            .collect();
        Self { rank: r, steps }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn steps(&self) -> &[Subspace] {
        &self.steps
    }

    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(Subspace::dim).collect()
    }

    /// Step sizes `dim Fj - dim F(j-1)`, the block type of the stabiliser.
    pub fn block_sizes(&self) -> Vec<usize> {
        let d = self.dims();
        (0..d.len())
            .map(|j| d[j] - if j == 0 { 0 } else { d[j - 1] })
            .collect()
    }

    /// `g·F` for invertible `g`.
    pub fn apply(&self, g: &RationalMatrix) -> Flag {
        Flag {
            rank: self.rank,
            steps: self.steps.iter().map(|s| s.image(g)).collect(),
        }
    }

    pub fn is_stabilized_by(&self, x: &RationalMatrix) -> bool {
        self.apply(x) == *self
    }

    /// Whether every step is spanned by a subset of the columns of `basis`.
    pub fn is_adapted(&self, basis: &RationalMatrix) -> bool {
        let cols = basis.columns();
        self.steps.iter().all(|s| {
            let inside: Vec<Vec<Rat>> = cols.iter().filter(|c| s.contains(c)).cloned().collect();
            Subspace::span_unchecked(&inside, self.rank) == *s
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedFlag {
    flag: Flag,
    weights: Vec<Rat>,
}

impl WeightedFlag {
    pub fn new(flag: Flag, weights: Vec<Rat>) -> Result<Self, BuildingError> {
        if flag.steps.len() != weights.len() {
            return Err(BuildingError::WeightCountMismatch {
                steps: flag.steps.len(),
                weights: weights.len(),
            });
        }
        if weights.windows(2).any(|p| p[0] <= p[1]) {
            return Err(BuildingError::WeightsNotDecreasing);
        }
        Ok(Self { flag, weights })
    }

    /// Distinct weights sorted descending; `Fj` is spanned by the frame
    /// columns whose weight is at least `tj`.
    pub fn from_frame_weights(
        frame: &RationalMatrix,
        weights: &[Rat],
    ) -> Result<Self, BuildingError> {
        let r = weights.len();
        if frame.rows() != r || frame.cols() != r {
            return Err(BuildingError::DimensionMismatch {
                expected: r,
                found: frame.cols(),
            });
        }
        if !frame.is_invertible() {
            return Err(BuildingError::SingularFrame);
        }
        let mut distinct = weights.to_vec();
        distinct.sort_by(|a, b| b.cmp(a));
        distinct.dedup();
        let cols = frame.columns();
        let steps = distinct
            .iter()
            .map(|t| {
                let vs: Vec<Vec<Rat>> = (0..r)
                    .filter(|&i| weights[i] >= *t)
                    .map(|i| cols[i].clone())
                    .collect();
                Subspace::span_unchecked(&vs, r)
            })
            .collect();
        Ok(Self {
            flag: Flag { rank: r, steps },
            weights: distinct,
        })
    }

    pub fn flag(&self) -> &Flag {
        &self.flag
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn rank(&self) -> usize {
        self.flag.rank
    }

    pub fn apply(&self, g: &RationalMatrix) -> WeightedFlag {
        WeightedFlag {
            flag: self.flag.apply(g),
            weights: self.weights.clone(),
        }
    }
}

/// Equality of building points: same weights and same chain of subspaces.
pub fn wf_equal(a: &WeightedFlag, b: &WeightedFlag) -> bool {
    a == b
}

pub fn from_onepar(lambda: &OneParamSubgroup) -> WeightedFlag {
    let w: Vec<Rat> = lambda.weights().iter().map(|&a| rat(a)).collect();
    WeightedFlag::from_frame_weights(lambda.frame(), &w)
        .expect("one-parameter subgroups have invertible frames")
}

/// A basis adapted to every flag, as the columns of the returned matrix, or
/// `None` if the flags share no splitting. With `rank` fixed and no flags the
/// identity is returned.
///
/// For multi-indices `I` let `V_I` be the intersection of the `I_j`-th steps
/// (step 0 being the zero space) and `V_I^-` the sum of the `V_{I - e_j}`.
/// Complements of `V_I^-` in `V_I`, lifted in lexicographic order of `I`,
/// always span `Q^r`; they form an adapted basis exactly when their total
/// count is `r`.
pub fn common_splitting<'a>(
    flags: impl IntoIterator<Item = &'a Flag>,
    rank: usize,
) -> Option<RationalMatrix> {
    let flags: Vec<&Flag> = flags.into_iter().collect();
    assert!(flags.iter().all(|f| f.rank == rank));
    let sizes: Vec<usize> = flags.iter().map(|f| f.steps.len() + 1).collect();
    let total: usize = sizes.iter().product();
    let index_of = |idx: &[usize]| idx.iter().zip(&sizes).fold(0, |acc, (i, s)| acc * s + i);
    let decode = |mut n: usize| {
        let mut idx = vec![0; sizes.len()];
        for k in (0..sizes.len()).rev() {
            idx[k] = n % sizes[k];
            n /= sizes[k];
        }
        idx
    };
    let step = |j: usize, i: usize| -> Subspace {
        if i == 0 {
            Subspace::zero(rank)
        } else {
            flags[j].steps[i - 1].clone()
        }
    };

    // Filled from the top: raising the first non-maximal index gives a
    // lexicographically larger tuple, already computed.
    let mut spaces: Vec<Subspace> = vec![Subspace::zero(rank); total];
    for n in (0..total).rev() {
        let idx = decode(n);
        spaces[n] = match (0..idx.len()).find(|&j| idx[j] + 1 < sizes[j]) {
            None => Subspace::full(rank),
            Some(j) => {
                let mut up = idx.clone();
                up[j] = sizes[j] - 1;
                spaces[index_of(&up)].intersect(&step(j, idx[j]))
            }
        };
    }

    let mut lifts: Vec<Vec<Rat>> = Vec::new();
    for n in 0..total {
        let idx = decode(n);
        if idx.contains(&0) {
            continue;
        }
        let mut lower = Subspace::zero(rank);
        for j in 0..idx.len() {
            let mut prev = idx.clone();
            prev[j] -= 1;
            lower = lower.sum(&spaces[index_of(&prev)]);
        }
        let mut acc = lower;
        for v in spaces[n].basis() {
            if !acc.contains(v) {
                lifts.push(v.clone());
                acc = acc.sum(&Subspace::span_unchecked(std::slice::from_ref(v), rank));
            }
        }
        if lifts.len() > rank {
            return None;
        }
    }
    if flags.is_empty() {
        return Some(RationalMatrix::identity(rank));
    }
    if lifts.len() != rank {
        return None;
    }
    let basis = RationalMatrix::from_columns(&lifts, rank);
    debug_assert!(flags.iter().all(|f| f.is_adapted(&basis)));
    Some(basis)
}

/// A decreasing filtration `E(j) ⊇ E(j+1)` of `Q^r` indexed by integers:
/// `E(j) = Q^r` for `j < start`, `E(start + k) = levels[k]`, and `E(j) = 0`
/// past the last level. Stored canonically (first level proper, last level
/// nonzero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KlyachkoFiltration {
    rank: usize,
    start: i64,
    levels: Vec<Subspace>,
}

impl KlyachkoFiltration {
    pub fn from_levels(
        rank: usize,
        start: i64,
        levels: Vec<Subspace>,
    ) -> Result<Self, BuildingError> {
        let mut prev = Subspace::full(rank);
        for (k, l) in levels.iter().enumerate() {
            if l.ambient != rank {
                return Err(BuildingError::DimensionMismatch {
                    expected: rank,
                    found: l.ambient,
                });
            }
            if !l.is_subspace_of(&prev) {
                return Err(BuildingError::NotDecreasing {
                    index: start + k as i64,
                });
            }
            prev = l.clone();
        }
        let mut start = start;
        let mut levels: std::collections::VecDeque<Subspace> = levels.into();
        while levels.front().is_some_and(Subspace::is_full) {
            levels.pop_front();
            start += 1;
        }
        while levels.back().is_some_and(Subspace::is_zero) {
            levels.pop_back();
        }
        Ok(Self {
            rank,
            start,
            levels: levels.into(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn levels(&self) -> &[Subspace] {
        &self.levels
    }

    pub fn level(&self, j: i64) -> Subspace {
        if j < self.start {
            Subspace::full(self.rank)
        } else {
            usize::try_from(j - self.start)
                .ok()
                .and_then(|k| self.levels.get(k).cloned())
                .unwrap_or_else(|| Subspace::zero(self.rank))
        }
    }

    /// Jumps `j` with `E(j) ≠ E(j+1)` become steps `E(j)` of weight `j`.
    pub fn to_weighted_flag(&self) -> WeightedFlag {
        let last = self.start + self.levels.len() as i64;
        let mut steps = Vec::new();
        let mut weights = Vec::new();
        for j in (self.start - 1..last).rev() {
            let e = self.level(j);
            if e != self.level(j + 1) {
                steps.push(e);
                weights.push(rat(j));
            }
        }
        WeightedFlag {
            flag: Flag {
                rank: self.rank,
                steps,
            },
            weights,
        }
    }

    pub fn from_weighted_flag(wf: &WeightedFlag) -> Result<Self, BuildingError> {
        let ints: Vec<i64> = wf
            .weights
            .iter()
            .map(|w| {
                w.is_integer()
                    .then(|| i64::try_from(w.to_integer()).ok())
                    .flatten()
                    .ok_or_else(|| BuildingError::NonIntegralWeight {
                        weight: w.to_string(),
                    })
            })
            .collect::<Result<_, _>>()?;
        let r = wf.rank();
        let low = *ints.last().expect("flags have at least one step");
        let high = ints[0];
        let levels = (low + 1..=high)
            .map(|j| {
                let k = ints.iter().rposition(|&t| t >= j).expect("j <= t1");
                wf.flag.steps[k].clone()
            })
            .collect();
        Self::from_levels(r, low + 1, levels)
    }
}
