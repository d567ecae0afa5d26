//! The standard apartment `Z^r` of the diagonal torus of GL(r) with its
//! Weyl group `S_r`. Dominant means weakly decreasing; the fixed Borel is
//! the upper-triangular one, stabilising `e1 ⊂ <e1,e2> ⊂ ...`.

use num_bigint::BigUint;
use num_traits::One;

/// A permutation in one-line notation. It acts on vectors by
/// `(w·x)[i] = x[w[i]]`.
pub type Permutation = Vec<usize>;

pub fn act(w: &[usize], x: &[i64]) -> Vec<i64> {
    w.iter().map(|&j| x[j]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DominantWeight(Vec<i64>);

impl DominantWeight {
    pub fn new(weights: Vec<i64>) -> Option<Self> {
        weights
            .windows(2)
            .all(|p| p[0] >= p[1])
            .then_some(Self(weights))
    }

    pub fn weights(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }
}

/// Block sizes `(m1, ..., mk)` of a standard parabolic; `(1, ..., 1)` is the Borel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParabolicType(Vec<usize>);

impl ParabolicType {
    pub fn new(blocks: Vec<usize>) -> Option<Self> {
        (!blocks.is_empty() && blocks.iter().all(|&m| m >= 1)).then_some(Self(blocks))
    }

    pub fn blocks(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.iter().sum()
    }

    /// `r! / (m1! ... mk!)`, the number of torus-fixed points of `G/Q`.
    pub fn multinomial(&self) -> BigUint {
        let fact = |n: usize| (1..=n).fold(BigUint::one(), |acc, k| acc * k);
        self.0
            .iter()
            .fold(fact(self.rank()), |acc, &m| acc / fact(m))
    }
}

/// Sorts `v` descending (stably) and returns `w` with `w·dominant = v`.
pub fn dominant_representative(v: &[i64]) -> (DominantWeight, Permutation) {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].cmp(&v[a]));
    let dominant: Vec<i64> = order.iter().map(|&i| v[i]).collect();
    let mut w = vec![0; v.len()];
    for (pos, &i) in order.iter().enumerate() {
        w[i] = pos;
    }
    (DominantWeight(dominant), w)
}

pub fn parabolic_type(d: &DominantWeight) -> ParabolicType {
    let mut blocks: Vec<usize> = Vec::new();
    for (i, x) in d.0.iter().enumerate() {
        if i > 0 && d.0[i - 1] == *x {
            *blocks.last_mut().unwrap() += 1;
        } else {
            blocks.push(1);
        }
    }
    ParabolicType(blocks)
}

/// A torus-fixed point of `G/Q`: an ordered partition of `{0..r-1}` into
/// blocks. Its flag has `F_j` spanned by the basis vectors in blocks `1..=j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordinateFlag {
    blocks: Vec<Vec<usize>>,
}

impl CoordinateFlag {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    fn from_labels(labels: &[usize], k: usize) -> Self {
        let mut blocks = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            blocks[l].push(i);
        }
        Self { blocks }
    }
}

/// All fixed points of `G/Q`, in lexicographic order of the block label
/// assigned to each coordinate.
pub fn fixed_points(q: &ParabolicType) -> Vec<CoordinateFlag> {
    let k = q.0.len();
    let mut labels: Vec<usize> =
        q.0.iter()
            .enumerate()
            .flat_map(|(b, &m)| std::iter::repeat_n(b, m))
            .collect();
    let mut out = vec![CoordinateFlag::from_labels(&labels, k)];
    while next_permutation(&mut labels) {
        out.push(CoordinateFlag::from_labels(&labels, k));
    }
    out
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
