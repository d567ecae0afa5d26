//! One-parameter subgroups `λ(s) = g·diag(s^a1, ..., s^ar)·g⁻¹` of GL(r)
//! and the relation `λ1 ∼ λ2` iff `lim_{s→0} λ1(s)λ2(s)⁻¹` exists in GL(r).

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::building::{self, WeightedFlag};
use crate::exactlin::{Rat, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OneParError {
    #[error("frame is {rows}x{cols} but there are {weights} weights")]
    Shape {
        rows: usize,
        cols: usize,
        weights: usize,
    },
    #[error("frame matrix is not invertible")]
    SingularFrame,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneParamSubgroup {
    frame: RationalMatrix,
    frame_inv: RationalMatrix,
    weights: Vec<i64>,
}

impl OneParamSubgroup {
    pub fn new(frame: RationalMatrix, weights: Vec<i64>) -> Result<Self, OneParError> {
        let r = weights.len();
        if frame.rows() != r || frame.cols() != r {
            return Err(OneParError::Shape {
                rows: frame.rows(),
                cols: frame.cols(),
                weights: r,
            });
        }
        let frame_inv = frame.inverse().ok_or(OneParError::SingularFrame)?;
        Ok(Self {
            frame,
            frame_inv,
            weights,
        })
    }

    /// The subgroup with the identity frame.
    pub fn diagonal(weights: Vec<i64>) -> Self {
        let r = weights.len();
        Self::new(RationalMatrix::identity(r), weights).expect("identity is invertible")
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn frame(&self) -> &RationalMatrix {
        &self.frame
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// `x λ x⁻¹`, with frame `x·g`.
    pub fn conjugate(&self, x: &RationalMatrix) -> Result<Self, OneParError> {
        Self::new(x * &self.frame, self.weights.clone())
    }
}

/// A Laurent polynomial in `s`: exponent to nonzero coefficient.
pub type Laurent = BTreeMap<i64, Rat>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    size: usize,
    entries: Vec<Laurent>,
}

impl LaurentMatrix {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            entries: vec![Laurent::new(); size * size],
        }
    }

    /// Entries given as lists of `(exponent, coefficient)` terms.
    pub fn from_terms(size: usize, terms: &[Vec<Vec<(i64, Rat)>>]) -> Self {
        let mut m = Self::zeros(size);
        for (i, row) in terms.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                for (e, c) in entry {
                    m.add_term(i, j, *e, c.clone());
                }
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> &Laurent {
        &self.entries[i * self.size + j]
    }

    pub fn add_term(&mut self, i: usize, j: usize, exp: i64, coeff: Rat) {
        let e = &mut self.entries[i * self.size + j];
        let c = e.entry(exp).or_insert_with(Rat::zero);
        *c += coeff;
        if c.is_zero() {
            e.remove(&exp);
        }
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.entries
            .iter()
            .filter_map(|e| e.keys().next().copied())
            .min()
    }

    pub fn constant_terms(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.size, self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                if let Some(c) = self.entry(i, j).get(&0) {
                    m[(i, j)] = c.clone();
                }
            }
        }
        m
    }
}

/// The limit at `s = 0` when it exists in GL(r): no negative exponents and
/// an invertible constant term.
pub fn laurent_limit(m: &LaurentMatrix) -> Option<RationalMatrix> {
    if m.min_exponent().is_some_and(|e| e < 0) {
        return None;
    }
    let c = m.constant_terms();
    c.is_invertible().then_some(c)
}

/// `λ1(s)·λ2(s)⁻¹` as a Laurent matrix.
pub fn product_with_inverse(l1: &OneParamSubgroup, l2: &OneParamSubgroup) -> LaurentMatrix {
    assert_eq!(l1.rank(), l2.rank());
    let r = l1.rank();
    let mid = &l1.frame_inv * &l2.frame;
    let mut out = LaurentMatrix::zeros(r);
    for k in 0..r {
        for l in 0..r {
            if mid[(k, l)].is_zero() {
                continue;
            }
            let exp = l1.weights[k] - l2.weights[l];
            for i in 0..r {
                if l1.frame[(i, k)].is_zero() {
                    continue;
                }
                let left = &l1.frame[(i, k)] * &mid[(k, l)];
                for j in 0..r {
                    if !l2.frame_inv[(l, j)].is_zero() {
                        out.add_term(i, j, exp, &left * &l2.frame_inv[(l, j)]);
                    }
                }
            }
        }
    }
    out
}

pub fn equivalent(l1: &OneParamSubgroup, l2: &OneParamSubgroup) -> bool {
    laurent_limit(&product_with_inverse(l1, l2)).is_some()
}

/// The weighted flag whose stabiliser is `P_λ`.
pub fn parabolic_flag(lambda: &OneParamSubgroup) -> WeightedFlag {
    building::from_onepar(lambda)
}

/// Whether `x ∈ P_λ`, decided by the limit definition.
pub fn in_parabolic(x: &RationalMatrix, lambda: &OneParamSubgroup) -> bool {
    match lambda.conjugate(x) {
        Ok(c) => equivalent(&c, lambda),
        Err(_) => false,
    }
}
