//! Exact rational and integer linear algebra.
//!
//! Everything here works over `BigRational` / `BigInt`; there are no
//! tolerances anywhere. Matrices are small (rank of a lattice, rank of a
//! bundle), so the algorithms are the textbook ones: Gauss-Jordan
//! elimination, Hermite reduction and Fourier-Motzkin elimination.

mod fourier_motzkin;
mod matrix;

pub use fourier_motzkin::{feasible_point, Inequality};
pub use matrix::{IntegerMatrix, RationalMatrix};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("the zero vector has no primitive representative")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

/// `p/q` in lowest terms. Panics on `q == 0`.
pub fn frac(p: i64, q: i64) -> Rat {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_from_int(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

pub fn rat_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn ints_to_rats(v: &[Int]) -> Vec<Rat> {
    v.iter().map(rat_from_int).collect()
}

/// Returns `None` unless every entry is an integer.
pub fn rats_to_ints(v: &[Rat]) -> Option<Vec<Int>> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `v / gcd(v)`, keeping the sign of every entry.
pub fn primitive_vector(v: &[Int]) -> Result<Vec<Int>, LinAlgError> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return Err(LinAlgError::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

pub fn is_primitive(v: &[Int]) -> bool {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x)).is_one()
}

/// Clears denominators and divides out the content, so the result is a
/// primitive integer vector on the same ray. Zero maps to zero.
pub fn integral_direction(v: &[Rat]) -> Vec<Int> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<Int> = v
        .iter()
        .map(|x| (x * rat_from_int(&l)).to_integer())
        .collect();
    primitive_vector(&scaled).unwrap_or(scaled)
}

/// Basis of `{c : m c = 0}`, one vector per free column of the reduced
/// echelon form. Empty when `m` has full column rank.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<Vec<Rat>> {
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); m.cols()];
            v[f] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, f)].clone();
            }
            v
        })
        .collect()
}

/// Row-style Hermite normal form: returns `(h, u)` with `h = u m`, `u`
/// unimodular, pivots positive, entries above a pivot reduced into
/// `[0, pivot)` and zero rows at the bottom.
pub fn hermite_normal_form(m: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        loop {
            let best = (pivot_row..rows)
                .filter(|&i| !h[(i, col)].is_zero())
                .min_by(|&a, &b| h[(a, col)].abs().cmp(&h[(b, col)].abs()));
            let Some(best) = best else { break };
            h.swap_rows(pivot_row, best);
            u.swap_rows(pivot_row, best);
            let mut done = true;
            for i in pivot_row + 1..rows {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let q = h[(i, col)].div_floor(&h[(pivot_row, col)]);
                h.add_row_multiple(i, pivot_row, &-&q);
                u.add_row_multiple(i, pivot_row, &-&q);
                if !h[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        for i in 0..pivot_row {
            let q = h[(i, col)].div_floor(&h[(pivot_row, col)]);
            if !q.is_zero() {
                h.add_row_multiple(i, pivot_row, &-&q);
                u.add_row_multiple(i, pivot_row, &-&q);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Integer vectors `x` with `m x = 0`, as a Z-basis in Hermite form.
pub fn integer_kernel(m: &IntegerMatrix) -> Vec<Vec<Int>> {
    let n = m.cols();
    if m.rows() == 0 {
        return (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Int::one() } else { Int::zero() })
                    .collect()
            })
            .collect();
    }
    // u m^T = h; rows of u against zero rows of h span the left kernel of m^T.
    let (h, u) = hermite_normal_form(&m.transpose());
    let kernel: Vec<Vec<Int>> = (0..n)
        .filter(|&i| h.row(i).iter().all(Zero::is_zero))
        .map(|i| u.row(i).to_vec())
        .collect();
    hermite_rows(&kernel, n)
}

/// Nonzero rows of the Hermite form of the given rows.
pub fn hermite_rows(rows: &[Vec<Int>], n: usize) -> Vec<Vec<Int>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let (h, _) = hermite_normal_form(&IntegerMatrix::from_rows(rows.to_vec(), n));
    (0..h.rows())
        .map(|i| h.row(i).to_vec())
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect()
}

/// Z-basis of the saturation `Z^n ∩ span_Q(generators)`, in Hermite form.
pub fn saturated_lattice_basis(generators: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let Some(n) = generators.first().map(Vec::len) else {
        return Vec::new();
    };
    let g = RationalMatrix::from_rows(generators.iter().map(|v| ints_to_rats(v)).collect(), n);
    let annihilator: Vec<Vec<Int>> = kernel_basis(&g)
        .iter()
        .map(|w| integral_direction(w))
        .collect();
    integer_kernel(&IntegerMatrix::from_rows(annihilator, n))
}

/// Whether `v` is a nonnegative combination of `rays`. Exact: the affine
/// solution set of `R c = v` is parametrised and nonnegativity is decided
/// by Fourier-Motzkin elimination.
pub fn cone_member(v: &[Rat], rays: &[Vec<Rat>]) -> bool {
    if rays.is_empty() {
        return v.iter().all(Zero::is_zero);
    }
    let r = RationalMatrix::from_columns(rays, v.len());
    let Some(c0) = r.solve(v) else {
        return false;
    };
    let k = kernel_basis(&r);
    if k.is_empty() {
        return c0.iter().all(|x| !x.is_negative());
    }
    // c = c0 + K t >= 0
    let ineqs: Vec<Inequality> = (0..rays.len())
        .map(|i| Inequality {
            coeffs: k.iter().map(|kv| kv[i].clone()).collect(),
            rhs: -c0[i].clone(),
        })
        .collect();
    feasible_point(&ineqs, k.len()).is_some()
}
