//! Fourier-Motzkin elimination with back-substitution.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::Rat;

/// `coeffs · x >= rhs`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

impl Inequality {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Self { coeffs, rhs }
    }

    fn is_satisfied(&self, x: &[Rat]) -> bool {
        super::dot(&self.coeffs, x) >= self.rhs
    }
}

/// A point satisfying every inequality, or `None` if the system is
/// infeasible. Variables are eliminated in index order; the witness is
/// rebuilt in reverse, preferring integers where the bounds allow it.
pub fn feasible_point(ineqs: &[Inequality], nvars: usize) -> Option<Vec<Rat>> {
    let mut stages: Vec<Vec<Inequality>> = Vec::with_capacity(nvars + 1);
    let mut current = normalize(ineqs.to_vec())?;
    for k in 0..nvars {
        let next = eliminate(&current, k)?;
        stages.push(current);
        current = next;
    }
    // `current` has no variables left and passed normalization.
    let mut x = vec![Rat::zero(); nvars];
    for k in (0..nvars).rev() {
        let mut lo: Option<Rat> = None;
        let mut hi: Option<Rat> = None;
        for q in &stages[k] {
            let a = &q.coeffs[k];
            if a.is_zero() {
                continue;
            }
            let rest: Rat = (k + 1..nvars).map(|j| &q.coeffs[j] * &x[j]).sum();
            let bound = (&q.rhs - rest) / a;
            if a.is_positive() {
                if lo.as_ref().is_none_or(|l| bound > *l) {
                    lo = Some(bound);
                }
            } else if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        }
        x[k] = match (lo, hi) {
            (Some(l), Some(h)) => {
                let c = Rat::from_integer(l.ceil().to_integer());
                if c <= h {
                    c
                } else {
                    l
                }
            }
            (Some(l), None) => Rat::from_integer(l.ceil().to_integer()),
            (None, Some(h)) => Rat::from_integer(h.floor().to_integer()),
            (None, None) => Rat::zero(),
        };
    }
    debug_assert!(ineqs.iter().all(|q| q.is_satisfied(&x)));
    Some(x)
}

/// Scales each row so its first nonzero coefficient has absolute value one
/// and keeps only the tightest right-hand side per direction. Returns `None`
/// if a constant row `0 >= b` with `b > 0` appears.
fn normalize(rows: Vec<Inequality>) -> Option<Vec<Inequality>> {
    let mut best: HashMap<Vec<Rat>, Rat> = HashMap::new();
    let mut order: Vec<Vec<Rat>> = Vec::new();
    for q in rows {
        let Some(lead) = q.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) else {
            if q.rhs.is_positive() {
                return None;
            }
            continue;
        };
        let coeffs: Vec<Rat> = q.coeffs.iter().map(|c| c / &lead).collect();
        let rhs = &q.rhs / &lead;
        match best.get_mut(&coeffs) {
            Some(r) => {
                if rhs > *r {
                    *r = rhs;
                }
            }
            None => {
                order.push(coeffs.clone());
                best.insert(coeffs, rhs);
            }
        }
    }
    Some(
        order
            .into_iter()
            .map(|c| {
                let rhs = best[&c].clone();
                Inequality { coeffs: c, rhs }
            })
            .collect(),
    )
}

fn eliminate(rows: &[Inequality], k: usize) -> Option<Vec<Inequality>> {
    let mut out = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for q in rows {
        if q.coeffs[k].is_zero() {
            out.push(q.clone());
        } else if q.coeffs[k].is_positive() {
            pos.push(q);
        } else {
            neg.push(q);
        }
    }
    for p in &pos {
        for n in &neg {
            let a = &p.coeffs[k];
            let b = -&n.coeffs[k];
            let coeffs: Vec<Rat> = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(x, y)| x / a + y / &b)
                .collect();
            out.push(Inequality {
                coeffs,
                rhs: &p.rhs / a + &n.rhs / &b,
            });
        }
    }
    normalize(out)
}
