//! Sparse multivariate polynomials over Q.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exactlin::{Int, Rat};

/// A polynomial in `nvars` variables; keys are exponent vectors and no
/// stored coefficient is zero, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rat::one());
        p
    }

    /// `Σ coeffs[k]·x_k`.
    pub fn linear(coeffs: &[Rat]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[k] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    /// Sums repeated monomials; panics if an exponent vector has the wrong length.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Rat, Vec<u32>)>) -> Self {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.nvars), |acc, _| &acc * self)
    }

    pub fn evaluate(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(x).fold(c.clone(), |acc, (&k, xi)| {
                    acc * num_traits::pow(xi.clone(), k as usize)
                })
            })
            .sum()
    }

    /// Substitutes `x_i = forms[i]·y`, giving a polynomial in `m` variables.
    pub fn compose_linear(&self, forms: &[Vec<Rat>], m: usize) -> Self {
        assert_eq!(forms.len(), self.nvars);
        let lin: Vec<Polynomial> = forms
            .iter()
            .map(|f| {
                assert_eq!(f.len(), m);
                Self::linear(f)
            })
            .collect();
        let mut powers: Vec<Vec<Polynomial>> =
            lin.iter().map(|l| vec![Self::one(m), l.clone()]).collect();
        let mut out = Self::zero(m);
        for (e, c) in &self.terms {
            let mut term = Self::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &lin[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][k as usize];
            }
            out = &out + &term;
        }
        out
    }

    /// Invariance under every transposition of variables.
    pub fn is_symmetric(&self) -> bool {
        (1..self.nvars).all(|j| {
            self.terms.iter().all(|(e, c)| {
                let mut s = e.clone();
                s.swap(0, j);
                self.terms.get(&s) == Some(c)
            })
        })
    }

    /// The `i`-th elementary symmetric polynomial in `r` variables.
    pub fn elementary_symmetric(r: usize, i: usize) -> Self {
        let mut p = Self::zero(r);
        if i > r {
            return p;
        }
        let mut pick: Vec<usize> = (0..i).collect();
        loop {
            let mut e = vec![0; r];
            for &k in &pick {
                e[k] = 1;
            }
            p.add_term(e, Rat::one());
            // Next i-subset in lexicographic order.
            let Some(pos) = (0..i).rev().find(|&k| pick[k] < r - i + k) else {
                break;
            };
            pick[pos] += 1;
            for k in pos + 1..i {
                pick[k] = pick[k - 1] + 1;
            }
        }
        p
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rat::one())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut p = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        if k == 1 {
                            format!("x{i}")
                        } else {
                            format!("x{i}^{k}")
                        }
                    })
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else if c.is_one() {
                    mono.join("*")
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Integer roots with multiplicity of the monic-up-to-sign polynomial with
/// integer coefficients `coeffs` (highest degree first), or `None` if it does
/// not split into integer linear factors. Roots come out in no particular order.
pub fn integer_roots(coeffs: &[Int]) -> Option<Vec<Int>> {
    let mut p: Vec<Int> = coeffs.to_vec();
    while p.first().is_some_and(Zero::is_zero) {
        p.remove(0);
    }
    let mut roots = Vec::new();
    while p.len() > 1 {
        let last = p.last().unwrap().clone();
        let root = if last.is_zero() {
            Int::zero()
        } else {
            divisors(&last)
                .into_iter()
                .flat_map(|d| [d.clone(), -d])
                .find(|d| horner(&p, d).is_zero())?
        };
        p = deflate(&p, &root);
        roots.push(root);
    }
    Some(roots)
}

fn horner(p: &[Int], x: &Int) -> Int {
    p.iter().fold(Int::zero(), |acc, c| acc * x + c)
}

/// Quotient of `p` by `(t - root)`; the remainder is zero by construction.
fn deflate(p: &[Int], root: &Int) -> Vec<Int> {
    let mut q = Vec::with_capacity(p.len() - 1);
    let mut acc = Int::zero();
    for c in &p[..p.len() - 1] {
        acc = acc * root + c;
        q.push(acc.clone());
    }
    q
}

fn divisors(n: &Int) -> Vec<Int> {
    let n = num_traits::Signed::abs(n);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = Int::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{int, int_vec, rat, rat_vec};
    use proptest::prelude::*;

    fn t(c: i64, e: &[u32]) -> (Rat, Vec<u32>) {
        (rat(c), e.to_vec())
    }

    #[test]
    fn canonical_form_ignores_term_order() {
        let a = Polynomial::from_terms(2, [t(3, &[1, 0]), t(1, &[0, 2]), t(-1, &[1, 0])]);
        let b = Polynomial::from_terms(2, [t(1, &[0, 2]), t(2, &[1, 0])]);
        assert_eq!(a, b);
        let c = Polynomial::from_terms(1, [t(3, &[1]), t(1, &[2])]);
        assert_ne!(Polynomial::from_terms(1, [t(3, &[1])]), c);
        assert!(Polynomial::from_terms(1, [t(1, &[1]), t(-1, &[1])]).is_zero());
    }

    #[test]
    fn elementary_symmetric_polynomials() {
        let e2 = Polynomial::elementary_symmetric(3, 2);
        assert_eq!(e2.terms().count(), 3);
        assert!(e2.is_symmetric());
        assert_eq!(e2.evaluate(&rat_vec(&[1, 2, 3])), rat(11));
        assert_eq!(Polynomial::elementary_symmetric(3, 0), Polynomial::one(3));
        assert!(Polynomial::elementary_symmetric(2, 3).is_zero());
        assert!(!Polynomial::var(2, 0).is_symmetric());
    }

    #[test]
    fn compose_linear_examples() {
        // e1(2t, t) = 3t, e2(2t, t) = 2t^2
        let forms = vec![rat_vec(&[2]), rat_vec(&[1])];
        let e1 = Polynomial::elementary_symmetric(2, 1).compose_linear(&forms, 1);
        assert_eq!(e1, Polynomial::from_terms(1, [t(3, &[1])]));
        let e2 = Polynomial::elementary_symmetric(2, 2).compose_linear(&forms, 1);
        assert_eq!(e2, Polynomial::from_terms(1, [t(2, &[2])]));
    }

    #[test]
    fn integer_root_examples() {
        let mut r = integer_roots(&int_vec(&[1, -3, 2])).unwrap();
        r.sort();
        assert_eq!(r, int_vec(&[1, 2]));
        assert_eq!(
            integer_roots(&int_vec(&[1, 0, 0])).unwrap(),
            int_vec(&[0, 0])
        );
        assert_eq!(integer_roots(&int_vec(&[1, -1, 1])), None);
        assert_eq!(integer_roots(&int_vec(&[1, 0, -2])), None);
        assert_eq!(integer_roots(&[int(1)]).unwrap(), Vec::<Int>::new());
    }

    proptest! {
        #[test]
        fn roots_of_products_are_recovered(roots in proptest::collection::vec(-6i64..=6, 0..5)) {
            // Oracle: expand prod (t - a) directly.
            let mut p = vec![int(1)];
            for &a in &roots {
                let mut q = vec![int(0); p.len() + 1];
                for (k, c) in p.iter().enumerate() {
                    q[k] += c;
                    q[k + 1] -= c * int(a);
                }
                p = q;
            }
            let mut got = integer_roots(&p).unwrap();
            got.sort();
            let mut want = int_vec(&roots);
            want.sort();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn composition_commutes_with_evaluation(
            coeffs in proptest::collection::vec(-3i64..=3, 4),
            forms in proptest::collection::vec(-2i64..=2, 4),
            y in proptest::collection::vec(-3i64..=3, 2),
        ) {
            let p = Polynomial::from_terms(2, [
                t(coeffs[0], &[0, 0]), t(coeffs[1], &[1, 0]), t(coeffs[2], &[1, 1]), t(coeffs[3], &[0, 3]),
            ]);
            let forms = vec![rat_vec(&forms[..2]), rat_vec(&forms[2..])];
            let y = rat_vec(&y);
            let x: Vec<Rat> = forms.iter().map(|f| crate::exactlin::dot(f, &y)).collect();
            prop_assert_eq!(p.compose_linear(&forms, 2).evaluate(&y), p.evaluate(&x));
        }
    }
}
