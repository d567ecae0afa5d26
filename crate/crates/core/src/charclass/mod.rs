//! Piecewise polynomial functions on a fan and the equivariant
//! characteristic class `q ↦ q̃∘Φ` of a piecewise linear map.

mod poly;

use std::sync::Arc;

pub use poly::{integer_roots, Polynomial};

use thiserror::Error;

use crate::exactlin::{ints_to_rats, Int, Rat};
use crate::fan::{Cone, Fan};
use crate::par;
use crate::plmap::PLMap;
use crate::weyl::{parabolic_type, DominantWeight, ParabolicType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharClassError {
    #[error("NotSymmetric: the polynomial is not invariant under permuting variables")]
    NotSymmetric,
    #[error("expected a polynomial in {expected} variables, found {found}")]
    VariableCount { expected: usize, found: usize },
    #[error("expected {expected} pieces (one per maximal cone), found {found}")]
    PieceCount { expected: usize, found: usize },
    #[error(
        "expected {expected} classes (one per elementary symmetric polynomial), found {found}"
    )]
    ClassCount { expected: usize, found: usize },
    #[error(
        "pieces on maximal cones {first:?} and {second:?} disagree on their common face {face:?}"
    )]
    FaceDisagreement {
        first: Vec<usize>,
        second: Vec<usize>,
        face: Vec<usize>,
    },
    #[error("NonIntegralOrbit: at ray {ray}, t^r - c1 t^(r-1) + ... with c = ({coefficients}) has no integer factorisation")]
    NonIntegralOrbit { ray: usize, coefficients: String },
    #[error("ray {ray} does not exist")]
    NoSuchRay { ray: usize },
}

/// One polynomial in the ambient coordinates of `N_Q` per maximal cone;
/// only its restriction to the span of the cone matters.
#[derive(Debug, Clone)]
pub struct PiecewisePolynomial {
    fan: Arc<Fan>,
    pieces: Vec<Polynomial>,
}

/// Restriction of `p` to `span(cone)` in saturated lattice coordinates.
pub fn restrict(p: &Polynomial, cone: &Cone) -> Polynomial {
    let b = cone.basis_matrix();
    let forms: Vec<Vec<Rat>> = (0..b.rows()).map(|i| b.row(i).to_vec()).collect();
    p.compose_linear(&forms, cone.dim())
}

impl PiecewisePolynomial {
    pub fn new(fan: Arc<Fan>, pieces: Vec<Polynomial>) -> Result<Self, CharClassError> {
        let expected = fan.maximal_cones().len();
        if pieces.len() != expected {
            return Err(CharClassError::PieceCount {
                expected,
                found: pieces.len(),
            });
        }
        if let Some(p) = pieces.iter().find(|p| p.nvars() != fan.lattice_rank()) {
            return Err(CharClassError::VariableCount {
                expected: fan.lattice_rank(),
                found: p.nvars(),
            });
        }
        Ok(Self { fan, pieces })
    }

    pub fn constant(fan: Arc<Fan>, c: Rat) -> Self {
        let n = fan.lattice_rank();
        let pieces = vec![Polynomial::constant(n, c); fan.maximal_cones().len()];
        Self { fan, pieces }
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    /// Pieces indexed like `fan.maximal_cones()`.
    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    /// Each piece restricted to the span of its cone.
    pub fn restricted_pieces(&self) -> Vec<Polynomial> {
        self.pieces
            .iter()
            .zip(self.fan.maximal_cones())
            .map(|(p, c)| restrict(p, c))
            .collect()
    }

    /// Value at a point of `|Σ|`, or `None` outside the support.
    pub fn evaluate(&self, v: &[Rat]) -> Option<Rat> {
        let tau = self.fan.locate(v)?;
        let c = self.fan.maximal_containing(tau.rays())[0];
        Some(self.pieces[c].evaluate(v))
    }

    /// Pairs of maximal cones whose pieces differ on the common face
    /// (possibly just the origin).
    pub fn face_violations(&self) -> Vec<CharClassError> {
        let cones = self.fan.maximal_cones();
        let pairs: Vec<(usize, usize, Vec<usize>)> = (0..cones.len())
            .flat_map(|a| (a + 1..cones.len()).map(move |b| (a, b)))
            .map(|(a, b)| {
                let common = cones[a]
                    .rays()
                    .iter()
                    .copied()
                    .filter(|r| cones[b].contains_ray(*r))
                    .collect();
                (a, b, common)
            })
            .collect();
        par::map(&pairs, |(a, b, face)| {
            let tau = self.fan.face(face).expect("shared rays span a face");
            (restrict(&self.pieces[*a], tau) != restrict(&self.pieces[*b], tau)).then(|| {
                CharClassError::FaceDisagreement {
                    first: self.fan.maximal_cones()[*a].rays().to_vec(),
                    second: self.fan.maximal_cones()[*b].rays().to_vec(),
                    face: face.clone(),
                }
            })
        })
        .into_iter()
        .flatten()
        .collect()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Self {
        assert!(
            *self.fan == *other.fan,
            "piecewise polynomials on different fans"
        );
        Self {
            fan: self.fan.clone(),
            pieces: self
                .pieces
                .iter()
                .zip(&other.pieces)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }
}

/// Equality as functions on `|Σ|`: each pair of pieces agrees on the span
/// of its cone.
pub fn pp_equal(p1: &PiecewisePolynomial, p2: &PiecewisePolynomial) -> bool {
    *p1.fan == *p2.fan && p1.restricted_pieces() == p2.restricted_pieces()
}

/// `q̃∘Φ`: on each maximal cone, `q` applied to the chart's weight functionals.
pub fn chern_weil(phi: &PLMap, q: &Polynomial) -> Result<PiecewisePolynomial, CharClassError> {
    if q.nvars() != phi.rank() {
        return Err(CharClassError::VariableCount {
            expected: phi.rank(),
            found: q.nvars(),
        });
    }
    if !q.is_symmetric() {
        return Err(CharClassError::NotSymmetric);
    }
    let n = phi.fan().lattice_rank();
    let pieces = par::map(phi.charts(), |chart| {
        q.compose_linear(&chart.functionals().row_vecs(), n)
    });
    Ok(PiecewisePolynomial {
        fan: phi.fan().clone(),
        pieces,
    })
}

/// `Ψ(e_1), ..., Ψ(e_r)` for a homomorphism `Ψ` from the symmetric
/// polynomials in `r` variables to piecewise polynomials.
#[derive(Debug, Clone)]
pub struct PsiData {
    rank: usize,
    classes: Vec<PiecewisePolynomial>,
}

impl PsiData {
    pub fn new(rank: usize, classes: Vec<PiecewisePolynomial>) -> Result<Self, CharClassError> {
        if classes.len() != rank {
            return Err(CharClassError::ClassCount {
                expected: rank,
                found: classes.len(),
            });
        }
        if let Some(e) = classes
            .iter()
            .flat_map(PiecewisePolynomial::face_violations)
            .next()
        {
            return Err(e);
        }
        Ok(Self { rank, classes })
    }

    /// The classes `e_i(Φ)` of a piecewise linear map.
    pub fn of_map(phi: &PLMap) -> Self {
        let classes = (1..=phi.rank())
            .map(|i| {
                chern_weil(phi, &Polynomial::elementary_symmetric(phi.rank(), i))
                    .expect("elementary symmetric polynomials are symmetric")
            })
            .collect();
        Self {
            rank: phi.rank(),
            classes,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn fan(&self) -> &Arc<Fan> {
        self.classes
            .first()
            .map(PiecewisePolynomial::fan)
            .expect("rank is positive")
    }

    /// `classes()[i]` is `Ψ(e_{i+1})`.
    pub fn classes(&self) -> &[PiecewisePolynomial] {
        &self.classes
    }

    /// Generators whose degree exceeds their index on some cone; these are
    /// warnings only.
    pub fn degree_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, c) in self.classes.iter().enumerate() {
            for (p, cone) in c.restricted_pieces().iter().zip(c.fan.maximal_cones()) {
                if p.degree().is_some_and(|d| d as usize > i + 1) {
                    out.push(format!(
                        "class of e{} has degree {} on cone {:?}",
                        i + 1,
                        p.degree().unwrap(),
                        cone.rays()
                    ));
                }
            }
        }
        out
    }
}

pub fn pp_equal_psi(a: &PsiData, b: &PsiData) -> bool {
    a.rank == b.rank
        && a.classes
            .iter()
            .zip(&b.classes)
            .all(|(x, y)| pp_equal(x, y))
}

/// The dominant weight at a ray: the integer roots of
/// `t^r - c1 t^(r-1) + c2 t^(r-2) - ...` with `c_i = Ψ(e_i)(v_ρ)`.
pub fn psi_ray_weights(psi: &PsiData, ray: usize) -> Result<DominantWeight, CharClassError> {
    let fan = psi.fan();
    if ray >= fan.rays().len() {
        return Err(CharClassError::NoSuchRay { ray });
    }
    let v = ints_to_rats(fan.ray(ray));
    let cs: Vec<Rat> = psi
        .classes
        .iter()
        .map(|c| c.evaluate(&v).expect("rays lie in the support"))
        .collect();
    let non_integral = || CharClassError::NonIntegralOrbit {
        ray,
        coefficients: cs
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(","),
    };
    if cs.iter().any(|c| !c.is_integer()) {
        return Err(non_integral());
    }
    let mut coeffs: Vec<Int> = vec![Int::from(1)];
    for (i, c) in cs.iter().enumerate() {
        let c = c.to_integer();
        coeffs.push(if i % 2 == 0 { -c } else { c });
    }
    let mut roots = integer_roots(&coeffs).ok_or_else(non_integral)?;
    roots.sort_by(|a, b| b.cmp(a));
    let weights: Option<Vec<i64>> = roots.iter().map(|r| i64::try_from(r).ok()).collect();
    Ok(DominantWeight::new(weights.ok_or_else(non_integral)?).expect("sorted descending"))
}

pub fn psi_ray_parabolic(psi: &PsiData, ray: usize) -> Result<ParabolicType, CharClassError> {
    psi_ray_weights(psi, ray).map(|d| parabolic_type(&d))
}
