//! Rational polyhedral fans in `N_Q = Q^n`.
//!
//! A fan is given by primitive ray generators and its maximal cones (as
//! sets of ray indices). Construction validates every fan axiom exactly and
//! precomputes the face lattice: a set `S` of rays of a cone spans a face
//! iff some functional vanishes on `S` and is positive on the other rays,
//! which is a Fourier-Motzkin feasibility question.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::exactlin::{
    self, feasible_point, ints_to_rats, is_primitive, kernel_basis, saturated_lattice_basis,
    Inequality, Int, Rat, RationalMatrix,
};

/// Cones with more rays than this are rejected; face enumeration is by subset.
pub const MAX_CONE_RAYS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("lattice rank must be positive")]
    ZeroLatticeRank,
    #[error("ray {ray} has {found} coordinates, expected {expected}")]
    RayDimension {
        ray: usize,
        expected: usize,
        found: usize,
    },
    #[error("ray {ray} is the zero vector")]
    ZeroRay { ray: usize },
    #[error("NonPrimitiveRay: ray {ray} = {vector} is not primitive (gcd of entries is not 1)")]
    NonPrimitiveRay { ray: usize, vector: String },
    #[error("rays {first} and {second} coincide")]
    DuplicateRay { first: usize, second: usize },
    #[error("cone {cone} has no rays")]
    EmptyCone { cone: usize },
    #[error("cone {cone} refers to ray {index}, which does not exist")]
    RayIndexOutOfRange { cone: usize, index: usize },
    #[error("cone {cone} lists ray {index} twice")]
    RepeatedRayInCone { cone: usize, index: usize },
    #[error("cone {cone} has more than {MAX_CONE_RAYS} rays")]
    ConeTooLarge { cone: usize },
    #[error("NotStronglyConvex: cone {cone} contains a line")]
    NotStronglyConvex { cone: usize },
    #[error("NotAFan: {reason}")]
    NotAFan {
        first: usize,
        second: Option<usize>,
        reason: String,
    },
    #[error("ray {ray} is not used by any maximal cone")]
    UnusedRay { ray: usize },
}

/// A cone of the fan: its rays, dimension and a Z-basis of `N ∩ span(σ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    rays: Vec<usize>,
    dim: usize,
    lattice_basis: Vec<Vec<Int>>,
    coordinate_map: RationalMatrix,
}

impl Cone {
    fn new(rays: Vec<usize>, vectors: &[Vec<Int>], n: usize) -> Self {
        let gens: Vec<Vec<Int>> = rays.iter().map(|&r| vectors[r].clone()).collect();
        let lattice_basis = if gens.is_empty() {
            Vec::new()
        } else {
            saturated_lattice_basis(&gens)
        };
        let dim = lattice_basis.len();
        let basis = RationalMatrix::from_columns(
            &lattice_basis
                .iter()
                .map(|v| ints_to_rats(v))
                .collect::<Vec<_>>(),
            n,
        );
        let coordinate_map = if dim == 0 {
            RationalMatrix::zeros(0, n)
        } else {
            basis
                .left_inverse()
                .expect("saturated basis has full column rank")
        };
        Self {
            rays,
            dim,
            lattice_basis,
            coordinate_map,
        }
    }

    pub fn rays(&self) -> &[usize] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lattice_basis(&self) -> &[Vec<Int>] {
        &self.lattice_basis
    }

    /// `n × dim` matrix whose columns are the saturated lattice basis.
    pub fn basis_matrix(&self) -> RationalMatrix {
        let n = self.coordinate_map.cols();
        RationalMatrix::from_columns(
            &self
                .lattice_basis
                .iter()
                .map(|v| ints_to_rats(v))
                .collect::<Vec<_>>(),
            n,
        )
    }

    /// `dim × n` left inverse of [`Cone::basis_matrix`]; exact on `span(σ)`.
    pub fn coordinate_map(&self) -> &RationalMatrix {
        &self.coordinate_map
    }

    /// Coordinates of `v ∈ span(σ)` in the saturated lattice basis.
    pub fn coordinates(&self, v: &[Rat]) -> Vec<Rat> {
        self.coordinate_map.mul_vec(v)
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    pub fn contains_ray(&self, ray: usize) -> bool {
        self.rays.binary_search(&ray).is_ok()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.rays.iter().all(|r| other.contains_ray(*r))
    }
}

/// Whether the generators are linearly independent.
pub fn is_simplicial_rays(rays: &[Vec<Int>]) -> bool {
    let Some(n) = rays.first().map(Vec::len) else {
        return true;
    };
    let m = RationalMatrix::from_rows(rays.iter().map(|v| ints_to_rats(v)).collect(), n);
    m.rank() == rays.len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    lattice_rank: usize,
    rays: Vec<Vec<Int>>,
    maximal: Vec<Cone>,
    faces: Vec<Cone>,
}

impl Fan {
    /// Validates raw fan data and computes the face lattice.
    pub fn new(
        lattice_rank: usize,
        rays: Vec<Vec<Int>>,
        maximal_cones: Vec<Vec<usize>>,
    ) -> Result<Self, FanError> {
        let n = lattice_rank;
        if n == 0 {
            return Err(FanError::ZeroLatticeRank);
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != n {
                return Err(FanError::RayDimension {
                    ray: i,
                    expected: n,
                    found: r.len(),
                });
            }
            if r.iter().all(Zero::is_zero) {
                return Err(FanError::ZeroRay { ray: i });
            }
            if !is_primitive(r) {
                return Err(FanError::NonPrimitiveRay {
                    ray: i,
                    vector: format_vector(r),
                });
            }
            if let Some(j) = rays[..i].iter().position(|s| s == r) {
                return Err(FanError::DuplicateRay {
                    first: j,
                    second: i,
                });
            }
        }
        let mut cones = Vec::with_capacity(maximal_cones.len());
        for (c, raw) in maximal_cones.into_iter().enumerate() {
            if raw.is_empty() {
                return Err(FanError::EmptyCone { cone: c });
            }
            if raw.len() > MAX_CONE_RAYS {
                return Err(FanError::ConeTooLarge { cone: c });
            }
            let mut seen = BTreeSet::new();
            for &i in &raw {
                if i >= rays.len() {
                    return Err(FanError::RayIndexOutOfRange { cone: c, index: i });
                }
                if !seen.insert(i) {
                    return Err(FanError::RepeatedRayInCone { cone: c, index: i });
                }
            }
            cones.push(seen.into_iter().collect::<Vec<_>>());
        }

        let qrays: Vec<Vec<Rat>> = rays.iter().map(|r| ints_to_rats(r)).collect();
        for (c, cone) in cones.iter().enumerate() {
            let gens: Vec<&Vec<Rat>> = cone.iter().map(|&i| &qrays[i]).collect();
            if !separating_functional_exists(&[], &gens, n) {
                return Err(FanError::NotStronglyConvex { cone: c });
            }
            for &r in cone {
                let others: Vec<&Vec<Rat>> = cone
                    .iter()
                    .filter(|&&i| i != r)
                    .map(|&i| &qrays[i])
                    .collect();
                if !separating_functional_exists(&[&qrays[r]], &others, n) {
                    return Err(FanError::NotAFan {
                        first: c,
                        second: None,
                        reason: format!("ray {r} does not span an extremal ray of cone {c}"),
                    });
                }
            }
        }
        for a in 0..cones.len() {
            for b in a + 1..cones.len() {
                check_pair(&cones, a, b, &qrays, n)?;
            }
        }
        let used: BTreeSet<usize> = cones.iter().flatten().copied().collect();
        if let Some(r) = (0..rays.len()).find(|r| !used.contains(r)) {
            return Err(FanError::UnusedRay { ray: r });
        }

        let mut face_sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for cone in &cones {
            let m = cone.len();
            for mask in 0u32..(1u32 << m) {
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    (0..m).partition(|&k| mask & (1 << k) != 0);
                let zero: Vec<&Vec<Rat>> = inside.iter().map(|&k| &qrays[cone[k]]).collect();
                let pos: Vec<&Vec<Rat>> = outside.iter().map(|&k| &qrays[cone[k]]).collect();
                if separating_functional_exists(&zero, &pos, n) {
                    face_sets.insert(inside.iter().map(|&k| cone[k]).collect());
                }
            }
        }
        let mut faces: Vec<Cone> = face_sets
            .into_iter()
            .map(|s| Cone::new(s, &rays, n))
            .collect();
        faces.sort_by(|x, y| (x.dim, &x.rays).cmp(&(y.dim, &y.rays)));
        let maximal = cones.into_iter().map(|s| Cone::new(s, &rays, n)).collect();
        Ok(Self {
            lattice_rank: n,
            rays,
            maximal,
            faces,
        })
    }

    pub fn from_i64(n: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Result<Self, FanError> {
        Self::new(
            n,
            rays.iter().map(|r| exactlin::int_vec(r)).collect(),
            cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[Int] {
        &self.rays[i]
    }

    pub fn ray_rat(&self, i: usize) -> Vec<Rat> {
        ints_to_rats(&self.rays[i])
    }

    pub fn maximal_cones(&self) -> &[Cone] {
        &self.maximal
    }

    /// Every cone of the fan, sorted by dimension then ray indices.
    pub fn faces(&self) -> &[Cone] {
        &self.faces
    }

    pub fn face(&self, rays: &[usize]) -> Option<&Cone> {
        self.faces.iter().find(|f| f.rays == rays)
    }

    /// Indices of the maximal cones containing the face spanned by `rays`.
    pub fn maximal_containing(&self, rays: &[usize]) -> Vec<usize> {
        self.maximal
            .iter()
            .enumerate()
            .filter(|(_, c)| rays.iter().all(|r| c.contains_ray(*r)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Ray generators of a cone as rational vectors, in cone order.
    pub fn cone_vectors(&self, cone: &Cone) -> Vec<Vec<Rat>> {
        cone.rays.iter().map(|&r| self.ray_rat(r)).collect()
    }

    /// `n × m` matrix whose columns are the cone's ray generators.
    pub fn ray_matrix(&self, cone: &Cone) -> RationalMatrix {
        RationalMatrix::from_columns(&self.cone_vectors(cone), self.lattice_rank)
    }

    /// Pairs of maximal cones sharing at least one ray, with the shared rays.
    /// By the fan axiom the rays span the intersection.
    pub fn shared_faces(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let mut out = Vec::new();
        for a in 0..self.maximal.len() {
            for b in a + 1..self.maximal.len() {
                let common: Vec<usize> = self.maximal[a]
                    .rays
                    .iter()
                    .copied()
                    .filter(|r| self.maximal[b].contains_ray(*r))
                    .collect();
                if !common.is_empty() {
                    out.push((a, b, common));
                }
            }
        }
        out
    }

    pub fn is_pure(&self) -> bool {
        self.maximal.iter().all(|c| c.dim == self.lattice_rank)
    }

    /// `(n-1)`-dimensional faces with the maximal cones containing them.
    pub fn facets_shared(&self) -> BTreeMap<Vec<usize>, Vec<usize>> {
        self.faces
            .iter()
            .filter(|f| f.dim + 1 == self.lattice_rank)
            .map(|f| (f.rays.clone(), self.maximal_containing(&f.rays)))
            .collect()
    }

    /// Pure, every facet in exactly two maximal cones, and the maximal cones
    /// connected through shared facets.
    pub fn is_complete(&self) -> bool {
        if self.maximal.is_empty() || !self.is_pure() {
            return false;
        }
        let facets = self.facets_shared();
        if facets.values().any(|inc| inc.len() != 2) {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.maximal.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for inc in facets.values() {
            let (a, b) = (find(&mut parent, inc[0]), find(&mut parent, inc[1]));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..self.maximal.len()).all(|i| find(&mut parent, i) == root)
    }

    /// The smallest cone of the fan containing `v`, if `v ∈ |Σ|`.
    pub fn locate(&self, v: &[Rat]) -> Option<&Cone> {
        assert_eq!(v.len(), self.lattice_rank);
        self.faces
            .iter()
            .find(|f| exactlin::cone_member(v, &self.cone_vectors(f)))
    }
}

/// Whether some functional `u` has `u·z = 0` on `zero` and `u·p >= 1` on `pos`.
fn separating_functional_exists(zero: &[&Vec<Rat>], pos: &[&Vec<Rat>], n: usize) -> bool {
    let params: Vec<Vec<Rat>> = if zero.is_empty() {
        RationalMatrix::identity(n).row_vecs()
    } else {
        let z = RationalMatrix::from_rows(zero.iter().map(|v| (*v).clone()).collect(), n);
        kernel_basis(&z)
    };
    if params.is_empty() {
        return pos.is_empty();
    }
    let ineqs: Vec<Inequality> = pos
        .iter()
        .map(|p| Inequality {
            coeffs: params.iter().map(|k| exactlin::dot(k, p)).collect(),
            rhs: Rat::from_integer(1.into()),
        })
        .collect();
    feasible_point(&ineqs, params.len()).is_some()
}

/// The intersection of two cones must be the common face spanned by their
/// shared rays; this holds iff a functional vanishes on the shared rays and
/// is positive on the remaining rays of one cone and negative on the other's.
fn check_pair(
    cones: &[Vec<usize>],
    a: usize,
    b: usize,
    qrays: &[Vec<Rat>],
    n: usize,
) -> Result<(), FanError> {
    let (ca, cb) = (&cones[a], &cones[b]);
    let subset = |x: &[usize], y: &[usize]| x.iter().all(|r| y.contains(r));
    if subset(ca, cb) || subset(cb, ca) {
        let (small, big) = if subset(ca, cb) { (a, b) } else { (b, a) };
        return Err(FanError::NotAFan {
            first: small,
            second: Some(big),
            reason: format!("cone {small} is contained in cone {big}; list only maximal cones"),
        });
    }
    let common: Vec<&Vec<Rat>> = ca
        .iter()
        .filter(|r| cb.contains(r))
        .map(|&r| &qrays[r])
        .collect();
    let neg: Vec<Vec<Rat>> = cb
        .iter()
        .filter(|r| !ca.contains(r))
        .map(|&r| qrays[r].iter().map(|x| -x).collect())
        .collect();
    let mut pos: Vec<&Vec<Rat>> = ca
        .iter()
        .filter(|r| !cb.contains(r))
        .map(|&r| &qrays[r])
        .collect();
    pos.extend(neg.iter());
    if separating_functional_exists(&common, &pos, n) {
        Ok(())
    } else {
        Err(FanError::NotAFan {
            first: a,
            second: Some(b),
            reason: format!(
                "cones {a} and {b} intersect outside their common face {:?}",
                ca.iter().filter(|r| cb.contains(r)).collect::<Vec<_>>()
            ),
        })
    }
}

fn format_vector(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}
