//! Compatibility conditions for tuples of flags `(x_ρ Q_ρ)_ρ`, the
//! reconstruction of `Φ` from an accepted tuple, the census of torus-fixed
//! tuples, and the action of GL(r) on candidates.
//!
//! A maximal cone `σ` passes when its flags admit a common splitting basis,
//! the cocharacters `γ_ρ` forced by that basis satisfy the linear relations
//! of the rays, the resulting linear map is integral on `N ∩ span(σ)`, and
//! `e_i(γ)` reproduces `Ψ(e_i)` on `span(σ)`. The last two requirements can
//! be dropped with [`Conditions::RayValuesOnly`], which compares `Ψ` with
//! the `γ_ρ` at ray generators only.

mod census;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use census::{census, census_with, CensusOptions};

use crate::building::{common_splitting, Flag};
use crate::charclass::{psi_ray_weights, restrict, CharClassError, Polynomial, PsiData};
use crate::exactlin::{kernel_basis, rat, Int, Rat, RationalMatrix};
use crate::fan::Fan;
use crate::par;
use crate::plmap::{ChartSpec, PLMap, WeightCoords};
use crate::weyl::{parabolic_type, DominantWeight, ParabolicType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuliError {
    #[error("candidate has {found} flags but the fan has {expected} rays")]
    RayCount { expected: usize, found: usize },
    #[error("flag of ray {ray} lives in rank {found}, expected {expected}")]
    RankMismatch {
        ray: usize,
        expected: usize,
        found: usize,
    },
    #[error("TypeMismatch: flag at ray {ray} has block sizes {found:?}, but Ψ demands type {expected:?}")]
    TypeMismatch {
        ray: usize,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error(transparent)]
    Psi(#[from] CharClassError),
    #[error("verdict is not ACCEPTED")]
    NotAccepted,
    #[error("ReconstructionInconsistent: {0}")]
    ReconstructionInconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Accepted,
    Rejected,
    Indeterminate,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Accepted => "ACCEPTED",
            Status::Rejected => "REJECTED",
            Status::Indeterminate => "INDETERMINATE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Conditions {
    /// Ray conditions plus integrality and the class identity on each cone.
    #[default]
    Full,
    /// Only the conditions at ray generators.
    RayValuesOnly,
}

/// One flag per ray of the fan.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuliCandidate {
    rank: usize,
    flags: Vec<Flag>,
}

impl ModuliCandidate {
    pub fn new(rank: usize, flags: Vec<Flag>) -> Result<Self, ModuliError> {
        if let Some((ray, f)) = flags.iter().enumerate().find(|(_, f)| f.rank() != rank) {
            return Err(ModuliError::RankMismatch {
                ray,
                expected: rank,
                found: f.rank(),
            });
        }
        Ok(Self { rank, flags })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }
}

/// `g` applied to every flag.
pub fn act(g: &RationalMatrix, cand: &ModuliCandidate) -> ModuliCandidate {
    ModuliCandidate {
        rank: cand.rank,
        flags: cand.flags.iter().map(|f| f.apply(g)).collect(),
    }
}

/// Which checks a cone went through and how they came out. `None` means the
/// check was not reached or does not apply.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConeChecks {
    pub common_splitting: bool,
    pub linear_relations: Option<bool>,
    pub integral: Option<bool>,
    pub class_identity: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeVerdict {
    pub cone: Vec<usize>,
    pub status: Status,
    /// Columns form the splitting basis of `H_σ`.
    pub basis: Option<RationalMatrix>,
    /// `(ray, γ_ρ)` with `γ_ρ` in coordinates of the splitting basis.
    pub gammas: Vec<(usize, Vec<Int>)>,
    pub checks: ConeChecks,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub conditions: Conditions,
    pub cones: Vec<ConeVerdict>,
}

/// Dominant weight and parabolic type of `Ψ` at every ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayData {
    pub weights: DominantWeight,
    pub parabolic: ParabolicType,
}

pub fn ray_data(psi: &PsiData) -> Result<Vec<RayData>, ModuliError> {
    (0..psi.fan().rays().len())
        .map(|r| {
            let weights = psi_ray_weights(psi, r)?;
            let parabolic = parabolic_type(&weights);
            Ok(RayData { weights, parabolic })
        })
        .collect()
}

fn check_types(rays: &[RayData], cand: &ModuliCandidate) -> Result<(), ModuliError> {
    if cand.flags.len() != rays.len() {
        return Err(ModuliError::RayCount {
            expected: rays.len(),
            found: cand.flags.len(),
        });
    }
    for (ray, (f, d)) in cand.flags.iter().zip(rays).enumerate() {
        if f.rank() != d.weights.rank() {
            return Err(ModuliError::RankMismatch {
                ray,
                expected: d.weights.rank(),
                found: f.rank(),
            });
        }
        if f.block_sizes() != d.parabolic.blocks() {
            return Err(ModuliError::TypeMismatch {
                ray,
                expected: d.parabolic.blocks().to_vec(),
                found: f.block_sizes(),
            });
        }
    }
    Ok(())
}

pub fn check_membership(psi: &PsiData, cand: &ModuliCandidate) -> Result<Verdict, ModuliError> {
    check_membership_with(psi, cand, Conditions::Full)
}

pub fn check_membership_with(
    psi: &PsiData,
    cand: &ModuliCandidate,
    conditions: Conditions,
) -> Result<Verdict, ModuliError> {
    let rays = ray_data(psi)?;
    check_types(&rays, cand)?;
    let ctx = ConeContext::new(psi, &rays, conditions);
    let fan = psi.fan();
    let cones = par::map_range(fan.maximal_cones().len(), |c| {
        let flags: Vec<&Flag> = fan.maximal_cones()[c]
            .rays()
            .iter()
            .map(|&r| &cand.flags[r])
            .collect();
        ctx.check_cone(c, &flags, None)
    });
    Ok(Verdict {
        status: overall(&cones),
        conditions,
        cones,
    })
}

/// Re-runs the cone test on every face of the fan, each with its own
/// splitting. Used to confirm that checking maximal cones suffices.
pub fn check_all_faces(
    psi: &PsiData,
    cand: &ModuliCandidate,
    conditions: Conditions,
) -> Result<Vec<ConeVerdict>, ModuliError> {
    let rays = ray_data(psi)?;
    check_types(&rays, cand)?;
    let ctx = ConeContext::new(psi, &rays, conditions);
    let fan = psi.fan();
    Ok(fan
        .faces()
        .iter()
        .filter(|f| f.dim() > 0)
        .map(|face| {
            let flags: Vec<&Flag> = face.rays().iter().map(|&r| &cand.flags[r]).collect();
            ctx.check_rays(face.rays(), &flags, None, face)
        })
        .collect())
}

fn overall(cones: &[ConeVerdict]) -> Status {
    if cones.iter().any(|c| c.status == Status::Rejected) {
        Status::Rejected
    } else if cones.iter().any(|c| c.status == Status::Indeterminate) {
        Status::Indeterminate
    } else {
        Status::Accepted
    }
}

/// Shared per-cone machinery for membership checks and the census.
pub(crate) struct ConeContext<'a> {
    psi: &'a PsiData,
    rays: &'a [RayData],
    conditions: Conditions,
    generators: Vec<Polynomial>,
}

impl<'a> ConeContext<'a> {
    pub(crate) fn new(psi: &'a PsiData, rays: &'a [RayData], conditions: Conditions) -> Self {
        let r = psi.rank();
        Self {
            psi,
            rays,
            conditions,
            generators: (1..=r)
                .map(|i| Polynomial::elementary_symmetric(r, i))
                .collect(),
        }
    }

    fn fan(&self) -> &Arc<Fan> {
        self.psi.fan()
    }

    /// Checks maximal cone `c`; `basis` overrides the common splitting.
    pub(crate) fn check_cone(
        &self,
        c: usize,
        flags: &[&Flag],
        basis: Option<&RationalMatrix>,
    ) -> ConeVerdict {
        let cone = &self.fan().maximal_cones()[c];
        let mut v = self.check_rays(cone.rays(), flags, basis, cone);
        // Class identity is compared against the piece of this maximal cone.
        if v.status == Status::Accepted && self.conditions == Conditions::Full {
            let chart_functionals = self.functionals(&v, cone);
            let ok = self.class_identity(c, &chart_functionals, cone);
            v.checks.class_identity = Some(ok.is_none());
            if let Some(i) = ok {
                v.status = Status::Rejected;
                v.reason = Some(format!(
                    "e{} of the forced cocharacters differs from the class of e{} on this cone",
                    i + 1,
                    i + 1
                ));
            }
        }
        v
    }

    fn check_rays(
        &self,
        rays: &[usize],
        flags: &[&Flag],
        basis: Option<&RationalMatrix>,
        cone: &crate::fan::Cone,
    ) -> ConeVerdict {
        let r = self.psi.rank();
        let mut out = ConeVerdict {
            cone: rays.to_vec(),
            status: Status::Rejected,
            basis: None,
            gammas: Vec::new(),
            checks: ConeChecks::default(),
            reason: None,
        };
        let basis = match basis {
            Some(b) if flags.iter().all(|f| f.is_adapted(b)) => b.clone(),
            Some(_) => {
                out.reason = Some("the given basis is not adapted to every flag".into());
                return out;
            }
            None => match common_splitting(flags.iter().copied(), r) {
                Some(b) => b,
                None => {
                    out.reason = Some("the flags of this cone admit no common splitting".into());
                    return out;
                }
            },
        };
        out.checks.common_splitting = true;
        out.gammas = rays
            .iter()
            .zip(flags)
            .map(|(&ray, f)| (ray, forced_gamma(f, &self.rays[ray].weights, &basis)))
            .collect();
        out.basis = Some(basis);

        let fan = self.fan();
        let ray_matrix = RationalMatrix::from_columns(
            &rays.iter().map(|&x| fan.ray_rat(x)).collect::<Vec<_>>(),
            fan.lattice_rank(),
        );
        let relations = kernel_basis(&ray_matrix);
        if !relations.is_empty() {
            let holds = relations.iter().all(|c| {
                (0..r).all(|k| {
                    let s: Rat = c
                        .iter()
                        .zip(&out.gammas)
                        .map(|(ck, (_, g))| ck * rat_of(&g[k]))
                        .sum();
                    s == rat(0)
                })
            });
            out.checks.linear_relations = Some(holds);
            if !holds {
                out.status = Status::Indeterminate;
                out.reason = Some(
                    "the cocharacters forced by this splitting violate a linear relation among the rays"
                        .into(),
                );
                return out;
            }
        }
        if self.conditions == Conditions::Full {
            let a = self.lattice_map(&out, cone);
            let integral = a.is_integral();
            out.checks.integral = Some(integral);
            if !integral {
                out.reason = Some(
                    "the forced cocharacters do not extend to an integral map on the cone's lattice"
                        .into(),
                );
                return out;
            }
        }
        out.status = Status::Accepted;
        out
    }

    /// `A` on the saturated lattice basis with `A·coords(v_ρ) = γ_ρ`.
    fn lattice_map(&self, v: &ConeVerdict, cone: &crate::fan::Cone) -> RationalMatrix {
        let fan = self.fan();
        let r = self.psi.rank();
        let coords: Vec<Vec<Rat>> = v
            .gammas
            .iter()
            .map(|(ray, _)| cone.coordinates(&fan.ray_rat(*ray)))
            .collect();
        let images: Vec<Vec<Rat>> = v
            .gammas
            .iter()
            .map(|(_, g)| g.iter().map(rat_of).collect())
            .collect();
        let ct = RationalMatrix::from_rows(coords, cone.dim());
        let rows: Vec<Vec<Rat>> = (0..r)
            .map(|i| {
                let target: Vec<Rat> = images.iter().map(|g| g[i].clone()).collect();
                ct.solve(&target).expect("linear relations hold")
            })
            .collect();
        RationalMatrix::from_rows(rows, cone.dim())
    }

    fn functionals(&self, v: &ConeVerdict, cone: &crate::fan::Cone) -> RationalMatrix {
        &self.lattice_map(v, cone) * cone.coordinate_map()
    }

    /// Index of the first generator whose class is not reproduced.
    fn class_identity(
        &self,
        c: usize,
        functionals: &RationalMatrix,
        cone: &crate::fan::Cone,
    ) -> Option<usize> {
        let n = self.fan().lattice_rank();
        let forms = functionals.row_vecs();
        (0..self.generators.len()).find(|&i| {
            let ours = restrict(&self.generators[i].compose_linear(&forms, n), cone);
            let theirs = restrict(&self.psi.classes()[i].pieces()[c], cone);
            ours != theirs
        })
    }
}

fn rat_of(x: &Int) -> Rat {
    Rat::from_integer(x.clone())
}

/// Each basis vector gets the weight of the first flag step containing it.
fn forced_gamma(flag: &Flag, weights: &DominantWeight, basis: &RationalMatrix) -> Vec<Int> {
    let mut distinct: Vec<i64> = weights.weights().to_vec();
    distinct.dedup();
    basis
        .columns()
        .iter()
        .map(|b| {
            let j = flag
                .steps()
                .iter()
                .position(|s| s.contains(b))
                .expect("last step is the whole space");
            Int::from(distinct[j])
        })
        .collect()
}

/// The piecewise linear map behind an accepted verdict: each maximal cone
/// gets its splitting basis as frame and the `γ_ρ` as ray images.
pub fn reconstruct_plmap(psi: &PsiData, verdict: &Verdict) -> Result<PLMap, ModuliError> {
    if verdict.status != Status::Accepted {
        return Err(ModuliError::NotAccepted);
    }
    let fan = psi.fan().clone();
    let r = psi.rank();
    let specs = verdict
        .cones
        .iter()
        .map(|cv| {
            let basis = cv.basis.clone().expect("accepted cones carry a basis");
            let cols: Vec<Vec<Rat>> = cv
                .gammas
                .iter()
                .map(|(_, g)| g.iter().map(rat_of).collect())
                .collect();
            ChartSpec {
                cone: cv.cone.clone(),
                frame: basis,
                weights: RationalMatrix::from_columns(&cols, r),
                coords: WeightCoords::Rays,
            }
        })
        .collect();
    let phi = PLMap::new(fan, r, specs)
        .map_err(|e| ModuliError::ReconstructionInconsistent(e.to_string()))?;
    if let Some(v) = phi.validate().first() {
        return Err(ModuliError::ReconstructionInconsistent(v.to_string()));
    }
    Ok(phi)
}

/// Whether `Φ` reproduces every `Ψ(e_i)` exactly.
pub fn reproduces_psi(phi: &PLMap, psi: &PsiData) -> bool {
    crate::charclass::pp_equal_psi(&PsiData::of_map(phi), psi)
}
