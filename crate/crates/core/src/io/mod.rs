//! JSON file formats.
//!
//! Integers are bare JSON numbers (strings for values outside `i64`);
//! rationals are bare integers or `"p/q"` strings in lowest terms. A matrix
//! is a list of rows. Subspaces are given by a list of spanning row vectors
//! and emitted in reduced row echelon form. Frames are square matrices whose
//! columns are the frame vectors.

mod number;
mod schema;

use std::fmt;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use number::{JsonInt, JsonRat};
pub use schema::{schema, SCHEMA_NAMES};

use crate::building::{BuildingError, Flag, KlyachkoFiltration, Subspace, WeightedFlag};
use crate::charclass::{PiecewisePolynomial, Polynomial, PsiData};
use crate::exactlin::{Int, Rat, RationalMatrix};
use crate::fan::{Fan, FanError};
use crate::moduli::{Conditions, ConeChecks, ConeVerdict, ModuliCandidate, Status, Verdict};
use crate::onepar::OneParamSubgroup;
use crate::plmap::{ChartSpec, PLMap, WeightCoords};

/// A malformed input: which file, where in it, and what is wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub file: String,
    pub path: String,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: at {}: {}", self.file, self.path, self.message)
    }
}

impl std::error::Error for InputError {}

impl InputError {
    pub fn new(file: &str, path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            file: file.to_string(),
            path: path.into(),
            message: message.to_string(),
        }
    }
}

fn json_path(p: &serde_path_to_error::Path) -> String {
    let s = p.to_string();
    match s.as_str() {
        "." => "$".into(),
        _ if s.starts_with('[') => format!("${s}"),
        _ => format!("$.{s}"),
    }
}

/// Deserialises `text`, reporting the JSON path of the first failure.
pub fn parse_json<T: DeserializeOwned>(file: &str, text: &str) -> Result<T, InputError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = json_path(e.path());
        InputError::new(file, path, e.into_inner())
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

pub type JsonMatrix = Vec<Vec<JsonRat>>;

fn rat_rows(m: &JsonMatrix) -> Vec<Vec<Rat>> {
    m.iter()
        .map(|row| row.iter().map(|x| x.0.clone()).collect())
        .collect()
}

fn matrix_of(
    file: &str,
    path: &str,
    m: &JsonMatrix,
    rows: usize,
    cols: usize,
) -> Result<RationalMatrix, InputError> {
    if m.len() != rows {
        return Err(InputError::new(
            file,
            path,
            format!("expected {rows} rows, found {}", m.len()),
        ));
    }
    if let Some(i) = m.iter().position(|r| r.len() != cols) {
        return Err(InputError::new(
            file,
            format!("{path}[{i}]"),
            format!("expected {cols} entries, found {}", m[i].len()),
        ));
    }
    Ok(RationalMatrix::from_rows(rat_rows(m), cols))
}

fn json_matrix(m: &RationalMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|i| m.row(i).iter().cloned().map(JsonRat).collect())
        .collect()
}

fn json_vectors(vs: &[Vec<Rat>]) -> JsonMatrix {
    vs.iter()
        .map(|v| v.iter().cloned().map(JsonRat).collect())
        .collect()
}

fn subspace_of(
    file: &str,
    path: &str,
    m: &JsonMatrix,
    rank: usize,
) -> Result<Subspace, InputError> {
    Subspace::span(&rat_rows(m), rank).map_err(|e| InputError::new(file, path, e))
}

// ---------------------------------------------------------------- fans

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub lattice_rank: usize,
    pub rays: Vec<Vec<JsonInt>>,
    pub maximal_cones: Vec<Vec<usize>>,
}

impl FanFile {
    pub fn from_fan(fan: &Fan) -> Self {
        Self {
            lattice_rank: fan.lattice_rank(),
            rays: fan
                .rays()
                .iter()
                .map(|r| r.iter().cloned().map(JsonInt).collect())
                .collect(),
            maximal_cones: fan
                .maximal_cones()
                .iter()
                .map(|c| c.rays().to_vec())
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Fan, FanError> {
        Fan::new(
            self.lattice_rank,
            self.rays
                .iter()
                .map(|r| r.iter().map(|x| x.0.clone()).collect())
                .collect(),
            self.maximal_cones.clone(),
        )
    }
}

/// Where in a fan file the problem behind `e` sits.
pub fn fan_error_path(e: &FanError) -> String {
    match e {
        FanError::ZeroLatticeRank => "$.lattice_rank".into(),
        FanError::RayDimension { ray, .. }
        | FanError::ZeroRay { ray }
        | FanError::NonPrimitiveRay { ray, .. }
        | FanError::UnusedRay { ray } => format!("$.rays[{ray}]"),
        FanError::DuplicateRay { second, .. } => format!("$.rays[{second}]"),
        FanError::EmptyCone { cone }
        | FanError::RayIndexOutOfRange { cone, .. }
        | FanError::RepeatedRayInCone { cone, .. }
        | FanError::ConeTooLarge { cone }
        | FanError::NotStronglyConvex { cone } => format!("$.maximal_cones[{cone}]"),
        FanError::NotAFan { first, .. } => format!("$.maximal_cones[{first}]"),
    }
}

/// Whether a fan error is about the shape of the data rather than the fan
/// axioms.
pub fn fan_error_is_format(e: &FanError) -> bool {
    !matches!(
        e,
        FanError::NotStronglyConvex { .. } | FanError::NotAFan { .. } | FanError::UnusedRay { .. }
    )
}

pub fn read_fan(file: &str, text: &str) -> Result<Fan, InputError> {
    let raw: FanFile = parse_json(file, text)?;
    raw.build()
        .map_err(|e| InputError::new(file, fan_error_path(&e), e))
}

// ---------------------------------------------------------------- one-parameter subgroups

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneParFile {
    pub frame: JsonMatrix,
    pub weights: Vec<i64>,
}

impl OneParFile {
    pub fn from_onepar(l: &OneParamSubgroup) -> Self {
        Self {
            frame: json_matrix(l.frame()),
            weights: l.weights().to_vec(),
        }
    }

    pub fn build(&self, file: &str) -> Result<OneParamSubgroup, InputError> {
        let r = self.weights.len();
        let frame = matrix_of(file, "$.frame", &self.frame, r, r)?;
        OneParamSubgroup::new(frame, self.weights.clone())
            .map_err(|e| InputError::new(file, "$.frame", e))
    }
}

// ---------------------------------------------------------------- flags

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedFlagFile {
    pub rank: usize,
    pub steps: Vec<JsonMatrix>,
    pub weights: Vec<JsonRat>,
}

fn flag_steps(f: &Flag) -> Vec<JsonMatrix> {
    f.steps().iter().map(|s| json_vectors(s.basis())).collect()
}

/// Steps given by spanning vectors; a missing final step `Q^r` is implied.
fn flag_of(file: &str, path: &str, steps: &[JsonMatrix], rank: usize) -> Result<Flag, InputError> {
    let mut spaces = steps
        .iter()
        .enumerate()
        .map(|(j, m)| subspace_of(file, &format!("{path}[{j}]"), m, rank))
        .collect::<Result<Vec<_>, _>>()?;
    if spaces.last().is_none_or(|s| !s.is_full()) {
        spaces.push(Subspace::full(rank));
    }
    Flag::new(rank, spaces).map_err(|e| {
        let p = match &e {
            BuildingError::ZeroStep { step } | BuildingError::NotStrictlyIncreasing { step } => {
                format!("{path}[{step}]")
            }
            _ => path.to_string(),
        };
        InputError::new(file, p, e)
    })
}

impl WeightedFlagFile {
    pub fn from_weighted_flag(wf: &WeightedFlag) -> Self {
        Self {
            rank: wf.rank(),
            steps: flag_steps(wf.flag()),
            weights: wf.weights().iter().cloned().map(JsonRat).collect(),
        }
    }

    pub fn build(&self, file: &str) -> Result<WeightedFlag, InputError> {
        let flag = flag_of(file, "$.steps", &self.steps, self.rank)?;
        WeightedFlag::new(flag, self.weights.iter().map(|w| w.0.clone()).collect())
            .map_err(|e| InputError::new(file, "$.weights", e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KlyachkoFile {
    pub rank: usize,
    pub start: i64,
    pub levels: Vec<JsonMatrix>,
}

impl KlyachkoFile {
    pub fn from_filtration(k: &KlyachkoFiltration) -> Self {
        Self {
            rank: k.rank(),
            start: k.start(),
            levels: k.levels().iter().map(|s| json_vectors(s.basis())).collect(),
        }
    }

    pub fn build(&self, file: &str) -> Result<KlyachkoFiltration, InputError> {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(j, m)| subspace_of(file, &format!("$.levels[{j}]"), m, self.rank))
            .collect::<Result<Vec<_>, _>>()?;
        KlyachkoFiltration::from_levels(self.rank, self.start, levels).map_err(|e| {
            let p = match &e {
                BuildingError::NotDecreasing { index } => {
                    format!("$.levels[{}]", index - self.start)
                }
                _ => "$.levels".into(),
            };
            InputError::new(file, p, e)
        })
    }
}

// ---------------------------------------------------------------- piecewise linear maps

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordsFile {
    Lattice,
    Rays,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartFile {
    pub cone: Vec<usize>,
    pub frame: JsonMatrix,
    pub weights_matrix: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<CoordsFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlMapFile {
    pub rank: usize,
    pub charts: Vec<ChartFile>,
}

impl PlMapFile {
    /// Charts in the order of the fan's maximal cones, weights on the
    /// saturated lattice basis.
    pub fn from_plmap(phi: &PLMap) -> Self {
        Self {
            rank: phi.rank(),
            charts: phi
                .fan()
                .maximal_cones()
                .iter()
                .zip(phi.charts())
                .map(|(c, ch)| ChartFile {
                    cone: c.rays().to_vec(),
                    frame: json_matrix(ch.frame()),
                    weights_matrix: json_matrix(ch.lattice_map()),
                    coords: None,
                })
                .collect(),
        }
    }

    pub fn build(&self, file: &str, fan: Arc<Fan>) -> Result<PLMap, InputError> {
        let r = self.rank;
        let specs = self
            .charts
            .iter()
            .enumerate()
            .map(|(k, ch)| {
                let frame = matrix_of(file, &format!("$.charts[{k}].frame"), &ch.frame, r, r)?;
                let cols = ch.weights_matrix.first().map_or(0, Vec::len);
                let weights = matrix_of(
                    file,
                    &format!("$.charts[{k}].weights_matrix"),
                    &ch.weights_matrix,
                    r,
                    cols,
                )?;
                Ok(ChartSpec {
                    cone: ch.cone.clone(),
                    frame,
                    weights,
                    coords: match ch.coords {
                        Some(CoordsFile::Rays) => WeightCoords::Rays,
                        _ => WeightCoords::Lattice,
                    },
                })
            })
            .collect::<Result<Vec<_>, InputError>>()?;
        PLMap::new(fan, r, specs).map_err(|e| {
            use crate::plmap::PlMapError as E;
            let p = match &e {
                E::UnknownCone { chart, .. } | E::DuplicateChart { chart, .. } => {
                    format!("$.charts[{chart}].cone")
                }
                E::FrameShape { chart, .. } | E::SingularFrame { chart } => {
                    format!("$.charts[{chart}].frame")
                }
                E::WeightsShape { chart, .. } | E::InconsistentRayImages { chart } => {
                    format!("$.charts[{chart}].weights_matrix")
                }
                _ => "$.charts".into(),
            };
            InputError::new(file, p, e)
        })
    }
}

// ---------------------------------------------------------------- piecewise polynomials

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceFile {
    pub cone: Vec<usize>,
    /// `[coefficient, exponents]` pairs.
    pub poly: Vec<(JsonRat, Vec<u32>)>,
}

fn pieces_of(pp: &PiecewisePolynomial) -> Vec<PieceFile> {
    pp.fan()
        .maximal_cones()
        .iter()
        .zip(pp.pieces())
        .map(|(c, p)| PieceFile {
            cone: c.rays().to_vec(),
            poly: p
                .terms()
                .map(|(e, c)| (JsonRat(c.clone()), e.clone()))
                .collect(),
        })
        .collect()
}

fn pp_of(
    file: &str,
    path: &str,
    pieces: &[PieceFile],
    fan: &Arc<Fan>,
) -> Result<PiecewisePolynomial, InputError> {
    let n = fan.lattice_rank();
    let mut slots: Vec<Option<Polynomial>> = vec![None; fan.maximal_cones().len()];
    for (k, piece) in pieces.iter().enumerate() {
        let mut rays = piece.cone.clone();
        rays.sort_unstable();
        let here = format!("{path}[{k}]");
        let c = fan
            .maximal_cones()
            .iter()
            .position(|m| m.rays() == rays)
            .ok_or_else(|| {
                InputError::new(
                    file,
                    format!("{here}.cone"),
                    "not a maximal cone of the fan",
                )
            })?;
        if slots[c].is_some() {
            return Err(InputError::new(
                file,
                format!("{here}.cone"),
                "maximal cone listed twice",
            ));
        }
        if let Some(t) = piece.poly.iter().position(|(_, e)| e.len() != n) {
            return Err(InputError::new(
                file,
                format!("{here}.poly[{t}]"),
                format!("exponent vector must have {n} entries"),
            ));
        }
        slots[c] = Some(Polynomial::from_terms(
            n,
            piece.poly.iter().map(|(c, e)| (c.0.clone(), e.clone())),
        ));
    }
    let pieces = slots
        .into_iter()
        .enumerate()
        .map(|(c, s)| {
            s.ok_or_else(|| {
                InputError::new(
                    file,
                    path,
                    format!(
                        "no piece for maximal cone {:?}",
                        fan.maximal_cones()[c].rays()
                    ),
                )
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    PiecewisePolynomial::new(fan.clone(), pieces).map_err(|e| InputError::new(file, path, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseFile {
    pub pieces: Vec<PieceFile>,
}

impl PiecewiseFile {
    pub fn from_pp(pp: &PiecewisePolynomial) -> Self {
        Self {
            pieces: pieces_of(pp),
        }
    }

    pub fn build(&self, file: &str, fan: &Arc<Fan>) -> Result<PiecewisePolynomial, InputError> {
        pp_of(file, "$.pieces", &self.pieces, fan)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiFile {
    pub rank: usize,
    pub classes: Vec<Vec<PieceFile>>,
}

impl PsiFile {
    pub fn from_psi(psi: &PsiData) -> Self {
        Self {
            rank: psi.rank(),
            classes: psi.classes().iter().map(pieces_of).collect(),
        }
    }

    pub fn build(&self, file: &str, fan: &Arc<Fan>) -> Result<PsiData, InputError> {
        let classes = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, c)| pp_of(file, &format!("$.classes[{i}]"), c, fan))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, c) in classes.iter().enumerate() {
            if let Some(e) = c.face_violations().into_iter().next() {
                return Err(InputError::new(file, format!("$.classes[{i}]"), e));
            }
        }
        PsiData::new(self.rank, classes).map_err(|e| InputError::new(file, "$.classes", e))
    }
}

// ---------------------------------------------------------------- moduli

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateFile {
    pub rank: usize,
    /// Per ray, the flag steps as spanning row vectors.
    pub flags: Vec<Vec<JsonMatrix>>,
}

impl CandidateFile {
    pub fn from_candidate(c: &ModuliCandidate) -> Self {
        Self {
            rank: c.rank(),
            flags: c.flags().iter().map(flag_steps).collect(),
        }
    }

    pub fn build(&self, file: &str) -> Result<ModuliCandidate, InputError> {
        let flags = self
            .flags
            .iter()
            .enumerate()
            .map(|(x, steps)| flag_of(file, &format!("$.flags[{x}]"), steps, self.rank))
            .collect::<Result<Vec<_>, _>>()?;
        ModuliCandidate::new(self.rank, flags).map_err(|e| InputError::new(file, "$.flags", e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusFile {
    pub rank: usize,
    pub count: usize,
    pub conditions: ConditionsFile,
    pub candidates: Vec<CandidateFile>,
}

impl CensusFile {
    pub fn new(rank: usize, conditions: Conditions, points: &[ModuliCandidate]) -> Self {
        Self {
            rank,
            count: points.len(),
            conditions: conditions.into(),
            candidates: points.iter().map(CandidateFile::from_candidate).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StatusFile {
    #[serde(rename = "ACCEPTED")]
    Accepted,
    #[serde(rename = "REJECTED")]
    Rejected,
    #[serde(rename = "INDETERMINATE")]
    Indeterminate,
}

impl From<Status> for StatusFile {
    fn from(s: Status) -> Self {
        match s {
            Status::Accepted => Self::Accepted,
            Status::Rejected => Self::Rejected,
            Status::Indeterminate => Self::Indeterminate,
        }
    }
}

impl From<StatusFile> for Status {
    fn from(s: StatusFile) -> Self {
        match s {
            StatusFile::Accepted => Self::Accepted,
            StatusFile::Rejected => Self::Rejected,
            StatusFile::Indeterminate => Self::Indeterminate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionsFile {
    Full,
    RayValuesOnly,
}

impl From<Conditions> for ConditionsFile {
    fn from(c: Conditions) -> Self {
        match c {
            Conditions::Full => Self::Full,
            Conditions::RayValuesOnly => Self::RayValuesOnly,
        }
    }
}

impl From<ConditionsFile> for Conditions {
    fn from(c: ConditionsFile) -> Self {
        match c {
            ConditionsFile::Full => Self::Full,
            ConditionsFile::RayValuesOnly => Self::RayValuesOnly,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaFile {
    pub ray: usize,
    pub gamma: Vec<JsonInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksFile {
    pub common_splitting: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_relations: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_identity: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeVerdictFile {
    pub cone: Vec<usize>,
    pub status: StatusFile,
    /// Splitting basis vectors (the columns of the frame).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gammas: Vec<GammaFile>,
    pub checks: ChecksFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictFile {
    pub status: StatusFile,
    pub conditions: ConditionsFile,
    pub cones: Vec<ConeVerdictFile>,
}

impl VerdictFile {
    /// With `witnesses` false, bases and cocharacters are left out.
    pub fn from_verdict(v: &Verdict, witnesses: bool) -> Self {
        Self {
            status: v.status.into(),
            conditions: v.conditions.into(),
            cones: v
                .cones
                .iter()
                .map(|c| ConeVerdictFile {
                    cone: c.cone.clone(),
                    status: c.status.into(),
                    basis: c
                        .basis
                        .as_ref()
                        .filter(|_| witnesses)
                        .map(|b| json_vectors(&b.columns())),
                    gammas: if witnesses {
                        c.gammas
                            .iter()
                            .map(|(ray, g)| GammaFile {
                                ray: *ray,
                                gamma: g.iter().cloned().map(JsonInt).collect(),
                            })
                            .collect()
                    } else {
                        Vec::new()
                    },
                    checks: ChecksFile {
                        common_splitting: c.checks.common_splitting,
                        linear_relations: c.checks.linear_relations,
                        integral: c.checks.integral,
                        class_identity: c.checks.class_identity,
                    },
                    reason: c.reason.clone(),
                })
                .collect(),
        }
    }

    pub fn build(&self, file: &str) -> Result<Verdict, InputError> {
        let cones = self
            .cones
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let basis = c
                    .basis
                    .as_ref()
                    .map(|b| {
                        let r = b.len();
                        let cols = matrix_of(file, &format!("$.cones[{k}].basis"), b, r, r)?;
                        Ok(cols.transpose())
                    })
                    .transpose()?;
                Ok(ConeVerdict {
                    cone: c.cone.clone(),
                    status: c.status.into(),
                    basis,
                    gammas: c
                        .gammas
                        .iter()
                        .map(|g| {
                            (
                                g.ray,
                                g.gamma.iter().map(|x| x.0.clone()).collect::<Vec<Int>>(),
                            )
                        })
                        .collect(),
                    checks: ConeChecks {
                        common_splitting: c.checks.common_splitting,
                        linear_relations: c.checks.linear_relations,
                        integral: c.checks.integral,
                        class_identity: c.checks.class_identity,
                    },
                    reason: c.reason.clone(),
                })
            })
            .collect::<Result<Vec<_>, InputError>>()?;
        Ok(Verdict {
            status: self.status.into(),
            conditions: self.conditions.into(),
            cones,
        })
    }
}
