//! Piecewise linear maps `Φ: |Σ| → B̃(GL(r))`.
//!
//! Each maximal cone `σ` carries a chart: a frame `g_σ` and a matrix `A_σ`
//! sending coordinates in the saturated lattice basis of `span(σ)` to
//! weights, so `Φ(v)` is the weighted flag of `(g_σ, A_σ·coords(v))`.
//!
//! Validation decides face agreement exactly. On a shared face, write points
//! as nonnegative combinations `c` of its rays and cut the orthant by every
//! hyperplane where two weights (of either chart) coincide. On an open
//! chamber all weight orders are fixed, so comparing the two building points
//! at one interior point settles the whole chamber: matched weights that
//! agree there agree identically, since their difference never changes sign
//! on the chamber. Closures of chambers cover the face.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::building::WeightedFlag;
use crate::exactlin::{dot, feasible_point, Inequality, Rat, RationalMatrix};
use crate::fan::Fan;
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlMapError {
    #[error("chart {chart}: rays {rays:?} do not form a maximal cone of the fan")]
    UnknownCone { chart: usize, rays: Vec<usize> },
    #[error("chart {chart}: maximal cone {cone} already has a chart")]
    DuplicateChart { chart: usize, cone: usize },
    #[error("maximal cone {cone} ({rays:?}) has no chart")]
    MissingChart { cone: usize, rays: Vec<usize> },
    #[error("chart {chart}: frame is {rows}x{cols}, expected {rank}x{rank}")]
    FrameShape {
        chart: usize,
        rows: usize,
        cols: usize,
        rank: usize,
    },
    #[error("chart {chart}: frame matrix is not invertible")]
    SingularFrame { chart: usize },
    #[error(
        "chart {chart}: weights matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}"
    )]
    WeightsShape {
        chart: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("chart {chart}: ray images are not the restriction of a linear map")]
    InconsistentRayImages { chart: usize },
    #[error("PointOutsideSupport: the point lies outside |Σ|")]
    PointOutsideSupport,
}

/// How the columns of a chart's weights matrix are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightCoords {
    /// Columns are images of the saturated lattice basis of `span(σ)`.
    #[default]
    Lattice,
    /// Columns are the weights at the ray generators, in cone order.
    Rays,
}

/// Raw chart data before it is attached to a fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartSpec {
    pub cone: Vec<usize>,
    pub frame: RationalMatrix,
    pub weights: RationalMatrix,
    pub coords: WeightCoords,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    frame: RationalMatrix,
    lattice_map: RationalMatrix,
    functionals: RationalMatrix,
}

impl Chart {
    pub fn frame(&self) -> &RationalMatrix {
        &self.frame
    }

    /// `A_σ`, from saturated lattice coordinates to weights.
    pub fn lattice_map(&self) -> &RationalMatrix {
        &self.lattice_map
    }

    /// `r × n` matrix of the weights as functionals on `span(σ)`.
    pub fn functionals(&self) -> &RationalMatrix {
        &self.functionals
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Integrality {
        cone: Vec<usize>,
        row: usize,
        col: usize,
        value: Rat,
    },
    FaceDisagreement {
        cones: (Vec<usize>, Vec<usize>),
        face: Vec<usize>,
        /// An interior point of the failing chamber, in `N_Q`.
        point: Vec<Rat>,
        detail: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Integrality {
                cone,
                row,
                col,
                value,
            } => write!(
                f,
                "IntegralityViolation: cone {cone:?}, weights matrix entry ({row},{col}) = {value}"
            ),
            Violation::FaceDisagreement {
                cones,
                face,
                point,
                detail,
            } => {
                let p: Vec<String> = point.iter().map(ToString::to_string).collect();
                write!(
                    f,
                    "FaceDisagreement: cones {:?} and {:?} on face {face:?} at ({}): {detail}",
                    cones.0,
                    cones.1,
                    p.join(",")
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PLMap {
    fan: Arc<Fan>,
    rank: usize,
    charts: Vec<Chart>,
}

impl PartialEq for PLMap {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.charts == other.charts && *self.fan == *other.fan
    }
}

impl PLMap {
    /// Attaches charts to the maximal cones. Structural problems are errors;
    /// integrality and face agreement are reported by [`PLMap::validate`].
    pub fn new(fan: Arc<Fan>, rank: usize, specs: Vec<ChartSpec>) -> Result<Self, PlMapError> {
        let mut slots: Vec<Option<Chart>> = vec![None; fan.maximal_cones().len()];
        for (k, spec) in specs.into_iter().enumerate() {
            let mut rays = spec.cone.clone();
            rays.sort_unstable();
            let Some(c) = fan.maximal_cones().iter().position(|m| m.rays() == rays) else {
                return Err(PlMapError::UnknownCone {
                    chart: k,
                    rays: spec.cone,
                });
            };
            if slots[c].is_some() {
                return Err(PlMapError::DuplicateChart { chart: k, cone: c });
            }
            if spec.frame.rows() != rank || spec.frame.cols() != rank {
                return Err(PlMapError::FrameShape {
                    chart: k,
                    rows: spec.frame.rows(),
                    cols: spec.frame.cols(),
                    rank,
                });
            }
            if !spec.frame.is_invertible() {
                return Err(PlMapError::SingularFrame { chart: k });
            }
            let cone = &fan.maximal_cones()[c];
            let expected_cols = match spec.coords {
                WeightCoords::Lattice => cone.dim(),
                WeightCoords::Rays => spec.cone.len(),
            };
            if spec.weights.rows() != rank || spec.weights.cols() != expected_cols {
                return Err(PlMapError::WeightsShape {
                    chart: k,
                    rows: spec.weights.rows(),
                    cols: spec.weights.cols(),
                    expected_rows: rank,
                    expected_cols,
                });
            }
            let lattice_map = match spec.coords {
                WeightCoords::Lattice => spec.weights,
                WeightCoords::Rays => {
                    let coords: Vec<Vec<Rat>> = spec
                        .cone
                        .iter()
                        .map(|&r| cone.coordinates(&fan.ray_rat(r)))
                        .collect();
                    solve_lattice_map(&coords, &spec.weights, cone.dim())
                        .ok_or(PlMapError::InconsistentRayImages { chart: k })?
                }
            };
            let functionals = &lattice_map * cone.coordinate_map();
            slots[c] = Some(Chart {
                frame: spec.frame,
                lattice_map,
                functionals,
            });
        }
        let charts = slots
            .into_iter()
            .enumerate()
            .map(|(c, s)| {
                s.ok_or_else(|| PlMapError::MissingChart {
                    cone: c,
                    rays: fan.maximal_cones()[c].rays().to_vec(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { fan, rank, charts })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Charts indexed like `fan.maximal_cones()`.
    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    /// Weights of chart `cone` at `v ∈ span(σ)`.
    pub fn chart_weights(&self, cone: usize, v: &[Rat]) -> Vec<Rat> {
        self.charts[cone].functionals.mul_vec(v)
    }

    pub fn evaluate_in(&self, cone: usize, v: &[Rat]) -> WeightedFlag {
        WeightedFlag::from_frame_weights(&self.charts[cone].frame, &self.chart_weights(cone, v))
            .expect("chart frames are invertible")
    }

    pub fn evaluate(&self, v: &[Rat]) -> Result<WeightedFlag, PlMapError> {
        let tau = self.fan.locate(v).ok_or(PlMapError::PointOutsideSupport)?;
        let c = self.fan.maximal_containing(tau.rays())[0];
        Ok(self.evaluate_in(c, v))
    }

    pub fn integrality_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (c, chart) in self.charts.iter().enumerate() {
            let a = &chart.lattice_map;
            for i in 0..a.rows() {
                for j in 0..a.cols() {
                    if !a[(i, j)].is_integer() {
                        out.push(Violation::Integrality {
                            cone: self.fan.maximal_cones()[c].rays().to_vec(),
                            row: i,
                            col: j,
                            value: a[(i, j)].clone(),
                        });
                    }
                }
            }
        }
        out
    }

    /// The first disagreement between the charts of maximal cones `a` and
    /// `b` on their common face `face`, if any.
    pub fn face_disagreement(&self, a: usize, b: usize, face: &[usize]) -> Option<Violation> {
        let rays = RationalMatrix::from_columns(
            &face
                .iter()
                .map(|&r| self.fan.ray_rat(r))
                .collect::<Vec<_>>(),
            self.fan.lattice_rank(),
        );
        let w1 = &self.charts[a].functionals * &rays;
        let w2 = &self.charts[b].functionals * &rays;
        for c in chambers(&w1, &w2) {
            let v = rays.mul_vec(&c);
            let f1 = self.evaluate_in(a, &v);
            let f2 = self.evaluate_in(b, &v);
            if f1 != f2 {
                return Some(Violation::FaceDisagreement {
                    cones: (
                        self.fan.maximal_cones()[a].rays().to_vec(),
                        self.fan.maximal_cones()[b].rays().to_vec(),
                    ),
                    face: face.to_vec(),
                    point: v,
                    detail: describe_difference(&f1, &f2),
                });
            }
        }
        None
    }

    /// All violations: integrality first, then face disagreements in the
    /// order of `fan.shared_faces()`. Empty iff `Φ` is a valid integral map.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.integrality_violations();
        let shared = self.fan.shared_faces();
        out.extend(
            par::map(&shared, |(a, b, face)| self.face_disagreement(*a, *b, face))
                .into_iter()
                .flatten(),
        );
        out
    }
}

/// `A` with `A·coords_k = images[:, k]` for every ray, if it exists.
fn solve_lattice_map(
    coords: &[Vec<Rat>],
    images: &RationalMatrix,
    dim: usize,
) -> Option<RationalMatrix> {
    // Row i of A solves C^T a = (row i of images), C = [coords].
    let ct = RationalMatrix::from_rows(coords.to_vec(), dim);
    let rows: Option<Vec<Vec<Rat>>> = (0..images.rows())
        .map(|i| ct.solve(images.row(i)))
        .collect();
    let a = RationalMatrix::from_rows(rows?, dim);
    let consistent = coords
        .iter()
        .enumerate()
        .all(|(k, c)| a.mul_vec(c) == images.column(k));
    consistent.then_some(a)
}

/// Interior points of the full-dimensional chambers cut out of the open
/// orthant by all hyperplanes where two of the weight functionals (rows of
/// `w1` and `w2`) coincide.
fn chambers(w1: &RationalMatrix, w2: &RationalMatrix) -> Vec<Vec<Rat>> {
    let m = w1.cols();
    let rows: Vec<Vec<Rat>> = w1.row_vecs().into_iter().chain(w2.row_vecs()).collect();
    let mut hyperplanes: Vec<Vec<Rat>> = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let h: Vec<Rat> = rows[i].iter().zip(&rows[j]).map(|(x, y)| x - y).collect();
            if let Some(h) = normalize_direction(h) {
                if !hyperplanes.contains(&h) {
                    hyperplanes.push(h);
                }
            }
        }
    }
    let mut regions: Vec<Vec<Inequality>> = vec![(0..m)
        .map(|k| {
            let mut e = vec![Rat::zero(); m];
            e[k] = Rat::one();
            Inequality::new(e, Rat::one())
        })
        .collect()];
    for h in &hyperplanes {
        let neg: Vec<Rat> = h.iter().map(|x| -x).collect();
        let mut next = Vec::new();
        for region in regions {
            for side in [h, &neg] {
                let mut cand = region.clone();
                cand.push(Inequality::new(side.clone(), Rat::one()));
                if feasible_point(&cand, m).is_some() {
                    next.push(cand);
                }
            }
        }
        regions = next;
    }
    regions
        .iter()
        .map(|r| {
            let p = feasible_point(r, m).expect("regions are feasible");
            debug_assert!(r.iter().all(|q| dot(&q.coeffs, &p) >= q.rhs));
            p
        })
        .collect()
}

/// Scales so the first nonzero entry is 1; `None` for the zero functional.
fn normalize_direction(h: Vec<Rat>) -> Option<Vec<Rat>> {
    let lead = h.iter().find(|x| !x.is_zero())?.clone();
    Some(h.into_iter().map(|x| x / &lead).collect())
}

fn describe_difference(a: &WeightedFlag, b: &WeightedFlag) -> String {
    let fmt_w = |w: &WeightedFlag| {
        w.weights()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };
    if a.weights() != b.weights() {
        return format!("weights ({}) vs ({})", fmt_w(a), fmt_w(b));
    }
    let j = (0..a.flag().steps().len())
        .find(|&j| a.flag().steps()[j] != b.flag().steps()[j])
        .unwrap_or(0);
    format!("flag step {} differs at weight {}", j + 1, a.weights()[j])
}
