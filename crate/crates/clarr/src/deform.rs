//! Sampled verification that a deformation path stays inside one
//! combinatorial type, plus the one-parameter conic family through the four
//! fixed base points used to connect arrangements that differ only in the
//! choice of bitangent pair.
//!
//! Path checking is a falsification tool: the path is sampled at rationally
//! spaced parameters, the arrangement is rebuilt at each sample, and its
//! combinatorics is compared with the reference. Base-point collisions along
//! a segment are solved exactly (the coordinates are linear in the segment
//! parameter, so collision times are rational). A clean report says "no
//! degeneration detected at these samples", never more.
//!
//! Square roots along a path follow the fixed normalization of the tower
//! arithmetic (positive real roots stay positive), which is continuous as
//! long as no adjoined constant changes sign. When the set of negative
//! radicands in the sample's coefficient field differs from the previous
//! sample's, the branches are not comparable and the sample is marked.

use crate::plane::{classify, intersect_pair, Arrangement, Combinatorics, PlaneCurve, PlaneError};
use crate::polyring::{BivarPoly, Poly, Var};
use crate::qtower::{rat, rat_i, QtowerError, Rat, TowerElem};
use crate::surface::SurfaceParams;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DeformError {
    #[error("a path needs at least two waypoints")]
    TooFewWaypoints,
    #[error("waypoint {0} has repeated base points")]
    RepeatedBasePoints(usize),
    #[error("the conic family degenerates at this parameter: {0}")]
    ExceptionalBeta(String),
    #[error("bitangent index must be 1..=4, got {0}")]
    BadBitangentIndex(usize),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Plane(#[from] PlaneError),
    #[error(transparent)]
    Tower(#[from] QtowerError),
}

/// A piecewise-linear path through the parameter space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSpec {
    pub waypoints: Vec<SurfaceParams>,
    pub samples_per_segment: u32,
}

/// One sampled parameter point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSample {
    /// Segment index (between waypoints k and k+1).
    pub segment: usize,
    /// Position within the segment, in [0, 1].
    pub s: Rat,
    pub params: SurfaceParams,
}

/// An exact base-point collision t_i = t_j inside a segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collision {
    pub segment: usize,
    /// Collision time within the segment (rational, exact).
    pub s: String,
    /// 1-based labels of the colliding base points.
    pub i: usize,
    pub j: usize,
}

fn lerp(a: &Rat, b: &Rat, s: &Rat) -> Rat {
    a + (b - a) * s
}

fn params_at(a: &SurfaceParams, b: &SurfaceParams, s: &Rat) -> SurfaceParams {
    SurfaceParams::new(
        lerp(&a.lambda, &b.lambda, s),
        [
            lerp(&a.t[0], &b.t[0], s),
            lerp(&a.t[1], &b.t[1], s),
            lerp(&a.t[2], &b.t[2], s),
            lerp(&a.t[3], &b.t[3], s),
        ],
    )
}

fn validate_waypoints(spec: &PathSpec) -> Result<(), DeformError> {
    if spec.waypoints.len() < 2 {
        return Err(DeformError::TooFewWaypoints);
    }
    for (k, w) in spec.waypoints.iter().enumerate() {
        for i in 0..4 {
            for j in (i + 1)..4 {
                if w.t[i] == w.t[j] {
                    return Err(DeformError::RepeatedBasePoints(k));
                }
            }
        }
    }
    Ok(())
}

/// Sample the path: each segment contributes its start point and
/// `samples_per_segment` interior points at j/(m+1); the final waypoint
/// closes the list. Collisions of base points inside segments are solved
/// exactly and reported alongside.
pub fn sample_path(spec: &PathSpec) -> Result<(Vec<PathSample>, Vec<Collision>), DeformError> {
    validate_waypoints(spec)?;
    let m = spec.samples_per_segment;
    let mut samples = Vec::new();
    let mut collisions = Vec::new();
    let segs = spec.waypoints.len() - 1;
    for k in 0..segs {
        let a = &spec.waypoints[k];
        let b = &spec.waypoints[k + 1];
        // exact collision times: t_i(s) - t_j(s) is linear in s
        for i in 0..4 {
            for j in (i + 1)..4 {
                let d0 = &a.t[i] - &a.t[j];
                let d1 = &b.t[i] - &b.t[j];
                if d0 != d1 {
                    let s_star = &d0 / (&d0 - &d1);
                    if !s_star.is_negative() && s_star <= rat_i(1) {
                        collisions.push(Collision {
                            segment: k,
                            s: s_star.to_string(),
                            i: i + 1,
                            j: j + 1,
                        });
                    }
                }
                // d0 == d1 != 0: constant separation, no collision
            }
        }
        for j in 0..=m {
            if k > 0 && j == 0 {
                continue; // segment start duplicates previous segment's end
            }
            let s = rat(j as i64, (m + 1) as i64);
            samples.push(PathSample { segment: k, s: s.clone(), params: params_at(a, b, &s) });
        }
    }
    let last = spec.waypoints.last().unwrap().clone();
    samples.push(PathSample { segment: segs - 1, s: rat_i(1), params: last });
    Ok((samples, collisions))
}

/// Outcome at one sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub segment: usize,
    pub s: String,
    pub lambda: String,
    /// None when the arrangement could not be assembled at this sample.
    pub isomorphic: Option<bool>,
    /// Why assembly or classification failed, when it did.
    pub degeneracy: Option<String>,
    /// Set when the sign pattern of adjoined radicands changed relative to
    /// the previous good sample, making square-root branches incomparable.
    pub branch_ambiguity: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleReport {
    pub outcomes: Vec<SampleOutcome>,
    pub collisions: Vec<Collision>,
    pub all_isomorphic: bool,
    /// Index into outcomes of the first non-isomorphic or degenerate sample.
    pub first_failure: Option<usize>,
}

/// Rebuild the arrangement at every sample and compare with the reference
/// combinatorics. The builder owns the recipe; failures become per-sample
/// degeneracy records rather than errors.
pub fn check_deformation<F>(
    spec: &PathSpec,
    reference: &Combinatorics,
    build: F,
) -> Result<SampleReport, DeformError>
where
    F: Fn(&SurfaceParams) -> Result<Arrangement, String>,
{
    let (samples, collisions) = sample_path(spec)?;
    let mut outcomes = Vec::new();
    let mut prev_negative: Option<Vec<i64>> = None;
    for sample in &samples {
        let mut outcome = SampleOutcome {
            segment: sample.segment,
            s: sample.s.to_string(),
            lambda: sample.params.lambda.to_string(),
            isomorphic: None,
            degeneracy: None,
            branch_ambiguity: false,
        };
        match build(&sample.params) {
            Err(why) => outcome.degeneracy = Some(why),
            Ok(arr) => {
                let negatives: Vec<i64> = arr
                    .tower()
                    .radicands()
                    .iter()
                    .copied()
                    .filter(|&d| d < 0)
                    .collect();
                if let Some(prev) = &prev_negative {
                    outcome.branch_ambiguity = *prev != negatives;
                }
                prev_negative = Some(negatives);
                match classify(&arr) {
                    Err(e) => outcome.degeneracy = Some(e.to_string()),
                    Ok(comb) => outcome.isomorphic = Some(comb.isomorphic(reference)),
                }
            }
        }
        outcomes.push(outcome);
    }
    let first_failure = outcomes.iter().position(|o| o.isomorphic != Some(true));
    Ok(SampleReport {
        all_isomorphic: first_failure.is_none(),
        first_failure,
        outcomes,
        collisions,
    })
}

// The fixed conic t^2 + x^2 + tx - 27/4 through the four base points.
pub fn base_conic() -> PlaneCurve {
    let c = BivarPoly::from_terms(vec![
        ((2, 0), TowerElem::from_int(1)),
        ((0, 2), TowerElem::from_int(1)),
        ((1, 1), TowerElem::from_int(1)),
        ((0, 0), TowerElem::from_rat(rat(-27, 4))),
    ]);
    PlaneCurve::from_bivar("Co1", c).expect("fixed conic")
}

/// The four fixed base points (t, x); two of them share t = 0.
pub fn base_points() -> Result<[(TowerElem, TowerElem); 4], DeformError> {
    let r3 = TowerElem::sqrt_int(3)?;
    let half3 = r3.mul_rat(&rat(3, 2));
    let zero = TowerElem::from_int(0);
    Ok([
        (half3.clone(), zero.clone()),
        (zero.clone(), half3.neg()),
        (half3.neg(), zero.clone()),
        (zero, half3),
    ])
}

fn beta_poly(beta: &Rat, coeffs: &[i64]) -> Rat {
    // coeffs lowest-first
    let mut acc = Rat::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * beta + rat_i(c);
    }
    acc
}

/// Which degeneration, if any, the family hits at this parameter.
pub fn beta_exceptional(beta: &Rat) -> Option<String> {
    if beta_poly(beta, &[1, 4, 1]).is_zero() || beta_poly(beta, &[-2, -2, 1]).is_zero() {
        return Some("conic coincides with the fixed conic".to_string());
    }
    if beta_poly(beta, &[1, 1, 1]).is_zero()
        || beta_poly(beta, &[-1, 2, 2]).is_zero()
        || beta_poly(beta, &[1, 2]).is_zero()
    {
        return Some("conic degenerates to a line pair".to_string());
    }
    None
}

/// The moving conic through the four base points.
pub fn beta_conic(beta: &Rat) -> BivarPoly {
    let a = beta_poly(beta, &[1, 2, 3, 2, 1]);
    let b = beta_poly(beta, &[-1, -8, -6, 4, 2]);
    let four_a = TowerElem::from_rat(&a * rat_i(4));
    let four_b = TowerElem::from_rat(&b * rat_i(4));
    let e = TowerElem::from_rat(&a * rat_i(-27));
    BivarPoly::from_terms(vec![
        ((2, 0), four_a.clone()),
        ((0, 2), four_a),
        ((1, 1), four_b),
        ((0, 0), e),
    ])
}

/// The conic and its four bitangent lines (with the fixed conic), labeled
/// Lb1..Lb4 in the family's own numbering.
pub struct BetaFamily {
    pub conic: PlaneCurve,
    pub bitangents: [PlaneCurve; 4],
}

pub fn beta_family(beta: &Rat) -> Result<BetaFamily, DeformError> {
    if let Some(why) = beta_exceptional(beta) {
        return Err(DeformError::ExceptionalBeta(why));
    }
    let conic = PlaneCurve::from_bivar("Co2", beta_conic(beta))?;
    // line coefficients: (b^2+2b) t + (b^2-1) x -+ (3b^2+3b+3) and the
    // transposed pair
    let u = TowerElem::from_rat(beta_poly(beta, &[0, 2, 1]));
    let v = TowerElem::from_rat(beta_poly(beta, &[-1, 0, 1]));
    let w = TowerElem::from_rat(beta_poly(beta, &[3, 3, 3]));
    let line = |label: &str, ct: &TowerElem, cx: &TowerElem, c0: &TowerElem| {
        let b = BivarPoly::from_terms(vec![
            ((1, 0), ct.clone()),
            ((0, 1), cx.clone()),
            ((0, 0), c0.clone()),
        ]);
        PlaneCurve::from_bivar(label, b)
    };
    let bitangents = [
        line("Lb1", &u, &v, &w.neg())?,
        line("Lb2", &v, &u, &w)?,
        line("Lb3", &u, &v, &w)?,
        line("Lb4", &v, &u, &w.neg())?,
    ];
    let fixed = base_conic();
    for lb in &bitangents {
        for conic_side in [&fixed, &conic] {
            let ev = intersect_pair(conic_side, lb, &[])?;
            let tangent = ev.len() == 1 && ev[0].mult == 2;
            if !tangent {
                return Err(DeformError::Internal(format!(
                    "{} is not tangent to {} at this parameter",
                    lb.label, conic_side.label
                )));
            }
        }
    }
    Ok(BetaFamily { conic, bitangents })
}

/// The chord of base points 1 and 3 (the line x = 0).
pub fn base_chord() -> PlaneCurve {
    PlaneCurve::graph("L13p", Poly::zero(Var::T)).expect("degree-zero graph")
}

/// Assemble the five-component arrangement for a bitangent pair (1-based).
pub fn beta_arrangement(
    beta: &Rat,
    pair: (usize, usize),
) -> Result<Arrangement, DeformError> {
    let (i, j) = pair;
    for k in [i, j] {
        if !(1..=4).contains(&k) {
            return Err(DeformError::BadBitangentIndex(k));
        }
    }
    if i == j {
        return Err(DeformError::BadBitangentIndex(j));
    }
    let fam = beta_family(beta)?;
    let li = fam.bitangents[i - 1].clone();
    let lj = fam.bitangents[j - 1].clone();
    let arr = Arrangement::assemble(
        vec![base_conic(), fam.conic, base_chord(), li, lj],
        vec![],
    )?;
    Ok(arr)
}
