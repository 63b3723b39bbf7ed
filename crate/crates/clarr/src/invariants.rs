//! Topological invariants of arrangements: splitting types of curve pairs in
//! the double cover branched along a quartic, and the existence criterion for
//! dihedral covers.
//!
//! For a branch quartic B and a graph curve x = q(t), the restriction of B's
//! defining polynomial along the curve factors as c * g(t)^2 exactly when the
//! pullback of the curve to the double cover w^2 = f_B(t, x) splits into two
//! components w = +-sqrt(c) g(t). For two such curves the splitting type
//! (m1, m2) records how the four lifts distribute over the intersection
//! points; it is computed here in two independent ways, geometrically from
//! the gcd of exact polynomials and through the height pairing on the
//! Mordell-Weil lattice, and any disagreement is a hard error.
//!
//! The dihedral criterion reduces to linear dependence of lattice vectors
//! over Z/pZ for an odd prime p; the free parts are row-reduced mod p.

use crate::mw::{LatticeCoord, MordellWeil, MwError, MwPoint};
use crate::plane::{
    classify, intersect_pair, Arrangement, Combinatorics, CurveForm,
    EventSite, PlaneCurve, PlaneError,
};
use crate::polyring::{Poly, PolyError, Var};
use crate::qtower::{QtowerError, TowerElem};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantsError {
    #[error("branch components must multiply to a quartic")]
    BranchNotQuartic,
    #[error("curve {0} does not split in the double cover (restriction is not a square up to constant)")]
    NotASplittingCurve(String),
    #[error("the two curves meet on the branch locus")]
    PairMeetsOnBranch,
    #[error("the two curves are not transverse")]
    PairNotTransverse,
    #[error("the two curves meet at infinity; the splitting-type hypotheses fail")]
    PairMeetsAtInfinity,
    #[error("splitting curve must be a graph x = q(t)")]
    NotAGraphCurve,
    #[error("square root of the restriction constant is not representable in a multiquadratic tower")]
    SqrtNotRepresentable,
    #[error("sections share a fiber component; the lattice prediction does not apply")]
    ComponentSharingPair,
    #[error("geometric splitting type {geometric:?} disagrees with the lattice prediction {predicted:?}")]
    OracleDisagreement { geometric: (u32, u32), predicted: (u32, u32) },
    #[error("{0} is not an odd prime")]
    NotAnOddPrime(u64),
    #[error("lattice vectors have mismatched rank")]
    RankMismatch,
    #[error(transparent)]
    Plane(#[from] PlaneError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Tower(#[from] QtowerError),
    #[error(transparent)]
    Mw(#[from] MwError),
}

/// The decomposition f_B(t, q(t)) = c * g(t)^2 of a branch restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverRestriction {
    pub constant: TowerElem,
    pub half: Poly,
}

impl CoverRestriction {
    /// The restriction itself, c * g^2.
    pub fn product(&self) -> Poly {
        self.half.mul(&self.half).mul_elem(&self.constant)
    }
}

/// Restrict the branch quartic along a graph curve and demand even contact
/// everywhere: the product of the per-component restrictions must be a
/// square up to a constant.
pub fn cover_restrict(
    branch: &[PlaneCurve],
    curve: &PlaneCurve,
) -> Result<CoverRestriction, InvariantsError> {
    let total: u32 = branch.iter().map(|b| b.degree()).sum();
    if total != 4 {
        return Err(InvariantsError::BranchNotQuartic);
    }
    let q = match &curve.form {
        CurveForm::Graph { q } => q,
        _ => return Err(InvariantsError::NotAGraphCurve),
    };
    let mut r = Poly::one(Var::T);
    for b in branch {
        let piece = match &b.form {
            CurveForm::Graph { q: qb } => q.sub(qb),
            CurveForm::Vertical { a } => {
                Poly::new(Var::T, vec![a.neg(), TowerElem::from_int(1)])
            }
            CurveForm::General { c } => c.subst_graph(q),
        };
        r = r.mul(&piece);
    }
    let (constant, half) = r
        .square_up_to_constant()
        .ok_or_else(|| InvariantsError::NotASplittingCurve(curve.label.clone()))?;
    Ok(CoverRestriction { constant, half })
}

/// A splitting type (m1, m2) with m1 <= m2 and m1 + m2 the Bezout number of
/// the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingType(pub u32, pub u32);

impl SplittingType {
    fn sorted(a: u32, b: u32) -> SplittingType {
        SplittingType(a.min(b), a.max(b))
    }
}

impl std::fmt::Display for SplittingType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Geometric splitting type of two graph curves relative to a branch
/// quartic: count over the intersection points how often the chosen lifts
/// agree. The hypotheses (transverse, finite, off the branch) are enforced.
pub fn splitting_type_geometric(
    branch: &[PlaneCurve],
    d1: &PlaneCurve,
    d2: &PlaneCurve,
) -> Result<SplittingType, InvariantsError> {
    let (q1, q2) = match (&d1.form, &d2.form) {
        (CurveForm::Graph { q: a }, CurveForm::Graph { q: b }) => (a, b),
        _ => return Err(InvariantsError::NotAGraphCurve),
    };
    let delta = q1.sub(q2);
    let n = delta.deg_or_zero() as u32;
    if n != d1.degree() * d2.degree() {
        return Err(InvariantsError::PairMeetsAtInfinity);
    }
    if !delta.gcd(&delta.derivative()).is_constant() {
        return Err(InvariantsError::PairNotTransverse);
    }
    let r1 = cover_restrict(branch, d1)?;
    let r2 = cover_restrict(branch, d2)?;
    if !delta.gcd(&r1.half).is_constant() || !delta.gcd(&r2.half).is_constant() {
        return Err(InvariantsError::PairMeetsOnBranch);
    }
    let (s1, _) = r1
        .constant
        .try_sqrt()
        .ok_or(InvariantsError::SqrtNotRepresentable)?;
    let (s2, _) = r2
        .constant
        .try_sqrt()
        .ok_or(InvariantsError::SqrtNotRepresentable)?;
    let lift1 = r1.half.mul_elem(&s1);
    let lift2 = r2.half.mul_elem(&s2);
    let m = delta.gcd(&lift1.sub(&lift2)).deg_or_zero() as u32;
    Ok(SplittingType::sorted(m, n - m))
}

/// Lattice-predicted splitting type of the sections behind a conic-line or
/// line-line pair: the two intersection numbers of the section pair over
/// both sign choices.
pub fn splitting_type_predicted(
    mw: &MordellWeil,
    pd: &MwPoint,
    pm: &MwPoint,
) -> Result<SplittingType, InvariantsError> {
    let fd = mw.flags(pd)?;
    let fm = mw.flags(pm)?;
    if fd.iter().zip(fm.iter()).any(|(a, b)| *a && *b) {
        return Err(InvariantsError::ComponentSharingPair);
    }
    let s1 = mw.section_intersection(pd, pm)? as u32;
    let s2 = mw.section_intersection(pd, &mw.neg(pm))? as u32;
    Ok(SplittingType::sorted(s1, s2))
}

/// Both routes, compared; disagreement is an error, not a warning.
pub fn splitting_type_checked(
    branch: &[PlaneCurve],
    d1: &PlaneCurve,
    d2: &PlaneCurve,
    mw: &MordellWeil,
    pd: &MwPoint,
    pm: &MwPoint,
) -> Result<SplittingType, InvariantsError> {
    let geo = splitting_type_geometric(branch, d1, d2)?;
    let pre = splitting_type_predicted(mw, pd, pm)?;
    if geo != pre {
        return Err(InvariantsError::OracleDisagreement {
            geometric: (geo.0, geo.1),
            predicted: (pre.0, pre.1),
        });
    }
    Ok(geo)
}

/// In the (0,2) case of the conic-line pair, the tangency points between the
/// pair and the branch pieces lie on one line. Verify: collect contact-order
/// events of order exactly two between the cross pairs, and test the first
/// three for collinearity (projectively; z_o = [0:1:0] participates).
pub fn tangencies_collinear(
    pair: &[PlaneCurve],
    branch_pieces: &[PlaneCurve],
    hints: &[TowerElem],
) -> Result<bool, InvariantsError> {
    let mut pts: Vec<[TowerElem; 3]> = Vec::new();
    for d in pair {
        for b in branch_pieces {
            for e in intersect_pair(d, b, hints)? {
                if e.mult == 2 {
                    match e.site {
                        EventSite::Finite { t, x } => {
                            pts.push([t, x, TowerElem::from_int(1)]);
                        }
                        EventSite::VerticalInfinity => {
                            pts.push([
                                TowerElem::from_int(0),
                                TowerElem::from_int(1),
                                TowerElem::from_int(0),
                            ]);
                        }
                        EventSite::SlopeInfinity { slope } => {
                            pts.push([TowerElem::from_int(1), slope, TowerElem::from_int(0)]);
                        }
                        EventSite::FinitePair { .. } => return Ok(false),
                    }
                }
            }
        }
    }
    if pts.len() < 3 {
        return Ok(false);
    }
    // all triples must be collinear
    for w in pts.windows(3) {
        let det = det3(&w[0], &w[1], &w[2]);
        if !det.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn det3(a: &[TowerElem; 3], b: &[TowerElem; 3], c: &[TowerElem; 3]) -> TowerElem {
    let m01 = b[1].mul(&c[2]).sub(&b[2].mul(&c[1]));
    let m02 = b[0].mul(&c[2]).sub(&b[2].mul(&c[0]));
    let m03 = b[0].mul(&c[1]).sub(&b[1].mul(&c[0]));
    a[0].mul(&m01).sub(&a[1].mul(&m02)).add(&a[2].mul(&m03))
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Linear dependence of lattice classes over Z/pZ, p an odd prime. Torsion
/// dies mod p, so only the free parts matter; dependence is rank deficiency
/// of the reduced matrix.
pub fn dihedral_dependence_test(
    points: &[LatticeCoord],
    p: u64,
) -> Result<bool, InvariantsError> {
    if !is_odd_prime(p) {
        return Err(InvariantsError::NotAnOddPrime(p));
    }
    if points.is_empty() {
        return Ok(false);
    }
    let width = points[0].free.len();
    if points.iter().any(|v| v.free.len() != width) {
        return Err(InvariantsError::RankMismatch);
    }
    let mut rows: Vec<Vec<u64>> = points
        .iter()
        .map(|v| v.free.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect())
        .collect();
    let rank = rank_mod_p(&mut rows, p);
    Ok(rank < points.len())
}

fn rank_mod_p(rows: &mut [Vec<u64>], p: u64) -> usize {
    let n = rows.len();
    if n == 0 {
        return 0;
    }
    let width = rows[0].len();
    let mut rank = 0;
    for col in 0..width {
        let pivot = (rank..n).find(|&r| rows[r][col] % p != 0);
        let Some(pivot) = pivot else { continue };
        rows.swap(rank, pivot);
        let inv = mod_inv(rows[rank][col] % p, p);
        for c in col..width {
            rows[rank][c] = rows[rank][c] % p * inv % p;
        }
        for r in 0..n {
            if r != rank && rows[r][col] % p != 0 {
                let f = rows[r][col] % p;
                for c in col..width {
                    let sub = f * rows[rank][c] % p;
                    rows[r][c] = (rows[r][c] % p + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a nonzero mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

/// One computed invariant value for one arrangement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum InvariantResult {
    #[serde(rename = "splitting_type")]
    SplittingType {
        arrangement: u32,
        /// (curve 1 label, curve 2 label, branch description)
        triple: Vec<String>,
        value: SplittingType,
    },
    #[serde(rename = "dihedral_dependence")]
    DihedralDependence {
        arrangement: u32,
        p: u64,
        points: Vec<String>,
        value: String,
    },
}

impl InvariantResult {
    fn key(&self) -> (u32, String) {
        match self {
            InvariantResult::SplittingType { arrangement, triple, .. } => {
                (*arrangement, format!("split:{}", triple.join("|")))
            }
            InvariantResult::DihedralDependence { arrangement, p, points, .. } => {
                (*arrangement, format!("dihedral:{}:{}", p, points.join("|")))
            }
        }
    }

    fn value_str(&self) -> String {
        match self {
            InvariantResult::SplittingType { value, .. } => value.to_string(),
            InvariantResult::DihedralDependence { value, .. } => value.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub combinatorics_isomorphic: bool,
    pub invariants: Vec<InvariantResult>,
    pub verdict: String,
}

pub const VERDICT_CERTIFIED: &str = "zariski_pair_certified";
pub const VERDICT_INDISTINGUISHABLE: &str = "indistinguishable_by_these_invariants";
pub const VERDICT_COMBINATORICS_DIFFER: &str = "combinatorics_differ";

/// Aggregate a certificate from the combinatorics of two arrangements plus
/// matched invariant computations (entries are paired up by their kind and
/// arguments, one value per arrangement).
pub fn zariski_certificate(
    comb1: &Combinatorics,
    comb2: &Combinatorics,
    invariants: Vec<InvariantResult>,
) -> Certificate {
    let iso = comb1.isomorphic(comb2);
    let verdict = if !iso {
        VERDICT_COMBINATORICS_DIFFER
    } else {
        let mut differs = false;
        for a in invariants.iter() {
            let (arr_a, key_a) = a.key();
            if arr_a != 1 {
                continue;
            }
            for b in invariants.iter() {
                let (arr_b, key_b) = b.key();
                if arr_b == 2 && key_a == key_b && a.value_str() != b.value_str() {
                    differs = true;
                }
            }
        }
        if differs {
            VERDICT_CERTIFIED
        } else {
            VERDICT_INDISTINGUISHABLE
        }
    };
    Certificate {
        version: 1,
        combinatorics_isomorphic: iso,
        invariants,
        verdict: verdict.to_string(),
    }
}

/// Convenience: classify two arrangements and certify.
pub fn certify_arrangements(
    arr1: &Arrangement,
    arr2: &Arrangement,
    invariants: Vec<InvariantResult>,
) -> Result<Certificate, InvariantsError> {
    let c1 = classify(arr1)?;
    let c2 = classify(arr2)?;
    Ok(zariski_certificate(&c1, &c2, invariants))
}

/// The branch pieces of a surface's plinth quartic as plane curves: the
/// parabola together with either the two chords of a split member or the
/// smooth member conic.
pub fn plinth_curves(mw: &MordellWeil) -> Result<Vec<PlaneCurve>, InvariantsError> {
    let s = &mw.surface;
    let mut out = vec![PlaneCurve::graph("Co", crate::surface::Surface::co_graph())?];
    match &s.class {
        crate::surface::ParamClass::SplitConic { lines, .. } => {
            out.push(PlaneCurve::graph("L12", lines[0].clone())?);
            out.push(PlaneCurve::graph("L34", lines[1].clone())?);
        }
        crate::surface::ParamClass::SmoothConic => {
            out.push(PlaneCurve::from_bivar("C", s.ctau.clone())?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mw::GenName;
    use crate::plane::curve_from_section;
    use crate::qtower::rat_i;
    use crate::surface::{Surface, SurfaceParams};

    fn m1_mw() -> MordellWeil {
        let s = Surface::new(SurfaceParams::from_ints(0, [-2, -1, 1, 2])).unwrap();
        MordellWeil::new(s).unwrap()
    }

    fn m2_mw() -> MordellWeil {
        let s = Surface::new(SurfaceParams::from_ints(-10, [-2, -1, 1, 2])).unwrap();
        MordellWeil::new(s).unwrap()
    }

    #[test]
    fn restriction_of_chord_is_a_square() {
        let mw = m1_mw();
        let branch = plinth_curves(&mw).unwrap();
        assert_eq!(branch.len(), 3);
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let l13 = curve_from_section(&mw, &p13, "L13").unwrap();
        let r = cover_restrict(&branch, &l13).unwrap();
        assert_eq!(r.constant, TowerElem::from_int(8));
        // g = (t + 2)(t - 1) monic
        let expect = Poly::from_roots(
            Var::T,
            &[TowerElem::from_int(-2), TowerElem::from_int(1)],
        );
        assert_eq!(r.half, expect);
        // and the restriction of the branch equals the section's y squared
        let y = p13.y().unwrap().as_poly().unwrap();
        assert_eq!(r.product(), y.mul(y));
    }

    #[test]
    fn generic_line_does_not_split() {
        let mw = m1_mw();
        let branch = plinth_curves(&mw).unwrap();
        let l = PlaneCurve::graph(
            "L",
            Poly::new(Var::T, vec![TowerElem::from_int(1), TowerElem::from_int(1)]),
        )
        .unwrap();
        assert!(matches!(
            cover_restrict(&branch, &l),
            Err(InvariantsError::NotASplittingCurve(_))
        ));
    }

    #[test]
    fn splitting_types_of_conic_line_pairs() {
        let mw = m1_mw();
        let branch = plinth_curves(&mw).unwrap();
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        let p34 = mw.generator(GenName::Chord(3, 4)).unwrap();
        let pd = mw.add(&p13, &p14).unwrap();
        let pm = mw.add(&pd, &p34).unwrap();
        let pm_alt = mw.add(&mw.sub(&p13, &p14).unwrap(), &p34).unwrap();
        let d = curve_from_section(&mw, &pd, "D").unwrap();
        let l0 = curve_from_section(&mw, &pm, "L0").unwrap();
        let l0p = curve_from_section(&mw, &pm_alt, "L0'").unwrap();
        // the line behind P13 + P14 + P34 is x = -2 sqrt(2) t - 2
        let s2 = TowerElem::sqrt_int(2).unwrap();
        let expect_l0 = Poly::new(
            Var::T,
            vec![TowerElem::from_int(-2), s2.mul_rat(&crate::qtower::rat(-2, 1))],
        );
        match &l0.form {
            CurveForm::Graph { q } => assert_eq!(*q, expect_l0),
            _ => panic!("expected graph line"),
        }
        let t1 = splitting_type_checked(&branch, &d, &l0, &mw, &pd, &pm).unwrap();
        assert_eq!(t1, SplittingType(0, 2));
        let t2 = splitting_type_checked(&branch, &d, &l0p, &mw, &pd, &pm_alt).unwrap();
        assert_eq!(t2, SplittingType(1, 1));
    }

    #[test]
    fn swapped_decomposition_agrees() {
        let mw = m1_mw();
        let s = &mw.surface;
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        let p34 = mw.generator(GenName::Chord(3, 4)).unwrap();
        let pd = mw.add(&p13, &p14).unwrap();
        let pm = mw.add(&pd, &p34).unwrap();
        let d = curve_from_section(&mw, &pd, "D").unwrap();
        let l0 = curve_from_section(&mw, &pm, "L0").unwrap();
        let l34 = curve_from_section(&mw, &p34, "L34").unwrap();
        let co = PlaneCurve::graph("Co", Surface::co_graph()).unwrap();
        let lines = match &s.class {
            crate::surface::ParamClass::SplitConic { lines, .. } => lines.clone(),
            _ => panic!("split member expected"),
        };
        let l12 = PlaneCurve::graph("L12", lines[0].clone()).unwrap();
        // branch on the swapped quartic D + L0 + L34 and split (Co, L12)
        let branch2 = vec![d, l0, l34];
        let t = splitting_type_geometric(&branch2, &co, &l12).unwrap();
        assert_eq!(t, SplittingType(0, 2));
        // tangency points of the original pair against (Co, L12) line up
        let pm2 = mw.add(&mw.add(&p13, &p14).unwrap(), &p34).unwrap();
        let dd = curve_from_section(&mw, &mw.add(&p13, &p14).unwrap(), "D").unwrap();
        let mm = curve_from_section(&mw, &pm2, "M").unwrap();
        let collinear =
            tangencies_collinear(&[dd, mm], &[co, l12], &[]).unwrap();
        assert!(collinear);
    }

    #[test]
    fn dihedral_dependence_examples() {
        // chord (13) sits at e2 in the rank-3 basis
        let p13 = LatticeCoord { free: vec![0, 1, 0], torsion: 0 };
        let q1 = LatticeCoord { free: vec![1, 1, 1], torsion: 0 };
        let q2 = LatticeCoord { free: vec![-1, 1, 1], torsion: 0 };
        let q3 = LatticeCoord { free: vec![1, -1, 1], torsion: 0 };
        let q4 = LatticeCoord { free: vec![1, 1, -1], torsion: 0 };
        assert!(dihedral_dependence_test(&[p13.clone(), q1.clone(), q3.clone()], 3).unwrap());
        assert!(dihedral_dependence_test(&[p13.clone(), q2.clone(), q4.clone()], 3).unwrap());
        assert!(!dihedral_dependence_test(&[p13.clone(), q1.clone(), q2.clone()], 3).unwrap());
        assert!(!dihedral_dependence_test(&[p13.clone(), q1.clone(), q4.clone()], 3).unwrap());
        assert!(!dihedral_dependence_test(&[p13.clone(), q3.clone(), q4.clone()], 3).unwrap());
        assert!(!dihedral_dependence_test(&[p13, q2, q3], 3).unwrap());
        // the two-conic discriminator: [2]P12 vs P12 dependent, vs P13 not
        let two_p12 = LatticeCoord { free: vec![2, 0, 0], torsion: 0 };
        let p12 = LatticeCoord { free: vec![1, 0, 0], torsion: 0 };
        let p13b = LatticeCoord { free: vec![0, 1, 0], torsion: 0 };
        assert!(dihedral_dependence_test(&[two_p12.clone(), p12], 3).unwrap());
        assert!(!dihedral_dependence_test(&[two_p12, p13b], 3).unwrap());
        // errors
        assert!(matches!(
            dihedral_dependence_test(&[], 2),
            Err(InvariantsError::NotAnOddPrime(2))
        ));
        assert!(matches!(
            dihedral_dependence_test(&[], 9),
            Err(InvariantsError::NotAnOddPrime(9))
        ));
    }

    #[test]
    fn dependence_invariant_under_sign_and_order() {
        let q1 = LatticeCoord { free: vec![1, 1, 1], torsion: 0 };
        let q3 = LatticeCoord { free: vec![1, -1, 1], torsion: 0 };
        let p13 = LatticeCoord { free: vec![0, 1, 0], torsion: 0 };
        let base = dihedral_dependence_test(&[p13.clone(), q1.clone(), q3.clone()], 5).unwrap();
        let neg_q1 = LatticeCoord { free: vec![-1, -1, -1], torsion: 1 };
        let flipped = dihedral_dependence_test(&[q3, neg_q1, p13], 5).unwrap();
        assert_eq!(base, flipped);
    }

    #[test]
    fn predicted_type_for_double_section_pair() {
        // conic of [2]P12 against the chord line of P12 itself shares no
        // fiber components and predicts (0, 2)
        let mw = m2_mw();
        let p12 = mw.generator(GenName::Chord(1, 2)).unwrap();
        let d = mw.add(&p12, &p12).unwrap();
        let t = splitting_type_predicted(&mw, &d, &p12).unwrap();
        assert_eq!(t, SplittingType(0, 2));
    }

    #[test]
    fn certificate_verdicts() {
        let mw = m1_mw();
        let co = PlaneCurve::graph("Co", Surface::co_graph()).unwrap();
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let p24 = mw.generator(GenName::Chord(2, 4)).unwrap();
        let l13 = curve_from_section(&mw, &p13, "L13").unwrap();
        let l24 = curve_from_section(&mw, &p24, "L24").unwrap();
        let arr = Arrangement::assemble(vec![co, l13, l24], vec![]).unwrap();
        let inv = vec![
            InvariantResult::SplittingType {
                arrangement: 1,
                triple: vec!["D".into(), "L0".into(), "plinth".into()],
                value: SplittingType(0, 2),
            },
            InvariantResult::SplittingType {
                arrangement: 2,
                triple: vec!["D".into(), "L0".into(), "plinth".into()],
                value: SplittingType(1, 1),
            },
        ];
        let cert = certify_arrangements(&arr, &arr, inv).unwrap();
        assert!(cert.combinatorics_isomorphic);
        assert_eq!(cert.verdict, VERDICT_CERTIFIED);
        // identical values: indistinguishable
        let inv_same = vec![
            InvariantResult::DihedralDependence {
                arrangement: 1,
                p: 3,
                points: vec!["P13".into(), "Q1".into()],
                value: "independent".into(),
            },
            InvariantResult::DihedralDependence {
                arrangement: 2,
                p: 3,
                points: vec!["P13".into(), "Q1".into()],
                value: "independent".into(),
            },
        ];
        let cert2 = certify_arrangements(&arr, &arr, inv_same).unwrap();
        assert_eq!(cert2.verdict, VERDICT_INDISTINGUISHABLE);
        // JSON shape
        let js = serde_json::to_value(&cert2).unwrap();
        assert_eq!(js["version"], 1);
        assert_eq!(js["invariants"][0]["kind"], "dihedral_dependence");
    }

    #[test]
    fn oracle_equivalence_at_another_parameter() {
        // independent parameters keep the two routes in line
        let s = Surface::new(SurfaceParams::new(
            rat_i(0),
            [rat_i(-3), rat_i(-1), rat_i(2), rat_i(4)],
        ))
        .unwrap();
        let mw = MordellWeil::new(s).unwrap();
        let branch = plinth_curves(&mw).unwrap();
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        let p34 = mw.generator(GenName::Chord(3, 4)).unwrap();
        let pd = mw.add(&p13, &p14).unwrap();
        for pm in [mw.add(&pd, &p34).unwrap(), mw.add(&mw.sub(&p13, &p14).unwrap(), &p34).unwrap()] {
            let d = curve_from_section(&mw, &pd, "D").unwrap();
            let m = curve_from_section(&mw, &pm, "M").unwrap();
            splitting_type_checked(&branch, &d, &m, &mw, &pd, &pm).unwrap();
        }
    }
}
