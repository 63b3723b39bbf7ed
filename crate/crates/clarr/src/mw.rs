//! Sections of the elliptic surface: group law, lattice coordinates,
//! component flags and intersection numbers.
//!
//! The section group is computed once and for all for the two parameter
//! classes. When the pencil member splits into the chords (12)(34) the group
//! is Z^2 x (Z/2)^2 with free basis the sections over the chords (13), (14)
//! and torsion generated by the parabola section and the chord (12). For a
//! smooth member it is Z^3 x Z/2 with free basis over the chords (12), (13),
//! (23) and torsion the parabola section. In both cases the height pairing
//! on the free part is half the identity matrix.
//!
//! Heights come from the lattice coordinates; intersection numbers of
//! sections are recovered from heights, their contacts with the zero
//! section, and per-fiber correction terms (one half for each two-component
//! fiber where both sections pass through the node). Integrality of the
//! recovered numbers is checked and any failure is reported as an internal
//! inconsistency rather than silently accepted.

use crate::polyring::{PolyError, RatFunc, Var};
use crate::qtower::{rat, rat_i, QtowerError, Rat, TowerElem};
use crate::surface::{ParamClass, Surface};
use num::{Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MwError {
    #[error("the pencil member splits along a different chord pairing; relabel the base points so it splits along (12)(34)")]
    UnsupportedPairing,
    #[error("point does not satisfy the surface equation")]
    NotASection,
    #[error("unknown generator {0} for this parameter class")]
    UnknownGenerator(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Tower(#[from] QtowerError),
}

/// Which section group we are in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwCase {
    /// Split member: rank 2, torsion (Z/2)^2.
    Split,
    /// Smooth member: rank 3, torsion Z/2.
    Smooth,
}

impl MwCase {
    pub fn rank(self) -> usize {
        match self {
            MwCase::Split => 2,
            MwCase::Smooth => 3,
        }
    }
}

/// Coordinates of a section in the fixed basis: integer vector over the free
/// generators plus a torsion bit field. In the split case bit 0 is the
/// parabola section and bit 1 the chord (12) section (their sum, bits 11, is
/// the chord (34) section); in the smooth case bit 0 is the parabola section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeCoord {
    pub free: Vec<i64>,
    pub torsion: u8,
}

impl LatticeCoord {
    fn zero(case: MwCase) -> LatticeCoord {
        LatticeCoord { free: vec![0; case.rank()], torsion: 0 }
    }

    fn combine(&self, other: &LatticeCoord) -> LatticeCoord {
        LatticeCoord {
            free: self
                .free
                .iter()
                .zip(other.free.iter())
                .map(|(a, b)| a + b)
                .collect(),
            torsion: self.torsion ^ other.torsion,
        }
    }

    fn negate(&self) -> LatticeCoord {
        LatticeCoord { free: self.free.iter().map(|a| -a).collect(), torsion: self.torsion }
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|&a| a == 0) && self.torsion == 0
    }
}

/// Affine or zero coordinates of a section over the t-line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MwCoords {
    Zero,
    Affine { x: RatFunc, y: RatFunc },
}

/// A section with its curve coordinates, lattice coordinates and the label
/// it was built under.
#[derive(Debug, Clone)]
pub struct MwPoint {
    pub coords: MwCoords,
    pub lattice: LatticeCoord,
    pub label: String,
}

impl PartialEq for MwPoint {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}
impl Eq for MwPoint {}

impl MwPoint {
    pub fn is_zero(&self) -> bool {
        matches!(self.coords, MwCoords::Zero)
    }

    pub fn x(&self) -> Option<&RatFunc> {
        match &self.coords {
            MwCoords::Zero => None,
            MwCoords::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&RatFunc> {
        match &self.coords {
            MwCoords::Zero => None,
            MwCoords::Affine { y, .. } => Some(y),
        }
    }
}

impl fmt::Display for MwPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.coords {
            MwCoords::Zero => write!(f, "O"),
            MwCoords::Affine { x, y } => write!(f, "({}, {})", x, y),
        }
    }
}

/// Names for the distinguished sections: the section over the chord through
/// base points i and j, or the 2-torsion section along the parabola.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenName {
    Chord(u8, u8),
    TorsionCo,
}

impl fmt::Display for GenName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenName::Chord(i, j) => write!(f, "P{}{}", i, j),
            GenName::TorsionCo => write!(f, "T"),
        }
    }
}

/// The section group of a surface, with its fixed basis.
pub struct MordellWeil {
    pub surface: Surface,
    pub case: MwCase,
}

impl MordellWeil {
    pub fn new(surface: Surface) -> Result<MordellWeil, MwError> {
        let case = match &surface.class {
            ParamClass::SmoothConic => MwCase::Smooth,
            ParamClass::SplitConic { lines, .. } => {
                let l12 = surface.params.x_line(1, 2);
                let l34 = surface.params.x_line(3, 4);
                let matches_pairing = (lines[0] == l12 && lines[1] == l34)
                    || (lines[0] == l34 && lines[1] == l12);
                if !matches_pairing {
                    return Err(MwError::UnsupportedPairing);
                }
                MwCase::Split
            }
        };
        Ok(MordellWeil { surface, case })
    }

    pub fn zero(&self) -> MwPoint {
        MwPoint {
            coords: MwCoords::Zero,
            lattice: LatticeCoord::zero(self.case),
            label: "O".to_string(),
        }
    }

    /// Does the point satisfy y^2 = x^3 + a2 x^2 + a4 x + a6?
    pub fn is_on_surface(&self, p: &MwPoint) -> bool {
        match &p.coords {
            MwCoords::Zero => true,
            MwCoords::Affine { x, y } => y.square() == self.surface.rhs(x),
        }
    }

    /// The section over the chord (i, j) with y determined by extracting the
    /// square root of the restricted cubic (constant normalized so its first
    /// tower coordinate is positive, square factor monic), or a 2-torsion
    /// section. Sections not in the basis are derived through the group law,
    /// which keeps their lattice coordinates exact rather than conventional.
    pub fn generator(&self, g: GenName) -> Result<MwPoint, MwError> {
        let torsion_co = |bits: u8| -> MwPoint {
            let x = RatFunc::from_poly(Surface::co_graph());
            let y = RatFunc::zero(Var::T);
            MwPoint {
                coords: MwCoords::Affine { x, y },
                lattice: LatticeCoord { free: vec![0; self.case.rank()], torsion: bits },
                label: "T".to_string(),
            }
        };
        match (self.case, g) {
            (_, GenName::TorsionCo) => Ok(torsion_co(0b01)),
            (MwCase::Split, GenName::Chord(1, 2)) => {
                Ok(self.chord_torsion(1, 2, 0b10)?)
            }
            (MwCase::Split, GenName::Chord(3, 4)) => {
                Ok(self.chord_torsion(3, 4, 0b11)?)
            }
            (MwCase::Split, GenName::Chord(1, 3)) => self.chord_section(1, 3, vec![1, 0]),
            (MwCase::Split, GenName::Chord(1, 4)) => self.chord_section(1, 4, vec![0, 1]),
            (MwCase::Split, GenName::Chord(2, 3)) => {
                let p = self.generator(GenName::Chord(1, 4))?;
                let t = self.generator(GenName::TorsionCo)?;
                let mut s = self.add(&p, &t)?;
                s.label = "P23".to_string();
                Ok(s)
            }
            (MwCase::Split, GenName::Chord(2, 4)) => {
                let p = self.generator(GenName::Chord(1, 3))?;
                let t = self.generator(GenName::TorsionCo)?;
                let mut s = self.add(&p, &t)?;
                s.label = "P24".to_string();
                Ok(s)
            }
            (MwCase::Smooth, GenName::Chord(1, 2)) => self.chord_section(1, 2, vec![1, 0, 0]),
            (MwCase::Smooth, GenName::Chord(1, 3)) => self.chord_section(1, 3, vec![0, 1, 0]),
            (MwCase::Smooth, GenName::Chord(2, 3)) => self.chord_section(2, 3, vec![0, 0, 1]),
            (MwCase::Smooth, GenName::Chord(1, 4)) => {
                self.derived_smooth(GenName::Chord(2, 3), "P14")
            }
            (MwCase::Smooth, GenName::Chord(2, 4)) => {
                self.derived_smooth(GenName::Chord(1, 3), "P24")
            }
            (MwCase::Smooth, GenName::Chord(3, 4)) => {
                self.derived_smooth(GenName::Chord(1, 2), "P34")
            }
            (_, g) => Err(MwError::UnknownGenerator(g.to_string())),
        }
    }

    fn derived_smooth(&self, partner: GenName, label: &str) -> Result<MwPoint, MwError> {
        let p = self.generator(partner)?;
        let t = self.generator(GenName::TorsionCo)?;
        let mut s = self.add(&p, &t)?;
        s.label = label.to_string();
        Ok(s)
    }

    fn chord_torsion(&self, i: usize, j: usize, bits: u8) -> Result<MwPoint, MwError> {
        let x = RatFunc::from_poly(self.surface.params.x_line(i, j));
        let y = RatFunc::zero(Var::T);
        let p = MwPoint {
            coords: MwCoords::Affine { x, y },
            lattice: LatticeCoord { free: vec![0; self.case.rank()], torsion: bits },
            label: format!("P{}{}", i, j),
        };
        if !self.is_on_surface(&p) {
            return Err(MwError::Internal(format!(
                "chord ({}, {}) is not 2-torsion here",
                i, j
            )));
        }
        Ok(p)
    }

    fn chord_section(&self, i: usize, j: usize, free: Vec<i64>) -> Result<MwPoint, MwError> {
        let xq = self.surface.params.x_line(i, j);
        let x = RatFunc::from_poly(xq.clone());
        let rhs = self.surface.rhs(&x);
        let rhs_poly = rhs
            .as_poly()
            .ok_or_else(|| MwError::Internal("polynomial x gave non-polynomial rhs".into()))?;
        let (c, gsq) = rhs_poly.square_up_to_constant().ok_or_else(|| {
            MwError::Internal(format!(
                "restricted cubic over chord ({}, {}) is not a square up to constant",
                i, j
            ))
        })?;
        if c.is_zero() {
            return Err(MwError::Internal(format!(
                "chord ({}, {}) is torsion, not a free generator",
                i, j
            )));
        }
        let (rc, _) = c.try_sqrt().ok_or_else(|| {
            MwError::Internal("square root of restriction constant not representable".into())
        })?;
        // Sign convention for generator sections: take +sqrt(c) g when the
        // restriction constant is positive and -sqrt(c) g when it is
        // negative. Negating every generator at once is a group
        // automorphism, so only the printed y values depend on this.
        let neg = c.as_rat().map(|r| r.is_negative()).unwrap_or(false);
        let rc = if neg { rc.neg() } else { rc };
        let y = RatFunc::from_poly(gsq.mul_elem(&rc));
        let p = MwPoint {
            coords: MwCoords::Affine { x, y },
            lattice: LatticeCoord { free, torsion: 0 },
            label: format!("P{}{}", i, j),
        };
        debug_assert!(self.is_on_surface(&p));
        Ok(p)
    }

    /// Chord and tangent addition.
    pub fn add(&self, p: &MwPoint, q: &MwPoint) -> Result<MwPoint, MwError> {
        let lattice = p.lattice.combine(&q.lattice);
        let label = format!("{}+{}", p.label, q.label);
        let coords = match (&p.coords, &q.coords) {
            (MwCoords::Zero, c) | (c, MwCoords::Zero) => c.clone(),
            (MwCoords::Affine { x: x1, y: y1 }, MwCoords::Affine { x: x2, y: y2 }) => {
                if x1 == x2 {
                    if *y1 == y2.neg() {
                        MwCoords::Zero
                    } else if y1 == y2 {
                        // tangent line
                        let two_y = y1.add(y1);
                        let slope = self.surface.rhs_dx(x1).div(&two_y)?;
                        self.third_point(&slope, x1, y1, x2)
                    } else {
                        return Err(MwError::Internal(
                            "points share x but y values are neither equal nor opposite".into(),
                        ));
                    }
                } else {
                    let slope = y2.sub(y1).div(&x2.sub(x1))?;
                    self.third_point(&slope, x1, y1, x2)
                }
            }
        };
        Ok(MwPoint { coords, lattice, label })
    }

    fn third_point(&self, slope: &RatFunc, x1: &RatFunc, y1: &RatFunc, x2: &RatFunc) -> MwCoords {
        let a2 = RatFunc::from_poly(self.surface.a2.clone());
        let x3 = slope.square().sub(&a2).sub(x1).sub(x2);
        let y3 = y1.add(&slope.mul(&x3.sub(x1))).neg();
        MwCoords::Affine { x: x3, y: y3 }
    }

    pub fn neg(&self, p: &MwPoint) -> MwPoint {
        let coords = match &p.coords {
            MwCoords::Zero => MwCoords::Zero,
            MwCoords::Affine { x, y } => MwCoords::Affine { x: x.clone(), y: y.neg() },
        };
        MwPoint { coords, lattice: p.lattice.negate(), label: format!("-({})", p.label) }
    }

    pub fn sub(&self, p: &MwPoint, q: &MwPoint) -> Result<MwPoint, MwError> {
        self.add(p, &self.neg(q))
    }

    pub fn scale(&self, n: i64, p: &MwPoint) -> Result<MwPoint, MwError> {
        let (n, base) = if n < 0 { (-n, self.neg(p)) } else { (n, p.clone()) };
        let mut acc = self.zero();
        for _ in 0..n {
            acc = self.add(&acc, &base)?;
        }
        acc.label = format!("{}*{}", if base.label.starts_with('-') { -n } else { n }, p.label);
        Ok(acc)
    }

    /// Linear combination of named generators.
    pub fn combine(&self, terms: &[(i64, GenName)]) -> Result<MwPoint, MwError> {
        let mut acc = self.zero();
        for &(k, g) in terms {
            let gen = self.generator(g)?;
            let scaled = self.scale(k, &gen)?;
            acc = self.add(&acc, &scaled)?;
        }
        Ok(acc)
    }

    /// Per-fiber component flags: true where the section passes through the
    /// node of the two-component fiber (equivalently, meets its non-identity
    /// component). The last entry is the place at infinity, where sections
    /// whose x has map degree at most 1 are the non-identity ones.
    pub fn flags(&self, p: &MwPoint) -> Result<Vec<bool>, MwError> {
        let mut out = Vec::with_capacity(self.surface.fibers.len());
        match &p.coords {
            MwCoords::Zero => {
                out.resize(self.surface.fibers.len(), false);
            }
            MwCoords::Affine { x, y } => {
                for place in &self.surface.fibers {
                    match (&place.t, &place.node_x) {
                        (Some(tv), Some(nx)) => {
                            let tv = TowerElem::from_rat(tv.clone());
                            match x.eval(&tv) {
                                None => out.push(false), // pole: identity component
                                Some(xv) => {
                                    let hit = xv == *nx;
                                    if hit {
                                        let yv = y.eval(&tv).ok_or_else(|| {
                                            MwError::Internal(
                                                "x finite but y has a pole".into(),
                                            )
                                        })?;
                                        if !yv.is_zero() {
                                            return Err(MwError::Internal(
                                                "section meets a node with nonzero y".into(),
                                            ));
                                        }
                                    }
                                    out.push(hit);
                                }
                            }
                        }
                        (None, _) => {
                            let deg = x.map_degree().unwrap_or(0);
                            out.push(deg <= 1);
                        }
                        _ => {
                            return Err(MwError::Internal(
                                "finite fiber place without node abscissa".into(),
                            ))
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Height pairing from lattice coordinates: half the dot product of the
    /// free parts (torsion is orthogonal to everything).
    pub fn height(&self, p: &MwPoint, q: &MwPoint) -> Rat {
        let dot: i64 = p
            .lattice
            .free
            .iter()
            .zip(q.lattice.free.iter())
            .map(|(a, b)| a * b)
            .sum();
        rat(dot, 2)
    }

    fn correction(&self, fp: &[bool], fq: &[bool]) -> Rat {
        let shared = fp.iter().zip(fq.iter()).filter(|(a, b)| **a && **b).count();
        rat(shared as i64, 2)
    }

    /// Contact number of a nonzero section with the zero section, recovered
    /// from its height and flags. Always a non-negative integer for an
    /// honest section; anything else is an internal inconsistency.
    pub fn base_contact(&self, p: &MwPoint) -> Result<i64, MwError> {
        if p.is_zero() {
            return Err(MwError::Internal("contact of the zero section with itself".into()));
        }
        let f = self.flags(p)?;
        let h = self.height(p, p);
        let val = (h - rat_i(2) + self.correction(&f, &f)) / rat_i(2);
        rat_to_count(&val, "contact with the zero section")
    }

    /// Intersection number of two distinct nonzero sections, recovered from
    /// heights, base contacts and fiber corrections.
    pub fn section_intersection(&self, p: &MwPoint, q: &MwPoint) -> Result<i64, MwError> {
        if p.is_zero() || q.is_zero() {
            return Err(MwError::Internal("intersection with the zero section".into()));
        }
        if p.coords == q.coords {
            return Err(MwError::Internal("self-intersection of a section".into()));
        }
        let fp = self.flags(p)?;
        let fq = self.flags(q)?;
        let val = rat_i(1) + rat_i(self.base_contact(p)?) + rat_i(self.base_contact(q)?)
            - self.height(p, q)
            - self.correction(&fp, &fq);
        rat_to_count(&val, "intersection of sections")
    }
}

fn rat_to_count(val: &Rat, what: &str) -> Result<i64, MwError> {
    if !val.is_integer() || val < &Rat::zero() {
        return Err(MwError::Internal(format!(
            "{} came out as {}, not a non-negative integer",
            what, val
        )));
    }
    i64::try_from(val.to_integer())
        .map_err(|_| MwError::Internal(format!("{} out of range", what)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::Poly;
    use crate::qtower::TowerDesc;
    use crate::surface::SurfaceParams;

    fn pt(coeffs: &[i64]) -> Poly {
        Poly::new(Var::T, coeffs.iter().map(|&c| TowerElem::from_int(c)).collect())
    }

    fn pt_elems(coeffs: Vec<TowerElem>) -> Poly {
        Poly::new(Var::T, coeffs)
    }

    fn split_mw() -> MordellWeil {
        let s = Surface::new(SurfaceParams::from_ints(0, [-2, -1, 1, 2])).unwrap();
        MordellWeil::new(s).unwrap()
    }

    fn smooth_mw() -> MordellWeil {
        let s = Surface::new(SurfaceParams::from_ints(-10, [-2, -1, 1, 2])).unwrap();
        MordellWeil::new(s).unwrap()
    }

    fn sqrt_of(n: i64) -> TowerElem {
        let (r, _) = TowerElem::from_int(n).try_sqrt().unwrap();
        r
    }

    #[test]
    fn split_basis_sections_exactly() {
        let mw = split_mw();
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        assert_eq!(p13.x().unwrap().as_poly(), Some(&pt(&[2, -1])));
        // y = 2 sqrt(2) (t^2 + t - 2)
        let s2 = sqrt_of(2);
        let want_y = pt(&[-2, 1, 1]).mul_elem(&s2.mul_rat(&rat_i(2)));
        assert_eq!(p13.y().unwrap().as_poly(), Some(&want_y));
        assert!(mw.is_on_surface(&p13));

        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        assert_eq!(p14.x().unwrap().as_poly(), Some(&pt(&[4])));
        assert_eq!(p14.y().unwrap().as_poly(), Some(&pt(&[-12, 0, 3])));
    }

    #[test]
    fn split_torsion_sections() {
        let mw = split_mw();
        for g in [GenName::TorsionCo, GenName::Chord(1, 2), GenName::Chord(3, 4)] {
            let p = mw.generator(g).unwrap();
            assert!(p.y().unwrap().is_zero());
            assert!(mw.is_on_surface(&p));
            let doubled = mw.add(&p, &p).unwrap();
            assert!(doubled.is_zero());
            assert!(doubled.lattice.is_zero());
        }
    }

    #[test]
    fn split_derived_sections() {
        let mw = split_mw();
        // P23 = P14 + T lands on the chord through p2, p3 with y = 3(1 - t^2)
        let p23 = mw.generator(GenName::Chord(2, 3)).unwrap();
        assert_eq!(p23.x().unwrap().as_poly(), Some(&pt(&[1])));
        assert_eq!(p23.y().unwrap().as_poly(), Some(&pt(&[3, 0, -3])));
        assert_eq!(p23.lattice, LatticeCoord { free: vec![0, 1], torsion: 0b01 });
        // P24 = P13 + T lands on the chord through p2, p4
        let p24 = mw.generator(GenName::Chord(2, 4)).unwrap();
        assert_eq!(p24.x().unwrap().as_poly(), Some(&pt(&[2, 1])));
        assert_eq!(p24.lattice, LatticeCoord { free: vec![1, 0], torsion: 0b01 });
        assert!(mw.is_on_surface(&p24));
    }

    #[test]
    fn split_doubling_values() {
        let mw = split_mw();
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let d13 = mw.add(&p13, &p13).unwrap();
        // x(2 P13) = 9/8 t^2
        let want = Poly::var_poly(Var::T)
            .mul(&Poly::var_poly(Var::T))
            .mul_rat(&rat(9, 8));
        assert_eq!(d13.x().unwrap().as_poly(), Some(&want));
        assert_eq!(d13.lattice, LatticeCoord { free: vec![2, 0], torsion: 0 });
        assert!(mw.is_on_surface(&d13));

        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        let d14 = mw.add(&p14, &p14).unwrap();
        let want_x = pt_elems(vec![
            TowerElem::from_rat(rat(1, 4)),
            TowerElem::from_int(0),
            TowerElem::from_int(1),
        ]);
        let want_y = pt_elems(vec![
            TowerElem::from_rat(rat(-9, 8)),
            TowerElem::from_int(0),
            TowerElem::from_rat(rat(1, 2)),
        ]);
        assert_eq!(d14.x().unwrap().as_poly(), Some(&want_x));
        assert_eq!(d14.y().unwrap().as_poly(), Some(&want_y));
    }

    #[test]
    fn split_sum_values() {
        let mw = split_mw();
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        let d = mw.add(&p13, &p14).unwrap();
        // x(P13 + P14) = (18 - 12 sqrt2) t^2 + (36 sqrt2 - 51) t + 34 - 24 sqrt2
        let s2 = sqrt_of(2);
        let c2 = TowerElem::from_int(18).sub(&s2.mul_rat(&rat_i(12)));
        let c1 = s2.mul_rat(&rat_i(36)).sub(&TowerElem::from_int(51));
        let c0 = TowerElem::from_int(34).sub(&s2.mul_rat(&rat_i(24)));
        assert_eq!(d.x().unwrap().as_poly(), Some(&pt_elems(vec![c0, c1, c2])));
        assert!(mw.is_on_surface(&d));

        // P13 + P12 is a section over the graph conic x = 3 t^2 - 2
        let p12 = mw.generator(GenName::Chord(1, 2)).unwrap();
        let d23 = mw.add(&p13, &p12).unwrap();
        assert_eq!(d23.x().unwrap().as_poly(), Some(&pt(&[-2, 0, 3])));
    }

    #[test]
    fn smooth_basis_sections_exactly() {
        let mw = smooth_mw();
        let p12 = mw.generator(GenName::Chord(1, 2)).unwrap();
        assert_eq!(p12.x().unwrap().as_poly(), Some(&pt(&[-2, -3])));
        // y = -i sqrt(10) (t^2 + 3t + 2): negative branch for negative
        // restriction constants
        let m10 = sqrt_of(-10);
        assert_eq!(
            p12.y().unwrap().as_poly(),
            Some(&pt(&[2, 3, 1]).mul_elem(&m10.neg()))
        );
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let m2 = sqrt_of(-2);
        assert_eq!(p13.x().unwrap().as_poly(), Some(&pt(&[2, -1])));
        assert_eq!(
            p13.y().unwrap().as_poly(),
            Some(&pt(&[-2, 1, 1]).mul_elem(&m2.neg()))
        );
        let p23 = mw.generator(GenName::Chord(2, 3)).unwrap();
        let i = sqrt_of(-1);
        assert_eq!(p23.x().unwrap().as_poly(), Some(&pt(&[1])));
        assert_eq!(
            p23.y().unwrap().as_poly(),
            Some(&pt(&[-1, 0, 1]).mul_elem(&i.neg()))
        );
    }

    #[test]
    fn smooth_derived_sections_land_on_chords() {
        let mw = smooth_mw();
        // P14 = P23 + T = (4, i (t^2 - 4))
        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        assert_eq!(p14.x().unwrap().as_poly(), Some(&pt(&[4])));
        let i = sqrt_of(-1);
        assert_eq!(
            p14.y().unwrap().as_poly(),
            Some(&pt(&[-4, 0, 1]).mul_elem(&i))
        );
        assert_eq!(p14.lattice, LatticeCoord { free: vec![0, 0, 1], torsion: 1 });
        // P24 and P34 land on their chords
        let p24 = mw.generator(GenName::Chord(2, 4)).unwrap();
        assert_eq!(
            p24.x().unwrap().as_poly(),
            Some(&mw.surface.params.x_line(2, 4))
        );
        let p34 = mw.generator(GenName::Chord(3, 4)).unwrap();
        assert_eq!(
            p34.x().unwrap().as_poly(),
            Some(&mw.surface.params.x_line(3, 4))
        );
        for p in [&p14, &p24, &p34] {
            assert!(mw.is_on_surface(p));
        }
    }

    #[test]
    fn smooth_doubling_conic() {
        let mw = smooth_mw();
        let p12 = mw.generator(GenName::Chord(1, 2)).unwrap();
        let d = mw.add(&p12, &p12).unwrap();
        // x(2 P12) = t^2 / 10, y = -(3/100) i sqrt(10) t (t^2 + 20)
        let want_x = Poly::var_poly(Var::T)
            .mul(&Poly::var_poly(Var::T))
            .mul_rat(&rat(1, 10));
        assert_eq!(d.x().unwrap().as_poly(), Some(&want_x));
        let m10 = sqrt_of(-10);
        let want_y = pt(&[0, 20, 0, 1]).mul_elem(&m10.mul_rat(&rat(-3, 100)));
        assert_eq!(d.y().unwrap().as_poly(), Some(&want_y));
    }

    #[test]
    fn component_flags_split() {
        let mw = split_mw();
        let flag = |g| {
            let p = mw.generator(g).unwrap();
            mw.flags(&p).unwrap()
        };
        // fiber order: t1, t2, t3, t4, t0, infinity
        assert_eq!(flag(GenName::Chord(1, 3)), [true, false, true, false, false, true]);
        assert_eq!(flag(GenName::Chord(1, 4)), [true, false, false, true, false, true]);
        assert_eq!(flag(GenName::Chord(1, 2)), [true, true, false, false, true, true]);
        assert_eq!(flag(GenName::Chord(3, 4)), [false, false, true, true, true, true]);
        assert_eq!(flag(GenName::TorsionCo), [true, true, true, true, false, false]);
        // the sum P13 + P14 has the xor of the basis flags
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        let d = mw.add(&p13, &p14).unwrap();
        assert_eq!(mw.flags(&d).unwrap(), [false, false, true, true, false, false]);
    }

    #[test]
    fn component_flags_smooth() {
        let mw = smooth_mw();
        let flag = |g| {
            let p = mw.generator(g).unwrap();
            mw.flags(&p).unwrap()
        };
        assert_eq!(flag(GenName::Chord(1, 2)), [true, true, false, false, true]);
        assert_eq!(flag(GenName::Chord(1, 3)), [true, false, true, false, true]);
        assert_eq!(flag(GenName::Chord(2, 3)), [false, true, true, false, true]);
        assert_eq!(flag(GenName::TorsionCo), [true, true, true, true, false]);
    }

    #[test]
    fn heights_and_contacts() {
        let mw = split_mw();
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        assert_eq!(mw.height(&p13, &p13), rat(1, 2));
        assert_eq!(mw.height(&p13, &p14), rat_i(0));
        assert_eq!(mw.base_contact(&p13).unwrap(), 0);
        let d13 = mw.add(&p13, &p13).unwrap();
        assert_eq!(mw.base_contact(&d13).unwrap(), 0);
        let t13 = mw.add(&d13, &p13).unwrap();
        assert_eq!(mw.base_contact(&t13).unwrap(), 2);
        // two line sections through a shared node separate in the resolution
        assert_eq!(mw.section_intersection(&p13, &p14).unwrap(), 0);
    }

    #[test]
    fn pair_table_against_line_variants() {
        // the conic section against the four line recipes: heights 1, -1, 0, 0
        // and intersection counts 0, 2, 1, 1
        let mw = split_mw();
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        let d = mw.add(&p13, &p14).unwrap();
        let variants: [(&[(i64, GenName)], Rat, i64); 4] = [
            (
                &[(1, GenName::Chord(1, 3)), (1, GenName::Chord(1, 4)), (1, GenName::Chord(3, 4))],
                rat_i(1),
                0,
            ),
            (
                &[(-1, GenName::Chord(1, 3)), (-1, GenName::Chord(1, 4)), (1, GenName::Chord(3, 4))],
                rat_i(-1),
                2,
            ),
            (
                &[(1, GenName::Chord(1, 3)), (-1, GenName::Chord(1, 4)), (1, GenName::Chord(3, 4))],
                rat_i(0),
                1,
            ),
            (
                &[(-1, GenName::Chord(1, 3)), (1, GenName::Chord(1, 4)), (1, GenName::Chord(3, 4))],
                rat_i(0),
                1,
            ),
        ];
        for (terms, h, ss) in variants {
            let m = mw.combine(terms).unwrap();
            assert!(mw.is_on_surface(&m));
            assert_eq!(mw.height(&d, &m), h);
            assert_eq!(mw.section_intersection(&d, &m).unwrap(), ss);
        }
    }

    #[test]
    fn inverse_and_cancellation() {
        let mw = smooth_mw();
        let p12 = mw.generator(GenName::Chord(1, 2)).unwrap();
        let n = mw.neg(&p12);
        assert!(mw.is_on_surface(&n));
        let sum = mw.add(&p12, &n).unwrap();
        assert!(sum.is_zero());
        assert!(sum.lattice.is_zero());
        // subtracting after adding returns to the start
        let p13 = mw.generator(GenName::Chord(1, 3)).unwrap();
        let there = mw.add(&p12, &p13).unwrap();
        let back = mw.add(&there, &mw.neg(&p13)).unwrap();
        assert_eq!(back.coords, p12.coords);
        assert_eq!(back.lattice, p12.lattice);
    }

    #[test]
    fn rejects_other_split_pairings() {
        let s = Surface::new(SurfaceParams::from_ints(-8, [-2, -1, 1, 2])).unwrap();
        assert!(matches!(MordellWeil::new(s), Err(MwError::UnsupportedPairing)));
    }

    #[test]
    fn tower_of_y_values_varies_by_chord() {
        // the square root constants for the smooth case at lambda = -10:
        // -10, -2, -1 over the chords (12), (13), (23)
        let mw = smooth_mw();
        let cases = [
            (GenName::Chord(1, 2), vec![-10i64]),
            (GenName::Chord(1, 3), vec![-2]),
            (GenName::Chord(2, 3), vec![-1]),
        ];
        for (g, rads) in cases {
            let p = mw.generator(g).unwrap();
            let tower = TowerDesc::new(&rads).unwrap();
            let y = p.y().unwrap().as_poly().unwrap().leading();
            assert!(y.tower() == &tower, "generator {} lives over {:?}", g, y.tower());
        }
    }

    #[test]
    fn asymmetric_parameters_generator() {
        // base points (-2, -1, 1, 3): the section over the chord (14) has
        // x = t + 6 and y = 2 sqrt(3) (t - 3)(t + 2), since the restricted
        // cubic is 12 (t - 3)^2 (t + 2)^2
        let s = Surface::new(SurfaceParams::from_ints(0, [-2, -1, 1, 3])).unwrap();
        let mw = MordellWeil::new(s).unwrap();
        let p14 = mw.generator(GenName::Chord(1, 4)).unwrap();
        assert_eq!(p14.x().unwrap().as_poly(), Some(&pt(&[6, 1])));
        let r3 = sqrt_of(3);
        let want_y = pt(&[-6, -1, 1]).mul_elem(&r3.mul_rat(&rat_i(2)));
        assert_eq!(p14.y().unwrap().as_poly(), Some(&want_y));
        assert!(mw.is_on_surface(&p14));
    }
}
