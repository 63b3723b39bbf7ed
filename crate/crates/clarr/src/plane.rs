//! Plane curves, arrangements and their exact intersection combinatorics.
//!
//! Sections with polynomial x of degree at most two become plane curves:
//! lines and graph conics x = q(t). Together with the parabola, the pencil
//! member (or its two chords) and optionally vertical lines this forms an
//! arrangement in the projective plane. Every pairwise intersection is
//! computed exactly, including the points at infinity (the common vertical
//! direction z_o = [0:1:0] shared by all graph conics and vertical lines,
//! and the slope directions shared by parallel lines). Each pair is audited
//! against Bezout; any shortfall is an internal error, never a warning.
//!
//! Singular points of the arrangement are classified into local types from
//! the branch count and pairwise contact orders. Points conjugate over an
//! irreducible quadratic locus are kept as one record with a count of two.
//! Combinatorial equivalence of two arrangements is decided by minimizing a
//! canonical encoding over degree-preserving relabelings of the curves; the
//! encoding expands conjugate counts, so a split pair of points and a
//! conjugate pair are indistinguishable, and points at infinity rank equal
//! to finite ones, exactly as a projective change of coordinates would have
//! it.

use crate::mw::{MordellWeil, MwError, MwPoint};
use crate::polyring::{BivarPoly, Poly, PolyError, ResidueField, Var};
use crate::qtower::{rat, QtowerError, TowerDesc, TowerElem};
use crate::surface::{ParamClass, Surface, SurfaceError};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlaneError {
    #[error("components {0} and {1} are the same curve")]
    DuplicateComponent(String, String),
    #[error("component labels must be unique: {0}")]
    DuplicateLabel(String),
    #[error("a graph component must have degree at most 2")]
    GraphDegreeTooHigh,
    #[error("section {0} does not give a plane component (x is not a polynomial of degree at most 2)")]
    NotAPlaneComponent(String),
    #[error("component {0} is a degenerate conic")]
    DegenerateConic(String),
    #[error("intersection analysis needs a coordinate change: {0}")]
    NeedsCoordinateChange(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Tower(#[from] QtowerError),
    #[error(transparent)]
    Mw(#[from] MwError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Shape of one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveForm {
    /// x = q(t) with deg q <= 2; degree two passes through z_o.
    Graph { q: Poly },
    /// t = a; passes through z_o.
    Vertical { a: TowerElem },
    /// Anything else, as a vanishing polynomial in (t, x).
    General { c: BivarPoly },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneCurve {
    pub label: String,
    pub form: CurveForm,
}

impl PlaneCurve {
    pub fn graph(label: impl Into<String>, q: Poly) -> Result<PlaneCurve, PlaneError> {
        if q.deg_or_zero() > 2 {
            return Err(PlaneError::GraphDegreeTooHigh);
        }
        Ok(PlaneCurve { label: label.into(), form: CurveForm::Graph { q } })
    }

    pub fn vertical(label: impl Into<String>, a: TowerElem) -> PlaneCurve {
        PlaneCurve { label: label.into(), form: CurveForm::Vertical { a } }
    }

    /// Build from a vanishing polynomial, canonicalizing lines and graphs.
    pub fn from_bivar(label: impl Into<String>, c: BivarPoly) -> Result<PlaneCurve, PlaneError> {
        let label = label.into();
        if c.is_zero() {
            return Err(PlaneError::Internal(format!("empty curve {label}")));
        }
        let dx = c.deg_x();
        // x-degree one with constant x-coefficient: solve for x.
        if dx == 1 {
            let coeffs = c.coeffs_in_x();
            if coeffs[1].is_constant() {
                let inv = coeffs[1].coeff(0).inv().map_err(PlaneError::Tower)?;
                let q = coeffs[0].mul_elem(&inv).neg();
                return PlaneCurve::graph(label, q);
            }
        }
        if dx == 0 {
            let p = c.coeffs_in_x().remove(0);
            if p.degree() == Some(1) {
                let (_, monic) = p.monic();
                return Ok(PlaneCurve::vertical(label, monic.coeff(0).neg()));
            }
            return Err(PlaneError::Internal(format!(
                "curve {label} does not involve x and is not a vertical line"
            )));
        }
        Ok(PlaneCurve { label, form: CurveForm::General { c } })
    }

    /// Projective degree.
    pub fn degree(&self) -> u32 {
        match &self.form {
            CurveForm::Graph { q } => (q.deg_or_zero() as u32).max(1),
            CurveForm::Vertical { .. } => 1,
            CurveForm::General { c } => c.total_degree(),
        }
    }

    /// The vanishing polynomial.
    pub fn bivar(&self) -> BivarPoly {
        match &self.form {
            CurveForm::Graph { q } => BivarPoly::x_minus_graph(q),
            CurveForm::Vertical { a } => BivarPoly::from_terms(vec![
                ((1, 0), TowerElem::from_int(1)),
                ((0, 0), a.neg()),
            ]),
            CurveForm::General { c } => c.clone(),
        }
    }

    pub fn passes_through_zo(&self) -> bool {
        match &self.form {
            CurveForm::Graph { q } => q.deg_or_zero() == 2,
            CurveForm::Vertical { .. } => true,
            CurveForm::General { c } => c.leading_form_vertical().is_zero(),
        }
    }

    fn same_curve(&self, other: &PlaneCurve) -> bool {
        match (&self.form, &other.form) {
            (CurveForm::Graph { q: a }, CurveForm::Graph { q: b }) => a == b,
            (CurveForm::Vertical { a }, CurveForm::Vertical { a: b }) => a == b,
            (CurveForm::General { c: a }, CurveForm::General { c: b }) => {
                // equal up to a scalar
                let (ka, ca) = normalize_bivar(a);
                let (kb, cb) = normalize_bivar(b);
                ka == kb && ca == cb
            }
            _ => false,
        }
    }

    /// Tower join of all coefficient fields of this curve.
    fn tower(&self) -> TowerDesc {
        let mut t = TowerDesc::rationals();
        let joiner = |t: &mut TowerDesc, e: &TowerElem| {
            *t = t.join(e.tower()).expect("curve tower join");
        };
        match &self.form {
            CurveForm::Graph { q } => {
                for c in q.coeffs() {
                    joiner(&mut t, c);
                }
            }
            CurveForm::Vertical { a } => joiner(&mut t, a),
            CurveForm::General { c } => {
                for (_, e) in c.terms() {
                    joiner(&mut t, e);
                }
            }
        }
        t
    }
}

fn normalize_bivar(c: &BivarPoly) -> ((u32, u32), BivarPoly) {
    let key = *c.terms().next().expect("nonzero").0;
    let lead = c.coeff(key.0, key.1);
    let inv = lead.inv().expect("leading coefficient nonzero");
    (key, c.mul_elem(&inv))
}

/// Is a degree-2 general form irreducible (not a line pair or double line)?
pub fn conic_nondegenerate(c: &BivarPoly) -> bool {
    if c.total_degree() != 2 {
        return false;
    }
    let half = rat(1, 2);
    let a = c.coeff(2, 0);
    let b = c.coeff(0, 2);
    let h = c.coeff(1, 1).mul_rat(&half);
    let d = c.coeff(1, 0).mul_rat(&half);
    let e = c.coeff(0, 1).mul_rat(&half);
    let f = c.coeff(0, 0);
    // det of [[a, h, d], [h, b, e], [d, e, f]]
    let det = a
        .mul(&b.mul(&f).sub(&e.square()))
        .sub(&h.mul(&h.mul(&f).sub(&e.mul(&d))))
        .add(&d.mul(&h.mul(&e).sub(&b.mul(&d))));
    !det.is_zero()
}

/// Turn a section into a plane component: its x must be a polynomial of
/// degree at most two.
pub fn curve_from_section(
    mw: &MordellWeil,
    p: &MwPoint,
    label: impl Into<String>,
) -> Result<PlaneCurve, PlaneError> {
    let label = label.into();
    let x = p
        .x()
        .ok_or_else(|| PlaneError::NotAPlaneComponent(label.clone()))?;
    let q = x
        .as_poly()
        .ok_or_else(|| PlaneError::NotAPlaneComponent(label.clone()))?;
    if q.deg_or_zero() > 2 {
        return Err(PlaneError::NotAPlaneComponent(label));
    }
    debug_assert!(mw.is_on_surface(p));
    PlaneCurve::graph(label, q.clone())
}

/// A pencil member at a different parameter, as a plane conic. It must be a
/// smooth member (the split ones contribute their chords instead).
pub fn pencil_conic(
    base: &Surface,
    lambda: crate::qtower::Rat,
    label: impl Into<String>,
) -> Result<PlaneCurve, PlaneError> {
    let params = crate::surface::SurfaceParams::new(lambda, base.params.t.clone());
    let member = Surface::new(params)?;
    if !matches!(member.class, ParamClass::SmoothConic) {
        return Err(PlaneError::DegenerateConic(
            "pencil member at this parameter splits into lines".into(),
        ));
    }
    PlaneCurve::from_bivar(label, member.ctau)
}

/// Where an intersection event happens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventSite {
    /// A single finite point.
    Finite { t: TowerElem, x: TowerElem },
    /// A conjugate group of finite points: one for each root of the monic
    /// irreducible locus (degree >= 2), with x = g(t) at each root.
    FinitePair { locus: Poly, x: Poly },
    /// The vertical direction z_o = [0:1:0].
    VerticalInfinity,
    /// The direction [1:slope:0].
    SlopeInfinity { slope: TowerElem },
}

#[derive(Debug, Clone)]
pub struct PairEvent {
    pub site: EventSite,
    pub mult: u32,
}

/// Exact intersection of two distinct components. `hints` are t-values worth
/// trying as roots when a resultant factor of degree three or more shows up.
pub fn intersect_pair(
    c1: &PlaneCurve,
    c2: &PlaneCurve,
    hints: &[TowerElem],
) -> Result<Vec<PairEvent>, PlaneError> {
    if c1.same_curve(c2) {
        return Err(PlaneError::DuplicateComponent(c1.label.clone(), c2.label.clone()));
    }
    let mut events = match (&c1.form, &c2.form) {
        (CurveForm::Graph { q: q1 }, CurveForm::Graph { q: q2 }) => {
            graph_graph(q1, q2, hints)?
        }
        (CurveForm::Graph { q }, CurveForm::Vertical { a })
        | (CurveForm::Vertical { a }, CurveForm::Graph { q }) => {
            let mut ev = vec![PairEvent {
                site: EventSite::Finite { t: a.clone(), x: q.eval(a) },
                mult: 1,
            }];
            if q.deg_or_zero() == 2 {
                ev.push(PairEvent { site: EventSite::VerticalInfinity, mult: 1 });
            }
            ev
        }
        (CurveForm::Vertical { .. }, CurveForm::Vertical { .. }) => {
            vec![PairEvent { site: EventSite::VerticalInfinity, mult: 1 }]
        }
        (CurveForm::General { c }, CurveForm::Graph { q })
        | (CurveForm::Graph { q }, CurveForm::General { c }) => general_graph(c, q, hints)?,
        (CurveForm::General { c }, CurveForm::Vertical { a })
        | (CurveForm::Vertical { a }, CurveForm::General { c }) => general_vertical(c, a)?,
        (CurveForm::General { c: a }, CurveForm::General { c: b }) => {
            general_general(a, b, hints)?
        }
    };
    events.retain(|e| e.mult > 0);
    // Bezout audit
    let expected = c1.degree() * c2.degree();
    let mut got = 0u32;
    for e in &events {
        got += match &e.site {
            EventSite::Finite { .. } => e.mult,
            EventSite::FinitePair { locus, .. } => e.mult * locus.deg_or_zero() as u32,
            EventSite::VerticalInfinity | EventSite::SlopeInfinity { .. } => e.mult,
        };
    }
    if got != expected {
        return Err(PlaneError::Internal(format!(
            "intersection count of {} and {} is {}, Bezout needs {}",
            c1.label, c2.label, got, expected
        )));
    }
    Ok(events)
}

fn graph_graph(q1: &Poly, q2: &Poly, hints: &[TowerElem]) -> Result<Vec<PairEvent>, PlaneError> {
    let delta = q1.sub(q2);
    if delta.is_zero() {
        return Err(PlaneError::Internal("identical graphs escaped duplicate check".into()));
    }
    let d1 = q1.deg_or_zero().max(1);
    let d2 = q2.deg_or_zero().max(1);
    let mut events = Vec::new();
    if delta.is_constant() {
        // no finite intersections at all
        if d1 == 2 && d2 == 2 {
            events.push(PairEvent { site: EventSite::VerticalInfinity, mult: 4 });
        } else if d1 == 1 && d2 == 1 {
            events.push(PairEvent {
                site: EventSite::SlopeInfinity { slope: q1.coeff(1) },
                mult: 1,
            });
        } else {
            return Err(PlaneError::Internal(
                "conic and line with constant difference".into(),
            ));
        }
        return Ok(events);
    }
    for (locus, mult) in factor_locus(&delta, hints)? {
        events.push(locus_event(&locus, q1, mult));
    }
    if d1 == 2 && d2 == 2 {
        let deficit = 4 - delta.deg_or_zero() as u32;
        if deficit > 0 {
            events.push(PairEvent { site: EventSite::VerticalInfinity, mult: deficit });
        }
    }
    Ok(events)
}

fn locus_event(locus: &Poly, graph: &Poly, mult: u32) -> PairEvent {
    if locus.degree() == Some(1) {
        let t = locus.coeff(0).neg();
        let x = graph.eval(&t);
        PairEvent { site: EventSite::Finite { t, x }, mult }
    } else {
        let (_, rem) = graph.divmod(locus).expect("reduce graph mod locus");
        PairEvent { site: EventSite::FinitePair { locus: locus.clone(), x: rem }, mult }
    }
}

fn general_graph(
    c: &BivarPoly,
    q: &Poly,
    hints: &[TowerElem],
) -> Result<Vec<PairEvent>, PlaneError> {
    let r = c.subst_graph(q);
    if r.is_zero() {
        return Err(PlaneError::Internal("graph lies inside the general curve".into()));
    }
    let mut events = Vec::new();
    for (locus, mult) in factor_locus(&r, hints)? {
        events.push(locus_event(&locus, q, mult));
    }
    let d_graph = q.deg_or_zero().max(1) as u32;
    let expected = c.total_degree() * d_graph;
    let deficit = expected.saturating_sub(r.deg_or_zero() as u32);
    if deficit > 0 {
        if q.deg_or_zero() == 2 {
            // the graph conic's infinite point is z_o
            if !c.leading_form_vertical().is_zero() {
                return Err(PlaneError::Internal(
                    "degree deficit without the vertical direction on the curve".into(),
                ));
            }
            events.push(PairEvent { site: EventSite::VerticalInfinity, mult: deficit });
        } else {
            let slope = q.coeff(1);
            if !c.leading_form_at_slope(&slope).is_zero() {
                return Err(PlaneError::Internal(
                    "degree deficit without a shared asymptotic direction".into(),
                ));
            }
            events.push(PairEvent { site: EventSite::SlopeInfinity { slope }, mult: deficit });
        }
    }
    Ok(events)
}

fn general_vertical(c: &BivarPoly, a: &TowerElem) -> Result<Vec<PairEvent>, PlaneError> {
    let s = c.eval_t(a);
    if s.is_zero() {
        return Err(PlaneError::Internal("vertical line lies inside the curve".into()));
    }
    let mut events = Vec::new();
    for (factor, mult) in split_in_x(&s)? {
        match factor.degree() {
            Some(1) => {
                let x = factor.coeff(0).neg();
                events.push(PairEvent { site: EventSite::Finite { t: a.clone(), x }, mult });
            }
            _ => {
                return Err(PlaneError::NeedsCoordinateChange(
                    "conjugate intersection points on a vertical line".into(),
                ))
            }
        }
    }
    let deficit = c.total_degree().saturating_sub(s.deg_or_zero() as u32);
    if deficit > 0 {
        if !c.leading_form_vertical().is_zero() {
            return Err(PlaneError::Internal(
                "vertical degree deficit off the curve".into(),
            ));
        }
        events.push(PairEvent { site: EventSite::VerticalInfinity, mult: deficit });
    }
    Ok(events)
}

fn general_general(
    c1: &BivarPoly,
    c2: &BivarPoly,
    hints: &[TowerElem],
) -> Result<Vec<PairEvent>, PlaneError> {
    let res = c1.resultant_x(c2);
    if res.is_zero() {
        return Err(PlaneError::Internal("curves share a component".into()));
    }
    let mut events = Vec::new();
    for (locus, mult) in factor_locus(&res, hints)? {
        if locus.degree() == Some(1) {
            let t0 = locus.coeff(0).neg();
            let s1 = c1.eval_t(&t0);
            let s2 = c2.eval_t(&t0);
            let g = s1.gcd(&s2);
            match g.degree() {
                Some(1) => {
                    let x = g.coeff(0).neg();
                    events.push(PairEvent { site: EventSite::Finite { t: t0, x }, mult });
                }
                Some(2) => {
                    // both fibers over t0 share a full quadratic in x
                    let b = g.coeff(1);
                    let c0 = g.coeff(0);
                    let disc = b.square().sub(&c0.mul_rat(&rat(4, 1)));
                    if disc.is_zero() {
                        let x = b.mul_rat(&rat(-1, 2));
                        events.push(PairEvent { site: EventSite::Finite { t: t0, x }, mult });
                    } else {
                        let (rd, _) = disc.try_sqrt().ok_or_else(|| {
                            PlaneError::NeedsCoordinateChange(
                                "cannot separate two intersection points over one t-value".into(),
                            )
                        })?;
                        if mult % 2 != 0 {
                            return Err(PlaneError::NeedsCoordinateChange(
                                "odd multiplicity split across two stacked points".into(),
                            ));
                        }
                        for sign in [1i64, -1] {
                            let x = rd
                                .mul_rat(&rat(sign, 1))
                                .sub(&b)
                                .mul_rat(&rat(1, 2));
                            events.push(PairEvent {
                                site: EventSite::Finite { t: t0.clone(), x },
                                mult: mult / 2,
                            });
                        }
                    }
                }
                _ => {
                    return Err(PlaneError::Internal(
                        "resultant root with no shared point in x".into(),
                    ))
                }
            }
        } else {
            // irreducible locus of degree >= 2: work in its residue field
            let rf = ResidueField::new(&locus);
            let g = rf.gcd_x(&c1.coeffs_in_x(), &c2.coeffs_in_x())?;
            match g.len() {
                2 => {
                    let x = rf.reduce(&g[0].neg());
                    events.push(PairEvent {
                        site: EventSite::FinitePair { locus: locus.clone(), x },
                        mult,
                    });
                }
                3 => {
                    // shared quadratic over a conjugate locus: tangency only
                    // when the discriminant vanishes identically
                    let b = &g[1];
                    let c0 = &g[0];
                    let disc = rf.reduce(&b.mul(b).sub(&c0.mul_rat(&rat(4, 1))));
                    if disc.is_zero() {
                        let x = rf.reduce(&b.mul_rat(&rat(-1, 2)));
                        events.push(PairEvent {
                            site: EventSite::FinitePair { locus: locus.clone(), x },
                            mult,
                        });
                    } else {
                        return Err(PlaneError::NeedsCoordinateChange(
                            "stacked conjugate intersection points".into(),
                        ));
                    }
                }
                _ => {
                    return Err(PlaneError::Internal(
                        "resultant locus with no shared point in x".into(),
                    ))
                }
            }
        }
    }
    // shortfall against Bezout lives at infinity
    let mut finite = 0u32;
    for e in &events {
        finite += match &e.site {
            EventSite::Finite { .. } => e.mult,
            EventSite::FinitePair { locus, .. } => e.mult * locus.deg_or_zero() as u32,
            _ => 0,
        };
    }
    let expected = c1.total_degree() * c2.total_degree();
    if finite < expected {
        let deficit = expected - finite;
        // find the shared infinite points
        let v1 = c1.leading_form_vertical();
        let v2 = c2.leading_form_vertical();
        if v1.is_zero() && v2.is_zero() {
            events.push(PairEvent { site: EventSite::VerticalInfinity, mult: deficit });
        } else {
            let lf1 = leading_form_poly(c1);
            let lf2 = leading_form_poly(c2);
            let g = lf1.gcd(&lf2);
            if g.degree() == Some(1) {
                let slope = g.coeff(0).neg();
                events.push(PairEvent { site: EventSite::SlopeInfinity { slope }, mult: deficit });
            } else {
                return Err(PlaneError::NeedsCoordinateChange(
                    "shared points at infinity in more than one direction".into(),
                ));
            }
        }
    }
    Ok(events)
}

/// Top-degree form as a polynomial in the slope variable a (for the point
/// [1 : a : 0]).
fn leading_form_poly(c: &BivarPoly) -> Poly {
    let d = c.total_degree();
    let mut coeffs = vec![TowerElem::from_int(0); d as usize + 1];
    for (&(i, j), e) in c.terms() {
        if i + j == d {
            coeffs[j as usize] = e.clone();
        }
    }
    Poly::new(Var::X, coeffs)
}

/// Factor a univariate polynomial over its tower into monic irreducible
/// pieces with multiplicities. Quadratics are split by adjoining the square
/// root of their discriminant when it is representable; higher degrees are
/// reduced by stripping roots from the hint list, and anything left over of
/// degree three or more is an error.
pub fn factor_locus(
    p: &Poly,
    hints: &[TowerElem],
) -> Result<Vec<(Poly, u32)>, PlaneError> {
    let mut out = Vec::new();
    for (sf, mult) in p.squarefree_decomposition() {
        let mut stack = vec![sf];
        while let Some(f) = stack.pop() {
            match f.degree() {
                None | Some(0) => {}
                Some(1) => out.push((f, mult)),
                Some(2) => {
                    let a = f.coeff(2);
                    let b = f.coeff(1);
                    let c = f.coeff(0);
                    let disc = b.square().sub(&a.mul(&c).mul_rat(&rat(4, 1)));
                    match disc.try_sqrt() {
                        Some((rd, _)) => {
                            let two_a = a.mul_rat(&rat(2, 1));
                            for sign in [1i64, -1] {
                                let root = rd
                                    .mul_rat(&rat(sign, 1))
                                    .sub(&b)
                                    .div(&two_a)
                                    .map_err(PlaneError::Tower)?;
                                out.push((
                                    Poly::new(
                                        Var::T,
                                        vec![root.neg(), TowerElem::from_int(1)],
                                    ),
                                    mult,
                                ));
                            }
                        }
                        None => {
                            let (_, monic) = f.monic();
                            out.push((monic, mult));
                        }
                    }
                }
                Some(_) => {
                    let mut g = f.clone();
                    let mut stripped = false;
                    for h in hints {
                        while !g.is_constant() && g.eval(h).is_zero() {
                            g = g.deflate(h);
                            out.push((
                                Poly::new(Var::T, vec![h.neg(), TowerElem::from_int(1)]),
                                mult,
                            ));
                            stripped = true;
                        }
                    }
                    if !stripped {
                        return Err(PlaneError::NeedsCoordinateChange(format!(
                            "cannot factor a degree-{} intersection locus",
                            f.deg_or_zero()
                        )));
                    }
                    stack.push(g);
                }
            }
        }
    }
    Ok(out)
}

/// Split a polynomial in x into monic irreducible factors (degree <= 2 in,
/// linear out when the discriminant cooperates).
fn split_in_x(p: &Poly) -> Result<Vec<(Poly, u32)>, PlaneError> {
    let mut out = Vec::new();
    for (sf, mult) in p.squarefree_decomposition() {
        match sf.degree() {
            None | Some(0) => {}
            Some(1) => out.push((sf, mult)),
            Some(2) => {
                let a = sf.coeff(2);
                let b = sf.coeff(1);
                let c = sf.coeff(0);
                let disc = b.square().sub(&a.mul(&c).mul_rat(&rat(4, 1)));
                match disc.try_sqrt() {
                    Some((rd, _)) => {
                        let two_a = a.mul_rat(&rat(2, 1));
                        for sign in [1i64, -1] {
                            let root = rd
                                .mul_rat(&rat(sign, 1))
                                .sub(&b)
                                .div(&two_a)
                                .map_err(PlaneError::Tower)?;
                            out.push((
                                Poly::new(Var::X, vec![root.neg(), TowerElem::from_int(1)]),
                                mult,
                            ));
                        }
                    }
                    None => out.push((sf.monic().1, mult)),
                }
            }
            Some(d) => {
                return Err(PlaneError::NeedsCoordinateChange(format!(
                    "degree-{d} fiber polynomial"
                )))
            }
        }
    }
    Ok(out)
}

/// An assembled arrangement.
#[derive(Debug, Clone)]
pub struct Arrangement {
    pub curves: Vec<PlaneCurve>,
    pub hints: Vec<TowerElem>,
}

impl Arrangement {
    /// Validate and assemble: labels unique, components pairwise distinct,
    /// general conics nondegenerate.
    pub fn assemble(
        curves: Vec<PlaneCurve>,
        hints: Vec<TowerElem>,
    ) -> Result<Arrangement, PlaneError> {
        for (i, c) in curves.iter().enumerate() {
            for d in curves.iter().skip(i + 1) {
                if c.label == d.label {
                    return Err(PlaneError::DuplicateLabel(c.label.clone()));
                }
                if c.same_curve(d) {
                    return Err(PlaneError::DuplicateComponent(
                        c.label.clone(),
                        d.label.clone(),
                    ));
                }
            }
            if let CurveForm::General { c: b } = &c.form {
                if b.total_degree() == 2 && !conic_nondegenerate(b) {
                    return Err(PlaneError::DegenerateConic(c.label.clone()));
                }
            }
        }
        Ok(Arrangement { curves, hints })
    }

    pub fn total_degree(&self) -> u32 {
        self.curves.iter().map(|c| c.degree()).sum()
    }

    /// Tower join over all components.
    pub fn tower(&self) -> TowerDesc {
        let mut t = TowerDesc::rationals();
        for c in &self.curves {
            t = t.join(&c.tower()).expect("arrangement tower join");
        }
        t
    }
}

/// One singular point (or conjugate group) of the arrangement.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PointRecord {
    /// Number of actual points in the group (1, or the locus degree).
    pub count: u32,
    /// Local type name.
    pub kind: String,
    /// (i, j, contact order) over incident curve pairs, i < j, sorted.
    pub mults: Vec<(usize, usize, u32)>,
}

impl PointRecord {
    pub fn incident(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .mults
            .iter()
            .flat_map(|&(i, j, _)| [i, j])
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// The combinatorial type of an arrangement.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Combinatorics {
    pub labels: Vec<String>,
    pub degrees: Vec<u32>,
    pub points: Vec<PointRecord>,
}

fn local_type_name(branches: usize, mults: &[(usize, usize, u32)]) -> String {
    let orders: Vec<u32> = mults.iter().map(|&(_, _, m)| m).collect();
    match branches {
        2 => match orders[..] {
            [1] => "node".to_string(),
            [2] => "tacnode".to_string(),
            [m] => format!("contact_{}", m),
            _ => unreachable!("two branches, one pair"),
        },
        3 if orders.iter().all(|&m| m == 1) => "ordinary_triple".to_string(),
        _ => {
            let mut sig = orders.clone();
            sig.sort_unstable();
            format!(
                "star_{}_{}",
                branches,
                sig.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("")
            )
        }
    }
}

/// Classify all singular points of the arrangement.
pub fn classify(arr: &Arrangement) -> Result<Combinatorics, PlaneError> {
    // joint tower for stable point keys
    let mut tower = arr.tower();
    let n = arr.curves.len();
    let mut raw: Vec<(usize, usize, PairEvent)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for e in intersect_pair(&arr.curves[i], &arr.curves[j], &arr.hints)? {
                for t in event_towers(&e.site) {
                    tower = tower.join(&t)?;
                }
                raw.push((i, j, e));
            }
        }
    }
    // group by site key
    let mut groups: BTreeMap<String, (u32, Vec<(usize, usize, u32)>)> = BTreeMap::new();
    for (i, j, e) in raw {
        let (key, count) = site_key(&e.site, &tower)?;
        let entry = groups.entry(key).or_insert((count, Vec::new()));
        if entry.0 != count {
            return Err(PlaneError::Internal(
                "the same locus appears split and unsplit across pairs".into(),
            ));
        }
        entry.1.push((i, j, e.mult));
    }
    let mut points = Vec::new();
    for (_, (count, mut mults)) in groups {
        if mults.len() < 2 && mults.iter().all(|&(_, _, m)| m == 1) {
            // simple crossing of exactly two curves is still a singular
            // point of the arrangement (a node); keep it
        }
        mults.sort_unstable();
        let branches = {
            let mut v: Vec<usize> = mults.iter().flat_map(|&(i, j, _)| [i, j]).collect();
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        let kind = local_type_name(branches, &mults);
        points.push(PointRecord { count, kind, mults });
    }
    points.sort_by(|a, b| (&a.kind, &a.mults).cmp(&(&b.kind, &b.mults)));
    Ok(Combinatorics {
        labels: arr.curves.iter().map(|c| c.label.clone()).collect(),
        degrees: arr.curves.iter().map(|c| c.degree()).collect(),
        points,
    })
}

fn event_towers(site: &EventSite) -> Vec<TowerDesc> {
    match site {
        EventSite::Finite { t, x } => vec![t.tower().clone(), x.tower().clone()],
        EventSite::FinitePair { locus, x } => {
            let mut v: Vec<TowerDesc> = locus.coeffs().iter().map(|c| c.tower().clone()).collect();
            v.extend(x.coeffs().iter().map(|c| c.tower().clone()));
            v
        }
        EventSite::SlopeInfinity { slope } => vec![slope.tower().clone()],
        EventSite::VerticalInfinity => vec![],
    }
}

fn elem_key(e: &TowerElem, tower: &TowerDesc) -> Result<String, PlaneError> {
    let emb = e.embed(tower)?;
    Ok(serde_json::to_string(&emb).expect("element serializes"))
}

fn site_key(site: &EventSite, tower: &TowerDesc) -> Result<(String, u32), PlaneError> {
    Ok(match site {
        EventSite::Finite { t, x } => (
            format!("pt:{}|{}", elem_key(t, tower)?, elem_key(x, tower)?),
            1,
        ),
        EventSite::FinitePair { locus, x } => {
            let lk: Vec<String> = locus
                .coeffs()
                .iter()
                .map(|c| elem_key(c, tower))
                .collect::<Result<_, _>>()?;
            let xk: Vec<String> = x
                .coeffs()
                .iter()
                .map(|c| elem_key(c, tower))
                .collect::<Result<_, _>>()?;
            (
                format!("pair:{}|{}", lk.join(","), xk.join(",")),
                locus.deg_or_zero() as u32,
            )
        }
        EventSite::VerticalInfinity => ("zo".to_string(), 1),
        EventSite::SlopeInfinity { slope } => {
            (format!("inf:{}", elem_key(slope, tower)?), 1)
        }
    })
}

impl Combinatorics {
    /// Multiset of local type names, conjugate groups expanded.
    pub fn census(&self) -> BTreeMap<String, u32> {
        let mut m = BTreeMap::new();
        for p in &self.points {
            *m.entry(p.kind.clone()).or_insert(0) += p.count;
        }
        m
    }

    fn encoding_under(&self, perm: &[usize]) -> String {
        let mut lines: Vec<String> = Vec::new();
        for p in &self.points {
            let mut mapped: Vec<(usize, usize, u32)> = p
                .mults
                .iter()
                .map(|&(i, j, m)| {
                    let (a, b) = (perm[i], perm[j]);
                    (a.min(b), a.max(b), m)
                })
                .collect();
            mapped.sort_unstable();
            let body = mapped
                .iter()
                .map(|(i, j, m)| format!("{}-{}:{}", i, j, m))
                .collect::<Vec<_>>()
                .join(",");
            for _ in 0..p.count {
                lines.push(format!("{}[{}]", p.kind, body));
            }
        }
        lines.sort();
        lines.join(";")
    }

    /// Canonical encoding: curves are renumbered into a standard order
    /// (ascending degree), minimized over all degree-preserving choices of
    /// that renumbering.
    pub fn canonical_encoding(&self) -> String {
        let n = self.degrees.len();
        // group curve indices by degree, in ascending degree order, and give
        // each group a contiguous block of target indices
        let mut by_degree: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, &d) in self.degrees.iter().enumerate() {
            by_degree.entry(d).or_default().push(i);
        }
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut offset = 0usize;
        for (_, idxs) in by_degree {
            let len = idxs.len();
            groups.push((offset, idxs));
            offset += len;
        }
        let mut best: Option<String> = None;
        let mut perm = vec![0usize; n];
        permute_groups(&groups, 0, &mut perm, &mut |perm| {
            let enc = self.encoding_under(perm);
            if best.as_ref().is_none_or(|b| enc < *b) {
                best = Some(enc);
            }
        });
        let mut header: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        header.sort();
        format!("deg({})::{}", header.join(","), best.unwrap_or_default())
    }

    /// Are two arrangements combinatorially equivalent?
    pub fn isomorphic(&self, other: &Combinatorics) -> bool {
        let mut a = self.degrees.clone();
        let mut b = other.degrees.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return false;
        }
        self.canonical_encoding() == other.canonical_encoding()
    }
}

fn permute_groups(
    groups: &[(usize, Vec<usize>)],
    gi: usize,
    perm: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if gi == groups.len() {
        visit(perm);
        return;
    }
    let (offset, idxs) = &groups[gi];
    let mut order = idxs.clone();
    permutations(&mut order, 0, &mut |t| {
        for (k, src) in t.iter().enumerate() {
            perm[*src] = offset + k;
        }
        permute_groups(groups, gi + 1, perm, visit);
    });
}

fn permutations(v: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, visit);
        v.swap(k, i);
    }
}

impl fmt::Display for Combinatorics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "curves: {}",
            self.labels
                .iter()
                .zip(self.degrees.iter())
                .map(|(l, d)| format!("{}(deg {})", l, d))
                .collect::<Vec<_>>()
                .join(", ")
        )?;
        for p in &self.points {
            let inc: Vec<String> = p
                .incident()
                .iter()
                .map(|&i| self.labels[i].clone())
                .collect();
            writeln!(
                f,
                "  {} x{}: {} [{}]",
                p.kind,
                p.count,
                inc.join(" "),
                p.mults
                    .iter()
                    .map(|(i, j, m)| format!("{}*{}={}", self.labels[*i], self.labels[*j], m))
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        Ok(())
    }
}
