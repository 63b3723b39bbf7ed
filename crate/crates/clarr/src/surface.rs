//! The rational elliptic surface attached to four base points and a pencil
//! parameter.
//!
//! Fix distinct rational numbers t1..t4 and put the base points p_i = (t_i,
//! t_i^2) on the parabola C_o: x = t^2. The conics through the four points
//! that are graphs of quadratics degenerate, so instead we use the pencil
//!
//!   c_lambda = lambda (x - t^2) + (x - x12(t)) (x - x34(t))
//!
//! where x12, x34 are the chords of C_o through (p1, p2) and (p3, p4). For
//! generic lambda the member is an irreducible conic meeting C_o exactly at
//! the base points; for three critical values it splits into a pair of
//! chords. Multiplying the member by (x - t^2) gives a cubic in x whose
//! double cover y^2 = (x - t^2) c_lambda is a rational elliptic surface over
//! the t-line. Everything downstream (sections, heights, plane curves) is
//! driven by the data assembled here.

use crate::polyring::{Poly, RatFunc, BivarPoly, Var};
use crate::qtower::{rat_i, QtowerError, Rat, TowerElem};
use num::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("base points must be distinct")]
    RepeatedBasePoint,
    #[error("parameter lambda = -((s1 - s2)^2)/4 is excluded: the pencil member is tangent to the line at infinity")]
    ConditionStar,
    #[error("pencil member is a double line")]
    DegenerateConic,
    #[error(transparent)]
    Tower(#[from] QtowerError),
}

/// Base point abscissas and the pencil parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceParams {
    pub lambda: Rat,
    pub t: [Rat; 4],
}

impl serde::Serialize for SurfaceParams {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct Repr {
            lambda: String,
            t: [String; 4],
        }
        Repr {
            lambda: self.lambda.to_string(),
            t: [
                self.t[0].to_string(),
                self.t[1].to_string(),
                self.t[2].to_string(),
                self.t[3].to_string(),
            ],
        }
        .serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for SurfaceParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(serde::Deserialize)]
        struct Repr {
            lambda: String,
            t: [String; 4],
        }
        let repr = Repr::deserialize(deserializer)?;
        let parse = |s: &String| -> Result<Rat, D::Error> {
            s.trim()
                .parse()
                .map_err(|_| D::Error::custom(format!("bad rational {s:?}")))
        };
        Ok(SurfaceParams {
            lambda: parse(&repr.lambda)?,
            t: [
                parse(&repr.t[0])?,
                parse(&repr.t[1])?,
                parse(&repr.t[2])?,
                parse(&repr.t[3])?,
            ],
        })
    }
}

impl SurfaceParams {
    pub fn new(lambda: Rat, t: [Rat; 4]) -> SurfaceParams {
        SurfaceParams { lambda, t }
    }

    pub fn from_ints(lambda: i64, t: [i64; 4]) -> SurfaceParams {
        SurfaceParams::new(rat_i(lambda), t.map(rat_i))
    }

    fn s(&self, i: usize, j: usize) -> Rat {
        &self.t[i - 1] + &self.t[j - 1]
    }

    fn e(&self, i: usize, j: usize) -> Rat {
        &self.t[i - 1] * &self.t[j - 1]
    }

    /// The chord of C_o through base points i and j (1-based): the line
    /// x = (t_i + t_j) t - t_i t_j.
    pub fn x_line(&self, i: usize, j: usize) -> Poly {
        assert!((1..=4).contains(&i) && (1..=4).contains(&j) && i != j);
        Poly::new(
            Var::T,
            vec![
                TowerElem::from_rat(-self.e(i, j)),
                TowerElem::from_rat(self.s(i, j)),
            ],
        )
    }

    /// Crossing abscissa of the two distinguished chords x12 and x34; None
    /// when they are parallel.
    pub fn t0(&self) -> Option<Rat> {
        let ds = self.s(1, 2) - self.s(3, 4);
        if ds.is_zero() {
            return None;
        }
        Some((self.e(1, 2) - self.e(3, 4)) / ds)
    }

    /// The three pencil parameters at which the member splits into two lines.
    pub fn critical_lambdas(&self) -> [Rat; 3] {
        let t = &self.t;
        [
            Rat::zero(),
            -(&t[0] - &t[3]) * (&t[1] - &t[2]),
            -(&t[0] - &t[2]) * (&t[1] - &t[3]),
        ]
    }

    /// The excluded parameter where the member is tangent to the line at
    /// infinity and the fiber geometry collapses.
    pub fn star_lambda(&self) -> Rat {
        let d = self.s(1, 2) - self.s(3, 4);
        -(&d * &d) / rat_i(4)
    }
}

/// Shape of the chosen pencil member.
#[derive(Debug, Clone)]
pub enum ParamClass {
    /// The member splits into two non-parallel lines x = m1(t), x = m2(t)
    /// crossing at (t0, x0).
    SplitConic { lines: [Poly; 2], t0: Rat, x0: TowerElem },
    /// The member is an irreducible conic.
    SmoothConic,
}

impl ParamClass {
    pub fn is_split(&self) -> bool {
        matches!(self, ParamClass::SplitConic { .. })
    }
}

/// One place of the t-line carrying a two-component fiber: the four base
/// abscissas, the chord crossing in the split case, and infinity. At a
/// finite place the Weierstrass cubic has a node at x = node_x.
#[derive(Debug, Clone)]
pub struct FiberPlace {
    /// None encodes the place at infinity.
    pub t: Option<Rat>,
    pub node_x: Option<TowerElem>,
}

impl FiberPlace {
    pub fn label(&self) -> String {
        match &self.t {
            Some(t) => format!("t={}", t),
            None => "t=oo".to_string(),
        }
    }
}

/// The elliptic surface y^2 = (x - t^2) c_lambda with its classified pencil
/// member, Weierstrass coefficients and two-component fiber places.
#[derive(Debug, Clone)]
pub struct Surface {
    pub params: SurfaceParams,
    pub class: ParamClass,
    /// c_lambda = x^2 + p(t) x + q(t)
    pub p: Poly,
    pub q: Poly,
    /// c_lambda as a curve in the (t, x) plane
    pub ctau: BivarPoly,
    /// Weierstrass coefficients: y^2 = x^3 + a2 x^2 + a4 x + a6
    pub a2: Poly,
    pub a4: Poly,
    pub a6: Poly,
    pub fibers: Vec<FiberPlace>,
}

impl Surface {
    pub fn new(params: SurfaceParams) -> Result<Surface, SurfaceError> {
        for i in 0..4 {
            for j in (i + 1)..4 {
                if params.t[i] == params.t[j] {
                    return Err(SurfaceError::RepeatedBasePoint);
                }
            }
        }
        if params.lambda == params.star_lambda() {
            return Err(SurfaceError::ConditionStar);
        }
        let lam = TowerElem::from_rat(params.lambda.clone());
        let lin1 = params.x_line(1, 2);
        let lin2 = params.x_line(3, 4);
        let tsq = Poly::new(
            Var::T,
            vec![TowerElem::from_int(0), TowerElem::from_int(0), TowerElem::from_int(1)],
        );
        // c = x^2 + p x + q with p = lambda - x12 - x34,
        // q = x12 x34 - lambda t^2
        let p = Poly::constant(Var::T, lam.clone()).sub(&lin1.add(&lin2));
        let q = lin1.mul(&lin2).sub(&tsq.mul_elem(&lam));

        let mut ctau = BivarPoly::zero();
        ctau.add_term(0, 2, TowerElem::from_int(1));
        for (i, c) in p.coeffs().iter().enumerate() {
            ctau.add_term(i as u32, 1, c.clone());
        }
        for (i, c) in q.coeffs().iter().enumerate() {
            ctau.add_term(i as u32, 0, c.clone());
        }

        // y^2 = (x - t^2)(x^2 + p x + q)
        let a2 = p.sub(&tsq);
        let a4 = q.sub(&p.mul(&tsq));
        let a6 = q.mul(&tsq).neg();

        // Split or smooth: the member factors into lines exactly when its
        // x-discriminant p^2 - 4q is a constant times a square in Q[t].
        let disc = p.mul(&p).sub(&q.mul_rat(&rat_i(4)));
        if disc.is_zero() {
            return Err(SurfaceError::DegenerateConic);
        }
        debug_assert_eq!(disc.degree(), Some(2), "degree drop is screened by star_lambda");
        let class = match disc.square_up_to_constant() {
            Some((c, g)) => {
                let (rc, _) = c
                    .try_sqrt()
                    .expect("constant square root always representable");
                // lines x = (-p +- rc g)/2
                let rcg = g.mul_elem(&rc);
                let half = crate::qtower::rat(1, 2);
                let mut m1 = p.neg().add(&rcg).mul_rat(&half);
                let mut m2 = p.neg().sub(&rcg).mul_rat(&half);
                // order the pair so that the chord through p1, p2 comes first
                // when it is one of them (the split at lambda = 0)
                if m2 == lin1 {
                    std::mem::swap(&mut m1, &mut m2);
                }
                // g is linear: its root is the crossing abscissa
                let t0_elem = g.coeff(0).neg();
                let t0 = t0_elem
                    .as_rat()
                    .cloned()
                    .expect("monic linear over Q has a rational root");
                let x0 = m1.eval(&TowerElem::from_rat(t0.clone()));
                ParamClass::SplitConic { lines: [m1, m2], t0, x0 }
            }
            None => ParamClass::SmoothConic,
        };

        let mut fibers: Vec<FiberPlace> = Vec::new();
        for ti in &params.t {
            fibers.push(FiberPlace {
                t: Some(ti.clone()),
                node_x: Some(TowerElem::from_rat(ti * ti)),
            });
        }
        if let ParamClass::SplitConic { t0, x0, .. } = &class {
            fibers.push(FiberPlace { t: Some(t0.clone()), node_x: Some(x0.clone()) });
        }
        fibers.push(FiberPlace { t: None, node_x: None });

        Ok(Surface { params, class, p, q, ctau, a2, a4, a6, fibers })
    }

    /// Right side of the Weierstrass equation evaluated at a rational
    /// function x(t).
    pub fn rhs(&self, x: &RatFunc) -> RatFunc {
        let a2 = RatFunc::from_poly(self.a2.clone());
        let a4 = RatFunc::from_poly(self.a4.clone());
        let a6 = RatFunc::from_poly(self.a6.clone());
        x.mul(x).mul(x).add(&a2.mul(&x.square())).add(&a4.mul(x)).add(&a6)
    }

    /// Derivative of the right side in x, at a rational function x(t).
    pub fn rhs_dx(&self, x: &RatFunc) -> RatFunc {
        let a2 = RatFunc::from_poly(self.a2.clone());
        let a4 = RatFunc::from_poly(self.a4.clone());
        let three = RatFunc::from_poly(Poly::constant(Var::T, TowerElem::from_int(3)));
        let two = RatFunc::from_poly(Poly::constant(Var::T, TowerElem::from_int(2)));
        three.mul(&x.square()).add(&two.mul(&a2).mul(x)).add(&a4)
    }

    /// The parabola x = t^2 as a graph polynomial.
    pub fn co_graph() -> Poly {
        Poly::new(
            Var::T,
            vec![TowerElem::from_int(0), TowerElem::from_int(0), TowerElem::from_int(1)],
        )
    }

    /// Finite fiber places only.
    pub fn finite_fibers(&self) -> impl Iterator<Item = &FiberPlace> {
        self.fibers.iter().filter(|f| f.t.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtower::rat;

    fn pt(coeffs: &[i64]) -> Poly {
        Poly::new(Var::T, coeffs.iter().map(|&c| TowerElem::from_int(c)).collect())
    }

    fn golden_params(lambda: i64) -> SurfaceParams {
        SurfaceParams::from_ints(lambda, [-2, -1, 1, 2])
    }

    #[test]
    fn split_member_at_lambda_zero() {
        let s = Surface::new(golden_params(0)).unwrap();
        // member: x^2 + 4x + 4 - 9t^2
        assert_eq!(s.p, pt(&[4]));
        assert_eq!(s.q, pt(&[4, 0, -9]));
        match &s.class {
            ParamClass::SplitConic { lines, t0, x0 } => {
                assert_eq!(lines[0], pt(&[-2, -3])); // chord through p1, p2
                assert_eq!(lines[1], pt(&[-2, 3]));
                assert_eq!(t0, &rat_i(0));
                assert_eq!(x0, &TowerElem::from_int(-2));
            }
            other => panic!("expected split member, got {other:?}"),
        }
        // Weierstrass data
        assert_eq!(s.a2, pt(&[4, 0, -1]));
        assert_eq!(s.a4, pt(&[4, 0, -13]));
        assert_eq!(s.a6, pt(&[0, 0, -4, 0, 9]));
        // fiber places: four base abscissas, the crossing, infinity
        let ts: Vec<_> = s.fibers.iter().map(|f| f.t.clone()).collect();
        assert_eq!(
            ts,
            vec![
                Some(rat_i(-2)),
                Some(rat_i(-1)),
                Some(rat_i(1)),
                Some(rat_i(2)),
                Some(rat_i(0)),
                None
            ]
        );
        assert_eq!(s.fibers[4].node_x, Some(TowerElem::from_int(-2)));
        // the cubic over t = 0 is x (x + 2)^2
        let rhs = s.rhs(&RatFunc::from_poly(Poly::var_poly(Var::T)));
        // spot check via evaluation instead: f(0, x) at x = -2 and 0 vanish
        let f = |x: i64| {
            s.a6.eval_rat(&rat_i(0))
                .add(&s.a4.eval_rat(&rat_i(0)).mul(&TowerElem::from_int(x)))
                .add(&s.a2.eval_rat(&rat_i(0)).mul(&TowerElem::from_int(x * x)))
                .add(&TowerElem::from_int(x * x * x))
        };
        assert!(f(0).is_zero());
        assert!(f(-2).is_zero());
        assert!(!f(1).is_zero());
        drop(rhs);
    }

    #[test]
    fn smooth_member_at_minus_ten() {
        let s = Surface::new(golden_params(-10)).unwrap();
        assert!(matches!(s.class, ParamClass::SmoothConic));
        // member: x^2 - 6x + t^2 + 4
        assert_eq!(s.p, pt(&[-6]));
        assert_eq!(s.q, pt(&[4, 0, 1]));
        // restricted to the parabola it vanishes exactly at the base points
        let r = s.ctau.subst_graph(&Surface::co_graph());
        assert_eq!(
            r,
            Poly::from_roots(
                Var::T,
                &[-2, -1, 1, 2].map(TowerElem::from_int)
            )
        );
        let ts: Vec<_> = s.fibers.iter().map(|f| f.t.clone()).collect();
        assert_eq!(ts.len(), 5);
        assert_eq!(ts[4], None);
    }

    #[test]
    fn other_split_values_pair_differently() {
        // the second critical value pairs the chords as (13)(24)
        let params = golden_params(-8);
        assert_eq!(params.critical_lambdas(), [rat_i(0), rat_i(-8), rat_i(-9)]);
        let s = Surface::new(params.clone()).unwrap();
        match &s.class {
            ParamClass::SplitConic { lines, .. } => {
                let mut got = vec![lines[0].clone(), lines[1].clone()];
                got.sort_by_key(|l| l.to_string());
                let mut want = vec![params.x_line(1, 3), params.x_line(2, 4)];
                want.sort_by_key(|l| l.to_string());
                assert_eq!(got, want);
            }
            other => panic!("expected split member, got {other:?}"),
        }
    }

    #[test]
    fn excluded_and_invalid_parameters() {
        assert!(matches!(
            Surface::new(golden_params(-9)),
            Err(SurfaceError::ConditionStar)
        ));
        assert!(matches!(
            Surface::new(SurfaceParams::from_ints(0, [1, 1, 2, 3])),
            Err(SurfaceError::RepeatedBasePoint)
        ));
    }

    #[test]
    fn chords_pass_through_their_base_points() {
        let params = golden_params(0);
        for (i, j) in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
            let line = params.x_line(i, j);
            for &k in &[i, j] {
                let tk = &params.t[k - 1];
                assert_eq!(line.eval_rat(tk), TowerElem::from_rat(tk * tk));
            }
        }
        assert_eq!(params.t0(), Some(rat_i(0)));
        assert_eq!(params.star_lambda(), rat_i(-9));
    }

    #[test]
    fn asymmetric_base_points() {
        // t = (-2, -1, 1, 3): crossing at t0 = 1/7
        let params = SurfaceParams::new(Rat::zero(), [-2, -1, 1, 3].map(rat_i));
        assert_eq!(params.t0(), Some(rat(1, 7)));
        let s = Surface::new(params).unwrap();
        match &s.class {
            ParamClass::SplitConic { t0, x0, .. } => {
                assert_eq!(t0, &rat(1, 7));
                assert_eq!(x0, &TowerElem::from_rat(rat(-17, 7)));
            }
            other => panic!("expected split member, got {other:?}"),
        }
    }
}
