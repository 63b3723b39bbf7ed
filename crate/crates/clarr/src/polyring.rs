//! Polynomials and rational functions with multiquadratic coefficients.
//!
//! Univariate polynomials are dense (coefficients lowest-degree first, all
//! embedded into one common tower, trailing zeros trimmed). Rational
//! functions keep a monic denominator and are reduced by gcd. Bivariate
//! polynomials in (t, x) are sparse and exist mainly to express conics that
//! are not graphs x = q(t) and to take resultants in x.

use crate::qtower::{rat_i, QtowerError, Rat, TowerDesc, TowerElem};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    X,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomial division by zero")]
    DivisionByZero,
    #[error("variable mismatch between operands")]
    VarMismatch,
    #[error("modulus is not invertible here (it splits over the coefficient field)")]
    NotInvertibleModulus,
    #[error(transparent)]
    Tower(#[from] QtowerError),
}

/// Dense univariate polynomial over a multiquadratic tower.
#[derive(Debug, Clone)]
pub struct Poly {
    var: Var,
    coeffs: Vec<TowerElem>, // lowest first, trimmed, common tower; empty = zero
}

fn common_tower(elems: &[TowerElem]) -> TowerDesc {
    let mut t = TowerDesc::rationals();
    for e in elems {
        t = t.join(e.tower()).expect("tower join failed");
    }
    t
}

impl Poly {
    pub fn new(var: Var, coeffs: Vec<TowerElem>) -> Poly {
        let tower = common_tower(&coeffs);
        let mut coeffs: Vec<TowerElem> = coeffs
            .into_iter()
            .map(|c| c.embed(&tower).expect("embed into joined tower"))
            .collect();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { var, coeffs }
    }

    pub fn zero(var: Var) -> Poly {
        Poly { var, coeffs: Vec::new() }
    }

    pub fn one(var: Var) -> Poly {
        Poly::constant(var, TowerElem::from_int(1))
    }

    pub fn constant(var: Var, c: TowerElem) -> Poly {
        Poly::new(var, vec![c])
    }

    pub fn constant_rat(var: Var, r: Rat) -> Poly {
        Poly::constant(var, TowerElem::from_rat(r))
    }

    /// The monomial `v` itself.
    pub fn var_poly(var: Var) -> Poly {
        Poly::new(var, vec![TowerElem::from_int(0), TowerElem::from_int(1)])
    }

    /// Monic product of (v - r) over the given roots.
    pub fn from_roots(var: Var, roots: &[TowerElem]) -> Poly {
        let mut p = Poly::one(var);
        for r in roots {
            p = p.mul(&Poly::new(var, vec![r.neg(), TowerElem::from_int(1)]));
        }
        p
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == TowerElem::from_int(1)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> TowerElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| TowerElem::from_int(0))
    }

    pub fn coeffs(&self) -> &[TowerElem] {
        &self.coeffs
    }

    pub fn leading(&self) -> TowerElem {
        self.coeffs.last().cloned().unwrap_or_else(|| TowerElem::from_int(0))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.var, other.var, "variable mismatch");
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        Poly::new(self.var, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { var: self.var, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.var, other.var, "variable mismatch");
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.var);
        }
        let mut out = vec![TowerElem::from_int(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(self.var, out)
    }

    pub fn mul_elem(&self, c: &TowerElem) -> Poly {
        Poly::new(self.var, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn mul_rat(&self, r: &Rat) -> Poly {
        Poly { var: self.var, coeffs: self.coeffs.iter().map(|a| a.mul_rat(r)).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(self.var);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient and remainder; the divisor's leading coefficient is inverted
    /// in the tower, so this is exact division with remainder over a field.
    pub fn divmod(&self, d: &Poly) -> Result<(Poly, Poly), PolyError> {
        if self.var != d.var {
            return Err(PolyError::VarMismatch);
        }
        if d.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let dn = d.coeffs.len();
        if self.coeffs.len() < dn {
            return Ok((Poly::zero(self.var), self.clone()));
        }
        let lead_inv = d.leading().inv().map_err(PolyError::Tower)?;
        let mut rem = self.clone();
        let mut q = vec![TowerElem::from_int(0); self.coeffs.len() - dn + 1];
        while !rem.is_zero() && rem.coeffs.len() >= dn {
            let k = rem.coeffs.len() - dn;
            let c = rem.leading().mul(&lead_inv);
            q[k] = c.clone();
            let mut shifted = vec![TowerElem::from_int(0); k];
            shifted.extend(d.coeffs.iter().map(|a| a.mul(&c)));
            rem = rem.sub(&Poly::new(self.var, shifted));
        }
        Ok((Poly::new(self.var, q), rem))
    }

    pub fn div_exact(&self, d: &Poly) -> Result<Poly, PolyError> {
        let (q, r) = self.divmod(d)?;
        assert!(r.is_zero(), "division was not exact");
        Ok(q)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b).expect("gcd division");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic().1
        }
    }

    /// Extended gcd: returns (g, u, v) with u*self + v*other = g, g monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let var = self.var;
        let (mut a, mut b) = (self.clone(), other.clone());
        let (mut ua, mut va) = (Poly::one(var), Poly::zero(var));
        let (mut ub, mut vb) = (Poly::zero(var), Poly::one(var));
        while !b.is_zero() {
            let (q, r) = a.divmod(&b).expect("ext_gcd division");
            let nu = ua.sub(&q.mul(&ub));
            let nv = va.sub(&q.mul(&vb));
            a = b;
            b = r;
            ua = ub;
            va = vb;
            ub = nu;
            vb = nv;
        }
        if a.is_zero() {
            return (a, ua, va);
        }
        let (lead, g) = a.monic();
        let li = lead.inv().expect("nonzero leading");
        (g, ua.mul_elem(&li), va.mul_elem(&li))
    }

    /// Returns (leading coefficient, monic polynomial).
    pub fn monic(&self) -> (TowerElem, Poly) {
        if self.is_zero() {
            return (TowerElem::from_int(0), self.clone());
        }
        let lead = self.leading();
        let li = lead.inv().expect("nonzero leading coefficient");
        (lead, self.mul_elem(&li))
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.var);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul_rat(&rat_i(i as i64)))
            .collect();
        Poly::new(self.var, coeffs)
    }

    pub fn eval(&self, at: &TowerElem) -> TowerElem {
        let mut acc = TowerElem::from_int(0);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    pub fn eval_rat(&self, at: &Rat) -> TowerElem {
        self.eval(&TowerElem::from_rat(at.clone()))
    }

    /// Substitute another polynomial for the variable. The result uses the
    /// argument's variable.
    pub fn compose(&self, arg: &Poly) -> Poly {
        let mut acc = Poly::zero(arg.var);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(arg).add(&Poly::constant(arg.var, c.clone()));
        }
        acc
    }

    /// Yun squarefree decomposition of the monic part: returns pairwise
    /// coprime monic squarefree factors with multiplicities, whose weighted
    /// product is self / leading.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, u32)> {
        if self.is_zero() || self.is_constant() {
            return Vec::new();
        }
        let (_, f) = self.monic();
        let df = f.derivative();
        let g = f.gcd(&df);
        if g.is_constant() {
            return vec![(f, 1)];
        }
        let mut c = f.div_exact(&g).expect("Yun c1");
        let mut d = df.div_exact(&g).expect("Yun d1").sub(&c.derivative());
        let mut out = Vec::new();
        let mut i = 1u32;
        while !c.is_constant() {
            let a = c.gcd(&d);
            if !a.is_constant() {
                out.push((a.clone(), i));
            }
            c = c.div_exact(&a).expect("Yun c step");
            d = d.div_exact(&a).expect("Yun d step").sub(&c.derivative());
            i += 1;
        }
        out
    }

    /// Decide whether the polynomial equals c * g^2 for a constant c and a
    /// monic g, and return them. Constants give (self, 1).
    pub fn square_up_to_constant(&self) -> Option<(TowerElem, Poly)> {
        if self.is_constant() {
            return Some((self.coeff(0), Poly::one(self.var)));
        }
        let mut g = Poly::one(self.var);
        for (factor, mult) in self.squarefree_decomposition() {
            if mult % 2 != 0 {
                return None;
            }
            g = g.mul(&factor.pow(mult / 2));
        }
        let c = self.leading();
        if g.mul(&g).mul_elem(&c) == *self {
            Some((c, g))
        } else {
            None
        }
    }

    /// Strip a known root, returning the quotient; panics if not a root.
    pub fn deflate(&self, root: &TowerElem) -> Poly {
        let lin = Poly::new(self.var, vec![root.neg(), TowerElem::from_int(1)]);
        self.div_exact(&lin).expect("deflate by non-root")
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.var == other.var
            && self.coeffs.len() == other.coeffs.len()
            && self.coeffs.iter().zip(other.coeffs.iter()).all(|(a, b)| a == b)
    }
}
impl Eq for Poly {}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let v = self.var.name();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let (sign, body) = match cs.strip_prefix('-') {
                Some(rest) if !cs.contains(" + ") && !cs.contains(" - ") => ("-", rest.to_string()),
                _ => ("+", cs),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign == "-" {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let needs_parens = body.contains(" + ") || body.contains(" - ");
            let body_fmt = |f: &mut fmt::Formatter<'_>| {
                if needs_parens {
                    write!(f, "({})", body)
                } else {
                    write!(f, "{}", body)
                }
            };
            if i == 0 {
                body_fmt(f)?;
            } else {
                if body != "1" {
                    body_fmt(f)?;
                    write!(f, "*")?;
                }
                if i == 1 {
                    write!(f, "{}", v)?;
                } else {
                    write!(f, "{}^{}", v, i)?;
                }
            }
        }
        Ok(())
    }
}

/// Rational function: reduced fraction of polynomials with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc, PolyError> {
        if num.var() != den.var() {
            return Err(PolyError::VarMismatch);
        }
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        let (lead, den) = den.monic();
        let num = num.mul_elem(&lead.inv().map_err(PolyError::Tower)?);
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let var = p.var();
        RatFunc { num: p, den: Poly::one(var) }
    }

    pub fn zero(var: Var) -> RatFunc {
        Self::from_poly(Poly::zero(var))
    }

    pub fn var(&self) -> Var {
        self.num.var()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, PolyError> {
        if other.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        RatFunc::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn mul_elem(&self, c: &TowerElem) -> RatFunc {
        RatFunc { num: self.num.mul_elem(c), den: self.den.clone() }
    }

    pub fn square(&self) -> RatFunc {
        self.mul(self)
    }

    /// Evaluate; None at a pole.
    pub fn eval(&self, at: &TowerElem) -> Option<TowerElem> {
        let d = self.den.eval(at);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(at).div(&d).expect("nonzero denominator value"))
    }

    /// Degree of the rational function as a map, deg num - deg den, with
    /// None for the zero function.
    pub fn map_degree(&self) -> Option<isize> {
        Some(self.num.degree()? as isize - self.den.degree().unwrap_or(0) as isize)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Sparse bivariate polynomial in (t, x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), TowerElem>, // (deg_t, deg_x) -> coeff, nonzero
}

impl BivarPoly {
    pub fn zero() -> BivarPoly {
        BivarPoly { terms: BTreeMap::new() }
    }

    pub fn from_terms(terms: Vec<((u32, u32), TowerElem)>) -> BivarPoly {
        let mut p = BivarPoly::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, dt: u32, dx: u32, c: TowerElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(dt, dx)) {
            Some(existing) => {
                let s = existing.add(&c);
                if s.is_zero() {
                    self.terms.remove(&(dt, dx));
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert((dt, dx), c);
            }
        }
    }

    pub fn coeff(&self, dt: u32, dx: u32) -> TowerElem {
        self.terms.get(&(dt, dx)).cloned().unwrap_or_else(|| TowerElem::from_int(0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &TowerElem)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_poly_t(p: &Poly) -> BivarPoly {
        assert_eq!(p.var(), Var::T);
        let mut out = BivarPoly::zero();
        for (i, c) in p.coeffs().iter().enumerate() {
            out.add_term(i as u32, 0, c.clone());
        }
        out
    }

    /// The curve x - q(t) for a graph component.
    pub fn x_minus_graph(q: &Poly) -> BivarPoly {
        let mut out = BivarPoly::from_poly_t(&q.neg());
        out.add_term(0, 1, TowerElem::from_int(1));
        out
    }

    pub fn add(&self, other: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (&(i, j), c) in other.terms.iter() {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BivarPoly) -> BivarPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(&k, c)| (k, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (&(i1, j1), c1) in self.terms.iter() {
            for (&(i2, j2), c2) in other.terms.iter() {
                out.add_term(i1 + i2, j1 + j2, c1.mul(c2));
            }
        }
        out
    }

    pub fn mul_elem(&self, c: &TowerElem) -> BivarPoly {
        if c.is_zero() {
            return BivarPoly::zero();
        }
        BivarPoly {
            terms: self.terms.iter().map(|(&k, a)| (k, a.mul(c))).collect(),
        }
    }

    pub fn deg_x(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn deg_t(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    /// Coefficients as polynomials in t, indexed by x-degree.
    pub fn coeffs_in_x(&self) -> Vec<Poly> {
        let dx = self.deg_x() as usize;
        let mut out = vec![Poly::zero(Var::T); dx + 1];
        let mut raw: Vec<Vec<TowerElem>> = vec![Vec::new(); dx + 1];
        for (&(i, j), c) in self.terms.iter() {
            let row = &mut raw[j as usize];
            if row.len() <= i as usize {
                row.resize(i as usize + 1, TowerElem::from_int(0));
            }
            row[i as usize] = c.clone();
        }
        for (j, row) in raw.into_iter().enumerate() {
            out[j] = Poly::new(Var::T, row);
        }
        out
    }

    /// Substitute x = q(t), producing a polynomial in t.
    pub fn subst_graph(&self, q: &Poly) -> Poly {
        assert_eq!(q.var(), Var::T);
        let mut acc = Poly::zero(Var::T);
        let coeffs = self.coeffs_in_x();
        for c in coeffs.into_iter().rev() {
            acc = acc.mul(q).add(&c);
        }
        acc
    }

    /// Substitute t = a, producing a polynomial in x.
    pub fn eval_t(&self, a: &TowerElem) -> Poly {
        let dx = self.deg_x() as usize;
        let mut out = vec![TowerElem::from_int(0); dx + 1];
        for (&(i, j), c) in self.terms.iter() {
            out[j as usize] = out[j as usize].add(&c.mul(&a.pow(i)));
        }
        Poly::new(Var::X, out)
    }

    pub fn eval(&self, t: &TowerElem, x: &TowerElem) -> TowerElem {
        let mut acc = TowerElem::from_int(0);
        for (&(i, j), c) in self.terms.iter() {
            acc = acc.add(&c.mul(&t.pow(i)).mul(&x.pow(j)));
        }
        acc
    }

    pub fn derivative_x(&self) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (&(i, j), c) in self.terms.iter() {
            if j > 0 {
                out.add_term(i, j - 1, c.mul_rat(&rat_i(j as i64)));
            }
        }
        out
    }

    pub fn derivative_t(&self) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (&(i, j), c) in self.terms.iter() {
            if i > 0 {
                out.add_term(i - 1, j, c.mul_rat(&rat_i(i as i64)));
            }
        }
        out
    }

    /// The top-degree form evaluated along the direction x = a t, i.e.
    /// sum of c_{ij} a^j over i + j = total degree. Zero means the point at
    /// infinity [1 : a : 0] lies on the projective closure.
    pub fn leading_form_at_slope(&self, a: &TowerElem) -> TowerElem {
        let d = self.total_degree();
        let mut acc = TowerElem::from_int(0);
        for (&(i, j), c) in self.terms.iter() {
            if i + j == d {
                acc = acc.add(&c.mul(&a.pow(j)));
            }
        }
        acc
    }

    /// Coefficient of x^d in the top form; nonzero exactly when the vertical
    /// point at infinity [0 : 1 : 0] avoids the projective closure.
    pub fn leading_form_vertical(&self) -> TowerElem {
        let d = self.total_degree();
        self.coeff(0, d)
    }

    /// Resultant with respect to x: a polynomial in t vanishing at t-values
    /// where the two curves share a root in x (or both leading coefficients
    /// vanish). Sylvester determinant, sized for small conic work.
    pub fn resultant_x(&self, other: &BivarPoly) -> Poly {
        let a = self.coeffs_in_x();
        let b = other.coeffs_in_x();
        let m = a.len() - 1;
        let n = b.len() - 1;
        if m == 0 {
            return a[0].pow(n as u32);
        }
        if n == 0 {
            return b[0].pow(m as u32);
        }
        let size = m + n;
        let mut mat = vec![vec![Poly::zero(Var::T); size]; size];
        for row in 0..n {
            for (k, c) in a.iter().enumerate() {
                mat[row][row + (m - k)] = c.clone();
            }
        }
        for row in 0..m {
            for (k, c) in b.iter().enumerate() {
                mat[n + row][row + (n - k)] = c.clone();
            }
        }
        det_poly(&mat)
    }
}

fn det_poly(mat: &[Vec<Poly>]) -> Poly {
    let n = mat.len();
    if n == 0 {
        return Poly::one(Var::T);
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = Poly::zero(Var::T);
    for (i, row) in mat.iter().enumerate() {
        if row[0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = mat
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, r)| r[1..].to_vec())
            .collect();
        let term = row[0].mul(&det_poly(&minor));
        if i % 2 == 0 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
    }
    acc
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            let cs = c.to_string();
            let neg = cs.starts_with('-') && !cs.contains(" + ") && !cs.contains(" - ");
            let body = if neg { cs[1..].to_string() } else { cs.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = match (i, j) {
                (0, 0) => String::new(),
                (1, 0) => "t".into(),
                (i, 0) => format!("t^{}", i),
                (0, 1) => "x".into(),
                (0, j) => format!("x^{}", j),
                (1, 1) => "t*x".into(),
                (i, 1) => format!("t^{}*x", i),
                (1, j) => format!("t*x^{}", j),
                (i, j) => format!("t^{}*x^{}", i, j),
            };
            let needs_parens = body.contains(" + ") || body.contains(" - ");
            if mono.is_empty() {
                if needs_parens {
                    write!(f, "({})", body)?;
                } else {
                    write!(f, "{}", body)?;
                }
            } else if body == "1" {
                write!(f, "{}", mono)?;
            } else if needs_parens {
                write!(f, "({})*{}", body, mono)?;
            } else {
                write!(f, "{}*{}", body, mono)?;
            }
        }
        Ok(())
    }
}

/// The quotient ring K[t]/(modulus) for a monic modulus, used to look at
/// x-residues of curve pairs over an irreducible factor of a resultant.
pub struct ResidueField {
    modulus: Poly,
}

impl ResidueField {
    pub fn new(modulus: &Poly) -> ResidueField {
        assert_eq!(modulus.var(), Var::T);
        assert!(!modulus.is_constant(), "modulus must be nonconstant");
        let (_, m) = modulus.monic();
        ResidueField { modulus: m }
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        let (_, r) = p.divmod(&self.modulus).expect("reduce");
        r
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&a.mul(b))
    }

    /// Inverse modulo the modulus; errors when the element shares a factor
    /// with it (which means the modulus is not irreducible over this tower).
    pub fn inv(&self, a: &Poly) -> Result<Poly, PolyError> {
        let a = self.reduce(a);
        if a.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let (g, u, _) = a.ext_gcd(&self.modulus);
        if !g.is_one() {
            return Err(PolyError::NotInvertibleModulus);
        }
        Ok(self.reduce(&u))
    }

    /// Monic gcd in x of two polynomials whose x-coefficients live in this
    /// residue field. Coefficient vectors are indexed by x-degree.
    pub fn gcd_x(&self, a: &[Poly], b: &[Poly]) -> Result<Vec<Poly>, PolyError> {
        let mut a = self.trim(a.iter().map(|p| self.reduce(p)).collect());
        let mut b = self.trim(b.iter().map(|p| self.reduce(p)).collect());
        while !b.is_empty() {
            let r = self.rem_x(&a, &b)?;
            a = b;
            b = r;
        }
        if a.is_empty() {
            return Ok(a);
        }
        // normalize monic
        let li = self.inv(a.last().unwrap())?;
        Ok(self.trim(a.iter().map(|c| self.mul(c, &li)).collect()))
    }

    fn trim(&self, mut v: Vec<Poly>) -> Vec<Poly> {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    }

    fn rem_x(&self, a: &[Poly], b: &[Poly]) -> Result<Vec<Poly>, PolyError> {
        if b.is_empty() {
            return Err(PolyError::DivisionByZero);
        }
        let mut rem: Vec<Poly> = a.to_vec();
        let db = b.len() - 1;
        let li = self.inv(b.last().unwrap())?;
        while rem.len() > db && !rem.is_empty() {
            let da = rem.len() - 1;
            let c = self.mul(rem.last().unwrap(), &li);
            if !c.is_zero() {
                let shift = da - db;
                for (k, bc) in b.iter().enumerate() {
                    let delta = self.mul(&c, bc);
                    rem[shift + k] = self.reduce(&rem[shift + k].sub(&delta));
                }
            }
            rem = self.trim(rem);
            if rem.len() == da + 1 {
                // leading term failed to cancel; should not happen
                rem.pop();
            }
        }
        Ok(self.trim(rem))
    }

    /// Formal derivative in x of a coefficient vector.
    pub fn derivative_x(&self, a: &[Poly]) -> Vec<Poly> {
        let mut out = Vec::new();
        for (j, c) in a.iter().enumerate().skip(1) {
            out.push(self.reduce(&c.mul_rat(&rat_i(j as i64))));
        }
        self.trim(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtower::rat;

    fn p(coeffs: &[i64]) -> Poly {
        Poly::new(Var::X, coeffs.iter().map(|&c| TowerElem::from_int(c)).collect())
    }

    fn pt(coeffs: &[i64]) -> Poly {
        Poly::new(Var::T, coeffs.iter().map(|&c| TowerElem::from_int(c)).collect())
    }

    #[test]
    fn divmod_round_trip() {
        let a = p(&[1, 0, -3, 0, 1]); // x^4 - 3x^2 + 1
        let b = p(&[2, 1]); // x + 2
        let (q, r) = a.divmod(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.is_constant());
    }

    #[test]
    fn gcd_over_extension() {
        // gcd((x - sqrt2)(x + 1), (x - sqrt2)(x + 3)) = x - sqrt2
        let t2 = TowerDesc::new(&[2]).unwrap();
        let s2 = TowerElem::sqrt_basis(t2, &[2]).unwrap();
        let f1 = Poly::from_roots(Var::X, &[s2.clone(), TowerElem::from_int(-1)]);
        let f2 = Poly::from_roots(Var::X, &[s2.clone(), TowerElem::from_int(-3)]);
        let g = f1.gcd(&f2);
        assert_eq!(g, Poly::from_roots(Var::X, &[s2]));
    }

    #[test]
    fn ext_gcd_identity() {
        let a = p(&[-2, 0, 1]); // x^2 - 2
        let b = p(&[1, 1]); // x + 1
        let (g, u, v) = a.ext_gcd(&b);
        assert!(g.is_one());
        assert_eq!(u.mul(&a).add(&v.mul(&b)), g);
    }

    #[test]
    fn yun_decomposition() {
        // (x - 1)^2 (x + 2)^3
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]).pow(3));
        let dec = f.squarefree_decomposition();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec[0], (p(&[-1, 1]), 2));
        assert_eq!(dec[1], (p(&[2, 1]), 3));
    }

    #[test]
    fn square_detection() {
        // 8 (t + 2)^2 (t - 1)^2 is 8 times a square
        let f = pt(&[2, 1]).mul(&pt(&[-1, 1])).pow(2).mul_rat(&rat_i(8));
        let (c, g) = f.square_up_to_constant().unwrap();
        assert_eq!(c, TowerElem::from_int(8));
        assert_eq!(g, pt(&[2, 1]).mul(&pt(&[-1, 1])));
        // an odd factor breaks it
        let h = f.mul(&pt(&[5, 1]));
        assert!(h.square_up_to_constant().is_none());
    }

    #[test]
    fn compose_substitutes() {
        // (x^2 + 1) composed with t - 3 gives (t-3)^2 + 1
        let f = p(&[1, 0, 1]);
        let arg = pt(&[-3, 1]);
        assert_eq!(f.compose(&arg), pt(&[10, -6, 1]));
    }

    #[test]
    fn ratfunc_reduction() {
        // (x^2 - 1)/(x - 1) = x + 1
        let r = RatFunc::new(p(&[-1, 0, 1]), p(&[-1, 1])).unwrap();
        assert_eq!(r.as_poly(), Some(&p(&[1, 1])));
        // 1/(2x) normalizes the denominator monic
        let r2 = RatFunc::new(p(&[1]), p(&[0, 2])).unwrap();
        assert_eq!(r2.den(), &p(&[0, 1]));
        assert_eq!(r2.num(), &Poly::constant_rat(Var::X, rat(1, 2)));
    }

    #[test]
    fn bivar_resultant_simple() {
        // Res_x(x^2 + t, x - t) = t^2 + t
        let a = BivarPoly::from_terms(vec![
            ((0, 2), TowerElem::from_int(1)),
            ((1, 0), TowerElem::from_int(1)),
        ]);
        let b = BivarPoly::from_terms(vec![
            ((0, 1), TowerElem::from_int(1)),
            ((1, 0), TowerElem::from_int(-1)),
        ]);
        let r = a.resultant_x(&b);
        assert_eq!(r, pt(&[0, 1, 1]));
    }

    #[test]
    fn bivar_subst_graph() {
        // x^2 - t^4 with x = t^2 vanishes
        let c = BivarPoly::from_terms(vec![
            ((0, 2), TowerElem::from_int(1)),
            ((4, 0), TowerElem::from_int(-1)),
        ]);
        let q = pt(&[0, 0, 1]);
        assert!(c.subst_graph(&q).is_zero());
    }

    #[test]
    fn residue_field_gcd() {
        // mod t^2 - 2: gcd_x(x - t, x^2 - 2) = x - t since t^2 = 2 there
        let rf = ResidueField::new(&pt(&[-2, 0, 1]));
        let a = vec![pt(&[0, -1]), pt(&[1])]; // x - t
        let b = vec![pt(&[-2]), pt(&[0]), pt(&[1])]; // x^2 - 2
        let g = rf.gcd_x(&a, &b).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0], pt(&[0, -1]));
        assert!(g[1].is_one());
    }

    #[test]
    fn residue_field_inverse() {
        let rf = ResidueField::new(&pt(&[-2, 0, 1]));
        let inv = rf.inv(&pt(&[0, 1])).unwrap(); // 1/t = t/2
        assert_eq!(inv, pt(&[0, 1]).mul_rat(&rat(1, 2)));
    }
}
