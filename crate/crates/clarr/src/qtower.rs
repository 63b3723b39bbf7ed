//! Exact arithmetic in multiquadratic extensions of the rationals.
//!
//! A tower is Q adjoined with square roots of pairwise independent squarefree
//! integers, e.g. Q(sqrt(2), sqrt(5)) or Q(i, sqrt(2), sqrt(5)) where i is the
//! root of -1. Elements are stored as rational coordinate vectors over the
//! product basis: for radicands (d1, .., dk) the basis element for a subset S
//! is sqrt(prod_{i in S} di), indexed by bitmask. All arithmetic is exact; no
//! floating point is used anywhere except the optional `to_f64` plot helper.

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub type Rat = BigRational;

/// Convenience constructors for small rationals.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QtowerError {
    #[error("radicand {0} is degenerate (zero or a perfect square)")]
    DegenerateRadicand(i64),
    #[error("radicand is too large to reduce exactly")]
    RadicandTooLarge,
    #[error("tower would exceed the supported dimension (2^{max} over Q)", max = TowerDesc::MAX_RADICANDS)]
    TowerTooLarge,
    #[error("element does not lie in a subtower of the target")]
    NotSubtower,
    #[error("division by zero")]
    DivisionByZero,
    #[error("sign comparison of a non-real element")]
    NonRealComparison,
}

/// Squarefree part of `n`: returns `(s, m)` with `n = s * m^2`, `s` squarefree
/// and carrying the sign of `n`. Exact for all inputs we accept; inputs whose
/// reduction would require factoring past the trial bound are rejected.
pub fn squarefree_part(n: i64) -> Result<(i64, i64), QtowerError> {
    if n == 0 {
        return Ok((0, 1));
    }
    let mut rem = n.unsigned_abs();
    let mut sf: i64 = if n < 0 { -1 } else { 1 };
    let mut sq: i64 = 1;
    let mut p: u64 = 2;
    while p.saturating_mul(p) <= rem && p < 2_000_000 {
        if rem % p == 0 {
            let mut e = 0u32;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            if e % 2 == 1 {
                sf = sf.checked_mul(p as i64).ok_or(QtowerError::RadicandTooLarge)?;
            }
            sq = sq
                .checked_mul((p as i64).pow(e / 2))
                .ok_or(QtowerError::RadicandTooLarge)?;
        }
        p += 1;
    }
    if rem > 1 {
        // Remainder has no prime factor below the trial bound: it is prime, a
        // semiprime, or a prime square. Only the square case is non-squarefree.
        let r = (rem as f64).sqrt().round() as u64;
        if r.saturating_mul(r) == rem {
            sq = sq.checked_mul(r as i64).ok_or(QtowerError::RadicandTooLarge)?;
        } else if rem < 1_000_000_000_000 {
            sf = sf.checked_mul(rem as i64).ok_or(QtowerError::RadicandTooLarge)?;
        } else {
            return Err(QtowerError::RadicandTooLarge);
        }
    }
    Ok((sf, sq))
}

fn is_perfect_square(n: i64) -> bool {
    n >= 0 && matches!(squarefree_part(n), Ok((1, _)))
}

/// Squarefree part of a positive BigInt rational `p/q`: `p*q = s * m^2` with
/// `s` a squarefree i64; used when extracting square roots of rationals.
fn squarefree_part_rat(r: &Rat) -> Result<(i64, Rat), QtowerError> {
    let n = r.numer() * r.denom();
    let n64 = i64::try_from(&n).map_err(|_| QtowerError::RadicandTooLarge)?;
    let (sf, m) = squarefree_part(n64)?;
    // r = (p/q) = (p*q)/q^2 = sf * (m/q)^2
    Ok((sf, Rat::new(BigInt::from(m), r.denom().clone())))
}

/// An ordered list of independent squarefree radicands describing the field
/// Q(sqrt(d1), .., sqrt(dk)). Negative radicands are allowed; -1 encodes i.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TowerDesc {
    radicands: Vec<i64>,
}

impl TowerDesc {
    pub const MAX_RADICANDS: usize = 6;

    pub fn rationals() -> Self {
        TowerDesc { radicands: Vec::new() }
    }

    pub fn new(radicands: &[i64]) -> Result<Self, QtowerError> {
        let mut t = Self::rationals();
        for &d in radicands {
            t = t.adjoin_sqrt(d)?;
        }
        Ok(t)
    }

    pub fn radicands(&self) -> &[i64] {
        &self.radicands
    }

    pub fn dim(&self) -> usize {
        1 << self.radicands.len()
    }

    /// Product of the radicands selected by `mask`, reduced to squarefree form:
    /// returns `(s, m)` with the product equal to `s * m^2`.
    fn subset_product(&self, mask: usize) -> Result<(i64, i64), QtowerError> {
        let mut sf: i64 = 1;
        let mut sq: i64 = 1;
        for (i, &d) in self.radicands.iter().enumerate() {
            if mask & (1 << i) != 0 {
                let g = num::integer::gcd(sf.unsigned_abs(), d.unsigned_abs()) as i64;
                sf = (sf / g)
                    .checked_mul(d / g)
                    .ok_or(QtowerError::RadicandTooLarge)?;
                sq = sq.checked_mul(g).ok_or(QtowerError::RadicandTooLarge)?;
            }
        }
        Ok((sf, sq))
    }

    /// Adjoin sqrt(d). Non-squarefree d is reduced first; a radicand already
    /// expressible as a product of existing ones (modulo squares) is absorbed
    /// and the tower returned unchanged.
    pub fn adjoin_sqrt(&self, d: i64) -> Result<TowerDesc, QtowerError> {
        if d == 0 || is_perfect_square(d) {
            return Err(QtowerError::DegenerateRadicand(d));
        }
        let (sf, _) = squarefree_part(d)?;
        for mask in 0..self.dim() {
            if self.subset_product(mask)?.0 == sf {
                return Ok(self.clone());
            }
        }
        if self.radicands.len() >= Self::MAX_RADICANDS {
            return Err(QtowerError::TowerTooLarge);
        }
        let mut rads = self.radicands.clone();
        rads.push(sf);
        rads.sort_by_key(|&r| (r.unsigned_abs(), r));
        Ok(TowerDesc { radicands: rads })
    }

    pub fn is_subtower_of(&self, other: &TowerDesc) -> bool {
        self.radicands.iter().all(|&d| {
            (0..other.dim()).any(|mask| matches!(other.subset_product(mask), Ok((sf, _)) if sf == d))
        })
    }

    pub fn join(&self, other: &TowerDesc) -> Result<TowerDesc, QtowerError> {
        let mut t = self.clone();
        for &d in &other.radicands {
            t = t.adjoin_sqrt(d)?;
        }
        Ok(t)
    }

    /// The square root of a rational inside this tower, if it exists: finds a
    /// basis element whose radicand product has the same squarefree part.
    pub fn sqrt_of_rational(&self, q: &Rat) -> Option<TowerElem> {
        if q.is_zero() {
            return Some(TowerElem::zero(self.clone()));
        }
        let (sf, m) = squarefree_part_rat(q).ok()?;
        for mask in 0..self.dim() {
            let (s, k) = self.subset_product(mask).ok()?;
            if s == sf {
                // sqrt(prod) = k*sqrt(sf) so sqrt(q) = (m/k) * basis(mask)
                let mut e = TowerElem::zero(self.clone());
                e.coords[mask] = &m / Rat::from_integer(BigInt::from(k));
                return Some(e.normalized_sign_of_sqrt());
            }
        }
        None
    }

    fn key_for_mask(&self, mask: usize) -> String {
        if mask == 0 {
            return String::new();
        }
        let parts: Vec<String> = self
            .radicands
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, d)| d.to_string())
            .collect();
        parts.join("*")
    }

    fn mask_for_key(&self, key: &str) -> Option<usize> {
        if key.is_empty() {
            return Some(0);
        }
        let mut mask = 0usize;
        for part in key.split('*') {
            let d: i64 = part.trim().parse().ok()?;
            let i = self.radicands.iter().position(|&r| r == d)?;
            mask |= 1 << i;
        }
        Some(mask)
    }
}

/// An element of a multiquadratic tower: rational coordinates over the subset
/// product basis of its tower description.
#[derive(Debug, Clone)]
pub struct TowerElem {
    tower: TowerDesc,
    coords: Vec<Rat>,
}

impl TowerElem {
    pub fn zero(tower: TowerDesc) -> Self {
        let dim = tower.dim();
        TowerElem { tower, coords: vec![Rat::zero(); dim] }
    }

    pub fn one(tower: TowerDesc) -> Self {
        let mut e = Self::zero(tower);
        e.coords[0] = Rat::one();
        e
    }

    pub fn from_rat_in(tower: TowerDesc, r: Rat) -> Self {
        let mut e = Self::zero(tower);
        e.coords[0] = r;
        e
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::from_rat_in(TowerDesc::rationals(), r)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_i(n))
    }

    /// The square root of an integer, in the smallest tower containing it.
    pub fn sqrt_int(n: i64) -> Result<Self, QtowerError> {
        if n == 0 {
            return Ok(Self::from_int(0));
        }
        Self::from_int(n)
            .try_sqrt()
            .map(|(root, _)| root)
            .ok_or(QtowerError::RadicandTooLarge)
    }

    /// The basis element sqrt(prod of subset) for an explicit radicand subset.
    pub fn sqrt_basis(tower: TowerDesc, subset: &[i64]) -> Result<Self, QtowerError> {
        let mut mask = 0usize;
        for d in subset {
            let i = tower
                .radicands
                .iter()
                .position(|r| r == d)
                .ok_or(QtowerError::NotSubtower)?;
            mask |= 1 << i;
        }
        let mut e = Self::zero(tower);
        e.coords[mask] = Rat::one();
        Ok(e)
    }

    pub fn tower(&self) -> &TowerDesc {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        if self.is_rational() {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    pub fn coord(&self, mask: usize) -> &Rat {
        &self.coords[mask]
    }

    /// Re-express the element in a larger tower. Errors unless every basis
    /// element used maps into the target.
    pub fn embed(&self, target: &TowerDesc) -> Result<TowerElem, QtowerError> {
        if &self.tower == target {
            return Ok(self.clone());
        }
        let mut out = TowerElem::zero(target.clone());
        'src: for (mask, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sf, m) = self.tower.subset_product(mask)?;
            for tmask in 0..target.dim() {
                let (tsf, tm) = target.subset_product(tmask)?;
                if tsf == sf {
                    // sqrt(src prod) = m sqrt(sf) = (m/tm) sqrt(tgt prod)
                    let coeff = rat(m, tm);
                    out.coords[tmask] += c * coeff;
                    continue 'src;
                }
            }
            return Err(QtowerError::NotSubtower);
        }
        Ok(out)
    }

    fn joined(a: &TowerElem, b: &TowerElem) -> Result<(TowerElem, TowerElem), QtowerError> {
        if a.tower == b.tower {
            return Ok((a.clone(), b.clone()));
        }
        let j = a.tower.join(&b.tower)?;
        Ok((a.embed(&j)?, b.embed(&j)?))
    }

    pub fn add(&self, other: &TowerElem) -> TowerElem {
        let (mut a, b) = Self::joined(self, other).expect("tower join failed in add");
        for (x, y) in a.coords.iter_mut().zip(b.coords.iter()) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &TowerElem) -> TowerElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TowerElem {
        let mut a = self.clone();
        for c in a.coords.iter_mut() {
            *c = -c.clone();
        }
        a
    }

    pub fn mul(&self, other: &TowerElem) -> TowerElem {
        let (a, b) = Self::joined(self, other).expect("tower join failed in mul");
        let coords = mul_coords(&a.coords, &b.coords, &a.tower.radicands);
        TowerElem { tower: a.tower, coords }
    }

    pub fn mul_rat(&self, r: &Rat) -> TowerElem {
        let mut a = self.clone();
        for c in a.coords.iter_mut() {
            *c *= r;
        }
        a
    }

    pub fn inv(&self) -> Result<TowerElem, QtowerError> {
        if self.is_zero() {
            return Err(QtowerError::DivisionByZero);
        }
        let coords = inv_coords(&self.coords, &self.tower.radicands)?;
        Ok(TowerElem { tower: self.tower.clone(), coords })
    }

    pub fn div(&self, other: &TowerElem) -> Result<TowerElem, QtowerError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn square(&self) -> TowerElem {
        self.mul(self)
    }

    pub fn pow(&self, n: u32) -> TowerElem {
        let mut acc = TowerElem::one(self.tower.clone());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Square root search. Returns the root and the tower it lives in: the
    /// element's own tower when the root already exists there, or a minimal
    /// extension by one squarefree radicand when the element is a rational
    /// multiple of a tower square. Roots are normalized so that the first
    /// nonzero coordinate is positive. Returns None when no root is
    /// representable this way (or the extension would exceed the size cap).
    pub fn try_sqrt(&self) -> Option<(TowerElem, TowerDesc)> {
        if self.is_zero() {
            return Some((self.clone(), self.tower.clone()));
        }
        let (s_coords, q) = try_sqrt_scaled(&self.coords, &self.tower.radicands)?;
        let s = TowerElem { tower: self.tower.clone(), coords: s_coords };
        let root = if q.is_one() {
            s
        } else {
            let q_rat = Rat::from_integer(BigInt::from(q));
            match self.tower.sqrt_of_rational(&q_rat) {
                Some(rq) => s.mul(&rq),
                None => {
                    let ext = self.tower.adjoin_sqrt(q).ok()?;
                    let rq = ext.sqrt_of_rational(&q_rat)?;
                    s.embed(&ext).ok()?.mul(&rq)
                }
            }
        };
        let root = root.normalized_sign_of_sqrt();
        debug_assert!(root.square() == *self);
        if root.square() != *self {
            return None;
        }
        let tower = root.tower.clone();
        Some((root, tower))
    }

    fn normalized_sign_of_sqrt(self) -> TowerElem {
        match self.coords.iter().find(|c| !c.is_zero()) {
            Some(c) if c.is_negative() => self.neg(),
            _ => self,
        }
    }

    /// Exact sign of a real element: -1, 0 or +1. Errors when the element has
    /// a nonzero coordinate on a basis element involving a negative radicand.
    pub fn sign(&self) -> Result<i32, QtowerError> {
        // Project away negative radicands (coords there must vanish).
        let neg_bits: usize = self
            .tower
            .radicands
            .iter()
            .enumerate()
            .filter(|(_, &d)| d < 0)
            .map(|(i, _)| 1usize << i)
            .sum();
        let mut pos_rads = Vec::new();
        for (i, &d) in self.tower.radicands.iter().enumerate() {
            if d > 0 {
                pos_rads.push((i, d));
            }
        }
        let mut proj = vec![Rat::zero(); 1 << pos_rads.len()];
        for (mask, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if mask & neg_bits != 0 {
                return Err(QtowerError::NonRealComparison);
            }
            let mut pmask = 0usize;
            for (j, (i, _)) in pos_rads.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    pmask |= 1 << j;
                }
            }
            proj[pmask] = c.clone();
        }
        let rads: Vec<i64> = pos_rads.iter().map(|&(_, d)| d).collect();
        Ok(sign_coords(&proj, &rads))
    }

    pub fn cmp_real(&self, other: &TowerElem) -> Result<Ordering, QtowerError> {
        Ok(match self.sub(other).sign()? {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Floating point approximation for plotting; None for non-real elements.
    pub fn to_f64(&self) -> Option<f64> {
        let mut acc = 0.0;
        for (mask, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sf, m) = self.tower.subset_product(mask).ok()?;
            if sf < 0 {
                return None;
            }
            let cf = bigint_f64(c.numer()) / bigint_f64(c.denom());
            acc += cf * (m as f64) * (sf as f64).sqrt();
        }
        Some(acc)
    }
}

fn bigint_f64(n: &BigInt) -> f64 {
    n.to_string().parse().unwrap_or(f64::NAN)
}

fn mul_coords(a: &[Rat], b: &[Rat], rads: &[i64]) -> Vec<Rat> {
    if rads.is_empty() {
        return vec![&a[0] * &b[0]];
    }
    let d = *rads.last().unwrap();
    let sub = &rads[..rads.len() - 1];
    let h = a.len() / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let d_rat = rat_i(d);
    let p00 = mul_coords(a0, b0, sub);
    let p11 = mul_coords(a1, b1, sub);
    let p01 = mul_coords(a0, b1, sub);
    let p10 = mul_coords(a1, b0, sub);
    let mut out = Vec::with_capacity(a.len());
    for i in 0..h {
        out.push(&p00[i] + &p11[i] * &d_rat);
    }
    for i in 0..h {
        out.push(&p01[i] + &p10[i]);
    }
    out
}

fn inv_coords(a: &[Rat], rads: &[i64]) -> Result<Vec<Rat>, QtowerError> {
    if rads.is_empty() {
        if a[0].is_zero() {
            return Err(QtowerError::DivisionByZero);
        }
        return Ok(vec![a[0].recip()]);
    }
    let d = *rads.last().unwrap();
    let sub = &rads[..rads.len() - 1];
    let h = a.len() / 2;
    let (a0, a1) = a.split_at(h);
    // 1/(u + v sqrt(d)) = (u - v sqrt(d)) / (u^2 - v^2 d)
    let u2 = mul_coords(a0, a0, sub);
    let v2 = mul_coords(a1, a1, sub);
    let d_rat = rat_i(d);
    let denom: Vec<Rat> = u2
        .iter()
        .zip(v2.iter())
        .map(|(x, y)| x - y * &d_rat)
        .collect();
    let denom_inv = inv_coords(&denom, sub)?;
    let lo = mul_coords(a0, &denom_inv, sub);
    let hi = mul_coords(a1, &denom_inv, sub);
    let mut out = Vec::with_capacity(a.len());
    out.extend(lo);
    out.extend(hi.into_iter().map(|c| -c));
    Ok(out)
}

fn coords_zero(a: &[Rat]) -> bool {
    a.iter().all(|c| c.is_zero())
}

/// Find `(s, q)` with `a = q * s^2`, `q` a squarefree integer and `s` in the
/// same tower, if such a decomposition exists. `q` is unique when it does.
fn try_sqrt_scaled(a: &[Rat], rads: &[i64]) -> Option<(Vec<Rat>, i64)> {
    if rads.is_empty() {
        let r = &a[0];
        if r.is_zero() {
            return Some((vec![Rat::zero()], 1));
        }
        let (sf, m) = squarefree_part_rat(r).ok()?;
        return Some((vec![m], sf));
    }
    let d = *rads.last().unwrap();
    let sub = &rads[..rads.len() - 1];
    let h = a.len() / 2;
    let (u, v) = a.split_at(h);
    if coords_zero(v) {
        // a lies in the subtower: the root is either there too, or picks up a
        // factor sqrt(d) when a/d is the scaled square instead.
        if let Some((s, q)) = try_sqrt_scaled(u, sub) {
            let mut out = s;
            out.extend(vec![Rat::zero(); h]);
            return Some((out, q));
        }
        let d_rat = rat_i(d);
        let u_over_d: Vec<Rat> = u.iter().map(|c| c / &d_rat).collect();
        if let Some((w, q)) = try_sqrt_scaled(&u_over_d, sub) {
            let mut out = vec![Rat::zero(); h];
            out.extend(w);
            return Some((out, q));
        }
        return None;
    }
    // a = u + v sqrt(d) with v nonzero: any root q*(w1 + w2 sqrt(d))^2 forces
    // u^2 - v^2 d to be a perfect square m^2 in the subtower (no scaling),
    // and then q w1^2 = (u +- m)/2.
    let d_rat = rat_i(d);
    let u2 = mul_coords(u, u, sub);
    let v2 = mul_coords(v, v, sub);
    let n: Vec<Rat> = u2
        .iter()
        .zip(v2.iter())
        .map(|(x, y)| x - y * &d_rat)
        .collect();
    let (m, qm) = try_sqrt_scaled(&n, sub)?;
    if qm != 1 {
        return None;
    }
    let two = rat_i(2);
    for m_signed in [m.clone(), m.iter().map(|c| -c).collect::<Vec<_>>()] {
        let half: Vec<Rat> = u
            .iter()
            .zip(m_signed.iter())
            .map(|(x, y)| (x + y) / &two)
            .collect();
        if coords_zero(&half) {
            continue;
        }
        if let Some((w1, q)) = try_sqrt_scaled(&half, sub) {
            if coords_zero(&w1) {
                continue;
            }
            // w2 = v / (2 q w1)
            let q_rat = rat_i(q);
            let scaled: Vec<Rat> = w1.iter().map(|c| c * &two * &q_rat).collect();
            let inv = inv_coords(&scaled, sub).ok()?;
            let w2 = mul_coords(v, &inv, sub);
            let mut s = Vec::with_capacity(a.len());
            s.extend(w1);
            s.extend(w2);
            // verify q * s^2 == a
            let sq = mul_coords(&s, &s, rads);
            let ok = sq
                .iter()
                .zip(a.iter())
                .all(|(x, y)| &(x * &q_rat) == y);
            if ok {
                return Some((s, q));
            }
        }
    }
    None
}

fn sign_coords(a: &[Rat], rads: &[i64]) -> i32 {
    if rads.is_empty() {
        return if a[0].is_zero() {
            0
        } else if a[0].is_negative() {
            -1
        } else {
            1
        };
    }
    let d = *rads.last().unwrap();
    debug_assert!(d > 0);
    let sub = &rads[..rads.len() - 1];
    let h = a.len() / 2;
    let (u, v) = a.split_at(h);
    let su = sign_coords(u, sub);
    let sv = sign_coords(v, sub);
    if sv == 0 {
        return su;
    }
    if su == 0 {
        return sv;
    }
    if su == sv {
        return su;
    }
    // Mixed signs: compare |u| against |v| sqrt(d) via u^2 - v^2 d.
    let u2 = mul_coords(u, u, sub);
    let v2 = mul_coords(v, v, sub);
    let d_rat = rat_i(d);
    let n: Vec<Rat> = u2
        .iter()
        .zip(v2.iter())
        .map(|(x, y)| x - y * &d_rat)
        .collect();
    su * sign_coords(&n, sub)
}

impl PartialEq for TowerElem {
    fn eq(&self, other: &Self) -> bool {
        if self.tower == other.tower {
            return self.coords == other.coords;
        }
        match Self::joined(self, other) {
            Ok((a, b)) => a.coords == b.coords,
            Err(_) => false,
        }
    }
}
impl Eq for TowerElem {}

impl std::ops::Add for &TowerElem {
    type Output = TowerElem;
    fn add(self, rhs: &TowerElem) -> TowerElem {
        TowerElem::add(self, rhs)
    }
}
impl std::ops::Sub for &TowerElem {
    type Output = TowerElem;
    fn sub(self, rhs: &TowerElem) -> TowerElem {
        TowerElem::sub(self, rhs)
    }
}
impl std::ops::Mul for &TowerElem {
    type Output = TowerElem;
    fn mul(self, rhs: &TowerElem) -> TowerElem {
        TowerElem::mul(self, rhs)
    }
}
impl std::ops::Neg for &TowerElem {
    type Output = TowerElem;
    fn neg(self) -> TowerElem {
        TowerElem::neg(self)
    }
}

impl fmt::Display for TowerElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(Rat, String)> = Vec::new();
        for (mask, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sf, m) = self.tower.subset_product(mask).map_err(|_| fmt::Error)?;
            let coeff = c * rat_i(m);
            let sym = if mask == 0 {
                String::new()
            } else if sf == -1 {
                "i".to_string()
            } else if sf < 0 {
                format!("i*sqrt({})", -sf)
            } else {
                format!("sqrt({})", sf)
            };
            terms.push((coeff, sym));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (coeff, sym)) in terms.iter().enumerate() {
            let neg = coeff.is_negative();
            let abs = coeff.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if sym.is_empty() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", sym)?;
            } else {
                write!(f, "{}*{}", abs, sym)?;
            }
        }
        Ok(())
    }
}

impl Serialize for TowerElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            radicands: &'a [i64],
            coords: BTreeMap<String, String>,
        }
        let mut coords = BTreeMap::new();
        for (mask, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                coords.insert(self.tower.key_for_mask(mask), c.to_string());
            }
        }
        Repr { radicands: &self.tower.radicands, coords }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TowerElem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            radicands: Vec<i64>,
            coords: BTreeMap<String, String>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let tower = TowerDesc::new(&repr.radicands).map_err(D::Error::custom)?;
        let mut e = TowerElem::zero(tower);
        for (key, val) in &repr.coords {
            let mask = e
                .tower
                .mask_for_key(key)
                .ok_or_else(|| D::Error::custom(format!("unknown coordinate key {key:?}")))?;
            let r: Rat = val
                .parse()
                .map_err(|_| D::Error::custom(format!("bad rational {val:?}")))?;
            e.coords[mask] = r;
        }
        Ok(e)
    }
}
