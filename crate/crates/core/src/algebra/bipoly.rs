//! Sparse bivariate polynomials in `x, y`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::recpoly::RecPoly;
use super::scalar::{inv, Scalar};
use super::unipoly::UniPoly;
use super::AlgebraError;

/// Exponent pair `x^x y^y`, ordered graded-lexicographically with `x > y`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    pub x: u32,
    pub y: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { x: 0, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn total(&self) -> u32 {
        self.x + self.y
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then(self.x.cmp(&other.x))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial stored as a map from exponents to nonzero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BiPoly<C: Scalar> {
    terms: BTreeMap<Mono, C>,
}

impl<C: Scalar> Default for BiPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Scalar> BiPoly<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn term(c: C, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::new(i, j), c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::term(C::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::term(C::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Mono::ONE)
    }

    pub fn constant_value(&self) -> Option<C> {
        if self.is_zero() {
            Some(C::zero())
        } else if self.is_constant() {
            self.terms.get(&Mono::ONE).cloned()
        } else {
            None
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> C {
        self.terms.get(&Mono::new(i, j)).cloned().unwrap_or_else(C::zero)
    }

    /// Leading term under graded-lex.
    pub fn lead(&self) -> Option<(Mono, C)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c.clone()))
    }

    pub fn lc(&self) -> C {
        self.lead().map(|(_, c)| c).unwrap_or_else(C::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Mono::total).max()
    }

    pub fn min_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Mono::total).min()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.x).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.y).max()
    }

    /// Degree `d` when every term has total degree `d`; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.total_degree()?;
        (self.min_total_degree()? == d).then_some(d)
    }

    /// Sum of the terms of total degree `k`.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total() == k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (*m, v.clone() * c.clone()))
                .collect(),
        }
    }

    /// Multiplies by `x^i y^j`.
    pub fn shift(&self, i: u32, j: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (Mono::new(m.x + i, m.y + j), v.clone()))
                .collect(),
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&inv(&self.lc()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(m, _)| m.x > 0).map(|(m, c)| {
            (Mono::new(m.x - 1, m.y), c.clone() * C::int(m.x as i64))
        }))
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(m, _)| m.y > 0).map(|(m, c)| {
            (Mono::new(m.x, m.y - 1), c.clone() * C::int(m.y as i64))
        }))
    }

    pub fn eval(&self, x: &C, y: &C) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..m.x {
                t = t * x.clone();
            }
            for _ in 0..m.y {
                t = t * y.clone();
            }
            acc = acc + t;
        }
        acc
    }

    /// Evaluates with any ring that the coefficients map into.
    pub fn eval_with<T, F>(&self, x: T, y: T, lift: F) -> T
    where
        T: Clone + num_traits::One + num_traits::Zero + Mul<Output = T> + Add<Output = T>,
        F: Fn(&C) -> T,
    {
        let max_x = self.degree_x().unwrap_or(0) as usize;
        let max_y = self.degree_y().unwrap_or(0) as usize;
        let mut px = vec![T::one()];
        for k in 0..max_x {
            px.push(px[k].clone() * x.clone());
        }
        let mut py = vec![T::one()];
        for k in 0..max_y {
            py.push(py[k].clone() * y.clone());
        }
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            acc = acc + lift(c) * px[m.x as usize].clone() * py[m.y as usize].clone();
        }
        acc
    }

    /// `p(x, 1)`.
    pub fn at_y_one(&self) -> UniPoly<C> {
        let n = self.degree_x().map(|d| d as usize + 1).unwrap_or(0);
        let mut cs = vec![C::zero(); n];
        for (m, c) in &self.terms {
            cs[m.x as usize] = cs[m.x as usize].clone() + c.clone();
        }
        UniPoly::from_coeffs(cs)
    }

    /// `y^d p(x/y)` for `d >= deg p`.
    pub fn homogenize_from(p: &UniPoly<C>, d: u32) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(k, c)| {
            (Mono::new(k as u32, d - k as u32), c.clone())
        }))
    }

    /// Embeds a univariate polynomial in `x`.
    pub fn from_uni_x(p: &UniPoly<C>) -> Self {
        Self::from_terms(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| (Mono::new(k as u32, 0), c.clone())),
        )
    }

    /// Embeds a univariate polynomial as a polynomial in `y`.
    pub fn from_uni_y(p: &UniPoly<C>) -> Self {
        Self::from_terms(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| (Mono::new(0, k as u32), c.clone())),
        )
    }

    /// View as a polynomial in `y` with coefficients in `Q[x]`.
    pub fn to_rec_y(&self) -> RecPoly<C> {
        let n = self.degree_y().map(|d| d as usize + 1).unwrap_or(0);
        let mut rows: Vec<Vec<C>> = vec![Vec::new(); n];
        for (m, c) in &self.terms {
            let row = &mut rows[m.y as usize];
            if row.len() <= m.x as usize {
                row.resize(m.x as usize + 1, C::zero());
            }
            row[m.x as usize] = c.clone();
        }
        RecPoly::from_coeffs(rows.into_iter().map(UniPoly::from_coeffs).collect())
    }

    pub fn from_rec_y(r: &RecPoly<C>) -> Self {
        let mut terms = BTreeMap::new();
        for (j, cy) in r.coeffs().iter().enumerate() {
            for (i, c) in cy.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    terms.insert(Mono::new(i as u32, j as u32), c.clone());
                }
            }
        }
        Self { terms }
    }

    /// View as a polynomial in `x` with coefficients in `Q[y]`.
    pub fn to_rec_x(&self) -> RecPoly<C> {
        self.swap_xy().to_rec_y()
    }

    pub fn swap_xy(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Mono::new(m.y, m.x), c.clone()))
                .collect(),
        }
    }

    /// Greatest common divisor, normalized to leading coefficient one.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Self::one();
        }
        // Pull out the common monomial factor first; it keeps the PRS small.
        let mx = |p: &Self| p.terms.keys().map(|m| m.x).min().unwrap_or(0);
        let my = |p: &Self| p.terms.keys().map(|m| m.y).min().unwrap_or(0);
        let (ax, ay, bx, by) = (mx(self), my(self), mx(other), my(other));
        let a = self.unshift(ax, ay);
        let b = other.unshift(bx, by);
        let g = RecPoly::gcd(&a.to_rec_y(), &b.to_rec_y());
        Self::from_rec_y(&g).shift(ax.min(bx), ay.min(by)).monic()
    }

    fn unshift(&self, i: u32, j: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (Mono::new(m.x - i, m.y - j), v.clone()))
                .collect(),
        }
    }

    /// Exact quotient; errors when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Result<Self, AlgebraError> {
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if let Some(c) = d.constant_value() {
            return Ok(self.scale(&inv(&c)));
        }
        let (dm, dc) = d.lead().expect("nonzero divisor");
        let dc_inv = inv(&dc);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((m, c)) = rem.lead() {
            if m.x < dm.x || m.y < dm.y {
                return Err(AlgebraError::InexactDivision);
            }
            let t = Self::term(c * dc_inv.clone(), m.x - dm.x, m.y - dm.y);
            rem = &rem - &(&t * d);
            quot = &quot + &t;
        }
        Ok(quot)
    }

    /// Substitutes univariate polynomials in a fresh variable for `x` and `y`.
    pub fn compose_uni(&self, sx: &UniPoly<C>, sy: &UniPoly<C>) -> UniPoly<C> {
        let mut acc = UniPoly::zero();
        for (m, c) in &self.terms {
            let t = (&sx.pow(m.x) * &sy.pow(m.y)).scale(c);
            acc = &acc + &t;
        }
        acc
    }

    pub fn fmt_vars(&self, vx: &str, vy: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (m, c) in self.terms.iter().rev() {
            let mut parts = Vec::new();
            match m.x {
                0 => {}
                1 => parts.push(vx.to_string()),
                k => parts.push(format!("{vx}^{k}")),
            }
            match m.y {
                0 => {}
                1 => parts.push(vy.to_string()),
                k => parts.push(format!("{vy}^{k}")),
            }
            super::parse::push_term(&mut out, c, &parts.join("*"));
        }
        out
    }
}

impl<C: Scalar> fmt::Display for BiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_vars("x", "y"))
    }
}

impl<C: Scalar> Add for &BiPoly<C> {
    type Output = BiPoly<C>;
    fn add(self, rhs: Self) -> BiPoly<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<C: Scalar> Sub for &BiPoly<C> {
    type Output = BiPoly<C>;
    fn sub(self, rhs: Self) -> BiPoly<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<C: Scalar> Mul for &BiPoly<C> {
    type Output = BiPoly<C>;
    fn mul(self, rhs: Self) -> BiPoly<C> {
        let mut out = BiPoly::zero();
        for (ma, a) in &self.terms {
            for (mb, b) in &rhs.terms {
                out.add_term(Mono::new(ma.x + mb.x, ma.y + mb.y), a.clone() * b.clone());
            }
        }
        out
    }
}

impl<C: Scalar> Neg for &BiPoly<C> {
    type Output = BiPoly<C>;
    fn neg(self) -> BiPoly<C> {
        self.scale(&-C::one())
    }
}
