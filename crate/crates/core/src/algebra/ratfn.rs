//! Reduced rational functions in `x, y` with verified homogeneity metadata.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bipoly::BiPoly;
use super::scalar::{inv, Scalar};
use super::uniratfn::UniRatFn;
use super::AlgebraError;

/// Homogeneity of a rational function, always recomputed from the reduced form.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Homogeneity {
    /// The zero function, homogeneous of every degree.
    Zero,
    Degree(i64),
    NotHomogeneous,
}

impl Homogeneity {
    /// Whether a function with this metadata is `d`-homogeneous.
    pub fn admits(&self, d: i64) -> bool {
        match self {
            Homogeneity::Zero => true,
            Homogeneity::Degree(k) => *k == d,
            Homogeneity::NotHomogeneous => false,
        }
    }
}

/// Which partial derivative to take.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Var {
    X,
    Y,
}

/// `num / den` with `gcd(num, den) = 1` and `den` of leading coefficient one.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn<C: Scalar> {
    num: BiPoly<C>,
    den: BiPoly<C>,
}

impl<C: Scalar> RatFn<C> {
    pub fn new(num: BiPoly<C>, den: BiPoly<C>) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let l = inv(&d.lc());
        if !l.is_one() {
            n = n.scale(&l);
            d = d.scale(&l);
        }
        Ok(Self { num: n, den: d })
    }

    pub fn from_poly(p: BiPoly<C>) -> Self {
        Self { num: p, den: BiPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(BiPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(BiPoly::one())
    }

    pub fn constant(c: C) -> Self {
        Self::from_poly(BiPoly::constant(c))
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(C::int(c))
    }

    pub fn x() -> Self {
        Self::from_poly(BiPoly::x())
    }

    pub fn y() -> Self {
        Self::from_poly(BiPoly::y())
    }

    pub fn num(&self) -> &BiPoly<C> {
        &self.num
    }

    pub fn den(&self) -> &BiPoly<C> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial `num / den` when `den` is constant.
    pub fn as_polynomial(&self) -> Option<BiPoly<C>> {
        let d = self.den.constant_value()?;
        Some(self.num.scale(&inv(&d)))
    }

    pub fn constant_value(&self) -> Option<C> {
        if self.den.is_constant() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn homogeneity(&self) -> Homogeneity {
        if self.is_zero() {
            return Homogeneity::Zero;
        }
        match (self.num.homogeneous_degree(), self.den.homogeneous_degree()) {
            (Some(a), Some(b)) => Homogeneity::Degree(a as i64 - b as i64),
            _ => Homogeneity::NotHomogeneous,
        }
    }

    /// `x f_x + y f_y - d f`, which vanishes exactly when `f` is `d`-homogeneous.
    pub fn euler_residual(&self, d: i64) -> Self {
        let x = Self::x();
        let y = Self::y();
        &(&(&x * &self.diff(Var::X)) + &(&y * &self.diff(Var::Y)))
            - &self.scale(&C::int(d))
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: i32) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(Self { num: base.num.pow(k), den: base.den.pow(k) }.renormalized())
    }

    fn renormalized(self) -> Self {
        let l = inv(&self.den.lc());
        if l.is_one() {
            self
        } else {
            Self { num: self.num.scale(&l), den: self.den.scale(&l) }
        }
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self { num: self.den.clone(), den: self.num.clone() }.renormalized())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if rhs.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn diff(&self, var: Var) -> Self {
        let d = |p: &BiPoly<C>| match var {
            Var::X => p.dx(),
            Var::Y => p.dy(),
        };
        let num = &(&d(&self.num) * &self.den) - &(&self.num * &d(&self.den));
        Self::new(num, &self.den * &self.den).expect("nonzero denominator")
    }

    pub fn dx(&self) -> Self {
        self.diff(Var::X)
    }

    pub fn dy(&self) -> Self {
        self.diff(Var::Y)
    }

    /// `f(sx, sy)`.
    pub fn substitute(&self, sx: &Self, sy: &Self) -> Result<Self, AlgebraError> {
        let n = eval_poly_rf(&self.num, sx, sy);
        let d = eval_poly_rf(&self.den, sx, sy);
        if d.is_zero() {
            return Err(AlgebraError::DegenerateSubstitution);
        }
        n.checked_div(&d)
    }

    pub fn eval(&self, x: &C, y: &C) -> Result<C, AlgebraError> {
        let d = self.den.eval(x, y);
        if d.is_zero() {
            return Err(AlgebraError::Pole);
        }
        Ok(self.num.eval(x, y) / d)
    }

    /// `f(x, 1)`.
    pub fn dehomogenize(&self) -> UniRatFn<C> {
        UniRatFn::new(self.num.at_y_one(), self.den.at_y_one())
            .expect("denominator of a homogeneous function survives y = 1")
    }

    /// `f(x, 1)` for a `d`-homogeneous `f`.
    pub fn dehomogenize_checked(&self, d: i64) -> Result<UniRatFn<C>, AlgebraError> {
        if !self.homogeneity().admits(d) {
            return Err(AlgebraError::NotHomogeneous { expected: d });
        }
        Ok(self.dehomogenize())
    }

    /// The unique `d`-homogeneous function with `f(x, 1) = g`, i.e. `y^d g(x/y)`.
    pub fn rehomogenize(g: &UniRatFn<C>, d: i64) -> Self {
        if g.is_zero() {
            return Self::zero();
        }
        let p = g.num().degree().unwrap_or(0) as u32;
        let q = g.den().degree().unwrap_or(0) as u32;
        let n = BiPoly::homogenize_from(g.num(), p);
        let m = BiPoly::homogenize_from(g.den(), q);
        let e = d - p as i64 + q as i64;
        let (n, m) = if e >= 0 {
            (n.shift(0, e as u32), m)
        } else {
            (n, m.shift(0, (-e) as u32))
        };
        Self::new(n, m).expect("nonzero denominator")
    }

    /// Rescales the numerator to leading coefficient one.
    pub fn numerator_monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&inv(&self.num.lc()))
    }

    /// `Some(c)` when `self = c * other` for a constant `c`.
    pub fn ratio_constant(&self, other: &Self) -> Option<C> {
        if other.is_zero() {
            return self.is_zero().then(C::zero);
        }
        self.checked_div(other).ok()?.constant_value()
    }

    pub fn fmt_vars(&self, vx: &str, vy: &str) -> String {
        let n = self.num.fmt_vars(vx, vy);
        if self.den.constant_value().is_some_and(|c| c.is_one()) {
            n
        } else {
            format!("({})/({})", n, self.den.fmt_vars(vx, vy))
        }
    }
}

fn eval_poly_rf<C: Scalar>(p: &BiPoly<C>, sx: &RatFn<C>, sy: &RatFn<C>) -> RatFn<C> {
    // Bring every term over the common denominator den(sx)^dx * den(sy)^dy.
    let dxm = p.degree_x().unwrap_or(0);
    let dym = p.degree_y().unwrap_or(0);
    let mut nx = vec![BiPoly::one()];
    let mut dx = vec![BiPoly::one()];
    for k in 0..dxm as usize {
        nx.push(&nx[k] * &sx.num);
        dx.push(&dx[k] * &sx.den);
    }
    let mut ny = vec![BiPoly::one()];
    let mut dy = vec![BiPoly::one()];
    for k in 0..dym as usize {
        ny.push(&ny[k] * &sy.num);
        dy.push(&dy[k] * &sy.den);
    }
    let mut acc = BiPoly::zero();
    for (m, c) in p.terms() {
        let (i, j) = (m.x as usize, m.y as usize);
        let t = &(&(&nx[i] * &dx[dxm as usize - i]) * &ny[j]) * &dy[dym as usize - j];
        acc = &acc + &t.scale(c);
    }
    RatFn::new(acc, &dx[dxm as usize] * &dy[dym as usize]).expect("nonzero denominator")
}

impl<C: Scalar> fmt::Display for RatFn<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_vars("x", "y"))
    }
}

impl<C: Scalar> std::str::FromStr for RatFn<C> {
    type Err = super::parse::ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        super::parse::parse_rf(s)
    }
}

impl<C: Scalar> Serialize for RatFn<C> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de, C: Scalar> Deserialize<'de> for RatFn<C> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl<C: Scalar> Add for &RatFn<C> {
    type Output = RatFn<C>;
    fn add(self, rhs: Self) -> RatFn<C> {
        if self.den == rhs.den {
            return RatFn::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero");
        }
        RatFn::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominator")
    }
}

impl<C: Scalar> Sub for &RatFn<C> {
    type Output = RatFn<C>;
    fn sub(self, rhs: Self) -> RatFn<C> {
        self + &(-rhs)
    }
}

impl<C: Scalar> Mul for &RatFn<C> {
    type Output = RatFn<C>;
    fn mul(self, rhs: Self) -> RatFn<C> {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        RatFn::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

/// Panics on a zero divisor; use [`RatFn::checked_div`] for fallible division.
impl<C: Scalar> Div for &RatFn<C> {
    type Output = RatFn<C>;
    fn div(self, rhs: Self) -> RatFn<C> {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

impl<C: Scalar> Neg for &RatFn<C> {
    type Output = RatFn<C>;
    fn neg(self) -> RatFn<C> {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C: Scalar> $tr for RatFn<C> {
            type Output = RatFn<C>;
            fn $m(self, rhs: Self) -> RatFn<C> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl<C: Scalar> Neg for RatFn<C> {
    type Output = RatFn<C>;
    fn neg(self) -> RatFn<C> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Q, Rf};
    use num_traits::Signed;

    fn rf(s: &str) -> Rf {
        s.parse().unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_reduces() {
        assert_eq!(&rf("x/y") * &rf("y/x"), Rf::one());
        assert!((&rf("(x-y)^2") - &rf("x^2 - 2*x*y + y^2")).is_zero());
        let f = rf("(x^2 - y^2)/(x - y)");
        assert_eq!(f, rf("x + y"));
        assert_eq!(f.homogeneity(), Homogeneity::Degree(1));
        // Oracle: multiply back.
        assert_eq!(&f * &rf("x - y"), rf("x^2 - y^2"));
        assert_eq!(rf("x").checked_div(&Rf::zero()), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn derivatives() {
        assert_eq!(rf("x - y").dx(), Rf::one());
        assert_eq!(rf("x^2/y").dy(), rf("-x^2/y^2"));
        let w = rf("x^-2*(x-y)*y^2");
        let d = w.dx();
        assert_eq!(d, rf("(2*y - x)*y^2/x^3"));
        // Oracle: central difference at a few rational points.
        for (a, b) in [(3, 5), (-2, 7), (5, -1)] {
            let (x, y) = (q(a, 1), q(b, 1));
            let h = q(1, 1_000_000);
            let fd = (w.eval(&(&x + &h), &y).unwrap() - w.eval(&(&x - &h), &y).unwrap())
                / (q(2, 1) * h.clone());
            let err = (fd - d.eval(&x, &y).unwrap()).abs();
            assert!(err < q(1, 1_000_000), "{a},{b}");
        }
    }

    #[test]
    fn substitution() {
        let f = rf("x - y");
        let g = f.substitute(&rf("x"), &rf("y/(y+1)")).unwrap();
        assert_eq!(g, rf("(x*y + x - y)/(y + 1)"));
        for (a, b) in [(1, 2), (3, -5), (-7, 4)] {
            let (x, y) = (q(a, 3), q(b, 2));
            let s = &y / &(&y + &q(1, 1));
            assert_eq!(g.eval(&x, &y).unwrap(), f.eval(&x, &s).unwrap());
        }
        let h = rf("(x^3 + y)/(x - 2*y)");
        assert_eq!(h.substitute(&rf("x"), &rf("y")).unwrap(), h);
        // z is represented by a constant here.
        let z = rf("3/7");
        let scaled = rf("x^2/y").substitute(&(&rf("x") * &z), &(&rf("y") * &z)).unwrap();
        assert_eq!(scaled, &z * &rf("x^2/y"));
        assert_eq!(
            rf("1/x").substitute(&Rf::zero(), &rf("y")),
            Err(AlgebraError::DegenerateSubstitution)
        );
    }

    #[test]
    fn homogeneity_examples() {
        assert_eq!(rf("(x-y)^2").homogeneity(), Homogeneity::Degree(2));
        let w = rf("x^-2*(x-y)*y^2");
        assert_eq!(w.homogeneity(), Homogeneity::Degree(1));
        assert!(w.euler_residual(1).is_zero());
        assert_eq!(rf("x + y^2").homogeneity(), Homogeneity::NotHomogeneous);
        assert!(!rf("x + y^2").euler_residual(1).is_zero());
        assert!(!rf("x + y^2").euler_residual(2).is_zero());
    }

    #[test]
    fn dehomogenize_examples() {
        let p = rf("2*x^2 - 3*x*y");
        let g = p.dehomogenize_checked(2).unwrap();
        assert_eq!(g.to_string(), "2*x^2 - 3*x");
        assert_eq!(Rf::rehomogenize(&g, 2), p);
        let lin = crate::Rf1::from_poly(crate::Poly1::from_i64s(&[-1, 1]));
        assert_eq!(Rf::rehomogenize(&lin, 1), rf("x - y"));
        let w = rf("x^-2*(x-y)*y^2");
        let g = w.dehomogenize_checked(1).unwrap();
        assert_eq!(g.to_string(), "(x - 1)/(x^2)");
        assert_eq!(Rf::rehomogenize(&g, 1), w);
        assert_eq!(
            rf("x + y^2").dehomogenize_checked(1),
            Err(AlgebraError::NotHomogeneous { expected: 1 })
        );
    }

    #[test]
    fn serde_uses_expression_strings() {
        let f = rf("(3*x - y)*y^3/(x - y)^3");
        let s = serde_json::to_string(&f).unwrap();
        let back: Rf = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
