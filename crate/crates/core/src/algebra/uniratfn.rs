//! Reduced univariate rational functions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::{inv, Scalar};
use super::unipoly::UniPoly;
use super::AlgebraError;

/// `num / den` in lowest terms with monic `den`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UniRatFn<C: Scalar> {
    num: UniPoly<C>,
    den: UniPoly<C>,
}

impl<C: Scalar> UniRatFn<C> {
    pub fn new(num: UniPoly<C>, den: UniPoly<C>) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let n = num.exact_div(&g)?;
        let d = den.exact_div(&g)?;
        let l = inv(&d.lc());
        Ok(Self { num: n.scale(&l), den: d.scale(&l) })
    }

    pub fn from_poly(p: UniPoly<C>) -> Self {
        Self { num: p, den: UniPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(UniPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(UniPoly::one())
    }

    pub fn num(&self) -> &UniPoly<C> {
        &self.num
    }

    pub fn den(&self) -> &UniPoly<C> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(n, &self.den * &self.den).expect("nonzero denominator")
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if rhs.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn eval(&self, x: &C) -> Result<C, AlgebraError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(AlgebraError::Pole);
        }
        Ok(self.num.eval(x) / d)
    }

    /// Splits into polynomial part and proper fraction.
    pub fn split_polynomial(&self) -> (UniPoly<C>, Self) {
        let (q, r) = self.num.div_rem(&self.den).expect("nonzero denominator");
        (q, Self { num: r, den: self.den.clone() })
    }
}

impl<C: Scalar> fmt::Display for UniRatFn<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.constant_value_is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<C: Scalar> UniPoly<C> {
    fn constant_value_is_one(&self) -> bool {
        self.is_constant() && self.coeff(0).is_one()
    }
}

impl<C: Scalar> Add for &UniRatFn<C> {
    type Output = UniRatFn<C>;
    fn add(self, rhs: Self) -> UniRatFn<C> {
        UniRatFn::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominator")
    }
}

impl<C: Scalar> Sub for &UniRatFn<C> {
    type Output = UniRatFn<C>;
    fn sub(self, rhs: Self) -> UniRatFn<C> {
        self + &(-rhs)
    }
}

impl<C: Scalar> Mul for &UniRatFn<C> {
    type Output = UniRatFn<C>;
    fn mul(self, rhs: Self) -> UniRatFn<C> {
        UniRatFn::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl<C: Scalar> Neg for &UniRatFn<C> {
    type Output = UniRatFn<C>;
    fn neg(self) -> UniRatFn<C> {
        UniRatFn { num: -&self.num, den: self.den.clone() }
    }
}
