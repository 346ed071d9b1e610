//! Polynomials in an auxiliary unknown `t` with rational-function
//! coefficients in `x, y`. Used for implicitly defined algebraic functions.

use std::fmt;

use super::{AlgebraError, BiPoly, RatFn, Scalar};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgPoly<C: Scalar> {
    /// `coeffs[k]` multiplies `t^k`; no trailing zeros.
    coeffs: Vec<RatFn<C>>,
}

impl<C: Scalar> AlgPoly<C> {
    pub fn new(mut coeffs: Vec<RatFn<C>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: RatFn<C>) -> Self {
        Self::new(vec![c])
    }

    /// The unknown `t` itself.
    pub fn t() -> Self {
        Self::new(vec![RatFn::zero(), RatFn::one()])
    }

    /// `p(t, s)`: the first variable of `p` becomes the unknown, the second is replaced by `s`.
    pub fn from_first_variable(p: &BiPoly<C>, s: &RatFn<C>) -> Self {
        let mut coeffs: Vec<RatFn<C>> = Vec::new();
        for (m, c) in p.terms() {
            let k = m.x as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, RatFn::zero());
            }
            let term = s.pow(m.y as i32).expect("nonnegative power").scale(c);
            coeffs[k] = &coeffs[k] + &term;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[RatFn<C>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> RatFn<C> {
        self.coeffs.last().cloned().unwrap_or_else(RatFn::zero)
    }

    pub fn scale(&self, c: &RatFn<C>) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `∂/∂t`.
    pub fn dt(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&C::int(k as i64)))
                .collect(),
        )
    }

    /// Partial derivative in `x` with `t` held fixed.
    pub fn dx(&self) -> Self {
        Self::new(self.coeffs.iter().map(RatFn::dx).collect())
    }

    /// Partial derivative in `y` with `t` held fixed.
    pub fn dy(&self) -> Self {
        Self::new(self.coeffs.iter().map(RatFn::dy).collect())
    }

    /// Substitutes a rational function for `t`.
    pub fn eval(&self, t: &RatFn<C>) -> RatFn<C> {
        self.coeffs.iter().rev().fold(RatFn::zero(), |acc, c| &(&acc * t) + c)
    }

    /// Evaluates at a numeric point; `None` at a pole of a coefficient.
    pub fn eval_at(&self, t: &C, x: &C, y: &C) -> Option<C> {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.eval(x, y).ok()?;
        }
        Some(acc)
    }

    /// Remainder on division by `d`.
    pub fn rem(&self, d: &Self) -> Result<Self, AlgebraError> {
        let dd = d.degree().ok_or(AlgebraError::DivisionByZero)?;
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let q = r[k].checked_div(&lc)?;
            for (i, c) in d.coeffs.iter().enumerate() {
                r[k - dd + i] = &r[k - dd + i] - &(&q * c);
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Ok(Self::new(r))
    }

    /// Clears denominators and removes the polynomial content, so that all
    /// coefficients are coprime polynomials with a monic-normalized leading one.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.coeffs.iter().fold(BiPoly::one(), |acc, c| {
            let g = acc.gcd(c.den());
            (&acc * c.den()).exact_div(&g).expect("gcd divides")
        });
        let nums: Vec<BiPoly<C>> = self
            .coeffs
            .iter()
            .map(|c| &l.exact_div(c.den()).expect("lcm") * c.num())
            .collect();
        let content = nums.iter().fold(BiPoly::zero(), |g, p| g.gcd(p));
        let lead = nums.last().expect("nonzero").exact_div(&content).expect("content").lc();
        let inv = C::one() / lead;
        Self::new(
            nums.iter()
                .map(|p| RatFn::from_poly(p.exact_div(&content).expect("content").scale(&inv)))
                .collect(),
        )
    }

    pub fn fmt_var(&self, t: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let pow = match k {
                0 => String::new(),
                1 => t.to_string(),
                _ => format!("{t}^{k}"),
            };
            parts.push(match (k, c.constant_value()) {
                (0, _) => format!("({c})"),
                (_, Some(v)) if v == C::one() => pow,
                _ => format!("({c})*{pow}"),
            });
        }
        parts.join(" + ")
    }
}

impl<C: Scalar> fmt::Display for AlgPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("t"))
    }
}

impl<C: Scalar> std::ops::Add for &AlgPoly<C> {
    type Output = AlgPoly<C>;
    fn add(self, rhs: Self) -> AlgPoly<C> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = RatFn::zero();
        AlgPoly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&z) + rhs.coeffs.get(k).unwrap_or(&z))
                .collect(),
        )
    }
}

impl<C: Scalar> std::ops::Sub for &AlgPoly<C> {
    type Output = AlgPoly<C>;
    fn sub(self, rhs: Self) -> AlgPoly<C> {
        self + &rhs.scale(&RatFn::from_i64(-1))
    }
}

impl<C: Scalar> std::ops::Mul for &AlgPoly<C> {
    type Output = AlgPoly<C>;
    fn mul(self, rhs: Self) -> AlgPoly<C> {
        if self.is_zero() || rhs.is_zero() {
            return AlgPoly::zero();
        }
        let mut out = vec![RatFn::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        AlgPoly::new(out)
    }
}
