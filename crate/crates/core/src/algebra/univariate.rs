//! Univariate subroutines used by orbit analysis: squarefree factorization,
//! resultants in an auxiliary variable and rational root isolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::recpoly::RecPoly;
use super::scalar::Scalar;
use super::unipoly::UniPoly;
use super::AlgebraError;
use crate::{Poly1, Q};

/// Squarefree decomposition `p = unit * prod f_i^{m_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeFactors<C: Scalar> {
    pub unit: C,
    /// Monic, pairwise coprime, squarefree factors with multiplicities, in increasing multiplicity.
    pub factors: Vec<(UniPoly<C>, u32)>,
}

impl<C: Scalar> SquarefreeFactors<C> {
    pub fn expand(&self) -> UniPoly<C> {
        self.factors
            .iter()
            .fold(UniPoly::constant(self.unit.clone()), |acc, (f, m)| &acc * &f.pow(*m))
    }

    /// Factor of multiplicity `m`, or one.
    pub fn of_multiplicity(&self, m: u32) -> UniPoly<C> {
        self.factors
            .iter()
            .find(|(_, k)| *k == m)
            .map(|(f, _)| f.clone())
            .unwrap_or_else(UniPoly::one)
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.factors.iter().map(|(_, m)| *m).max().unwrap_or(0)
    }
}

/// Yun's algorithm.
pub fn squarefree_factor<C: Scalar>(p: &UniPoly<C>) -> Result<SquarefreeFactors<C>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let unit = p.lc();
    let f = p.monic();
    let mut factors = Vec::new();
    if f.is_constant() {
        return Ok(SquarefreeFactors { unit, factors });
    }
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.exact_div(&a0)?;
    let mut c = df.exact_div(&a0)?;
    let mut d = &c - &b.derivative();
    let mut m = 1;
    loop {
        let a = b.gcd(&d);
        if !a.is_constant() {
            factors.push((a.clone(), m));
        }
        b = b.exact_div(&a)?;
        if b.is_constant() {
            break;
        }
        c = d.exact_div(&a)?;
        d = &c - &b.derivative();
        m += 1;
    }
    Ok(SquarefreeFactors { unit, factors })
}

/// Resultant of two polynomials in an auxiliary variable `t` whose
/// coefficients are polynomials in `x`; `t` is eliminated.
pub fn resultant<C: Scalar>(p: &[UniPoly<C>], q: &[UniPoly<C>]) -> UniPoly<C> {
    RecPoly::resultant(
        &RecPoly::from_coeffs(p.to_vec()),
        &RecPoly::from_coeffs(q.to_vec()),
    )
}

/// Resultant `res_x(p, q - t r)` as a polynomial in `t` (the Rothstein–Trager
/// shape used for log-part residues and indicial equations).
pub fn resultant_linear_pencil<C: Scalar>(
    p: &UniPoly<C>,
    q: &UniPoly<C>,
    r: &UniPoly<C>,
) -> UniPoly<C> {
    let lift = |u: &UniPoly<C>| -> Vec<UniPoly<C>> {
        u.coeffs().iter().map(|c| UniPoly::constant(c.clone())).collect()
    };
    let n = q.coeffs().len().max(r.coeffs().len());
    let pencil: Vec<UniPoly<C>> = (0..n)
        .map(|k| UniPoly::from_coeffs(vec![q.coeff(k), -r.coeff(k)]))
        .collect();
    resultant(&lift(p), &pencil)
}

/// All rational roots with multiplicity, sorted ascending.
pub fn rational_roots(p: &Poly1) -> Result<Vec<Q>, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    let mut f = p.clone();
    // Zero roots first, so the trailing coefficient is nonzero below.
    while f.coeff(0).is_zero() && !f.is_constant() {
        out.push(Q::zero());
        f = UniPoly::from_coeffs(f.coeffs()[1..].to_vec());
    }
    if f.is_constant() {
        return Ok(out);
    }
    let ints = integer_coefficients(&f);
    let lead = ints.last().expect("nonconstant").abs();
    let trail = ints[0].abs();
    let (ps, qs) = (divisors(&trail)?, divisors(&lead)?);
    let mut candidates: Vec<Q> = Vec::new();
    for num in &ps {
        for den in &qs {
            if num.gcd(den).is_one() {
                let c = Q::new(num.clone(), den.clone());
                candidates.push(c.clone());
                candidates.push(-c);
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    for c in candidates {
        loop {
            if f.is_constant() || !f.eval(&c).is_zero() {
                break;
            }
            out.push(c.clone());
            f = f.exact_div(&UniPoly::linear_root(c.clone()))?;
        }
    }
    out.sort();
    Ok(out)
}

/// Clears denominators, returning primitive integer coefficients.
pub fn integer_coefficients(p: &Poly1) -> Vec<BigInt> {
    let l = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Q::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

const DIVISOR_LIMIT: u64 = 1 << 40;

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, AlgebraError> {
    let v = n
        .to_u64()
        .filter(|v| *v <= DIVISOR_LIMIT)
        .ok_or(AlgebraError::CoefficientTooLarge)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    out.sort();
    Ok(out)
}
