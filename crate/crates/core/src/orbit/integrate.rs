//! Integration of univariate rational functions: Hermite reduction for the
//! rational part and the resultant method for the logarithmic part.

use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::{rational_roots, resultant_linear_pencil, AlgebraError};
use crate::{Poly1, Q, Rf1};

/// One logarithmic term of an antiderivative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LogTerm {
    /// `c · log v` with rational `c`.
    Rational { coeff: Q, arg: Poly1 },
    /// `Σ_{R(c)=0} c · log gcd(arg, A − c D')` over the irrational roots of `residues`.
    Algebraic { residues: Poly1, arg: Poly1 },
}

impl Serialize for LogTerm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LogTerm", 3)?;
        match self {
            LogTerm::Rational { coeff, arg } => {
                st.serialize_field("kind", "rational")?;
                st.serialize_field("coeff", &coeff.to_string())?;
                st.serialize_field("arg", &arg.to_string())?;
            }
            LogTerm::Algebraic { residues, arg } => {
                st.serialize_field("kind", "algebraic")?;
                st.serialize_field("coeff", &residues.fmt_var("t"))?;
                st.serialize_field("arg", &arg.to_string())?;
            }
        }
        st.end()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegralResult {
    pub rational_part: Rf1,
    pub log_terms: Vec<LogTerm>,
}

impl IntegralResult {
    pub fn all_rational(&self) -> bool {
        self.log_terms.iter().all(|t| matches!(t, LogTerm::Rational { .. }))
    }

    /// Rational residues `(v, c)`; `None` if some residue is irrational.
    pub fn rational_residues(&self) -> Option<Vec<(Poly1, Q)>> {
        self.log_terms
            .iter()
            .map(|t| match t {
                LogTerm::Rational { coeff, arg } => Some((arg.clone(), coeff.clone())),
                LogTerm::Algebraic { .. } => None,
            })
            .collect()
    }

    /// Derivative of the antiderivative; `None` with irrational residues.
    pub fn derivative(&self) -> Option<Rf1> {
        let mut acc = self.rational_part.derivative();
        for (v, c) in self.rational_residues()? {
            let t = Rf1::new(v.derivative(), v).expect("nonzero argument").scale(&c);
            acc = &acc + &t;
        }
        Some(acc)
    }
}

fn integrate_poly(p: &Poly1) -> Poly1 {
    let mut cs = vec![Q::zero()];
    for (k, c) in p.coeffs().iter().enumerate() {
        cs.push(c / Q::from_integer((k as i64 + 1).into()));
    }
    Poly1::from_coeffs(cs)
}

/// Returns `(g, a, ds)` with `∫ f = g + ∫ a/ds` and `ds` squarefree.
fn hermite_reduce(a: &Poly1, d: &Poly1) -> Result<(Rf1, Poly1, Poly1), AlgebraError> {
    let mut a = a.clone();
    let mut g = Rf1::zero();
    let mut dm = d.gcd(&d.derivative());
    let ds = d.exact_div(&dm)?;
    while dm.degree().unwrap_or(0) > 0 {
        let dm2 = dm.gcd(&dm.derivative());
        let dms = dm.exact_div(&dm2)?;
        let lhs = -&(&ds * &dm.derivative()).exact_div(&dm)?;
        let (b, c) = Poly1::solve_bezout(&lhs, &dms, &a)?;
        a = &c - &(&b.derivative() * &ds).exact_div(&dms)?;
        g = &g + &Rf1::new(b, dm.clone())?;
        dm = dm2;
    }
    Ok((g, a, ds))
}

/// `∫ a/d` for squarefree `d`, `deg a < deg d`.
fn log_part(a: &Poly1, d: &Poly1) -> Result<Vec<LogTerm>, AlgebraError> {
    if a.is_zero() {
        return Ok(Vec::new());
    }
    let dd = d.derivative();
    let r = resultant_linear_pencil(d, a, &dd);
    let mut roots = rational_roots(&r)?;
    roots.dedup();
    let mut rest = r.clone();
    let mut remaining = d.monic();
    let mut out = Vec::new();
    for c in roots {
        let v = d.gcd(&(a - &dd.scale(&c)));
        if v.is_constant() {
            continue;
        }
        while rest.eval(&c).is_zero() {
            rest = rest.exact_div(&Poly1::linear_root(c.clone()))?;
        }
        remaining = remaining.exact_div(&v)?;
        if !c.is_zero() {
            out.push(LogTerm::Rational { coeff: c, arg: v });
        }
    }
    if !remaining.is_constant() {
        out.push(LogTerm::Algebraic { residues: rest.monic(), arg: remaining });
    }
    Ok(out)
}

/// Antiderivative of a univariate rational function.
pub fn hermite_logpart(f: &Rf1) -> Result<IntegralResult, AlgebraError> {
    let (poly, proper) = f.split_polynomial();
    let mut rational = Rf1::from_poly(integrate_poly(&poly));
    if proper.is_zero() {
        return Ok(IntegralResult { rational_part: rational, log_terms: Vec::new() });
    }
    let (g, a, ds) = hermite_reduce(proper.num(), proper.den())?;
    rational = &rational + &g;
    let (extra, a) = a.div_rem(&ds)?;
    if !extra.is_zero() {
        rational = &rational + &Rf1::from_poly(integrate_poly(&extra));
    }
    let log_terms = log_part(&a, &ds)?;
    Ok(IntegralResult { rational_part: rational, log_terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> Poly1 {
        Poly1::from_i64s(cs)
    }

    fn r(n: &[i64], d: &[i64]) -> Rf1 {
        Rf1::new(p(n), p(d)).unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn pure_hermite() {
        let g = r(&[2], &[1, -2, 1]);
        let res = hermite_logpart(&g).unwrap();
        assert_eq!(res.rational_part, r(&[-2], &[-1, 1]));
        assert!(res.log_terms.is_empty());
        assert_eq!(res.derivative().unwrap(), g);
    }

    #[test]
    fn partial_fraction_residues() {
        // (2 - x)/(x(x - 1)) = -2/x + 1/(x - 1), by clearing denominators:
        // -2(x - 1) + x = 2 - x.
        let g = r(&[2, -1], &[0, -1, 1]);
        let res = hermite_logpart(&g).unwrap();
        assert!(res.rational_part.is_zero());
        let mut got = res.rational_residues().unwrap();
        got.sort_by(|a, b| a.1.cmp(&b.1));
        assert_eq!(got, vec![(p(&[0, 1]), q(-2, 1)), (p(&[-1, 1]), q(1, 1))]);
        assert_eq!(res.derivative().unwrap(), g);
    }

    #[test]
    fn complex_residues_are_marked() {
        let res = hermite_logpart(&r(&[1], &[1, 0, 1])).unwrap();
        assert!(!res.all_rational());
        match &res.log_terms[..] {
            // Residues ±i/2 are the roots of t^2 + 1/4.
            [LogTerm::Algebraic { residues, arg }] => {
                assert_eq!(residues, &Poly1::from_coeffs(vec![q(1, 4), q(0, 1), q(1, 1)]));
                assert_eq!(arg, &p(&[1, 0, 1]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mixed_rational_and_logs() {
        // x^2 + 3/(x+1)^3 + 5/(x-2) - 1/(x^2 - 2)
        let parts = [
            Rf1::from_poly(p(&[0, 0, 1])),
            r(&[3], &[1, 3, 3, 1]),
            r(&[5], &[-2, 1]),
            r(&[-1], &[-2, 0, 1]),
        ];
        let g = parts.iter().fold(Rf1::zero(), |acc, t| &acc + t);
        let res = hermite_logpart(&g).unwrap();
        // rational part x^3/3 - 3/(2(x+1)^2)
        let expect = &Rf1::from_poly(Poly1::from_coeffs(vec![q(0, 1), q(0, 1), q(0, 1), q(1, 3)]))
            + &r(&[-3], &[2, 4, 2]);
        assert_eq!(res.rational_part, expect);
        assert_eq!(res.log_terms.len(), 2, "{:?}", res.log_terms);
        assert!(res.log_terms.contains(&LogTerm::Rational { coeff: q(5, 1), arg: p(&[-2, 1]) }));
    }
}
