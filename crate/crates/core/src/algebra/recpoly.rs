//! Polynomials in a main variable with univariate polynomial coefficients.
//!
//! Used for bivariate gcd (main variable `y` over `Q[x]`) and for
//! resultants that eliminate one variable.

use super::scalar::Scalar;
use super::unipoly::UniPoly;

/// `c[0] + c[1] t + ... + c[n] t^n` with `c[k]` in `C[s]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RecPoly<C: Scalar> {
    coeffs: Vec<UniPoly<C>>,
}

impl<C: Scalar> RecPoly<C> {
    pub fn from_coeffs(mut coeffs: Vec<UniPoly<C>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[UniPoly<C>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> UniPoly<C> {
        self.coeffs.last().cloned().unwrap_or_else(UniPoly::zero)
    }

    fn scale(&self, c: &UniPoly<C>) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = UniPoly::zero();
        Self::from_coeffs(
            (0..n)
                .map(|k| {
                    let a = self.coeffs.get(k).unwrap_or(&z);
                    let b = other.coeffs.get(k).unwrap_or(&z);
                    a - b
                })
                .collect(),
        )
    }

    fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![UniPoly::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(coeffs)
    }

    /// Monic gcd of the coefficients.
    pub fn content(&self) -> UniPoly<C> {
        self.coeffs
            .iter()
            .fold(UniPoly::zero(), |g, c| g.gcd(c))
    }

    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        Self::from_coeffs(
            self.coeffs
                .iter()
                .map(|a| a.exact_div(&c).expect("content divides every coefficient"))
                .collect(),
        )
    }

    /// Pseudo-remainder of `self` by `d` in the main variable.
    pub fn prem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("nonzero divisor");
        let lc = d.lc();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lr = r.lc();
            r = r.scale(&lc).sub(&d.scale(&lr).shift(dr - dd));
        }
        r
    }

    /// Gcd via the primitive polynomial remainder sequence.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        let cont = a.content().gcd(&b.content());
        let (mut p, mut q) = (a.primitive_part(), b.primitive_part());
        if p.degree() < q.degree() {
            std::mem::swap(&mut p, &mut q);
        }
        while !q.is_zero() {
            let r = p.prem(&q);
            p = q;
            q = r.primitive_part();
        }
        if p.degree() == Some(0) {
            return Self::from_coeffs(vec![cont]);
        }
        p.primitive_part().scale(&cont)
    }

    /// Resultant with respect to the main variable, computed as the
    /// fraction-free (Bareiss) determinant of the Sylvester matrix.
    pub fn resultant(p: &Self, q: &Self) -> UniPoly<C> {
        let (m, n) = match (p.degree(), q.degree()) {
            (Some(m), Some(n)) => (m, n),
            _ => return UniPoly::zero(),
        };
        let size = m + n;
        if size == 0 {
            return UniPoly::one();
        }
        let mut mat = vec![vec![UniPoly::<C>::zero(); size]; size];
        for i in 0..n {
            for (k, c) in p.coeffs.iter().rev().enumerate() {
                mat[i][i + k] = c.clone();
            }
        }
        for i in 0..m {
            for (k, c) in q.coeffs.iter().rev().enumerate() {
                mat[n + i][i + k] = c.clone();
            }
        }
        bareiss_det(mat)
    }
}

/// Determinant over `C[s]` by fraction-free elimination.
pub(crate) fn bareiss_det<C: Scalar>(mut mat: Vec<Vec<UniPoly<C>>>) -> UniPoly<C> {
    let n = mat.len();
    let mut sign = false;
    let mut prev = UniPoly::one();
    for k in 0..n {
        if mat[k][k].is_zero() {
            match (k + 1..n).find(|&i| !mat[i][k].is_zero()) {
                Some(i) => {
                    mat.swap(k, i);
                    sign = !sign;
                }
                None => return UniPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&mat[k][k] * &mat[i][j]) - &(&mat[i][k] * &mat[k][j]);
                mat[i][j] = num.exact_div(&prev).expect("Bareiss step divides exactly");
            }
        }
        prev = mat[k][k].clone();
    }
    let det = mat[n - 1][n - 1].clone();
    if sign {
        -&det
    } else {
        det
    }
}
