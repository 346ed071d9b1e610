//! Floating-point expression trees with branch-tracked radicals.
//!
//! Every rational power `r^(p/q)` remembers the `q`-th root it took last time
//! and picks the candidate nearest to it, so a value is defined by
//! continuation in `z` from its anchor at `z = 0`.

use std::fmt;

use num_complex::Complex64;

use super::NumericError;
use crate::algebra::Scalar;
use crate::{Poly, Rf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sym {
    X,
    Y,
    Z,
    W,
    T,
}

/// Values of the free variables.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Env {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
    pub w: Complex64,
    pub t: Complex64,
}

impl Env {
    pub fn real(x: f64, y: f64, z: f64) -> Self {
        Self { x: x.into(), y: y.into(), z: z.into(), ..Default::default() }
    }

    fn get(&self, s: Sym) -> Complex64 {
        match s {
            Sym::X => self.x,
            Sym::Y => self.y,
            Sym::Z => self.z,
            Sym::W => self.w,
            Sym::T => self.t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Branch {
    /// Continued from the root nearest `anchor` at `z = 0`.
    Continued { anchor: Complex64 },
    /// Real root of a real radicand: nonnegative for even order.
    Real,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Sym),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Powi(Box<Expr>, i32),
    /// `arg^(p/q)`; nodes sharing an `id` share their branch.
    Root { arg: Box<Expr>, p: i32, q: u32, id: usize, branch: Branch },
}

/// Previous `q`-th roots, indexed by radical id.
pub type BranchState = Vec<Option<Complex64>>;

impl Expr {
    pub fn parse(s: &str) -> Result<Self, NumericError> {
        let mut p = Parser { toks: tokenize(s)?, pos: 0, next_id: 0 };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(NumericError::Parse(format!("trailing input in {s:?}")));
        }
        Ok(e)
    }

    pub fn var(s: Sym) -> Self {
        Expr::Var(s)
    }

    pub fn c(v: f64) -> Self {
        Expr::Const(v)
    }

    /// `p(sx, sy)` for an exact polynomial.
    pub fn from_poly(p: &Poly, sx: &Expr, sy: &Expr) -> Self {
        let mut acc = Expr::Const(0.0);
        for (m, c) in p.terms() {
            let term = Expr::Const(c.to_f64_lossy()) * sx.clone().powi(m.x as i32) * sy.clone().powi(m.y as i32);
            acc = acc + term;
        }
        acc
    }

    /// `f(sx, sy)` for an exact rational function.
    pub fn from_rf(f: &Rf, sx: &Expr, sy: &Expr) -> Self {
        Expr::from_poly(f.num(), sx, sy) / Expr::from_poly(f.den(), sx, sy)
    }

    pub fn powi(self, k: i32) -> Self {
        match k {
            0 => Expr::Const(1.0),
            1 => self,
            _ => Expr::Powi(Box::new(self), k),
        }
    }

    /// Number of branch slots needed by [`Expr::eval`].
    pub fn branch_slots(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |e| {
            if let Expr::Root { id, .. } = e {
                n = n.max(id + 1);
            }
        });
        n
    }

    pub fn has_radicals(&self) -> bool {
        self.branch_slots() > 0
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Neg(a) | Expr::Powi(a, _) | Expr::Root { arg: a, .. } => a.visit(f),
        }
    }

    /// Renumbers radicals starting at `base`, so independent expressions can share a state.
    pub fn offset_ids(&self, base: usize) -> Self {
        self.map_roots(&|arg, p, q, id, branch| Expr::Root { arg: Box::new(arg), p, q, id: id + base, branch })
    }

    fn map_roots(&self, f: &impl Fn(Expr, i32, u32, usize, Branch) -> Expr) -> Self {
        let b = |e: &Expr| Box::new(e.map_roots(f));
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Add(x, y) => Expr::Add(b(x), b(y)),
            Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
            Expr::Div(x, y) => Expr::Div(b(x), b(y)),
            Expr::Neg(x) => Expr::Neg(b(x)),
            Expr::Powi(x, k) => Expr::Powi(b(x), *k),
            Expr::Root { arg, p, q, id, branch } => f(arg.map_roots(f), *p, *q, *id, *branch),
        }
    }

    /// Replaces a variable by an expression.
    pub fn subst(&self, s: Sym, by: &Expr) -> Self {
        let b = |e: &Expr| Box::new(e.subst(s, by));
        match self {
            Expr::Var(v) if *v == s => by.clone(),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Add(x, y) => Expr::Add(b(x), b(y)),
            Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
            Expr::Div(x, y) => Expr::Div(b(x), b(y)),
            Expr::Neg(x) => Expr::Neg(b(x)),
            Expr::Powi(x, k) => Expr::Powi(b(x), *k),
            Expr::Root { arg, p, q, id, branch } => {
                Expr::Root { arg: b(arg), p: *p, q: *q, id: *id, branch: *branch }
            }
        }
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, s: Sym) -> Self {
        let d = |e: &Expr| e.diff(s);
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(v) => Expr::Const(if *v == s { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => d(a) + d(b),
            Expr::Sub(a, b) => d(a) - d(b),
            Expr::Mul(a, b) => d(a) * (**b).clone() + (**a).clone() * d(b),
            Expr::Div(a, b) => {
                (d(a) * (**b).clone() - (**a).clone() * d(b)) / (**b).clone().powi(2)
            }
            Expr::Neg(a) => -d(a),
            Expr::Powi(a, k) => Expr::Const(*k as f64) * (**a).clone().powi(k - 1) * d(a),
            Expr::Root { arg, p, q, id, branch } => {
                let lower = Expr::Root { arg: arg.clone(), p: p - *q as i32, q: *q, id: *id, branch: *branch };
                Expr::Const(*p as f64 / *q as f64) * lower * d(arg)
            }
        }
    }

    /// Evaluates, updating the branch state of every radical.
    pub fn eval(&self, env: &Env, state: &mut BranchState) -> Result<Complex64, NumericError> {
        Ok(match self {
            Expr::Const(c) => (*c).into(),
            Expr::Var(s) => env.get(*s),
            Expr::Add(a, b) => a.eval(env, state)? + b.eval(env, state)?,
            Expr::Sub(a, b) => a.eval(env, state)? - b.eval(env, state)?,
            Expr::Mul(a, b) => a.eval(env, state)? * b.eval(env, state)?,
            Expr::Div(a, b) => {
                let n = a.eval(env, state)?;
                let d = b.eval(env, state)?;
                if d.norm() == 0.0 {
                    return Err(NumericError::Singular);
                }
                n / d
            }
            Expr::Neg(a) => -a.eval(env, state)?,
            Expr::Powi(a, k) => {
                let v = a.eval(env, state)?;
                if *k < 0 && v.norm() == 0.0 {
                    return Err(NumericError::Singular);
                }
                v.powi(*k)
            }
            Expr::Root { arg, p, q, id, branch } => {
                let r = arg.eval(env, state)?;
                let base = match branch {
                    Branch::Real => {
                        if r.im.abs() > 1e-12 * (1.0 + r.re.abs()) || q % 2 == 0 && r.re < 0.0 {
                            return Err(NumericError::NotReal);
                        }
                        Complex64::from(r.re.signum() * r.re.abs().powf(1.0 / *q as f64))
                    }
                    Branch::Continued { anchor } => {
                        if r.norm() < 1e-300 {
                            return Err(NumericError::Singular);
                        }
                        // The anchor only has to single out a root; later steps must be unambiguous.
                        let (prev, ratio) = match state[*id] {
                            Some(p) => (p, 0.5),
                            None => (*anchor, 0.99),
                        };
                        let chosen = nearest_root(r, *q, prev, ratio)?;
                        state[*id] = Some(chosen);
                        chosen
                    }
                };
                if *p < 0 && base.norm() == 0.0 {
                    return Err(NumericError::Singular);
                }
                base.powi(*p)
            }
        })
    }

    /// Evaluates an expression without radicals.
    pub fn eval_plain(&self, env: &Env) -> Result<Complex64, NumericError> {
        let mut st = vec![None; self.branch_slots()];
        self.eval(env, &mut st)
    }
}

/// The `q`-th root of `r` closest to `prev`; errors unless it beats the runner-up by `ratio`.
fn nearest_root(r: Complex64, q: u32, prev: Complex64, ratio: f64) -> Result<Complex64, NumericError> {
    let principal = r.powf(1.0 / q as f64);
    let mut best = (f64::INFINITY, principal);
    let mut second = f64::INFINITY;
    for k in 0..q {
        let c = principal * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64);
        let d = (c - prev).norm();
        if d < best.0 {
            second = best.0;
            best = (d, c);
        } else if d < second {
            second = d;
        }
    }
    if q > 1 && best.0 > ratio * second {
        return Err(NumericError::BranchAmbiguous);
    }
    Ok(best.1)
}

/// Steps in continuation, the halving floor as a fraction of the span.
pub const DEFAULT_STEPS: u32 = 64;
pub const STEP_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;

/// Value of `e` at `(x, y, z)` continued along `[0, z]` from the anchors.
pub fn branch_eval(e: &Expr, x: f64, y: f64, z: f64) -> Result<Complex64, NumericError> {
    branch_eval_env(e, Env::real(x, y, z))
}

/// Like [`branch_eval`] with the other variables taken from `env`.
pub fn branch_eval_env(e: &Expr, env: Env) -> Result<Complex64, NumericError> {
    let mut state: BranchState = vec![None; e.branch_slots()];
    let target = env.z;
    let at = |s: f64| Env { z: target * s, ..env };
    let mut value = e.eval(&at(0.0), &mut state)?;
    if state.is_empty() {
        return e.eval(&env, &mut state);
    }
    let (mut s, mut h) = (0.0, 1.0 / DEFAULT_STEPS as f64);
    while s < 1.0 {
        let step = h.min(1.0 - s);
        let mut trial = state.clone();
        match e.eval(&at(s + step), &mut trial) {
            Ok(v) if jump_ok(&state, &trial) => {
                state = trial;
                value = v;
                s += step;
                h = (2.0 * h).min(1.0 / DEFAULT_STEPS as f64);
            }
            Ok(_) | Err(NumericError::BranchAmbiguous) => {
                h /= 2.0;
                if h < STEP_FLOOR {
                    return Err(NumericError::StepUnderflow);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(value)
}

/// Rejects steps where a tracked root moved by more than a quarter of its size.
fn jump_ok(old: &BranchState, new: &BranchState) -> bool {
    old.iter().zip(new).all(|(a, b)| match (a, b) {
        (Some(a), Some(b)) => (a - b).norm() <= 0.25 * a.norm().max(b.norm()).max(1e-12),
        _ => true,
    })
}

macro_rules! binop {
    ($tr:ident, $m:ident, $v:ident) => {
        impl std::ops::$tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$v(Box::new(self), Box::new(rhs))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(s) => write!(f, "{}", format!("{s:?}").to_lowercase()),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/{b}"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Powi(a, k) => write!(f, "({a})^({k})"),
            Expr::Root { arg, p, q, branch: Branch::Real, .. } if *p == 1 && *q == 3 => write!(f, "cbrt({arg})"),
            Expr::Root { arg, p, q, branch: Branch::Real, .. } if *p == 1 && *q == 2 => write!(f, "psqrt({arg})"),
            Expr::Root { arg, p, q, .. } => write!(f, "({arg})^({p}/{q})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Int(i64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, NumericError> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            let lit: String = cs[start..i].iter().collect();
            out.push(match lit.parse::<i64>() {
                Ok(n) => Tok::Int(n),
                Err(_) => Tok::Num(lit.parse().map_err(|_| NumericError::Parse(format!("bad number {lit}")))?),
            });
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(NumericError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    next_id: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), NumericError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(NumericError::Parse(format!("expected {c:?} at token {}", self.pos)))
        }
    }

    fn sum(&mut self) -> Result<Expr, NumericError> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = acc + self.product()?;
            } else if self.eat('-') {
                acc = acc - self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, NumericError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, NumericError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, NumericError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let (p, q) = self.exponent()?;
        Ok(self.rational_power(base, p, q))
    }

    fn rational_power(&mut self, base: Expr, p: i64, q: i64) -> Expr {
        let g = num_integer::gcd(p, q);
        let (p, q) = (p / g, q / g);
        let (p, q) = if q < 0 { (-p, -q) } else { (p, q) };
        if q == 1 {
            return base.powi(p as i32);
        }
        let id = self.next_id;
        self.next_id += 1;
        Expr::Root { arg: Box::new(base), p: p as i32, q: q as u32, id, branch: Branch::Continued { anchor: 1.0.into() } }
    }

    /// `k`, `-k`, `(k)`, `(p/q)` or `(-p/q)`.
    fn exponent(&mut self) -> Result<(i64, i64), NumericError> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let p = self.int()?;
        let q = if paren && self.eat('/') { self.int()? } else { 1 };
        if paren {
            self.expect(')')?;
        }
        if q == 0 {
            return Err(NumericError::Parse("zero denominator in exponent".into()));
        }
        Ok((if neg { -p } else { p }, q))
    }

    fn int(&mut self) -> Result<i64, NumericError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(NumericError::Parse("expected an integer exponent".into())),
        }
    }

    fn atom(&mut self) -> Result<Expr, NumericError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Const(n as f64))
            }
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let sym = match name.as_str() {
                    "x" => Some(Sym::X),
                    "y" => Some(Sym::Y),
                    "z" => Some(Sym::Z),
                    "w" => Some(Sym::W),
                    "t" => Some(Sym::T),
                    _ => None,
                };
                if let Some(s) = sym {
                    return Ok(Expr::Var(s));
                }
                self.expect('(')?;
                let arg = self.sum()?;
                self.expect(')')?;
                match name.as_str() {
                    "sqrt" => Ok(self.rational_power(arg, 1, 2)),
                    "psqrt" => {
                        let id = self.next_id;
                        self.next_id += 1;
                        Ok(Expr::Root { arg: Box::new(arg), p: 1, q: 2, id, branch: Branch::Real })
                    }
                    "cbrt" => {
                        let id = self.next_id;
                        self.next_id += 1;
                        Ok(Expr::Root { arg: Box::new(arg), p: 1, q: 3, id, branch: Branch::Real })
                    }
                    other => Err(NumericError::Parse(format!("unknown function {other}"))),
                }
            }
            other => Err(NumericError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: f64) -> bool {
        (a - b).norm() < 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn parses_and_evaluates_polynomials() {
        let e = Expr::parse("x + z*(x-y)^2").unwrap();
        assert!(close(branch_eval(&e, 2.0, 0.5, 3.0).unwrap(), 2.0 + 3.0 * 2.25));
        let e = Expr::parse("-x^-2 + 3/y").unwrap();
        assert!(close(e.eval_plain(&Env::real(2.0, 3.0, 0.0)).unwrap(), -0.25 + 1.0));
        assert!(Expr::parse("x +").is_err());
        assert!(Expr::parse("foo(x)").is_err());
    }

    #[test]
    fn continued_square_root_leaves_principal_branch() {
        // (1 - z)^(1/2) continued along a loop is fine on the real axis for z < 1.
        let e = Expr::parse("x*(1 - z*x^2/y)^(-1/2)").unwrap();
        let (x, y, z): (f64, f64, f64) = (0.7, 2.0, 1.5);
        let exact = x * (1.0 - z * x * x / y).powf(-0.5);
        assert!(close(branch_eval(&e, x, y, z).unwrap(), exact));
        // Negative anchor selection: the root nearest 1 of 4 is 2, not -2.
        let s = Expr::parse("(4 + z)^(1/2)").unwrap();
        assert!(close(branch_eval(&s, 0.0, 0.0, 0.0).unwrap(), 2.0));
    }

    #[test]
    fn continuation_stops_at_a_branch_point() {
        // Along real z the radicand of (1 - z)^(1/2) passes through zero.
        let e = Expr::parse("(1 - z)^(1/2)").unwrap();
        assert!(branch_eval(&e, 0.0, 0.0, 4.0 / 3.0).is_err());
        // A complex endpoint keeps the radicand in the lower half plane, so the
        // continued value is the principal one.
        let env = Env { z: Complex64::new(4.0 / 3.0, 0.5), ..Default::default() };
        let v = branch_eval_env(&e, env).unwrap();
        assert!((v - (Complex64::new(1.0, 0.0) - env.z).sqrt()).norm() < 1e-12);
    }

    #[test]
    fn real_cube_root() {
        let e = Expr::parse("cbrt(x)").unwrap();
        assert!(close(e.eval_plain(&Env::real(-8.0, 0.0, 0.0)).unwrap(), -2.0));
        let s = Expr::parse("psqrt(x)").unwrap();
        assert!(close(s.eval_plain(&Env::real(250000.0, 0.0, 0.0)).unwrap(), 500.0));
        assert_eq!(s.eval_plain(&Env::real(-1.0, 0.0, 0.0)), Err(NumericError::NotReal));
    }

    #[test]
    fn derivatives_match_differences() {
        let e = Expr::parse("x^3*y/(1 + x*t) + (1 + t*z)^(1/2)").unwrap();
        let env = Env { x: 0.3.into(), y: 1.2.into(), z: 0.4.into(), t: 0.7.into(), w: 0.0.into() };
        for s in [Sym::X, Sym::T] {
            let d = e.diff(s).eval_plain(&env).unwrap();
            let h = 1e-6;
            let shift = |v: f64| {
                let mut e2 = env;
                match s {
                    Sym::X => e2.x += v,
                    _ => e2.t += v,
                }
                e.eval_plain(&e2).unwrap()
            };
            let fd = (shift(h) - shift(-h)) / (2.0 * h);
            assert!((d - fd).norm() < 1e-8, "{s:?}");
        }
    }

    #[test]
    fn substitution_and_exact_lift() {
        let p: Rf = "x^2 - 3*x*y".parse().unwrap();
        let e = Expr::from_rf(&p, &Expr::var(Sym::T), &Expr::var(Sym::Y));
        let env = Env { t: 2.0.into(), y: 5.0.into(), ..Default::default() };
        assert!(close(e.eval_plain(&env).unwrap(), 4.0 - 30.0));
        let f = Expr::parse("x*y").unwrap().subst(Sym::X, &Expr::parse("z + 1").unwrap());
        assert!(close(f.eval_plain(&Env::real(0.0, 3.0, 2.0)).unwrap(), 9.0));
    }
}
