//! Closed-form scalar functions of one real variable with exact derivatives.
//!
//! A [`ScalarFn`] is an immutable expression DAG over complex constants, the
//! variable `x`, the four arithmetic operations, integer powers and the entire
//! functions `exp`, `sin`, `cos`, `sinh`, `cosh`. Constructors fold constants
//! and the trivial identities (`0 + f`, `1 * f`, ...) but nothing more: two
//! functions are compared by sampling, never by canonical form.

mod matrix;
mod tape;

pub use matrix::FnMatrix;
pub use tape::Tape;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute threshold below which a denominator counts as vanishing.
pub const TAU_ZERO: f64 = 1e-12;

/// Elementary entire functions admitted in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }

    fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Func::Exp => z.exp(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Sinh => z.sinh(),
            Func::Cosh => z.cosh(),
        }
    }
}

#[derive(Debug)]
pub(crate) enum Node {
    Const(Complex64),
    Var,
    Add(ScalarFn, ScalarFn),
    Sub(ScalarFn, ScalarFn),
    Mul(ScalarFn, ScalarFn),
    Div(ScalarFn, ScalarFn),
    Neg(ScalarFn),
    Pow(ScalarFn, i32),
    Call(Func, ScalarFn),
}

/// Smooth complex-valued function of a real variable, held as an expression DAG.
#[derive(Clone)]
pub struct ScalarFn(Arc<Node>);

impl ScalarFn {
    fn node(node: Node) -> Self {
        ScalarFn(Arc::new(node))
    }

    pub(crate) fn kind(&self) -> &Node {
        &self.0
    }

    pub(crate) fn id(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn real(r: f64) -> Self {
        Self::constant(Complex64::new(r, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    /// The identity function `x`.
    pub fn x() -> Self {
        Self::node(Node::Var)
    }

    /// Value of the expression if it is a literal constant.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self.kind() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(Complex64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        self.as_constant() == Some(Complex64::new(1.0, 0.0))
    }

    pub fn call(func: Func, arg: &ScalarFn) -> Self {
        match arg.as_constant().and_then(|c| folded(func.apply(c))) {
            Some(f) => f,
            None => Self::node(Node::Call(func, arg.clone())),
        }
    }

    pub fn exp(&self) -> Self {
        Self::call(Func::Exp, self)
    }

    pub fn sin(&self) -> Self {
        Self::call(Func::Sin, self)
    }

    pub fn cos(&self) -> Self {
        Self::call(Func::Cos, self)
    }

    pub fn sinh(&self) -> Self {
        Self::call(Func::Sinh, self)
    }

    pub fn cosh(&self) -> Self {
        Self::call(Func::Cosh, self)
    }

    /// Integer power.
    pub fn powi(&self, k: i32) -> Self {
        match k {
            0 => Self::one(),
            1 => self.clone(),
            _ => match self.as_constant().and_then(|c| folded(c.powi(k))) {
                Some(f) => f,
                None => Self::node(Node::Pow(self.clone(), k)),
            },
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::constant(c) * self
    }

    /// Number of distinct nodes in the DAG.
    pub fn dag_size(&self) -> usize {
        fn walk(f: &ScalarFn, seen: &mut HashMap<*const Node, ()>) {
            if seen.insert(f.id(), ()).is_some() {
                return;
            }
            match f.kind() {
                Node::Const(_) | Node::Var => {}
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    walk(a, seen);
                    walk(b, seen);
                }
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => walk(a, seen),
            }
        }
        let mut seen = HashMap::new();
        walk(self, &mut seen);
        seen.len()
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        self.eval_with(x, TAU_ZERO)
    }

    /// Evaluates at `x`, reporting a pole when a denominator is within
    /// `tau_zero` of zero.
    pub fn eval_with(&self, x: f64, tau_zero: f64) -> Result<Complex64> {
        let v = Tape::compile([self]).eval_point(x, tau_zero)?[0];
        Ok(v)
    }

    /// Exact derivative of the given order; `derive(0)` is `self`.
    pub fn derive(&self, order: usize) -> ScalarFn {
        let mut f = self.clone();
        for _ in 0..order {
            f = f.derive_once(&mut HashMap::new());
        }
        f
    }

    pub(crate) fn derive_once(&self, memo: &mut HashMap<*const Node, ScalarFn>) -> ScalarFn {
        if let Some(d) = memo.get(&self.id()) {
            return d.clone();
        }
        let d = match self.kind() {
            Node::Const(_) => ScalarFn::zero(),
            Node::Var => ScalarFn::one(),
            Node::Add(a, b) => a.derive_once(memo) + b.derive_once(memo),
            Node::Sub(a, b) => a.derive_once(memo) - b.derive_once(memo),
            Node::Mul(a, b) => {
                let da = a.derive_once(memo);
                let db = b.derive_once(memo);
                da * b + a * db
            }
            Node::Div(a, b) => {
                let da = a.derive_once(memo);
                let db = b.derive_once(memo);
                // (a' - (a/b) b') / b keeps the denominator at b, not b²
                (da - self * db) / b
            }
            Node::Neg(a) => -a.derive_once(memo),
            Node::Pow(a, k) => {
                let da = a.derive_once(memo);
                ScalarFn::real(f64::from(*k)) * a.powi(k - 1) * da
            }
            Node::Call(func, a) => {
                let da = a.derive_once(memo);
                let outer = match func {
                    Func::Exp => self.clone(),
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Sinh => a.cosh(),
                    Func::Cosh => a.sinh(),
                };
                outer * da
            }
        };
        memo.insert(self.id(), d.clone());
        d
    }
}

// Constant folding never introduces a non-finite literal; overflow is left
// to evaluation, where it is reported.
fn folded(c: Complex64) -> Option<ScalarFn> {
    (c.re.is_finite() && c.im.is_finite()).then(|| ScalarFn::constant(c))
}

fn add(a: &ScalarFn, b: &ScalarFn) -> ScalarFn {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    match (a.as_constant(), b.as_constant()) {
        (Some(p), Some(q)) => folded(p + q).unwrap_or_else(|| ScalarFn::node(Node::Add(a.clone(), b.clone()))),
        _ => ScalarFn::node(Node::Add(a.clone(), b.clone())),
    }
}

fn sub(a: &ScalarFn, b: &ScalarFn) -> ScalarFn {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return neg(b);
    }
    match (a.as_constant(), b.as_constant()) {
        (Some(p), Some(q)) => folded(p - q).unwrap_or_else(|| ScalarFn::node(Node::Sub(a.clone(), b.clone()))),
        _ => ScalarFn::node(Node::Sub(a.clone(), b.clone())),
    }
}

fn mul(a: &ScalarFn, b: &ScalarFn) -> ScalarFn {
    if a.is_zero() || b.is_zero() {
        return ScalarFn::zero();
    }
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    match (a.as_constant(), b.as_constant()) {
        (Some(p), Some(q)) => folded(p * q).unwrap_or_else(|| ScalarFn::node(Node::Mul(a.clone(), b.clone()))),
        (Some(p), None) if p == Complex64::new(-1.0, 0.0) => neg(b),
        (None, Some(q)) if q == Complex64::new(-1.0, 0.0) => neg(a),
        _ => ScalarFn::node(Node::Mul(a.clone(), b.clone())),
    }
}

fn div(a: &ScalarFn, b: &ScalarFn) -> ScalarFn {
    if a.is_zero() {
        return ScalarFn::zero();
    }
    if b.is_one() {
        return a.clone();
    }
    match (a.as_constant(), b.as_constant()) {
        (Some(p), Some(q)) if q.norm() != 0.0 => {
            folded(p / q).unwrap_or_else(|| ScalarFn::node(Node::Div(a.clone(), b.clone())))
        }
        _ => ScalarFn::node(Node::Div(a.clone(), b.clone())),
    }
}

fn neg(a: &ScalarFn) -> ScalarFn {
    match a.kind() {
        Node::Const(c) => ScalarFn::constant(-c),
        Node::Neg(inner) => inner.clone(),
        _ => ScalarFn::node(Node::Neg(a.clone())),
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl $trait<ScalarFn> for ScalarFn {
            type Output = ScalarFn;
            fn $method(self, rhs: ScalarFn) -> ScalarFn {
                $f(&self, &rhs)
            }
        }
        impl $trait<&ScalarFn> for ScalarFn {
            type Output = ScalarFn;
            fn $method(self, rhs: &ScalarFn) -> ScalarFn {
                $f(&self, rhs)
            }
        }
        impl $trait<ScalarFn> for &ScalarFn {
            type Output = ScalarFn;
            fn $method(self, rhs: ScalarFn) -> ScalarFn {
                $f(self, &rhs)
            }
        }
        impl $trait<&ScalarFn> for &ScalarFn {
            type Output = ScalarFn;
            fn $method(self, rhs: &ScalarFn) -> ScalarFn {
                $f(self, rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for ScalarFn {
    type Output = ScalarFn;
    fn neg(self) -> ScalarFn {
        neg(&self)
    }
}

impl Neg for &ScalarFn {
    type Output = ScalarFn;
    fn neg(self) -> ScalarFn {
        neg(self)
    }
}

impl From<f64> for ScalarFn {
    fn from(r: f64) -> Self {
        ScalarFn::real(r)
    }
}

impl From<Complex64> for ScalarFn {
    fn from(c: Complex64) -> Self {
        ScalarFn::constant(c)
    }
}

// Precedence levels used when printing; the parser in `cli::parse` accepts
// exactly this output.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_ATOM: u8 = 5;

fn precedence(f: &ScalarFn) -> u8 {
    match f.kind() {
        Node::Add(..) | Node::Sub(..) => PREC_ADD,
        Node::Mul(..) | Node::Div(..) => PREC_MUL,
        Node::Neg(_) => PREC_NEG,
        Node::Pow(..) => 4,
        Node::Const(_) | Node::Var | Node::Call(..) => PREC_ATOM,
    }
}

fn write_operand(f: &ScalarFn, min_prec: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(f) < min_prec {
        write!(out, "(")?;
        write_expr(f, out)?;
        write!(out, ")")
    } else {
        write_expr(f, out)
    }
}

fn write_expr(f: &ScalarFn, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f.kind() {
        Node::Const(c) => {
            if c.im == 0.0 && c.re.is_sign_positive() {
                write!(out, "{}", c.re)
            } else {
                write!(out, "({},{})", c.re, c.im)
            }
        }
        Node::Var => write!(out, "x"),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            let (sym, prec) = match f.kind() {
                Node::Add(..) => ("+", PREC_ADD),
                Node::Sub(..) => ("-", PREC_ADD),
                Node::Mul(..) => ("*", PREC_MUL),
                _ => ("/", PREC_MUL),
            };
            write_operand(a, prec, out)?;
            write!(out, " {sym} ")?;
            write_operand(b, prec + 1, out)
        }
        Node::Neg(a) => {
            write!(out, "-")?;
            write_operand(a, PREC_NEG, out)
        }
        Node::Pow(a, k) => {
            write_operand(a, PREC_ATOM, out)?;
            if *k < 0 {
                write!(out, "^({k})")
            } else {
                write!(out, "^{k}")
            }
        }
        Node::Call(func, a) => {
            write!(out, "{}(", func.name())?;
            write_expr(a, out)?;
            write!(out, ")")
        }
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFn({self})")
    }
}

/// Checks that a value is finite, mapping overflow to an error.
pub(crate) fn finite(v: Complex64, x: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { x })
    }
}
