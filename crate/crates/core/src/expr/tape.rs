use std::collections::HashMap;

use num_complex::Complex64;

use super::{finite, Func, Node, ScalarFn};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(Complex64),
    Var,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
    Pow(usize, i32),
    Call(Func, usize),
}

/// A flattened evaluation program for a batch of functions.
///
/// Shared subexpressions are evaluated once per point, so DAGs produced by
/// repeated differentiation and composition stay cheap to sample.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    roots: Vec<usize>,
}

impl Tape {
    pub fn compile<'a, I>(roots: I) -> Tape
    where
        I: IntoIterator<Item = &'a ScalarFn>,
    {
        let mut tape = Tape { ops: Vec::new(), roots: Vec::new() };
        let mut slots: HashMap<*const Node, usize> = HashMap::new();
        for f in roots {
            let slot = tape.push(f, &mut slots);
            tape.roots.push(slot);
        }
        tape
    }

    fn push(&mut self, f: &ScalarFn, slots: &mut HashMap<*const Node, usize>) -> usize {
        if let Some(&s) = slots.get(&f.id()) {
            return s;
        }
        let op = match f.kind() {
            Node::Const(c) => Op::Const(*c),
            Node::Var => Op::Var,
            Node::Add(a, b) => Op::Add(self.push(a, slots), self.push(b, slots)),
            Node::Sub(a, b) => Op::Sub(self.push(a, slots), self.push(b, slots)),
            Node::Mul(a, b) => Op::Mul(self.push(a, slots), self.push(b, slots)),
            Node::Div(a, b) => Op::Div(self.push(a, slots), self.push(b, slots)),
            Node::Neg(a) => Op::Neg(self.push(a, slots)),
            Node::Pow(a, k) => Op::Pow(self.push(a, slots), *k),
            Node::Call(func, a) => Op::Call(*func, self.push(a, slots)),
        };
        self.ops.push(op);
        let s = self.ops.len() - 1;
        slots.insert(f.id(), s);
        s
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Evaluates every root at `x`. Fails on the first pole or non-finite root.
    pub fn eval_point(&self, x: f64, tau_zero: f64) -> Result<Vec<Complex64>> {
        let mut vals: Vec<Complex64> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Const(c) => c,
                Op::Var => Complex64::new(x, 0.0),
                Op::Add(a, b) => vals[a] + vals[b],
                Op::Sub(a, b) => vals[a] - vals[b],
                Op::Mul(a, b) => vals[a] * vals[b],
                Op::Div(a, b) => {
                    let d = vals[b];
                    if d.norm() <= tau_zero {
                        return Err(Error::PoleAtPoint { x, magnitude: d.norm() });
                    }
                    vals[a] / d
                }
                Op::Neg(a) => -vals[a],
                Op::Pow(a, k) => {
                    let base = vals[a];
                    if k < 0 && base.norm() <= tau_zero {
                        return Err(Error::PoleAtPoint { x, magnitude: base.norm() });
                    }
                    base.powi(k)
                }
                Op::Call(func, a) => func.apply(vals[a]),
            };
            vals.push(v);
        }
        self.roots.iter().map(|&r| finite(vals[r], x)).collect()
    }
}
