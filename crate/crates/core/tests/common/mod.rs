//! Random expression trees over the certified interval operations.

#![allow(dead_code)]

use bhbound::precision::{CertifiedInterval, Decimal, Dyadic};
use num_bigint::BigInt;
use rand::Rng;

#[derive(Clone, Debug)]
pub enum Expr {
    Leaf(Decimal),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log2(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

pub fn random_decimal(rng: &mut impl Rng) -> Decimal {
    let digits: i64 = rng.random_range(-99_999..=99_999);
    let scale = rng.random_range(0..=5);
    Decimal::new(BigInt::from(digits), scale)
}

/// A tree of depth at most `depth`.
pub fn random_expr(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return Expr::Leaf(random_decimal(rng));
    }
    let op = rng.random_range(0..7);
    let a = Box::new(random_expr(rng, depth - 1));
    if op == 4 {
        return Expr::Exp(a);
    }
    if op == 5 {
        return Expr::Log2(a);
    }
    let b = Box::new(random_expr(rng, depth - 1));
    match op {
        0 => Expr::Add(a, b),
        1 => Expr::Sub(a, b),
        2 => Expr::Mul(a, b),
        3 => Expr::Div(a, b),
        _ => Expr::Pow(a, b),
    }
}

fn bounded(x: CertifiedInterval) -> Option<CertifiedInterval> {
    // keep magnitudes and widths in a range where every operation is cheap
    let limit = Dyadic::pow2(64);
    (x.mag() < limit && x.width() < Dyadic::pow2(8)).then_some(x)
}

/// Evaluates at `prec` bits; `None` when an operation leaves its domain or
/// the value grows out of range.
pub fn eval(e: &Expr, prec: u32) -> Option<CertifiedInterval> {
    let r = match e {
        Expr::Leaf(d) => CertifiedInterval::from_decimal(d, prec),
        Expr::Add(a, b) => eval(a, prec)?.add(&eval(b, prec)?),
        Expr::Sub(a, b) => eval(a, prec)?.sub(&eval(b, prec)?),
        Expr::Mul(a, b) => eval(a, prec)?.mul(&eval(b, prec)?),
        Expr::Div(a, b) => eval(a, prec)?.div(&eval(b, prec)?).ok()?,
        Expr::Exp(a) => {
            let x = eval(a, prec)?;
            if x.hi() > &Dyadic::from_i64(40) {
                return None;
            }
            x.exp()
        }
        Expr::Log2(a) => eval(a, prec)?.log2().ok()?,
        Expr::Pow(a, b) => {
            let base = eval(a, prec)?;
            let y = eval(b, prec)?;
            if y.mag() > Dyadic::from_i64(8) {
                return None;
            }
            base.pow(&y).ok()?
        }
    };
    bounded(r)
}
