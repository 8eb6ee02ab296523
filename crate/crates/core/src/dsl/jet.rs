//! Second-order forward-mode jets: value, gradient and dense Hessian.

use super::expr::{BinOp, Expr, Func};
use crate::error::EvalError;

/// Value, gradient and Hessian of a scalar function of `n` coordinates.
///
/// The Hessian is stored row-major and is kept exactly symmetric: every
/// operation fills the upper triangle and mirrors it.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(value: f64, n: usize) -> Self {
        Jet2 {
            value,
            grad: vec![0.0; n],
            hess: vec![0.0; n * n],
        }
    }

    /// The coordinate function `x_i` at `value`.
    pub fn variable(value: f64, i: usize, n: usize) -> Self {
        let mut j = Jet2::constant(value, n);
        j.grad[i] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    #[inline]
    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    fn from_upper(value: f64, grad: Vec<f64>, n: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Self {
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = entry(i, j);
                hess[i * n + j] = v;
                hess[j * n + i] = v;
            }
        }
        Jet2 { value, grad, hess }
    }

    /// Apply a scalar function given its value and first two derivatives at
    /// `self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.dim();
        let grad = self.grad.iter().map(|g| f1 * g).collect();
        Jet2::from_upper(f0, grad, n, |i, j| f1 * self.h(i, j) + f2 * self.grad[i] * self.grad[j])
    }

    pub fn add(&self, o: &Jet2) -> Self {
        let n = self.dim();
        let grad = self.grad.iter().zip(&o.grad).map(|(a, b)| a + b).collect();
        Jet2::from_upper(self.value + o.value, grad, n, |i, j| self.h(i, j) + o.h(i, j))
    }

    pub fn sub(&self, o: &Jet2) -> Self {
        let n = self.dim();
        let grad = self.grad.iter().zip(&o.grad).map(|(a, b)| a - b).collect();
        Jet2::from_upper(self.value - o.value, grad, n, |i, j| self.h(i, j) - o.h(i, j))
    }

    pub fn neg(&self) -> Self {
        Jet2 {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
            hess: self.hess.iter().map(|h| -h).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet2 {
            value: s * self.value,
            grad: self.grad.iter().map(|g| s * g).collect(),
            hess: self.hess.iter().map(|h| s * h).collect(),
        }
    }

    pub fn mul(&self, o: &Jet2) -> Self {
        let n = self.dim();
        let (a, b) = (self.value, o.value);
        let grad = self.grad.iter().zip(&o.grad).map(|(ga, gb)| a * gb + b * ga).collect();
        Jet2::from_upper(a * b, grad, n, |i, j| {
            a * o.h(i, j) + b * self.h(i, j) + self.grad[i] * o.grad[j] + o.grad[i] * self.grad[j]
        })
    }

    /// `1 / self`; caller guarantees a nonzero value.
    fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    fn powi(&self, k: i64) -> Self {
        let mut e = k.unsigned_abs();
        let mut base = if k < 0 { self.recip() } else { self.clone() };
        let mut acc = Jet2::constant(1.0, self.dim());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Integer exponents up to this magnitude use repeated multiplication.
const MAX_INT_EXPONENT: f64 = 64.0;

fn domain(e: &Expr, names: Option<&[String]>, what: &str) -> EvalError {
    let text = match names {
        Some(n) => e.display(n).to_string(),
        None => format!("{e:?}"),
    };
    EvalError::Domain {
        expr: text,
        reason: what.to_string(),
    }
}

/// Evaluate `e` as a jet at `point`. `names` is only used for diagnostics.
pub fn eval_jet2(e: &Expr, point: &[f64], names: Option<&[String]>) -> Result<Jet2, EvalError> {
    let n = point.len();
    let j = eval_inner(e, point, n, names)?;
    if !j.value.is_finite() || j.grad.iter().chain(&j.hess).any(|v| !v.is_finite()) {
        return Err(domain(e, names, "non-finite result"));
    }
    Ok(j)
}

fn eval_inner(e: &Expr, p: &[f64], n: usize, names: Option<&[String]>) -> Result<Jet2, EvalError> {
    Ok(match e {
        Expr::Num(v) => Jet2::constant(*v, n),
        Expr::Var(i) => {
            if *i >= n {
                return Err(EvalError::UnknownVariable(*i));
            }
            Jet2::variable(p[*i], *i, n)
        }
        Expr::Neg(a) => eval_inner(a, p, n, names)?.neg(),
        Expr::Bin(op, a, b) => {
            if *op == BinOp::Pow && b.is_constant() {
                let base = eval_inner(a, p, n, names)?;
                let k = eval_inner(b, p, n, names)?.value;
                return pow_const(e, &base, k, names);
            }
            let x = eval_inner(a, p, n, names)?;
            let y = eval_inner(b, p, n, names)?;
            match op {
                BinOp::Add => x.add(&y),
                BinOp::Sub => x.sub(&y),
                BinOp::Mul => x.mul(&y),
                BinOp::Div => {
                    if y.value == 0.0 {
                        return Err(domain(e, names, "division by zero"));
                    }
                    x.mul(&y.recip())
                }
                BinOp::Pow => {
                    if x.value <= 0.0 {
                        return Err(domain(e, names, "variable exponent needs a positive base"));
                    }
                    // a^b = exp(b ln a)
                    let l = x.chain(x.value.ln(), 1.0 / x.value, -1.0 / (x.value * x.value));
                    let t = y.mul(&l);
                    let ev = t.value.exp();
                    t.chain(ev, ev, ev)
                }
            }
        }
        Expr::Call(f, a) => {
            let u = eval_inner(a, p, n, names)?;
            let v = u.value;
            match f {
                Func::Sin => u.chain(v.sin(), v.cos(), -v.sin()),
                Func::Cos => u.chain(v.cos(), -v.sin(), -v.cos()),
                Func::Tan => {
                    let c = v.cos();
                    if c.abs() < 1e-300 {
                        return Err(domain(e, names, "tan at a pole"));
                    }
                    let t = v.tan();
                    let s2 = 1.0 + t * t;
                    u.chain(t, s2, 2.0 * t * s2)
                }
                Func::Sinh => u.chain(v.sinh(), v.cosh(), v.sinh()),
                Func::Cosh => u.chain(v.cosh(), v.sinh(), v.cosh()),
                Func::Tanh => {
                    let t = v.tanh();
                    let s2 = 1.0 - t * t;
                    u.chain(t, s2, -2.0 * t * s2)
                }
                Func::Exp => {
                    let ev = v.exp();
                    u.chain(ev, ev, ev)
                }
                Func::Log => {
                    if v <= 0.0 {
                        return Err(domain(e, names, "log of a non-positive value"));
                    }
                    u.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
                }
                Func::Sqrt => {
                    if v <= 0.0 {
                        return Err(domain(
                            e,
                            names,
                            if v == 0.0 {
                                "sqrt is not differentiable at 0"
                            } else {
                                "sqrt of a negative value"
                            },
                        ));
                    }
                    let s = v.sqrt();
                    u.chain(s, 0.5 / s, -0.25 / (s * v))
                }
            }
        }
    })
}

fn pow_const(e: &Expr, base: &Jet2, k: f64, names: Option<&[String]>) -> Result<Jet2, EvalError> {
    if k.fract() == 0.0 && k.abs() <= MAX_INT_EXPONENT {
        if k < 0.0 && base.value == 0.0 {
            return Err(domain(e, names, "negative power of zero"));
        }
        return Ok(base.powi(k as i64));
    }
    if base.value <= 0.0 {
        return Err(domain(e, names, "non-integer power needs a positive base"));
    }
    let v = base.value;
    let f0 = v.powf(k);
    Ok(base.chain(f0, k * v.powf(k - 1.0), k * (k - 1.0) * v.powf(k - 2.0)))
}

/// Plain value evaluation (no derivatives), used for constant sub-expressions
/// such as domain bounds.
pub fn eval_value(e: &Expr, point: &[f64]) -> Result<f64, EvalError> {
    eval_jet2(e, point, None).map(|j| j.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parser::parse_expr;
    use approx::assert_relative_eq;

    fn jet(src: &str, names: &[&str], p: &[f64]) -> Jet2 {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        eval_jet2(&parse_expr(src, &names).unwrap(), p, Some(&names)).unwrap()
    }

    #[test]
    fn polynomial() {
        let j = jet("x^2", &["x"], &[3.0]);
        assert_eq!((j.value, j.grad[0], j.hess[0]), (9.0, 6.0, 2.0));
    }

    #[test]
    fn sin_squared_matches_finite_differences() {
        let p = std::f64::consts::FRAC_PI_2;
        let j = jet("sin(u)^2", &["u"], &[p]);
        let f = |u: f64| u.sin().powi(2);
        let h = 1e-4;
        let fd1 = (f(p + h) - f(p - h)) / (2.0 * h);
        let fd2 = (f(p + h) - 2.0 * f(p) + f(p - h)) / (h * h);
        assert_relative_eq!(j.value, 1.0, epsilon = 1e-15);
        assert!((j.grad[0] - fd1).abs() < 1e-6 && j.grad[0].abs() < 1e-15);
        assert!((j.hess[0] - fd2).abs() < 1e-6);
        assert_relative_eq!(j.hess[0], -2.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_has_zero_derivatives() {
        let j = jet("5", &["x", "y"], &[0.3, -0.2]);
        assert_eq!(j.value, 5.0);
        assert!(j.grad.iter().chain(&j.hess).all(|v| *v == 0.0));
    }

    #[test]
    fn mixed_partials() {
        // f = x^2 y + exp(x y)
        let (x, y) = (0.7, -0.4);
        let j = jet("x^2*y + exp(x*y)", &["x", "y"], &[x, y]);
        let e = (x * y).exp();
        assert_relative_eq!(j.grad[0], 2.0 * x * y + y * e, epsilon = 1e-14);
        assert_relative_eq!(j.grad[1], x * x + x * e, epsilon = 1e-14);
        assert_relative_eq!(j.h(0, 0), 2.0 * y + y * y * e, epsilon = 1e-14);
        assert_relative_eq!(j.h(0, 1), 2.0 * x + e + x * y * e, epsilon = 1e-14);
        assert_eq!(j.h(0, 1), j.h(1, 0));
        assert_relative_eq!(j.h(1, 1), x * x * e, epsilon = 1e-14);
    }

    #[test]
    fn domain_violations() {
        let names = vec!["x".to_string()];
        for (src, p) in [("log(x)", -1.0), ("sqrt(x)", -0.5), ("1/x", 0.0), ("x^0.5", -2.0), ("x^-1", 0.0), ("x^x", -1.0)] {
            let e = parse_expr(src, &names).unwrap();
            let err = eval_jet2(&e, &[p], Some(&names)).unwrap_err();
            assert!(matches!(err, EvalError::Domain { .. }), "{src}");
        }
        let e = parse_expr("exp(exp(x))", &names).unwrap();
        assert!(eval_jet2(&e, &[10.0], Some(&names)).is_err());
    }

    #[test]
    fn integer_and_real_powers_agree() {
        let a = jet("(1+x)^3", &["x"], &[0.4]);
        let b = jet("(1+x)^3.0000000000000004", &["x"], &[0.4]);
        assert_relative_eq!(a.hess[0], b.hess[0], max_relative = 1e-12);
        let c = jet("x^-2", &["x"], &[2.0]);
        assert_relative_eq!(c.hess[0], 6.0 / 16.0, epsilon = 1e-15);
    }
}
