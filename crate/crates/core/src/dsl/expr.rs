//! Expression trees for metric components.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }

    fn right_assoc(self) -> bool {
        matches!(self, BinOp::Pow)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// Abstract syntax tree of a scalar expression in the chart coordinates.
///
/// Variables are stored by coordinate index; names live on the owning
/// [`MetricField`](crate::dsl::MetricField).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

const NEG_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

impl Expr {
    /// Numeric literal; negative values become `Neg(Num(|v|))` so the tree
    /// matches what the parser produces for the printed form.
    pub fn num(v: f64) -> Expr {
        if v < 0.0 {
            Expr::neg(Expr::Num(-v))
        } else {
            Expr::Num(v)
        }
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Add, a, b)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Sub, a, b)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Mul, a, b)
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Div, a, b)
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Pow, a, b)
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    /// `true` when the expression contains no coordinate variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Call(_, a) => a.max_var(),
            Expr::Bin(_, a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Replace every `Var(i)` by `subs[i]`.
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(i) => subs[*i].clone(),
            Expr::Neg(a) => Expr::neg(a.substitute(subs)),
            Expr::Call(f, a) => Expr::call(*f, a.substitute(subs)),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.substitute(subs), b.substitute(subs)),
        }
    }

    /// Shift every variable index by `offset`.
    pub fn shift_vars(&self, offset: usize) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(i) => Expr::Var(i + offset),
            Expr::Neg(a) => Expr::neg(a.shift_vars(offset)),
            Expr::Call(f, a) => Expr::call(*f, a.shift_vars(offset)),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.shift_vars(offset), b.shift_vars(offset)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => ATOM_PRECEDENCE,
            Expr::Neg(_) => NEG_PRECEDENCE,
            Expr::Bin(op, ..) => op.precedence(),
        }
    }

    /// Render with the given coordinate names. The output parses back to an
    /// identical tree.
    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self.expr, self.names, f)
    }
}

fn write_child(e: &Expr, parens: bool, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if parens {
        f.write_str("(")?;
        write_expr(e, names, f)?;
        f.write_str(")")
    } else {
        write_expr(e, names, f)
    }
}

fn write_expr(e: &Expr, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        // Display for f64 is the shortest string that reads back exactly.
        Expr::Num(v) => write!(f, "{v}"),
        Expr::Var(i) => match names.get(*i) {
            Some(name) => f.write_str(name),
            None => write!(f, "?{i}"),
        },
        Expr::Neg(a) => {
            f.write_str("-")?;
            write_child(a, a.precedence() < NEG_PRECEDENCE, names, f)
        }
        Expr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, names, f)?;
            f.write_str(")")
        }
        Expr::Bin(op, a, b) => {
            let p = op.precedence();
            let left_parens = if op.right_assoc() {
                a.precedence() <= p
            } else {
                a.precedence() < p
            };
            let right_parens = if op.right_assoc() {
                b.precedence() < p
            } else {
                b.precedence() <= p
            };
            write_child(a, left_parens, names, f)?;
            if *op == BinOp::Pow {
                write!(f, "^")?;
            } else {
                write!(f, " {} ", op.symbol())?;
            }
            write_child(b, right_parens, names, f)
        }
    }
}
