use std::fmt;

use thiserror::Error;

/// Elementary functions admitted by the expression grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Cos,
    Sin,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Cos, Func::Sin, Func::Exp, Func::Sqrt, Func::Abs];

    pub fn name(self) -> &'static str {
        match self {
            Func::Cos => "cos",
            Func::Sin => "sin",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree in the single variable `y`, the vertical component of the
/// unit normal.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// The named constant `pi`; kept symbolic so printing reproduces the source.
    Pi,
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// Domain faults raised while evaluating an expression.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at y = {y}")]
    DivisionByZero { y: f64 },
    #[error("square root of negative argument {arg} at y = {y}")]
    NegativeSqrt { y: f64, arg: f64 },
    #[error("non-finite value at y = {y}")]
    NonFinite { y: f64 },
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(l: Expr, r: Expr) -> Expr {
        Expr::Add(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(l: Expr, r: Expr) -> Expr {
        Expr::Sub(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(l: Expr, r: Expr) -> Expr {
        Expr::Mul(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(l: Expr, r: Expr) -> Expr {
        Expr::Div(Box::new(l), Box::new(r))
    }

    pub fn pow(base: Expr, n: i32) -> Expr {
        Expr::Pow(Box::new(base), n)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// True when the tree does not mention `y`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Pi => true,
            Expr::Var => false,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.is_constant(),
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.is_constant() && r.is_constant()
            }
        }
    }

    /// Evaluates the expression at `y`, reporting domain faults instead of
    /// producing NaN or infinities.
    pub fn eval(&self, y: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var => y,
            Expr::Neg(e) => -e.eval(y)?,
            Expr::Add(l, r) => l.eval(y)? + r.eval(y)?,
            Expr::Sub(l, r) => l.eval(y)? - r.eval(y)?,
            Expr::Mul(l, r) => l.eval(y)? * r.eval(y)?,
            Expr::Div(l, r) => {
                let num = l.eval(y)?;
                let den = r.eval(y)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero { y });
                }
                num / den
            }
            Expr::Pow(base, n) => {
                let b = base.eval(y)?;
                if b == 0.0 && *n < 0 {
                    return Err(EvalError::DivisionByZero { y });
                }
                b.powi(*n)
            }
            Expr::Call(f, arg) => {
                let u = arg.eval(y)?;
                match f {
                    Func::Cos => u.cos(),
                    Func::Sin => u.sin(),
                    Func::Exp => u.exp(),
                    Func::Abs => u.abs(),
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(EvalError::NegativeSqrt { y, arg: u });
                        }
                        u.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { y })
        }
    }

    /// Exact symbolic derivative with respect to `y`, lightly simplified.
    ///
    /// `abs(u)` differentiates to `u/abs(u)*u'`, which is undefined where `u`
    /// vanishes; validation rejects such functions as not continuously
    /// differentiable.
    pub fn differentiate(&self) -> Expr {
        self.derivative_raw().simplify()
    }

    fn derivative_raw(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Pi => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Neg(e) => Expr::neg(e.derivative_raw()),
            Expr::Add(l, r) => Expr::add(l.derivative_raw(), r.derivative_raw()),
            Expr::Sub(l, r) => Expr::sub(l.derivative_raw(), r.derivative_raw()),
            Expr::Mul(l, r) => Expr::add(
                Expr::mul(l.derivative_raw(), (**r).clone()),
                Expr::mul((**l).clone(), r.derivative_raw()),
            ),
            Expr::Div(l, r) => Expr::div(
                Expr::sub(
                    Expr::mul(l.derivative_raw(), (**r).clone()),
                    Expr::mul((**l).clone(), r.derivative_raw()),
                ),
                Expr::pow((**r).clone(), 2),
            ),
            Expr::Pow(base, n) => {
                let coeff = if *n < 0 {
                    Expr::neg(Expr::Const(f64::from(n.unsigned_abs())))
                } else {
                    Expr::Const(f64::from(*n))
                };
                Expr::mul(
                    Expr::mul(coeff, Expr::pow((**base).clone(), n - 1)),
                    base.derivative_raw(),
                )
            }
            Expr::Call(f, arg) => {
                let u = (**arg).clone();
                let du = arg.derivative_raw();
                let outer = match f {
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, u)),
                    Func::Sin => Expr::call(Func::Cos, u),
                    Func::Exp => Expr::call(Func::Exp, u),
                    Func::Sqrt => Expr::div(
                        Expr::Const(1.0),
                        Expr::mul(Expr::Const(2.0), Expr::call(Func::Sqrt, u)),
                    ),
                    Func::Abs => Expr::div(u.clone(), Expr::call(Func::Abs, u)),
                };
                Expr::mul(outer, du)
            }
        }
    }

    /// Constant folding and removal of neutral elements. Not a CAS.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::Var => self.clone(),
            Expr::Neg(e) => match e.simplify() {
                Expr::Const(c) if c == 0.0 => Expr::Const(0.0),
                Expr::Neg(inner) => *inner,
                s => Expr::neg(s),
            },
            Expr::Add(l, r) => match (l.simplify(), r.simplify()) {
                (Expr::Const(a), Expr::Const(b)) => Expr::Const(a + b),
                (Expr::Const(z), s) | (s, Expr::Const(z)) if z == 0.0 => s,
                (a, Expr::Neg(b)) => Expr::sub(a, *b),
                (a, b) => Expr::add(a, b),
            },
            Expr::Sub(l, r) => match (l.simplify(), r.simplify()) {
                (Expr::Const(a), Expr::Const(b)) if a >= b => Expr::Const(a - b),
                (s, Expr::Const(z)) if z == 0.0 => s,
                (Expr::Const(z), s) if z == 0.0 => Expr::neg(s).simplify(),
                (a, b) => Expr::sub(a, b),
            },
            Expr::Mul(l, r) => match (l.simplify(), r.simplify()) {
                (Expr::Const(a), Expr::Const(b)) => Expr::Const(a * b),
                (Expr::Const(z), _) | (_, Expr::Const(z)) if z == 0.0 => Expr::Const(0.0),
                (Expr::Const(o), s) | (s, Expr::Const(o)) if o == 1.0 => s,
                (Expr::Neg(a), b) => Expr::neg(Expr::mul(*a, b).simplify()),
                (a, Expr::Neg(b)) => Expr::neg(Expr::mul(a, *b).simplify()),
                (a, b) => Expr::mul(a, b),
            },
            Expr::Div(l, r) => match (l.simplify(), r.simplify()) {
                (Expr::Const(z), _) if z == 0.0 => Expr::Const(0.0),
                (s, Expr::Const(o)) if o == 1.0 => s,
                (a, b) => Expr::div(a, b),
            },
            Expr::Pow(base, n) => match (base.simplify(), *n) {
                (_, 0) => Expr::Const(1.0),
                (s, 1) => s,
                (Expr::Const(c), n) if c != 0.0 || n > 0 => Expr::Const(c.powi(n)),
                (s, n) => Expr::pow(s, n),
            },
            Expr::Call(f, arg) => Expr::call(*f, arg.simplify()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Pi | Expr::Var | Expr::Call(..) => 5,
        }
    }
}

struct Operand<'a> {
    expr: &'a Expr,
    min: u8,
}

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.precedence() < self.min {
            write!(f, "({})", self.expr)
        } else {
            write!(f, "{}", self.expr)
        }
    }
}

fn operand(expr: &Expr, min: u8) -> Operand<'_> {
    Operand { expr, min }
}

/// Prints with the minimal parentheses needed for the parser to rebuild the
/// same tree. Negative literals (never produced by the parser) print as
/// unary minus applied to a literal.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{})", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var => f.write_str("y"),
            Expr::Neg(e) => write!(f, "-{}", operand(e, 3)),
            Expr::Add(l, r) => write!(f, "{} + {}", operand(l, 1), operand(r, 2)),
            Expr::Sub(l, r) => write!(f, "{} - {}", operand(l, 1), operand(r, 2)),
            Expr::Mul(l, r) => write!(f, "{}*{}", operand(l, 2), operand(r, 3)),
            Expr::Div(l, r) => write!(f, "{}/{}", operand(l, 2), operand(r, 3)),
            Expr::Pow(b, n) => write!(f, "{}^{}", operand(b, 5), n),
            Expr::Call(func, arg) => write!(f, "{}({})", func.name(), arg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_constant_is_zero() {
        assert_eq!(Expr::Const(3.0).differentiate(), Expr::Const(0.0));
        assert_eq!(Expr::Pi.differentiate().to_string(), "0");
    }

    #[test]
    fn power_rule_prints_compactly() {
        let d = Expr::pow(Expr::Var, 2).differentiate();
        assert_eq!(d, Expr::mul(Expr::Const(2.0), Expr::Var));
        assert_eq!(d.to_string(), "2*y");
    }

    #[test]
    fn chain_rule_for_cosine() {
        let d = Expr::call(Func::Cos, Expr::Var).differentiate();
        assert_eq!(d, Expr::neg(Expr::call(Func::Sin, Expr::Var)));
        assert_eq!(d.to_string(), "-sin(y)");
    }

    #[test]
    fn negative_powers() {
        let e = Expr::pow(Expr::add(Expr::Const(2.0), Expr::Var), -2);
        let d = e.differentiate();
        for y in [-0.5, 0.0, 0.7] {
            let expected = -2.0 * (2.0 + y as f64).powi(-3);
            assert!((d.eval(y).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn domain_faults_are_reported() {
        let e = Expr::div(Expr::Const(1.0), Expr::Var);
        assert_eq!(e.eval(0.0), Err(EvalError::DivisionByZero { y: 0.0 }));
        let s = Expr::call(Func::Sqrt, Expr::Var);
        assert!(matches!(s.eval(-0.25), Err(EvalError::NegativeSqrt { .. })));
        assert_eq!(s.eval(0.25), Ok(0.5));
    }

    #[test]
    fn abs_derivative_is_undefined_at_the_kink() {
        let d = Expr::call(Func::Abs, Expr::Var).differentiate();
        assert!(d.eval(0.0).is_err());
        assert_eq!(d.eval(-0.3), Ok(-1.0));
    }

    #[test]
    fn simplify_folds_neutral_elements() {
        let e = Expr::add(
            Expr::mul(Expr::Const(1.0), Expr::Var),
            Expr::mul(Expr::Const(0.0), Expr::call(Func::Exp, Expr::Var)),
        );
        assert_eq!(e.simplify(), Expr::Var);
    }
}
