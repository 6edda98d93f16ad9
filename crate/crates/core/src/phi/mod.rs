//! The prescribed function `φ`, written as an expression in `y = ⟨N, e₃⟩`.
//!
//! Expressions are parsed, differentiated symbolically, and then certified on
//! a uniform grid: the function must be even and must not vanish. Only a
//! certified [`PrescribedFunction`] reaches the integrator.

mod expr;
mod parse;

use std::fmt;

use thiserror::Error;

pub use expr::{EvalError, Expr, Func};
pub use parse::{parse_phi, ParseError};

/// Number of uniform points on `[-1, 1]` used for certification.
pub const VALIDATION_GRID: usize = 1001;
/// Absolute tolerance for `φ(y) = φ(-y)`.
pub const EVENNESS_TOL: f64 = 1e-10;
/// Smallest admissible `|φ|` on the grid.
pub const VANISHING_TOL: f64 = 1e-8;

/// Points of the validation grid, symmetric bit-for-bit about zero.
pub fn validation_grid() -> impl Iterator<Item = f64> {
    let half = (VALIDATION_GRID - 1) as f64 / 2.0;
    (0..VALIDATION_GRID).map(move |i| (i as f64 - half) / half)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
    /// Only produced by the comparison escape hatch for `φ ≡ 0`.
    Zero,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhiError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("prescribed function is not even: |φ(y) - φ(-y)| = {deviation:e} at y = {y}")]
    NotEven { y: f64, deviation: f64 },
    #[error("prescribed function vanishes: |φ(y)| = {value:e} at y = ±{y}")]
    Vanishing { y: f64, value: f64 },
    #[error("the vanishing escape admits only φ ≡ 0, found φ({y}) = {value}")]
    NonZeroComparison { y: f64, value: f64 },
    #[error("evaluation failed during validation: {0}")]
    Eval(#[from] EvalError),
}

/// A certified prescribed function together with its exact derivative.
///
/// Immutable after construction and `Sync`, so one instance can feed any
/// number of concurrent integrations.
#[derive(Debug, Clone)]
pub struct PrescribedFunction {
    source: String,
    expr: Expr,
    deriv: Expr,
    sign: Sign,
    evenness_certified: bool,
    constant: Option<f64>,
}

impl PrescribedFunction {
    /// Parses and certifies `src`.
    pub fn parse(src: &str) -> Result<Self, PhiError> {
        validate(parse_phi(src)?)
    }

    /// `φ ≡ c` for a non-zero constant.
    pub fn constant(c: f64) -> Result<Self, PhiError> {
        validate(Expr::Const(c))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn derivative(&self) -> &Expr {
        &self.deriv
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn evenness_certified(&self) -> bool {
        self.evenness_certified
    }

    /// True only for the test-only `φ ≡ 0` comparison function.
    pub fn allows_vanishing(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// The constant value when `φ` does not depend on `y`.
    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// `λφ`, recertified. Used by the sign and scale normalizations.
    pub fn scaled(&self, lambda: f64) -> Result<Self, PhiError> {
        if lambda == 1.0 {
            return Ok(self.clone());
        }
        let expr = match self.constant {
            Some(c) => Expr::Const(lambda * c),
            None => Expr::mul(Expr::Const(lambda), self.expr.clone()),
        };
        if self.allows_vanishing() {
            validate_allow_vanishing(expr)
        } else {
            validate(expr)
        }
    }

    /// `φ(y)`. Certification guarantees this succeeds on `[-1, 1]`.
    #[inline]
    pub fn value(&self, y: f64) -> f64 {
        if let Some(c) = self.constant {
            return c;
        }
        self.expr.eval(y).unwrap_or(f64::NAN)
    }

    /// `φ'(y)` from the symbolic derivative.
    pub fn deriv_value(&self, y: f64) -> f64 {
        if self.constant.is_some() {
            return 0.0;
        }
        self.deriv.eval(y).unwrap_or(f64::NAN)
    }
}

impl fmt::Display for PrescribedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

/// Certifies evenness and non-vanishing on the validation grid.
pub fn validate(expr: Expr) -> Result<PrescribedFunction, PhiError> {
    certify(expr, false)
}

/// Variant of [`validate`] that admits `φ ≡ 0`, used only as the comparison
/// function for the `φ = 0` first integral. Evenness is still enforced, but
/// any non-zero value is rejected so this cannot smuggle in a general
/// vanishing function.
pub fn validate_allow_vanishing(expr: Expr) -> Result<PrescribedFunction, PhiError> {
    certify(expr, true)
}

fn certify(expr: Expr, allow_zero: bool) -> Result<PrescribedFunction, PhiError> {
    let deriv = expr.differentiate();
    let mut values = Vec::with_capacity(VALIDATION_GRID);
    for y in validation_grid() {
        values.push(expr.eval(y)?);
        deriv.eval(y)?;
    }

    // Grid is symmetric: values[i] pairs with values[n - 1 - i].
    let n = values.len();
    let mut worst = (0.0f64, 0.0f64);
    for (i, y) in validation_grid().enumerate().skip(n / 2) {
        let dev = (values[i] - values[n - 1 - i]).abs();
        if dev > worst.1 || (dev == worst.1 && dev > 0.0) {
            worst = (y, dev);
        }
    }
    if worst.1 > EVENNESS_TOL {
        return Err(PhiError::NotEven {
            y: worst.0,
            deviation: worst.1,
        });
    }

    let source = expr.to_string();
    let constant = if expr.is_constant() {
        Some(expr.eval(0.0)?)
    } else {
        None
    };

    if allow_zero {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| **v != 0.0) {
            let y = validation_grid().nth(i).unwrap_or_default();
            return Err(PhiError::NonZeroComparison { y, value: *v });
        }
        return Ok(PrescribedFunction {
            source,
            expr,
            deriv,
            sign: Sign::Zero,
            evenness_certified: true,
            constant: Some(0.0),
        });
    }

    let (imin, vmin) = values
        .iter()
        .enumerate()
        .skip(n / 2)
        .map(|(i, v)| (i, v.abs()))
        .fold((n / 2, f64::INFINITY), |acc, (i, v)| {
            if v <= acc.1 {
                (i, v)
            } else {
                acc
            }
        });
    if vmin < VANISHING_TOL {
        return Err(PhiError::Vanishing {
            y: validation_grid().nth(imin).unwrap_or_default(),
            value: vmin,
        });
    }
    let positive = values[0] > 0.0;
    if let Some(i) = values.iter().position(|v| (*v > 0.0) != positive) {
        return Err(PhiError::Vanishing {
            y: validation_grid().nth(i).unwrap_or_default().abs(),
            value: values[i].abs(),
        });
    }

    Ok(PrescribedFunction {
        source,
        expr,
        deriv,
        sign: if positive {
            Sign::Positive
        } else {
            Sign::Negative
        },
        evenness_certified: true,
        constant,
    })
}
