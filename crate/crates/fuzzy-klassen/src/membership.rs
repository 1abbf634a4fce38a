//! Piecewise-linear membership functions.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MembershipError {
    #[error("membership breakpoints must be finite")]
    NonFiniteBreakpoint,
    #[error("membership breakpoints out of order: {0}")]
    UnorderedBreakpoints(String),
}

/// A membership function mapping universe values to degrees in `[0, 1]`.
///
/// Evaluation is total over all real `x` and exact at the breakpoints:
/// plateau edges evaluate to 1, outer feet to 0.
#[derive(Debug, Clone, PartialEq)]
pub enum MembershipFunction {
    /// 1 for `x <= a`, 0 for `x >= b`, linear in between.
    RampDown { a: f64, b: f64 },
    /// 0 for `x <= a`, 1 for `x >= b`, linear in between.
    RampUp { a: f64, b: f64 },
    /// 0 outside `[a, c]`, 1 at `b`, linear on each side.
    Triangle { a: f64, b: f64, c: f64 },
    /// 0 outside `[a, d]`, 1 on `[b, c]`, linear shoulders.
    Trapezoid { a: f64, b: f64, c: f64, d: f64 },
}

impl MembershipFunction {
    pub fn ramp_down(a: f64, b: f64) -> Result<Self, MembershipError> {
        check_finite(&[a, b])?;
        if a < b {
            Ok(Self::RampDown { a, b })
        } else {
            Err(MembershipError::UnorderedBreakpoints(format!(
                "ramp requires a < b, got ({a}, {b})"
            )))
        }
    }

    pub fn ramp_up(a: f64, b: f64) -> Result<Self, MembershipError> {
        check_finite(&[a, b])?;
        if a < b {
            Ok(Self::RampUp { a, b })
        } else {
            Err(MembershipError::UnorderedBreakpoints(format!(
                "ramp requires a < b, got ({a}, {b})"
            )))
        }
    }

    pub fn triangle(a: f64, b: f64, c: f64) -> Result<Self, MembershipError> {
        check_finite(&[a, b, c])?;
        if a < b && b < c {
            Ok(Self::Triangle { a, b, c })
        } else {
            Err(MembershipError::UnorderedBreakpoints(format!(
                "triangle requires a < b < c, got ({a}, {b}, {c})"
            )))
        }
    }

    pub fn trapezoid(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MembershipError> {
        check_finite(&[a, b, c, d])?;
        if a < b && b <= c && c < d {
            Ok(Self::Trapezoid { a, b, c, d })
        } else {
            Err(MembershipError::UnorderedBreakpoints(format!(
                "trapezoid requires a < b <= c < d, got ({a}, {b}, {c}, {d})"
            )))
        }
    }

    /// Degree of membership at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::RampDown { a, b } => {
                if x <= a {
                    1.0
                } else if x >= b {
                    0.0
                } else {
                    (b - x) / (b - a)
                }
            }
            Self::RampUp { a, b } => {
                if x <= a {
                    0.0
                } else if x >= b {
                    1.0
                } else {
                    (x - a) / (b - a)
                }
            }
            Self::Triangle { a, b, c } => {
                if x <= a || x >= c {
                    0.0
                } else if x == b {
                    1.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (c - x) / (c - b)
                }
            }
            Self::Trapezoid { a, b, c, d } => {
                if x <= a || x >= d {
                    0.0
                } else if x >= b && x <= c {
                    1.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (d - x) / (d - c)
                }
            }
        }
    }

    /// Outermost breakpoints `(first, last)`.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Self::RampDown { a, b } | Self::RampUp { a, b } => (a, b),
            Self::Triangle { a, c, .. } => (a, c),
            Self::Trapezoid { a, d, .. } => (a, d),
        }
    }
}

fn check_finite(points: &[f64]) -> Result<(), MembershipError> {
    if points.iter().all(|p| p.is_finite()) {
        Ok(())
    } else {
        Err(MembershipError::NonFiniteBreakpoint)
    }
}
