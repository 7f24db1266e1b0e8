//! Signed reals stored as a sign and a natural-log magnitude.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ln_big;

/// Largest |log_abs| for which [`LogReal::to_f64`] converts.
pub const MAX_LOG_F64: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn value(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    fn from_value(v: i8) -> Self {
        match v.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

/// A real number `sign * exp(log_abs)`.
///
/// `log_abs` is meaningless (kept at `-inf`) when the sign is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogReal {
    pub sign: Sign,
    pub log_abs: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: Sign::Zero,
        log_abs: f64::NEG_INFINITY,
    };

    pub const ONE: LogReal = LogReal {
        sign: Sign::Positive,
        log_abs: 0.0,
    };

    /// The positive number `exp(log_abs)`.
    pub fn from_ln(log_abs: f64) -> Self {
        if log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogReal {
                sign: Sign::Positive,
                log_abs,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogReal {
                sign: if x > 0.0 { Sign::Positive } else { Sign::Negative },
                log_abs: x.abs().ln(),
            }
        }
    }

    pub fn from_big(x: &BigUint) -> Self {
        Self::from_ln(ln_big(x))
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// Natural log of the value; `-inf` for zero. Errors on negative values.
    pub fn ln(&self) -> Result<f64> {
        match self.sign {
            Sign::Negative => Err(Error::Domain("log of a negative LogReal".into())),
            Sign::Zero => Ok(f64::NEG_INFINITY),
            Sign::Positive => Ok(self.log_abs),
        }
    }

    pub fn log10(&self) -> Result<f64> {
        Ok(self.ln()? / std::f64::consts::LN_10)
    }

    /// Converts to f64, refusing magnitudes beyond `exp(±700)`.
    pub fn to_f64(&self) -> Result<f64> {
        match self.sign {
            Sign::Zero => Ok(0.0),
            s => {
                if self.log_abs.abs() >= MAX_LOG_F64 || !self.log_abs.is_finite() {
                    return Err(Error::OutOfRange(self.log_abs));
                }
                Ok(s.value() as f64 * self.log_abs.exp())
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_zero() {
            *self
        } else {
            LogReal {
                sign: Sign::Positive,
                log_abs: self.log_abs,
            }
        }
    }

    /// Raises a positive value to a real power.
    pub fn powf(&self, e: f64) -> Self {
        match self.sign {
            Sign::Zero => {
                if e == 0.0 {
                    Self::ONE
                } else {
                    Self::ZERO
                }
            }
            _ => LogReal {
                sign: Sign::Positive,
                log_abs: self.log_abs * e,
            },
        }
    }

    /// Sum of two values in log space.
    pub fn add(&self, other: &LogReal) -> LogReal {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.log_abs >= other.log_abs {
            (self, other)
        } else {
            (other, self)
        };
        let d = small.log_abs - big.log_abs;
        if big.sign == small.sign {
            LogReal {
                sign: big.sign,
                log_abs: big.log_abs + d.exp().ln_1p(),
            }
        } else if d == 0.0 {
            Self::ZERO
        } else {
            LogReal {
                sign: big.sign,
                log_abs: big.log_abs + (-d.exp()).ln_1p(),
            }
        }
    }

    pub fn sub(&self, other: &LogReal) -> LogReal {
        self.add(&-*other)
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal {
            sign: Sign::from_value(-self.sign.value()),
            log_abs: self.log_abs,
        }
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        let sign = Sign::from_value(self.sign.value() * rhs.sign.value());
        if sign == Sign::Zero {
            return LogReal::ZERO;
        }
        LogReal {
            sign,
            log_abs: self.log_abs + rhs.log_abs,
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    /// Division by zero yields an infinite magnitude.
    fn div(self, rhs: LogReal) -> LogReal {
        if self.is_zero() {
            return LogReal::ZERO;
        }
        if rhs.is_zero() {
            return LogReal {
                sign: self.sign,
                log_abs: f64::INFINITY,
            };
        }
        LogReal {
            sign: Sign::from_value(self.sign.value() * rhs.sign.value()),
            log_abs: self.log_abs - rhs.log_abs,
        }
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (a, b) = (self.sign.value(), other.sign.value());
        if a != b {
            return a.partial_cmp(&b);
        }
        match self.sign {
            Sign::Zero => Some(Ordering::Equal),
            Sign::Positive => self.log_abs.partial_cmp(&other.log_abs),
            Sign::Negative => other.log_abs.partial_cmp(&self.log_abs),
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            s => {
                let prefix = if s == Sign::Negative { "-" } else { "" };
                write!(f, "{prefix}10^{:.6}", self.log_abs / std::f64::consts::LN_10)
            }
        }
    }
}
