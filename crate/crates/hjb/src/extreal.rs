//! Extended-real scalars: finite values plus the two infinities as explicit
//! tokens, never large-sentinel floats.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use crate::error::Error;

/// An element of the extended real line.
///
/// `PlusInf` compares greater than every finite value, `MinusInf` less.
/// Finite payloads are always non-NaN (constructors reject NaN).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ExtRealRepr", try_from = "ExtRealRepr")]
pub enum ExtReal {
    MinusInf,
    Finite(f64),
    PlusInf,
}

impl ExtReal {
    pub fn finite(v: f64) -> Result<Self, Error> {
        if v.is_nan() {
            return Err(Error::NotANumber);
        }
        if v.is_infinite() {
            return Ok(if v > 0.0 {
                ExtReal::PlusInf
            } else {
                ExtReal::MinusInf
            });
        }
        Ok(ExtReal::Finite(v))
    }

    /// Converts an IEEE float, mapping the infinities onto the tokens.
    pub fn from_f64(v: f64) -> Result<Self, Error> {
        Self::finite(v)
    }

    /// The IEEE image of this value (`+inf`/`-inf` for the tokens).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::MinusInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v,
            ExtReal::PlusInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_plus_inf(self) -> bool {
        matches!(self, ExtReal::PlusInf)
    }

    pub fn is_minus_inf(self) -> bool {
        matches!(self, ExtReal::MinusInf)
    }

    /// Addition on the extended line. `PlusInf + MinusInf` is rejected:
    /// proper functions never take the value `-inf`, and silently resolving
    /// the indeterminate form would corrupt conjugate scans.
    pub fn checked_add(self, rhs: ExtReal) -> Result<ExtReal, Error> {
        use ExtReal::*;
        match (self, rhs) {
            (PlusInf, MinusInf) | (MinusInf, PlusInf) => Err(Error::IndeterminateSum),
            (PlusInf, _) | (_, PlusInf) => Ok(PlusInf),
            (MinusInf, _) | (_, MinusInf) => Ok(MinusInf),
            (Finite(a), Finite(b)) => ExtReal::finite(a + b),
        }
    }

    pub fn min(self, rhs: ExtReal) -> ExtReal {
        if self <= rhs {
            self
        } else {
            rhs
        }
    }

    pub fn max(self, rhs: ExtReal) -> ExtReal {
        if self >= rhs {
            self
        } else {
            rhs
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtReal::*;
        Some(match (self, other) {
            (MinusInf, MinusInf) | (PlusInf, PlusInf) => Ordering::Equal,
            (MinusInf, _) | (_, PlusInf) => Ordering::Less,
            (PlusInf, _) | (_, MinusInf) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.partial_cmp(b)?,
        })
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::MinusInf => write!(f, "-inf"),
            ExtReal::PlusInf => write!(f, "inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl std::str::FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "+inf" => Ok(ExtReal::PlusInf),
            "-inf" => Ok(ExtReal::MinusInf),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad extended-real literal {other:?}")))?;
                ExtReal::finite(v)
            }
        }
    }
}

/// Serde image: `"inf"`, `"-inf"`, or a JSON number.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtRealRepr {
    Num(f64),
    Tok(String),
}

impl From<ExtReal> for ExtRealRepr {
    fn from(v: ExtReal) -> Self {
        match v {
            ExtReal::Finite(x) => ExtRealRepr::Num(x),
            ExtReal::PlusInf => ExtRealRepr::Tok("inf".to_owned()),
            ExtReal::MinusInf => ExtRealRepr::Tok("-inf".to_owned()),
        }
    }
}

impl TryFrom<ExtRealRepr> for ExtReal {
    type Error = Error;

    fn try_from(r: ExtRealRepr) -> Result<Self, Error> {
        match r {
            ExtRealRepr::Num(x) => ExtReal::finite(x),
            ExtRealRepr::Tok(s) => s.parse(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_places_infinities_at_the_ends() {
        assert!(ExtReal::PlusInf > ExtReal::Finite(1e300));
        assert!(ExtReal::MinusInf < ExtReal::Finite(-1e300));
        assert!(ExtReal::Finite(1.0) < ExtReal::Finite(2.0));
    }

    #[test]
    fn indeterminate_sum_is_rejected() {
        assert!(ExtReal::PlusInf.checked_add(ExtReal::MinusInf).is_err());
        assert!(ExtReal::MinusInf.checked_add(ExtReal::PlusInf).is_err());
        assert_eq!(
            ExtReal::PlusInf.checked_add(ExtReal::Finite(-5.0)).unwrap(),
            ExtReal::PlusInf
        );
    }

    #[test]
    fn nan_is_rejected() {
        assert!(ExtReal::finite(f64::NAN).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["inf", "-inf", "1.5", "-0.25"] {
            let v: ExtReal = s.parse().unwrap();
            let back: ExtReal = v.to_string().parse().unwrap();
            assert_eq!(v, back);
        }
    }
}
