//! Exact scalars: arbitrary-precision rationals or prime-field elements.
//!
//! Rationals are kept in lowest terms with a positive denominator (the
//! `BigRational` normal form). Prime-field values are reduced into `[0, p)`.
//! Mixed-field arithmetic is a shape error, never a coercion.

use num::{BigInt, BigRational};
use num_traits::{One, Zero};
use std::fmt;
use std::str::FromStr;

use crate::error::NgError;
use crate::polyalg::fp::PrimeField;

/// An exact scalar over Q or over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Rat(BigRational),
    Mod { value: u64, prime: u64 },
}

impl Scalar {
    pub fn from_int(v: i64) -> Self {
        Scalar::Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Scalar::Rat(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn as_rational(&self) -> Result<&BigRational, NgError> {
        match self {
            Scalar::Rat(q) => Ok(q),
            Scalar::Mod { .. } => Err(NgError::Shape("expected a rational scalar".into())),
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, NgError> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a + b)),
            (Scalar::Mod { value: a, prime: p }, Scalar::Mod { value: b, prime: q }) if p == q => {
                let f = field(*p);
                Ok(Scalar::Mod { value: f.add(*a, *b), prime: *p })
            }
            _ => Err(mixed()),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, NgError> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Mod { value: a, prime: p }, Scalar::Mod { value: b, prime: q }) if p == q => {
                let f = field(*p);
                Ok(Scalar::Mod { value: f.mul(*a, *b), prime: *p })
            }
            _ => Err(mixed()),
        }
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Rat(a) => {
                let mut acc = BigRational::one();
                for _ in 0..exp {
                    acc *= a;
                }
                Scalar::Rat(acc)
            }
            Scalar::Mod { value, prime } => {
                let f = field(*prime);
                Scalar::Mod { value: f.pow(*value, exp as u64), prime: *prime }
            }
        }
    }
}

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).expect("Scalar::Mod always stores a valid prime")
}

fn mixed() -> NgError {
    NgError::Shape("scalars from different fields".into())
}

/// Renders a rational in the canonical `num/den` form, e.g. `-3/2` or `5/1`.
pub fn rational_to_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `num/den` (or a bare integer) into a normalized rational.
pub fn rational_from_str(s: &str) -> Result<BigRational, NgError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num)
        .map_err(|e| NgError::Config(format!("bad rational numerator {num:?}: {e}")))?;
    let d = BigInt::from_str(den)
        .map_err(|e| NgError::Config(format!("bad rational denominator {den:?}: {e}")))?;
    if d.is_zero() {
        return Err(NgError::Config(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(q) => write!(f, "{}", rational_to_string(q)),
            Scalar::Mod { value, prime } => write!(f, "{value} mod {prime}"),
        }
    }
}
