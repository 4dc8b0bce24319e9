//! Prime-field arithmetic for rank probing.
//!
//! Elements are plain `u64` values reduced into `[0, p)`; the modulus is
//! carried by a [`PrimeField`] context. Primes are 62-bit so that products
//! fit in `u128` with room to spare.

use num::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::error::NgError;

/// Deterministic Miller-Rabin witnesses; sufficient for all `u64` inputs.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Arithmetic context for the field F_p. Values live in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Creates the field F_p; `p` must be prime.
    pub fn new(p: u64) -> Result<Self, NgError> {
        if !is_prime(p) {
            return Err(NgError::Config(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    /// The modulus.
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero mod p.
    pub fn inv(&self, a: u64) -> Result<u64, NgError> {
        let a = a % self.p;
        if a == 0 {
            return Err(NgError::BadPrime(self.p));
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Reduces a signed integer into `[0, p)`.
    pub fn from_i64(&self, v: i64) -> u64 {
        let r = v.rem_euclid(self.p as i64);
        r as u64
    }

    /// Reduces a rational mod p. Fails when p divides the denominator.
    pub fn from_rational(&self, q: &BigRational) -> Result<u64, NgError> {
        let p_big = num::BigInt::from(self.p);
        let reduce = |x: &num::BigInt| {
            num::Integer::mod_floor(x, &p_big)
                .to_u64()
                .expect("residue fits u64")
        };
        let num = reduce(q.numer());
        let den = reduce(q.denom());
        if den == 0 {
            return Err(NgError::BadPrime(self.p));
        }
        Ok(self.mul(num, self.inv(den)?))
    }

    /// Reduces an arbitrary-precision integer into `[0, p)`.
    pub fn from_bigint(&self, v: &num::BigInt) -> u64 {
        let p_big = num::BigInt::from(self.p);
        num::Integer::mod_floor(v, &p_big)
            .to_u64()
            .expect("residue fits u64")
    }
}

/// Deterministic Miller-Rabin primality test for `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n == w {
            return true;
        }
        if n % w == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let field = PrimeField { p: n };
    'witness: for &w in &WITNESSES {
        let mut x = field.pow(w, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = field.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Draws a random 62-bit prime from a seeded generator.
pub fn random_prime<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let candidate = rng.gen_range((1u64 << 61)..(1u64 << 62)) | 1;
        if is_prime(candidate) {
            return candidate;
        }
    }
}
