//! Exact rational scalars, p-adic valuations, p-power denominators and
//! naive logarithmic heights on the rationals.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Reduced fraction with arbitrary-precision numerator and positive
/// denominator. `BigRational` normalises on construction, so the
/// gcd/sign invariants hold for every value.
pub type ExactRational = BigRational;

/// A validated prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

const TRIAL_LIMIT: u64 = 1 << 16;

/// Trial division by every candidate below 2^16, then deterministic
/// Miller-Rabin for anything that survives and exceeds 2^32.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d < TRIAL_LIMIT && d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if d * d > n {
        return true;
    }
    miller_rabin(n)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// These twelve bases are a deterministic witness set for all n < 2^64.
fn miller_rabin(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n == b {
            return true;
        }
        if n.is_multiple_of(b) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Largest `e` with `p^e | n`.
pub fn nu_p(p: Prime, n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroValuation);
    }
    let p = p.get();
    let mut n = n;
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// Valuation of a nonzero big integer (sign ignored); `None` for zero.
pub fn nu_p_bigint(p: Prime, n: &BigInt) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigUint::from(p.get());
    let mut m = n.magnitude().clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(e);
        }
        m = q;
        e += 1;
    }
}

/// `ν_p` of a rational. Zero carries an explicit infinite marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn value(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl std::ops::Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

pub fn nu_p_rational(p: Prime, x: &ExactRational) -> Valuation {
    match nu_p_bigint(p, x.numer()) {
        None => Valuation::Infinite,
        Some(num) => {
            let den = nu_p_bigint(p, x.denom()).expect("denominator is nonzero");
            Valuation::Finite(num as i64 - den as i64)
        }
    }
}

/// Outcome of the p-power denominator test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PPowerDenominator {
    /// Reduced denominator equals `p^k` for some `k >= 0`.
    pub is_p_power: bool,
    /// `k` when `is_p_power` holds.
    pub exponent: Option<u64>,
    /// Numerator is prime to `p` (meaningful when `k > 0`; `true` for integers).
    pub numerator_coprime: bool,
}

impl PPowerDenominator {
    /// Both the denominator shape and, for proper fractions, numerator coprimality hold.
    pub fn holds(&self) -> bool {
        self.is_p_power && self.numerator_coprime
    }
}

pub fn is_p_power_denominator(p: Prime, x: &ExactRational) -> PPowerDenominator {
    let pb = BigInt::from(p.get());
    let mut den = x.denom().clone();
    let mut k = 0u64;
    while !den.is_one() {
        let (q, r) = den.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        den = q;
        k += 1;
    }
    let is_p_power = den.is_one();
    let numerator_coprime = if k == 0 {
        true
    } else {
        !(x.numer() % &pb).is_zero()
    };
    PPowerDenominator {
        is_p_power,
        exponent: is_p_power.then_some(k),
        numerator_coprime,
    }
}

/// Natural log of a positive big integer, accurate to f64 precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log of zero");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `log max(|a|, b)` for the reduced fraction `a/b`; zero has height 0.
pub fn rational_height(x: &ExactRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let a = x.numer().magnitude();
    let b = x.denom().magnitude();
    ln_biguint(if a > b { a } else { b })
}

/// Height of an integer coefficient, `log |n|` (0 for `n = 0`).
pub fn integer_height(n: &BigInt) -> f64 {
    if n.is_zero() {
        0.0
    } else {
        ln_biguint(n.magnitude())
    }
}

pub fn rat(n: i64, d: i64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Render as `num/den` with decimal digits; integers keep the `/1`.
pub fn format_rational(x: &ExactRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse `a/b`, `a`, or a terminating decimal such as `-0.125`.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse rational {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !frac_part.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac_part.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac_part}");
        let mut num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
        return Ok(BigRational::new(num, den));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}
