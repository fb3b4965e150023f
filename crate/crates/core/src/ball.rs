//! Complex fixed-point ball arithmetic.
//!
//! A [`CBall`] at precision `w` stores a midpoint `(re + i·im)·2^-w` with
//! big-integer components and a radius `rad·2^-w`. Every operation rounds
//! its midpoint and adds an upper bound for the rounding error and for the
//! propagated input radii, so the exact result always lies in the output
//! ball. Radii are only ever rounded up.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::ln_biguint;
use crate::error::{Error, Result};

/// Iteration cap for the series kernels; hitting it means the argument sits
/// too close to the unit circle for the requested precision.
const MAX_SERIES_TERMS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CBall {
    re: BigInt,
    im: BigInt,
    rad: BigUint,
    prec: u32,
}

fn round_shr(x: &BigInt, s: u32) -> (BigInt, bool) {
    if s == 0 || x.is_zero() {
        return (x.clone(), false);
    }
    let inexact = x.trailing_zeros().is_some_and(|tz| tz < s as u64);
    // `>>` on BigInt floors, so adding half an ulp rounds to nearest.
    let half = BigInt::one() << (s - 1);
    ((x + half) >> s, inexact)
}

pub(crate) fn ceil_shr(x: &BigUint, s: u32) -> BigUint {
    if s == 0 {
        return x.clone();
    }
    (x + ((BigUint::one() << s) - 1u32)) >> s
}

fn ceil_div(x: &BigUint, d: &BigUint) -> BigUint {
    let (q, r) = x.div_rem(d);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// `⌈√(re² + im²)⌉`.
fn mag_upper(re: &BigInt, im: &BigInt) -> BigUint {
    let sq = (re * re + im * im).magnitude().clone();
    let root = sq.sqrt();
    if &root * &root == sq {
        root
    } else {
        root + 1u32
    }
}

/// `⌊√(re² + im²)⌋`.
fn mag_lower(re: &BigInt, im: &BigInt) -> BigUint {
    (re * re + im * im).magnitude().sqrt()
}

fn floor_div_signed(x: &BigInt, d: &BigInt) -> (BigInt, bool) {
    let (q, r) = x.div_mod_floor(d);
    (q, !r.is_zero())
}

impl CBall {
    pub fn zero(prec: u32) -> Self {
        CBall {
            re: BigInt::zero(),
            im: BigInt::zero(),
            rad: BigUint::zero(),
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        CBall {
            re: BigInt::one() << prec,
            ..Self::zero(prec)
        }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        CBall {
            re: BigInt::from(n) << prec,
            ..Self::zero(prec)
        }
    }

    pub fn from_rational(x: &BigRational, prec: u32) -> Self {
        Self::from_complex_rational(x, &BigRational::zero(), prec)
    }

    pub fn from_complex_rational(re: &BigRational, im: &BigRational, prec: u32) -> Self {
        let conv = |q: &BigRational| floor_div_signed(&(q.numer() << prec), q.denom());
        let (re, inexact_re) = conv(re);
        let (im, inexact_im) = conv(im);
        // Each floored component is off by less than one ulp.
        let rad = BigUint::from(inexact_re as u32 + inexact_im as u32);
        CBall { re, im, rad, prec }
    }

    /// Ball from raw fixed-point parts.
    pub fn from_parts(re: BigInt, im: BigInt, rad: BigUint, prec: u32) -> Self {
        CBall { re, im, rad, prec }
    }

    #[inline]
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn re_raw(&self) -> &BigInt {
        &self.re
    }

    pub fn im_raw(&self) -> &BigInt {
        &self.im
    }

    pub fn rad_raw(&self) -> &BigUint {
        &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.rad.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Widen the radius by `extra` ulps.
    pub fn add_error(&self, extra: &BigUint) -> Self {
        CBall {
            rad: &self.rad + extra,
            ..self.clone()
        }
    }

    pub fn real_part(&self) -> Self {
        CBall {
            im: BigInt::zero(),
            ..self.clone()
        }
    }

    pub fn conj(&self) -> Self {
        CBall {
            im: -&self.im,
            ..self.clone()
        }
    }

    fn check_prec(&self, other: &Self) {
        assert_eq!(self.prec, other.prec, "ball precision mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_prec(other);
        CBall {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
            rad: &self.rad + &other.rad,
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_prec(other);
        CBall {
            re: &self.re - &other.re,
            im: &self.im - &other.im,
            rad: &self.rad + &other.rad,
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Self {
        CBall {
            re: -&self.re,
            im: -&self.im,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_prec(other);
        let w = self.prec;
        let re_full = &self.re * &other.re - &self.im * &other.im;
        let im_full = &self.re * &other.im + &self.im * &other.re;
        let (re, inexact_re) = round_shr(&re_full, w);
        let (im, inexact_im) = round_shr(&im_full, w);
        // Two half-ulp component errors stay below one ulp in modulus.
        let rounding = u32::from(inexact_re || inexact_im);
        let rad = if self.rad.is_zero() && other.rad.is_zero() {
            BigUint::from(rounding)
        } else {
            let a = mag_upper(&self.re, &self.im);
            let b = mag_upper(&other.re, &other.im);
            let prop = &a * &other.rad + &b * &self.rad + &self.rad * &other.rad;
            ceil_shr(&prop, w) + rounding
        };
        CBall {
            re,
            im,
            rad,
            prec: w,
        }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Exact multiplication by an integer.
    pub fn mul_int(&self, n: &BigInt) -> Self {
        CBall {
            re: &self.re * n,
            im: &self.im * n,
            rad: &self.rad * n.magnitude(),
            prec: self.prec,
        }
    }

    /// Division by a positive integer.
    pub fn div_uint(&self, n: &BigUint) -> Self {
        assert!(!n.is_zero(), "division by zero");
        let d = BigInt::from_biguint(Sign::Plus, n.clone());
        let (re, inexact_re) = floor_div_signed(&self.re, &d);
        let (im, inexact_im) = floor_div_signed(&self.im, &d);
        let rad = ceil_div(&self.rad, n) + (inexact_re as u32 + inexact_im as u32);
        CBall {
            re,
            im,
            rad,
            prec: self.prec,
        }
    }

    pub fn div_u64(&self, n: u64) -> Self {
        self.div_uint(&BigUint::from(n))
    }

    /// Multiply by `2^-s`.
    pub fn shr(&self, s: u32) -> Self {
        let (re, inexact_re) = round_shr(&self.re, s);
        let (im, inexact_im) = round_shr(&self.im, s);
        CBall {
            re,
            im,
            rad: ceil_shr(&self.rad, s) + u32::from(inexact_re || inexact_im),
            prec: self.prec,
        }
    }

    /// Same value at another precision (exact when increasing).
    pub fn with_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = prec - self.prec;
                CBall {
                    re: &self.re << s,
                    im: &self.im << s,
                    rad: &self.rad << s,
                    prec,
                }
            }
            Ordering::Less => {
                let mut out = self.shr(self.prec - prec);
                out.prec = prec;
                out
            }
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = CBall::one(self.prec);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Upper bound for `|z|` over the whole ball, in ulps.
    pub fn abs_upper_raw(&self) -> BigUint {
        mag_upper(&self.re, &self.im) + &self.rad
    }

    /// Lower bound for `|z|` over the ball, in ulps (zero if the ball reaches 0).
    pub fn abs_lower_raw(&self) -> BigUint {
        let m = mag_lower(&self.re, &self.im);
        if m > self.rad {
            m - &self.rad
        } else {
            BigUint::zero()
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower_raw().is_zero()
    }

    /// Whether the two balls intersect: `|mid_a - mid_b| <= r_a + r_b`.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.check_prec(other);
        let dr = &self.re - &other.re;
        let di = &self.im - &other.im;
        let dist_sq = (&dr * &dr + &di * &di).magnitude().clone();
        let r = &self.rad + &other.rad;
        dist_sq <= &r * &r
    }

    /// Whether `other` lies entirely inside `self`. Both balls are brought
    /// to the finer of the two precisions first.
    pub fn contains(&self, other: &Self) -> bool {
        let prec = self.prec.max(other.prec);
        let a = self.with_prec(prec);
        let b = other.with_prec(prec);
        if b.rad > a.rad {
            return false;
        }
        let dr = &a.re - &b.re;
        let di = &a.im - &b.im;
        let dist_sq = (&dr * &dr + &di * &di).magnitude().clone();
        let slack = &a.rad - &b.rad;
        dist_sq <= &slack * &slack
    }

    /// `exp(z)`: Taylor series on `z / 2^s`, then `s` squarings.
    pub fn exp(&self) -> Self {
        let w = self.prec;
        if self.is_exact_zero() {
            return CBall::one(w);
        }
        let m = self.abs_upper_raw();
        let s = (m.bits() as i64 - w as i64 + 10).max(0) as u32;
        let wp = w + s + 16;
        let z = self.with_prec(wp).shr(s);
        // |z| <= 2^-9 from here on, so each Taylor term shrinks by at least 2^9.
        let rho = z.abs_upper_raw();
        let mut sum = CBall::one(wp);
        let mut term = CBall::one(wp);
        // term_bound: upper bound of |z|^k / k! in ulps.
        let mut term_bound = BigUint::one() << wp;
        let mut k = 1u64;
        loop {
            term = term.mul(&z).div_u64(k);
            sum = sum.add(&term);
            term_bound = ceil_div(&ceil_shr(&(&term_bound * &rho), wp), &BigUint::from(k));
            let next = ceil_div(&ceil_shr(&(&term_bound * &rho), wp), &BigUint::from(k + 1));
            if next <= BigUint::one() || k as usize > MAX_SERIES_TERMS {
                // Remaining tail is at most twice its first term.
                sum = sum.add_error(&(next * 2u32));
                break;
            }
            k += 1;
        }
        for _ in 0..s {
            sum = sum.square();
        }
        sum.with_prec(w)
    }

    /// `log(1 - z)` on the principal branch, as `-Σ z^n/n`. Requires `|z| < 1`
    /// over the whole ball; the truncation tail `ρ^{n+1} / ((n+1)(1-ρ))`
    /// with `ρ` an upper bound of `|z|` joins the radius.
    pub fn log1m(&self) -> Result<Self> {
        let w = self.prec;
        if self.is_exact_zero() {
            return Ok(CBall::zero(w));
        }
        let unit = BigUint::one() << w;
        let rho = self.abs_upper_raw();
        if rho >= unit {
            return Err(Error::Precondition(
                "log(1 - z) needs |z| < 1 over the whole enclosure".into(),
            ));
        }
        let gap = &unit - &rho; // (1 - ρ) in ulps
        let mut sum = CBall::zero(w);
        let mut power = self.clone();
        let mut power_bound = rho.clone(); // ρ^n in ulps, rounded up
        let mut n = 1u64;
        loop {
            sum = sum.sub(&power.div_u64(n));
            power_bound = ceil_shr(&(&power_bound * &rho), w);
            // tail = ρ^{n+1} / ((n+1)(1-ρ)), in ulps
            let tail = ceil_div(&(&power_bound << w), &(&gap * BigUint::from(n + 1)));
            if tail <= BigUint::one() {
                return Ok(sum.add_error(&tail));
            }
            if n as usize >= MAX_SERIES_TERMS {
                return Err(Error::Precondition(format!(
                    "log(1 - z) did not converge within {MAX_SERIES_TERMS} terms"
                )));
            }
            power = power.mul(self);
            n += 1;
        }
    }

    /// `π` by Machin's formula.
    pub fn pi(prec: u32) -> Self {
        let wp = prec + 16;
        let (a, ra) = atan_inv(5, wp);
        let (b, rb) = atan_inv(239, wp);
        let mid = a * 16u32 - b * 4u32;
        let rad = ra * 16u32 + rb * 4u32;
        CBall {
            re: mid,
            im: BigInt::zero(),
            rad,
            prec: wp,
        }
        .with_prec(prec)
    }

    /// Bounds `(lo, hi)` on `ln|z|`, or `None` when the ball reaches zero.
    pub fn ln_abs_bounds(&self) -> Option<(f64, f64)> {
        let lo = self.abs_lower_raw();
        if lo.is_zero() {
            return None;
        }
        let hi = self.abs_upper_raw();
        let shift = self.prec as f64 * std::f64::consts::LN_2;
        Some((ln_biguint(&lo) - shift, ln_biguint(&hi) - shift))
    }

    /// `ln|mid|`; `None` for a zero midpoint.
    pub fn ln_abs_mid(&self) -> Option<f64> {
        let sq = (&self.re * &self.re + &self.im * &self.im)
            .magnitude()
            .clone();
        if sq.is_zero() {
            return None;
        }
        Some(0.5 * ln_biguint(&sq) - self.prec as f64 * std::f64::consts::LN_2)
    }

    pub fn re_f64(&self) -> f64 {
        fixed_to_f64(&self.re, self.prec)
    }

    pub fn im_f64(&self) -> f64 {
        fixed_to_f64(&self.im, self.prec)
    }

    /// Radius as an `f64` that is never below the true radius.
    pub fn rad_f64_upper(&self) -> f64 {
        let r = fixed_to_f64(
            &BigInt::from_biguint(Sign::Plus, self.rad.clone()),
            self.prec,
        );
        if r == 0.0 && !self.rad.is_zero() {
            f64::MIN_POSITIVE
        } else {
            r * (1.0 + 4.0 * f64::EPSILON)
        }
    }
}

/// `atan(1/x)` at precision `w`: midpoint and error bound, both in ulps.
fn atan_inv(x: u32, w: u32) -> (BigInt, BigUint) {
    let unit = BigUint::one() << w;
    let x2 = BigUint::from(x) * x;
    let mut power = BigUint::from(x); // x^{2k+1}
    let mut sum = BigInt::zero();
    let mut terms = 0u32;
    let mut k = 0u32;
    loop {
        let term = &unit / (&power * (2 * k + 1));
        if term.is_zero() {
            break;
        }
        let term = BigInt::from_biguint(Sign::Plus, term);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        terms += 1;
        power *= &x2;
        k += 1;
    }
    // One ulp of flooring per term, plus the first omitted term (< 1 ulp).
    (sum, BigUint::from(terms + 1))
}

/// `x · 2^-prec` as the nearest-ish `f64`.
pub fn fixed_to_f64(x: &BigInt, prec: u32) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(62);
    let top = (x >> shift).to_f64().expect("small integer");
    let exp2 = shift as i64 - prec as i64;
    top * 2f64.powi(exp2.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Decimal scientific rendering of `x · 2^-prec` with `digits` significant
/// digits; `round_up` rounds the magnitude away from zero.
pub fn fixed_to_sci(x: &BigInt, prec: u32, digits: usize, round_up: bool) -> String {
    assert!(digits >= 1);
    if x.is_zero() {
        return "0".to_string();
    }
    let mag = x.magnitude();
    let log10 = (ln_biguint(mag) - prec as f64 * std::f64::consts::LN_2) / std::f64::consts::LN_10;
    let mut e10 = log10.floor() as i64;
    let ten = BigUint::from(10u32);
    let lower = num_traits::pow(ten.clone(), digits - 1);
    let upper = &lower * &ten;
    for _ in 0..4 {
        let s = digits as i64 - 1 - e10;
        let (num, den) = if s >= 0 {
            (
                mag * num_traits::pow(ten.clone(), s as usize),
                BigUint::one() << prec,
            )
        } else {
            (
                mag.clone(),
                (BigUint::one() << prec) * num_traits::pow(ten.clone(), (-s) as usize),
            )
        };
        let scaled = if round_up {
            ceil_div(&num, &den)
        } else {
            (&num * 2u32 + &den) / (&den * 2u32)
        };
        if scaled >= upper {
            e10 += 1;
            continue;
        }
        if scaled < lower {
            e10 -= 1;
            continue;
        }
        return render_sci(x.is_negative(), &scaled, e10, digits);
    }
    // The estimate is within one decade, so the loop above always settles.
    unreachable!("decimal exponent search did not settle")
}

fn render_sci(negative: bool, mantissa: &BigUint, e10: i64, digits: usize) -> String {
    let s = mantissa.to_string();
    debug_assert_eq!(s.len(), digits);
    let sign = if negative { "-" } else { "" };
    if digits == 1 {
        format!("{sign}{s}e{e10}")
    } else {
        format!("{sign}{}.{}e{e10}", &s[..1], &s[1..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    const W: u32 = 200;

    fn approx(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn shift_rounding_floors_negatives() {
        assert_eq!(BigInt::from(-3) >> 1u32, BigInt::from(-2));
        assert_eq!(round_shr(&BigInt::from(-3), 1), (BigInt::from(-1), true));
        assert_eq!(round_shr(&BigInt::from(8), 2), (BigInt::from(2), false));
    }

    #[test]
    fn rational_conversion_encloses() {
        let third = CBall::from_rational(&rat(1, 3), W);
        assert!(!third.is_exact());
        let half = CBall::from_rational(&rat(-1, 2), W);
        assert!(half.is_exact());
        assert!(approx(third.re_f64(), 1.0 / 3.0, 1e-16));
        let three_thirds = third.mul_int(&BigInt::from(3));
        assert!(three_thirds.overlaps(&CBall::one(W)));
    }

    #[test]
    fn multiplication_tracks_error() {
        let a = CBall::from_complex_rational(&rat(1, 3), &rat(2, 7), W);
        let b = CBall::from_complex_rational(&rat(-5, 11), &rat(1, 9), W);
        let prod = a.mul(&b);
        let exact_re = rat(1, 3) * rat(-5, 11) - rat(2, 7) * rat(1, 9);
        let exact_im = rat(1, 3) * rat(1, 9) + rat(2, 7) * rat(-5, 11);
        let exact = CBall::from_complex_rational(&exact_re, &exact_im, W + 40);
        assert!(prod.with_prec(W + 40).overlaps(&exact));
        assert!(prod.rad_raw() < &BigUint::from(8u32));
    }

    #[test]
    fn exp_of_zero_is_exact_one() {
        assert_eq!(CBall::zero(W).exp(), CBall::one(W));
    }

    #[test]
    fn exp_matches_known_values() {
        let one = CBall::one(W).exp();
        assert!(approx(one.re_f64(), std::f64::consts::E, 1e-15));
        assert!(one.rad_f64_upper() < 1e-55);
        let minus_three = CBall::from_int(-3, W).exp();
        assert!(approx(minus_three.re_f64(), (-3f64).exp(), 1e-16));
        // exp(a)·exp(-a) = 1
        let a = CBall::from_complex_rational(&rat(7, 3), &rat(-5, 4), W);
        let prod = a.exp().mul(&a.neg().exp());
        assert!(prod.overlaps(&CBall::one(W)));
    }

    #[test]
    fn euler_identity_from_pi() {
        let pi = CBall::pi(W);
        assert!(approx(pi.re_f64(), std::f64::consts::PI, 1e-15));
        let i_pi = CBall::from_parts(BigInt::zero(), pi.re_raw().clone(), pi.rad_raw().clone(), W);
        let minus_one = i_pi.exp();
        assert!(minus_one.overlaps(&CBall::from_int(-1, W)));
        assert!(minus_one.rad_f64_upper() < 1e-50);
    }

    #[test]
    fn log1m_inverts_exp() {
        let z = CBall::from_complex_rational(&rat(3, 5), &rat(-1, 4), W);
        let l = z.log1m().unwrap();
        let back = l.exp();
        let one_minus_z = CBall::one(W).sub(&z);
        assert!(back.overlaps(&one_minus_z));
        assert!(back.rad_f64_upper() < 1e-50);
        assert!(CBall::from_rational(&rat(1, 1), W).log1m().is_err());
        assert!(CBall::zero(W).log1m().unwrap().is_exact_zero());
    }

    #[test]
    fn ln_of_two() {
        let l = CBall::from_rational(&rat(1, 2), W).log1m().unwrap();
        assert!(approx(l.re_f64(), -std::f64::consts::LN_2, 1e-16));
    }

    #[test]
    fn containment_after_refinement() {
        let x = CBall::from_rational(&rat(2, 3), 64).exp();
        let y = CBall::from_rational(&rat(2, 3), 256).exp();
        assert!(x.contains(&y));
        assert!(!y.contains(&x));
    }

    #[test]
    fn scientific_rendering() {
        let w = 64;
        let x = CBall::from_rational(&rat(1, 3), w);
        assert_eq!(fixed_to_sci(x.re_raw(), w, 5, false), "3.3333e-1");
        let y = CBall::from_int(-1234, w);
        assert_eq!(fixed_to_sci(y.re_raw(), w, 3, false), "-1.23e3");
        assert_eq!(fixed_to_sci(y.re_raw(), w, 3, true), "-1.24e3");
        assert_eq!(
            fixed_to_sci(&(BigInt::from(999_999) << w), w, 3, false),
            "1.00e6"
        );
        assert_eq!(fixed_to_sci(&BigInt::one(), w, 2, true), "5.5e-20");
        assert_eq!(fixed_to_sci(&BigInt::zero(), w, 4, false), "0");
    }
}
