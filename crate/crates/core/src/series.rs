//! Dense truncated power series over exact rationals.
//!
//! A series of order `N` stores the coefficients of `z^0 ..= z^N`. Binary
//! operations truncate to the smaller operand order, so no result ever
//! reports a coefficient its inputs do not determine.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational, ExactRational, Prime};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<ExactRational>,
}

impl TruncSeries {
    /// Build from coefficients `c_0..=c_N`; the order is `len - 1`.
    pub fn new(coeffs: Vec<ExactRational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a truncated series needs at least one coefficient".into(),
            ));
        }
        Ok(TruncSeries { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(BigRational::one(), 0, order)
    }

    /// `c · z^k` truncated at `order` (zero if `k > order`).
    pub fn monomial(c: ExactRational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Series from small integer coefficients; handy in tests and examples.
    pub fn from_ints(order: usize, ints: &[i64]) -> Self {
        let mut s = Self::zero(order);
        for (c, &v) in s.coeffs.iter_mut().zip(ints) {
            *c = BigRational::from_integer(BigInt::from(v));
        }
        s
    }

    /// `1 - z^p` at the given order.
    pub fn one_minus_zp(p: Prime, order: usize) -> Self {
        let mut s = Self::one(order);
        let p = p.as_usize();
        if p <= order {
            s.coeffs[p] = -BigRational::one();
        }
        s
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ExactRational> {
        self.coeffs
    }

    #[inline]
    pub fn coeff(&self, n: usize) -> &ExactRational {
        &self.coeffs[n]
    }

    pub fn set_coeff(&mut self, n: usize, value: ExactRational) {
        self.coeffs[n] = value;
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        TruncSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncSeries {
            coeffs: (0..=n)
                .map(|i| &self.coeffs[i] + &other.coeffs[i])
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncSeries {
            coeffs: (0..=n)
                .map(|i| &self.coeffs[i] - &other.coeffs[i])
                .collect(),
        }
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Evaluate the polynomial `Σ c_n x^n` exactly.
    pub fn eval_rational(&self, x: &ExactRational) -> ExactRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&i| !self.coeffs[i].is_zero())
            .collect()
    }
}

/// Cauchy product, schoolbook. Zero coefficients are skipped, which pays off
/// for the series here that live on multiples of p.
pub fn ps_mul(a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
    let n = a.order().min(b.order());
    let mut out = TruncSeries::zero(n);
    let sa: Vec<usize> = a.support().into_iter().filter(|&i| i <= n).collect();
    let sb: Vec<usize> = b.support().into_iter().filter(|&j| j <= n).collect();
    for &i in &sa {
        let ai = &a.coeffs[i];
        for &j in &sb {
            if i + j > n {
                break;
            }
            out.coeffs[i + j] += ai * &b.coeffs[j];
        }
    }
    out
}

/// `a^e` by repeated squaring of truncated products.
pub fn ps_pow(a: &TruncSeries, e: u64) -> Result<TruncSeries> {
    if e == 0 {
        return Err(Error::InvalidArgument("exponent must be at least 1".into()));
    }
    let mut base = a.clone();
    let mut acc: Option<TruncSeries> = None;
    let mut e = e;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(acc) => ps_mul(&acc, &base),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = ps_mul(&base, &base);
    }
    Ok(acc.expect("e >= 1"))
}

/// `a(z^p)`, truncated at the order of `a`.
pub fn ps_substitute_power(a: &TruncSeries, p: Prime) -> TruncSeries {
    let n = a.order();
    let p = p.as_usize();
    let mut out = TruncSeries::zero(n);
    for m in 0..=n / p {
        out.coeffs[p * m] = a.coeffs[m].clone();
    }
    out
}

/// `a / (1 - z^p)`: `c_n = a_n + c_{n-p}`, a running sum within each
/// residue class mod p.
pub fn ps_div_one_minus_zp(a: &TruncSeries, p: Prime) -> TruncSeries {
    let p = p.as_usize();
    let mut out = a.clone();
    for n in p..=a.order() {
        let prev = out.coeffs[n - p].clone();
        out.coeffs[n] += prev;
    }
    out
}

pub fn ps_derivative(a: &TruncSeries) -> TruncSeries {
    if a.order() == 0 {
        return TruncSeries::zero(0);
    }
    TruncSeries {
        coeffs: (1..=a.order())
            .map(|n| &a.coeffs[n] * BigInt::from(n))
            .collect(),
    }
}

/// Logarithm of a series with constant term 1, from `L' = a'/a`:
/// `n L_n = n a_n - Σ_{k=1}^{n-1} k L_k a_{n-k}`.
pub fn ps_log(a: &TruncSeries) -> Result<TruncSeries> {
    if !a.coeffs[0].is_one() {
        return Err(Error::InvalidArgument(
            "logarithm needs constant coefficient 1".into(),
        ));
    }
    let n_max = a.order();
    // Stores k·L_k so each step is a plain convolution.
    let mut kl: Vec<ExactRational> = vec![BigRational::zero(); n_max + 1];
    let a_support = a.support();
    for n in 1..=n_max {
        let mut acc = &a.coeffs[n] * BigInt::from(n);
        for &j in a_support.iter().filter(|&&j| j >= 1 && j < n) {
            let k = n - j;
            if !kl[k].is_zero() {
                acc -= &kl[k] * &a.coeffs[j];
            }
        }
        kl[n] = acc;
    }
    let mut out = TruncSeries::zero(n_max);
    for (n, nl) in kl.iter().enumerate().skip(1) {
        out.coeffs[n] = nl / BigInt::from(n);
    }
    Ok(out)
}

/// Exponential of a series with zero constant term, from `E' = a'E`:
/// `n E_n = Σ_{k=1}^{n} k a_k E_{n-k}`.
pub fn ps_exp(a: &TruncSeries) -> Result<TruncSeries> {
    if !a.coeffs[0].is_zero() {
        return Err(Error::InvalidArgument(
            "exponential needs constant coefficient 0".into(),
        ));
    }
    let n_max = a.order();
    let weighted: Vec<(usize, ExactRational)> = a
        .support()
        .into_iter()
        .map(|k| (k, &a.coeffs[k] * BigInt::from(k)))
        .collect();
    let mut out = TruncSeries::zero(n_max);
    out.coeffs[0] = BigRational::one();
    for n in 1..=n_max {
        let mut acc = BigRational::zero();
        for (k, ka) in weighted.iter().take_while(|(k, _)| *k <= n) {
            let e = &out.coeffs[n - k];
            if !e.is_zero() {
                acc += ka * e;
            }
        }
        out.coeffs[n] = acc / BigInt::from(n);
    }
    Ok(out)
}

/// JSON document `{"order": N, "coeffs": ["num/den", ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SeriesDocument {
    pub order: usize,
    pub coeffs: Vec<String>,
}

impl From<&TruncSeries> for SeriesDocument {
    fn from(s: &TruncSeries) -> Self {
        SeriesDocument {
            order: s.order(),
            coeffs: s.coeffs.iter().map(format_rational).collect(),
        }
    }
}

impl TryFrom<&SeriesDocument> for TruncSeries {
    type Error = Error;
    fn try_from(doc: &SeriesDocument) -> Result<Self> {
        if doc.coeffs.len() != doc.order + 1 {
            return Err(Error::InvalidArgument(format!(
                "series document declares order {} but carries {} coefficients",
                doc.order,
                doc.coeffs.len()
            )));
        }
        let coeffs = doc
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>>>()?;
        TruncSeries::new(coeffs)
    }
}

impl TruncSeries {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SeriesDocument::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: SeriesDocument = serde_json::from_str(s)?;
        TruncSeries::try_from(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{nu_p, rat};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn t2_prefix() -> TruncSeries {
        let mut s = TruncSeries::zero(8);
        for (n, q) in [
            (0, rat(1, 1)),
            (2, rat(1, 2)),
            (4, rat(5, 8)),
            (6, rat(7, 16)),
            (8, rat(83, 128)),
        ] {
            s.set_coeff(n, q);
        }
        s
    }

    fn log_t(prime: Prime, order: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(order);
        for n in 1..=order {
            s.set_coeff(n, rat(nu_p(prime, n as u64).unwrap() as i64, n as i64));
        }
        s
    }

    #[test]
    fn mul_examples() {
        let n = 10;
        let geometric = TruncSeries::from_ints(n, &[1; 11]);
        let one_minus_z = TruncSeries::from_ints(n, &[1, -1]);
        assert_eq!(ps_mul(&one_minus_z, &geometric), TruncSeries::one(n));

        let one_plus_z = TruncSeries::from_ints(2, &[1, 1]);
        assert_eq!(
            ps_mul(&one_plus_z, &one_plus_z),
            TruncSeries::from_ints(2, &[1, 2, 1])
        );

        let sq = ps_mul(&t2_prefix(), &t2_prefix());
        // Same value from T^2 = T(z^2)/(1-z^2): t(0)+t(1)+t(2)+t(3)+t(4).
        assert_eq!(sq.coeff(8), &rat(17, 8));
    }

    #[test]
    fn mul_truncates_to_smaller_order() {
        let a = TruncSeries::from_ints(5, &[1, 1, 1, 1, 1, 1]);
        let b = TruncSeries::from_ints(3, &[1, 2]);
        assert_eq!(ps_mul(&a, &b).order(), 3);
        assert_eq!(a.add(&b).order(), 3);
    }

    #[test]
    fn pow_examples() {
        let one_plus_z = TruncSeries::from_ints(3, &[1, 1]);
        assert_eq!(
            ps_pow(&one_plus_z, 3).unwrap(),
            TruncSeries::from_ints(3, &[1, 3, 3, 1])
        );
        assert_eq!(ps_pow(&t2_prefix(), 1).unwrap(), t2_prefix());
        assert!(ps_pow(&one_plus_z, 0).is_err());
    }

    #[test]
    fn substitute_examples() {
        let one_plus_z = TruncSeries::from_ints(4, &[1, 1]);
        assert_eq!(
            ps_substitute_power(&one_plus_z, p(2)),
            TruncSeries::from_ints(4, &[1, 0, 1])
        );
        assert_eq!(
            ps_substitute_power(&TruncSeries::one(5), p(3)),
            TruncSeries::one(5)
        );

        let order = 40;
        let sub = ps_substitute_power(&log_t(p(2), order), p(2));
        for k in 0..=order {
            let expected = if k > 0 && k % 2 == 0 {
                let n = (k / 2) as u64;
                rat(nu_p(p(2), n).unwrap() as i64, n as i64)
            } else {
                rat(0, 1)
            };
            assert_eq!(sub.coeff(k), &expected, "index {k}");
        }
    }

    #[test]
    fn div_one_minus_zp_examples() {
        let one = TruncSeries::one(8);
        assert_eq!(
            ps_div_one_minus_zp(&one, p(2)),
            TruncSeries::from_ints(8, &[1, 0, 1, 0, 1, 0, 1, 0, 1])
        );
        let z = TruncSeries::from_ints(9, &[0, 1]);
        assert_eq!(
            ps_div_one_minus_zp(&z, p(3)),
            TruncSeries::from_ints(9, &[0, 1, 0, 0, 1, 0, 0, 1, 0, 0])
        );
    }

    #[test]
    fn log_examples() {
        assert!(ps_log(&TruncSeries::one(6)).unwrap().is_zero());
        let geometric = TruncSeries::from_ints(12, &[1; 13]);
        let l = ps_log(&geometric).unwrap();
        for n in 1..=12 {
            assert_eq!(l.coeff(n), &rat(1, n as i64));
        }
        let t = ps_exp(&log_t(p(2), 30)).unwrap();
        assert_eq!(ps_log(&t).unwrap(), log_t(p(2), 30));
        assert!(ps_log(&TruncSeries::from_ints(3, &[2, 1])).is_err());
    }

    #[test]
    fn exp_examples() {
        assert_eq!(ps_exp(&TruncSeries::zero(5)).unwrap(), TruncSeries::one(5));
        assert_eq!(ps_exp(&log_t(p(2), 8)).unwrap(), t2_prefix());
        assert!(ps_exp(&TruncSeries::one(3)).is_err());
    }

    #[test]
    fn derivative_examples() {
        let s = TruncSeries::from_ints(2, &[1, 0, 1]);
        assert_eq!(ps_derivative(&s), TruncSeries::from_ints(1, &[0, 2]));
        assert!(ps_derivative(&TruncSeries::from_ints(3, &[7])).is_zero());
        assert_eq!(ps_derivative(&TruncSeries::from_ints(0, &[7])).order(), 0);
    }

    #[test]
    fn json_shape() {
        let s = TruncSeries::new(vec![rat(1, 1), rat(0, 1), rat(-1, 2)]).unwrap();
        let json = s.to_json().unwrap();
        assert_eq!(json, r#"{"order":2,"coeffs":["1/1","0/1","-1/2"]}"#);
        assert_eq!(TruncSeries::from_json(&json).unwrap(), s);
        assert!(TruncSeries::from_json(r#"{"order":3,"coeffs":["1/1"]}"#).is_err());
    }
}
