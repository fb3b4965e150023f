//! Certified numeric evaluation of `T_p` inside the unit disk.
//!
//! Three routes are available:
//!
//! * [`eval_product`] truncates the infinite product after `J` factors and
//!   adds an explicit bound for the omitted factors. This is the reference
//!   route.
//! * [`eval_log_series`] sums `log T_p(α) = Σ ν_p(n)/n · αⁿ` with a geometric
//!   tail bound (every coefficient satisfies `0 ≤ ν_p(n)/n ≤ 1`).
//! * [`eval_series`] sums the exact Taylor coefficients. Its tail estimate
//!   assumes the coefficients stay bounded by twice the largest one seen, so
//!   its reports carry `rigorous = false`.
//!
//! All arithmetic runs at the requested precision plus [`GUARD_BITS`], and
//! the final value is rounded back to the requested precision.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::arith::{format_rational, nu_p, parse_rational, ExactRational, Prime};
use crate::ball::{ceil_shr, fixed_to_sci, CBall};
use crate::coeffs::CoeffTable;
use crate::error::{Error, Result};

pub const GUARD_BITS: u32 = 32;

/// Upper limit on automatically chosen series lengths.
const MAX_AUTO_TERMS: usize = 5_000_000;

/// A point `re + im·i` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexRational {
    pub re: ExactRational,
    pub im: ExactRational,
}

impl ComplexRational {
    pub fn new(re: ExactRational, im: ExactRational) -> Self {
        ComplexRational { re, im }
    }

    pub fn real(re: ExactRational) -> Self {
        ComplexRational {
            re,
            im: ExactRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `|z|²`, exactly.
    pub fn norm_sq(&self) -> ExactRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inside_unit_disk(&self) -> bool {
        self.norm_sq() < ExactRational::one()
    }

    pub fn mul(&self, other: &Self) -> Self {
        ComplexRational {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = ComplexRational::real(ExactRational::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn to_ball(&self, prec: u32) -> CBall {
        CBall::from_complex_rational(&self.re, &self.im, prec)
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", format_rational(&self.re));
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}i",
            format_rational(&self.re),
            sign,
            format_rational(&self.im.abs())
        )
    }
}

impl FromStr for ComplexRational {
    type Err = Error;

    /// Accepts `x`, `y i`, and `x±y i`, where each part is a fraction, an
    /// integer or a decimal. Decimals convert exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidArgument(format!("cannot parse complex point {s:?}"));
        let Some(body) = s.strip_suffix('i') else {
            return Ok(ComplexRational::real(parse_rational(&s)?));
        };
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (re_part, im_part) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im_part {
            "" | "+" => ExactRational::one(),
            "-" => -ExactRational::one(),
            other => parse_rational(other).map_err(|_| bad())?,
        };
        let re = parse_rational(re_part).map_err(|_| bad())?;
        Ok(ComplexRational { re, im })
    }
}

/// A numeric value with a certified error radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxValue {
    ball: CBall,
}

impl ApproxValue {
    pub fn from_ball(ball: CBall) -> Self {
        ApproxValue { ball }
    }

    pub fn ball(&self) -> &CBall {
        &self.ball
    }

    pub fn prec(&self) -> u32 {
        self.ball.prec()
    }

    pub fn real_part(&self) -> f64 {
        self.ball.re_f64()
    }

    pub fn imaginary_part(&self) -> f64 {
        self.ball.im_f64()
    }

    /// Upper bound on the total error, as a float.
    pub fn error_radius(&self) -> f64 {
        self.ball.rad_f64_upper()
    }

    pub fn is_exact(&self) -> bool {
        self.ball.is_exact()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        let prec = self.prec().max(other.prec());
        self.ball
            .with_prec(prec)
            .overlaps(&other.ball.with_prec(prec))
    }

    /// Whether `other` lies entirely within this enclosure.
    pub fn contains(&self, other: &Self) -> bool {
        self.ball.contains(&other.ball)
    }

    /// Significant decimal digits that the precision supports.
    pub fn decimal_digits(&self) -> usize {
        ((self.prec() as f64) * std::f64::consts::LOG10_2)
            .floor()
            .max(1.0) as usize
    }

    pub fn re_string(&self) -> String {
        fixed_to_sci(
            self.ball.re_raw(),
            self.prec(),
            self.decimal_digits(),
            false,
        )
    }

    pub fn im_string(&self) -> String {
        fixed_to_sci(
            self.ball.im_raw(),
            self.prec(),
            self.decimal_digits(),
            false,
        )
    }

    /// The radius, rounded up to three significant digits.
    pub fn radius_string(&self) -> String {
        let rad = BigInt::from(self.ball.rad_raw().clone());
        fixed_to_sci(&rad, self.prec(), 3, true)
    }

    /// `|mid_a - mid_b|` as a float.
    pub fn distance(&self, other: &Self) -> f64 {
        let prec = self.prec().max(other.prec());
        let d = self.ball.with_prec(prec).sub(&other.ball.with_prec(prec));
        d.re_f64().hypot(d.im_f64())
    }
}

impl fmt::Display for ApproxValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.re_string())?;
        if !self.ball.im_raw().is_zero() {
            write!(f, " + {}i", self.im_string())?;
        }
        write!(f, ") +/- {}", self.radius_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Product,
    SeriesExp,
    LogSeries,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Product => "product",
            Method::SeriesExp => "series-exp",
            Method::LogSeries => "log-series",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub point: ComplexRational,
    pub method: Method,
    pub value: ApproxValue,
    pub terms_used: usize,
    pub rigorous: bool,
}

pub const EVAL_CSV_HEADER: [&str; 7] = [
    "method",
    "point",
    "re",
    "im",
    "error_radius",
    "terms",
    "rigorous",
];

impl EvalReport {
    pub fn csv_record(&self) -> [String; 7] {
        [
            self.method.name().to_string(),
            self.point.to_string(),
            self.value.re_string(),
            self.value.im_string(),
            self.value.radius_string(),
            self.terms_used.to_string(),
            self.rigorous.to_string(),
        ]
    }
}

pub fn write_eval_csv<W: std::io::Write>(out: W, reports: &[EvalReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EVAL_CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

fn require_inside(alpha: &ComplexRational) -> Result<()> {
    if alpha.inside_unit_disk() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "point {alpha} must satisfy |α| < 1"
        )))
    }
}

/// Upper bound for `|z|` in ulps, checked to be below one.
fn modulus_bound(z: &CBall) -> Result<BigUint> {
    let rho = z.abs_upper_raw();
    if rho >= BigUint::one() << z.prec() {
        return Err(Error::Precondition(
            "point too close to the unit circle for this precision".into(),
        ));
    }
    Ok(rho)
}

/// `⌈x^e⌉` for a fixed-point `x` given in ulps.
fn pow_upper(x: &BigUint, e: u64, prec: u32) -> BigUint {
    let mut acc = BigUint::one() << prec;
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = ceil_shr(&(&acc * &base), prec);
        }
        e >>= 1;
        if e > 0 {
            base = ceil_shr(&(&base * &base), prec);
        }
    }
    acc
}

fn ceil_div(x: &BigUint, d: &BigUint) -> BigUint {
    (x + d - 1u32) / d
}

/// Partial sum of `log T_p(α) = Σ_{n≥1} ν_p(n)/n · αⁿ` through `n = N`.
///
/// With `n = None` the length is chosen so that the tail bound falls below
/// one ulp of the working precision. Returns the enclosure and `N`.
pub fn eval_log_series(
    p: Prime,
    alpha: &ComplexRational,
    n: Option<usize>,
    prec: u32,
) -> Result<(ApproxValue, usize)> {
    require_inside(alpha)?;
    let (ball, terms) = log_series_ball(p, &alpha.to_ball(prec + GUARD_BITS), n)?;
    Ok((ApproxValue::from_ball(ball.with_prec(prec)), terms))
}

fn log_series_ball(p: Prime, z: &CBall, n: Option<usize>) -> Result<(CBall, usize)> {
    let w = z.prec();
    if z.is_exact_zero() {
        return Ok((CBall::zero(w), 0));
    }
    let rho = modulus_bound(z)?;
    let gap = (BigUint::one() << w) - &rho;
    // Powers of ρ are bounded at twice the working precision so that their
    // upward rounding never stalls the tail test.
    let wb = 2 * w;
    let rho_b = &rho << w;
    // ρ^{k+1} / (1 - ρ) in working ulps, given ρ^{k+1} at precision `wb`.
    let tail_ulps = |r_pow_next: &BigUint| ceil_div(r_pow_next, &gap);
    let limit = n.unwrap_or(MAX_AUTO_TERMS);
    let mut sum = CBall::zero(w);
    let mut power = CBall::one(w);
    let mut rho_pow = rho_b.clone(); // ρ^{k+1}
    let mut k = 0usize;
    while k < limit {
        if n.is_none() && tail_ulps(&rho_pow) <= BigUint::one() {
            break;
        }
        k += 1;
        power = power.mul(z);
        rho_pow = ceil_shr(&(&rho_pow * &rho_b), wb);
        let v = nu_p(p, k as u64)?;
        if v > 0 {
            sum = sum.add(&power.mul_int(&BigInt::from(v)).div_u64(k as u64));
        }
    }
    let tail = tail_ulps(&rho_pow);
    if n.is_none() && tail > BigUint::one() {
        return Err(Error::Precondition(format!(
            "log series needs more than {limit} terms at this point"
        )));
    }
    Ok((sum.add_error(&tail), k))
}

/// `exp` of [`eval_log_series`]: a second rigorous value of `T_p(α)`.
pub fn eval_via_log_series(
    p: Prime,
    alpha: &ComplexRational,
    n: Option<usize>,
    prec: u32,
) -> Result<EvalReport> {
    require_inside(alpha)?;
    let (log, terms) = log_series_ball(p, &alpha.to_ball(prec + GUARD_BITS), n)?;
    Ok(EvalReport {
        point: alpha.clone(),
        method: Method::LogSeries,
        value: ApproxValue::from_ball(log.exp().with_prec(prec)),
        terms_used: terms,
        rigorous: true,
    })
}

/// `∏_{j=1}^{J} (1 - α^{p^j})^{-1/p^j}` plus a bound for the omitted factors.
///
/// With `r ≥ |α|` and `R = r^{p^{J+1}}`, each omitted logarithm obeys
/// `|log(1 - w)| ≤ |w| / (1 - r)`, and successive terms `r^{p^j}/p^j` shrink
/// by at least `q = R^{p-1} / p` from `j = J+1` on. Hence
/// `Σ_{j>J} |log(1 - α^{p^j})| / p^j ≤ R / (p^{J+1} (1 - r)(1 - q))`.
/// This bound joins the radius of the logarithm before exponentiation.
pub fn eval_product(
    p: Prime,
    alpha: &ComplexRational,
    j: Option<usize>,
    prec: u32,
) -> Result<EvalReport> {
    require_inside(alpha)?;
    let (ball, factors) = product_ball(p, &alpha.to_ball(prec + GUARD_BITS), j)?;
    Ok(EvalReport {
        point: alpha.clone(),
        method: Method::Product,
        value: ApproxValue::from_ball(ball.with_prec(prec)),
        terms_used: factors,
        rigorous: true,
    })
}

/// [`eval_product`] at a point given as a ball (working precision is the
/// ball's precision). Returns the value and the number of factors used.
pub fn product_ball(p: Prime, z: &CBall, j: Option<usize>) -> Result<(CBall, usize)> {
    let (log, factors) = log_product_ball(p, z, j)?;
    Ok((log.exp(), factors))
}

/// `log T_p(z)` through the product, with the tail bound included.
pub fn log_product_ball(p: Prime, z: &CBall, j: Option<usize>) -> Result<(CBall, usize)> {
    let w = z.prec();
    if j == Some(0) {
        return Err(Error::InvalidArgument(
            "factor count J must be at least 1".into(),
        ));
    }
    if z.is_exact_zero() {
        return Ok((CBall::zero(w), j.unwrap_or(1)));
    }
    let rho = modulus_bound(z)?;
    let unit = BigUint::one() << w;
    let gap = &unit - &rho;
    let pv = p.get();
    let limit = j.unwrap_or(usize::MAX);
    let mut sum = CBall::zero(w);
    let mut zp = z.clone(); // z^{p^j}
    let mut big_r = rho.clone(); // upper bound for r^{p^{j+1}}, updated below
    let mut p_pow = BigUint::one(); // p^j
    let mut count = 0usize;
    loop {
        count += 1;
        zp = zp.pow(pv);
        p_pow *= pv;
        let term = zp.log1m()?.div_uint(&p_pow);
        sum = sum.sub(&term);
        big_r = pow_upper(&big_r, pv, w);
        let r_next = pow_upper(&big_r, pv, w);
        let q = ceil_div(&pow_upper(&r_next, pv - 1, w), &BigUint::from(pv));
        let q_gap = &unit - &q;
        let denom = &p_pow * pv * &gap * &q_gap;
        let tail = ceil_div(&((r_next << w) << w), &denom);
        if count == limit || (j.is_none() && tail <= BigUint::one()) {
            return Ok((sum.add_error(&tail), count));
        }
        if count >= 64 {
            return Err(Error::Precondition(
                "product tail did not settle; point too close to the unit circle".into(),
            ));
        }
    }
}

/// Partial Taylor sum `Σ t_p(n) αⁿ` over the table, with the heuristic tail
/// `2·M·|α|^{N+1} / (1 - |α|)`, `M = max |t_p(n)|`.
pub fn eval_series(alpha: &ComplexRational, tab: &CoeffTable, prec: u32) -> Result<EvalReport> {
    require_inside(alpha)?;
    let w = prec + GUARD_BITS;
    let z = alpha.to_ball(w);
    let rho = modulus_bound(&z)?;
    let unit = BigUint::one() << w;
    let mut sum = CBall::zero(w);
    let mut power = CBall::one(w);
    for (n, t) in tab.values().iter().enumerate() {
        if n > 0 {
            power = power.mul(&z);
        }
        if !t.is_zero() {
            sum = sum.add(&power.mul(&CBall::from_rational(t, w)));
        }
    }
    let m = tab.max_abs();
    let m_ulps = ceil_div(&(m.numer().magnitude() << w), m.denom().magnitude());
    let r_tail = pow_upper(&rho, tab.order() as u64 + 1, w);
    let tail = ceil_div(&(&m_ulps * 2u32 * r_tail), &(&unit - &rho));
    Ok(EvalReport {
        point: alpha.clone(),
        method: Method::SeriesExp,
        value: ApproxValue::from_ball(sum.add_error(&tail).with_prec(prec)),
        terms_used: tab.order() + 1,
        rigorous: false,
    })
}

#[derive(Debug, Clone)]
pub struct IterateRow {
    pub k: u32,
    /// `T_p(α^{p^k})` from the product.
    pub lhs: ApproxValue,
    /// `B_k = T_p(α) · ∏_{i=1}^{k} (1 - α^{p^i})^{1/p^i}`.
    pub base: ApproxValue,
    /// `B_k^{p^k}`, which equals the left side.
    pub rhs: ApproxValue,
    pub residual: f64,
    pub combined_radius: f64,
    pub consistent: bool,
    /// Whether `B_k` itself overlaps the left side (true only at `k = 0`
    /// for nonzero α).
    pub base_consistent: bool,
}

/// Checks `T_p(α^{p^k}) = (T_p(α) · ∏_{i=1}^{k} (1 - α^{p^i})^{1/p^i})^{p^k}`
/// for `k = 0..=kmax`. The left side comes from the product at `α^{p^k}`;
/// the right side from the product at `α` and principal roots.
pub fn iterate_identity_check(
    p: Prime,
    alpha: &ComplexRational,
    kmax: u32,
    prec: u32,
) -> Result<Vec<IterateRow>> {
    require_inside(alpha)?;
    let w = prec + GUARD_BITS;
    let pv = p.get();
    pv.checked_pow(kmax)
        .ok_or_else(|| Error::InvalidArgument(format!("p^{kmax} overflows")))?;
    let mut base = product_ball(p, &alpha.to_ball(w), None)?.0;
    let mut rows = Vec::with_capacity(kmax as usize + 1);
    let mut radicand_point = alpha.clone(); // α^{p^i}
    let mut p_pow = BigUint::one();
    for k in 0..=kmax {
        if k > 0 {
            radicand_point = radicand_point.pow(pv);
            p_pow *= pv;
            // (1 - w)^{1/p^i} = exp(log(1 - w) / p^i), principal branch.
            let beta = radicand_point.to_ball(w).log1m()?.div_uint(&p_pow).exp();
            base = base.mul(&beta);
        }
        let lhs_point = alpha.pow(pv.pow(k));
        let lhs = product_ball(p, &lhs_point.to_ball(w), None)?.0;
        let lhs = ApproxValue::from_ball(lhs.with_prec(prec));
        let rhs = ApproxValue::from_ball(base.pow(pv.pow(k)).with_prec(prec));
        let base_v = ApproxValue::from_ball(base.with_prec(prec));
        rows.push(IterateRow {
            k,
            residual: lhs.distance(&rhs),
            combined_radius: lhs.error_radius() + rhs.error_radius(),
            consistent: lhs.overlaps(&rhs),
            base_consistent: lhs.overlaps(&base_v),
            lhs,
            base: base_v,
            rhs,
        });
    }
    Ok(rows)
}

pub const ITERATE_CSV_HEADER: [&str; 6] = [
    "k",
    "lhs",
    "rhs",
    "residual",
    "combined_radius",
    "consistent",
];

pub fn write_iterate_csv<W: std::io::Write>(out: W, rows: &[IterateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ITERATE_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            format!("{:.3e}", r.residual),
            format!("{:.3e}", r.combined_radius),
            r.consistent.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ProbeRow {
    pub radius: ExactRational,
    /// Bounds on `log T_p(r)` along the positive real ray.
    pub log_real: (f64, f64),
    /// Bounds on `log |T_p(r·ζ)|` for the chosen primitive root of unity `ζ`.
    pub log_root: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct ProbeTable {
    pub p: Prime,
    pub root_order: u64,
    pub rows: Vec<ProbeRow>,
    /// Each real-ray upper bound lies below the next lower bound.
    pub real_strictly_increasing: bool,
    pub real_positive: bool,
    /// `log|T_p(rζ)| ≤ log T_p(r)` within enclosures on every row.
    pub root_dominated: bool,
}

pub const PROBE_CSV_HEADER: [&str; 4] = ["r", "log_t_real", "log_abs_t_root", "root_order"];

impl ProbeTable {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(PROBE_CSV_HEADER)?;
        for row in &self.rows {
            w.write_record([
                format_rational(&row.radius),
                format!("{:.15e}", 0.5 * (row.log_real.0 + row.log_real.1)),
                format!("{:.15e}", 0.5 * (row.log_root.0 + row.log_root.1)),
                self.root_order.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Natural-boundary probe: `log T_p` along the positive real ray and along
/// the ray through `ζ = exp(2πi/p^j)`.
pub fn boundary_probe(
    p: Prime,
    root_exponent: u32,
    radii: &[ExactRational],
    prec: u32,
) -> Result<ProbeTable> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "radii must be strictly increasing".into(),
        ));
    }
    if let Some(r) = radii
        .iter()
        .find(|r| !r.is_positive() || **r >= ExactRational::one())
    {
        return Err(Error::InvalidArgument(format!(
            "radius {} is outside (0, 1)",
            format_rational(r)
        )));
    }
    if root_exponent == 0 {
        return Err(Error::InvalidArgument(
            "root order exponent must be at least 1".into(),
        ));
    }
    let root_order = p
        .get()
        .checked_pow(root_exponent)
        .ok_or_else(|| Error::InvalidArgument("root order overflows".into()))?;
    let w = prec + GUARD_BITS;
    let two_pi_over = CBall::pi(w + 8)
        .mul_int(&BigInt::from(2))
        .div_u64(root_order)
        .with_prec(w);
    let i_theta = CBall::from_parts(
        BigInt::zero(),
        two_pi_over.re_raw().clone(),
        two_pi_over.rad_raw().clone(),
        w,
    );
    let zeta = i_theta.exp();
    let mut rows = Vec::with_capacity(radii.len());
    let mut real_logs = Vec::with_capacity(radii.len());
    let mut root_dominated = true;
    for r in radii {
        let rb = CBall::from_rational(r, w);
        let real_log = log_product_ball(p, &rb, None)?.0;
        let root = product_ball(p, &rb.mul(&zeta), None)?.0;
        let root_bounds = root.ln_abs_bounds().ok_or_else(|| {
            Error::Precondition("enclosure of T_p(rζ) contains zero; raise precision".into())
        })?;
        root_dominated &= root.abs_lower_raw() <= real_log.exp().abs_upper_raw();
        let rad = real_log.rad_f64_upper();
        rows.push(ProbeRow {
            radius: r.clone(),
            log_real: (real_log.re_f64() - rad, real_log.re_f64() + rad),
            log_root: root_bounds,
        });
        real_logs.push(real_log);
    }
    let lower = |b: &CBall| b.re_raw() - BigInt::from(b.rad_raw().clone());
    let upper = |b: &CBall| b.re_raw() + BigInt::from(b.rad_raw().clone());
    let real_strictly_increasing = real_logs.windows(2).all(|w| upper(&w[0]) < lower(&w[1]));
    let real_positive = real_logs.iter().all(|b| lower(b).is_positive());
    Ok(ProbeTable {
        p,
        root_order,
        rows,
        real_strictly_increasing,
        real_positive,
        root_dominated,
    })
}

/// The radius grid `0.1, 0.2, …, 0.9, 0.99`.
pub fn default_probe_radii() -> Vec<ExactRational> {
    let mut radii: Vec<ExactRational> = (1..=9)
        .map(|k| ExactRational::new(BigInt::from(k), BigInt::from(10)))
        .collect();
    radii.push(ExactRational::new(BigInt::from(99), BigInt::from(100)));
    radii
}
