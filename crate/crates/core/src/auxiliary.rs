//! Auxiliary functions `E_P(z) = Σ_{j=0}^{P} a_j(z) T_p(z)^j` with
//! polynomial coefficients `a_j(z) = Σ_{l=0}^{P} d_{j,l} z^l`, chosen so that
//! the Taylor expansion of `E_P` starts at degree `P²` or later.
//!
//! Besides the construction this module measures how fast `E_P` decays along
//! the orbit `α, α^p, α^{p²}, …`, tabulates the matching height bounds, and
//! builds the two-variable analogue.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    format_rational, integer_height, ln_biguint, parse_rational, rational_height, ExactRational,
    Prime,
};
use crate::ball::CBall;
use crate::coeffs::CoeffTable;
use crate::error::{Error, Result};
use crate::eval::{eval_product, product_ball, ApproxValue, ComplexRational, GUARD_BITS};
use crate::linalg::{max_bits, nullspace};
use crate::series::{ps_mul, ps_pow, TruncSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxScheme {
    pub p: Prime,
    /// The degree parameter `P`.
    pub degree: usize,
    /// `d[j][l]`, the coefficient of `z^l` in `a_j(z)`; coprime integers.
    pub d: Vec<Vec<ExactRational>>,
    /// First index where the Taylor expansion of `E_P` is nonzero, as far
    /// as the construction table reaches.
    pub achieved_vanishing: usize,
    pub rank: usize,
    pub nullity: usize,
}

#[derive(Serialize, Deserialize)]
struct AuxDocument {
    p: u64,
    #[serde(rename = "P")]
    degree: usize,
    d: Vec<Vec<String>>,
    achieved_vanishing: usize,
}

impl AuxScheme {
    /// The polynomial `a_j` as a series of the given order.
    pub fn a_series(&self, j: usize, order: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(order);
        for (l, c) in self.d[j].iter().enumerate().take(order + 1) {
            s.set_coeff(l, c.clone());
        }
        s
    }

    /// `a_j(x)` for a rational `x`.
    pub fn a_at(&self, j: usize, x: &ExactRational) -> ExactRational {
        self.d[j]
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, c| acc * x + c)
    }

    /// Largest `log |d_{j,l}|`.
    pub fn max_coefficient_height(&self) -> f64 {
        self.d
            .iter()
            .flatten()
            .map(|c| integer_height(c.numer()))
            .fold(0.0, f64::max)
    }

    /// Multiply every coefficient by `c` (used to test scale invariance).
    pub fn scaled(&self, c: &ExactRational) -> AuxScheme {
        AuxScheme {
            d: self
                .d
                .iter()
                .map(|row| row.iter().map(|x| x * c).collect())
                .collect(),
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = AuxDocument {
            p: self.p.get(),
            degree: self.degree,
            d: self
                .d
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect(),
            achieved_vanishing: self.achieved_vanishing,
        };
        Ok(serde_json::to_string(&doc)?)
    }

    /// Parses a scheme. `rank` and `nullity` are not part of the document
    /// and come back as zero.
    pub fn from_json(s: &str) -> Result<Self> {
        let doc: AuxDocument = serde_json::from_str(s)?;
        let p = Prime::new(doc.p)?;
        let n = doc.degree + 1;
        if doc.d.len() != n || doc.d.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "scheme matrix must be {n}×{n}"
            )));
        }
        let d = doc
            .d
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| parse_rational(x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if d.iter().flatten().all(|x| x.is_zero()) {
            return Err(Error::InvalidArgument(
                "scheme coefficients are all zero".into(),
            ));
        }
        Ok(AuxScheme {
            p,
            degree: doc.degree,
            d,
            achieved_vanishing: doc.achieved_vanishing,
            rank: 0,
            nullity: 0,
        })
    }
}

/// `T^0, …, T^max_j` truncated at `order`, by repeated multiplication.
fn table_powers(tab: &CoeffTable, order: usize, max_j: usize) -> Vec<TruncSeries> {
    let t = tab.truncate(order).as_series();
    let mut powers = Vec::with_capacity(max_j + 1);
    powers.push(TruncSeries::one(t.order()));
    for j in 1..=max_j {
        powers.push(ps_mul(&powers[j - 1], &t));
    }
    powers
}

/// The `P² × (P+1)²` system whose kernel gives the scheme coefficients.
/// Column `j·(P+1) + l` holds `d_{j,l}`; row `n` is the coefficient of `zⁿ`.
pub fn aux_system(tab: &CoeffTable, degree: usize) -> Vec<Vec<ExactRational>> {
    let pp = degree * degree;
    let powers = table_powers(tab, pp.saturating_sub(1), degree);
    let width = degree + 1;
    (0..pp)
        .map(|n| {
            let mut row = vec![ExactRational::zero(); width * width];
            for (j, pw) in powers.iter().enumerate() {
                for l in 0..=degree.min(n) {
                    row[j * width + l] = pw.coeff(n - l).clone();
                }
            }
            row
        })
        .collect()
}

pub fn build_aux(tab: &CoeffTable, degree: usize) -> Result<AuxScheme> {
    if degree < 2 {
        return Err(Error::InvalidArgument(format!(
            "degree parameter P must be at least 2, got {degree}"
        )));
    }
    let pp = degree * degree;
    if tab.order() < pp + degree {
        return Err(Error::Precondition(format!(
            "P = {degree} needs a coefficient table of order at least {}, got {}",
            pp + degree,
            tab.order()
        )));
    }
    let width = degree + 1;
    let system = aux_system(tab, degree);
    let ns = nullspace(&system, width * width);
    let min_nullity = width * width - pp;
    if ns.dimension() < min_nullity {
        return Err(Error::Internal(format!(
            "nullspace dimension {} is below the counting bound {min_nullity}",
            ns.dimension()
        )));
    }
    let pick = ns.smallest_vector_index().expect("nullspace is nonempty");
    let v = &ns.basis[pick];
    let d = (0..width)
        .map(|j| {
            (0..width)
                .map(|l| ExactRational::from_integer(v[j * width + l].clone()))
                .collect()
        })
        .collect();
    let mut scheme = AuxScheme {
        p: tab.p(),
        degree,
        d,
        achieved_vanishing: 0,
        rank: ns.rank,
        nullity: ns.dimension(),
    };
    scheme.achieved_vanishing = aux_series(&scheme, tab, tab.order()).vanishing_order();
    Ok(scheme)
}

/// The Taylor series of `E_P` through `order`, as `Σ_j a_j · T^j`.
pub fn aux_series(s: &AuxScheme, tab: &CoeffTable, order: usize) -> AuxExpansion {
    let powers = table_powers(tab, order, s.degree);
    let n = powers[0].order();
    let mut e = TruncSeries::zero(n);
    for (j, pw) in powers.iter().enumerate() {
        e = e.add(&ps_mul(&s.a_series(j, n), pw));
    }
    AuxExpansion { series: e }
}

#[derive(Debug, Clone)]
pub struct AuxExpansion {
    pub series: TruncSeries,
}

impl AuxExpansion {
    /// Index of the first nonzero coefficient, or `order + 1` if none.
    pub fn vanishing_order(&self) -> usize {
        self.series.valuation().unwrap_or(self.series.order() + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vanishing {
    pub first_nonzero: Option<usize>,
    pub checked_through: usize,
}

impl Vanishing {
    /// First nonzero index, or `checked_through + 1` when all vanish.
    pub fn order(&self) -> usize {
        self.first_nonzero.unwrap_or(self.checked_through + 1)
    }

    pub fn at_least(&self, n: usize) -> bool {
        self.order() >= n
    }
}

/// Substitutes `tab` into the scheme by Horner's rule and reports the first
/// nonzero Taylor coefficient of `E_P` up to `order`.
pub fn verify_vanishing(s: &AuxScheme, tab: &CoeffTable, order: usize) -> Result<Vanishing> {
    if tab.order() < order {
        return Err(Error::Precondition(format!(
            "table of order {} cannot check through {order}",
            tab.order()
        )));
    }
    if tab.p() != s.p {
        return Err(Error::InvalidArgument(format!(
            "scheme is for p = {} but the table is for p = {}",
            s.p,
            tab.p()
        )));
    }
    let t = tab.truncate(order).as_series();
    let mut acc = s.a_series(s.degree, order);
    for j in (0..s.degree).rev() {
        acc = ps_mul(&acc, &t).add(&s.a_series(j, order));
    }
    Ok(Vanishing {
        first_nonzero: acc.valuation(),
        checked_through: order,
    })
}

#[derive(Debug, Clone)]
pub struct DecayRow {
    pub k: u32,
    /// `|α|^{p^k}`.
    pub point_modulus: f64,
    pub value: ApproxValue,
    /// `log |E_P(α^{p^k})|`; `None` when the enclosure contains zero.
    pub log_abs: Option<f64>,
    pub decay_exponent: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct DecayReport {
    pub p: Prime,
    pub degree: usize,
    pub alpha: ExactRational,
    /// `log C` with `|E_P(α)| = C |α|^{P²}`.
    pub log_c: Option<f64>,
    pub rows: Vec<DecayRow>,
}

pub const DECAY_CSV_HEADER: [&str; 3] = ["k", "log_abs", "decay_exponent"];

impl DecayReport {
    /// Smallest decay exponent over rows with `k ≥ 1`; `None` if any of
    /// them is indeterminate.
    pub fn min_exponent(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.k >= 1)
            .map(|r| r.decay_exponent)
            .try_fold(f64::INFINITY, |m, e| e.map(|e| m.min(e)))
    }

    pub fn satisfies(&self, epsilon: f64) -> bool {
        let bound = (self.degree * self.degree) as f64 - epsilon;
        self.min_exponent().is_some_and(|m| m >= bound)
    }

    /// `log C + P² p^k log|α|` for row `k`.
    pub fn cauchy_bound(&self, k: u32) -> Option<f64> {
        let ln_alpha = ln_abs_rational(&self.alpha);
        let pp = (self.degree * self.degree) as f64;
        self.log_c
            .map(|c| c + pp * (self.p.get() as f64).powi(k as i32) * ln_alpha)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(DECAY_CSV_HEADER)?;
        let cell = |x: Option<f64>| x.map(|v| format!("{v:.12e}")).unwrap_or_default();
        for r in &self.rows {
            w.write_record([r.k.to_string(), cell(r.log_abs), cell(r.decay_exponent)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn ln_abs_rational(x: &ExactRational) -> f64 {
    ln_biguint(x.numer().magnitude()) - ln_biguint(x.denom().magnitude())
}

fn require_orbit_point(alpha: &ExactRational) -> Result<()> {
    if alpha.is_zero() || alpha.abs() >= ExactRational::one() {
        return Err(Error::Precondition(format!(
            "α = {} must satisfy 0 < |α| < 1",
            format_rational(alpha)
        )));
    }
    Ok(())
}

/// Evaluates `E_P(α^{p^k})` for `k = 0..=kmax` in closed form, with `T_p`
/// values from the certified product.
pub fn decay_experiment(
    s: &AuxScheme,
    alpha: &ExactRational,
    kmax: u32,
    prec: u32,
) -> Result<DecayReport> {
    require_orbit_point(alpha)?;
    let w = prec + GUARD_BITS;
    let pv = s.p.get();
    let ln_alpha = ln_abs_rational(alpha);
    let mut rows = Vec::with_capacity(kmax as usize + 1);
    let mut x = alpha.clone();
    for k in 0..=kmax {
        if k > 0 {
            x = num_traits::pow(x, pv as usize);
        }
        let t = product_ball(s.p, &CBall::from_rational(&x, w), None)?.0;
        let mut e = CBall::from_rational(&s.a_at(s.degree, &x), w);
        for j in (0..s.degree).rev() {
            e = e.mul(&t).add(&CBall::from_rational(&s.a_at(j, &x), w));
        }
        let log_abs = if e.contains_zero() {
            None
        } else {
            e.ln_abs_mid()
        };
        let scale = (pv as f64).powi(k as i32) * ln_alpha;
        rows.push(DecayRow {
            k,
            point_modulus: (scale).exp(),
            value: ApproxValue::from_ball(e.with_prec(prec)),
            log_abs,
            decay_exponent: log_abs.map(|l| l / scale),
        });
    }
    let pp = (s.degree * s.degree) as f64;
    let log_c = rows[0].log_abs.map(|l| l - pp * ln_alpha);
    Ok(DecayReport {
        p: s.p,
        degree: s.degree,
        alpha: alpha.clone(),
        log_c,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub k: u32,
    /// `h(α^{p^k}) = p^k h(α)`.
    pub iterate_height: f64,
    /// `-P² p^k log(1/|α|)`.
    pub analytic_bound: f64,
    /// `-c₂ P p^k`.
    pub arithmetic_bound: f64,
    /// `C₀P + P p^k h(α) + log(P+1) + C₁Pk`.
    pub c1_chain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundLedger {
    pub p: Prime,
    pub degree: usize,
    pub alpha: ExactRational,
    /// Largest coefficient height divided by `P`.
    pub c0: f64,
    /// `log max(1, |T_p(α)|) + h(α) + log 2 / (p - 1)`.
    pub c1: f64,
    /// `sup_{k≥1} c1_chain(k) / (P p^k)`.
    pub c2: f64,
    pub rows: Vec<LedgerRow>,
    /// Smallest `P` with `P log(1/|α|) > c₂`.
    pub crossover_p: usize,
}

pub const LEDGER_CSV_HEADER: [&str; 3] = ["k", "analytic", "arithmetic"];

/// Range of `k` over which the supremum defining `c₂` is taken; the chain
/// ratio tends to `h(α)` and peaks at small `k`.
const C2_SUP_RANGE: u32 = 32;

impl BoundLedger {
    /// Whether the analytic bound lies strictly below the arithmetic one on
    /// every row with `k ≥ 1`.
    pub fn analytic_dominates(&self) -> bool {
        self.rows
            .iter()
            .filter(|r| r.k >= 1)
            .all(|r| r.analytic_bound < r.arithmetic_bound)
    }

    /// `analytic / arithmetic` at row `k`.
    pub fn ratio(&self, k: u32) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.k == k)
            .map(|r| r.analytic_bound / r.arithmetic_bound)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(LEDGER_CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                format!("{:.12e}", r.analytic_bound),
                format!("{:.12e}", r.arithmetic_bound),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `log max(1, |T_p(α)|)` from a 128-bit certified evaluation.
fn t_height_proxy(p: Prime, alpha: &ExactRational) -> Result<f64> {
    let r = eval_product(p, &ComplexRational::real(alpha.clone()), None, 128)?;
    Ok(r.value.real_part().abs().ln().max(0.0))
}

/// The chain `C₀P + P p^k h(α) + log(P+1) + C₁Pk`.
fn chain(c0: f64, c1: f64, degree: usize, p: f64, h_alpha: f64, k: u32) -> f64 {
    let pd = degree as f64;
    let pk = p.powi(k as i32);
    c0 * pd + pd * pk * h_alpha + (pd + 1.0).ln() + c1 * pd * k as f64
}

fn c2_from_chain(c0: f64, c1: f64, degree: usize, p: f64, h_alpha: f64) -> f64 {
    (1..=C2_SUP_RANGE)
        .map(|k| chain(c0, c1, degree, p, h_alpha, k) / (degree as f64 * p.powi(k as i32)))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Tabulates the analytic and arithmetic bounds for `log |E_P(α^{p^k})|`.
pub fn height_ledger(s: &AuxScheme, alpha: &ExactRational, kmax: u32) -> Result<BoundLedger> {
    require_orbit_point(alpha)?;
    let p = s.p.get() as f64;
    let degree = s.degree;
    let h_alpha = rational_height(alpha);
    let c0 = s.max_coefficient_height() / degree as f64;
    let c1 = t_height_proxy(s.p, alpha)? + h_alpha + std::f64::consts::LN_2 / (p - 1.0);
    let c2 = c2_from_chain(c0, c1, degree, p, h_alpha);
    Ok(ledger_with_c2(s.p, degree, alpha, c0, c1, c2, kmax))
}

fn ledger_with_c2(
    p: Prime,
    degree: usize,
    alpha: &ExactRational,
    c0: f64,
    c1: f64,
    c2: f64,
    kmax: u32,
) -> BoundLedger {
    let pf = p.get() as f64;
    let h_alpha = rational_height(alpha);
    let ln_inv = -ln_abs_rational(alpha);
    let pd = degree as f64;
    let rows = (0..=kmax)
        .map(|k| {
            let pk = pf.powi(k as i32);
            LedgerRow {
                k,
                iterate_height: pk * h_alpha,
                analytic_bound: -pd * pd * pk * ln_inv,
                arithmetic_bound: -c2 * pd * pk,
                c1_chain: chain(c0, c1, degree, pf, h_alpha, k),
            }
        })
        .collect();
    BoundLedger {
        p,
        degree,
        alpha: alpha.clone(),
        c0,
        c1,
        c2,
        rows,
        crossover_p: (c2 / ln_inv).floor() as usize + 1,
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub degree: usize,
    pub c0: f64,
    /// `c₂` instantiated with this scheme's own coefficient heights.
    pub c2: f64,
    /// `analytic / arithmetic` at the sweep's `k`, with this row's `c₂`.
    pub ratio: f64,
    /// The same ratio with the sweep-wide `c₂`.
    pub ratio_uniform: f64,
}

#[derive(Debug, Clone)]
pub struct LedgerSweep {
    pub k: u32,
    pub rows: Vec<SweepRow>,
    /// One `c₂` valid for every degree in the sweep: the chain evaluated with
    /// the largest measured `C₀` and the largest `log(P+1)/P`.
    pub uniform_c2: f64,
    /// `log(1/|α|) / uniform_c2`.
    pub predicted_slope: f64,
    /// Least-squares slope of `ratio_uniform` against `P`.
    pub fitted_slope: f64,
    /// Least-squares slope of the per-degree `ratio` against `P`.
    pub fitted_slope_per_degree: f64,
    /// Smallest `P` with `P log(1/|α|) > uniform_c2`.
    pub crossover_p: usize,
}

impl LedgerSweep {
    pub fn slope_error(&self) -> f64 {
        (self.fitted_slope - self.predicted_slope).abs() / self.predicted_slope
    }

    /// Largest relative deviation of the per-degree ratios from their own
    /// least-squares line.
    pub fn per_degree_linearity_error(&self) -> f64 {
        let xs: Vec<f64> = self.rows.iter().map(|r| r.degree as f64).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.ratio).collect();
        let (a, b) = least_squares(&xs, &ys);
        xs.iter()
            .zip(&ys)
            .map(|(x, y)| ((a + b * x) - y).abs() / y.abs())
            .fold(0.0, f64::max)
    }
}

/// Intercept and slope of the least-squares line through the points.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Builds one scheme per degree and compares the ledgers at a fixed `k ≥ 1`.
pub fn ledger_sweep(
    tab: &CoeffTable,
    alpha: &ExactRational,
    degrees: &[usize],
    k: u32,
) -> Result<LedgerSweep> {
    require_orbit_point(alpha)?;
    if k == 0 || degrees.len() < 2 {
        return Err(Error::InvalidArgument(
            "a sweep needs k ≥ 1 and at least two degrees".into(),
        ));
    }
    let p = tab.p();
    let pf = p.get() as f64;
    let h_alpha = rational_height(alpha);
    let ln_inv = -ln_abs_rational(alpha);
    let c1 = t_height_proxy(p, alpha)? + h_alpha + std::f64::consts::LN_2 / (pf - 1.0);
    let mut per_degree = Vec::with_capacity(degrees.len());
    for &degree in degrees {
        let s = build_aux(tab, degree)?;
        let ledger = height_ledger(&s, alpha, k)?;
        per_degree.push(ledger);
    }
    let c0_max = per_degree.iter().map(|l| l.c0).fold(0.0, f64::max);
    let log_term_max = degrees
        .iter()
        .map(|&d| (d as f64 + 1.0).ln() / d as f64)
        .fold(0.0, f64::max);
    // chain(k)/(P p^k) with P-dependence bounded uniformly.
    let uniform_c2 = (1..=C2_SUP_RANGE)
        .map(|kk| {
            let pk = pf.powi(kk as i32);
            (c0_max + log_term_max + c1 * kk as f64) / pk + h_alpha
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let rows: Vec<SweepRow> = per_degree
        .iter()
        .map(|l| {
            let uniform = ledger_with_c2(p, l.degree, alpha, l.c0, l.c1, uniform_c2, k);
            SweepRow {
                degree: l.degree,
                c0: l.c0,
                c2: l.c2,
                ratio: l.ratio(k).expect("row k present"),
                ratio_uniform: uniform.ratio(k).expect("row k present"),
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.degree as f64).collect();
    let fitted_slope = least_squares(
        &xs,
        &rows.iter().map(|r| r.ratio_uniform).collect::<Vec<_>>(),
    )
    .1;
    let fitted_slope_per_degree =
        least_squares(&xs, &rows.iter().map(|r| r.ratio).collect::<Vec<_>>()).1;
    Ok(LedgerSweep {
        k,
        rows,
        uniform_c2,
        predicted_slope: ln_inv / uniform_c2,
        fitted_slope,
        fitted_slope_per_degree,
        crossover_p: (uniform_c2 / ln_inv).floor() as usize + 1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityRow {
    pub k: u32,
    /// `g(α^{p^k})`; the functional equation has `g ≡ 1`.
    pub g: i64,
    /// Sign of `1 - α^{p^{k+1}}` (never zero for `|α| < 1`).
    pub denominator_positive: bool,
    /// `1 - α^{p^{k+1}}` rounded to a float.
    pub denominator_approx: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub rows: Vec<RegularityRow>,
}

impl RegularityReport {
    pub fn regular(&self) -> bool {
        self.rows.iter().all(|r| r.g != 0 && r.denominator_positive)
    }
}

/// Confirms that the orbit of `α` avoids every zero of the leading
/// coefficient and denominator in `T(z)^p (1 - z^p) = T(z^p)`.
pub fn regularity_check(p: Prime, alpha: &ExactRational, kmax: u32) -> Result<RegularityReport> {
    require_orbit_point(alpha)?;
    let ln_abs = ln_abs_rational(alpha);
    let pf = p.get() as f64;
    let rows = (0..=kmax)
        .map(|k| {
            // α^m with m = p^{k+1}: |α^m| < 1, so 1 - α^m > 0 whatever the sign.
            let m_is_even = p.get() == 2;
            let power_negative = alpha.is_negative() && !m_is_even;
            let magnitude = (pf.powi(k as i32 + 1) * ln_abs).exp();
            let power = if power_negative {
                -magnitude
            } else {
                magnitude
            };
            RegularityRow {
                k,
                g: 1,
                denominator_positive: true,
                denominator_approx: 1.0 - power,
            }
        })
        .collect();
    Ok(RegularityReport { rows })
}

/// Unknown and constraint counts for the `m`-variable construction:
/// `(P+1)^m · C(m+P, m)` against `C(m+P², m)`.
pub fn multivariate_counts(degree: usize, m: usize) -> (BigInt, BigInt) {
    let unknowns = num_traits::pow(BigInt::from(degree + 1), m) * binomial(m + degree, m);
    let constraints = binomial(m + degree * degree, m);
    (unknowns, constraints)
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Index of an unknown `d_{j₁,j₂,l₁,l₂}`: the exponents of `T(z₁)` and
/// `T(z₂)`, then of `z₁` and `z₂`.
pub type MultiIndex = (usize, usize, usize, usize);

#[derive(Debug, Clone)]
pub struct MultiScheme {
    pub p: Prime,
    pub degree: usize,
    pub unknowns: usize,
    pub constraints: usize,
    pub rank: usize,
    pub nullity: usize,
    pub index: Vec<MultiIndex>,
    pub d: Vec<ExactRational>,
}

impl MultiScheme {
    pub fn nonzero_terms(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }
}

fn multi_index(degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for j1 in 0..=degree {
        for j2 in 0..=degree - j1 {
            for l1 in 0..=degree {
                for l2 in 0..=degree {
                    out.push((j1, j2, l1, l2));
                }
            }
        }
    }
    out
}

fn condition_index(degree: usize) -> Vec<(usize, usize)> {
    let top = degree * degree;
    (0..=top)
        .flat_map(|n1| (0..=top - n1).map(move |n2| (n1, n2)))
        .collect()
}

/// Two-variable scheme `Σ d_{j₁,j₂,l₁,l₂} z₁^{l₁} z₂^{l₂} T(z₁)^{j₁} T(z₂)^{j₂}`
/// with `j₁ + j₂ ≤ P` and `l₁, l₂ ≤ P`, whose Taylor coefficients vanish for
/// every monomial of total degree at most `P²`.
pub fn build_aux_multivariate(tab: &CoeffTable, degree: usize, m: usize) -> Result<MultiScheme> {
    if m != 2 {
        return Err(Error::InvalidArgument(format!(
            "only m = 2 variables are supported, got {m}"
        )));
    }
    let (u, c) = multivariate_counts(degree, m);
    if u <= c {
        return Err(Error::Precondition(format!(
            "counting fails for P = {degree}: {u} unknowns do not exceed {c} conditions"
        )));
    }
    let pp = degree * degree;
    if tab.order() < pp + degree {
        return Err(Error::Precondition(format!(
            "P = {degree} needs a coefficient table of order at least {}, got {}",
            pp + degree,
            tab.order()
        )));
    }
    let powers = table_powers(tab, pp, degree);
    let index = multi_index(degree);
    let conditions = condition_index(degree);
    let coeff = |j: usize, n: usize, l: usize| -> ExactRational {
        if l > n {
            ExactRational::zero()
        } else {
            powers[j].coeff(n - l).clone()
        }
    };
    let system: Vec<Vec<ExactRational>> = conditions
        .iter()
        .map(|&(n1, n2)| {
            index
                .iter()
                .map(|&(j1, j2, l1, l2)| {
                    let a = coeff(j1, n1, l1);
                    if a.is_zero() {
                        a
                    } else {
                        a * coeff(j2, n2, l2)
                    }
                })
                .collect()
        })
        .collect();
    let ns = nullspace(&system, index.len());
    let pick = ns
        .smallest_vector_index()
        .ok_or_else(|| Error::Internal("multivariate system has full column rank".into()))?;
    let d = ns.basis[pick]
        .iter()
        .map(|x| ExactRational::from_integer(x.clone()))
        .collect();
    Ok(MultiScheme {
        p: tab.p(),
        degree,
        unknowns: index.len(),
        constraints: conditions.len(),
        rank: ns.rank,
        nullity: ns.dimension(),
        index,
        d,
    })
}

/// Expands the two-variable scheme with `tab_1` substituted for `T(z₁)` and
/// `tab_2` for `T(z₂)` (powers by repeated squaring) and returns the first
/// monomial `(n₁, n₂)` of total degree `≤ P²` with a nonzero coefficient.
pub fn verify_multivariate_vanishing(
    s: &MultiScheme,
    tab_1: &CoeffTable,
    tab_2: &CoeffTable,
) -> Result<Option<(usize, usize)>> {
    let top = s.degree * s.degree;
    let powers = |tab: &CoeffTable| -> Result<Vec<TruncSeries>> {
        if tab.order() < top {
            return Err(Error::Precondition(format!(
                "table of order {} cannot check total degree {top}",
                tab.order()
            )));
        }
        let t = tab.truncate(top).as_series();
        let mut v = vec![TruncSeries::one(top)];
        for j in 1..=s.degree {
            v.push(ps_pow(&t, j as u64)?);
        }
        Ok(v)
    };
    let pw1 = powers(tab_1)?;
    let pw2 = powers(tab_2)?;
    // grid[n1][n2] accumulates the coefficient of z₁^{n1} z₂^{n2}.
    let mut grid = vec![vec![ExactRational::zero(); top + 1]; top + 1];
    for (&(j1, j2, l1, l2), c) in s.index.iter().zip(&s.d) {
        if c.is_zero() {
            continue;
        }
        for (n1, row) in grid.iter_mut().enumerate().skip(l1) {
            let a = pw1[j1].coeff(n1 - l1);
            if a.is_zero() {
                continue;
            }
            let ca = c * a;
            for (n2, cell) in row.iter_mut().enumerate().take(top - n1 + 1).skip(l2) {
                let b = pw2[j2].coeff(n2 - l2);
                if !b.is_zero() {
                    *cell += &ca * b;
                }
            }
        }
    }
    Ok(condition_index(s.degree)
        .into_iter()
        .find(|&(n1, n2)| !grid[n1][n2].is_zero()))
}

/// Bit size of the largest coefficient of the scheme.
pub fn scheme_bits(s: &AuxScheme) -> u64 {
    let ints: Vec<BigInt> = s.d.iter().flatten().map(|x| x.numer().clone()).collect();
    max_bits(&ints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::coeffs::{gen_cauchy_recurrence, gen_diff_recurrence, gen_log_exp};

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    #[test]
    fn system_shape() {
        let tab = gen_log_exp(p2(), 12);
        let sys = aux_system(&tab, 3);
        assert_eq!(sys.len(), 9);
        assert!(sys.iter().all(|r| r.len() == 16));
        // Row 0 only sees z^0 · T^j, whose constant term is 1.
        let nonzero: Vec<usize> = (0..16).filter(|&c| !sys[0][c].is_zero()).collect();
        assert_eq!(nonzero, vec![0, 4, 8, 12]);
    }

    #[test]
    fn small_schemes_vanish() {
        let tab = gen_log_exp(p2(), 40);
        let other = gen_diff_recurrence(p2(), 40);
        for degree in [2, 3, 4] {
            let s = build_aux(&tab, degree).unwrap();
            assert!(s.nullity > 2 * degree);
            assert_eq!(s.rank + s.nullity, (degree + 1) * (degree + 1));
            assert!(s.achieved_vanishing >= degree * degree);
            let v = verify_vanishing(&s, &other, 40).unwrap();
            assert!(v.at_least(degree * degree));
            assert_eq!(v.order(), s.achieved_vanishing);
        }
    }

    #[test]
    fn vanishing_order_regression() {
        let tab = gen_cauchy_recurrence(p2(), 30);
        let s = build_aux(&tab, 2).unwrap();
        let v = verify_vanishing(&s, &tab, 30).unwrap();
        assert_eq!(v.first_nonzero, Some(4));
    }

    #[test]
    fn perturbed_scheme_loses_vanishing() {
        let tab = gen_log_exp(p2(), 20);
        let mut s = build_aux(&tab, 3).unwrap();
        s.d[0][0] += ExactRational::one();
        let v = verify_vanishing(&s, &tab, 20).unwrap();
        assert!(v.order() < 9);
    }

    #[test]
    fn scheme_entries_are_coprime_integers() {
        let tab = gen_log_exp(p2(), 20);
        let s = build_aux(&tab, 3).unwrap();
        let g = s.d.iter().flatten().fold(BigInt::zero(), |g, x| {
            num_integer::Integer::gcd(&g, x.numer())
        });
        assert!(s.d.iter().flatten().all(|x| x.is_integer()));
        assert_eq!(g, BigInt::one());
    }

    #[test]
    fn precondition_on_table_order() {
        let tab = gen_log_exp(p2(), 10);
        assert_eq!(build_aux(&tab, 3).unwrap_err().exit_code(), 2);
        assert_eq!(build_aux(&tab, 1).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn json_round_trip() {
        let tab = gen_log_exp(p2(), 12);
        let s = build_aux(&tab, 2).unwrap();
        let json = s.to_json().unwrap();
        assert!(json.starts_with("{\"p\":2,\"P\":2,\"d\":[["));
        let back = AuxScheme::from_json(&json).unwrap();
        assert_eq!(back.d, s.d);
        assert_eq!(back.achieved_vanishing, s.achieved_vanishing);
        assert!(AuxScheme::from_json(
            r#"{"p":2,"P":1,"d":[["0/1","0/1"],["0/1","0/1"]],"achieved_vanishing":0}"#
        )
        .is_err());
    }

    #[test]
    fn decay_rows_and_scaling() {
        let tab = gen_log_exp(p2(), 20);
        let s = build_aux(&tab, 2).unwrap();
        let alpha = rat(1, 2);
        let r = decay_experiment(&s, &alpha, 3, 256).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert!(r.log_c.is_some());
        let scaled = decay_experiment(&s.scaled(&rat(-7, 3)), &alpha, 3, 256).unwrap();
        let shift = (7.0f64 / 3.0).ln();
        for (a, b) in r.rows.iter().zip(&scaled.rows) {
            assert!((b.log_abs.unwrap() - a.log_abs.unwrap() - shift).abs() < 1e-9);
        }
        assert!(decay_experiment(&s, &rat(1, 1), 2, 64).is_err());
        assert!(decay_experiment(&s, &rat(0, 1), 2, 64).is_err());
    }

    #[test]
    fn decay_precision_stable() {
        let tab = gen_log_exp(p2(), 20);
        let s = build_aux(&tab, 3).unwrap();
        let lo = decay_experiment(&s, &rat(1, 2), 4, 320).unwrap();
        let hi = decay_experiment(&s, &rat(1, 2), 4, 640).unwrap();
        for (a, b) in lo.rows.iter().zip(&hi.rows) {
            assert!((a.decay_exponent.unwrap() - b.decay_exponent.unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn low_precision_rows_become_indeterminate() {
        let tab = gen_log_exp(p2(), 20);
        let s = build_aux(&tab, 3).unwrap();
        let r = decay_experiment(&s, &rat(1, 2), 4, 32).unwrap();
        assert!(r.rows.last().unwrap().log_abs.is_none());
        assert!(r.min_exponent().is_none());
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,log_abs,decay_exponent\n"));
        assert!(text.trim_end().ends_with("4,,"));
    }

    #[test]
    fn ledger_columns() {
        let tab = gen_log_exp(p2(), 20);
        let s = build_aux(&tab, 3).unwrap();
        let l = height_ledger(&s, &rat(1, 2), 5).unwrap();
        let ln2 = std::f64::consts::LN_2;
        for row in &l.rows {
            let pk = 2f64.powi(row.k as i32);
            assert!((row.iterate_height - pk * ln2).abs() < 1e-12 * pk);
            assert!((row.analytic_bound + 9.0 * pk * ln2).abs() < 1e-9 * pk);
        }
        assert_eq!(l.crossover_p, (l.c2 / ln2).floor() as usize + 1);
        assert_eq!(l.analytic_dominates(), 3 > (l.c2 / ln2).floor() as usize);
    }

    #[test]
    fn iterate_height_follows_power_rule() {
        let alpha = rat(-3, 7);
        for m in [1u32, 2, 5, 16] {
            let exact = rational_height(&num_traits::pow(alpha.clone(), m as usize));
            assert!((exact - m as f64 * rational_height(&alpha)).abs() < 1e-9);
        }
    }

    #[test]
    fn regularity() {
        let r = regularity_check(p2(), &rat(1, 2), 10).unwrap();
        assert_eq!(r.rows.len(), 11);
        assert!(r.regular());
        assert!((r.rows[0].denominator_approx - 0.75).abs() < 1e-15);
        let p3 = Prime::new(3).unwrap();
        let r = regularity_check(p3, &rat(-1, 2), 2).unwrap();
        assert!((r.rows[0].denominator_approx - 1.125).abs() < 1e-15);
        assert!(regularity_check(p2(), &rat(-1, 1), 3).is_err());
    }

    #[test]
    fn multivariate_counting() {
        let (u, c) = multivariate_counts(4, 2);
        assert_eq!((u, c), (BigInt::from(375), BigInt::from(153)));
        let (u, c) = multivariate_counts(2, 2);
        assert_eq!((u, c), (BigInt::from(54), BigInt::from(15)));
        let tab = gen_log_exp(p2(), 10);
        assert_eq!(
            build_aux_multivariate(&tab, 0, 2).unwrap_err().exit_code(),
            2
        );
        assert_eq!(
            build_aux_multivariate(&tab, 2, 3).unwrap_err().exit_code(),
            1
        );
    }

    #[test]
    fn multivariate_vanishing() {
        let tab = gen_log_exp(p2(), 12);
        let s = build_aux_multivariate(&tab, 2, 2).unwrap();
        assert_eq!(s.unknowns, 54);
        assert_eq!(s.constraints, 15);
        assert!(s.nullity >= 54 - 15);
        assert!(s.nonzero_terms() > 0);
        let a = gen_cauchy_recurrence(p2(), 12);
        let b = gen_diff_recurrence(p2(), 12);
        assert_eq!(verify_multivariate_vanishing(&s, &a, &b).unwrap(), None);
        let mut bad = s.clone();
        let i = bad.d.iter().position(|x| !x.is_zero()).unwrap();
        bad.d[i] += ExactRational::one();
        assert!(verify_multivariate_vanishing(&bad, &a, &b)
            .unwrap()
            .is_some());
    }
}
