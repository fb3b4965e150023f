//! The coefficient sequence `t_p(n)` of `T_p(z) = Σ t_p(n) z^n`.
//!
//! Three generators compute the same table by unrelated routes:
//!
//! * [`gen_log_exp`] exponentiates `Σ ν_p(n)/n · z^n` (reference oracle);
//! * [`gen_cauchy_recurrence`] solves `T^p (1 - z^p) = T(z^p)` one index at a
//!   time, keeping the powers of the known prefix up to date;
//! * [`gen_diff_recurrence`] runs `n t(n) = Σ_j Σ_m t(n - m p^j)` with
//!   running sums per residue class mod `p^j`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    format_rational, is_p_power_denominator, nu_p, nu_p_rational, parse_rational, ExactRational,
    Prime, Valuation,
};
use crate::error::{Error, Result};
use crate::golden::golden_table;
use crate::series::{ps_exp, ps_mul, ps_pow, ps_substitute_power, TruncSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    LogExp,
    CauchyRecurrence,
    DiffRecurrence,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::LogExp,
        Algorithm::CauchyRecurrence,
        Algorithm::DiffRecurrence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LogExp => "log-exp",
            Algorithm::CauchyRecurrence => "cauchy",
            Algorithm::DiffRecurrence => "diff",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-exp" | "logexp" => Ok(Algorithm::LogExp),
            "cauchy" => Ok(Algorithm::CauchyRecurrence),
            "diff" => Ok(Algorithm::DiffRecurrence),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm {other:?}"
            ))),
        }
    }
}

/// `t_p(0..=N)` for one prime, tagged with the generator that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    p: Prime,
    t: Vec<ExactRational>,
    algorithm: Algorithm,
}

impl CoeffTable {
    /// Wrap raw values without checking any invariant. The check functions
    /// in this module exist to audit such tables.
    pub fn from_parts(p: Prime, t: Vec<ExactRational>, algorithm: Algorithm) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient table".into()));
        }
        Ok(CoeffTable { p, t, algorithm })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn order(&self) -> usize {
        self.t.len() - 1
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn values(&self) -> &[ExactRational] {
        &self.t
    }

    pub fn get(&self, n: usize) -> Option<&ExactRational> {
        self.t.get(n)
    }

    /// Replace one entry; used for fault injection in audits and tests.
    pub fn with_entry(mut self, n: usize, value: ExactRational) -> Self {
        self.t[n] = value;
        self
    }

    pub fn as_series(&self) -> TruncSeries {
        TruncSeries::new(self.t.clone()).expect("table is nonempty")
    }

    pub fn truncate(&self, order: usize) -> CoeffTable {
        CoeffTable {
            p: self.p,
            t: self.t[..=order.min(self.order())].to_vec(),
            algorithm: self.algorithm,
        }
    }

    /// Observed `ν_p(t_p(n))` for every index.
    pub fn valuations(&self) -> Vec<Valuation> {
        self.t.iter().map(|x| nu_p_rational(self.p, x)).collect()
    }

    /// Largest `|t_p(n)|` in the table.
    pub fn max_abs(&self) -> ExactRational {
        self.t
            .iter()
            .map(|x| {
                if x < &BigRational::zero() {
                    -x
                } else {
                    x.clone()
                }
            })
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

pub fn generate(algorithm: Algorithm, p: Prime, order: usize) -> CoeffTable {
    match algorithm {
        Algorithm::LogExp => gen_log_exp(p, order),
        Algorithm::CauchyRecurrence => gen_cauchy_recurrence(p, order),
        Algorithm::DiffRecurrence => gen_diff_recurrence(p, order),
    }
}

/// `exp(Σ_{n≥1} ν_p(n)/n · z^n)`.
pub fn gen_log_exp(p: Prime, order: usize) -> CoeffTable {
    let mut log = TruncSeries::zero(order);
    for n in 1..=order {
        let v = nu_p(p, n as u64).expect("n >= 1");
        if v > 0 {
            log.set_coeff(n, BigRational::new(BigInt::from(v), BigInt::from(n)));
        }
    }
    let t = ps_exp(&log).expect("constant term is zero").into_coeffs();
    CoeffTable {
        p,
        t,
        algorithm: Algorithm::LogExp,
    }
}

/// Solve the functional equation coefficient by coefficient.
///
/// Comparing `z^{pm}` on both sides of `T(z)^p = T(z^p)/(1 - z^p)` gives
/// `p·t(pm) + S(m) = Σ_{j≤m} t(j)`, where `S(m)` is the `z^{pm}` coefficient
/// of `A^p` and `A` is `T` truncated below `pm`. The ladder `A, A², …, A^p`
/// is updated in place each time a coefficient `c = t(n)` joins the prefix:
/// `(A + c z^n)^k = Σ_i C(k,i) c^i z^{ni} A^{k-i}`.
pub fn gen_cauchy_recurrence(p: Prime, order: usize) -> CoeffTable {
    let pu = p.as_usize();
    let mut t = vec![BigRational::zero(); order + 1];
    t[0] = BigRational::one();
    if pu > order {
        return CoeffTable {
            p,
            t,
            algorithm: Algorithm::CauchyRecurrence,
        };
    }
    // ladder[k] = A^k truncated at `order`, k = 0..=p; A starts as 1.
    let mut ladder: Vec<Vec<ExactRational>> = (0..=pu)
        .map(|_| {
            let mut v = vec![BigRational::zero(); order + 1];
            v[0] = BigRational::one();
            v
        })
        .collect();
    let p_rat = BigRational::from_integer(BigInt::from(pu));
    let mut running_sum = BigRational::one(); // Σ_{j ≤ m} t(j), starting at m = 0
    for m in 1..=order / pu {
        let n = pu * m;
        // m ≤ n - 1, so t(m) is already known.
        running_sum += &t[m];
        let s = &ladder[pu][n];
        let c = (&running_sum - s) / &p_rat;
        t[n] = c.clone();
        if c.is_zero() {
            continue;
        }
        // c^i for i = 0..=p, only as far as z^{ni} stays in range.
        let max_i = (order / n).min(pu);
        let mut c_pows = vec![BigRational::one()];
        for i in 1..=max_i {
            let next = &c_pows[i - 1] * &c;
            c_pows.push(next);
        }
        for k in (1..=pu).rev() {
            let imax = max_i.min(k);
            let mut binom = BigInt::one();
            for i in 1..=imax {
                binom = binom * BigInt::from(k + 1 - i) / BigInt::from(i);
                let factor = &c_pows[i] * &binom;
                let shift = n * i;
                let (lo, hi) = ladder.split_at_mut(k);
                let src = &lo[k - i];
                let dst = &mut hi[0];
                // Only multiples of p carry nonzero coefficients.
                let mut idx = 0;
                while idx + shift <= order {
                    if !src[idx].is_zero() {
                        dst[idx + shift] += &factor * &src[idx];
                    }
                    idx += pu;
                }
            }
        }
    }
    CoeffTable {
        p,
        t,
        algorithm: Algorithm::CauchyRecurrence,
    }
}

/// `t(n) = (1/n) Σ_{j≥1} Σ_{1≤m≤⌊n/p^j⌋} t(n - m p^j)`.
///
/// The inner sum over `m` is a running sum along the residue class of `n`
/// modulo `p^j`, so each step costs one addition per `j`.
pub fn gen_diff_recurrence(p: Prime, order: usize) -> CoeffTable {
    let mut t = vec![BigRational::zero(); order + 1];
    t[0] = BigRational::one();
    let mut steps = Vec::new();
    let mut q = p.as_usize();
    while q <= order {
        steps.push(q);
        q = match q.checked_mul(p.as_usize()) {
            Some(next) => next,
            None => break,
        };
    }
    // class_sums[j][n] = Σ_{m≥0, n - m q_j ≥ 0} t(n - m q_j)
    let mut class_sums: Vec<Vec<ExactRational>> = steps
        .iter()
        .map(|_| vec![BigRational::zero(); order + 1])
        .collect();
    for sums in class_sums.iter_mut() {
        sums[0] = BigRational::one();
    }
    for n in 1..=order {
        let mut acc = BigRational::zero();
        for (j, &q) in steps.iter().enumerate() {
            if q > n {
                break;
            }
            let s = &class_sums[j][n - q];
            if !s.is_zero() {
                acc += s;
            }
        }
        if !acc.is_zero() {
            t[n] = acc / BigInt::from(n);
        }
        for (j, &q) in steps.iter().enumerate() {
            class_sums[j][n] = if n >= q {
                &t[n] + &class_sums[j][n - q]
            } else {
                t[n].clone()
            };
        }
    }
    CoeffTable {
        p,
        t,
        algorithm: Algorithm::DiffRecurrence,
    }
}

/// Outcome of one invariant audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub check: &'static str,
    /// Indices (or entries) that were examined.
    pub checked: usize,
    /// Offending indices, ascending.
    pub violations: Vec<usize>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<usize> {
        self.violations.first().copied()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "{}: pass ({} checked)", self.check, self.checked)
        } else {
            let shown: Vec<String> = self
                .violations
                .iter()
                .take(10)
                .map(|v| v.to_string())
                .collect();
            write!(
                f,
                "{}: FAIL ({} violations of {}; first at {})",
                self.check,
                self.violations.len(),
                self.checked,
                shown.join(", ")
            )
        }
    }
}

/// `t(n) = 0` whenever `p ∤ n`, and `t(0) = 1`.
pub fn check_vanishing(tab: &CoeffTable) -> CheckReport {
    let p = tab.p.as_usize();
    let mut violations = Vec::new();
    if !tab.t[0].is_one() {
        violations.push(0);
    }
    violations.extend((1..=tab.order()).filter(|&n| n % p != 0 && !tab.t[n].is_zero()));
    CheckReport {
        check: "vanishing",
        checked: tab.t.len(),
        violations,
    }
}

/// Each nonzero entry has a `p^k` denominator, and its numerator is prime
/// to `p` whenever `k > 0`.
pub fn check_p_integrality(tab: &CoeffTable) -> CheckReport {
    let violations = tab
        .t
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero() && !is_p_power_denominator(tab.p, x).holds())
        .map(|(n, _)| n)
        .collect();
    CheckReport {
        check: "p-integrality",
        checked: tab.t.len(),
        violations,
    }
}

/// Residual `T^p (1 - z^p) - T(z^p)` through the table order.
pub fn functional_residual(tab: &CoeffTable) -> TruncSeries {
    let series = tab.as_series();
    let order = series.order();
    let lhs = ps_mul(
        &ps_pow(&series, tab.p.get()).expect("p >= 2"),
        &TruncSeries::one_minus_zp(tab.p, order),
    );
    lhs.sub(&ps_substitute_power(&series, tab.p))
}

pub fn check_functional_equation(tab: &CoeffTable) -> CheckReport {
    let residual = functional_residual(tab);
    let violations = residual
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, _)| n)
        .collect();
    CheckReport {
        check: "functional-equation",
        checked: residual.coeffs().len(),
        violations,
    }
}

/// Exact agreement with the embedded reference values on their common range.
/// Primes outside the reference set check nothing and pass.
pub fn check_golden(tab: &CoeffTable) -> CheckReport {
    let golden = golden_table();
    let mut checked = 0;
    let mut violations = Vec::new();
    if let Some(col) = golden.column(tab.p) {
        for (n, expected) in col.iter().enumerate().take(tab.t.len()) {
            checked += 1;
            if &tab.t[n] != expected {
                violations.push(n);
            }
        }
    }
    CheckReport {
        check: "golden",
        checked,
        violations,
    }
}

/// Indices where two tables of the same prime disagree (over the shorter range).
pub fn check_tables_agree(a: &CoeffTable, b: &CoeffTable) -> CheckReport {
    let n = a.t.len().min(b.t.len());
    let mut violations: Vec<usize> = (0..n).filter(|&i| a.t[i] != b.t[i]).collect();
    if a.p != b.p {
        violations = (0..n).collect();
    }
    CheckReport {
        check: "cross-algorithm",
        checked: n,
        violations,
    }
}

/// CSV header for coefficient exports.
pub const COEFF_CSV_HEADER: [&str; 4] = ["p", "n", "numerator", "denominator"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffRow {
    pub p: u64,
    pub n: usize,
    pub numerator: String,
    pub denominator: String,
}

impl CoeffRow {
    pub fn value(&self) -> Result<ExactRational> {
        parse_rational(&format!("{}/{}", self.numerator, self.denominator))
    }
}

impl CoeffTable {
    pub fn rows(&self) -> Vec<CoeffRow> {
        self.t
            .iter()
            .enumerate()
            .map(|(n, x)| CoeffRow {
                p: self.p.get(),
                n,
                numerator: x.numer().to_string(),
                denominator: x.denom().to_string(),
            })
            .collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        write_coeff_rows(out, &self.rows())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CoeffDocument::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: CoeffDocument = serde_json::from_str(s)?;
        CoeffTable::try_from(&doc)
    }
}

pub fn write_coeff_rows<W: std::io::Write>(out: W, rows: &[CoeffRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(COEFF_CSV_HEADER)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read `p,n,numerator,denominator` rows. Errors carry 1-based line numbers.
pub fn read_coeff_csv<R: std::io::Read>(input: R) -> Result<Vec<(u64, usize, ExactRational)>> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != COEFF_CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header {:?}", COEFF_CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, record) in reader.deserialize::<CoeffRow>().enumerate() {
        let line = i + 2;
        let row = record.map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        let value = row.value().map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        out.push((row.p, row.n, value));
    }
    Ok(out)
}

/// JSON form of a table: the series document plus `p` and `algorithm`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CoeffDocument {
    pub p: u64,
    pub algorithm: String,
    pub order: usize,
    pub coeffs: Vec<String>,
}

impl From<&CoeffTable> for CoeffDocument {
    fn from(tab: &CoeffTable) -> Self {
        CoeffDocument {
            p: tab.p.get(),
            algorithm: tab.algorithm.name().to_string(),
            order: tab.order(),
            coeffs: tab.t.iter().map(format_rational).collect(),
        }
    }
}

impl TryFrom<&CoeffDocument> for CoeffTable {
    type Error = Error;
    fn try_from(doc: &CoeffDocument) -> Result<Self> {
        if doc.coeffs.len() != doc.order + 1 {
            return Err(Error::InvalidArgument(format!(
                "document declares order {} but carries {} coefficients",
                doc.order,
                doc.coeffs.len()
            )));
        }
        let t = doc
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>>>()?;
        CoeffTable::from_parts(Prime::new(doc.p)?, t, doc.algorithm.parse()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    const T2: [(i64, i64); 9] = [
        (1, 1),
        (0, 1),
        (1, 2),
        (0, 1),
        (5, 8),
        (0, 1),
        (7, 16),
        (0, 1),
        (83, 128),
    ];

    #[test]
    fn log_exp_examples() {
        let tab = gen_log_exp(p(2), 8);
        let expected: Vec<_> = T2.iter().map(|&(a, b)| rat(a, b)).collect();
        assert_eq!(tab.values(), expected.as_slice());

        let tab = gen_log_exp(p(7), 14);
        for n in 0..=14 {
            let expected = match n {
                0 => rat(1, 1),
                7 => rat(1, 7),
                14 => rat(4, 49),
                _ => rat(0, 1),
            };
            assert_eq!(tab.get(n).unwrap(), &expected);
        }
        assert_eq!(gen_log_exp(p(13), 0).values(), &[rat(1, 1)]);
    }

    #[test]
    fn cauchy_examples() {
        let tab = gen_cauchy_recurrence(p(2), 4);
        assert_eq!(tab.get(2).unwrap(), &rat(1, 2));
        assert_eq!(tab.get(4).unwrap(), &rat(5, 8));
        assert_eq!(gen_cauchy_recurrence(p(3), 3).get(3).unwrap(), &rat(1, 3));
        assert_eq!(gen_cauchy_recurrence(p(5), 0).values(), &[rat(1, 1)]);
    }

    #[test]
    fn diff_examples() {
        let tab = gen_diff_recurrence(p(2), 4);
        assert_eq!(tab.get(1).unwrap(), &rat(0, 1));
        assert_eq!(tab.get(2).unwrap(), &rat(1, 2));
        assert_eq!(tab.get(4).unwrap(), &rat(5, 8));
    }

    #[test]
    fn generators_agree_on_small_orders() {
        for q in [2, 3, 5, 7, 11] {
            let a = gen_log_exp(p(q), 60);
            let b = gen_cauchy_recurrence(p(q), 60);
            let c = gen_diff_recurrence(p(q), 60);
            assert!(check_tables_agree(&a, &b).passed(), "cauchy p={q}");
            assert!(check_tables_agree(&a, &c).passed(), "diff p={q}");
        }
    }

    #[test]
    fn vanishing_checks() {
        assert!(check_vanishing(&gen_log_exp(p(3), 20)).passed());
        let bad = gen_log_exp(p(2), 8).with_entry(5, rat(1, 1));
        assert_eq!(check_vanishing(&bad).first_violation(), Some(5));
        let tab = gen_diff_recurrence(p(19), 20);
        assert!(check_vanishing(&tab).passed());
        let nonzero: Vec<usize> = (0..=20)
            .filter(|&n| !tab.get(n).unwrap().is_zero())
            .collect();
        assert_eq!(nonzero, vec![0, 19]);
        assert_eq!(tab.get(19).unwrap(), &rat(1, 19));
    }

    #[test]
    fn integrality_checks() {
        let t2 = gen_log_exp(p(2), 20);
        assert_eq!(t2.get(20).unwrap(), &rat(144427, 262144));
        assert!(check_p_integrality(&t2).passed());
        let t3 = gen_log_exp(p(3), 15);
        assert_eq!(t3.get(15).unwrap(), &rat(109, 729));
        assert!(check_p_integrality(&t3).passed());
        let bad = t2.with_entry(6, rat(1, 6));
        assert_eq!(check_p_integrality(&bad).violations, vec![6]);
        // Entries are reduced before the test: 2/8 is 1/4.
        let bad = gen_log_exp(p(2), 4).with_entry(4, rat(2, 8));
        assert!(is_p_power_denominator(p(2), &rat(2, 8)).holds());
        assert!(check_p_integrality(&bad).passed());
    }

    #[test]
    fn functional_equation_checks() {
        assert!(check_functional_equation(&gen_log_exp(p(2), 64)).passed());
        assert!(check_functional_equation(&gen_diff_recurrence(p(3), 63)).passed());
        let tab = gen_log_exp(p(2), 16);
        let bumped = tab.get(4).unwrap() + rat(1, 1);
        let bad = tab.with_entry(4, bumped);
        assert_eq!(check_functional_equation(&bad).first_violation(), Some(4));
    }

    #[test]
    fn golden_checks() {
        for &q in &crate::golden::GOLDEN_PRIMES {
            for alg in Algorithm::ALL {
                let report = check_golden(&generate(alg, p(q), 20));
                assert!(report.passed(), "{alg} p={q}: {report}");
                assert_eq!(report.checked, 21);
            }
        }
        let bad = gen_log_exp(p(5), 20).with_entry(20, rat(45, 625));
        assert_eq!(check_golden(&bad).violations, vec![20]);
    }

    #[test]
    fn observed_valuations_exceed_index_bound() {
        // t_2(8) = 83/128: ν_2 = -7 while ν_2(8) = 3.
        let v = gen_log_exp(p(2), 8).valuations();
        assert_eq!(v[8], Valuation::Finite(-7));
        assert!(v[1].is_infinite());
    }

    #[test]
    fn csv_and_json_formats() {
        let tab = gen_log_exp(p(2), 4);
        let csv = tab.to_csv_string().unwrap();
        assert_eq!(
            csv,
            "p,n,numerator,denominator\n2,0,1,1\n2,1,0,1\n2,2,1,2\n2,3,0,1\n2,4,5,8\n"
        );
        let rows = read_coeff_csv(csv.as_bytes()).unwrap();
        assert_eq!(rows[4], (2, 4, rat(5, 8)));
        let json = tab.to_json().unwrap();
        assert_eq!(
            json,
            r#"{"p":2,"algorithm":"log-exp","order":4,"coeffs":["1/1","0/1","1/2","0/1","5/8"]}"#
        );
        assert_eq!(CoeffTable::from_json(&json).unwrap(), tab);
    }

    #[test]
    fn csv_parse_errors_carry_line_numbers() {
        let bad = "p,n,numerator,denominator\n2,0,1,1\n2,x,1,2\n";
        match read_coeff_csv(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let bad = "p,n,numerator,denominator\n2,0,1,0\n";
        assert!(matches!(
            read_coeff_csv(bad.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_coeff_csv("a,b\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
