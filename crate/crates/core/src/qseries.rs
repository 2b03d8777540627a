//! Truncated elements of `Z((q)) = Z[q^-1][[q]]`.
//!
//! A [`QSeries`] stores the coefficients of `q^min_exp, q^(min_exp+1), ...`
//! together with the order up to which they are known. Coefficients past
//! `trunc_order` are *unknown*, not zero, and all arithmetic propagates the
//! known window.

use std::cmp::{max, min};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Int;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QSeriesError {
    #[error("leading coefficient {leading} is not a unit of Z")]
    NonUnitLeadingCoefficient { leading: String },
    #[error("coefficient of q^{exponent} requested but series is only known up to q^{trunc_order}")]
    BeyondTruncation { exponent: i64, trunc_order: i64 },
}

impl QSeriesError {
    pub fn name(&self) -> &'static str {
        match self {
            QSeriesError::NonUnitLeadingCoefficient { .. } => "NonUnitLeadingCoefficient",
            QSeriesError::BeyondTruncation { .. } => "BeyondTruncation",
        }
    }
}

/// Canonical form: first and last stored coefficients are nonzero; the zero
/// series has no coefficients and `min_exp = trunc_order + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    min_exp: i64,
    coeffs: Vec<Int>,
    trunc_order: i64,
}

impl QSeries {
    pub fn new(min_exp: i64, coeffs: Vec<Int>, trunc_order: i64) -> Self {
        let mut coeffs = coeffs;
        let keep = (trunc_order - min_exp + 1).max(0) as usize;
        coeffs.truncate(keep);
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return QSeries::zero(trunc_order);
        }
        coeffs.drain(..lead);
        QSeries {
            min_exp: min_exp + lead as i64,
            coeffs,
            trunc_order,
        }
    }

    pub fn from_i64s(min_exp: i64, coeffs: &[i64], trunc_order: i64) -> Self {
        QSeries::new(min_exp, coeffs.iter().map(|&c| Int::from(c)).collect(), trunc_order)
    }

    pub fn zero(trunc_order: i64) -> Self {
        QSeries {
            min_exp: trunc_order + 1,
            coeffs: Vec::new(),
            trunc_order,
        }
    }

    pub fn one(trunc_order: i64) -> Self {
        QSeries::monomial(Int::one(), 0, trunc_order)
    }

    /// `c q^exp`, known up to `trunc_order`.
    pub fn monomial(c: Int, exp: i64, trunc_order: i64) -> Self {
        QSeries::new(exp, vec![c], trunc_order)
    }

    /// Builds a series from sparse `(exponent, coefficient)` terms.
    pub fn from_terms<I>(terms: I, trunc_order: i64) -> Self
    where
        I: IntoIterator<Item = (i64, Int)>,
    {
        let terms: Vec<(i64, Int)> = terms.into_iter().filter(|(e, _)| *e <= trunc_order).collect();
        let Some(lo) = terms.iter().map(|(e, _)| *e).min() else {
            return QSeries::zero(trunc_order);
        };
        let hi = terms.iter().map(|(e, _)| *e).max().unwrap();
        let mut coeffs = vec![Int::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        QSeries::new(lo, coeffs, trunc_order)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient; `trunc_order + 1` for zero.
    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.min_exp)
    }

    pub fn trunc_order(&self) -> i64 {
        self.trunc_order
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<&Int> {
        self.coeffs.first()
    }

    /// A unit of `Z((q))`: nonzero with leading coefficient `±1`.
    pub fn is_unit(&self) -> bool {
        self.leading_coeff().is_some_and(|c| c.abs().is_one())
    }

    pub fn coeff(&self, n: i64) -> Result<Int, QSeriesError> {
        if n > self.trunc_order {
            return Err(QSeriesError::BeyondTruncation {
                exponent: n,
                trunc_order: self.trunc_order,
            });
        }
        Ok(self.coeff_unchecked(n))
    }

    fn coeff_unchecked(&self, n: i64) -> Int {
        if n < self.min_exp {
            return Int::zero();
        }
        self.coeffs
            .get((n - self.min_exp) as usize)
            .cloned()
            .unwrap_or_else(Int::zero)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Int)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.min_exp + i as i64, c))
    }

    /// Forgets everything above `order` (never extends the known window).
    pub fn truncate(&self, order: i64) -> Self {
        QSeries::new(self.min_exp, self.coeffs.clone(), min(order, self.trunc_order))
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return QSeries::zero(self.trunc_order + k);
        }
        QSeries {
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
            trunc_order: self.trunc_order + k,
        }
    }

    pub fn scale(&self, c: &Int) -> Self {
        QSeries::new(
            self.min_exp,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.trunc_order,
        )
    }

    /// Divides every coefficient by `d`; `None` unless all are divisible.
    pub fn exact_div_scalar(&self, d: &Int) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !(c % d).is_zero() {
                return None;
            }
            out.push(c / d);
        }
        Some(QSeries::new(self.min_exp, out, self.trunc_order))
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &QSeries, op: impl Fn(&Int, &Int) -> Int) -> QSeries {
        let trunc = min(self.trunc_order, other.trunc_order);
        let lo = min(self.min_exp, other.min_exp);
        if lo > trunc {
            return QSeries::zero(trunc);
        }
        let hi = max(self.last_exp(), other.last_exp()).min(trunc);
        if hi < lo {
            return QSeries::zero(trunc);
        }
        let coeffs = (lo..=hi)
            .map(|n| op(&self.coeff_unchecked(n), &other.coeff_unchecked(n)))
            .collect();
        QSeries::new(lo, coeffs, trunc)
    }

    fn last_exp(&self) -> i64 {
        self.min_exp + self.coeffs.len() as i64 - 1
    }

    /// Cauchy product. Known up to `min(a.trunc + val(b), b.trunc + val(a))`.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let trunc = min(
            self.trunc_order + other.min_exp,
            other.trunc_order + self.min_exp,
        );
        if self.is_zero() || other.is_zero() {
            return QSeries::zero(trunc);
        }
        let lo = self.min_exp + other.min_exp;
        if lo > trunc {
            return QSeries::zero(trunc);
        }
        let len = ((trunc - lo + 1) as usize).min(self.coeffs.len() + other.coeffs.len() - 1);
        let mut coeffs = vec![Int::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] += a * b;
            }
        }
        QSeries::new(lo, coeffs, trunc)
    }

    /// Multiplicative inverse of a unit; the relative precision is preserved.
    pub fn invert(&self) -> Result<QSeries, QSeriesError> {
        let Some(u) = self.leading_coeff() else {
            return Err(QSeriesError::NonUnitLeadingCoefficient {
                leading: "0".into(),
            });
        };
        if !u.abs().is_one() {
            return Err(QSeriesError::NonUnitLeadingCoefficient {
                leading: u.to_string(),
            });
        }
        let u = u.clone();
        let precision = (self.trunc_order - self.min_exp) as usize;
        let mut b: Vec<Int> = Vec::with_capacity(precision + 1);
        b.push(u.clone());
        for i in 1..=precision {
            let mut acc = Int::zero();
            for j in 1..=i.min(self.coeffs.len() - 1) {
                acc += &self.coeffs[j] * &b[i - j];
            }
            b.push(-(&u * acc));
        }
        Ok(QSeries::new(
            -self.min_exp,
            b,
            -self.min_exp + precision as i64,
        ))
    }

    /// Determinant of a square matrix of series by permutation expansion.
    pub fn determinant(m: &[Vec<QSeries>]) -> QSeries {
        let n = m.len();
        if n == 0 {
            return QSeries::one(i64::MAX / 4);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total: Option<QSeries> = None;
        permute(&mut perm, 0, &mut |p, even| {
            let mut term = m[0][p[0]].clone();
            for (i, &j) in p.iter().enumerate().skip(1) {
                term = term.mul(&m[i][j]);
            }
            if !even {
                term = -term;
            }
            total = Some(match total.take() {
                None => term,
                Some(t) => t.add(&term),
            });
        });
        total.unwrap()
    }
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize], bool)) {
    // Lexicographic recursion with parity tracked through swaps.
    fn go(p: &mut Vec<usize>, k: usize, even: bool, f: &mut impl FnMut(&[usize], bool)) {
        if k == p.len() {
            f(p, even);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            go(p, k + 1, if i == k { even } else { !even }, f);
            p.swap(k, i);
        }
    }
    go(p, k, true, f)
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
            ..self
        }
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = !mag.is_one() || e == 0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{e}")?,
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(q^{})", self.trunc_order + 1)
    }
}

/// `Int` to `i64` where the callers know the value is small.
pub(crate) fn small(c: &Int) -> i64 {
    c.to_i64().expect("coefficient exceeds i64")
}
