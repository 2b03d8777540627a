//! Truncated series in `q` whose coefficients are finitely supported
//! functions on the weight lattice: `sum c(mu, n) t^mu q^n`.

use std::cmp::min;
use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::qseries::QSeries;
use crate::root_data::{Weight, WeylElement};
use crate::Int;

pub type Layer = BTreeMap<Weight, Int>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedQSeries {
    terms: BTreeMap<i64, Layer>,
    trunc_order: i64,
}

impl WeightedQSeries {
    pub fn zero(trunc_order: i64) -> Self {
        WeightedQSeries {
            terms: BTreeMap::new(),
            trunc_order,
        }
    }

    pub fn monomial(weight: Weight, n: i64, coeff: Int, trunc_order: i64) -> Self {
        let mut s = Self::zero(trunc_order);
        s.add_term(n, weight, coeff);
        s
    }

    pub fn from_terms<I>(terms: I, trunc_order: i64) -> Self
    where
        I: IntoIterator<Item = (i64, Weight, Int)>,
    {
        let mut s = Self::zero(trunc_order);
        for (n, w, c) in terms {
            s.add_term(n, w, c);
        }
        s
    }

    /// Adds `c t^w q^n`; terms beyond the truncation order are dropped.
    pub fn add_term(&mut self, n: i64, w: Weight, c: Int) {
        if n > self.trunc_order || c.is_zero() {
            return;
        }
        let layer = self.terms.entry(n).or_default();
        let slot = layer.entry(w.clone()).or_insert_with(Int::zero);
        *slot += c;
        if slot.is_zero() {
            layer.remove(&w);
            if layer.is_empty() {
                self.terms.remove(&n);
            }
        }
    }

    pub fn trunc_order(&self) -> i64 {
        self.trunc_order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.values().map(|l| l.len()).sum()
    }

    /// Lowest stored q-exponent, or `trunc_order + 1` when empty.
    pub fn min_q(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.trunc_order + 1)
    }

    pub fn max_q(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Coefficient of `t^w q^n`; zero when absent (callers own the truncation check).
    pub fn coeff(&self, n: i64, w: &Weight) -> Int {
        self.terms
            .get(&n)
            .and_then(|l| l.get(w))
            .cloned()
            .unwrap_or_else(Int::zero)
    }

    pub fn layer(&self, n: i64) -> Option<&Layer> {
        self.terms.get(&n)
    }

    pub fn layers(&self) -> impl Iterator<Item = (i64, &Layer)> + '_ {
        self.terms.iter().map(|(n, l)| (*n, l))
    }

    /// All terms sorted by `(q, weight)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Weight, &Int)> + '_ {
        self.terms
            .iter()
            .flat_map(|(n, l)| l.iter().map(move |(w, c)| (*n, w, c)))
    }

    pub fn truncate(&self, order: i64) -> Self {
        let order = min(order, self.trunc_order);
        WeightedQSeries {
            terms: self.terms.range(..=order).map(|(n, l)| (*n, l.clone())).collect(),
            trunc_order: order,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(other.trunc_order);
        for (n, w, c) in other.terms() {
            out.add_term(n, w.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Int) -> Self {
        if k.is_zero() {
            return Self::zero(self.trunc_order);
        }
        self.map_coeffs(|c| c * k)
    }

    fn map_coeffs(&self, f: impl Fn(&Int) -> Int) -> Self {
        WeightedQSeries {
            terms: self
                .terms
                .iter()
                .map(|(n, l)| (*n, l.iter().map(|(w, c)| (w.clone(), f(c))).collect()))
                .collect(),
            trunc_order: self.trunc_order,
        }
    }

    /// Product; known up to `min(a.trunc + b.min_q, b.trunc + a.min_q)`.
    pub fn mul(&self, other: &Self) -> Self {
        let trunc = min(
            self.trunc_order + other.min_q(),
            other.trunc_order + self.min_q(),
        );
        let mut out = Self::zero(trunc);
        for (n1, l1) in &self.terms {
            for (n2, l2) in other.terms.range(..=trunc - n1) {
                for (w1, c1) in l1 {
                    for (w2, c2) in l2 {
                        out.add_term(n1 + n2, w1.add(w2), c1 * c2);
                    }
                }
            }
        }
        out
    }

    /// Applies `f` to every weight; `f` must be injective.
    pub fn map_weights(&self, f: impl Fn(&Weight) -> Weight) -> Self {
        let mut out = Self::zero(self.trunc_order);
        for (n, w, c) in self.terms() {
            out.add_term(n, f(w), c.clone());
        }
        out
    }

    pub fn negate_weights(&self) -> Self {
        self.map_weights(Weight::neg)
    }

    pub fn act_weyl(&self, w: &WeylElement) -> Self {
        self.map_weights(|mu| w.act(mu))
    }

    /// The q-series of coefficients of a fixed weight.
    pub fn weight_coefficient(&self, w: &Weight) -> QSeries {
        QSeries::from_terms(
            self.terms
                .iter()
                .filter_map(|(n, l)| l.get(w).map(|c| (*n, c.clone()))),
            self.trunc_order,
        )
    }

    pub fn constant_weight_term(&self) -> QSeries {
        let rank = self.terms().next().map(|(_, w, _)| w.rank()).unwrap_or(0);
        self.weight_coefficient(&Weight::zero(rank))
    }

    /// Constant weight term of `self * other`, without forming the product.
    pub fn constant_term_of_product(&self, other: &Self) -> QSeries {
        let trunc = min(
            self.trunc_order + other.min_q(),
            other.trunc_order + self.min_q(),
        );
        let mut acc: BTreeMap<i64, Int> = BTreeMap::new();
        for (n1, l1) in &self.terms {
            for (n2, l2) in other.terms.range(..=trunc - n1) {
                for (w1, c1) in l1 {
                    if let Some(c2) = l2.get(&w1.neg()) {
                        *acc.entry(n1 + n2).or_insert_with(Int::zero) += c1 * c2;
                    }
                }
            }
        }
        QSeries::from_terms(acc, trunc)
    }

    /// Multiplies every q-exponent by `1/d`; `None` if some exponent or the
    /// truncation order is not divisible.
    pub fn divide_exponents(&self, d: i64) -> Option<Self> {
        if self.terms.keys().any(|n| n % d != 0) {
            return None;
        }
        Some(WeightedQSeries {
            terms: self.terms.iter().map(|(n, l)| (n / d, l.clone())).collect(),
            trunc_order: self.trunc_order.div_euclid(d),
        })
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms().all(|(_, _, c)| !c.is_negative())
    }

    /// Sum of coefficients in each layer, indexed by q-exponent.
    pub fn layer_sums(&self) -> BTreeMap<i64, Int> {
        self.terms
            .iter()
            .map(|(n, l)| (*n, l.values().fold(Int::zero(), |a, c| a + c)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i64]) -> Weight {
        Weight(v.to_vec())
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut s = WeightedQSeries::zero(5);
        s.add_term(1, w(&[1]), Int::from(2));
        s.add_term(1, w(&[1]), Int::from(-2));
        assert!(s.is_zero());
        s.add_term(9, w(&[0]), Int::from(1));
        assert!(s.is_zero());
    }

    #[test]
    fn product_and_constant_term() {
        // (t + t^-1)(t + t^-1 q) = t^2 + q + 1 + t^-2 q
        let a = WeightedQSeries::from_terms([(0, w(&[1]), Int::from(1)), (0, w(&[-1]), Int::from(1))], 6);
        let b = WeightedQSeries::from_terms([(0, w(&[1]), Int::from(1)), (1, w(&[-1]), Int::from(1))], 6);
        let p = a.mul(&b);
        assert_eq!(p.num_terms(), 4);
        assert_eq!(p.coeff(1, &w(&[0])), Int::from(1));
        assert_eq!(p.constant_weight_term(), QSeries::from_i64s(0, &[1, 1], 6));
        assert_eq!(a.constant_term_of_product(&b), p.constant_weight_term());
    }

    #[test]
    fn product_truncation_uses_min_exponents() {
        let a = WeightedQSeries::monomial(w(&[1]), -2, Int::from(1), 4);
        let b = WeightedQSeries::monomial(w(&[0]), 1, Int::from(1), 8);
        assert_eq!(a.mul(&b).trunc_order(), 5);
    }

    #[test]
    fn exponent_division() {
        let a = WeightedQSeries::from_terms([(0, w(&[0]), Int::from(1)), (4, w(&[2]), Int::from(3))], 9);
        let h = a.divide_exponents(2).unwrap();
        assert_eq!(h.trunc_order(), 4);
        assert_eq!(h.coeff(2, &w(&[2])), Int::from(3));
        let odd = WeightedQSeries::monomial(w(&[0]), 3, Int::from(1), 9);
        assert!(odd.divide_exponents(2).is_none());
    }
}
