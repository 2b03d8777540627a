//! Weyl-Kac characters as weight-graded q-series, computed as quotients of
//! alternating affine orbit sums, and the level-shift duality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::affine_weyl::{
    affine_orbit_reps, negative_level_basis, orbit_stabilizer_order, pi1_act, AffineOrbitRep,
    AffineWeylError, LambdaTauPoint, Twisting,
};
use crate::linalg::{box_points, ellipsoid_box};
use crate::qseries::QSeries;
use crate::root_data::{weyl_elements, Coweight, RootDataError, RootDatum, Weight};
use crate::theta_torus::SeriesMatrix;
use crate::weighted::{Layer, WeightedQSeries};
use crate::Int;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KacError {
    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),
    #[error("weight {lambda:?} has level {needed} > {level}")]
    NotIntegrable { lambda: Vec<i64>, level: i64, needed: i64 },
    #[error("weight {0:?} has a nontrivial affine Weyl stabilizer")]
    NotRegular(Vec<i64>),
    #[error("level {level} is below the dual Coxeter number {h_dual}")]
    LevelTooSmall { level: i64, h_dual: i64 },
    #[error("negative order {0}")]
    NegativeOrder(i64),
    #[error("division by the denominator got stuck in layer {layer}")]
    DivisionStuck { layer: i64 },
    #[error("odd raw energy in an orbit sum")]
    OddEnergy,
    #[error("re-multiplication check failed at q^{layer}")]
    RemultiplicationFailed { layer: i64 },
    #[error("level-shift map is not a bijection: {0}")]
    BijectionFailed(String),
    #[error("pairing entry is not divisible by the Weyl group order")]
    PairingNotIntegral,
    #[error(transparent)]
    AffineWeyl(#[from] AffineWeylError),
}

impl From<RootDataError> for KacError {
    fn from(e: RootDataError) -> Self {
        KacError::AffineWeyl(e.into())
    }
}

impl KacError {
    pub fn name(&self) -> &'static str {
        match self {
            KacError::NotDominant(_) => "NotDominant",
            KacError::NotIntegrable { .. } => "NotIntegrable",
            KacError::NotRegular(_) => "NotRegular",
            KacError::LevelTooSmall { .. } => "LevelTooSmall",
            KacError::NegativeOrder(_) => "NegativeOrder",
            KacError::DivisionStuck { .. } => "DivisionStuck",
            KacError::OddEnergy => "OddEnergy",
            KacError::RemultiplicationFailed { .. } => "RemultiplicationFailed",
            KacError::BijectionFailed(_) => "BijectionFailed",
            KacError::PairingNotIntegral => "PairingNotIntegral",
            KacError::AffineWeyl(e) => e.name(),
        }
    }
}

/// `A_mu^(m)`: the alternating sum over `W x pi_1` of the orbit of
/// `(mu, 0)` at level `m`, with q-exponents in energy units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineNumerator {
    pub mu: Weight,
    pub level: i64,
    pub series: WeightedQSeries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KacCharacter {
    pub lambda: Weight,
    pub level: i64,
    pub ch: WeightedQSeries,
    pub trunc_order: i64,
}

impl KacCharacter {
    /// `dim` of each q-layer, for `n = 0..=trunc_order`.
    pub fn graded_dimensions(&self) -> Vec<Int> {
        let sums = self.ch.layer_sums();
        (0..=self.trunc_order)
            .map(|n| sums.get(&n).cloned().unwrap_or_else(Int::zero))
            .collect()
    }

    pub fn layer(&self, n: i64) -> Layer {
        self.ch.layer(n).cloned().unwrap_or_default()
    }
}

pub fn affine_numerator(rd: &Arc<RootDatum>, mu: &Weight, m: i64, order: i64) -> Result<AffineNumerator, KacError> {
    if m < rd.h_dual {
        return Err(KacError::LevelTooSmall {
            level: m,
            h_dual: rd.h_dual,
        });
    }
    if order < 0 {
        return Err(KacError::NegativeOrder(order));
    }
    let tw = Twisting::at_level(rd.clone(), m)?;
    if orbit_stabilizer_order(&tw, mu)? != 1 {
        return Err(KacError::NotRegular(mu.0.clone()));
    }
    let raw_bound = 2 * order;
    let mut raw = WeightedQSeries::zero(raw_bound);
    for w in weyl_elements(rd)?.iter() {
        let start = LambdaTauPoint::new(w.act(mu), 0);
        let sign = Int::from(w.sign());
        for p in box_points(&ellipsoid_box(tw.form(), &start.lambda.0, raw_bound)) {
            let x = pi1_act(&tw, &Coweight(p), &start);
            if x.n <= raw_bound {
                raw.add_term(x.n, x.lambda, sign.clone());
            }
        }
    }
    let series = raw.divide_exponents(2).ok_or(KacError::OddEnergy)?;
    Ok(AffineNumerator {
        mu: mu.clone(),
        level: m,
        series,
    })
}

/// Total monomial order on weights: height (scaled to be integral), then
/// lexicographic.
struct MonomialOrder {
    height_row: Vec<i64>,
}

impl MonomialOrder {
    fn new(rd: &RootDatum) -> Self {
        // column sums of adj(A) give det(A) times the height functional
        let inv = rd.cartan.inverse_rational().expect("Cartan matrix is invertible");
        let det = rd.cartan.det() as i64;
        let height_row = (0..rd.rank)
            .map(|j| {
                let s: num_rational::Ratio<i64> = (0..rd.rank).map(|i| inv[i][j]).sum();
                (s * num_rational::Ratio::from_integer(det)).to_integer()
            })
            .collect();
        MonomialOrder { height_row }
    }

    fn height(&self, w: &Weight) -> i64 {
        self.height_row.iter().zip(&w.0).map(|(a, b)| a * b).sum()
    }

    fn cmp(&self, a: &Weight, b: &Weight) -> Ordering {
        self.height(a).cmp(&self.height(b)).then_with(|| a.cmp(b))
    }
}

type Keyed = BTreeMap<(i64, Weight), Int>;

fn keyed(order: &MonomialOrder, layer: &Layer) -> Keyed {
    layer.iter().map(|(w, c)| ((order.height(w), w.clone()), c.clone())).collect()
}

/// Exact division of a Laurent polynomial by `d0`, whose leading monomial
/// has coefficient 1.
fn divide_layer(order: &MonomialOrder, num: &Layer, d0: &Layer, n: i64) -> Result<Layer, KacError> {
    let (lead_w, lead_c) = d0
        .iter()
        .max_by(|a, b| order.cmp(a.0, b.0))
        .expect("denominator layer is nonempty");
    debug_assert!(lead_c.is_one());
    let spread = {
        let hs: Vec<i64> = d0.keys().map(|w| order.height(w)).collect();
        hs.iter().max().unwrap() - hs.iter().min().unwrap()
    };
    let mut rem = keyed(order, num);
    let mut quot = Layer::new();
    while let Some(((h_top, top), c)) = rem.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
        let h_bottom = rem.keys().next().unwrap().0;
        if h_top - h_bottom < spread {
            return Err(KacError::DivisionStuck { layer: n });
        }
        let shift = top.sub(lead_w);
        for (w, dc) in d0 {
            let t = shift.add(w);
            let key = (order.height(&t), t);
            let slot = rem.entry(key.clone()).or_insert_with(Int::zero);
            *slot -= &c * dc;
            if slot.is_zero() {
                rem.remove(&key);
            }
        }
        debug_assert!(!rem.contains_key(&(h_top, top.clone())));
        *quot.entry(shift).or_insert_with(Int::zero) += c;
    }
    Ok(quot)
}

fn layer_mul_into(acc: &mut Keyed, order: &MonomialOrder, a: &Layer, b: &Layer, sign: &Int) {
    for (wa, ca) in a {
        for (wb, cb) in b {
            let w = wa.add(wb);
            let key = (order.height(&w), w);
            let slot = acc.entry(key.clone()).or_insert_with(Int::zero);
            *slot += sign * ca * cb;
            if slot.is_zero() {
                acc.remove(&key);
            }
        }
    }
}

/// Solves `den * X = num` for `X`, layer by layer in q.
fn graded_quotient(rd: &RootDatum, num: &WeightedQSeries, den: &WeightedQSeries, order: i64) -> Result<WeightedQSeries, KacError> {
    let mo = MonomialOrder::new(rd);
    let d0 = den.layer(0).expect("denominator has a q^0 layer").clone();
    let mut x: BTreeMap<i64, Layer> = BTreeMap::new();
    let minus = -Int::one();
    for n in 0..=order {
        let mut rhs = num.layer(n).map(|l| keyed(&mo, l)).unwrap_or_default();
        for (j, dj) in den.layers().filter(|(j, _)| *j >= 1 && *j <= n) {
            if let Some(xl) = x.get(&(n - j)) {
                layer_mul_into(&mut rhs, &mo, dj, xl, &minus);
            }
        }
        if rhs.is_empty() {
            continue;
        }
        let rhs: Layer = rhs.into_iter().map(|((_, w), c)| (w, c)).collect();
        let q = divide_layer(&mo, &rhs, &d0, n)?;
        if !q.is_empty() {
            x.insert(n, q);
        }
    }
    Ok(WeightedQSeries::from_terms(
        x.into_iter()
            .flat_map(|(n, l)| l.into_iter().map(move |(w, c)| (n, w, c))),
        order,
    ))
}

/// The character of the level-`k` representation with highest weight
/// `lambda`, truncated at energy `order`, checked by re-multiplication.
pub fn kac_character(rd: &Arc<RootDatum>, lambda: &Weight, k: i64, order: i64) -> Result<KacCharacter, KacError> {
    if lambda.rank() != rd.rank || !lambda.is_dominant() {
        return Err(KacError::NotDominant(lambda.0.clone()));
    }
    let needed = rd.level_of(lambda);
    if needed > k {
        return Err(KacError::NotIntegrable {
            lambda: lambda.0.clone(),
            level: k,
            needed,
        });
    }
    let num = affine_numerator(rd, &lambda.add(&rd.rho), k + rd.h_dual, order)?;
    let den = affine_numerator(rd, &rd.rho, rd.h_dual, order)?;
    let ch = graded_quotient(rd, &num.series, &den.series, order)?;
    let product = den.series.mul(&ch);
    let expected = num.series.truncate(product.trunc_order());
    if product != expected {
        let layer = product
            .sub(&expected)
            .min_q();
        return Err(KacError::RemultiplicationFailed { layer });
    }
    Ok(KacCharacter {
        lambda: lambda.clone(),
        level: k,
        ch,
        trunc_order: order,
    })
}

/// `lambda -> lambda + rho` from level-`k` orbits to regular level-`(k + h)` orbits.
pub fn duality_bijection(rd: &Arc<RootDatum>, k: i64) -> Result<Vec<(AffineOrbitRep, AffineOrbitRep)>, KacError> {
    let pos = affine_orbit_reps(&Twisting::at_level(rd.clone(), k)?)?;
    let neg = negative_level_basis(rd, k)?;
    let by_rep: BTreeMap<&Weight, &AffineOrbitRep> = neg.iter().map(|o| (&o.rep, o)).collect();
    let mut hit = BTreeSet::new();
    let mut pairs = Vec::with_capacity(pos.len());
    for o in &pos {
        let image = o.rep.add(&rd.rho);
        let Some(target) = by_rep.get(&image) else {
            return Err(KacError::BijectionFailed(format!("{:?} has no regular image", o.rep)));
        };
        if !hit.insert(image.clone()) {
            return Err(KacError::BijectionFailed(format!("{image:?} is hit twice")));
        }
        pairs.push((o.clone(), (*target).clone()));
    }
    if hit.len() != neg.len() {
        return Err(KacError::BijectionFailed(format!("{} of {} regular orbits are missed", neg.len() - hit.len(), neg.len())));
    }
    Ok(pairs)
}

/// `M[i][j] = CT(bar(A_{lambda_i + rho}) * A_rho * ch_{lambda_j}) / |W|`,
/// rows following the negative basis of the level-shift bijection and
/// columns the positive basis.
pub fn duality_pairing(rd: &Arc<RootDatum>, k: i64, order: i64) -> Result<SeriesMatrix, KacError> {
    let pairs = duality_bijection(rd, k)?;
    let den = affine_numerator(rd, &rd.rho, rd.h_dual, order)?;
    let w_order = Int::from(weyl_elements(rd)?.len());
    let dual: Vec<WeightedQSeries> = pairs
        .iter()
        .map(|(_, neg)| affine_numerator(rd, &neg.rep, k + rd.h_dual, order).map(|a| a.series.negate_weights()))
        .collect::<Result<_, _>>()?;
    let filled: Vec<WeightedQSeries> = pairs
        .iter()
        .map(|(pos, _)| kac_character(rd, &pos.rep, k, order).map(|c| den.series.mul(&c.ch)))
        .collect::<Result<_, _>>()?;
    let entries = dual
        .iter()
        .map(|a| {
            filled
                .iter()
                .map(|b| a.constant_term_of_product(b).exact_div_scalar(&w_order).ok_or(KacError::PairingNotIntegral))
                .collect::<Result<Vec<QSeries>, _>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(SeriesMatrix::new(entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::load_root_datum;

    fn rd(label: &str) -> Arc<RootDatum> {
        Arc::new(load_root_datum(label).unwrap())
    }

    fn w(v: &[i64]) -> Weight {
        Weight(v.to_vec())
    }

    #[test]
    fn a1_denominator_vacuum_layer() {
        let a = affine_numerator(&rd("A1"), &w(&[1]), 2, 0).unwrap();
        let l0 = a.series.layer(0).unwrap();
        assert_eq!(l0.len(), 2);
        assert_eq!(l0[&w(&[1])], Int::from(1));
        assert_eq!(l0[&w(&[-1])], Int::from(-1));
    }

    #[test]
    fn numerator_errors() {
        let a1 = rd("A1");
        assert_eq!(affine_numerator(&a1, &w(&[1]), 1, 4).unwrap_err().name(), "LevelTooSmall");
        assert_eq!(affine_numerator(&a1, &w(&[0]), 3, 4).unwrap_err().name(), "NotRegular");
        assert_eq!(affine_numerator(&a1, &w(&[3]), 3, 4).unwrap_err().name(), "NotRegular");
    }

    #[test]
    fn numerator_is_anti_invariant() {
        let a2 = rd("A2");
        let a = affine_numerator(&a2, &w(&[2, 1]), 4, 4).unwrap();
        for x in weyl_elements(&a2).unwrap().iter() {
            assert_eq!(a.series.act_weyl(x), a.series.scale(&Int::from(x.sign())));
        }
    }

    #[test]
    fn vacuum_graded_dimensions() {
        let c = kac_character(&rd("A1"), &w(&[0]), 1, 6).unwrap();
        let dims: Vec<i64> = c.graded_dimensions().iter().map(|d| i64::try_from(d).unwrap()).collect();
        assert_eq!(dims, vec![1, 3, 4, 7, 13, 19, 29]);
        let trivial = kac_character(&rd("A1"), &w(&[0]), 1, 0).unwrap();
        assert_eq!(trivial.layer(0), Layer::from([(w(&[0]), Int::one())]));
    }

    #[test]
    fn adjoint_top_layer() {
        let c = kac_character(&rd("A1"), &w(&[2]), 2, 0).unwrap();
        let expected: Layer = [-2, 0, 2].iter().map(|&x| (w(&[x]), Int::one())).collect();
        assert_eq!(c.layer(0), expected);
    }

    #[test]
    fn character_errors() {
        let a1 = rd("A1");
        assert_eq!(kac_character(&a1, &w(&[3]), 2, 2).unwrap_err().name(), "NotIntegrable");
        assert_eq!(kac_character(&a1, &w(&[-1]), 2, 2).unwrap_err().name(), "NotDominant");
    }

    #[test]
    fn level_shift_bijection() {
        let a1 = rd("A1");
        let images = |k| -> Vec<(i64, i64)> {
            duality_bijection(&a1, k).unwrap().iter().map(|(a, b)| (a.rep.0[0], b.rep.0[0])).collect()
        };
        assert_eq!(images(1), vec![(0, 1), (1, 2)]);
        assert_eq!(images(2), vec![(0, 1), (1, 2), (2, 3)]);
        let a2 = rd("A2");
        let img: BTreeSet<Weight> = duality_bijection(&a2, 1).unwrap().into_iter().map(|(_, b)| b.rep).collect();
        let neg: BTreeSet<Weight> = negative_level_basis(&a2, 1).unwrap().into_iter().map(|o| o.rep).collect();
        assert_eq!(img, neg);
    }

    #[test]
    fn pairing_is_unit() {
        let m = duality_pairing(&rd("A1"), 1, 4).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(m.det_is_unit());
        assert!(m.entries[0][1].is_zero());
    }

    #[test]
    fn g2_vacuum_layer_is_trivial() {
        let c = kac_character(&rd("G2"), &w(&[0, 0]), 1, 1).unwrap();
        assert_eq!(c.layer(0), Layer::from([(w(&[0, 0]), Int::one())]));
        // the q^1 layer of the vacuum module is the adjoint representation
        assert_eq!(c.graded_dimensions()[1], Int::from(14));
    }
}
