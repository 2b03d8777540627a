//! Twistings, the translation action of `pi_1(T)` on `Lambda x Z`, affine
//! Weyl orbits on the weight lattice and the growth predicates.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::Zero;
use rayon::prelude::*;

use crate::linalg::{IntMatrix, LatticeQuotient};
use crate::root_data::{weyl_elements, Coweight, RootDataError, RootDatum, TorusDatum, Weight, WeylElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AffineWeylError {
    #[error("form is not symmetric")]
    NotSymmetric,
    #[error("form is singular")]
    Degenerate,
    #[error("form is indefinite")]
    Indefinite,
    #[error("form has size {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("twisting must be positive definite here")]
    NotPositive,
    #[error("level must be at least 1, got {0}")]
    InvalidLevel(i64),
    #[error("a torus has no sigma twisting")]
    TorusHasNoSigma,
    #[error("growth exponent and constant must be nonnegative")]
    InvalidGrowth,
    #[error(transparent)]
    RootData(#[from] RootDataError),
}

impl AffineWeylError {
    pub fn name(&self) -> &'static str {
        match self {
            AffineWeylError::NotSymmetric => "NotSymmetric",
            AffineWeylError::Degenerate => "Degenerate",
            AffineWeylError::Indefinite => "Indefinite",
            AffineWeylError::DimensionMismatch { .. } => "DimensionMismatch",
            AffineWeylError::NotPositive => "NotPositive",
            AffineWeylError::InvalidLevel(_) => "InvalidLevel",
            AffineWeylError::TorusHasNoSigma => "TorusHasNoSigma",
            AffineWeylError::InvalidGrowth => "InvalidGrowth",
            AffineWeylError::RootData(e) => e.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    Group(Arc<RootDatum>),
    Torus(TorusDatum),
}

impl Base {
    pub fn rank(&self) -> usize {
        match self {
            Base::Group(rd) => rd.rank,
            Base::Torus(t) => t.rank,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

/// A definite symmetric form on `pi_1(T)`, stored as its absolute value
/// together with the sign of definiteness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twisting {
    base: Base,
    form: IntMatrix,
    sign: Sign,
    level: Option<i64>,
}

impl Twisting {
    /// The twisting `k * basic_form` of a simple group at nonzero level `k`.
    pub fn at_level(rd: Arc<RootDatum>, k: i64) -> Result<Twisting, AffineWeylError> {
        if k == 0 {
            return Err(AffineWeylError::Degenerate);
        }
        let form = rd.basic_form.scaled(k.abs());
        let sign = if k > 0 { Sign::Positive } else { Sign::Negative };
        Ok(Twisting {
            base: Base::Group(rd),
            form,
            sign,
            level: Some(k),
        })
    }

    /// A torus twisted by an arbitrary definite symmetric form.
    pub fn torus(form: IntMatrix) -> Result<Twisting, AffineWeylError> {
        let r = form.n_rows();
        if !form.is_square() || r == 0 {
            return Err(AffineWeylError::DimensionMismatch {
                expected: r,
                found: form.n_cols(),
            });
        }
        if !form.is_symmetric() {
            return Err(AffineWeylError::NotSymmetric);
        }
        if form.det() == 0 {
            return Err(AffineWeylError::Degenerate);
        }
        let (form, sign) = if form.is_positive_definite() {
            (form, Sign::Positive)
        } else if form.is_negative_definite() {
            (form.scaled(-1), Sign::Negative)
        } else {
            return Err(AffineWeylError::Indefinite);
        };
        Ok(Twisting {
            base: Base::Torus(TorusDatum::new(r)),
            form,
            sign,
            level: None,
        })
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn root_datum(&self) -> Option<&Arc<RootDatum>> {
        match &self.base {
            Base::Group(rd) => Some(rd),
            Base::Torus(_) => None,
        }
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    /// The positive definite form `|tau|`.
    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    pub fn signed_form(&self) -> IntMatrix {
        self.form.scaled(self.sign.factor())
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn level(&self) -> Option<i64> {
        self.level
    }

    /// `|det tau| = |Lambda / kappa(pi_1)|`.
    pub fn det(&self) -> u64 {
        self.form.det().unsigned_abs() as u64
    }

    /// The same base with the form negated.
    pub fn negated(&self) -> Twisting {
        let sign = match self.sign {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        };
        Twisting {
            sign,
            level: self.level.map(|k| -k),
            ..self.clone()
        }
    }

    /// `tau(p, p')` with its sign.
    pub fn tau(&self, p: &Coweight, p2: &Coweight) -> i64 {
        self.sign.factor() * self.form.bilinear(&p.0, &p2.0)
    }

    pub fn label(&self) -> String {
        match &self.base {
            Base::Group(rd) => rd.label.clone(),
            Base::Torus(t) => format!("T{}", t.rank),
        }
    }

    pub fn weyl(&self) -> Result<Arc<Vec<WeylElement>>, AffineWeylError> {
        match &self.base {
            Base::Group(rd) => Ok(weyl_elements(rd)?),
            Base::Torus(t) => Ok(Arc::new(t.weyl_elements())),
        }
    }
}

impl fmt::Display for Twisting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            Some(k) => write!(f, "{} level {}", self.label(), k),
            None => write!(f, "{} form {:?}{}", self.label(), self.form, if self.sign == Sign::Negative { " (negative)" } else { "" }),
        }
    }
}

/// A point `(lambda, n)` of `Lambda x Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaTauPoint {
    pub lambda: Weight,
    pub n: i64,
}

impl LambdaTauPoint {
    pub fn new(lambda: Weight, n: i64) -> Self {
        LambdaTauPoint { lambda, n }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineOrbitRep {
    pub rep: Weight,
    pub stabilizer_order: u64,
    pub regular: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthDescriptor {
    pub exponent: Ratio<i64>,
    pub constant: Ratio<i64>,
    pub bounded_below: bool,
}

impl GrowthDescriptor {
    pub fn new(exponent: Ratio<i64>, constant: Ratio<i64>, bounded_below: bool) -> Result<Self, AffineWeylError> {
        if exponent < Ratio::zero() || constant < Ratio::zero() {
            return Err(AffineWeylError::InvalidGrowth);
        }
        Ok(GrowthDescriptor {
            exponent,
            constant,
            bounded_below,
        })
    }
}

/// The weight `tau(p, -)`.
pub fn kappa_tau(tw: &Twisting, p: &Coweight) -> Weight {
    Weight(tw.signed_form().mul_vec(&p.0))
}

/// `(lambda, n) -> (lambda - kappa(p), n + tau(p,p) - 2 lambda(p))`.
pub fn pi1_act(tw: &Twisting, p: &Coweight, x: &LambdaTauPoint) -> LambdaTauPoint {
    LambdaTauPoint {
        lambda: x.lambda.sub(&kappa_tau(tw, p)),
        n: x.n + tw.tau(p, p) - 2 * x.lambda.pair(p),
    }
}

/// The lattice `kappa(pi_1)` as a quotient of the weight lattice.
pub fn translation_quotient(tw: &Twisting) -> LatticeQuotient {
    LatticeQuotient::new(tw.form()).expect("definite form is nonsingular")
}

/// Canonical representative of the `W x kappa(pi_1)` orbit of `lambda`:
/// the closed fundamental alcove point for a group, the reduced coset
/// representative for a torus.
pub fn canonical_representative(tw: &Twisting, lambda: &Weight) -> Weight {
    match tw.base() {
        Base::Torus(_) => Weight(translation_quotient(tw).reduce(&lambda.0)),
        Base::Group(rd) => {
            let k = tw.level().expect("group twisting has a level").abs();
            fold_to_alcove(rd, k, lambda)
        }
    }
}

fn fold_to_alcove(rd: &RootDatum, k: i64, lambda: &Weight) -> Weight {
    let theta = rd.theta();
    let mut w = lambda.clone();
    loop {
        if let Some(j) = w.0.iter().position(|&x| x < 0) {
            w = rd.reflect(j, &w);
            continue;
        }
        let excess = rd.level_of(&w) - k;
        if excess > 0 {
            w = w.sub(&theta.scale(excess));
            continue;
        }
        return w;
    }
}

fn stabilizer_order(weyl: &[WeylElement], quotient: &LatticeQuotient, lambda: &Weight) -> u64 {
    weyl.iter()
        .filter(|w| quotient.contains(&lambda.sub(&w.act(lambda)).0))
        .count() as u64
}

/// Order of the stabilizer of `lambda` in `W x pi_1(T)`.
pub fn orbit_stabilizer_order(tw: &Twisting, lambda: &Weight) -> Result<u64, AffineWeylError> {
    Ok(stabilizer_order(&tw.weyl()?, &translation_quotient(tw), lambda))
}

/// All orbits of `W x pi_1(T)` on the weight lattice, sorted by representative.
pub fn affine_orbit_reps(tw: &Twisting) -> Result<Vec<AffineOrbitRep>, AffineWeylError> {
    if tw.sign() != Sign::Positive {
        return Err(AffineWeylError::NotPositive);
    }
    let weyl = tw.weyl()?;
    let quotient = translation_quotient(tw);
    let cosets = quotient.representatives();
    let reps: BTreeSet<Weight> = cosets
        .par_chunks(256)
        .map(|chunk| {
            chunk
                .iter()
                .map(|c| canonical_representative(tw, &Weight(c.clone())))
                .collect::<BTreeSet<_>>()
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let reps: Vec<Weight> = reps.into_iter().collect();
    let out: Vec<AffineOrbitRep> = reps
        .par_iter()
        .map(|rep| {
            let stabilizer_order = stabilizer_order(&weyl, &quotient, rep);
            AffineOrbitRep {
                rep: rep.clone(),
                stabilizer_order,
                regular: stabilizer_order == 1,
            }
        })
        .collect();
    debug_assert_eq!(
        out.iter().map(|o| weyl.len() as u64 / o.stabilizer_order).sum::<u64>(),
        quotient.order()
    );
    Ok(out)
}

/// Regular orbits at level `k + h_dual`.
pub fn negative_level_basis(rd: &Arc<RootDatum>, k: i64) -> Result<Vec<AffineOrbitRep>, AffineWeylError> {
    if k < 1 {
        return Err(AffineWeylError::InvalidLevel(k));
    }
    let tw = Twisting::at_level(rd.clone(), k + rd.h_dual)?;
    Ok(affine_orbit_reps(&tw)?.into_iter().filter(|o| o.regular).collect())
}

pub fn check_tempered(d: &GrowthDescriptor) -> bool {
    d.exponent < Ratio::from_integer(1) || d.constant.is_zero()
}

pub fn check_star(d: &GrowthDescriptor) -> bool {
    check_tempered(d)
}

/// `tau + sigma`: the level moves by the dual Coxeter number.
pub fn shift_by_sigma(tw: &Twisting) -> Result<Twisting, AffineWeylError> {
    match tw.base() {
        Base::Torus(_) => Err(AffineWeylError::TorusHasNoSigma),
        Base::Group(rd) => {
            let k = tw.level().expect("group twisting has a level");
            Twisting::at_level(rd.clone(), k + rd.h_dual)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::load_root_datum;
    use proptest::prelude::*;

    fn group(label: &str, k: i64) -> Twisting {
        Twisting::at_level(Arc::new(load_root_datum(label).unwrap()), k).unwrap()
    }

    fn reps(tw: &Twisting) -> Vec<(Vec<i64>, u64)> {
        affine_orbit_reps(tw)
            .unwrap()
            .into_iter()
            .map(|o| (o.rep.0, o.stabilizer_order))
            .collect()
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_tau(&group("A1", 1), &Coweight(vec![1])), Weight(vec![2]));
        let t = Twisting::torus(IntMatrix::new(vec![vec![2, 1], vec![1, 2]])).unwrap();
        assert_eq!(kappa_tau(&t, &Coweight(vec![1, 0])), Weight(vec![2, 1]));
        assert!(kappa_tau(&t, &Coweight(vec![0, 0])).is_zero());
    }

    #[test]
    fn pi1_act_examples() {
        let tw = group("A1", 1);
        let x = LambdaTauPoint::new(Weight(vec![0]), 0);
        assert_eq!(pi1_act(&tw, &Coweight(vec![0]), &x), x);
        assert_eq!(pi1_act(&tw, &Coweight(vec![1]), &x), LambdaTauPoint::new(Weight(vec![-2]), 2));
    }

    #[test]
    fn twisting_constructor_rejects_bad_forms() {
        let e = |rows: Vec<Vec<i64>>| Twisting::torus(IntMatrix::new(rows)).unwrap_err().name();
        assert_eq!(e(vec![vec![1, 2], vec![3, 1]]), "NotSymmetric");
        assert_eq!(e(vec![vec![1, 1], vec![1, 1]]), "Degenerate");
        assert_eq!(e(vec![vec![1, 0], vec![0, -1]]), "Indefinite");
        let neg = Twisting::torus(IntMatrix::new(vec![vec![-3]])).unwrap();
        assert_eq!(neg.sign(), Sign::Negative);
        assert_eq!(neg.form(), &IntMatrix::new(vec![vec![3]]));
        assert_eq!(affine_orbit_reps(&neg).unwrap_err().name(), "NotPositive");
    }

    #[test]
    fn a1_orbits() {
        assert_eq!(reps(&group("A1", 2)), vec![(vec![0], 2), (vec![1], 1), (vec![2], 2)]);
        let l4 = affine_orbit_reps(&group("A1", 4)).unwrap();
        assert_eq!(l4.len(), 5);
        assert_eq!(l4.iter().filter(|o| o.regular).count(), 3);
    }

    #[test]
    fn torus_orbits() {
        let t = Twisting::torus(IntMatrix::new(vec![vec![5]])).unwrap();
        let r = reps(&t);
        assert_eq!(r, (0..5).map(|i| (vec![i], 1)).collect::<Vec<_>>());
    }

    #[test]
    fn negative_level_examples() {
        let a1 = Arc::new(load_root_datum("A1").unwrap());
        let b1: Vec<_> = negative_level_basis(&a1, 1).unwrap().into_iter().map(|o| o.rep.0).collect();
        assert_eq!(b1, vec![vec![1], vec![2]]);
        let b2: Vec<_> = negative_level_basis(&a1, 2).unwrap().into_iter().map(|o| o.rep.0).collect();
        assert_eq!(b2, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(negative_level_basis(&a1, 0).unwrap_err().name(), "InvalidLevel");
        let a2 = Arc::new(load_root_datum("A2").unwrap());
        assert_eq!(
            negative_level_basis(&a2, 1).unwrap().len(),
            affine_orbit_reps(&group("A2", 1)).unwrap().len()
        );
    }

    #[test]
    fn orbit_sizes_cover_the_quotient() {
        for (label, k) in [("A2", 3), ("C2", 2), ("G2", 2), ("A3", 2)] {
            let tw = group(label, k);
            let w = tw.weyl().unwrap().len() as u64;
            let total: u64 = affine_orbit_reps(&tw).unwrap().iter().map(|o| w / o.stabilizer_order).sum();
            assert_eq!(total, tw.det(), "{label} {k}");
        }
    }

    #[test]
    fn sigma_shift() {
        assert_eq!(shift_by_sigma(&group("A1", 1)).unwrap().level(), Some(3));
        assert_eq!(shift_by_sigma(&group("A2", 2)).unwrap().level(), Some(5));
        let t = Twisting::torus(IntMatrix::new(vec![vec![2]])).unwrap();
        assert_eq!(shift_by_sigma(&t).unwrap_err().name(), "TorusHasNoSigma");
    }

    #[test]
    fn growth_predicates() {
        let g = |a: (i64, i64), c: i64| GrowthDescriptor::new(Ratio::new(a.0, a.1), Ratio::from_integer(c), true).unwrap();
        assert!(check_tempered(&g((1, 2), 5)));
        assert!(!check_tempered(&g((1, 1), 1)));
        assert!(check_tempered(&g((3, 1), 0)));
        assert!(check_star(&g((0, 1), 7)));
        assert!(!check_star(&g((2, 1), 1)));
        assert!(check_star(&g((1, 1), 0)));
        assert!(GrowthDescriptor::new(Ratio::from_integer(-1), Ratio::zero(), true).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn pi1_act_is_an_action(
            p in prop::collection::vec(-5i64..=5, 2),
            p2 in prop::collection::vec(-5i64..=5, 2),
            lam in prop::collection::vec(-9i64..=9, 2),
            n in -20i64..=20,
            k in 1i64..=4,
        ) {
            let tw = group("A2", k);
            let x = LambdaTauPoint::new(Weight(lam), n);
            let (p, p2) = (Coweight(p), Coweight(p2));
            let two_steps = pi1_act(&tw, &p2, &pi1_act(&tw, &p, &x));
            prop_assert_eq!(two_steps, pi1_act(&tw, &p.add(&p2), &x));
        }

        #[test]
        fn growth_predicates_agree(a in 0i64..=12, b in 1i64..=4, c in 0i64..=3) {
            let d = GrowthDescriptor::new(Ratio::new(a, b), Ratio::from_integer(c), true).unwrap();
            prop_assert_eq!(check_star(&d), check_tempered(&d));
        }
    }
}
