//! Theta functions on the Tate torus `T^an / kappa(pi_1)`, rigid line
//! bundles and the rank-one abelian duality.

use num_traits::One;

use crate::affine_weyl::{pi1_act, translation_quotient, LambdaTauPoint, Sign, Twisting};
use crate::linalg::{box_points, ellipsoid_box, smith_normal_form, IntMatrix};
use crate::qseries::QSeries;
use crate::root_data::{Coweight, Weight};
use crate::weighted::WeightedQSeries;
use crate::Int;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThetaError {
    #[error("twisting must be positive definite")]
    NotPositive,
    #[error("order {order} is below the lowest orbit exponent {needed}")]
    OrderTooSmall { order: i64, needed: i64 },
    #[error("abelian duality is implemented for rank one only, got rank {0}")]
    RankNotOne(usize),
    #[error("window must be at least 1")]
    WindowTooSmall,
    #[error("coinvariant rank changed from {small} to {large} when the window grew from {window} to {doubled}")]
    NotStabilized {
        window: i64,
        doubled: i64,
        small: usize,
        large: usize,
    },
    #[error("relation matrix cannot be normalized to integer entries")]
    NotMonomial,
}

impl ThetaError {
    pub fn name(&self) -> &'static str {
        match self {
            ThetaError::NotPositive => "NotPositive",
            ThetaError::OrderTooSmall { .. } => "OrderTooSmall",
            ThetaError::RankNotOne(_) => "RankNotOne",
            ThetaError::WindowTooSmall => "WindowTooSmall",
            ThetaError::NotStabilized { .. } => "NotStabilized",
            ThetaError::NotMonomial => "NotMonomial",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineBundleClass {
    Ample,
    AntiAmple,
    Rejected,
}

impl LineBundleClass {
    pub fn as_str(self) -> &'static str {
        match self {
            LineBundleClass::Ample => "ample",
            LineBundleClass::AntiAmple => "anti_ample",
            LineBundleClass::Rejected => "rejected",
        }
    }
}

/// Classifies the line bundle attached to a symmetric form by the signs of
/// its leading principal minors.
pub fn classify_line_bundle(form: &IntMatrix) -> LineBundleClass {
    if !form.is_square() || !form.is_symmetric() {
        LineBundleClass::Rejected
    } else if form.is_positive_definite() {
        LineBundleClass::Ample
    } else if form.is_negative_definite() {
        LineBundleClass::AntiAmple
    } else {
        LineBundleClass::Rejected
    }
}

/// The pair `(H, d)` of a twisting: `H` is the bilinear form, `d(p) = tau(p, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidLineBundle {
    pub h: IntMatrix,
}

impl RigidLineBundle {
    pub fn from_twisting(tw: &Twisting) -> Self {
        RigidLineBundle { h: tw.signed_form() }
    }

    pub fn h(&self, p: &Coweight, p2: &Coweight) -> i64 {
        self.h.bilinear(&p.0, &p2.0)
    }

    pub fn d(&self, p: &Coweight) -> i64 {
        self.h(p, p)
    }

    pub fn is_symmetric(&self) -> bool {
        self.h.is_symmetric()
    }

    /// `d(p + p') - d(p) - d(p') = 2 H(p, p')`.
    pub fn is_compatible(&self, p: &Coweight, p2: &Coweight) -> bool {
        self.d(&p.add(p2)) - self.d(p) - self.d(p2) == 2 * self.h(p, p2)
    }

    pub fn class(&self) -> LineBundleClass {
        classify_line_bundle(&self.h)
    }
}

/// All `p` with `tau(p,p) - 2 c(p) <= bound`.
fn orbit_translations(tw: &Twisting, c: &Weight, bound: i64) -> Vec<(Coweight, LambdaTauPoint)> {
    let start = LambdaTauPoint::new(c.clone(), 0);
    box_points(&ellipsoid_box(tw.form(), &c.0, bound))
        .into_iter()
        .map(|p| {
            let p = Coweight(p);
            let x = pi1_act(tw, &p, &start);
            (p, x)
        })
        .filter(|(_, x)| x.n <= bound)
        .collect()
}

fn lowest_exponent(tw: &Twisting, c: &Weight) -> i64 {
    orbit_translations(tw, c, 0)
        .into_iter()
        .map(|(_, x)| x.n)
        .min()
        .expect("p = 0 has exponent 0")
}

/// One theta function per coset of `Lambda / kappa(pi_1)`: the orbit sum
/// of `(c, 0)` truncated at `order`. Cosets are listed in box order.
pub fn theta_basis(tw: &Twisting, order: i64) -> Result<Vec<WeightedQSeries>, ThetaError> {
    if tw.sign() != Sign::Positive {
        return Err(ThetaError::NotPositive);
    }
    let cosets = translation_quotient(tw).representatives();
    let needed = cosets
        .iter()
        .map(|c| lowest_exponent(tw, &Weight(c.clone())))
        .max()
        .unwrap_or(0);
    if order < needed {
        return Err(ThetaError::OrderTooSmall { order, needed });
    }
    Ok(cosets
        .into_iter()
        .map(|c| {
            let c = Weight(c);
            WeightedQSeries::from_terms(
                orbit_translations(tw, &c, order)
                    .into_iter()
                    .map(|(_, x)| (x.n, x.lambda, Int::one())),
                order,
            )
        })
        .collect())
}

/// Whether `f` is invariant under translation by `p` and `-p`, compared
/// only where both exponents lie within the truncation order.
pub fn check_theta_invariance(tw: &Twisting, f: &WeightedQSeries, p: &Coweight) -> bool {
    let trunc = f.trunc_order();
    [p.clone(), p.neg()].iter().all(|p| {
        f.terms().all(|(n, w, c)| {
            let image = pi1_act(tw, p, &LambdaTauPoint::new(w.clone(), n));
            image.n > trunc || f.coeff(image.n, &image.lambda) == *c
        })
    })
}

/// A square matrix of q-series with its determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    pub entries: Vec<Vec<QSeries>>,
    pub det: QSeries,
}

impl SeriesMatrix {
    pub fn new(entries: Vec<Vec<QSeries>>) -> Self {
        let det = QSeries::determinant(&entries);
        SeriesMatrix { entries, det }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn det_is_unit(&self) -> bool {
        self.det.is_unit()
    }
}

/// `M[c][c'] = CT(theta_c * bar(theta_c'))`, where the bar negates weights.
pub fn theta_pairing_matrix(tw: &Twisting, order: i64) -> Result<SeriesMatrix, ThetaError> {
    let basis = theta_basis(tw, order)?;
    let conj: Vec<WeightedQSeries> = basis.iter().map(WeightedQSeries::negate_weights).collect();
    Ok(SeriesMatrix::new(
        basis
            .iter()
            .map(|a| conj.iter().map(|b| a.constant_term_of_product(b)).collect())
            .collect(),
    ))
}

/// The relations `v_a - gamma(v_a)` of the level `-tau` translation action
/// on the free `Z((q))`-module spanned by `t^a`, `|a| <= window`.
/// Rows index basis vectors, columns index relations.
pub fn coinvariant_relations(tw: &Twisting, window: i64, order: i64) -> Vec<Vec<QSeries>> {
    let neg = tw.negated();
    let generator = Coweight(vec![1]);
    let basis: Vec<i64> = (-window..=window).collect();
    let index = |a: i64| (a + window) as usize;
    let mut columns = Vec::new();
    for &a in &basis {
        let image = pi1_act(&neg, &generator, &LambdaTauPoint::new(Weight(vec![a]), 0));
        let b = image.lambda.0[0];
        if b.abs() > window {
            continue;
        }
        let mut col = vec![QSeries::zero(order); basis.len()];
        col[index(a)] = QSeries::one(order);
        col[index(b)] = QSeries::monomial(-Int::one(), image.n, image.n + order);
        columns.push(col);
    }
    (0..basis.len())
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect()
}

/// Rescales rows and columns of a matrix of signed monomials by powers of
/// `q` so that every entry becomes an integer.
fn gauge_normalize(m: &[Vec<QSeries>]) -> Result<IntMatrix, ThetaError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut edges = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let t: Vec<_> = e.terms().collect();
            if t.len() != 1 {
                return Err(ThetaError::NotMonomial);
            }
            edges.push((i, j, t[0].0, t[0].1.clone()));
        }
    }
    // exponent potentials r_i, s_j with exp_ij + r_i + s_j = 0, propagated
    // along a spanning forest of the bipartite support graph
    enum Node {
        Row(usize),
        Col(usize),
    }
    let mut r: Vec<Option<i64>> = vec![None; rows];
    let mut s: Vec<Option<i64>> = vec![None; cols];
    for root in 0..rows {
        if r[root].is_some() {
            continue;
        }
        r[root] = Some(0);
        let mut stack = vec![Node::Row(root)];
        while let Some(node) = stack.pop() {
            for &(i, j, e, _) in &edges {
                match node {
                    Node::Row(x) if i == x && s[j].is_none() => {
                        s[j] = Some(-e - r[i].unwrap());
                        stack.push(Node::Col(j));
                    }
                    Node::Col(y) if j == y && r[i].is_none() => {
                        r[i] = Some(-e - s[j].unwrap());
                        stack.push(Node::Row(i));
                    }
                    _ => {}
                }
            }
        }
    }
    let mut out = IntMatrix::zeros(rows, cols);
    for (i, j, e, c) in edges {
        if e + r[i].unwrap() + s[j].unwrap() != 0 {
            return Err(ThetaError::NotMonomial);
        }
        out.set(i, j, crate::qseries::small(&c));
    }
    Ok(out)
}

fn coinvariant_rank(tw: &Twisting, window: i64, order: i64) -> Result<usize, ThetaError> {
    let m = gauge_normalize(&coinvariant_relations(tw, window, order))?;
    let snf = smith_normal_form(&m).map_err(|_| ThetaError::NotMonomial)?;
    Ok(snf.cokernel_free_rank())
}

/// `(number of theta functions at level tau, free rank of the coinvariants
/// at level -tau)` for a rank-one torus. The coinvariant rank is computed at
/// `window` and `2 * window` and must agree.
pub fn abelian_duality_ranks(tw: &Twisting, window: i64, order: i64) -> Result<(usize, usize), ThetaError> {
    if tw.rank() != 1 {
        return Err(ThetaError::RankNotOne(tw.rank()));
    }
    if window < 1 {
        return Err(ThetaError::WindowTooSmall);
    }
    let pos = theta_basis(tw, order)?.len();
    let small = coinvariant_rank(tw, window, order)?;
    let large = coinvariant_rank(tw, 2 * window, order)?;
    if small != large {
        return Err(ThetaError::NotStabilized {
            window,
            doubled: 2 * window,
            small,
            large,
        });
    }
    Ok((pos, large))
}

/// The translation generators `e_1, ..., e_r` of `pi_1`.
pub fn lattice_generators(rank: usize) -> Vec<Coweight> {
    (0..rank)
        .map(|i| Coweight((0..rank).map(|j| i64::from(i == j)).collect()))
        .collect()
}
