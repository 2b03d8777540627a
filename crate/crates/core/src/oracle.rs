//! Brute-force reference computations. They share no algorithmic code with
//! the main modules beyond the lattice data and are used by the test
//! suites and `verify`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::linalg::{box_points, Rational};
use crate::qseries::QSeries;
use crate::root_data::{weyl_elements, RootDatum, Weight};
use crate::weighted::WeightedQSeries;
use crate::Int;

/// Dominant weights of level at most `k`.
pub fn alcove_points(rd: &RootDatum, k: i64) -> Vec<Weight> {
    box_points(&vec![(0, k); rd.rank])
        .into_iter()
        .map(Weight)
        .filter(|w| rd.level_of(w) <= k)
        .collect()
}

fn in_alcove(rd: &RootDatum, k: i64, w: &Weight) -> bool {
    w.is_dominant() && rd.level_of(w) <= k
}

/// Translation radius large enough to move any weight with coordinates in
/// `[-b, b]` into the level-`k` alcove.
fn translation_radius(rd: &RootDatum, k: i64, b: i64) -> i64 {
    let inv = rd.basic_form.inverse_rational().unwrap();
    let spread = weyl_elements(rd)
        .unwrap()
        .iter()
        .flat_map(|w| w.on_weights.rows().iter().map(|r| r.iter().map(|x| x.abs()).sum::<i64>()).collect::<Vec<_>>())
        .max()
        .unwrap();
    let far = Rational::from_integer(spread * b + k);
    let row: Rational = inv
        .iter()
        .map(|r| r.iter().map(|x| if *x < Ratio::zero() { -*x } else { *x }).sum::<Rational>())
        .max()
        .unwrap();
    (row * far / Rational::from_integer(k)).ceil().to_integer() + 1
}

/// All alcove points `w lambda + k B p` over `w in W` and `p` in a box:
/// the naive double loop over `W x translations`.
pub fn naive_alcove_images(rd: &RootDatum, k: i64, lambda: &Weight, b: i64) -> BTreeSet<Weight> {
    let weyl = weyl_elements(rd).unwrap();
    let form = rd.basic_form.scaled(k);
    let r = translation_radius(rd, k, b);
    let shifts: Vec<Weight> = box_points(&vec![(-r, r); rd.rank])
        .into_iter()
        .map(|p| Weight(form.mul_vec(&p)))
        .collect();
    let mut out = BTreeSet::new();
    for w in weyl.iter() {
        let wl = w.act(lambda);
        for s in &shifts {
            let mu = wl.add(s);
            if in_alcove(rd, k, &mu) {
                out.insert(mu);
            }
        }
    }
    out
}

/// Partition of the box `[-b, b]^r` into affine Weyl orbits at level `k`,
/// keyed by the alcove point each orbit meets.
pub fn naive_orbit_partition(rd: &RootDatum, k: i64, b: i64) -> BTreeMap<Weight, BTreeSet<Weight>> {
    let mut parts: BTreeMap<Weight, BTreeSet<Weight>> = BTreeMap::new();
    for lam in box_points(&vec![(-b, b); rd.rank]).into_iter().map(Weight) {
        let images = naive_alcove_images(rd, k, &lam, b);
        assert_eq!(images.len(), 1, "alcove is not a fundamental domain for {lam:?}");
        parts.entry(images.into_iter().next().unwrap()).or_default().insert(lam);
    }
    parts
}

/// `#{w : lambda - w lambda in k B Z^r}`, tested by integrality of the
/// rational preimage.
pub fn naive_stabilizer(rd: &RootDatum, k: i64, lambda: &Weight) -> u64 {
    let inv = rd.basic_form.scaled(k).inverse_rational().unwrap();
    weyl_elements(rd)
        .unwrap()
        .iter()
        .filter(|w| {
            let d = lambda.sub(&w.act(lambda));
            inv.iter()
                .all(|row| row.iter().zip(&d.0).map(|(a, x)| *a * Rational::from_integer(*x)).sum::<Rational>().is_integer())
        })
        .count() as u64
}

/// Weight multiplicities of the irreducible module `V_lambda` by
/// Freudenthal's recursion.
pub fn freudenthal_character(rd: &RootDatum, lambda: &Weight) -> BTreeMap<Weight, Int> {
    assert!(lambda.is_dominant());
    let (anti, _) = rd.fold_dominant(&lambda.neg());
    let span = rd.root_coordinates(&lambda.add(&anti));
    let bounds: Vec<(i64, i64)> = span.iter().map(|x| (0, x.to_integer())).collect();
    let mut steps: Vec<Vec<i64>> = box_points(&bounds);
    steps.sort_by_key(|n| n.iter().sum::<i64>());
    let to_weight = |n: &[i64]| {
        let mut w = lambda.clone();
        for (i, &c) in n.iter().enumerate() {
            w = w.sub(&rd.simple_roots[i].scale(c));
        }
        w
    };
    let lr = lambda.add(&rd.rho);
    let top = rd.weight_inner(&lr, &lr);
    let mut mult: BTreeMap<Weight, Ratio<i64>> = BTreeMap::new();
    for n in &steps {
        let mu = to_weight(n);
        if n.iter().all(|&c| c == 0) {
            mult.insert(mu, Ratio::one());
            continue;
        }
        let mr = mu.add(&rd.rho);
        let denom = top - rd.weight_inner(&mr, &mr);
        if denom.is_zero() {
            continue;
        }
        let mut acc = Ratio::zero();
        for a in &rd.positive_roots {
            let mut j = 1;
            loop {
                let nu = mu.add(&a.weight.scale(j));
                match mult.get(&nu) {
                    Some(m) => acc += *m * rd.weight_inner(&nu, &a.weight),
                    None if rd.root_coordinates(&lambda.sub(&nu)).iter().any(|x| *x < Ratio::zero()) => break,
                    None => {}
                }
                j += 1;
            }
        }
        let m = acc * Ratio::from_integer(2) / denom;
        assert!(m.is_integer(), "non-integral multiplicity at {mu:?}");
        if !m.is_zero() {
            mult.insert(mu, m);
        }
    }
    mult.into_iter().map(|(w, m)| (w, Int::from(m.to_integer()))).collect()
}

/// The alternating orbit sum enumerated directly: weights
/// `w mu + m B p` with energy `m B(p,p)/2 + (w mu)(p)` for `p` in
/// `[-radius, radius]^r`, kept up to `order`.
pub fn direct_numerator(rd: &RootDatum, mu: &Weight, m: i64, order: i64, radius: i64) -> WeightedQSeries {
    let form = rd.basic_form.scaled(m);
    let mut out = WeightedQSeries::zero(order);
    for w in weyl_elements(rd).unwrap().iter() {
        let wm = w.act(mu);
        for p in box_points(&vec![(-radius, radius); rd.rank]) {
            let twice = form.bilinear(&p, &p) + 2 * wm.0.iter().zip(&p).map(|(a, b)| a * b).sum::<i64>();
            assert!(twice % 2 == 0);
            if twice / 2 <= order {
                out.add_term(twice / 2, wm.add(&Weight(form.mul_vec(&p))), Int::from(w.sign()));
            }
        }
    }
    out
}

/// Rank-one theta function of coset `c` for the form `(m)` from the closed
/// formula: weights `c - m p`, exponents `m p^2 - 2 c p`.
pub fn rank_one_theta(m: i64, c: i64, order: i64) -> WeightedQSeries {
    let radius = (order.max(0) + c.abs() + 2) / m.max(1) + c.abs() + 2;
    WeightedQSeries::from_terms(
        (-radius..=radius)
            .map(|p| (m * p * p - 2 * c * p, Weight(vec![c - m * p]), Int::one()))
            .filter(|t| t.0 <= order),
        order,
    )
}

/// Constant weight term of `f * g` by an explicit double loop.
pub fn convolution_constant_term(f: &WeightedQSeries, g: &WeightedQSeries) -> QSeries {
    let trunc = (f.trunc_order() + g.min_q()).min(g.trunc_order() + f.min_q());
    let mut acc: BTreeMap<i64, Int> = BTreeMap::new();
    for (n1, w1, c1) in f.terms() {
        for (n2, w2, c2) in g.terms() {
            if n1 + n2 <= trunc && w1.add(w2).is_zero() {
                *acc.entry(n1 + n2).or_insert_with(Int::zero) += c1 * c2;
            }
        }
    }
    QSeries::from_terms(acc, trunc)
}

/// Free rank of the cokernel of a matrix over `Z((q))` by elimination with
/// unit pivots; `None` when a nonzero non-unit blocks the elimination.
pub fn series_cokernel_rank(m: &[Vec<QSeries>]) -> Option<usize> {
    let mut a: Vec<Vec<QSeries>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut live_rows: Vec<bool> = vec![true; rows];
    let mut live_cols: Vec<bool> = vec![true; cols];
    let mut pivots = 0;
    loop {
        let pivot = (0..rows)
            .filter(|&i| live_rows[i])
            .flat_map(|i| (0..cols).filter(|&j| live_cols[j]).map(move |j| (i, j)))
            .find(|&(i, j)| a[i][j].is_unit());
        let Some((pi, pj)) = pivot else { break };
        let inv = a[pi][pj].invert().ok()?;
        for i in 0..rows {
            if i == pi || !live_rows[i] || a[i][pj].is_zero() {
                continue;
            }
            let f = a[i][pj].mul(&inv);
            for j in 0..cols {
                if live_cols[j] {
                    a[i][j] = a[i][j].sub(&f.mul(&a[pi][j]));
                }
            }
        }
        live_rows[pi] = false;
        live_cols[pj] = false;
        pivots += 1;
    }
    let blocked = (0..rows)
        .filter(|&i| live_rows[i])
        .any(|i| (0..cols).filter(|&j| live_cols[j]).any(|j| !a[i][j].is_zero()));
    if blocked {
        None
    } else {
        Some(rows - pivots)
    }
}
