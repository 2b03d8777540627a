//! Root data of simply connected simple groups, and tori.
//!
//! Conventions, used everywhere downstream:
//!
//! * `cartan[i][j] = <alpha_i^vee, alpha_j>`.
//! * Weights are written in the fundamental-weight basis, coweights in the
//!   simple-coroot basis, so the pairing `lambda(p)` is the plain dot product.
//! * The simple root `alpha_j` is column `j` of the Cartan matrix.
//! * `basic_form` is the invariant form on the coroot lattice with short
//!   coroots of square length 2.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use crate::linalg::{IntMatrix, Rational};
use crate::Int;

pub const DEFAULT_WEYL_BOUND: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootDataError {
    #[error("unknown type label {0:?}")]
    UnknownType(String),
    #[error("Cartan matrix is not of finite type: {0}")]
    NotFiniteType(String),
    #[error("Dynkin diagram is not connected")]
    NotConnected,
    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),
    #[error("Weyl group exceeds the bound of {bound} elements")]
    WeylGroupTooLarge { bound: usize },
    #[error("computed {what} = {computed} disagrees with the table value {table}")]
    TableMismatch {
        what: &'static str,
        computed: i64,
        table: i64,
    },
}

impl RootDataError {
    pub fn name(&self) -> &'static str {
        match self {
            RootDataError::UnknownType(_) => "UnknownType",
            RootDataError::NotFiniteType(_) => "NotFiniteType",
            RootDataError::NotConnected => "NotConnected",
            RootDataError::NotDominant(_) => "NotDominant",
            RootDataError::WeylGroupTooLarge { .. } => "WeylGroupTooLarge",
            RootDataError::TableMismatch { .. } => "TableMismatch",
        }
    }
}

/// A weight in fundamental-weight coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<i64>);

/// A coweight in simple-coroot coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coweight(pub Vec<i64>);

macro_rules! lattice_vector {
    ($t:ident) => {
        impl $t {
            pub fn zero(rank: usize) -> Self {
                $t(vec![0; rank])
            }
            pub fn rank(&self) -> usize {
                self.0.len()
            }
            pub fn coords(&self) -> &[i64] {
                &self.0
            }
            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&x| x == 0)
            }
            pub fn add(&self, o: &$t) -> $t {
                $t(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
            }
            pub fn sub(&self, o: &$t) -> $t {
                $t(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
            }
            pub fn neg(&self) -> $t {
                $t(self.0.iter().map(|a| -a).collect())
            }
            pub fn scale(&self, k: i64) -> $t {
                $t(self.0.iter().map(|a| a * k).collect())
            }
        }

        impl fmt::Debug for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", self.0)
            }
        }

        impl From<Vec<i64>> for $t {
            fn from(v: Vec<i64>) -> Self {
                $t(v)
            }
        }
    };
}

lattice_vector!(Weight);
lattice_vector!(Coweight);

impl Weight {
    /// The natural pairing `lambda(p)`.
    pub fn pair(&self, p: &Coweight) -> i64 {
        self.0.iter().zip(&p.0).map(|(a, b)| a * b).sum()
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E(usize),
    F4,
    G2,
}

impl CartanType {
    pub fn parse(label: &str) -> Result<CartanType, RootDataError> {
        let bad = || RootDataError::UnknownType(label.to_string());
        let label = label.trim();
        let (head, tail) = label.split_at(label.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?);
        let n: usize = tail.parse().map_err(|_| bad())?;
        let t = match (head.to_ascii_uppercase().as_str(), n) {
            ("A", n) if n >= 1 => CartanType::A(n),
            ("B", n) if n >= 2 => CartanType::B(n),
            ("C", n) if n >= 2 => CartanType::C(n),
            ("D", n) if n >= 4 => CartanType::D(n),
            ("E", n) if (6..=8).contains(&n) => CartanType::E(n),
            ("F", 4) => CartanType::F4,
            ("G", 2) => CartanType::G2,
            _ => return Err(bad()),
        };
        Ok(t)
    }

    pub fn rank(self) -> usize {
        match self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) | CartanType::D(n) | CartanType::E(n) => n,
            CartanType::F4 => 4,
            CartanType::G2 => 2,
        }
    }

    pub fn label(self) -> String {
        match self {
            CartanType::A(n) => format!("A{n}"),
            CartanType::B(n) => format!("B{n}"),
            CartanType::C(n) => format!("C{n}"),
            CartanType::D(n) => format!("D{n}"),
            CartanType::E(n) => format!("E{n}"),
            CartanType::F4 => "F4".into(),
            CartanType::G2 => "G2".into(),
        }
    }

    /// Bourbaki numbering.
    pub fn cartan_matrix(self) -> IntMatrix {
        let n = self.rank();
        let mut a = IntMatrix::identity(n).scaled(2);
        let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
            a.set(i, j, aij);
            a.set(j, i, aji);
        };
        match self {
            CartanType::A(_) => (0..n - 1).for_each(|i| link(i, i + 1, -1, -1)),
            CartanType::B(_) => {
                (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
                link(n - 2, n - 1, -1, -2);
            }
            CartanType::C(_) => {
                (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
                link(n - 2, n - 1, -2, -1);
            }
            CartanType::D(_) => {
                (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
                link(n - 3, n - 1, -1, -1);
            }
            CartanType::E(_) => {
                link(0, 2, -1, -1);
                link(1, 3, -1, -1);
                (2..n - 1).for_each(|i| link(i, i + 1, -1, -1));
            }
            CartanType::F4 => {
                link(0, 1, -1, -1);
                link(1, 2, -1, -2);
                link(2, 3, -1, -1);
            }
            CartanType::G2 => link(0, 1, -3, -1),
        }
        a
    }

    pub fn positive_root_count(self) -> usize {
        match self {
            CartanType::A(n) => n * (n + 1) / 2,
            CartanType::B(n) | CartanType::C(n) => n * n,
            CartanType::D(n) => n * (n - 1),
            CartanType::E(6) => 36,
            CartanType::E(7) => 63,
            CartanType::E(_) => 120,
            CartanType::F4 => 24,
            CartanType::G2 => 6,
        }
    }

    pub fn dual_coxeter_number(self) -> i64 {
        match self {
            CartanType::A(n) => n as i64 + 1,
            CartanType::B(n) => 2 * n as i64 - 1,
            CartanType::C(n) => n as i64 + 1,
            CartanType::D(n) => 2 * n as i64 - 2,
            CartanType::E(6) => 12,
            CartanType::E(7) => 18,
            CartanType::E(_) => 30,
            CartanType::F4 => 9,
            CartanType::G2 => 4,
        }
    }

    pub fn weyl_order(self) -> u64 {
        let fact = |n: usize| (1..=n as u64).product::<u64>();
        match self {
            CartanType::A(n) => fact(n + 1),
            CartanType::B(n) | CartanType::C(n) => (1u64 << n) * fact(n),
            CartanType::D(n) => (1u64 << (n - 1)) * fact(n),
            CartanType::E(6) => 51_840,
            CartanType::E(7) => 2_903_040,
            CartanType::E(_) => 696_729_600,
            CartanType::F4 => 1152,
            CartanType::G2 => 12,
        }
    }

    fn candidates(rank: usize) -> Vec<CartanType> {
        let mut v = vec![CartanType::A(rank)];
        if rank >= 2 {
            v.push(CartanType::C(rank));
            v.push(CartanType::B(rank));
        }
        if rank >= 4 {
            v.push(CartanType::D(rank));
        }
        if (6..=8).contains(&rank) {
            v.push(CartanType::E(rank));
        }
        if rank == 4 {
            v.push(CartanType::F4);
        }
        if rank == 2 {
            v.push(CartanType::G2);
        }
        v
    }
}

/// A root together with its coroot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    /// Coordinates in the simple-root basis.
    pub root_coords: Vec<i64>,
    pub weight: Weight,
    pub coroot: Coweight,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.root_coords.iter().sum()
    }
}

/// An element of the finite Weyl group, acting on both lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    pub on_weights: IntMatrix,
    pub on_coweights: IntMatrix,
    /// Length in the simple reflections.
    pub length: usize,
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        WeylElement {
            on_weights: IntMatrix::identity(rank),
            on_coweights: IntMatrix::identity(rank),
            length: 0,
        }
    }

    pub fn sign(&self) -> i64 {
        if self.length.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn act(&self, w: &Weight) -> Weight {
        Weight(self.on_weights.mul_vec(&w.0))
    }

    pub fn act_coweight(&self, p: &Coweight) -> Coweight {
        Coweight(self.on_coweights.mul_vec(&p.0))
    }
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    pub label: String,
    pub cartan_type: CartanType,
    pub rank: usize,
    pub cartan: IntMatrix,
    pub simple_roots: Vec<Weight>,
    pub simple_coroots: Vec<Coweight>,
    pub positive_roots: Vec<Root>,
    pub rho: Weight,
    pub h_dual: i64,
    pub basic_form: IntMatrix,
    /// Square lengths `basic_form(alpha_i^vee, alpha_i^vee)`.
    pub coroot_lengths: Vec<i64>,
    pub highest_root: Root,
    weyl: Arc<OnceLock<Result<Arc<Vec<WeylElement>>, RootDataError>>>,
}

impl PartialEq for RootDatum {
    fn eq(&self, other: &Self) -> bool {
        self.cartan == other.cartan
    }
}

impl Eq for RootDatum {}

/// Loads one of the built-in types (`"A1"`..`"A4"`, `"C2"`, `"G2"`, and the
/// remaining classical and exceptional labels).
pub fn load_root_datum(label: &str) -> Result<RootDatum, RootDataError> {
    let t = CartanType::parse(label)?;
    let mut rd = RootDatum::from_cartan(&t.cartan_matrix())?;
    rd.label = t.label();
    rd.cartan_type = t;
    Ok(rd)
}

impl RootDatum {
    pub fn from_cartan(cartan: &IntMatrix) -> Result<RootDatum, RootDataError> {
        let r = cartan.n_rows();
        let not_finite = |why: &str| RootDataError::NotFiniteType(why.to_string());
        if r == 0 || !cartan.is_square() {
            return Err(not_finite("matrix must be square and nonempty"));
        }
        for i in 0..r {
            if cartan.get(i, i) != 2 {
                return Err(not_finite("diagonal entries must be 2"));
            }
            for j in 0..r {
                if i != j {
                    let (a, b) = (cartan.get(i, j), cartan.get(j, i));
                    if a > 0 || (a == 0) != (b == 0) {
                        return Err(not_finite("off-diagonal sign pattern"));
                    }
                }
            }
        }
        let coroot_lengths = symmetrizer(cartan)?;
        let basic_form = IntMatrix::new(
            (0..r)
                .map(|i| (0..r).map(|j| cartan.get(i, j) * coroot_lengths[j] / 2).collect())
                .collect(),
        );
        if !basic_form.is_symmetric() {
            return Err(not_finite("not symmetrizable"));
        }
        if !basic_form.is_positive_definite() {
            return Err(not_finite("symmetrized matrix is not positive definite"));
        }
        let cartan_type = identify(cartan).ok_or_else(|| not_finite("no matching Dynkin type"))?;

        let positive_roots = positive_roots(cartan);
        let highest_root = positive_roots
            .iter()
            .max_by_key(|a| a.height())
            .cloned()
            .expect("nonempty root system");
        let rho = Weight(vec![1; r]);
        let h_dual = 1 + rho.pair(&highest_root.coroot);

        let rd = RootDatum {
            label: cartan_type.label(),
            cartan_type,
            rank: r,
            cartan: cartan.clone(),
            simple_roots: (0..r).map(|j| Weight(cartan.column(j))).collect(),
            simple_coroots: (0..r).map(|i| Coweight((0..r).map(|j| i64::from(i == j)).collect())).collect(),
            positive_roots,
            rho,
            h_dual,
            basic_form,
            coroot_lengths,
            highest_root,
            weyl: Arc::new(OnceLock::new()),
        };
        rd.check_tables()?;
        Ok(rd)
    }

    fn check_tables(&self) -> Result<(), RootDataError> {
        let t = self.cartan_type;
        let mismatch = |what, computed, table| RootDataError::TableMismatch { what, computed, table };
        if self.h_dual != t.dual_coxeter_number() {
            return Err(mismatch("h_dual", self.h_dual, t.dual_coxeter_number()));
        }
        let n = self.positive_roots.len() as i64;
        if n != t.positive_root_count() as i64 {
            return Err(mismatch("positive root count", n, t.positive_root_count() as i64));
        }
        // rho is the half sum of positive roots
        let sum = self.positive_roots.iter().fold(Weight::zero(self.rank), |acc, a| acc.add(&a.weight));
        if sum != self.rho.scale(2) {
            return Err(mismatch("2 rho", sum.0[0], 2));
        }
        let theta_len = self.basic_form.bilinear(&self.highest_root.coroot.0, &self.highest_root.coroot.0);
        if theta_len != 2 {
            return Err(mismatch("|theta^vee|^2", theta_len, 2));
        }
        Ok(())
    }

    pub fn dim_g(&self) -> usize {
        self.rank + 2 * self.positive_roots.len()
    }

    /// The highest root `theta` as a weight.
    pub fn theta(&self) -> &Weight {
        &self.highest_root.weight
    }

    /// Coefficients of `theta^vee` in the simple coroots.
    pub fn comarks(&self) -> &[i64] {
        &self.highest_root.coroot.0
    }

    /// `lambda(theta^vee)`, the level at which `lambda` first becomes integrable.
    pub fn level_of(&self, lambda: &Weight) -> i64 {
        lambda.pair(&self.highest_root.coroot)
    }

    pub fn reflect(&self, j: usize, lambda: &Weight) -> Weight {
        lambda.sub(&self.simple_roots[j].scale(lambda.0[j]))
    }

    pub fn reflect_coweight(&self, j: usize, p: &Coweight) -> Coweight {
        let aj = self.simple_roots[j].pair(p);
        let mut out = p.clone();
        out.0[j] -= aj;
        out
    }

    /// Dominant conjugate and the length parity of the folding word.
    pub fn fold_dominant(&self, lambda: &Weight) -> (Weight, usize) {
        let mut w = lambda.clone();
        let mut steps = 0;
        while let Some(j) = w.0.iter().position(|&x| x < 0) {
            w = self.reflect(j, &w);
            steps += 1;
        }
        (w, steps)
    }

    /// Inner product on weights, dual to the basic form (`B^{-1}`).
    pub fn weight_inner(&self, a: &Weight, b: &Weight) -> Rational {
        let inv = self.basic_form.inverse_rational().expect("basic form is definite");
        let mut acc = Rational::from_integer(0);
        for i in 0..self.rank {
            for j in 0..self.rank {
                acc += inv[i][j] * Rational::from_integer(a.0[i] * b.0[j]);
            }
        }
        acc
    }

    /// Simple-root coordinates of a weight (rational in general).
    pub fn root_coordinates(&self, lambda: &Weight) -> Vec<Rational> {
        let inv = self.cartan.inverse_rational().expect("Cartan matrix is invertible");
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| inv[i][j] * Rational::from_integer(lambda.0[j])).sum())
            .collect()
    }

    pub fn weyl_order(&self) -> u64 {
        self.cartan_type.weyl_order()
    }
}

/// Positive integers `d_j = B(alpha_j^vee, alpha_j^vee)` with
/// `a_ij d_j = a_ji d_i`, normalized to minimum 2.
fn symmetrizer(a: &IntMatrix) -> Result<Vec<i64>, RootDataError> {
    let r = a.n_rows();
    let mut d: Vec<Option<Rational>> = vec![None; r];
    d[0] = Some(Rational::from_integer(1));
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..r {
            if i != j && a.get(i, j) != 0 {
                let dj = d[i].unwrap() * Rational::new(a.get(j, i), a.get(i, j));
                match d[j] {
                    None => {
                        d[j] = Some(dj);
                        queue.push_back(j);
                    }
                    Some(old) if old != dj => {
                        return Err(RootDataError::NotFiniteType("not symmetrizable".into()));
                    }
                    _ => {}
                }
            }
        }
    }
    let d: Vec<Rational> = d.into_iter().collect::<Option<_>>().ok_or(RootDataError::NotConnected)?;
    let min = d.iter().min().copied().unwrap();
    d.iter()
        .map(|x| {
            let v = *x / min * Rational::from_integer(2);
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(RootDataError::NotFiniteType("non-integral symmetrizer".into()))
            }
        })
        .collect()
}

fn identify(a: &IntMatrix) -> Option<CartanType> {
    let r = a.n_rows();
    CartanType::candidates(r).into_iter().find(|t| {
        let b = t.cartan_matrix();
        let mut perm: Vec<usize> = (0..r).collect();
        permutations_any(&mut perm, 0, &|p| (0..r).all(|i| (0..r).all(|j| a.get(i, j) == b.get(p[i], p[j]))))
    })
}

fn permutations_any(p: &mut Vec<usize>, k: usize, f: &dyn Fn(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return f(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations_any(p, k + 1, f) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}

/// All positive roots with their coroots, generated from the simple ones
/// by simple reflections. Sorted by height, then coordinates.
fn positive_roots(a: &IntMatrix) -> Vec<Root> {
    let r = a.n_rows();
    let unit = |i: usize| (0..r).map(|j| i64::from(i == j)).collect::<Vec<_>>();
    let mut seen: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for i in 0..r {
        seen.insert(unit(i), unit(i));
        queue.push_back((unit(i), unit(i)));
    }
    let at = a.transpose();
    while let Some((x, y)) = queue.pop_front() {
        let wx = a.mul_vec(&x);
        let wy = at.mul_vec(&y);
        for j in 0..r {
            let mut x2 = x.clone();
            x2[j] -= wx[j];
            let mut y2 = y.clone();
            y2[j] -= wy[j];
            if !seen.contains_key(&x2) {
                seen.insert(x2.clone(), y2.clone());
                queue.push_back((x2, y2));
            }
        }
    }
    let mut roots: Vec<Root> = seen
        .into_iter()
        .filter(|(x, _)| x.iter().all(|&c| c >= 0))
        .map(|(x, y)| Root {
            weight: Weight(a.mul_vec(&x)),
            root_coords: x,
            coroot: Coweight(y),
        })
        .collect();
    roots.sort_by(|p, q| p.height().cmp(&q.height()).then_with(|| p.root_coords.cmp(&q.root_coords)));
    roots
}

/// The Weyl group, generated by simple reflections, in order of length.
pub fn weyl_elements(rd: &RootDatum) -> Result<Arc<Vec<WeylElement>>, RootDataError> {
    rd.weyl
        .get_or_init(|| weyl_elements_bounded(rd, DEFAULT_WEYL_BOUND).map(Arc::new))
        .clone()
}

pub fn weyl_elements_bounded(rd: &RootDatum, bound: usize) -> Result<Vec<WeylElement>, RootDataError> {
    let r = rd.rank;
    let reflections: Vec<(IntMatrix, IntMatrix)> = (0..r)
        .map(|j| {
            let mut s = IntMatrix::identity(r);
            let mut t = IntMatrix::identity(r);
            for i in 0..r {
                s.set(i, j, s.get(i, j) - rd.simple_roots[j].0[i]);
                t.set(j, i, t.get(j, i) - rd.simple_roots[j].0[i]);
            }
            (s, t)
        })
        .collect();
    let mut out = vec![WeylElement::identity(r)];
    let mut index: HashMap<Vec<i64>, usize> = HashMap::from([(rd.rho.0.clone(), 0)]);
    let mut head = 0;
    while head < out.len() {
        for (s, t) in &reflections {
            let w = &out[head];
            let on_weights = s.mul(&w.on_weights);
            let key = on_weights.mul_vec(&rd.rho.0);
            if index.contains_key(&key) {
                continue;
            }
            if out.len() >= bound {
                return Err(RootDataError::WeylGroupTooLarge { bound });
            }
            let next = WeylElement {
                on_coweights: t.mul(&w.on_coweights),
                on_weights,
                length: w.length + 1,
            };
            index.insert(key, out.len());
            out.push(next);
        }
        head += 1;
    }
    Ok(out)
}

/// Dimension of the irreducible representation with highest weight `lambda`.
pub fn weyl_dim(rd: &RootDatum, lambda: &Weight) -> Result<Int, RootDataError> {
    if !lambda.is_dominant() {
        return Err(RootDataError::NotDominant(lambda.0.clone()));
    }
    let shifted = lambda.add(&rd.rho);
    let mut num = Int::one();
    let mut den = Int::one();
    for a in &rd.positive_roots {
        num *= Int::from(shifted.pair(&a.coroot));
        den *= Int::from(rd.rho.pair(&a.coroot));
    }
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// A torus of rank `r`: no roots, trivial Weyl group, `pi_1 = Lambda = Z^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusDatum {
    pub rank: usize,
}

impl TorusDatum {
    pub fn new(rank: usize) -> Self {
        TorusDatum { rank }
    }

    pub fn weyl_elements(&self) -> Vec<WeylElement> {
        vec![WeylElement::identity(self.rank)]
    }
}
