//! Small dense integer matrices: determinants, definiteness, Hermite and
//! Smith normal forms.
//!
//! Sizes here are tiny (rank <= 8 lattices, incidence matrices of a few
//! dozen rows), so everything is `i64` storage with `i128` intermediates and
//! checked arithmetic.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: Vec<Vec<i64>>,
}

pub type Rational = Ratio<i64>;

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows)
    }
}

impl IntMatrix {
    /// Panics on ragged input.
    pub fn new(rows: Vec<Vec<i64>>) -> Self {
        if let Some(first) = rows.first() {
            assert!(rows.iter().all(|r| r.len() == first.len()), "ragged matrix");
        }
        IntMatrix { rows }
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix::new((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect())
    }

    pub fn zeros(r: usize, c: usize) -> Self {
        IntMatrix::new(vec![vec![0; c]; r])
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let mut m = IntMatrix::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.rows[i][i] = x;
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn is_square(&self) -> bool {
        self.n_rows() == self.n_cols()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.rows[i][j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::new((0..self.n_cols()).map(|j| self.column(j)).collect())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.n_rows()).all(|i| (0..i).all(|j| self.rows[i][j] == self.rows[j][i]))
    }

    pub fn scaled(&self, k: i64) -> IntMatrix {
        IntMatrix::new(self.rows.iter().map(|r| r.iter().map(|x| x * k).collect()).collect())
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix::new(
            self.rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let n = other.n_cols();
        IntMatrix::new(
            self.rows
                .iter()
                .map(|r| (0..n).map(|j| r.iter().zip(&other.rows).map(|(a, b)| a * b[j]).sum()).collect())
                .collect(),
        )
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        self.rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[i64], y: &[i64]) -> i64 {
        x.iter().zip(self.mul_vec(y)).map(|(a, b)| a * b).sum()
    }

    /// Fraction-free Bareiss elimination.
    pub fn det(&self) -> i128 {
        assert!(self.is_square());
        let n = self.n_rows();
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = self.rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    pub fn leading_minors(&self) -> Vec<i128> {
        (1..=self.n_rows())
            .map(|k| IntMatrix::new(self.rows[..k].iter().map(|r| r[..k].to_vec()).collect()).det())
            .collect()
    }

    /// Sylvester's criterion.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric() && self.leading_minors().iter().all(|&m| m > 0)
    }

    pub fn is_negative_definite(&self) -> bool {
        self.scaled(-1).is_positive_definite()
    }

    /// Exact inverse over the rationals; `None` if singular.
    pub fn inverse_rational(&self) -> Option<Vec<Vec<Rational>>> {
        let n = self.n_rows();
        let mut a: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row: Vec<Rational> = r.iter().map(|&x| Rational::from_integer(x)).collect();
                row.extend((0..n).map(|j| Rational::from_integer(i64::from(i == j))));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| a[i][c] != Rational::from_integer(0))?;
            a.swap(p, c);
            let piv = a[c][c];
            for x in a[c].iter_mut() {
                *x /= piv;
            }
            for i in 0..n {
                if i != c {
                    let f = a[i][c];
                    if f != Rational::from_integer(0) {
                        for j in 0..2 * n {
                            let v = a[c][j];
                            a[i][j] -= f * v;
                        }
                    }
                }
            }
        }
        Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    /// Lower-triangular column Hermite form `H` of the lattice spanned by the
    /// columns: `H[i][i] > 0`, `H[i][j] = 0` for `j > i`, and
    /// `0 <= H[i][j] < H[i][i]` for `j < i`. Requires full rank.
    pub fn column_hermite(&self) -> Option<IntMatrix> {
        let n = self.n_rows();
        if !self.is_square() || self.det() == 0 {
            return None;
        }
        let mut a: Vec<Vec<i128>> = self.rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        for i in 0..n {
            // gcd-combine columns i..n on row i
            for j in i + 1..n {
                if a[i][j] == 0 {
                    continue;
                }
                let (x, y) = (a[i][i], a[i][j]);
                let e = x.extended_gcd(&y);
                let (g, s, t) = (e.gcd, e.x, e.y);
                let (u, v) = (x / g, y / g);
                for row in a.iter_mut() {
                    let (ci, cj) = (row[i], row[j]);
                    row[i] = s * ci + t * cj;
                    row[j] = -v * ci + u * cj;
                }
            }
            if a[i][i] < 0 {
                for row in a.iter_mut() {
                    row[i] = -row[i];
                }
            }
            let d = a[i][i];
            for j in 0..i {
                let f = Integer::div_floor(&a[i][j], &d);
                if f != 0 {
                    for row in a.iter_mut() {
                        row[j] -= f * row[i];
                    }
                }
            }
        }
        Some(IntMatrix::new(
            a.into_iter().map(|r| r.into_iter().map(|x| i64::try_from(x).expect("HNF overflow")).collect()).collect(),
        ))
    }
}

/// The finite group `Z^n / L` for a full-rank lattice `L`, with canonical
/// coset representatives in the Hermite box `0 <= x_i < H[i][i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeQuotient {
    hermite: IntMatrix,
}

impl LatticeQuotient {
    /// `generators` holds the lattice basis as columns.
    pub fn new(generators: &IntMatrix) -> Option<Self> {
        generators.column_hermite().map(|hermite| LatticeQuotient { hermite })
    }

    pub fn hermite(&self) -> &IntMatrix {
        &self.hermite
    }

    pub fn order(&self) -> u64 {
        (0..self.hermite.n_rows()).map(|i| self.hermite.get(i, i) as u64).product()
    }

    /// The unique point of `v + L` inside the Hermite box.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        let n = v.len();
        let mut x = v.to_vec();
        for i in 0..n {
            let d = self.hermite.get(i, i);
            let f = Integer::div_floor(&x[i], &d);
            if f != 0 {
                for (r, xr) in x.iter_mut().enumerate().skip(i) {
                    *xr -= f * self.hermite.get(r, i);
                }
            }
        }
        x
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// All box points, lexicographic.
    pub fn representatives(&self) -> Vec<Vec<i64>> {
        let diag: Vec<i64> = (0..self.hermite.n_rows()).map(|i| self.hermite.get(i, i)).collect();
        box_points(&diag.iter().map(|&d| (0, d - 1)).collect::<Vec<_>>())
    }
}

/// Integer points of `[lo_0, hi_0] x ... x [lo_n, hi_n]`, lexicographic.
pub fn box_points(bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(bounds.len())];
    for &(lo, hi) in bounds {
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1).max(0) as usize);
        for p in &out {
            for x in lo..=hi {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Bounding box for `{p : p^T F p - 2 l.p <= bound}` with `F` positive
/// definite. Computed in floating point, padded, so callers must still
/// filter exactly.
pub fn ellipsoid_box(form: &IntMatrix, linear: &[i64], bound: i64) -> Vec<(i64, i64)> {
    let inv = form.inverse_rational().expect("form must be non-degenerate");
    let to_f = |r: &Rational| *r.numer() as f64 / *r.denom() as f64;
    let n = linear.len();
    let center: Vec<f64> = (0..n).map(|i| (0..n).map(|j| to_f(&inv[i][j]) * linear[j] as f64).sum()).collect();
    let shift: f64 = center.iter().zip(linear).map(|(c, &l)| c * l as f64).sum();
    let radius2 = (bound as f64 + shift).max(0.0);
    (0..n)
        .map(|i| {
            let half = (radius2 * to_f(&inv[i][i])).sqrt();
            ((center[i] - half).floor() as i64 - 1, (center[i] + half).ceil() as i64 + 1)
        })
        .collect()
}

/// Smith normal form data of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Nonzero invariant factors `d_1 | d_2 | ...`, all positive.
    pub invariant_factors: Vec<i64>,
    pub n_rows: usize,
    pub n_cols: usize,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Free rank of the cokernel `Z^rows / image`.
    pub fn cokernel_free_rank(&self) -> usize {
        self.n_rows - self.rank()
    }

    /// Orders of the nontrivial cyclic torsion summands of the cokernel.
    pub fn torsion(&self) -> Vec<i64> {
        self.invariant_factors.iter().copied().filter(|&d| d > 1).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("integer overflow during Smith normal form")]
pub struct SmithOverflow;

/// Smith normal form by alternating row and column gcd elimination.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm, SmithOverflow> {
    let (nr, nc) = (m.n_rows(), m.n_cols());
    let mut a: Vec<Vec<i128>> = m.rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut t = 0;
    while t < nr.min(nc) {
        // pivot: smallest nonzero |entry| in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..nr {
                if a[i][t] != 0 {
                    let f = Integer::div_floor(&a[i][t], &a[t][t]);
                    for j in t..nc {
                        a[i][j] = a[i][j].checked_sub(f.checked_mul(a[t][j]).ok_or(SmithOverflow)?).ok_or(SmithOverflow)?;
                    }
                    if a[i][t] != 0 {
                        clean = false;
                        a.swap(t, i);
                    }
                }
            }
            for j in t + 1..nc {
                if a[t][j] != 0 {
                    let f = Integer::div_floor(&a[t][j], &a[t][t]);
                    for row in a.iter_mut().skip(t) {
                        row[j] = row[j].checked_sub(f.checked_mul(row[t]).ok_or(SmithOverflow)?).ok_or(SmithOverflow)?;
                    }
                    if a[t][j] != 0 {
                        clean = false;
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                    }
                }
            }
            if clean {
                // divisibility: fold any offending entry into row t
                let bad = (t + 1..nr).flat_map(|i| (t + 1..nc).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % a[t][t] != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..nc {
                            a[t][j] = a[t][j].checked_add(a[i][j]).ok_or(SmithOverflow)?;
                        }
                    }
                    None => break,
                }
            }
        }
        t += 1;
    }
    let invariant_factors = (0..nr.min(nc))
        .map(|i| a[i][i].abs())
        .filter(|&d| d != 0)
        .map(|d| i64::try_from(d).map_err(|_| SmithOverflow))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SmithForm {
        invariant_factors,
        n_rows: nr,
        n_cols: nc,
    })
}
