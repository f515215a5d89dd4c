//! Exact linear algebra over the integers: Hermite and Smith normal forms
//! with unimodular transforms, integer kernels and linear solving, lattice
//! arithmetic, and presentations of finitely generated abelian groups.
//!
//! All transforms are accumulated through elementary row and column
//! operations, so the returned matrices satisfy their certificates exactly:
//! `u * a * v == d`, `u * uinv == 1`, `v * vinv == 1`.

use crate::{Error, Result};
use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use std::fmt;

/// Dense matrix over `BigInt`, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        IntMatrix::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<BigInt>]) -> IntMatrix {
        IntMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.rows && j < self.cols);
        i * self.cols + j
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.get(i, j).is_one()
                    } else {
                        self.get(i, j).is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> IntMatrix {
        IntMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a * rhs.get(k, j);
                    let idx = out.idx(i, j);
                    out.data[idx] += add;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, rhs.rows, "row mismatch in hstack");
        IntMatrix::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let (ia, ib) = (self.idx(a, j), self.idx(b, j));
            self.data.swap(ia, ib);
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let (ia, ib) = (self.idx(i, a), self.idx(i, b));
            self.data.swap(ia, ib);
        }
    }

    /// row[dst] += c * row[src]
    fn row_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let add = c * self.get(src, j);
            let k = self.idx(dst, j);
            self.data[k] += add;
        }
    }

    /// col[dst] += c * col[src]
    fn col_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let add = c * self.get(i, src);
            let k = self.idx(i, dst);
            self.data[k] += add;
        }
    }

    fn row_neg(&mut self, i: usize) {
        for j in 0..self.cols {
            let k = self.idx(i, j);
            let v = -&self.data[k];
            self.data[k] = v;
        }
    }

    fn col_neg(&mut self, j: usize) {
        for i in 0..self.rows {
            let k = self.idx(i, j);
            let v = -&self.data[k];
            self.data[k] = v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Smith normal form `u * a * v == d` with `d` diagonal, entries
/// nonnegative, and each diagonal entry dividing the next.
pub struct Smith {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub uinv: IntMatrix,
    pub v: IntMatrix,
    pub vinv: IntMatrix,
    pub rank: usize,
}

struct SmithWork {
    a: IntMatrix,
    u: IntMatrix,
    uinv: IntMatrix,
    v: IntMatrix,
    vinv: IntMatrix,
}

impl SmithWork {
    fn new(a: &IntMatrix) -> SmithWork {
        SmithWork {
            a: a.clone(),
            u: IntMatrix::identity(a.rows),
            uinv: IntMatrix::identity(a.rows),
            v: IntMatrix::identity(a.cols),
            vinv: IntMatrix::identity(a.cols),
        }
    }

    fn row_swap(&mut self, x: usize, y: usize) {
        self.a.row_swap(x, y);
        self.u.row_swap(x, y);
        self.uinv.col_swap(x, y);
    }

    fn col_swap(&mut self, x: usize, y: usize) {
        self.a.col_swap(x, y);
        self.v.col_swap(x, y);
        self.vinv.row_swap(x, y);
    }

    fn row_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.row_add(dst, src, c);
        self.u.row_add(dst, src, c);
        let mc = -c;
        self.uinv.col_add(src, dst, &mc);
    }

    fn col_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.col_add(dst, src, c);
        self.v.col_add(dst, src, c);
        let mc = -c;
        self.vinv.row_add(src, dst, &mc);
    }

    fn row_neg(&mut self, i: usize) {
        self.a.row_neg(i);
        self.u.row_neg(i);
        self.uinv.col_neg(i);
    }

    /// Smallest nonzero entry (by absolute value) of the trailing submatrix.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a.get(bi, bj).abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

pub fn smith(a: &IntMatrix) -> Smith {
    let mut w = SmithWork::new(a);
    let (m, n) = (a.rows, a.cols);
    let mut t = 0;
    while t < m.min(n) {
        let cleared = loop {
            let Some((pi, pj)) = w.min_entry(t) else { break false };
            w.row_swap(t, pi);
            w.col_swap(t, pj);
            if w.a.get(t, t).is_negative() {
                w.row_neg(t);
            }
            let piv = w.a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let x = w.a.get(i, t);
                if x.is_zero() {
                    continue;
                }
                let q = -(x / &piv);
                w.row_add(i, t, &q);
                if !w.a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let x = w.a.get(t, j);
                if x.is_zero() {
                    continue;
                }
                let q = -(x / &piv);
                w.col_add(j, t, &q);
                if !w.a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Row and column t are clear; enforce divisibility of the rest.
            let mut offending = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !w.a.get(i, j).mod_floor(&piv).is_zero() {
                        offending = Some(i);
                        break 'scan;
                    }
                }
            }
            match offending {
                Some(i) => {
                    w.row_add(t, i, &BigInt::one());
                }
                None => break true,
            }
        };
        if !cleared {
            break;
        }
        t += 1;
    }
    let rank = (0..m.min(n)).take_while(|&i| !w.a.get(i, i).is_zero()).count();
    Smith {
        d: w.a,
        u: w.u,
        uinv: w.uinv,
        v: w.v,
        vinv: w.vinv,
        rank,
    }
}

/// Row Hermite normal form: returns `(h, u)` with `h == u * a`, `u`
/// unimodular, `h` in row echelon form with positive pivots and entries
/// above each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut r = 0;
    for j in 0..h.cols {
        if r == h.rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..h.rows {
                if h.get(i, j).is_zero() {
                    continue;
                }
                match best {
                    Some(b) if h.get(b, j).abs() <= h.get(i, j).abs() => {}
                    _ => best = Some(i),
                }
            }
            let Some(pi) = best else { break };
            h.row_swap(r, pi);
            u.row_swap(r, pi);
            if h.get(r, j).is_negative() {
                h.row_neg(r);
                u.row_neg(r);
            }
            let piv = h.get(r, j).clone();
            let mut clean = true;
            for i in r + 1..h.rows {
                let x = h.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let q = -(x / &piv);
                h.row_add(i, r, &q);
                u.row_add(i, r, &q);
                if !h.get(i, j).is_zero() {
                    clean = false;
                }
            }
            if clean {
                for i in 0..r {
                    let q = -h.get(i, j).div_floor(&piv);
                    h.row_add(i, r, &q);
                    u.row_add(i, r, &q);
                }
                r += 1;
                break;
            }
        }
    }
    (h, u)
}

/// Canonical basis of the lattice spanned by the columns of `gens`,
/// returned as the columns of the result.  Two generator sets span the same
/// lattice exactly when their canonical bases are equal.
pub fn hermite_basis(gens: &IntMatrix) -> IntMatrix {
    let (h, _) = hermite_rows(&gens.transpose());
    let nonzero: Vec<Vec<BigInt>> = (0..h.rows())
        .filter(|&i| (0..h.cols()).any(|j| !h.get(i, j).is_zero()))
        .map(|i| (0..h.cols()).map(|j| h.get(i, j).clone()).collect())
        .collect();
    IntMatrix::from_fn(gens.rows, nonzero.len(), |i, j| nonzero[j][i].clone())
}

/// Basis of the integer kernel of `a`, as columns.
pub fn kernel(a: &IntMatrix) -> IntMatrix {
    let s = smith(a);
    let cols: Vec<Vec<BigInt>> = (s.rank..a.cols).map(|j| s.v.col(j)).collect();
    IntMatrix::from_cols(a.cols, &cols)
}

/// One integer solution of `a x == b`, if any exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "dimension mismatch in solve");
    let s = smith(a);
    let y = s.u.mul_vec(b);
    let mut z = vec![BigInt::zero(); a.cols];
    for i in 0..a.rows {
        if i < s.rank {
            let d = s.d.get(i, i);
            let (q, r) = y[i].div_rem(d);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        } else if !y[i].is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&z))
}

/// Is `v` in the lattice spanned by the columns of `gens`?
pub fn in_lattice(gens: &IntMatrix, v: &[BigInt]) -> bool {
    solve(gens, v).is_some()
}

/// Generators (as columns) of `{x : a x lies in the column lattice of l}`.
pub fn preimage_lattice(a: &IntMatrix, l: &IntMatrix) -> IntMatrix {
    assert_eq!(a.rows, l.rows, "codomain mismatch in preimage_lattice");
    let k = kernel(&a.hstack(&l.neg()));
    let cols: Vec<Vec<BigInt>> = (0..k.cols())
        .map(|j| (0..a.cols).map(|i| k.get(i, j).clone()).collect())
        .collect();
    hermite_basis(&IntMatrix::from_cols(a.cols, &cols))
}

/// Isomorphism type of a finitely generated abelian group: a free part and
/// the invariant factors `d_1 | d_2 | ...`, each greater than 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InvariantFactors {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl InvariantFactors {
    pub fn free(rank: usize) -> InvariantFactors {
        InvariantFactors {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free_of_rank(&self, r: usize) -> bool {
        self.free_rank == r && self.torsion.is_empty()
    }

    pub fn is_cyclic_of(&self, d: i64) -> bool {
        self.free_rank == 0 && self.torsion.len() == 1 && self.torsion[0] == BigInt::from(d)
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Isomorphism type of `Z^ambient` modulo the column lattice of `gens`.
pub fn quotient_invariants(ambient: usize, gens: &IntMatrix) -> InvariantFactors {
    assert_eq!(gens.rows, ambient, "generator rows must match ambient rank");
    let s = smith(gens);
    let torsion: Vec<BigInt> = (0..s.rank)
        .map(|i| s.d.get(i, i).clone())
        .filter(|d| !d.is_one())
        .collect();
    InvariantFactors {
        free_rank: ambient - s.rank,
        torsion,
    }
}

/// Isomorphism type of `sup / sub` for two lattices given by generating
/// columns in the same ambient space.  Fails unless `sub` is contained in
/// `sup`.
pub fn lattice_quotient(sup: &IntMatrix, sub: &IntMatrix) -> Result<InvariantFactors> {
    assert_eq!(sup.rows, sub.rows, "ambient mismatch in lattice_quotient");
    let basis = hermite_basis(sup);
    let mut coords: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..sub.cols() {
        let c = solve(&basis, &sub.col(j)).ok_or_else(|| {
            Error::Inclusion(format!("generator {j} of the subgroup lies outside the supergroup"))
        })?;
        coords.push(c);
    }
    Ok(quotient_invariants(
        basis.cols(),
        &IntMatrix::from_cols(basis.cols(), &coords),
    ))
}

/// Working presentation of `Z^ambient / L` for a lattice `L`: a projection
/// onto reduced coordinates, a lift back to the ambient space, and the
/// modulus of every retained coordinate (`None` marks a free one).
///
/// `project` is a surjective homomorphism with kernel exactly `L`, and
/// `lift(project(x)) - x` always lies in `L`.
#[derive(Clone)]
pub struct QuotientPresentation {
    pub ambient: usize,
    pub moduli: Vec<Option<BigInt>>,
    proj_rows: IntMatrix,
    lift_cols: IntMatrix,
}

impl QuotientPresentation {
    /// Number of retained coordinates.
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn invariants(&self) -> InvariantFactors {
        InvariantFactors {
            free_rank: self.moduli.iter().filter(|m| m.is_none()).count(),
            torsion: self.moduli.iter().filter_map(|m| m.clone()).collect(),
        }
    }

    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut y = self.proj_rows.mul_vec(x);
        for (yi, m) in y.iter_mut().zip(&self.moduli) {
            if let Some(d) = m {
                *yi = yi.mod_floor(d);
            }
        }
        y
    }

    pub fn lift(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.lift_cols.mul_vec(y)
    }

    pub fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.rank()]
    }

    pub fn is_zero(&self, y: &[BigInt]) -> bool {
        y.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        for (yi, m) in out.iter_mut().zip(&self.moduli) {
            if let Some(d) = m {
                *yi = yi.mod_floor(d);
            }
        }
        out
    }

    pub fn neg_elt(&self, a: &[BigInt]) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = a.iter().map(|x| -x).collect();
        for (yi, m) in out.iter_mut().zip(&self.moduli) {
            if let Some(d) = m {
                *yi = yi.mod_floor(d);
            }
        }
        out
    }
}

/// Builds the reduced-coordinate presentation of `Z^ambient` modulo the
/// column lattice of `gens`.
pub fn quotient_presentation(ambient: usize, gens: &IntMatrix) -> QuotientPresentation {
    assert_eq!(gens.rows, ambient, "generator rows must match ambient rank");
    let s = smith(gens);
    let mut keep: Vec<(usize, Option<BigInt>)> = Vec::new();
    for i in 0..ambient {
        if i < s.rank {
            let d = s.d.get(i, i).clone();
            if d.is_one() {
                continue;
            }
            keep.push((i, Some(d)));
        } else {
            keep.push((i, None));
        }
    }
    let proj_rows = IntMatrix::from_fn(keep.len(), ambient, |r, j| s.u.get(keep[r].0, j).clone());
    let lift_cols = IntMatrix::from_fn(ambient, keep.len(), |i, c| s.uinv.get(i, keep[c].0).clone());
    QuotientPresentation {
        ambient,
        moduli: keep.into_iter().map(|(_, m)| m).collect(),
        proj_rows,
        lift_cols,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn bigvec(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| big(x)).collect()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntMatrix {
        IntMatrix::from_fn(rows, cols, |_, _| big(rng.gen_range(-9..=9)))
    }

    fn check_smith_certificate(a: &IntMatrix) {
        let s = smith(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "u*a*v == d");
        assert!(s.u.mul(&s.uinv).is_identity(), "u*uinv == 1");
        assert!(s.v.mul(&s.vinv).is_identity(), "v*vinv == 1");
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero(), "off-diagonal zero");
                }
            }
        }
        let diag: Vec<BigInt> = (0..s.d.rows().min(s.d.cols()))
            .map(|i| s.d.get(i, i).clone())
            .collect();
        for w in diag.windows(2) {
            if !w[0].is_zero() && !w[1].is_zero() {
                assert!(w[1].mod_floor(&w[0]).is_zero(), "divisibility chain");
            }
            if w[0].is_zero() {
                assert!(w[1].is_zero(), "zeros trail the chain");
            }
        }
        assert!(diag.iter().all(|d| !d.is_negative()), "nonnegative diagonal");
        assert_eq!(s.rank, diag.iter().filter(|d| !d.is_zero()).count());
    }

    #[test]
    fn smith_certificates_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..60 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            check_smith_certificate(&random_matrix(&mut rng, rows, cols));
        }
        check_smith_certificate(&IntMatrix::zeros(3, 4));
        check_smith_certificate(&IntMatrix::zeros(0, 0));
        check_smith_certificate(&IntMatrix::zeros(2, 0));
        check_smith_certificate(&IntMatrix::identity(4));
    }

    #[test]
    fn smith_known_forms() {
        let a = IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]);
        let s = smith(&a);
        assert_eq!(s.d.get(0, 0), &big(1));
        assert_eq!(s.d.get(1, 1), &big(6));

        let a = IntMatrix::from_i64_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let s = smith(&a);
        let diag: Vec<BigInt> = (0..3).map(|i| s.d.get(i, i).clone()).collect();
        assert_eq!(diag, bigvec(&[2, 2, 156]));
    }

    #[test]
    fn hermite_rows_certificate_and_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let a = random_matrix(&mut rng, rows, cols);
            let (h, u) = hermite_rows(&a);
            assert_eq!(u.mul(&a), h, "h == u*a");
            let s = smith(&u);
            assert!(
                (0..u.rows()).all(|i| s.d.get(i, i).is_one()),
                "transform unimodular"
            );
            // Echelon shape with positive pivots and reduced columns above.
            let mut last_pivot: Option<usize> = None;
            for i in 0..h.rows() {
                let pivot = (0..h.cols()).find(|&j| !h.get(i, j).is_zero());
                if let Some(j) = pivot {
                    if let Some(prev) = last_pivot {
                        assert!(j > prev, "pivots strictly move right");
                    }
                    assert!(h.get(i, j).is_positive());
                    for above in 0..i {
                        assert!(!h.get(above, j).is_negative());
                        assert!(h.get(above, j) < h.get(i, j));
                    }
                    last_pivot = Some(j);
                } else {
                    for below in i..h.rows() {
                        for j in 0..h.cols() {
                            assert!(h.get(below, j).is_zero(), "zero rows at the bottom");
                        }
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn hermite_basis_is_generator_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = rng.gen_range(1..=4);
            let k = rng.gen_range(1..=4);
            let g = random_matrix(&mut rng, n, k);
            let basis = hermite_basis(&g);
            // Shuffle generators by an invertible column recombination.
            let mut g2 = g.clone();
            for _ in 0..6 {
                let a = rng.gen_range(0..k);
                let b = rng.gen_range(0..k);
                if a != b {
                    let c = big(rng.gen_range(-3..=3));
                    g2.col_add(a, b, &c);
                }
            }
            assert_eq!(hermite_basis(&g2), basis);
            // Every original generator lies in the lattice of the basis.
            for j in 0..k {
                assert!(in_lattice(&basis, &g.col(j)));
            }
        }
    }

    #[test]
    fn kernel_annihilates_and_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=5);
            let a = random_matrix(&mut rng, rows, cols);
            let k = kernel(&a);
            assert!(a.mul(&k).is_zero());
            assert_eq!(k.cols(), cols - smith(&a).rank);
            // Kernel columns are independent: their span has full rank.
            assert_eq!(smith(&k).rank, k.cols());
        }
    }

    #[test]
    fn solve_finds_solutions_and_detects_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let a = random_matrix(&mut rng, rows, cols);
            let x0: Vec<BigInt> = (0..cols).map(|_| big(rng.gen_range(-5..=5))).collect();
            let b = a.mul_vec(&x0);
            let x = solve(&a, &b).expect("constructed system is solvable");
            assert_eq!(a.mul_vec(&x), b);
        }
        let a = IntMatrix::from_i64_rows(&[vec![2]]);
        assert!(solve(&a, &bigvec(&[1])).is_none());
        assert!(solve(&a, &bigvec(&[-4])).is_some());
        let a = IntMatrix::from_i64_rows(&[vec![1], vec![1]]);
        assert!(solve(&a, &bigvec(&[1, 2])).is_none());
    }

    #[test]
    fn quotient_invariants_known_groups() {
        let z2_mod_23 = quotient_invariants(2, &IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]));
        assert!(z2_mod_23.is_cyclic_of(6));
        let z2_mod_2i = quotient_invariants(2, &IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 2]]));
        assert_eq!(z2_mod_2i.torsion, bigvec(&[2, 2]));
        assert_eq!(z2_mod_2i.free_rank, 0);
        let line = quotient_invariants(2, &IntMatrix::from_i64_rows(&[vec![1], vec![0]]));
        assert!(line.is_free_of_rank(1));
        let nothing = quotient_invariants(2, &IntMatrix::zeros(2, 0));
        assert!(nothing.is_free_of_rank(2));
        assert_eq!(format!("{}", z2_mod_23), "Z/6");
        assert_eq!(format!("{}", line), "Z");
        assert_eq!(
            format!(
                "{}",
                InvariantFactors {
                    free_rank: 2,
                    torsion: bigvec(&[2, 6])
                }
            ),
            "Z^2 + Z/2 + Z/6"
        );
        assert_eq!(format!("{}", InvariantFactors::free(0)), "0");
    }

    #[test]
    fn lattice_quotient_checks_inclusion() {
        let sup = IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 1]]);
        let sub = IntMatrix::from_i64_rows(&[vec![4, 0], vec![0, 3]]);
        let q = lattice_quotient(&sup, &sub).unwrap();
        assert!(q.is_cyclic_of(6));
        let not_inside = IntMatrix::from_i64_rows(&[vec![1], vec![0]]);
        assert!(lattice_quotient(&sup, &not_inside).is_err());
    }

    #[test]
    fn preimage_lattice_known_case() {
        let a = IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]);
        let l = IntMatrix::from_i64_rows(&[vec![4, 0], vec![0, 3]]);
        let p = preimage_lattice(&a, &l);
        let expected = hermite_basis(&IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 1]]));
        assert_eq!(p, expected);
    }

    #[test]
    fn preimage_lattice_random_certificate() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..25 {
            let rows = rng.gen_range(1..=3);
            let cols = rng.gen_range(1..=3);
            let a = random_matrix(&mut rng, rows, cols);
            let lcols = rng.gen_range(1..=3);
            let l = random_matrix(&mut rng, rows, lcols);
            let p = preimage_lattice(&a, &l);
            // Every generator maps into the target lattice.
            for j in 0..p.cols() {
                let img = a.mul_vec(&p.col(j));
                assert!(in_lattice(&l, &img));
            }
            // Random elements with image in the lattice are in the preimage.
            for _ in 0..10 {
                let x: Vec<BigInt> = (0..cols).map(|_| big(rng.gen_range(-4..=4))).collect();
                if in_lattice(&l, &a.mul_vec(&x)) {
                    assert!(in_lattice(&p, &x));
                }
            }
        }
    }

    #[test]
    fn quotient_presentation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let n = rng.gen_range(1..=4);
            let k = rng.gen_range(0..=4);
            let gens = random_matrix(&mut rng, n, k);
            let q = quotient_presentation(n, &gens);
            assert_eq!(q.invariants(), quotient_invariants(n, &gens));
            // Generators project to zero.
            for j in 0..k {
                assert!(q.is_zero(&q.project(&gens.col(j))));
            }
            for _ in 0..10 {
                let x: Vec<BigInt> = (0..n).map(|_| big(rng.gen_range(-8..=8))).collect();
                let y = q.project(&x);
                // project . lift == id on reduced coordinates
                assert_eq!(q.project(&q.lift(&y)), y);
                // lift . project differs from the input by a lattice element
                let back = q.lift(&y);
                let diff: Vec<BigInt> = x.iter().zip(&back).map(|(a, b)| a - b).collect();
                assert!(in_lattice(&gens, &diff));
                // projecting to zero means lattice membership
                if q.is_zero(&y) {
                    assert!(in_lattice(&gens, &x));
                }
            }
        }
    }

    #[test]
    fn quotient_presentation_arithmetic() {
        let gens = IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 0]]);
        let q = quotient_presentation(2, &gens);
        assert_eq!(q.invariants().to_string(), "Z + Z/2");
        let a = q.project(&bigvec(&[1, 3]));
        let na = q.neg_elt(&a);
        assert!(q.is_zero(&q.add(&a, &na)));
        let doubled = q.add(&a, &a);
        assert_eq!(q.project(&bigvec(&[2, 6])), doubled);
    }
}
