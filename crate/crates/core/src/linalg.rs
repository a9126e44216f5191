//! Exact linear algebra: fraction-free (Bareiss) elimination over integral
//! domains, rank and nullity of sparse rational matrices, kernel bases, and
//! generic rank over the polynomial ring.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::poly::Poly;
use crate::scalar::Scalar;

/// An integral domain with exact division, enough for Bareiss elimination.
pub trait Domain: Clone + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / other`, where the quotient is known to be exact.
    fn exact_div(&self, other: &Self) -> Self;
}

impl Domain for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, other: &Self) -> Self {
        debug_assert!(Zero::is_zero(&(self % other)));
        self / other
    }
}

impl Domain for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, other: &Self) -> Self {
        Poly::exact_div(self, other).expect("Bareiss division must be exact")
    }
}

/// Row echelon form produced by fraction-free elimination.
#[derive(Clone, Debug)]
pub struct Echelon<D> {
    pub rows: Vec<Vec<D>>,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
    /// Original index of each row after pivoting swaps.
    pub row_order: Vec<usize>,
    /// Pivot entries; each is a minor of the input matrix.
    pub pivots: Vec<D>,
    /// Parity of the row permutation.
    pub odd_permutation: bool,
}

/// Bareiss elimination to row echelon form. Every intermediate entry is a
/// minor of the input, so all divisions are exact.
pub fn bareiss<D: Domain>(mut m: Vec<Vec<D>>, ncols: usize) -> Echelon<D> {
    let nrows = m.len();
    let mut row_order: Vec<usize> = (0..nrows).collect();
    let mut pivot_cols = Vec::new();
    let mut pivots = Vec::new();
    let mut prev = D::one();
    let mut odd = false;
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            row_order.swap(p, r);
            odd = !odd;
        }
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = pivot_row[c].clone();
        rest.par_iter_mut().for_each(|row| {
            let lead = row[c].clone();
            for j in c + 1..ncols {
                let a = pivot.mul(&row[j]);
                let v = if lead.is_zero() { a } else { a.sub(&lead.mul(&pivot_row[j])) };
                row[j] = if v.is_zero() { v } else { v.exact_div(&prev) };
            }
            row[c] = D::zero();
        });
        prev = pivot.clone();
        pivots.push(pivot);
        pivot_cols.push(c);
        r += 1;
    }
    Echelon {
        rows: m,
        rank: r,
        pivot_cols,
        row_order,
        pivots,
        odd_permutation: odd,
    }
}

/// Determinant of a square matrix over a domain.
pub fn determinant<D: Domain>(m: Vec<Vec<D>>) -> D {
    let n = m.len();
    if n == 0 {
        return D::one();
    }
    let e = bareiss(m, n);
    if e.rank < n {
        return D::zero();
    }
    let det = e.pivots[n - 1].clone();
    if e.odd_permutation {
        det.neg()
    } else {
        det
    }
}

/// A nonzero kernel vector of `m` (entries in the domain, by Cramer's rule on
/// an independent row subset), or `None` if the columns are independent.
pub fn kernel_witness<D: Domain>(m: &[Vec<D>], ncols: usize) -> Option<Vec<D>> {
    let e = bareiss(m.to_vec(), ncols);
    if e.rank == ncols {
        return None;
    }
    let free = (0..ncols).find(|c| !e.pivot_cols.contains(c))?;
    let rows: Vec<&Vec<D>> = e.row_order[..e.rank].iter().map(|&i| &m[i]).collect();
    let square = |cols: &[usize]| -> Vec<Vec<D>> {
        rows.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect()
    };
    let mut v = vec![D::zero(); ncols];
    v[free] = determinant(square(&e.pivot_cols));
    for t in 0..e.rank {
        let mut cols = e.pivot_cols.clone();
        cols[t] = free;
        v[e.pivot_cols[t]] = determinant(square(&cols)).neg();
    }
    Some(v)
}

/// Rank of a polynomial matrix over the field of rational functions, with the
/// non-constant pivots: the rank can only drop where one of them vanishes.
pub fn generic_rank(m: &[Vec<Poly>], ncols: usize) -> (usize, Vec<Poly>) {
    let e = bareiss(m.to_vec(), ncols);
    let caveats = e.pivots.iter().filter(|p| !p.is_constant()).cloned().collect();
    (e.rank, caveats)
}

/// A sparse column of a rational matrix: row index to nonzero entry.
pub type SparseVec = BTreeMap<usize, Scalar>;

/// A rational matrix stored as sparse columns.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    nrows: usize,
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(nrows: usize) -> Self {
        SparseMatrix {
            nrows,
            cols: Vec::new(),
        }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.keys().all(|&r| r < nrows)));
        SparseMatrix { nrows, cols }
    }

    pub fn push_column(&mut self, col: SparseVec) {
        debug_assert!(col.keys().all(|&r| r < self.nrows));
        self.cols.push(col);
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    /// Keeps only the rows selected by `keep`, renumbering them densely.
    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> SparseMatrix {
        let mut map = vec![usize::MAX; self.nrows];
        let mut n = 0;
        for (r, slot) in map.iter_mut().enumerate() {
            if keep(r) {
                *slot = n;
                n += 1;
            }
        }
        let cols = self
            .cols
            .iter()
            .map(|c| {
                c.iter()
                    .filter(|(r, _)| map[**r] != usize::MAX)
                    .map(|(r, v)| (map[*r], v.clone()))
                    .collect()
            })
            .collect();
        SparseMatrix { nrows: n, cols }
    }

    /// Splits into independent diagonal blocks: columns connected through a
    /// shared nonzero row end up in the same block. Returns `(rows, cols)` per
    /// block, both sorted; all-zero columns are omitted.
    fn blocks(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let n = self.cols.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut owner: Vec<Option<usize>> = vec![None; self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            for &r in col.keys() {
                match owner[r] {
                    None => owner[r] = Some(c),
                    Some(o) => {
                        let (a, b) = (find(&mut parent, o), find(&mut parent, c));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for c in 0..n {
            if self.cols[c].is_empty() {
                continue;
            }
            let root = find(&mut parent, c);
            groups.entry(root).or_default().1.push(c);
        }
        for (r, o) in owner.iter().enumerate() {
            if let Some(c) = o {
                let root = find(&mut parent, *c);
                groups.get_mut(&root).expect("row owner has a block").0.push(r);
            }
        }
        groups.into_values().collect()
    }

    /// Integer matrix (rows x cols) of a block, each column scaled by the lcm
    /// of its denominators; column scaling does not change the rank.
    fn integer_block(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<BigInt>> {
        let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut m = vec![vec![<BigInt as Zero>::zero(); cols.len()]; rows.len()];
        for (j, &c) in cols.iter().enumerate() {
            let col = &self.cols[c];
            let lcm = col.values().fold(<BigInt as One>::one(), |acc, v| acc.lcm(v.denom()));
            for (r, v) in col {
                m[row_pos[r]][j] = v.numer() * (&lcm / v.denom());
            }
        }
        m
    }

    /// Exact rank, by fraction-free elimination on each diagonal block.
    pub fn rank(&self) -> usize {
        self.blocks()
            .par_iter()
            .map(|(rows, cols)| {
                // eliminate along the shorter dimension
                let m = self.integer_block(rows, cols);
                if rows.len() <= cols.len() {
                    bareiss(m, cols.len()).rank
                } else {
                    bareiss(transpose(&m, cols.len()), rows.len()).rank
                }
            })
            .sum()
    }

    pub fn nullity(&self) -> usize {
        self.ncols() - self.rank()
    }

    /// A basis of the kernel `{v : M v = 0}`. Each basis vector has a 1 in one
    /// free column and is otherwise supported on pivot columns, so the basis is
    /// canonical for a fixed column order.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut out: Vec<SparseVec> = self
            .cols
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_empty())
            .map(|(i, _)| SparseVec::from([(i, Scalar::one())]))
            .collect();
        let per_block: Vec<Vec<SparseVec>> = self
            .blocks()
            .par_iter()
            .map(|(rows, cols)| block_kernel(self, rows, cols))
            .collect();
        out.extend(per_block.into_iter().flatten());
        out.sort_by_key(|v| v.keys().next_back().copied());
        out
    }

    /// `M v` for a sparse vector over the columns.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (c, a) in v {
            for (r, m) in &self.cols[*c] {
                let e = out.entry(*r).or_insert_with(Scalar::zero);
                *e += a * m;
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }
}

fn transpose<D: Clone>(m: &[Vec<D>], ncols: usize) -> Vec<Vec<D>> {
    (0..ncols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Kernel of one block by rational reduced row echelon form.
fn block_kernel(m: &SparseMatrix, rows: &[usize], cols: &[usize]) -> Vec<SparseVec> {
    let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut a = vec![vec![Scalar::zero(); cols.len()]; rows.len()];
    for (j, &c) in cols.iter().enumerate() {
        for (r, v) in &m.cols[c] {
            a[row_pos[r]][j] = v.clone();
        }
    }
    let pivots = rref(&mut a, cols.len());
    let mut out = Vec::new();
    for free in 0..cols.len() {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = SparseVec::new();
        v.insert(cols[free], Scalar::one());
        for (row, &pc) in pivots.iter().enumerate() {
            let x = &a[row][free];
            if !x.is_zero() {
                v.insert(cols[pc], -x.clone());
            }
        }
        out.push(v);
    }
    out
}

/// In-place reduced row echelon form over the rationals; returns pivot columns.
pub fn rref(a: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !Zero::is_zero(&a[i][c])) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || Zero::is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn sparse(rows: &[&[i64]]) -> SparseMatrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let cols = (0..ncols)
            .map(|j| {
                (0..nrows)
                    .filter(|&i| rows[i][j] != 0)
                    .map(|i| (i, int(rows[i][j])))
                    .collect()
            })
            .collect();
        SparseMatrix::from_columns(nrows, cols)
    }

    #[test]
    fn bareiss_rank_and_determinant() {
        let m = big(&[&[2, 1, 3], &[4, 2, 6], &[1, 0, 1]]);
        assert_eq!(bareiss(m.clone(), 3).rank, 2);
        assert_eq!(determinant(m), BigInt::from(0));
        let m = big(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 9]]);
        // 0*(36-35) - 1*(27-30) + 2*(21-24) = -3
        assert_eq!(determinant(m), BigInt::from(-3));
    }

    #[test]
    fn rank_with_rational_entries_and_blocks() {
        let mut m = SparseMatrix::new(4);
        m.push_column(SparseVec::from([(0, ratio(1, 2)), (1, ratio(1, 3))]));
        m.push_column(SparseVec::from([(0, int(3)), (1, int(2))]));
        m.push_column(SparseVec::from([(3, int(5))]));
        m.push_column(SparseVec::new());
        assert_eq!(m.rank(), 2);
        assert_eq!(m.nullity(), 2);
        let ker = m.kernel();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.apply(v).is_empty());
        }
    }

    #[test]
    fn kernel_matches_hand_computation() {
        // x + y + z = 0, y - z = 0  => kernel spanned by (-2, 1, 1)
        let m = sparse(&[&[1, 1, 1], &[0, 1, -1]]);
        let ker = m.kernel();
        assert_eq!(ker, vec![SparseVec::from([(0, int(-2)), (1, int(1)), (2, int(1))])]);
    }

    #[test]
    fn row_selection() {
        let m = sparse(&[&[1, 0], &[0, 1], &[1, 1]]);
        let top = m.select_rows(|r| r == 2);
        assert_eq!(top.nrows(), 1);
        assert_eq!(top.rank(), 1);
    }

    #[test]
    fn polynomial_generic_rank_and_witness() {
        let x0 = Poly::var(0);
        let z = Poly::zero();
        // flat map of x0 dx0^dx1 on {0, 1, 2}
        let m = vec![
            vec![z.clone(), -x0.clone(), z.clone()],
            vec![x0.clone(), z.clone(), z.clone()],
        ];
        let (rank, caveats) = generic_rank(&m, 3);
        assert_eq!(rank, 2);
        assert!(caveats.contains(&x0));
        let w = kernel_witness(&m, 3).unwrap();
        assert!(w[0].is_zero() && w[1].is_zero() && !w[2].is_zero());
        let full = vec![vec![z.clone(), x0.clone()], vec![-x0.clone(), z.clone()]];
        assert!(kernel_witness(&full, 2).is_none());
    }

    #[test]
    fn cramer_witness_solves_system() {
        let m = big(&[&[1, 2, 3], &[4, 5, 6]]);
        let v = kernel_witness(&m, 3).unwrap();
        for row in &m {
            let s: BigInt = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(Zero::is_zero(&s));
        }
        assert!(v.iter().any(|x| !Zero::is_zero(x)));
    }
}
