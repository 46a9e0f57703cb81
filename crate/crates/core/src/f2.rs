//! Linear algebra over the two-element field.
//!
//! Rows are packed into `u64` words, so elimination steps are word-wide XORs.
//! Everything here is exact; there are no tolerances.

use crate::error::{Error, Result};

/// Dense bit matrix with row-major packed storage.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    nrows: usize,
    ncols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        let words_per_row = ncols.div_ceil(64).max(1);
        BitMatrix {
            nrows,
            ncols,
            words_per_row,
            bits: vec![0; nrows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(ncols: usize, rows: &[Vec<usize>]) -> Self {
        let mut m = Self::zeros(rows.len(), ncols);
        for (i, cols) in rows.iter().enumerate() {
            for &c in cols {
                m.set(i, c, true);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.nrows && c < self.ncols);
        let w = self.bits[r * self.words_per_row + c / 64];
        (w >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.nrows && c < self.ncols);
        let w = &mut self.bits[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row(r).iter().all(|&w| w == 0)
    }

    /// rows[dst] ^= rows[src]
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let w = self.words_per_row;
        let (a, b) = if dst < src {
            let (lo, hi) = self.bits.split_at_mut(src * w);
            (&mut lo[dst * w..dst * w + w], &hi[..w])
        } else {
            let (lo, hi) = self.bits.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..src * w + w])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= *y;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words_per_row;
        for k in 0..w {
            self.bits.swap(a * w + k, b * w + k);
        }
    }

    /// cols[dst] ^= cols[src]
    pub fn xor_col(&mut self, dst: usize, src: usize) {
        for r in 0..self.nrows {
            if self.get(r, src) {
                let v = self.get(r, dst);
                self.set(r, dst, !v);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.nrows {
            let (va, vb) = (self.get(r, a), self.get(r, b));
            self.set(r, a, vb);
            self.set(r, b, va);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.ncols, self.nrows);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix product over F2.
    pub fn multiply(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols, rhs.nrows, "inner dimensions must agree");
        let mut out = BitMatrix::zeros(self.nrows, rhs.ncols);
        for r in 0..self.nrows {
            for k in 0..self.ncols {
                if self.get(r, k) {
                    let (dst, src) = (r * out.words_per_row, k * rhs.words_per_row);
                    for w in 0..out.words_per_row {
                        out.bits[dst + w] ^= rhs.bits[src + w];
                    }
                }
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        (0..self.nrows).all(|r| (0..self.ncols).all(|c| self.get(r, c) == (r == c)))
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.nrows, self.ncols)?;
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// F2 rank by Gaussian elimination on a working copy.
pub fn rank(m: &BitMatrix) -> usize {
    let mut work = m.clone();
    let mut rank = 0;
    for col in 0..work.ncols {
        let Some(pivot) = (rank..work.nrows).find(|&r| work.get(r, col)) else {
            continue;
        };
        work.swap_rows(rank, pivot);
        for r in 0..work.nrows {
            if r != rank && work.get(r, col) {
                work.xor_row(r, rank);
            }
        }
        rank += 1;
        if rank == work.nrows {
            break;
        }
    }
    rank
}

/// Basis of the right nullspace `{v : M v^T = 0 mod 2}`, one vector per row.
pub fn nullspace(m: &BitMatrix) -> BitMatrix {
    let mut work = m.clone();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..work.ncols {
        let Some(pivot) = (r..work.nrows).find(|&row| work.get(row, col)) else {
            continue;
        };
        work.swap_rows(r, pivot);
        for row in 0..work.nrows {
            if row != r && work.get(row, col) {
                work.xor_row(row, r);
            }
        }
        pivot_cols.push(col);
        r += 1;
        if r == work.nrows {
            break;
        }
    }
    let free_cols: Vec<usize> = (0..work.ncols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = BitMatrix::zeros(free_cols.len(), work.ncols);
    for (k, &fc) in free_cols.iter().enumerate() {
        basis.set(k, fc, true);
        // back-substitute: pivot row i fixes the pivot-column entry
        for (i, &pc) in pivot_cols.iter().enumerate() {
            if work.get(i, fc) {
                basis.set(k, pc, true);
            }
        }
    }
    basis
}

/// Smith normal form over F2 for a full-row-rank matrix.
///
/// Returns invertible `(P, Q)` with `P M Q = [I | 0]`. `Q` is accumulated as a
/// product of elementary column operations.
pub fn smith_normal_form(m: &BitMatrix) -> Result<(BitMatrix, BitMatrix)> {
    let (n, c) = (m.nrows(), m.ncols());
    if c < n {
        return Err(Error::RankDeficient {
            expected: n,
            found: rank(m),
        });
    }
    let mut work = m.clone();
    let mut p = BitMatrix::identity(n);
    let mut q = BitMatrix::identity(c);

    // Row reduction to RREF; every row op is mirrored on P so that P*M = work.
    let mut pivot_cols: Vec<usize> = Vec::with_capacity(n);
    let mut r = 0;
    for col in 0..c {
        let Some(pivot) = (r..n).find(|&row| work.get(row, col)) else {
            continue;
        };
        if pivot != r {
            work.swap_rows(r, pivot);
            p.swap_rows(r, pivot);
        }
        for row in 0..n {
            if row != r && work.get(row, col) {
                work.xor_row(row, r);
                p.xor_row(row, r);
            }
        }
        pivot_cols.push(col);
        r += 1;
        if r == n {
            break;
        }
    }
    if r < n {
        return Err(Error::RankDeficient {
            expected: n,
            found: r,
        });
    }

    // Column phase: move pivots to the left block, then clear the rest.
    // Every column op is mirrored on Q so that work_final = P*M*Q.
    for (k, &pc) in pivot_cols.iter().enumerate() {
        if pc != k {
            work.swap_cols(k, pc);
            q.swap_cols(k, pc);
        }
    }
    for col in n..c {
        for row in 0..n {
            if work.get(row, col) {
                work.xor_col(col, row);
                q.xor_col(col, row);
            }
        }
    }

    debug_assert!({
        let mut ok = true;
        for i in 0..n {
            for j in 0..c {
                ok &= work.get(i, j) == (i == j);
            }
        }
        ok
    });
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &BitMatrix) {
        let (p, q) = smith_normal_form(m).unwrap();
        assert_eq!(rank(&p), p.nrows(), "P invertible");
        assert_eq!(rank(&q), q.nrows(), "Q invertible");
        let prod = p.multiply(m).multiply(&q);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                assert_eq!(prod.get(i, j), i == j, "PMQ = [I|0] at ({i},{j})");
            }
        }
    }

    #[test]
    fn rank_identity_and_zero() {
        assert_eq!(rank(&BitMatrix::identity(7)), 7);
        assert_eq!(rank(&BitMatrix::zeros(4, 9)), 0);
    }

    #[test]
    fn rank_dependent_triple() {
        // check rows of {Z1Z2, Z2Z3, Z1Z3} on 3 qubits (z-part columns only)
        let m = BitMatrix::from_rows(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn snf_identity_block() {
        let mut m = BitMatrix::zeros(3, 6);
        for i in 0..3 {
            m.set(i, i, true);
        }
        check_snf(&m);
    }

    #[test]
    fn snf_flipped_block() {
        // M = [0 | I]
        let mut m = BitMatrix::zeros(3, 6);
        for i in 0..3 {
            m.set(i, 3 + i, true);
        }
        check_snf(&m);
    }

    #[test]
    fn snf_chain_stabilizers() {
        // {Z1Z2, Z2Z3, Z3} on 3 qubits in (x|z) layout: z-columns are 3..6
        let m = BitMatrix::from_rows(6, &[vec![3, 4], vec![4, 5], vec![5]]);
        check_snf(&m);
    }

    #[test]
    fn snf_rejects_rank_deficient() {
        let m = BitMatrix::from_rows(4, &[vec![0, 1], vec![1, 2], vec![0, 2]]);
        match smith_normal_form(&m) {
            Err(Error::RankDeficient { expected: 3, found: 2 }) => {}
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn nullspace_identity_is_empty() {
        let b = nullspace(&BitMatrix::identity(5));
        assert_eq!(b.nrows(), 0);
    }

    #[test]
    fn nullspace_zero_is_full() {
        let b = nullspace(&BitMatrix::zeros(3, 4));
        assert_eq!(b.nrows(), 4);
        assert_eq!(rank(&b), 4);
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let m = BitMatrix::from_rows(5, &[vec![0, 2, 4], vec![1, 2], vec![0, 1, 3]]);
        let b = nullspace(&m);
        assert_eq!(b.nrows(), 5 - rank(&m));
        let prod = m.multiply(&b.transpose());
        for r in 0..prod.nrows() {
            assert!(prod.row_is_zero(r));
        }
        assert_eq!(rank(&b), b.nrows(), "basis independent");
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix(max_r: usize, max_c: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(
                move |rows| {
                    let mut m = BitMatrix::zeros(r, c);
                    for (i, row) in rows.iter().enumerate() {
                        for (j, &v) in row.iter().enumerate() {
                            m.set(i, j, v);
                        }
                    }
                    m
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix(8, 12)) {
            let b = nullspace(&m);
            prop_assert_eq!(rank(&m) + b.nrows(), m.ncols());
            let prod = m.multiply(&b.transpose());
            for r in 0..prod.nrows() {
                prop_assert!(prod.row_is_zero(r));
            }
        }

        #[test]
        fn snf_on_full_rank(m in arb_matrix(6, 12)) {
            prop_assume!(rank(&m) == m.nrows() && m.ncols() >= m.nrows());
            let (p, q) = smith_normal_form(&m).unwrap();
            let prod = p.multiply(&m).multiply(&q);
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    prop_assert_eq!(prod.get(i, j), i == j);
                }
            }
        }
    }
}
