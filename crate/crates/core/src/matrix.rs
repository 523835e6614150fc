//! Exact dense matrices over `Z[1/2, i]`.
//!
//! Provides one- and two-level embeddings, the pivot column (the rightmost
//! column where a matrix differs from the identity), and the level triple
//! `(p, k, m)` whose strict lexicographic descent drives the termination of
//! the synthesis pass.

use crate::ring::{lde_vec, DyadicGauss};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("indices not strictly ordered: {0} >= {1}")]
    IndicesNotOrdered(usize, usize),
    #[error("matrix is not unitary")]
    NotUnitary,
}

/// An exact n×n matrix over `Z[1/2, i]`, row-major, indexed from zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UMat {
    n: usize,
    entries: Vec<DyadicGauss>,
}

impl UMat {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![DyadicGauss::zero(); n * n];
        for j in 0..n {
            entries[j * n + j] = DyadicGauss::one();
        }
        UMat { n, entries }
    }

    /// Builds a matrix from rows; all rows must have length `rows.len()`.
    pub fn from_rows(rows: Vec<Vec<DyadicGauss>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MatrixError::DimensionMismatch(row.len(), n));
            }
            entries.extend(row);
        }
        Ok(UMat { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, r: usize, c: usize) -> &DyadicGauss {
        &self.entries[r * self.n + c]
    }

    pub(crate) fn set(&mut self, r: usize, c: usize, v: DyadicGauss) {
        self.entries[r * self.n + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<DyadicGauss> {
        (0..self.n).map(|r| self.entry(r, c).clone()).collect()
    }

    pub fn mul(&self, rhs: &UMat) -> Result<UMat, MatrixError> {
        if self.n != rhs.n {
            return Err(MatrixError::DimensionMismatch(self.n, rhs.n));
        }
        let n = self.n;
        let mut out = UMat {
            n,
            entries: vec![DyadicGauss::zero(); n * n],
        };
        for r in 0..n {
            for c in 0..n {
                let mut acc = DyadicGauss::zero();
                for t in 0..n {
                    acc = &acc + &(self.entry(r, t) * rhs.entry(t, c));
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> UMat {
        let n = self.n;
        let mut out = UMat {
            n,
            entries: vec![DyadicGauss::zero(); n * n],
        };
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, self.entry(c, r).conj());
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        let one = DyadicGauss::one();
        (0..self.n).all(|r| {
            (0..self.n).all(|c| {
                let e = self.entry(r, c);
                if r == c {
                    *e == one
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// Exact unitarity: `M†M = I`.
    pub fn is_unitary(&self) -> bool {
        self.dagger()
            .mul(self)
            .map(|p| p.is_identity())
            .unwrap_or(false)
    }

    /// The one-level matrix with `z` at position `(j, j)`.
    pub fn one_level(n: usize, j: usize, z: DyadicGauss) -> Result<UMat, MatrixError> {
        if j >= n {
            return Err(MatrixError::IndexOutOfRange { index: j, n });
        }
        let mut m = UMat::identity(n);
        m.set(j, j, z);
        Ok(m)
    }

    /// The two-level matrix embedding the 2×2 block at rows/columns `j < k`.
    pub fn two_level(
        n: usize,
        block: &[[DyadicGauss; 2]; 2],
        j: usize,
        k: usize,
    ) -> Result<UMat, MatrixError> {
        if j >= k {
            return Err(MatrixError::IndicesNotOrdered(j, k));
        }
        if k >= n {
            return Err(MatrixError::IndexOutOfRange { index: k, n });
        }
        let mut m = UMat::identity(n);
        m.set(j, j, block[0][0].clone());
        m.set(j, k, block[0][1].clone());
        m.set(k, j, block[1][0].clone());
        m.set(k, k, block[1][1].clone());
        Ok(m)
    }

    /// The greatest `p` with `M·e_p ≠ e_p`, or `None` for the identity.
    pub fn pivot_column(&self) -> Option<usize> {
        let one = DyadicGauss::one();
        for p in (0..self.n).rev() {
            for r in 0..self.n {
                let e = self.entry(r, p);
                let matches = if r == p { *e == one } else { e.is_zero() };
                if !matches {
                    return Some(p);
                }
            }
        }
        None
    }

    /// The level of a unitary matrix, checking unitarity first.
    pub fn level_of(&self) -> Result<Level, MatrixError> {
        if !self.is_unitary() {
            return Err(MatrixError::NotUnitary);
        }
        Ok(self.level_unchecked())
    }

    /// Level without the unitarity check; callers must pass a unitary matrix.
    pub(crate) fn level_unchecked(&self) -> Level {
        match self.pivot_column() {
            None => Level::ZERO,
            Some(p) => {
                let v = self.column(p);
                let k = lde_vec(&v);
                let m = odd_indices(&v, k).len();
                Level { p, k, m }
            }
        }
    }

    // Left multiplications by the generator matrices, touching only the
    // affected rows.

    pub(crate) fn swap_rows(&mut self, j: usize, l: usize) {
        for c in 0..self.n {
            self.entries.swap(j * self.n + c, l * self.n + c);
        }
    }

    pub(crate) fn phase_row(&mut self, j: usize, e: u8) {
        for c in 0..self.n {
            let v = self.entry(j, c).mul_i_pow(e);
            self.set(j, c, v);
        }
    }

    /// Left multiplication by `K` at rows `j, l`:
    /// `(r_j, r_l) ← ((r_j + r_l)/γ, (r_j − r_l)/γ)`.
    pub(crate) fn k_rows(&mut self, j: usize, l: usize) {
        for c in 0..self.n {
            let top = self.entry(j, c).clone();
            let bot = self.entry(l, c).clone();
            self.set(j, c, (&top + &bot).div_gamma());
            self.set(l, c, (&top - &bot).div_gamma());
        }
    }

    /// Left multiplication by `K† = iK` at rows `j, l`.
    pub(crate) fn kd_rows(&mut self, j: usize, l: usize) {
        for c in 0..self.n {
            let top = self.entry(j, c).clone();
            let bot = self.entry(l, c).clone();
            self.set(j, c, (&top + &bot).div_gamma().mul_i());
            self.set(l, c, (&top - &bot).div_gamma().mul_i());
        }
    }
}

impl fmt::Display for UMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            write!(f, "[")?;
            for c in 0..self.n {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(r, c))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Ascending indices `j` with `γ^k·v_j` odd, where `k` is a denominator
/// exponent for `v`.
pub fn odd_indices(v: &[DyadicGauss], k: u32) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, t)| t.lde() == k && t.num().is_odd())
        .map(|(j, _)| j)
        .collect()
}

/// The level triple `(p, k, m)`: pivot column index, least denominator
/// exponent of the pivot column, and the number of odd entries of `γ^k v`.
/// Levels are compared lexicographically; `(0, 0, 0)` is the level of the
/// identity and of no other matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level {
    pub p: usize,
    pub k: u32,
    pub m: usize,
}

impl Level {
    pub const ZERO: Level = Level { p: 0, k: 0, m: 0 };
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.p, self.k, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::GaussInt;

    fn dg(a: i64, b: i64, k: u32) -> DyadicGauss {
        DyadicGauss::new(GaussInt::new(a, b), k)
    }

    /// The 2×2 block of `K = (1/(1+i))·[[1,1],[1,-1]]`.
    fn k_block() -> [[DyadicGauss; 2]; 2] {
        [[dg(1, 0, 1), dg(1, 0, 1)], [dg(1, 0, 1), dg(-1, 0, 1)]]
    }

    fn x_block() -> [[DyadicGauss; 2]; 2] {
        [[dg(0, 0, 0), dg(1, 0, 0)], [dg(1, 0, 0), dg(0, 0, 0)]]
    }

    #[test]
    fn identity_is_neutral() {
        let k = UMat::two_level(3, &k_block(), 0, 1).unwrap();
        let i3 = UMat::identity(3);
        assert_eq!(i3.mul(&k).unwrap(), k);
        assert_eq!(k.mul(&i3).unwrap(), k);
    }

    #[test]
    fn k_dagger_k_is_identity() {
        let k = UMat::two_level(2, &k_block(), 0, 1).unwrap();
        assert_eq!(k.dagger().mul(&k).unwrap(), UMat::identity(2));
        assert_eq!(k.dagger().dagger(), k);
    }

    #[test]
    fn x_squared_is_identity() {
        let x = UMat::two_level(2, &x_block(), 0, 1).unwrap();
        assert_eq!(x.mul(&x).unwrap(), UMat::identity(2));
    }

    #[test]
    fn unitarity_examples() {
        assert!(UMat::identity(3).is_unitary());
        assert!(UMat::two_level(2, &k_block(), 0, 1).unwrap().is_unitary());
        let upper = UMat::from_rows(vec![
            vec![dg(1, 0, 0), dg(1, 0, 0)],
            vec![dg(0, 0, 0), dg(1, 0, 0)],
        ])
        .unwrap();
        assert!(!upper.is_unitary());
    }

    #[test]
    fn embedding_examples() {
        let d = UMat::one_level(2, 0, dg(0, 1, 0)).unwrap();
        assert_eq!(*d.entry(0, 0), dg(0, 1, 0));
        assert_eq!(*d.entry(1, 1), dg(1, 0, 0));

        // a two-level X at [0,2] swaps rows 0 and 2
        let x02 = UMat::two_level(3, &x_block(), 0, 2).unwrap();
        let mut expect = UMat::identity(3);
        expect.swap_rows(0, 2);
        assert_eq!(x02, expect);

        assert_eq!(
            UMat::two_level(2, &k_block(), 1, 0),
            Err(MatrixError::IndicesNotOrdered(1, 0))
        );
        assert_eq!(
            UMat::one_level(2, 5, dg(1, 0, 0)),
            Err(MatrixError::IndexOutOfRange { index: 5, n: 2 })
        );
    }

    #[test]
    fn pivot_examples() {
        assert_eq!(UMat::identity(4).pivot_column(), None);
        let d = UMat::one_level(2, 0, dg(0, 1, 0)).unwrap();
        assert_eq!(d.pivot_column(), Some(0));
        let x = UMat::two_level(2, &x_block(), 0, 1).unwrap();
        assert_eq!(x.pivot_column(), Some(1));
    }

    #[test]
    fn level_examples() {
        assert_eq!(UMat::identity(3).level_of().unwrap(), Level::ZERO);
        let k = UMat::two_level(2, &k_block(), 0, 1).unwrap();
        assert_eq!(k.level_of().unwrap(), Level { p: 1, k: 1, m: 2 });
        let x = UMat::two_level(2, &x_block(), 0, 1).unwrap();
        assert_eq!(x.level_of().unwrap(), Level { p: 1, k: 0, m: 1 });
        let upper = UMat::from_rows(vec![
            vec![dg(1, 0, 0), dg(1, 0, 0)],
            vec![dg(0, 0, 0), dg(1, 0, 0)],
        ])
        .unwrap();
        assert_eq!(upper.level_of(), Err(MatrixError::NotUnitary));
    }

    #[test]
    fn level_ignores_identity_padding() {
        let k2 = UMat::two_level(2, &k_block(), 0, 1).unwrap();
        let k5 = UMat::two_level(5, &k_block(), 0, 1).unwrap();
        assert_eq!(k2.level_of().unwrap(), k5.level_of().unwrap());
    }

    #[test]
    fn level_order_is_lexicographic() {
        let a = Level { p: 1, k: 0, m: 5 };
        let b = Level { p: 2, k: 0, m: 0 };
        let c = Level { p: 2, k: 1, m: 0 };
        let d = Level { p: 2, k: 1, m: 2 };
        assert!(Level::ZERO < a && a < b && b < c && c < d);
    }

    #[test]
    fn odd_indices_examples() {
        let v = vec![dg(1, 0, 1), dg(1, 0, 1)];
        assert_eq!(odd_indices(&v, 1), vec![0, 1]);

        let e0 = vec![dg(1, 0, 0), dg(0, 0, 0)];
        assert_eq!(odd_indices(&e0, 0), vec![0]);

        let v4 = vec![dg(1, 0, 4), dg(-1, 2, 4), dg(-1, 2, 4), dg(-1, -2, 4)];
        assert_eq!(odd_indices(&v4, 4), vec![0, 1, 2, 3]);
    }

    #[test]
    fn products_of_unitaries_are_unitary() {
        let k = UMat::two_level(3, &k_block(), 0, 2).unwrap();
        let x = UMat::two_level(3, &x_block(), 1, 2).unwrap();
        let d = UMat::one_level(3, 1, dg(0, 1, 0)).unwrap();
        let mut m = UMat::identity(3);
        for factor in [&k, &x, &d, &k, &k, &x, &d] {
            m = factor.mul(&m).unwrap();
            assert!(m.is_unitary());
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = UMat::identity(2);
        let b = UMat::identity(3);
        assert_eq!(a.mul(&b), Err(MatrixError::DimensionMismatch(2, 3)));
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<UMat>();
        assert_send_sync::<Level>();
        assert_send_sync::<DyadicGauss>();
    }

    #[test]
    fn row_ops_match_embedded_multiplication() {
        let m = UMat::from_rows(vec![
            vec![dg(1, 0, 1), dg(1, 0, 1)],
            vec![dg(1, 0, 1), dg(-1, 0, 1)],
        ])
        .unwrap();
        let k = UMat::two_level(2, &k_block(), 0, 1).unwrap();
        let mut by_rows = m.clone();
        by_rows.k_rows(0, 1);
        assert_eq!(by_rows, k.mul(&m).unwrap());

        let mut by_rows = m.clone();
        by_rows.kd_rows(0, 1);
        assert_eq!(by_rows, k.dagger().mul(&m).unwrap());

        let mut by_rows = m.clone();
        by_rows.phase_row(0, 3);
        let i3 = UMat::one_level(2, 0, dg(0, -1, 0)).unwrap();
        assert_eq!(by_rows, i3.mul(&m).unwrap());
    }
}
