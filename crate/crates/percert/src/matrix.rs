//! Exact rational matrices with rank, reduced row echelon form, and
//! nullspace bases. No floating point anywhere; every elimination step is
//! fraction-exact.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>, // row-major
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let nrows = rows.len();
        RationalMatrix {
            rows: nrows,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    /// Bit-size proxy used for partial pivoting: smaller entries make
    /// cheaper pivots during exact elimination.
    fn entry_size(x: &BigRational) -> u64 {
        x.numer().bits() + x.denom().bits()
    }

    /// Reduces in place to reduced row echelon form; returns the pivot
    /// columns in order. The RREF is canonical, so downstream bases are
    /// deterministic regardless of pivot-row choice.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            // Pick the nonzero candidate with the smallest numerator/denominator.
            let pivot_row = (row..self.rows)
                .filter(|&r| !self.at(r, col).is_zero())
                .min_by_key(|&r| Self::entry_size(self.at(r, col)));
            let Some(p) = pivot_row else { continue };
            self.swap_rows(row, p);
            let inv = {
                let v = self.at(row, col).clone();
                Rational::one() / v
            };
            for c in col..self.cols {
                let v = self.at(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row || self.at(r, col).is_zero() {
                    continue;
                }
                let factor = self.at(r, col).clone();
                for c in col..self.cols {
                    let v = self.at(r, c) - &factor * self.at(row, c);
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Canonical nullspace basis read off the RREF: one vector per free
    /// column, with a 1 in the free coordinate.
    pub fn nullspace_basis(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut vec = vec![Rational::zero(); self.cols];
            vec[free] = Rational::one();
            for (row, &pcol) in pivots.iter().enumerate() {
                vec[pcol] = -m.at(row, free).clone();
            }
            basis.push(vec);
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_of_identity_and_singular() {
        assert_eq!(m(&[&[1, 0], &[0, 1]]).rank(), 2);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(RationalMatrix::zeros(3, 4).rank(), 0);
    }

    #[test]
    fn nullspace_vectors_are_in_the_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let basis = a.nullspace_basis();
        assert_eq!(basis.len(), 3 - a.rank());
        for v in &basis {
            for r in 0..a.rows() {
                let mut s = Rational::zero();
                for c in 0..a.cols() {
                    s += a.at(r, c) * &v[c];
                }
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn rank_plus_nullity_is_cols() {
        let a = m(&[&[2, -1, 0, 3], &[0, 0, 1, 1]]);
        assert_eq!(a.rank() + a.nullspace_basis().len(), a.cols());
    }

    #[test]
    fn rref_is_canonical_under_row_permutation() {
        let mut a = m(&[&[0, 1, 2], &[1, 1, 1], &[2, 0, 4]]);
        let mut b = m(&[&[2, 0, 4], &[0, 1, 2], &[1, 1, 1]]);
        a.rref_in_place();
        b.rref_in_place();
        assert_eq!(a, b);
    }
}
