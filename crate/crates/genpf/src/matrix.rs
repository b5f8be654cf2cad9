//! Small dense rational matrices.
//!
//! Systems in this crate are tiny (tens of entries), so a row-major `Vec`
//! with exact rational entries is all the structure needed.

use num::traits::{Signed, Zero};

use crate::numeric::{rat_to_f64, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        for row in &rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    what: "matrix row",
                    expected: c,
                    got: row.len(),
                });
            }
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix-vector product with exact arithmetic.
    pub fn matvec(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                what: "matvec input",
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .fold(Rat::zero(), |acc, v| acc + v)
            })
            .collect())
    }

    /// New matrix keeping the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = RatMatrix::zero(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out.set(i, k, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(rat_to_f64).collect())
            .collect()
    }

    pub fn max_abs_entry(&self) -> Rat {
        self.data
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rat> {
        self.data.iter()
    }
}

/// Float matrix-vector product for the iterative kernels.
pub fn matvec_f64(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, rat_int};

    #[test]
    fn matvec_is_exact() {
        let m = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat_int(0)],
            vec![rat_int(1), rat(1, 3)],
        ])
        .unwrap();
        let y = m.matvec(&[rat_int(2), rat_int(3)]).unwrap();
        assert_eq!(y, vec![rat_int(1), rat_int(3)]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(RatMatrix::from_rows(vec![vec![rat_int(1)], vec![]]).is_err());
    }

    #[test]
    fn column_selection_reorders() {
        let m = RatMatrix::from_rows(vec![vec![rat_int(1), rat_int(2), rat_int(3)]]).unwrap();
        let s = m.select_columns(&[2, 0]);
        assert_eq!(s.get(0, 0), &rat_int(3));
        assert_eq!(s.get(0, 1), &rat_int(1));
    }
}
