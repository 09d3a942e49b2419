use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{Rational, UniPoly};
use crate::error::{CourantError, Result};

/// Coefficient ring tag: the rationals or univariate polynomials over them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoefficientRing {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "Q[t]")]
    Polynomials,
}

impl CoefficientRing {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientRing::Rationals => "Q",
            CoefficientRing::Polynomials => "Q[t]",
        }
    }

    /// Whether `x` is a legal element of this ring.
    pub fn admits(self, x: &UniPoly) -> bool {
        match self {
            CoefficientRing::Rationals => x.is_constant(),
            CoefficientRing::Polynomials => true,
        }
    }

    /// The smallest ring containing both.
    pub fn join(self, other: CoefficientRing) -> CoefficientRing {
        self.max(other)
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dense row-major matrix over a coefficient ring.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    ring: CoefficientRing,
    rows: usize,
    cols: usize,
    data: Vec<UniPoly>,
}

impl ExactMatrix {
    pub fn new(ring: CoefficientRing, rows: usize, cols: usize, data: Vec<UniPoly>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CourantError::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !ring.admits(x)) {
            return Err(CourantError::RingMismatch(format!(
                "entry {bad} is not an element of {ring}"
            )));
        }
        Ok(ExactMatrix { ring, rows, cols, data })
    }

    pub fn from_rows(ring: CoefficientRing, rows: Vec<Vec<UniPoly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CourantError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(ring, r, c, rows.into_iter().flatten().collect())
    }

    /// Integer-entry convenience constructor over Q.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let data = rows.iter().map(|r| r.iter().map(|&x| UniPoly::from_int(x)).collect()).collect();
        Self::from_rows(CoefficientRing::Rationals, data).expect("integer matrix is well formed")
    }

    pub fn zeros(ring: CoefficientRing, rows: usize, cols: usize) -> Self {
        ExactMatrix { ring, rows, cols, data: vec![UniPoly::zero(); rows * cols] }
    }

    pub fn identity(ring: CoefficientRing, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = UniPoly::one();
        }
        m
    }

    pub fn from_columns(ring: CoefficientRing, rows: usize, columns: &[Vec<UniPoly>]) -> Result<Self> {
        let mut m = Self::zeros(ring, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(CourantError::DimensionMismatch("column length".into()));
            }
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone())?;
            }
        }
        Ok(m)
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &UniPoly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: UniPoly) -> Result<()> {
        if !self.ring.admits(&x) {
            return Err(CourantError::RingMismatch(format!("entry {x} is not an element of {}", self.ring)));
        }
        self.data[i * self.cols + j] = x;
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[UniPoly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<UniPoly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<UniPoly>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(UniPoly::is_zero)
    }

    /// Promotes a Q-matrix to Q[t] (always legal).
    pub fn with_ring(mut self, ring: CoefficientRing) -> Result<Self> {
        if let Some(bad) = self.data.iter().find(|x| !ring.admits(x)) {
            return Err(CourantError::RingMismatch(format!("entry {bad} is not an element of {ring}")));
        }
        self.ring = ring;
        Ok(self)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != rhs.rows {
            return Err(CourantError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let ring = self.ring.join(rhs.ring);
        let mut out = Self::zeros(ring, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[UniPoly]) -> Vec<UniPoly> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = UniPoly::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    /// Fraction-free (Bareiss) determinant, exact over Q[t].
    pub fn determinant(&self) -> Result<UniPoly> {
        if self.rows != self.cols {
            return Err(CourantError::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(UniPoly::one());
        }
        let mut a: Vec<Vec<UniPoly>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = false;
        let mut prev = UniPoly::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = !sign;
                    }
                    None => return Ok(UniPoly::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if sign { -d } else { d })
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix[{}; {}x{}]", self.ring, self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Gaussian elimination over Q.
///
/// Returns the rank and a matrix whose columns form a basis of the kernel
/// `{v : m v = 0}` (one basis vector per free column of the reduced echelon
/// form, with a 1 in that free position).
pub fn row_reduce(m: &ExactMatrix) -> Result<(usize, ExactMatrix)> {
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut row = Vec::with_capacity(m.cols());
        for x in m.row(i) {
            match x.constant_value() {
                Some(c) => row.push(c),
                None => {
                    return Err(CourantError::RingMismatch(format!(
                        "row reduction requires rational entries, found {x}"
                    )))
                }
            }
        }
        a.push(row);
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let v = &f * &a[r][j];
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let rank = pivots.len();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut kernel = ExactMatrix::zeros(CoefficientRing::Rationals, cols, free.len());
    for (k, &f) in free.iter().enumerate() {
        kernel.data[f * free.len() + k] = UniPoly::one();
        for (i, &pc) in pivots.iter().enumerate() {
            let v = -a[i][f].clone();
            if !v.is_zero() {
                kernel.data[pc * free.len() + k] = UniPoly::constant(v);
            }
        }
    }
    Ok((rank, kernel))
}

/// Inverse of a square rational matrix, or `None` if singular.
pub fn rational_inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let v = &f * &a[c][j];
                    a[i][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
