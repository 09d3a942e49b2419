//! Smith normal form over Q[t].

use super::matrix::{CoefficientRing, ExactMatrix};
use super::poly::UniPoly;
use super::sparse::SparseVec;
use crate::error::{CourantError, Result};

type Dense = Vec<Vec<UniPoly>>;

fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { UniPoly::one() } else { UniPoly::zero() }).collect())
        .collect()
}

/// Row `dst += c * row src` on a dense matrix.
fn row_axpy(a: &mut Dense, dst: usize, c: &UniPoly, src: usize) {
    if c.is_zero() {
        return;
    }
    let (d, s) = if dst < src {
        let (lo, hi) = a.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x += &(c * y);
        }
    }
}

fn col_axpy(a: &mut Dense, dst: usize, c: &UniPoly, src: usize) {
    if c.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        if !row[src].is_zero() {
            let v = c * &row[src];
            row[dst] += &v;
        }
    }
}

fn col_swap(a: &mut Dense, i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Working state of a Smith reduction. Row operations are mirrored on `u`
/// (left transform) and inversely on `u_inv`; column operations on `v`.
pub(crate) struct SmithState {
    pub a: Dense,
    pub u: Option<Dense>,
    pub u_inv: Option<Dense>,
    pub v: Option<Dense>,
}

impl SmithState {
    pub fn new(a: Dense, cols: usize, track_u: bool, track_v: bool) -> Self {
        let n = a.len();
        SmithState {
            a,
            u: track_u.then(|| identity(n)),
            u_inv: track_u.then(|| identity(n)),
            v: track_v.then(|| identity(cols)),
        }
    }

    fn rows(&self) -> usize {
        self.a.len()
    }

    fn cols(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    /// row dst += c * row src
    fn add_row(&mut self, dst: usize, c: &UniPoly, src: usize) {
        row_axpy(&mut self.a, dst, c, src);
        if let Some(u) = self.u.as_mut() {
            row_axpy(u, dst, c, src);
        }
        if let Some(ui) = self.u_inv.as_mut() {
            col_axpy(ui, src, &-c, dst);
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = self.u.as_mut() {
            u.swap(i, j);
        }
        if let Some(ui) = self.u_inv.as_mut() {
            col_swap(ui, i, j);
        }
    }

    fn scale_row(&mut self, i: usize, c: &UniPoly) {
        let inv = c.inverse().expect("scaling by a unit");
        for x in self.a[i].iter_mut() {
            *x = &*x * c;
        }
        if let Some(u) = self.u.as_mut() {
            for x in u[i].iter_mut() {
                *x = &*x * c;
            }
        }
        if let Some(ui) = self.u_inv.as_mut() {
            for row in ui.iter_mut() {
                row[i] = &row[i] * &inv;
            }
        }
    }

    fn add_col(&mut self, dst: usize, c: &UniPoly, src: usize) {
        col_axpy(&mut self.a, dst, c, src);
        if let Some(v) = self.v.as_mut() {
            col_axpy(v, dst, c, src);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        col_swap(&mut self.a, i, j);
        if let Some(v) = self.v.as_mut() {
            col_swap(v, i, j);
        }
    }

    /// Reduces to diagonal form with a monic divisibility chain; returns the
    /// nonzero diagonal entries.
    pub fn reduce(&mut self) -> Vec<UniPoly> {
        let (m, n) = (self.rows(), self.cols());
        let mut diag = Vec::new();
        for s in 0..m.min(n) {
            // pivot: minimal degree, ties by smallest (row, col)
            let mut best: Option<(usize, usize, usize)> = None;
            for i in s..m {
                for j in s..n {
                    if let Some(d) = self.a[i][j].degree() {
                        if best.map_or(true, |(bd, _, _)| d < bd) {
                            best = Some((d, i, j));
                        }
                    }
                }
                if matches!(best, Some((0, _, _))) {
                    break;
                }
            }
            let Some((_, pi, pj)) = best else { break };
            self.swap_rows(s, pi);
            self.swap_cols(s, pj);
            loop {
                let mut restart = false;
                for i in s + 1..m {
                    if self.a[i][s].is_zero() {
                        continue;
                    }
                    let (q, r) = self.a[i][s].div_rem(&self.a[s][s]);
                    self.add_row(i, &-q, s);
                    if !r.is_zero() {
                        self.swap_rows(i, s);
                        restart = true;
                        break;
                    }
                }
                if restart {
                    continue;
                }
                for j in s + 1..n {
                    if self.a[s][j].is_zero() {
                        continue;
                    }
                    let (q, r) = self.a[s][j].div_rem(&self.a[s][s]);
                    self.add_col(j, &-q, s);
                    if !r.is_zero() {
                        self.swap_cols(j, s);
                        restart = true;
                        break;
                    }
                }
                if restart {
                    continue;
                }
                let p = self.a[s][s].clone();
                let offender = if p.is_unit() {
                    None
                } else {
                    (s + 1..m).find(|&i| (s + 1..n).any(|j| !p.divides(&self.a[i][j])))
                };
                match offender {
                    Some(i) => self.add_row(s, &UniPoly::one(), i),
                    None => break,
                }
            }
            let lead = self.a[s][s].leading().expect("pivot is nonzero").clone();
            if !num_traits::One::is_one(&lead) {
                self.scale_row(s, &UniPoly::constant(lead.recip()));
            }
            diag.push(self.a[s][s].clone());
        }
        diag
    }
}

fn to_dense(m: &ExactMatrix) -> Dense {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn from_dense(ring: CoefficientRing, rows: usize, cols: usize, a: Dense) -> ExactMatrix {
    ExactMatrix::new(ring, rows, cols, a.into_iter().flatten().collect()).expect("shape preserved")
}

/// `U m V = D` with `U`, `V` unimodular and `D` diagonal, monic, and a
/// divisibility chain.
pub fn smith_normal_form(m: &ExactMatrix) -> Result<(ExactMatrix, ExactMatrix, ExactMatrix)> {
    if m.ring() != CoefficientRing::Polynomials {
        return Err(CourantError::RingMismatch(format!(
            "Smith normal form expects a matrix over Q[t], found {}",
            m.ring()
        )));
    }
    let (r, c) = (m.rows(), m.cols());
    let mut st = SmithState::new(to_dense(m), c, true, true);
    st.reduce();
    let ring = CoefficientRing::Polynomials;
    let d = from_dense(ring, r, c, st.a);
    let u = from_dense(ring, r, r, st.u.unwrap());
    let v = from_dense(ring, c, c, st.v.unwrap());
    Ok((u, d, v))
}

/// Nonzero invariant factors (monic, divisibility chain) of the matrix with
/// the given sparse columns. Unit pivots are eliminated sparsely first; only
/// the residual block goes through the dense Smith reduction.
pub fn invariant_factors(rows: usize, columns: &[SparseVec]) -> Vec<UniPoly> {
    let mut cols: Vec<SparseVec> = columns.iter().filter(|c| !c.is_empty()).cloned().collect();
    let mut units = 0;
    let mut alive_rows = vec![true; rows];
    loop {
        // sparse unit pivot with the fewest entries in its column
        let mut pick: Option<(usize, usize, usize)> = None;
        for (j, col) in cols.iter().enumerate() {
            if pick.map_or(false, |(len, _, _)| col.len() >= len) {
                continue;
            }
            if let Some(k) = col.iter().position(|(_, x)| x.is_unit()) {
                pick = Some((col.len(), j, k));
            }
        }
        let Some((_, pj, pk)) = pick else { break };
        let pivot_col = cols.swap_remove(pj);
        let (prow, pval) = pivot_col[pk].clone();
        let pinv = pval.inverse().expect("unit");
        // column operations clear row `prow` in every other column
        for col in cols.iter_mut() {
            if let Some(x) = super::sparse::get(col, prow) {
                let f = -(x * &pinv);
                *col = super::sparse::axpy(col, &f, &pivot_col);
            }
        }
        alive_rows[prow] = false;
        cols.retain(|c| !c.is_empty());
        units += 1;
    }
    let row_index: Vec<usize> = (0..rows).filter(|&i| alive_rows[i]).collect();
    let mut pos = vec![usize::MAX; rows];
    for (k, &i) in row_index.iter().enumerate() {
        pos[i] = k;
    }
    let mut dense: Dense = vec![vec![UniPoly::zero(); cols.len()]; row_index.len()];
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col {
            dense[pos[*i]][j] = x.clone();
        }
    }
    let ncols = cols.len();
    let mut st = SmithState::new(dense, ncols, false, false);
    let rest = st.reduce();
    let mut out = vec![UniPoly::one(); units];
    out.extend(rest);
    out
}
