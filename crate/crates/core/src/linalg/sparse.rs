//! Sparse vectors and fraction-free echelon forms over Q and Q[t].

use std::collections::BTreeMap;

use super::poly::UniPoly;

/// Sorted `(index, coefficient)` pairs with no stored zeros.
pub type SparseVec = Vec<(usize, UniPoly)>;

pub fn unit_vec(i: usize) -> SparseVec {
    vec![(i, UniPoly::one())]
}

pub fn from_dense(v: &[UniPoly]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn to_dense(v: &SparseVec, len: usize) -> Vec<UniPoly> {
    let mut out = vec![UniPoly::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

pub fn get(v: &SparseVec, i: usize) -> Option<&UniPoly> {
    v.binary_search_by_key(&i, |(j, _)| *j).ok().map(|k| &v[k].1)
}

pub fn scale(v: &SparseVec, c: &UniPoly) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x * c)).collect()
}

/// `x + c * y`.
pub fn axpy(x: &SparseVec, c: &UniPoly, y: &SparseVec) -> SparseVec {
    if c.is_zero() || y.is_empty() {
        return x.clone();
    }
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut a, mut b) = (0, 0);
    while a < x.len() || b < y.len() {
        let ia = x.get(a).map_or(usize::MAX, |e| e.0);
        let ib = y.get(b).map_or(usize::MAX, |e| e.0);
        if ia < ib {
            out.push(x[a].clone());
            a += 1;
        } else if ib < ia {
            out.push((ib, c * &y[b].1));
            b += 1;
        } else {
            let s = &x[a].1 + &(c * &y[b].1);
            if !s.is_zero() {
                out.push((ia, s));
            }
            a += 1;
            b += 1;
        }
    }
    out
}

pub fn add(x: &SparseVec, y: &SparseVec) -> SparseVec {
    axpy(x, &UniPoly::one(), y)
}

/// Linear combination `sum c_i v_i`.
pub fn combine(coeffs: &SparseVec, vectors: &[SparseVec]) -> SparseVec {
    let mut acc = Vec::new();
    for (i, c) in coeffs {
        acc = axpy(&acc, c, &vectors[*i]);
    }
    acc
}

fn lead(v: &SparseVec) -> usize {
    v[0].0
}

fn pivot_score(v: &SparseVec) -> (usize, usize) {
    (v[0].1.degree().unwrap_or(0), v.len())
}

/// Row-echelon form of a list of vectors, computed with unimodular
/// operations only (Euclidean steps for non-unit leading coefficients), so
/// the rows span the same R-module as the inputs.
#[derive(Debug, Clone)]
pub struct Echelon {
    ambient: usize,
    rows: Vec<SparseVec>,
    transform: Vec<SparseVec>,
    relations: Vec<SparseVec>,
    tracked: bool,
}

impl Echelon {
    pub fn new(ambient: usize, inputs: Vec<SparseVec>) -> Echelon {
        Self::build(ambient, inputs, false)
    }

    /// Same as [`Echelon::new`], additionally recording how each row is
    /// expressed through the inputs and a basis of the input relations.
    pub fn with_transform(ambient: usize, inputs: Vec<SparseVec>) -> Echelon {
        Self::build(ambient, inputs, true)
    }

    fn build(ambient: usize, inputs: Vec<SparseVec>, tracked: bool) -> Echelon {
        let mut buckets: BTreeMap<usize, Vec<(SparseVec, SparseVec)>> = BTreeMap::new();
        let mut relations = Vec::new();
        for (k, v) in inputs.into_iter().enumerate() {
            let tag = if tracked { unit_vec(k) } else { Vec::new() };
            if v.is_empty() {
                if tracked {
                    relations.push(tag);
                }
            } else {
                buckets.entry(lead(&v)).or_default().push((v, tag));
            }
        }
        let mut rows = Vec::new();
        let mut transform = Vec::new();
        while let Some((c, mut group)) = buckets.pop_first() {
            loop {
                let best = (0..group.len())
                    .min_by_key(|&k| pivot_score(&group[k].0))
                    .expect("bucket is never empty");
                let (prow, ptag) = group.swap_remove(best);
                let plead = prow[0].1.clone();
                let mut rest = Vec::new();
                for (row, tag) in group {
                    let (q, _) = row[0].1.div_rem(&plead);
                    let nq = -q;
                    let row = axpy(&row, &nq, &prow);
                    let tag = if tracked { axpy(&tag, &nq, &ptag) } else { tag };
                    if row.is_empty() {
                        if tracked {
                            relations.push(tag);
                        }
                    } else if lead(&row) == c {
                        rest.push((row, tag));
                    } else {
                        buckets.entry(lead(&row)).or_default().push((row, tag));
                    }
                }
                if rest.is_empty() {
                    rows.push(prow);
                    transform.push(ptag);
                    break;
                }
                rest.push((prow, ptag));
                group = rest;
            }
        }
        Echelon { ambient, rows, transform, relations, tracked }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Basis of the spanned module, leading indices strictly increasing.
    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<SparseVec> {
        self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(lead).collect()
    }

    /// Input combination producing each row.
    pub fn transform(&self) -> &[SparseVec] {
        assert!(self.tracked, "echelon built without transform tracking");
        &self.transform
    }

    /// Generators of the relation module `{c : sum c_k input_k = 0}`.
    pub fn relations(&self) -> &[SparseVec] {
        assert!(self.tracked, "echelon built without transform tracking");
        &self.relations
    }

    /// Coordinates of `v` in the row basis, or `None` if `v` is not in the
    /// R-span of the rows.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        let mut rem = v.clone();
        let mut coords = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            if rem.is_empty() {
                break;
            }
            let c = lead(row);
            if lead(&rem) < c {
                return None;
            }
            let Some(x) = get(&rem, c) else { continue };
            let y = x.exact_div(&row[0].1)?;
            rem = axpy(&rem, &-&y, row);
            coords.push((i, y));
        }
        rem.is_empty().then_some(coords)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.solve(v).is_some()
    }
}

/// Basis of `{x : sum_j x_j columns[j] = 0}` over the coefficient ring.
pub fn kernel(ambient: usize, columns: &[SparseVec]) -> Vec<SparseVec> {
    let e = Echelon::with_transform(ambient, columns.to_vec());
    e.relations
}

/// Rank over the fraction field.
pub fn rank(ambient: usize, columns: &[SparseVec]) -> usize {
    Echelon::new(ambient, columns.to_vec()).rank()
}

pub fn is_zero_vec(v: &SparseVec) -> bool {
    v.iter().all(|(_, x)| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::poly::UniPoly;

    fn p(s: &str) -> UniPoly {
        s.parse().unwrap()
    }

    #[test]
    fn euclidean_steps_keep_the_lattice() {
        // span{(t, 1), (t^2, 0)} over Q[t] contains (0, t) but not (0, 1)
        let a = vec![(0, p("t")), (1, p("1"))];
        let b = vec![(0, p("t^2"))];
        let e = Echelon::new(2, vec![a, b]);
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&vec![(1, p("t"))]));
        assert!(!e.contains(&vec![(1, p("1"))]));
    }

    #[test]
    fn relations_span_the_kernel() {
        let cols = vec![vec![(0, p("1"))], vec![(0, p("t"))], vec![(1, p("1"))]];
        let ker = kernel(2, &cols);
        assert_eq!(ker.len(), 1);
        let image = combine(&ker[0], &cols);
        assert!(image.is_empty());
        assert_eq!(get(&ker[0], 2), None);
    }

    #[test]
    fn transform_reproduces_rows() {
        let cols = vec![vec![(0, p("t")), (2, p("1"))], vec![(0, p("t+1"))], vec![(1, p("2"))]];
        let e = Echelon::with_transform(3, cols.clone());
        for (row, tag) in e.rows().iter().zip(e.transform()) {
            assert_eq!(&combine(tag, &cols), row);
        }
    }
}
