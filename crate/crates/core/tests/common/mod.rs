#![allow(dead_code)]

use std::sync::Arc;

use courant::algebra::{degree_slice, operator_matrix, Element, GradedContext};
use courant::genexact::{from_three_form, DForm, LieAlgebroidModel};
use courant::linalg::rat;
use courant::model::change_frame;
use courant::{CoefficientRing, CourantModel, Rational, UniPoly};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

pub fn q(n: i64) -> Rational {
    rat(n, 1)
}

pub fn poly(c: &[i64]) -> UniPoly {
    UniPoly::from_coeffs(c.iter().map(|&x| q(x)).collect())
}

/// Rank over ℚ by plain Gaussian elimination.
pub fn rank_q(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for j in c..cols {
                    let v = &rows[rank][j] * &f;
                    rows[i][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Chevalley–Eilenberg Betti numbers from `[X_i,X_j] = f_ij^k X_k` (0-based,
/// `i < j`), using bitmask wedge monomials and `d e^k = -Σ_{i<j} f_ij^k e^i e^j`.
pub fn ce_betti(dim: usize, f: &[(usize, usize, usize, Rational)]) -> Vec<usize> {
    let masks = |k: usize| -> Vec<u32> { (0u32..1 << dim).filter(|m| m.count_ones() as usize == k).collect() };
    let wedge_sign = |mask: u32, i: usize| -> Option<bool> {
        // e^i ∧ e^mask: sign from moving e^i past lower indices
        if mask & (1 << i) != 0 {
            return None;
        }
        Some((mask & ((1 << i) - 1)).count_ones() % 2 == 1)
    };
    // d(e^{m}) by the derivation rule, for each basis monomial
    let d = |mask: u32| -> Vec<(u32, Rational)> {
        let mut out: Vec<(u32, Rational)> = Vec::new();
        let idx: Vec<usize> = (0..dim).filter(|&i| mask & (1 << i) != 0).collect();
        for (pos, &k) in idx.iter().enumerate() {
            let rest = mask & !(1 << k);
            for (i, j, kk, c) in f {
                if *kk != k {
                    continue;
                }
                // −c e^i e^j in slot pos, then the remaining factors
                let mut sign = pos % 2 == 1;
                sign ^= true;
                let Some(s1) = wedge_sign(rest, *j) else { continue };
                let m1 = rest | (1 << j);
                let Some(s2) = wedge_sign(m1, *i) else { continue };
                sign ^= s1 ^ s2;
                let m2 = m1 | (1 << i);
                let v = if sign { -c.clone() } else { c.clone() };
                match out.iter_mut().find(|(m, _)| *m == m2) {
                    Some(e) => e.1 += v,
                    None => out.push((m2, v)),
                }
            }
        }
        out
    };
    let ranks: Vec<usize> = (0..=dim)
        .map(|k| {
            let target = masks(k + 1);
            let rows: Vec<Vec<Rational>> = masks(k)
                .into_iter()
                .map(|m| {
                    let mut row = vec![Rational::zero(); target.len()];
                    for (mm, v) in d(m) {
                        let pos = target.iter().position(|&x| x == mm).expect("degree k+1");
                        row[pos] += v;
                    }
                    row
                })
                .collect();
            if target.is_empty() {
                0
            } else {
                rank_q(rows)
            }
        })
        .collect();
    (0..=dim).map(|k| binomial(dim, k) - ranks[k] - if k == 0 { 0 } else { ranks[k - 1] }).collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        0
    } else {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
}

fn dense_at(m: &courant::ExactMatrix, t: &Rational) -> Vec<Vec<Rational>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).eval(t)).collect()).collect()
}

/// Free ranks of `H^n(A, Q)` from dense matrices: rank over `ℚ(t)` is the
/// maximum of the ranks at a handful of rational points.
pub fn brute_force_free_ranks(model: &CourantModel, nmax: u32) -> Vec<usize> {
    let ctx = model.context();
    let points: Vec<Rational> = [0, 1, -1, 2, 3, 7].iter().map(|&x| q(x)).collect();
    let rank_of = |n: u32| -> usize {
        let m = operator_matrix(ctx, |x| model.q(x), n, 1).expect("homogeneous");
        if m.rows() == 0 || m.cols() == 0 {
            return 0;
        }
        points.iter().map(|t| rank_q(dense_at(&m, t))).max().unwrap_or(0)
    };
    let ranks: Vec<usize> = (0..=nmax).map(rank_of).collect();
    (0..=nmax as usize)
        .map(|n| degree_slice(ctx, n as u32).len() - ranks[n] - if n == 0 { 0 } else { ranks[n - 1] })
        .collect()
}

pub fn identity(r: usize) -> Vec<Vec<Rational>> {
    (0..r).map(|i| (0..r).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

/// Four small Lie algebras: ℝ³, su(2), heis₃ × ℝ, aff(1) × ℝ².
pub fn lie_algebra(kind: usize, transverse: bool) -> LieAlgebroidModel {
    let one = Rational::one;
    match kind % 4 {
        0 => LieAlgebroidModel::abelian(3, transverse),
        1 => LieAlgebroidModel::su2(transverse),
        2 => LieAlgebroidModel::new(4, transverse, [(0, 1, 2, one())]).expect("Jacobi"),
        _ => LieAlgebroidModel::new(4, transverse, [(0, 1, 1, one())]).expect("Jacobi"),
    }
}

/// Basis of closed invariant 3-forms.
pub fn closed_three_forms(d: &LieAlgebroidModel) -> Vec<DForm> {
    let dim = d.dim();
    let cols = d.differential_columns(3);
    let out_dim = binomial(dim, 4);
    courant::linalg::sparse::kernel(out_dim, &cols).iter().map(|v| DForm::from_vector(dim, 3, v)).collect()
}

pub fn closed_form(d: &LieAlgebroidModel, coeffs: &[(i64, i64)]) -> DForm {
    let basis = closed_three_forms(d);
    let mut c = DForm::zero(d.dim(), 3);
    for (w, (a, b)) in basis.iter().zip(coeffs) {
        let coef = if d.has_transverse() { poly(&[*a, *b]) } else { poly(&[*a]) };
        c = c.add(&w.scale(&coef)).expect("same shape");
    }
    c
}

pub fn random_two_form(dim: usize, coeffs: &[(i64, i64)], transverse: bool) -> DForm {
    let pairs: Vec<Vec<usize>> = (0..dim).flat_map(|i| (i + 1..dim).map(move |j| vec![i, j])).collect();
    DForm::from_components(
        dim,
        2,
        pairs.into_iter().zip(coeffs).map(|(p, (a, b))| (p, if transverse { poly(&[*a, *b]) } else { poly(&[*a]) })),
    )
    .expect("valid 2-form")
}

/// Unit lower-triangular matrix times a permutation.
pub fn frame_change(r: usize, lower: &[i64], perm_seed: usize) -> Vec<Vec<Rational>> {
    let mut p = identity(r);
    let mut k = 0;
    for i in 0..r {
        for j in 0..i {
            p[i][j] = q(lower[k % lower.len()]);
            k += 1;
        }
    }
    let shift = perm_seed % r;
    (0..r).map(|i| p[(i + shift) % r].clone()).collect()
}

/// Generalized exact model with random closed `C`, optionally in a random frame.
#[derive(Debug, Clone)]
pub struct GenExactSeed {
    pub kind: usize,
    pub transverse: bool,
    pub c: Vec<(i64, i64)>,
    pub b: Vec<(i64, i64)>,
    pub lower: Vec<i64>,
    pub perm: usize,
}

pub fn arb_genexact_seed() -> impl Strategy<Value = GenExactSeed> {
    (
        0usize..4,
        any::<bool>(),
        prop::collection::vec((-2i64..=2, -1i64..=1), 4),
        prop::collection::vec((-2i64..=2, -1i64..=1), 6),
        prop::collection::vec(-1i64..=1, 28),
        0usize..8,
    )
        .prop_map(|(kind, transverse, c, b, lower, perm)| GenExactSeed { kind, transverse, c, b, lower, perm })
}

impl GenExactSeed {
    pub fn algebroid(&self) -> LieAlgebroidModel {
        lie_algebra(self.kind, self.transverse)
    }

    pub fn model(&self) -> CourantModel {
        let d = self.algebroid();
        from_three_form(&d, &closed_form(&d, &self.c)).expect("closed")
    }

    pub fn b_field(&self) -> DForm {
        let d = self.algebroid();
        random_two_form(d.dim(), &self.b, self.transverse)
    }

    pub fn rotated(&self) -> CourantModel {
        let m = self.model();
        change_frame(&m, &frame_change(m.fiber_rank(), &self.lower, self.perm)).expect("invertible")
    }
}

/// Random model with `ρ = 0`: random metric and sparse random `C`; usually
/// not a Courant algebroid.
#[derive(Debug, Clone)]
pub struct FreeSeed {
    pub r: usize,
    pub diag: Vec<i64>,
    pub upper: Vec<i64>,
    pub c: Vec<(usize, i64, i64)>,
    pub polynomial: bool,
}

pub fn arb_free_seed() -> impl Strategy<Value = FreeSeed> {
    (
        2usize..=5,
        prop::collection::vec(prop::sample::select(vec![-2i64, -1, 1, 2]), 5),
        prop::collection::vec(-1i64..=1, 10),
        prop::collection::vec((0usize..10, -2i64..=2, -1i64..=1), 0..4),
        any::<bool>(),
    )
        .prop_map(|(r, diag, upper, c, polynomial)| FreeSeed { r, diag, upper, c, polynomial })
}

impl FreeSeed {
    pub fn model(&self) -> CourantModel {
        let r = self.r;
        // g = Uᵀ D U with U unit upper triangular
        let mut u = identity(r);
        let mut k = 0;
        for i in 0..r {
            for j in i + 1..r {
                u[i][j] = q(self.upper[k % self.upper.len()]);
                k += 1;
            }
        }
        let g: Vec<Vec<Rational>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| (0..r).fold(Rational::zero(), |acc, m| acc + &u[m][i] * q(self.diag[m]) * &u[m][j]))
                    .collect()
            })
            .collect();
        let triples: Vec<[usize; 3]> =
            (0..r).flat_map(|a| (a + 1..r).flat_map(move |b| (b + 1..r).map(move |c| [a, b, c]))).collect();
        let mut structure = std::collections::BTreeMap::new();
        if !triples.is_empty() {
            for (i, a, b) in &self.c {
                let value = if self.polynomial { poly(&[*a, *b]) } else { poly(&[*a]) };
                structure.insert(triples[i % triples.len()], value);
            }
        }
        let ring = if self.polynomial { CoefficientRing::Polynomials } else { CoefficientRing::Rationals };
        CourantModel::new("random", ring, g, Vec::new(), false, structure).expect("valid model")
    }
}

/// Random homogeneous element of degree `n` built from `(index, c0, c1)`
/// seeds over the slice.
pub fn element_from(ctx: &Arc<GradedContext>, n: u32, seeds: &[(usize, i64, i64)]) -> Element {
    let slice = degree_slice(ctx, n);
    if slice.is_empty() {
        return Element::zero(ctx);
    }
    let polynomial = ctx.ring() == CoefficientRing::Polynomials;
    Element::from_terms(
        ctx,
        seeds
            .iter()
            .map(|(i, a, b)| (slice[i % slice.len()].clone(), if polynomial { poly(&[*a, *b]) } else { poly(&[*a]) }))
            .collect::<Vec<_>>(),
    )
}

pub fn arb_terms() -> impl Strategy<Value = Vec<(usize, i64, i64)>> {
    prop::collection::vec((0usize..500, -3i64..=3, -1i64..=1), 1..4)
}

pub fn sign(neg: bool) -> Rational {
    if neg {
        -Rational::one()
    } else {
        Rational::one()
    }
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}
