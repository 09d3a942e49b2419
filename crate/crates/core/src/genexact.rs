//! Generalized exact Courant algebroids `E = D ⊕ D*` over a split base
//! `D ≅ TL × N`, built from invariant data on `L`.
//!
//! Index map. For `l = dim L` the frame of `E` is `e_I = X_I` (`I < l`)
//! followed by `e_{l+I} = e^I`, with hyperbolic metric and `ρ = [1 | 0]`. The
//! structure tensor is
//!
//! ```text
//! C_{I,J,K}   = C_IJK          ⟨[X_I,X_J],X_K⟩
//! C_{I,J,l+K} = f_IJ^K         ⟨[X_I,X_J],e^K⟩
//! ```
//!
//! and all remaining mixed components follow from antisymmetry. In these
//! coordinates `θ^I` (`I < l`) span the naive generators.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{CourantError, Result};
use crate::linalg::{
    invariant_factors, sparse, CoefficientRing, Echelon, ModulePresentation, Rational, SparseVec, Subquotient, UniPoly,
};
use crate::model::{increasing_tuples, CourantModel};

/// Invariant model of a Lie algebroid `D = TL × N`: structure constants
/// `f_IJ^K` of the frame `X_I` and whether `N` is a line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LieAlgebroidModel {
    dim: usize,
    transverse: bool,
    #[serde(skip)]
    f: Vec<Vec<Vec<Rational>>>,
}

impl LieAlgebroidModel {
    /// `entries` are `(I, J, K, f_IJ^K)`, 0-based; `f_JI^K` is implied.
    pub fn new(dim: usize, transverse: bool, entries: impl IntoIterator<Item = (usize, usize, usize, Rational)>) -> Result<Self> {
        let mut f = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for (i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(CourantError::DimensionMismatch(format!("structure constant ({i},{j},{k}) out of range for dim {dim}")));
            }
            if i == j {
                if !v.is_zero() {
                    return Err(CourantError::Antisymmetry(format!("f_{{{i}{i}}}^{k} must vanish")));
                }
                continue;
            }
            f[j][i][k] = -v.clone();
            f[i][j][k] = v;
        }
        let d = LieAlgebroidModel { dim, transverse, f };
        if let Some((i, j, k, n)) = d.jacobi_violation() {
            return Err(CourantError::JacobiViolation(format!(
                "cyclic sum over ({}, {}, {}) has nonzero component along X_{}",
                i + 1,
                j + 1,
                k + 1,
                n + 1
            )));
        }
        Ok(d)
    }

    pub fn abelian(dim: usize, transverse: bool) -> Self {
        LieAlgebroidModel { dim, transverse, f: vec![vec![vec![Rational::zero(); dim]; dim]; dim] }
    }

    /// `su(2)` with `[X_I, X_J] = ε_IJK X_K`.
    pub fn su2(transverse: bool) -> Self {
        let mut entries = Vec::new();
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            entries.push((i, j, k, Rational::one()));
        }
        Self::new(3, transverse, entries).expect("su(2) satisfies Jacobi")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_transverse(&self) -> bool {
        self.transverse
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.f[i][j][k]
    }

    /// Nonzero `f_IJ^K` with `I < J`.
    pub fn structure_entries(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in 0..self.dim {
                    if !self.f[i][j][k].is_zero() {
                        out.push((i, j, k, self.f[i][j][k].clone()));
                    }
                }
            }
        }
        out
    }

    fn jacobi_violation(&self) -> Option<(usize, usize, usize, usize)> {
        let l = self.dim;
        for i in 0..l {
            for j in i + 1..l {
                for k in j + 1..l {
                    for n in 0..l {
                        let mut acc = Rational::zero();
                        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                            for m in 0..l {
                                acc += &self.f[a][b][m] * &self.f[m][c][n];
                            }
                        }
                        if !acc.is_zero() {
                            return Some((i, j, k, n));
                        }
                    }
                }
            }
        }
        None
    }

    fn basis(&self, k: usize) -> Vec<Vec<usize>> {
        increasing_tuples(self.dim, k)
    }

    /// Sparse columns of `d: Λ^k → Λ^{k+1}` in the increasing-tuple bases.
    pub fn differential_columns(&self, k: usize) -> Vec<SparseVec> {
        let target = self.basis(k + 1);
        let index: BTreeMap<&Vec<usize>, usize> = target.iter().enumerate().map(|(i, t)| (t, i)).collect();
        self.basis(k)
            .into_iter()
            .map(|tuple| {
                let w = DForm::basis_form(self.dim, &tuple);
                let dw = d_lie_algebroid(self, &w);
                let mut v: SparseVec = dw.components.iter().map(|(t, c)| (index[t], c.clone())).collect();
                v.sort_by_key(|(i, _)| *i);
                v
            })
            .collect()
    }
}

/// An invariant `k`-form on `D`, stored by strictly increasing index tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DForm {
    dim: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, UniPoly>,
}

/// Sign of the sorting permutation, or `None` on a repeated index.
fn sort_indices(indices: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut v = indices.to_vec();
    let mut neg = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((neg, v))
}

impl DForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        DForm { dim, degree, components: BTreeMap::new() }
    }

    pub fn basis_form(dim: usize, indices: &[usize]) -> Self {
        let mut w = Self::zero(dim, indices.len());
        w.add_component(indices, &UniPoly::one());
        w
    }

    /// Builds a form from components given on arbitrary index orderings.
    pub fn from_components(dim: usize, degree: usize, entries: impl IntoIterator<Item = (Vec<usize>, UniPoly)>) -> Result<Self> {
        let mut w = Self::zero(dim, degree);
        for (idx, v) in entries {
            if idx.len() != degree || idx.iter().any(|&i| i >= dim) {
                return Err(CourantError::DimensionMismatch(format!("component {idx:?} for a {degree}-form on dim {dim}")));
            }
            if sort_indices(&idx).is_none() {
                if v.is_zero() {
                    continue;
                }
                return Err(CourantError::Antisymmetry(format!("component {idx:?} has a repeated index")));
            }
            w.add_component(&idx, &v);
        }
        Ok(w)
    }

    fn add_component(&mut self, indices: &[usize], v: &UniPoly) {
        let Some((neg, key)) = sort_indices(indices) else { return };
        let entry = self.components.entry(key.clone()).or_insert_with(UniPoly::zero);
        if neg {
            *entry -= v;
        } else {
            *entry += v;
        }
        if entry.is_zero() {
            self.components.remove(&key);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn component(&self, indices: &[usize]) -> UniPoly {
        match sort_indices(indices) {
            None => UniPoly::zero(),
            Some((neg, key)) => {
                let v = self.components.get(&key).cloned().unwrap_or_else(UniPoly::zero);
                if neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, UniPoly> {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn ring(&self) -> CoefficientRing {
        if self.components.values().all(UniPoly::is_constant) {
            CoefficientRing::Rationals
        } else {
            CoefficientRing::Polynomials
        }
    }

    fn check_shape(&self, other: &DForm) -> Result<()> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(CourantError::DimensionMismatch(format!(
                "{}-form on dim {} vs {}-form on dim {}",
                self.degree, self.dim, other.degree, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DForm) -> Result<DForm> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.components {
            out.add_component(k, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DForm) -> Result<DForm> {
        self.add(&other.scale(&-UniPoly::one()))
    }

    pub fn scale(&self, c: &UniPoly) -> DForm {
        let mut out = DForm::zero(self.dim, self.degree);
        for (k, v) in &self.components {
            out.add_component(k, &(v * c));
        }
        out
    }

    pub fn t_derivative(&self) -> DForm {
        let mut out = DForm::zero(self.dim, self.degree);
        for (k, v) in &self.components {
            out.add_component(k, &v.derivative());
        }
        out
    }

    pub fn wedge(&self, other: &DForm) -> Result<DForm> {
        if self.dim != other.dim {
            return Err(CourantError::DimensionMismatch(format!("forms on dim {} and {}", self.dim, other.dim)));
        }
        let mut out = DForm::zero(self.dim, self.degree + other.degree);
        for (a, x) in &self.components {
            for (b, y) in &other.components {
                let idx: Vec<usize> = a.iter().chain(b).copied().collect();
                out.add_component(&idx, &(x * y));
            }
        }
        Ok(out)
    }

    /// Coordinates in the increasing-tuple basis of `Λ^k`.
    pub fn to_vector(&self) -> SparseVec {
        let basis = increasing_tuples(self.dim, self.degree);
        basis
            .iter()
            .enumerate()
            .filter_map(|(i, t)| self.components.get(t).map(|v| (i, v.clone())))
            .collect()
    }

    pub fn from_vector(dim: usize, degree: usize, v: &SparseVec) -> DForm {
        let basis = increasing_tuples(dim, degree);
        let mut out = DForm::zero(dim, degree);
        for (i, c) in v {
            out.add_component(&basis[*i], c);
        }
        out
    }
}

/// Chevalley–Eilenberg differential
/// `(dω)(X_0,…,X_k) = Σ_{i<j} (−1)^{i+j} ω([X_i,X_j], X_0,…,X̂_i,…,X̂_j,…,X_k)`.
pub fn d_lie_algebroid(d: &LieAlgebroidModel, w: &DForm) -> DForm {
    let k = w.degree;
    let mut out = DForm::zero(d.dim, k + 1);
    if w.is_zero() {
        return out;
    }
    for tuple in increasing_tuples(d.dim, k + 1) {
        let mut value = UniPoly::zero();
        for i in 0..=k {
            for j in i + 1..=k {
                let rest: Vec<usize> =
                    tuple.iter().enumerate().filter(|&(n, _)| n != i && n != j).map(|(_, &x)| x).collect();
                for c in 0..d.dim {
                    let f = &d.f[tuple[i]][tuple[j]][c];
                    if f.is_zero() {
                        continue;
                    }
                    let mut idx = vec![c];
                    idx.extend(&rest);
                    let term = w.component(&idx).scale(f);
                    value = if (i + j) % 2 == 0 { value + term } else { value - term };
                }
            }
        }
        if !value.is_zero() {
            out.components.insert(tuple, value);
        }
    }
    out
}

/// The data a generalized exact model was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenExactData {
    pub algebroid: LieAlgebroidModel,
    pub three_form: DForm,
}

/// The model of `E = D ⊕ D*` with Ševera form `C`.
pub fn from_three_form(d: &LieAlgebroidModel, c: &DForm) -> Result<CourantModel> {
    if c.degree != 3 || c.dim != d.dim {
        return Err(CourantError::DimensionMismatch(format!("expected a 3-form on dim {}", d.dim)));
    }
    let dc = d_lie_algebroid(d, c);
    if !dc.is_zero() {
        return Err(CourantError::NotClosed(format!(
            "the three-form must satisfy d_D(C) = 0; component {:?} of d_D(C) is {}",
            dc.components.keys().next().expect("nonzero").iter().map(|i| i + 1).collect::<Vec<_>>(),
            dc.components.values().next().expect("nonzero")
        )));
    }
    let model = assemble(d, c, "generalized exact")?;
    Ok(model.with_genexact(GenExactData { algebroid: d.clone(), three_form: c.clone() }))
}

fn assemble(d: &LieAlgebroidModel, c: &DForm, name: &str) -> Result<CourantModel> {
    let l = d.dim;
    let r = 2 * l;
    let mut metric = vec![vec![Rational::zero(); r]; r];
    let mut anchor = vec![vec![Rational::zero(); r]; l];
    for i in 0..l {
        metric[i][l + i] = Rational::one();
        metric[l + i][i] = Rational::one();
        anchor[i][i] = Rational::one();
    }
    let mut structure: Vec<([usize; 3], UniPoly)> =
        c.components.iter().map(|(k, v)| ([k[0], k[1], k[2]], v.clone())).collect();
    for (i, j, k, v) in d.structure_entries() {
        structure.push(([i, j, l + k], UniPoly::constant(v)));
    }
    let ring = if d.transverse || c.ring() == CoefficientRing::Polynomials {
        CoefficientRing::Polynomials
    } else {
        CoefficientRing::Rationals
    };
    CourantModel::new(name, ring, metric, anchor, d.transverse, structure)
}

/// Builds the model without checking `dC = 0` (for exhibiting the failure of
/// the master equation).
pub fn from_three_form_unchecked(d: &LieAlgebroidModel, c: &DForm) -> Result<CourantModel> {
    assemble(d, c, "generalized exact (unchecked)")
}

fn genexact_data(model: &CourantModel) -> Result<&GenExactData> {
    model.genexact().ok_or(CourantError::NotGeneralizedExact)
}

/// Changes the isotropic splitting by `B`: `C ↦ C + d_D B`.
pub fn b_field_transform(model: &CourantModel, b: &DForm) -> Result<CourantModel> {
    let data = genexact_data(model)?;
    if b.degree != 2 {
        return Err(CourantError::DimensionMismatch(format!("B must be a 2-form, got degree {}", b.degree)));
    }
    let c = data.three_form.add(&d_lie_algebroid(&data.algebroid, b))?;
    Ok(from_three_form(&data.algebroid, &c)?.renamed(model.name()))
}

/// Whether `C₁ − C₂` is exact.
pub fn severa_class_equal(m1: &CourantModel, m2: &CourantModel) -> Result<bool> {
    let (a, b) = (genexact_data(m1)?, genexact_data(m2)?);
    if a.algebroid != b.algebroid {
        return Err(CourantError::MismatchedAlgebroid);
    }
    let diff = a.three_form.sub(&b.three_form)?;
    let d = &a.algebroid;
    let ambient = increasing_tuples(d.dim, 3).len();
    Ok(Echelon::new(ambient, d.differential_columns(2)).contains(&diff.to_vector()))
}

/// Invariant cohomology `H^k(L)` over `ℚ[t]`, with explicit generators.
pub fn ce_subquotient(d: &LieAlgebroidModel, k: usize) -> Result<Subquotient> {
    let dim = increasing_tuples(d.dim, k).len();
    let out_dim = increasing_tuples(d.dim, k + 1).len();
    let z = Echelon::new(dim, sparse::kernel(out_dim, &d.differential_columns(k)));
    let b = if k == 0 { Vec::new() } else { d.differential_columns(k - 1) };
    Subquotient::from_echelon(z, &b)
}

/// Generator `g` of `Ann = {g ∂_t : [(g∂_t) C] = 0 in H³_naive}`; `0` means the
/// zero submodule, a unit means all of `𝔛(N)`.
pub fn annihilator(model: &CourantModel) -> Result<UniPoly> {
    let data = genexact_data(model)?;
    if !data.algebroid.transverse {
        return Err(CourantError::NoTransverseDirection);
    }
    let t3 = transgression_from_form(model)?;
    let naive = crate::cohomology::NaiveComplex::new(model, 3)?;
    let moduli = naive.subquotient(3)?.moduli();
    let column: Vec<UniPoly> = (0..t3.rows()).map(|i| t3.get(i, 0).clone()).collect();
    Ok(annihilator_of(&column, &moduli))
}

/// Annihilator generator of an element of `⊕ R/(m_i)` (`m_i = 0` for free summands).
pub fn annihilator_of(coords: &[UniPoly], moduli: &[UniPoly]) -> UniPoly {
    let mut g = UniPoly::one();
    for (v, m) in coords.iter().zip(moduli) {
        if v.is_zero() {
            continue;
        }
        if m.is_zero() {
            return UniPoly::zero();
        }
        g = g.lcm(&m.exact_div(&m.gcd(v)).expect("gcd divides"));
    }
    g
}

/// `∂_t ↦ [∂_t C]` in `H³_naive`, computed inside the naive complex.
pub fn transgression_from_form(model: &CourantModel) -> Result<crate::linalg::ExactMatrix> {
    let data = genexact_data(model)?;
    let naive = crate::cohomology::NaiveComplex::new(model, 3)?;
    let h3 = naive.subquotient(3)?;
    let ring = CoefficientRing::Polynomials;
    if !data.algebroid.transverse {
        return crate::linalg::ExactMatrix::new(ring, h3.len(), 0, Vec::new());
    }
    let ctx = naive.model().context();
    let dc = data.three_form.t_derivative();
    let mut form = crate::algebra::Element::zero(ctx);
    for (idx, v) in dc.components() {
        form = &form + &crate::algebra::Element::product_of(ctx, idx, v.clone());
    }
    let column = naive.class_of(3, &h3, &form)?;
    crate::linalg::ExactMatrix::from_columns(ring, h3.len(), &[column])
}

/// Closed-form prediction
/// `H^n ≅ ⊕_{p+2q=n} (H^p(L)⊗R / [∂_t C]·H^{p−3}(L)) ⊗ S^q(Ann)`
/// computed from invariant cohomology of `L` only.
pub fn predict_standard_cohomology(model: &CourantModel, nmax: u32) -> Result<Vec<ModulePresentation>> {
    let data = genexact_data(model)?;
    let d = &data.algebroid;
    let l = d.dim;
    let ce: Vec<Subquotient> = (0..=l).map(|k| ce_subquotient(d, k)).collect::<Result<_>>()?;
    let dc = data.three_form.t_derivative();
    let class = if d.transverse && l >= 3 { ce[3].coordinates(&dc.to_vector())? } else { Vec::new() };
    let ann_zero = class.iter().any(|c| !c.is_zero());
    let quotient = |p: usize| -> Result<ModulePresentation> {
        if p > l {
            return Ok(ModulePresentation::zero());
        }
        let h = &ce[p];
        if p < 3 || !ann_zero {
            return Ok(h.presentation());
        }
        let rep = DForm::from_vector(l, 3, &combine_reps(&class, &ce[3].generators()));
        let images = ce[p - 3]
            .generators()
            .iter()
            .map(|g| {
                let w = rep.wedge(&DForm::from_vector(l, p - 3, g))?;
                Ok(sparse::from_dense(&h.coordinates(&w.to_vector())?))
            })
            .collect::<Result<Vec<_>>>()?;
        let factors = invariant_factors(h.len(), &images);
        let mut pres = h.presentation();
        pres.free_rank -= factors.len();
        pres.torsion.extend(factors.into_iter().filter(|f| !f.is_unit()));
        pres.torsion = crate::linalg::normalize_torsion(pres.torsion);
        Ok(pres)
    };
    let mp: Vec<ModulePresentation> = (0..=nmax as usize).map(quotient).collect::<Result<_>>()?;
    Ok((0..=nmax as usize)
        .map(|n| {
            let mut total = ModulePresentation::zero();
            for q in 0..=n / 2 {
                let sym_nonzero = q == 0 || (d.transverse && !ann_zero);
                if sym_nonzero {
                    total = total.direct_sum(&mp[n - 2 * q]);
                }
            }
            total
        })
        .collect())
}

fn combine_reps(coords: &[UniPoly], gens: &[SparseVec]) -> SparseVec {
    coords.iter().zip(gens).fold(Vec::new(), |acc, (c, g)| sparse::axpy(&acc, c, g))
}
