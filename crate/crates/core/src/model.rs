//! Courant algebroid data `(g, ρ, C)`, its Hamiltonian and the derived
//! operations.
//!
//! Conventions. The odd coordinate `θ^a` is dual to the frame section `e_a`;
//! the section `e_b` is represented by the function `e_b♭ = g_bc θ^c`, so that
//! `{e_b♭, F} = ∂⃗F/∂θ^b`. The Hamiltonian is
//!
//! ```text
//! H = ρ^I_a p_I θ^a − (1/6) C_abc θ^a θ^b θ^c
//! ```
//!
//! and with this sign the derived bracket `[φ,ψ] = {{H,φ},ψ}` satisfies
//! `⟨[e_a,e_b],e_c⟩ = C_abc`. Forms are evaluated by left contraction,
//! `⟨F, ψ_1∧…∧ψ_n⟩ = {ψ_n,…{ψ_1,F}…}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{Element, GradedContext, Monomial};
use crate::error::{CourantError, Result};
use crate::genexact::GenExactData;
use crate::linalg::{rational_inverse, row_reduce, CoefficientRing, ExactMatrix, Rational, UniPoly};

/// A candidate Courant algebroid in an invariant coordinate model.
#[derive(Debug, Clone)]
pub struct CourantModel {
    name: String,
    ring: CoefficientRing,
    metric: Vec<Vec<Rational>>,
    inverse_metric: Vec<Vec<Rational>>,
    anchor: Vec<Vec<Rational>>,
    transverse: bool,
    structure: BTreeMap<[usize; 3], UniPoly>,
    genexact: Option<GenExactData>,
    ctx: Arc<GradedContext>,
    hamiltonian: Element,
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn transpose(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Sign of the permutation sorting three distinct indices, with the sorted triple.
pub(crate) fn sort3(a: usize, b: usize, c: usize) -> Option<(bool, [usize; 3])> {
    if a == b || b == c || a == c {
        return None;
    }
    let mut v = [a, b, c];
    let mut neg = false;
    for i in 0..3 {
        for j in 0..2 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                neg = !neg;
            }
        }
    }
    Some((neg, v))
}

impl CourantModel {
    /// Builds and validates a model. `structure` lists the independent
    /// components `C_abc` with `a < b < c` (0-based).
    pub fn new(
        name: impl Into<String>,
        ring: CoefficientRing,
        metric: Vec<Vec<Rational>>,
        anchor: Vec<Vec<Rational>>,
        transverse: bool,
        structure: impl IntoIterator<Item = ([usize; 3], UniPoly)>,
    ) -> Result<Self> {
        let r = metric.len();
        if metric.iter().any(|row| row.len() != r) {
            return Err(CourantError::DimensionMismatch("metric must be square".into()));
        }
        if anchor.iter().any(|row| row.len() != r) {
            return Err(CourantError::DimensionMismatch(format!("anchor rows must have length {r}")));
        }
        for a in 0..r {
            for b in 0..a {
                if metric[a][b] != metric[b][a] {
                    return Err(CourantError::AsymmetricMetric);
                }
            }
        }
        let inverse_metric = rational_inverse(&metric).ok_or(CourantError::SingularMetric)?;
        let mut entries = BTreeMap::new();
        for (idx, value) in structure {
            let [a, b, c] = idx;
            if !(a < b && b < c) {
                return Err(CourantError::Antisymmetry(format!(
                    "indices {:?} must be strictly increasing",
                    [a + 1, b + 1, c + 1]
                )));
            }
            if c >= r {
                return Err(CourantError::DimensionMismatch(format!("structure index {} exceeds fiber rank {r}", c + 1)));
            }
            if !ring.admits(&value) {
                return Err(CourantError::RingMismatch(format!("structure value {value} is not an element of {ring}")));
            }
            if entries.contains_key(&idx) {
                return Err(CourantError::Antisymmetry(format!("component {:?} given twice", [a + 1, b + 1, c + 1])));
            }
            if !value.is_zero() {
                entries.insert(idx, value);
            }
        }
        let rgr = mat_mul(&mat_mul(&anchor, &inverse_metric), &transpose(&anchor, r));
        if rgr.iter().flatten().any(|x| !x.is_zero()) {
            return Err(CourantError::AnchorNotIsotropic);
        }
        let lie = infer_lie_constants(&anchor, &inverse_metric, &entries)?;
        let l = anchor.len();
        let ctx = Arc::new(GradedContext::new(
            ring,
            (1..=r).map(|i| format!("xi{i}")).collect(),
            inverse_metric.clone(),
            (1..=l).map(|i| format!("p{i}")).collect(),
            lie,
            transverse,
        )?);
        let hamiltonian = build_hamiltonian(&ctx, &anchor, &entries);
        Ok(CourantModel {
            name: name.into(),
            ring,
            metric,
            inverse_metric,
            anchor,
            transverse,
            structure: entries,
            genexact: None,
            ctx,
            hamiltonian,
        })
    }

    pub(crate) fn with_genexact(mut self, data: GenExactData) -> Self {
        self.genexact = Some(data);
        self
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn fiber_rank(&self) -> usize {
        self.metric.len()
    }

    pub fn anchor_rank(&self) -> usize {
        self.anchor.len()
    }

    pub fn transverse_count(&self) -> usize {
        self.transverse as usize
    }

    pub fn metric(&self) -> &[Vec<Rational>] {
        &self.metric
    }

    pub fn inverse_metric(&self) -> &[Vec<Rational>] {
        &self.inverse_metric
    }

    pub fn anchor(&self) -> &[Vec<Rational>] {
        &self.anchor
    }

    pub fn genexact(&self) -> Option<&GenExactData> {
        self.genexact.as_ref()
    }

    /// Independent components `C_abc`, `a < b < c`.
    pub fn structure_entries(&self) -> &BTreeMap<[usize; 3], UniPoly> {
        &self.structure
    }

    /// `C_abc` for arbitrary indices, using total antisymmetry.
    pub fn structure(&self, a: usize, b: usize, c: usize) -> UniPoly {
        match sort3(a, b, c) {
            None => UniPoly::zero(),
            Some((neg, idx)) => {
                let v = self.structure.get(&idx).cloned().unwrap_or_else(UniPoly::zero);
                if neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// The graded context of the model (buildContext).
    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn hamiltonian(&self) -> &Element {
        &self.hamiltonian
    }

    /// `{H, H}`; the model is a Courant algebroid iff this vanishes.
    pub fn master_equation(&self) -> Element {
        self.hamiltonian.poisson_bracket(&self.hamiltonian).expect("same context")
    }

    pub fn is_courant(&self) -> bool {
        self.master_equation().is_zero()
    }

    fn require_courant(&self) -> Result<()> {
        if self.is_courant() {
            Ok(())
        } else {
            Err(CourantError::MasterEquationFailed)
        }
    }

    /// `Q = {H, ·}`.
    pub fn q(&self, x: &Element) -> Element {
        self.hamiltonian.poisson_bracket(x).expect("same context")
    }

    pub fn odd(&self, a: usize) -> Element {
        Element::generator(&self.ctx, a)
    }

    /// The function `e_b♭ = g_bc θ^c` representing the frame section `e_b`.
    pub fn section(&self, b: usize) -> Element {
        let terms = (0..self.fiber_rank()).filter(|&c| !self.metric[b][c].is_zero()).map(|c| {
            let mut m = Monomial::one(self.ctx.len());
            m.0[c] = 1;
            (m, UniPoly::constant(self.metric[b][c].clone()))
        });
        Element::from_terms(&self.ctx, terms.collect::<Vec<_>>())
    }

    /// The pairing `⟨φ,ψ⟩ = {φ,ψ}` of two sections.
    pub fn pairing(&self, phi: &Element, psi: &Element) -> Result<Element> {
        phi.poisson_bracket(psi)
    }

    fn check_section(&self, x: &Element) -> Result<()> {
        let odd = self.ctx.odd_count();
        let ok = x.terms().keys().all(|m| {
            let e = m.exponents();
            e.iter().take(odd).map(|&v| v as u32).sum::<u32>() == 1 && e[odd..].iter().all(|&v| v == 0)
        });
        if ok {
            Ok(())
        } else {
            Err(CourantError::NotSection)
        }
    }

    /// `[φ,ψ] = {{H,φ},ψ}` without checking the master equation.
    pub fn derived_bracket_unchecked(&self, phi: &Element, psi: &Element) -> Result<Element> {
        self.q(phi).poisson_bracket(psi)
    }

    /// The derived bracket of two sections.
    pub fn derived_bracket(&self, phi: &Element, psi: &Element) -> Result<Element> {
        self.require_courant()?;
        self.check_section(phi)?;
        self.check_section(psi)?;
        self.derived_bracket_unchecked(phi, psi)
    }

    /// `ρ(ψ) f = {{ψ,H}, f}` on a coefficient function.
    pub fn anchor_apply(&self, psi: &Element, f: &UniPoly) -> Result<UniPoly> {
        let fe = Element::constant(&self.ctx, f.clone());
        let out = psi.poisson_bracket(&self.hamiltonian)?.poisson_bracket(&fe)?;
        if !out.is_homogeneous_of(0) {
            return Err(CourantError::InternalConsistency("anchor action left the coefficient ring".into()));
        }
        Ok(out.coefficient(&Monomial::one(self.ctx.len())))
    }

    /// The image of `ψ` under the anchor, written as the momentum-linear part
    /// `ρ^I(ψ) p_I` of `{ψ, H}`.
    pub fn anchor_vector(&self, psi: &Element) -> Result<Element> {
        let odd = self.ctx.odd_count();
        let l = self.anchor_rank();
        let v = psi.poisson_bracket(&self.hamiltonian)?;
        Ok(v.filter_terms(|m| {
            let e = m.exponents();
            e[..odd].iter().all(|&x| x == 0) && e[odd..odd + l].iter().map(|&x| x as u32).sum::<u32>() == 1
        }))
    }

    /// `⟨F, ψ_1∧…∧ψ_n⟩` by successive left contraction.
    pub fn evaluate(&self, form: &Element, sections: &[Element]) -> Result<Element> {
        sections.iter().try_fold(form.clone(), |acc, psi| psi.poisson_bracket(&acc))
    }

    /// Coefficient vectors `w` (in the θ basis) with `ρ G w = 0`: the
    /// functions of the sections in ker ρ.
    pub fn naive_kernel_vectors(&self) -> Vec<Vec<Rational>> {
        let r = self.fiber_rank();
        let rg = mat_mul(&self.anchor, &self.inverse_metric);
        if rg.is_empty() {
            return (0..r).map(|i| (0..r).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
        }
        let m = ExactMatrix::new(
            CoefficientRing::Rationals,
            rg.len(),
            r,
            rg.into_iter().flatten().map(UniPoly::constant).collect(),
        )
        .expect("rational matrix");
        let (_, ker) = row_reduce(&m).expect("rational matrix");
        (0..ker.cols())
            .map(|j| (0..r).map(|i| ker.get(i, j).constant_value().expect("rational")).collect())
            .collect()
    }

    /// A rational basis of ker ρ, as degree-1 elements.
    pub fn naive_generators(&self) -> Vec<Element> {
        self.naive_kernel_vectors()
            .into_iter()
            .map(|w| {
                let terms = w.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(c, x)| {
                    let mut m = Monomial::one(self.ctx.len());
                    m.0[c] = 1;
                    (m, UniPoly::constant(x.clone()))
                });
                Element::from_terms(&self.ctx, terms.collect::<Vec<_>>())
            })
            .collect()
    }

    /// Whether `α` lies in the subalgebra generated by ker ρ over R.
    pub fn is_naive(&self, alpha: &Element) -> bool {
        let odd = self.ctx.odd_count();
        if alpha.terms().keys().any(|m| m.exponents()[odd..].iter().any(|&e| e != 0)) {
            return false;
        }
        (0..self.anchor_rank()).all(|i| {
            let mut acc = Element::zero(&self.ctx);
            for a in 0..self.fiber_rank() {
                if !self.anchor[i][a].is_zero() {
                    let term = self.odd(a).poisson_bracket(alpha).expect("same context");
                    acc = &acc + &term.scale(&UniPoly::constant(self.anchor[i][a].clone()));
                }
            }
            acc.is_zero()
        })
    }

    /// The Cartan-formula differential on naive forms, evaluated on all
    /// increasing tuples of frame sections.
    pub fn cartan_differential(&self, alpha: &Element) -> Result<Element> {
        if !self.is_naive(alpha) {
            return Err(CourantError::NotNaive);
        }
        let r = self.fiber_rank();
        let sections: Vec<Element> = (0..r).map(|b| self.section(b)).collect();
        let mut brackets = vec![vec![None; r]; r];
        let mut by_degree: BTreeMap<u32, Element> = BTreeMap::new();
        for (m, c) in alpha.terms() {
            let d = self.ctx.monomial_degree(m);
            let part = by_degree.entry(d).or_insert_with(|| Element::zero(&self.ctx));
            *part = &*part + &Element::monomial(&self.ctx, m.clone(), c.clone());
        }
        let unit = Monomial::one(self.ctx.len());
        let scalar = |e: &Element| -> Result<UniPoly> {
            if !e.is_homogeneous_of(0) {
                return Err(CourantError::InternalConsistency("form evaluation is not a function".into()));
            }
            Ok(e.coefficient(&unit))
        };
        let mut out = Element::zero(&self.ctx);
        for (n, part) in by_degree {
            let n = n as usize;
            for tuple in increasing_tuples(r, n + 1) {
                let mut value = UniPoly::zero();
                for i in 0..=n {
                    let rest: Vec<Element> =
                        tuple.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &b)| sections[b].clone()).collect();
                    let inner = scalar(&self.evaluate(&part, &rest)?)?;
                    let term = self.anchor_apply(&sections[tuple[i]], &inner)?;
                    value = if i % 2 == 0 { value + term } else { value - term };
                }
                for i in 0..=n {
                    for j in i + 1..=n {
                        let (a, b) = (tuple[i], tuple[j]);
                        if brackets[a][b].is_none() {
                            brackets[a][b] = Some(self.derived_bracket_unchecked(&sections[a], &sections[b])?);
                        }
                        let mut args = vec![brackets[a][b].clone().expect("filled")];
                        args.extend(
                            tuple.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| sections[x].clone()),
                        );
                        let term = scalar(&self.evaluate(&part, &args)?)?;
                        value = if (i + j) % 2 == 0 { value + term } else { value - term };
                    }
                }
                if !value.is_zero() {
                    out = &out + &Element::product_of(&self.ctx, &tuple, value);
                }
            }
        }
        Ok(out)
    }

    /// Symbolic check of the Courant axioms on frame sections.
    pub fn axiom_report(&self) -> AxiomReport {
        crate::axioms::report(self)
    }
}

/// The same algebroid in the coordinates `θ' = P θ` (rows of `P` are the new
/// odd generators in terms of the old ones).
pub fn change_frame(model: &CourantModel, p: &[Vec<Rational>]) -> Result<CourantModel> {
    let r = model.fiber_rank();
    if p.len() != r || p.iter().any(|row| row.len() != r) {
        return Err(CourantError::DimensionMismatch(format!("frame change must be {r}x{r}")));
    }
    let p_inv = rational_inverse(p)
        .ok_or_else(|| CourantError::DimensionMismatch("frame change is singular".into()))?;
    let pairing = mat_mul(&mat_mul(p, &model.inverse_metric), &transpose(p, r));
    let metric = rational_inverse(&pairing).ok_or(CourantError::SingularMetric)?;
    let anchor = mat_mul(&model.anchor, &p_inv);
    let mut structure = Vec::new();
    for tuple in increasing_tuples(r, 3) {
        let (i, j, k) = (tuple[0], tuple[1], tuple[2]);
        let mut acc = UniPoly::zero();
        for ([a, b, c], v) in &model.structure {
            for (x, y, z) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                let w = &(&p_inv[*x][i] * &p_inv[*y][j]) * &p_inv[*z][k];
                if w.is_zero() {
                    continue;
                }
                let (neg, _) = sort3(*x, *y, *z).expect("distinct");
                let term = v.scale(&w);
                acc = if neg { acc - term } else { acc + term };
            }
        }
        if !acc.is_zero() {
            structure.push(([i, j, k], acc));
        }
    }
    CourantModel::new(model.name.clone(), model.ring, metric, anchor, model.transverse, structure)
}

pub fn increasing_tuples(r: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            go(i + 1, r, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= r {
        go(0, r, k, &mut Vec::new(), &mut out);
    }
    out
}

/// `f_IJ^K = S_aI S_bJ C_abd G^{dc} ρ^K_c` with `S = ρᵀ(ρρᵀ)⁻¹`, the bracket
/// that the anchor image must carry; zero unless ρ has full row rank.
fn infer_lie_constants(
    anchor: &[Vec<Rational>],
    inv_metric: &[Vec<Rational>],
    structure: &BTreeMap<[usize; 3], UniPoly>,
) -> Result<Vec<Vec<Vec<(usize, Rational)>>>> {
    let l = anchor.len();
    if l == 0 {
        return Ok(Vec::new());
    }
    let r = inv_metric.len();
    let rt = transpose(anchor, r);
    let gram = mat_mul(anchor, &rt);
    let Some(gram_inv) = rational_inverse(&gram) else {
        return Ok(vec![vec![Vec::new(); l]; l]);
    };
    let s = mat_mul(&rt, &gram_inv); // r x l
    let rho_g = mat_mul(anchor, inv_metric); // l x r: (ρG)^K_d = G^{dc} ρ^K_c
    let c_full = |a: usize, b: usize, d: usize| -> UniPoly {
        match sort3(a, b, d) {
            None => UniPoly::zero(),
            Some((neg, idx)) => {
                let v = structure.get(&idx).cloned().unwrap_or_else(UniPoly::zero);
                if neg {
                    -v
                } else {
                    v
                }
            }
        }
    };
    let mut lie = vec![vec![Vec::new(); l]; l];
    for i in 0..l {
        for j in 0..l {
            if i == j {
                continue;
            }
            for k in 0..l {
                let mut acc = UniPoly::zero();
                for a in 0..r {
                    if s[a][i].is_zero() {
                        continue;
                    }
                    for b in 0..r {
                        if s[b][j].is_zero() {
                            continue;
                        }
                        for d in 0..r {
                            if rho_g[k][d].is_zero() {
                                continue;
                            }
                            let c = c_full(a, b, d);
                            if !c.is_zero() {
                                acc += &c.scale(&(&(&s[a][i] * &s[b][j]) * &rho_g[k][d]));
                            }
                        }
                    }
                }
                if acc.is_zero() {
                    continue;
                }
                let v = acc.constant_value().ok_or_else(|| {
                    CourantError::RingMismatch("the bracket on the anchor image must not depend on t".into())
                })?;
                lie[i][j].push((k, v));
            }
        }
    }
    Ok(lie)
}

fn build_hamiltonian(
    ctx: &Arc<GradedContext>,
    anchor: &[Vec<Rational>],
    structure: &BTreeMap<[usize; 3], UniPoly>,
) -> Element {
    let odd = ctx.odd_count();
    let mut terms = Vec::new();
    for (i, row) in anchor.iter().enumerate() {
        for (a, x) in row.iter().enumerate() {
            if !x.is_zero() {
                let mut m = Monomial::one(ctx.len());
                m.0[a] = 1;
                m.0[odd + i] = 1;
                terms.push((m, UniPoly::constant(x.clone())));
            }
        }
    }
    // (1/6) C_abc θ^aθ^bθ^c = sum over a<b<c of C_abc θ^aθ^bθ^c
    for ([a, b, c], v) in structure {
        let mut m = Monomial::one(ctx.len());
        m.0[*a] = 1;
        m.0[*b] = 1;
        m.0[*c] = 1;
        terms.push((m, -v.clone()));
    }
    Element::from_terms(ctx, terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    /// `[φ,[ψ,χ]] = [[φ,ψ],χ] + [ψ,[φ,χ]]`
    Jacobi,
    /// `[φ, fψ] = (ρ(φ)f)ψ + f[φ,ψ]`
    Leibniz,
    /// `⟨[φ,φ],ψ⟩ = ½ ρ(ψ)⟨φ,φ⟩`
    NormalizedSkew,
    /// `ρ(φ)⟨ψ,χ⟩ = ⟨[φ,ψ],χ⟩ + ⟨ψ,[φ,χ]⟩`
    AdInvariance,
    /// `ρ([φ,ψ]) = [ρ(φ),ρ(ψ)]`
    BracketPreservation,
}

impl Axiom {
    pub const ALL: [Axiom; 5] =
        [Axiom::Jacobi, Axiom::Leibniz, Axiom::NormalizedSkew, Axiom::AdInvariance, Axiom::BracketPreservation];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::Jacobi => "jacobi",
            Axiom::Leibniz => "leibniz",
            Axiom::NormalizedSkew => "normalized-skew",
            Axiom::AdInvariance => "ad-invariance",
            Axiom::BracketPreservation => "anchor-bracket",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub cases: usize,
    pub failures: usize,
    /// First failing instance and its nonzero residual.
    pub witness: Option<(String, Element)>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
    pub master_equation: Element,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks.iter().find(|c| c.axiom == axiom).expect("every axiom is checked")
    }
}
